import itertools

import pytest

from oracles import eulerian_by_descents
from permutohedral.homology import (
    ModuleElement,
    act_element,
    act_generator,
    cap_maps,
    concat_product,
    flipped_between_action,
    graded_dimensions,
    homology_relations,
    is_zero,
    mu,
    relation_span_matrix,
    s_map,
    unit,
    verify_technical_lemma,
)
from permutohedral.partitions import OrderedSetPartition as P, enumerate_partitions, good_family, two_partitions
from permutohedral.ring import GoodElement, equivalent, m, reduce_word


def test_action_examples():
    for sigma in two_partitions(3):
        assert act_generator(sigma, unit(3)) == mu(sigma)
    assert act_generator(P([[1, 2], [3]]), mu([[1, 2], [3]])) == -mu([[1], [2], [3]])
    assert not act_generator(P([[1, 3], [2]]), mu([[1], [2], [3]]))


def test_act_element_examples():
    x = mu([[2], [1, 3]]) + mu([[1], [3], [2]])
    assert act_element(GoodElement.one(3), x) == x
    for tau in enumerate_partitions(4):
        assert act_element(m(tau), unit(4)) == mu(tau)


def test_relation_span_examples():
    sp2 = relation_span_matrix(2, 1)
    assert sp2.rank == 1
    assert relation_span_matrix(3, 0).rank == 0
    assert is_zero(mu([[1], [2]]) - mu([[2], [1]]))
    assert not is_zero(mu([[1], [2]]) + mu([[2], [1]]))
    assert not is_zero(unit(3))
    assert all(is_zero(r.element) for r in homology_relations(3))


@pytest.mark.parametrize("n", range(1, 6))
def test_relation_rank_vs_eulerian(n):
    eul = eulerian_by_descents(n)
    for k in range(n):
        count = len(enumerate_partitions(n, length=k + 1))
        assert relation_span_matrix(n, k).rank == count - eul[k]
    assert graded_dimensions(n) == eul


def test_inhomogeneous_is_zero_splits_by_grade():
    rel = mu([[1], [2]]) - mu([[2], [1]])
    assert is_zero(rel + rel.scale(0))
    assert not is_zero(rel + unit(2))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_technical_lemma(n):
    rep = verify_technical_lemma(n)
    assert rep.ok, rep.summary()
    assert all(c.checked > 0 for c in rep.checks.values())


def test_negative_control_breaks_descent_or_commute():
    rep = verify_technical_lemma(4, action=flipped_between_action)
    assert rep.checks["descent"].failures + rep.checks["commute"].failures > 0
    assert not rep.ok


@pytest.mark.parametrize("n", [2, 3, 4])
def test_grade_shift(n):
    for sigma in two_partitions(n):
        for tau in enumerate_partitions(n):
            y = act_generator(sigma, mu(tau))
            assert not y or y.grades() == {len(tau)}


@pytest.mark.parametrize("n", [3, 4])
def test_module_action_matches_ring_action_through_s(n):
    """s(l_sigma . mu(tau)) equals l_sigma m(tau) computed by reducing the word in the ring."""
    for sigma in two_partitions(n):
        for tau in enumerate_partitions(n):
            lhs = s_map(act_generator(sigma, mu(tau)))
            rhs = reduce_word([sigma] + good_family(tau), B=n)
            assert equivalent(lhs, rhs)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_cap_maps_are_mutually_inverse(n):
    s, t = cap_maps(n)
    for tau in enumerate_partitions(n):
        assert is_zero(t(s(mu(tau))) - mu(tau))
        assert equivalent(s(t(m(tau))), m(tau))


def test_concat_product_examples():
    assert concat_product(mu([[1]]), mu([[1]])) == mu([[1], [2]])
    small = enumerate_partitions(1) + enumerate_partitions(2)
    for a, b, c in itertools.product(small, repeat=3):
        x, y, z = mu(a), mu(b), mu(c)
        assert concat_product(concat_product(x, y), z) == concat_product(x, concat_product(y, z))


def test_concat_product_descends():
    for rel in homology_relations(2) + homology_relations(3):
        for g in enumerate_partitions(2):
            assert is_zero(concat_product(rel.element, mu(g)))
            assert is_zero(concat_product(mu(g), rel.element))


def test_json_round_trip():
    x = mu([[1], [2]]).scale(2) - mu([[2], [1]])
    data = x.to_json()
    assert set(data) == {"mu_terms"}
    assert ModuleElement.from_json(data) == x
