import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import exp_series_coefficients, koszul_by_bubble
from strategies import partitions, permutations_of
from permutohedral.correlators import (
    FSpace,
    FormAlgebra,
    Generator,
    SeriesParityError,
    SuperIndexSet,
    TopCorrelatorFamily,
    TruncatedSeries,
    act_permutation,
    as_matrix,
    block_diagonal_family,
    build_from_commuting,
    build_series,
    check_commutativity,
    check_linear_relations,
    check_top_relations,
    commutator_form,
    extend_top,
    identity,
    koszul_sign,
    random_commutative_valued_family,
    random_commuting_family,
    random_family,
    representation_apply,
    supercommutative_family,
    top_from_series,
    top_relation,
    zeros,
)
from permutohedral.partitions import OrderedSetPartition as P, concatenate, enumerate_partitions, trivial_partition

MIXED = SuperIndexSet(["a", "t", "u"], [0, 1, 1])
EVEN2 = SuperIndexSet.even([1, 2])


def eq(A, B):
    return np.array_equal(A, B)


# --- signs and lookup ------------------------------------------------------------

def test_koszul_sign_examples():
    assert koszul_sign([2, 3, 1], [0, 0, 0]) == 1
    assert koszul_sign([2, 1], [1, 1]) == -1
    assert koszul_sign([2, 3, 1], [1, 1, 0]) == -1
    with pytest.raises(ValueError):
        koszul_sign([1, 2], [1])


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 6).flatmap(lambda n: st.tuples(
    permutations_of(n), st.lists(st.integers(0, 1), min_size=n, max_size=n))))
def test_koszul_sign_matches_bubble_sort(args):
    s, par = args
    assert koszul_sign(s, par) == koszul_by_bubble(s, par)


def test_family_lookup_sign_and_repeated_odd():
    fam = random_family(3, MIXED, FSpace(2), n_max=3)
    D = fam.top(("t", "u"))
    assert eq(fam.top(("u", "t")), -D)
    assert eq(fam.top(("t", "a", "u")), fam.top(("a", "t", "u")))
    assert eq(fam.top(("u", "a", "t")), -fam.top(("a", "t", "u")))
    assert not fam.top(("t", "t")).any()
    assert not fam.top(("t", "a", "t")).any()
    with pytest.raises(ValueError):
        TopCorrelatorFamily(MIXED, FSpace(2), {("t", "t"): identity(2)})
    with pytest.raises(ValueError):
        fam.top(("a",) * 4)


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_lookup_symmetry_under_random_permutations(data):
    fam = random_family(data.draw(st.integers(0, 50)), MIXED, FSpace(1, 1), n_max=4)
    n = data.draw(st.integers(1, 4))
    seq = tuple(data.draw(st.lists(st.sampled_from(MIXED.labels), min_size=n, max_size=n)))
    s = data.draw(permutations_of(n))
    moved = tuple(seq[k - 1] for k in s)
    eps = koszul_by_bubble(s, [MIXED.parity(a) for a in seq])
    assert eq(fam.top(seq), eps * fam.top(moved))


def test_parity_validation_for_super_fibre():
    fs = FSpace(1, 1)
    odd = as_matrix([[0, 1], [0, 0]])
    TopCorrelatorFamily(MIXED, fs, {("t",): odd})
    with pytest.raises(ValueError):
        TopCorrelatorFamily(MIXED, fs, {("a",): odd})
    with pytest.raises(ValueError):
        TopCorrelatorFamily(MIXED, fs, {("a",): as_matrix([[1, 1], [0, 1]])})


# --- extension to all partitions ----------------------------------------------------

def test_extend_top_trivial_and_finest():
    fam = random_commuting_family(1, 3, 3, 4)
    seq = (1, 3, 2, 2)
    assert eq(extend_top(fam, trivial_partition(4), seq), fam.top(seq))
    prod = identity(3)
    for a in seq:
        prod = prod.dot(fam.top((a,)))
    assert eq(extend_top(fam, P([[1], [2], [3], [4]]), seq), prod)


@pytest.mark.parametrize("fam", [random_family(7, MIXED, FSpace(2, 1), n_max=4),
                                 random_family(8, EVEN2, FSpace(3), n_max=4)],
                         ids=["mixed", "even"])
def test_factorization_exhaustive(fam):
    labels = fam.indices.labels
    for m_, n_ in [(1, 1), (1, 2), (2, 1), (2, 2), (1, 3), (3, 1)]:
        for t1, t2 in itertools.product(enumerate_partitions(m_), enumerate_partitions(n_)):
            for s1 in itertools.product(labels, repeat=m_):
                for s2 in itertools.product(labels, repeat=n_):
                    whole = extend_top(fam, concatenate(t1, t2), s1 + s2)
                    assert eq(whole, extend_top(fam, t1, s1).dot(extend_top(fam, t2, s2)))


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_permutation_coinvariance(data):
    fam = random_family(data.draw(st.integers(0, 20)), MIXED, FSpace(1, 1), n_max=4)
    n = data.draw(st.integers(1, 4))
    tau = data.draw(partitions(n=n))
    seq = tuple(data.draw(st.lists(st.sampled_from(MIXED.labels), min_size=n, max_size=n)))
    s = data.draw(permutations_of(n))
    sign, moved = act_permutation(s, Generator(tau, seq), MIXED)
    assert eq(representation_apply(fam, {moved: sign}), representation_apply(fam, Generator(tau, seq)))


def test_representation_multiplicative():
    fam = random_commuting_family(2, 3, 2, 5)
    labels = fam.indices.labels
    for m_, n_ in [(1, 1), (2, 1), (2, 2), (3, 2), (1, 4)]:
        for t1, t2 in itertools.product(enumerate_partitions(m_), enumerate_partitions(n_)):
            s1, s2 = tuple(random.Random(m_).choices(labels, k=m_)), tuple(random.Random(n_).choices(labels, k=n_))
            x, y = Generator(t1, s1), Generator(t2, s2)
            assert eq(representation_apply(fam, x * y),
                      representation_apply(fam, x).dot(representation_apply(fam, y)))


# --- relations --------------------------------------------------------------------

def test_two_point_relation_is_the_commutator():
    C1, C2 = as_matrix([[1, 1], [0, 1]]), as_matrix([[1, 0], [1, 1]])
    fam = TopCorrelatorFamily(EVEN2, FSpace(2), {(1,): C1, (2,): C2}, max_n=2)
    assert eq(top_relation(fam, (1, 2), 1, 2), C1.dot(C2) - C2.dot(C1))
    rep = check_linear_relations(fam, 2)
    assert not rep.ok and rep.failures >= 1
    comm = TopCorrelatorFamily(EVEN2, FSpace(2), {(1,): C1, (2,): C1.dot(C1)}, max_n=2)
    assert check_linear_relations(comm, 2).ok


@pytest.mark.parametrize("seed", range(4))
def test_commuting_families_satisfy_relations(seed):
    fam = random_commuting_family(seed, dim=3, n_indices=3, n_max=4)
    assert check_linear_relations(fam).ok
    assert check_top_relations(fam).ok


def test_multiset_reduction_agrees_with_all_tuples():
    for fam, expect in [(random_commutative_valued_family(1, MIXED, 2, 4), True),
                        (supercommutative_family(2, 4), True),
                        (random_family(3, MIXED, FSpace(1, 1), 3), False)]:
        a = check_linear_relations(fam, tuples="multisets")
        b = check_linear_relations(fam, tuples="all")
        assert a.ok == b.ok == expect


@pytest.mark.parametrize("seed", range(6))
def test_general_relations_iff_top_relations(seed):
    idx = [MIXED, EVEN2][seed % 2]
    fs = [FSpace(1, 1), FSpace(2)][seed % 2]
    for fam in (random_family(seed, idx, fs, 3), supercommutative_family(seed, 3),
                random_commutative_valued_family(seed, MIXED, 2, 3)):
        assert check_linear_relations(fam, tuples="all").ok == check_top_relations(fam).ok


# --- series -----------------------------------------------------------------------

def test_build_series_examples():
    idx = SuperIndexSet.even(["a"])
    C, D = as_matrix([[1, 2], [3, 4]]), as_matrix([[0, 1], [1, 0]])
    s1 = build_series(TopCorrelatorFamily(idx, FSpace(2), {("a",): C}, max_n=2))
    assert set(s1.terms) == {(1,)} and eq(s1.terms[(1,)], C)
    s2 = build_series(TopCorrelatorFamily(idx, FSpace(2), {("a",): C, ("a", "a"): D}, max_n=2))
    assert eq(s2.terms[(2,)], D * Fraction(1, 2))


@pytest.mark.parametrize("seed", range(3))
def test_build_series_matches_matrix_exponential(seed):
    rng = random.Random(seed)
    from permutohedral.correlators import random_commuting_matrices
    mats = dict(zip([1, 2], random_commuting_matrices(rng, 2, 2)))
    fam = build_from_commuting(mats, 4)
    series = build_series(fam, 4)
    oracle = exp_series_coefficients({a: [[int(x) for x in row] for row in M] for a, M in mats.items()}, 4)
    keys = {k for k, v in oracle.items() if any(v.values())}
    assert set(series.terms) == keys
    for mono, entries in oracle.items():
        for (r, c), v in entries.items():
            assert series.coefficient(mono)[r, c] == v


def test_monomial_normalization_is_supercommutative():
    alg = FormAlgebra(MIXED)
    a, t, u = (0, 0), (0, 1), (0, 2)
    assert alg.canonical([u, t]) == (-1, (t, u))
    assert alg.canonical([t, a]) == (1, (a, t))
    assert alg.canonical([t, t])[0] == 0
    assert alg.canonical([a, a]) == (1, (a, a))
    # dx of an even variable is odd, dx of an odd variable is even
    assert alg.canonical([(1, 0), (1, 0)])[0] == 0
    assert alg.canonical([(1, 1), (1, 1)]) == (1, ((1, 1), (1, 1)))


@pytest.mark.parametrize("fam", [random_commuting_family(0, 3, 3, 4), random_family(1, MIXED, FSpace(2, 1), 4),
                                 supercommutative_family(3, 4), block_diagonal_family(4, 4)],
                         ids=["commuting", "random-super", "supercommutative", "block"])
def test_series_round_trip(fam):
    series = build_series(fam, 4)
    back = top_from_series(series)
    assert back == fam.restricted(4)
    assert build_series(back, 4) == series


def test_top_from_series_errors_and_zero():
    zero = TruncatedSeries(MIXED, FSpace(2), 3, {})
    assert top_from_series(zero).values == {}
    with pytest.raises(SeriesParityError):
        top_from_series(TruncatedSeries(EVEN2, FSpace(1), 3, {(0, 0): identity(1)}))
    fs = FSpace(1, 1)
    with pytest.raises(SeriesParityError):
        top_from_series(TruncatedSeries(MIXED, fs, 3, {(0, 1, 0): identity(2)}))
    with pytest.raises(ValueError):
        TruncatedSeries(MIXED, fs, 3, {(0, 2, 0): identity(2)})


def test_commutativity_linear_cases():
    C1, C2 = as_matrix([[1, 1], [0, 1]]), as_matrix([[1, 0], [1, 1]])
    good = TruncatedSeries(EVEN2, FSpace(2), 2, {(1, 0): C1, (0, 1): C1.dot(C1)})
    assert check_commutativity(good).ok
    bad = check_commutativity(TruncatedSeries(EVEN2, FSpace(2), 2, {(1, 0): C1, (0, 1): C2}))
    assert not bad.ok
    assert bad.examples[0]["x"] == [] and sorted(bad.examples[0]["dx"]) == [1, 2]


@pytest.mark.parametrize("seed", range(4))
def test_even_commutativity_is_the_commutator_condition(seed):
    fam = random_family(seed, EVEN2, FSpace(2), 4)
    series = build_series(fam, 4)
    comm = commutator_form(series, 1, 2)
    assert check_commutativity(series).ok == (not comm.terms)


def test_commutativity_needs_order_two():
    with pytest.raises(ValueError):
        check_commutativity(TruncatedSeries(EVEN2, FSpace(1), 1, {}))


# --- the bidirectional property --------------------------------------------------

@settings(max_examples=12, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 3), st.integers(1, 3))
def test_commuting_families_pass_both_sides(seed, dim, k):
    fam = random_commuting_family(seed, dim, k, 4)
    series = build_series(fam, 4)
    assert check_linear_relations(fam).ok
    assert check_commutativity(series).ok
    assert check_linear_relations(top_from_series(series)).ok


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from(["even", "mixed", "super"]))
def test_relations_iff_commutativity(seed, kind):
    if kind == "even":
        fams = [random_family(seed, EVEN2, FSpace(2), 4), block_diagonal_family(seed, 4)]
    elif kind == "mixed":
        fams = [random_family(seed, MIXED, FSpace(2), 3), random_commutative_valued_family(seed, MIXED, 2, 3)]
    else:
        fams = [random_family(seed, MIXED, FSpace(1, 1), 3), supercommutative_family(seed, 3)]
    for fam in fams:
        N = fam.max_n
        assert check_linear_relations(fam, N).ok == check_commutativity(build_series(fam, N)).ok


def test_non_commuting_control_fails_both():
    fam = random_family(0, EVEN2, FSpace(3), 4)
    assert not check_linear_relations(fam).ok
    assert not check_commutativity(build_series(fam)).ok


# --- fixtures and serialization ----------------------------------------------------

def test_build_from_commuting():
    C = as_matrix([[1, 1], [0, 2]])
    fam = build_from_commuting({"c": C}, 3)
    assert eq(fam.top(("c", "c", "c")), C.dot(C).dot(C))
    diag = build_from_commuting({1: as_matrix([[1, 0], [0, 2]]), 2: as_matrix([[3, 0], [0, -1]])}, 3)
    assert check_linear_relations(diag).ok
    with pytest.raises(ValueError):
        build_from_commuting({1: as_matrix([[1, 1], [0, 1]]), 2: as_matrix([[1, 0], [1, 1]])}, 2)
    with pytest.raises(ValueError):
        build_from_commuting({"t": C}, 2, indices=SuperIndexSet(["t"], [1]))


def test_json_round_trips():
    fam = random_family(5, MIXED, FSpace(2, 1), 3)
    data = fam.to_json()
    assert data["dimF"] == 3 and data["dimF_odd"] == 1
    assert TopCorrelatorFamily.from_json(data) == fam
    series = build_series(fam, 3)
    assert TruncatedSeries.from_json(series.to_json()) == series
    assert all(isinstance(x, str) for e in data["top"] for row in e["matrix"] for x in row)


def test_family_from_json_accepts_unsorted_sequences():
    data = {"dimF": 1, "indices": [{"label": "t", "parity": 1}, {"label": "u", "parity": 1}],
            "top": [{"seq": ["u", "t"], "matrix": [["1/2"]]}]}
    fam = TopCorrelatorFamily.from_json(data)
    assert fam.top(("t", "u"))[0, 0] == Fraction(-1, 2)
    assert zeros(1).shape == (1, 1)
