from math import comb, factorial

import pytest
import sympy as sp

from oracles import eulerian_by_descents, fubini
from permutohedral.enumerative import (
    QPolynomial,
    compositions,
    cross_check,
    eulerian,
    multinomial,
    poincare_gf,
    poincare_ring,
    poincare_strata,
    strata_count_by_length,
)
from permutohedral.partitions import enumerate_partitions

PUBLISHED = {
    1: [1],
    2: [1, 1],
    3: [1, 4, 1],
    4: [1, 11, 11, 1],
    5: [1, 26, 66, 26, 1],
}


def sympy_gf(n):
    q, y = sp.symbols("q y")
    f = (q - 1) / (q - sp.exp((q - 1) * y))
    c = sp.series(f, y, 0, n + 1).removeO().coeff(y, n)
    return sp.Poly(sp.simplify(c * factorial(n)), q).all_coeffs()[::-1]


@pytest.mark.parametrize("n", range(1, 9))
def test_gf_equals_strata(n):
    assert poincare_gf(n) == poincare_strata(n)


@pytest.mark.parametrize("n", range(1, 6))
def test_published_values(n):
    assert poincare_gf(n).as_ints() == PUBLISHED[n]
    assert poincare_strata(n).as_ints() == PUBLISHED[n]


@pytest.mark.parametrize("n", [1, 2, 3, 4, 6])
def test_gf_against_sympy_series(n):
    assert poincare_gf(n).as_ints() == [int(c) for c in sympy_gf(n)]


def test_p6_is_the_eulerian_row():
    assert poincare_gf(6).as_ints() == [1, 57, 302, 302, 57, 1]
    assert repr(poincare_gf(6)) == "q^5+57q^4+302q^3+302q^2+57q+1"


@pytest.mark.parametrize("n", range(1, 9))
def test_euler_characteristic_and_h2(n):
    p = poincare_strata(n)
    assert p(1) == factorial(n)
    assert p(0) == 1
    assert p.is_palindromic() and p.degree == n - 1
    if n >= 2:
        assert p[1] == 2 ** n - n - 1


@pytest.mark.parametrize("n", range(1, 8))
def test_coefficients_count_descents(n):
    assert poincare_strata(n).as_ints() == eulerian_by_descents(n)


def test_h2_rank_up_to_ten():
    for n in range(2, 11):
        assert eulerian(n, 1) == 2 ** n - n - 1


@pytest.mark.parametrize("n", range(1, 6))
def test_ring_method(n):
    assert poincare_ring(n) == poincare_strata(n)


@pytest.mark.parametrize("n", range(1, 6))
def test_strata_counts_match_enumeration(n):
    for length in range(1, n + 1):
        assert strata_count_by_length(n, length) == len(enumerate_partitions(n, length=length))
    assert sum(strata_count_by_length(n, k) for k in range(1, n + 1)) == fubini(n)


def test_compositions_and_multinomial():
    assert sorted(compositions(3)) == [(1, 1, 1), (1, 2), (2, 1), (3,)]
    assert sum(1 for _ in compositions(7)) == 2 ** 6
    assert multinomial((2, 1, 1)) == 12 == comb(4, 2) * 2


def test_qpolynomial_arithmetic():
    p = QPolynomial([1, 2])
    assert p * p == QPolynomial([1, 4, 4])
    assert QPolynomial.q_minus_1_power(2) == QPolynomial([1, -2, 1])
    assert repr(QPolynomial([1, -1, 0, 3])) == "3q^3-q+1"
    assert (p - p) == QPolynomial()


def test_cross_check_report():
    rep = cross_check(8, ring_max=5)
    assert rep.ok, rep.mismatches
    assert rep.polynomials[4] == [1, 11, 11, 1]
