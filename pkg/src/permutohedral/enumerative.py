"""Poincare polynomials of the permutohedral varieties, three ways.

* ``poincare_gf``: ``n!`` times the ``y^n`` coefficient of
  ``(q-1) / (q - exp((q-1) y))``, by exact series arithmetic;
* ``poincare_strata``: the point count over ``F_q`` summed over strata,
  ``sum over compositions (s_1..s_l) of n`` of ``multinomial * (q-1)^(n-l)``;
* ``poincare_ring``: graded dimensions of the presented cohomology ring.

The coefficients are the Eulerian numbers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Iterable, Iterator, Sequence


class QPolynomial:
    """Polynomial in ``q`` with exact rational coefficients, lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        c = [x if isinstance(x, (int, Fraction)) else Fraction(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def q_minus_1_power(cls, k: int) -> "QPolynomial":
        out = cls([1])
        base = cls([-1, 1])
        for _ in range(k):
            out = out * base
        return out

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, i: int):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __add__(self, other: "QPolynomial") -> "QPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        return QPolynomial(self[i] + other[i] for i in range(n))

    def __sub__(self, other: "QPolynomial") -> "QPolynomial":
        return self + other.scale(-1)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not self.coeffs or not other.coeffs:
            return QPolynomial()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return QPolynomial(out)

    __rmul__ = __mul__

    def scale(self, c) -> "QPolynomial":
        return QPolynomial(c * a for a in self.coeffs)

    def __eq__(self, other) -> bool:
        return isinstance(other, QPolynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, q):
        acc = 0
        for a in reversed(self.coeffs):
            acc = acc * q + a
        return acc

    def is_integral(self) -> bool:
        return all(Fraction(a).denominator == 1 for a in self.coeffs)

    def as_ints(self) -> list[int]:
        if not self.is_integral():
            raise ValueError(f"non-integer coefficients in {self}")
        return [int(a) for a in self.coeffs]

    def is_palindromic(self) -> bool:
        return self.coeffs == self.coeffs[::-1]

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            a = self.coeffs[i]
            if not a:
                continue
            mono = "" if i == 0 else ("q" if i == 1 else f"q^{i}")
            if mono and a == 1:
                terms.append(mono)
            elif mono and a == -1:
                terms.append("-" + mono)
            elif mono:
                terms.append(f"{a}{mono}")
            else:
                terms.append(str(a))
        return "+".join(terms).replace("+-", "-")


@dataclass
class SeriesInY:
    """Truncated power series in ``y`` with :class:`QPolynomial` coefficients."""

    coeffs: list[QPolynomial]
    order: int  # coefficients of y^0..y^order are exact

    def __mul__(self, other: "SeriesInY") -> "SeriesInY":
        order = min(self.order, other.order)
        out = [QPolynomial() for _ in range(order + 1)]
        for i, a in enumerate(self.coeffs[:order + 1]):
            for j, b in enumerate(other.coeffs[:order + 1 - i]):
                out[i + j] = out[i + j] + a * b
        return SeriesInY(out, order)

    def inverse_one_minus(self) -> "SeriesInY":
        """``1 / (1 - U)`` for ``U`` without constant term: ``sum_m U^m``."""
        if self.coeffs and self.coeffs[0].coeffs:
            raise ValueError("U must have zero constant term")
        one = SeriesInY([QPolynomial([1])] + [QPolynomial() for _ in range(self.order)], self.order)
        total, power = one, one
        for _ in range(self.order):
            power = power * self
            total = SeriesInY([a + b for a, b in zip(total.coeffs, power.coeffs)], self.order)
        return total


def poincare_gf(n: int) -> QPolynomial:
    if n < 1:
        raise ValueError("n must be at least 1")
    # q - exp((q-1) y) = (q-1) * (1 - U),  U = sum_{k>=1} (q-1)^(k-1) y^k / k!
    U = SeriesInY([QPolynomial()] + [QPolynomial.q_minus_1_power(k - 1).scale(Fraction(1, factorial(k)))
                                     for k in range(1, n + 1)], n)
    series = U.inverse_one_minus()
    p = series.coeffs[n].scale(factorial(n))
    if not p.is_integral():
        raise ArithmeticError(f"series expansion produced non-integer p_{n} = {p}")
    return QPolynomial(p.as_ints())


def compositions(n: int) -> Iterator[tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    for first in range(1, n + 1):
        for rest in compositions(n - first):
            yield (first,) + rest


def multinomial(parts: Sequence[int]) -> int:
    out = factorial(sum(parts))
    for s in parts:
        out //= factorial(s)
    return out


def poincare_strata(n: int) -> QPolynomial:
    if n < 1:
        raise ValueError("n must be at least 1")
    total = QPolynomial()
    for comp in compositions(n):
        total = total + QPolynomial.q_minus_1_power(n - len(comp)).scale(multinomial(comp))
    return total


def poincare_ring(n: int) -> QPolynomial:
    from .ring import graded_dimensions
    return QPolynomial(graded_dimensions(n))


def eulerian(n: int, i: int) -> int:
    if n < 1 or not 0 <= i <= n - 1:
        return 0
    return int(poincare_strata(n)[i])


def strata_count_by_length(n: int, length: int) -> int:
    """Number of length-``length`` ordered partitions of an n-set, from compositions."""
    return sum(multinomial(c) for c in compositions(n) if len(c) == length)


@dataclass
class CrossCheckReport:
    n_max: int
    ring_max: int
    polynomials: dict[int, list[int]] = field(default_factory=dict)
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def cross_check(n_max: int = 8, ring_max: int = 5) -> CrossCheckReport:
    """Compare the methods and check palindromicity, p_n(1) = n!, p_n(0) = 1."""
    rep = CrossCheckReport(n_max, min(n_max, ring_max))
    for n in range(1, n_max + 1):
        gf, st = poincare_gf(n), poincare_strata(n)
        rep.polynomials[n] = st.as_ints()
        if gf != st:
            rep.mismatches.append({"n": n, "check": "gf == strata", "gf": gf.as_ints(), "strata": st.as_ints()})
        if n <= rep.ring_max:
            rg = poincare_ring(n)
            if rg != st:
                rep.mismatches.append({"n": n, "check": "ring == strata", "ring": rg.as_ints(),
                                       "strata": st.as_ints()})
        if not st.is_palindromic():
            rep.mismatches.append({"n": n, "check": "palindromic", "strata": st.as_ints()})
        if st(1) != factorial(n):
            rep.mismatches.append({"n": n, "check": "p(1) = n!", "value": st(1)})
        if st(0) != 1:
            rep.mismatches.append({"n": n, "check": "p(0) = 1", "value": st(0)})
        if st.degree != n - 1:
            rep.mismatches.append({"n": n, "check": "degree n-1", "degree": st.degree})
    return rep
