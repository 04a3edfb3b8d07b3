"""The presented cohomology ring of the permutohedral variety.

The ring is generated by symbols ``l_sigma``, one per 2-partition ``sigma``
of ``B``, modulo

* linear relations ``sum_{i sigma j} l_sigma - sum_{j sigma i} l_sigma``;
* products ``l_sigma l_rho`` with ``i sigma j`` and ``j rho i``.

Elements are kept as rational combinations of good monomials ``m(tau)``
(the product of ``l`` over the good family of ``tau``).  Good monomials
span the ring but are not independent, so two combinations are equal in
the ring iff their difference lies in the span of the alternating
refinement relations, which :func:`relation_space` builds per grade.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping

from .linalg import RowSpace
from .partitions import (
    At,
    Between,
    OrderedSetPartition,
    PartitionError,
    as_label_set,
    block_two_partitions,
    classify_break,
    enumerate_partitions,
    good_family,
    refine_at,
    separates,
    trivial_partition,
    two_partition,
)


def _frac(c) -> Fraction:
    if isinstance(c, str):
        return Fraction(c)
    return c if isinstance(c, Fraction) else Fraction(c)


class Combination:
    """Finite rational combination of partitions over one label set."""

    symbol = "x"

    __slots__ = ("terms", "labels")

    def __init__(self, terms: Mapping[OrderedSetPartition, object] | Iterable = (), labels=None):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[OrderedSetPartition, Fraction] = {}
        for tau, c in items:
            c = _frac(c)
            if c:
                acc[tau] = acc.get(tau, 0) + c
        acc = {t: c for t, c in acc.items() if c}
        labs = {t.label_tuple for t in acc}
        if len(labs) > 1:
            raise PartitionError(f"terms over different label sets: {sorted(labs)}")
        if labels is None and labs:
            labels = labs.pop()
        elif labels is not None:
            labels = as_label_set(labels).labels
            if labs and labs.pop() != labels:
                raise PartitionError("terms do not match the declared label set")
        self.terms = acc
        self.labels = labels

    @classmethod
    def basis(cls, tau: OrderedSetPartition, coeff=1):
        return cls({tau: coeff})

    @classmethod
    def one(cls, B):
        return cls({trivial_partition(B): 1})

    @classmethod
    def zero(cls, B=None):
        return cls({}, labels=B)

    def __iter__(self) -> Iterator[tuple[OrderedSetPartition, Fraction]]:
        return iter(self.terms.items())

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def coeff(self, tau: OrderedSetPartition) -> Fraction:
        return self.terms.get(tau, Fraction(0))

    def _labels_with(self, other):
        return self.labels if self.labels is not None else other.labels

    def __add__(self, other):
        if not isinstance(other, Combination):
            return NotImplemented
        return type(self)(itertools.chain(self.terms.items(), other.terms.items()),
                          labels=self._labels_with(other))

    def __sub__(self, other):
        if not isinstance(other, Combination):
            return NotImplemented
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c):
        c = _frac(c)
        return type(self)({t: c * x for t, x in self.terms.items()}, labels=self.labels)

    def __rmul__(self, c):
        if isinstance(c, (int, Fraction)):
            return self.scale(c)
        return NotImplemented

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for tau in sorted(self.terms):
            c = self.terms[tau]
            parts.append(f"{c}*{self.symbol}{tau}")
        return " + ".join(parts)

    def grades(self) -> set[int]:
        return {t.grade for t in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.grades()) <= 1

    def homogeneous_parts(self) -> dict:
        out: dict[int, dict] = {}
        for t, c in self.terms.items():
            out.setdefault(t.grade, {})[t] = c
        return {k: type(self)(v, labels=self.labels) for k, v in out.items()}

    def to_json(self) -> list[dict]:
        return [{"tau": t.to_json(), "coeff": str(self.terms[t])} for t in sorted(self.terms)]

    @classmethod
    def from_json(cls, data, labels=None):
        return cls({OrderedSetPartition(d["tau"]): Fraction(d["coeff"]) for d in data}, labels=labels)


class GoodElement(Combination):
    """Combination of good monomials ``m(tau)``; grade of ``m(tau)`` is ``len(tau) - 1``."""

    symbol = "m"

    def __mul__(self, other):
        if isinstance(other, GoodElement):
            return product(self, other)
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented


def m(blocks) -> GoodElement:
    tau = blocks if isinstance(blocks, OrderedSetPartition) else OrderedSetPartition(blocks)
    return GoodElement.basis(tau)


@dataclass(frozen=True)
class RawMonomial:
    """Monomial in the free generators ``l_sigma``; factors kept as a sorted multiset."""

    factors: tuple[OrderedSetPartition, ...]

    def __init__(self, factors: Iterable):
        fs = tuple(sorted(two_partition(f) for f in factors))
        labs = {f.label_tuple for f in fs}
        if len(labs) > 1:
            raise PartitionError("factors over different label sets")
        object.__setattr__(self, "factors", fs)

    @property
    def degree(self) -> int:
        return len(self.factors)


# --- the relations -----------------------------------------------------------

def alternating_refinements(tau: OrderedSetPartition, a: int, i: int, j: int) -> dict:
    """Coefficients of ``sum_{i alpha j} tau(alpha) - sum_{j alpha i} tau(alpha)``.

    ``alpha`` runs over the 2-partitions of block ``tau_a`` separating ``i`` and ``j``.
    """
    block = tau[a]
    if i == j or i not in block or j not in block:
        raise PartitionError(f"labels {i}, {j} must be distinct members of block {block}")
    out = {}
    for alpha in block_two_partitions(block):
        s = separates(alpha, i, j)
        if s:
            out[refine_at(tau, a, alpha)] = s
    return out


def generator_relation_linear(B, i: int, j: int) -> GoodElement:
    """``sum_{i sigma j} m(sigma) - sum_{j sigma i} m(sigma)`` over 2-partitions of ``B``."""
    tau = trivial_partition(B)
    if i == j:
        raise PartitionError("i and j must differ")
    return GoodElement(alternating_refinements(tau, 1, i, j))


@dataclass(frozen=True)
class RelationVector:
    element: GoodElement
    provenance: tuple  # (i, j, tau, a)


def relation_good(tau: OrderedSetPartition, a: int, i: int, j: int) -> RelationVector:
    return RelationVector(GoodElement(alternating_refinements(tau, a, i, j)), (i, j, tau, a))


def relation_signatures(B, k: int) -> Iterator[tuple]:
    """Deduplicated ``(tau, a, i, j)`` with ``i < j`` producing grade-``k`` relations."""
    n = len(as_label_set(B))
    if not 1 <= k <= n - 1:
        return
    for tau in enumerate_partitions(B, length=k):
        for a, block in enumerate(tau.blocks, start=1):
            for i, j in itertools.combinations(block, 2):
                yield tau, a, i, j


@lru_cache(maxsize=None)
def partition_index(labels: tuple[int, ...]) -> dict[OrderedSetPartition, int]:
    return {t: n for n, t in enumerate(enumerate_partitions(labels))}


@lru_cache(maxsize=None)
def relation_space(labels: tuple[int, ...], k: int) -> RowSpace:
    """Row-reduced span of the grade-``k`` relations, in partition-index coordinates."""
    idx = partition_index(labels)
    space = RowSpace()
    for tau, a, i, j in relation_signatures(labels, k):
        space.add({idx[t]: Fraction(c) for t, c in alternating_refinements(tau, a, i, j).items()})
    return space


def coordinates(x: Combination) -> dict[int, Fraction]:
    idx = partition_index(x.labels)
    return {idx[t]: c for t, c in x.terms.items()}


def in_relation_span(x: Combination) -> bool:
    """True iff every homogeneous part of ``x`` is a combination of relations."""
    if not x:
        return True
    for k, part in x.homogeneous_parts().items():
        if not relation_space(part.labels, k).contains(coordinates(part)):
            return False
    return True


def equivalent(e1: GoodElement, e2: GoodElement) -> bool:
    """Equality in the ring."""
    return in_relation_span(e1 - e2)


def canonical_remainder(x: Combination) -> Combination:
    """Reduce each grade against the echelon relation basis; unique per ring class."""
    if not x:
        return x
    parts = enumerate_partitions(x.labels)
    acc = {}
    for k, part in x.homogeneous_parts().items():
        rem = relation_space(part.labels, k).reduce(coordinates(part))
        acc.update({parts[c]: v for c, v in rem.items()})
    return type(x)(acc, labels=x.labels)


def graded_dimension(B, k: int) -> int:
    labels = as_label_set(B).labels
    n = len(labels)
    if not 0 <= k <= n - 1:
        return 0
    count = len(enumerate_partitions(labels, length=k + 1))
    return count - relation_space(labels, k).rank


def graded_dimensions(B) -> list[int]:
    n = len(as_label_set(B))
    return [graded_dimension(B, k) for k in range(n)]


# --- multiplication ----------------------------------------------------------

def between_expansion(tau: OrderedSetPartition, a: int, ij: tuple[int, int] | None = None) -> dict:
    """Right-hand side of the rule for ``sigma`` breaking ``tau`` between ``tau_a`` and ``tau_{a+1}``.

    Returns ``-sum_{alpha: i in alpha_1} tau(alpha) - sum_{beta: j in beta_2} tau(beta)``
    with ``alpha`` splitting ``tau_a`` and ``beta`` splitting ``tau_{a+1}``.  The
    default choice is ``i = min tau_a``, ``j = min tau_{a+1}``.
    """
    i, j = ij if ij is not None else (min(tau[a]), min(tau[a + 1]))
    if i not in tau[a] or j not in tau[a + 1]:
        raise PartitionError(f"need i in {tau[a]} and j in {tau[a + 1]}")
    out: dict = {}
    for alpha in block_two_partitions(tau[a]):
        if i in alpha[1]:
            out[refine_at(tau, a, alpha)] = -1
    for beta in block_two_partitions(tau[a + 1]):
        if j in beta[2]:
            out[refine_at(tau, a + 1, beta)] = -1
    return out


def generator_on_basis(sigma: OrderedSetPartition, tau: OrderedSetPartition,
                       ij: tuple[int, int] | None = None) -> dict:
    """``l_sigma`` applied to one basis symbol, as a coefficient dict."""
    c = classify_break(sigma, tau)
    if isinstance(c, Between):
        return between_expansion(tau, c.a, ij)
    if isinstance(c, At):
        return {refine_at(tau, c.a, c.alpha): 1}
    return {}


def multiply_generator(sigma: OrderedSetPartition, e: GoodElement,
                       ij: tuple[int, int] | None = None) -> GoodElement:
    acc: dict = {}
    for tau, c in e.terms.items():
        for t, x in generator_on_basis(sigma, tau, ij).items():
            acc[t] = acc.get(t, 0) + c * x
    return GoodElement(acc, labels=e.labels)


def product(e1: GoodElement, e2: GoodElement) -> GoodElement:
    """Ring product, returned as a combination of good monomials."""
    if e1.labels and e2.labels and e1.labels != e2.labels:
        raise PartitionError("factors over different label sets")
    acc: dict = {}
    labels = e1.labels or e2.labels
    for tau, c in e2.terms.items():
        x = e1
        for sigma in reversed(good_family(tau)):
            x = multiply_generator(sigma, x)
        for t, v in x.terms.items():
            acc[t] = acc.get(t, 0) + c * v
    return GoodElement(acc, labels=labels)


def reduce_raw(mono: RawMonomial, B=None) -> GoodElement:
    """Image of a free monomial, folding generators onto 1 from the right."""
    if mono.factors:
        labels = mono.factors[0].label_tuple
    elif B is not None:
        labels = as_label_set(B).labels
    else:
        raise PartitionError("empty monomial needs an explicit label set")
    x = GoodElement.one(labels)
    for sigma in reversed(mono.factors):
        x = multiply_generator(sigma, x)
    return x


def reduce_word(factors, B=None) -> GoodElement:
    """As :func:`reduce_raw` but for an ordered word; the order of folding is kept."""
    factors = [two_partition(f) for f in factors]
    labels = factors[0].label_tuple if factors else as_label_set(B).labels
    x = GoodElement.one(labels)
    for sigma in reversed(factors):
        x = multiply_generator(sigma, x)
    return x


def crossing(sigma: OrderedSetPartition, rho: OrderedSetPartition) -> bool:
    """Some ``i, j`` have ``i sigma j`` and ``j rho i``, so ``l_sigma l_rho`` is a relation."""
    s1, r1 = set(sigma[1]), set(rho[1])
    return not (s1 <= r1 or r1 <= s1)
