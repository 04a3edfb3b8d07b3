"""The permutohedral fan in ``R^B / R`` and its lattice maps.

Vectors are functions ``B -> Q`` modulo constants, stored canonically with
the value at the largest label shifted to 0.  The cone of an ordered
partition ``tau`` of length ``l+1`` is spanned by the classes of

    chi_{tau_1}, chi_{tau_1} + chi_{tau_2}, ..., chi_{tau_1} + ... + chi_{tau_l}

where ``chi_beta`` is the 0/1 indicator of ``beta``.
"""

from __future__ import annotations

import random
from functools import lru_cache
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Iterable, Mapping, Sequence

from .linalg import ColumnSolver, rank, smith_normal_form
from .partitions import (
    LabelSet,
    OrderedSetPartition,
    PartitionError,
    as_label_set,
    enumerate_partitions,
    good_family,
    partition_from_good_family,
    refines,
)


@dataclass(frozen=True)
class RationalVector:
    labels: tuple[int, ...]
    values: tuple[Fraction, ...]

    def __init__(self, labels: Iterable[int], values: Iterable):
        labels = tuple(labels)
        vals = dict(zip(labels, values))
        if len(vals) != len(labels):
            raise ValueError("labels and values differ in length")
        order = tuple(sorted(labels))
        raw = [vals[x] for x in order]
        if not all(isinstance(v, int) for v in raw):
            raw = [Fraction(v) for v in raw]
        shift = raw[-1]
        object.__setattr__(self, "labels", order)
        object.__setattr__(self, "values", tuple(self._coerce(v - shift) for v in raw))

    @staticmethod
    def _coerce(x):
        return Fraction(x)

    @classmethod
    def from_mapping(cls, f: Mapping[int, object]):
        return cls(list(f), [f[k] for k in f])

    @classmethod
    def indicator(cls, B, beta: Iterable[int]):
        labels = as_label_set(B).labels
        beta = set(beta)
        return cls(labels, [int(x in beta) for x in labels])

    def __getitem__(self, label: int):
        return self.values[self.labels.index(label)]

    def as_dict(self) -> dict[int, Fraction]:
        return dict(zip(self.labels, self.values))

    def __add__(self, other):
        self._check(other)
        return type(self)(self.labels, [a + b for a, b in zip(self.values, other.values)])

    def __sub__(self, other):
        self._check(other)
        return type(self)(self.labels, [a - b for a, b in zip(self.values, other.values)])

    def __neg__(self):
        return type(self)(self.labels, [-a for a in self.values])

    def scale(self, c) -> "RationalVector":
        vals = [c * a for a in self.values]
        if isinstance(self, LatticeVector) and all(Fraction(v).denominator == 1 for v in vals):
            return LatticeVector(self.labels, vals)
        return RationalVector(self.labels, vals)

    def is_zero(self) -> bool:
        return not any(self.values)

    def _check(self, other) -> None:
        if self.labels != other.labels:
            raise ValueError("vectors live over different label sets")

    def reduced_coords(self) -> tuple:
        """Coordinates in the ``n-1`` labels other than the largest one."""
        return self.values[:-1]


class LatticeVector(RationalVector):
    """Integer-valued class in ``Z^B / Z``."""

    @staticmethod
    def _coerce(x):
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise ValueError(f"lattice vector with non-integer value {x}")
            return int(x)
        return x


@dataclass(frozen=True)
class Cone:
    tau: OrderedSetPartition
    generators: tuple[LatticeVector, ...] = field(default=())

    @property
    def dim(self) -> int:
        return len(self.generators)


@lru_cache(maxsize=None)
def cone_of(tau: OrderedSetPartition) -> Cone:
    labels = tau.label_tuple
    gens = []
    acc: list[int] = []
    for block in tau.blocks[:-1]:
        acc.extend(block)
        gens.append(LatticeVector.indicator(labels, acc))
    return Cone(tau, tuple(gens))


def locate(chi: RationalVector) -> OrderedSetPartition:
    """Level sets of ``chi`` ordered by decreasing value."""
    levels: dict = {}
    for x, v in zip(chi.labels, chi.values):
        levels.setdefault(v, []).append(x)
    return OrderedSetPartition(levels[v] for v in sorted(levels, reverse=True))


INTERIOR, BOUNDARY, OUTSIDE = "interior", "boundary", "outside"


@lru_cache(maxsize=None)
def _solver(cone: Cone) -> ColumnSolver:
    return ColumnSolver([g.reduced_coords() for g in cone.generators])


def cone_coordinates(chi: RationalVector, cone: Cone) -> list[Fraction] | None:
    """Coefficients of ``chi`` in the cone generators, or None if outside their span."""
    if chi.labels != cone.tau.label_tuple:
        raise ValueError("vector and cone live over different label sets")
    if not cone.generators:
        return [] if chi.is_zero() else None
    return _solver(cone)(chi.reduced_coords())


def membership(chi: RationalVector, tau: OrderedSetPartition | Cone) -> str:
    cone = tau if isinstance(tau, Cone) else cone_of(tau)
    c = cone_coordinates(chi, cone)
    if c is None or any(x < 0 for x in c):
        return OUTSIDE
    return INTERIOR if all(x > 0 for x in c) else BOUNDARY


def in_closed_cone(chi: RationalVector, tau) -> bool:
    return membership(chi, tau) != OUTSIDE


def is_face(tau_face: OrderedSetPartition, tau: OrderedSetPartition) -> bool:
    """C(tau_face) is a face of C(tau); finer partitions index bigger cones."""
    return refines(tau, tau_face)


def faces_by_generators(tau_face: OrderedSetPartition, tau: OrderedSetPartition) -> bool:
    """Face test on the geometry alone: a simplicial cone's faces are its generator subsets."""
    return set(cone_of(tau_face).generators) <= set(cone_of(tau).generators)


def facets(tau: OrderedSetPartition) -> list[OrderedSetPartition]:
    """Codimension-one faces: merge one adjacent block pair."""
    out = []
    b = tau.blocks
    for i in range(len(b) - 1):
        out.append(OrderedSetPartition(list(b[:i]) + [b[i] + b[i + 1]] + list(b[i + 2:])))
    return out


def common_face(tau1: OrderedSetPartition, tau2: OrderedSetPartition) -> OrderedSetPartition:
    """Index of ``C(tau1) & C(tau2)``: the cone on the shared generators.

    Shared generators are the shared members of the two good families, so the
    result is the finest common coarsening of ``tau1`` and ``tau2``.
    """
    shared = set(good_family(tau1)) & set(good_family(tau2))
    if not shared:
        return OrderedSetPartition([tau1.label_tuple])
    return partition_from_good_family(sorted(shared))


def check_smooth(tau: OrderedSetPartition | Cone) -> bool:
    """All elementary divisors of the generator matrix equal 1."""
    cone = tau if isinstance(tau, Cone) else cone_of(tau)
    if not cone.generators:
        return True
    M = [list(g.reduced_coords()) for g in cone.generators]
    d = smith_normal_form(M)
    return len(d) == len(cone.generators) and all(x == 1 for x in d)


def random_vector(B, rng: random.Random, bound: int = 1000) -> LatticeVector:
    labels = as_label_set(B).labels
    return LatticeVector(labels, [rng.randint(-bound, bound) for _ in labels])


@dataclass
class CompletenessReport:
    n: int
    samples: int
    seed: int
    failures: list = field(default_factory=list)
    maximal_cones_hit: int = 0
    maximal_cones: int = 0

    @property
    def ok(self) -> bool:
        return not self.failures and self.maximal_cones == factorial(self.n)


def check_complete(B, samples: int = 500, seed: int = 0) -> CompletenessReport:
    """Sampled certification that every point lies in the interior of exactly one cone."""
    B = as_label_set(B)
    rng = random.Random(seed)
    by_len: dict[int, list[Cone]] = {}
    for tau in enumerate_partitions(B):
        by_len.setdefault(len(tau), []).append(cone_of(tau))
    rep = CompletenessReport(len(B), samples, seed, maximal_cones=len(by_len[len(B)]))
    hit = set()
    for _ in range(samples):
        chi = random_vector(B, rng)
        tau = locate(chi)
        if membership(chi, tau) != INTERIOR:
            rep.failures.append({"chi": list(chi.values), "tau": tau.to_json(), "why": "not interior"})
            continue
        others = [c.tau for c in by_len[len(tau)] if c.tau != tau and membership(chi, c) == INTERIOR]
        if others:
            rep.failures.append({"chi": list(chi.values), "tau": tau.to_json(),
                                 "why": "interior of several cones",
                                 "also": [o.to_json() for o in others]})
        if len(tau) == len(B):
            hit.add(tau)
    rep.maximal_cones_hit = len(hit)
    return rep


# --- forgetful maps and sections ---------------------------------------------

def forgetful_vector_map(B_big, B_small, chi: RationalVector) -> RationalVector:
    big, small = as_label_set(B_big), as_label_set(B_small)
    if not set(small) <= set(big):
        raise PartitionError(f"{small.labels} is not a subset of {big.labels}")
    if chi.labels != big.labels:
        raise ValueError("vector is not over B_big")
    vals = chi.as_dict()
    return type(chi)(small.labels, [vals[x] for x in small.labels])


def forgetful_partition_map(tau_big: OrderedSetPartition, B_small) -> OrderedSetPartition:
    """Delete forgotten labels, then delete the blocks that became empty."""
    keep = set(as_label_set(B_small))
    if not keep <= set(tau_big.label_tuple):
        raise PartitionError("B_small is not contained in the partitioned set")
    return OrderedSetPartition(kept for kept in ([x for x in b if x in keep] for b in tau_big.blocks) if kept)


def _forgotten(B_small, B_big) -> int:
    extra = set(as_label_set(B_big)) - set(as_label_set(B_small))
    if len(extra) != 1 or not set(as_label_set(B_small)) <= set(as_label_set(B_big)):
        raise PartitionError("B_big must add exactly one label to B_small")
    return extra.pop()


def section_vector_map(j: int, B_small, B_big, chi: RationalVector) -> RationalVector:
    """Extend ``chi`` to ``B_big`` by copying its value at ``j`` to the new label."""
    small = as_label_set(B_small)
    if j not in small:
        raise PartitionError(f"label {j} not in {small.labels}")
    new = _forgotten(small, B_big)
    vals = chi.as_dict()
    vals[new] = vals[j]
    return type(chi)(list(vals), list(vals.values()))


def section_partition_map(j: int, tau: OrderedSetPartition, forgotten: int) -> OrderedSetPartition:
    """The forgotten label joins the block of ``j``."""
    a = tau.block_of(j)
    return OrderedSetPartition([b + (forgotten,) if k == a else b for k, b in enumerate(tau.blocks, 1)])


COMPONENT, NODE = "component", "node"


def fiber_strata(tau: OrderedSetPartition, forgotten: int) -> list[tuple[OrderedSetPartition, str]]:
    """Partitions of ``B u {forgotten}`` lying over ``tau``.

    Adding the new label to a block gives a one-dimensional stratum of the
    fiber (a component); inserting it as a singleton in one of the
    ``len(tau) + 1`` gaps gives a point (a node or an end point).
    """
    if forgotten in tau.label_tuple:
        raise PartitionError(f"label {forgotten} already in {tau}")
    b = list(tau.blocks)
    out = []
    for a in range(len(b)):
        out.append((OrderedSetPartition(b[:a] + [b[a] + (forgotten,)] + b[a + 1:]), COMPONENT))
    for g in range(len(b) + 1):
        out.append((OrderedSetPartition(b[:g] + [(forgotten,)] + b[g:]), NODE))
    return out


# --- export ------------------------------------------------------------------

def fan_json(B) -> dict:
    B = as_label_set(B)
    return {
        "B": list(B.labels),
        "cones": [
            {"tau": tau.to_json(), "generators": [list(g.values) for g in cone_of(tau).generators]}
            for tau in enumerate_partitions(B)
        ],
    }


@dataclass
class FanReport:
    n: int
    cones: int = 0
    not_smooth: list = field(default_factory=list)
    dimension_errors: list = field(default_factory=list)
    face_mismatches: list = field(default_factory=list)
    completeness: CompletenessReport | None = None

    @property
    def ok(self) -> bool:
        return (not self.not_smooth and not self.dimension_errors and not self.face_mismatches
                and self.completeness is not None and self.completeness.ok)


def verify_fan(n: int, samples: int = 500, seed: int = 0) -> FanReport:
    """Smoothness, dimensions, face lattice versus refinement order, and completeness."""
    B = LabelSet.range(n)
    parts = enumerate_partitions(B)
    rep = FanReport(n, cones=len(parts))
    for tau in parts:
        cone = cone_of(tau)
        if not check_smooth(cone):
            rep.not_smooth.append(tau.to_json())
        independent = _rank([g.reduced_coords() for g in cone.generators]) == cone.dim
        if cone.dim != len(tau) - 1 or not independent:
            rep.dimension_errors.append(tau.to_json())
    gens = {tau: set(cone_of(tau).generators) for tau in parts}
    for tau in parts:
        for rho in parts:
            if is_face(rho, tau) != (gens[rho] <= gens[tau]):
                rep.face_mismatches.append([rho.to_json(), tau.to_json()])
    rep.completeness = check_complete(B, samples, seed)
    return rep


def _rank(rows: Sequence[Sequence]) -> int:
    return rank({i: Fraction(x) for i, x in enumerate(r) if x} for r in rows)


@dataclass
class ForgetfulReport:
    n_big: int
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_forgetful(n_big: int) -> ForgetfulReport:
    """Coherence of forgetting the label ``n_big`` with cones, sections and fibers.

    * cones over ``B_big`` map into the cone of the forgotten partition
      (generators into the closed cone, the interior point into its interior);
    * forgetting after the section ``s_j`` is the identity on cone generators
      and interior points, and ``s_j`` maps each cone into the cone of the
      section partition;
    * fibers over ``tau`` have ``2 len(tau) + 1`` strata, all lying over ``tau``.
    """
    big = LabelSet.range(n_big)
    small = LabelSet.range(n_big - 1)
    new = n_big
    rep = ForgetfulReport(n_big)
    for tau in enumerate_partitions(big):
        cone = cone_of(tau)
        image = forgetful_partition_map(tau, small)
        rep.checked += 1
        for g in cone.generators:
            if not in_closed_cone(forgetful_vector_map(big, small, g), image):
                rep.failures.append({"check": "generator image", "tau": tau.to_json()})
        inner = _interior_point(cone)
        if membership(forgetful_vector_map(big, small, inner), image) != INTERIOR:
            rep.failures.append({"check": "interior image", "tau": tau.to_json()})
    for tau in enumerate_partitions(small):
        cone = cone_of(tau)
        points = list(cone.generators) + [_interior_point(cone)]
        for j in small:
            target = section_partition_map(j, tau, new)
            rep.checked += 1
            for chi in points:
                lifted = section_vector_map(j, small, big, chi)
                if forgetful_vector_map(big, small, lifted) != chi:
                    rep.failures.append({"check": "forget after section", "tau": tau.to_json(), "j": j})
                if not in_closed_cone(lifted, target):
                    rep.failures.append({"check": "section cone", "tau": tau.to_json(), "j": j})
        fiber = fiber_strata(tau, new)
        rep.checked += 1
        if len(fiber) != 2 * len(tau) + 1 or len({t for t, _ in fiber}) != len(fiber):
            rep.failures.append({"check": "fiber count", "tau": tau.to_json(), "count": len(fiber)})
        if any(forgetful_partition_map(t, small) != tau for t, _ in fiber):
            rep.failures.append({"check": "fiber lies over tau", "tau": tau.to_json()})
    return rep


def _interior_point(cone: Cone) -> LatticeVector:
    labels = cone.tau.label_tuple
    out = LatticeVector(labels, [0] * len(labels))
    for g in cone.generators:
        out = out + g
    return out
