"""The homology module: symbols ``mu(tau)`` modulo the alternating
refinement relations, with the cohomology ring acting through ``l_sigma``.

The action of a generator on ``mu(tau)`` follows the three break cases:
between two blocks it expands into refinements of the two neighbouring
blocks with sign -1, at a block it refines that block, and otherwise it
vanishes.  :func:`verify_technical_lemma` checks exhaustively that this
table is well defined and factors through the ring.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Callable

from .linalg import RowSpace
from .partitions import (
    Between,
    OrderedSetPartition,
    as_label_set,
    classify_break,
    concatenate,
    enumerate_partitions,
    good_family,
    separates,
    trivial_partition,
    two_partitions,
)
from .ring import (
    Combination,
    GoodElement,
    alternating_refinements,
    crossing,
    generator_on_basis,
    in_relation_span,
    relation_signatures,
    relation_space,
)


class ModuleElement(Combination):
    symbol = "mu"

    def to_json(self) -> dict:
        return {"mu_terms": super().to_json()}

    @classmethod
    def from_json(cls, data, labels=None):
        if isinstance(data, dict):
            data = data["mu_terms"]
        return super().from_json(data, labels=labels)


def mu(blocks) -> ModuleElement:
    tau = blocks if isinstance(blocks, OrderedSetPartition) else OrderedSetPartition(blocks)
    return ModuleElement.basis(tau)


def unit(B) -> ModuleElement:
    """``mu`` of the one-block partition."""
    return ModuleElement.basis(trivial_partition(B))


Action = Callable[..., ModuleElement]


def act_generator(sigma: OrderedSetPartition, x: ModuleElement,
                  ij: tuple[int, int] | None = None) -> ModuleElement:
    """``l_sigma . x``; ``ij`` overrides the ``(min, min)`` choice in the between case."""
    acc: dict = {}
    for tau, c in x.terms.items():
        for t, v in generator_on_basis(sigma, tau, ij).items():
            acc[t] = acc.get(t, 0) + c * v
    return ModuleElement(acc, labels=x.labels)


def act_element(e: GoodElement, x: ModuleElement, action: Action = act_generator) -> ModuleElement:
    """``e . x``: each good monomial acts as its good family, last factor first."""
    acc: dict = {}
    for tau, c in e.terms.items():
        y = x
        for sigma in reversed(good_family(tau)):
            y = action(sigma, y)
        for t, v in y.terms.items():
            acc[t] = acc.get(t, 0) + c * v
    return ModuleElement(acc, labels=x.labels or e.labels)


@dataclass(frozen=True)
class HomologyRelation:
    element: ModuleElement
    provenance: tuple  # (tau, a, i, j)


def homology_relations(B, k: int | None = None) -> list[HomologyRelation]:
    """All deduplicated relations, or only those of grade ``k``."""
    labels = as_label_set(B).labels
    grades = range(1, len(labels)) if k is None else [k]
    return [HomologyRelation(ModuleElement(alternating_refinements(tau, a, i, j)), (tau, a, i, j))
            for g in grades for tau, a, i, j in relation_signatures(labels, g)]


def relation_span_matrix(B, k: int) -> RowSpace:
    """Row-reduced span of the grade-``k`` relations (columns: partition enumeration index)."""
    return relation_space(as_label_set(B).labels, k)


def is_zero(x: ModuleElement) -> bool:
    return in_relation_span(x)


def graded_dimensions(B) -> list[int]:
    labels = as_label_set(B).labels
    return [len(enumerate_partitions(labels, length=k + 1)) - relation_span_matrix(labels, k).rank
            for k in range(len(labels))]


# --- compatibility checks for the module action ---------------------------

@dataclass
class CheckResult:
    name: str
    checked: int = 0
    failures: int = 0
    examples: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def fail(self, payload, keep: int = 20) -> None:
        self.failures += 1
        if len(self.examples) < keep:
            self.examples.append(payload)


@dataclass
class LemmaReport:
    n: int
    checks: dict[str, CheckResult]
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks.values())

    def summary(self) -> dict:
        return {name: {"checked": c.checked, "failures": c.failures, "examples": c.examples}
                for name, c in self.checks.items()}


def _js(x):
    return x.to_json() if hasattr(x, "to_json") else x


def verify_technical_lemma(B, action: Action = act_generator) -> LemmaReport:
    """Run the five compatibility checks on every generator and basis symbol.

    * choice: the between-case expansion does not depend on ``(i, j)``;
    * descent: ``l_sigma`` maps every relation into the relation span;
    * commute: ``l_sigma l_rho - l_rho l_sigma`` kills every ``mu(tau)``;
    * linear: ``sum_{i rho j} l_rho - sum_{j rho i} l_rho`` kills every ``mu(tau)``;
    * quadratic: ``l_sigma l_rho`` kills every ``mu(tau)`` for crossing ``sigma, rho``.
    """
    t0 = time.perf_counter()
    labels = as_label_set(B).labels
    taus = enumerate_partitions(labels)
    sigmas = two_partitions(labels) if len(labels) > 1 else []
    basis = {tau: ModuleElement.basis(tau) for tau in taus}
    checks = {k: CheckResult(k) for k in ("choice", "descent", "commute", "linear", "quadratic")}

    images = {(s, t): action(s, basis[t]) for s in sigmas for t in taus}

    c = checks["choice"]
    for sigma in sigmas:
        for tau in taus:
            br = classify_break(sigma, tau)
            if not isinstance(br, Between):
                continue
            for ij in itertools.product(tau[br.a], tau[br.a + 1]):
                c.checked += 1
                if not is_zero(action(sigma, basis[tau], ij=ij) - images[sigma, tau]):
                    c.fail({"sigma": _js(sigma), "tau": _js(tau), "ij": list(ij)})

    c = checks["descent"]
    for rel in homology_relations(labels):
        for sigma in sigmas:
            c.checked += 1
            if not is_zero(action(sigma, rel.element)):
                c.fail({"sigma": _js(sigma), "relation": [_js(p) for p in rel.provenance]})

    c = checks["commute"]
    for s1, s2 in itertools.combinations(sigmas, 2):
        for tau in taus:
            c.checked += 1
            lhs = action(s1, images[s2, tau])
            rhs = action(s2, images[s1, tau])
            if not is_zero(lhs - rhs):
                c.fail({"sigma": _js(s1), "rho": _js(s2), "tau": _js(tau)})

    c = checks["linear"]
    for i, j in itertools.combinations(labels, 2):
        for tau in taus:
            c.checked += 1
            acc = ModuleElement.zero(labels)
            for rho in sigmas:
                s = separates(rho, i, j)
                if s:
                    acc = acc + images[rho, tau].scale(s)
            if not is_zero(acc):
                c.fail({"i": i, "j": j, "tau": _js(tau)})

    c = checks["quadratic"]
    for s1, s2 in itertools.permutations(sigmas, 2):
        if not crossing(s1, s2):
            continue
        for tau in taus:
            c.checked += 1
            if not is_zero(action(s1, images[s2, tau])):
                c.fail({"sigma": _js(s1), "rho": _js(s2), "tau": _js(tau)})

    return LemmaReport(len(labels), checks, time.perf_counter() - t0)


def flipped_between_action(sigma: OrderedSetPartition, x: ModuleElement,
                           ij: tuple[int, int] | None = None) -> ModuleElement:
    """Negative control: the between-case expansion with its sign flipped."""
    acc: dict = {}
    for tau, c in x.terms.items():
        sign = -1 if isinstance(classify_break(sigma, tau), Between) else 1
        for t, v in generator_on_basis(sigma, tau, ij).items():
            acc[t] = acc.get(t, 0) + sign * c * v
    return ModuleElement(acc, labels=x.labels)


# --- maps to and from the ring ----------------------------------------------

def s_map(x: ModuleElement) -> GoodElement:
    """``mu(tau) -> m(tau)``."""
    return GoodElement(x.terms, labels=x.labels)


def t_map(e: GoodElement) -> ModuleElement:
    """``m(tau) -> m(tau) . 1``."""
    if not e:
        return ModuleElement.zero(e.labels)
    return act_element(e, unit(e.labels))


def cap_maps(B):
    """The pair ``(s, t)`` between the homology module and the ring."""
    return s_map, t_map


def concat_product(x: ModuleElement, y: ModuleElement) -> ModuleElement:
    """Bilinear extension of partition concatenation (labels of ``y`` shifted)."""
    acc: dict = {}
    for t1, c1 in x.terms.items():
        for t2, c2 in y.terms.items():
            t = concatenate(t1, t2)
            acc[t] = acc.get(t, 0) + c1 * c2
    labels = None
    if x.labels and y.labels:
        labels = range(1, len(x.labels) + len(y.labels) + 1)
    return ModuleElement(acc, labels=labels)
