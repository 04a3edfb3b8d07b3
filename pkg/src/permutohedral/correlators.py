"""Matrix correlators of the twisted homology algebra and the commutativity
equations ``dB ^ dB = 0``.

Notation used below:

* ``I`` is a finite, parity-graded index set (:class:`SuperIndexSet`);
  ``Delta_a`` for ``a in I`` are the basis vectors of ``T``.
* ``F = k^{p|q}`` is the fibre; matrices are square of size ``p + q`` and an
  element of ``End F`` is even when block-diagonal, odd when block-off-diagonal.
  The default ``q = 0`` makes every nonzero matrix even.
* A top correlator family assigns a matrix to every index sequence, with
  ``<a_1..a_n> = eps(s) <a_s(1)..a_s(n)>`` where ``eps`` is the Koszul sign of
  the odd entries.  Only one representative per multiset is stored.
* The series ``B = sum_n sum_(a_1..a_n) x^{a_n}...x^{a_1} / n! <a_1..a_n>``
  lives in ``k[x] (x) End F`` with supercommuting coordinates ``x^a``.

Signs follow the total-parity convention: ``d`` is odd, ``dx^a`` has parity
``p(a) + 1``, and ``(w (x) A)(w' (x) A') = (-1)^{|A||w'|} w w' (x) A A'``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from .partitions import (
    OrderedSetPartition,
    apply_permutation,
    as_permutation,
    block_two_partitions,
    enumerate_partitions,
    refine_at,
    separates,
)

Label = Hashable


# --- super index set and matrices ------------------------------------------------

@dataclass(frozen=True)
class SuperIndexSet:
    labels: tuple
    parities: tuple  # 0 even, 1 odd, aligned with labels

    def __init__(self, labels: Iterable[Label], parities: Iterable[int] | Mapping | None = None):
        labels = tuple(labels)
        if len(set(labels)) != len(labels):
            raise ValueError(f"index labels must be distinct: {labels}")
        if parities is None:
            par = (0,) * len(labels)
        elif isinstance(parities, Mapping):
            par = tuple(int(parities[a]) % 2 for a in labels)
        else:
            par = tuple(int(p) % 2 for p in parities)
        if len(par) != len(labels):
            raise ValueError("one parity per label")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "parities", par)

    @classmethod
    def even(cls, labels: Iterable[Label]) -> "SuperIndexSet":
        return cls(labels)

    def parity(self, a: Label) -> int:
        return self.parities[self.labels.index(a)]

    def position(self, a: Label) -> int:
        return self.labels.index(a)

    def is_odd(self, a: Label) -> bool:
        return self.parity(a) == 1

    @property
    def all_even(self) -> bool:
        return not any(self.parities)

    def canonical(self, seq: Sequence[Label]) -> tuple[tuple, int]:
        """Sorted representative of ``seq`` and the Koszul sign relating them.

        Returns sign 0 when an odd label repeats.
        """
        order = sorted(range(len(seq)), key=lambda k: self.position(seq[k]))
        srt = tuple(seq[k] for k in order)
        odd = [a for a in srt if self.is_odd(a)]
        if len(set(odd)) != len(odd):
            return srt, 0
        return srt, koszul_sign([k + 1 for k in order], [self.parity(a) for a in seq])

    def to_json(self) -> list[dict]:
        return [{"label": a, "parity": p} for a, p in zip(self.labels, self.parities)]

    @classmethod
    def from_json(cls, data) -> "SuperIndexSet":
        return cls([d["label"] for d in data], [d.get("parity", 0) for d in data])


def koszul_sign(s: Sequence[int], parities: Sequence[int]) -> int:
    """Sign of the permutation that ``s`` induces on the odd entries.

    ``s`` is in one-line notation over positions ``1..n``: the reordered
    sequence is ``(a_s(1), ..., a_s(n))``; ``parities[i-1]`` is the parity of ``a_i``.
    """
    if len(s) != len(parities) or sorted(s) != list(range(1, len(s) + 1)):
        raise ValueError("s must be a permutation of 1..n matching the parities")
    odd = [x for x in s if parities[x - 1] % 2]
    inv = sum(1 for u, v in itertools.combinations(odd, 2) if u > v)
    return -1 if inv % 2 else 1


@dataclass(frozen=True)
class FSpace:
    even: int
    odd: int = 0

    @property
    def dim(self) -> int:
        return self.even + self.odd

    def zero(self) -> np.ndarray:
        return zeros(self.dim)

    def identity(self) -> np.ndarray:
        return identity(self.dim)

    def parity(self, M: np.ndarray) -> int | None:
        """0 or 1 for homogeneous nonzero matrices, None for zero, -1 if mixed."""
        if not M.any():
            return None
        p = self.even
        diag = M[:p, :p].any() or M[p:, p:].any()
        off = M[:p, p:].any() or M[p:, :p].any()
        if diag and off:
            return -1
        return 0 if diag else 1

    def has_parity(self, M: np.ndarray, parity: int) -> bool:
        got = self.parity(M)
        return got is None or got == parity % 2


def _exact(x):
    # integral entries stay plain ints: exact and far cheaper than Fraction
    x = Fraction(x)
    return int(x) if x.denominator == 1 else x


def as_matrix(rows) -> np.ndarray:
    M = np.array([[_exact(x) for x in row] for row in rows], dtype=object)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("matrix values must be square")
    return M


def zeros(d: int) -> np.ndarray:
    return np.array([[0] * d for _ in range(d)], dtype=object)


def identity(d: int) -> np.ndarray:
    return np.array([[int(i == j) for j in range(d)] for i in range(d)], dtype=object)


def is_zero_matrix(M: np.ndarray) -> bool:
    return not M.any()


def matrix_json(M: np.ndarray) -> list[list[str]]:
    return [[str(x) for x in row] for row in M]


def commutator(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return A.dot(B) - B.dot(A)


# --- top correlators --------------------------------------------------------------

class TopCorrelatorFamily:
    """Sign-symmetric assignment of matrices to index sequences of length ``<= max_n``."""

    def __init__(self, indices: SuperIndexSet, fspace: FSpace | int,
                 values: Mapping[tuple, np.ndarray] | None = None, max_n: int | None = None):
        self.indices = indices
        self.fspace = fspace if isinstance(fspace, FSpace) else FSpace(int(fspace))
        self.values: dict[tuple, np.ndarray] = {}
        longest = 0
        for seq, M in (values or {}).items():
            self._store(tuple(seq), M)
            longest = max(longest, len(seq))
        self.max_n = max_n if max_n is not None else longest

    def _store(self, seq: tuple, M) -> None:
        if not seq:
            raise ValueError("correlators need at least one index")
        M = as_matrix(M)
        if M.shape != (self.fspace.dim, self.fspace.dim):
            raise ValueError(f"matrix for {seq} has shape {M.shape}, expected dim {self.fspace.dim}")
        key, sign = self.indices.canonical(seq)
        if sign == 0:
            if M.any():
                raise ValueError(f"sequence {seq} repeats an odd index but has a nonzero value")
            return
        parity = sum(self.indices.parity(a) for a in seq) % 2
        if not self.fspace.has_parity(M, parity):
            raise ValueError(f"value for {seq} is not homogeneous of parity {parity}")
        if M.any():
            self.values[key] = M if sign == 1 else -M
        else:
            self.values.pop(key, None)

    @property
    def dim(self) -> int:
        return self.fspace.dim

    def top(self, seq: Sequence[Label]) -> np.ndarray:
        """``<Delta_{a_1} ... Delta_{a_n}>`` for an arbitrary ordering."""
        if len(seq) > self.max_n:
            raise ValueError(f"family defined up to {self.max_n} points, asked for {len(seq)}")
        key, sign = self.indices.canonical(seq)
        M = self.values.get(key)
        if sign == 0 or M is None:
            return self.fspace.zero()
        return M if sign == 1 else -M

    def sequences(self, n: int) -> Iterable[tuple]:
        return itertools.product(self.indices.labels, repeat=n)

    def multisets(self, n: int) -> Iterable[tuple]:
        return itertools.combinations_with_replacement(self.indices.labels, n)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TopCorrelatorFamily):
            return NotImplemented
        if (self.indices, self.fspace) != (other.indices, other.fspace):
            return False
        keys = set(self.values) | set(other.values)
        z = self.fspace.zero()
        return all(np.array_equal(self.values.get(k, z), other.values.get(k, z)) for k in keys)

    def restricted(self, n: int) -> "TopCorrelatorFamily":
        return TopCorrelatorFamily(self.indices, self.fspace,
                                   {k: v for k, v in self.values.items() if len(k) <= n}, max_n=n)

    def to_json(self) -> dict:
        data = {"dimF": self.fspace.dim, "indices": self.indices.to_json(), "max_n": self.max_n,
                "top": [{"seq": list(k), "matrix": matrix_json(v)}
                        for k, v in sorted(self.values.items(), key=lambda kv: self._sort_key(kv[0]))]}
        if self.fspace.odd:
            data["dimF_odd"] = self.fspace.odd
        return data

    def _sort_key(self, seq: tuple):
        return (len(seq), [self.indices.position(a) for a in seq])

    @classmethod
    def from_json(cls, data: Mapping) -> "TopCorrelatorFamily":
        indices = SuperIndexSet.from_json(data["indices"])
        odd = int(data.get("dimF_odd", 0))
        fspace = FSpace(int(data["dimF"]) - odd, odd)
        values = {}
        for entry in data.get("top", []):
            seq = tuple(entry["seq"])
            M = as_matrix(entry["matrix"])
            key, sign = indices.canonical(seq)
            if sign == 0:
                if M.any():
                    raise ValueError(f"sequence {seq} repeats an odd index but has a nonzero value")
                continue
            values[key] = values.get(key, fspace.zero()) + (M if sign == 1 else -M)
        return cls(indices, fspace, values, max_n=data.get("max_n"))


def extend_top(top: TopCorrelatorFamily, tau: OrderedSetPartition, indices: Sequence[Label]) -> np.ndarray:
    """``tau<Delta_{a_1}...Delta_{a_n}>``: ordered product of block correlators with a Koszul sign."""
    n = len(indices)
    if tau.label_tuple != tuple(range(1, n + 1)):
        raise ValueError(f"{tau} is not a partition of 1..{n}")
    order = [k for block in tau.blocks for k in block]
    sign = koszul_sign(order, [top.indices.parity(a) for a in indices])
    out = None
    for block in tau.blocks:
        M = top.top([indices[k - 1] for k in block])
        out = M if out is None else out.dot(M)
    return out if sign == 1 else -out


def top_relation(top: TopCorrelatorFamily, indices: Sequence[Label], i: int, j: int) -> np.ndarray:
    """The quadratic relation on top correlators for positions ``i != j``.

    ``sum_{sigma: i sigma j} eps <sigma_1><sigma_2> - sum_{sigma: j sigma i} eps <sigma_1><sigma_2>``
    over 2-partitions ``sigma`` of ``1..n``, evaluated without :func:`extend_top`.
    """
    n = len(indices)
    par = [top.indices.parity(a) for a in indices]
    acc = top.fspace.zero()
    for first_size in range(1, n):
        for first in itertools.combinations(range(1, n + 1), first_size):
            fs = set(first)
            if (i in fs) == (j in fs):
                continue
            second = [k for k in range(1, n + 1) if k not in fs]
            # sign of moving the odd entries of `first` in front of the odd entries of `second`
            swaps = sum(1 for u in first for v in second if v < u and par[u - 1] and par[v - 1])
            term = top.top([indices[k - 1] for k in first]).dot(top.top([indices[k - 1] for k in second]))
            if swaps % 2:
                term = -term
            acc = acc + term if i in fs else acc - term
    return acc


@dataclass
class RelationReport:
    n_max: int
    mode: str
    checked: int = 0
    failures: int = 0
    examples: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def fail(self, payload, keep: int = 10) -> None:
        self.failures += 1
        if len(self.examples) < keep:
            self.examples.append(payload)


def check_linear_relations(top: TopCorrelatorFamily, n_max: int | None = None,
                           tuples: str = "multisets") -> RelationReport:
    """Every alternating refinement sum of extended correlators must vanish.

    ``tuples="multisets"`` checks one index tuple per multiset, which suffices
    because the relations at ``s(a)`` are signed copies of those at ``a``;
    ``tuples="all"`` runs every tuple.
    """
    n_max = top.max_n if n_max is None else n_max
    rep = RelationReport(n_max, tuples)
    for n in range(2, n_max + 1):
        taus = enumerate_partitions(n)
        seqs = top.multisets(n) if tuples == "multisets" else top.sequences(n)
        for seq in seqs:
            cache: dict = {}

            def value(t):
                if t not in cache:
                    cache[t] = extend_top(top, t, seq)
                return cache[t]

            for tau in taus:
                for r, block in enumerate(tau.blocks, start=1):
                    if len(block) < 2:
                        continue
                    alphas = block_two_partitions(block)
                    for i, j in itertools.combinations(block, 2):
                        rep.checked += 1
                        acc = top.fspace.zero()
                        for alpha in alphas:
                            s = separates(alpha, i, j)
                            if s:
                                acc = acc + s * value(refine_at(tau, r, alpha))
                        if acc.any():
                            rep.fail({"seq": list(seq), "tau": tau.to_json(), "block": r,
                                      "i": i, "j": j, "value": matrix_json(acc)})
    return rep


def check_top_relations(top: TopCorrelatorFamily, n_max: int | None = None) -> RelationReport:
    """Only the quadratic relations among top correlators (one-block partitions)."""
    n_max = top.max_n if n_max is None else n_max
    rep = RelationReport(n_max, "top")
    for n in range(2, n_max + 1):
        for seq in top.sequences(n):
            for i, j in itertools.combinations(range(1, n + 1), 2):
                rep.checked += 1
                val = top_relation(top, seq, i, j)
                if val.any():
                    rep.fail({"seq": list(seq), "i": i, "j": j, "value": matrix_json(val)})
    return rep


# --- the representation on H_*T ---------------------------------------------------

@dataclass(frozen=True)
class Generator:
    """``mu(tau) (x) Delta_{a_1} (x) ... (x) Delta_{a_n}``."""

    tau: OrderedSetPartition
    indices: tuple

    def __mul__(self, other: "Generator") -> "Generator":
        from .partitions import concatenate
        return Generator(concatenate(self.tau, other.tau), self.indices + other.indices)


def act_permutation(s, g: Generator, index_set: SuperIndexSet) -> tuple[int, Generator]:
    """Move the tensor slot at position ``i`` to ``s(i)``, carrying its label.

    Returns ``(sign, generator)`` with the Koszul sign of the odd slots.
    """
    n = len(g.indices)
    perm = as_permutation(s, range(1, n + 1))
    inv = {v: k for k, v in perm.items()}
    new_indices = tuple(g.indices[inv[k] - 1] for k in range(1, n + 1))
    sign = koszul_sign([inv[k] for k in range(1, n + 1)], [index_set.parity(a) for a in g.indices])
    return sign, Generator(apply_permutation(perm, g.tau), new_indices)


def representation_apply(top: TopCorrelatorFamily, element) -> np.ndarray:
    """``K`` on a formal combination ``{Generator: coeff}`` (or a single generator)."""
    if isinstance(element, Generator):
        element = {element: 1}
    acc = top.fspace.zero()
    for g, c in element.items():
        acc = acc + Fraction(c) * extend_top(top, g.tau, g.indices)
    return acc


# --- supercommutative monomials and forms ------------------------------------------

class FormAlgebra:
    """Words in ``x^a`` (parity ``p(a)``) and ``dx^a`` (parity ``p(a)+1``), kept canonical.

    A generator is ``(kind, position)`` with kind 0 for ``x`` and 1 for ``dx``;
    canonical words list all ``x`` before all ``dx``, each by index position.
    """

    def __init__(self, indices: SuperIndexSet):
        self.indices = indices

    def parity(self, g: tuple[int, int]) -> int:
        return (self.indices.parities[g[1]] + g[0]) % 2

    def word_parity(self, w: Sequence[tuple[int, int]]) -> int:
        return sum(self.parity(g) for g in w) % 2

    def canonical(self, w: Sequence[tuple[int, int]]) -> tuple[int, tuple]:
        """Sort ``w`` with supercommutation signs; sign 0 if an odd generator repeats."""
        w = list(w)
        sign = 1
        for k in range(1, len(w)):
            m = k
            while m > 0 and w[m - 1] > w[m]:
                if self.parity(w[m - 1]) and self.parity(w[m]):
                    sign = -sign
                w[m - 1], w[m] = w[m], w[m - 1]
                m -= 1
        for a, b in zip(w, w[1:]):
            if a == b and self.parity(a):
                return 0, ()
        return sign, tuple(w)

    def multiply(self, u: Mapping[tuple, np.ndarray], v: Mapping[tuple, np.ndarray],
                 fspace: FSpace, max_x_degree: int | None = None) -> dict:
        out: dict = {}
        for w1, A in u.items():
            pa = fspace.parity(A)
            for w2, C in v.items():
                if max_x_degree is not None and self.x_degree(w1) + self.x_degree(w2) > max_x_degree:
                    continue
                sign, w = self.canonical(w1 + w2)
                if not sign:
                    continue
                if pa == 1 and self.word_parity(w2):
                    sign = -sign
                term = A.dot(C)
                out[w] = out[w] + sign * term if w in out else sign * term
        return {w: M for w, M in out.items() if M.any()}

    def d(self, u: Mapping[tuple, np.ndarray]) -> dict:
        """Exterior derivative with the odd Leibniz rule, coefficients constant."""
        out: dict = {}
        for w, A in u.items():
            lead = 0
            for t, g in enumerate(w):
                if g[0] == 0:
                    sign = -1 if lead % 2 else 1
                    s2, nw = self.canonical(w[:t] + ((1, g[1]),) + w[t + 1:])
                    if s2:
                        out[nw] = out[nw] + sign * s2 * A if nw in out else sign * s2 * A
                lead += self.parity(g)
        return {w: M for w, M in out.items() if M.any()}

    @staticmethod
    def x_degree(w: Sequence[tuple[int, int]]) -> int:
        return sum(1 for g in w if g[0] == 0)


@dataclass
class TruncatedSeries:
    """Matrix-valued supercommutative polynomial truncated above total degree ``order``.

    Terms are keyed by exponent vectors aligned with ``indices.labels``.
    """

    indices: SuperIndexSet
    fspace: FSpace
    order: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for e, M in self.terms.items():
            e = tuple(int(x) for x in e)
            M = M if isinstance(M, np.ndarray) else as_matrix(M)
            if len(e) != len(self.indices.labels):
                raise ValueError(f"exponent vector {e} has the wrong length")
            if sum(e) > self.order:
                raise ValueError(f"term {e} exceeds truncation order {self.order}")
            if any(x > 1 for x, p in zip(e, self.indices.parities) if p):
                raise ValueError(f"odd variable squared in {e}")
            if M.any():
                clean[e] = M
        self.terms = clean

    def words(self) -> dict:
        """Terms as canonical ``x``-words for :class:`FormAlgebra`."""
        return {tuple((0, k) for k, x in enumerate(e) for _ in range(x)): M for e, M in self.terms.items()}

    def coefficient(self, exponents: Sequence[int]) -> np.ndarray:
        return self.terms.get(tuple(exponents), self.fspace.zero())

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        if (self.indices, self.fspace, self.order) != (other.indices, other.fspace, other.order):
            return False
        keys = set(self.terms) | set(other.terms)
        z = self.fspace.zero()
        return all(np.array_equal(self.terms.get(k, z), other.terms.get(k, z)) for k in keys)

    def to_json(self) -> dict:
        data = {"dimF": self.fspace.dim, "indices": self.indices.to_json(), "order": self.order,
                "terms": [{"exponents": list(e), "matrix": matrix_json(M)}
                          for e, M in sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]))]}
        if self.fspace.odd:
            data["dimF_odd"] = self.fspace.odd
        return data

    @classmethod
    def from_json(cls, data: Mapping) -> "TruncatedSeries":
        indices = SuperIndexSet.from_json(data["indices"])
        odd = int(data.get("dimF_odd", 0))
        fspace = FSpace(int(data["dimF"]) - odd, odd)
        terms = {tuple(t["exponents"]): as_matrix(t["matrix"]) for t in data.get("terms", [])}
        return cls(indices, fspace, int(data["order"]), terms)


def _monomial_of_sequence(indices: SuperIndexSet, seq_reversed: Sequence[Label]) -> tuple[int, tuple]:
    """Sign and exponent vector of the product ``x^{b_1} x^{b_2} ...`` in canonical order."""
    alg = FormAlgebra(indices)
    sign, w = alg.canonical([(0, indices.position(b)) for b in seq_reversed])
    e = [0] * len(indices.labels)
    for _, k in w:
        e[k] += 1
    return sign, tuple(e)


def build_series(top: TopCorrelatorFamily, N: int | None = None) -> TruncatedSeries:
    """``B = sum_{n<=N} sum_{(a_1..a_n)} x^{a_n}...x^{a_1} / n! <a_1...a_n>``, summed literally."""
    N = top.max_n if N is None else N
    acc: dict = {}
    for n in range(1, N + 1):
        w = Fraction(1, factorial(n))
        for seq in top.sequences(n):
            M = top.top(seq)
            if not M.any():
                continue
            sign, e = _monomial_of_sequence(top.indices, seq[::-1])
            if not sign:
                continue
            term = (sign * w) * M
            acc[e] = acc[e] + term if e in acc else term
    return TruncatedSeries(top.indices, top.fspace, N, acc)


class SeriesParityError(ValueError):
    pass


def top_from_series(series: TruncatedSeries) -> TopCorrelatorFamily:
    """Read the top correlators back off the coefficients of ``B``.

    With ``c`` the sorted sequence of a monomial and ``m_a`` its multiplicities,
    ``<c> = prod(m_a!) * rev(c) * coeff``, where ``rev`` is the sign of reversing
    the odd entries of ``c``.
    """
    idx = series.indices
    values = {}
    for e, M in series.terms.items():
        n = sum(e)
        if n == 0:
            raise SeriesParityError("the series has a constant term")
        parity = sum(x * p for x, p in zip(e, idx.parities)) % 2
        if not series.fspace.has_parity(M, parity):
            raise SeriesParityError(f"coefficient of {e} is not of parity {parity}; B must be even")
        seq = tuple(a for a, x in zip(idx.labels, e) for _ in range(x))
        sign, e2 = _monomial_of_sequence(idx, seq[::-1])
        assert e2 == e and sign
        mult = 1
        for x in e:
            mult *= factorial(x)
        values[seq] = (sign * mult) * M
    return TopCorrelatorFamily(idx, series.fspace, values, max_n=series.order)


@dataclass
class CommutativityReport:
    order: int
    checked_degree: int
    failures: int = 0
    examples: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failures == 0


def form_dB_wedge_dB(series: TruncatedSeries, max_x_degree: int | None = None) -> dict:
    alg = FormAlgebra(series.indices)
    dB = alg.d(series.words())
    return alg.multiply(dB, dB, series.fspace, max_x_degree)


def check_commutativity(series: TruncatedSeries) -> CommutativityReport:
    """``dB ^ dB`` must vanish in every coefficient of ``x``-degree ``<= order - 2``."""
    if series.order < 2:
        raise ValueError("truncation order must be at least 2")
    deg = series.order - 2
    rep = CommutativityReport(series.order, deg)
    labels = series.indices.labels
    for w, M in form_dB_wedge_dB(series, deg).items():
        rep.failures += 1
        if len(rep.examples) < 10:
            rep.examples.append({
                "x": [labels[k] for kind, k in w if kind == 0],
                "dx": [labels[k] for kind, k in w if kind == 1],
                "value": matrix_json(M),
            })
    return rep


def commutator_form(series: TruncatedSeries, a: Label, b: Label) -> TruncatedSeries:
    """``[d_a B, d_b B]`` for even coordinates: the all-even reading of ``dB ^ dB``."""
    idx = series.indices
    ka, kb = idx.position(a), idx.position(b)

    def partial(k):
        out = {}
        for e, M in series.terms.items():
            if e[k]:
                e2 = list(e)
                e2[k] -= 1
                out[tuple(e2)] = e[k] * M
        return out

    da, db = partial(ka), partial(kb)
    acc: dict = {}
    for e1, A in da.items():
        for e2, C in db.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            if sum(e) > series.order - 2:
                continue
            term = commutator(A, C)
            acc[e] = acc[e] + term if e in acc else term
    return TruncatedSeries(idx, series.fspace, series.order, acc)


# --- fixtures --------------------------------------------------------------------

def build_from_commuting(matrices: Mapping[Label, np.ndarray], n_max: int,
                         indices: SuperIndexSet | None = None) -> TopCorrelatorFamily:
    """``<a_1...a_n> = C_{a_1} ... C_{a_n}`` for pairwise commuting even ``C_a``."""
    labels = tuple(matrices)
    indices = indices or SuperIndexSet.even(labels)
    if not indices.all_even:
        raise ValueError("build_from_commuting needs an all-even index set")
    mats = {a: (M if isinstance(M, np.ndarray) else as_matrix(M)) for a, M in matrices.items()}
    for a, b in itertools.combinations(labels, 2):
        if commutator(mats[a], mats[b]).any():
            raise ValueError(f"matrices for {a} and {b} do not commute")
    d = next(iter(mats.values())).shape[0]
    values = {}
    for n in range(1, n_max + 1):
        for seq in itertools.combinations_with_replacement(indices.labels, n):
            M = identity(d)
            for a in seq:
                M = M.dot(mats[a])
            values[seq] = M
    return TopCorrelatorFamily(indices, FSpace(d), values, max_n=n_max)


def random_matrix(rng: random.Random, d: int, bound: int = 3) -> np.ndarray:
    return as_matrix([[rng.randint(-bound, bound) for _ in range(d)] for _ in range(d)])


def random_commuting_matrices(rng: random.Random, d: int, k: int, bound: int = 2) -> list[np.ndarray]:
    """``k`` polynomials in one random matrix, hence pairwise commuting."""
    M = random_matrix(rng, d)
    powers = [identity(d), M, M.dot(M)]
    out = []
    for _ in range(k):
        C = zeros(d)
        for P in powers:
            C = C + rng.randint(-bound, bound) * P
        out.append(C)
    return out


def random_commuting_family(seed: int, dim: int = 3, n_indices: int = 3, n_max: int = 5) -> TopCorrelatorFamily:
    rng = random.Random(seed)
    labels = list(range(1, n_indices + 1))
    mats = random_commuting_matrices(rng, dim, n_indices)
    return build_from_commuting(dict(zip(labels, mats)), n_max)


def random_commutative_valued_family(seed: int, indices: SuperIndexSet, dim: int = 3,
                                     n_max: int = 5) -> TopCorrelatorFamily:
    """Arbitrary symmetric values inside a commutative matrix algebra (not of product form).

    Odd-parity sequences get zero because ``F`` is purely even here.
    """
    rng = random.Random(seed)
    basis = random_commuting_matrices(rng, dim, 3)
    values = {}
    for n in range(1, n_max + 1):
        for seq in itertools.combinations_with_replacement(indices.labels, n):
            if sum(indices.parity(a) for a in seq) % 2 or not indices.canonical(seq)[1]:
                continue
            M = zeros(dim)
            for P in basis:
                M = M + rng.randint(-2, 2) * P
            values[seq] = M
    return TopCorrelatorFamily(indices, FSpace(dim), values, max_n=n_max)


def random_family(seed: int, indices: SuperIndexSet, fspace: FSpace, n_max: int = 4,
                  bound: int = 2) -> TopCorrelatorFamily:
    """Unconstrained random family respecting only symmetry and parity (usually violates the relations)."""
    rng = random.Random(seed)
    d, p = fspace.dim, fspace.even
    values = {}
    for n in range(1, n_max + 1):
        for seq in itertools.combinations_with_replacement(indices.labels, n):
            par = sum(indices.parity(a) for a in seq) % 2
            M = zeros(d)
            for r in range(d):
                for c in range(d):
                    if ((r < p) != (c < p)) == bool(par):
                        M[r, c] = rng.randint(-bound, bound)
            key, sign = indices.canonical(seq)
            if sign:
                values[seq] = M
    return TopCorrelatorFamily(indices, fspace, values, max_n=n_max)


def block_diagonal_family(seed: int, n_max: int = 5) -> TopCorrelatorFamily:
    """Two even indices acting on complementary 2x2 blocks of a 4-dimensional ``F``.

    Inside each block the values are arbitrary and non-commuting, but every
    mixed sequence is zero, so ``d_1 B`` and ``d_2 B`` commute.
    """
    rng = random.Random(seed)
    indices = SuperIndexSet.even([1, 2])
    values = {}
    for n in range(1, n_max + 1):
        for label, off in ((1, 0), (2, 2)):
            M = zeros(4)
            for r in range(2):
                for c in range(2):
                    M[off + r, off + c] = rng.randint(-3, 3)
            values[(label,) * n] = M
    return TopCorrelatorFamily(indices, FSpace(4), values, max_n=n_max)


def supercommutative_family(seed: int, n_max: int = 4) -> TopCorrelatorFamily:
    """Values in the supercommutative algebra spanned by ``1`` and an odd nilpotent ``Q`` on ``k^{1|1}``.

    Indices: ``a`` even, ``t`` and ``u`` odd.
    """
    rng = random.Random(seed)
    indices = SuperIndexSet(["a", "t", "u"], [0, 1, 1])
    fs = FSpace(1, 1)
    one = identity(2)
    Q = as_matrix([[0, 1], [0, 0]])
    values = {}
    for n in range(1, n_max + 1):
        for seq in itertools.combinations_with_replacement(indices.labels, n):
            key, sign = indices.canonical(seq)
            if not sign:
                continue
            par = sum(indices.parity(a) for a in seq) % 2
            values[seq] = rng.randint(-3, 3) * (Q if par else one)
    return TopCorrelatorFamily(indices, fs, values, max_n=n_max)
