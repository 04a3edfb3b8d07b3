"""Ordered set partitions and their break/refinement/concatenation calculus.

An ordered set partition of a finite label set ``B`` is a sequence of
nonempty, pairwise disjoint blocks covering ``B``.  The blocks carry a
structure order; the labels inside a block do not, so every block is stored
as an ascending tuple.

Block positions are 1-based throughout this module, matching the usual
mathematical notation ``tau = (tau_1, ..., tau_N)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Iterable, Iterator, Mapping, Sequence, Union


class PartitionError(ValueError):
    """Raised for malformed partitions or mismatched label sets."""


@dataclass(frozen=True)
class LabelSet:
    labels: tuple[int, ...]

    def __init__(self, labels: Iterable[int]):
        labs = tuple(sorted(int(x) for x in labels))
        if not labs:
            raise PartitionError("label set must be nonempty")
        if len(set(labs)) != len(labs):
            raise PartitionError(f"repeated labels in {labs}")
        if labs[0] < 0:
            raise PartitionError("labels must be non-negative integers")
        object.__setattr__(self, "labels", labs)

    @classmethod
    def range(cls, n: int) -> "LabelSet":
        return cls(range(1, n + 1))

    def __iter__(self) -> Iterator[int]:
        return iter(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, x: object) -> bool:
        return x in self.labels


def as_label_set(B: Union[LabelSet, Iterable[int], int]) -> LabelSet:
    """Coerce ``B`` to a :class:`LabelSet`; an int ``n`` means ``{1..n}``."""
    if isinstance(B, LabelSet):
        return B
    if isinstance(B, int):
        return LabelSet.range(B)
    return LabelSet(B)


@dataclass(frozen=True, order=True)
class OrderedSetPartition:
    blocks: tuple[tuple[int, ...], ...]

    def __init__(self, blocks: Iterable[Iterable[int]]):
        canon = tuple(tuple(sorted(int(x) for x in b)) for b in blocks)
        if not canon:
            raise PartitionError("a partition needs at least one block")
        seen: set[int] = set()
        for b in canon:
            if not b:
                raise PartitionError(f"empty block in {canon}")
            if seen.intersection(b) or len(set(b)) != len(b):
                raise PartitionError(f"blocks of {canon} are not disjoint")
            seen.update(b)
        object.__setattr__(self, "blocks", canon)

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return iter(self.blocks)

    def __getitem__(self, a: int) -> tuple[int, ...]:
        """1-based block access: ``tau[1]`` is the first block."""
        if not 1 <= a <= len(self.blocks):
            raise IndexError(f"block index {a} out of range 1..{len(self.blocks)}")
        return self.blocks[a - 1]

    def __repr__(self) -> str:
        inner = ",".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks)
        return f"({inner})"

    @property
    def labels(self) -> LabelSet:
        return LabelSet(itertools.chain.from_iterable(self.blocks))

    @property
    def label_tuple(self) -> tuple[int, ...]:
        return tuple(sorted(itertools.chain.from_iterable(self.blocks)))

    @property
    def grade(self) -> int:
        return len(self.blocks) - 1

    def block_of(self, i: int) -> int:
        """1-based position of the block containing label ``i``."""
        for a, b in enumerate(self.blocks, start=1):
            if i in b:
                return a
        raise PartitionError(f"label {i} not in {self}")

    def to_json(self) -> list[list[int]]:
        return [list(b) for b in self.blocks]

    @classmethod
    def from_json(cls, data: Sequence[Sequence[int]]) -> "OrderedSetPartition":
        return cls(data)


TwoPartition = OrderedSetPartition


def two_partition(blocks: Iterable[Iterable[int]]) -> OrderedSetPartition:
    p = blocks if isinstance(blocks, OrderedSetPartition) else OrderedSetPartition(blocks)
    if len(p) != 2:
        raise PartitionError(f"{p} is not a 2-partition")
    return p


def trivial_partition(B) -> OrderedSetPartition:
    return OrderedSetPartition([as_label_set(B).labels])


def _same_labels(p: OrderedSetPartition, q: OrderedSetPartition) -> None:
    if p.label_tuple != q.label_tuple:
        raise PartitionError(f"{p} and {q} partition different label sets")


# --- enumeration -----------------------------------------------------------

def _ordered_partitions(labels: tuple[int, ...]) -> Iterator[tuple[tuple[int, ...], ...]]:
    if not labels:
        yield ()
        return
    n = len(labels)
    for k in range(1, n + 1):
        for first in itertools.combinations(labels, k):
            rest = tuple(x for x in labels if x not in first)
            for tail in _ordered_partitions(rest):
                yield (first,) + tail


@lru_cache(maxsize=None)
def _enumerate(labels: tuple[int, ...]) -> tuple[OrderedSetPartition, ...]:
    parts = sorted(_ordered_partitions(labels), key=lambda bl: (len(bl), bl))
    return tuple(OrderedSetPartition(bl) for bl in parts)


def enumerate_partitions(B, length: int | None = None) -> list[OrderedSetPartition]:
    """All ordered set partitions of ``B``, sorted by length then lexicographically.

    If ``length`` is given, only partitions with that many blocks are returned
    (still in the global order).
    """
    labels = as_label_set(B).labels
    parts = _enumerate(labels)
    if length is None:
        return list(parts)
    return [p for p in parts if len(p) == length]


def two_partitions(B) -> list[OrderedSetPartition]:
    return enumerate_partitions(B, length=2)


def fubini(n: int) -> int:
    """Number of ordered set partitions of an ``n``-set."""
    a = [1]
    for m in range(1, n + 1):
        a.append(sum(comb(m, k) * a[m - k] for k in range(1, m + 1)))
    return a[n]


# --- order and separation ---------------------------------------------------

def refines(tau: OrderedSetPartition, sigma: OrderedSetPartition) -> bool:
    """``tau <= sigma``: each block of sigma is replaced by an ordered partition of it."""
    _same_labels(tau, sigma)
    it = iter(tau.blocks)
    for s in sigma.blocks:
        target = set(s)
        got: set[int] = set()
        while got != target:
            b = next(it, None)
            if b is None or not target.issuperset(b):
                return False
            got.update(b)
    return next(it, None) is None


def separates(sigma: OrderedSetPartition, i: int, j: int) -> int:
    """Return 1 if ``i sigma j`` (i's block comes first), -1 if ``j sigma i``, 0 if not separated."""
    if i == j:
        raise PartitionError("separates needs two distinct labels")
    a, b = sigma.block_of(i), sigma.block_of(j)
    return (a < b) - (a > b)


# --- good families -----------------------------------------------------------

def good_family(tau: OrderedSetPartition) -> list[OrderedSetPartition]:
    """The nested 2-partitions ``(tau_1 u ... u tau_a, rest)`` for ``a = 1..N``."""
    out = []
    blocks = tau.blocks
    for a in range(1, len(blocks)):
        first = itertools.chain.from_iterable(blocks[:a])
        second = itertools.chain.from_iterable(blocks[a:])
        out.append(OrderedSetPartition([first, second]))
    return out


class NotGoodFamilyError(PartitionError):
    def __init__(self, msg: str, pair: tuple[OrderedSetPartition, OrderedSetPartition] | None = None):
        super().__init__(msg)
        self.pair = pair


def partition_from_good_family(family: Sequence[OrderedSetPartition]) -> OrderedSetPartition:
    family = [two_partition(s) for s in family]
    if not family:
        raise NotGoodFamilyError("empty family has no label set to partition")
    for s in family[1:]:
        _same_labels(s, family[0])
    for s, t in itertools.combinations(family, 2):
        if s == t:
            raise NotGoodFamilyError(f"duplicate member {s}", (s, t))
        a, b = set(s[1]), set(t[1])
        if not (a < b or b < a):
            raise NotGoodFamilyError(f"first blocks of {s} and {t} are incomparable", (s, t))
    family = sorted(family, key=lambda s: len(s[1]))
    blocks = [family[0][1]]
    for prev, cur in zip(family, family[1:]):
        blocks.append(sorted(set(cur[1]) - set(prev[1])))
    blocks.append(family[-1][2])
    return OrderedSetPartition(blocks)


# --- breaks ----------------------------------------------------------------

@dataclass(frozen=True)
class Between:
    """sigma equals the a-th member of tau's good family."""
    a: int


@dataclass(frozen=True)
class At:
    """sigma splits block tau_a by alpha and keeps the rest of tau intact."""
    a: int
    alpha: OrderedSetPartition


@dataclass(frozen=True)
class NoBreak:
    """(tau_b, tau_{b+1}) is the first bad pair."""
    bad_pair: tuple[int, int]


BreakClassification = Union[Between, At, NoBreak]


def _break_code(first: set[int], block: tuple[int, ...]) -> int:
    k = len(first.intersection(block))
    if k == len(block):
        return 2
    return 1 if k else 0


def classify_break(sigma: OrderedSetPartition, tau: OrderedSetPartition) -> BreakClassification:
    two_partition(sigma)
    _same_labels(sigma, tau)
    first = set(sigma[1])
    codes = [_break_code(first, b) for b in tau.blocks]
    n2 = 0
    while n2 < len(codes) and codes[n2] == 2:
        n2 += 1
    rest = codes[n2:]
    if n2 and rest and all(c == 0 for c in rest):
        return Between(n2)
    if rest and rest[0] == 1 and all(c == 0 for c in rest[1:]):
        a = n2 + 1
        block = tau[a]
        alpha = OrderedSetPartition([[x for x in block if x in first],
                                     [x for x in block if x not in first]])
        return At(a, alpha)
    for b in range(1, len(tau)):
        if set(tau[b]) - first and first.intersection(tau[b + 1]):
            return NoBreak((b, b + 1))
    raise AssertionError(f"unclassifiable pair {sigma}, {tau}")  # pragma: no cover


def refine_at(tau: OrderedSetPartition, a: int, alpha: OrderedSetPartition) -> OrderedSetPartition:
    """Replace block ``tau_a`` by the two blocks of ``alpha``."""
    block = tau[a]
    if len(alpha) != 2 or alpha.label_tuple != block:
        raise PartitionError(f"{alpha} is not a 2-partition of block {block}")
    blocks = list(tau.blocks)
    blocks[a - 1:a] = list(alpha.blocks)
    return OrderedSetPartition(blocks)


def star(sigma: OrderedSetPartition, tau: OrderedSetPartition) -> OrderedSetPartition:
    c = classify_break(sigma, tau)
    if not isinstance(c, At):
        raise PartitionError(f"star undefined: {sigma} does not break {tau} at a block ({c})")
    return refine_at(tau, c.a, c.alpha)


def block_two_partitions(block: Sequence[int]) -> list[OrderedSetPartition]:
    """All ordered 2-partitions of a block (empty if the block is a singleton)."""
    if len(block) < 2:
        return []
    return two_partitions(block)


# --- concatenation and relabelling ------------------------------------------

def _segment_length(tau: OrderedSetPartition) -> int:
    labels = tau.label_tuple
    if labels != tuple(range(1, len(labels) + 1)):
        raise PartitionError(f"{tau} is not over an initial segment {{1..n}}")
    return len(labels)


def concatenate(tau1: OrderedSetPartition, tau2: OrderedSetPartition) -> OrderedSetPartition:
    m = _segment_length(tau1)
    _segment_length(tau2)
    return OrderedSetPartition(list(tau1.blocks) + [[x + m for x in b] for b in tau2.blocks])


Permutation = Union[Mapping[int, int], Sequence[int]]


def as_permutation(s: Permutation, labels: Sequence[int]) -> dict[int, int]:
    """Normalize a permutation given as a mapping or in one-line notation over ``labels``."""
    labels = tuple(sorted(labels))
    if isinstance(s, Mapping):
        perm = {int(k): int(v) for k, v in s.items()}
        for x in labels:
            perm.setdefault(x, x)
    else:
        if len(s) != len(labels):
            raise PartitionError("one-line permutation has the wrong length")
        perm = dict(zip(labels, (int(v) for v in s)))
    if set(perm) != set(labels) or sorted(perm.values()) != list(labels):
        raise PartitionError(f"{s} is not a bijection of {labels}")
    return perm


def apply_permutation(s: Permutation, tau: OrderedSetPartition) -> OrderedSetPartition:
    """Block r of the result is the image ``s(tau_r)``."""
    perm = as_permutation(s, tau.label_tuple)
    return OrderedSetPartition([[perm[x] for x in b] for b in tau.blocks])
