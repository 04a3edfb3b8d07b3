"""Exact linear algebra over Q and Z.

Vectors are sparse dicts ``{column: Fraction}``.  :class:`RowSpace` keeps a
reduced echelon basis incrementally, so membership tests are one reduction
pass and the relation spans used by the ring and homology modules can be
built once and shared.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

SparseVec = dict


def _clean(v: Mapping) -> dict:
    return {k: Fraction(c) for k, c in v.items() if c}


class RowSpace:
    """Row span of a set of sparse vectors, stored in reduced echelon form.

    Each stored row has pivot coefficient 1 and no other stored row has a
    nonzero entry in its pivot column.  Columns are arbitrary hashables; the
    pivot of a row is its smallest column under ``key``.
    """

    def __init__(self, rows: Iterable[Mapping] = (), key=None):
        self._key = key
        self._rows: dict[Hashable, dict] = {}
        for r in rows:
            self.add(r)

    def __len__(self) -> int:
        return len(self._rows)

    @property
    def rank(self) -> int:
        return len(self._rows)

    def _pivot(self, v: Mapping) -> Hashable:
        return min(v, key=self._key) if self._key else min(v)

    def reduce(self, v: Mapping) -> dict:
        """Remainder of ``v`` after eliminating every pivot column."""
        w = _clean(v)
        for col in [c for c in w if c in self._rows]:
            c = w.get(col)
            if not c:
                continue
            for k, x in self._rows[col].items():
                y = w.get(k, 0) - c * x
                if y:
                    w[k] = y
                else:
                    w.pop(k, None)
        return w

    def add(self, v: Mapping) -> bool:
        """Insert ``v``; return True if it enlarged the span."""
        w = self.reduce(v)
        if not w:
            return False
        p = self._pivot(w)
        inv = 1 / w[p]
        w = {k: x * inv for k, x in w.items()}
        for row in self._rows.values():
            c = row.get(p)
            if c:
                for k, x in w.items():
                    y = row.get(k, 0) - c * x
                    if y:
                        row[k] = y
                    else:
                        row.pop(k, None)
        self._rows[p] = w
        return True

    def contains(self, v: Mapping) -> bool:
        return not self.reduce(v)

    def rows(self) -> list[dict]:
        return [dict(self._rows[p]) for p in sorted(self._rows, key=self._key)]

    def pivots(self) -> list:
        return sorted(self._rows, key=self._key)


def rank(rows: Iterable[Mapping]) -> int:
    return RowSpace(rows).rank


def solve(columns: Sequence[Sequence], target: Sequence) -> list[Fraction] | None:
    """Exact solution ``c`` of ``sum_i c_i columns[i] = target``, or None.

    The columns must be linearly independent for the answer to be unique;
    dependent columns get coefficient 0 on their free variables.
    """
    m = len(target)
    k = len(columns)
    A = [[Fraction(columns[j][i]) for j in range(k)] + [Fraction(target[i])] for i in range(m)]
    piv_cols = []
    r = 0
    for c in range(k):
        p = next((i for i in range(r, m) if A[i][c]), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(m):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        piv_cols.append(c)
        r += 1
        if r == m:
            break
    if any(A[i][k] for i in range(r, m)):
        return None
    sol = [Fraction(0)] * k
    for i, c in enumerate(piv_cols):
        sol[c] = A[i][k]
    return sol


def smith_normal_form(M: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero elementary divisors of an integer matrix (diagonal of its SNF)."""
    A = [[int(x) for x in row] for row in M]
    if not A or not A[0]:
        return []
    m, n = len(A), len(A[0])
    divisors = []
    t = 0
    while t < min(m, n):
        entries = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
        if not entries:
            break
        _, pi, pj = min(entries)
        A[t], A[pi] = A[pi], A[t]
        for row in A:
            row[t], row[pj] = row[pj], row[t]
        while True:
            done = True
            for i in range(t + 1, m):
                q = A[i][t] // A[t][t]
                if q:
                    A[i] = [x - q * y for x, y in zip(A[i], A[t])]
                if A[i][t]:
                    done = False
            for j in range(t + 1, n):
                q = A[t][j] // A[t][t]
                if q:
                    for row in A:
                        row[j] -= q * row[t]
                if A[t][j]:
                    done = False
            if done:
                # the pivot must also divide every remaining entry
                bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                            if A[i][j] % A[t][t]), None)
                if bad is None:
                    break
                A[t] = [x + y for x, y in zip(A[t], A[bad[0]])]
                continue
            entries = [(abs(A[i][t]), i, t) for i in range(t, m) if A[i][t]]
            entries += [(abs(A[t][j]), t, j) for j in range(t, n) if A[t][j]]
            _, pi, pj = min(entries)
            A[t], A[pi] = A[pi], A[t]
            for row in A:
                row[t], row[pj] = row[pj], row[t]
        divisors.append(abs(A[t][t]))
        t += 1
    return divisors


class ColumnSolver:
    """Repeated exact solves against a fixed set of independent columns.

    The columns are factored once: ``k`` pivot rows give an invertible square
    block whose inverse yields the unique candidate coefficients, which are
    then checked against all rows.
    """

    def __init__(self, columns: Sequence[Sequence]):
        self.k = len(columns)
        self.m = len(columns[0]) if columns else 0
        self.A = [[Fraction(columns[j][i]) for j in range(self.k)] for i in range(self.m)]
        space = RowSpace()
        self.rows: list[int] = []
        for i, row in enumerate(self.A):
            if space.add({j: x for j, x in enumerate(row) if x}):
                self.rows.append(i)
        if len(self.rows) != self.k:
            raise ValueError("columns are linearly dependent")
        square = [self.A[i] for i in self.rows]
        cols = [[square[r][c] for r in range(self.k)] for c in range(self.k)]
        inv_cols = [solve(cols, [int(r == t) for r in range(self.k)]) for t in range(self.k)]
        self.inv = [[_demote(inv_cols[t][s]) for t in range(self.k)] for s in range(self.k)]
        self.A = [[_demote(x) for x in row] for row in self.A]

    def __call__(self, target: Sequence) -> list | None:
        t = [_demote(x) for x in target]
        sub = [t[i] for i in self.rows]
        c = [sum(row[s] * sub[s] for s in range(self.k)) for row in self.inv]
        for i in range(self.m):
            if sum(self.A[i][j] * c[j] for j in range(self.k)) != t[i]:
                return None
        return c


def _demote(x):
    """Integers stay plain ints so unimodular solves avoid Fraction overhead."""
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x
