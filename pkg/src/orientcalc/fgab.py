"""Finitely generated abelian groups.

A group is stored in the split form ``Z^r x prod Z_{2^p_j} x prod Z_{q_k}``
with odd ``q_k``.  Presentations are integer matrices whose columns are
relations among the row generators, so the group is ``Z^rows / A Z^cols``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from math import prod
from typing import Iterator, Sequence

from .errors import ShapeError


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ShapeError("negative matrix dimension")
        if len(self.entries) != self.rows * self.cols:
            raise ShapeError(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries, "
                f"got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> IntMatrix:
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise ShapeError("ragged matrix rows")
        return cls(len(rows), cols, tuple(int(x) for r in rows for x in r))

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)], n)

    @classmethod
    def diag(cls, values: Sequence[int]) -> IntMatrix:
        n = len(values)
        return cls.from_rows([[values[i] if i == j else 0 for j in range(n)] for i in range(n)], n)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def to_rows(self) -> list[list[int]]:
        return [list(self.entries[i * self.cols:(i + 1) * self.cols]) for i in range(self.rows)]

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise ShapeError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        a, b = self.to_rows(), other.to_rows()
        out = [
            [sum(a[i][k] * b[k][j] for k in range(self.cols)) for j in range(other.cols)]
            for i in range(self.rows)
        ]
        return IntMatrix.from_rows(out, other.cols)

    def det(self) -> int:
        """Exact determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise ShapeError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        m = self.to_rows()
        sign, prev = 1, 1
        for k in range(n - 1):
            if m[k][k] == 0:
                for i in range(k + 1, n):
                    if m[i][k] != 0:
                        m[k], m[i] = m[i], m[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            prev = m[k][k]
        return sign * m[n - 1][n - 1]


def _factorize(n: int) -> dict[int, int]:
    # trial division; orders here are desk-scale
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@dataclass(frozen=True)
class GroupElement:
    free: tuple[int, ...] = ()
    two: tuple[int, ...] = ()
    odd: tuple[int, ...] = ()

    def is_zero(self) -> bool:
        return not any(self.free) and not any(self.two) and not any(self.odd)


@dataclass(frozen=True)
class FgAbGroup:
    free_rank: int = 0
    two_primary: tuple[int, ...] = ()
    odd_orders: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "two_primary", tuple(self.two_primary))
        object.__setattr__(self, "odd_orders", tuple(self.odd_orders))
        if self.free_rank < 0:
            raise ShapeError("negative free rank")
        for p in self.two_primary:
            if p < 1:
                raise ShapeError(f"2-primary exponent must be >= 1, got {p}")
        for q in self.odd_orders:
            if q <= 1 or q % 2 == 0:
                raise ShapeError(f"odd factor order must be odd and > 1, got {q}")
        object.__setattr__(self, "_moduli", tuple(2 ** p for p in self.two_primary))

    @property
    def two_moduli(self) -> tuple[int, ...]:
        return self._moduli

    def torsion_order(self) -> int:
        return prod(self.two_moduli) * prod(self.odd_orders)

    def order(self) -> int | None:
        """Group order, or None when the group is infinite."""
        return None if self.free_rank else self.torsion_order()

    def zero(self) -> GroupElement:
        return GroupElement(
            (0,) * self.free_rank, (0,) * len(self.two_primary), (0,) * len(self.odd_orders)
        )

    def element(self, free=(), two=(), odd=()) -> GroupElement:
        """Build an element, reducing torsion residues into canonical range."""
        x = GroupElement(
            tuple(int(a) for a in free),
            tuple(int(b) % m for b, m in zip(two, self.two_moduli)),
            tuple(int(c) % q for c, q in zip(odd, self.odd_orders)),
        )
        if len(x.two) != len(two) or len(x.odd) != len(odd):
            raise ShapeError("torsion coordinate count does not match group")
        self.check(x)
        return x

    def check(self, x: GroupElement) -> None:
        if (
            len(x.free) != self.free_rank
            or len(x.two) != len(self.two_primary)
            or len(x.odd) != len(self.odd_orders)
        ):
            raise ShapeError(f"element {x} has the wrong shape for {self}")
        for b, m in zip(x.two, self.two_moduli):
            if not 0 <= b < m:
                raise ShapeError(f"residue {b} outside [0, {m})")
        for c, q in zip(x.odd, self.odd_orders):
            if not 0 <= c < q:
                raise ShapeError(f"residue {c} outside [0, {q})")

    def add(self, x: GroupElement, y: GroupElement) -> GroupElement:
        self.check(x)
        self.check(y)
        return self._sum(x, y)

    def _sum(self, x: GroupElement, y: GroupElement) -> GroupElement:
        return GroupElement(
            tuple(a + b for a, b in zip(x.free, y.free)),
            tuple((a + b) % m for a, b, m in zip(x.two, y.two, self.two_moduli)),
            tuple((a + b) % q for a, b, q in zip(x.odd, y.odd, self.odd_orders)),
        )

    def neg(self, x: GroupElement) -> GroupElement:
        self.check(x)
        return GroupElement(
            tuple(-a for a in x.free),
            tuple(-b % m for b, m in zip(x.two, self.two_moduli)),
            tuple(-c % q for c, q in zip(x.odd, self.odd_orders)),
        )

    def scale(self, n: int, x: GroupElement) -> GroupElement:
        self.check(x)
        return GroupElement(
            tuple(n * a for a in x.free),
            tuple(n * b % m for b, m in zip(x.two, self.two_moduli)),
            tuple(n * c % q for c, q in zip(x.odd, self.odd_orders)),
        )

    def free_generator(self, i: int) -> GroupElement:
        z = self.zero()
        free = list(z.free)
        free[i] = 1
        return GroupElement(tuple(free), z.two, z.odd)

    def two_generator(self, j: int) -> GroupElement:
        z = self.zero()
        two = list(z.two)
        two[j] = 1 % self.two_moduli[j]
        return GroupElement(z.free, tuple(two), z.odd)

    def odd_generator(self, k: int) -> GroupElement:
        z = self.zero()
        odd = list(z.odd)
        odd[k] = 1
        return GroupElement(z.free, z.two, tuple(odd))

    def elements(self, free_range: range = range(0, 1)) -> Iterator[GroupElement]:
        """Enumerate elements with free coordinates drawn from ``free_range``."""
        for free in itertools.product(free_range, repeat=self.free_rank):
            for two in itertools.product(*(range(m) for m in self.two_moduli)):
                for odd in itertools.product(*(range(q) for q in self.odd_orders)):
                    yield GroupElement(tuple(free), tuple(two), tuple(odd))

    @classmethod
    def parse(cls, text: str) -> FgAbGroup:
        """Inverse of ``describe``; also accepts ``x`` as separator and composite orders like ``Z_6``."""
        text = text.strip()
        if text in ("0", ""):
            return cls()
        free, two, odd = 0, [], []
        for tok in re.split(r"\s*[×x]\s*", text):
            m = re.fullmatch(r"Z(?:\^(\d+))?|Z_(\d+)", tok.strip())
            if not m:
                raise ShapeError(f"cannot parse group factor {tok!r}")
            if m.group(2) is None:
                free += int(m.group(1) or 1)
                continue
            order = int(m.group(2))
            if order < 2:
                raise ShapeError(f"cyclic factor order must be >= 2, got {order}")
            for prime, e in _factorize(order).items():
                if prime == 2:
                    two.append(e)
                else:
                    odd.append(prime ** e)
        return cls(free, tuple(sorted(two)), tuple(sorted(odd)))

    def describe(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts += [f"Z_{m}" for m in self.two_moduli]
        parts += [f"Z_{q}" for q in self.odd_orders]
        return " × ".join(parts) if parts else "0"


def two_torsion(group: FgAbGroup) -> list[GroupElement]:
    """All elements of order dividing 2: free and odd parts vanish, b_j in {0, 2^(p_j-1)}."""
    free = (0,) * group.free_rank
    odd = (0,) * len(group.odd_orders)
    choices = [(0, m // 2) for m in group.two_moduli]
    return [GroupElement(free, tuple(two), odd) for two in itertools.product(*choices)]


def add(group: FgAbGroup, x: GroupElement, y: GroupElement) -> GroupElement:
    return group.add(x, y)


# ----------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SnfResult:
    presentation: IntMatrix
    snf: IntMatrix
    U: IntMatrix
    V: IntMatrix
    group: FgAbGroup

    @property
    def diagonal(self) -> list[int]:
        return [self.snf[i, i] for i in range(min(self.snf.rows, self.snf.cols))]

    def to_element(self, vector: Sequence[int]) -> GroupElement:
        """Image of a vector of Z^rows in the split coordinates of the cokernel."""
        if len(vector) != self.presentation.rows:
            raise ShapeError("vector length must equal the number of generators")
        U = self.U.to_rows()
        y = [sum(U[i][k] * vector[k] for k in range(len(vector))) for i in range(len(U))]
        diag = self.diagonal + [0] * (len(y) - len(self.diagonal))
        free, two, odd = [], [], []
        for d, v in zip(diag, y):
            if d == 0:
                free.append(v)
            elif d > 1:
                for prime, e in sorted(_factorize(d).items()):
                    if prime == 2:
                        two.append(v % 2 ** e)
                    else:
                        odd.append(v % prime ** e)
        return _regroup(self.group, free, two, odd, diag)


def _regroup(group, free, two, odd, diag) -> GroupElement:
    # factors were appended per diagonal entry; reorder to match the group layout
    two_mods = []
    odd_mods = []
    for d in diag:
        if d > 1:
            for prime, e in sorted(_factorize(d).items()):
                (two_mods if prime == 2 else odd_mods).append(prime ** e)
    two_order = sorted(range(len(two_mods)), key=lambda i: (two_mods[i], i))
    odd_order = sorted(range(len(odd_mods)), key=lambda i: (odd_mods[i], i))
    return group.element(free, [two[i] for i in two_order], [odd[i] for i in odd_order])


def group_from_invariants(diagonal: Sequence[int], rows: int) -> FgAbGroup:
    """Split the cokernel of a diagonal presentation into 2-primary and odd prime-power parts."""
    nonzero = [d for d in diagonal if d != 0]
    free_rank = rows - len(nonzero)
    two, odd = [], []
    for d in nonzero:
        for prime, e in _factorize(abs(d)).items():
            if prime == 2:
                two.append(e)
            else:
                odd.append(prime ** e)
    return FgAbGroup(free_rank, tuple(sorted(two)), tuple(sorted(odd)))


def snf_decompose(presentation: IntMatrix) -> SnfResult:
    """Smith normal form ``U A V = D`` by pivoting on the smallest nonzero entry."""
    m, n = presentation.rows, presentation.cols
    S = presentation.to_rows()
    U = IntMatrix.identity(m).to_rows()
    V = IntMatrix.identity(n).to_rows()

    def swap_rows(i, j):
        S[i], S[j] = S[j], S[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (S, V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        for M in (S, U):
            M[dst] = [a + q * b for a, b in zip(M[dst], M[src])]

    def add_col(dst, src, q):  # col_dst += q * col_src
        for M in (S, V):
            for row in M:
                row[dst] += q * row[src]

    for t in range(min(m, n)):
        while True:
            pivot = None
            for i in range(t, m):
                for j in range(t, n):
                    if S[i][j] and (pivot is None or abs(S[i][j]) < abs(S[pivot[0]][pivot[1]])):
                        pivot = (i, j)
            if pivot is None:
                break
            swap_rows(t, pivot[0])
            swap_cols(t, pivot[1])
            p = S[t][t]
            dirty = False
            for i in range(t + 1, m):
                if S[i][t]:
                    add_row(i, t, -(S[i][t] // p))
                    dirty = dirty or S[i][t] != 0
            for j in range(t + 1, n):
                if S[t][j]:
                    add_col(j, t, -(S[t][j] // p))
                    dirty = dirty or S[t][j] != 0
            if dirty:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if S[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if S[t][t] < 0:
            S[t] = [-a for a in S[t]]
            U[t] = [-a for a in U[t]]

    snf = IntMatrix.from_rows(S, n)
    diag = [S[i][i] for i in range(min(m, n))]
    return SnfResult(
        presentation,
        snf,
        IntMatrix.from_rows(U, m),
        IntMatrix.from_rows(V, n),
        group_from_invariants(diag, m),
    )


def is_smith_normal_form(D: IntMatrix) -> bool:
    for i in range(D.rows):
        for j in range(D.cols):
            if i != j and D[i, j]:
                return False
    diag = [D[i, i] for i in range(min(D.rows, D.cols))]
    if any(d < 0 for d in diag):
        return False
    for a, b in zip(diag, diag[1:]):
        if a == 0 and b != 0:
            return False
        if a and b % a:
            return False
    return True
