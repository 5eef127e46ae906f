"""Exact integer matrix algebra: Smith normal form with unimodular
transforms, abelian invariants, and integer linear solving.

All arithmetic uses Python's arbitrary-precision integers; intermediate
entry blow-up in Smith reduction is expected and harmless here.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

__all__ = [
    "IntMatrix",
    "SmithDecomposition",
    "AbelianInvariants",
    "smith_normal_form",
    "abelian_invariants",
    "solve_integer",
    "invert_unimodular",
]


class IntMatrix:
    """Immutable exact integer matrix, row-major."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Sequence[int]):
        entries = tuple(int(e) for e in entries)
        if len(entries) != rows * cols:
            raise ValueError("entry count does not match dimensions")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", entries)

    def __setattr__(self, *a):
        raise AttributeError("IntMatrix is immutable")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        nrows = len(rows)
        if nrows == 0:
            return cls(0, cols or 0, ())
        ncols = len(rows[0])
        flat = []
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged rows")
            flat.extend(r)
        return cls(nrows, ncols, flat)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def zero(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def __eq__(self, other):
        return (isinstance(other, IntMatrix) and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self):
        return f"IntMatrix({self.to_rows()!r})"

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows,
                         tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)))

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        a, b = self.to_rows(), other.to_rows()
        out = []
        for i in range(self.rows):
            ai = a[i]
            for j in range(other.cols):
                out.append(sum(ai[k] * b[k][j] for k in range(self.cols)))
        return IntMatrix(self.rows, other.cols, out)

    def mul_vector(self, v: Sequence[int]) -> list[int]:
        if self.cols != len(v):
            raise ValueError("dimension mismatch")
        return [sum(self[i, k] * v[k] for k in range(self.cols)) for i in range(self.rows)]

    def diagonal(self) -> list[int]:
        return [self[i, i] for i in range(min(self.rows, self.cols))]

    def determinant(self) -> int:
        """Exact determinant via fraction-free Bareiss elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        m = self.to_rows()
        sign = 1
        prev = 1
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


class SmithDecomposition:
    """U * A * V = D with U, V unimodular and D the invariant-factor
    diagonal (nonnegative, each dividing the next, zeros trailing)."""

    __slots__ = ("U", "D", "V")

    def __init__(self, U: IntMatrix, D: IntMatrix, V: IntMatrix):
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "V", V)

    def __setattr__(self, *a):
        raise AttributeError("SmithDecomposition is immutable")

    def invariant_factors(self) -> list[int]:
        return [d for d in self.D.diagonal() if d != 0]

    @property
    def rank(self) -> int:
        return len(self.invariant_factors())

    def __repr__(self):
        return f"SmithDecomposition(diag={self.D.diagonal()!r})"


class AbelianInvariants:
    """Free rank plus the torsion divisibility chain of a f.g. abelian group."""

    __slots__ = ("free_rank", "torsion")

    def __init__(self, free_rank: int, torsion: Sequence[int]):
        torsion = tuple(int(t) for t in torsion)
        for t in torsion:
            if t < 2:
                raise ValueError("torsion entries must be >= 2")
        for a, b in zip(torsion, torsion[1:]):
            if b % a:
                raise ValueError("torsion entries must form a divisibility chain")
        object.__setattr__(self, "free_rank", free_rank)
        object.__setattr__(self, "torsion", torsion)

    def __setattr__(self, *a):
        raise AttributeError("AbelianInvariants is immutable")

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def __eq__(self, other):
        return (isinstance(other, AbelianInvariants)
                and self.free_rank == other.free_rank and self.torsion == other.torsion)

    def __hash__(self):
        return hash((self.free_rank, self.torsion))

    def __repr__(self):
        return f"AbelianInvariants(free_rank={self.free_rank}, torsion={list(self.torsion)})"


class _Worker:
    """Mutable Smith elimination state with transform bookkeeping.

    Row operations update U (and U_inv by the inverse column operation);
    column operations update V (and V_inv).  Pivoting is deterministic:
    smallest nonzero absolute value, ties broken by lowest (row, col).
    """

    def __init__(self, a: IntMatrix):
        self.m = a.to_rows()
        self.nr, self.nc = a.rows, a.cols
        self.u = IntMatrix.identity(self.nr).to_rows()
        self.u_inv = IntMatrix.identity(self.nr).to_rows()
        self.v = IntMatrix.identity(self.nc).to_rows()
        self.v_inv = IntMatrix.identity(self.nc).to_rows()

    # row ops act on the left: M <- E M, U <- E U, U_inv <- U_inv E^-1
    def row_swap(self, i, j):
        if i == j:
            return
        self.m[i], self.m[j] = self.m[j], self.m[i]
        self.u[i], self.u[j] = self.u[j], self.u[i]
        for row in self.u_inv:
            row[i], row[j] = row[j], row[i]

    def row_negate(self, i):
        self.m[i] = [-x for x in self.m[i]]
        self.u[i] = [-x for x in self.u[i]]
        for row in self.u_inv:
            row[i] = -row[i]

    def row_add(self, i, j, q):
        """row_i += q * row_j (i != j)."""
        if q == 0:
            return
        mi, mj = self.m[i], self.m[j]
        for k in range(self.nc):
            mi[k] += q * mj[k]
        ui, uj = self.u[i], self.u[j]
        for k in range(self.nr):
            ui[k] += q * uj[k]
        for row in self.u_inv:
            row[j] -= q * row[i]

    # column ops act on the right: M <- M E, V <- V E, V_inv <- E^-1 V_inv
    def col_swap(self, i, j):
        if i == j:
            return
        for row in self.m:
            row[i], row[j] = row[j], row[i]
        for row in self.v:
            row[i], row[j] = row[j], row[i]
        self.v_inv[i], self.v_inv[j] = self.v_inv[j], self.v_inv[i]

    def col_negate(self, i):
        for row in self.m:
            row[i] = -row[i]
        for row in self.v:
            row[i] = -row[i]
        self.v_inv[i] = [-x for x in self.v_inv[i]]

    def col_add(self, i, j, q):
        """col_i += q * col_j (i != j)."""
        if q == 0:
            return
        for row in self.m:
            row[i] += q * row[j]
        for row in self.v:
            row[i] += q * row[j]
        vi, vj = self.v_inv[i], self.v_inv[j]
        for k in range(self.nc):
            vj[k] -= q * vi[k]

    def pivot(self, s):
        best = None
        for i in range(s, self.nr):
            row = self.m[i]
            for j in range(s, self.nc):
                x = row[j]
                if x != 0:
                    a = abs(x)
                    if best is None or a < best[0]:
                        best = (a, i, j)
        return best

    def eliminate(self):
        """Diagonalize; returns the number of nonzero diagonal entries."""
        s = 0
        limit = min(self.nr, self.nc)
        while s < limit:
            best = self.pivot(s)
            if best is None:
                break
            _, pi, pj = best
            self.row_swap(s, pi)
            self.col_swap(s, pj)
            if self.m[s][s] < 0:
                self.row_negate(s)
            dirty = False
            for i in range(s + 1, self.nr):
                if self.m[i][s]:
                    q = self.m[i][s] // self.m[s][s]
                    self.row_add(i, s, -q)
                    if self.m[i][s]:
                        dirty = True
            for j in range(s + 1, self.nc):
                if self.m[s][j]:
                    q = self.m[s][j] // self.m[s][s]
                    self.col_add(j, s, -q)
                    if self.m[s][j]:
                        dirty = True
            if dirty:
                continue  # smaller remainders appeared; re-pivot this step
            s += 1
        return s

    def fix_divisibility(self, r):
        """Enforce d_i | d_{i+1} on the diagonal."""
        changed = True
        while changed:
            changed = False
            for i in range(r - 1):
                a, b = self.m[i][i], self.m[i + 1][i + 1]
                if b % a == 0:
                    continue
                changed = True
                # bring b's row into column i, then re-clear the 2x2 block
                self.row_add(i, i + 1, 1)
                while True:
                    a, c = self.m[i][i], self.m[i + 1][i]
                    # clear column entry below the pivot by gcd steps
                    if self.m[i][i + 1]:
                        q = self.m[i][i + 1] // self.m[i][i]
                        self.col_add(i + 1, i, -q)
                    if self.m[i + 1][i]:
                        q = self.m[i + 1][i] // self.m[i][i]
                        self.row_add(i + 1, i, -q)
                    if self.m[i][i + 1] == 0 and self.m[i + 1][i] == 0:
                        break
                    # smallest remainder becomes the new pivot
                    if self.m[i + 1][i] and abs(self.m[i + 1][i]) < abs(self.m[i][i]):
                        self.row_swap(i, i + 1)
                    elif self.m[i][i + 1] and abs(self.m[i][i + 1]) < abs(self.m[i][i]):
                        self.col_swap(i, i + 1)
                if self.m[i][i] < 0:
                    self.row_negate(i)
                if self.m[i + 1][i + 1] < 0:
                    self.row_negate(i + 1)


def smith_normal_form(a: IntMatrix) -> SmithDecomposition:
    """Smith normal form with transforms; empty matrices are allowed."""
    w = _Worker(a)
    r = w.eliminate()
    for i in range(r):
        if w.m[i][i] < 0:
            w.row_negate(i)
    w.fix_divisibility(r)
    u = IntMatrix.from_rows(w.u, cols=a.rows)
    v = IntMatrix.from_rows(w.v, cols=a.cols)
    d = IntMatrix.from_rows(w.m, cols=a.cols)
    return SmithDecomposition(u, d, v)


def _snf_with_inverses(a: IntMatrix):
    """Internal: (decomposition, U_inv, V_inv), all exact."""
    w = _Worker(a)
    r = w.eliminate()
    for i in range(r):
        if w.m[i][i] < 0:
            w.row_negate(i)
    w.fix_divisibility(r)
    dec = SmithDecomposition(IntMatrix.from_rows(w.u, cols=a.rows),
                             IntMatrix.from_rows(w.m, cols=a.cols),
                             IntMatrix.from_rows(w.v, cols=a.cols))
    return dec, IntMatrix.from_rows(w.u_inv, cols=a.rows), IntMatrix.from_rows(w.v_inv, cols=a.cols)


def abelian_invariants(a: IntMatrix) -> AbelianInvariants:
    """Invariants of Z^cols modulo the row space of ``a`` (a relators x
    generators exponent matrix)."""
    dec = smith_normal_form(a)
    factors = dec.invariant_factors()
    free_rank = a.cols - len(factors)
    torsion = [d for d in factors if d > 1]
    return AbelianInvariants(free_rank, torsion)


def solve_integer(a: IntMatrix, b: Sequence[int]) -> list[int] | None:
    """Canonical integer solution of A x = b, or None.

    The solution comes from Smith back-substitution with all free
    parameters set to zero, so it is deterministic.
    """
    b = [int(x) for x in b]
    if len(b) != a.rows:
        raise ValueError("dimension mismatch")
    dec = smith_normal_form(a)
    c = dec.U.mul_vector(b)
    diag = dec.D.diagonal()
    r = len([d for d in diag if d != 0])
    z = [0] * a.cols
    for i in range(a.rows):
        if i < r:
            d = diag[i]
            if c[i] % d:
                return None
            if i < a.cols:
                z[i] = c[i] // d
        elif c[i] != 0:
            return None
    return dec.V.mul_vector(z)


def invert_unimodular(m: IntMatrix) -> IntMatrix:
    """Exact inverse of a unimodular integer matrix."""
    if m.rows != m.cols:
        raise ValueError("not square")
    n = m.rows
    a = [[Fraction(x) for x in m.row(i)] for i in range(n)]
    inv = [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
    for col in range(n):
        pivot = next((i for i in range(col, n) if a[i][col] != 0), None)
        if pivot is None:
            raise ValueError("matrix is singular")
        a[col], a[pivot] = a[pivot], a[col]
        inv[col], inv[pivot] = inv[pivot], inv[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        inv[col] = [x / p for x in inv[col]]
        for i in range(n):
            if i != col and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
                inv[i] = [x - f * y for x, y in zip(inv[i], inv[col])]
    out = []
    for row in inv:
        for x in row:
            if x.denominator != 1:
                raise ValueError("matrix is not unimodular")
            out.append(x.numerator)
    return IntMatrix(n, n, out)


def gcd_of_minors(a: IntMatrix, k: int) -> int:
    """gcd of all k x k minors (0 when all vanish); independent oracle for
    invariant factors d_k = g_k / g_{k-1}."""
    from itertools import combinations

    if k == 0:
        return 1
    g = 0
    rows = a.to_rows()
    for rsel in combinations(range(a.rows), k):
        for csel in combinations(range(a.cols), k):
            sub = IntMatrix.from_rows([[rows[i][j] for j in csel] for i in rsel], cols=k)
            g = gcd(g, abs(sub.determinant()))
    return g
