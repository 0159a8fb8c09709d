"""Exact integer and rational linear algebra.

Smith normal form, lattice indices, saturated integral kernels, primitive
vectors and the canonical rank-2 quotient projections.  Matrices are tiny
(tens of rows at most), so everything is plain arbitrary-precision arithmetic
with no sparsity tricks.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence


class _Infinite:
    """Distinguished non-error return for indices of non-finite quotients."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "INFINITE"


INFINITE = _Infinite()

IntVec = tuple[int, ...]


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix, row-major; shape is explicit so zero-row and
    zero-column matrices keep their dimensions."""

    entries: tuple[tuple[int, ...], ...]
    rows: int
    cols: int

    @staticmethod
    def from_rows(rows: Iterable[Sequence[int]], cols_hint: int = 0) -> "IntMatrix":
        rs = tuple(tuple(int(x) for x in r) for r in rows)
        if rs and any(len(r) != len(rs[0]) for r in rs):
            raise ValueError("ragged rows")
        c = len(rs[0]) if rs else cols_hint
        return IntMatrix(rs, len(rs), c)

    @staticmethod
    def from_cols(cols: Iterable[Sequence[int]], rows_hint: int = 0) -> "IntMatrix":
        cs = [tuple(int(x) for x in c) for c in cols]
        if not cs:
            return IntMatrix(tuple(() for _ in range(rows_hint)), rows_hint, 0)
        m = len(cs[0])
        if any(len(c) != m for c in cs):
            raise ValueError("ragged columns")
        return IntMatrix(tuple(tuple(c[i] for c in cs) for i in range(m)), m, len(cs))

    @staticmethod
    def identity(n: int) -> "IntMatrix":
        return IntMatrix(tuple(tuple(1 if i == j else 0 for j in range(n))
                               for i in range(n)), n, n)

    @staticmethod
    def zero(rows: int, cols: int) -> "IntMatrix":
        return IntMatrix(tuple(tuple(0 for _ in range(cols)) for _ in range(rows)),
                         rows, cols)

    def col(self, j: int) -> IntVec:
        return tuple(r[j] for r in self.entries)

    def columns(self) -> list[IntVec]:
        return [self.col(j) for j in range(self.cols)]

    def transpose(self) -> "IntMatrix":
        if self.rows == 0 or self.cols == 0:
            return IntMatrix.zero(self.cols, self.rows)
        return IntMatrix(tuple(zip(*self.entries)), self.cols, self.rows)

    def mul(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        ot = other.transpose()
        return IntMatrix(tuple(
            tuple(sum(a * b for a, b in zip(row, col)) for col in ot.entries)
            for row in self.entries), self.rows, other.cols)

    def mul_vec(self, v: Sequence) -> tuple:
        if self.cols != len(v):
            raise ValueError("dimension mismatch")
        return tuple(sum(a * b for a, b in zip(row, v)) for row in self.entries)

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise ValueError("row count mismatch")
        return IntMatrix(tuple(r1 + r2 for r1, r2 in zip(self.entries, other.entries)),
                         self.rows, self.cols + other.cols)

    def to_json(self) -> dict:
        return {"rows": self.rows, "cols": self.cols,
                "entries": [str(x) for r in self.entries for x in r]}

    @staticmethod
    def from_json(d: dict) -> "IntMatrix":
        r, c = d["rows"], d["cols"]
        flat = [int(x) for x in d["entries"]]
        if len(flat) != r * c:
            raise ValueError("entry count does not match dimensions")
        return IntMatrix(tuple(tuple(flat[i * c:(i + 1) * c]) for i in range(r)), r, c)


def smith_normal_form(m: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return (D, U, V) with U*m*V = D, D diagonal with d1 | d2 | ..., U, V unimodular."""
    a = [list(r) for r in m.entries]
    R, C = m.rows, m.cols
    u = [[1 if i == j else 0 for j in range(R)] for i in range(R)]
    v = [[1 if i == j else 0 for j in range(C)] for i in range(C)]

    def row_op(i, j, q):  # row_i -= q * row_j
        a[i] = [x - q * y for x, y in zip(a[i], a[j])]
        u[i] = [x - q * y for x, y in zip(u[i], u[j])]

    def col_op(i, j, q):  # col_i -= q * col_j
        for r in a:
            r[i] -= q * r[j]
        for r in v:
            r[i] -= q * r[j]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    t = 0
    while True:
        # locate the smallest nonzero entry in the trailing block
        pivot = None
        for i in range(t, R):
            for j in range(t, C):
                if a[i][j] != 0 and (pivot is None or abs(a[i][j]) < abs(a[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        # clear row and column t; pivot may move as remainders shrink
        while True:
            moved = False
            for i in range(t + 1, R):
                if a[i][t] != 0:
                    q = a[i][t] // a[t][t]
                    row_op(i, t, q)
                    if a[i][t] != 0:
                        swap_rows(t, i)
                        moved = True
            for j in range(t + 1, C):
                if a[t][j] != 0:
                    q = a[t][j] // a[t][t]
                    col_op(j, t, q)
                    if a[t][j] != 0:
                        swap_cols(t, j)
                        moved = True
            if not moved and all(a[i][t] == 0 for i in range(t + 1, R)) \
                    and all(a[t][j] == 0 for j in range(t + 1, C)):
                break
        # divisibility: pivot must divide the rest of the block
        fixed = False
        for i in range(t + 1, R):
            for j in range(t + 1, C):
                if a[i][j] % a[t][t] != 0:
                    # fold row i into row t and redo this pivot
                    a[t] = [x + y for x, y in zip(a[t], a[i])]
                    u[t] = [x + y for x, y in zip(u[t], u[i])]
                    fixed = True
                    break
            if fixed:
                break
        if fixed:
            continue
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
        if t >= min(R, C):
            break
    return (IntMatrix.from_rows(a, cols_hint=C),
            IntMatrix.from_rows(u, cols_hint=R),
            IntMatrix.from_rows(v, cols_hint=C))


def invariant_factors(m: IntMatrix) -> tuple[int, ...]:
    d, _, _ = smith_normal_form(m)
    out = []
    for i in range(min(m.rows, m.cols)):
        if d.entries[i][i] != 0:
            out.append(d.entries[i][i])
    return tuple(out)


def rank(m: IntMatrix) -> int:
    return len(invariant_factors(m))


def lattice_index(m: IntMatrix) -> int | _Infinite:
    """Index of the column span of m inside the full integer lattice of its rows.

    Finite exactly when m has full row rank; then it is the product of the
    invariant factors.
    """
    facs = invariant_factors(m)
    if len(facs) < m.rows:
        return INFINITE
    out = 1
    for f in facs:
        out *= f
    return out


def determinant(m: IntMatrix) -> int:
    """Bareiss fraction-free determinant."""
    n = m.rows
    if n != m.cols:
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    a = [list(r) for r in m.entries]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def direct_sum_index(cols_a: Sequence[IntVec], cols_b: Sequence[IntVec],
                     ambient_dim: int) -> int | _Infinite:
    """|Z^ambient / (span(cols_a) + span(cols_b))| for a complementary pair.

    The two column families must jointly have exactly ambient_dim columns
    (that is a caller error, reported as such); a singular square matrix is
    the expected non-complementary case and yields INFINITE.
    """
    cols = list(cols_a) + list(cols_b)
    if len(cols) != ambient_dim:
        raise ValueError(
            f"column counts {len(cols_a)}+{len(cols_b)} do not match ambient dimension {ambient_dim}")
    for c in cols:
        if len(c) != ambient_dim:
            raise ValueError("column lives in the wrong ambient space")
    det = determinant(IntMatrix.from_cols(cols, rows_hint=ambient_dim))
    return abs(det) if det != 0 else INFINITE


def primitive_part(v: Sequence[int]) -> tuple[IntVec, int]:
    """Write v = g*p with p primitive pointing the same way; g > 0."""
    if all(x == 0 for x in v):
        raise ValueError("zero vector has no primitive part")
    g = 0
    for x in v:
        g = gcd(g, abs(x))
    return tuple(x // g for x in v), g


def wedge_index(a: Sequence[int], b: Sequence[int]) -> int:
    """gcd of the cross product entries; 0 iff a, b are parallel or zero."""
    cx = (a[1] * b[2] - a[2] * b[1],
          a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0])
    g = 0
    for x in cx:
        g = gcd(g, abs(x))
    return g


def quotient_projection(alpha: Sequence[int]) -> IntMatrix:
    """The canonical 2x3 projection killing alpha and mapping Z^3 onto Z^2.

    Deterministic in primitive_part(alpha): the primitive vector is reduced to
    a coordinate vector by tracked integer row operations with a fixed pivot
    rule, and the two untouched basis rows become the projection.
    """
    p, _ = primitive_part(alpha)
    vec = list(p)
    rows = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    while sum(1 for x in vec if x != 0) > 1:
        piv = min((i for i in range(3) if vec[i] != 0), key=lambda i: (abs(vec[i]), i))
        for j in range(3):
            if j != piv and vec[j] != 0:
                q = vec[j] // vec[piv]
                if q != 0:
                    vec[j] -= q * vec[piv]
                    rows[j] = [x - q * y for x, y in zip(rows[j], rows[piv])]
    piv = next(i for i in range(3) if vec[i] != 0)
    if vec[piv] < 0:
        rows[piv] = [-x for x in rows[piv]]
    # rotate the pivot row to the front, keeping the cyclic order of the rest
    order = [(piv + i) % 3 for i in range(3)]
    return IntMatrix.from_rows([rows[order[1]], rows[order[2]]])


def integral_kernel(m: IntMatrix) -> IntMatrix:
    """Columns form a basis of the saturated integral kernel of m."""
    if m.cols == 0:
        return IntMatrix.zero(0, 0)
    d, _, v = smith_normal_form(m)
    r = len(invariant_factors(m))
    cols = [v.col(j) for j in range(r, m.cols)]
    return IntMatrix.from_cols(cols, rows_hint=m.cols)


def saturation(cols: Sequence[IntVec], ambient_dim: int) -> IntMatrix:
    """Basis of the saturation of the span of the given integral columns."""
    if not cols:
        return IntMatrix.zero(ambient_dim, 0)
    m = IntMatrix.from_cols(cols, rows_hint=ambient_dim)
    # orthogonal complement of the span, then its orthogonal complement
    perp = integral_kernel(m.transpose())
    return integral_kernel(perp.transpose())


# -- rational elimination ----------------------------------------------------


def solve_rational(rows: Sequence[Sequence[Fraction | int]],
                   rhs: Sequence[Fraction | int]):
    """Solve rows * x = rhs over the rationals.

    Returns (particular, basis) where basis spans the solution space of the
    homogeneous system, or None when inconsistent.
    """
    m = len(rows)
    n = len(rows[0]) if m else 0
    a = [[Fraction(x) for x in r] + [Fraction(b)] for r, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(m):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if a[i][n] != 0:
            return None
    free = [c for c in range(n) if c not in pivots]
    part = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        part[c] = a[i][n]
    basis = []
    for f in free:
        vec = [Fraction(0)] * n
        vec[f] = Fraction(1)
        for i, c in enumerate(pivots):
            vec[c] = -a[i][f]
        basis.append(tuple(vec))
    return tuple(part), basis


def solve_rational_multi(rows: Sequence[Sequence[Fraction | int]],
                         rhs_cols: Sequence[Sequence[Fraction | int]]):
    """Simultaneously solve rows * x = b for several right-hand sides.

    Returns (solutions, null_basis) with one particular solution per rhs, or
    None if any system is inconsistent.
    """
    m = len(rows)
    n = len(rows[0]) if m else 0
    q = len(rhs_cols)
    a = [[Fraction(x) for x in r] + [Fraction(rhs_cols[j][i]) for j in range(q)]
         for i, r in enumerate(rows)]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(m):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if any(a[i][n + j] != 0 for j in range(q)):
            return None
    sols = []
    for j in range(q):
        part = [Fraction(0)] * n
        for i, c in enumerate(pivots):
            part[c] = a[i][n + j]
        sols.append(tuple(part))
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * n
        vec[f] = Fraction(1)
        for i, c in enumerate(pivots):
            vec[c] = -a[i][f]
        basis.append(tuple(vec))
    return sols, basis


def rational_rank(rows: Sequence[Sequence[Fraction | int]]) -> int:
    m = len(rows)
    if m == 0:
        return 0
    n = len(rows[0])
    a = [[Fraction(x) for x in r] for r in rows]
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(r + 1, m):
            if a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        r += 1
        if r == m:
            break
    return r


def left_null_basis(rows: Sequence[Sequence[int]]) -> list[tuple[Fraction, ...]]:
    """Basis of { w : w * M = 0 } for the matrix with the given rows."""
    m = len(rows)
    if m == 0:
        return []
    n = len(rows[0])
    cols = [[Fraction(rows[i][j]) for i in range(m)] for j in range(n)]
    sol = solve_rational(cols, [Fraction(0)] * n)
    assert sol is not None
    return sol[1]
