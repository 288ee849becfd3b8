"""Exact integer matrices and the normal forms used by the reduction pipeline.

Everything here is plain Python integer arithmetic: determinants are computed
fraction-free, Smith forms track their unimodular transforms, and the two
completion constructions (square completion, window-coprime padding) verify
their own postconditions before returning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

from .errors import PreconditionError


class IntMatrix:
    """Immutable dense matrix of arbitrary-precision integers.

    Rows are stored as a tuple of tuples.  At least one row and one column
    are required; algorithms that want scratch space copy into lists.
    """

    __slots__ = ("data", "rows", "cols")

    def __init__(self, rows):
        data = tuple(tuple(int(v) for v in row) for row in rows)
        if not data or not data[0]:
            raise PreconditionError("matrix needs at least one row and one column")
        width = len(data[0])
        if any(len(row) != width for row in data):
            raise PreconditionError("matrix rows have inconsistent lengths")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "rows", len(data))
        object.__setattr__(self, "cols", width)

    def __setattr__(self, name, value):
        raise AttributeError("IntMatrix is immutable")

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, rows: int, cols: int) -> "IntMatrix":
        return cls([[0] * cols for _ in range(rows)])

    def row(self, i: int) -> tuple[int, ...]:
        return self.data[i]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.data)

    def to_lists(self) -> list[list[int]]:
        return [list(row) for row in self.data]

    def transpose(self) -> "IntMatrix":
        return IntMatrix([self.column(j) for j in range(self.cols)])

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise PreconditionError("hstack needs matching row counts")
        return IntMatrix([a + b for a, b in zip(self.data, other.data)])

    def vstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.cols:
            raise PreconditionError("vstack needs matching column counts")
        return IntMatrix(self.data + other.data)

    def submatrix(self, row_ids, col_ids) -> "IntMatrix":
        return IntMatrix([[self.data[i][j] for j in col_ids] for i in row_ids])

    def scale(self, factor: int) -> "IntMatrix":
        return IntMatrix([[factor * v for v in row] for row in self.data])

    def mod(self, n: int) -> "IntMatrix":
        if n < 1:
            raise PreconditionError("modulus must be positive")
        return IntMatrix([[v % n for v in row] for row in self.data])

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise PreconditionError(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        cols = other.cols
        out = []
        for arow in self.data:
            out.append(
                [
                    sum(arow[t] * other.data[t][j] for t in range(self.cols))
                    for j in range(cols)
                ]
            )
        return IntMatrix(out)

    def __eq__(self, other) -> bool:
        return isinstance(other, IntMatrix) and self.data == other.data

    def __hash__(self) -> int:
        return hash(self.data)

    def __repr__(self) -> str:
        return f"IntMatrix({[list(row) for row in self.data]})"


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    # returns (g, x, y) with a*x + b*y == g; g carries the sign of the
    # terminating remainder, callers normalize where it matters
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def _det_rows(work: list[list[int]]) -> int:
    """Fraction-free elimination on a scratch list-of-lists; consumes it."""
    n = len(work)
    sign = 1
    prev = 1
    for t in range(n - 1):
        if work[t][t] == 0:
            for i in range(t + 1, n):
                if work[i][t] != 0:
                    work[t], work[i] = work[i], work[t]
                    sign = -sign
                    break
            else:
                return 0
        lead = work[t][t]
        row_t = work[t]
        for i in range(t + 1, n):
            row_i = work[i]
            head = row_i[t]
            for j in range(t + 1, n):
                row_i[j] = (row_i[j] * lead - head * row_t[j]) // prev
            row_i[t] = 0
        prev = lead
    return sign * work[n - 1][n - 1]


def det(matrix: IntMatrix) -> int:
    """Exact determinant via fraction-free elimination (no rationals)."""
    if matrix.rows != matrix.cols:
        raise PreconditionError("determinant needs a square matrix")
    return _det_rows(matrix.to_lists())


def _unit_reduced_det(rows: list[list[int]]) -> int:
    """Determinant that first expands along columns holding a single +-1.

    Matches _det_rows on every input; it only pays off on the nearly-identity
    window matrices the circular checks produce, where it collapses the
    computation to a small core.
    """
    active_rows = list(range(len(rows)))
    active_cols = list(range(len(rows)))
    sign = 1
    changed = True
    while changed and active_rows:
        changed = False
        for cpos, j in enumerate(active_cols):
            hits = [i for i in active_rows if rows[i][j] != 0]
            if len(hits) == 1 and rows[hits[0]][j] in (1, -1):
                i = hits[0]
                rpos = active_rows.index(i)
                sign *= rows[i][j] * (-1) ** (rpos + cpos)
                active_rows.remove(i)
                active_cols.remove(j)
                changed = True
                break
            if not hits:
                return 0
    if not active_rows:
        return sign
    core = [[rows[i][j] for j in active_cols] for i in active_rows]
    return sign * _det_rows(core)


def adjugate(matrix: IntMatrix) -> IntMatrix:
    """Classical adjugate: matrix @ adjugate(matrix) == det(matrix) * I."""
    if matrix.rows != matrix.cols:
        raise PreconditionError("adjugate needs a square matrix")
    n = matrix.rows
    if n == 1:
        return IntMatrix([[1]])
    data = matrix.data
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [
                [data[r][c] for c in range(n) if c != i]
                for r in range(n)
                if r != j
            ]
            cof = _det_rows(minor)
            out[i][j] = -cof if (i + j) % 2 else cof
    return IntMatrix(out)


@dataclass(frozen=True)
class SnfResult:
    """Smith form S together with unimodular U, V satisfying U @ A @ V == S."""

    U: IntMatrix
    S: IntMatrix
    V: IntMatrix


def _swap_rows(m: list[list[int]], a: int, b: int) -> None:
    m[a], m[b] = m[b], m[a]


def _swap_cols(m: list[list[int]], a: int, b: int) -> None:
    for row in m:
        row[a], row[b] = row[b], row[a]


def _negate_row(m: list[list[int]], i: int) -> None:
    m[i] = [-v for v in m[i]]


def _sub_scaled_row(m: list[list[int]], i: int, src: int, q: int) -> None:
    if q:
        src_row = m[src]
        m[i] = [v - q * s for v, s in zip(m[i], src_row)]


def _sub_scaled_col(m: list[list[int]], j: int, src: int, q: int) -> None:
    if q:
        for row in m:
            row[j] -= q * row[src]


def _add_row(m: list[list[int]], dst: int, src: int) -> None:
    m[dst] = [v + s for v, s in zip(m[dst], m[src])]


def smith_normal_form(matrix: IntMatrix) -> SnfResult:
    """Diagonalize over the integers with explicit unimodular transforms.

    The returned S has nonnegative diagonal entries forming a divisibility
    chain, and U @ matrix @ V == S with |det U| == |det V| == 1.  The pivot at
    each stage is the smallest-magnitude nonzero entry of the remaining block,
    ties resolved toward the lowest row and then the lowest column.
    """
    rows, cols = matrix.rows, matrix.cols
    s = matrix.to_lists()
    u = [[1 if i == j else 0 for j in range(rows)] for i in range(rows)]
    v = [[1 if i == j else 0 for j in range(cols)] for i in range(cols)]

    for t in range(min(rows, cols)):
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                val = s[i][j]
                if val != 0 and (best is None or abs(val) < best[0]):
                    best = (abs(val), i, j)
        if best is None:
            break
        _, bi, bj = best
        if bi != t:
            _swap_rows(s, t, bi)
            _swap_rows(u, t, bi)
        if bj != t:
            _swap_cols(s, t, bj)
            _swap_cols(v, t, bj)

        while True:
            # reduce the cross at (t, t) until both arms vanish
            while True:
                if s[t][t] < 0:
                    _negate_row(s, t)
                    _negate_row(u, t)
                restart = False
                for i in range(t + 1, rows):
                    if s[i][t]:
                        q = s[i][t] // s[t][t]
                        _sub_scaled_row(s, i, t, q)
                        _sub_scaled_row(u, i, t, q)
                        if s[i][t]:
                            _swap_rows(s, t, i)
                            _swap_rows(u, t, i)
                            restart = True
                            break
                if restart:
                    continue
                for j in range(t + 1, cols):
                    if s[t][j]:
                        q = s[t][j] // s[t][t]
                        _sub_scaled_col(s, j, t, q)
                        _sub_scaled_col(v, j, t, q)
                        if s[t][j]:
                            _swap_cols(s, t, j)
                            _swap_cols(v, t, j)
                            restart = True
                            break
                if restart:
                    continue
                break
            # pivot must divide everything that remains, or the chain breaks
            violation = None
            pivot = s[t][t]
            for i in range(t + 1, rows):
                for j in range(t + 1, cols):
                    if s[i][j] % pivot:
                        violation = i
                        break
                if violation is not None:
                    break
            if violation is None:
                break
            _add_row(s, t, violation)
            _add_row(u, t, violation)

    return SnfResult(IntMatrix(u), IntMatrix(s), IntMatrix(v))


def determinantal_divisor(matrix: IntMatrix, k: int) -> int:
    """Nonnegative gcd of all k x k minors (rows and columns in any position).

    Deliberately enumerates minors instead of reading the Smith form, so the
    two routes stay independent cross-checks of each other.
    """
    if not 1 <= k <= min(matrix.rows, matrix.cols):
        raise PreconditionError(f"minor order {k} out of range")
    data = matrix.data
    g = 0
    for row_ids in combinations(range(matrix.rows), k):
        for col_ids in combinations(range(matrix.cols), k):
            minor = [[data[i][j] for j in col_ids] for i in row_ids]
            g = math.gcd(g, _det_rows(minor))
            if g == 1:
                return 1
    return g


def _unimodular_inverse(matrix: IntMatrix) -> IntMatrix:
    d = det(matrix)
    if d not in (1, -1):
        raise PreconditionError("matrix is not unimodular")
    adj = adjugate(matrix)
    return adj if d == 1 else adj.scale(-1)


def complete_to_square(matrix: IntMatrix) -> IntMatrix:
    """Extend a full-row-rank k x m matrix to an m x m one of minimal determinant.

    The output contains the input as its first k rows and has determinant
    equal to determinantal_divisor(matrix, k).  Rows are added below via the
    Smith transforms: with A = U' S V' and S = (D | 0), border D by an
    identity block and push it back through the inverses.  A square input is
    already its own completion (there the determinant keeps its sign, since
    no added row is available to flip it).
    """
    k, m = matrix.rows, matrix.cols
    if k > m:
        raise PreconditionError("completion needs at least as many columns as rows")
    snf = smith_normal_form(matrix)
    factors = [snf.S.data[i][i] for i in range(k)]
    if any(f == 0 for f in factors):
        raise PreconditionError("matrix has a zero invariant factor (rank deficient)")
    dk = 1
    for f in factors:
        dk *= f
    if k == m:
        return IntMatrix(matrix.data)

    u_inv = _unimodular_inverse(snf.U)
    v_inv = _unimodular_inverse(snf.V)
    bordered_u = [[0] * m for _ in range(m)]
    for i in range(k):
        for j in range(k):
            bordered_u[i][j] = u_inv.data[i][j]
    for i in range(k, m):
        bordered_u[i][i] = 1
    bordered_s = [[0] * m for _ in range(m)]
    for i in range(k):
        bordered_s[i][i] = factors[i]
    for i in range(k, m):
        bordered_s[i][i] = 1

    result = IntMatrix(bordered_u) @ IntMatrix(bordered_s) @ v_inv
    if det(result) != dk:
        # determinant can only be off by sign; flip the first added row
        fixed = result.to_lists()
        fixed[k] = [-v for v in fixed[k]]
        result = IntMatrix(fixed)

    if result.data[:k] != matrix.data:
        raise AssertionError("completion displaced the original rows")
    if det(result) != dk:
        raise AssertionError("completion missed the target determinant")
    return result


def is_n_good(matrix: IntMatrix, n: int) -> bool:
    """Do all windows of r consecutive rows (r = column count) have
    determinant coprime to n?"""
    if n < 1:
        raise PreconditionError("modulus must be positive")
    t, r = matrix.rows, matrix.cols
    if t < r:
        raise PreconditionError("window check needs at least as many rows as columns")
    for start in range(t - r + 1):
        window = [list(matrix.data[start + i]) for i in range(r)]
        if math.gcd(_det_rows(window), n) != 1:
            return False
    return True


def _bezout_chain(values: list[int]) -> tuple[list[int], int]:
    """Coefficients with sum(c * v) == gcd(values) >= 0."""
    g = values[0]
    coeffs = [1]
    for val in values[1:]:
        g2, x, y = _xgcd(g, val)
        coeffs = [c * x for c in coeffs]
        coeffs.append(y)
        g = g2
    if g < 0:
        g = -g
        coeffs = [-c for c in coeffs]
    return coeffs, g


def _combination_with_unit_lead(values: list[int], n: int) -> tuple[list[int], int]:
    """Integer lambdas with sum(lam * values) == gcd(values) and the leading
    lambda coprime to n.

    Valid leading coefficients form an arithmetic progression a + b*t with
    gcd(a, b) == 1, so a member coprime to n exists; it is found by direct
    search over t.
    """
    r = len(values)
    dprime = 0
    for val in values:
        dprime = math.gcd(dprime, val)
    rest = 0
    for val in values[1:]:
        rest = math.gcd(rest, val)
    if rest == 0:
        # only the first entry is nonzero: the combination is forced
        lam0 = 1 if values[0] > 0 else -1
        return [lam0] + [0] * (r - 1), dprime
    u = values[0] // dprime
    v = rest // dprime
    if v == 1:
        base, step = 0, 1
    else:
        base, step = pow(u % v, -1, v), v
    lam0 = None
    for t in range(2 * n + 2):
        cand = base + step * t
        if math.gcd(cand, n) == 1:
            lam0 = cand
            break
    if lam0 is None:
        raise AssertionError("no unit leading coefficient in the progression")
    target = dprime - lam0 * values[0]
    if target % rest:
        raise AssertionError("progression member broke the solvability congruence")
    mu, _ = _bezout_chain(values[1:])
    scalefac = target // rest
    lams = [lam0] + [mval * scalefac for mval in mu]
    if sum(l * val for l, val in zip(lams, values)) != dprime:
        raise AssertionError("combination does not reach the column gcd")
    return lams, dprime


def _pad_rows_below(rows: list[list[int]], n: int) -> list[list[int]]:
    """Stack r*(r+1) rows: the input, then rows keeping every window
    determinant coprime to n, ending in an identity block."""
    r = len(rows)
    if r == 1:
        return [rows[0][:], [1]]
    lead = [row[0] for row in rows]
    lams, dprime = _combination_with_unit_lead(lead, n)
    t1 = [sum(l * row[j] for l, row in zip(lams, rows)) for j in range(r)]
    inner = []
    for i in range(1, r):
        q = rows[i][0] // dprime
        reduced = [rows[i][j] - q * t1[j] for j in range(r)]
        if reduced[0] != 0:
            raise AssertionError("leading column failed to clear")
        inner.append(reduced[1:])
    sub = _pad_rows_below(inner, n)
    assembled = [t1]
    block = r - 1
    for idx, srow in enumerate(sub, start=1):
        assembled.append([0] + list(srow))
        if idx % block == 0 and idx // block <= r - 1:
            assembled.append([1] + [0] * (r - 1))
    return [row[:] for row in rows] + assembled


def _flip(rows: list[list[int]]) -> list[list[int]]:
    # reverse row order and column order; windows map to windows with
    # determinants preserved up to sign
    return [list(reversed(row)) for row in reversed(rows)]


def n_good_padding(matrix: IntMatrix, n: int) -> IntMatrix:
    """Embed a square matrix M with gcd(det M, n) == 1 into a tall stack
    (identity; S; M; T; identity) all of whose r-row windows have determinant
    coprime to n.

    The output has exactly r*(2r+1) rows for an r x r input, with M occupying
    the central block.  The lower half is built row by row from Bezout
    combinations; the upper half is the same construction conjugated by the
    row-and-column reversal, which fixes identity blocks and preserves window
    determinants up to sign.
    """
    if matrix.rows != matrix.cols:
        raise PreconditionError("padding needs a square matrix")
    if n < 1:
        raise PreconditionError("modulus must be positive")
    r = matrix.rows
    d = det(matrix)
    if math.gcd(d, n) != 1:
        raise PreconditionError(f"determinant {d} shares a factor with {n}")

    if n == 1:
        # every determinant is coprime to 1; zero filler keeps the shape
        filler = [[0] * r for _ in range(r * r - r)]
        ident = IntMatrix.identity(r).to_lists()
        stacked = ident + filler + matrix.to_lists() + filler + ident
    else:
        base = matrix.to_lists()
        bottom = _pad_rows_below(base, n)
        top = _flip(_pad_rows_below(_flip(base), n))
        stacked = top + bottom[r:]

    out = IntMatrix(stacked)
    expected = r * (2 * r + 1)
    if out.rows != expected:
        raise AssertionError(f"padding has {out.rows} rows, wanted {expected}")
    ident = IntMatrix.identity(r).data
    if out.data[:r] != ident or out.data[-r:] != ident:
        raise AssertionError("padding lost its identity blocks")
    mid = r * r
    if out.data[mid:mid + r] != matrix.data:
        raise AssertionError("padding displaced the original matrix")
    if not is_n_good(out, n):
        raise AssertionError("padding failed the window coprimality check")
    return out
