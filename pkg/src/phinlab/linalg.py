"""Dense linear algebra over the rationals.

Vectors are tuples of Fraction, matrices are tuples of row tuples.  Subspaces
of E^n are passed around as lists of spanning row vectors; ``row_basis``
returns the canonical reduced echelon basis, which is what every comparison
goes through.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Vector = tuple
Matrix = tuple

ZERO = Fraction(0)
ONE = Fraction(1)


def frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def vec(xs: Iterable) -> Vector:
    return tuple(frac(x) for x in xs)


def mat(rows: Iterable[Iterable]) -> Matrix:
    return tuple(vec(r) for r in rows)


def zeros(m: int, n: int) -> Matrix:
    return tuple((ZERO,) * n for _ in range(m))


def identity(n: int) -> Matrix:
    return tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n))


def unit_vector(n: int, i: int) -> Vector:
    return tuple(ONE if k == i else ZERO for k in range(n))


def diag(entries: Sequence) -> Matrix:
    d = vec(entries)
    n = len(d)
    return tuple(tuple(d[i] if i == j else ZERO for j in range(n)) for i in range(n))


def transpose(a: Matrix) -> Matrix:
    if not a:
        return ()
    return tuple(zip(*a))


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    if not bt:
        return tuple(() for _ in a)
    return tuple(tuple(sum((x * y for x, y in zip(row, col) if x and y), ZERO) for col in bt) for row in a)


def matvec(a: Matrix, v: Vector) -> Vector:
    return tuple(sum((x * y for x, y in zip(row, v) if x and y), ZERO) for row in a)


def matadd(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(r, s)) for r, s in zip(a, b))


def matsub(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x - y for x, y in zip(r, s)) for r, s in zip(a, b))


def scale(c, a: Matrix) -> Matrix:
    c = frac(c)
    return tuple(tuple(c * x for x in r) for r in a)


def vadd(u: Vector, v: Vector) -> Vector:
    return tuple(x + y for x, y in zip(u, v))


def vsub(u: Vector, v: Vector) -> Vector:
    return tuple(x - y for x, y in zip(u, v))


def vscale(c, v: Vector) -> Vector:
    c = frac(c)
    return tuple(c * x for x in v)


def dot(u: Vector, v: Vector) -> Fraction:
    return sum((x * y for x, y in zip(u, v) if x and y), ZERO)


def kron(a: Matrix, b: Matrix) -> Matrix:
    rows = []
    for ra in a:
        for rb in b:
            rows.append(tuple(x * y for x in ra for y in rb))
    return tuple(rows)


def kron_vec(u: Vector, v: Vector) -> Vector:
    return tuple(x * y for x in u for y in v)


def is_zero_vec(v: Vector) -> bool:
    return all(x == 0 for x in v)


def is_zero(a: Matrix) -> bool:
    return all(is_zero_vec(r) for r in a)


def matpow(a: Matrix, k: int) -> Matrix:
    out = identity(len(a))
    for _ in range(k):
        out = matmul(out, a)
    return out


def rref(rows: Sequence[Sequence], ncols: int | None = None) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    m = [list(map(frac, r)) for r in rows]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == len(m):
            break
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        if inv != 1:
            m[r] = [x * inv if x else x for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                factor = m[i][c]
                m[i] = [x - factor * y if y else x for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def row_basis(rows: Sequence[Sequence], n: int | None = None) -> tuple[Vector, ...]:
    """Canonical basis (reduced echelon rows) of the span of ``rows``."""
    if not rows:
        return ()
    r, _ = rref(rows, n)
    return tuple(tuple(x) for x in r)


def nullspace(a: Sequence[Sequence], ncols: int) -> list[Vector]:
    """Basis of {x : a x = 0} for a matrix given by rows with ``ncols`` columns."""
    if not a:
        return [unit_vector(ncols, i) for i in range(ncols)]
    r, pivots = rref(a, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        x = [ZERO] * ncols
        x[fc] = ONE
        for row, pc in zip(r, pivots):
            x[pc] = -row[fc]
        basis.append(tuple(x))
    return basis


def solve(a: Sequence[Sequence], b: Sequence, ncols: int) -> tuple[Vector | None, list[Vector]]:
    """Solve a x = b.  Returns (particular solution or None, nullspace basis)."""
    aug = [list(map(frac, row)) + [frac(bi)] for row, bi in zip(a, b)]
    r, pivots = rref(aug, ncols + 1)
    if ncols in pivots:
        return None, nullspace(a, ncols)
    x = [ZERO] * ncols
    for row, pc in zip(r, pivots):
        x[pc] = row[ncols]
    return tuple(x), nullspace(a, ncols)


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    aug = [list(a[i]) + list(identity(n)[i]) for i in range(n)]
    r, pivots = rref(aug, 2 * n)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise ZeroDivisionError("matrix is singular")
    return tuple(tuple(row[n:]) for row in r[:n])


def det(a: Matrix) -> Fraction:
    m = [list(r) for r in a]
    n = len(m)
    d = ONE
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return ZERO
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            d = -d
        d *= m[c][c]
        inv = 1 / m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                factor = m[i][c] * inv
                m[i] = [x - factor * y for x, y in zip(m[i], m[c])]
    return d


def is_invertible(a: Matrix) -> bool:
    return len(a) == 0 or det(a) != 0


def charpoly(a: Matrix) -> list[Fraction]:
    """Coefficients [c_0, ..., c_n] of det(x I - a), monic (Faddeev-LeVerrier)."""
    n = len(a)
    coeffs = [ZERO] * (n + 1)
    coeffs[n] = ONE
    m = zeros(n, n)
    for k in range(1, n + 1):
        m = matadd(matmul(a, m), scale(coeffs[n - k + 1], identity(n)))
        am = matmul(a, m)
        coeffs[n - k] = -sum((am[i][i] for i in range(n)), ZERO) / k
    return coeffs


# --- subspaces --------------------------------------------------------------


def span_sum(u: Sequence[Vector], v: Sequence[Vector], n: int) -> tuple[Vector, ...]:
    return row_basis(list(u) + list(v), n)


def contains(u: Sequence[Vector], v: Vector) -> bool:
    if is_zero_vec(v):
        return True
    if not u:
        return False
    return rank(list(u) + [v]) == rank(u)


def is_subspace(u: Sequence[Vector], v: Sequence[Vector]) -> bool:
    """True if span(u) is contained in span(v)."""
    return all(contains(v, x) for x in u)


def same_span(u: Sequence[Vector], v: Sequence[Vector], n: int) -> bool:
    return row_basis(u, n) == row_basis(v, n)


def dim(u: Sequence[Vector]) -> int:
    return rank(u) if u else 0


def intersection(u: Sequence[Vector], v: Sequence[Vector], n: int) -> tuple[Vector, ...]:
    u = row_basis(u, n)
    v = row_basis(v, n)
    if not u or not v:
        return ()
    # solve sum a_i u_i = sum b_j v_j
    cols = list(u) + [vscale(-1, w) for w in v]
    system = transpose(cols)
    ker = nullspace(system, len(cols))
    out = []
    for k in ker:
        x = [ZERO] * n
        for coeff, w in zip(k[: len(u)], u):
            if coeff:
                x = [a + coeff * b for a, b in zip(x, w)]
        out.append(tuple(x))
    return row_basis(out, n)


def image(a: Matrix, u: Sequence[Vector], n: int) -> tuple[Vector, ...]:
    return row_basis([matvec(a, x) for x in u], n)


def annihilator(u: Sequence[Vector], n: int) -> tuple[Vector, ...]:
    """{y : <y, x> = 0 for all x in u} under the standard pairing."""
    if not u:
        return identity(n)
    return row_basis(nullspace(u, n), n)


def complement(u: Sequence[Vector], n: int) -> list[Vector]:
    """Standard basis vectors extending a basis of span(u) to E^n."""
    _, pivots = rref(u, n) if u else ([], [])
    return [unit_vector(n, i) for i in range(n) if i not in pivots]


def coordinates(basis: Sequence[Vector], v: Vector) -> Vector:
    """Coordinates of v in an independent list ``basis``; raises if v is outside."""
    k = len(basis)
    if k == 0:
        if is_zero_vec(v):
            return ()
        raise ValueError("vector not in span")
    x, _ = solve(transpose(basis), v, k)
    if x is None:
        raise ValueError("vector not in span")
    return x


def extend_basis(u: Sequence[Vector], candidates: Sequence[Vector]) -> list[Vector]:
    """Greedily pick candidates independent modulo span(u)."""
    current = list(u)
    picked = []
    r = dim(current)
    for c in candidates:
        if rank(current + [c]) > r:
            current.append(c)
            picked.append(c)
            r += 1
    return picked
