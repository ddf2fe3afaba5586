"""Exact dense linear algebra over Q and Q(sqrt d).

Matrices are tuples of row tuples of :class:`Scalar`; vectors are tuples.
Elimination always pivots on the first nonzero entry, so results are
deterministic and never depend on floating-point rank decisions.
"""
from __future__ import annotations

from typing import Sequence

from .scalar import ONE, ZERO, Scalar

Matrix = tuple  # tuple[tuple[Scalar, ...], ...]
Vector = tuple  # tuple[Scalar, ...]


def as_vector(v) -> Vector:
    return tuple(Scalar.coerce(x) for x in v)


def as_matrix(rows) -> Matrix:
    return tuple(tuple(Scalar.coerce(x) for x in row) for row in rows)


def zeros(m: int, n: int | None = None) -> Matrix:
    n = m if n is None else n
    return tuple((ZERO,) * n for _ in range(m))


def identity(n: int) -> Matrix:
    return tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n))


def diag(values) -> Matrix:
    values = as_vector(values)
    n = len(values)
    return tuple(tuple(values[i] if i == j else ZERO for j in range(n)) for i in range(n))


def unit(n: int, k: int) -> Vector:
    return tuple(ONE if i == k else ZERO for i in range(n))


def transpose(A: Matrix) -> Matrix:
    return tuple(zip(*A)) if A else ()


def matmul(A: Matrix, B: Matrix) -> Matrix:
    Bt = transpose(B)
    return tuple(tuple(dot(row, col) for col in Bt) for row in A)


def matvec(A: Matrix, v: Sequence) -> Vector:
    return tuple(dot(row, v) for row in A)


def dot(u: Sequence, v: Sequence) -> Scalar:
    s = ZERO
    for x, y in zip(u, v):
        if x and y:
            s = s + x * y
    return s


def add(A: Matrix, B: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(r, s)) for r, s in zip(A, B))


def sub(A: Matrix, B: Matrix) -> Matrix:
    return tuple(tuple(x - y for x, y in zip(r, s)) for r, s in zip(A, B))


def scale(c, A: Matrix) -> Matrix:
    c = Scalar.coerce(c)
    return tuple(tuple(c * x for x in row) for row in A)


def vadd(u: Sequence, v: Sequence) -> Vector:
    return tuple(x + y for x, y in zip(u, v))


def vsub(u: Sequence, v: Sequence) -> Vector:
    return tuple(x - y for x, y in zip(u, v))


def vscale(c, v: Sequence) -> Vector:
    c = Scalar.coerce(c)
    return tuple(c * x for x in v)


def is_zero_vector(v: Sequence) -> bool:
    return not any(v)


def is_zero_matrix(A: Matrix) -> bool:
    return not any(any(row) for row in A)


def commutator(A: Matrix, B: Matrix) -> Matrix:
    return sub(matmul(A, B), matmul(B, A))


def trace(A: Matrix) -> Scalar:
    s = ZERO
    for i in range(len(A)):
        s = s + A[i][i]
    return s


def submatrix(A: Matrix, rows: Sequence[int], cols: Sequence[int]) -> Matrix:
    return tuple(tuple(A[i][j] for j in cols) for i in rows)


def to_float(A):
    import numpy as np

    return np.array([[float(x) for x in row] for row in A], dtype=float)


# elimination ---------------------------------------------------------------

def rref(A: Sequence[Sequence[Scalar]]) -> tuple[list[list[Scalar]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    M = [list(row) for row in A]
    if not M:
        return M, []
    m, n = len(M), len(M[0])
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        p = next((i for i in range(r, m) if M[i][c]), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = M[r][c].inverse()
        M[r] = [x * inv if x else x for x in M[r]]
        for i in range(m):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [x - f * y if y else x for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    return M, pivots


def rank(A) -> int:
    return len(rref(A)[1]) if A else 0


def nullspace(A, ncols: int | None = None) -> list[Vector]:
    """Basis of {x : A x = 0}; ``ncols`` is needed when A has no rows."""
    if not A:
        n = ncols or 0
        return [unit(n, k) for k in range(n)]
    R, pivots = rref(A)
    n = len(R[0])
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        x = [ZERO] * n
        x[f] = ONE
        for row, pc in zip(R, pivots):
            if row[f]:
                x[pc] = -row[f]
        basis.append(tuple(x))
    return basis


def solve(A, b) -> Vector | None:
    """One solution of A x = b, or None when inconsistent."""
    if not A:
        return None
    n = len(A[0])
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    R, pivots = rref(aug)
    if n in pivots:
        return None
    x = [ZERO] * n
    for row, pc in zip(R, pivots):
        x[pc] = row[n]
    return tuple(x)


def span_basis(vectors) -> list[Vector]:
    """Row-reduced basis of the span of ``vectors``."""
    vectors = [v for v in vectors if any(v)]
    if not vectors:
        return []
    R, pivots = rref(vectors)
    return [tuple(R[i]) for i in range(len(pivots))]


def in_span(basis, v) -> bool:
    if not any(v):
        return True
    if not basis:
        return False
    return rank(list(basis) + [v]) == rank(basis)


def coordinates(basis, v) -> Vector | None:
    """Coefficients c with sum c_k basis[k] = v, or None."""
    if not basis:
        return () if not any(v) else None
    A = transpose(basis)
    return solve(A, v)


def det(A: Matrix) -> Scalar:
    M = [list(row) for row in A]
    n = len(M)
    d = ONE
    for c in range(n):
        p = next((i for i in range(c, n) if M[i][c]), None)
        if p is None:
            return ZERO
        if p != c:
            M[c], M[p] = M[p], M[c]
            d = -d
        d = d * M[c][c]
        inv = M[c][c].inverse()
        for i in range(c + 1, n):
            if M[i][c]:
                f = M[i][c] * inv
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    return d


def inverse(A: Matrix) -> Matrix:
    n = len(A)
    aug = [list(row) + list(e) for row, e in zip(A, identity(n))]
    R, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return tuple(tuple(row[n:]) for row in R)


def is_positive_definite(P: Matrix) -> bool:
    """Exact LDL^T test: all pivots of symmetric elimination are positive."""
    M = [list(row) for row in P]
    n = len(M)
    for i in range(n):
        for j in range(i + 1, n):
            if M[i][j] != M[j][i]:
                return False
    for c in range(n):
        piv = M[c][c]
        if piv.sign() <= 0:
            return False
        inv = piv.inverse()
        for i in range(c + 1, n):
            if M[i][c]:
                f = M[i][c] * inv
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    return True


def charpoly(A: Matrix) -> list[Scalar]:
    """Coefficients (low to high) of det(x I - A), via Faddeev-LeVerrier."""
    n = len(A)
    coeffs = [ZERO] * (n + 1)
    coeffs[n] = ONE
    M = zeros(n)
    I = identity(n)
    for k in range(1, n + 1):
        M = add(matmul(A, M), scale(coeffs[n - k + 1], I))
        coeffs[n - k] = -trace(matmul(A, M)) / k
    return coeffs


# univariate polynomials (low-to-high coefficient lists) -------------------

def _trim(p):
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return p


def poly_eval(p, x):
    acc = ZERO
    for c in reversed(p):
        acc = acc * x + c
    return acc


def poly_derivative(p):
    return _trim([c * k for k, c in enumerate(p)][1:])


def poly_divmod(p, q):
    p, q = _trim(p), _trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    out = [ZERO] * max(len(p) - len(q) + 1, 1)
    r = list(p)
    lead_inv = q[-1].inverse()
    while r and len(r) >= len(q):
        k = len(r) - len(q)
        f = r[-1] * lead_inv
        out[k] = f
        for i, c in enumerate(q):
            r[i + k] = r[i + k] - f * c
        r = _trim(r)
    return _trim(out), r


def sturm_sequence(p):
    p = _trim(p)
    seq = [p, poly_derivative(p)]
    while seq[-1]:
        _, r = poly_divmod(seq[-2], seq[-1])
        if not r:
            break
        seq.append([-c for c in r])
    return [s for s in seq if s]


def squarefree_part(p):
    """p / gcd(p, p'): same distinct roots, all simple (needed when an endpoint is a multiple root)."""
    p = _trim(p)
    dp = poly_derivative(p)
    if not dp:
        return p
    g = poly_gcd(p, dp)
    if len(g) <= 1:
        return p
    q, _ = poly_divmod(p, g)
    return q


def _sign_changes(signs):
    signs = [s for s in signs if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _signs_at(seq, x):
    if isinstance(x, str) and x == "+inf":
        return [s[-1].sign() for s in seq]
    if isinstance(x, str) and x == "-inf":
        return [s[-1].sign() * (1 if (len(s) - 1) % 2 == 0 else -1) for s in seq]
    x = Scalar.coerce(x)
    return [poly_eval(s, x).sign() for s in seq]


def count_real_roots(p, lo="-inf", hi="+inf") -> int:
    """Number of distinct real roots in (lo, hi] (Sturm's theorem)."""
    p = squarefree_part(p)
    seq = sturm_sequence(p)
    if len(seq) == 1:
        return 0
    return _sign_changes(_signs_at(seq, lo)) - _sign_changes(_signs_at(seq, hi))


def root_bound(p) -> Scalar:
    """Cauchy bound: every root has modulus below this rational."""
    p = _trim(p)
    lead = abs(p[-1])
    m = max((abs(c) / lead for c in p[:-1]), default=ZERO)
    # round up to a rational so bisection stays in Q
    return Scalar(abs(m).floor() + 2)


def isolate_nonzero_real_root(p):
    """Rational interval (lo, hi] excluding 0 that contains exactly one real root.

    Returns None when p has no nonzero real root.
    """
    p = _trim(p)
    while p and not p[0]:
        p = p[1:]
    if len(p) < 2:
        return None
    if count_real_roots(p) == 0:
        return None
    B = root_bound(p)
    for lo, hi in ((ZERO, B), (-B, ZERO)):
        if count_real_roots(p, lo, hi) == 0:
            continue
        # p(0) != 0 here, so (lo, hi] never needs to touch 0 as a root
        while count_real_roots(p, lo, hi) > 1:
            mid = (lo + hi) / 2
            if count_real_roots(p, lo, mid) >= 1:
                hi = mid
            else:
                lo = mid
        return lo, hi
    return None


def poly_gcd(p, q):
    """Monic gcd of two polynomials."""
    p, q = _trim(p), _trim(q)
    while q:
        _, r = poly_divmod(p, q)
        p, q = q, r
    if not p:
        return p
    inv = p[-1].inverse()
    return [c * inv for c in p]


def has_unit_modulus_root(p) -> bool:
    """Exact test for a complex root on the unit circle.

    Such roots are common to p and its reciprocal; the common factor is
    palindromic and is rewritten in t = z + 1/z, where unit-circle roots
    become real roots in [-2, 2].
    """
    p = _trim(p)
    while p and not p[0]:
        p = p[1:]
    if len(p) < 2:
        return False
    if not poly_eval(p, ONE) or not poly_eval(p, -ONE):
        return True
    g = poly_gcd(p, list(reversed(p)))
    if len(g) < 2:
        return False
    k = (len(g) - 1) // 2  # g is palindromic of even degree 2k once +-1 are excluded
    # D_j(t) = z^j + z^-j as polynomials in t
    D = [[Scalar(2)], [ZERO, ONE]]
    for _ in range(2, k + 1):
        nxt = [ZERO] + D[-1]
        prev = D[-2] + [ZERO] * (len(nxt) - len(D[-2]))
        D.append([a - b for a, b in zip(nxt, prev)])
    h = [g[k]] + [ZERO] * k
    for j in range(1, k + 1):
        for i, c in enumerate(D[j]):
            h[i] = h[i] + g[k + j] * c
    return count_real_roots(h, Scalar(-2), Scalar(2)) > 0
