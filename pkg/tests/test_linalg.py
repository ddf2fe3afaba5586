import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from carnot import linalg as la
from carnot.scalar import Scalar
from conftest import scalars, small_fractions
from oracles import sym, sym_matrix


@st.composite
def matrices(draw, n, d=1):
    return tuple(tuple(draw(scalars(d)) for _ in range(n)) for _ in range(n))


@given(matrices(3, d=3))
def test_det_matches_sympy(A):
    assert sp.simplify(sym(la.det(A)) - sym_matrix(A).det()) == 0


@given(matrices(4))
def test_rank_and_nullspace_match_sympy(A):
    M = sym_matrix(A)
    assert la.rank(A) == M.rank()
    ns = la.nullspace(A)
    assert len(ns) == len(M.nullspace())
    for v in ns:
        assert not any(la.matvec(A, v))


@given(matrices(3, d=3))
def test_inverse(A):
    if not la.det(A):
        with pytest.raises(ZeroDivisionError):
            la.inverse(A)
        return
    assert la.matmul(A, la.inverse(A)) == la.identity(3)


@given(matrices(4))
def test_charpoly_matches_sympy(A):
    x = sp.Symbol("x")
    ref = sp.Poly(sym_matrix(A).charpoly(x).as_expr(), x).all_coeffs()[::-1]
    assert [sym(c) for c in la.charpoly(A)] == ref


def test_charpoly_over_quadratic_field():
    lam = Scalar(2, 1, 3)
    coeffs = la.charpoly(la.diag([lam, lam.conjugate()]))
    assert coeffs == [Scalar(1), Scalar(-4), Scalar(1)]


@given(st.lists(small_fractions, min_size=2, max_size=6))
def test_sturm_count_matches_numpy(coeffs):
    p = [Scalar(c) for c in coeffs]
    while p and not p[-1]:
        p.pop()
    if len(p) < 2:
        return
    roots = sp.Poly([sym(c) for c in reversed(p)], sp.Symbol("x")).real_roots()
    assert la.count_real_roots(p) == len(set(roots))
    assert la.count_real_roots(p, Scalar(0), Scalar(2)) == len({r for r in roots if 0 < r <= 2})


def test_isolation_excludes_zero():
    # x^2 - 1: roots +-1
    p = [Scalar(-1), Scalar(0), Scalar(1)]
    lo, hi = la.isolate_nonzero_real_root(p)
    assert la.count_real_roots(p, lo, hi) == 1
    assert not (lo.sign() < 0 < hi.sign())
    # x^2 + 1 has no real roots
    assert la.isolate_nonzero_real_root([Scalar(1), Scalar(0), Scalar(1)]) is None
    # x^3 (only zero roots)
    assert la.isolate_nonzero_real_root([Scalar(0)] * 3 + [Scalar(1)]) is None


def test_positive_definite():
    assert la.is_positive_definite(la.as_matrix([[2, 1], [1, 2]]))
    assert not la.is_positive_definite(la.as_matrix([[1, 2], [2, 1]]))
    assert not la.is_positive_definite(la.as_matrix([[1, 1], [0, 1]]))
    r = Scalar(0, 1, 2)
    assert la.is_positive_definite(la.as_matrix([[r, 1], [1, r]]))  # sqrt2 > 1
    assert not la.is_positive_definite(la.as_matrix([[r - 2, 0], [0, 1]]))


@pytest.mark.parametrize(
    "coeffs, expected",
    [
        ([1, -4, 1], False),
        ([1, 0, 1], True),
        ([1, 1, 1], True),
        ([-1, 1], True),
        ([1, -3, 1], False),
        ([2, -5, 2], False),
        ([1, -1, 1, -1, 1], True),  # 5th roots of unity except 1... cyclotomic factor
    ],
)
def test_unit_modulus_roots(coeffs, expected):
    p = [Scalar(c) for c in coeffs]
    assert la.has_unit_modulus_root(p) == expected
    ev = np.roots(list(reversed(coeffs)))
    assert bool(np.any(np.abs(np.abs(ev) - 1) < 1e-9)) == expected


@given(st.lists(st.integers(-4, 4), min_size=3, max_size=7))
def test_unit_modulus_roots_against_numpy(coeffs):
    if coeffs[-1] == 0 or coeffs[0] == 0:
        return
    ev = np.roots(list(reversed(coeffs)))
    dist = np.min(np.abs(np.abs(ev) - 1))
    if 1e-6 < dist < 1e-3:
        return  # too close to call numerically
    assert la.has_unit_modulus_root([Scalar(c) for c in coeffs]) == bool(dist <= 1e-6)
