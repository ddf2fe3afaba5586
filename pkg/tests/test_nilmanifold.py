import random
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings

from carnot import linalg as la
from carnot.algebras import filiform, heisenberg
from carnot.autgroup import is_graded_automorphism
from carnot.nilmanifold import (
    MAX_BCH_ORDER,
    AnosovConstructionError,
    NilGroupModel,
    NumericalBlowup,
    Reducer,
    automorphism_map,
    bch_coefficients,
    bch_multiply,
    build_product_anosov,
    build_smale_system,
    is_lattice_element,
    make_periodic_perturbation,
    malcev_reduce,
    qr_lyapunov_estimate,
    recheck_certificates,
    translated_map,
)
from carnot.scalar import Scalar
from conftest import rational_vectors
from carnot.spectra import lyapunov_spectrum
from generators import diagonalizable_rational
from oracles import heisenberg_product, log_moduli, sym

LAM = Scalar(2, 1, 3)
H3 = NilGroupModel(heisenberg())
FIL = NilGroupModel(filiform(3))


@pytest.fixture(scope="module")
def smale():
    return build_smale_system()


# BCH -----------------------------------------------------------------------

def test_bch_heisenberg_example():
    e1, e2 = la.unit(3, 0), la.unit(3, 1)
    assert bch_multiply(H3, e1, e2) == (1, 1, Fraction(1, 2))


def test_bch_low_order_coefficients():
    coeffs = dict(bch_coefficients(3))
    assert coeffs[(0,)] == 1 and coeffs[(1,)] == 1
    # both orders of a two-letter word appear; together they give 1/2 [x, y]
    assert coeffs[(0, 1)] - coeffs[(1, 0)] == Fraction(1, 2)
    # words ending in a repeated letter give zero brackets and are dropped
    assert all(w[-1] != w[-2] for w in coeffs if len(w) > 1)


def test_bch_order_cap():
    with pytest.raises(ValueError):
        bch_coefficients(MAX_BCH_ORDER + 1)


def test_heisenberg_associativity_example():
    e = [la.unit(3, k) for k in range(3)]
    assert H3.multiply(H3.multiply(e[0], e[1]), e[2]) == H3.multiply(e[0], H3.multiply(e[1], e[2]))


@given(rational_vectors(3), rational_vectors(3))
def test_heisenberg_product_matches_matrix_oracle(x, y):
    assert [sym(c) for c in H3.multiply(x, y)] == heisenberg_product([sym(c) for c in x], [sym(c) for c in y])


@settings(max_examples=100)
@given(rational_vectors(3), rational_vectors(3), rational_vectors(3))
def test_heisenberg_associative(x, y, z):
    assert H3.multiply(H3.multiply(x, y), z) == H3.multiply(x, H3.multiply(y, z))


@settings(max_examples=100)
@given(rational_vectors(6), rational_vectors(6), rational_vectors(6))
def test_filiform_associative(x, y, z):
    assert FIL.multiply(FIL.multiply(x, y), z) == FIL.multiply(x, FIL.multiply(y, z))


@given(rational_vectors(6))
def test_inverse_law(x):
    assert not any(FIL.multiply(x, FIL.inverse(x)))
    assert FIL.multiply(x, (Scalar(0),) * 6) == x


def test_float_product_matches_exact():
    rng = random.Random(1)
    for _ in range(10):
        x = tuple(Scalar(Fraction(rng.randint(-9, 9), 4)) for _ in range(6))
        y = tuple(Scalar(Fraction(rng.randint(-9, 9), 4)) for _ in range(6))
        assert np.allclose(FIL.fmultiply(la.to_float([x])[0], la.to_float([y])[0]), [float(c) for c in FIL.multiply(x, y)])


def test_step_reported():
    assert H3.step == 2 and H3.bch_order == 2
    assert FIL.step == 5


# product Anosov systems ---------------------------------------------------------

def test_smale_certificates(smale):
    assert smale.certificates == {
        "graded_automorphism": True,
        "integrality": True,
        "lattice_lie_ring": True,
        "hyperbolicity": True,
    }
    assert recheck_certificates(smale) == smale.certificates
    assert smale.unstable_block() == la.diag([LAM, LAM**2, LAM**3])


def test_smale_lattice_map(smale):
    LM = smale.lattice_map
    assert all(x.is_integer() for row in LM for x in row)
    blocks = [la.submatrix(LM, (2 * i, 2 * i + 1), (2 * i, 2 * i + 1)) for i in range(3)]
    assert [b[0][0] + b[1][1] for b in blocks] == [4, 14, 52]
    assert blocks[0] == la.as_matrix([[2, 3], [1, 2]])
    assert la.det(LM) == 1
    assert is_graded_automorphism(smale.product.algebra, smale.map).ok


def test_smale_map_has_no_unit_eigenvalues(smale):
    ev = np.abs(np.linalg.eigvals(smale.float_map()))
    assert np.all(np.abs(ev - 1) > 0.1)


def test_sqrt2_system():
    s = build_product_anosov(heisenberg(), Scalar(1, 1, 2))
    assert all(recheck_certificates(s).values())


def test_non_integral_lambda_rejected():
    with pytest.raises(AnosovConstructionError) as exc:
        build_product_anosov(heisenberg(), Scalar(Fraction(3, 2), 1, 3))
    assert exc.value.certificate == "integrality"


def test_bad_lambda_rejected():
    with pytest.raises(ValueError):
        build_product_anosov(heisenberg(), Scalar(3))
    with pytest.raises(ValueError):
        build_product_anosov(heisenberg(), Scalar(1, 1, 3).conjugate())  # |lam| < 1


# reduction ----------------------------------------------------------------

def test_generators_reduce_to_identity(smale):
    gens = la.transpose(smale.lattice_basis)
    for g in gens:
        assert not any(malcev_reduce(smale, g))
        assert is_lattice_element(smale, g)


def test_box_point_is_fixed(smale):
    coords = [Fraction(k + 1, 9) for k in range(6)]
    x = la.matvec(smale.lattice_basis, [Scalar(c) for c in coords])
    red = Reducer(smale)
    # a point whose lattice coordinates are in [0, 1) only moves if a word is applied
    y, word = red.reduce(x, return_word=True)
    assert all(m == 0 for _, m in word)
    assert y == x


@pytest.mark.parametrize("seed", range(5))
def test_reduction_differs_by_lattice_element(smale, seed):
    rng = random.Random(seed)
    x = tuple(Scalar(Fraction(rng.randint(-40, 40), rng.randint(1, 5))) for _ in range(6))
    y = malcev_reduce(smale, x)
    c = Reducer(smale).coords(y)
    assert all(0 <= v < 1 for v in c)
    gamma = smale.product.multiply(smale.product.inverse(x), y)
    assert is_lattice_element(smale, gamma)


def test_float_reduction_lands_in_box(smale):
    rng = np.random.default_rng(0)
    red = Reducer(smale)
    for _ in range(20):
        x = rng.normal(scale=30, size=6)
        c = red.coords(red.reduce(x))
        assert np.all(c >= -1e-9) and np.all(c < 1 + 1e-9)


# QR estimation ---------------------------------------------------------------

@pytest.mark.parametrize("seed", range(3))
def test_qr_constant_cocycle_matches_numpy(seed):
    rng = np.random.default_rng(seed)
    M = np.diag([3.0, 0.5, 1.5, 0.2]) + np.triu(rng.normal(size=(4, 4)), 1)
    P = rng.normal(size=(4, 4))
    A = P @ M @ np.linalg.inv(P)
    est = qr_lyapunov_estimate(lambda x: x, lambda x: A, x0=np.zeros(4), iterations=2000, seed=seed)
    assert np.allclose(est.exponents, log_moduli(A), atol=1e-6)
    assert est.exponents.sum() == pytest.approx(est.mean_log_det, abs=1e-8)


@pytest.mark.parametrize("seed", range(4))
def test_qr_diagonalizable_rational_cocycles(seed):
    A = diagonalizable_rational(random.Random(seed), 4)
    exact = lyapunov_spectrum(A).values()
    fA = la.to_float(A)
    est = qr_lyapunov_estimate(lambda x: x, lambda x: fA, x0=np.zeros(4), iterations=10_000, seed=seed)
    assert np.max(np.abs(est.exponents - exact)) < 1e-6


def test_qr_complex_pair_converges_slowly_but_within_reported_bound():
    # x^3 - x - 1: a complex pair of equal modulus makes the per-step diagonal of R
    # oscillate, so each running mean only converges like 1/N
    A = la.as_matrix([[0, 0, 1], [1, 0, 1], [0, 1, 0]])
    exact = lyapunov_spectrum(A).values()
    fA = la.to_float(A)
    errs = []
    for N in (10_000, 100_000):
        est = qr_lyapunov_estimate(lambda x: x, lambda x: fA, x0=np.zeros(3), iterations=N, seed=3)
        err = np.max(np.abs(est.exponents - exact))
        assert err <= est.report.error_bound
        errs.append(err)
    assert errs[1] < errs[0] / 5
    assert est.exponents.sum() == pytest.approx(est.mean_log_det, abs=1e-10)


def test_qr_identity_gives_zero():
    est = qr_lyapunov_estimate(lambda x: x, lambda x: np.eye(3), x0=np.zeros(3), iterations=200)
    assert np.allclose(est.exponents, 0)
    assert est.report.source == "qr_estimate" and est.report.seed == 0


def test_qr_smale_automorphism(smale):
    est = qr_lyapunov_estimate(automorphism_map(smale), iterations=2000, seed=3)
    exact = sorted(np.log(np.abs(np.diag(smale.float_map()))))
    assert np.allclose(est.exponents, exact, atol=1e-6)
    assert est.report.iterations == 2000 and est.report.seed == 3


def test_qr_translated_map(smale):
    g0 = (Fraction(1, 3), Fraction(-1, 2), Fraction(1, 5), 0, Fraction(2, 7), 1)
    est = qr_lyapunov_estimate(translated_map(smale, g0), iterations=2000)
    exact = sorted(np.log(np.abs(np.diag(smale.float_map()))))
    assert np.allclose(est.exponents, exact, atol=1e-6)


def test_qr_blowup():
    with pytest.raises(NumericalBlowup):
        qr_lyapunov_estimate(lambda x: x, lambda x: np.full((2, 2), np.nan), x0=np.zeros(2), iterations=10)


def test_qr_argument_errors():
    with pytest.raises(ValueError):
        qr_lyapunov_estimate(lambda x: x, lambda x: np.eye(2), iterations=10)
    with pytest.raises(ValueError):
        qr_lyapunov_estimate(lambda x: x, lambda x: np.eye(2), x0=np.zeros(2), iterations=0)


# perturbations -------------------------------------------------------------------

def test_zero_amplitude_is_the_automorphism(smale):
    f = make_periodic_perturbation(smale, 0.0, seed=4)
    M = smale.float_map()
    x = np.random.default_rng(0).normal(size=6)
    assert np.array_equal(f.step(x), M @ x)
    assert np.array_equal(f.jacobian(x), M)


def test_amplitude_range():
    s = build_smale_system()
    with pytest.raises(ValueError):
        make_periodic_perturbation(s, 0.5)


def _fd_jacobian(model, step, x, h=1e-5):
    # right-invariant frame: step(exp(hv) x) * step(x)^-1 ~ exp(h J v)
    fx_inv = -step(x)
    cols = []
    for k in range(len(x)):
        v = np.zeros(len(x))
        v[k] = h
        plus = model.fmultiply(step(model.fmultiply(v, x)), fx_inv)
        minus = model.fmultiply(step(model.fmultiply(-v, x)), fx_inv)
        cols.append((plus - minus) / (2 * h))
    return np.array(cols).T


def test_perturbation_jacobian_matches_finite_differences(smale):
    f = make_periodic_perturbation(smale, 0.05, seed=1)
    rng = np.random.default_rng(2)
    for _ in range(20):
        x = Reducer(smale).fB @ rng.uniform(0, 1, 6)
        J = f.jacobian(x)
        Jfd = _fd_jacobian(smale.product, f.step, x)
        assert np.linalg.norm(J - Jfd) / np.linalg.norm(J) < 1e-6


def test_perturbation_is_lattice_equivariant(smale):
    f = make_periodic_perturbation(smale, 0.05, seed=2)
    model = smale.product
    gens = la.to_float(la.transpose(smale.lattice_basis))
    rng = np.random.default_rng(5)
    for _ in range(10):
        x = Reducer(smale).fB @ rng.uniform(0.2, 0.8, 6)
        gamma = np.zeros(6)
        for k in rng.integers(0, 6, size=3):
            gamma = model.fmultiply(gamma, gens[k])
        xg = model.fmultiply(x, gamma)
        assert np.allclose(f.jacobian(xg), f.jacobian(x), atol=1e-9)
        # the unreduced images differ by the lattice element M(gamma)
        diff = model.fmultiply(model.fmultiply(-f.step(x), f.step(xg)), -(smale.float_map() @ gamma))
        assert np.allclose(diff, 0, atol=1e-8)


def test_small_perturbation_close_to_exact(smale):
    f = make_periodic_perturbation(smale, 1e-3, seed=0)
    est = qr_lyapunov_estimate(f, iterations=3000, seed=0)
    exact = sorted(np.log(np.abs(np.diag(smale.float_map()))))
    assert np.max(np.abs(est.exponents - exact)) < 1e-2
    assert est.exponents.sum() == pytest.approx(est.mean_log_det, abs=1e-8)
