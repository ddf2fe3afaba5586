"""One test per acceptance criterion, each run at its stated tolerance and time limit.

Every test records a single PASS/FAIL line; the lines are printed in the
terminal summary (see conftest.py) and by ``python3 tests/test_acceptance.py``.
"""
import contextlib
import io
import json
import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from carnot import linalg as la
from carnot.algebras import filiform, heisenberg
from carnot.autgroup import asymmetry_verdict, is_graded_automorphism, validate_asymmetric, validate_not_asymmetric
from carnot.cli import main
from carnot.lie import block_diagonal_change, check_jacobi, verify_grading
from carnot.metivier import evaluate_filtration, genericity_check, tangent_cone
from carnot.nilmanifold import (
    NilGroupModel,
    automorphism_map,
    build_smale_system,
    qr_lyapunov_estimate,
    translated_map,
)
from carnot.polyfield import PolyVectorField
from carnot.scalar import Scalar
from carnot.spectra import (
    heisenberg_additivity_exact,
    layer_spectra,
    lyapunov_spectrum,
    verify_arithmeticity,
    verify_heisenberg_additivity,
    verify_subadditivity,
)
from generators import (
    diagonalizable_rational,
    dilation_rotation,
    heisenberg_map,
    random_block_diagonal,
    random_graded_automorphism,
    random_symplectic,
)

RESULTS: dict = {}

LAM = Scalar(2, 1, 3)
LOG_LAM = math.log(2 + math.sqrt(3))
X = PolyVectorField.from_terms(3, [{(0, 0, 0): 1}, {}, {}])
Y_HEIS = PolyVectorField.from_terms(3, [{}, {(0, 0, 0): 1}, {(1, 0, 0): 1}])
Y_MART = PolyVectorField.from_terms(3, [{}, {(0, 0, 0): 1}, {(2, 0, 0): 1}])
ORIGIN = (0, 0, 0)
OFF_PLANE = (1, 0, 0)
BUNDLED = {"heisenberg3": heisenberg(), "heisenberg5": heisenberg(2), "filiform_r3": filiform(3)}


def record(n, checks: dict, elapsed=None, limit=None, note=""):
    """Store the verdict line for criterion n and return whether it passed."""
    if limit is not None:
        checks[f"runtime<{limit}s"] = elapsed < limit
    ok = all(checks.values())
    failed = [k for k, v in checks.items() if not v]
    timing = f" [{elapsed:.2f}s]" if elapsed is not None else ""
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}{timing}"
    if failed:
        line += "  failed: " + ", ".join(failed)
    if note:
        line += f"  ({note})"
    RESULTS[n] = line
    print(line)
    return ok


def cli(argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(argv)
    return code, json.loads(buf.getvalue())


def test_criterion_1_smale_end_to_end():
    t0 = time.perf_counter()
    code, rep = cli(["anosov", "build", "--example", "smale"])
    system = build_smale_system()
    U = system.unstable_block()
    # exact: the unstable characteristic polynomial is (x - lam)(x - lam^2)(x - lam^3), low degree first
    e1, e2, e3 = LAM + LAM**2 + LAM**3, LAM**3 + LAM**4 + LAM**5, LAM**6
    expected = [-e3, e2, -e1, Scalar(1)]
    values = lyapunov_spectrum(U).values()
    hcode, hrep = cli(["spectrum", "verify", "smale_unstable.json", "--algebra", "heisenberg3.json", "--theorem", "heis"])
    elapsed = time.perf_counter() - t0
    certs = rep["verdicts"]["system"]["certificates"]
    checks = {
        "build exit 0": code == 0,
        "lambda = 2+sqrt3": system.lam == LAM,
        "certificates": all(certs.values()) and len(certs) == 4,
        "exact charpoly": la.charpoly(U) == expected,
        "exponents k log lam": np.allclose(values, [LOG_LAM, 2 * LOG_LAM, 3 * LOG_LAM], rtol=0, atol=1e-14),
        "heis exit 0": hcode == 0,
        "heis deviation 0": hrep["verdicts"]["holds"] and hrep["verdicts"]["deviation"] == 0.0,
    }
    assert record(1, checks, elapsed, 1.0)


def test_criterion_2_heisenberg_cone():
    t0 = time.perf_counter()
    code, rep = cli(["cone", "compute", "heisenberg_model.json"])
    cone = tangent_cone([X, Y_HEIS], ORIGIN)
    elapsed = time.perf_counter() - t0
    checks = {
        "exit 0": code == 0,
        "c(e1,e2)=e3 only": rep["verdicts"]["algebra"]["brackets"] == [{"i": 0, "j": 1, "out": {"2": "1"}}],
        "library agrees": dict(cone.algebra.algebra.brackets) == {(0, 1): {2: Scalar(1)}},
        "jacobi": check_jacobi(cone.algebra.algebra).ok,
        "graded_carnot": verify_grading(cone.algebra).label == "graded_carnot",
    }
    assert record(2, checks, elapsed, 1.0)


def test_criterion_3_martinet_genericity():
    t0 = time.perf_counter()
    v = genericity_check([X, Y_MART], ORIGIN)
    off = evaluate_filtration([X, Y_MART], OFF_PLANE)
    elapsed = time.perf_counter() - t0
    checks = {
        "origin non_generic": not v.generic,
        "witness dims differ": v.witness is not None and v.witness_dims != v.base_dims,
        "off-plane dims [2,3]": off.dims == (2, 3),
    }
    assert record(3, checks, elapsed, 1.0, f"witness {[str(c) for c in v.witness]} dims {list(v.witness_dims)}")


def test_criterion_4_asymmetry_verdicts():
    t0 = time.perf_counter()
    H, F = BUNDLED["heisenberg3"], BUNDLED["filiform_r3"]
    vh, vf = asymmetry_verdict(H), asymmetry_verdict(F)
    invariant = True
    for seed in range(20):
        rng = random.Random(seed)
        for g, base in ((H, vh), (F, vf)):
            h = block_diagonal_change(g, random_block_diagonal(rng, g))
            v = asymmetry_verdict(h, seed=seed)
            valid = (validate_not_asymmetric(h, v.certificate, v.eigen_interval) if v.verdict == "not_asymmetric"
                     else validate_asymmetric(h, v.certificate))
            invariant &= v.verdict == base.verdict and valid
    elapsed = time.perf_counter() - t0
    checks = {
        "heisenberg3 not_asymmetric": vh.verdict == "not_asymmetric",
        "heisenberg3 certificate": validate_not_asymmetric(H, vh.certificate, vh.eigen_interval),
        "filiform_r3 asymmetric": vf.verdict == "asymmetric",
        "filiform_r3 PD certificate": vf.verdict == "asymmetric" and validate_asymmetric(F, vf.certificate),
        "invariant under 20 basis changes": invariant,
    }
    note = f"filiform_r3 verdict {vf.verdict}"
    if vf.verdict == "not_asymmetric":
        note += f", validated trace-zero derivation certificate: {validate_not_asymmetric(F, vf.certificate, vf.eigen_interval)}"
    assert record(4, checks, elapsed, 10.0, note)


def test_criterion_5_spectral_property_suites():
    t0 = time.perf_counter()
    algebras = list(BUNDLED.values())
    arith = subadd = heis = 0
    for seed in range(100):
        rng = random.Random(seed)
        g = algebras[seed % 3]
        A = dilation_rotation(rng, g)
        arith += is_graded_automorphism(g, A).ok and verify_arithmeticity(A, g, tol=1e-8).holds
    for seed in range(100):
        rng = random.Random(1000 + seed)
        g = algebras[seed % 3]
        A = random_graded_automorphism(rng, g)
        subadd += is_graded_automorphism(g, A).ok and verify_subadditivity(layer_spectra(A, g), tol=1e-8).holds
    sigmas = [Scalar(Fraction(3, 2)), LAM, Scalar(-2), Scalar(1, 1, 2)]
    for seed in range(100):
        rng = random.Random(2000 + seed)
        n = 1 + seed % 2
        g = heisenberg(n)
        A = heisenberg_map(random_symplectic(rng, n), sigmas[seed % 4])
        levels = layer_spectra(A, g)
        numeric = verify_heisenberg_additivity(sorted(levels[0]) + levels[1], tol=1e-10).holds
        heis += is_graded_automorphism(g, A).ok and numeric and heisenberg_additivity_exact(A, g, tol=1e-10).holds
    elapsed = time.perf_counter() - t0
    checks = {"arithmeticity 100/100": arith == 100, "subadditivity 100/100": subadd == 100,
              "heisenberg additivity 100/100": heis == 100}
    assert record(5, checks, elapsed, 30.0, f"{arith}/{subadd}/{heis}")


def test_criterion_6_qr_estimator():
    t0 = time.perf_counter()
    N = 10_000
    worst_const = worst_sum = 0.0
    rng = random.Random(6)
    cocycles = [la.diag([LAM, LAM**2, LAM**3, LAM.conjugate()])]
    cocycles += [diagonalizable_rational(random.Random(seed), 4) for seed in range(5)]
    for A in cocycles:
        exact = lyapunov_spectrum(A).values()
        fA = la.to_float(A)
        est = qr_lyapunov_estimate(lambda x: x, lambda x, fA=fA: fA, x0=np.zeros(len(A)), iterations=N,
                                   seed=rng.randrange(100))
        worst_const = max(worst_const, float(np.max(np.abs(est.exponents - exact))))
        worst_sum = max(worst_sum, abs(est.exponents.sum() - est.mean_log_det))
    system = build_smale_system()
    exact = lyapunov_spectrum(system.map).values()
    worst_affine = 0.0
    for g0 in [(Fraction(1, 3), Fraction(-1, 2), Fraction(1, 5), 0, Fraction(2, 7), 1),
               (0, 0, 0, 0, 0, 0)]:
        f = translated_map(system, g0) if any(g0) else automorphism_map(system)
        est = qr_lyapunov_estimate(f, iterations=N, seed=1)
        worst_affine = max(worst_affine, float(np.max(np.abs(est.exponents - exact))))
        worst_sum = max(worst_sum, abs(est.exponents.sum() - est.mean_log_det))
    elapsed = time.perf_counter() - t0
    checks = {"constant cocycles within 1e-6": worst_const < 1e-6,
              "left translations within 1e-6": worst_affine < 1e-6,
              "sums vs mean log det within 1e-6": worst_sum < 1e-6}
    assert record(6, checks, elapsed, 60.0, f"max errors {worst_const:.1e} / {worst_affine:.1e} / {worst_sum:.1e}")


def test_criterion_7_bch_exactness():
    t0 = time.perf_counter()
    models = {name: NilGroupModel(g) for name, g in BUNDLED.items()}
    models["smale_product"] = build_smale_system().product
    assoc = inverse = True
    rng = random.Random(7)
    for m in models.values():
        for _ in range(100):
            x, y, z = (tuple(Scalar(Fraction(rng.randint(-9, 9), rng.randint(1, 6))) for _ in range(m.dim))
                       for _ in range(3))
            assoc &= m.multiply(m.multiply(x, y), z) == m.multiply(x, m.multiply(y, z))
            inverse &= not any(m.multiply(x, m.inverse(x))) and not any(m.multiply(m.inverse(x), x))
    elapsed = time.perf_counter() - t0
    assert record(7, {"associativity": assoc, "inverse law": inverse}, elapsed, 5.0)


def test_criterion_8_bracket_of_homogeneous_parts():
    heis = tangent_cone([X, Y_HEIS], ORIGIN)
    mart = tangent_cone([X, Y_MART], OFF_PLANE)
    checks = {"heisenberg pairs": heis.bracket_identity_failures() == [],
              "martinet off-origin pairs": mart.bracket_identity_failures() == []}
    pairs = len(heis.adapted) * (len(heis.adapted) - 1) // 2 + len(mart.adapted) * (len(mart.adapted) - 1) // 2
    assert record(8, checks, note=f"{pairs} frame pairs checked exactly")


def test_criterion_9_perturbation_probe(tmp_path):
    t0 = time.perf_counter()
    out = tmp_path / "probe.json"
    code, rep = cli(["lyapunov", "estimate", "--system", "smale", "--eps", "1e-3", "--iters", "100000",
                     "--seed", "7", "--out", str(out)])
    elapsed = time.perf_counter() - t0
    v = rep["verdicts"]
    table = v.get("deviation_table", [])
    completed = code == 0 and len(table) == 6 and all(math.isfinite(r["estimate"]) for r in table)
    within = completed and v["max_deviation"] < 5e-2
    for row in table:
        print(f"  exact {row['exact']:+.6f}  estimate {row['estimate']:+.6f}  deviation {row['deviation']:.2e}")
    note = f"report-only: max deviation {v.get('max_deviation', float('nan')):.2e}, within 5e-2: {within}"
    assert record(9, {"completed without blowup": completed}, elapsed, note=note)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
