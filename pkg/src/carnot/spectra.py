"""Lyapunov spectra of linear maps at fixed points and the spectral verifiers."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import sympy

from . import linalg as la
from .lie import GradedAlgebra
from .scalar import ONE, ZERO, Scalar, common_field

EXACT_TOL = 1e-8
QR_TOL = 1e-3


@dataclass(frozen=True)
class SpectrumReport:
    exponents: tuple  # ((value, multiplicity), ...) ascending
    source: str  # "exact_eigenvalues" | "qr_estimate"
    error_bound: float = 0.0
    iterations: int | None = None
    seed: int | None = None

    def values(self) -> list[float]:
        return [v for v, m in self.exponents for _ in range(m)]

    @property
    def dim(self) -> int:
        return sum(m for _, m in self.exponents)

    def to_dict(self) -> dict:
        out = {
            "exponents": [{"value": v, "multiplicity": m} for v, m in self.exponents],
            "source": self.source,
            "error_bound": self.error_bound,
        }
        if self.source == "qr_estimate":
            out["iterations"] = self.iterations
            out["seed"] = self.seed
        return out


def group_values(values: Sequence[float], tol: float = 1e-12) -> tuple:
    out: list[list] = []
    for v in sorted(values):
        if out and abs(v - out[-1][0]) <= tol:
            out[-1][1] += 1
        else:
            out.append([v, 1])
    return tuple((float(v), m) for v, m in out)


def _to_sympy(x: Scalar):
    return sympy.Rational(x.a.numerator, x.a.denominator) + sympy.Rational(x.b.numerator, x.b.denominator) * sympy.sqrt(
        x.d
    )


def _log_moduli(coeffs: Sequence[Scalar]) -> tuple[list[float], float]:
    """log|root| with multiplicity for det(xI - A), plus a numeric error bound."""
    d = common_field(coeffs)
    x = sympy.Symbol("x")
    expr = sum(_to_sympy(c) * x**k for k, c in enumerate(coeffs))
    ext = [sympy.sqrt(d)] if d != 1 else []
    _, factors = sympy.factor_list(sympy.expand(expr), x, extension=ext) if ext else sympy.factor_list(expr, x)
    out: list[float] = []
    bound = 0.0
    for f, mult in factors:
        poly = sympy.Poly(f, x)
        if poly.degree() <= 2:
            for r, rm in sympy.roots(poly).items():
                v = float(sympy.log(sympy.Abs(r)).evalf(30))
                out.extend([v] * (rm * mult))
        else:
            # irreducible of degree > 2: high-precision numerical roots
            for r in poly.nroots(n=30):
                out.extend([float(sympy.log(sympy.Abs(r)).evalf(30))] * mult)
            bound = max(bound, 1e-20)
    return out, bound


def lyapunov_spectrum(A) -> SpectrumReport:
    """Exponents log|eigenvalue| of a constant linear map, from its exact characteristic polynomial."""
    A = la.as_matrix(A)
    if not la.det(A):
        raise ValueError("matrix is singular")
    vals, bound = _log_moduli(la.charpoly(A))
    return SpectrumReport(group_values(vals), "exact_eigenvalues", bound)


# block structure -----------------------------------------------------------

@dataclass(frozen=True)
class BlockStructure:
    block_upper_triangular: bool
    diagonal_blocks: tuple = ()
    violation: tuple[int, int] | None = None
    diagonal_products_ok: bool | None = None
    product_mismatch: tuple | None = None


def check_block_structure(A, g: GradedAlgebra) -> BlockStructure:
    """Block upper triangularity w.r.t. the layers (entries may only map higher layers into lower ones)."""
    A = la.as_matrix(A)
    n = g.dim
    if len(A) != n:
        raise ValueError("dimension mismatch")
    gr = g.grading
    for a in range(n):
        for b in range(n):
            if A[a][b] and gr.layer_of(a) > gr.layer_of(b):
                return BlockStructure(False, violation=(a, b))
    blocks = tuple(la.submatrix(A, L, L) for L in g.layers)
    L0 = g.layers[0]
    if any(A[a][b] for a in L0 for b in L0 if a != b):
        return BlockStructure(True, blocks)
    # layer 0 diagonal: predict the diagonal of higher layers from bracket provenance
    value = {a: A[a][a] for a in L0}
    alg = g.algebra
    for i in range(1, len(g.layers)):
        L = g.layers[i]
        if any(A[a][b] for a in L for b in L if a != b):
            continue
        for k in L:
            source = next(
                ((p, q) for (p, q), row in alg.brackets.items() if row.get(k) and p in value and q in value),
                None,
            )
            if source is None:
                continue
            predicted = value[source[0]] * value[source[1]]
            if A[k][k] != predicted:
                return BlockStructure(True, blocks, diagonal_products_ok=False, product_mismatch=(k, source))
            value[k] = A[k][k]
    return BlockStructure(True, blocks, diagonal_products_ok=True)


# arithmeticity -------------------------------------------------------------

@dataclass(frozen=True)
class ArithmeticityVerdict:
    holds: bool
    lam: float
    expected: tuple  # ((k * log lam, d_{k-1}), ...)
    max_deviation: float
    reason: str = ""


def layer_spectra(A, g: GradedAlgebra) -> list[list[float]] | None:
    """Exponents of each diagonal block, or None if A is not block upper triangular."""
    bs = check_block_structure(A, g)
    if not bs.block_upper_triangular:
        return None
    return [sorted(lyapunov_spectrum(B).values()) for B in bs.diagonal_blocks]


def verify_arithmeticity(A, g: GradedAlgebra, tol: float = EXACT_TOL) -> ArithmeticityVerdict:
    per_layer = layer_spectra(A, g)
    if per_layer is None:
        return ArithmeticityVerdict(False, math.nan, (), math.inf, "not block upper triangular")
    log_lam = sum(per_layer[0]) / len(per_layer[0])
    expected = tuple(((i + 1) * log_lam, len(vals)) for i, vals in enumerate(per_layer))
    dev = max(abs(v - (i + 1) * log_lam) for i, vals in enumerate(per_layer) for v in vals)
    return ArithmeticityVerdict(dev <= tol, math.exp(log_lam), expected, dev)


# inequalities --------------------------------------------------------------

@dataclass(frozen=True)
class SubadditivityResult:
    holds: bool
    violation: tuple[int, int] | None = None  # (level i, global 1-based index j)


def verify_subadditivity(levels: Sequence[Sequence[float]], tol: float = 1e-12) -> SubadditivityResult:
    """Check (i+1) min(level 0) <= e <= (i+1) max(level 0) for every e in level i."""
    levels = [sorted(lv) for lv in levels]
    if not levels or not levels[0]:
        raise ValueError("need a nonempty level 0")
    lo, hi = levels[0][0], levels[0][-1]
    j = 0
    for i, lv in enumerate(levels):
        for e in lv:
            j += 1
            if e < (i + 1) * lo - tol or e > (i + 1) * hi + tol:
                return SubadditivityResult(False, (i, j))
    return SubadditivityResult(True)


@dataclass(frozen=True)
class HeisenbergResult:
    holds: bool
    n: int
    deviation: float


def verify_heisenberg_additivity(exponents: Sequence[float], tol: float = 1e-10) -> HeisenbergResult:
    """sum of the 2n horizontal exponents against n times the last (center) exponent."""
    if len(exponents) % 2 == 0:
        raise ValueError("need an odd number 2n+1 of exponents")
    n = len(exponents) // 2
    dev = abs(math.fsum(exponents[:-1]) - n * exponents[-1])
    return HeisenbergResult(dev <= tol, n, dev)


def heisenberg_additivity_exact(A, g: GradedAlgebra, tol: float = 1e-10) -> HeisenbergResult:
    """Same test for a block triangular map on a Heisenberg grading, via exact determinants.

    The deviation is log|det(A_0) / a_center^n|, which is exactly 0.0 when the
    identity holds in the field.
    """
    bs = check_block_structure(A, g)
    if not bs.block_upper_triangular or len(g.layers) != 2 or len(g.layers[1]) != 1:
        raise ValueError("expects a block triangular map on a Heisenberg-type grading")
    d0 = len(g.layers[0])
    if d0 % 2:
        raise ValueError("horizontal layer must be even dimensional")
    n = d0 // 2
    center = bs.diagonal_blocks[1][0][0]
    ratio = la.det(bs.diagonal_blocks[0]) / center**n
    dev = abs(math.log(abs(float(ratio)))) if abs(ratio) != ONE else 0.0
    return HeisenbergResult(dev <= tol, n, dev)


# dominated splitting -------------------------------------------------------

@dataclass(frozen=True)
class DominationResult:
    satisfied: bool
    t: float | None = None


def check_dominated_splitting(
    E_norms: Callable[[float], float],
    F_conorms: Callable[[float], float],
    C: float,
    lam: float,
    T: float,
    step: float,
    rtol: float = 1e-12,
) -> DominationResult:
    """Finite-horizon check of ||a_t|E|| * ||a_-t|F|| <= C lam^t on t = 0, step, ..., T."""
    if not 0 < lam < 1 or C <= 0 or step <= 0:
        raise ValueError("need 0 < lam < 1, C > 0 and step > 0")
    k = 0
    while k * step <= T + 1e-12 * max(T, 1):
        t = k * step
        bound = C * lam**t
        if E_norms(t) * F_conorms(t) > bound * (1 + rtol):
            return DominationResult(False, t)
        k += 1
    return DominationResult(True)
