"""Nilpotent groups through the BCH product, product Anosov automorphisms of
nilmanifolds, lattice reduction and QR estimation of Lyapunov exponents."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product as iproduct
from typing import Callable, Sequence

import numpy as np

from . import linalg as la
from .autgroup import is_graded_automorphism
from .lie import GradedAlgebra, Grading, LieAlgebra, bracket_of, change_basis, nilpotency_step
from .scalar import ONE, ZERO, Scalar
from .spectra import SpectrumReport, group_values

MAX_BCH_ORDER = 6


# BCH ---------------------------------------------------------------------------

def _series_mul(a: dict, b: dict, order: int) -> dict:
    out: dict = {}
    for w1, c1 in a.items():
        for w2, c2 in b.items():
            if len(w1) + len(w2) <= order:
                w = w1 + w2
                out[w] = out.get(w, 0) + c1 * c2
    return {w: c for w, c in out.items() if c}


@lru_cache(maxsize=None)
def bch_coefficients(order: int) -> tuple:
    """Words over {0: x, 1: y} with coefficients so that
    log(e^x e^y) = sum c_w [w_1, [w_2, ... [w_{k-1}, w_k]]] up to length ``order``.

    Computed in the truncated free associative algebra, then converted to
    right-nested brackets by the Dynkin-Specht-Wever projection (divide by length).
    """
    if not 1 <= order <= MAX_BCH_ORDER:
        raise ValueError(f"BCH order must be between 1 and {MAX_BCH_ORDER}")

    def exp_series(letter):
        return {(letter,) * k: Fraction(1, math.factorial(k)) for k in range(order + 1)}

    prod = _series_mul(exp_series(0), exp_series(1), order)
    z = {w: c for w, c in prod.items() if w}  # e^x e^y - 1
    log: dict = {}
    power = {(): Fraction(1)}
    for n in range(1, order + 1):
        power = _series_mul(power, z, order)
        for w, c in power.items():
            log[w] = log.get(w, 0) + Fraction((-1) ** (n + 1), n) * c
    out = []
    for w, c in sorted(log.items(), key=lambda t: (len(t[0]), t[0])):
        if not c or (len(w) > 1 and w[-1] == w[-2]):
            continue
        out.append((w, c / len(w)))
    # merge is unnecessary: each word appears once
    return tuple(out)


def _nested(word, letters, br, memo):
    if word in memo:
        return memo[word]
    if len(word) == 1:
        v = letters[word[0]]
    else:
        v = br(letters[word[0]], _nested(word[1:], letters, br, memo))
    memo[word] = v
    return v


@dataclass(frozen=True)
class NilGroupModel:
    """Simply connected nilpotent group in exponential coordinates."""

    algebra: GradedAlgebra
    step: int = 0
    tensor: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        step = nilpotency_step(self.algebra.algebra)
        if step > MAX_BCH_ORDER:
            raise ValueError(f"step {step} exceeds the supported BCH order {MAX_BCH_ORDER}")
        object.__setattr__(self, "step", step)
        object.__setattr__(self, "tensor", self.algebra.algebra.structure_tensor())

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @property
    def bch_order(self) -> int:
        return self.step

    def bracket(self, x, y):
        return bracket_of(self.algebra.algebra, x, y)

    def fbracket(self, x, y):
        return np.einsum("i,j,ijk->k", x, y, self.tensor)

    def multiply(self, x, y) -> la.Vector:
        x, y = la.as_vector(x), la.as_vector(y)
        memo: dict = {}
        total = [ZERO] * self.dim
        for w, c in bch_coefficients(self.step):
            v = _nested(w, (x, y), self.bracket, memo)
            if any(v):
                cs = Scalar(c)
                total = [t + cs * a for t, a in zip(total, v)]
        return tuple(total)

    def fmultiply(self, x, y) -> np.ndarray:
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        memo: dict = {}
        total = np.zeros(self.dim)
        for w, c in bch_coefficients(self.step):
            total += float(c) * _nested(w, (x, y), self.fbracket, memo)
        return total

    def inverse(self, x):
        return tuple(-a for a in la.as_vector(x))

    def ad(self, x) -> np.ndarray:
        """Matrix of y -> [x, y] (floats)."""
        return np.einsum("i,ijk->kj", np.asarray(x, dtype=float), self.tensor)

    def Ad(self, x) -> np.ndarray:
        """exp(ad x); the series terminates because ad x is nilpotent."""
        A = self.ad(x)
        out = np.eye(self.dim)
        term = np.eye(self.dim)
        for k in range(1, self.step + 1):
            term = term @ A / k
            out = out + term
        return out

    def dexp_right(self, x) -> np.ndarray:
        """sum_k ad_x^k / (k+1)!, the right-trivialised differential of exp at x."""
        A = self.ad(x)
        out = np.eye(self.dim)
        term = np.eye(self.dim)
        for k in range(1, self.step + 1):
            term = term @ A / (k + 1)
            out = out + term
        return out


def bch_multiply(model: NilGroupModel, x, y):
    return model.multiply(x, y)


# product Anosov systems ------------------------------------------------------------

class AnosovConstructionError(ValueError):
    def __init__(self, certificate: str, detail: str):
        self.certificate = certificate
        self.detail = detail
        super().__init__(f"{certificate} certificate failed: {detail}")


def product_algebra(g: GradedAlgebra) -> GradedAlgebra:
    """g x g^sigma, the second factor carrying Galois-conjugate structure constants."""
    n = g.dim
    alg = g.algebra
    conj = alg.conjugate()
    table = {}
    for (i, j), row in alg.brackets.items():
        table[(i, j)] = dict(row)
    for (i, j), row in conj.brackets.items():
        table[(i + n, j + n)] = {k + n: c for k, c in row.items()}
    basis = tuple(alg.basis) + tuple(f"{b}'" for b in alg.basis)
    palg = LieAlgebra.from_brackets(2 * n, table, basis, alg.field)
    layers = tuple(tuple(L) + tuple(k + n for k in L) for L in g.layers)
    return GradedAlgebra(palg, Grading(layers))


def integral_generator(d: int) -> Scalar:
    """Second generator of the ring of integers of Q(sqrt d)."""
    if d % 4 == 1:
        return Scalar(Fraction(1, 2), Fraction(1, 2), d)
    return Scalar(0, 1, d)


@dataclass(frozen=True)
class ProductAnosovSystem:
    factor: NilGroupModel
    product: NilGroupModel
    lam: Scalar
    weights: tuple
    map: tuple  # exact 2n x 2n
    lattice_basis: tuple  # columns are lattice generators, Malcev (layer) order
    lattice_map: tuple  # integer matrix of `map` in the lattice basis
    lattice_layers: tuple  # layer of each lattice generator
    certificates: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return len(self.map)

    @property
    def field(self) -> int:
        return self.lam.d

    def float_map(self) -> np.ndarray:
        return la.to_float(self.map)

    def unstable_block(self) -> tuple:
        n = self.factor.dim
        return la.submatrix(self.map, range(n), range(n))


def lattice_basis_for(g: GradedAlgebra, d: int) -> tuple[tuple, tuple]:
    n = g.dim
    w = integral_generator(d)
    cols, layers = [], []
    for i, L in enumerate(g.layers):
        for k in L:
            for a, b in ((ONE, ONE), (w, w.conjugate())):
                v = [ZERO] * (2 * n)
                v[k] = a
                v[k + n] = b
                cols.append(tuple(v))
                layers.append(i)
    return la.transpose(cols), tuple(layers)


def build_product_anosov(g: GradedAlgebra, lam, weights: Sequence[int] | None = None) -> ProductAnosovSystem:
    """Galois-pair Anosov automorphism diag(lam^w) + diag((lam^sigma)^w) of g x g^sigma.

    ``weights`` default to the layer weights, which makes the first factor the
    dilation by lam. Every certificate is checked exactly and a failure raises
    AnosovConstructionError naming it.
    """
    lam = Scalar.coerce(lam)
    d = lam.d if lam.d != 1 else g.field
    if d == 1:
        raise ValueError("lambda must lie in a real quadratic field")
    if g.field not in (1, d):
        raise ValueError(f"algebra over Q(sqrt {g.field}) but lambda over Q(sqrt {d})")
    lam_c = lam.conjugate()
    if not (abs(lam) > ONE and abs(lam_c) < ONE):
        raise ValueError("need |lambda| > 1 > |lambda^sigma|")
    weights = tuple(weights) if weights is not None else g.grading.weights()
    if len(weights) != g.dim:
        raise ValueError("one weight per basis vector")
    n = g.dim
    P = product_algebra(g)
    M = la.diag([lam**w for w in weights] + [lam_c**w for w in weights])
    certs = {}

    check = is_graded_automorphism(P, M)
    if not check.ok:
        raise AnosovConstructionError("graded_automorphism", f"{check.reason} at {check.witness}")
    certs["graded_automorphism"] = True

    B, layers = lattice_basis_for(g, d)
    LM = la.matmul(la.matmul(la.inverse(B), M), B)
    for i, row in enumerate(LM):
        for j, x in enumerate(row):
            if not x.is_integer():
                raise AnosovConstructionError("integrality", f"lattice map entry ({i}, {j}) = {x}")
    certs["integrality"] = True

    lat = change_basis(P.algebra, B)
    for (i, j), row in lat.brackets.items():
        for k, c in row.items():
            if not c.is_integer():
                raise AnosovConstructionError("lattice_lie_ring", f"[g{i}, g{j}] has coefficient {c} on g{k}")
    certs["lattice_lie_ring"] = True

    if la.has_unit_modulus_root(la.charpoly(LM)):
        raise AnosovConstructionError("hyperbolicity", "an eigenvalue has modulus 1")
    certs["hyperbolicity"] = True

    LMi = tuple(tuple(Scalar(int(x.a)) for x in row) for row in LM)
    return ProductAnosovSystem(
        NilGroupModel(g), NilGroupModel(P), lam, weights, M, B, LMi, layers, certs
    )


def build_smale_system() -> ProductAnosovSystem:
    """H3 x H3 with (x, y, z) -> (lam x, lam^2 y, lam^3 z), lam = 2 + sqrt 3."""
    from .algebras import heisenberg

    return build_product_anosov(heisenberg(), Scalar(2, 1, 3), weights=(1, 2, 3))


def recheck_certificates(system: ProductAnosovSystem) -> dict:
    """Recompute every construction certificate from the stored matrices."""
    P = system.product.algebra
    B, M = system.lattice_basis, system.map
    LM = la.matmul(la.matmul(la.inverse(B), M), B)
    lat = change_basis(P.algebra, B)
    return {
        "graded_automorphism": is_graded_automorphism(P, M).ok,
        "integrality": LM == system.lattice_map and all(x.is_integer() for row in LM for x in row),
        "lattice_lie_ring": all(c.is_integer() for row in lat.brackets.values() for c in row.values()),
        "hyperbolicity": not la.has_unit_modulus_root(la.charpoly(LM)),
    }


# lattice reduction -----------------------------------------------------------------

@dataclass
class Reducer:
    """Sequential Malcev reduction into the box [0, 1)^N of lattice coordinates."""

    system: ProductAnosovSystem

    def __post_init__(self):
        self.B = self.system.lattice_basis
        self.Binv = la.inverse(self.B)
        self.fB = la.to_float(self.B)
        self.fBinv = la.to_float(self.Binv)
        self.gens = la.transpose(self.B)
        self.order = sorted(range(len(self.gens)), key=lambda k: self.system.lattice_layers[k])

    def coords(self, x):
        if isinstance(x, np.ndarray):
            return self.fBinv @ x
        return la.matvec(self.Binv, x)

    def reduce(self, x, return_word: bool = False):
        model = self.system.product
        exact = not isinstance(x, np.ndarray) and all(isinstance(a, (Scalar, int, Fraction)) for a in x)
        x = la.as_vector(x) if exact else np.asarray(x, dtype=float)
        word = []
        for k in self.order:
            c = self.coords(x)[k]
            m = c.floor() if exact else math.floor(c)
            if m:
                if exact:
                    x = model.multiply(x, la.vscale(-m, self.gens[k]))
                else:
                    x = model.fmultiply(x, -m * self.fB[:, k])
            word.append((k, m))
        return (x, tuple(word)) if return_word else x


def malcev_reduce(system: ProductAnosovSystem, x, return_word: bool = False):
    """Right-multiply by integer powers of lattice generators, layer by layer,
    so every lattice coordinate lands in [0, 1).

    The word lists (generator, integer) in application order: the result is
    x * exp(-m_1 g_1) * exp(-m_2 g_2) * ...
    """
    return Reducer(system).reduce(x, return_word)


def is_lattice_element(system: ProductAnosovSystem, z) -> bool:
    """Exact membership test (sound for two-step factors): z reduces to the identity."""
    return not any(Reducer(system).reduce(la.as_vector(z)))


# maps and cocycles -----------------------------------------------------------------
# Points are exponential coordinates of N x N; tangent vectors are written in the
# right-invariant frame v -> d/dt exp(tv) x, which is preserved by right
# multiplication with lattice elements and so descends to the quotient.

@dataclass
class NilmanifoldMap:
    step: Callable  # point -> point (unreduced)
    jacobian: Callable  # point -> matrix in the right-invariant frame
    reducer: Reducer

    def __call__(self, x):
        return self.reducer.reduce(self.step(x))


def automorphism_map(system: ProductAnosovSystem) -> NilmanifoldMap:
    M = system.float_map()
    return NilmanifoldMap(lambda x: M @ x, lambda x: M, Reducer(system))


def translated_map(system: ProductAnosovSystem, g0) -> NilmanifoldMap:
    """x -> g0 * A(x); its derivative Ad(g0) A is constant."""
    model = system.product
    M = system.float_map()
    g0 = np.asarray([float(a) for a in g0])
    J = model.Ad(g0) @ M
    return NilmanifoldMap(lambda x: model.fmultiply(g0, M @ x), lambda x: J, Reducer(system))


@dataclass
class PeriodicPerturbation:
    """x -> exp(phi(x)) * A(x) with phi periodic in the layer-0 lattice coordinates.

    phi(x) = eps * sum_k sin(2 pi <nu_k, c0(x)> + theta_k) e_k over the layer-0
    directions e_k of the product.
    """

    system: ProductAnosovSystem
    eps: float
    directions: np.ndarray  # indices of layer-0 coordinates
    freqs: np.ndarray  # one integer frequency vector per direction
    phases: np.ndarray

    def __post_init__(self):
        self.reducer = Reducer(self.system)
        self.model = self.system.product
        self.M = self.system.float_map()
        L = self.system.lattice_layers
        self.low = np.array([k for k in range(len(L)) if L[k] == 0])
        self.P0 = self.reducer.fBinv[self.low, :]  # layer-0 lattice coordinates (linear in x)

    def phi(self, x):
        c0 = self.P0 @ x
        out = np.zeros(len(x))
        args = 2 * np.pi * (self.freqs @ c0) + self.phases
        out[self.directions] = self.eps * np.sin(args)
        return out

    def phi_jacobian(self, x):
        """d/dt phi(exp(tv) x) at t=0; layer-0 coordinates move by the layer-0 part of v."""
        c0 = self.P0 @ x
        args = 2 * np.pi * (self.freqs @ c0) + self.phases
        J = np.zeros((len(x), len(x)))
        J[self.directions, :] = (self.eps * 2 * np.pi * np.cos(args))[:, None] * (self.freqs @ self.P0)
        return J

    def step(self, x):
        return self.model.fmultiply(self.phi(x), self.M @ x)

    def jacobian(self, x):
        p = self.phi(x)
        return self.model.dexp_right(p) @ self.phi_jacobian(x) + self.model.Ad(p) @ self.M

    def as_map(self) -> NilmanifoldMap:
        return NilmanifoldMap(self.step, self.jacobian, self.reducer)


def make_periodic_perturbation(system: ProductAnosovSystem, eps: float, seed: int = 0, max_freq: int = 2):
    if not 0 <= eps <= 0.1:
        raise ValueError("amplitude must lie in [0, 0.1]")
    rng = np.random.default_rng(seed)
    n = system.factor.dim
    layer0 = [k for k in system.factor.algebra.layers[0]]
    directions = np.array(layer0 + [k + n for k in layer0])
    n_low = sum(1 for L in system.lattice_layers if L == 0)
    freqs = rng.integers(-max_freq, max_freq + 1, size=(len(directions), n_low))
    for row in freqs:
        if not row.any():
            row[rng.integers(n_low)] = 1
    phases = rng.uniform(0, 2 * np.pi, size=len(directions))
    pert = PeriodicPerturbation(system, float(eps), directions, freqs, phases)
    return pert.as_map()


# QR estimation ---------------------------------------------------------------------

class NumericalBlowup(FloatingPointError):
    def __init__(self, iteration: int):
        self.iteration = iteration
        super().__init__(f"non-finite values at iteration {iteration}")


@dataclass(frozen=True)
class QREstimate:
    report: SpectrumReport
    exponents: np.ndarray  # ascending, one per dimension
    mean_log_det: float


def qr_lyapunov_estimate(
    step: Callable | NilmanifoldMap,
    dmap: Callable | None = None,
    x0=None,
    iterations: int = 10_000,
    seed: int = 0,
    transient: int | None = None,
    reduce: Callable | None = None,
) -> QREstimate:
    """Benettin/QR estimate of the exponents of the cocycle dmap along the orbit of x0.

    The first ``transient`` steps (default N // 10) align the frame and are not
    averaged. error_bound is the largest drift of the running means over the
    final tenth of the averaged iterations.
    """
    rng = np.random.default_rng(seed)
    if isinstance(step, NilmanifoldMap):
        dmap = step.jacobian
        reducer = step.reducer
        reduce = reducer.reduce
        step = step.step
        if x0 is None:
            # random point of the fundamental box
            x0 = reducer.fB @ rng.uniform(0, 1, reducer.fB.shape[0])
    if iterations < 1:
        raise ValueError("need at least one iteration")
    if x0 is None:
        raise ValueError("x0 is required for a bare map")
    x = np.asarray(x0, dtype=float)
    dim = len(x)
    transient = iterations // 10 if transient is None else transient
    Q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    sums = np.zeros(dim)
    logdet = 0.0
    tail_start = transient + max(1, (9 * (iterations - transient)) // 10)
    tail: list = []
    count = 0
    for it in range(iterations):
        J = np.asarray(dmap(x), dtype=float)
        Q, R = np.linalg.qr(J @ Q)
        diag = np.abs(np.diag(R))
        x = step(x)
        if reduce is not None:
            x = reduce(x)
        if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(x))) or np.any(diag == 0):
            raise NumericalBlowup(it)
        if it < transient:
            continue
        sums += np.log(diag)
        logdet += math.log(abs(np.linalg.det(J)))
        count += 1
        if it >= tail_start:
            tail.append(np.sort(sums / count))
    if count == 0:
        raise ValueError("transient consumes every iteration")
    means = np.sort(sums / count)
    bound = max((float(np.max(np.abs(t - means))) for t in tail), default=0.0)
    report = SpectrumReport(group_values(means.tolist()), "qr_estimate", bound, iterations, seed)
    return QREstimate(report, means, logdet / count)
