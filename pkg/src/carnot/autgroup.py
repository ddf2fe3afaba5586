"""Graded derivations, graded automorphisms and the asymmetry test."""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .lie import GradedAlgebra, bracket_of, grading_derivation, verify_grading
from .scalar import ONE, ZERO, Scalar


@dataclass(frozen=True)
class GradedDerivationSpace:
    ambient: GradedAlgebra
    basis: tuple  # of n x n matrices

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, D) -> bool:
        flat = [_flatten(B, self.ambient) for B in self.basis]
        return la.in_span(flat, _flatten(D, self.ambient))

    def is_closed(self) -> bool:
        """Closure of the span under matrix commutators."""
        return all(self.contains(la.commutator(A, B)) for A, B in itertools.combinations(self.basis, 2))


def _block_slots(g: GradedAlgebra) -> list[tuple[int, int]]:
    """Matrix positions (row, col) allowed by a layer-preserving map."""
    return [(a, b) for L in g.layers for b in L for a in L]


def _flatten(D, g: GradedAlgebra):
    return tuple(D[a][b] for a, b in _block_slots(g))


def is_derivation(g: GradedAlgebra, D) -> tuple[int, int] | None:
    """First basis pair violating D[x,y] = [Dx,y] + [x,Dy], or None."""
    alg = g.algebra
    cols = la.transpose(D)
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            lhs = la.matvec(D, alg.bracket_basis(i, j))
            rhs = la.vadd(bracket_of(alg, cols[i], la.unit(g.dim, j)), bracket_of(alg, la.unit(g.dim, i), cols[j]))
            if lhs != rhs:
                return (i, j)
    return None


def graded_derivations(g: GradedAlgebra) -> GradedDerivationSpace:
    """Exact basis of layer-preserving derivations (the Lie algebra of Aut_g)."""
    if not verify_grading(g).is_graded:
        raise ValueError("algebra is not graded by the given layers")
    alg, n = g.algebra, g.dim
    slots = _block_slots(g)
    # D e_b = sum_a D[a][b] e_a; each equation is linear in the slot unknowns.
    rows = []
    for i in range(n):
        for j in range(i + 1, n):
            bij = alg.bracket_basis(i, j)
            eq = [[ZERO] * len(slots) for _ in range(n)]
            for s, (a, b) in enumerate(slots):
                # D[e_i, e_j] contributes D[a][b] * bij[b] to component a
                if bij[b]:
                    eq[a][s] = eq[a][s] + bij[b]
                # -[D e_i, e_j] - [e_i, D e_j]
                if b == i:
                    v = alg.bracket_basis(a, j)
                    for k in range(n):
                        if v[k]:
                            eq[k][s] = eq[k][s] - v[k]
                if b == j:
                    v = alg.bracket_basis(i, a)
                    for k in range(n):
                        if v[k]:
                            eq[k][s] = eq[k][s] - v[k]
            rows.extend(r for r in eq if any(r))
    sols = la.nullspace(rows, ncols=len(slots))
    basis = []
    for x in sols:
        M = [[ZERO] * n for _ in range(n)]
        for s, (a, b) in enumerate(slots):
            M[a][b] = x[s]
        basis.append(tuple(tuple(r) for r in M))
    return GradedDerivationSpace(g, tuple(basis))


# automorphisms -------------------------------------------------------------

@dataclass(frozen=True)
class AutomorphismCheck:
    ok: bool
    reason: str = ""
    witness: tuple[int, int] | None = None

    def __bool__(self):
        return self.ok


def is_graded_automorphism(g: GradedAlgebra, A) -> AutomorphismCheck:
    A = la.as_matrix(A)
    n = g.dim
    if len(A) != n or any(len(r) != n for r in A):
        return AutomorphismCheck(False, "shape")
    gr = g.grading
    for a in range(n):
        for b in range(n):
            if A[a][b] and gr.layer_of(a) != gr.layer_of(b):
                return AutomorphismCheck(False, "layer", (a, b))
    if not la.det(A):
        return AutomorphismCheck(False, "singular")
    alg = g.algebra
    cols = la.transpose(A)
    for i in range(n):
        for j in range(i + 1, n):
            if la.matvec(A, alg.bracket_basis(i, j)) != bracket_of(alg, cols[i], cols[j]):
                return AutomorphismCheck(False, "bracket", (i, j))
    return AutomorphismCheck(True)


def extend_layer0_map(g: GradedAlgebra, A0):
    """Unique graded extension of a layer-0 block for a Carnot algebra.

    Returns the full matrix, or None when the extension is not an automorphism.
    """
    A0 = la.as_matrix(A0)
    n = g.dim
    alg = g.algebra
    L0 = g.layers[0]
    image = {}
    for idx, a in enumerate(L0):
        v = [ZERO] * n
        for jdx, b in enumerate(L0):
            v[b] = A0[jdx][idx]
        image[a] = tuple(v)
    A = [[ZERO] * n for _ in range(n)]
    # iterated brackets [e_a, w] of layer-0 generators with lower layer vectors
    known = {a: (la.unit(n, a), image[a]) for a in L0}
    prev = [known[a] for a in L0]
    for i in range(1, len(g.layers)):
        pairs = []
        for a in L0:
            for src, dst in prev:
                pairs.append((bracket_of(alg, la.unit(n, a), src), bracket_of(alg, image[a], dst)))
        layer = g.layers[i]
        srcs = [p[0] for p in pairs]
        basis_in = [tuple(s[k] for k in layer) for s in srcs]
        new_prev = []
        for k in layer:
            target = tuple(ONE if kk == k else ZERO for kk in layer)
            c = la.coordinates(basis_in, target)
            if c is None:
                return None
            dst = (ZERO,) * n
            for ci, (_, d) in zip(c, pairs):
                if ci:
                    dst = la.vadd(dst, la.vscale(ci, d))
            image[k] = dst
            new_prev.append((la.unit(n, k), dst))
        prev = new_prev
    for b in range(n):
        for a in range(n):
            A[a][b] = image[b][a]
    A = tuple(tuple(r) for r in A)
    return A if is_graded_automorphism(g, A) else None


# asymmetry -----------------------------------------------------------------

@dataclass(frozen=True)
class AsymmetryVerdict:
    verdict: str  # "asymmetric" | "not_asymmetric" | "undetermined"
    certificate: tuple | None = None
    eigen_interval: tuple | None = None
    level: str = "identity-component"
    notes: dict = field(default_factory=dict)


def trace_zero_derivations(g: GradedAlgebra) -> list:
    """Basis of derivations with trace zero on layer 0."""
    space = graded_derivations(g)
    L0 = g.layers[0]
    traces = [sum((D[a][a] for a in L0), ZERO) for D in space.basis]
    if not space.basis:
        return []
    coeffs = la.nullspace([traces], ncols=len(traces))
    out = []
    for c in coeffs:
        D = la.zeros(g.dim)
        for ci, B in zip(c, space.basis):
            if ci:
                D = la.add(D, la.scale(ci, B))
        if not la.is_zero_matrix(D):
            out.append(D)
    return out


def _layer0_block(g: GradedAlgebra, D):
    L0 = g.layers[0]
    return la.submatrix(D, L0, L0)


def _symmetric_solutions(blocks, d0: int) -> list:
    idx = [(i, j) for i in range(d0) for j in range(i, d0)]
    pos = {p: s for s, p in enumerate(idx)}

    def var(i, j):
        return pos[(i, j) if i <= j else (j, i)]

    rows = []
    for B in blocks:
        # (B^T P + P B)[i][j] = sum_k B[k][i] P[k][j] + P[i][k] B[k][j]
        for i in range(d0):
            for j in range(i, d0):
                row = [ZERO] * len(idx)
                for k in range(d0):
                    if B[k][i]:
                        row[var(k, j)] = row[var(k, j)] + B[k][i]
                    if B[k][j]:
                        row[var(i, k)] = row[var(i, k)] + B[k][j]
                if any(row):
                    rows.append(row)
    sols = la.nullspace(rows, ncols=len(idx))
    mats = []
    for x in sols:
        P = [[ZERO] * d0 for _ in range(d0)]
        for s, (i, j) in enumerate(idx):
            P[i][j] = x[s]
            P[j][i] = x[s]
        mats.append(tuple(tuple(r) for r in P))
    return mats


def skew_for_all(blocks, P) -> bool:
    return all(la.is_zero_matrix(la.add(la.matmul(la.transpose(B), P), la.matmul(P, B))) for B in blocks)


def asymmetry_verdict(g: GradedAlgebra, seed: int = 0, n_random: int = 500) -> AsymmetryVerdict:
    if verify_grading(g).label != "graded_carnot":
        raise ValueError("asymmetry is only decided for Carnot gradings")
    rng = random.Random(seed)
    derivs = trace_zero_derivations(g)
    blocks = [_layer0_block(g, D) for D in derivs]

    candidates = list(derivs)
    for A, B in itertools.combinations(derivs, 2):
        candidates.append(la.add(A, B))
        candidates.append(la.sub(A, B))
    for _ in range(min(20, n_random) if derivs else 0):
        D = la.zeros(g.dim)
        for B in derivs:
            D = la.add(D, la.scale(rng.randint(-3, 3), B))
        candidates.append(D)
    for D in candidates:
        interval = la.isolate_nonzero_real_root(la.charpoly(_layer0_block(g, D)))
        if interval is not None:
            return AsymmetryVerdict("not_asymmetric", D, interval)

    d0 = len(g.layers[0])
    I = la.identity(d0)
    if skew_for_all(blocks, I):
        return AsymmetryVerdict("asymmetric", I)
    S = _symmetric_solutions(blocks, d0)
    tries = list(S)
    for r in range(2, len(S) + 1):
        for combo in itertools.combinations(S, r):
            acc = combo[0]
            for P in combo[1:]:
                acc = la.add(acc, P)
            tries.append(acc)
    for P in tries:
        if la.is_positive_definite(P):
            return AsymmetryVerdict("asymmetric", P)
    if S:
        for _ in range(n_random):
            acc = la.zeros(d0)
            for P in S:
                acc = la.add(acc, la.scale(rng.randint(-3, 3), P))
            if la.is_positive_definite(acc):
                return AsymmetryVerdict("asymmetric", acc)
    return AsymmetryVerdict("undetermined", notes={"trace_zero_dim": len(derivs), "symmetric_dim": len(S)})


def validate_not_asymmetric(g: GradedAlgebra, D, interval) -> bool:
    """Exact re-check of a noncompactness certificate."""
    if is_derivation(g, D) is not None:
        return False
    n = g.dim
    gr = g.grading
    if any(D[a][b] and gr.layer_of(a) != gr.layer_of(b) for a in range(n) for b in range(n)):
        return False
    if la.trace(_layer0_block(g, D)):
        return False
    lo, hi = interval
    if lo.sign() < 0 < hi.sign():
        return False
    p = list(la.charpoly(_layer0_block(g, D)))
    while p and not p[0]:
        p = p[1:]  # drop the zero roots
    return la.count_real_roots(p, lo, hi) >= 1


def validate_asymmetric(g: GradedAlgebra, P) -> bool:
    blocks = [_layer0_block(g, D) for D in trace_zero_derivations(g)]
    return la.is_positive_definite(P) and skew_for_all(blocks, P)


# homotheties ---------------------------------------------------------------

@dataclass(frozen=True)
class HomothetyResult:
    is_homothety: bool
    lam: float
    residual: float


def homothety_decompose(g: GradedAlgebra, A, inner_product=None, rtol: float = 1e-9) -> HomothetyResult:
    """Decide whether A restricted to layer 0 is lam times a P-isometry."""
    L0 = g.layers[0]
    A0 = la.to_float(la.submatrix(la.as_matrix(A), L0, L0))
    d0 = len(L0)
    P = np.eye(d0) if inner_product is None else la.to_float(la.as_matrix(inner_product))
    det = abs(np.linalg.det(A0))
    if det == 0:
        raise ValueError("A is not invertible on layer 0")
    if not np.all(np.linalg.eigvalsh((P + P.T) / 2) > 0):
        raise ValueError("inner product must be positive definite")
    lam = det ** (1.0 / d0)
    target = lam * lam * P
    resid = float(np.linalg.norm(A0.T @ P @ A0 - target) / np.linalg.norm(target))
    return HomothetyResult(resid <= rtol, float(lam), resid)


def real_eigenvalue_estimate(D_block) -> list[float]:
    ev = np.linalg.eigvals(la.to_float(D_block))
    return sorted(float(x.real) for x in ev if abs(x.imag) < 1e-12)


__all__ = [
    "GradedDerivationSpace",
    "graded_derivations",
    "is_derivation",
    "is_graded_automorphism",
    "extend_layer0_map",
    "AsymmetryVerdict",
    "asymmetry_verdict",
    "validate_not_asymmetric",
    "validate_asymmetric",
    "HomothetyResult",
    "homothety_decompose",
    "grading_derivation",
    "trace_zero_derivations",
]
