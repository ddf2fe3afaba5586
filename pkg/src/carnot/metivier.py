"""Bracket filtrations of polynomial distributions and their nilpotent tangent cones.

Pipeline at a point p: evaluate iterated brackets of the horizontal fields,
pick a graded frame greedily, move to affine coordinates adapted to that
frame, keep the homogeneous part of each frame field of its own weight and
read off structure constants by exact coefficient matching.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import linalg as la
from .lie import GradedAlgebra, Grading, LieAlgebra
from .polyfield import Poly, PolyVectorField, affine_pullback, bracket
from .scalar import Scalar


class NotHorizontalError(ValueError):
    """Brackets never span the tangent space within the allowed depth."""

    def __init__(self, dims, max_step):
        self.dims = list(dims)
        super().__init__(f"brackets up to step {max_step} only span dims {self.dims}")


class NonGenericPointError(ValueError):
    pass


class ConeConsistencyError(ArithmeticError):
    pass


def word_label(word: Sequence[int], names: Sequence[str]) -> str:
    if len(word) == 1:
        return names[word[0]]
    return f"[{names[word[0]]},{word_label(word[1:], names)}]"


def _words(fields: Sequence[PolyVectorField], max_len: int):
    """Right-nested bracket words in length-then-lexicographic order, with their fields."""
    memo: dict[tuple, PolyVectorField] = {(i,): X for i, X in enumerate(fields)}
    m = len(fields)
    for length in range(1, max_len + 1):
        for word in itertools.product(range(m), repeat=length):
            if length > 1:
                tail = memo.get(word[1:])
                if tail is None or not tail:
                    continue
                memo[word] = bracket(fields[word[0]], tail)
            Xw = memo[word]
            if Xw:
                yield word, Xw


def _greedy(fields, p, max_step):
    n = fields[0].n
    if any(X.n != n for X in fields):
        raise ValueError("fields must share the ambient dimension")
    if len(p) != n:
        raise ValueError(f"point must have {n} coordinates")
    if max_step < 0:
        raise ValueError("max_step must be non-negative")
    chosen: list[tuple[tuple, PolyVectorField, la.Vector]] = []
    span: list = []
    dims: list[int] = []
    level = 0
    for word, Xw in _words(fields, max_step + 1):
        while len(word) - 1 > level:
            dims.append(len(span))
            level += 1
        if len(span) == n:
            break
        v = Xw.at(p)
        if not la.in_span(span, v):
            span = la.span_basis(span + [v])
            chosen.append((word, Xw, v))
    while len(dims) <= level:
        dims.append(len(span))
    # trim levels after the first full one
    if n in dims:
        dims = dims[: dims.index(n) + 1]
    return chosen, dims


@dataclass(frozen=True)
class Filtration:
    point: tuple
    spaces: tuple  # exact basis of each E^i(p)
    dims: tuple
    floor: tuple  # floor[k] = weight of coordinate k (0-based)

    @property
    def depth(self) -> int:
        return len(self.dims) - 1


def floor_from_dims(dims: Sequence[int]) -> tuple[int, ...]:
    out = []
    prev = 0
    for k, nk in enumerate(dims):
        out.extend([k + 1] * (nk - prev))
        prev = nk
    return tuple(out)


def evaluate_filtration(fields: Sequence[PolyVectorField], p, max_step: int | None = None) -> Filtration:
    fields = list(fields)
    p = la.as_vector(p)
    n = fields[0].n
    max_step = n if max_step is None else max_step
    chosen, dims = _greedy(fields, p, max_step)
    if dims[-1] != n:
        raise NotHorizontalError(dims, max_step)
    spaces = []
    for nk in dims:
        spaces.append(tuple(v for _, _, v in chosen[:nk]))
    return Filtration(p, tuple(spaces), tuple(dims), floor_from_dims(dims))


def _dims_at(fields, q, max_step):
    try:
        return tuple(evaluate_filtration(fields, q, max_step).dims)
    except NotHorizontalError as exc:
        return tuple(exc.dims)


@dataclass(frozen=True)
class GenericityVerdict:
    generic: bool
    order: int | None = None
    base_dims: tuple = ()
    witness: tuple | None = None
    witness_dims: tuple | None = None
    warning: str = ""


def default_samples(p, radius=Fraction(1, 8)) -> list[tuple]:
    p = la.as_vector(p)
    n = len(p)
    r = Scalar(radius)
    out = []
    for k in range(n):
        for s in (r, -r):
            q = list(p)
            q[k] = q[k] + s
            out.append(tuple(q))
    out.append(tuple(x + r for x in p))
    return out


def genericity_check(fields, p, samples=None, max_step: int | None = None) -> GenericityVerdict:
    """Compare filtration dimension vectors at p and at sample points near p.

    ``samples=None`` uses 2n+1 points at distance 1/8; an explicit empty list
    gives a vacuous verdict with a warning. Sample-based, so a "generic"
    answer is only as good as the samples.
    """
    fields = list(fields)
    p = la.as_vector(p)
    max_step = fields[0].n if max_step is None else max_step
    base = tuple(evaluate_filtration(fields, p, max_step).dims)
    if samples is None:
        samples = default_samples(p)
    samples = [la.as_vector(q) for q in samples]
    if not samples:
        return GenericityVerdict(True, len(base), base, warning="no sample points; generic by vacuity")
    for q in samples:
        d = _dims_at(fields, q, max_step)
        if d != base:
            return GenericityVerdict(False, None, base, q, d)
    return GenericityVerdict(True, len(base), base)


# weighted degrees ----------------------------------------------------------

def _floor_of(filt) -> tuple:
    return tuple(filt.floor) if isinstance(filt, Filtration) else tuple(filt)


def monomial_degree(floor: Sequence[int], j: int, exponent: Sequence[int]) -> int:
    return floor[j] - sum(a * w for a, w in zip(exponent, floor))


def weighted_degree(X: PolyVectorField, filt) -> float:
    """Largest weighted degree of a monomial term; -inf for the zero field."""
    floor = _floor_of(filt)
    return max((monomial_degree(floor, j, e) for j, e, _ in X.terms()), default=float("-inf"))


def homogeneous_part(X: PolyVectorField, filt, degree: int) -> PolyVectorField:
    floor = _floor_of(filt)
    comps = [{} for _ in range(X.n)]
    for j, e, c in X.terms():
        if monomial_degree(floor, j, e) == degree:
            comps[j][e] = c
    return PolyVectorField.from_terms(X.n, comps)


def check_bracket_of_parts(X: PolyVectorField, Y: PolyVectorField, filt) -> bool:
    """Top homogeneous part of [X, Y] equals the bracket of the top parts."""
    q, s = weighted_degree(X, filt), weighted_degree(Y, filt)
    if q == float("-inf") or s == float("-inf"):
        return not bracket(X, Y)
    lhs = homogeneous_part(bracket(X, Y), filt, q + s)
    rhs = bracket(homogeneous_part(X, filt, q), homogeneous_part(Y, filt, s))
    return lhs == rhs


# tangent cone --------------------------------------------------------------

@dataclass(frozen=True)
class GradedFrame:
    fields: tuple  # frame fields in the original coordinates
    words: tuple  # bracket word (letter indices, right-nested) for each
    labels: tuple
    weights: tuple


@dataclass(frozen=True)
class TangentCone:
    algebra: GradedAlgebra
    frame: GradedFrame
    filtration: Filtration
    change: tuple  # B: x = p + B y
    adapted: tuple = field(repr=False)  # frame fields in y coordinates
    hats: tuple = field(repr=False)

    def adapt(self, X: PolyVectorField) -> PolyVectorField:
        return affine_pullback(X, self.filtration.point, self.change)

    def hat(self, X: PolyVectorField, degree: int = 1) -> PolyVectorField:
        """Degree-`degree` homogeneous part of X in adapted coordinates."""
        return homogeneous_part(self.adapt(X), self.filtration.floor, degree)

    def bracket_identity_failures(self) -> list[tuple[int, int]]:
        """Frame pairs violating the bracket-of-homogeneous-parts identity."""
        bad = []
        Y = self.adapted
        for a, b in itertools.combinations(range(len(Y)), 2):
            if not check_bracket_of_parts(Y[a], Y[b], self.filtration.floor):
                bad.append((a, b))
        return bad


def _express(target: PolyVectorField, basis: Sequence[PolyVectorField], idx: Sequence[int]):
    """Constant coefficients c with target = sum c_k basis[idx[k]], or None."""
    keys = sorted({(j, e) for X in [target] + [basis[k] for k in idx] for j, e, _ in X.terms()})
    if not keys:
        return ()
    if not idx:
        return None
    rows = []
    rhs = []
    for j, e in keys:
        rows.append(tuple(basis[k].components[j].terms.get(e, Scalar(0)) for k in idx))
        rhs.append(target.components[j].terms.get(e, Scalar(0)))
    sol = la.solve(rows, rhs)
    if sol is None:
        return None
    return sol


def tangent_cone(fields, p, samples=None, names: Sequence[str] = ()) -> TangentCone:
    fields = list(fields)
    p = la.as_vector(p)
    n = fields[0].n
    names = tuple(names) or tuple(f"X{i + 1}" for i in range(len(fields)))
    verdict = genericity_check(fields, p, samples)
    if not verdict.generic:
        raise NonGenericPointError(
            f"dims {list(verdict.base_dims)} at ({', '.join(map(str, p))}) but {list(verdict.witness_dims)} "
            f"at ({', '.join(map(str, verdict.witness))})"
        )
    filt = evaluate_filtration(fields, p)
    chosen, _ = _greedy(fields, p, len(filt.dims) - 1)
    chosen = chosen[:n]
    words = tuple(w for w, _, _ in chosen)
    frame_fields = tuple(X for _, X, _ in chosen)
    B = la.transpose([v for _, _, v in chosen])
    floor = filt.floor
    weights = tuple(len(w) for w in words)
    if weights != floor:
        raise ConeConsistencyError(f"frame weights {weights} disagree with the filtration {floor}")
    adapted = tuple(affine_pullback(X, p, B) for X in frame_fields)
    hats = tuple(homogeneous_part(Y, floor, w) for Y, w in zip(adapted, weights))
    brackets = {}
    for a, b in itertools.combinations(range(n), 2):
        br = bracket(hats[a], hats[b])
        if not br:
            continue
        target_w = weights[a] + weights[b]
        idx = [k for k in range(n) if weights[k] == target_w]
        coeffs = _express(br, hats, idx)
        if coeffs is None:
            raise ConeConsistencyError(
                f"[{word_label(words[a], names)}, {word_label(words[b], names)}] is not a constant "
                "combination of frame hats"
            )
        row = {k: c for k, c in zip(idx, coeffs) if c}
        if row:
            brackets[(a, b)] = row
    labels = tuple(word_label(w, names) for w in words)
    alg = LieAlgebra.from_brackets(n, brackets, labels)
    layers = tuple(tuple(k for k in range(n) if weights[k] == w) for w in range(1, max(weights) + 1))
    if any(not L for L in layers):
        raise ConeConsistencyError("empty layer in the tangent cone grading")
    graded = GradedAlgebra(alg, Grading(layers))
    frame = GradedFrame(frame_fields, words, labels, weights)
    return TangentCone(graded, frame, filt, B, adapted, hats)


def constant_combination_hat(cone: TangentCone, coeffs: Sequence[Poly], horizontals: Sequence[PolyVectorField]):
    """Both sides of the linearity rule: hat(sum a_i X_i) and sum a_i(p) hat(X_i)."""
    n = horizontals[0].n
    X = PolyVectorField([Poly(n)] * n)
    for a, Xi in zip(coeffs, horizontals):
        X = X + Xi.scale(a)
    lhs = cone.hat(X)
    rhs = PolyVectorField([Poly(n)] * n)
    for a, Xi in zip(coeffs, horizontals):
        rhs = rhs + cone.hat(Xi).scale(a(cone.filtration.point))
    return lhs, rhs
