"""Exact multivariate polynomials and polynomial vector fields on R^n."""
from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from . import linalg as la
from .scalar import ONE, ZERO, Scalar

DEGREE_CAP = 12


class DegreeCapExceeded(ArithmeticError):
    pass


class Poly:
    """Sparse polynomial: ``terms[exponent tuple] = coefficient``."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping | None = None):
        self.n = n
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(int(k) for k in e)
            if len(e) != n or any(k < 0 for k in e):
                raise ValueError(f"bad exponent {e} for {n} variables")
            c = Scalar.coerce(c)
            if c:
                clean[e] = clean.get(e, ZERO) + c
        self.terms = {e: c for e, c in clean.items() if c}

    @classmethod
    def const(cls, n: int, c) -> Poly:
        return cls(n, {(0,) * n: c})

    @classmethod
    def var(cls, n: int, k: int) -> Poly:
        e = [0] * n
        e[k] = 1
        return cls(n, {tuple(e): ONE})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.n == other.n and self.terms == other.terms
        return NotImplemented

    __hash__ = None

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items()):
            mono = "*".join(f"x{k + 1}" + (f"^{p}" if p > 1 else "") for k, p in enumerate(e) if p)
            parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def __add__(self, other: Poly) -> Poly:
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, ZERO) + c
        return Poly(self.n, out)

    def __neg__(self) -> Poly:
        return Poly(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: Poly) -> Poly:
        return self + (-other)

    def __mul__(self, other) -> Poly:
        if not isinstance(other, Poly):
            c = Scalar.coerce(other)
            return Poly(self.n, {e: c * v for e, v in self.terms.items()})
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, ZERO) + c1 * c2
        p = Poly(self.n, out)
        if p.degree() > DEGREE_CAP:
            raise DegreeCapExceeded(f"polynomial degree {p.degree()} exceeds cap {DEGREE_CAP}")
        return p

    __rmul__ = __mul__

    def diff(self, k: int) -> Poly:
        out = {}
        for e, c in self.terms.items():
            if e[k]:
                f = list(e)
                f[k] -= 1
                out[tuple(f)] = c * e[k]
        return Poly(self.n, out)

    def __call__(self, point: Sequence) -> Scalar:
        point = la.as_vector(point)
        total = ZERO
        for e, c in self.terms.items():
            v = c
            for x, p in zip(point, e):
                if p:
                    v = v * x**p
            total = total + v
        return total

    def substitute(self, images: Sequence[Poly]) -> Poly:
        """Compose with x_k -> images[k] (polynomials in a possibly different number of variables)."""
        m = images[0].n if images else 0
        total = Poly(m)
        powers: dict = {}
        for e, c in self.terms.items():
            v = Poly.const(m, c)
            for k, p in enumerate(e):
                if p:
                    if (k, p) not in powers:
                        acc = Poly.const(m, 1)
                        for _ in range(p):
                            acc = acc * images[k]
                        powers[(k, p)] = acc
                    v = v * powers[(k, p)]
            total = total + v
        return total


class PolyVectorField:
    """X = sum_k components[k] d/dx_k with polynomial components."""

    __slots__ = ("n", "components")

    def __init__(self, components: Sequence[Poly]):
        components = tuple(components)
        if not components:
            raise ValueError("vector field needs at least one component")
        n = len(components)
        if any(p.n != n for p in components):
            raise ValueError("components must be polynomials in n variables")
        self.n = n
        self.components = components

    @classmethod
    def from_terms(cls, n: int, comps: Sequence[Mapping]) -> PolyVectorField:
        return cls([Poly(n, t) for t in comps])

    @classmethod
    def coordinate(cls, n: int, k: int) -> PolyVectorField:
        return cls([Poly.const(n, 1) if j == k else Poly(n) for j in range(n)])

    @classmethod
    def constant(cls, v: Sequence) -> PolyVectorField:
        n = len(v)
        return cls([Poly.const(n, c) for c in v])

    def __eq__(self, other):
        if isinstance(other, PolyVectorField):
            return self.components == other.components
        return NotImplemented

    __hash__ = None

    def __bool__(self):
        return any(self.components)

    def __repr__(self):
        parts = [f"({p})*d{k + 1}" for k, p in enumerate(self.components) if p]
        return " + ".join(parts) if parts else "0"

    def __add__(self, other):
        return PolyVectorField([a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other):
        return PolyVectorField([a - b for a, b in zip(self.components, other.components)])

    def __neg__(self):
        return PolyVectorField([-a for a in self.components])

    def scale(self, f) -> PolyVectorField:
        """Multiply by a scalar or by a polynomial function."""
        return PolyVectorField([a * f if isinstance(f, Poly) else a * Scalar.coerce(f) for a in self.components])

    def at(self, point: Sequence) -> la.Vector:
        return tuple(p(point) for p in self.components)

    def apply(self, f: Poly) -> Poly:
        """Directional derivative X(f)."""
        total = Poly(self.n)
        for m, a in enumerate(self.components):
            if a:
                d = f.diff(m)
                if d:
                    total = total + a * d
        return total

    def degree(self) -> int:
        return max(p.degree() for p in self.components)

    def terms(self) -> Iterable[tuple[int, tuple, Scalar]]:
        """(component j, exponent, coefficient) for every nonzero monomial."""
        for j, p in enumerate(self.components):
            for e, c in p.terms.items():
                yield j, e, c


def bracket(X: PolyVectorField, Y: PolyVectorField) -> PolyVectorField:
    """[X, Y]^k = sum_m X^m d_m Y^k - Y^m d_m X^k."""
    if X.n != Y.n:
        raise ValueError("fields live in different dimensions")
    return PolyVectorField([X.apply(yk) - Y.apply(xk) for xk, yk in zip(X.components, Y.components)])


def affine_pullback(X: PolyVectorField, p: Sequence, B) -> PolyVectorField:
    """Express X in coordinates y with x = p + B y (B invertible)."""
    n = X.n
    p = la.as_vector(p)
    B = la.as_matrix(B)
    Binv = la.inverse(B)
    images = [Poly(n, {(0,) * n: p[i]}) + sum_linear(n, B[i]) for i in range(n)]
    subs = [c.substitute(images) for c in X.components]
    out = []
    for i in range(n):
        acc = Poly(n)
        for j in range(n):
            if Binv[i][j] and subs[j]:
                acc = acc + subs[j] * Binv[i][j]
        out.append(acc)
    return PolyVectorField(out)


def sum_linear(n: int, row: Sequence) -> Poly:
    terms = {}
    for j, c in enumerate(row):
        if c:
            e = [0] * n
            e[j] = 1
            terms[tuple(e)] = c
    return Poly(n, terms)
