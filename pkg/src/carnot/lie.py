"""Nilpotent Lie algebras given by exact structure constants, and gradings."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from . import linalg as la
from .scalar import ONE, ZERO, Scalar, common_field


@dataclass(frozen=True)
class LieAlgebra:
    """Structure constants stored sparsely: ``brackets[(i, j)] = {k: c_ij^k}`` for i < j."""

    dim: int
    brackets: Mapping[tuple[int, int], Mapping[int, Scalar]]
    basis: tuple[str, ...] = ()
    field: int = 1

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        if not self.basis:
            object.__setattr__(self, "basis", tuple(f"e{k + 1}" for k in range(self.dim)))
        if len(self.basis) != self.dim:
            raise ValueError("need one basis label per dimension")

    @classmethod
    def from_brackets(cls, dim: int, brackets, basis: Sequence[str] = (), field: int | None = None):
        """Normalize a bracket table: accepts any (i, j) order, drops zeros."""
        table: dict[tuple[int, int], dict[int, Scalar]] = {}
        for (i, j), out in brackets.items():
            if not (0 <= i < dim and 0 <= j < dim):
                raise ValueError(f"bracket index ({i}, {j}) out of range")
            if i == j:
                if any(Scalar.coerce(c) for c in out.values()):
                    raise ValueError(f"[e{i}, e{i}] must vanish")
                continue
            sign = 1
            if i > j:
                i, j, sign = j, i, -1
            row = table.setdefault((i, j), {})
            for k, c in out.items():
                if not 0 <= k < dim:
                    raise ValueError(f"output index {k} out of range")
                c = Scalar.coerce(c) * sign
                row[k] = row.get(k, ZERO) + c
        clean = {}
        for key in sorted(table):
            row = {k: c for k, c in sorted(table[key].items()) if c}
            if row:
                clean[key] = row
        if field is None:
            field = common_field(c for row in clean.values() for c in row.values())
        return cls(dim, clean, tuple(basis), field)

    # brackets --------------------------------------------------------------
    def bracket_basis(self, i: int, j: int) -> la.Vector:
        """[e_i, e_j] as a dense vector."""
        if i == j:
            return (ZERO,) * self.dim
        sign = ONE
        if i > j:
            i, j, sign = j, i, -ONE
        out = [ZERO] * self.dim
        for k, c in self.brackets.get((i, j), {}).items():
            out[k] = c * sign
        return tuple(out)

    def structure_tensor(self):
        """Dense float array C with C[i, j] = [e_i, e_j]."""
        import numpy as np

        C = np.zeros((self.dim, self.dim, self.dim))
        for (i, j), row in self.brackets.items():
            for k, c in row.items():
                C[i, j, k] = float(c)
                C[j, i, k] = -float(c)
        return C

    def conjugate(self) -> LieAlgebra:
        """Galois conjugate of every structure constant."""
        table = {key: {k: c.conjugate() for k, c in row.items()} for key, row in self.brackets.items()}
        return LieAlgebra(self.dim, table, self.basis, self.field)

    def __eq__(self, other):
        if not isinstance(other, LieAlgebra):
            return NotImplemented
        return (self.dim, self.basis, self.field) == (other.dim, other.basis, other.field) and dict(
            self.brackets
        ) == dict(other.brackets)

    __hash__ = None


def bracket_of(alg: LieAlgebra, x: Sequence, y: Sequence) -> la.Vector:
    """Bilinear extension of the structure constants."""
    if len(x) != alg.dim or len(y) != alg.dim:
        raise ValueError(f"vectors must have length {alg.dim}")
    x = la.as_vector(x)
    y = la.as_vector(y)
    out = [ZERO] * alg.dim
    for (i, j), row in alg.brackets.items():
        w = x[i] * y[j] - x[j] * y[i]
        if not w:
            continue
        for k, c in row.items():
            out[k] = out[k] + w * c
    return tuple(out)


@dataclass(frozen=True)
class JacobiResult:
    ok: bool
    triple: tuple[int, int, int] | None = None
    residual: la.Vector | None = None


def check_jacobi(alg: LieAlgebra) -> JacobiResult:
    n = alg.dim
    E = [la.unit(n, k) for k in range(n)]
    for i, j, k in itertools.combinations(range(n), 3):
        r = la.vadd(
            la.vadd(bracket_of(alg, bracket_of(alg, E[i], E[j]), E[k]),
                    bracket_of(alg, bracket_of(alg, E[j], E[k]), E[i])),
            bracket_of(alg, bracket_of(alg, E[k], E[i]), E[j]),
        )
        if any(r):
            return JacobiResult(False, (i, j, k), r)
    return JacobiResult(True)


def lower_central_series(alg: LieAlgebra) -> list[int]:
    n = alg.dim
    current = [la.unit(n, k) for k in range(n)]
    dims = [n]
    while True:
        nxt = la.span_basis([bracket_of(alg, v, la.unit(n, k)) for v in current for k in range(n)])
        dims.append(len(nxt))
        if len(nxt) == 0 or len(nxt) == len(current):
            return dims
        current = nxt


def is_nilpotent(alg: LieAlgebra) -> bool:
    return lower_central_series(alg)[-1] == 0


def nilpotency_step(alg: LieAlgebra) -> int:
    """Length s of the lower central series (brackets of s+1 elements vanish)."""
    dims = lower_central_series(alg)
    if dims[-1] != 0:
        raise ValueError("algebra is not nilpotent")
    return len(dims) - 1


def change_basis(alg: LieAlgebra, P, basis: Sequence[str] = ()) -> LieAlgebra:
    """Algebra in the new basis f_j = sum_i P[i][j] e_i (columns of P)."""
    P = la.as_matrix(P)
    Pinv = la.inverse(P)
    cols = la.transpose(P)
    n = alg.dim
    table = {}
    for a in range(n):
        for b in range(a + 1, n):
            v = la.matvec(Pinv, bracket_of(alg, cols[a], cols[b]))
            row = {k: c for k, c in enumerate(v) if c}
            if row:
                table[(a, b)] = row
    field = common_field([x for row in P for x in row] + [c for r in table.values() for c in r.values()])
    return LieAlgebra(n, table, tuple(basis) or alg.basis, max(field, alg.field))


def is_homomorphism(src: LieAlgebra, dst: LieAlgebra, A) -> tuple[int, int] | None:
    """First basis pair (i, j) with A[e_i, e_j] != [A e_i, A e_j], else None."""
    A = la.as_matrix(A)
    cols = la.transpose(A)
    for i in range(src.dim):
        for j in range(i + 1, src.dim):
            lhs = la.matvec(A, src.bracket_basis(i, j))
            rhs = bracket_of(dst, cols[i], cols[j])
            if lhs != rhs:
                return (i, j)
    return None


# gradings -----------------------------------------------------------------

@dataclass(frozen=True)
class Grading:
    """Layers L_0..L_r of basis indices; layer i carries weight i + 1."""

    layers: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        layers = tuple(tuple(L) for L in self.layers)
        object.__setattr__(self, "layers", layers)
        if not layers or any(len(L) == 0 for L in layers):
            raise ValueError("layers must be nonempty")
        flat = [k for L in layers for k in L]
        if len(set(flat)) != len(flat):
            raise ValueError("layers must be disjoint")
        if sorted(flat) != list(range(len(flat))):
            raise ValueError("layers must cover 0..n-1")

    @property
    def dim(self) -> int:
        return sum(len(L) for L in self.layers)

    @property
    def depth(self) -> int:
        """Index r of the top layer."""
        return len(self.layers) - 1

    def layer_of(self, k: int) -> int:
        for i, L in enumerate(self.layers):
            if k in L:
                return i
        raise IndexError(k)

    def weights(self) -> tuple[int, ...]:
        w = [0] * self.dim
        for i, L in enumerate(self.layers):
            for k in L:
                w[k] = i + 1
        return tuple(w)

    def dims(self) -> tuple[int, ...]:
        return tuple(len(L) for L in self.layers)


@dataclass(frozen=True)
class GradedAlgebra:
    algebra: LieAlgebra
    grading: Grading

    def __post_init__(self):
        if self.grading.dim != self.algebra.dim:
            raise ValueError("grading does not cover the algebra's basis")

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @property
    def field(self) -> int:
        return self.algebra.field

    @property
    def layers(self):
        return self.grading.layers


@dataclass(frozen=True)
class GradingVerdict:
    label: str  # "graded" | "graded_carnot" | "violation"
    description: str = ""
    layer_pair: tuple[int, int] | None = None
    witness: tuple[int, int] | None = None

    @property
    def is_graded(self) -> bool:
        return self.label in ("graded", "graded_carnot")


def verify_grading(g: GradedAlgebra) -> GradingVerdict:
    alg, gr = g.algebra, g.grading
    r = gr.depth
    for i, j in itertools.combinations_with_replacement(range(r + 1), 2):
        target = i + j + 1
        allowed = set(gr.layers[target]) if target <= r else set()
        for a in gr.layers[i]:
            for b in gr.layers[j]:
                v = alg.bracket_basis(a, b)
                bad = [k for k, c in enumerate(v) if c and k not in allowed]
                if bad:
                    where = f"layer {target}" if target <= r else "zero"
                    return GradingVerdict(
                        "violation",
                        f"[{alg.basis[a]}, {alg.basis[b]}] leaves {where}: component on {alg.basis[bad[0]]}",
                        (i, j),
                        (a, b),
                    )
    n = alg.dim
    current = [la.unit(n, k) for k in gr.layers[0]]
    for i in range(r):
        prods = [bracket_of(alg, la.unit(n, a), v) for a in gr.layers[0] for v in current]
        span = la.span_basis(prods)
        if len(span) != len(gr.layers[i + 1]):
            return GradingVerdict(
                "graded", f"[L0, L{i}] spans {len(span)} of {len(gr.layers[i + 1])} dims of L{i + 1}", (0, i)
            )
        current = span
    return GradingVerdict("graded_carnot")


def dilation_matrix(g: GradedAlgebra, s) -> la.Matrix:
    """Diagonal matrix scaling layer i by s**(i+1)."""
    s = Scalar.coerce(s)
    if not s:
        raise ValueError("dilation factor must be nonzero")
    return la.diag([s ** w for w in g.grading.weights()])


def grading_derivation(g: GradedAlgebra) -> la.Matrix:
    return la.diag(g.grading.weights())


def block_diagonal_change(g: GradedAlgebra, P) -> GradedAlgebra:
    """Conjugate by a layer-preserving P; the grading is unchanged."""
    P = la.as_matrix(P)
    gr = g.grading
    for a in range(g.dim):
        for b in range(g.dim):
            if P[a][b] and gr.layer_of(a) != gr.layer_of(b):
                raise ValueError("change of basis does not preserve the layers")
    return GradedAlgebra(change_basis(g.algebra, P), gr)
