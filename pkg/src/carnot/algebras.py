"""Named algebras used throughout the examples and tests."""
from __future__ import annotations

from .lie import GradedAlgebra, Grading, LieAlgebra


def heisenberg(n: int = 1, field: int = 1) -> GradedAlgebra:
    """H^{2n+1} with basis X_1..X_n, Y_1..Y_n, Z and [X_i, Y_i] = Z."""
    dim = 2 * n + 1
    z = 2 * n
    brackets = {(i, n + i): {z: 1} for i in range(n)}
    if n == 1:
        basis = ("X", "Y", "Z")
    else:
        basis = tuple(f"X{i + 1}" for i in range(n)) + tuple(f"Y{i + 1}" for i in range(n)) + ("Z",)
    alg = LieAlgebra.from_brackets(dim, brackets, basis, field)
    return GradedAlgebra(alg, Grading((tuple(range(2 * n)), (z,))))


def filiform(r: int = 3, field: int = 1) -> GradedAlgebra:
    """Even-dimensional (r+3) filiform algebra on y0, z0, y1..y_{r+1}.

    Brackets [z0, y_i] = y_{i+1} and [y_i, y_{r-i}] = (-1)^i y_{r+1} for 0 <= i <= r.
    """
    dim = r + 3
    pos = {"y0": 0, "z0": 1}
    for i in range(1, r + 2):
        pos[f"y{i}"] = i + 1
    brackets: dict = {}

    def put(a, b, k, c):
        key = (pos[a], pos[b])
        brackets.setdefault(key, {})
        brackets[key][pos[k]] = brackets[key].get(pos[k], 0) + c

    for i in range(r + 1):
        put("z0", f"y{i}", f"y{i + 1}", 1)
    for i in range(r + 1):
        if i < r - i:
            put(f"y{i}", f"y{r - i}", f"y{r + 1}", (-1) ** i)
    basis = ("y0", "z0") + tuple(f"y{i}" for i in range(1, r + 2))
    alg = LieAlgebra.from_brackets(dim, brackets, basis, field)
    layers = ((0, 1),) + tuple((i + 1,) for i in range(1, r + 2))
    return GradedAlgebra(alg, Grading(layers))


def abelian(n: int, field: int = 1) -> GradedAlgebra:
    alg = LieAlgebra.from_brackets(n, {}, (), field)
    return GradedAlgebra(alg, Grading((tuple(range(n)),)))


def so3() -> LieAlgebra:
    """[e1,e2]=e3, [e2,e3]=e1, [e3,e1]=e2 (perfect, not nilpotent)."""
    return LieAlgebra.from_brackets(3, {(0, 1): {2: 1}, (1, 2): {0: 1}, (2, 0): {1: 1}})
