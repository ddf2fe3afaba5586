"""Exact computations with graded nilpotent Lie algebras, their tangent cones,
and Lyapunov spectra of nilmanifold automorphisms."""

__version__ = "0.1.0"

from .scalar import Scalar, parse_scalar, format_scalar
from .lie import GradedAlgebra, Grading, LieAlgebra
