# Lyapunov spectra of graded automorphisms at a fixed point.
import math
from fractions import Fraction

from carnot import linalg as la
from carnot.algebras import filiform, heisenberg
from carnot.autgroup import extend_layer0_map
from carnot.lie import dilation_matrix
from carnot.spectra import layer_spectra, verify_arithmeticity, verify_heisenberg_additivity, verify_subadditivity

F = filiform(3)
print("filiform dilation by 2:", verify_arithmeticity(dilation_matrix(F, 2), F))

# a homothety composed with a rotation in the horizontal plane of H3
H = heisenberg()
rot = extend_layer0_map(H, la.as_matrix([[Fraction(3, 5), Fraction(-4, 5)], [Fraction(4, 5), Fraction(3, 5)]]))
A = la.matmul(dilation_matrix(H, 3), rot)
print("3 * rotation on H3:", verify_arithmeticity(A, H).holds)

# not a homothety: the horizontal exponents differ, but the inequalities still hold
B = la.diag([2, 3, 6])
levels = layer_spectra(B, H)
print("diag(2,3,6) levels", [[round(v, 4) for v in lv] for lv in levels])
print("  arithmetic?", verify_arithmeticity(B, H).holds)
print("  subadditive?", verify_subadditivity(levels).holds)
print("  heisenberg sum?", verify_heisenberg_additivity(levels[0] + levels[1]))
print("  log 2 + log 3 = log 6:", math.isclose(math.log(2) + math.log(3), math.log(6)))
