# Nilpotent tangent cones of two polynomial distributions in R^3.
from carnot.lie import check_jacobi, verify_grading
from carnot.metivier import NonGenericPointError, evaluate_filtration, genericity_check, tangent_cone
from carnot.polyfield import PolyVectorField

X = PolyVectorField.from_terms(3, [{(0, 0, 0): 1}, {}, {}])            # d1
Y = PolyVectorField.from_terms(3, [{}, {(0, 0, 0): 1}, {(1, 0, 0): 1}])  # d2 + x1 d3
M = PolyVectorField.from_terms(3, [{}, {(0, 0, 0): 1}, {(2, 0, 0): 1}])  # d2 + x1^2 d3

# Heisenberg model: one bracket fills R^3
filt = evaluate_filtration([X, Y], (0, 0, 0))
print("heisenberg dims", filt.dims, "weights", filt.floor)
cone = tangent_cone([X, Y], (0, 0, 0))
print("frame", cone.frame.labels)
print("brackets", {k: {j: str(c) for j, c in v.items()} for k, v in cone.algebra.algebra.brackets.items()})
print("jacobi", check_jacobi(cone.algebra.algebra).ok, "grading", verify_grading(cone.algebra).label)

# Martinet: at the origin the bracket [X, M] = 2 x1 d3 vanishes, so a triple bracket is needed
print("martinet dims at 0", evaluate_filtration([X, M], (0, 0, 0)).dims)
v = genericity_check([X, M], (0, 0, 0))
print("generic?", v.generic, "witness", [str(c) for c in v.witness], "dims there", v.witness_dims)
try:
    tangent_cone([X, M], (0, 0, 0))
except NonGenericPointError as exc:
    print("refused:", exc)

# off the plane x1 = 0 the Martinet distribution looks like the Heisenberg one
cone = tangent_cone([X, M], (1, 0, 0))
print("martinet at (1,0,0):", cone.frame.labels, "bracket identity failures", cone.bracket_identity_failures())
