# Asymmetry verdicts: does every graded automorphism fix some inner product up to scale?
from carnot import linalg as la
from carnot.algebras import filiform, heisenberg
from carnot.autgroup import asymmetry_verdict, graded_derivations, trace_zero_derivations, validate_not_asymmetric

for name, g in [("heisenberg3", heisenberg()), ("filiform_r3", filiform(3))]:
    v = asymmetry_verdict(g)
    print(name, "graded derivations:", graded_derivations(g).dim, "->", v.verdict)
    if v.verdict == "not_asymmetric":
        D = v.certificate
        print("  trace-zero derivation, layer-0 block:", [[str(x) for x in row] for row in la.submatrix(D, g.layers[0], g.layers[0])])
        print("  real eigenvalue isolated in", [str(x) for x in v.eigen_interval])
        print("  certificate validates:", validate_not_asymmetric(g, D, v.eigen_interval))

# the filiform table as written has one trace-zero graded derivation:
# y0 -> -y0, z0 -> z0 - 2 y0, so its layer-0 block has eigenvalues +1 and -1
print("filiform trace-zero derivations:", len(trace_zero_derivations(filiform(3))))
