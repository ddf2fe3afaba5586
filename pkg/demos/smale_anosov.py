# Smale's Anosov automorphism of a 6-dim nilmanifold, built and checked exactly,
# then compared against a QR estimate of a slightly perturbed map.
import numpy as np

from carnot.nilmanifold import build_smale_system, make_periodic_perturbation, qr_lyapunov_estimate
from carnot.spectra import heisenberg_additivity_exact, lyapunov_spectrum
from carnot.algebras import heisenberg

system = build_smale_system()
print("lambda =", system.lam, "~", float(system.lam))
print("certificates:", system.certificates)

# the lattice map is an integer matrix, one 2x2 block per (layer, Galois pair)
for i in range(3):
    block = [[str(system.lattice_map[2 * i + a][2 * i + b]) for b in range(2)] for a in range(2)]
    print("lattice block", i, block)

# exact spectrum of the unstable block: log lam, 2 log lam, 3 log lam
unstable = system.unstable_block()
print("unstable exponents:", [round(v, 6) for v in lyapunov_spectrum(unstable).values()])
print("horizontal sum vs center:", heisenberg_additivity_exact(unstable, heisenberg()))

# a periodic perturbation exp(phi(x)) * A(x) of size 1e-3
f = make_periodic_perturbation(system, 1e-3, seed=0)
est = qr_lyapunov_estimate(f, iterations=5000, seed=0)
exact = np.sort(np.log(np.abs(np.diag(system.float_map()))))
for e, q in zip(exact, est.exponents):
    print(f"exact {e:+.6f}   estimate {q:+.6f}   diff {abs(e - q):.1e}")
print("sum of exponents", est.exponents.sum(), "mean log|det|", est.mean_log_det)
