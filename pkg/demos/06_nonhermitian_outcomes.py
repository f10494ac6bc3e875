"""
Slow measurements under non-hermitian evolution
===============================================

A decaying system that is found not to have decayed evolves under a
non-hermitian Hamiltonian. A slow measurement then reads the weak value of
one bra/ket pair of that Hamiltonian, chosen with a survival-weighted
probability.
"""

# %%
import numpy as np

from weakvalues import adiabatic as ad
from weakvalues.ensemble import RngStream, run_ensemble
from weakvalues.hilbert import PAULI_X, PAULI_Y, PAULI_Z, eig_biorthogonal

H = np.diag([0, -0.1j])       # level 1 decays at rate 0.2
outcomes, joint = ad.adiabatic_nonhermitian_measure(H, PAULI_Z, [0.6, 0.8], 0.1, 5.0)
for o in outcomes:
    print(f"pair {o.label}: shift {o.shift:+.1f}, probability {o.probability:.6f}")

_, labels = run_ensemble(lambda s: ad.sample_outcome(outcomes, s).label, 10_000, seed=2)
print("empirical frequencies:", {o.label: float(np.mean(labels == o.label)) for o in outcomes})

# %%
# Several observables measured in one run all refer to the same pair.
heff = -(PAULI_X + PAULI_Y + 1j * PAULI_Z)
label, shifts, state = ad.measure_sequence(heff, [PAULI_X, PAULI_Y, PAULI_Z], [1, 1], 3.0, RngStream(0))
print(f"pair {label}: shifts {np.round(shifts, 6)}")

# %%
# Decaying doublets with non-orthogonal eigenstates: the dual bra grows as
# 1/sqrt(1 - eps^2) when the kets overlap by eps.
for eps in (0.01, 0.1, 0.3, 0.6):
    fid = ad.kaon_fidelity(eig_biorthogonal(ad.kaon_toy_hamiltonian(eps)))
    print(f"eps={eps:.2f}  fidelity {fid[0]:.8f}  1/sqrt(1-eps^2) {1 / np.sqrt(1 - eps**2):.8f}")
