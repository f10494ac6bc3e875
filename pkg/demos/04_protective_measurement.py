"""
Protective measurement of a single system
=========================================

A slow, weak coupling to a system held in a nondegenerate energy eigenstate
shifts the pointer by the expectation value, without collapsing the state.
"""

# %%
import numpy as np

from weakvalues import adiabatic as ad
from weakvalues.hilbert import PAULI_X, PAULI_Z

H0 = PAULI_X + PAULI_Z
target = 1 / np.sqrt(2)   # <sigma_z> in the upper eigenstate of H0

# %%
# The shift converges as the coupling is spread over a longer time.
for T in (5.0, 10.0, 25.0, 50.0, 100.0):
    shift = ad.protective_shift(H0, 1, PAULI_Z, 1.0, T)
    print(f"T={T:6.1f}  shift {shift:.6f}  error {abs(shift - target):.2e}")

# %%
# A superposition of levels reads one level's expectation value per run.
for o in ad.protective_outcomes(H0, [1, 0], PAULI_Z):
    print(f"level {o.label}: shift {o.shift:+.6f} with probability {o.probability:.4f}")
