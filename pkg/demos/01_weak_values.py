"""
Weak values of pre- and post-selected systems
=============================================

A weak value is fixed by an observable and a pair of states, one prepared
before and one found after. It is complex in general and need not lie
inside the eigenvalue range.
"""

# %%
# The textbook spin-1/2 example: prepared along +x, found along +y.
import numpy as np

from weakvalues.hilbert import (PAULI_X, PAULI_Y, PAULI_Z, UP_X, UP_Y, TwoStateVector,
                                axis_top_state, spin_operators, weak_value)

tsv = TwoStateVector(ket=UP_X, bra=UP_Y)
for name, op in (("sigma_x", PAULI_X), ("sigma_y", PAULI_Y), ("sigma_z", PAULI_Z)):
    print(f"{name}_w = {weak_value(op, tsv):.6f}")

# %%
# Nearly orthogonal pre- and post-selection pushes sigma_z far outside [-1, 1].
for theta in (0.3, 0.6, 0.75):
    pair = TwoStateVector(ket=[np.cos(theta), np.sin(theta)], bra=[np.cos(theta), -np.sin(theta)])
    print(f"theta={theta:.2f}  (sigma_z)_w = {weak_value(PAULI_Z, pair).real:9.4f}"
          f"  1/cos(2 theta) = {1 / np.cos(2 * theta):9.4f}")

# %%
# A spin N prepared along x and found along y has weak values (N, N, iN):
# a large, partly imaginary "z component".
for N in (1, 2, 5, 10):
    big = TwoStateVector(axis_top_state([1, 0, 0], N), axis_top_state([0, 1, 0], N))
    sw = [weak_value(s, big) for s in spin_operators(N)]
    print(f"N={N:2d}  S_w = ({sw[0].real:.3f}, {sw[1].real:.3f}, {sw[2].imag:.3f}i)")
