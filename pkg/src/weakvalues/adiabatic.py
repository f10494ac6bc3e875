"""
Adiabatic (slow, weak) measurements.

The pointer has no free Hamiltonian, so its momentum P commutes with the
total Hamiltonian ``H0 + g(t) P A``. Every momentum node therefore evolves
the system independently under ``H0 + g(t) p A``, and the joint state is
reassembled from those slices at the end. All slices are integrated together
as one batched fixed-step RK4 problem.
"""
import csv
import math
from dataclasses import dataclass, replace

import numpy as np

from . import pointer as ptr
from .errors import (DegenerateSpectrum, InvalidSpin, NotHermitian, OverlapVanishes,
                     PostSelectionImpossible, ProtectionTooWeak, UnitarityDrift)
from .hilbert import (OVERLAP_TOL, PAULI_X, PAULI_Y, PAULI_Z, UP_X, TwoStateVector,
                      as_operator, axis_top_state, eig_biorthogonal, eig_hermitian,
                      is_hermitian, ket, spin_operators, weak_value)
from .impulsive import JointState

__all__ = [
    "RampProfile", "AdiabaticOutcome", "ProtectionSetup", "SliceEvolution", "ProtectedRun",
    "evolve_slices", "evolve_adiabatic", "evolve_nonhermitian_adiabatic", "pointer_mean",
    "protective_shift", "protective_outcomes", "nonhermitian_evolve",
    "adiabatic_nonhermitian_measure", "sample_outcome", "measure_sequence",
    "build_spin_protection", "effective_hamiltonian", "simulate_protected_2sv",
    "kaon_toy_hamiltonian", "kaon_fidelity", "write_scan_csv",
]

PROTECTION_GUARD = 0.05
NONDEGENERATE_GAP = 1e-6
DRIFT_LIMIT = 1e-6
MIN_STEPS = 1000
# largest phase advanced per RK4 step; RK4 loses ~x^6/72 of norm per step
MAX_PHASE_STEP = 0.005


@dataclass(frozen=True)
class RampProfile:
    """Coupling g(t) on [0, T]: raised-cosine ramps of length rT, flat top, unit area."""

    total_time: float
    ramp_fraction: float = 0.1

    def __post_init__(self):
        if not self.total_time > 0:
            raise ValueError("total time must be positive")
        if not 0 < self.ramp_fraction < 0.4:
            raise ValueError("ramp fraction must lie in (0, 0.4)")

    @property
    def plateau(self):
        return 1.0 / (self.total_time * (1 - self.ramp_fraction))

    def at(self, t):
        """Scalar g(t)."""
        T, tr = self.total_time, self.ramp_fraction * self.total_time
        if t < 0 or t > T:
            return 0.0
        edge = min(t, T - t)
        if edge >= tr:
            return self.plateau
        return self.plateau * 0.5 * (1 - math.cos(math.pi * edge / tr))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        T, tr = self.total_time, self.ramp_fraction * self.total_time
        edge = np.minimum(t, T - t)
        rise = 0.5 * (1 - np.cos(np.pi * np.clip(edge, 0, tr) / tr))
        return np.where((t < 0) | (t > T), 0.0, self.plateau * rise)


@dataclass(frozen=True)
class SliceEvolution:
    momenta: np.ndarray
    states: np.ndarray  # (n_slices, d)
    steps: int
    max_drift: float


def _norm2(op):
    return float(np.linalg.norm(op, 2))


def evolve_slices(H0, A, psi0, momenta, ramp, steps=None):
    """Integrate i d/dt y_p = (H0 + g(t) p A) y_p for every p at once (RK4)."""
    H0, A = as_operator(H0), as_operator(A)
    psi0 = np.asarray(psi0, dtype=complex)
    momenta = np.asarray(momenta, dtype=float)
    T = ramp.total_time
    if steps is None:
        omega = _norm2(H0) + ramp.plateau * np.max(np.abs(momenta), initial=0.0) * _norm2(A)
        steps = max(MIN_STEPS, math.ceil(T * omega / MAX_PHASE_STEP))
    elif steps < MIN_STEPS:
        raise ValueError(f"need at least {MIN_STEPS} steps")
    h = T / steps
    h0t, at = -1j * H0.T, -1j * A.T
    pcol = momenta[:, None]

    def rhs(t, y):
        return y @ h0t + (ramp.at(t) * pcol) * (y @ at)

    y = np.tile(psi0, (momenta.size, 1))
    for n in range(steps):
        t = n * h
        k1 = rhs(t, y)
        k2 = rhs(t + h / 2, y + (h / 2) * k1)
        k3 = rhs(t + h / 2, y + (h / 2) * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
    drift = float(np.max(np.abs(np.sum(np.abs(y) ** 2, axis=1) - np.vdot(psi0, psi0).real), initial=0.0))
    return SliceEvolution(momenta, y, steps, drift)


def _active_slices(mom_amps, cutoff=1e-24):
    dens = np.abs(mom_amps) ** 2
    return dens > cutoff * dens.max()


def evolve_adiabatic(H0, A, psi0, w, ramp, steps=None):
    """Joint system-pointer state after a slow measurement of `A` under `H0`.

    Momentum nodes whose pointer density is below 1e-24 of the peak (FFT
    round-off lives near 1e-32) are left at zero amplitude.

    Returns
    -------
    JointState
        In the momentum representation.
    """
    H0, A = as_operator(H0), as_operator(A)
    if not (is_hermitian(H0) and is_hermitian(A)):
        raise NotHermitian("H0 and A must be hermitian")
    psi0 = ket(psi0)
    if not (H0.shape == A.shape == (psi0.size, psi0.size)):
        raise ValueError("dimension mismatch between H0, A and psi0")
    mom = ptr.to_momentum(w).amps
    active = _active_slices(mom)
    run = evolve_slices(H0, A, psi0, w.grid.p[active], ramp, steps)
    if run.max_drift > DRIFT_LIMIT:
        raise UnitarityDrift(f"slice norm drift {run.max_drift:.3e}")
    amps = np.zeros((psi0.size, w.grid.points), dtype=complex)
    amps[:, active] = (run.states * mom[active, None]).T
    return JointState(w.grid, amps, ptr.MOMENTUM)


def evolve_nonhermitian_adiabatic(H, A, psi0, w, ramp, steps=None):
    """Slow measurement under a non-hermitian `H`; the result is renormalized."""
    H, A = as_operator(H), as_operator(A)
    psi0 = ket(psi0)
    mom = ptr.to_momentum(w).amps
    active = _active_slices(mom)
    run = evolve_slices(H, A, psi0, w.grid.p[active], ramp, steps)
    amps = np.zeros((psi0.size, w.grid.points), dtype=complex)
    amps[:, active] = (run.states * mom[active, None]).T
    js = JointState(w.grid, amps, ptr.MOMENTUM)
    return JointState(w.grid, amps / np.sqrt(js.norm2()), ptr.MOMENTUM)


def pointer_mean(js):
    pos = js.to(ptr.POSITION)
    dens = np.sum(np.abs(pos.amps) ** 2, axis=0)
    return float(np.sum(pos.grid.q * dens) / np.sum(dens))


def _check_gaps(energies, levels=None):
    levels = range(energies.size) if levels is None else levels
    for i in levels:
        others = np.delete(energies, i)
        if others.size and np.min(np.abs(others - energies[i])) <= NONDEGENERATE_GAP:
            raise DegenerateSpectrum(f"level {i} is degenerate")


def protective_shift(H0, level, A, delta, T, steps=None, grid=None, ramp_fraction=0.1):
    """Pointer displacement after protectively measuring `A` in eigenstate `level` of H0."""
    spectrum = eig_hermitian(H0)
    _check_gaps(spectrum.eigenvalues, [level])
    a_max = np.max(np.abs(eig_hermitian(A).eigenvalues))
    grid = grid or ptr.default_grid(delta, [a_max])
    w = ptr.gaussian_pointer(grid, delta)
    js = evolve_adiabatic(H0, A, spectrum.eigenvectors[:, level], w, RampProfile(T, ramp_fraction), steps)
    return pointer_mean(js)


@dataclass(frozen=True)
class AdiabaticOutcome:
    label: int
    shift: float
    weak_or_expectation: complex
    probability: float


def _keep(labels, weights, values, cutoff=1e-14):
    probs = np.asarray(weights) / np.sum(weights)
    keep = probs > cutoff
    probs = probs[keep] / probs[keep].sum()
    return [AdiabaticOutcome(int(i), float(np.real(v)), complex(v), float(p))
            for i, v, p in zip(np.asarray(labels)[keep], np.asarray(values)[keep], probs)]


def protective_outcomes(H0, psi0, A):
    """Possible readings <E_i|A|E_i> with probabilities |<E_i|psi0>|^2."""
    spectrum = eig_hermitian(H0)
    _check_gaps(spectrum.eigenvalues)
    A = as_operator(A)
    if not is_hermitian(A):
        raise NotHermitian("observable must be hermitian")
    vecs = spectrum.eigenvectors
    values = np.einsum("ji,jk,ki->i", vecs.conj(), A, vecs)
    weights = np.abs(spectrum.coefficients(ket(psi0))) ** 2
    return _keep(range(values.size), weights, values)


def nonhermitian_evolve(H, psi0, t):
    """Renormalized exp(-iHt) psi0 through the bi-orthogonal expansion."""
    bs = eig_biorthogonal(H)
    alpha = bs.expand(ket(psi0))
    return ket(bs.kets @ (alpha * np.exp(-1j * bs.frequencies * t)))


def _pair_weak_values(bs, A):
    values = []
    for i in range(bs.dim):
        if abs(bs.norms[i]) <= OVERLAP_TOL:
            raise OverlapVanishes(f"pair {i} has vanishing bra-ket overlap")
        values.append(weak_value(A, bs.pair(i)))
    return np.array(values)


def adiabatic_nonhermitian_measure(H, A, psi0, delta, T, grid=None):
    """Outcome rule and analytic pointer state for a slow measurement under non-hermitian H.

    Outcome ``i`` reads Re of the weak value of `A` for the pair
    <bra_i| |ket_i>, with probability proportional to |alpha_i exp(-i w_i T)|^2
    where psi0 = sum_i alpha_i ket_i.

    Returns
    -------
    outcomes : list of AdiabaticOutcome
    joint : JointState
        sum_i alpha_i exp(-i w_i T) |ket_i> (x) Gaussian(Q - shift_i), normalized,
        in the position representation.
    """
    bs = eig_biorthogonal(H)
    A = as_operator(A)
    weak = _pair_weak_values(bs, A)
    amp = bs.expand(ket(psi0)) * np.exp(-1j * bs.frequencies * T)
    outcomes = _keep(range(bs.dim), np.abs(amp) ** 2, weak)
    shifts = weak.real
    grid = grid or ptr.default_grid(delta, shifts)
    gauss = np.exp(-((grid.q[None, :] - shifts[:, None]) ** 2) / (2 * delta**2))
    amps = bs.kets @ (amp[:, None] * gauss)
    js = JointState(grid, amps, ptr.POSITION)
    return outcomes, JointState(grid, amps / np.sqrt(js.norm2()), ptr.POSITION)


def sample_outcome(outcomes, stream):
    probs = np.array([o.probability for o in outcomes])
    u = stream.generator().random()
    k = min(int(np.searchsorted(np.cumsum(probs), u, side="right")), len(outcomes) - 1)
    return outcomes[k]


def measure_sequence(H, observables, psi0, T, stream):
    """Slow measurements of several observables on one system in one run.

    A single pair index is drawn from the outcome rule; every observable then
    reads its weak value for that same pair, and the system is left in the
    pair's ket.

    Returns
    -------
    label : int
    shifts : list of float
    state : ndarray
    """
    bs = eig_biorthogonal(H)
    amp = bs.expand(ket(psi0)) * np.exp(-1j * bs.frequencies * T)
    first = _keep(range(bs.dim), np.abs(amp) ** 2, np.zeros(bs.dim))
    label = sample_outcome(first, stream).label
    shifts = [weak_value(as_operator(A), bs.pair(label)).real for A in observables]
    return label, shifts, bs.kets[:, label].copy()


@dataclass(frozen=True)
class ProtectionSetup:
    """Large-spin ancilla coupled to a spin-1/2 by -lam S . sigma (ancilla is the slow index)."""

    N: int
    lam: float
    H_prot: np.ndarray
    pre_state: np.ndarray
    post_state: np.ndarray

    @property
    def dim(self):
        return self.H_prot.shape[0]

    def ancilla_tsv(self):
        return TwoStateVector(ket=self.pre_state, bra=self.post_state)

    def without_protection(self):
        """Same ancilla and pointer bookkeeping with the coupling switched off."""
        return replace(self, lam=0.0, H_prot=np.zeros_like(self.H_prot))


def build_spin_protection(N, lam):
    if int(N) != N or N < 1:
        raise InvalidSpin(f"ancilla spin must be a positive integer, got {N}")
    if lam == 0:
        raise ValueError("coupling must be nonzero")
    N = int(N)
    S = spin_operators(N)
    H = -lam * sum(np.kron(s, sig) for s, sig in zip(S, (PAULI_X, PAULI_Y, PAULI_Z)))
    pre = axis_top_state([1, 0, 0], N)
    post = axis_top_state([0, 1, 0], N)
    return ProtectionSetup(N, float(lam), H, pre, post)


def effective_hamiltonian(setup):
    """-lam (S_w . sigma) with the ancilla spin replaced by its weak value."""
    tsv = setup.ancilla_tsv()
    s_w = [weak_value(s, tsv) for s in spin_operators(setup.N)]
    return -setup.lam * sum(c * sig for c, sig in zip(s_w, (PAULI_X, PAULI_Y, PAULI_Z)))


@dataclass(frozen=True)
class ProtectedRun:
    pointer_mean: float
    post_select_prob: float
    disturbance: float
    T: float = None


def simulate_protected_2sv(setup, A, delta, T, steps=None, grid=None,
                           intended=UP_X, enforce_guard=True, ramp_fraction=0.1):
    """Slow measurement of a spin-1/2 observable under two-state-vector protection.

    The ancilla is pre-selected in |S_x = N>, the spin in `intended`. After the
    run the ancilla is post-selected on <S_y = N|; the pointer (mixed over the
    unobserved spin) and the conditional spin state are then reported.

    Returns
    -------
    ProtectedRun
        ``disturbance`` is 1 - <intended|rho|intended> for the conditional
        spin density matrix rho.
    """
    A = as_operator(A)
    if A.shape != (2, 2) or not is_hermitian(A):
        raise NotHermitian("observable must be a hermitian 2x2 matrix")
    if enforce_guard:
        strength = abs(setup.lam) * setup.N * T
        if strength == 0 or 1 / strength >= PROTECTION_GUARD:
            raise ProtectionTooWeak(f"1/(lam N T) must be below {PROTECTION_GUARD}")
    a_max = np.max(np.abs(eig_hermitian(A).eigenvalues))
    grid = grid or ptr.default_grid(delta, [a_max])
    w = ptr.gaussian_pointer(grid, delta)
    intended = ket(intended)
    psi0 = np.kron(setup.pre_state, intended)
    coupling = np.kron(np.eye(2 * setup.N + 1), A)

    mom = ptr.to_momentum(w).amps
    active = _active_slices(mom)
    run = evolve_slices(setup.H_prot, coupling, psi0, grid.p[active], RampProfile(T, ramp_fraction), steps)
    if run.max_drift > DRIFT_LIMIT:
        raise UnitarityDrift(f"slice norm drift {run.max_drift:.3e}")
    y = run.states.reshape(-1, 2 * setup.N + 1, 2)
    spin = np.einsum("a,pas->ps", setup.post_state.conj(), y) * mom[active, None]
    prob = float(np.sum(np.abs(spin) ** 2) * grid.dp)
    if prob < 1e-300:
        raise PostSelectionImpossible(f"success probability {prob:.3e}")

    amps = np.zeros((2, grid.points), dtype=complex)
    amps[:, active] = spin.T
    mean = pointer_mean(JointState(grid, amps, ptr.MOMENTUM))
    rho = spin.T @ spin.conj() * grid.dp / prob
    fidelity = float(np.real(np.vdot(intended, rho @ intended)))
    # round-off can push the fidelity a hair above one
    return ProtectedRun(mean, prob, max(0.0, 1 - fidelity), T)


def kaon_toy_hamiltonian(epsilon, frequencies=(1.0 - 0.005j, 1.5 - 0.5j)):
    """2x2 decaying-system generator whose unit eigen-kets overlap by `epsilon`."""
    kets = np.array([[1.0, epsilon], [0.0, np.sqrt(1 - epsilon**2)]], dtype=complex)
    return kets @ np.diag(np.asarray(frequencies, dtype=complex)) @ np.linalg.inv(kets)


def kaon_fidelity(bs):
    """Per pair, |<bra_i|ket_i>|^-1 for unit vectors.

    Equivalently the norm of the backward state once it is scaled to be the
    exact dual of its unit forward state; 1/sqrt(1 - |eps|^2) for a 2x2 system
    whose kets overlap by eps.
    """
    return 1.0 / np.abs(bs.norms)


def write_scan_csv(stream, runs, target):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["T", "mean_q", "error", "disturbance", "post_select_prob"])
    for r in runs:
        writer.writerow([format(r.T, ".17g"), format(r.pointer_mean, ".17g"),
                         format(abs(r.pointer_mean - target), ".17g"),
                         format(r.disturbance, ".17g"), format(r.post_select_prob, ".17g")])
