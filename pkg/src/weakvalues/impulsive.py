"""
Impulsive von Neumann measurements.

The coupling ``g(t) P A`` with ``integral g = 1`` acts during a vanishing
interval, so it integrates to the exact unitary ``exp(-i P A)``. In the
eigenbasis of ``A`` that is a pointer shift by each eigenvalue, which is
how :func:`entangle` applies it (one momentum-space phase per eigenvalue).
"""
from dataclasses import dataclass

import numpy as np

from . import pointer as ptr
from .ensemble import RngStream, run_ensemble
from .errors import (EmptyInput, NormalizationUnderflow, PostSelectionImpossible,
                     ShiftTooLarge, WeaknessViolated)
from .hilbert import eig_hermitian, ket, weak_moments, weak_value

__all__ = [
    "JointState", "ReadoutRecord", "WeakLimitReport", "PrePostExperiment",
    "entangle", "pointer_distribution", "IdealSampler", "ideal_sampler", "ideal_readout",
    "post_select", "mixture_terms", "weak_limit_report", "weak_ensemble_estimate",
]


@dataclass(frozen=True)
class JointState:
    """System (slow index) times pointer amplitudes, shape (d, M)."""

    grid: ptr.Grid
    amps: np.ndarray
    representation: str = ptr.POSITION

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex)
        if amps.ndim != 2 or amps.shape[1] != self.grid.points:
            raise ValueError("joint amplitudes must have shape (d, grid.points)")
        object.__setattr__(self, "amps", amps)

    @property
    def system_dim(self):
        return self.amps.shape[0]

    @property
    def spacing(self):
        return self.grid.dq if self.representation == ptr.POSITION else self.grid.dp

    def norm2(self):
        return float(np.sum(np.abs(self.amps) ** 2) * self.spacing)

    def to(self, target):
        if target == self.representation:
            return self
        if target == ptr.MOMENTUM:
            amps = ptr._forward(self.grid, self.amps, axis=1)
        elif target == ptr.POSITION:
            amps = ptr._inverse(self.grid, self.amps, axis=1)
        else:
            raise ValueError(f"unknown representation {target!r}")
        return JointState(self.grid, amps, target)

    def system_populations(self, basis):
        """Populations of the system in the orthonormal columns of `basis`."""
        proj = np.asarray(basis).conj().T @ self.amps
        return np.sum(np.abs(proj) ** 2, axis=1) * self.spacing


@dataclass(frozen=True)
class ReadoutRecord:
    reading: float
    collapsed_system: np.ndarray
    success: bool = True


def _shift_guard(eigenvalues, grid):
    span = np.max(np.abs(eigenvalues))
    if span >= grid.extent / 4:
        raise ShiftTooLarge(f"eigenvalue {span} exceeds L/4 = {grid.extent / 4}")


def entangle(psi, A, w):
    """Apply exp(-i P A) to psi (x) w."""
    spectrum = eig_hermitian(A)
    psi = ket(psi)
    if psi.size != spectrum.eigenvalues.size:
        raise ValueError("state and operator dimensions differ")
    _shift_guard(spectrum.eigenvalues, w.grid)
    mom = ptr.to_momentum(w).amps
    coeffs = spectrum.coefficients(psi)
    phases = np.exp(-1j * np.outer(spectrum.eigenvalues, w.grid.p))
    amps = spectrum.eigenvectors @ (coeffs[:, None] * phases * mom[None, :])
    return JointState(w.grid, amps, ptr.MOMENTUM).to(w.representation)


def pointer_distribution(js):
    """Marginal position density of the pointer with the system traced out."""
    amps = js.to(ptr.POSITION).amps
    return np.sum(np.abs(amps) ** 2, axis=0)


class IdealSampler:
    """Pointer readout with the marginal CDF precomputed.

    The reading is drawn by inverting the node-interpolated CDF; the system
    collapses onto its conditional state at the grid node nearest to it.
    """

    def __init__(self, js):
        pos = js.to(ptr.POSITION)
        self._amps = pos.amps
        self._q, self._dq = pos.grid.q, pos.grid.dq
        self._dens = np.sum(np.abs(pos.amps) ** 2, axis=0)
        self._cdf = np.concatenate([[0.0], np.cumsum((self._dens[1:] + self._dens[:-1]) / 2 * self._dq)])
        if self._cdf[-1] <= 0:
            raise NormalizationUnderflow("pointer density vanishes")

    def from_uniform(self, u):
        cdf, dens = self._cdf, self._dens
        u = u * cdf[-1]
        k = int(np.searchsorted(cdf, u, side="right")) - 1
        k = min(max(k, 0), self._q.size - 2)
        frac = (u - cdf[k]) / (cdf[k + 1] - cdf[k]) if cdf[k + 1] > cdf[k] else 0.5
        near = k + 1 if frac > 0.5 else k
        if dens[near] == 0.0:
            near = k if near == k + 1 else k + 1
        return ReadoutRecord(float(self._q[k] + frac * self._dq), ket(self._amps[:, near]))

    def __call__(self, stream):
        return self.from_uniform(stream.generator().random())


def ideal_sampler(js):
    return IdealSampler(js)


def ideal_readout(js, rng):
    if not isinstance(rng, RngStream):
        rng = RngStream(int(rng))
    return ideal_sampler(js)(rng)


def post_select(js, psi2):
    """Project the system onto `psi2`; return the pointer and the success probability."""
    psi2 = ket(psi2)
    if psi2.size != js.system_dim:
        raise ValueError("post-selected state has the wrong dimension")
    amps = psi2.conj() @ js.amps
    prob = float(np.sum(np.abs(amps) ** 2) * js.spacing)
    if prob < 1e-300:
        raise PostSelectionImpossible(f"success probability {prob:.3e}")
    return ptr.PointerWave(js.grid, amps / np.sqrt(prob), js.representation), prob


def mixture_terms(tsv, A):
    """Coefficients <psi2|a_i><a_i|psi1> and centers a_i of the post-selected pointer."""
    spectrum = eig_hermitian(A)
    c = (spectrum.eigenvectors.conj().T @ tsv.bra).conj() * spectrum.coefficients(tsv.ket)
    return list(zip(c, spectrum.eigenvalues))


@dataclass(frozen=True)
class WeakLimitReport:
    exact_mean: float
    weak_prediction: float
    weak_value: complex
    residual_moments: np.ndarray  # (A^n)_w - (A_w)^n for n = 2, 3, 4

    @property
    def error(self):
        return abs(self.exact_mean - self.weak_prediction)


def weak_limit_report(tsv, A, delta):
    """Compare the exact post-selected pointer mean with Re(A_w)."""
    aw = weak_value(A, tsv)
    moments = weak_moments(A, tsv, 4)
    residual = np.array([moments[n - 1] - aw**n for n in (2, 3, 4)])
    exact = ptr.mixture_mean(mixture_terms(tsv, A), delta)
    return WeakLimitReport(exact, aw.real, aw, residual)


class PrePostExperiment:
    """Single shots of pre-selection, impulsive coupling, readout, post-selection.

    The reading is sampled from the full pointer marginal first; the
    post-selection then succeeds with the probability of finding `psi2` in the
    system state conditioned on that reading. The joint law matches
    post-selecting first and reading the post-selected pointer.
    """

    def __init__(self, tsv, A, delta, grid=None):
        spectrum = eig_hermitian(A)
        if grid is None:
            grid = ptr.default_grid(delta, spectrum.eigenvalues)
        self.tsv = tsv
        self.joint = entangle(tsv.ket, A, ptr.gaussian_pointer(grid, delta))
        self.readout = ideal_sampler(self.joint)
        self.success_prob = post_select(self.joint, tsv.bra)[1]

    def _shot(self, gen):
        record = self.readout.from_uniform(gen.random())
        ok = gen.random() < abs(np.vdot(self.tsv.bra, record.collapsed_system)) ** 2
        return record.reading, bool(ok)

    def trial(self, stream):
        """One pre-selection/measurement/post-selection attempt: (reading, success)."""
        return self._shot(stream.generator())

    def accepted_reading(self, stream, max_tries=10_000_000):
        """Repeat attempts on one shot's stream until post-selection succeeds."""
        gen = stream.generator()
        for _ in range(max_tries):
            reading, ok = self._shot(gen)
            if ok:
                return reading
        raise EmptyInput("post-selection did not succeed within the try budget")


def weak_ensemble_estimate(psi, A, delta, n, rng, workers=1):
    """Ensemble estimate of <A> from weak pre-selected-only measurements.

    Each reading is drawn from the exact pointer marginal: eigenvalue a_i with
    probability |alpha_i|^2, then a Gaussian of variance delta^2 / 2 around it.

    Returns
    -------
    estimate, std_error : float
    """
    spectrum = eig_hermitian(A)
    if delta < 5 * np.max(np.abs(spectrum.eigenvalues)):
        raise WeaknessViolated(f"delta={delta} is below 5 * max|a_i|")
    probs = np.abs(spectrum.coefficients(ket(psi))) ** 2
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    vals = spectrum.eigenvalues
    sigma = delta / np.sqrt(2)
    seed = rng.seed if isinstance(rng, RngStream) else int(rng)

    def shot(stream):
        gen = stream.generator()
        i = min(int(np.searchsorted(cdf, gen.random(), side="right")), vals.size - 1)
        return vals[i] + sigma * gen.standard_normal()

    report, _ = run_ensemble(shot, n, seed, workers=workers)
    return report.mean, report.std_error
