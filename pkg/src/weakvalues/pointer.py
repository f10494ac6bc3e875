"""
One-dimensional pointer wavefunctions on a periodic grid.

Amplitudes are continuum-normalized (``sum |amp|^2 * dq == 1``). The momentum
representation uses

    phi(P) = (2 pi)^-1/2  integral phi(Q) exp(-i P Q) dQ

discretized so that the transform is exactly unitary between the position
lattice ``Q_k = -L/2 + k dq`` and the centered momentum lattice with spacing
``2 pi / L``. With this sign, multiplying by ``exp(-i P a)`` moves the pointer
by ``+a``.
"""
import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import GridResolution, NormalizationUnderflow, ShiftTooLarge

__all__ = [
    "Grid", "PointerWave", "GaussianMixtureWave", "Moments",
    "default_grid", "gaussian_pointer", "change_representation", "shift_pointer",
    "density_and_moments", "mixture_wave", "mixture_mean", "mixture_density",
    "to_position", "to_momentum", "write_wave_csv",
]

POSITION = "position"
MOMENTUM = "momentum"


@dataclass(frozen=True)
class Grid:
    points: int = 1024
    extent: float = 40.0

    def __post_init__(self):
        m = int(self.points)
        if m < 64 or m & (m - 1):
            raise GridResolution(f"grid points must be a power of two >= 64, got {self.points}")
        if not self.extent > 0:
            raise GridResolution("grid extent must be positive")
        object.__setattr__(self, "points", m)
        object.__setattr__(self, "extent", float(self.extent))

    @property
    def dq(self):
        return self.extent / self.points

    @property
    def dp(self):
        return 2 * np.pi / self.extent

    @property
    def q(self):
        return -self.extent / 2 + self.dq * np.arange(self.points)

    @property
    def p(self):
        return self.dp * (np.arange(self.points) - self.points // 2)


def default_grid(delta, centers=(0.0,), points=1024):
    """Grid wide enough for the given pointer width and shifts."""
    reach = max((abs(c) for c in centers), default=0.0)
    return Grid(points, max(20 * delta, 8 * (reach + delta)))


# Unitary DFT between the two lattices. The phases compensate for the
# lattices starting at -L/2 and -P_max rather than at zero.
def _forward(grid, amps, axis=-1):
    q0, p = grid.q[0], grid.p
    shape = [1] * np.ndim(amps)
    shape[axis] = grid.points
    centered = np.fft.fftshift(np.fft.fft(amps, axis=axis), axes=axis)
    phase = np.exp(-1j * p * q0) * grid.dq / np.sqrt(2 * np.pi)
    return centered * phase.reshape(shape)


def _inverse(grid, amps, axis=-1):
    q0, p = grid.q[0], grid.p
    shape = [1] * np.ndim(amps)
    shape[axis] = grid.points
    undone = amps * (np.exp(1j * p * q0) * np.sqrt(2 * np.pi) / grid.dq).reshape(shape)
    return np.fft.ifft(np.fft.ifftshift(undone, axes=axis), axis=axis)


@dataclass(frozen=True)
class PointerWave:
    grid: Grid
    amps: np.ndarray
    representation: str = POSITION

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex)
        if amps.shape != (self.grid.points,):
            raise ValueError("amplitude array does not match the grid")
        if self.representation not in (POSITION, MOMENTUM):
            raise ValueError(f"unknown representation {self.representation!r}")
        object.__setattr__(self, "amps", amps)

    @property
    def nodes(self):
        return self.grid.q if self.representation == POSITION else self.grid.p

    @property
    def spacing(self):
        return self.grid.dq if self.representation == POSITION else self.grid.dp

    def norm2(self):
        return float(np.sum(np.abs(self.amps) ** 2) * self.spacing)

    def normalized(self):
        n2 = self.norm2()
        if n2 <= 0:
            raise NormalizationUnderflow("pointer wave has zero norm")
        return PointerWave(self.grid, self.amps / np.sqrt(n2), self.representation)


@dataclass(frozen=True)
class GaussianMixtureWave:
    """Analytic sum_i c_i exp(-(Q - a_i)^2 / 2 delta^2), unnormalized."""

    width: float
    coeffs: np.ndarray = field(default_factory=lambda: np.ones(1, complex))
    centers: np.ndarray = field(default_factory=lambda: np.zeros(1))

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        a = np.atleast_1d(np.asarray(self.centers, dtype=float))
        if c.size == 0 or c.shape != a.shape:
            raise ValueError("need matching, nonempty coefficient and center arrays")
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "centers", a)

    @classmethod
    def from_terms(cls, terms, delta):
        terms = list(terms)
        return cls(delta, [t[0] for t in terms], [t[1] for t in terms])

    def __call__(self, q):
        q = np.asarray(q, dtype=float)[..., None]
        return np.sum(self.coeffs * np.exp(-((q - self.centers) ** 2) / (2 * self.width**2)), axis=-1)


def change_representation(w, target):
    if target not in (POSITION, MOMENTUM):
        raise ValueError(f"unknown representation {target!r}")
    if target == w.representation:
        return w
    amps = _forward(w.grid, w.amps) if target == MOMENTUM else _inverse(w.grid, w.amps)
    return PointerWave(w.grid, amps, target)


def to_position(w):
    return change_representation(w, POSITION)


def to_momentum(w):
    return change_representation(w, MOMENTUM)


def _check_width(grid, delta):
    if not (delta > 4 * grid.dq and delta < grid.extent / 10):
        raise GridResolution(
            f"pointer width {delta} needs 4*dq={4 * grid.dq:.4g} < width < L/10={grid.extent / 10:.4g}"
        )


def gaussian_pointer(grid, delta):
    """Ready state of the pointer, density proportional to exp(-Q^2/delta^2)."""
    _check_width(grid, delta)
    amps = np.exp(-grid.q**2 / (2 * delta**2))
    return PointerWave(grid, amps).normalized()


def shift_pointer(w, a):
    """Translate the pointer by `a` via the momentum-space phase exp(-i P a)."""
    if abs(a) >= w.grid.extent / 4:
        raise ShiftTooLarge(f"shift {a} exceeds L/4 = {w.grid.extent / 4}")
    if a == 0:
        return w
    mom = to_momentum(w)
    moved = PointerWave(w.grid, mom.amps * np.exp(-1j * w.grid.p * a), MOMENTUM)
    return change_representation(moved, w.representation)


@dataclass(frozen=True)
class Moments:
    density: np.ndarray
    mean_q: float
    var_q: float
    mean_p: float
    var_p: float


def _mean_var(x, dens, dx):
    total = np.sum(dens) * dx
    mean = np.sum(x * dens) * dx / total
    var = np.sum((x - mean) ** 2 * dens) * dx / total
    return float(mean), float(var)


def density_and_moments(w):
    """Position density plus first two moments in both representations.

    On a periodic lattice with negligible tails the trapezoidal rule reduces
    to a plain sum over nodes.
    """
    pos, mom = to_position(w), to_momentum(w)
    dens_q = np.abs(pos.amps) ** 2
    dens_p = np.abs(mom.amps) ** 2
    mean_q, var_q = _mean_var(w.grid.q, dens_q, w.grid.dq)
    mean_p, var_p = _mean_var(w.grid.p, dens_p, w.grid.dp)
    return Moments(dens_q, mean_q, var_q, mean_p, var_p)


def mixture_wave(terms, delta, grid):
    """Grid sampling of a superposition of shifted Gaussians.

    `terms` is a sequence of ``(coefficient, center)`` pairs.
    """
    mix = terms if isinstance(terms, GaussianMixtureWave) else GaussianMixtureWave.from_terms(terms, delta)
    _check_width(grid, mix.width)
    if np.any(np.abs(mix.centers) > grid.extent / 4):
        raise GridResolution("mixture centers must lie within [-L/4, L/4]")
    wave = PointerWave(grid, mix(grid.q))
    if wave.norm2() <= 1e-300:
        raise NormalizationUnderflow("mixture has vanishing norm on the grid")
    return wave.normalized()


def _pair_integrals(mix):
    # integral of g_i g_j dQ up to the common sqrt(pi) * delta factor
    c, a, d = mix.coeffs, mix.centers, mix.width
    diff = a[:, None] - a[None, :]
    weight = np.real(np.conj(c)[:, None] * c[None, :]) * np.exp(-(diff**2) / (4 * d**2))
    mid = (a[:, None] + a[None, :]) / 2
    return weight, mid


def mixture_density(terms, delta, q):
    mix = terms if isinstance(terms, GaussianMixtureWave) else GaussianMixtureWave.from_terms(terms, delta)
    weight, _ = _pair_integrals(mix)
    norm = np.sqrt(np.pi) * mix.width * weight.sum()
    return np.abs(mix(q)) ** 2 / norm


def mixture_mean(terms, delta):
    """Exact mean pointer position of a normalized Gaussian mixture.

    Uses the closed form of the pairwise overlap integrals,
    g_i g_j = exp(-(a_i - a_j)^2 / 4 delta^2) exp(-(Q - (a_i + a_j)/2)^2 / delta^2).
    """
    mix = terms if isinstance(terms, GaussianMixtureWave) else GaussianMixtureWave.from_terms(terms, delta)
    weight, mid = _pair_integrals(mix)
    norm = weight.sum()
    if np.sqrt(np.pi) * mix.width * norm <= 1e-300:
        raise NormalizationUnderflow("mixture density integrates to zero")
    return float((weight * mid).sum() / norm)


def write_wave_csv(w, stream):
    """Write columns Q (or P), density, re_amp, im_amp."""
    writer = csv.writer(stream, lineterminator="\n")
    label = "Q" if w.representation == POSITION else "P"
    writer.writerow([label, "density", "re_amp", "im_amp"])
    for x, amp in zip(w.nodes, w.amps):
        writer.writerow([format(x, ".17g"), format(abs(amp) ** 2, ".17g"),
                         format(amp.real, ".17g"), format(amp.imag, ".17g")])
