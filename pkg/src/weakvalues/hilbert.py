"""
Finite-dimensional Hilbert-space toolkit.

States are 1-D complex numpy arrays of unit Euclidean norm and operators are
square complex numpy arrays; both are plain ``ndarray`` objects so they mix
freely with the rest of numpy. The structured results (two-state vectors,
spectral and bi-orthogonal decompositions) are small frozen dataclasses.

Conventions
-----------
* hbar = 1, everything dimensionless.
* Eigenvalues are ordered ascending by real part, ties broken by the
  imaginary part.
* Eigenvector phase: the largest-magnitude component is real and positive
  (the first such component when several tie).
* Kronecker products put the first factor on the slow index.
"""
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.linalg

from .errors import DegenerateSpectrum, InvalidSpin, NotHermitian, OverlapVanishes

__all__ = [
    "HERMITIAN_TOL", "OVERLAP_TOL", "DEGENERACY_TOL",
    "ket", "as_operator", "is_hermitian", "fix_phase",
    "PAULI_X", "PAULI_Y", "PAULI_Z", "IDENTITY2",
    "UP_Z", "DOWN_Z", "UP_X", "DOWN_X", "UP_Y", "DOWN_Y",
    "TwoStateVector", "SpectralDecomposition", "BiorthogonalSystem",
    "weak_value", "weak_moments", "expectation",
    "eig_hermitian", "eig_biorthogonal",
    "spin_operators", "axis_top_state", "tensor_product",
]

HERMITIAN_TOL = 1e-12
OVERLAP_TOL = 1e-12
DEGENERACY_TOL = 1e-9
_PHASE_TIE = 1e-12


def fix_phase(vec):
    """Rotate the global phase so the dominant component is real positive."""
    vec = np.asarray(vec, dtype=complex)
    mags = np.abs(vec)
    k = int(np.flatnonzero(mags >= mags.max() - _PHASE_TIE)[0])
    return vec * (np.conj(vec[k]) / mags[k])


def ket(amplitudes):
    """Return `amplitudes` as a normalized complex vector."""
    vec = np.array(amplitudes, dtype=complex).reshape(-1)
    norm = np.linalg.norm(vec)
    if vec.size == 0 or norm == 0.0:
        raise ValueError("cannot normalize a zero or empty vector")
    return vec / norm


def as_operator(matrix):
    op = np.array(matrix, dtype=complex)
    if op.ndim != 2 or op.shape[0] != op.shape[1] or op.shape[0] == 0:
        raise ValueError(f"operator must be a nonempty square matrix, got shape {op.shape}")
    return op


def is_hermitian(op, tol=HERMITIAN_TOL):
    op = np.asarray(op)
    return bool(np.max(np.abs(op - op.conj().T)) < tol)


def _require_hermitian(op):
    if not is_hermitian(op):
        raise NotHermitian("operator is not hermitian")


PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY2 = np.eye(2, dtype=complex)

_S = 1 / np.sqrt(2)
UP_Z = np.array([1, 0], dtype=complex)
DOWN_Z = np.array([0, 1], dtype=complex)
UP_X = np.array([_S, _S], dtype=complex)
DOWN_X = np.array([_S, -_S], dtype=complex)
UP_Y = np.array([_S, 1j * _S], dtype=complex)
DOWN_Y = np.array([_S, -1j * _S], dtype=complex)


@dataclass(frozen=True)
class TwoStateVector:
    """A pre-selected ket together with a post-selected (backward) state.

    ``bra`` is stored as a ket; it enters every formula conjugated.
    """

    ket: np.ndarray
    bra: np.ndarray

    def __post_init__(self):
        k, b = ket(self.ket), ket(self.bra)
        if k.shape != b.shape:
            raise ValueError("ket and bra dimensions differ")
        object.__setattr__(self, "ket", k)
        object.__setattr__(self, "bra", b)
        if abs(self.overlap) <= OVERLAP_TOL:
            raise OverlapVanishes(f"|<bra|ket>| = {abs(self.overlap):.3e}")

    @property
    def dim(self):
        return self.ket.size

    @property
    def overlap(self):
        return complex(np.vdot(self.bra, self.ket))


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns

    def reconstruct(self):
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T

    def coefficients(self, psi):
        """Expansion coefficients of `psi` in the eigenbasis."""
        return self.eigenvectors.conj().T @ np.asarray(psi, dtype=complex)


@dataclass(frozen=True)
class BiorthogonalSystem:
    """Right (ket) and left (bra) eigenvectors of a diagonalizable operator.

    ``kets[:, i]`` solves ``H k = w_i k`` and ``bras[:, i]`` solves
    ``H^dagger b = conj(w_i) b``, so ``<b_i|`` is a left eigenvector. Both are
    unit vectors; ``norms[i] = <b_i|k_i>``.
    """

    frequencies: np.ndarray
    kets: np.ndarray
    bras: np.ndarray
    norms: np.ndarray

    @property
    def dim(self):
        return self.frequencies.size

    def overlaps(self):
        """Matrix of <bra_i|ket_j>."""
        return self.bras.conj().T @ self.kets

    def reconstruct(self):
        return (self.kets * (self.frequencies / self.norms)) @ self.bras.conj().T

    def expand(self, psi):
        """Coefficients alpha with psi = sum_i alpha_i kets[:, i]."""
        psi = np.asarray(psi, dtype=complex)
        return (self.bras.conj().T @ psi) / self.norms

    def pair(self, i):
        """The two-state vector <bra_i| |ket_i> attached to eigenvalue i."""
        return TwoStateVector(ket=self.kets[:, i], bra=self.bras[:, i])


def weak_value(A, tsv):
    """<bra|A|ket> / <bra|ket> for a two-state vector."""
    A = np.asarray(A, dtype=complex)
    if A.shape != (tsv.dim, tsv.dim):
        raise ValueError("operator and two-state vector dimensions differ")
    return complex(np.vdot(tsv.bra, A @ tsv.ket) / tsv.overlap)


def weak_moments(A, tsv, n_max):
    """Weak values of A, A^2, ..., A^n_max."""
    A = np.asarray(A, dtype=complex)
    if A.shape != (tsv.dim, tsv.dim):
        raise ValueError("operator and two-state vector dimensions differ")
    out = []
    vec = tsv.ket
    for _ in range(n_max):
        vec = A @ vec
        out.append(complex(np.vdot(tsv.bra, vec) / tsv.overlap))
    return np.array(out)


def expectation(A, psi):
    _require_hermitian(A)
    psi = np.asarray(psi, dtype=complex)
    return float(np.vdot(psi, np.asarray(A) @ psi).real / np.vdot(psi, psi).real)


def eig_hermitian(A):
    A = as_operator(A)
    _require_hermitian(A)
    vals, vecs = np.linalg.eigh(A)
    vecs = np.column_stack([fix_phase(v) for v in vecs.T])
    return SpectralDecomposition(vals, vecs)


def _sort_key(w):
    return np.lexsort((w.imag, w.real))


def eig_biorthogonal(H, tol=DEGENERACY_TOL):
    """Bi-orthogonal eigen-decomposition of a non-degenerate operator.

    The left eigenvectors are taken from the rows of the inverse right
    eigenvector matrix, which makes the cross overlaps vanish to rounding
    error even for strongly non-normal input.
    """
    H = as_operator(H)
    w, vr = scipy.linalg.eig(H)
    order = _sort_key(w)
    w, vr = w[order], vr[:, order]
    if w.size > 1:
        gaps = np.abs(w[:, None] - w[None, :]) + np.diag(np.full(w.size, np.inf))
        if gaps.min() <= tol:
            raise DegenerateSpectrum(f"minimum eigenvalue gap {gaps.min():.3e}")
    kets = np.column_stack([fix_phase(ket(v)) for v in vr.T])
    dual = np.linalg.inv(kets).conj().T
    bras = np.column_stack([fix_phase(ket(v)) for v in dual.T])
    norms = np.einsum("ij,ij->j", bras.conj(), kets)
    if np.min(np.abs(norms)) <= 1e-10:
        raise DegenerateSpectrum("left/right eigenvector pair is nearly orthogonal")
    return BiorthogonalSystem(w, kets, bras, norms)


def _spin_dim(j):
    twice = Fraction(j).limit_denominator(1000) * 2
    if twice.denominator != 1 or twice < 0 or abs(float(twice) - 2 * float(j)) > 1e-12:
        raise InvalidSpin(f"spin must be a nonnegative half-integer, got {j}")
    return int(twice) + 1


def spin_operators(j):
    """Spin-j matrices (S_x, S_y, S_z) in the basis m = j, j-1, ..., -j."""
    dim = _spin_dim(j)
    j = (dim - 1) / 2
    m = j - np.arange(dim)
    # <m+1|S_+|m> sits on the first superdiagonal
    plus = np.diag(np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1)), k=1).astype(complex)
    minus = plus.conj().T
    sx = (plus + minus) / 2
    sy = (plus - minus) / 2j
    sz = np.diag(m).astype(complex)
    return sx, sy, sz


def axis_top_state(axis, j):
    """Eigenvector of axis . S with the maximal eigenvalue j."""
    axis = np.asarray(axis, dtype=float)
    if axis.shape != (3,) or abs(np.linalg.norm(axis) - 1) > 1e-12:
        raise ValueError("axis must be a unit 3-vector")
    sx, sy, sz = spin_operators(j)
    proj = axis[0] * sx + axis[1] * sy + axis[2] * sz
    return eig_hermitian(proj).eigenvectors[:, -1]


def tensor_product(a, b):
    """Kronecker product of two states or two operators (a is the slow index)."""
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    if a.ndim != b.ndim:
        raise ValueError("cannot mix a state and an operator")
    return np.kron(a, b)
