import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weakvalues.errors import DegenerateSpectrum, InvalidSpin, NotHermitian, OverlapVanishes
from weakvalues.hilbert import (DOWN_X, DOWN_Y, DOWN_Z, IDENTITY2, PAULI_X, PAULI_Y, PAULI_Z,
                                UP_X, UP_Y, UP_Z, TwoStateVector, axis_top_state,
                                eig_biorthogonal, eig_hermitian, expectation, is_hermitian,
                                ket, spin_operators, tensor_product, weak_moments, weak_value)


def random_state(rng, d):
    return ket(rng.normal(size=d) + 1j * rng.normal(size=d))


def random_hermitian(rng, d):
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (m + m.conj().T) / 2


def theta_pair(theta):
    return TwoStateVector(ket=[np.cos(theta), np.sin(theta)], bra=[np.cos(theta), -np.sin(theta)])


# ---------------------------------------------------------------- weak values

def test_weak_value_sigma_z_aav_oracle():
    # <up_y| = (1, -i)/sqrt2, |up_x> = (1, 1)/sqrt2, sigma_z|up_x> = (1, -1)/sqrt2
    numerator = (1 * 1 + (-1j) * (-1)) / 2
    denominator = (1 * 1 + (-1j) * 1) / 2
    expected = numerator / denominator
    assert expected == pytest.approx(1j)
    assert weak_value(PAULI_Z, TwoStateVector(UP_X, UP_Y)) == pytest.approx(expected, abs=1e-14)


def test_weak_value_reduces_to_expectation():
    rng = np.random.default_rng(3)
    psi, A = random_state(rng, 4), random_hermitian(rng, 4)
    wv = weak_value(A, TwoStateVector(psi, psi))
    assert abs(wv.imag) < 1e-12
    assert wv.real == pytest.approx(expectation(A, psi), abs=1e-12)


@pytest.mark.parametrize("N", [1, 2, 5, 10])
def test_large_spin_weak_values(N):
    tsv = TwoStateVector(axis_top_state([1, 0, 0], N), axis_top_state([0, 1, 0], N))
    got = [weak_value(s, tsv) for s in spin_operators(N)]
    np.testing.assert_allclose(got, [N, N, 1j * N], atol=1e-9)


def test_theta_family_closed_form():
    theta = 0.75
    c, s = np.cos(theta), np.sin(theta)
    # hand expansion: <bra|sigma_z|ket> = c^2 + s^2, <bra|ket> = c^2 - s^2
    oracle = (c * c + s * s) / (c * c - s * s)
    assert oracle == pytest.approx(14.137, abs=1e-3)
    assert weak_value(PAULI_Z, theta_pair(theta)).real == pytest.approx(oracle, rel=1e-12)


@given(st.floats(0.01, np.pi / 4 - 0.01) | st.floats(np.pi / 4 + 0.01, np.pi / 2 - 0.01))
def test_theta_family_is_anomalous(theta):
    assert 0 < abs(np.cos(2 * theta)) < 1
    assert abs(weak_value(PAULI_Z, theta_pair(theta))) > 1


def test_weak_value_orthogonal_states_rejected():
    with pytest.raises(OverlapVanishes):
        TwoStateVector(UP_Z, DOWN_Z)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.complex_numbers(max_magnitude=5), st.complex_numbers(max_magnitude=5))
def test_weak_value_linearity(seed, alpha, beta):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    B = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    tsv = TwoStateVector(random_state(rng, 4), random_state(rng, 4))
    if abs(tsv.overlap) < 1e-3:
        return
    lhs = weak_value(alpha * A + beta * B, tsv)
    rhs = alpha * weak_value(A, tsv) + beta * weak_value(B, tsv)
    assert abs(lhs - rhs) < 1e-10 * max(1.0, abs(lhs))


def test_weak_moments():
    tsv = TwoStateVector(UP_X, UP_Y)
    m = weak_moments(PAULI_Z, tsv, 4)
    assert m[0] == pytest.approx(1j)
    assert m[1] == pytest.approx(1)
    assert m[1] - m[0] ** 2 == pytest.approx(2)
    rng = np.random.default_rng(1)
    A = random_hermitian(rng, 3)
    spectrum = eig_hermitian(A)
    eig = TwoStateVector(spectrum.eigenvectors[:, 2], random_state(rng, 3))
    np.testing.assert_allclose(weak_moments(A, eig, 5), spectrum.eigenvalues[2] ** np.arange(1, 6), rtol=1e-10)
    np.testing.assert_allclose(weak_moments(PAULI_Z @ PAULI_Z, theta_pair(0.3), 3), 1, atol=1e-12)


# ---------------------------------------------------------------- expectation

def test_expectation_values():
    assert expectation(PAULI_Z, UP_X) == pytest.approx(0, abs=1e-15)
    assert expectation(PAULI_Z, UP_Z) == 1
    # ground state of sigma_x + sigma_z by hand: eigenvalue -sqrt2, vector (1 - sqrt2, 1)
    g = ket([1 - np.sqrt(2), 1])
    oracle = (abs(g[0]) ** 2 - abs(g[1]) ** 2)
    assert oracle == pytest.approx(-1 / np.sqrt(2))
    ground = eig_hermitian(PAULI_X + PAULI_Z).eigenvectors[:, 0]
    assert expectation(PAULI_Z, ground) == pytest.approx(oracle, abs=1e-12)
    with pytest.raises(NotHermitian):
        expectation(PAULI_X + 1j * PAULI_Z, UP_X)


# ---------------------------------------------------------------- decompositions

def test_eig_hermitian_pauli():
    z = eig_hermitian(PAULI_Z)
    np.testing.assert_allclose(z.eigenvalues, [-1, 1])
    np.testing.assert_allclose(z.eigenvectors, np.column_stack([DOWN_Z, UP_Z]), atol=1e-15)
    x = eig_hermitian(PAULI_X)
    np.testing.assert_allclose(x.eigenvalues, [-1, 1])
    np.testing.assert_allclose(x.eigenvectors, np.column_stack([DOWN_X, UP_X]), atol=1e-15)


def test_eig_hermitian_random_reconstruction():
    rng = np.random.default_rng(11)
    A = random_hermitian(rng, 6)
    spectrum = eig_hermitian(A)
    assert np.max(np.abs(spectrum.reconstruct() - A)) < 1e-10
    gram = spectrum.eigenvectors.conj().T @ spectrum.eigenvectors
    assert np.max(np.abs(gram - np.eye(6))) < 1e-10
    assert np.all(np.diff(spectrum.eigenvalues) >= 0)
    for v in spectrum.eigenvectors.T:
        k = np.argmax(np.abs(v))
        assert abs(v[k].imag) < 1e-15 and v[k].real > 0


def test_eig_hermitian_rejects_nonhermitian():
    with pytest.raises(NotHermitian):
        eig_hermitian(PAULI_X + 1j * PAULI_Y)


def test_effective_protection_hamiltonian_pairs():
    H = -(PAULI_X + PAULI_Y + 1j * PAULI_Z)
    bs = eig_biorthogonal(H)
    np.testing.assert_allclose(bs.frequencies, [-1, 1], atol=1e-12)
    np.testing.assert_allclose(bs.kets, np.column_stack([UP_X, DOWN_Y]), atol=1e-12)
    np.testing.assert_allclose(bs.bras, np.column_stack([UP_Y, DOWN_X]), atol=1e-12)


def test_biorthogonal_hermitian_limit():
    rng = np.random.default_rng(5)
    A = random_hermitian(rng, 4)
    bs = eig_biorthogonal(A)
    np.testing.assert_allclose(bs.bras, bs.kets, atol=1e-10)
    assert np.max(np.abs(bs.frequencies.imag)) < 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_biorthogonal_invariants(seed):
    rng = np.random.default_rng(seed)
    H = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    bs = eig_biorthogonal(H)
    ov = bs.overlaps()
    assert np.max(np.abs(ov - np.diag(np.diag(ov)))) < 1e-10
    assert np.max(np.abs(bs.reconstruct() - H)) < 1e-10
    for i in range(4):
        np.testing.assert_allclose(H @ bs.kets[:, i], bs.frequencies[i] * bs.kets[:, i], atol=1e-10)
        np.testing.assert_allclose(bs.bras[:, i].conj() @ H, bs.frequencies[i] * bs.bras[:, i].conj(), atol=1e-10)


def test_biorthogonal_degenerate_rejected():
    with pytest.raises(DegenerateSpectrum):
        eig_biorthogonal(IDENTITY2)
    with pytest.raises(DegenerateSpectrum):
        eig_biorthogonal(np.array([[0, 1], [0, 0]]))  # Jordan block


# ---------------------------------------------------------------- spins

def test_spin_half_matches_pauli():
    sx, sy, sz = spin_operators(0.5)
    np.testing.assert_allclose(sz, np.diag([0.5, -0.5]))
    for s, p in zip((sx, sy, sz), (PAULI_X, PAULI_Y, PAULI_Z)):
        np.testing.assert_allclose(2 * s, p, atol=1e-15)


@pytest.mark.parametrize("j", [0, 0.5, 1, 1.5, 2, 3.5, 10])
def test_spin_algebra(j):
    sx, sy, sz = spin_operators(j)
    d = int(2 * j + 1)
    assert sx.shape == (d, d)
    assert np.max(np.abs(sx @ sy - sy @ sx - 1j * sz)) < 1e-12
    casimir = sx @ sx + sy @ sy + sz @ sz
    assert np.max(np.abs(casimir - j * (j + 1) * np.eye(d))) < 1e-12
    assert all(is_hermitian(s) for s in (sx, sy, sz))


@pytest.mark.parametrize("j", [-1, 0.3, 1.25])
def test_invalid_spin(j):
    with pytest.raises(InvalidSpin):
        spin_operators(j)


def test_axis_top_states():
    np.testing.assert_allclose(axis_top_state([1, 0, 0], 0.5), UP_X, atol=1e-12)
    np.testing.assert_allclose(axis_top_state([0, 1, 0], 0.5), UP_Y, atol=1e-12)
    for N in (1, 4, 10):
        v = axis_top_state([1, 0, 0], N)
        sx = spin_operators(N)[0]
        assert np.linalg.norm(sx @ v - N * v) < 1e-10
    with pytest.raises(InvalidSpin):
        axis_top_state([0, 0, 1], 0.7)


# ---------------------------------------------------------------- tensor products

def test_tensor_product_ordering():
    v = tensor_product(UP_Z, UP_Z)
    np.testing.assert_array_equal(v, [1, 0, 0, 0])
    np.testing.assert_array_equal(tensor_product(DOWN_Z, UP_Z), [0, 0, 1, 0])
    np.testing.assert_array_equal(tensor_product(IDENTITY2, PAULI_Z), np.diag([1, -1, 1, -1]))
    with pytest.raises(ValueError):
        tensor_product(UP_Z, PAULI_Z)


@given(st.integers(0, 2**32 - 1))
def test_tensor_product_norms_multiply(seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=3) + 1j * rng.normal(size=3)
    b = rng.normal(size=5) + 1j * rng.normal(size=5)
    assert np.linalg.norm(tensor_product(a, b)) == pytest.approx(np.linalg.norm(a) * np.linalg.norm(b), rel=1e-12)
