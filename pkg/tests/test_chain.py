"""ChainConfig validation and Hamiltonian construction oracles."""

import numpy as np
import pytest

from spinpulse import ChainConfig, DimensionOverflow, HermitianOperator, build_hamiltonian


def test_config_validation():
    with pytest.raises(ValueError):
        ChainConfig(1, 1.0, (100.0,), 0.5)
    with pytest.raises(ValueError):
        ChainConfig(2, -1.0, (100.0, 150.0), 0.5)
    with pytest.raises(ValueError):
        ChainConfig(2, 1.0, (100.0, 150.0), 0.0)
    with pytest.raises(ValueError):
        ChainConfig(2, 1.0, (100.0, float("inf")), 0.5)
    with pytest.raises(ValueError):
        ChainConfig(3, 1.0, (100.0, 150.0), 0.5)  # wrong larmor length


def test_non_monotone_field_warns():
    with pytest.warns(UserWarning, match="monotone"):
        ChainConfig(3, 1.0, (100.0, 150.0, 120.0), 0.5)


def test_dimension_cap():
    cfg = ChainConfig.linear_gradient(13, 1.0, 100.0, 10.0, 0.5)
    with pytest.raises(DimensionOverflow):
        build_hamiltonian(cfg)
    # explicit override admits larger chains
    assert build_hamiltonian(ChainConfig.linear_gradient(4, 1, 10, 1, 1), max_length=4)


def test_hermiticity_enforced():
    bad = np.array([[0.0, 1.0], [0.5, 0.0]])
    with pytest.raises(ValueError, match="Hermitian"):
        HermitianOperator(bad)


def test_all_up_diagonal_entry_two_spin():
    # entry for the all-up state: -J/2 - (omega0 + omega1)/2
    cfg = ChainConfig(2, 1.0, (100.0, 150.0), 0.5)
    h = build_hamiltonian(cfg).real_part
    assert h[0, 0] == pytest.approx(-125.5, abs=1e-12)


def test_zero_coupling_zero_field_gives_zero_operator():
    cfg = ChainConfig(2, 0.0, (0.0, 0.0), 0.5)
    h = build_hamiltonian(cfg).real_part
    assert np.max(np.abs(h)) == 0.0


def _kron_oracle(coupling, larmor):
    """Independent construction: explicit Pauli/2 matrices, spin 0 placed as
    the last kron factor, accumulated in a different loop structure."""
    sx = np.array([[0, 1], [1, 0]]) / 2
    sy = np.array([[0, -1j], [1j, 0]]) / 2
    sz = np.array([[1, 0], [0, -1]]) / 2
    L = len(larmor)

    def embed(op, k):
        m = np.array([[1.0]])
        for pos in range(L):  # prepend factors so spin L-1 ends up leftmost
            m = np.kron(op if pos == k else np.eye(2), m)
        return m

    h = np.zeros((2**L, 2**L), dtype=complex)
    for k, w in enumerate(larmor):
        h = h - w * embed(sz, k)
    for k in range(L - 1):
        for op in (sx, sy, sz):
            h = h - 2 * coupling * embed(op, k) @ embed(op, k + 1)
    return h


def test_hamiltonian_matches_kron_oracle():
    cfg = ChainConfig(3, 1.0, (1.0, 2.0, 3.0), 0.5)
    h = build_hamiltonian(cfg).matrix
    oracle = _kron_oracle(1.0, (1.0, 2.0, 3.0))
    assert np.max(np.abs(h - oracle)) <= 1e-14


def test_hamiltonian_matches_kron_oracle_four_spins():
    larmor = (100.0, 130.0, 160.0, 190.0)
    cfg = ChainConfig(4, 30.0, larmor, 0.5)
    h = build_hamiltonian(cfg).matrix
    oracle = _kron_oracle(30.0, larmor)
    assert np.max(np.abs(h - oracle)) <= 1e-12 * np.max(np.abs(oracle))
