import numpy as np
import pytest

from spinpulse import ChainConfig, assign_labels, build_hamiltonian, diagonalize, transition_table

# reference two-spin system of the gate-error studies: J=1, omega0=100, dw=50
TWO_SPIN = ChainConfig.linear_gradient(2, 1.0, 100.0, 50.0, 0.5)


@pytest.fixture(scope="session")
def two_spin_cfg():
    return TWO_SPIN


@pytest.fixture(scope="session")
def two_spin_spectrum():
    return assign_labels(diagonalize(build_hamiltonian(TWO_SPIN)), TWO_SPIN)


@pytest.fixture(scope="session")
def two_spin_table(two_spin_spectrum):
    return transition_table(two_spin_spectrum, TWO_SPIN)


@pytest.fixture()
def rng():
    return np.random.default_rng(20260808)


def labeled_chain(length, coupling, omega0, delta_omega, rabi, *, assign="raise"):
    cfg = ChainConfig.linear_gradient(length, coupling, omega0, delta_omega, rabi)
    spec = assign_labels(diagonalize(build_hamiltonian(cfg)), cfg, on_ambiguous=assign)
    return cfg, spec
