"""Spin-1/2 operator algebra on the product basis of an L-site chain.

Basis convention: product state index n has bit k equal to the state of
spin k (0 = up, 1 = down), with bit 0 least significant.  Printed kets
and binary labels therefore read spin L-1 ... spin 0 left to right, and
the all-up state is index 0.
"""

from __future__ import annotations

import numpy as np

# single-spin operators in the (up, down) basis
IZ1 = np.array([[0.5, 0.0], [0.0, -0.5]])
IM1 = np.array([[0.0, 0.0], [1.0, 0.0]])  # lowering: I^-|up> = |down>
IP1 = IM1.T.copy()
IX1 = 0.5 * (IP1 + IM1)
IY1 = np.array([[0.0, -0.5], [0.5, 0.0]])  # I^y / i, kept real: I^y = 1j * IY1_REAL
ID1 = np.eye(2)


def local_op(op: np.ndarray, site: int, length: int) -> np.ndarray:
    """Embed a single-spin operator at `site` into the 2^length product space."""
    ops = [ID1] * length
    ops[length - 1 - site] = op  # kron order: spin L-1 is the leftmost factor
    out = ops[0]
    for o in ops[1:]:
        out = np.kron(out, o)
    return out


def popcounts(length: int) -> np.ndarray:
    """Number of down spins per product index."""
    n = np.arange(2**length)
    return np.array([bin(int(v)).count("1") for v in n])


def mz_diagonal(length: int) -> np.ndarray:
    """Diagonal of the total z-projection operator over product states."""
    return length / 2.0 - popcounts(length)


def collective_lowering(length: int) -> np.ndarray:
    """Sum of single-spin lowering operators, sum_k I^-_k (real matrix)."""
    d = 2**length
    out = np.zeros((d, d))
    for k in range(length):
        out += local_op(IM1, k, length)
    return out


def total_spin_squared(length: int) -> np.ndarray:
    """I^2_tot = (sum_k I_k)^2 as a dense real matrix."""
    d = 2**length
    sx = np.zeros((d, d))
    sy = np.zeros((d, d))  # imaginary part factored out: I^y_tot = 1j * sy
    sz = np.zeros((d, d))
    for k in range(length):
        sx += local_op(IX1, k, length)
        sy += local_op(IY1, k, length)
        sz += local_op(IZ1, k, length)
    # (1j*sy)@(1j*sy) = -sy@sy
    return sx @ sx - sy @ sy + sz @ sz


def commutator_norm(a: np.ndarray, b: np.ndarray) -> float:
    """Frobenius norm of [a, b]."""
    return float(np.linalg.norm(a @ b - b @ a))
