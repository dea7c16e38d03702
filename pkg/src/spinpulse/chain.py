"""Chain configuration and static Hamiltonian construction."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionOverflow
from .operators import IX1, IY1, IZ1, local_op

#: Default cap on chain length; 2^12 = 4096 is the largest dense dimension
#: the simulator will build without an explicit override.
MAX_LENGTH = 12

HERMITICITY_RTOL = 1e-12


@dataclass(frozen=True)
class ChainConfig:
    """Physical parameters of the driven spin chain.

    All frequencies are angular and share one unit system; `coupling`
    is conventionally that unit.  `larmor[k]` is the precession
    frequency of spin k.
    """

    length: int
    coupling: float
    larmor: tuple[float, ...]
    rabi: float

    def __post_init__(self) -> None:
        if self.length < 2:
            raise ValueError("chain needs at least two spins")
        if len(self.larmor) != self.length:
            raise ValueError("larmor list length must equal chain length")
        vals = (self.coupling, self.rabi, *self.larmor)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("all frequencies must be finite")
        # J = 0 (uncoupled chain) is admitted as a degenerate but valid case
        if self.coupling < 0:
            raise ValueError("coupling J must be non-negative")
        if self.rabi <= 0:
            raise ValueError("rabi amplitude must be positive")
        object.__setattr__(self, "larmor", tuple(float(w) for w in self.larmor))
        diffs = np.diff(self.larmor)
        if len(diffs) and not (np.all(diffs > 0) or np.all(diffs < 0)):
            warnings.warn(
                "larmor frequencies are not strictly monotone; "
                "universal level access is not guaranteed",
                stacklevel=2,
            )

    @classmethod
    def linear_gradient(
        cls, length: int, coupling: float, omega0: float, delta_omega: float, rabi: float
    ) -> "ChainConfig":
        """Chain with larmor[k] = omega0 + k * delta_omega."""
        return cls(
            length=length,
            coupling=coupling,
            larmor=tuple(omega0 + k * delta_omega for k in range(length)),
            rabi=rabi,
        )

    @property
    def dimension(self) -> int:
        return 2**self.length

    @property
    def delta_omega(self) -> float:
        """First-neighbor larmor increment (two-spin: omega_1 - omega_0)."""
        return self.larmor[1] - self.larmor[0]

    def is_uniform(self, tol: float = 0.0) -> bool:
        return bool(np.ptp(self.larmor) <= tol)


@dataclass(frozen=True)
class HermitianOperator:
    """Dense Hermitian matrix on the 2^L product basis."""

    matrix: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        scale = np.max(np.abs(m)) or 1.0
        dev = np.max(np.abs(m - m.conj().T))
        if dev > HERMITICITY_RTOL * scale:
            raise ValueError(f"matrix is not Hermitian: max deviation {dev:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def real_part(self) -> np.ndarray:
        """Real view when the imaginary part vanishes (true for the static H)."""
        return self.matrix.real


def build_hamiltonian(cfg: ChainConfig, *, max_length: int = MAX_LENGTH) -> HermitianOperator:
    """Static chain Hamiltonian (hbar = 1).

    H = - sum_k larmor[k] * I^z_k  -  2 J sum_k I_k . I_{k+1}

    on the open chain, dense over the 2^L product basis.
    """
    if cfg.length > max_length:
        raise DimensionOverflow(
            f"length {cfg.length} exceeds cap {max_length} (2^L = {2**cfg.length})"
        )
    L = cfg.length
    d = cfg.dimension
    h = np.zeros((d, d))
    for k in range(L):
        h -= cfg.larmor[k] * local_op(IZ1, k, L)
    for k in range(L - 1):
        xx = local_op(IX1, k, L) @ local_op(IX1, k + 1, L)
        yy = -local_op(IY1, k, L) @ local_op(IY1, k + 1, L)  # (i sy)(i sy) = -sy sy
        zz = local_op(IZ1, k, L) @ local_op(IZ1, k + 1, L)
        h -= 2.0 * cfg.coupling * (xx + yy + zz)
    return HermitianOperator(h)
