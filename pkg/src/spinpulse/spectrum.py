"""Exact diagonalization, logical labeling and transition structure."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import linear_sum_assignment

from .chain import ChainConfig, HermitianOperator
from .errors import DiagonalizationError, LabelAmbiguous
from .operators import collective_lowering, mz_diagonal

RESIDUAL_RTOL = 1e-10
ORTHO_TOL = 1e-10
M_ROUND_TOL = 1e-6
COUPLING_CUTOFF = 1e-12
OVERLAP_TIE_TOL = 1e-9


@dataclass(frozen=True)
class Spectrum:
    """Full eigendecomposition of the chain Hamiltonian.

    `energies` ascend; `eigenvectors` holds the matching eigenvectors as
    columns over the product basis (real orthogonal, sign-fixed so the
    largest component of each column is positive).  `m_values[n]` is the
    conserved total z-projection of eigenstate n.  `labels` is None until
    `assign_labels` succeeds; afterwards `labels[n]` is the logical binary
    index of eigenstate n and `overlap_quality[n]` its squared overlap
    with the matching product state.
    """

    energies: np.ndarray = field(repr=False)
    eigenvectors: np.ndarray = field(repr=False)
    m_values: np.ndarray = field(repr=False)
    labels: np.ndarray | None = field(default=None, repr=False)
    overlap_quality: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        for name in ("energies", "eigenvectors", "m_values", "labels", "overlap_quality"):
            arr = getattr(self, name)
            if arr is not None:
                arr.setflags(write=False)

    @property
    def dimension(self) -> int:
        return len(self.energies)

    @property
    def length(self) -> int:
        return int(round(np.log2(self.dimension)))

    @property
    def is_labeled(self) -> bool:
        return self.labels is not None

    def eigenindex_of_label(self, label: int) -> int:
        if self.labels is None:
            raise LabelAmbiguous("spectrum has no logical labels")
        return int(self._index_of_label[label])

    def energy_of_label(self, label: int) -> float:
        return float(self.energies[self.eigenindex_of_label(label)])

    # --- cached label-ordered views used by the dynamics engines ---

    @property
    def _index_of_label(self) -> np.ndarray:
        if self.labels is None:
            raise LabelAmbiguous("spectrum has no logical labels")
        cache = self.__dict__.get("_iol")
        if cache is None:
            cache = np.empty(self.dimension, dtype=int)
            cache[self.labels] = np.arange(self.dimension)
            object.__setattr__(self, "_iol", cache)
        return cache

    @property
    def label_energies(self) -> np.ndarray:
        """Energies indexed by logical label."""
        return self.energies[self._index_of_label]

    @property
    def label_vectors(self) -> np.ndarray:
        """Eigenvector columns indexed by logical label."""
        return self.eigenvectors[:, self._index_of_label]

    @property
    def label_m(self) -> np.ndarray:
        return self.m_values[self._index_of_label]

    @property
    def lowering_matrix(self) -> np.ndarray:
        """<f| sum_k I^-_k |i> in the label-ordered eigenbasis."""
        cache = self.__dict__.get("_wm")
        if cache is None:
            v = self.label_vectors
            cache = v.T @ collective_lowering(self.length) @ v
            cache[np.abs(cache) < COUPLING_CUTOFF] = 0.0
            cache.setflags(write=False)
            object.__setattr__(self, "_wm", cache)
        return cache


def diagonalize(op: HermitianOperator) -> Spectrum:
    """Dense Hermitian eigendecomposition with residual verification.

    The chain Hamiltonian is real symmetric, so eigenvectors are computed
    real; each column's sign is fixed so its largest-magnitude component
    is positive, making the decomposition deterministic.
    """
    m = op.matrix
    real_input = np.max(np.abs(m.imag)) == 0
    work = m.real if real_input else m
    energies, vecs = np.linalg.eigh(work)
    d = op.dimension
    lead = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[lead, np.arange(d)].real)
    signs[signs == 0] = 1.0
    vecs = np.ascontiguousarray(vecs * signs)

    scale = max(np.max(np.abs(energies)), 1.0)
    resid = np.max(np.abs(work @ vecs - vecs * energies))
    if resid > RESIDUAL_RTOL * scale:
        raise DiagonalizationError(f"eigensolver residual {resid:.3e} exceeds tolerance")
    gram = vecs.conj().T @ vecs - np.eye(d)
    if np.max(np.abs(gram)) > ORTHO_TOL:
        raise DiagonalizationError("eigenvectors are not orthonormal to tolerance")

    length = int(round(np.log2(d)))
    mz = mz_diagonal(length)
    m_exp = (np.abs(vecs) ** 2 * mz[:, None]).sum(axis=0)
    m_rounded = np.round(2 * m_exp) / 2
    if np.max(np.abs(m_exp - m_rounded)) > M_ROUND_TOL:
        raise DiagonalizationError(
            "eigenstate z-projection is not half-integer; "
            "H does not commute with I^z_tot as required"
        )
    return Spectrum(energies=energies, eigenvectors=vecs, m_values=m_rounded)


def assign_labels(
    spectrum: Spectrum, cfg: ChainConfig, *, on_ambiguous: str = "raise"
) -> Spectrum:
    """Attach logical binary labels to eigenstates by product-state overlap.

    Label bit k records spin k (0 = up), so the all-up ground state is
    label 0 and label strings read spin L-1 ... spin 0.  Each eigenstate
    takes the label of the product state it overlaps most, restricted to
    its own z-projection sector.

    on_ambiguous:
        "raise"  -- strict: LabelAmbiguous when any best overlap is <= 0.5
                    or ties the runner-up within 1e-9 (the weak-mixing
                    labeling regime is violated).
        "assign" -- fall back to the optimal one-to-one assignment within
                    each sector (maximizing total squared overlap).  Keeps
                    labels bijective in strongly mixed spectra where the
                    plain argmax rule collides; overlap_quality records
                    the possibly small assigned overlaps.
    """
    if on_ambiguous not in ("raise", "assign"):
        raise ValueError("on_ambiguous must be 'raise' or 'assign'")
    d = spectrum.dimension
    length = spectrum.length
    mz = mz_diagonal(length)
    vecs = spectrum.eigenvectors
    labels = np.full(d, -1, dtype=int)
    quality = np.zeros(d)
    ambiguous: list[str] = []

    for m in np.unique(spectrum.m_values):
        eig_idx = np.where(spectrum.m_values == m)[0]
        prod_idx = np.where(mz == m)[0]
        ov = np.abs(vecs[np.ix_(prod_idx, eig_idx)]) ** 2  # rows products, cols eigstates
        order = np.argsort(ov, axis=0)
        best = ov[order[-1], np.arange(len(eig_idx))]
        second = ov[order[-2], np.arange(len(eig_idx))] if len(prod_idx) > 1 else np.zeros_like(best)
        argbest = prod_idx[order[-1]]
        for j, n in enumerate(eig_idx):
            if best[j] <= 0.5:
                ambiguous.append(f"eigenstate {n}: best overlap {best[j]:.4f} <= 0.5")
            elif best[j] - second[j] <= OVERLAP_TIE_TOL:
                ambiguous.append(f"eigenstate {n}: overlap tie at {best[j]:.4f}")
        if not ambiguous:
            labels[eig_idx] = argbest
            quality[eig_idx] = best

    if ambiguous:
        if on_ambiguous == "raise":
            raise LabelAmbiguous("; ".join(ambiguous[:4]))
        for m in np.unique(spectrum.m_values):
            eig_idx = np.where(spectrum.m_values == m)[0]
            prod_idx = np.where(mz == m)[0]
            ov = np.abs(vecs[np.ix_(prod_idx, eig_idx)]) ** 2
            rows, cols = linear_sum_assignment(-ov.T)  # rows: eigstates, cols: products
            labels[eig_idx[rows]] = prod_idx[cols]
            quality[eig_idx[rows]] = ov.T[rows, cols]

    if sorted(labels.tolist()) != list(range(d)):
        raise LabelAmbiguous("label map is not a bijection")
    return replace(spectrum, labels=labels, overlap_quality=quality)


@dataclass(frozen=True)
class TwoSpinAnalytic:
    """Closed-form two-spin eigensystem.

    alpha1 >= alpha2 >= 0 (for delta_omega >= 0) are the mixing
    coefficients of the two m=0 eigenstates; energies come from the exact
    2x2 block eigenvalues J/2 -+ sqrt(J^2 + delta_omega^2/4).
    """

    alpha1: float
    alpha2: float
    energies: tuple[float, float, float, float]
    delta_omega: float

    @property
    def rabi_factors(self) -> tuple[float, float]:
        """(alpha1 + alpha2, alpha1 - alpha2): strong / weak coupling factors."""
        return (self.alpha1 + self.alpha2, self.alpha1 - self.alpha2)


def two_spin_analytic(coupling: float, omega0: float, omega1: float) -> TwoSpinAnalytic:
    """Exact two-spin eigensystem from the 2x2 m=0 block.

    Label 1 (spin 0 flipped) is the lower m=0 state with coupling factor
    alpha1 + alpha2; label 2 (spin 1 flipped) the upper with alpha1 - alpha2.
    """
    j = float(coupling)
    dw = float(omega1 - omega0)
    r = np.hypot(j, dw / 2)
    e0 = -j / 2 - (omega0 + omega1) / 2
    e3 = -j / 2 + (omega0 + omega1) / 2
    e1 = j / 2 - r
    e2 = j / 2 + r
    norm = np.hypot(j, r + dw / 2)
    alpha1 = (r + dw / 2) / norm
    alpha2 = j / norm
    return TwoSpinAnalytic(
        alpha1=float(alpha1), alpha2=float(alpha2), energies=(e0, e1, e2, e3), delta_omega=dw
    )


@dataclass(frozen=True)
class Transition:
    from_label: int
    to_label: int
    frequency: float
    coupling: float
    effective_rabi: float


@dataclass(frozen=True)
class TransitionTable:
    """All delta-m = -1 transitions with nonzero drive coupling.

    Entries are stored in the lowering direction (to_label has one more
    down spin); the raising partner follows by symmetry.  `coupling` is
    the signed real matrix element <to| sum_k I^-_k |from>.
    """

    entries: tuple[Transition, ...]
    rabi: float

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "_by_pair", {(t.from_label, t.to_label): t for t in self.entries}
        )

    def get(self, from_label: int, to_label: int) -> Transition | None:
        """Look up a transition by pair, either orientation."""
        t = self._by_pair.get((from_label, to_label))
        if t is None:
            t = self._by_pair.get((to_label, from_label))
        return t

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


def transition_table(spectrum: Spectrum, cfg: ChainConfig) -> TransitionTable:
    """Enumerate allowed transitions of the labeled spectrum."""
    w = spectrum.lowering_matrix
    energies = spectrum.label_energies
    m = spectrum.label_m
    entries = []
    d = spectrum.dimension
    for i in range(d):
        for f in range(d):
            if m[f] == m[i] - 1 and abs(w[f, i]) > COUPLING_CUTOFF:
                entries.append(
                    Transition(
                        from_label=i,
                        to_label=f,
                        frequency=float(energies[f] - energies[i]),
                        coupling=float(w[f, i]),
                        effective_rabi=cfg.rabi * abs(float(w[f, i])),
                    )
                )
    return TransitionTable(entries=tuple(entries), rabi=cfg.rabi)


def reachable_levels(spectrum: Spectrum, start: int) -> set[int]:
    """Transitive closure of delta-m = +-1 transitions with nonzero coupling.

    `start` and the returned set are logical labels when the spectrum is
    labeled, raw eigenindices otherwise (the uniform-field case, where no
    labeling exists).
    """
    if spectrum.is_labeled:
        vecs = spectrum.label_vectors
    else:
        vecs = spectrum.eigenvectors
    w = vecs.conj().T @ collective_lowering(spectrum.length) @ vecs
    adj = (np.abs(w) > COUPLING_CUTOFF) | (np.abs(w.T) > COUPLING_CUTOFF)
    seen = {int(start)}
    frontier = [int(start)]
    while frontier:
        i = frontier.pop()
        for f in np.where(adj[:, i] | adj[i, :])[0]:
            f = int(f)
            if f not in seen:
                seen.add(f)
                frontier.append(f)
    return seen
