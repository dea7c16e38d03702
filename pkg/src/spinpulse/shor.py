"""The 41-pulse factoring program for N = 4 on the four-spin chain.

Three stages act on the x-register (logical bits 3, 2) and y-register
(bits 1, 0), starting from the ground state |0000>:

  1. superposition -- three pi/2-pulses put the x-register into a uniform
     superposition: |0>, |4>, |8>, |12> with weight 1/4 each;
  2. modular map -- six pi-pulses send |x, 00> to |x, 3^x mod 4>;
  3. transform -- a Hadamard-type rotation on x-bit 1, a conditional
     phase block, and a rotation on x-bit 0 (32 pulses total), reading
     the x-register out in bit-reversed order.

Phase bookkeeping is exact: every pi/2-pulse contributes its i factor,
the first rotation stage carries phase pi, and the conditional block is
assembled from paired pi-pulses imparting conjugate phases, so the ideal
output is exactly uniform over |1>, |3>, |5>, |7>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import ChainConfig, build_hamiltonian
from .compiler import ideal_unitary, make_pulse
from .dynamics import QuantumState, evolve_rwa, probabilities, run_sequence
from .errors import DecompositionMismatch
from .pulses import PulseSequence
from .spectrum import Spectrum, TransitionTable, assign_labels, diagonalize, transition_table

HALF_PI = math.pi / 2
PI = math.pi

TARGET_LABELS = (1, 3, 5, 7)
STAGE_VERIFY_TOL = 1e-9

#: (pair, theta, phi) rotation programs per stage
SUPERPOSITION_ROTATIONS = (
    ((0, 4), HALF_PI, 0.0),
    ((0, 8), HALF_PI, 0.0),
    ((4, 12), HALF_PI, 0.0),
)


#: stage-2 x-block processing order; disjoint blocks commute in the gate
#: picture, and this order keeps populated levels away from the populated
#: near-collisions of the reference parameter set (see the block comment in
#: `build_modexp`)
MODEXP_BLOCK_ORDER = (2, 3, 1, 0)


def modular_map_rotations() -> tuple:
    """Six pi-pulses realizing |x, 00> -> |x, 3^x mod 4>.

    For y = 1 a single y-bit-0 flip; for y = 3 the route flips y-bit 1
    first, then y-bit 0.  Both hop orderings reach the same endpoint with
    the same accumulated phase (two i factors); this route and the block
    order avoid the weakly coupled and collision-prone lines of the
    reference parameter set.
    """
    rots = []
    for x in MODEXP_BLOCK_ORDER:
        base = 4 * x
        y = pow(3, x, 4)
        if y == 1:
            rots.append(((base, base + 1), PI, 0.0))
        elif y == 3:
            rots.append(((base, base + 2), PI, 0.0))
            rots.append(((base + 2, base + 3), PI, 0.0))
        else:  # pragma: no cover - 3^x mod 4 is always 1 or 3
            raise AssertionError(y)
    return tuple(rots)


#: conditional-phase block: three conjugate-phase pulse pairs assemble the
#: phase i on every x = 11 level; five echo pairs (second pulse phase pi)
#: are exact identities padding the block to its sixteen-pulse budget,
#: placed on levels idle at this point of the program
CONDITIONAL_PHASE_OPS = (
    ((12, 13), 0.0, HALF_PI),
    ((12, 14), 0.0, 0.0),
    ((14, 15), 0.0, HALF_PI),
    ((2, 6), 0.0, PI),
    ((5, 13), 0.0, PI),
    ((6, 14), 0.0, PI),
    ((4, 12), 0.0, PI),
    ((8, 12), 0.0, PI),
)


def transform_rotations() -> tuple:
    """32 rotations of the output transform stage, in application order."""
    rots = []
    for n in range(8):  # rotation on x-bit 1 (level bit 3), phase pi
        rots.append(((n, n + 8), HALF_PI, PI))
    for pair, phi_a, phi_b in CONDITIONAL_PHASE_OPS:
        rots.append((pair, PI, phi_a))
        rots.append((pair, PI, phi_b))
    for n in (0, 1, 2, 3, 8, 9, 10, 11):  # rotation on x-bit 0 (level bit 2)
        rots.append(((n, n + 4), HALF_PI, 0.0))
    return tuple(rots)


@dataclass(frozen=True)
class ShorProgram:
    """Compiled pulse schedule plus per-stage ideal unitaries."""

    stage1: PulseSequence
    stage2: PulseSequence
    stage3: PulseSequence
    ideal_unitaries: tuple[np.ndarray, np.ndarray, np.ndarray]

    @property
    def full_sequence(self) -> PulseSequence:
        return self.stage1 + self.stage2 + self.stage3

    @property
    def pulse_counts(self) -> tuple[int, int, int]:
        return (len(self.stage1), len(self.stage2), len(self.stage3))


def _compile_rotations(spectrum, table, rots, rabi) -> PulseSequence:
    return PulseSequence.contiguous(
        [make_pulse(spectrum, table, pair, theta, phi, rabi) for pair, theta, phi in rots]
    )


def _verify_stage(
    spectrum: Spectrum, seq: PulseSequence, ideal: np.ndarray, name: str
) -> None:
    """Check the rwa-engine action of a stage against its ideal unitary."""
    d = spectrum.dimension
    realized = np.empty((d, d), dtype=complex)
    for col in range(d):
        state = QuantumState.basis_state(d, col)
        for pulse in seq:
            state = evolve_rwa(state, spectrum, pulse, pulse.target)
        realized[:, col] = state.amplitudes
    dev = float(np.max(np.abs(realized - ideal)))
    if dev > STAGE_VERIFY_TOL:
        raise DecompositionMismatch(f"{name}: realized action deviates by {dev:.3e}")


def build_superposition(
    spectrum: Spectrum, table: TransitionTable, rabi: float
) -> PulseSequence:
    """Stage 1: three pi/2-pulses on |0>-|4>, |0>-|8>, |4>-|12>."""
    return _compile_rotations(spectrum, table, SUPERPOSITION_ROTATIONS, rabi)


def build_modexp(spectrum: Spectrum, table: TransitionTable, rabi: float) -> PulseSequence:
    """Stage 2: six pi-pulses writing y(x) = 3^x mod 4 into the y-register."""
    return _compile_rotations(spectrum, table, modular_map_rotations(), rabi)


def build_dft(spectrum: Spectrum, table: TransitionTable, rabi: float) -> PulseSequence:
    """Stage 3: the 32-pulse output transform on the x-register.

    Raises DecompositionMismatch if the resonant action of the compiled
    pulses deviates from the stage's ideal unitary.
    """
    rots = transform_rotations()
    seq = _compile_rotations(spectrum, table, rots, rabi)
    _verify_stage(spectrum, seq, ideal_unitary(spectrum.dimension, rots), "transform stage")
    return seq


def build_program(
    spectrum: Spectrum, table: TransitionTable, rabi: float, *, verify: bool = True
) -> ShorProgram:
    d = spectrum.dimension
    rots1 = SUPERPOSITION_ROTATIONS
    rots2 = modular_map_rotations()
    rots3 = transform_rotations()
    program = ShorProgram(
        stage1=_compile_rotations(spectrum, table, rots1, rabi),
        stage2=_compile_rotations(spectrum, table, rots2, rabi),
        stage3=_compile_rotations(spectrum, table, rots3, rabi),
        ideal_unitaries=(
            ideal_unitary(d, rots1),
            ideal_unitary(d, rots2),
            ideal_unitary(d, rots3),
        ),
    )
    if verify:
        for seq, ideal, name in zip(
            (program.stage1, program.stage2, program.stage3),
            program.ideal_unitaries,
            ("superposition stage", "modular stage", "transform stage"),
        ):
            _verify_stage(spectrum, seq, ideal, name)
    return program


def ideal_distribution(dimension: int = 16) -> dict[int, float]:
    return {n: (0.25 if n in TARGET_LABELS else 0.0) for n in range(dimension)}


@dataclass(frozen=True)
class ShorResult:
    probabilities: dict[int, float]
    max_target_deviation: float
    max_unwanted: float
    sum_unwanted: float
    max_norm_drift: float
    program: ShorProgram

    def summary_lines(self) -> list[str]:
        return [
            f"max_target_deviation={self.max_target_deviation!r}",
            f"max_unwanted={self.max_unwanted!r}",
            f"sum_unwanted={self.sum_unwanted!r}",
            f"max_norm_drift={self.max_norm_drift!r}",
        ]


def default_config() -> ChainConfig:
    """Reference parameter set of the four-spin factoring run."""
    return ChainConfig.linear_gradient(
        length=4, coupling=30.0, omega0=100.0, delta_omega=30.0, rabi=0.5
    )


def run_shor(
    cfg: ChainConfig | None = None,
    engine: str = "exact",
    *,
    verify: bool = True,
    oracle_step: float | None = None,
    rtol: float | None = None,
    atol: float | None = None,
) -> ShorResult:
    """Build and execute the 41-pulse program from the ground state.

    The spectrum is labeled with the per-sector assignment rule: at the
    reference parameters the chain is strongly mixed and several
    eigenstates share their dominant product component, so the plain
    argmax labeling is ambiguous there by construction.
    """
    cfg = cfg or default_config()
    if cfg.length != 4:
        raise ValueError("the factoring program runs on the four-spin chain")
    spectrum = assign_labels(diagonalize(build_hamiltonian(cfg)), cfg, on_ambiguous="assign")
    table = transition_table(spectrum, cfg)
    program = build_program(spectrum, table, cfg.rabi, verify=verify)
    state = QuantumState.basis_state(spectrum.dimension, 0)
    kwargs: dict = {"oracle_step": oracle_step}
    if rtol is not None:
        kwargs["rtol"] = rtol
    if atol is not None:
        kwargs["atol"] = atol
    result = run_sequence(state, spectrum, cfg, program.full_sequence, engine, **kwargs)
    probs = probabilities(result.state)
    max_dev = max(abs(probs[t] - 0.25) for t in TARGET_LABELS)
    unwanted = {n: p for n, p in probs.items() if n not in TARGET_LABELS}
    return ShorResult(
        probabilities=probs,
        max_target_deviation=max_dev,
        max_unwanted=max(unwanted.values()),
        sum_unwanted=sum(unwanted.values()),
        max_norm_drift=result.max_norm_drift,
        program=program,
    )
