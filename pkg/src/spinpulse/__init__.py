"""Pulse-level simulator of a driven Heisenberg spin-chain quantum processor.

The chain's logic levels are eigenstates of the always-on Heisenberg
Hamiltonian in a non-uniform field; gates are resonant RF pulses between
them.  Modules: `chain`/`spectrum` build and diagonalize the static
problem, `pulses`/`dynamics` evolve states under pulse schedules with
three engines (resonant rotations, full driven integration, lab-frame
oracle), `compiler` turns gate intents into schedules, `shor` packages
the 41-pulse factoring demonstration, and `cli` reproduces the reference
datasets.
"""

from .chain import ChainConfig, HermitianOperator, build_hamiltonian
from .compiler import (
    GateIntent,
    TwoPiKSolution,
    cnot_error_sweep,
    compile_cnot,
    compile_gates,
    compile_u1,
    ideal_unitary,
    make_pulse,
    parse_gate_list,
    rotation_matrix,
    two_pi_k_rabi,
)
from .dynamics import (
    QuantumState,
    SequenceResult,
    evolve_exact,
    evolve_oracle,
    evolve_rwa,
    probabilities,
    run_sequence,
)
from .errors import (
    ConfigError,
    DecompositionMismatch,
    DegenerateTransition,
    DiagonalizationError,
    DimensionOverflow,
    LabelAmbiguous,
    NoSolution,
    NotResonant,
    SpinPulseError,
    StepTooLarge,
    ToleranceNotMet,
    UnknownTransition,
)
from .pulses import Pulse, PulseSequence, format_sequence, parse_sequence
from .shor import (
    ShorProgram,
    ShorResult,
    build_dft,
    build_modexp,
    build_program,
    build_superposition,
    run_shor,
)
from .spectrum import (
    Spectrum,
    Transition,
    TransitionTable,
    TwoSpinAnalytic,
    assign_labels,
    diagonalize,
    reachable_levels,
    transition_table,
    two_spin_analytic,
)

__version__ = "0.1.0"
