"""Translate logical gate intents into resonant pulse schedules.

Gates address transitions of the labeled spectrum: a one-qubit rotation
on logical qubit q becomes one pulse per configuration of the remaining
qubits (2^(L-1) pulses), the modified controlled-NOT a single pi-pulse on
the 10 <-> 11 transition.  Emitted pulse phases absorb the sign of the
coupling matrix element so the realized rotation carries the nominal
phase.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTransition, NoSolution, UnknownTransition
from .pulses import Pulse, PulseSequence
from .spectrum import Spectrum, TransitionTable

#: resonance collision guard: another allowed line within this fraction of
#: the effective rabi frequency makes the pulse non-selective
DEGENERACY_GUARD = 1e-3


@dataclass(frozen=True)
class GateIntent:
    """A logical gate request parsed from the gate-list format."""

    kind: str  # "u" | "cnot"
    qubit: int | None = None
    theta: float | None = None
    phi: float = 0.0
    control: int | None = None
    target: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("u", "cnot"):
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.kind == "u":
            if self.qubit is None or self.theta is None:
                raise ValueError("rotation gate needs qubit and theta")
            if not 0.0 < self.theta <= 2 * math.pi:
                raise ValueError("theta must lie in (0, 2*pi]")
        if self.kind == "cnot" and (self.control is None or self.target is None):
            raise ValueError("cnot gate needs control and target")


def make_pulse(
    spectrum: Spectrum,
    table: TransitionTable,
    transition: tuple[int, int],
    theta: float,
    phi: float,
    rabi: float,
) -> Pulse:
    """Resonant pulse rotating the given transition by angle theta.

    Raises UnknownTransition when the pair is not in the table and
    DegenerateTransition when another allowed line falls within
    DEGENERACY_GUARD * effective rabi of the pulse frequency.
    """
    entry = table.get(*transition)
    if entry is None:
        raise UnknownTransition(f"transition {transition} is not allowed")
    nu = abs(entry.frequency)
    omega_eff = rabi * abs(entry.coupling)
    for other in table:
        if (other.from_label, other.to_label) == (entry.from_label, entry.to_label):
            continue
        if abs(abs(other.frequency) - nu) < DEGENERACY_GUARD * omega_eff:
            raise DegenerateTransition(
                f"transition {other.from_label}->{other.to_label} at "
                f"{other.frequency:.6g} collides with {transition} at {nu:.6g}"
            )
    return Pulse(
        frequency=nu,
        phase=phi + cmath.phase(complex(entry.coupling)),
        rabi=rabi,
        duration=theta / omega_eff,
        target=(entry.from_label, entry.to_label),
    )


def compile_u1(
    spectrum: Spectrum,
    table: TransitionTable,
    qubit: int,
    theta: float,
    phi: float,
    rabi: float,
) -> PulseSequence:
    """One-qubit rotation on logical qubit `qubit` (bit index, 0 = last).

    Emits one pulse per spectator configuration; the pulses address
    disjoint level pairs, so their order is irrelevant under resonant
    dynamics.
    """
    length = spectrum.length
    if not 0 <= qubit < length:
        raise ValueError(f"qubit index {qubit} out of range for {length} spins")
    bit = 1 << qubit
    pulses = []
    for n in range(spectrum.dimension):
        if n & bit:
            continue
        pulses.append(make_pulse(spectrum, table, (n, n | bit), theta, phi, rabi))
    return PulseSequence.contiguous(pulses)


def compile_cnot(spectrum: Spectrum, table: TransitionTable, rabi: float) -> PulseSequence:
    """Modified controlled-NOT: one pi-pulse on the 10 <-> 11 transition.

    Defined on the two-qubit system (control = qubit 1, target = qubit 0);
    swaps the upper two levels with phase i on each.
    """
    if spectrum.length != 2:
        raise ValueError("the modified controlled-NOT is defined on the two-spin system")
    pulse = make_pulse(spectrum, table, (2, 3), math.pi, 0.0, rabi)
    return PulseSequence.contiguous([pulse])


@dataclass(frozen=True)
class TwoPiKSolution:
    """Rabi amplitude nulling the near-resonant channel of the CNOT pulse.

    During the pi-pulse of duration pi/Omega1 the detuned strong channel
    completes k full rotations: sqrt(Omega0^2 + Delta^2) * tau = 2 pi k,
    returning its populations to their initial values.
    """

    k: int
    rabi: float
    detuning: float
    residual: float


def two_pi_k_rabi(spectrum: Spectrum, table: TransitionTable, k: int) -> TwoPiKSolution:
    """Solve the 2*pi*k condition for the two-spin CNOT pulse.

    With Omega0 = (a1+a2) W, Omega1 = (a1-a2) W and Delta the difference
    between the near-resonant and resonant transition frequencies, the
    condition fixes W = Delta / sqrt(4 k^2 (a1-a2)^2 - (a1+a2)^2).
    """
    if spectrum.length != 2:
        raise ValueError("the 2*pi*k construction applies to the two-spin system")
    if k < 1:
        raise ValueError("k must be a positive integer")
    e = spectrum.label_energies
    delta = (e[1] - e[0]) - (e[3] - e[2])
    w = spectrum.lowering_matrix
    strong = abs(float(w[1, 0]))  # alpha1 + alpha2
    weak = abs(float(w[2, 0]))  # alpha1 - alpha2
    disc = 4 * k * k * weak * weak - strong * strong
    if disc <= 0:
        raise NoSolution(
            f"k={k} is too small: 4 k^2 (a1-a2)^2 = {4*k*k*weak*weak:.6g} "
            f"<= (a1+a2)^2 = {strong*strong:.6g}"
        )
    rabi = abs(delta) / math.sqrt(disc)
    tau = math.pi / (rabi * weak)
    residual = math.hypot(rabi * strong, delta) * tau - 2 * math.pi * k
    return TwoPiKSolution(k=k, rabi=rabi, detuning=delta, residual=residual)


def rotation_matrix(
    dimension: int, pair: tuple[int, int], theta: float, phi: float
) -> np.ndarray:
    """Two-level rotation a resonant pulse applies in the gate picture.

    On the addressed pair (i, f):
        C_f <- C_f cos(theta/2) + i e^{-i phi} C_i sin(theta/2)
        C_i <- C_i cos(theta/2) + i e^{+i phi} C_f sin(theta/2)
    """
    i, f = pair
    u = np.eye(dimension, dtype=complex)
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    u[f, f] = u[i, i] = c
    u[f, i] = 1j * cmath.exp(-1j * phi) * s
    u[i, f] = 1j * cmath.exp(+1j * phi) * s
    return u


def ideal_unitary(dimension: int, rotations) -> np.ndarray:
    """Compose nominal (pair, theta, phi) rotations in application order."""
    u = np.eye(dimension, dtype=complex)
    for pair, theta, phi in rotations:
        u = rotation_matrix(dimension, pair, theta, phi) @ u
    return u


def cnot_benchmark_state() -> np.ndarray:
    """Benchmark input (|00> + |10>)/sqrt(2) for gate-error sweeps."""
    amps = np.zeros(4, dtype=complex)
    amps[0] = amps[2] = 1 / math.sqrt(2)
    return amps


def cnot_error_sweep(
    cfg_template,
    rabi_grid,
    delta_omega_list,
    *,
    engine_kwargs: dict | None = None,
):
    """Exact-engine CNOT gate errors over (delta_omega, rabi) grids.

    For each field splitting a fresh two-spin spectrum is built; for each
    rabi amplitude the compiled pi-pulse is applied to the benchmark
    superposition (C_00 = C_10 = 1/sqrt(2)) with the exact engine.
    Returns rows (delta_omega, rabi, p00, p01, p10, p11), ordered by the
    input grids.
    """
    from .chain import ChainConfig, build_hamiltonian
    from .dynamics import QuantumState, probabilities, run_sequence
    from .spectrum import assign_labels, diagonalize, transition_table

    engine_kwargs = engine_kwargs or {}
    rows = []
    for dw in delta_omega_list:
        cfg = ChainConfig.linear_gradient(
            2, cfg_template.coupling, cfg_template.larmor[0], float(dw), cfg_template.rabi
        )
        spec = assign_labels(diagonalize(build_hamiltonian(cfg)), cfg)
        table = transition_table(spec, cfg)
        for rabi in rabi_grid:
            seq = compile_cnot(spec, table, float(rabi))
            state = QuantumState(amplitudes=cnot_benchmark_state(), time=0.0)
            result = run_sequence(state, spec, cfg, seq, "exact", **engine_kwargs)
            p = probabilities(result.state)
            rows.append((float(dw), float(rabi), p[0], p[1], p[2], p[3]))
    return rows


def parse_gate_list(text: str) -> list[GateIntent]:
    """Parse the gate-list text format: `u q=<i> theta=<rad> phi=<rad>`
    or `cnot c=<i> t=<j>`, one gate per line, `#` comments."""
    intents = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        kv = {}
        for tok in fields[1:]:
            key, _, val = tok.partition("=")
            kv[key] = val
        try:
            if fields[0] == "u":
                intents.append(
                    GateIntent(
                        kind="u",
                        qubit=int(kv["q"]),
                        theta=float(kv["theta"]),
                        phi=float(kv.get("phi", "0")),
                    )
                )
            elif fields[0] == "cnot":
                intents.append(
                    GateIntent(kind="cnot", control=int(kv["c"]), target=int(kv["t"]))
                )
            else:
                raise ValueError(f"unknown gate {fields[0]!r}")
        except (KeyError, ValueError) as exc:
            raise ValueError(f"gate list line {lineno}: {exc}") from exc
    return intents


def compile_gates(
    spectrum: Spectrum,
    table: TransitionTable,
    intents: list[GateIntent],
    rabi: float,
) -> PulseSequence:
    """Compile a gate list into one contiguous schedule."""
    seq = PulseSequence(pulses=())
    for intent in intents:
        if intent.kind == "u":
            part = compile_u1(spectrum, table, intent.qubit, intent.theta, intent.phi, rabi)
        else:
            if (intent.control, intent.target) != (1, 0):
                raise ValueError(
                    "only the modified controlled-NOT with control=1, target=0 "
                    "is available"
                )
            part = compile_cnot(spectrum, table, rabi)
        seq = seq + part
    return seq
