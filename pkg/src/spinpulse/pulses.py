"""Rectangular RF pulses, schedules, and their text wire format.

One pulse per line:

    pulse nu=<float> phi=<float> omega=<float> tau=<float> [target=<i>-<f>] [t0=<float>]

Floats are written as shortest round-trip decimals, `#` starts a comment.
`t0` is only emitted when a pulse does not start where the previous one
ended, so contiguous schedules round-trip without it.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

TIME_TOL = 1e-12


@dataclass(frozen=True)
class Pulse:
    """One rectangular pulse: frequency, phase, rabi amplitude, duration."""

    frequency: float
    phase: float
    rabi: float
    duration: float
    start_time: float = 0.0
    target: tuple[int, int] | None = None

    def __post_init__(self) -> None:
        # zero duration / zero amplitude are admitted as identity pulses
        if self.duration < 0:
            raise ValueError("pulse duration must be non-negative")
        if self.rabi < 0:
            raise ValueError("pulse rabi amplitude must be non-negative")
        if self.frequency <= 0:
            raise ValueError("pulse frequency must be positive")

    @property
    def end_time(self) -> float:
        return self.start_time + self.duration


@dataclass(frozen=True)
class PulseSequence:
    """Ordered pulse schedule on a global clock."""

    pulses: tuple[Pulse, ...]

    def __post_init__(self) -> None:
        for prev, cur in zip(self.pulses, self.pulses[1:]):
            if cur.start_time < prev.end_time - TIME_TOL:
                raise ValueError("pulses overlap on the global clock")

    @classmethod
    def contiguous(cls, pulses, start: float = 0.0) -> "PulseSequence":
        """Schedule pulses back to back starting at `start`."""
        out = []
        t = start
        for p in pulses:
            out.append(replace(p, start_time=t))
            t += p.duration
        return cls(pulses=tuple(out))

    @property
    def total_duration(self) -> float:
        if not self.pulses:
            return 0.0
        return self.pulses[-1].end_time - self.pulses[0].start_time

    def __len__(self) -> int:
        return len(self.pulses)

    def __iter__(self):
        return iter(self.pulses)

    def __add__(self, other: "PulseSequence") -> "PulseSequence":
        """Concatenate, rebasing `other` to start at this sequence's end."""
        if not self.pulses:
            return other
        shifted = []
        t = self.pulses[-1].end_time
        offset = t - (other.pulses[0].start_time if other.pulses else 0.0)
        for p in other.pulses:
            shifted.append(replace(p, start_time=p.start_time + offset))
        return PulseSequence(pulses=self.pulses + tuple(shifted))


def format_sequence(seq: PulseSequence) -> str:
    lines = []
    clock = seq.pulses[0].start_time if seq.pulses else 0.0
    for p in seq.pulses:
        parts = [
            "pulse",
            f"nu={p.frequency!r}",
            f"phi={p.phase!r}",
            f"omega={p.rabi!r}",
            f"tau={p.duration!r}",
        ]
        if p.target is not None:
            parts.append(f"target={p.target[0]}-{p.target[1]}")
        if abs(p.start_time - clock) > TIME_TOL:
            parts.append(f"t0={p.start_time!r}")
        clock = p.end_time
        lines.append(" ".join(parts))
    return "\n".join(lines) + ("\n" if lines else "")


def parse_sequence(text: str) -> PulseSequence:
    pulses: list[Pulse] = []
    clock = 0.0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if fields[0] != "pulse":
            raise ValueError(f"line {lineno}: expected 'pulse', got {fields[0]!r}")
        kv: dict[str, str] = {}
        for tok in fields[1:]:
            if "=" not in tok:
                raise ValueError(f"line {lineno}: malformed field {tok!r}")
            key, val = tok.split("=", 1)
            kv[key] = val
        try:
            nu = float(kv.pop("nu"))
            phi = float(kv.pop("phi"))
            omega = float(kv.pop("omega"))
            tau = float(kv.pop("tau"))
        except KeyError as exc:
            raise ValueError(f"line {lineno}: missing field {exc}") from exc
        target = None
        if "target" in kv:
            a, _, b = kv.pop("target").partition("-")
            target = (int(a), int(b))
        start = float(kv.pop("t0")) if "t0" in kv else clock
        if kv:
            raise ValueError(f"line {lineno}: unknown fields {sorted(kv)}")
        p = Pulse(
            frequency=nu, phase=phi, rabi=omega, duration=tau,
            start_time=start, target=target,
        )
        clock = p.end_time
        pulses.append(p)
    return PulseSequence(pulses=tuple(pulses))
