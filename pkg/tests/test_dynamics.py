"""Engine behavior and cross-engine equivalences."""

import numpy as np
import pytest
from scipy.linalg import expm

import spinpulse as sp
from spinpulse import (
    NotResonant,
    Pulse,
    PulseSequence,
    QuantumState,
    UnknownTransition,
    evolve_exact,
    evolve_oracle,
    evolve_rwa,
    make_pulse,
    probabilities,
    run_sequence,
)
from spinpulse.dynamics import _oracle_fixed
from spinpulse.operators import IX1, IY1, local_op

from conftest import labeled_chain

# small fast chain for engine cross-checks: modest frequencies keep the
# integrator cheap while preserving the full transition structure
FAST = sp.ChainConfig.linear_gradient(2, 1.0, 25.0, 25.0, 0.1)


@pytest.fixture(scope="module")
def fast():
    cfg = FAST
    spec = sp.assign_labels(sp.diagonalize(sp.build_hamiltonian(cfg)), cfg)
    table = sp.transition_table(spec, cfg)
    return cfg, spec, table


class TestQuantumState:
    def test_norm_enforced(self):
        with pytest.raises(ValueError):
            QuantumState(amplitudes=np.array([1.0, 1.0], dtype=complex))

    def test_basis_state(self):
        st = QuantumState.basis_state(4, 2)
        assert probabilities(st) == {0: 0.0, 1: 0.0, 2: 1.0, 3: 0.0}

    def test_probabilities_sum_to_one(self):
        amps = np.array([1, 1j, -1, -1j], dtype=complex) / 2
        st = QuantumState(amplitudes=amps)
        assert sum(probabilities(st).values()) == pytest.approx(1.0, abs=1e-12)

    def test_superposition_probabilities(self):
        amps = np.zeros(4, dtype=complex)
        amps[0] = 1 / np.sqrt(2)
        amps[2] = 1j / np.sqrt(2)
        p = probabilities(QuantumState(amplitudes=amps))
        assert p[0] == pytest.approx(0.5)
        assert p[2] == pytest.approx(0.5)


class TestRwaEngine:
    def test_pi_pulse_swaps_with_i_phase(self, fast):
        cfg, spec, table = fast
        pulse = make_pulse(spec, table, (2, 3), np.pi, 0.0, cfg.rabi)
        out = evolve_rwa(QuantumState.basis_state(4, 2), spec, pulse, (2, 3))
        assert out.amplitudes[3] == pytest.approx(1j, abs=1e-12)
        out2 = evolve_rwa(QuantumState.basis_state(4, 3), spec, pulse, (2, 3))
        assert out2.amplitudes[2] == pytest.approx(1j, abs=1e-12)

    def test_half_pulse_builds_superposition(self, fast):
        cfg, spec, table = fast
        pulse = make_pulse(spec, table, (0, 2), np.pi / 2, 0.0, cfg.rabi)
        out = evolve_rwa(QuantumState.basis_state(4, 0), spec, pulse, (0, 2))
        assert out.amplitudes[0] == pytest.approx(1 / np.sqrt(2), abs=1e-12)
        assert out.amplitudes[2] == pytest.approx(1j / np.sqrt(2), abs=1e-12)

    def test_zero_duration_identity(self, fast):
        cfg, spec, table = fast
        base = make_pulse(spec, table, (2, 3), np.pi, 0.0, cfg.rabi)
        pulse = Pulse(
            frequency=base.frequency, phase=0.0, rabi=cfg.rabi, duration=0.0, target=(2, 3)
        )
        st = QuantumState.basis_state(4, 2)
        out = evolve_rwa(st, spec, pulse, (2, 3))
        assert np.array_equal(out.amplitudes, st.amplitudes)

    def test_not_resonant(self, fast):
        cfg, spec, table = fast
        pulse = Pulse(frequency=1.0, phase=0.0, rabi=cfg.rabi, duration=1.0)
        with pytest.raises(NotResonant):
            evolve_rwa(QuantumState.basis_state(4, 2), spec, pulse, (2, 3))

    def test_unknown_transition(self, fast):
        cfg, spec, table = fast
        pulse = Pulse(frequency=1.0, phase=0.0, rabi=cfg.rabi, duration=1.0)
        with pytest.raises(UnknownTransition):
            evolve_rwa(QuantumState.basis_state(4, 0), spec, pulse, (0, 3))

    def test_norm_exactly_preserved(self, fast, rng):
        cfg, spec, table = fast
        amps = rng.normal(size=4) + 1j * rng.normal(size=4)
        amps /= np.linalg.norm(amps)
        st = QuantumState(amplitudes=amps)
        pulse = make_pulse(spec, table, (0, 1), 1.1, 0.7, cfg.rabi)
        out = evolve_rwa(st, spec, pulse, (0, 1))
        assert out.norm_error() < 1e-12


class TestExactEngine:
    def test_zero_amplitude_pulse_is_identity(self, fast):
        cfg, spec, _ = fast
        pulse = Pulse(frequency=20.0, phase=0.0, rabi=0.0, duration=3.0)
        st = QuantumState.basis_state(4, 1)
        out = evolve_exact(st, spec, cfg, pulse)
        assert np.array_equal(out.amplitudes, st.amplitudes)
        assert out.time == pytest.approx(3.0)

    def test_matches_rwa_for_weak_drive(self, fast):
        cfg, spec, table = fast
        pulse = make_pulse(spec, table, (2, 3), np.pi, 0.0, 0.01)
        st = QuantumState.basis_state(4, 2)
        exact = evolve_exact(st, spec, cfg, pulse)
        rwa = evolve_rwa(st, spec, pulse, (2, 3))
        assert np.max(np.abs(exact.amplitudes - rwa.amplitudes)) < 1e-3

    def test_wide_splitting_swap_pulse_probabilities_near_rwa(self):
        # widely split levels, modest drive: every non-resonant channel is
        # strongly detuned and the full dynamics tracks the pure rotation
        cfg, spec = labeled_chain(2, 1.0, 100.0, 250.0, 0.1)
        table = sp.transition_table(spec, cfg)
        pulse = make_pulse(spec, table, (2, 3), np.pi, 0.0, 0.1)
        st = QuantumState.basis_state(4, 2)
        exact = evolve_exact(st, spec, cfg, pulse)
        rwa = evolve_rwa(st, spec, pulse, (2, 3))
        p_e, p_r = probabilities(exact), probabilities(rwa)
        assert max(abs(p_e[n] - p_r[n]) for n in range(4)) < 1e-3

    def test_clock_skew_rejected(self, fast):
        cfg, spec, table = fast
        pulse = make_pulse(spec, table, (2, 3), np.pi, 0.0, cfg.rabi)
        st = QuantumState.basis_state(4, 2, time=5.0)
        with pytest.raises(ValueError, match="clock"):
            evolve_exact(st, spec, cfg, pulse)

    def test_norm_drift_within_tolerance(self, fast):
        cfg, spec, table = fast
        pulse = make_pulse(spec, table, (0, 1), np.pi, 0.0, cfg.rabi)
        out = evolve_exact(QuantumState.basis_state(4, 0), spec, cfg, pulse)
        assert out.norm_error() < 1e-9


class TestOracle:
    def test_telescoped_equals_literal_slice_product(self, fast):
        """The fast oracle is algebraically the midpoint-sampled slice
        product; compare against a literal scipy.linalg.expm loop."""
        cfg, spec, table = fast
        pulse = make_pulse(spec, table, (2, 3), np.pi, 0.7, cfg.rabi)
        st = QuantumState.basis_state(4, 2)
        h = sp.build_hamiltonian(cfg).real_part
        sx = sum(local_op(IX1, k, 2) for k in range(2))
        sy = sum(local_op(IY1, k, 2) for k in range(2))
        amat = h - pulse.rabi * sx
        for n in (1, 3, 57):
            hstep = pulse.duration / n
            u = np.eye(4, dtype=complex)
            for i in range(n):
                tm = pulse.start_time + (i + 0.5) * hstep
                th = pulse.frequency * tm + pulse.phase
                v = -pulse.rabi * (np.cos(th) * sx - np.sin(th) * (1j * sy))
                u = expm(-1j * hstep * (h + v)) @ u
            vl, el = spec.label_vectors, spec.label_energies
            psi = vl @ st.amplitudes
            t1 = pulse.start_time + pulse.duration
            want = np.exp(1j * el * t1) * (vl.T @ (u @ psi))
            got = _oracle_fixed(st, spec, pulse, amat, hstep)
            assert np.linalg.norm(got.amplitudes - want) < 1e-12

    def test_agrees_with_exact_engine(self, fast):
        cfg, spec, table = fast
        pulse = make_pulse(spec, table, (2, 3), np.pi, 0.0, cfg.rabi)
        st = QuantumState.basis_state(4, 2)
        exact = evolve_exact(st, spec, cfg, pulse)
        oracle = evolve_oracle(st, cfg, spec, pulse)
        assert np.linalg.norm(exact.amplitudes - oracle.amplitudes) < 1e-8

    def test_zero_amplitude_keeps_interaction_amplitudes(self, rng):
        # small level spread keeps the mandated slice count low enough that
        # the slice-product rounding floor sits below 1e-12
        cfg, spec = labeled_chain(2, 1.0, 6.0, 6.0, 0.1)
        amps = rng.normal(size=4) + 1j * rng.normal(size=4)
        amps /= np.linalg.norm(amps)
        st = QuantumState(amplitudes=amps)
        pulse = Pulse(frequency=8.0, phase=0.0, rabi=1e-30, duration=1.0)
        out = evolve_oracle(st, cfg, spec, pulse)
        assert np.max(np.abs(out.amplitudes - st.amplitudes)) < 1e-12

    def test_step_too_large(self, fast):
        cfg, spec, table = fast
        pulse = make_pulse(spec, table, (2, 3), np.pi, 0.0, cfg.rabi)
        with pytest.raises(sp.StepTooLarge):
            evolve_oracle(QuantumState.basis_state(4, 2), cfg, spec, pulse, step=1.0)

    def test_rwa_regime_probability_agreement(self):
        # well split, weak drive: oracle probabilities match the rotation
        cfg, spec = labeled_chain(2, 1.0, 60.0, 250.0, 0.01)
        table = sp.transition_table(spec, cfg)
        pulse = make_pulse(spec, table, (2, 3), np.pi, 0.0, 0.01)
        st = QuantumState.basis_state(4, 2)
        oracle = evolve_oracle(st, cfg, spec, pulse)
        rwa = evolve_rwa(st, spec, pulse, (2, 3))
        p_o, p_r = probabilities(oracle), probabilities(rwa)
        assert max(abs(p_o[n] - p_r[n]) for n in range(4)) < 1e-4


class TestRunSequence:
    def test_empty_sequence(self, fast):
        cfg, spec, _ = fast
        st = QuantumState.basis_state(4, 0)
        res = run_sequence(st, spec, cfg, PulseSequence(pulses=()), "rwa")
        assert np.array_equal(res.state.amplitudes, st.amplitudes)
        assert res.norm_drift == ()

    def test_double_pi_restores_probabilities(self, fast):
        cfg, spec, table = fast
        pulse = make_pulse(spec, table, (2, 3), np.pi, 0.0, cfg.rabi)
        seq = PulseSequence.contiguous([pulse, pulse])
        st = QuantumState.basis_state(4, 2)
        res = run_sequence(st, spec, cfg, seq, "rwa")
        assert probabilities(res.state)[2] == pytest.approx(1.0, abs=1e-12)
        # amplitude acquires the rotation sign
        assert res.state.amplitudes[2] == pytest.approx(-1.0, abs=1e-12)

    def test_rwa_requires_annotation(self, fast):
        cfg, spec, _ = fast
        pulse = Pulse(frequency=20.0, phase=0.0, rabi=0.1, duration=1.0)
        with pytest.raises(UnknownTransition, match="annotated"):
            run_sequence(
                QuantumState.basis_state(4, 0),
                spec,
                cfg,
                PulseSequence.contiguous([pulse]),
                "rwa",
            )

    def test_gap_advances_clock_only(self, fast):
        cfg, spec, table = fast
        p1 = make_pulse(spec, table, (0, 1), np.pi, 0.0, cfg.rabi)
        p2 = make_pulse(spec, table, (0, 1), np.pi, 0.0, cfg.rabi)
        from dataclasses import replace

        p2 = replace(p2, start_time=p1.duration + 7.5)
        seq = PulseSequence(pulses=(replace(p1, start_time=0.0), p2))
        res = run_sequence(QuantumState.basis_state(4, 0), spec, cfg, seq, "rwa")
        assert res.state.time == pytest.approx(p1.duration + 7.5 + p2.duration)
        assert probabilities(res.state)[0] == pytest.approx(1.0, abs=1e-12)

    def test_engine_names_validated(self, fast):
        cfg, spec, _ = fast
        with pytest.raises(ValueError, match="unknown engine"):
            run_sequence(
                QuantumState.basis_state(4, 0),
                spec,
                cfg,
                PulseSequence(pulses=()),
                "magic",
            )


class TestTimeReversal:
    def test_rwa_exact_inverse(self, fast, rng):
        cfg, spec, table = fast
        amps = rng.normal(size=4) + 1j * rng.normal(size=4)
        amps /= np.linalg.norm(amps)
        st = QuantumState(amplitudes=amps)
        fwd = make_pulse(spec, table, (0, 1), 0.9, 0.4, cfg.rabi)
        back = make_pulse(spec, table, (0, 1), 0.9, 0.4 + np.pi, cfg.rabi)
        out = evolve_rwa(evolve_rwa(st, spec, fwd, (0, 1)), spec, back, (0, 1))
        assert np.max(np.abs(out.amplitudes - st.amplitudes)) < 1e-12

    def test_exact_engine_echo(self):
        # weak drive: the phase-flipped pulse undoes the first to the
        # engine-agreement error scale
        cfg, spec = labeled_chain(2, 5.0, 25.0, 25.0, 0.1)
        table = sp.transition_table(spec, cfg)
        fwd = make_pulse(spec, table, (2, 3), np.pi, 0.0, 0.1)
        from dataclasses import replace

        back = replace(
            make_pulse(spec, table, (2, 3), np.pi, np.pi, 0.1),
            start_time=fwd.duration,
        )
        st = QuantumState.basis_state(4, 2)
        mid = evolve_exact(st, spec, cfg, fwd)
        out = evolve_exact(mid, spec, cfg, back)
        assert np.max(np.abs(out.amplitudes - st.amplitudes)) < 0.05


class TestEngineAgreement:
    N_CASES = 12

    def test_randomized_small_instances(self, rng):
        # rabi/Delta_min <= 0.01: rwa and exact stay within 10 * ratio.
        # Generic (non-equispaced) fields avoid exactly degenerate lines,
        # for which no drive amplitude satisfies the premise.
        cases = 0
        while cases < self.N_CASES:
            length = int(rng.integers(2, 4))
            j = float(rng.uniform(2.0, 6.0))
            incs = rng.uniform(20.0, 30.0, size=length - 1)
            larmor = tuple(np.concatenate([[20.0], 20.0 + np.cumsum(incs)]))
            cfg = sp.ChainConfig(length, j, larmor, 0.1)
            spec = sp.assign_labels(
                sp.diagonalize(sp.build_hamiltonian(cfg)), cfg, on_ambiguous="assign"
            )
            table = sp.transition_table(spec, cfg)
            entries = list(table)
            entry = entries[int(rng.integers(0, len(entries)))]
            # smallest detuning of any other line from this drive
            dmin = min(
                abs(abs(o.frequency) - abs(entry.frequency))
                for o in entries
                if (o.from_label, o.to_label) != (entry.from_label, entry.to_label)
            )
            if dmin < 0.5 or abs(entry.coupling) < 0.05:
                continue  # premise needs a detuned, driveable line
            rabi = 0.01 * dmin / max(abs(entry.coupling), 1.0)
            theta = float(rng.uniform(0.3, np.pi))
            pulse = make_pulse(
                spec, table, (entry.from_label, entry.to_label), theta, 0.0, rabi
            )
            st = QuantumState.basis_state(spec.dimension, entry.from_label)
            exact = evolve_exact(st, spec, cfg, pulse)
            rwa = evolve_rwa(st, spec, pulse, (entry.from_label, entry.to_label))
            bound = 10 * rabi * max(abs(entry.coupling), 1.0) / dmin
            assert np.linalg.norm(exact.amplitudes - rwa.amplitudes) <= bound
            cases += 1


class TestMonotoneRwaConvergence:
    def test_error_decreases_down_the_rabi_ladder(self):
        cfg0, spec = labeled_chain(2, 1.0, 8.0, 16.0, 1.0)
        table = sp.transition_table(spec, cfg0)
        st = QuantumState.basis_state(4, 2)
        devs = []
        for rabi in (1.0, 0.1, 0.01):
            pulse = make_pulse(spec, table, (2, 3), np.pi, 0.0, rabi)
            exact = evolve_exact(st, spec, cfg0, pulse)
            rwa = evolve_rwa(st, spec, pulse, (2, 3))
            p_e, p_r = probabilities(exact), probabilities(rwa)
            devs.append(max(abs(p_e[n] - p_r[n]) for n in range(4)))
        assert devs[0] > devs[1] > devs[2]
