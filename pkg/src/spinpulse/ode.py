"""Adaptive embedded Runge-Kutta 5(4) integrator for the driven eigenbasis ODE.

The integrated system is the interaction-picture amplitude equation

    dC_n/dt = (i W/2) sum_m [ e^{-i(nu t + phi)} Wm[n,m]
                            - e^{+i(nu t + phi)} Wp[n,m] ] e^{i(E_n - E_m) t} C_m

with Wm the lowering-operator matrix in the eigenbasis, Wp = Wm^dagger,
and W the pulse's rabi amplitude.  Both rotating components are kept.

Two interchangeable implementations are provided: a pure-numpy reference
and a numba-compiled fast path (used automatically when numba imports).
They are cross-checked in the test suite.
"""

from __future__ import annotations

import numpy as np

from .errors import ToleranceNotMet

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12
#: the step never exceeds 1/PERIOD_FRACTION of the fastest oscillation period
PERIOD_FRACTION = 20.0

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = np.zeros((7, 7))
_A[1, 0] = 1 / 5
_A[2, :2] = (3 / 40, 9 / 40)
_A[3, :3] = (44 / 45, -56 / 15, 32 / 9)
_A[4, :4] = (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729)
_A[5, :5] = (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656)
_A[6, :6] = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84)
_E = np.array(
    [71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40]
)
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
_SAFETY = 0.9


def max_phase_frequency(energies: np.ndarray, nu: float) -> float:
    """Fastest exponent |E_n - E_m| + nu appearing in the integrand."""
    return float(np.max(energies) - np.min(energies) + abs(nu))


def step_cap(energies: np.ndarray, nu: float) -> float:
    wmax = max_phase_frequency(energies, nu)
    if wmax <= 0:
        return np.inf
    return 2 * np.pi / (PERIOD_FRACTION * wmax)


def _rhs_numpy(t, y, energies, wm, wp, half_rabi, nu, phi):
    p = np.exp(1j * t * energies)
    z = np.conj(p) * y
    c = (1j * half_rabi) * np.exp(-1j * (nu * t + phi))
    return p * (c * (wm @ z) - np.conj(c) * (wp @ z))


def _integrate_numpy(energies, wm, wp, rabi, nu, phi, t0, tau, y0, rtol, atol, hmax):
    t_end = t0 + tau
    y = y0.astype(complex)
    half = 0.5 * rabi
    k = [np.empty_like(y) for _ in range(7)]
    k[0] = _rhs_numpy(t0, y, energies, wm, wp, half, nu, phi)
    t = t0
    h = min(hmax, tau)
    nsteps = nrejected = 0
    hmin = 16 * np.finfo(float).eps * max(abs(t_end), 1.0)
    while t < t_end:
        rem = t_end - t
        if rem <= hmin:  # sub-resolution sliver left by rounding
            break
        hstep = min(h, rem)
        for i in range(1, 7):
            acc = y + (hstep * _A[i, 0]) * k[0]
            for j in range(1, i):
                if _A[i, j] != 0.0:
                    acc = acc + (hstep * _A[i, j]) * k[j]
            k[i] = _rhs_numpy(t + _C[i] * hstep, acc, energies, wm, wp, half, nu, phi)
        y_new = acc  # stage-7 node: y + h * sum(b_j k_j), the 5th-order solution
        err = (hstep * _E[0]) * k[0]
        for j in range(2, 7):
            err = err + (hstep * _E[j]) * k[j]
        sc = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        enorm = float(np.sqrt(np.mean(np.abs(err / sc) ** 2)))
        if enorm <= 1.0:
            t += hstep
            y = y_new
            k[0] = k[6]  # FSAL
            nsteps += 1
        else:
            nrejected += 1
            if nrejected > 100 * max(nsteps, 100):
                raise ToleranceNotMet("too many rejected steps")
        factor = _MAX_FACTOR if enorm == 0.0 else min(
            _MAX_FACTOR, max(_MIN_FACTOR, _SAFETY * enorm**-0.2)
        )
        h = min(hstep * factor, hmax)
        if h < hmin:
            raise ToleranceNotMet(f"step size underflow at t={t}")
    return y, nsteps, nrejected


try:  # optional compiled fast path
    import numba as _nb

    @_nb.njit(cache=True)
    def _integrate_numba(energies, wm, wp, rabi, nu, phi, t0, tau, y0, rtol, atol, hmax):  # pragma: no cover - exercised via integrate_pulse
        d = y0.shape[0]
        a = np.zeros((7, 7))
        a[1, 0] = 1 / 5
        a[2, 0], a[2, 1] = 3 / 40, 9 / 40
        a[3, 0], a[3, 1], a[3, 2] = 44 / 45, -56 / 15, 32 / 9
        a[4, 0], a[4, 1], a[4, 2], a[4, 3] = (
            19372 / 6561,
            -25360 / 2187,
            64448 / 6561,
            -212 / 729,
        )
        a[5, 0], a[5, 1], a[5, 2], a[5, 3], a[5, 4] = (
            9017 / 3168,
            -355 / 33,
            46732 / 5247,
            49 / 176,
            -5103 / 18656,
        )
        a[6, 0], a[6, 1], a[6, 2], a[6, 3], a[6, 4], a[6, 5] = (
            35 / 384,
            0.0,
            500 / 1113,
            125 / 192,
            -2187 / 6784,
            11 / 84,
        )
        cn = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
        ecf = np.array(
            [71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40]
        )
        half = 0.5 * rabi
        t_end = t0 + tau
        y = y0.astype(np.complex128)
        k = np.zeros((7, d), dtype=np.complex128)
        acc = np.zeros(d, dtype=np.complex128)

        # rhs into k[row]
        def rhs(t, yv, out):
            for n in range(d):
                zn = np.exp(-1j * t * energies[n]) * yv[n]
                acc[n] = zn  # reuse acc as scratch z
            c = (1j * half) * np.exp(-1j * (nu * t + phi))
            cc = np.conj(c)
            for n in range(d):
                s = 0.0 + 0.0j
                for mm in range(d):
                    wmv = wm[n, mm]
                    wpv = wp[n, mm]
                    if wmv != 0.0 or wpv != 0.0:
                        s += (c * wmv - cc * wpv) * acc[mm]
                out[n] = np.exp(1j * t * energies[n]) * s

        rhs(t0, y, k[0])
        t = t0
        h = min(hmax, tau)
        nsteps = 0
        nrejected = 0
        hmin = 16 * 2.220446049250313e-16 * max(abs(t_end), 1.0)
        ywork = np.zeros(d, dtype=np.complex128)
        while t < t_end:
            rem = t_end - t
            if rem <= hmin:  # sub-resolution sliver left by rounding
                break
            hstep = h if h < rem else rem
            for i in range(1, 7):
                for n in range(d):
                    s = 0.0 + 0.0j
                    for j in range(i):
                        if a[i, j] != 0.0:
                            s += a[i, j] * k[j, n]
                    ywork[n] = y[n] + hstep * s
                rhs(t + cn[i] * hstep, ywork, k[i])
            enorm2 = 0.0
            for n in range(d):
                e = 0.0 + 0.0j
                for j in range(7):
                    if ecf[j] != 0.0:
                        e += ecf[j] * k[j, n]
                e *= hstep
                ynb = abs(y[n])
                ynb2 = abs(ywork[n])
                sc = atol + rtol * (ynb if ynb > ynb2 else ynb2)
                q = abs(e) / sc
                enorm2 += q * q
            enorm = np.sqrt(enorm2 / d)
            if enorm <= 1.0:
                t += hstep
                for n in range(d):
                    y[n] = ywork[n]
                    k[0, n] = k[6, n]
                nsteps += 1
            else:
                nrejected += 1
                if nrejected > 100 * (nsteps if nsteps > 100 else 100):
                    raise Exception("too many rejected steps")
            if enorm == 0.0:
                factor = 5.0
            else:
                factor = 0.9 * enorm**-0.2
                if factor < 0.2:
                    factor = 0.2
                elif factor > 5.0:
                    factor = 5.0
            h = hstep * factor
            if h > hmax:
                h = hmax
            if h < hmin:
                raise Exception("step size underflow")
        return y, nsteps, nrejected

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False


def integrate_pulse(
    energies: np.ndarray,
    lowering: np.ndarray,
    rabi: float,
    nu: float,
    phi: float,
    t_start: float,
    duration: float,
    y0: np.ndarray,
    *,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    backend: str = "auto",
) -> tuple[np.ndarray, int, int]:
    """Integrate one rectangular pulse; returns (amplitudes, steps, rejects).

    `energies` and `lowering` must share one basis ordering (label order in
    normal use).  Absolute time enters the oscillatory phases, keeping the
    global phase clock consistent across a pulse sequence.
    """
    if duration == 0.0:
        return y0.astype(complex), 0, 0
    wm = np.ascontiguousarray(lowering, dtype=complex)
    wp = np.ascontiguousarray(lowering.conj().T)
    en = np.ascontiguousarray(energies, dtype=float)
    hmax = step_cap(en, nu)
    args = (en, wm, wp, float(rabi), float(nu), float(phi), float(t_start),
            float(duration), np.ascontiguousarray(y0, dtype=complex), rtol, atol, hmax)
    if backend == "numpy" or (backend == "auto" and not HAVE_NUMBA):
        return _integrate_numpy(*args)
    if backend in ("auto", "numba"):
        if not HAVE_NUMBA:
            raise ValueError("numba backend requested but numba is not installed")
        try:
            return _integrate_numba(*args)
        except Exception as exc:  # numba cannot raise our typed errors
            msg = str(exc)
            if "underflow" in msg or "rejected" in msg:
                raise ToleranceNotMet(msg) from exc
            raise
    raise ValueError(f"unknown backend {backend!r}")
