"""Compiled integration kernels for the arrow-shaped Hamiltonian.

The right-hand side exploits the arrow structure (N flat levels coupled to
one excited level) so each evaluation is O(N):

    dy_n/dt = -i (omega_n(t)/2) y_e
    dy_e/dt = -i (sum_n omega_n(t)/2 y_n + Delta(t) y_e)

Envelope and detuning profiles enter as integer tags plus parameters so the
whole adaptive loop compiles.  The stepper is an embedded Dormand-Prince
5(4) pair with PI step-size control; an optional phase cap bounds the step
by `cap / |Delta(t)|`, which matters for linear sweeps where the detuning
grows without bound.  A fixed-step classic RK4 kernel is kept for
reproducibility runs.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# envelope tags
SHAPE_SECH = 0
SHAPE_RECT = 1
SHAPE_CONST = 2
SHAPE_CUSTOM = 3

# detuning tags
DET_ZERO = 0
DET_CONST = 1
DET_LINEAR = 2
DET_TANH = 3

# statuses
OK = 0
STEP_UNDERFLOW = 1
NOT_FINITE = 2

# Dormand-Prince 5(4) tableau.  The last B row is the 5th-order weight set
# (FSAL: stage 7 equals the next step's stage 1).
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = np.array([
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1 / 5, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3 / 40, 9 / 40, 0.0, 0.0, 0.0, 0.0],
    [44 / 45, -56 / 15, 32 / 9, 0.0, 0.0, 0.0],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0.0, 0.0],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656, 0.0],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
])
# 5th-order minus 4th-order weights (error estimator)
_DP_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920,
                  -17253 / 339200, 22 / 525, -1 / 40])


@njit(cache=True, nogil=True)
def _envelope(t, kind, width, custom_t, custom_f):
    if kind == SHAPE_SECH:
        return 1.0 / np.cosh(t / width)
    if kind == SHAPE_RECT:
        return 1.0 if abs(t) <= width else 0.0
    if kind == SHAPE_CONST:
        return 1.0
    if t < custom_t[0] or t > custom_t[-1]:
        return 0.0
    return np.interp(t, custom_t, custom_f)


@njit(cache=True, nogil=True)
def _detuning(t, kind, a, b, width):
    if kind == DET_ZERO:
        return 0.0
    if kind == DET_CONST:
        return a
    if kind == DET_LINEAR:
        return b * t
    return a + b * np.tanh(t / width)


@njit(cache=True, nogil=True)
def _rhs(t, y, out, chis,
         shape_kind, shape_width, custom_t, custom_f,
         det_kind, det_a, det_b, det_width):
    f = _envelope(t, shape_kind, shape_width, custom_t, custom_f)
    delta = _detuning(t, det_kind, det_a, det_b, det_width)
    n = chis.shape[0]
    acc = delta * y[n]
    for k in range(n):
        g = 0.5 * chis[k] * f
        out[k] = -1j * (g * y[n])
        acc += g * y[k]
    out[n] = -1j * acc
    return delta


@njit(cache=True, nogil=True)
def rk45_arrow(chis, shape_kind, shape_width, custom_t, custom_f,
               det_kind, det_a, det_b, det_width,
               y0, t0, t1, rtol, atol, max_step, phase_cap, sample_ts):
    """Adaptive integration of the arrow system from t0 to t1.

    The solution is forced to land exactly on each requested sample time.
    Returns (samples, y_final, peak_excited, status, t_fail, n_accepted).
    """
    dim = y0.shape[0]
    nsamp = sample_ts.shape[0]
    samples = np.zeros((nsamp, dim), dtype=np.complex128)
    y = y0.copy()
    k = np.zeros((7, dim), dtype=np.complex128)
    ytmp = np.zeros(dim, dtype=np.complex128)

    t = t0
    _rhs(t, y, k[0], chis, shape_kind, shape_width, custom_t, custom_f,
         det_kind, det_a, det_b, det_width)

    # controller-owned step size; the actually taken step may be clipped to
    # land on sample times / t1 / the phase cap without disturbing it
    h_ctrl = min(max_step, (t1 - t0) * 1e-3)
    d0 = _detuning(t0, det_kind, det_a, det_b, det_width)
    if phase_cap > 0.0 and abs(d0) * h_ctrl > phase_cap:
        h_ctrl = phase_cap / abs(d0)

    peak = abs(y[dim - 1]) ** 2
    err_prev = 1.0
    si = 0
    naccept = 0
    while si < nsamp and sample_ts[si] <= t:
        for j in range(dim):
            samples[si, j] = y[j]
        si += 1

    while t < t1:
        h = h_ctrl
        if h > max_step:
            h = max_step
        if phase_cap > 0.0:
            d = _detuning(t, det_kind, det_a, det_b, det_width)
            if abs(d) * h > phase_cap:
                h = phase_cap / abs(d)
        clipped = h < h_ctrl
        if h > t1 - t:
            h = t1 - t
            clipped = True
        hit_sample = False
        if si < nsamp and t + h >= sample_ts[si]:
            h = sample_ts[si] - t
            hit_sample = True
            clipped = True
        if h <= 1e-14 * (abs(t) + 1.0):
            if hit_sample:
                for j in range(dim):
                    samples[si, j] = y[j]
                t = sample_ts[si]
                si += 1
                continue
            return samples, y, peak, STEP_UNDERFLOW, t, naccept

        for i in range(1, 7):
            for j in range(dim):
                acc = 0.0 + 0.0j
                for m in range(i):
                    acc += _DP_A[i, m] * k[m, j]
                ytmp[j] = y[j] + h * acc
            _rhs(t + _DP_C[i] * h, ytmp, k[i], chis,
                 shape_kind, shape_width, custom_t, custom_f,
                 det_kind, det_a, det_b, det_width)
        # ytmp now holds the 5th-order candidate (row 7 of A is the B row)
        errn = 0.0
        for j in range(dim):
            e = 0.0 + 0.0j
            for m in range(7):
                e += _DP_E[m] * k[m, j]
            sc = atol + rtol * max(abs(y[j]), abs(ytmp[j]))
            q = abs(h * e) / sc
            errn += q * q
        errn = np.sqrt(errn / dim)

        if errn <= 1.0:
            t = t + h
            ok = True
            for j in range(dim):
                y[j] = ytmp[j]
                k[0, j] = k[6, j]
                if not (np.isfinite(y[j].real) and np.isfinite(y[j].imag)):
                    ok = False
            if not ok:
                return samples, y, peak, NOT_FINITE, t, naccept
            naccept += 1
            pe = abs(y[dim - 1]) ** 2
            if pe > peak:
                peak = pe
            if hit_sample:
                t = sample_ts[si]
                for j in range(dim):
                    samples[si, j] = y[j]
                si += 1
            if errn < 1e-300:
                fac = 10.0
            else:
                fac = 0.9 * errn ** -0.14 * err_prev ** 0.08
                if fac > 10.0:
                    fac = 10.0
                if fac < 0.2:
                    fac = 0.2
            err_prev = errn if errn > 1e-10 else 1e-10
            if clipped:
                # short diagnostic step: keep the controller's belief unless
                # the error says even this step was near the limit
                if h * fac < h_ctrl:
                    h_ctrl = h * fac if errn > 0.5 else h_ctrl
            else:
                h_ctrl = h * fac
        else:
            fac = 0.9 * errn ** -0.2
            if fac < 0.1:
                fac = 0.1
            h_ctrl = h * fac

    while si < nsamp:
        for j in range(dim):
            samples[si, j] = y[j]
        si += 1
    return samples, y, peak, OK, t, naccept


@njit(cache=True, nogil=True)
def rk4_arrow(chis, shape_kind, shape_width, custom_t, custom_f,
              det_kind, det_a, det_b, det_width,
              y0, t0, t1, nsteps, sample_ts):
    """Fixed-step classic RK4 over nsteps equal steps, sampling like rk45_arrow."""
    dim = y0.shape[0]
    nsamp = sample_ts.shape[0]
    samples = np.zeros((nsamp, dim), dtype=np.complex128)
    y = y0.copy()
    k1 = np.zeros(dim, dtype=np.complex128)
    k2 = np.zeros(dim, dtype=np.complex128)
    k3 = np.zeros(dim, dtype=np.complex128)
    k4 = np.zeros(dim, dtype=np.complex128)
    ytmp = np.zeros(dim, dtype=np.complex128)

    # merge the uniform grid with the sample times so samples land exactly
    peak = abs(y[dim - 1]) ** 2
    si = 0
    while si < nsamp and sample_ts[si] <= t0:
        for j in range(dim):
            samples[si, j] = y[j]
        si += 1

    hbase = (t1 - t0) / nsteps
    t = t0
    while t < t1 - 1e-14 * (abs(t1) + 1.0):
        h = hbase
        if t + h > t1:
            h = t1 - t
        landed = False
        if si < nsamp and t + h >= sample_ts[si] - 1e-14:
            h = sample_ts[si] - t
            landed = True
        if h <= 0.0:
            if landed:
                for j in range(dim):
                    samples[si, j] = y[j]
                si += 1
            continue
        _rhs(t, y, k1, chis, shape_kind, shape_width, custom_t, custom_f,
             det_kind, det_a, det_b, det_width)
        for j in range(dim):
            ytmp[j] = y[j] + 0.5 * h * k1[j]
        _rhs(t + 0.5 * h, ytmp, k2, chis, shape_kind, shape_width, custom_t, custom_f,
             det_kind, det_a, det_b, det_width)
        for j in range(dim):
            ytmp[j] = y[j] + 0.5 * h * k2[j]
        _rhs(t + 0.5 * h, ytmp, k3, chis, shape_kind, shape_width, custom_t, custom_f,
             det_kind, det_a, det_b, det_width)
        for j in range(dim):
            ytmp[j] = y[j] + h * k3[j]
        _rhs(t + h, ytmp, k4, chis, shape_kind, shape_width, custom_t, custom_f,
             det_kind, det_a, det_b, det_width)
        for j in range(dim):
            y[j] = y[j] + (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
        t = t + h
        pe = abs(y[dim - 1]) ** 2
        if pe > peak:
            peak = pe
        if landed and si < nsamp:
            for j in range(dim):
                samples[si, j] = y[j]
            t = sample_ts[si]
            si += 1

    while si < nsamp:
        for j in range(dim):
            samples[si, j] = y[j]
        si += 1
    return samples, y, peak, OK, t, nsteps
