"""Low-level time-stepping kernels.

One Dormand-Prince 5(4) adaptive stepper and one fixed-step classical RK4,
both specialised to the two second-order systems of this package via a
``mode`` switch (state layout [γ, α, γ̇, α̇] in both cases):

    mode 0  stiff system,      params = (i_x, i_y, i_z, k)
    mode 1  effective system,  params = (i_x, i_y, i_z, θ); γ rows frozen at 0

The steppers land exactly on every output grid point: a step that would
cross the next multiple of dt_out is clamped to it, and clamped steps do
not feed the step-size controller.  The returned state/derivative arrays
are therefore genuine integration points, not interpolants.

Kernels are JIT-compiled with numba when it is importable and run as plain
Python otherwise (identical results, much slower).
"""

from __future__ import annotations

import math

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    def njit(*args, **kwargs):
        def wrap(fn):
            return fn
        return wrap

MODE_STIFF = 0
MODE_EFFECTIVE = 1

STATUS_OK = 0
STATUS_UNDERFLOW = 1

# Dormand-Prince 5(4) tableau (FSAL: the last stage row equals the weights).
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
# 5th-order minus embedded 4th-order weights (local error estimate).
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71.0 / 57600.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)

# Step-size controller constants (PI / Lund stabilisation).
_SAFETY = 0.9
_BETA = 0.04
_EXPO1 = 0.2 - _BETA * 0.75
_FAC_MIN = 0.1   # h may grow by at most 1/_FAC_MIN per accepted step
_FAC_MAX = 5.0   # h may shrink by at most 1/_FAC_MAX


@njit(cache=True, nogil=True)
def _rhs(mode, p, y, out):
    c = math.cos(y[1])
    s = math.sin(y[1])
    gv = p[0] * c * c + p[1] * s * s
    gp = 2.0 * (p[1] - p[0]) * s * c
    if mode == MODE_STIFF:
        out[0] = y[2]
        out[1] = y[3]
        out[2] = -(gp * y[3] * y[2] + p[3] * y[0]) / gv
        out[3] = 0.5 * gp * y[2] * y[2] / p[2]
    else:
        out[0] = 0.0
        out[1] = y[3]
        out[2] = 0.0
        out[3] = 0.5 * p[3] * gp / (gv * math.sqrt(gv)) / p[2]


@njit(cache=True, nogil=True)
def dp54(mode, p, y0, n_out, dt_out, rtol, atol, max_step, h_min):
    """Adaptive DP5(4) over [0, n_out*dt_out] with output every dt_out.

    Returns (states, derivs, n_accepted, n_rejected, status, j_reached).
    On STATUS_UNDERFLOW the arrays are filled up to row j_reached - 1.
    """
    nd = 4
    states = np.empty((n_out + 1, nd))
    derivs = np.empty((n_out + 1, nd))
    y = y0.copy()
    f = np.empty(nd)
    _rhs(mode, p, y, f)
    for i in range(nd):
        states[0, i] = y[i]
        derivs[0, i] = f[i]

    k2 = np.empty(nd)
    k3 = np.empty(nd)
    k4 = np.empty(nd)
    k5 = np.empty(nd)
    k6 = np.empty(nd)
    k7 = np.empty(nd)
    ytmp = np.empty(nd)
    y5 = np.empty(nd)

    h = min(max_step, dt_out) * 1e-2
    facold = 1e-4
    reject_prev = False
    n_accept = 0
    n_reject = 0

    for j in range(1, n_out + 1):
        t = dt_out * (j - 1)
        t_target = dt_out * j
        while t < t_target:
            rem = t_target - t
            clamped = h >= rem
            h_try = rem if clamped else h
            # only a controller-chosen step can underflow; a clamped step is
            # just finishing the output cell, however short the remainder
            if not clamped and h_try < h_min:
                return states, derivs, n_accept, n_reject, STATUS_UNDERFLOW, j

            for i in range(nd):
                ytmp[i] = y[i] + h_try * _A21 * f[i]
            _rhs(mode, p, ytmp, k2)
            for i in range(nd):
                ytmp[i] = y[i] + h_try * (_A31 * f[i] + _A32 * k2[i])
            _rhs(mode, p, ytmp, k3)
            for i in range(nd):
                ytmp[i] = y[i] + h_try * (_A41 * f[i] + _A42 * k2[i] + _A43 * k3[i])
            _rhs(mode, p, ytmp, k4)
            for i in range(nd):
                ytmp[i] = y[i] + h_try * (
                    _A51 * f[i] + _A52 * k2[i] + _A53 * k3[i] + _A54 * k4[i]
                )
            _rhs(mode, p, ytmp, k5)
            for i in range(nd):
                ytmp[i] = y[i] + h_try * (
                    _A61 * f[i] + _A62 * k2[i] + _A63 * k3[i] + _A64 * k4[i] + _A65 * k5[i]
                )
            _rhs(mode, p, ytmp, k6)
            for i in range(nd):
                y5[i] = y[i] + h_try * (
                    _B1 * f[i] + _B3 * k3[i] + _B4 * k4[i] + _B5 * k5[i] + _B6 * k6[i]
                )
            _rhs(mode, p, y5, k7)

            err = 0.0
            for i in range(nd):
                e = h_try * (
                    _E1 * f[i]
                    + _E3 * k3[i]
                    + _E4 * k4[i]
                    + _E5 * k5[i]
                    + _E6 * k6[i]
                    + _E7 * k7[i]
                )
                ay = abs(y[i])
                ay5 = abs(y5[i])
                sc = atol + rtol * (ay if ay > ay5 else ay5)
                r = e / sc
                err += r * r
            err = math.sqrt(err / nd)

            if not math.isfinite(err):
                n_reject += 1
                h = h_try * 0.1
                reject_prev = True
                continue

            if err <= 1.0:
                n_accept += 1
                t = t_target if clamped else t + h_try
                for i in range(nd):
                    y[i] = y5[i]
                    f[i] = k7[i]
                if not clamped:
                    fac11 = err ** _EXPO1
                    fac = fac11 / facold ** _BETA
                    fac = max(_FAC_MIN, min(_FAC_MAX, fac / _SAFETY))
                    h_new = h_try / fac
                    if reject_prev:
                        h_new = min(h_new, h_try)
                    h = min(h_new, max_step)
                    facold = max(err, 1e-4)
                    reject_prev = False
            else:
                n_reject += 1
                fac11 = err ** _EXPO1
                h = h_try / min(_FAC_MAX, fac11 / _SAFETY)
                reject_prev = True

        for i in range(nd):
            states[j, i] = y[i]
            derivs[j, i] = f[i]

    return states, derivs, n_accept, n_reject, STATUS_OK, n_out


@njit(cache=True, nogil=True)
def rk4_fixed(mode, p, y0, n_out, dt_out, n_sub):
    """Classical fixed-step RK4 with n_sub substeps per output interval."""
    nd = 4
    states = np.empty((n_out + 1, nd))
    derivs = np.empty((n_out + 1, nd))
    y = y0.copy()
    f = np.empty(nd)
    _rhs(mode, p, y, f)
    for i in range(nd):
        states[0, i] = y[i]
        derivs[0, i] = f[i]

    k2 = np.empty(nd)
    k3 = np.empty(nd)
    k4 = np.empty(nd)
    ytmp = np.empty(nd)
    h = dt_out / n_sub

    for j in range(1, n_out + 1):
        for _ in range(n_sub):
            for i in range(nd):
                ytmp[i] = y[i] + 0.5 * h * f[i]
            _rhs(mode, p, ytmp, k2)
            for i in range(nd):
                ytmp[i] = y[i] + 0.5 * h * k2[i]
            _rhs(mode, p, ytmp, k3)
            for i in range(nd):
                ytmp[i] = y[i] + h * k3[i]
            _rhs(mode, p, ytmp, k4)
            for i in range(nd):
                y[i] = y[i] + (h / 6.0) * (f[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            _rhs(mode, p, y, f)
        for i in range(nd):
            states[j, i] = y[i]
            derivs[j, i] = f[i]

    return states, derivs
