"""Dormand-Prince 5(4) integrator with adaptive steps.

The solution is reported exactly at the requested output times: steps are
clipped so they land on each one, and the step size carries over between
output intervals.
"""

import numpy as np

from .errors import StepSizeUnderflow

_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = _A[6] + (0.0,)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
_E = tuple(b5 - b4 for b5, b4 in zip(_B5, _B4))

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0
MAX_STEPS = 1_000_000


def _initial_step(f, t0, y0, f0, rtol, atol, span):
    scale = atol + rtol * np.abs(y0)
    d0 = np.sqrt(np.mean(np.abs(y0 / scale) ** 2))
    d1 = np.sqrt(np.mean(np.abs(f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, span)
    f1 = f(t0 + h0, y0 + h0 * f0)
    d2 = np.sqrt(np.mean(np.abs((f1 - f0) / scale) ** 2)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1, span)


def integrate(f, y0, t_eval, rtol=1e-9, atol=1e-12):
    """Integrate ``y' = f(t, y)`` and return ``y`` at each time in ``t_eval``.

    ``t_eval`` must be ascending; ``t_eval[0]`` is the initial time.
    """
    t_eval = np.asarray(t_eval, dtype=float)
    y = np.array(y0, copy=True)
    out = np.empty((len(t_eval),) + y.shape, dtype=y.dtype)
    out[0] = y
    if len(t_eval) == 1:
        return out
    t = float(t_eval[0])
    k0 = f(t, y)
    h = _initial_step(f, t, y, k0, rtol, atol, float(t_eval[-1] - t))
    steps = 0
    for i in range(1, len(t_eval)):
        target = float(t_eval[i])
        while t < target:
            hmin = 1e-13 * max(1.0, abs(t))
            landing = target - t <= h * (1 + 1e-12)
            step = target - t if landing else h
            ks = [k0]
            for s in range(1, 7):
                ys = y + step * sum(a * k for a, k in zip(_A[s], ks) if a != 0.0)
                ks.append(f(t + _C[s] * step, ys))
            y_new = y + step * sum(b * k for b, k in zip(_B5, ks) if b != 0.0)
            err_vec = step * sum(e * k for e, k in zip(_E, ks) if e != 0.0)
            scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
            err = float(np.max(np.abs(err_vec) / scale))
            if err <= 1.0:
                t = target if landing else t + step
                y = y_new
                k0 = ks[6]
                factor = MAX_FACTOR if err == 0.0 else min(MAX_FACTOR, SAFETY * err ** -0.2)
                if not landing or factor < 1.0:
                    h = step * factor
            else:
                h = step * max(MIN_FACTOR, SAFETY * err ** -0.2)
                if h < hmin:
                    raise StepSizeUnderflow(
                        f"step size {h:.3e} below {hmin:.3e} at t={t:.6g}"
                    )
            steps += 1
            if steps > MAX_STEPS:
                raise StepSizeUnderflow(f"exceeded {MAX_STEPS} steps at t={t:.6g}")
        out[i] = y
    return out
