"""Dormand-Prince 5(4) embedded Runge-Kutta integrator with dense output.

Kept deliberately small: the eigensolver integrates a scalar phase or a
two-component (phase, log-amplitude) system thousands of times, so the
state may be a float or a 1-D ndarray and the stepping loop avoids any
per-step allocation beyond the stage arithmetic.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import IntegrationError

# Butcher tableau
C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
# difference between 5th and embedded 4th order weights
E1, E3, E4, E5, E6, E7 = (71 / 57600, -71 / 16695, 71 / 1920,
                          -17253 / 339200, 22 / 525, -1 / 40)
# dense output (Hairer & Wanner, contd5)
D1 = -12715105075 / 11282082432
D3 = 87487479700 / 32700410799
D4 = -10690763975 / 1880347072
D5 = 701980252875 / 199316789632
D6 = -1453857185 / 822651844
D7 = 69997945 / 29380423


class DenseSolution:
    """Piecewise quartic interpolant over the accepted steps."""

    def __init__(self, x0s, hs, coeffs):
        self.x0s = np.asarray(x0s)
        self.hs = np.asarray(hs)
        # coeffs: (nsteps, 5, dim)
        self.coeffs = np.asarray(coeffs)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.x0s, x, side="right") - 1
        idx = np.clip(idx, 0, len(self.x0s) - 1)
        s = ((x - self.x0s[idx]) / self.hs[idx])[:, None]
        s1 = 1.0 - s
        r = self.coeffs[idx]
        return r[:, 0] + s * (r[:, 1] + s1 * (r[:, 2] + s * (r[:, 3] + s1 * r[:, 4])))


def dopri5(rhs, x0, x1, y0, rtol=1e-10, atol=1e-10, h0=None, max_step=None,
           dense=False, max_steps=1_000_000):
    """Integrate ``y' = rhs(x, y)`` from ``x0`` to ``x1 > x0``.

    Returns ``y(x1)``, or ``(y(x1), DenseSolution)`` when ``dense`` is set.
    Raises :class:`IntegrationError` if the step size underflows.
    """
    span = x1 - x0
    if span <= 0:
        raise IntegrationError("dopri5 integrates forward only")
    vector = isinstance(y0, np.ndarray)
    if vector:
        y = y0.astype(float)
        norm = lambda e: float(np.max(np.abs(e)))  # noqa: E731
        absy = np.abs
        maxy = np.maximum
    else:
        y = float(y0)
        norm = abs
        absy = abs
        maxy = max
    if max_step is None:
        max_step = span
    x = x0
    k1 = rhs(x, y)
    if h0 is None:
        d0 = norm(y) if vector else abs(y)
        d1 = norm(k1) if vector else abs(k1)
        h = 0.01 * span if d0 < 1e-5 or d1 < 1e-5 else min(0.01 * d0 / d1, 0.01 * span)
        h = max(h, 1e-6 * span)
    else:
        h = h0
    h = min(h, max_step)
    hmin = 1e-14 * max(abs(x0), abs(x1), span)

    dense_x, dense_h, dense_c = [], [], []
    nsteps = 0
    while x < x1:
        last = x + h >= x1 or x1 - (x + h) < hmin
        if last:
            h = x1 - x
        k2 = rhs(x + C2 * h, y + h * (A21 * k1))
        k3 = rhs(x + C3 * h, y + h * (A31 * k1 + A32 * k2))
        k4 = rhs(x + C4 * h, y + h * (A41 * k1 + A42 * k2 + A43 * k3))
        k5 = rhs(x + C5 * h, y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4))
        k6 = rhs(x + h, y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5))
        ynew = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6)
        k7 = rhs(x + h, ynew)
        err = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7)
        sc = atol + rtol * maxy(absy(y), absy(ynew))
        enorm = norm(err / sc)
        if enorm <= 1.0:
            if dense:
                dy = ynew - y
                bspl = h * k1 - dy
                dense_x.append(x)
                dense_h.append(h)
                dense_c.append((y, dy, bspl, dy - h * k7 - bspl,
                                h * (D1 * k1 + D3 * k3 + D4 * k4 + D5 * k5 + D6 * k6 + D7 * k7)))
            x = x1 if last else x + h
            y = ynew
            k1 = k7
            fac = 5.0 if enorm == 0.0 else min(5.0, 0.9 * enorm ** -0.2)
        else:
            fac = max(0.2, 0.9 * enorm ** -0.2)
        h = min(h * fac, max_step)
        nsteps += 1
        if h < hmin and x < x1:
            raise IntegrationError(f"step size underflow at x={x!r}")
        if nsteps > max_steps:
            raise IntegrationError(f"more than {max_steps} steps without reaching x={x1!r}")
    if not (np.all(np.isfinite(y)) if vector else math.isfinite(y)):
        raise IntegrationError("solution became non-finite")
    if dense:
        coeffs = np.array(dense_c, dtype=float)
        if coeffs.ndim == 2:
            coeffs = coeffs[:, :, None]
        return y, DenseSolution(dense_x, dense_h, coeffs)
    return y
