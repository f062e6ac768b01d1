"""Gamma and Airy functions in double precision.

Only what the Airy determinant oracle needs: real arguments, scalar
evaluation, Ai/Bi on ``[-200, 10]``.

Airy evaluation is split by region:

* ``-6.5 <= x <= 8``: Maclaurin series of the two power-series solutions
  of ``y'' = x y`` (for Ai on ``(1, 8]`` the series cancels
  catastrophically, so Ai and Ai' there come from ``K_{1/3}`` /
  ``K_{2/3}`` instead),
* ``x < -7.5``: oscillatory asymptotic expansion,
* ``[-7.5, -6.5]``: a C^2 blend of the two, both good to ~3e-12 there; a
  hard switch leaves a jump of ~1e-12 that finite differences amplify,
* ``x > 8``: exponential asymptotic expansion.
"""

import math

import numpy as np

from .errors import DomainError

AIRY_MIN = -200.0
AIRY_MAX = 10.0

_SERIES_CUTOFF = 8.0
_BESSEL_CUTOFF = 1.0
_BLEND = (-7.5, -6.5)

# Lanczos approximation, g = 7, n = 9
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma_function(x):
    """Gamma function for real ``x > 0``.

    Lanczos approximation with reflection below 1/2; relative error is
    around 1e-15 on ``(0, 10]``.
    """
    x = float(x)
    if not x > 0.0 or not math.isfinite(x):
        raise DomainError(f"gamma_function needs x > 0, got {x!r}")
    return _gamma(x)


def _gamma(x):
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * _gamma(1.0 - x))
    x -= 1.0
    acc = _LANCZOS[0]
    for i in range(1, len(_LANCZOS)):
        acc += _LANCZOS[i] / (x + i)
    t = x + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (x + 0.5) * math.exp(-t) * acc


# Ai(0) and -Ai'(0)
AI0 = 3.0 ** (-2.0 / 3.0) / gamma_function(2.0 / 3.0)
AIP0 = 3.0 ** (-1.0 / 3.0) / gamma_function(1.0 / 3.0)
_SQRT3 = math.sqrt(3.0)
_SQRT_PI = math.sqrt(math.pi)


def _maclaurin(x):
    """Power-series solutions f (f(0)=1, f'(0)=0) and g (g(0)=0, g'(0)=1)."""
    x3 = x * x * x
    f, fp = 1.0, 0.0
    g, gp = x, 1.0
    tf, tg = 1.0, x
    k = 0
    while True:
        tf *= x3 / ((3 * k + 2) * (3 * k + 3))
        tg *= x3 / ((3 * k + 3) * (3 * k + 4))
        k += 1
        f += tf
        g += tg
        # derivatives: d/dx of c x^j is j c x^(j-1)
        if x != 0.0:
            fp += 3 * k * tf / x
            gp += (3 * k + 1) * tg / x
        if abs(tf) <= 1e-18 * abs(f) and abs(tg) <= 1e-18 * max(abs(g), 1e-300) or k > 200:
            break
    return f, fp, g, gp


def _asymptotic_coeffs(zeta, nmax=60):
    """Terms u_k / zeta^k and v_k / zeta^k, truncated at the smallest term."""
    us, vs = [1.0], [1.0]
    u = 1.0
    inv = 1.0 / zeta
    scale = 1.0
    prev = math.inf
    for k in range(1, nmax):
        u *= (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k)
        scale *= inv
        term = u * scale
        if abs(term) >= prev or abs(term) < 1e-17:
            break
        prev = abs(term)
        us.append(term)
        vs.append(-(6 * k + 1) / (6 * k - 1) * term)
    return us, vs


def _bessel_k_scaled(nu, z):
    """exp(z) * K_nu(z) for z > 0 by the trapezoid rule on the cosh integral.

    The integrand is entire and doubly-exponentially decaying, so a fixed
    step of 0.1 is accurate to full double precision.
    """
    tmax = math.acosh(1.0 + 750.0 / z)
    t = np.arange(0.0, tmax + 0.1, 0.1)
    vals = np.exp(-z * (np.cosh(t) - 1.0)) * np.cosh(nu * t)
    return 0.1 * (vals.sum() - 0.5 * vals[0])


def airy(x):
    """Return ``(Ai(x), Ai'(x), Bi(x), Bi'(x))`` for ``x`` in [-200, 10]."""
    x = float(x)
    if not (AIRY_MIN <= x <= AIRY_MAX):
        raise DomainError(f"Airy argument {x!r} outside [{AIRY_MIN}, {AIRY_MAX}]")

    lo, hi = _BLEND
    if x < lo:
        return _airy_negative_asymptotic(-x)
    if x > _SERIES_CUTOFF:
        return _airy_positive_asymptotic(x)
    series = _airy_series(x)
    if x >= hi:
        return series
    # quintic smoothstep from the asymptotic side (s=0) to the series (s=1)
    s = (x - lo) / (hi - lo)
    wt = s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
    asym = _airy_negative_asymptotic(-x)
    return tuple(wt * u + (1.0 - wt) * v for u, v in zip(series, asym))


def _airy_series(x):
    f, fp, g, gp = _maclaurin(x)
    bi = _SQRT3 * (AI0 * f + AIP0 * g)
    bip = _SQRT3 * (AI0 * fp + AIP0 * gp)
    if x <= _BESSEL_CUTOFF:
        ai = AI0 * f - AIP0 * g
        aip = AI0 * fp - AIP0 * gp
    else:
        zeta = 2.0 / 3.0 * x * math.sqrt(x)
        ez = math.exp(-zeta)
        ai = math.sqrt(x / 3.0) / math.pi * _bessel_k_scaled(1.0 / 3.0, zeta) * ez
        aip = -x / (math.pi * _SQRT3) * _bessel_k_scaled(2.0 / 3.0, zeta) * ez
    return ai, aip, bi, bip


def _airy_positive_asymptotic(x):
    zeta = 2.0 / 3.0 * x * math.sqrt(x)
    us, vs = _asymptotic_coeffs(zeta)
    su_alt = sum((-1) ** k * u for k, u in enumerate(us))
    sv_alt = sum((-1) ** k * v for k, v in enumerate(vs))
    su = sum(us)
    sv = sum(vs)
    x4 = x ** 0.25
    em, ep = math.exp(-zeta), math.exp(zeta)
    ai = em / (2.0 * _SQRT_PI * x4) * su_alt
    aip = -x4 * em / (2.0 * _SQRT_PI) * sv_alt
    bi = ep / (_SQRT_PI * x4) * su
    bip = x4 * ep / _SQRT_PI * sv
    return ai, aip, bi, bip


def _airy_negative_asymptotic(z):
    zeta = 2.0 / 3.0 * z * math.sqrt(z)
    us, vs = _asymptotic_coeffs(zeta)
    # even/odd splits with alternating signs
    pu = sum((-1) ** (k // 2) * u for k, u in enumerate(us) if k % 2 == 0)
    qu = sum((-1) ** (k // 2) * u for k, u in enumerate(us) if k % 2 == 1)
    pv = sum((-1) ** (k // 2) * v for k, v in enumerate(vs) if k % 2 == 0)
    qv = sum((-1) ** (k // 2) * v for k, v in enumerate(vs) if k % 2 == 1)
    phase = zeta - math.pi / 4.0
    c, s = math.cos(phase), math.sin(phase)
    z4 = z ** 0.25
    ai = (c * pu + s * qu) / (_SQRT_PI * z4)
    bi = (-s * pu + c * qu) / (_SQRT_PI * z4)
    aip = z4 * (s * pv - c * qv) / _SQRT_PI
    bip = z4 * (c * pv + s * qv) / _SQRT_PI
    return ai, aip, bi, bip


def airy_ai(x):
    return airy(x)[0]


def airy_bi(x):
    return airy(x)[2]


def airy_ai_prime(x):
    return airy(x)[1]


def airy_bi_prime(x):
    return airy(x)[3]
