"""Special functions and quadratures used by the quantization conditions.

The Airy function is taken in the normalization G(z) = sqrt(pi) Ai(z), which
satisfies G'' = z G.  Parabolic cylinder functions of integer order are
represented by the Gaussian-weighted Hermite polynomials exp(-z^2/2) H_q(z);
the constant 2^(-q/2) relating them to D_q(sqrt(2) z) is dropped because it
never matters for node positions or normalized densities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import special

from .errors import DomainOverflow, NoConvergence, OrderTooLarge

SQRT_PI = math.sqrt(math.pi)
AIRY_RANGE = (-40.0, 40.0)
MAX_HERMITE_ORDER = 60

QUAD_RTOL = 1e-12
QUAD_ATOL = 1e-14
MAX_TRAPEZOID_NODES = 2**20


@dataclass(frozen=True)
class AiryZeroTable:
    """Tabulated magnitudes of the first five zeros of Ai and Ai'."""

    ai_zeros: tuple[float, ...] = (2.33811, 4.08795, 5.52056, 6.78671, 7.94417)
    ai_prime_zeros: tuple[float, ...] = (1.01879, 3.24820, 4.82010, 6.16331, 7.37218)


AIRY_TABLE = AiryZeroTable()


def airy_g(z):
    """Return ``(G(z), G'(z))`` with G = sqrt(pi) Ai.

    Raises DomainOverflow outside [-40, 40].
    """
    z = np.asarray(z, dtype=float)
    lo, hi = AIRY_RANGE
    if np.any((z < lo) | (z > hi)) or np.any(np.isnan(z)):
        raise DomainOverflow(f"Airy argument outside [{lo}, {hi}]")
    ai, aip, _, _ = special.airy(z)
    if ai.ndim == 0:
        return SQRT_PI * float(ai), SQRT_PI * float(aip)
    return SQRT_PI * ai, SQRT_PI * aip


def _airy_value(z: float) -> float:
    return airy_g(z)[0]


def _airy_slope(z: float) -> float:
    return airy_g(z)[1]


def _newton_on_ai(seed: float, derivative: bool) -> float:
    # Newton on Ai(-t) (or Ai'(-t)); Ai'' = z Ai supplies the missing derivative.
    t = seed
    for _ in range(50):
        ai, aip, _, _ = special.airy(-t)
        if derivative:
            f, df = aip, -(-t) * ai
        else:
            f, df = ai, -aip
        step = f / df
        t -= step
        if abs(step) < 1e-15 * max(1.0, abs(t)):
            break
    return t


@lru_cache(maxsize=None)
def airy_zero(p: int) -> float:
    """Magnitude t_p of the p-th zero of Ai (Ai(-t_p) = 0)."""
    if p < 1:
        raise ValueError("p must be >= 1")
    if p <= len(AIRY_TABLE.ai_zeros):
        return AIRY_TABLE.ai_zeros[p - 1]
    seed = (1.5 * math.pi * (p - 0.25)) ** (2.0 / 3.0)
    return _newton_on_ai(seed, derivative=False)


@lru_cache(maxsize=None)
def airy_deriv_zero(q: int) -> float:
    """Magnitude t'_q of the q-th zero of Ai' (Ai'(-t'_q) = 0)."""
    if q < 1:
        raise ValueError("q must be >= 1")
    if q <= len(AIRY_TABLE.ai_prime_zeros):
        return AIRY_TABLE.ai_prime_zeros[q - 1]
    seed = (1.5 * math.pi * (q - 0.75)) ** (2.0 / 3.0)
    return _newton_on_ai(seed, derivative=True)


def hermite(q: int, z):
    """Physicists' Hermite polynomial H_q(z) by the three-term recurrence."""
    if q < 0:
        raise ValueError("q must be non-negative")
    if q > MAX_HERMITE_ORDER:
        raise OrderTooLarge(f"order {q} exceeds {MAX_HERMITE_ORDER}")
    z = np.asarray(z, dtype=float)
    h_prev = np.ones_like(z)
    if q == 0:
        return h_prev
    h = 2.0 * z
    for n in range(1, q):
        h_prev, h = h, 2.0 * z * h - 2.0 * n * h_prev
    return h


def parabolic_cylinder(q: int, z):
    """exp(-z^2/2) H_q(z), proportional to D_q(sqrt(2) z)."""
    z = np.asarray(z, dtype=float)
    return np.exp(-0.5 * z * z) * hermite(q, z)


# -- quadrature ---------------------------------------------------------------

def _periodic_trapezoid(f, period: float) -> float:
    n = 8
    t = np.arange(n) * (period / n)
    prev = period / n * np.sum(f(t))
    while n < MAX_TRAPEZOID_NODES:
        # doubling reuses the old nodes; only the midpoints are new
        mids = (np.arange(n) + 0.5) * (period / n)
        cur = 0.5 * prev + period / (2 * n) * np.sum(f(mids))
        n *= 2
        if abs(cur - prev) <= max(QUAD_RTOL * abs(cur), QUAD_ATOL):
            return float(cur)
        prev = cur
    raise NoConvergence(f"trapezoid rule did not converge with {MAX_TRAPEZOID_NODES} nodes")


_PERIODIC_KERNELS = {
    "I1": lambda d: np.sqrt(d),
    "I2": lambda d: 1.0 / np.sqrt(d),
    "I3": lambda d: d**-1.5,
}


@lru_cache(maxsize=4096)
def periodic_integral(kind: str, xi0: float) -> float:
    """Closed-contour integrals over tau in [0, 2 pi] of powers of cosh^2(xi0) - cos^2(tau).

    ``I1`` integrates the square root, ``I2`` its reciprocal and ``I3`` the
    power -3/2.  The integrands are smooth and periodic, so the trapezoid
    rule converges geometrically.
    """
    if not xi0 > 0:
        raise ValueError("xi0 must be positive")
    try:
        kernel = _PERIODIC_KERNELS[kind]
    except KeyError:
        raise ValueError(f"unknown integral kind {kind!r}") from None
    ch2 = math.cosh(xi0) ** 2
    return _periodic_trapezoid(lambda t: kernel(ch2 - np.cos(t) ** 2), 2 * math.pi)


@lru_cache(maxsize=8)
def _gauss(n: int):
    return leggauss(n)


def _gauss_legendre(f, a: float, b: float) -> float:
    """Gauss-Legendre with order doubling until two orders agree."""
    if a == b:
        return 0.0
    prev = None
    for n in (16, 32, 64, 128, 256):
        x, w = _gauss(n)
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        cur = half * float(np.dot(w, f(mid + half * x)))
        if prev is not None and abs(cur - prev) <= max(QUAD_RTOL * abs(cur), QUAD_ATOL):
            return cur
        prev = cur
    raise NoConvergence("Gauss-Legendre did not converge at order 256")


def radial_action_integral(xi_ec: float, xi_bar: float) -> float:
    """Integral of sqrt(cosh^2 xi - cosh^2 xi_ec) from xi_ec to xi_bar.

    The square-root zero at the lower limit is removed with xi = xi_ec + s^2.
    """
    if not 0 < xi_ec <= xi_bar:
        raise ValueError("need 0 < xi_ec <= xi_bar")
    ch2 = math.cosh(xi_ec) ** 2

    def integrand(s):
        return 2.0 * s * np.sqrt(np.maximum(np.cosh(xi_ec + s * s) ** 2 - ch2, 0.0))

    return _gauss_legendre(integrand, 0.0, math.sqrt(xi_bar - xi_ec))


def axial_action_integral(phi_hc: float, xi_bar: float) -> float:
    """Integral of sqrt(cosh^2 tau - sin^2 phi_hc) from 0 to xi_bar."""
    if not 0 <= phi_hc < math.pi / 2:
        raise ValueError("need 0 <= phi_hc < pi/2")
    s2 = math.sin(phi_hc) ** 2
    return _gauss_legendre(lambda t: np.sqrt(np.cosh(t) ** 2 - s2), 0.0, xi_bar)


def cumulative_axial_integral(phi_hc: float, xi_grid) -> np.ndarray:
    """Integral of sqrt(cosh^2 tau - sin^2 phi_hc) from 0 to each xi in ``xi_grid``.

    The integrand is even, so the result is odd in xi.  Each value is built
    from panel integrals between consecutive sorted |xi|.
    """
    xi_grid = np.asarray(xi_grid, dtype=float)
    if np.any(np.diff(xi_grid) < 0):
        raise ValueError("xi_grid must be sorted ascending")
    s2 = math.sin(phi_hc) ** 2
    x, w = _gauss(24)

    def f(t):
        return np.sqrt(np.cosh(t) ** 2 - s2)

    mag = np.abs(xi_grid)
    order = np.argsort(mag, kind="stable")
    knots = np.concatenate(([0.0], mag[order]))
    a, b = knots[:-1], knots[1:]
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    panels = half * (f(mid[:, None] + half[:, None] * x[None, :]) @ w)
    out = np.empty_like(xi_grid)
    out[order] = np.cumsum(panels)
    return np.sign(xi_grid) * out
