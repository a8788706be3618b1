"""Probability densities |psi|^2 on Cartesian grids of the elliptic well.

Only moduli are computed.  Every exponent left in the asymptotic wave
functions after the amplitude prefactor is pulled out is a pure phase, so
nothing is lost by dropping it, and the undetermined normalization constants
disappear once the grid is normalized.

Coordinates are nm in the isotropic elliptic frame; ``to_physical`` on the
frame maps them back onto the circular wire.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import FieldParams, WireFrame, cartesian_to_elliptic
from .jumping_ball import JbSolution, transverse_zero
from .specfun import AIRY_RANGE, airy_g, airy_zero, cumulative_axial_integral, parabolic_cylinder
from .whispering_gallery import WgSolution

# Airy tails beyond this are below 1e-70; clipping avoids the domain guard.
_AIRY_CLIP = AIRY_RANGE[1]


@dataclass(frozen=True)
class DensityGrid:
    """Normalized density sampled at cell centres.

    ``values[iy, ix]`` belongs to the point ``(x[ix], y[iy])``.  ``valid``
    flags cells inside the region where the asymptotic formula applies.
    """

    x: np.ndarray
    y: np.ndarray
    values: np.ndarray
    valid: np.ndarray
    extent: tuple[float, float, float, float]

    @property
    def nx(self) -> int:
        return len(self.x)

    @property
    def ny(self) -> int:
        return len(self.y)

    @property
    def cell_area(self) -> float:
        return (self.x[1] - self.x[0]) * (self.y[1] - self.y[0])

    @property
    def norm(self) -> float:
        return float(self.values.sum() * self.cell_area)


def grid_axes(frame: WireFrame, nx: int, ny: int | None = None):
    """Cell-centre coordinates covering the bounding box of the boundary ellipse."""
    ny = nx if ny is None else ny
    if nx < 2 or ny < 2:
        raise ValueError("grid needs at least 2 cells per axis")
    a, b = frame.semi_major, frame.semi_minor
    x = -a + (np.arange(nx) + 0.5) * (2 * a / nx)
    y = -b + (np.arange(ny) + 0.5) * (2 * b / ny)
    return x, y


def _inside(frame: WireFrame, X, Y):
    return (X / frame.semi_major) ** 2 + (Y / frame.semi_minor) ** 2 < 1.0


def _airy_sq(z):
    return airy_g(np.minimum(z, _AIRY_CLIP))[0] ** 2


def _finish(frame, x, y, raw, valid) -> DensityGrid:
    X, Y = np.meshgrid(x, y)
    inside = _inside(frame, X, Y)
    vals = np.where(inside, raw, 0.0)
    total = vals.sum() * (x[1] - x[0]) * (y[1] - y[0])
    if total > 0:
        vals = vals / total
    extent = (-frame.semi_major, frame.semi_major, -frame.semi_minor, frame.semi_minor)
    return DensityGrid(x, y, vals, valid & inside, extent)


# -- pointwise evaluators (arrays of Cartesian points, nm) ----------------------

def bs_density_at(sol: WgSolution, X, Y):
    """Unnormalized BS density at Cartesian points; zero outside the well."""
    frame = sol.frame
    X, Y = np.broadcast_arrays(np.asarray(X, float), np.asarray(Y, float))
    xi, phi = cartesian_to_elliptic(X, Y, frame, "wg")
    xb, w, t = frame.xi_bar, sol.omega, airy_zero(sol.p)
    eps = w ** (-2 / 3)
    rc = frame.radius / (frame.c * math.sqrt(2))
    nu = (xi - xb) / eps
    z = (-t - rc ** (2 / 3) * nu
         - eps * rc ** (-4 / 3) * math.cosh(2 * xb) / 20 * nu**2
         + eps * (4 / 15) * t / math.tanh(2 * xb) * nu)
    out = _airy_sq(np.where(xi < xb, z, 0.0)) / np.sqrt(math.cosh(xb) ** 2 - np.cos(phi) ** 2)
    return np.where(_inside(frame, X, Y), out, 0.0)


def rs_density_at(sol: WgSolution, X, Y):
    frame = sol.frame
    X, Y = np.broadcast_arrays(np.asarray(X, float), np.asarray(Y, float))
    xi, phi = cartesian_to_elliptic(X, Y, frame, "wg")
    xe, w = sol.xi_ec, sol.omega
    eps = w ** (-2 / 3)
    s2 = math.sinh(2 * xe)
    nu = (xi - xe) / eps
    z = -(s2 / 4) ** (1 / 3) * nu - eps * (4 / s2) ** (2 / 3) * math.cosh(2 * xe) / 20 * nu**2
    z = np.where(xi < frame.xi_bar, z, 0.0)
    out = _airy_sq(z) / np.sqrt(math.cosh(xe) ** 2 - np.cos(phi) ** 2)
    return np.where(_inside(frame, X, Y), out, 0.0)


def _axial_phase(sol: JbSolution, xi):
    flat = xi.ravel()
    order = np.argsort(flat, kind="stable")
    cum = np.empty_like(flat)
    cum[order] = cumulative_axial_integral(sol.phi_hc, flat[order])
    arg = 0.5 * sol.omega * cum.reshape(xi.shape)
    return np.sin(arg) ** 2 if sol.p % 2 == 0 else np.cos(arg) ** 2


def hcs_density_at(sol: JbSolution, X, Y):
    frame = sol.frame
    X, Y = np.broadcast_arrays(np.asarray(X, float), np.asarray(Y, float))
    xi, phi = cartesian_to_elliptic(X, Y, frame, "jb")
    ph, w = sol.phi_hc, sol.omega
    d = np.abs(phi) - ph
    z = w ** (2 / 3) * (math.sin(2 * ph) / 4) ** (1 / 3) * (d + d * d / (5 * math.tan(2 * ph)))
    if sol.parity not in ("even", "odd"):
        raise ValueError("HCS solution needs a parity")
    transverse_zero(sol.q, sol.parity)
    out = (_axial_phase(sol, xi) * _airy_sq(z)
           / np.sqrt(np.cosh(xi) ** 2 - math.sin(ph) ** 2))
    return np.where(_inside(frame, X, Y), out, 0.0)


def hos_density_at(sol: JbSolution, field_: FieldParams, X, Y):
    frame = sol.frame
    X, Y = np.broadcast_arrays(np.asarray(X, float), np.asarray(Y, float))
    xi, phi = cartesian_to_elliptic(X, Y, frame, "jb")
    w, q = sol.omega, sol.q
    sh = np.sinh(xi)
    arg = 0.5 * w * sh - (q + 0.5) * np.arctan(sh)
    trig = np.sin(arg) ** 2 if sol.p % 2 == 0 else np.cos(arg) ** 2
    shift = field_.lam * field_.beta_c * np.cosh(xi) / math.sqrt(w)
    # D_q(u) is proportional to exp(-u^2/4) H_q(u / sqrt 2)
    u = (math.sqrt(w) * np.sin(phi) - shift) / math.sqrt(2)
    out = trig * parabolic_cylinder(q, u) ** 2 / np.cosh(xi)
    return np.where(_inside(frame, X, Y), out, 0.0)


# -- grids ------------------------------------------------------------------------

def bs_density(sol: WgSolution, nx: int, ny: int | None = None) -> DensityGrid:
    x, y = grid_axes(sol.frame, nx, ny)
    X, Y = np.meshgrid(x, y)
    xi, _ = cartesian_to_elliptic(X, Y, sol.frame, "wg")
    valid = xi > sol.xi_ec - 5 * sol.omega ** (-2 / 3)
    return _finish(sol.frame, x, y, bs_density_at(sol, X, Y), valid)


def rs_density(sol: WgSolution, nx: int, ny: int | None = None) -> DensityGrid:
    x, y = grid_axes(sol.frame, nx, ny)
    X, Y = np.meshgrid(x, y)
    xi, _ = cartesian_to_elliptic(X, Y, sol.frame, "wg")
    valid = xi > sol.xi_ec - 5 * sol.omega ** (-2 / 3)
    return _finish(sol.frame, x, y, rs_density_at(sol, X, Y), valid)


def hcs_density(sol: JbSolution, nx: int, ny: int | None = None) -> DensityGrid:
    x, y = grid_axes(sol.frame, nx, ny)
    X, Y = np.meshgrid(x, y)
    _, phi = cartesian_to_elliptic(X, Y, sol.frame, "jb")
    valid = np.abs(np.sin(phi)) < 2 * math.sin(sol.phi_hc)
    return _finish(sol.frame, x, y, hcs_density_at(sol, X, Y), valid)


def hos_density(sol: JbSolution, field_: FieldParams, nx: int,
                ny: int | None = None) -> DensityGrid:
    x, y = grid_axes(sol.frame, nx, ny)
    X, Y = np.meshgrid(x, y)
    _, phi = cartesian_to_elliptic(X, Y, sol.frame, "jb")
    half_width = math.sqrt((2 * sol.q + 1) / sol.omega)
    valid = np.abs(np.sin(phi)) < 2 * half_width
    if not field_.valid:
        valid = np.zeros_like(valid)
    return _finish(sol.frame, x, y, hos_density_at(sol, field_, X, Y), valid)


def density(sol, nx: int, ny: int | None = None, field_: FieldParams | None = None) -> DensityGrid:
    """Dispatch on the solution family."""
    if sol.kind == "BS":
        return bs_density(sol, nx, ny)
    if sol.kind == "RS":
        return rs_density(sol, nx, ny)
    if sol.kind == "HCS":
        return hcs_density(sol, nx, ny)
    if sol.kind == "HOS":
        return hos_density(sol, field_ if field_ is not None else FieldParams.zero(), nx, ny)
    raise ValueError(f"unknown solution kind {sol.kind!r}")


def count_lobes(profile, rel_threshold: float = 0.02) -> int:
    """Number of interior local maxima of a 1-D profile above a fraction of its peak."""
    v = np.asarray(profile, dtype=float)
    if v.size < 3 or v.max() <= 0:
        return 0
    floor = rel_threshold * v.max()
    mid = v[1:-1]
    peaks = (mid > v[:-2]) & (mid >= v[2:]) & (mid > floor)
    return int(peaks.sum())
