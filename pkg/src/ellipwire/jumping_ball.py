"""Hyperbolic caustic states (HCS) and harmonic oscillator states (HOS).

These jumping-ball modes bounce between the two boundary arcs crossing the
minor axis.  HCS are bounded in the transverse direction by a pair of
hyperbolic caustics phi = +-phi_hc; HOS are their small-angle limit, where the
eigenvalue has a closed form and the transverse profile is a Hermite-Gauss
function.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import BandExceedsDomain
from .geometry import FieldParams, WireFrame
from .solvers import SolveReport, newton_2d
from .specfun import airy_deriv_zero, airy_zero, axial_action_integral

RESIDUAL_TOL = 1e-10
BAND_SAMPLES = 201


@dataclass(frozen=True)
class JbSolution:
    kind: str  # "HCS" or "HOS"
    p: int
    q: int
    parity: str  # "even" | "odd"
    omega: float
    phi_hc: float
    frame: WireFrame = field(repr=False)
    report: SolveReport = field(repr=False, compare=False)
    note: str = ""

    @property
    def caustic(self) -> float:
        return self.phi_hc


def _regime_guard(p: int, q: int):
    if p < 5 * q:
        warnings.warn(f"p = {p} is not much larger than q = {q}; "
                      "jumping-ball asymptotics may be poor", RuntimeWarning, stacklevel=3)


def transverse_zero(q: int, parity: str) -> float:
    """Airy zero quantizing the transverse motion: t_q for even, t'_q for odd states."""
    if parity == "even":
        return airy_zero(q)
    if parity == "odd":
        return airy_deriv_zero(q)
    raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")


def hcs_transverse_residual(omega: float, phi: float, t: float) -> float:
    return (omega ** (2 / 3) * (math.sin(2 * phi) / 4) ** (1 / 3) * phi
            * (1 - phi / (5 * math.tan(2 * phi))) - t)


def hcs_residuals(omega: float, phi: float, p: int, q: int, parity: str,
                  frame: WireFrame) -> tuple[float, float]:
    """Normalized residuals of the transverse (caustic) and axial conditions."""
    t = transverse_zero(q, parity)
    axial = omega * axial_action_integral(phi, frame.xi_bar) - math.pi * p
    return hcs_transverse_residual(omega, phi, t) / t, axial / (math.pi * p)


def hcs_solve(p: int, q: int, parity: str, frame: WireFrame,
              field_: FieldParams | None = None) -> JbSolution:
    """Eigenvalue and caustic angle of a hyperbolic caustic state.

    ``field_`` is accepted for interface symmetry and deliberately unused:
    at this order the spectrum does not depend on the field.
    """
    del field_
    _regime_guard(p, q)
    transverse_zero(q, parity)  # validates parity early
    omega0 = hos_omega(p, q, frame)
    phi0 = math.sqrt((2 * q + 1) / omega0)

    def F(v):
        return hcs_residuals(v[0], v[1], p, q, parity, frame)

    bounds = ((0.5 * omega0, 2 * omega0), (1e-8, math.pi / 2 - 1e-8))
    (omega, phi), report = newton_2d(F, (omega0, phi0), tol=RESIDUAL_TOL, bounds=bounds,
                                     scale=(omega0, phi0))
    return JbSolution("HCS", p, q, parity, omega, phi, frame, report)


def hos_omega(p: int, q: int, frame: WireFrame) -> float:
    sh = math.sinh(frame.xi_bar)
    return (math.pi * p + (2 * q + 1) * math.atan(sh)) / sh


def hos_eigenvalue(p: int, q: int, frame: WireFrame,
                   field_: FieldParams | None = None) -> JbSolution:
    """Closed-form HOS eigenvalue.

    ``phi_hc`` holds the band-averaged caustic angle for ``field_`` (zero field
    when omitted).  q = 0 has no hyperbolic-caustic partner and is tagged
    ``note="unpaired"``.
    """
    if q < 0:
        raise ValueError("q must be non-negative")
    if p < 1:
        raise ValueError("p must be >= 1")
    if q > 0:
        _regime_guard(p, q)
    omega = hos_omega(p, q, frame)
    sol = JbSolution("HOS", p, q, "even" if q % 2 == 0 else "odd", omega, 0.0, frame,
                     SolveReport(0, 0.0, True), "unpaired" if q == 0 else "")
    phi = hos_band_average(sol, field_ if field_ is not None else FieldParams.zero())
    return JbSolution(sol.kind, p, q, sol.parity, omega, phi, frame, sol.report, sol.note)


def hos_caustic_band(solution: JbSolution, field_: FieldParams, branch: str, xi):
    """Edge angle phi(xi) of the HOS band on the ``"right"`` or ``"left"`` side."""
    sign = {"right": 1.0, "left": -1.0}.get(branch)
    if sign is None:
        raise ValueError(f"branch must be 'right' or 'left', got {branch!r}")
    xi = np.asarray(xi, dtype=float)
    w = solution.omega
    s = (sign * math.sqrt((2 * solution.q + 1) / w)
         + field_.lam * field_.beta_c * np.cosh(xi) / w)
    if np.any(np.abs(s) >= 1):
        raise BandExceedsDomain("band edge reaches |sin phi| >= 1")
    out = np.arcsin(s)
    return float(out) if out.ndim == 0 else out


def hos_band_average(solution: JbSolution, field_: FieldParams, branch: str = "right",
                     samples: int = BAND_SAMPLES) -> float:
    """Mean |phi| of one band edge over a uniform grid of xi on [-xi_bar, xi_bar]."""
    xb = solution.frame.xi_bar
    xi = np.linspace(-xb, xb, samples)
    return float(np.mean(np.abs(hos_caustic_band(solution, field_, branch, xi))))
