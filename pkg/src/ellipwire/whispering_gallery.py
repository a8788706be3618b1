"""Boundary states (BS) and ring states (RS): whispering-gallery modes.

Both families circulate along the wire boundary, confined from the inside by
an elliptic caustic xi = xi_ec.  For BS the eigenvalue follows from a single
scalar condition and the caustic from a quadratic; for RS the eigenvalue and
the caustic are solved together.

Field direction convention: ``lam = +1`` is the orientation that raises the
eigenvalue.  The flux term enters both quantization conditions with the sign
-lam.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from dataclasses import field as dc_field

from .errors import InvalidField, NoRealRoot
from .geometry import FieldParams, WireFrame
from .solvers import SolveReport, newton_2d, scalar_root, widen_bracket
from .specfun import airy_zero, periodic_integral, radial_action_integral

RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class WgSolution:
    kind: str  # "BS" or "RS"
    p: int
    q: int
    lam: int
    omega: float
    xi_ec: float
    frame: WireFrame = dc_field(repr=False)
    field: FieldParams = dc_field(repr=False)
    report: SolveReport = dc_field(repr=False, compare=False)

    @property
    def caustic(self) -> float:
        return self.xi_ec


@dataclass(frozen=True)
class BsSeriesCoeffs:
    beta01: float
    beta22: float

    @classmethod
    def for_frame(cls, frame: WireFrame) -> "BsSeriesCoeffs":
        s2 = math.sinh(2 * frame.xi_bar)
        return cls(beta01=-(s2 / 4) ** (1 / 3),
                   beta22=-(math.cosh(2 * frame.xi_bar) / 20) * (4 / s2) ** (2 / 3))


@dataclass(frozen=True)
class CausticAxes:
    """Semi-axes (nm) of an elliptic caustic.

    ``a``, ``b``, ``eccentricity`` describe the caustic in the isotropic
    elliptic well; the ``*_wire`` fields are the same curve mapped back onto
    the physical circular wire cross-section.
    """

    a: float
    b: float
    eccentricity: float
    a_wire: float
    b_wire: float
    eccentricity_wire: float


def _check_field(field_: FieldParams):
    if not field_.valid:
        raise InvalidField(f"c/L_B = {field_.c_over_lb:.3f} is outside the weak-field regime")


def _regime_guard(p: int, q: int):
    if q < 5 * p:
        warnings.warn(f"q = {q} is not much larger than p = {p}; "
                      "whispering-gallery asymptotics may be poor", RuntimeWarning, stacklevel=3)


def bs_residual(omega: float, p: int, q: int, frame: WireFrame, field_: FieldParams,
                t: float | None = None) -> float:
    """Left minus right side of the BS angular quantization condition."""
    xb = frame.xi_bar
    i1 = periodic_integral("I1", xb)
    i2 = periodic_integral("I2", xb)
    i3 = periodic_integral("I3", xb)
    t = airy_zero(p) if t is None else t
    rc = frame.radius / (frame.c * math.sqrt(2))
    w13 = omega ** (1 / 3)
    return (omega / 2 * i1
            - w13 * rc ** (4 / 3) * t * i2
            - field_.lam * field_.beta_r * math.pi
            - t * t * rc ** (8 / 3) * i3 / w13
            + (2 / 15) * rc ** (-4 / 3) * t * t * math.cosh(2 * xb) * i2 / w13
            - 2 * math.pi * q)


def bs_caustic_coordinate(omega: float, t: float, frame: WireFrame) -> float:
    """Elliptic caustic xi_ec of a boundary state from the quadratic in nu_ec.

    Of the two roots the one nearer the first-order value
    nu = -t (c sqrt2 / R)^(2/3) is taken.
    """
    co = BsSeriesCoeffs.for_frame(frame)
    eps = omega ** (-2 / 3)
    qa = eps * co.beta22
    qb = co.beta01 + eps * (4 * co.beta22 / (3 * co.beta01)) * t
    qc = -t
    nu_first = -t * (frame.c * math.sqrt(2) / frame.radius) ** (2 / 3)
    disc = qb * qb - 4 * qa * qc
    if disc < 0:
        raise NoRealRoot(f"caustic quadratic has no real root (discriminant {disc:g})")
    # cancellation-free pair of roots
    s = -0.5 * (qb + math.copysign(math.sqrt(disc), qb))
    roots = [s / qa if qa != 0 else math.inf, qc / s if s != 0 else 0.0]
    nu = min(roots, key=lambda r: abs(r - nu_first))
    return frame.xi_bar + eps * nu


def bs_caustic_first_order(omega: float, p: int, frame: WireFrame) -> float:
    """Leading-order caustic xi_bar - t_p omega^(-2/3) (c sqrt2 / R)^(2/3)."""
    return frame.xi_bar - airy_zero(p) * omega ** (-2 / 3) * (
        frame.c * math.sqrt(2) / frame.radius) ** (2 / 3)


def bs_caustic_from_energy(energy_mev: float, p: int, frame: WireFrame) -> float:
    """Same leading-order caustic written with the physical energy and masses."""
    from .geometry import HBAR, M_E, MEV, NM
    scale = HBAR**2 / (4 * frame.iso_mass * M_E * energy_mev * MEV * (frame.radius * NM) ** 2)
    return frame.xi_bar - airy_zero(p) * scale ** (1 / 3)


def bs_eigenvalue(p: int, q: int, frame: WireFrame, field_: FieldParams) -> WgSolution:
    """Boundary-state eigenvalue omega(p, q, lam) and its elliptic caustic."""
    _check_field(field_)
    _regime_guard(p, q)

    def f(w):
        return bs_residual(w, p, q, frame, field_)

    seed = 4 * math.pi * q / periodic_integral("I1", frame.xi_bar)
    bracket = widen_bracket(f, seed)
    omega, report = scalar_root(f, bracket, tol=RESIDUAL_TOL)
    xi_ec = bs_caustic_coordinate(omega, airy_zero(p), frame)
    if xi_ec <= 0:
        warnings.warn(f"caustic of BS({p},{q}) falls past the minor axis (xi_ec = {xi_ec:.4f}); "
                      "outside the whispering-gallery regime", RuntimeWarning, stacklevel=2)
    return WgSolution("BS", p, q, field_.lam, omega, xi_ec, frame, field_, report)


def bs_caustic(solution: WgSolution) -> float:
    return bs_caustic_coordinate(solution.omega, airy_zero(solution.p), solution.frame)


# -- ring states ----------------------------------------------------------------

def rs_residuals(omega: float, xi_ec: float, p: int, q: int, frame: WireFrame,
                 field_: FieldParams) -> tuple[float, float]:
    """Normalized residuals of the RS radial (action) and angular conditions."""
    t = airy_zero(p)
    radial = 0.75 * omega * radial_action_integral(xi_ec, frame.xi_bar) - t**1.5
    return radial / t**1.5, _rs_angular(omega, xi_ec, q, field_)


def _rs_angular(omega, xi_ec, q, field_):
    angular = (omega / 2 * periodic_integral("I1", xi_ec)
               - field_.lam * field_.beta_c * math.pi * math.sinh(2 * xi_ec) / 2
               - 2 * math.pi * q)
    return angular / (2 * math.pi * q)


def rs_truncated_residual(omega: float, xi_ec: float, p: int, frame: WireFrame,
                          t: float | None = None) -> float:
    """Residual of the two-term expansion of the RS radial condition in (xi_bar - xi_ec)."""
    t = airy_zero(p) if t is None else t
    gap = frame.xi_bar - xi_ec
    return (omega ** (2 / 3) * (math.sinh(2 * xi_ec) / 4) ** (1 / 3)
            * (gap + gap * gap / (5 * math.tanh(2 * xi_ec))) - t)


def rs_truncated_condition_check(omega: float, xi_ec: float, p: int, frame: WireFrame,
                                 t: float | None = None) -> tuple[float, float]:
    """(truncated residual, full action residual) at a given (omega, xi_ec)."""
    t = airy_zero(p) if t is None else t
    full = 0.75 * omega * radial_action_integral(xi_ec, frame.xi_bar) - t**1.5
    return rs_truncated_residual(omega, xi_ec, p, frame, t), full


def rs_solve(p: int, q: int, frame: WireFrame, field_: FieldParams,
             condition: str = "full") -> WgSolution:
    """Ring-state eigenvalue and caustic from the coupled radial/angular system.

    ``condition="truncated"`` swaps the action integral for its two-term
    expansion, which is useful for checking how much the expansion costs.
    """
    _check_field(field_)
    _regime_guard(p, q)
    seed = bs_eigenvalue(p, q, frame, field_)
    t = airy_zero(p)

    if condition == "full":
        def F(v):
            return rs_residuals(v[0], v[1], p, q, frame, field_)
    elif condition == "truncated":
        def F(v):
            return (rs_truncated_residual(v[0], v[1], p, frame, t) / t,
                    _rs_angular(v[0], v[1], q, field_))
    else:
        raise ValueError(f"unknown condition {condition!r}")

    bounds = ((0.5 * seed.omega, 2 * seed.omega), (1e-6, frame.xi_bar))
    (omega, xi_ec), report = newton_2d(F, (seed.omega, seed.xi_ec), tol=RESIDUAL_TOL,
                                       bounds=bounds, scale=(seed.omega, frame.xi_bar))
    return WgSolution("RS", p, q, field_.lam, omega, xi_ec, frame, field_, report)


def caustic_ellipse_axes(xi_ec: float, frame: WireFrame) -> CausticAxes:
    if not 0 < xi_ec <= frame.xi_bar:
        raise ValueError("need 0 < xi_ec <= xi_bar")
    a = frame.c * math.cosh(xi_ec)
    b = frame.c * math.sinh(xi_ec)
    a_w, b_w = (float(v) for v in frame.to_physical(a, b))
    big, small = max(a_w, b_w), min(a_w, b_w)
    return CausticAxes(a, b, frame.c / a, a_w, b_w, math.sqrt(1 - (small / big) ** 2))
