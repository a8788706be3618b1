"""Equivalent isotropic elliptic well, field parameters and unit conversions.

A circular wire of radius R whose carriers have in-plane masses m_a, m_b is
equivalent to an isotropic particle of mass sqrt(m_a m_b) in an elliptic well
whose foci sit at (+-c, 0).  Everything downstream works with dimensionless
quantities (elliptic coordinates, the eigenvalue omega, the ratios c/L_B and
R/L_B); physical units only appear in this module.

Two elliptic charts are used.  The whispering-gallery chart ("wg") is

    x = c cosh(xi) cos(phi),   y = c sinh(xi) sin(phi),   xi >= 0,

and the jumping-ball chart ("jb") is rotated by a quarter turn,

    x = c cosh(xi) sin(phi),   y = c sinh(xi) cos(phi),   |phi| <= pi/2,

so that phi = 0 is the minor (Y) axis and xi runs over the whole real line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateAnisotropy

# CODATA 2018
HBAR = 1.054_571_817e-34  # J s
E_CHARGE = 1.602_176_634e-19  # C
M_E = 9.109_383_7015e-31  # kg
MEV = 1.0e-3 * E_CHARGE  # J
NM = 1.0e-9  # m

ANISOTROPY_GUARD = 1e-9

# In-plane T-point hole masses of Bi for a wire grown along [10-11].
PRESETS: dict[str, tuple[float, float]] = {
    "bi-t-hole": (0.0590, 0.3261),
}
DEFAULT_RADIUS_NM = 500.0


@dataclass(frozen=True)
class MaterialParams:
    """Effective masses (units of m_e) and wire radius (nm)."""

    mass_a: float
    mass_b: float
    radius: float

    def __post_init__(self):
        for name in ("mass_a", "mass_b", "radius"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")

    @classmethod
    def preset(cls, name: str, radius: float = DEFAULT_RADIUS_NM) -> "MaterialParams":
        try:
            ma, mb = PRESETS[name]
        except KeyError:
            raise KeyError(f"unknown material preset {name!r}; known: {sorted(PRESETS)}") from None
        return cls(ma, mb, radius)


@dataclass(frozen=True)
class WireFrame:
    """Geometry of the equivalent isotropic elliptic well.

    Lengths are in nm.  ``d_factor`` is d = (R/hbar) sqrt(2 (m_heavy - m_light))
    in meV^-1/2, so that omega = 2 d sqrt(E).
    """

    m_heavy: float
    m_light: float
    radius: float
    c: float
    xi_bar: float
    semi_major: float
    semi_minor: float
    eccentricity: float
    d_factor: float

    @property
    def iso_mass(self) -> float:
        return math.sqrt(self.m_heavy * self.m_light)

    @property
    def delta_mass(self) -> float:
        return self.m_heavy - self.m_light

    def to_physical(self, x, y):
        """Map a point of the isotropic ellipse back onto the circular wire."""
        return (np.asarray(x) * (self.radius / self.semi_major),
                np.asarray(y) * (self.radius / self.semi_minor))


def build_frame(material: MaterialParams) -> WireFrame:
    """Equivalent isotropic elliptic well for an anisotropic circular wire.

    The two masses are sorted internally, so the result does not depend on
    which one is passed as ``mass_a``.

    Raises
    ------
    DegenerateAnisotropy
        If the masses coincide within ``ANISOTROPY_GUARD`` (relative).
    """
    m_heavy = max(material.mass_a, material.mass_b)
    m_light = min(material.mass_a, material.mass_b)
    if (m_heavy - m_light) / m_heavy <= ANISOTROPY_GUARD:
        raise DegenerateAnisotropy(
            f"masses {material.mass_a} and {material.mass_b} are equal within "
            f"{ANISOTROPY_GUARD:g}; the wire is isotropic and has no focal distance")
    r = material.radius
    c = r * math.sqrt(m_heavy - m_light) / (m_heavy * m_light) ** 0.25
    xi_bar = math.atanh(math.sqrt(m_light / m_heavy))
    semi_major = c * math.cosh(xi_bar)
    semi_minor = c * math.sinh(xi_bar)
    d_si = (r * NM / HBAR) * math.sqrt(2.0 * (m_heavy - m_light) * M_E)  # J^-1/2
    return WireFrame(
        m_heavy=m_heavy,
        m_light=m_light,
        radius=r,
        c=c,
        xi_bar=xi_bar,
        semi_major=semi_major,
        semi_minor=semi_minor,
        eccentricity=c / semi_major,
        d_factor=d_si * math.sqrt(MEV),
    )


def elliptic_to_cartesian(xi, phi, frame: WireFrame, chart: str = "wg"):
    """Cartesian point (nm) of elliptic coordinates in the given chart."""
    xi = np.asarray(xi, dtype=float)
    phi = np.asarray(phi, dtype=float)
    c = frame.c
    if chart == "wg":
        return c * np.cosh(xi) * np.cos(phi), c * np.sinh(xi) * np.sin(phi)
    if chart == "jb":
        return c * np.cosh(xi) * np.sin(phi), c * np.sinh(xi) * np.cos(phi)
    raise ValueError(f"unknown chart {chart!r}")


def cartesian_to_elliptic(x, y, frame: WireFrame, chart: str = "wg"):
    """Inverse of :func:`elliptic_to_cartesian`.

    Uses the closed forms xi + i phi = arccosh(z/c) (wg) and
    phi + i xi = arcsin(z/c) (jb) with z = x + i y.  Points within 1e-9 c of
    the focal segment are nudged off it so the branch choice is stable.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    c = frame.c
    eps = 1e-9 * c
    on_cut = (np.abs(y) < eps)
    y = np.where(on_cut, eps, y)
    z = (x + 1j * y) / c
    if chart == "wg":
        w = np.arccosh(z)
        return w.real, np.mod(w.imag, 2 * np.pi)
    if chart == "jb":
        w = np.arcsin(z)
        return w.imag, w.real
    raise ValueError(f"unknown chart {chart!r}")


def omega_to_energy(omega, frame: WireFrame):
    """Energy in meV of the dimensionless eigenvalue omega = 2 d sqrt(E)."""
    omega = np.asarray(omega, dtype=float)
    return omega**2 / (4.0 * frame.d_factor**2)


def energy_to_omega(energy, frame: WireFrame):
    energy = np.asarray(energy, dtype=float)
    return 2.0 * frame.d_factor * np.sqrt(energy)


def magnetic_length(b_tesla: float) -> float:
    """L_B = sqrt(hbar / (e B)) in nm; infinite at zero field."""
    if b_tesla == 0:
        return math.inf
    return math.sqrt(HBAR / (E_CHARGE * abs(b_tesla))) / NM


def tesla_from_length(lb_nm: float) -> float:
    return HBAR / (E_CHARGE * (lb_nm * NM) ** 2)


@dataclass(frozen=True)
class FieldParams:
    """Longitudinal field configuration.

    ``lam`` is the field direction along the wire (+1, -1) or 0 for no field.
    ``beta_c`` = (c/L_B)^2 and ``beta_r`` = (R/L_B)^2 are always non-negative;
    the direction enters the quantization conditions only through ``lam``.
    """

    lb_over_r: float
    lam: int
    beta_c: float
    beta_r: float
    valid: bool = field(init=False)

    def __post_init__(self):
        if self.lam not in (-1, 0, 1):
            raise ValueError(f"lam must be -1, 0 or +1, got {self.lam!r}")
        if (self.lam == 0) != (self.beta_c == 0 and self.beta_r == 0):
            raise ValueError("lam = 0 must coincide with zero field")
        object.__setattr__(self, "valid", self.beta_c < 1.0)

    @property
    def c_over_lb(self) -> float:
        return math.sqrt(self.beta_c)

    @classmethod
    def zero(cls) -> "FieldParams":
        return cls(math.inf, 0, 0.0, 0.0)

    @classmethod
    def from_lb_ratio(cls, frame: WireFrame, lb_over_r: float, lam: int) -> "FieldParams":
        """Field given as L_B / R and a direction; ``lam = 0`` or infinite ratio means no field."""
        if lam == 0 or math.isinf(lb_over_r):
            return cls.zero()
        if not lb_over_r > 0:
            raise ValueError(f"lb_over_r must be positive, got {lb_over_r!r}")
        lb = lb_over_r * frame.radius
        return cls(lb_over_r, int(lam), (frame.c / lb) ** 2, (frame.radius / lb) ** 2)

    def flipped(self) -> "FieldParams":
        if self.lam == 0:
            return self
        return FieldParams(self.lb_over_r, -self.lam, self.beta_c, self.beta_r)

    def with_lam(self, lam: int) -> "FieldParams":
        """Same field magnitude pointing along ``lam`` (0 switches the field off)."""
        if lam == 0:
            return FieldParams.zero()
        if self.lam == 0:
            raise ValueError("cannot orient a zero field; build it with from_lb_ratio")
        return FieldParams(self.lb_over_r, int(lam), self.beta_c, self.beta_r)


def field_from_tesla(b: float, frame: WireFrame, direction: int = 1) -> FieldParams:
    """Field parameters for a flux density ``b`` (T) pointing along ``direction``."""
    if b < 0:
        raise ValueError("b must be non-negative; give the orientation via direction")
    if b == 0:
        return FieldParams.zero()
    if direction not in (-1, 1):
        raise ValueError("direction must be +1 or -1")
    return FieldParams.from_lb_ratio(frame, magnetic_length(b) / frame.radius, direction)
