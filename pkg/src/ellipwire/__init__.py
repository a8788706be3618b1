"""Semiclassical spectra and densities of anisotropic-mass elliptic quantum wires."""

from .geometry import (FieldParams, MaterialParams, WireFrame, build_frame,
                       field_from_tesla, omega_to_energy)
from .jumping_ball import JbSolution, hcs_solve, hos_band_average, hos_caustic_band, hos_eigenvalue
from .whispering_gallery import (WgSolution, bs_caustic, bs_eigenvalue, caustic_ellipse_axes,
                                 rs_solve)

__version__ = "0.1.0"

__all__ = [
    "FieldParams", "JbSolution", "MaterialParams", "WgSolution", "WireFrame",
    "bs_caustic", "bs_eigenvalue", "build_frame", "caustic_ellipse_axes",
    "field_from_tesla", "hcs_solve", "hos_band_average", "hos_caustic_band",
    "hos_eigenvalue", "omega_to_energy", "rs_solve",
]
