import math

import numpy as np
import pytest
from scipy import optimize

from ellipwire.errors import BandExceedsDomain
from ellipwire.geometry import FieldParams
from ellipwire.jumping_ball import (hcs_residuals, hcs_solve, hos_band_average, hos_caustic_band,
                                    hos_eigenvalue, transverse_zero)
from ellipwire.specfun import axial_action_integral


def _hcs_by_substitution(p, q, parity, frame):
    """Eliminate omega through the axial condition, then a 1-D bracketed root in phi."""
    t = transverse_zero(q, parity)

    def g(phi):
        w = math.pi * p / axial_action_integral(phi, frame.xi_bar)
        return (w ** (2 / 3) * (math.sin(2 * phi) / 4) ** (1 / 3) * phi
                * (1 - phi / (5 * math.tan(2 * phi))) - t)

    phi = optimize.bisect(g, 1e-3, 0.7, xtol=1e-15, maxiter=200)
    return math.pi * p / axial_action_integral(phi, frame.xi_bar), phi


@pytest.mark.parametrize("p,q,parity", [(30, 1, "odd"), (30, 1, "even"), (120, 2, "odd"),
                                        (60, 2, "even")])
def test_hcs_against_substitution_oracle(frame, p, q, parity):
    sol = hcs_solve(p, q, parity, frame)
    w, phi = _hcs_by_substitution(p, q, parity, frame)
    assert sol.omega == pytest.approx(w, rel=1e-9)
    assert sol.phi_hc == pytest.approx(phi, rel=1e-8)
    assert max(abs(r) for r in hcs_residuals(sol.omega, sol.phi_hc, p, q, parity, frame)) <= 1e-8
    assert 0 <= sol.phi_hc < math.pi / 2


def test_hcs_field_independent_bitwise(frame):
    ref = hcs_solve(40, 2, "even", frame)
    for lam in (-1, 0, 1):
        f = FieldParams.from_lb_ratio(frame, 2.0, lam)
        s = hcs_solve(40, 2, "even", frame, f)
        assert (s.omega, s.phi_hc) == (ref.omega, ref.phi_hc)


def test_phi_narrows_with_p(frame):
    for parity in ("even", "odd"):
        phis = [hcs_solve(p, 1, parity, frame).phi_hc for p in range(20, 140, 10)]
        assert np.all(np.diff(phis) < 0)


def test_gap_constancy_across_p(frame):
    def gaps(p):
        e1 = hcs_solve(p, 1, "even", frame).omega
        e2 = hcs_solve(p, 2, "even", frame).omega
        o1 = hcs_solve(p, 1, "odd", frame).omega
        return e2 - e1, e2 - o1

    (a1, b1), (a2, b2) = gaps(40), gaps(120)
    assert a1 == pytest.approx(a2, rel=1e-3)
    assert b1 == pytest.approx(b2, rel=1e-3)


def test_bad_parity(frame):
    with pytest.raises(ValueError):
        hcs_solve(30, 1, "both", frame)


def test_hos_closed_form(frame):
    sh = math.sinh(frame.xi_bar)
    for p, q in [(30, 1), (77, 3), (10, 0)]:
        s = hos_eigenvalue(p, q, frame)
        assert s.omega * sh - math.pi * p - (2 * q + 1) * math.atan(sh) == pytest.approx(0, abs=1e-12)


def test_hos_p_spacing_exact(frame):
    step = math.pi / math.sinh(frame.xi_bar)
    for p in (10, 55, 119):
        d = hos_eigenvalue(p + 1, 2, frame).omega - hos_eigenvalue(p, 2, frame).omega
        assert d == pytest.approx(step, rel=1e-12)


def test_hos_q0_unpaired(frame):
    assert hos_eigenvalue(30, 0, frame).note == "unpaired"
    assert hos_eigenvalue(30, 1, frame).note == ""


@pytest.mark.parametrize("p", [30, 60, 120])
@pytest.mark.parametrize("q", [1, 2])
def test_hos_tracks_even_hcs(frame, p, q):
    hos = hos_eigenvalue(p, q, frame).omega
    hcs = hcs_solve(p, q, "even", frame).omega
    assert abs(hos - hcs) / hcs <= 0.015


def test_band_symmetric_without_field(frame):
    s = hos_eigenvalue(30, 1, frame)
    xi = np.linspace(-frame.xi_bar, frame.xi_bar, 21)
    z = FieldParams.zero()
    assert np.allclose(hos_caustic_band(s, z, "right", xi), -hos_caustic_band(s, z, "left", xi))
    assert hos_band_average(s, z) == pytest.approx(abs(hos_caustic_band(s, z, "right", 0.0)))


def test_band_reflects_under_field_flip(frame, field2r):
    s = hos_eigenvalue(30, 1, frame)
    xi = np.linspace(-frame.xi_bar, frame.xi_bar, 21)
    assert np.allclose(hos_caustic_band(s, field2r.flipped(), "right", xi),
                       -hos_caustic_band(s, field2r, "left", xi), atol=1e-15)


def test_band_average_sampling_insensitive(frame, field2r):
    s = hos_eigenvalue(30, 1, frame)
    a = hos_band_average(s, field2r, samples=201)
    b = hos_band_average(s, field2r, samples=1001)
    assert abs(a - b) / b < 0.005


def test_band_exceeds_domain(frame):
    s = hos_eigenvalue(30, 1, frame)
    with pytest.raises(BandExceedsDomain):
        hos_caustic_band(s, FieldParams.from_lb_ratio(frame, 0.05, 1), "right", 0.0)
