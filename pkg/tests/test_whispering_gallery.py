import math
import warnings

import numpy as np
import pytest
from scipy import integrate

from ellipwire.errors import InvalidField
from ellipwire.geometry import FieldParams, omega_to_energy
from ellipwire.specfun import airy_zero, periodic_integral, radial_action_integral
from ellipwire.whispering_gallery import (BsSeriesCoeffs, bs_caustic, bs_caustic_coordinate,
                                          bs_caustic_first_order, bs_caustic_from_energy,
                                          bs_eigenvalue, bs_residual, caustic_ellipse_axes,
                                          rs_residuals, rs_solve, rs_truncated_condition_check)

# Root of the BS condition for (1, 30, +1), L_B = 2R, from the scan oracle below.
BS_1_30_PLUS = 86.7588655212


def _scan_root(f, lo, hi, step):
    grid = np.arange(lo, hi, step)
    vals = f(grid)
    i = int(np.nonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))[0][0])
    a, b = grid[i], grid[i + 1]
    for _ in range(80):
        m = 0.5 * (a + b)
        if np.sign(f(m)) == np.sign(f(a)):
            a = m
        else:
            b = m
    return 0.5 * (a + b)


def test_bs_root_matches_scan_oracle(frame, field2r):
    ref = _scan_root(lambda w: bs_residual(w, 1, 30, frame, field2r), 70.0, 100.0, 1e-4)
    sol = bs_eigenvalue(1, 30, frame, field2r)
    assert sol.omega == pytest.approx(ref, rel=1e-12)
    assert sol.omega == pytest.approx(BS_1_30_PLUS, rel=1e-10)


def test_bs_solution_invariants(frame, field2r):
    for p, q, lam in [(1, 30, 1), (2, 60, -1), (3, 120, 1), (1, 20, 0)]:
        f = field2r.with_lam(lam)
        s = bs_eigenvalue(p, q, frame, f)
        assert s.omega > 0 and 0 < s.xi_ec < frame.xi_bar
        assert abs(bs_residual(s.omega, p, q, frame, f)) <= 1e-8
        assert bs_caustic(s) == s.xi_ec


def test_bs_coefficients_negative(frame):
    co = BsSeriesCoeffs.for_frame(frame)
    assert co.beta01 < 0 and co.beta22 < 0


def test_caustic_collapses_for_vanishing_zero(frame):
    assert bs_caustic_coordinate(90.0, 0.0, frame) == frame.xi_bar


def test_caustic_quadratic_close_to_first_order(frame):
    # the two forms differ by O(omega^-4/3)
    diffs = []
    ws = np.array([100.0, 400.0, 1600.0, 6400.0])
    for w in ws:
        diffs.append(abs(bs_caustic_coordinate(w, airy_zero(1), frame)
                         - bs_caustic_first_order(w, 1, frame)))
    slope = np.polyfit(np.log(ws), np.log(diffs), 1)[0]
    assert slope == pytest.approx(-4 / 3, abs=0.05)


def test_first_order_caustic_in_physical_units(frame):
    w = 86.7
    e = float(omega_to_energy(w, frame))
    assert bs_caustic_from_energy(e, 1, frame) == pytest.approx(
        bs_caustic_first_order(w, 1, frame), rel=1e-12)


def test_lambda_midpoint(frame, field2r):
    for q in (20, 60, 120):
        up = bs_eigenvalue(1, q, frame, field2r).omega
        dn = bs_eigenvalue(1, q, frame, field2r.flipped()).omega
        mid = bs_eigenvalue(1, q, frame, FieldParams.zero()).omega
        assert abs(0.5 * (up + dn) - mid) < 1e-3 * (up - dn)


def test_shift_identity_when_flux_term_is_one_step(frame):
    # with (R/L_B)^2 = 1 the flux term is exactly half an angular step, so the
    # residual of (q+1, -1) coincides with that of (q, +1) at every omega
    f = FieldParams.from_lb_ratio(frame, 1.0, 1)
    w = np.linspace(40.0, 400.0, 37)
    for p in (1, 2, 3):
        for q in (20, 60, 120):
            assert np.allclose(bs_residual(w, p, q + 1, frame, f.flipped()),
                               bs_residual(w, p, q, frame, f), rtol=0, atol=1e-11)


def test_monotone_in_q_and_p(frame, field2r):
    ws = [bs_eigenvalue(1, q, frame, field2r).omega for q in range(15, 60)]
    assert np.all(np.diff(ws) > 0)
    for q in (20, 60, 120):
        ws = [bs_eigenvalue(p, q, frame, field2r).omega for p in (1, 2, 3)]
        assert np.all(np.diff(ws) > 0)


def test_caustic_field_ordering(frame, field2r):
    up = bs_eigenvalue(1, 30, frame, field2r).xi_ec
    zero = bs_eigenvalue(1, 30, frame, FieldParams.zero()).xi_ec
    dn = bs_eigenvalue(1, 30, frame, field2r.flipped()).xi_ec
    assert up > zero > dn


def test_regime_warning(frame):
    with pytest.warns(RuntimeWarning):
        bs_eigenvalue(1, 4, frame, FieldParams.zero())


def test_invalid_field_rejected(frame):
    with pytest.raises(InvalidField):
        bs_eigenvalue(1, 30, frame, FieldParams.from_lb_ratio(frame, 0.3, 1))


# -- ring states ------------------------------------------------------------

def _rs_grid_oracle(frame, field_, p, q, w_lo, w_hi):
    """Dense scan in omega; radial root in xi by bisection at each omega."""
    t = airy_zero(p)

    def xi_of(w):
        a, b = 1e-4, frame.xi_bar
        for _ in range(70):
            m = 0.5 * (a + b)
            if 0.75 * w * radial_action_integral(m, frame.xi_bar) - t**1.5 > 0:
                a = m
            else:
                b = m
        return 0.5 * (a + b)

    def ang(w):
        return rs_residuals(w, xi_of(w), p, q, frame, field_)[1]

    grid = np.linspace(w_lo, w_hi, 61)
    vals = [ang(w) for w in grid]
    i = next(k for k in range(60) if np.sign(vals[k]) != np.sign(vals[k + 1]))
    a, b = grid[i], grid[i + 1]
    for _ in range(60):
        m = 0.5 * (a + b)
        if np.sign(ang(m)) == np.sign(ang(a)):
            a = m
        else:
            b = m
    w = 0.5 * (a + b)
    return w, xi_of(w)


@pytest.mark.parametrize("lam", [0, 1])
def test_rs_matches_grid_oracle(frame, field2r, lam):
    f = field2r.with_lam(lam)
    sol = rs_solve(1, 30, frame, f)
    w, xi = _rs_grid_oracle(frame, f, 1, 30, 80.0, 92.0)
    assert sol.omega == pytest.approx(w, rel=1e-9)
    assert sol.xi_ec == pytest.approx(xi, rel=1e-8)
    assert max(abs(r) for r in rs_residuals(sol.omega, sol.xi_ec, 1, 30, frame, f)) <= 1e-8


def test_rs_zero_field_reduces_to_perimeter_condition(frame):
    sol = rs_solve(1, 40, frame, FieldParams.zero())
    assert sol.omega / 2 * periodic_integral("I1", sol.xi_ec) == pytest.approx(2 * math.pi * 40,
                                                                              rel=1e-10)


@pytest.mark.parametrize("q,lam", [(30, 1), (30, 0), (120, 1), (120, 0)])
def test_rs_below_bs(frame, field2r, q, lam):
    f = field2r.with_lam(lam)
    bs, rs = bs_eigenvalue(1, q, frame, f), rs_solve(1, q, frame, f)
    assert rs.omega < bs.omega
    assert rs.xi_ec < bs.xi_ec


def test_truncated_residual_is_third_order(frame, field2r):
    # at an RS solution the two-term expansion is off by at most omega^(2/3) gap^3
    for q in (60, 120, 240, 480, 960):
        s = rs_solve(1, q, frame, field2r)
        trunc, full = rs_truncated_condition_check(s.omega, s.xi_ec, 1, frame)
        assert abs(full) < 1e-8
        gap = frame.xi_bar - s.xi_ec
        assert abs(trunc) <= s.omega ** (2 / 3) * gap**3


def test_truncated_check_trivial_point(frame):
    trunc, full = rs_truncated_condition_check(50.0, frame.xi_bar, 1, frame, t=0.0)
    assert trunc == 0.0 and full == 0.0


def test_truncated_and_full_roots_close(frame, field2r):
    for q in (100, 120):
        full = rs_solve(1, q, frame, field2r)
        trunc = rs_solve(1, q, frame, field2r, condition="truncated")
        assert abs(trunc.omega - full.omega) / full.omega < 0.005


def test_axes(frame):
    ax = caustic_ellipse_axes(frame.xi_bar, frame)
    assert ax.a == pytest.approx(frame.semi_major) and ax.b == pytest.approx(frame.semi_minor)
    assert ax.a_wire == pytest.approx(frame.radius) and ax.b_wire == pytest.approx(frame.radius)
    assert ax.eccentricity == pytest.approx(frame.eccentricity)
    assert ax.eccentricity_wire == pytest.approx(0.0, abs=1e-7)


def test_axes_eccentricity_examples(frame, field2r):
    for q, e in [(30, 0.833), (120, 0.55)]:
        ax = caustic_ellipse_axes(bs_eigenvalue(1, q, frame, field2r).xi_ec, frame)
        assert ax.eccentricity_wire == pytest.approx(e, abs=0.01)


def test_caustic_past_minor_axis_warns(frame, field2r):
    with pytest.warns(RuntimeWarning, match="past the minor axis"):
        s = bs_eigenvalue(3, 20, frame, field2r)
    assert s.xi_ec < 0
