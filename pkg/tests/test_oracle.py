import math

import numpy as np
import pytest

from ellipwire.geometry import FieldParams
from ellipwire.oracle import (billiard_trace, build_operator, envelope_axes, fd_eigensolve,
                              fd_eigensolve_circle, fd_eigensolve_domain, fd_field_split,
                              focus_launch, match_report, tangent_launch, bs_fd_crosscheck)
from ellipwire.whispering_gallery import bs_eigenvalue, caustic_ellipse_axes

J01 = 2.404825557695773


def test_circle_bessel_zero_second_order():
    e1 = fd_eigensolve_circle(100, 1).eigen_omegas[0] / 2 - J01
    e2 = fd_eigensolve_circle(200, 1).eigen_omegas[0] / 2 - J01
    assert abs(e2) < 5e-5
    assert math.log2(e1 / e2) == pytest.approx(2.0, abs=0.2)


def test_richardson_order_on_bi_ellipse(frame):
    z = FieldParams.zero()
    w = [fd_eigensolve(frame, z, n, 1).eigen_omegas[0] for n in (100, 200, 400)]
    assert math.log2((w[0] - w[1]) / (w[1] - w[2])) == pytest.approx(2.0, abs=0.2)


def test_operator_hermitian(frame, field2r):
    H, _ = build_operator(math.cosh(frame.xi_bar), math.sinh(frame.xi_bar), 60,
                          field2r.beta_c, field2r.lam)
    assert (H - H.conj().T).count_nonzero() == 0


def test_weak_field_limit(frame):
    a, b = math.cosh(frame.xi_bar), math.sinh(frame.xi_bar)
    w0 = fd_eigensolve_domain(a, b, 80, 6).eigen_omegas
    w1 = fd_eigensolve_domain(a, b, 80, 6, beta=1e-8, lam=1).eigen_omegas
    assert np.allclose(w0, w1, rtol=1e-6)


def test_sectors_reproduce_full_spectrum(frame):
    a, b = math.cosh(frame.xi_bar), math.sinh(frame.xi_bar)
    full = fd_eigensolve_domain(a, b, 80, 12).eigen_omegas
    parts = np.sort(np.concatenate([
        fd_eigensolve_domain(a, b, 80, 6, sector=s).eigen_omegas
        for s in [(1, 1), (1, -1), (-1, 1), (-1, -1)]]))
    assert np.allclose(full[:8], parts[:8], rtol=1e-10)


def test_eigenpair_residuals_small(frame):
    res = fd_eigensolve(frame, FieldParams.zero(), 120, 5)
    assert res.max_residual < 1e-8 * max(1.0, res.eigen_omegas.max() ** 2 / 4)
    assert np.all(np.diff(res.eigen_omegas) >= 0)


def test_nearest_fd_level_to_bs(frame):
    bs = bs_eigenvalue(1, 30, frame, FieldParams.zero()).omega
    res = fd_eigensolve(frame, FieldParams.zero(), 200, 6, omega_target=bs)
    nearest = res.eigen_omegas[np.argmin(np.abs(res.eigen_omegas - bs))]
    assert abs(nearest - bs) / bs < 0.02


def test_crosscheck_identifies_angular_nodes(frame):
    rows = bs_fd_crosscheck(frame, [20, 21], n_grid=200)
    for r in rows:
        assert r.fd is not None and abs(r.rel_error) < 0.04


def test_field_split_direction(frame, field2r):
    res = fd_field_split(frame, field2r, 20, n_grid=200, n_eigs=24)
    bs_split = (bs_eigenvalue(1, 20, frame, field2r).omega
                - bs_eigenvalue(1, 20, frame, field2r.flipped()).omega)
    assert res["split"] is not None
    assert res["plus"] > res["minus"]
    assert 0.3 * bs_split < res["split"] < 3 * bs_split


def test_match_report_self_and_offset():
    levels = np.array([10.0, 12.5, 15.1, 17.4, 20.0])
    rep = match_report(levels, levels)
    assert rep.max_error == 0 and not rep.unpaired_semiclassical
    rep = match_report(levels * 1.01, levels)
    assert np.allclose(rep.errors, 0.01)
    rep = match_report(levels, np.array([10.05, 30.0]))
    assert len(rep.pairs) == 1 and rep.unpaired_oracle == [30.0]


def test_billiard_tangency_conserved(frame):
    a, b = math.cosh(frame.xi_bar), math.sinh(frame.xi_bar)
    P, d = tangent_launch(a, b, 0.24)
    rep = billiard_trace(a, b, P, d, 10_000)
    assert rep.max_deviation < 1e-9
    A, B = rep.caustic_axes(a, b)
    assert A == pytest.approx(math.cosh(0.24), rel=1e-9)
    assert B == pytest.approx(math.sinh(0.24), rel=1e-9)


def test_billiard_focal_chords(frame):
    a, b = math.cosh(frame.xi_bar), math.sinh(frame.xi_bar)
    P, d = focus_launch(a, b)
    rep = billiard_trace(a, b, P, d, 4)
    for i, (p0, p1) in enumerate(zip(rep.points[:-1], rep.points[1:])):
        seg = p1 - p0
        n = np.array([-seg[1], seg[0]]) / np.hypot(*seg)
        focus = np.array([1.0 if i % 2 == 0 else -1.0, 0.0])
        assert abs(n @ (focus - p0)) < 1e-9


def test_billiard_envelope_matches_bs_caustic(frame):
    xi_ec = bs_eigenvalue(1, 30, frame, FieldParams.zero()).xi_ec
    a, b = math.cosh(frame.xi_bar), math.sinh(frame.xi_bar)
    P, d = tangent_launch(a, b, xi_ec)
    ax, by = envelope_axes(billiard_trace(a, b, P, d, 10_000))
    ref = caustic_ellipse_axes(xi_ec, frame)
    assert ax * frame.c == pytest.approx(ref.a, rel=1e-3)
    assert by * frame.c == pytest.approx(ref.b, rel=1e-3)


def test_billiard_rejects_outward_launch():
    with pytest.raises(ValueError):
        billiard_trace(2.0, 1.0, (2.0, 0.0), (1.0, 0.0), 3)
