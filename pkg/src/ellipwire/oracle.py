"""Independent checks: a finite-difference eigensolver and an elliptic billiard.

The finite-difference operator acts on X = x/c, Y = y/c inside the ellipse
X^2/cosh^2(xi_bar) + Y^2/sinh^2(xi_bar) <= 1 with Dirichlet walls:

    H = -lap + i s beta (X d/dY - Y d/dX) + beta^2 (X^2 + Y^2) / 4,

beta = (c/L_B)^2, s = -lam.  Its eigenvalues are omega^2 / 4.  The wall is
handled with a symmetric ghost-point stencil: a link that crosses the wall
at fractional distance theta contributes 1/(theta h^2) to the diagonal and
nothing off-diagonal, which keeps the matrix Hermitian and the eigenvalues
second-order accurate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.interpolate import RegularGridInterpolator
from scipy.sparse.linalg import eigsh

from .errors import ConvergenceFailure
from .geometry import FieldParams, WireFrame
from .specfun import airy_zero
from .whispering_gallery import bs_eigenvalue

MIN_THETA = 1e-3
RESIDUAL_LIMIT = 1e-8


@dataclass
class FdGrid:
    a: float
    b: float
    n: int
    hx: float
    hy: float
    x: np.ndarray
    y: np.ndarray
    inside: np.ndarray  # (n, n) bool, indexed [ix, iy]
    sector: tuple[int, int] | None = None

    @property
    def h(self) -> float:
        return max(self.hx, self.hy)

    def full_field(self, vec) -> np.ndarray:
        """Unknown vector scattered onto the full (n, n) grid, unfolding symmetry sectors."""
        F = np.zeros(self.inside.shape, dtype=np.asarray(vec).dtype)
        F[self.inside] = vec
        if self.sector is not None:
            px, py = self.sector
            F = F + px * F[::-1, :]
            F = F + py * F[:, ::-1]
        return F


@dataclass
class OracleSpectrum:
    h: float
    n_interior: int
    eigen_omegas: np.ndarray
    field: FieldParams
    grid: FdGrid
    vectors: np.ndarray | None = None
    max_residual: float = 0.0


def _grid(a: float, b: float, n: int, sector=None) -> FdGrid:
    hx, hy = 2 * a / (n + 1), 2 * b / (n + 1)
    x = -a + hx * np.arange(1, n + 1)
    y = -b + hy * np.arange(1, n + 1)
    X, Y = np.meshgrid(x, y, indexing="ij")
    inside = (X / a) ** 2 + (Y / b) ** 2 < 1
    if sector is not None:
        if n % 2:
            raise ValueError("symmetry sectors need an even grid size")
        inside &= (X > 0) & (Y > 0)
    return FdGrid(a, b, n, hx, hy, x, y, inside, sector)


def build_operator(a: float, b: float, n: int, beta: float = 0.0, lam: int = 0,
                   sector: tuple[int, int] | None = None):
    """Sparse FD matrix on an n x n grid over the box of the ellipse (a, b).

    ``sector=(px, py)`` restricts to the quadrant X, Y > 0 with the given
    parities under X -> -X and Y -> -Y (field-free only).
    """
    if sector is not None and beta != 0:
        raise ValueError("symmetry sectors are only exact without field")
    g = _grid(a, b, n, sector)
    idx = -np.ones(g.inside.shape, dtype=np.int64)
    count = int(g.inside.sum())
    idx[g.inside] = np.arange(count)
    I, J = np.nonzero(g.inside)
    k = idx[I, J]
    px, py = g.x[I], g.y[J]
    dtype = complex if beta != 0 else float
    diag = np.zeros(count, dtype=dtype)
    rows, cols, vals = [], [], []
    s = -lam
    for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        h = g.hx if di else g.hy
        I2, J2 = I + di, J + dj
        in_box = (I2 >= 0) & (I2 < n) & (J2 >= 0) & (J2 < n)
        nb = np.full(I.shape, -1)
        nb[in_box] = idx[I2[in_box], J2[in_box]]
        linked = nb >= 0
        off = np.full(linked.sum(), -1.0 / h**2, dtype=dtype)
        if beta != 0:
            if di:
                off = off + 1j * s * beta * (-py[linked]) * di / (2 * h)
            else:
                off = off + 1j * s * beta * px[linked] * dj / (2 * h)
        rows.append(k[linked])
        cols.append(nb[linked])
        vals.append(off)
        np.add.at(diag, k[linked], 1.0 / h**2)

        rest = ~linked
        if sector is not None:
            # neighbour across a symmetry axis: fold it back with the parity sign
            if di == -1:
                mirror = rest & (I == n // 2)
            elif dj == -1:
                mirror = rest & (J == n // 2)
            else:
                mirror = np.zeros_like(rest)
            if mirror.any():
                sign = sector[0] if di else sector[1]
                np.add.at(diag, k[mirror], (1.0 - sign) / h**2)
            rest = rest & ~mirror
        bx, by = px[rest], py[rest]
        if di:
            wall = np.sign(di) * g.a * np.sqrt(np.maximum(1 - (by / g.b) ** 2, 0.0))
            theta = np.abs(wall - bx) / h
        else:
            wall = np.sign(dj) * g.b * np.sqrt(np.maximum(1 - (bx / g.a) ** 2, 0.0))
            theta = np.abs(wall - by) / h
        theta = np.clip(theta, MIN_THETA, 1.0)
        np.add.at(diag, k[rest], 1.0 / (theta * h**2))
    if beta != 0:
        diag += beta**2 * (px**2 + py**2) / 4
    H = sparse.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                          shape=(count, count)).tocsr()
    H = (H + sparse.diags(diag)).tocsr()
    return H, g


def _solve(H, n_eigs: int, sigma: float | None, want_vectors: bool):
    k = min(n_eigs, H.shape[0] - 2)
    shift = 0.0 if sigma is None else sigma
    try:
        w, v = eigsh(H, k=k, sigma=shift, which="LM", tol=0)
    except Exception as exc:  # ArpackNoConvergence and factorization errors
        raise ConvergenceFailure(f"eigensolver failed: {exc}") from exc
    w = w.real
    res = np.linalg.norm(H @ v - v * w, axis=0) / np.linalg.norm(v, axis=0)
    max_res = float(res.max())
    if max_res > RESIDUAL_LIMIT * max(1.0, float(np.abs(w).max())):
        raise ConvergenceFailure(f"eigenpair residual {max_res:g} too large")
    order = np.argsort(w)
    return w[order], (v[:, order] if want_vectors else None), max_res


def fd_eigensolve_domain(a: float, b: float, n_grid: int, n_eigs: int, beta: float = 0.0,
                         lam: int = 0, omega_target: float | None = None,
                         sector=None, want_vectors: bool = False,
                         field: FieldParams | None = None) -> OracleSpectrum:
    """FD spectrum of the ellipse with semi-axes (a, b) in units of the focal distance."""
    if n_grid < 16:
        raise ValueError("n_grid too small")
    H, g = build_operator(a, b, n_grid, beta, lam, sector)
    sigma = None if omega_target is None else omega_target**2 / 4
    w, v, res = _solve(H, n_eigs, sigma, want_vectors)
    omegas = 2 * np.sqrt(np.maximum(w, 0.0))
    return OracleSpectrum(g.h, H.shape[0], omegas, field or FieldParams.zero(), g, v, res)


def fd_eigensolve(frame: WireFrame, field: FieldParams, n_grid: int = 400, n_eigs: int = 10,
                  omega_target: float | None = None, sector=None,
                  want_vectors: bool = False) -> OracleSpectrum:
    """Lowest (or nearest to ``omega_target``) FD eigenvalues of the wire, as omega."""
    a, b = math.cosh(frame.xi_bar), math.sinh(frame.xi_bar)
    return fd_eigensolve_domain(a, b, n_grid, n_eigs, field.beta_c, field.lam, omega_target,
                                sector, want_vectors, field)


def fd_eigensolve_circle(n_grid: int, n_eigs: int = 3) -> OracleSpectrum:
    """Unit disk, used to check against Bessel zeros (omega/2 = j_{m,k})."""
    return fd_eigensolve_domain(1.0, 1.0, n_grid, n_eigs)


# -- node counting and the boundary-state cross-check -----------------------------

def ring_sign_changes(grid: FdGrid, F, xi: float, samples: int = 4000) -> int:
    """Sign changes of Re F around the confocal ellipse xi (unit focal distance)."""
    phi = np.linspace(0, 2 * np.pi, samples, endpoint=False)
    pts = np.c_[np.cosh(xi) * np.cos(phi), np.sinh(xi) * np.sin(phi)]
    vals = RegularGridInterpolator((grid.x, grid.y), np.real(F), bounds_error=False,
                                   fill_value=0.0)(pts)
    sg = np.sign(vals)
    return int(np.sum(sg != np.roll(sg, 1)))


def ring_winding(grid: FdGrid, F, xi: float, samples: int = 4000) -> float:
    """Phase winding number of a complex field around the confocal ellipse xi."""
    phi = np.linspace(0, 2 * np.pi, samples, endpoint=False)
    pts = np.c_[np.cosh(xi) * np.cos(phi), np.sinh(xi) * np.sin(phi)]
    re = RegularGridInterpolator((grid.x, grid.y), F.real, bounds_error=False, fill_value=0.0)(pts)
    im = RegularGridInterpolator((grid.x, grid.y), F.imag, bounds_error=False, fill_value=0.0)(pts)
    z = re + 1j * im
    return float(np.sum(np.angle(np.roll(z, -1) / z)) / (2 * np.pi))


def _probe_ring(frame: WireFrame, omega: float, p: int = 1) -> float:
    # xi where the p = 1 Airy lobe peaks: argument -1.0188 instead of -t_1
    from .whispering_gallery import bs_caustic_coordinate
    xi_ec = bs_caustic_coordinate(omega, airy_zero(p), frame)
    return frame.xi_bar - (1.0188 / airy_zero(p) if p == 1 else 0.5) * (frame.xi_bar - xi_ec)


@dataclass
class CrossCheckRow:
    q: int
    semiclassical: float
    fd: float | None

    @property
    def rel_error(self) -> float | None:
        if self.fd is None:
            return None
        return (self.semiclassical - self.fd) / self.fd


def bs_fd_crosscheck(frame: WireFrame, q_values, p: int = 1, n_grid: int = 400,
                     window: float = 0.10, n_eigs: int = 12) -> list[CrossCheckRow]:
    """Pair zero-field BS levels with FD eigenstates that have q angular nodes.

    For each q the FD problem is solved in the quadrant sector holding the
    cos(q theta)-like partner (x-parity (-1)^q, y-even) near the semiclassical
    value; the lowest eigenstate within ``window`` (relative) whose probe ring
    shows 2q sign changes is taken.
    """
    from .geometry import FieldParams as _FP
    n = n_grid + (n_grid % 2)
    a, b = math.cosh(frame.xi_bar), math.sinh(frame.xi_bar)
    zero = _FP.zero()
    cache: dict = {}
    rows = []
    for q in q_values:
        sc = bs_eigenvalue(p, q, frame, zero).omega
        sector = ((-1) ** q, 1)
        if sector not in cache:
            cache[sector] = build_operator(a, b, n, sector=sector)
        H, g = cache[sector]
        xi_probe = _probe_ring(frame, sc, p)
        found = None
        target = sc * (1 - 0.01)
        for attempt in range(3):
            w, v, _ = _solve(H, n_eigs * (attempt + 1), target**2 / 4, True)
            om = 2 * np.sqrt(np.maximum(w, 0.0))
            for i in np.argsort(om):
                if abs(om[i] - sc) > window * sc:
                    continue
                F = g.full_field(v[:, i])
                if ring_sign_changes(g, F, xi_probe) == 2 * q:
                    found = float(om[i])
                    break
            if found is not None:
                break
        rows.append(CrossCheckRow(q, sc, found))
    return rows


def fd_field_split(frame: WireFrame, field: FieldParams, q: int, n_grid: int = 300,
                   n_eigs: int = 30) -> dict:
    """Eigenvalues of the FD states winding +q and -q around the wire.

    Used only as a qualitative check of the field-induced splitting.
    """
    bs0 = bs_eigenvalue(1, q, frame, FieldParams.zero()).omega
    res = fd_eigensolve(frame, field, n_grid, n_eigs, omega_target=bs0, want_vectors=True)
    xi_probe = _probe_ring(frame, bs0)
    found: dict[int, float] = {}
    for i in np.argsort(res.eigen_omegas):
        F = res.grid.full_field(res.vectors[:, i])
        wind = round(ring_winding(res.grid, F, xi_probe))
        if abs(wind) == q and wind not in found:
            found[wind] = float(res.eigen_omegas[i])
    return {"plus": found.get(q), "minus": found.get(-q),
            "split": (abs(found[q] - found[-q]) if q in found and -q in found else None)}


# -- level matching -------------------------------------------------------------

@dataclass
class MatchReport:
    pairs: list  # (semiclassical, oracle, relative error)
    unpaired_semiclassical: list
    unpaired_oracle: list

    @property
    def errors(self) -> np.ndarray:
        return np.array([e for _, _, e in self.pairs])

    @property
    def median_error(self) -> float:
        return float(np.median(np.abs(self.errors))) if self.pairs else math.nan

    @property
    def max_error(self) -> float:
        return float(np.max(np.abs(self.errors))) if self.pairs else math.nan


def match_report(semiclassical, oracle) -> MatchReport:
    """Greedy nearest-neighbour pairing of two level lists.

    A semiclassical level may only pair with an oracle level closer than half
    the local semiclassical spacing.  Closest candidate pairs are committed
    first.  Errors are (semiclassical - oracle) / oracle.
    """
    sc = np.sort(np.asarray([getattr(s, "omega", s) for s in semiclassical], dtype=float))
    orc = np.sort(np.asarray(getattr(oracle, "eigen_omegas", oracle), dtype=float))
    if sc.size == 0 or orc.size == 0:
        return MatchReport([], list(sc), list(orc))
    if sc.size > 1:
        gaps = np.diff(sc)
        local = np.empty_like(sc)
        local[0], local[-1] = gaps[0], gaps[-1]
        local[1:-1] = np.minimum(gaps[:-1], gaps[1:])
        half = 0.5 * local
    else:
        half = np.array([math.inf])
    cand = []
    for i, s in enumerate(sc):
        for j in np.nonzero(np.abs(orc - s) <= half[i])[0]:
            cand.append((abs(orc[j] - s), i, int(j)))
    cand.sort()
    used_s, used_o, pairs = set(), set(), []
    for _, i, j in cand:
        if i in used_s or j in used_o:
            continue
        used_s.add(i)
        used_o.add(j)
        pairs.append((float(sc[i]), float(orc[j]), float((sc[i] - orc[j]) / orc[j])))
    pairs.sort()
    return MatchReport(pairs,
                       [float(sc[i]) for i in range(sc.size) if i not in used_s],
                       [float(orc[j]) for j in range(orc.size) if j not in used_o])


# -- elliptic billiard ------------------------------------------------------------

@dataclass
class BilliardReport:
    points: np.ndarray  # bounce points, (n_bounces + 1, 2)
    conic: np.ndarray  # confocal parameter kappa of every chord
    max_deviation: float

    def caustic_axes(self, a: float, b: float) -> tuple[float, float]:
        """Semi-axes sqrt(a^2 - kappa), sqrt(b^2 - kappa) of the common caustic."""
        k = float(np.mean(self.conic))
        return math.sqrt(a * a - k), math.sqrt(max(b * b - k, 0.0))


def chord_conic_parameter(p0, p1, a: float, b: float) -> float:
    """kappa of the confocal conic x^2/(a^2-k) + y^2/(b^2-k) = 1 tangent to a line."""
    d = np.asarray(p1, float) - np.asarray(p0, float)
    nrm = np.array([-d[1], d[0]]) / math.hypot(d[0], d[1])
    h = float(nrm @ np.asarray(p0, float))
    return a * a * nrm[0] ** 2 + b * b * nrm[1] ** 2 - h * h


def billiard_trace(a: float, b: float, start, direction, n_bounces: int) -> BilliardReport:
    """Specular billiard inside x^2/a^2 + y^2/b^2 = 1 from a boundary point."""
    P = np.asarray(start, dtype=float).copy()
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    normal = np.array([P[0] / a**2, P[1] / b**2])
    if d @ normal >= 0:
        raise ValueError("launch direction must point into the ellipse")
    pts = np.empty((n_bounces + 1, 2))
    pts[0] = P
    w = np.array([1 / a**2, 1 / b**2])
    for i in range(n_bounces):
        t = -2.0 * np.sum(P * d * w) / np.sum(d * d * w)
        P = P + t * d
        P = P / math.sqrt(np.sum(P * P * w))  # stay on the wall
        nv = P * w
        nv = nv / np.linalg.norm(nv)
        d = d - 2 * (d @ nv) * nv
        d = d / np.linalg.norm(d)
        pts[i + 1] = P
    seg = pts[1:] - pts[:-1]
    nrm = np.c_[-seg[:, 1], seg[:, 0]] / np.hypot(seg[:, 0], seg[:, 1])[:, None]
    hh = np.sum(nrm * pts[:-1], axis=1)
    kappa = a * a * nrm[:, 0] ** 2 + b * b * nrm[:, 1] ** 2 - hh * hh
    return BilliardReport(pts, kappa, float(np.max(np.abs(kappa - kappa[0]))))


def tangent_launch(a: float, b: float, xi_c: float, t: float = 0.3):
    """Boundary point and inward direction of a ray tangent to the confocal ellipse xi_c.

    Assumes unit focal distance, so the caustic has semi-axes cosh, sinh of xi_c.
    """
    A, B = math.cosh(xi_c), math.sinh(xi_c)
    Q = np.array([A * math.cos(t), B * math.sin(t)])
    T = np.array([-A * math.sin(t), B * math.cos(t)])
    T /= np.linalg.norm(T)
    w = np.array([1 / a**2, 1 / b**2])
    # Q - s T on the wall, s > 0
    qa, qb, qc = np.sum(T * T * w), -2 * np.sum(Q * T * w), np.sum(Q * Q * w) - 1
    s = (-qb + math.sqrt(qb * qb - 4 * qa * qc)) / (2 * qa)
    return Q - s * T, T


def focus_launch(a: float, b: float, angle: float = 1.0):
    """Boundary point at parametric ``angle`` aimed at the focus (+c, 0)."""
    c = math.sqrt(a * a - b * b)
    P = np.array([a * math.cos(angle), b * math.sin(angle)])
    return P, np.array([c, 0.0]) - P


def envelope_axes(report: BilliardReport) -> tuple[float, float]:
    """Inner envelope of the chord set from the smallest axis crossings."""
    p0, p1 = report.points[:-1], report.points[1:]
    ax = by = math.inf
    crosses_x = np.sign(p0[:, 1]) != np.sign(p1[:, 1])
    if crosses_x.any():
        s = p0[crosses_x, 1] / (p0[crosses_x, 1] - p1[crosses_x, 1])
        x0 = p0[crosses_x, 0] + s * (p1[crosses_x, 0] - p0[crosses_x, 0])
        ax = float(np.min(np.abs(x0)))
    crosses_y = np.sign(p0[:, 0]) != np.sign(p1[:, 0])
    if crosses_y.any():
        s = p0[crosses_y, 0] / (p0[crosses_y, 0] - p1[crosses_y, 0])
        y0 = p0[crosses_y, 1] + s * (p1[crosses_y, 1] - p0[crosses_y, 1])
        by = float(np.min(np.abs(y0)))
    return ax, by
