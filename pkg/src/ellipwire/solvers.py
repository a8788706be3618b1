"""Scalar bracketed root finding and a damped 2-D Newton iteration."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .errors import LeftBounds, MaxIterations, NoSignChange, SingularJacobian

DEFAULT_TOL = 1e-10


@dataclass
class SolveReport:
    iterations: int
    residual: float
    converged: bool
    history: list = field(default_factory=list)


def scalar_root(f, bracket, tol: float = DEFAULT_TOL, maxiter: int = 200):
    """Root of ``f`` inside ``bracket`` by Brent's method.

    ``f`` is only ever evaluated inside the closed bracket.  The iteration
    runs to machine precision in x, so on return either ``|f(root)| <= tol``
    or the bracket has collapsed below 1e-14 relative.

    Returns
    -------
    (root, SolveReport)
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo, SolveReport(0, 0.0, True)
    if fhi == 0:
        return hi, SolveReport(0, 0.0, True)
    if np.sign(flo) == np.sign(fhi):
        raise NoSignChange(f"f({lo}) = {flo:g} and f({hi}) = {fhi:g} have the same sign")
    try:
        root, info = optimize.brentq(f, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps,
                                     maxiter=maxiter, full_output=True, disp=False)
    except RuntimeError as exc:  # pragma: no cover - brentq only raises this with disp=True
        raise MaxIterations(str(exc)) from exc
    if not info.converged:
        raise MaxIterations(f"no convergence in {maxiter} iterations ({info.flag})")
    residual = abs(f(root))
    return root, SolveReport(info.iterations, residual, True)


def widen_bracket(f, seed: float, factor: float = 1.05, lower: float = 1e-12,
                  max_steps: int = 200):
    """Geometrically grow ``[seed/factor, seed*factor]`` until ``f`` changes sign."""
    lo, hi = seed / factor, seed * factor
    flo, fhi = f(lo), f(hi)
    for _ in range(max_steps):
        if np.sign(flo) != np.sign(fhi):
            return lo, hi
        lo, hi = max(lo / factor, lower), hi * factor
        flo, fhi = f(lo), f(hi)
    raise NoSignChange(f"no sign change found around {seed:g}")


def _fd_jacobian(F, x, r0, scale):
    jac = np.empty((len(r0), len(x)))
    for j in range(len(x)):
        h = 1e-6 * scale[j]
        xp, xm = x.copy(), x.copy()
        xp[j] += h
        xm[j] -= h
        jac[:, j] = (np.asarray(F(xp)) - np.asarray(F(xm))) / (2 * h)
    return jac


def newton_2d(F, seed, tol: float = DEFAULT_TOL, bounds=None, maxiter: int = 60,
              scale=None):
    """Damped Newton iteration for a 2x2 nonlinear system.

    The Jacobian comes from central differences with step 1e-6 * scale.  When
    a full step does not decrease the infinity norm of the residual, the step
    is halved (at most 30 times).  Iterates are clamped to ``bounds``, given
    as ``((u_lo, u_hi), (v_lo, v_hi))``.

    Returns
    -------
    ((u, v), SolveReport)
    """
    x = np.asarray(seed, dtype=float).copy()
    if bounds is not None:
        lo = np.array([b[0] for b in bounds], dtype=float)
        hi = np.array([b[1] for b in bounds], dtype=float)
    else:
        lo = np.full(2, -np.inf)
        hi = np.full(2, np.inf)
    if scale is None:
        scale = np.maximum(np.abs(x), 1.0)
    scale = np.asarray(scale, dtype=float)

    r = np.asarray(F(x), dtype=float)
    norm = np.max(np.abs(r))
    history = [norm]
    for it in range(1, maxiter + 1):
        if norm <= tol:
            return (x[0], x[1]), SolveReport(it - 1, norm, True, history)
        jac = _fd_jacobian(F, x, r, scale)
        if not np.all(np.isfinite(jac)) or abs(np.linalg.det(jac)) < 1e-300:
            raise SingularJacobian(f"singular Jacobian at {x}")
        try:
            step = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError as exc:
            raise SingularJacobian(str(exc)) from exc
        t = 1.0
        for _ in range(31):
            trial = np.clip(x + t * step, lo, hi)
            r_trial = np.asarray(F(trial), dtype=float)
            n_trial = np.max(np.abs(r_trial))
            if np.isfinite(n_trial) and n_trial < norm:
                break
            t *= 0.5
        else:
            if np.any(x <= lo) or np.any(x >= hi):
                raise LeftBounds(f"iterate pinned to bounds at {x}")
            raise MaxIterations(f"no descent direction at {x} (residual {norm:g})")
        x, r, norm = trial, r_trial, n_trial
        history.append(norm)
    if norm <= tol:
        return (x[0], x[1]), SolveReport(maxiter, norm, True, history)
    raise MaxIterations(f"residual {norm:g} after {maxiter} iterations")
