"""Command-line interface: ``ellipwire <command> [options]``.

Exit codes: 0 success, 1 verification or oracle failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .errors import EllipwireError, InvalidField
from .geometry import (FieldParams, MaterialParams, PRESETS, build_frame, field_from_tesla,
                       omega_to_energy)
from .jumping_ball import hcs_solve, hos_band_average, hos_caustic_band, hos_eigenvalue
from .whispering_gallery import bs_eigenvalue, caustic_ellipse_axes, rs_solve

CONFIG_SECTION = "ellipwire"
CLASSES = ("bs", "rs", "hcs", "hos")

# Identifiers of the relation each reported number comes from.
RELATIONS = {
    "bs": {"omega": "bs-angular-quantization", "caustic": "bs-caustic-quadratic"},
    "rs": {"omega": "rs-action-and-angular-system", "caustic": "rs-action-and-angular-system"},
    "hcs": {"omega": "hcs-transverse-and-axial-system", "caustic": "hcs-transverse-and-axial-system"},
    "hos": {"omega": "hos-closed-form", "caustic": "hos-band-average"},
}


class UsageError(Exception):
    pass


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.9g}"
    return str(v)


def _num(v):
    """JSON-safe number rounded to 9 significant digits."""
    if v is None:
        return None
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return int(v)
    v = float(v)
    return float(f"{v:.9g}") if math.isfinite(v) else None


def parse_range(text: str) -> list[int]:
    """'5', '1,2,3' or '2:130' (inclusive) -> list of ints."""
    out: list[int] = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            lo, hi = (int(s) for s in part.split(":", 1))
            out.extend(range(lo, hi + 1))
        else:
            out.append(int(part))
    return out


def _threads() -> int:
    raw = os.environ.get("ELLIPWIRE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


# -- configuration --------------------------------------------------------------

_CONFIG_DEST = {"lambda": "lam", "class": "cls"}


def _merge_config(args) -> None:
    if not args.config:
        return
    cp = configparser.ConfigParser()
    if not cp.read(args.config):
        raise UsageError(f"cannot read config file {args.config}")
    if not cp.has_section(CONFIG_SECTION):
        raise UsageError(f"config file needs a [{CONFIG_SECTION}] section")
    for key, value in cp.items(CONFIG_SECTION):
        dest = _CONFIG_DEST.get(key, key.replace("-", "_"))
        if dest in ("config", "command") or not hasattr(args, dest):
            raise UsageError(f"unknown config key {key!r}")
        if getattr(args, dest) is None:
            setattr(args, dest, value)


def _material(args) -> MaterialParams:
    choice = args.material or "bi-t-hole"
    if choice in PRESETS:
        radius = float(args.radius) if args.radius is not None else 500.0
        return MaterialParams.preset(choice, radius)
    try:
        m1, m2, r = (float(s) for s in choice.split(","))
    except ValueError:
        raise UsageError(f"--material must be a preset {sorted(PRESETS)} or m1,m2,R") from None
    if args.radius is not None:
        raise UsageError("--radius only applies to presets")
    return MaterialParams(m1, m2, r)


def _field_magnitude(args, frame) -> FieldParams | None:
    if args.lb_ratio is not None and args.tesla is not None:
        raise UsageError("give either --lb-ratio or --tesla, not both")
    if args.lb_ratio is not None:
        return FieldParams.from_lb_ratio(frame, float(args.lb_ratio), 1)
    if args.tesla is not None:
        b = float(args.tesla)
        return field_from_tesla(b, frame) if b > 0 else None
    return None


def _lambdas(args, base: FieldParams | None) -> list[int]:
    if args.lam is None:
        return [1, -1] if base is not None else [0]
    lams = parse_range(args.lam)
    if any(l not in (-1, 0, 1) for l in lams):
        raise UsageError("--lambda values must be -1, 0 or 1")
    if base is None and any(lams):
        raise UsageError("--lambda +-1 needs a field (--lb-ratio or --tesla)")
    return lams


def _oriented(base: FieldParams | None, lam: int) -> FieldParams:
    if base is None or lam == 0:
        return FieldParams.zero()
    return base.with_lam(lam)


def _setup(args):
    _merge_config(args)
    try:
        frame = build_frame(_material(args))
    except (ValueError, KeyError) as exc:
        raise UsageError(str(exc)) from exc
    return frame, _field_magnitude(args, frame)


# -- solving one state --------------------------------------------------------------

def solve_state(cls: str, p: int, q: int, frame, field_: FieldParams, parity: str | None):
    if cls == "bs":
        return bs_eigenvalue(p, q, frame, field_)
    if cls == "rs":
        return rs_solve(p, q, frame, field_)
    if cls == "hcs":
        return hcs_solve(p, q, parity, frame, field_)
    if cls == "hos":
        return hos_eigenvalue(p, q, frame, field_)
    raise UsageError(f"unknown class {cls!r}")


def _row(cls, p, q, lam, parity, frame, field_):
    row = {"class": cls, "p": p, "q": q, "lambda": lam, "parity": parity or "",
           "omega": None, "energy_meV": None, "caustic": None, "residual": None, "error": ""}
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            sol = solve_state(cls, p, q, frame, field_, parity)
        row.update(omega=sol.omega, energy_meV=float(omega_to_energy(sol.omega, frame)),
                   caustic=sol.caustic, residual=float(sol.report.residual))
        if cls == "hos":
            row["parity"] = sol.parity
            if sol.note:
                row["error"] = sol.note
    except (EllipwireError, ValueError) as exc:
        row["error"] = type(exc).__name__
    return row


def _emit_rows(rows, columns, args, meta=None):
    out = sys.stdout
    close = False
    if args.out:
        out = open(args.out, "w", newline="")
        close = True
    try:
        if (args.format or "csv") == "json":
            doc = {"meta": meta or {}, "rows": [{k: (_num(r[k]) if not isinstance(r[k], str)
                                                     else r[k]) for k in columns} for r in rows]}
            out.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        else:
            w = csv.writer(out)
            w.writerow(columns)
            for r in rows:
                w.writerow([fmt(r[k]) for k in columns])
    finally:
        if close:
            out.close()


def _check_class(args):
    cls = (args.cls or "").lower()
    if cls not in CLASSES:
        raise UsageError(f"--class must be one of {', '.join(CLASSES)}")
    return cls


def _parities(args, cls):
    if cls != "hcs":
        return [None]
    pars = [s.strip() for s in (args.parity or "even,odd").split(",") if s.strip()]
    if not pars or any(p not in ("even", "odd") for p in pars):
        raise UsageError("--parity must be even, odd or both")
    return pars


def _quantum_ranges(args, cls):
    try:
        ps = parse_range(args.p) if args.p is not None else []
        qs = parse_range(args.q) if args.q is not None else []
    except ValueError:
        raise UsageError("bad --p/--q range") from None
    if not ps or not qs:
        raise UsageError("--p and --q ranges must be non-empty")
    if min(ps) < 1 or min(qs) < (0 if cls == "hos" else 1):
        raise UsageError("quantum numbers out of range")
    return ps, qs


# -- commands -------------------------------------------------------------------------

def cmd_spectrum(args) -> int:
    frame, base = _setup(args)
    cls = _check_class(args)
    ps, qs = _quantum_ranges(args, cls)
    lams = _lambdas(args, base) if cls in ("bs", "rs", "hos") else [0]
    if cls == "hcs" and args.lam is not None:
        lams = _lambdas(args, base)
    jobs = [(cls, p, q, lam, par) for p in ps for q in qs for lam in lams
            for par in _parities(args, cls)]
    jobs.sort(key=lambda j: (j[1], j[2], -j[3], j[4] or ""))
    for _, _, _, lam, _ in jobs:
        if lam and cls in ("bs", "rs") and not _oriented(base, lam).valid:
            raise UsageError("field outside the weak-field regime (c/L_B >= 1)")

    def run(job):
        c, p, q, lam, par = job
        return _row(c, p, q, lam, par, frame, _oriented(base, lam))

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        rows = list(pool.map(run, jobs))
    cols = ["class", "p", "q", "lambda", "parity", "omega", "energy_meV", "caustic",
            "residual", "error"]
    meta = {"relations": RELATIONS[cls], "c_nm": _num(frame.c), "xi_bar": _num(frame.xi_bar),
            "lb_over_r": _num(base.lb_over_r) if base else None}
    _emit_rows(rows, cols, args, meta)
    return 0


def _single_state(args):
    frame, base = _setup(args)
    cls = _check_class(args)
    ps, qs = _quantum_ranges(args, cls)
    if len(ps) != 1 or len(qs) != 1:
        raise UsageError("give a single --p and --q")
    lams = _lambdas(args, base)
    lam = lams[0] if len(lams) == 1 else (1 if base else 0)
    parity = _parities(args, cls)[0] if cls == "hcs" else None
    if cls == "hcs" and args.parity and "," in args.parity:
        raise UsageError("give a single --parity")
    field_ = _oriented(base, lam)
    if cls == "hos" and not field_.valid:
        print("warning: c/L_B >= 1, outside the weak-field regime; density is illustrative only",
              file=sys.stderr)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            sol = solve_state(cls, ps[0], qs[0], frame, field_, parity)
    except InvalidField as exc:
        raise UsageError(str(exc)) from exc
    except EllipwireError as exc:
        raise UsageError(f"no solution for these quantum numbers: {exc}") from exc
    return frame, cls, field_, sol


def cmd_density(args) -> int:
    from .field_density import density

    frame, cls, field_, sol = _single_state(args)
    n = int(args.grid or 200)
    if n < 2:
        raise UsageError("--grid must be >= 2")
    g = density(sol, n, n, field_)
    meta = {
        "class": cls, "p": sol.p, "q": sol.q, "lambda": field_.lam,
        "parity": getattr(sol, "parity", None) if cls in ("hcs", "hos") else None,
        "omega": _num(sol.omega), "caustic": _num(sol.caustic),
        "nx": g.nx, "ny": g.ny, "extent_nm": [_num(v) for v in g.extent],
        "frame": "isotropic-ellipse", "norm": _num(g.norm),
        "relations": RELATIONS[cls], "field_valid": field_.valid,
    }
    if (args.format or "csv") == "json":
        doc = dict(meta, x_nm=[_num(v) for v in g.x], y_nm=[_num(v) for v in g.y],
                   values=[[_num(v) for v in row] for row in g.values],
                   valid=g.valid.astype(int).tolist())
        text = json.dumps(doc, sort_keys=True) + "\n"
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0
    buf = io.StringIO(newline="")
    w = csv.writer(buf)
    w.writerow(["x_nm", "y_nm", "density", "valid"])
    for iy, y in enumerate(g.y):
        for ix, x in enumerate(g.x):
            w.writerow([fmt(x), fmt(y), fmt(g.values[iy, ix]), int(g.valid[iy, ix])])
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(buf.getvalue())
        with open(args.out + ".json", "w") as fh:
            fh.write(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(buf.getvalue())
    return 0


def cmd_caustic(args) -> int:
    frame, cls, field_, sol = _single_state(args)
    rows = []

    def add(name, value, unit=""):
        rows.append({"quantity": name, "value": value, "unit": unit})

    add("omega", sol.omega)
    if cls in ("bs", "rs"):
        ax = caustic_ellipse_axes(sol.xi_ec, frame)
        add("xi_ec", sol.xi_ec)
        add("a_ellipse", ax.a, "nm")
        add("b_ellipse", ax.b, "nm")
        add("eccentricity_ellipse", ax.eccentricity)
        add("a_wire", ax.a_wire, "nm")
        add("b_wire", ax.b_wire, "nm")
        add("eccentricity_wire", ax.eccentricity_wire)
    elif cls == "hcs":
        add("phi_hc", sol.phi_hc, "rad")
        add("phi_hc_deg", math.degrees(sol.phi_hc), "deg")
    else:
        for branch in ("right", "left"):
            for label, xi in (("centre", 0.0), ("edge", frame.xi_bar)):
                add(f"band_{branch}_{label}_deg",
                    math.degrees(hos_caustic_band(sol, field_, branch, xi)), "deg")
        add("band_average", hos_band_average(sol, field_), "rad")
    _emit_rows(rows, ["quantity", "value", "unit"], args, {"relations": RELATIONS[cls]})
    return 0


def cmd_verify(args) -> int:
    from .targets import PASS_RATE, TARGET_IDS, TARGETS, evaluate

    if args.target:
        unknown = [t for t in args.target if t not in TARGET_IDS]
        if unknown:
            raise UsageError(f"unknown target id(s): {', '.join(unknown)}")
        selected = [TARGET_IDS[t] for t in args.target]
    else:
        selected = list(TARGETS)
    results = evaluate(selected)
    for r in results:
        t = r.target
        status = "PASS" if r.passed else "FAIL"
        line = (f"{status}  {t.id:<24} computed={fmt(r.value):<12} expected={fmt(t.expected):<9}"
                f" tol={t.tol_text()}")
        if r.error:
            line += f"  [{r.error}]"
        if t.note:
            line += f"  ({t.note})"
        print(line)
    passed = sum(r.passed for r in results)
    rate = passed / len(results)
    print(f"{passed}/{len(results)} targets within tolerance ({rate:.1%}); "
          f"threshold {PASS_RATE:.0%}")
    return 0 if rate >= PASS_RATE else 1


def cmd_oracle(args) -> int:
    from .errors import ConvergenceFailure
    from .oracle import bs_fd_crosscheck, fd_field_split

    frame, base = _setup(args)
    n = int(args.grid or 400)
    try:
        p = parse_range(args.p or "1")
        qs = parse_range(args.q or "15:40")
    except ValueError:
        raise UsageError("bad --p/--q range") from None
    if len(p) != 1 or not qs or min(qs) < 1:
        raise UsageError("oracle needs a single --p and a non-empty --q range")
    try:
        if args.force_field:
            if base is None:
                raise UsageError("--force-field needs --lb-ratio or --tesla")
            print("qualitative-only: field splitting compared in sign and order of magnitude")
            w = csv.writer(sys.stdout)
            w.writerow(["q", "fd_plus", "fd_minus", "fd_split", "bs_split"])
            for q in qs:
                res = fd_field_split(frame, base, q, n_grid=n)
                bs_split = (bs_eigenvalue(p[0], q, frame, base.with_lam(1)).omega
                            - bs_eigenvalue(p[0], q, frame, base.with_lam(-1)).omega)
                w.writerow([q, fmt(res["plus"]), fmt(res["minus"]), fmt(res["split"]),
                            fmt(bs_split)])
            return 0
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            rows = bs_fd_crosscheck(frame, qs, p=p[0], n_grid=n)
    except ConvergenceFailure as exc:
        print(f"oracle failed: {exc}", file=sys.stderr)
        return 1
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out)
        w.writerow(["q", "semiclassical", "fd", "rel_error"])
        for r in rows:
            w.writerow([r.q, fmt(r.semiclassical), fmt(r.fd), fmt(r.rel_error)])
    finally:
        if args.out:
            out.close()
    errs = np.array([abs(r.rel_error) for r in rows if r.rel_error is not None])
    missing = sum(r.fd is None for r in rows)
    full = n >= 400
    med_lim, max_lim = (0.02, 0.04) if full else (0.05, math.inf)
    if errs.size == 0:
        print("no FD levels identified", file=sys.stderr)
        return 1
    med, mx = float(np.median(errs)), float(errs.max())
    ok = med <= med_lim and mx <= max_lim and missing == 0
    print(f"median relative error {med:.4%}, max {mx:.4%}, unidentified {missing}; "
          f"limits median {med_lim:.0%}" + (f", max {max_lim:.0%}" if full else "")
          + f" -> {'PASS' if ok else 'FAIL'}", file=sys.stderr)
    return 0 if ok else 1


# -- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file with an [ellipwire] section")
    common.add_argument("--material", help="preset name or m1,m2,R (masses in m_e, R in nm)")
    common.add_argument("--radius", help="wire radius in nm for a preset (default 500)")
    common.add_argument("--lb-ratio", dest="lb_ratio", help="magnetic length over radius")
    common.add_argument("--tesla", help="field in tesla")
    common.add_argument("--lambda", dest="lam", help="field direction(s): -1, 0, 1 or a list")
    common.add_argument("--class", dest="cls", help="state family: bs, rs, hcs, hos")
    common.add_argument("--p", help="p value or range (e.g. 1,2,3 or 10:120)")
    common.add_argument("--q", help="q value or range")
    common.add_argument("--parity", help="HCS parity: even, odd or even,odd")
    common.add_argument("--grid", help="grid size")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), help="output format")

    parser = argparse.ArgumentParser(prog="ellipwire", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("spectrum", parents=[common], help="eigenvalue table over quantum numbers")
    sub.add_parser("density", parents=[common], help="probability density grid of one state")
    sub.add_parser("caustic", parents=[common], help="caustic geometry of one state")
    v = sub.add_parser("verify-targets", parents=[common],
                       help="recompute the Bi reference values and compare")
    v.add_argument("--target", action="append", help="restrict to a target id (repeatable)")
    o = sub.add_parser("oracle", parents=[common], help="finite-difference cross-check")
    o.add_argument("--force-field", action="store_true",
                   help="compare field splittings instead (qualitative)")
    return parser


COMMANDS = {
    "spectrum": cmd_spectrum,
    "density": cmd_density,
    "caustic": cmd_caustic,
    "verify-targets": cmd_verify,
    "oracle": cmd_oracle,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"ellipwire: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
