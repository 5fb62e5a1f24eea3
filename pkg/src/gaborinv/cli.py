"""Command-line front end.

Subcommands: reduce, separate, order, criteria, scan, density, gaussian,
equidistribution, dual-window.  Long-form flags only.  Every run writes
run_manifest.json (config echo, library version, calibrated constants) into
--output-dir, so identical flags reproduce byte-identical outputs.

Exit codes: 0 success, 1 parse error, 2 precondition violation,
3 analysis-level negative verdict.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys as _sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from . import density as density_mod
from . import gabor, invariance, lattice, serialize
from .errors import GaborError, NotFrameSequence

PARSE_ERROR, PRECONDITION_ERROR, VERDICT_NEGATIVE = 1, 2, 3

_NAMED_CONSTANTS = {"sqrt2": math.sqrt(2.0), "sqrt5": math.sqrt(5.0), "pi": math.pi}


class _Parser(argparse.ArgumentParser):
    # the exit-code contract reserves 1 for parse errors (argparse uses 2)
    def error(self, message):
        self.print_usage(_sys.stderr)
        _sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(PARSE_ERROR)


def _rational(text: str) -> Fraction:
    try:
        return lattice.as_fraction(text)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational 'p/q': {text!r}") from exc


def _real(text: str) -> float:
    """Plain float or 'p/q' rational."""
    try:
        if "/" in text:
            return float(Fraction(text))
        return float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a real number: {text!r}") from exc


def _real_or_named(text: str) -> float:
    """Real number, with named irrational constants (sqrt2, sqrt5, pi).

    Only the density/equidistribution commands accept the named constants;
    everywhere else the exact and float domains stay visibly separate.
    """
    if text in _NAMED_CONSTANTS:
        return _NAMED_CONSTANTS[text]
    return _real(text)


def _real_list(text: str) -> list[float]:
    return [_real_or_named(t) for t in text.split(",")]


def _pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'x,y', got {text!r}")
    return (_real_or_named(parts[0]), _real_or_named(parts[1]))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gaborinv", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--output-dir", default=".", help="where result files go")
        sp.add_argument("--seed", type=int, default=0, help="echoed into the manifest")
        sp.add_argument("--format", choices=["json", "csv"], default="json")

    sp = sub.add_parser("reduce", help="reduce an extra invariant shift (exact)")
    sp.add_argument("--a", type=_rational, required=True)
    sp.add_argument("--b", type=_rational, required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    common(sp)

    sp = sub.add_parser("separate", help="separable reduction of a rational lattice")
    sp.add_argument(
        "--basis",
        required=True,
        help="row-major rationals 'p/q,p/q;p/q,p/q'",
    )
    common(sp)

    sp = sub.add_parser("order", help="order of a rational point in the quotient")
    sp.add_argument("--zx", type=_rational, required=True)
    sp.add_argument("--zy", type=_rational, required=True)
    sp.add_argument("--basis", default="1,0;0,1", help="lattice basis (default Z^2)")
    sp.add_argument("--n-max", type=int, default=10**6)
    common(sp)

    def window_flags(sp):
        sp.add_argument("--L", type=int, required=True)
        sp.add_argument("--a", type=int, required=True)
        sp.add_argument("--b", type=int, required=True)
        sp.add_argument(
            "--window",
            default="gaussian",
            help="gaussian | gaussian-sum | periodic-gaussian | @file.csv",
        )
        sp.add_argument("--c", type=_real, default=math.pi, help="Gaussian width")
        sp.add_argument("--tol", type=_real, default=invariance.DEFAULT_TOL)
        sp.add_argument("--rank-tol", type=_real, default=gabor.DEFAULT_RANK_TOL)

    sp = sub.add_parser("criteria", help="the four duality criteria")
    window_flags(sp)
    sp.add_argument("--nu", type=int, required=True)
    common(sp)

    sp = sub.add_parser("scan", help="invariance scan on a refined grid")
    window_flags(sp)
    sp.add_argument("--nu", type=int, default=2, help="used by builtin windows")
    sp.add_argument("--refinement", type=int, required=True)
    common(sp)

    sp = sub.add_parser("density", help="empirical lower Beurling density")
    sp.add_argument("--set", dest="which", default="omega", choices=["omega", "lattice"])
    sp.add_argument("--alpha", type=_real_or_named, default=1.0)
    sp.add_argument("--beta", type=_real_or_named, default=1.0)
    sp.add_argument("--nu", type=int, default=2)
    sp.add_argument("--R", type=_real_list, required=True, help="comma list of radii")
    sp.add_argument("--probe-grid", type=int, default=32)
    common(sp)

    sp = sub.add_parser("gaussian", help="full undersampled-Gaussian pipeline")
    sp.add_argument("--L", type=int, required=True)
    sp.add_argument("--a", type=int, required=True)
    sp.add_argument("--b", type=int, required=True)
    sp.add_argument("--c", type=_real, default=math.pi)
    sp.add_argument("--nu", type=int, default=2)
    sp.add_argument("--refinement", type=int, required=True)
    sp.add_argument("--tol", type=_real, default=invariance.DEFAULT_TOL)
    sp.add_argument("--rank-tol", type=_real, default=gabor.DEFAULT_RANK_TOL)
    common(sp)

    sp = sub.add_parser("equidistribution", help="orbit density diagnostic")
    sp.add_argument("--z", type=_pair, required=True, help="direction 'x,y' (sqrt2 ok)")
    sp.add_argument("--n", type=int, default=10000)
    sp.add_argument("--t-step", type=_real_or_named, default=(math.sqrt(5) - 1) / 2)
    sp.add_argument("--alpha", type=_rational, default=Fraction(1))
    sp.add_argument("--beta", type=_rational, default=Fraction(1))
    common(sp)

    sp = sub.add_parser("dual-window", help="canonical dual window gamma = S^+ g")
    window_flags(sp)
    common(sp)

    return p


def _parse_basis(text: str) -> lattice.Lattice2D:
    rows = [r.split(",") for r in text.split(";")]
    return lattice.Lattice2D(lattice.RationalMatrix2x2(rows))


def _build_window(args) -> np.ndarray:
    name = args.window
    if name.startswith("@"):
        return serialize.load_signal_csv(name[1:])
    g0 = gabor.periodized_gaussian(args.L, args.c)
    if name == "gaussian":
        return g0
    nu = getattr(args, "nu", 2)
    if args.a % nu:
        raise NotFrameSequence(f"builtin window needs nu | a, got nu={nu}, a={args.a}")
    step = args.a // nu
    if name == "gaussian-sum":
        w = sum(gabor.tf_shift(g0, j * step, 0) for j in range(nu))
    elif name == "periodic-gaussian":
        w = sum(gabor.tf_shift(g0, j * step, 0) for j in range(args.L // step))
    else:
        raise argparse.ArgumentTypeError(f"unknown window {name!r}")
    return w / np.linalg.norm(w)


def _manifest(args, constants: dict) -> dict:
    config = {
        k: (str(v) if isinstance(v, Fraction) else v)
        for k, v in sorted(vars(args).items())
        if k not in ("func",)
    }
    return {"version": __version__, "config": config, "constants": constants}


def _finish(args, payload: dict, constants: dict, outdir: Path) -> str:
    serialize.dump_json(outdir / "run_manifest.json", _manifest(args, constants))
    text = serialize.dump_json(outdir / f"{args.command}_result.json", payload)
    _sys.stdout.write(text)
    return text


def _cmd_reduce(args, outdir: Path) -> int:
    res = lattice.reduce_invariant_shift(args.a, args.b, args.r, args.s, args.m)
    _finish(args, res.to_json_dict(), {}, outdir)
    return 0


def _cmd_separate(args, outdir: Path) -> int:
    lat = _parse_basis(args.basis)
    C, sep = lattice.separate(lat)
    payload = {
        "C": [[lattice.rational_str(v) for v in row] for row in C.entries],
        "det_C": lattice.rational_str(C.det()),
        "alpha": lattice.rational_str(sep.alpha),
        "beta": lattice.rational_str(sep.beta),
    }
    _finish(args, payload, {}, outdir)
    return 0


def _cmd_order(args, outdir: Path) -> int:
    lat = _parse_basis(args.basis)
    n = lattice.order_in_lattice((args.zx, args.zy), lat, args.n_max)
    payload = {"order": n, "n_max": args.n_max}
    _finish(args, payload, {}, outdir)
    return 0 if n is not None else VERDICT_NEGATIVE


def _cmd_criteria(args, outdir: Path) -> int:
    w = _build_window(args)
    sys_ = gabor.FiniteGaborSystem(args.L, args.a, args.b, w)
    rep = invariance.criteria_engine(sys_, args.nu, args.tol, args.rank_tol)
    with open(outdir / "orthogonality_table.csv", "w", newline="") as fh:
        cw = csv.writer(fh)
        cw.writerow(["k", "l", "abs_inner_product"])
        dual = gabor.canonical_dual(sys_, args.rank_tol)
        for k in range(args.b):
            for l in range(args.a):
                v = gabor.tf_shift(dual.gamma, k * (args.L // args.b), l * (args.L // args.a))
                cw.writerow([k, l, repr(float(abs(np.vdot(v, w))))])
    _finish(args, rep.to_json_dict(), {"cross_frame_constant": rep.constant}, outdir)
    return 0 if rep.verdict_consistent else VERDICT_NEGATIVE


def _cmd_scan(args, outdir: Path) -> int:
    w = _build_window(args)
    sys_ = gabor.FiniteGaborSystem(args.L, args.a, args.b, w)
    rep = invariance.scan_invariance(sys_, args.refinement, args.tol, args.rank_tol)
    _finish(args, rep.to_json_dict(), {}, outdir)
    return 0 if rep.verdict != "inconclusive" else VERDICT_NEGATIVE


def _omega_components(args):
    al, be, nu = args.alpha, args.beta, args.nu
    full = density_mod.omega_spec(al, be, nu)
    return {
        "lattice_part": full.members[0],
        "product_part": full.members[1],
        "union": full,
    }


def _cmd_density(args, outdir: Path) -> int:
    if args.which == "lattice":
        specs = {"lattice": density_mod.LatticePoints(np.diag([args.alpha, args.beta]))}
    else:
        specs = _omega_components(args)
    payload = {}
    for name, spec in specs.items():
        ests = density_mod.lower_density_empirical(spec, args.R, args.probe_grid)
        rows = [
            {"R": e.R, "theta": e.theta, "analytic": e.analytic, "gap": e.gap}
            for e in ests
        ]
        payload[name] = rows
        with open(outdir / f"density_{name}.csv", "w", newline="") as fh:
            cw = csv.writer(fh)
            cw.writerow(["R", "theta", "analytic", "gap"])
            for r in rows:
                cw.writerow(
                    [repr(r["R"]), repr(r["theta"]), repr(r["analytic"]), repr(r["gap"])]
                )
    _finish(args, payload, {}, outdir)
    return 0


def _cmd_gaussian(args, outdir: Path) -> int:
    rep = invariance.gaussian_corollary_scenario(
        args.L, args.a, args.b, args.c, args.nu, args.refinement, args.tol, args.rank_tol
    )
    with open(outdir / "orthogonality_table.csv", "w", newline="") as fh:
        cw = csv.writer(fh)
        cw.writerow(["k", "l", "abs_inner_product"])
        for k, l, v in rep.orthogonality_table:
            cw.writerow([k, l, repr(v)])
    _finish(
        args,
        rep.to_json_dict(),
        {"cross_frame_constant": rep.criteria.constant},
        outdir,
    )
    return 0 if rep.matches_expectations() else VERDICT_NEGATIVE


def _cmd_equidistribution(args, outdir: Path) -> int:
    sep = lattice.SeparableLattice(args.alpha, args.beta)
    cov, disc = density_mod.equidistribution_diagnostic(args.z, sep, args.t_step, args.n)
    payload = {"covering_radius": cov, "discrepancy": disc, "n_samples": args.n}
    _finish(args, payload, {}, outdir)
    return 0


def _cmd_dual_window(args, outdir: Path) -> int:
    w = _build_window(args)
    sys_ = gabor.FiniteGaborSystem(args.L, args.a, args.b, w)
    dual = gabor.canonical_dual(sys_, args.rank_tol)
    fb = gabor.frame_bounds(sys_, args.rank_tol)
    serialize.save_signal_csv(outdir / "dual_window.csv", dual.gamma)
    payload = {
        "gamma_csv": "dual_window.csv",
        "span_rank": dual.span.rank,
        "frame_bounds": {
            "lower": fb.lower,
            "upper": fb.upper,
            "rank": fb.rank,
            "is_riesz_sequence": fb.is_riesz_sequence,
        },
    }
    _finish(args, payload, {}, outdir)
    return 0


_COMMANDS = {
    "reduce": _cmd_reduce,
    "separate": _cmd_separate,
    "order": _cmd_order,
    "criteria": _cmd_criteria,
    "scan": _cmd_scan,
    "density": _cmd_density,
    "gaussian": _cmd_gaussian,
    "equidistribution": _cmd_equidistribution,
    "dual-window": _cmd_dual_window,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 0
    outdir = Path(args.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    try:
        return _COMMANDS[args.command](args, outdir)
    except NotFrameSequence as exc:
        _sys.stderr.write(f"NotFrameSequence: {exc}\n")
        return VERDICT_NEGATIVE
    except GaborError as exc:
        _sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return PRECONDITION_ERROR
    except ValueError as exc:
        _sys.stderr.write(f"InvalidParameter: {exc}\n")
        return PRECONDITION_ERROR


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
