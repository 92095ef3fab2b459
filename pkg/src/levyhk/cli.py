"""Command-line interface.

Subcommands: ``characteristics``, ``check``, ``bound``, ``density``,
``sample`` and ``verify``. Every output file starts with ``#`` comment lines
holding the resolved configuration; numbers are written with 17 significant
digits. Exit codes: 0 success, 1 a ``verify`` verdict failed, 2 usage error,
3 numeric failure.
"""

from __future__ import annotations

import argparse
import contextlib
import io
import json
import os
import sys

import numpy as np

from .errors import InvalidParameterError, LevyHKError

EXIT_OK, EXIT_FAILS, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
EXPERIMENTS = ("example1", "example2", "chain", "lemmas", "two-sided")


class UsageError(Exception):
    """Bad arguments detected after parsing."""


def fmt(v):
    """17-significant-digit text of a number."""
    return format(float(v), ".17g")


def parse_range(text, log=False):
    """``lo:hi:n`` to ``n`` points (log-spaced when ``log``)."""
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError as exc:
        raise UsageError(f"expected lo:hi:n, got {text!r}") from exc
    if n < 1 or (n > 1 and not hi > lo) or (log and not lo > 0):
        raise UsageError(f"invalid range {text!r}")
    return np.geomspace(lo, hi, n) if log else np.linspace(lo, hi, n)


def parse_floats(text):
    try:
        return np.array([float(s) for s in text.split(",") if s.strip()])
    except ValueError as exc:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from exc


def header(config):
    lines = ["# levyhk " + config.get("subcommand", "")]
    for k in sorted(config):
        lines.append(f"# {k}: {json.dumps(config[k], sort_keys=True, default=str)}")
    return "\n".join(lines) + "\n"


def write_csv(stream, config, columns, rows):
    stream.write(header(config))
    stream.write(",".join(columns) + "\n")
    for row in rows:
        stream.write(",".join(fmt(v) for v in row) + "\n")


@contextlib.contextmanager
def _sink(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _load(args):
    from .model import load_model
    if args.model is None:
        raise UsageError("--model is required")
    if not (args.model.lstrip().startswith("{") or os.path.exists(args.model)):
        from .model import BUILTINS
        if args.model not in BUILTINS:
            raise UsageError(f"model file {args.model!r} not found and not a builtin "
                             f"({', '.join(BUILTINS)})")
    return load_model(args.model)


def _settings(args):
    from .density import InversionSettings
    kw = {}
    if getattr(args, "tail_epsilon", None) is not None:
        kw["tail_epsilon"] = args.tail_epsilon
    if getattr(args, "rel_tol", None) is not None:
        kw["rel_tol"] = args.rel_tol
    try:
        return InversionSettings(**kw)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _base_config(args, model=None):
    from dataclasses import asdict
    cfg = {k: v for k, v in vars(args).items() if k not in ("func",)}
    if model is not None:
        cfg["model_resolved"] = model.to_dict()
    if "tail_epsilon" in cfg:
        cfg["inversion_resolved"] = asdict(_settings(args))
    return cfg


# ------------------------------------------------------------ subcommands
def cmd_characteristics(args):
    from .characteristics import characteristics
    model = _load(args)
    ch = characteristics(model)
    r = parse_floats(args.r) if args.r else parse_range(args.r_grid, log=True)
    h, K, ps = ch.h(r), ch.K(r), ch.psi_star(r)
    if len(r) == 1 and args.out is None:
        print(f"h={fmt(h[0])} K={fmt(K[0])} psi_star={fmt(ps[0])}")
        return EXIT_OK
    with _sink(args.out) as fh:
        write_csv(fh, _base_config(args, model), ["r", "h", "K", "psi_star"], zip(r, h, K, ps))
    return EXIT_OK


def cmd_check(args):
    from .conditions import check_condition
    model = _load(args)
    params = {}
    if args.window:
        lo, hi, _ = (args.window + ":2").split(":")[:3]
        params["window"] = (float(lo), float(hi))
    if args.m is not None:
        params["m"] = args.m
    try:
        rep = check_condition(model, args.condition, params)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    text = json.dumps({"config": _base_config(args, model), "report": rep.to_dict()}, indent=2,
                      sort_keys=True)
    with _sink(args.out) as fh:
        fh.write(text + "\n")
    return EXIT_OK


def cmd_bound(args):
    from .bound import BoundFunctionContext, eval_phi, eval_rho, integrate_rho, solve_r0
    model = _load(args)
    ctx = BoundFunctionContext(model, args.t, args.center_mode)
    x = parse_range(args.grid)
    pts = np.zeros((len(x), model.dim))
    pts[:, 0] = x
    rho, phi = eval_rho(ctx, pts), eval_phi(ctx, pts)
    cfg = _base_config(args, model)
    cfg["r0"] = solve_r0(ctx)
    cfg["integral_rho"] = integrate_rho(ctx)
    cfg["h_inv_1t"] = ctx.h_inv_1t
    with _sink(args.out) as fh:
        write_csv(fh, cfg, ["x", "rho", "phi"], zip(x, rho, phi))
    return EXIT_OK


def cmd_density(args):
    from .density import density_grid
    model = _load(args)
    d = model.dim
    axis = parse_range(args.grid)
    if d == 1:
        pts = axis[:, None]
    else:
        g = np.meshgrid(*([axis] * d), indexing="ij")
        pts = np.stack([a.ravel() for a in g], axis=-1)
    res = density_grid(model, args.t, pts, _settings(args), args.center_mode)
    cols = (["x"] if d == 1 else [f"x{k + 1}" for k in range(d)]) + ["p", "error"]
    rows = (list(p) + [v, e] for p, v, e in zip(res.points, res.values, res.errors))
    cfg = _base_config(args, model)
    cfg["center"] = res.center.tolist()
    with _sink(args.out) as fh:
        write_csv(fh, cfg, cols, rows)
    return EXIT_OK


def cmd_sample(args):
    from .sampler import SamplerSettings, empirical_density, sample_increments
    model = _load(args)
    try:
        st = SamplerSettings(jump_cutoff=args.cutoff, small_jump_mode=args.mode,
                             n_samples=args.n, seed=args.seed, histogram_bins=args.bins,
                             threads=args.threads)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    ys = sample_increments(model, args.t, st)
    lo, hi = (float(v) for v in args.range.split(":")[:2])
    edges = np.linspace(lo, hi, args.bins + 1)
    grid = edges if model.dim == 1 else tuple([edges] * model.dim)
    emp = empirical_density(ys, grid)
    cfg = _base_config(args, model)
    cfg["n_used"] = emp.n_used
    if model.dim == 1:
        rows = zip(emp.centers, emp.density, emp.density_error)
        cols = ["x", "density", "standard_error"]
    else:
        c = np.meshgrid(*emp.centers, indexing="ij")
        rows = zip(*[a.ravel() for a in c], emp.density.ravel(), emp.density_error.ravel())
        cols = [f"x{k + 1}" for k in range(model.dim)] + ["density", "standard_error"]
    with _sink(args.out) as fh:
        write_csv(fh, cfg, cols, rows)
    return EXIT_OK


def cmd_verify(args):
    from . import harness
    settings = _settings(args)
    cfg = _base_config(args)
    exp = args.experiment
    rows, cols = None, None
    if exp in ("example1", "example2"):
        rep = harness.verify_example(exp, refine=args.refine, settings=settings,
                                     mc_points=args.mc_points, threads=args.threads)
        ok = rep.holds
        rows, cols = rep.rows, rep.csv_header(1)
        cfg["model_resolved"] = harness.example_model(exp).to_dict()
    elif exp == "two-sided":
        model = _load(args)
        cfg["model_resolved"] = model.to_dict()
        ts = parse_range(args.t_grid, log=True) if args.t_grid else None
        rep = harness.comparability_report(model, ts, None, args.bound, args.center_mode, settings,
                                           mc_points=args.mc_points, threads=args.threads)
        ok = rep.holds
        rows, cols = rep.rows, rep.csv_header(model.dim)
    elif exp == "chain":
        model = _load(args)
        cfg["model_resolved"] = model.to_dict()
        rep = harness.verify_equivalence_chain(model, args.T, settings)
        ok = rep.holds
    else:
        model = _load(args)
        cfg["model_resolved"] = model.to_dict()
        rep = harness.verify_lemma_suite(model, settings=settings)
        ok = rep.passed
    text = json.dumps({"config": cfg, "report": rep.to_dict()}, indent=2, sort_keys=True)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "report.json"), "w") as fh:
            fh.write(text + "\n")
        if rows is not None:
            with open(os.path.join(args.out, "ratios.csv"), "w", newline="") as fh:
                write_csv(fh, cfg, cols, rows)
    else:
        print(text)
    print(f"verdict: {'holds' if ok else 'fails'} (grid-certified)", file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAILS


# ------------------------------------------------------------------ parser
def build_parser():
    p = argparse.ArgumentParser(prog="levyhk", description="Heat kernel estimates for Lévy processes.")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: LEVYHK_THREADS or 1)")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp, out_help="output file (default stdout)"):
        sp.add_argument("--model", help="model JSON file, JSON text or builtin name")
        sp.add_argument("--out", default=None, help=out_help)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--tail-epsilon", type=float, default=None)
        sp.add_argument("--rel-tol", type=float, default=None)

    s = sub.add_parser("characteristics", help="h, K and Psi* at radii")
    common(s)
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--r", help="comma-separated radii")
    g.add_argument("--r-grid", help="lo:hi:n log-spaced radii")
    s.set_defaults(func=cmd_characteristics)

    s = sub.add_parser("check", help="grid check of one condition")
    common(s)
    s.add_argument("--condition", required=True)
    s.add_argument("--window", default=None, help="lo:hi")
    s.add_argument("--m", type=int, default=None, help="moment for C5")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("bound", help="bound function rho_t and phi_t along the first axis")
    common(s)
    s.add_argument("--t", type=float, required=True)
    s.add_argument("--grid", required=True, help="lo:hi:n")
    s.add_argument("--center-mode", default="h-inverse")
    s.set_defaults(func=cmd_bound)

    s = sub.add_parser("density", help="transition density on a grid")
    common(s)
    s.add_argument("--t", type=float, required=True)
    s.add_argument("--grid", required=True, help="lo:hi:n per axis")
    s.add_argument("--center-mode", default=None)
    s.set_defaults(func=cmd_density)

    s = sub.add_parser("sample", help="Monte Carlo histogram of increments")
    common(s)
    s.add_argument("--t", type=float, required=True)
    s.add_argument("--n", type=int, default=100_000)
    s.add_argument("--bins", type=int, default=200)
    s.add_argument("--range", default="-20:20", help="lo:hi per axis")
    s.add_argument("--cutoff", type=float, default=None)
    s.add_argument("--mode", default="gaussian-substitute")
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("verify", help="certification experiments")
    common(s, out_help="output directory for report.json and ratios.csv")
    s.add_argument("--experiment", required=True, choices=EXPERIMENTS)
    s.add_argument("--T", type=float, default=float("inf"), help="time horizon for the chain")
    s.add_argument("--bound", default="rho", help="bound shape for two-sided")
    s.add_argument("--center-mode", default="h-inverse")
    s.add_argument("--t-grid", default=None, help="lo:hi:n log-spaced times for two-sided")
    s.add_argument("--refine", type=int, default=1)
    s.add_argument("--mc-points", type=int, default=10)
    s.set_defaults(func=cmd_verify)
    return p


VALUE_OPTIONS = ("--grid", "--range", "--window", "--r", "--r-grid", "--t-grid")


def _join_negative(argv):
    # "--grid -10:10:101" would otherwise be read as an unknown flag
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in VALUE_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
        else:
            out.append(a)
            i += 1
    return out


def run(argv=None):
    """Parse ``argv`` and dispatch; returns the exit code."""
    parser = build_parser()
    argv = _join_negative(list(sys.argv[1:] if argv is None else argv))
    err = io.StringIO()
    try:
        with contextlib.redirect_stderr(err):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        sys.stderr.write(err.getvalue())
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    sys.stderr.write(err.getvalue())
    if args.threads is not None:
        if args.threads < 1:
            print("levyhk: --threads must be positive", file=sys.stderr)
            return EXIT_USAGE
        os.environ["LEVYHK_THREADS"] = str(args.threads)
    try:
        return args.func(args)
    except (UsageError, InvalidParameterError, FileNotFoundError, json.JSONDecodeError,
            KeyError, ValueError) as exc:
        print(f"levyhk: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LevyHKError as exc:
        print(f"levyhk: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
