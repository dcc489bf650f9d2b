"""Command line front end: ``geoprox run | rate | plot | check``.

Exit status is 0 on success, 1 when a property or certificate violation is
found and 2 for usage or configuration errors.  ``GEOPROX_SEED`` overrides
the seed of every experiment file.
"""
from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import config as cfgmod
from .analysis import classify_alternating
from .certificates import KINDS, validate_certificate
from .geometry import GeometryError
from .iteration import read_csv, run_alternating, run_cyclic
from .plot import render_svg
from .suites import counterexample_reports, run_all

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


def _seed_override():
    v = os.environ.get("GEOPROX_SEED")
    if v is None or v == "":
        return None
    try:
        return int(v)
    except ValueError:
        raise cfgmod.ConfigError("GEOPROX_SEED", f"expected an integer, got {v!r}") from None


def run_experiment(path, outdir=None):
    """Run one experiment file; returns ``(exit_code, summary_text)``."""
    path = Path(path)
    cfg = cfgmod.load(path)
    exp = cfgmod.build(cfg, _seed_override())
    outdir = Path(outdir) if outdir is not None else path.parent
    outdir.mkdir(parents=True, exist_ok=True)

    trace = run_cyclic(exp.problem) if exp.mode == "cyclic" else run_alternating(exp.problem)
    csv_name = cfg.get("output", "trace", f"{path.stem}.csv")
    with open(outdir / csv_name, "w", newline="") as fh:
        trace.write_csv(fh)

    code = EXIT_OK
    lines = [
        f"config={path.name}",
        f"mode={exp.mode} space={exp.space.name} seed={exp.seed}",
        f"termination={trace.termination.value} steps={trace.n_steps}",
        f"final={' '.join(repr(float(c)) for c in trace.final.coords)}",
        f"final_step={trace.steps[-1]!r}" if trace.steps else "final_step=",
        f"final_residuals={' '.join(repr(v) for v in trace.residuals[-1])}",
    ]
    if exp.classify is not None:
        c = exp.classify
        verdict = classify_alternating(trace, c["A"], c["B"], c["tol"], c["oracle"])
        lines.append(verdict.line())
    for name, cert, extra in exp.certificates:
        rep = validate_certificate(cert, trace, extra["check_eps"], fixed_point=extra.get("fixed_point"),
                                   min_problem=exp.min_problem, minimizer=extra.get("minimizer"),
                                   phi_star=extra.get("phi_star"))
        lines.append(f"certificate {name}: {rep.line()}")
        if not rep.holds:
            code = EXIT_VIOLATION
    svg = cfg.get("plot", "svg")
    if svg:
        (outdir / svg).write_text(_svg_for(exp, trace))
    text = "\n".join(lines) + "\n"
    summary = cfg.get("output", "summary", f"{path.stem}.summary.txt")
    (outdir / summary).write_text(text)
    return code, text


def _window(cfg):
    keys = ("xmin", "xmax", "ymin", "ymax")
    if all(cfg.get("plot", k) for k in keys):
        return tuple(cfgmod._num(f"plot.{k}", cfg.get("plot", k)) for k in keys)
    return None


def _svg_for(exp, trace):
    xs = [p.coords for p in trace.points]
    ys = [p.coords for p in trace.ys] if trace.ys is not None else None
    sets = exp.sets if exp.sets else {}
    return render_svg(xs, ys, sets, _window(exp.config), title=exp.config.get("plot", "title", ""))


def _run_one(args):
    path, outdir = args
    try:
        return run_experiment(path, outdir)
    except (cfgmod.ConfigError, GeometryError, OSError) as e:
        return EXIT_USAGE, f"error in {path}: {e}\n"


def cmd_run(ns):
    target = Path(ns.config)
    if target.is_dir():
        files = sorted(target.glob("*.ini"))
        if not files:
            print(f"error: no .ini files in {target}", file=sys.stderr)
            return EXIT_USAGE
        jobs = [(f, ns.out) for f in files]
        if ns.jobs > 1:
            with ProcessPoolExecutor(ns.jobs) as ex:
                results = list(ex.map(_run_one, jobs))
        else:
            results = [_run_one(j) for j in jobs]
    else:
        results = [_run_one((target, ns.out))]
    for code, text in results:
        (sys.stderr if code == EXIT_USAGE else sys.stdout).write(text)
    return max(code for code, _ in results)


def cmd_rate(ns):
    fn, names = KINDS[ns.kind]
    if len(ns.params) != len(names):
        print(f"error: {ns.kind} takes {len(names)} parameters: {' '.join(names)}", file=sys.stderr)
        return EXIT_USAGE
    vals = []
    for k, v in zip(names, ns.params):
        try:
            vals.append(int(v) if k == "r" else float(v))
        except ValueError:
            print(f"error: {k}: expected a number, got {v!r}", file=sys.stderr)
            return EXIT_USAGE
    try:
        bound = fn(*vals)
    except GeometryError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    echo = " ".join(f"{k}={v}" for k, v in zip(names, ns.params))
    print(f"{ns.kind} {echo} bound={bound}")
    return EXIT_OK


def cmd_plot(ns):
    with open(ns.trace, newline="") as fh:
        data = read_csv(fh)
    cfg = cfgmod.load(ns.config)
    exp = cfgmod.build(cfg)
    if data["x"] is None or len(data["x"]) == 0:
        raise cfgmod.ConfigError("trace", "empty trace")
    svg = render_svg(data["x"], data["y"], exp.sets, _window(cfg), title=cfg.get("plot", "title", ""))
    out = Path(ns.output) if ns.output else Path(ns.trace).with_suffix(".svg")
    out.write_text(svg)
    print(f"wrote {out}")
    return EXIT_OK


def cmd_check(ns):
    reports = run_all(ns.samples, ns.seed, ns.tol)
    p2, p1 = counterexample_reports(tol=ns.tol)
    code = EXIT_OK
    for r in reports:
        print(r.line())
        if not r.passed:
            code = EXIT_VIOLATION
    # the square map is expected to break (P2) and satisfy (P1) with beta = 1/3
    print(f"{'PASS' if not p2.passed else 'FAIL'} square map breaks p2 at x=-1/4, y=0: slack={p2.worst:.6g}")
    print(p1.line())
    if p2.passed or not p1.passed:
        code = EXIT_VIOLATION
    return code


def build_parser():
    ap = argparse.ArgumentParser(prog="geoprox", description="Proximal iterations in geodesic spaces.")
    sub = ap.add_subparsers(dest="cmd", required=True)
    r = sub.add_parser("run", help="run an experiment file or every .ini in a directory")
    r.add_argument("config")
    r.add_argument("-o", "--out", help="output directory (default: next to the config)")
    r.add_argument("-j", "--jobs", type=int, default=1, help="parallel runs for a directory")
    r.set_defaults(func=cmd_run)
    q = sub.add_parser("rate", help="print a rate bound")
    q.add_argument("kind", choices=sorted(KINDS))
    q.add_argument("params", nargs="*")
    q.set_defaults(func=cmd_rate)
    p = sub.add_parser("plot", help="render a trace CSV as SVG")
    p.add_argument("trace")
    p.add_argument("config")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_plot)
    c = sub.add_parser("check", help="run the inequality falsifier suites")
    c.add_argument("--samples", type=int, default=1000)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--tol", type=float, default=1e-8)
    c.set_defaults(func=cmd_check)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return ns.func(ns)
    except (cfgmod.ConfigError, GeometryError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
