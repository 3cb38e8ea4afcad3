"""Command-line interface: synthesize, sweep, evaluate, and generate references.

Exit codes: 0 success, 1 config error, 2 IO/data error, 3 solver divergence.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from .array_model import build_radiation_operator, evaluate_pattern, uniform_u_grid
from .clustering import clustered_excitations, clustering_factor, extract_clusters
from .config import ConfigError, DataFileError, Problem, build_problem, load_config
from .metrics import (
    MetricsReport,
    dynamic_range_ratio,
    full_report,
    pattern_matching_index,
    peak_directivity,
    sidelobe_level,
)
from .reference import save_reference
from .solver import TRACE_COLUMNS, SolverDivergenceError, solve
from .sweep import pareto_filter, run_sweep

__all__ = ["main"]

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2
EXIT_DIVERGED = 3

FRONT_COLUMNS = ("chi", "xi", "q", "gamma", "beta", "tau", "sll_db", "dmax_db", "drr_db")

_EPILOG = """\
defaults (see configs/defaults.json for a complete document):
  geometry.spacing 0.5 wavelengths | elements isotropic | grid uniform-u, m = 2N
  solver: beta 32, gamma 1024, nu 1e-4, delta 1e-5, max_iter 5000,
          backtrack_shrink 0.5, backtrack_max 30
  tau 0.05 | dense_factor 10 | quad_points 4096
"""


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _write_report(path, report: MetricsReport) -> None:
    with open(path, "w") as fh:
        json.dump(report.as_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _db(mag: np.ndarray) -> np.ndarray:
    mag = np.abs(mag)
    return 20.0 * np.log10(np.maximum(mag / mag.max(), 1e-300))


def _write_layout(path, layout) -> None:
    rows = []
    for cid, ((a, b), weight) in enumerate(zip(layout.slices(), layout.cluster_weights), 1):
        rows.append((cid, a + 1, b, weight.real, weight.imag))
    _write_csv(path, ("cluster_id", "first_element", "last_element",
                      "re_weight", "im_weight"), rows)


def _write_excitations(path, w_tvcs, w_ref=None) -> None:
    if w_ref is not None:
        header = ("n", "ref_re", "ref_im", "tvcs_re", "tvcs_im")
        rows = [(n + 1, w_ref[n].real, w_ref[n].imag, w_tvcs[n].real, w_tvcs[n].imag)
                for n in range(w_tvcs.size)]
    else:
        header = ("n", "tvcs_re", "tvcs_im")
        rows = [(n + 1, w_tvcs[n].real, w_tvcs[n].imag) for n in range(w_tvcs.size)]
    _write_csv(path, header, rows)


def _point_row(point):
    r = point.report
    return (r.chi, r.xi, r.q, point.gamma, point.beta, point.tau,
            r.sll_db, r.dmax_db, r.drr_db)


def cmd_synth(problem: Problem, out_dir: str, trace: bool = False) -> int:
    result = solve(problem.H, problem.f_ref, problem.solver)
    layout = extract_clusters(result.w_hat, problem.tau)
    report = full_report(result.w_hat, layout, problem.H, problem.f_ref,
                         problem.geom, problem.elems,
                         dense_factor=problem.dense_factor,
                         quad_points=problem.quad_points)
    os.makedirs(out_dir, exist_ok=True)

    w_c = clustered_excitations(layout)
    src = problem.f_ref.source_excitations
    _write_excitations(os.path.join(out_dir, "excitations.csv"), w_c, src)
    _write_layout(os.path.join(out_dir, "layout.csv"), layout)

    if src is not None:
        grid = uniform_u_grid(problem.dense_factor * problem.f_ref.n_directions)
        H = build_radiation_operator(problem.geom, problem.elems, grid)
        ref_f, tv_f = evaluate_pattern(H, src), evaluate_pattern(H, w_c)
        thetas = grid.angles_deg
    else:
        ref_f = problem.f_ref.samples
        tv_f = evaluate_pattern(problem.H, w_c)
        thetas = problem.f_ref.grid.angles_deg
    _write_csv(os.path.join(out_dir, "pattern.csv"), ("theta_deg", "ref_db", "tvcs_db"),
               zip(thetas, _db(ref_f), _db(tv_f)))

    _write_csv(os.path.join(out_dir, "trace.csv"), TRACE_COLUMNS,
               [(int(r[0]),) + tuple(r[1:]) for r in result.trace])
    _write_report(os.path.join(out_dir, "report.json"), report)
    if trace:
        for row in result.trace:
            print("iter %5d  phi % .6e  grad % .3e  rho %.3g" %
                  (int(row[0]), row[1], row[2], row[6]))
    print(f"synth: {result.terminated_by} after {result.iterations} iterations, "
          f"Q={report.q} chi={report.chi:.4g} xi={report.xi:.4g} -> {out_dir}")
    return EXIT_OK


def cmd_sweep(problem: Problem, out_dir: str, threads: int = 1) -> int:
    if problem.plan is None:
        raise ConfigError("sweep command needs a sweep section in the config")
    points = run_sweep(problem.H, problem.f_ref, problem.plan, problem.geom,
                       problem.elems, threads=threads,
                       dense_factor=problem.dense_factor)
    front = pareto_filter(points)
    os.makedirs(out_dir, exist_ok=True)
    _write_csv(os.path.join(out_dir, "points_all.csv"), FRONT_COLUMNS,
               [_point_row(p) for p in points])
    _write_csv(os.path.join(out_dir, "front.csv"), FRONT_COLUMNS,
               [_point_row(p) for p in front])
    src = problem.f_ref.source_excitations
    for i, point in enumerate(front):
        pdir = os.path.join(out_dir, "front_points", f"p{i:03d}")
        os.makedirs(pdir, exist_ok=True)
        _write_layout(os.path.join(pdir, "layout.csv"), point.layout)
        _write_excitations(os.path.join(pdir, "excitations.csv"),
                           clustered_excitations(point.layout), src)
        _write_report(os.path.join(pdir, "report.json"), point.report)
    print(f"sweep: {len(points)} points, {len(front)} on the front -> {out_dir}")
    return EXIT_OK


def _read_excitations(path, n: int) -> np.ndarray:
    if not os.path.exists(path):
        raise ConfigError(f"excitations file not found: {path}")
    values = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFileError(f"{path}: line 1: empty excitations file") from None
        if len(header) != 3:
            raise DataFileError(f"{path}: line 1: expected header n, re, im")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise DataFileError(f"{path}: line {lineno}: expected 3 fields")
            try:
                values.append(complex(float(row[1]), float(row[2])))
            except ValueError:
                raise DataFileError(f"{path}: line {lineno}: non-numeric field") from None
    if len(values) != n:
        raise ConfigError(f"{path}: {len(values)} excitations, geometry has {n} elements")
    return np.asarray(values)


def cmd_eval(problem: Problem, excitations_path, out_dir: str) -> int:
    w = _read_excitations(excitations_path, problem.geom.n_elements)
    layout = extract_clusters(w, problem.tau)
    grid = uniform_u_grid(problem.dense_factor * problem.f_ref.n_directions)
    H_dense = build_radiation_operator(problem.geom, problem.elems, grid)
    f_dense = evaluate_pattern(H_dense, w)
    src = problem.f_ref.source_excitations
    if src is not None:
        xi = pattern_matching_index(f_dense, evaluate_pattern(H_dense, src))
    else:
        xi = pattern_matching_index(evaluate_pattern(problem.H, w), problem.f_ref.samples)
    report = MetricsReport(
        xi=xi,
        chi=clustering_factor(layout),
        drr_db=float(20.0 * np.log10(dynamic_range_ratio(w))),
        sll_db=sidelobe_level(f_dense),
        dmax_db=peak_directivity(w, problem.geom, problem.elems,
                                 n_quad=problem.quad_points),
        q=layout.q,
    )
    os.makedirs(out_dir, exist_ok=True)
    _write_report(os.path.join(out_dir, "report.json"), report)
    print(f"eval: xi={report.xi:.4g} chi={report.chi:.4g} q={report.q} -> {out_dir}")
    return EXIT_OK


def cmd_reference(problem: Problem, out_dir: str) -> int:
    os.makedirs(out_dir, exist_ok=True)
    save_reference(problem.f_ref, os.path.join(out_dir, "reference.csv"))
    src = problem.f_ref.source_excitations
    if src is not None:
        _write_csv(os.path.join(out_dir, "reference_excitations.csv"), ("n", "re", "im"),
                   [(n + 1, src[n].real, src[n].imag) for n in range(src.size)])
    print(f"reference: {problem.f_ref.label or 'pattern'} "
          f"({problem.f_ref.n_directions} directions) -> {out_dir}")
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tvclust",
        description="Clustered linear-array synthesis by gradient-sparsity optimization",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", default=".", help="output directory (default: .)")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads for sweeps (default: 1)")

    p = sub.add_parser("synth", help="solve one configuration and report it")
    common(p)
    p.add_argument("--trace", action="store_true", help="print per-iteration diagnostics")
    p = sub.add_parser("sweep", help="run the configured penalty/threshold sweep")
    common(p)
    p = sub.add_parser("eval", help="score an externally supplied excitation vector")
    common(p)
    p.add_argument("--excitations", required=True, help="CSV with header n, re, im")
    p = sub.add_parser("reference", help="generate and save the configured reference")
    common(p)
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        problem = build_problem(cfg, base_dir=os.path.dirname(os.path.abspath(args.config)))
        if args.command == "synth":
            return cmd_synth(problem, args.out, trace=args.trace)
        if args.command == "sweep":
            return cmd_sweep(problem, args.out, threads=args.threads)
        if args.command == "eval":
            return cmd_eval(problem, args.excitations, args.out)
        return cmd_reference(problem, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataFileError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SolverDivergenceError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
