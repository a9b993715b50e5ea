"""Command-line pipelines over the library: generate, analyze, fit,
bootstrap, and theory oracles.

Every command writes its data outputs plus a ``*.manifest.json`` recording
the command line, seeds, parameters, inputs/outputs, tool version, and
wall-clock time.  All data outputs are byte-deterministic for fixed seeds
and inputs; the manifest is the only artifact carrying timing.  The
``--verify`` flag re-derives every data output and byte-compares it
against what was written.

Exit codes: 0 success, 2 validation or format error, 3 fit divergence
(all fits requested by the command diverged), 4 I/O failure.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__
from .baselines import GDSParams, HKParams, generate_configuration, \
    generate_holme_kim, sample_power_law_degrees
from .bootstrap import bootstrap_edges, bootstrap_vertices
from .buckley_osthus import BOParams, generate_bo
from .fitting import DivergenceError, degree_range, fit_degree, fit_edges, \
    pair_domain, select_range
from .graphs import Graph, load_binary, load_edge_list, save_binary, \
    save_edge_list, simplify
from .stats import DegreeHistogram, EdgeDegreeMatrix, LogGrid, RhoSurface, \
    cumulative_degree, d_nn_profile, degree_histogram, edge_degree_matrix, \
    log_grid, rho_surface, write_degrees_tsv, write_dnn_tsv, write_edges_tsv
from .theory import TheoryParams, edge_model_shape_check, \
    expected_degree_count, expected_edge_count, multiplicity_scaling_report


# ---------------------------------------------------------------------------
# small helpers

def _default_threads() -> int:
    env = os.environ.get("PAGL_THREADS")
    if env is not None and env.strip():
        try:
            value = int(env)
        except ValueError:
            raise ValueError(f"PAGL_THREADS must be an integer, got {env!r}")
        if value < 1:
            raise ValueError(f"PAGL_THREADS must be >= 1, got {value}")
        return value
    return os.cpu_count() or 1


def _graph_format(path: str, override: str | None) -> str:
    if override:
        return override
    return "binary" if path.endswith((".bin", ".pagl")) else "text"


def _graph_payload(g: Graph, fmt: str) -> bytes:
    if fmt == "binary":
        buf = io.BytesIO()
        save_binary(g, buf)
        return buf.getvalue()
    buf = io.StringIO()
    save_edge_list(g, buf)
    return buf.getvalue().encode()


def _load_graph(path: str, override: str | None) -> Graph:
    if _graph_format(path, override) == "binary":
        return load_binary(path)
    return load_edge_list(path)


def _text(writer, *args) -> bytes:
    buf = io.StringIO()
    writer(*args, buf)
    return buf.getvalue().encode()


def _json_payload(obj) -> bytes:
    return (json.dumps(obj, indent=2) + "\n").encode()


def _manifest(args, argv, seeds, params, inputs, outputs, t0) -> dict:
    return {
        "command": ["pagl"] + list(argv),
        "version": __version__,
        "seeds": seeds,
        "parameters": params,
        "inputs": sorted(str(p) for p in inputs),
        "outputs": sorted(str(p) for p in outputs),
        "threads": getattr(args, "threads", None),
        "wall_clock_s": round(time.time() - t0, 6),
    }


def _float(x) -> float:
    return float(x)


# ---------------------------------------------------------------------------
# TSV parsing (inverse of the stats emitters)

def _read_tsv(path: str, header: str):
    with open(path, "r", encoding="utf-8") as stream:
        first = stream.readline().rstrip("\n")
        if first != header:
            raise ValueError(
                f"{path}: expected header {header!r}, found {first!r}")
        rows = []
        for lineno, line in enumerate(stream, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != len(header.split("\t")):
                raise ValueError(f"{path}:{lineno}: malformed row {line!r}")
            rows.append(parts)
    return rows


def load_degrees_tsv(path: str) -> DegreeHistogram:
    """Rebuild the degree histogram from an analyze degrees table."""
    counts = {}
    isolated = 0
    for d_s, c_s, _cum in _read_tsv(path, "d\tcount\tcumulative"):
        d, c = int(d_s), int(c_s)
        if d == 0:
            isolated = c
        else:
            counts[d] = c
    return DegreeHistogram(counts, sum(counts.values()) + isolated)


def load_xcells_tsv(path: str) -> EdgeDegreeMatrix:
    """Rebuild the symmetric edge-degree matrix from the cell table.

    Rows hold unordered cells (d1 >= d2) with plain edge counts; the
    stored matrix doubles the diagonal per the counting convention.
    """
    d1, d2, x = [], [], []
    for a_s, b_s, c_s in _read_tsv(path, "d1\td2\tx"):
        a, b, c = int(a_s), int(b_s), int(c_s)
        if a < b or c < 1:
            raise ValueError(f"{path}: bad cell ({a}, {b}, {c})")
        if a == b:
            d1.append(a); d2.append(b); x.append(2 * c)
        else:
            d1.append(a); d2.append(b); x.append(c)
            d1.append(b); d2.append(a); x.append(c)
    d1 = np.asarray(d1, dtype=np.int64)
    d2 = np.asarray(d2, dtype=np.int64)
    x = np.asarray(x, dtype=np.int64)
    order = np.lexsort((d2, d1))
    return EdgeDegreeMatrix(d1=d1[order], d2=d2[order], x=x[order])


def surface_from_tables(hist: DegreeHistogram, edges_path: str,
                        grid: LogGrid) -> RhoSurface:
    """Rebuild the rho surface from an analyze edges table.

    The table stores grid pairs d1 >= d2 where rho is defined; the grid
    itself is recomputed from ``--alpha`` and the histogram's maximum
    degree, so the table must come from the same alpha.
    """
    points = grid.points
    k = points.size
    cum_edges = np.zeros((k, k), dtype=np.int64)
    x_exact = np.zeros((k, k), dtype=np.int64)
    rho = np.full((k, k), np.nan)
    for d1_s, d2_s, x_s, xc_s, rho_s in _read_tsv(
            edges_path, "d1\td2\tX\tXcum\trho"):
        d1, d2 = int(d1_s), int(d2_s)
        i = int(np.searchsorted(points, d1))
        j = int(np.searchsorted(points, d2))
        if i >= k or j >= k or points[i] != d1 or points[j] != d2:
            raise ValueError(
                f"{edges_path}: degree pair ({d1}, {d2}) is not on the "
                f"alpha grid; pass the --alpha used by analyze")
        x_exact[i, j] = x_exact[j, i] = int(x_s)
        cum_edges[i, j] = cum_edges[j, i] = int(xc_s)
        rho[i, j] = rho[j, i] = float(rho_s)
    tails = cumulative_degree(hist)
    return RhoSurface(grid=grid, cum_deg=tails.at(points),
                      cum_edges=cum_edges, rho=rho, x_exact=x_exact)


def _xcells_payload(mat: EdgeDegreeMatrix) -> bytes:
    hi, lo, w = mat.unordered_cells()
    buf = io.StringIO()
    buf.write("d1\td2\tx\n")
    for a, b, c in zip(hi.tolist(), lo.tolist(), w.tolist()):
        buf.write(f"{a}\t{b}\t{c}\n")
    return buf.getvalue().encode()


# ---------------------------------------------------------------------------
# generate

def _build_generate(args):
    fmt = _graph_format(args.out, args.format)
    payloads = {}
    if args.model == "bo":
        if args.a is None or args.m is None or args.n is None:
            raise ValueError("generate --model bo needs --a, --m and --n")
        params = BOParams(a=args.a, m=args.m, n=args.n, seed=args.seed)
        payloads[args.out] = _graph_payload(generate_bo(params), fmt)
        shown = {"a": args.a, "m": args.m, "n": args.n}
    elif args.model == "gds":
        if args.gamma is None or args.n is None:
            raise ValueError("generate --model gds needs --gamma and --n")
        params = GDSParams(n=args.n, gamma=args.gamma,
                           target_edges=args.target_edges, seed=args.seed)
        degrees = sample_power_law_degrees(params)
        g = generate_configuration(degrees, seed=params.seed + 1)
        payloads[args.out] = _graph_payload(g, fmt)
        buf = io.StringIO()
        buf.write("vertex\tdegree\n")
        for v, d in enumerate(degrees.tolist()):
            buf.write(f"{v}\t{d}\n")
        payloads[args.out + ".degrees.tsv"] = buf.getvalue().encode()
        shown = {"gamma": args.gamma, "n": args.n,
                 "target_edges": args.target_edges}
    else:
        if args.m is None or args.n is None:
            raise ValueError("generate --model hk needs --m and --n")
        params = HKParams(n=args.n, m=args.m, p_t=args.pt, seed=args.seed)
        payloads[args.out] = _graph_payload(generate_holme_kim(params), fmt)
        shown = {"m": args.m, "n": args.n, "p_t": args.pt}
    shown["model"] = args.model
    shown["format"] = fmt
    return payloads, {"seed": args.seed}, shown, [], None


# ---------------------------------------------------------------------------
# analyze

def _build_analyze(args):
    g = _load_graph(args.graph, args.format)
    s = simplify(g)
    hist = degree_histogram(s)
    mat = edge_degree_matrix(s)
    deg = np.diff(s.indptr)
    d_max = int(deg.max()) if deg.size else 1
    grid = log_grid(args.alpha, max(d_max, 1))
    surface = rho_surface(hist, mat, grid)
    profile = d_nn_profile(mat)
    p = args.out_prefix
    payloads = {
        p + ".degrees.tsv": _text(write_degrees_tsv, hist),
        p + ".edges.tsv": _text(write_edges_tsv, surface),
        p + ".dnn.tsv": _text(write_dnn_tsv, profile),
        p + ".xcells.tsv": _xcells_payload(mat),
    }
    return payloads, {}, {"alpha": args.alpha}, [args.graph], None


# ---------------------------------------------------------------------------
# fit

def _fit_entry(fit, note=None) -> dict:
    if fit is None:
        return {"converged": False, "error": note}
    entry = {
        "a": _float(fit.a), "b": _float(fit.b),
        "sigma2": _float(fit.sigma2), "objective": _float(fit.objective),
        "iterations": int(fit.iterations), "converged": bool(fit.converged),
        "domain_size": int(fit.domain_size),
    }
    if note:
        entry["error"] = note
    return entry


def _fit_tsv(degree_entry, edge_entry) -> bytes:
    buf = io.StringIO()
    buf.write("parameter\testimate\tsigma2\titerations\tconverged\n")
    for names, entry in ((("a1", "b1"), degree_entry),
                         (("a2", "b2"), edge_entry)):
        for name in names:
            if "a" not in entry:
                buf.write(f"{name}\tnan\tnan\t0\tfalse\n")
                continue
            value = entry["a"] if name.startswith("a") else entry["b"]
            conv = "true" if entry["converged"] else "false"
            buf.write(f"{name}\t{value!r}\t{entry['sigma2']!r}\t"
                      f"{entry['iterations']}\t{conv}\n")
    return buf.getvalue().encode()


def _resolve_range(args, tails, surface, grid):
    """Window selection (auto) or explicit bounds; returns range, domain
    and fits already computed for the auto path."""
    if args.auto_range:
        try:
            sel = select_range(tails, surface, args.window, grid,
                               ratio_cutoff=args.ratio_cutoff)
        except ValueError as exc:
            raise DivergenceError(str(exc))
        return sel.range, sel.domain, sel.degree_fit, sel.edge_fit, True
    if args.d1_lo is None or args.d1_hi is None:
        raise ValueError("pass --d1-lo and --d1-hi, or --auto-range")
    rng = degree_range(grid, args.d1_lo, args.d1_hi)
    dom = pair_domain(rng, args.ratio_cutoff)
    return rng, dom, None, None, False


def _build_fit(args):
    hist = load_degrees_tsv(args.degrees)
    tails = cumulative_degree(hist)
    degrees, _ = hist.arrays()
    if degrees.size == 0:
        raise ValueError(f"{args.degrees}: no positive-degree vertices")
    grid = log_grid(args.alpha, int(degrees.max()))
    surface = surface_from_tables(hist, args.edges, grid)
    rng, dom, fd, fe, auto = _resolve_range(args, tails, surface, grid)

    deg_note = edge_note = None
    if fd is None:
        try:
            fd = fit_degree(tails, rng)
        except ValueError as exc:
            fd, deg_note = None, str(exc)
    if fe is None:
        try:
            fe = fit_edges(surface, dom)
        except ValueError as exc:
            fe, edge_note = None, str(exc)

    degree_entry = _fit_entry(fd, deg_note)
    edge_entry = _fit_entry(fe, edge_note)
    report = {
        "degree": degree_entry,
        "edge": edge_entry,
        "range": {"lo": rng.lo, "hi": rng.hi, "auto": auto,
                  "window": args.window if auto else None,
                  "grid_points": len(rng.grid_points),
                  "pair_count": len(dom)},
        "alpha": args.alpha,
        "ratio_cutoff": args.ratio_cutoff,
    }

    inputs = [args.degrees, args.edges]
    if args.bootstrap:
        boot = {}
        if fd is not None and fd.converged:
            rep = bootstrap_vertices(hist, rng, B=args.bootstrap,
                                     seed=args.seed, threads=args.threads)
            boot["degrees"] = {"sigma_s2": _float(rep.sigma_s2),
                               "iterations": rep.iterations,
                               "diverged": rep.diverged}
        else:
            boot["degrees"] = {"error": "original degree fit did not converge"}
        if fe is not None and fe.converged:
            if not args.xcells:
                raise ValueError(
                    "--bootstrap needs --xcells for the edge target")
            matrix = load_xcells_tsv(args.xcells)
            inputs.append(args.xcells)
            rep = bootstrap_edges(hist, matrix, dom, grid, B=args.bootstrap,
                                  seed=args.seed, threads=args.threads)
            boot["edges"] = {"sigma_s2": _float(rep.sigma_s2),
                             "iterations": rep.iterations,
                             "diverged": rep.diverged}
        else:
            boot["edges"] = {"error": "original edge fit did not converge"}
        report["bootstrap"] = boot

    p = args.out_prefix
    payloads = {
        p + ".fit.json": _json_payload(report),
        p + ".fit.tsv": _fit_tsv(degree_entry, edge_entry),
    }
    all_diverged = not (degree_entry.get("converged")
                        or edge_entry.get("converged"))
    error = "all requested fits diverged" if all_diverged else None
    shown = {"alpha": args.alpha, "ratio_cutoff": args.ratio_cutoff,
             "auto_range": auto, "window": args.window,
             "d1_lo": args.d1_lo, "d1_hi": args.d1_hi,
             "bootstrap": args.bootstrap}
    return payloads, {"seed": args.seed}, shown, inputs, error


# ---------------------------------------------------------------------------
# bootstrap

def _build_bootstrap(args):
    hist = load_degrees_tsv(args.degrees)
    tails = cumulative_degree(hist)
    degrees, _ = hist.arrays()
    if degrees.size == 0:
        raise ValueError(f"{args.degrees}: no positive-degree vertices")
    grid = log_grid(args.alpha, int(degrees.max()))
    inputs = [args.degrees]

    if args.auto_range:
        if not args.edges:
            raise ValueError("--auto-range needs --edges")
        surface = surface_from_tables(hist, args.edges, grid)
        inputs.append(args.edges)
    else:
        surface = None
    rng, dom, _fd, _fe, auto = _resolve_range(args, tails, surface, grid)

    if args.target == "degrees":
        rep = bootstrap_vertices(hist, rng, B=args.iterations,
                                 seed=args.seed, threads=args.threads)
    else:
        if not args.xcells:
            raise ValueError("--target edges needs --xcells")
        matrix = load_xcells_tsv(args.xcells)
        inputs.append(args.xcells)
        rep = bootstrap_edges(hist, matrix, dom, grid, B=args.iterations,
                              seed=args.seed, threads=args.threads)

    buf = io.StringIO()
    buf.write("iteration\testimate\n")
    for i, est in enumerate(rep.estimates.tolist()):
        buf.write(f"{i}\t{est!r}\n")
    buf.write(f"sigma_s2\t{_float(rep.sigma_s2)!r}\n")
    report = {
        "target": rep.target,
        "original": _fit_entry(rep.original),
        "sigma_s2": _float(rep.sigma_s2),
        "iterations": rep.iterations,
        "diverged": rep.diverged,
        "range": {"lo": rng.lo, "hi": rng.hi, "auto": auto},
    }
    p = args.out_prefix
    payloads = {
        p + ".bootstrap.tsv": buf.getvalue().encode(),
        p + ".bootstrap.json": _json_payload(report),
    }
    shown = {"target": args.target, "iterations": args.iterations,
             "alpha": args.alpha, "ratio_cutoff": args.ratio_cutoff,
             "auto_range": auto, "d1_lo": args.d1_lo, "d1_hi": args.d1_hi}
    return payloads, {"seed": args.seed}, shown, inputs, None


# ---------------------------------------------------------------------------
# theory

def _parse_int_list(text: str, flag: str) -> list:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ValueError(f"{flag} expects comma-separated integers, got {text!r}")
    if not values:
        raise ValueError(f"{flag} is empty")
    return values


def _parse_pairs(text: str) -> list:
    pairs = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        pieces = part.split(":")
        if len(pieces) != 2:
            raise ValueError(f"--pairs expects d1:d2 items, got {part!r}")
        pairs.append((int(pieces[0]), int(pieces[1])))
    if not pairs:
        raise ValueError("--pairs is empty")
    return pairs


def _build_theory_expected(args):
    if not args.d and not args.pairs:
        raise ValueError("pass --d and/or --pairs")
    params = TheoryParams(a=args.a, m=args.m, n=args.n)
    payloads = {}
    p = args.out_prefix
    if args.d:
        ds = _parse_int_list(args.d, "--d")
        buf = io.StringIO()
        buf.write("d\texpected\n")
        for d in ds:
            buf.write(f"{d}\t{_float(expected_degree_count(params, d))!r}\n")
        payloads[p + ".expected_degrees.tsv"] = buf.getvalue().encode()
    if args.pairs:
        buf = io.StringIO()
        buf.write("d1\td2\texpected\n")
        for d1, d2 in _parse_pairs(args.pairs):
            buf.write(
                f"{d1}\t{d2}\t{_float(expected_edge_count(params, d1, d2))!r}\n")
        payloads[p + ".expected_edges.tsv"] = buf.getvalue().encode()
    shown = {"a": args.a, "m": args.m, "n": args.n,
             "d": args.d, "pairs": args.pairs}
    return payloads, {}, shown, [], None


def _build_theory_rho_shape(args):
    report = edge_model_shape_check(
        args.a2, ratio_range=(args.ratio_min, args.ratio_max),
        d2_range=(args.d2_min, args.d2_max), grid_size=args.grid_size)
    payload = {
        "a": _float(report.a),
        "constant": _float(report.constant),
        "max_rel_deviation": _float(report.max_rel_deviation),
        "pairs": [[int(d1), int(d2)] for d1, d2 in report.pairs],
    }
    payloads = {args.out_prefix + ".rho_shape.json": _json_payload(payload)}
    shown = {"a2": args.a2, "ratio_range": [args.ratio_min, args.ratio_max],
             "d2_range": [args.d2_min, args.d2_max],
             "grid_size": args.grid_size}
    return payloads, {}, shown, [], None


def _build_theory_multiplicity(args):
    n_list = _parse_int_list(args.n_list, "--n-list")
    report = multiplicity_scaling_report(
        args.samples, n_list, args.a, args.m,
        seed=args.seed, threads=args.threads)
    buf = io.StringIO()
    buf.write("n\tmean_loops\tmean_multi\tloop_fraction\tmulti_fraction\n")
    for i, n in enumerate(report.n_list):
        buf.write(f"{n}\t{_float(report.mean_loops[i])!r}\t"
                  f"{_float(report.mean_multi[i])!r}\t"
                  f"{_float(report.loop_fractions[i])!r}\t"
                  f"{_float(report.multi_fractions[i])!r}\n")
    payload = {
        "a": args.a, "m": args.m, "samples": args.samples,
        "n_list": [int(n) for n in report.n_list],
        "multi_slope": _float(report.multi_slope),
        "loops_slope": _float(report.loops_slope),
        "mean_loops": [_float(v) for v in report.mean_loops],
        "mean_multi": [_float(v) for v in report.mean_multi],
        "loop_fractions": [_float(v) for v in report.loop_fractions],
        "multi_fractions": [_float(v) for v in report.multi_fractions],
    }
    p = args.out_prefix
    payloads = {
        p + ".multiplicity.tsv": buf.getvalue().encode(),
        p + ".multiplicity.json": _json_payload(payload),
    }
    shown = {"a": args.a, "m": args.m, "samples": args.samples,
             "n_list": n_list}
    return payloads, {"seed": args.seed}, shown, [], None


# ---------------------------------------------------------------------------
# parser

def _add_common(sub, out_flag):
    sub.add_argument("--threads", type=int, default=None,
                     help="worker threads (default: PAGL_THREADS or cores)")
    sub.add_argument("--verify", action="store_true",
                     help="re-derive outputs and byte-compare them")
    if out_flag == "out":
        sub.add_argument("--out", required=True, help="output path")
    else:
        sub.add_argument("--out-prefix", required=True,
                         help="prefix for output files")


def _add_range_flags(sub):
    sub.add_argument("--d1-lo", type=int, default=None)
    sub.add_argument("--d1-hi", type=int, default=None)
    sub.add_argument("--auto-range", action="store_true",
                     help="slide a log window and keep the objective-product minimum")
    sub.add_argument("--window", type=float, default=3.0,
                     help="log10 window length for --auto-range")
    sub.add_argument("--ratio-cutoff", type=float, default=10.0)
    sub.add_argument("--alpha", type=float, default=1.01)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pagl",
        description="Preferential-attachment graph generation and "
                    "attractiveness estimation.")
    parser.add_argument("--version", action="version", version=__version__)
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("generate", help="write a random graph")
    gen.add_argument("--model", choices=("bo", "gds", "hk"), required=True)
    gen.add_argument("--a", type=float, default=None,
                     help="bo: attachment strength")
    gen.add_argument("--m", type=int, default=None,
                     help="bo/hk: edges per vertex")
    gen.add_argument("--n", type=int, default=None, help="vertex count")
    gen.add_argument("--gamma", type=float, default=None,
                     help="gds: degree-law exponent")
    gen.add_argument("--target-edges", type=int, default=None,
                     help="gds: calibrate the degree cutoff to this edge count")
    gen.add_argument("--pt", type=float, default=0.5,
                     help="hk: triad-step probability")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--format", choices=("text", "binary"), default=None,
                     help="default: binary for .bin/.pagl paths, else text")
    _add_common(gen, "out")
    gen.set_defaults(func=_build_generate)

    an = commands.add_parser("analyze",
                             help="degree/edge/neighbor tables from a graph")
    an.add_argument("--graph", required=True)
    an.add_argument("--format", choices=("text", "binary"), default=None)
    an.add_argument("--alpha", type=float, default=1.01,
                    help="log-grid ratio")
    _add_common(an, "out_prefix")
    an.set_defaults(func=_build_analyze)

    fit = commands.add_parser("fit", help="fit power-law models to tables")
    fit.add_argument("--degrees", required=True, help="analyze degrees TSV")
    fit.add_argument("--edges", required=True, help="analyze edges TSV")
    fit.add_argument("--xcells", default=None,
                     help="analyze xcells TSV (edge bootstrap input)")
    _add_range_flags(fit)
    fit.add_argument("--bootstrap", type=int, default=None, metavar="B",
                     help="also estimate bootstrap errors with B iterations")
    fit.add_argument("--seed", type=int, default=0)
    _add_common(fit, "out_prefix")
    fit.set_defaults(func=_build_fit)

    boot = commands.add_parser("bootstrap",
                               help="resampling spread of one fit target")
    boot.add_argument("--target", choices=("degrees", "edges"), required=True)
    boot.add_argument("--degrees", required=True)
    boot.add_argument("--edges", default=None,
                      help="needed with --auto-range")
    boot.add_argument("--xcells", default=None,
                      help="needed with --target edges")
    _add_range_flags(boot)
    boot.add_argument("--iterations", type=int, default=1000)
    boot.add_argument("--seed", type=int, default=0)
    _add_common(boot, "out_prefix")
    boot.set_defaults(func=_build_bootstrap)

    theory = commands.add_parser("theory", help="closed-form oracles")
    tsub = theory.add_subparsers(dest="subcommand", required=True)

    texp = tsub.add_parser("expected",
                           help="expected degree / edge-pair counts")
    texp.add_argument("--a", type=float, required=True)
    texp.add_argument("--m", type=int, required=True)
    texp.add_argument("--n", type=int, required=True)
    texp.add_argument("--d", default=None,
                      help="comma-separated degrees")
    texp.add_argument("--pairs", default=None,
                      help="comma-separated d1:d2 pairs")
    _add_common(texp, "out_prefix")
    texp.set_defaults(func=_build_theory_expected)

    tshape = tsub.add_parser("rho-shape",
                             help="tail-ratio shape vs the edge model")
    tshape.add_argument("--a2", type=float, required=True)
    tshape.add_argument("--ratio-min", type=float, default=10.0)
    tshape.add_argument("--ratio-max", type=float, default=1000.0)
    tshape.add_argument("--d2-min", type=int, default=10)
    tshape.add_argument("--d2-max", type=int, default=100)
    tshape.add_argument("--grid-size", type=int, default=5)
    _add_common(tshape, "out_prefix")
    tshape.set_defaults(func=_build_theory_rho_shape)

    tmult = tsub.add_parser("multiplicity",
                            help="loop/multi-edge scaling report")
    tmult.add_argument("--a", type=float, required=True)
    tmult.add_argument("--m", type=int, required=True)
    tmult.add_argument("--n-list", required=True,
                       help="comma-separated sample sizes")
    tmult.add_argument("--samples", type=int, default=20)
    tmult.add_argument("--seed", type=int, default=0)
    _add_common(tmult, "out_prefix")
    tmult.set_defaults(func=_build_theory_multiplicity)

    return parser


# ---------------------------------------------------------------------------
# driver

def _write_payloads(payloads: dict) -> None:
    for path, blob in payloads.items():
        with open(path, "wb") as stream:
            stream.write(blob)


def _verify_payloads(build, args, payloads: dict) -> None:
    rebuilt = build(args)[0]
    if set(rebuilt) != set(payloads):
        raise ValueError("verify: output path set changed between derivations")
    for path, blob in rebuilt.items():
        with open(path, "rb") as stream:
            on_disk = stream.read()
        if on_disk != blob:
            raise ValueError(f"verify: {path} is not byte-reproducible")


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.time()
    try:
        if args.threads is None:
            args.threads = _default_threads()
        elif args.threads < 1:
            raise ValueError("--threads must be >= 1")
        build = args.func
        payloads, seeds, params, inputs, deferred = build(args)
        _write_payloads(payloads)
        if args.verify:
            _verify_payloads(build, args, payloads)
        prefix = getattr(args, "out_prefix", None) or args.out
        manifest = _manifest(args, argv, seeds, params, inputs,
                             sorted(payloads), t0)
        with open(prefix + ".manifest.json", "wb") as stream:
            stream.write(_json_payload(manifest))
    except DivergenceError as exc:
        print(f"pagl: fit divergence: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"pagl: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"pagl: i/o error: {exc}", file=sys.stderr)
        return 4
    if deferred:
        print(f"pagl: fit divergence: {deferred}", file=sys.stderr)
        return 3
    return 0


def entry() -> int:
    return main()


if __name__ == "__main__":
    sys.exit(main())
