"""Command-line entry point.

Subcommands: solve, simulate, compare, moments, bounds, nc.  Every output
file embeds a manifest (command, input paths with git-style blob hashes,
seed, options) so reruns are checkable; wall-clock timings go to stderr
only, keeping outputs byte-identical for identical inputs.  Floats are
printed with 17 significant digits.  Exit codes: 0 success, 1 numeric
failure, 2 input error.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import os
import sys
import time

import numpy as np

from . import bounds, fdesolver, montecarlo, nclattice, transforms, weingarten
from .errors import FreeDeqError, InputError, NumericError


# ---------------------------------------------------------------------------
# deterministic serialization


def fmt(x) -> str:
    if isinstance(x, float):
        if math.isnan(x):
            return "NaN"
        if math.isinf(x):
            return "Infinity" if x > 0 else "-Infinity"
        return f"{x:.17g}"
    return str(x)


def dumps_canonical(obj, indent: int = 0) -> str:
    """JSON text with floats at 17 significant digits, insertion order kept."""
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}  "{k}": {dumps_canonical(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}  {dumps_canonical(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(float(obj))
    return '"' + str(obj).replace("\\", "\\\\").replace('"', '\\"') + '"'


def git_blob_sha1(path: str) -> str:
    with open(path, "rb") as f:
        data = f.read()
    h = hashlib.sha1()
    h.update(b"blob %d\0" % len(data))
    h.update(data)
    return h.hexdigest()


def build_manifest(command: str, inputs: dict, seed=None, options: dict | None = None) -> dict:
    entries = {}
    for name, path in inputs.items():
        entries[name] = {"path": str(path), "blob": git_blob_sha1(path)}
    manifest = {"command": command, "inputs": entries}
    if seed is not None:
        manifest["seed"] = int(seed)
    if options:
        manifest["options"] = options
    return manifest


def manifest_line(manifest: dict) -> str:
    return dumps_canonical(manifest).replace("\n", " ")


def write_json(path: str, doc: dict) -> None:
    with open(path, "w", encoding="ascii") as f:
        f.write(dumps_canonical(doc) + "\n")


# ---------------------------------------------------------------------------
# small shared helpers


def parse_grid(text: str) -> fdesolver.GridSpec:
    parts = text.split(",")
    if len(parts) != 4:
        raise InputError("--grid expects xmin,xmax,points,eta")
    try:
        return fdesolver.GridSpec(float(parts[0]), float(parts[1]),
                                  int(parts[2]), float(parts[3]))
    except ValueError as exc:
        raise InputError(f"bad --grid value: {exc}") from exc


def read_measure_csv(path: str) -> transforms.SpectralMeasure:
    """Atomic measure file: one 'location,weight' pair per line."""
    atoms = []
    weights = []
    try:
        with open(path, "r", encoding="ascii") as f:
            for line in f:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                cells = line.split(",")
                if len(cells) != 2:
                    raise InputError(f"{path}: expected 'location,weight' rows")
                atoms.append(float(cells[0]))
                weights.append(float(cells[1]))
    except FileNotFoundError as exc:
        raise InputError(f"measure file not found: {path}") from exc
    if not atoms:
        raise InputError(f"{path}: no atoms")
    return transforms.spectral_measure(atoms, weights)


def thread_count(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("FDE_THREADS")
    return max(1, int(env)) if env else 1


def residual_stats(result: fdesolver.GridResult) -> dict:
    residuals = [s.residual for s in result.solutions if s is not None]
    iters = result.iterations
    return {
        "residual_max": max(residuals) if residuals else math.nan,
        "residual_median": float(np.median(residuals)) if residuals else math.nan,
        "iterations_total": int(sum(iters)),
        "iterations_max": int(max(iters)) if iters else 0,
        "iterations_median": float(np.median(iters)) if iters else 0.0,
    }


# ---------------------------------------------------------------------------
# subcommands


def cmd_solve(args) -> int:
    manifest = build_manifest("solve", {"model": args.model}, options={
        "grid": args.grid, "tol": args.tol, "damping": args.damping,
        "max_iter": args.max_iter})
    model = fdesolver.load_model(args.model)
    grid = parse_grid(args.grid)
    t0 = time.perf_counter()
    result = fdesolver.solve_grid(model, grid, tol=args.tol, max_iter=args.max_iter,
                                  damping=args.damping, threads=thread_count(args))
    elapsed = time.perf_counter() - t0
    line = manifest_line(manifest)
    transforms.write_spectral_csv(args.out, result.spectral, manifest_line=line)
    density = result.spectral.density
    x = result.spectral.grid.real
    moments = []
    if density is not None:
        moments = [float(np.trapezoid(density * x ** k, x)) for k in range(0, 5)]
    summary = {
        "manifest": manifest,
        "grid": {"x_min": grid.x_min, "x_max": grid.x_max,
                 "points": grid.points, "eta": grid.eta},
        "stats": residual_stats(result),
        "failures": result.failures,
        "iterations_per_point": result.iterations,
        "moments_smoothed": moments,
        "cdf_raw_total": result.cdf_raw_total,
    }
    if args.summary:
        write_json(args.summary, summary)
    print(f"timing: solve {elapsed:.3f} s", file=sys.stderr)
    return 1 if result.failures else 0


def cmd_simulate(args) -> int:
    manifest = build_manifest("simulate", {"model": args.model}, seed=args.seed,
                              options={"grid": args.grid, "trials": args.trials})
    model = fdesolver.load_model(args.model)
    grid = parse_grid(args.grid)
    cfg = montecarlo.McConfig(args.trials, args.seed)
    zs = grid.zs()
    t0 = time.perf_counter()
    sf, se_re, se_im = montecarlo.empirical_cauchy(model, cfg, zs,
                                                   threads=thread_count(args))
    density = transforms.stieltjes_invert(sf)
    cdf = montecarlo.empirical_cdf(model, cfg, zs.real, threads=thread_count(args))
    elapsed = time.perf_counter() - t0
    out_sf = transforms.SpectralFunction(zs, sf.G, density, cdf)
    transforms.write_spectral_csv(args.out, out_sf, manifest_line=manifest_line(manifest))
    summary = {
        "manifest": manifest,
        "trials": args.trials,
        "stderr_re_max": float(se_re.max()),
        "stderr_re_median": float(np.median(se_re)),
        "stderr_im_max": float(se_im.max()),
    }
    if args.summary:
        write_json(args.summary, summary)
    print(f"timing: simulate {elapsed:.3f} s", file=sys.stderr)
    return 0


def cmd_compare(args) -> int:
    manifest = build_manifest("compare", {"fde": args.fde, "emp": args.emp})
    try:
        sf_a = transforms.read_spectral_csv(args.fde)
        sf_b = transforms.read_spectral_csv(args.emp)
    except FileNotFoundError as exc:
        raise InputError(f"missing input file: {exc.filename}") from exc
    if sf_a.grid.shape != sf_b.grid.shape or \
            float(np.abs(sf_a.grid - sf_b.grid).max()) > 1e-12:
        raise InputError("grids differ; resample one input onto the other grid")
    sup = float(np.abs(sf_a.G - sf_b.G).max())
    kol = None
    if sf_a.cdf is not None and sf_b.cdf is not None:
        kol = bounds.kolmogorov_distance(sf_a.cdf, sf_b.cdf)
    params = bounds.choose_constants(args.beta, args.c, args.R, args.T)
    m = -math.log(sup) if sup > 0 else math.inf
    ext_bound = None
    theta_bound = None
    lip = None
    if sf_a.cdf is not None and len(sf_a.grid) > 1:
        dx = np.diff(sf_a.grid.real)
        lip = float((np.abs(np.diff(sf_a.cdf)) / dx).max())
    if m > params.m0 and math.isfinite(m):
        ext_bound = math.exp(-params.c * m ** (1.0 - params.beta))
        if lip is not None:
            theta_bound = 16.0 * lip * params.eta0 / m ** params.beta
    report = {
        "manifest": manifest,
        "sup_grid": sup,
        "kolmogorov": kol,
        "m": m,
        "m0": params.m0,
        "extension_bound": ext_bound,
        "lipschitz_estimate": lip,
        "kolmogorov_scale_bound": theta_bound,
    }
    write_json(args.report, report)
    print(dumps_canonical({"sup_grid": sup, "kolmogorov": kol}))
    return 0


def cmd_moments(args) -> int:
    n = args.n
    if n > 6:
        raise InputError("moment tables capped at n <= 6")
    did = False
    if args.nc_count:
        print(len(nclattice.enumerate_nc(n)))
        did = True
    if args.wg:
        if args.N is None:
            raise InputError("--wg needs --N")
        table = weingarten.weingarten_table(n, args.N)
        print("cycle_type,value")
        for t in sorted(table.by_type):
            print(f"\"{','.join(map(str, t))}\",{fmt(table.by_type[t])}")
        did = True
    if args.opval:
        finite, limit = _opval_demo(n)
        print("finite,limit,abs_diff")
        print(f"{fmt(finite.real)},{fmt(limit.real)},{fmt(abs(finite - limit))}")
        did = True
    if not did:
        raise InputError("nothing to do: pass --nc-count, --wg or --opval")
    return 0


def _opval_demo(n: int):
    """Finite against limiting word moment on a fixed two-block example."""
    n = min(n, 4)
    sizes = [8, 16]
    profile = nclattice.index_profile([1] * n, [1] * n)
    d_blocks = [np.diag(1.0 + np.arange(sizes[0]) / sizes[0] + 0.1 * j).astype(complex)
                for j in range(n)]
    c_blocks = [np.diag(0.5 + (np.arange(sizes[0]) / sizes[0]) ** 2 + 0.05 * j).astype(complex)
                for j in range(n)]
    fin = weingarten.finite_n_opvalued_moment(d_blocks, c_blocks, profile, sizes)
    tau_d, tau_c = weingarten.trace_callbacks(d_blocks, c_blocks, profile, sizes)
    weights = [s / sum(sizes) for s in sizes]
    lim = weingarten.asymptotic_nc_moment(tau_d, tau_c, profile, weights)
    return fin.coefficient, lim.coefficient


def cmd_bounds(args) -> int:
    manifest = build_manifest("bounds", {"mu": args.mu, "nu": args.nu})
    mu = read_measure_csv(args.mu)
    nu = read_measure_csv(args.nu)
    support = max(float(np.abs(mu.atoms).max()), float(np.abs(nu.atoms).max()))
    params = bounds.choose_constants(args.beta, args.c, args.R, args.T)
    gmu = lambda z: transforms.cauchy(mu, z)  # noqa: E731
    gnu = lambda z: transforms.cauchy(nu, z)  # noqa: E731
    sup, m = bounds.sup_on_delta_R(gmu, gnu, args.R, support + 1e-9)
    report = bounds.verify_extension(gmu, gnu, params, m)
    xs = np.linspace(-support - 1.0, support + 1.0, 2001)
    f_mu = np.array([mu.weights[mu.atoms <= x].sum() for x in xs])
    f_nu = np.array([nu.weights[nu.atoms <= x].sum() for x in xs])
    kol = bounds.kolmogorov_distance(f_mu, f_nu)
    doc = {
        "manifest": manifest,
        "sup_delta_R": sup,
        "m": report.m,
        "m0": params.m0,
        "interval": list(report.interval),
        "bound": report.bound,
        "measured_max": report.measured_max,
        "violation": report.violation,
        "theorem_applies": report.theorem_applies,
        "kolmogorov": kol,
        "constants": {"beta": params.beta, "c": params.c, "R": params.R,
                      "T": params.T, "a": params.a, "eta0": params.eta0,
                      "c1": args.c1, "c2": args.c2},
    }
    write_json(args.report, doc)
    print(dumps_canonical({"measured_max": report.measured_max, "bound": report.bound,
                           "kolmogorov": kol}))
    return 0


def cmd_nc(args) -> int:
    n = args.n
    parts = nclattice.enumerate_nc(n)
    print(f"NC({n}): {len(parts)} partitions")
    for p in parts:
        print(str(p))
    if args.kreweras:
        print("partition -> kreweras")
        for p in parts:
            print(f"{p} -> {nclattice.kreweras(p)}")
    if args.mobius:
        print("sigma;pi;mobius")
        for pi in parts:
            for sigma in parts:
                if nclattice.nc_leq(sigma, pi):
                    print(f"{sigma};{pi};{nclattice.mobius(sigma, pi)}")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="freedeq")
    ap.add_argument("--threads", type=int, default=None,
                    help="worker threads (or env FDE_THREADS); results do not depend on it")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="solve the fixed-point system on a grid")
    sp.add_argument("--model", required=True)
    sp.add_argument("--grid", required=True, help="xmin,xmax,points,eta")
    sp.add_argument("--out", required=True)
    sp.add_argument("--summary", default=None)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--max-iter", type=int, default=2000)
    sp.add_argument("--damping", type=float, default=0.5)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("simulate", help="Monte Carlo spectra of the model")
    sp.add_argument("--model", required=True)
    sp.add_argument("--trials", type=int, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--grid", required=True, help="xmin,xmax,points,eta")
    sp.add_argument("--out", required=True)
    sp.add_argument("--summary", default=None)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("compare", help="compare two spectral CSV files")
    sp.add_argument("--fde", required=True)
    sp.add_argument("--emp", required=True)
    sp.add_argument("--report", required=True)
    sp.add_argument("--beta", type=float, default=0.5)
    sp.add_argument("--c", type=float, default=0.5)
    sp.add_argument("--R", type=float, default=10.0)
    sp.add_argument("--T", type=float, default=5.0)
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("moments", help="combinatorial and unitary moment tables")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--nc-count", action="store_true")
    sp.add_argument("--wg", action="store_true")
    sp.add_argument("--N", type=int, default=None)
    sp.add_argument("--opval", action="store_true")
    sp.set_defaults(func=cmd_moments)

    sp = sub.add_parser("bounds", help="distance bounds between two atomic measures")
    sp.add_argument("--mu", required=True)
    sp.add_argument("--nu", required=True)
    sp.add_argument("--R", type=float, default=10.0)
    sp.add_argument("--beta", type=float, default=0.5)
    sp.add_argument("--c", type=float, default=0.5)
    sp.add_argument("--T", type=float, default=5.0)
    sp.add_argument("--c1", type=float, default=1.0)
    sp.add_argument("--c2", type=float, default=2.0)
    sp.add_argument("--report", required=True)
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("nc", help="print the non-crossing lattice")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--mobius", action="store_true")
    sp.add_argument("--kreweras", action="store_true")
    sp.set_defaults(func=cmd_nc)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 1
    except FreeDeqError as exc:  # pragma: no cover - catch-all
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
