"""Command-line interface.

Every command echoes its inputs into a canonical-JSON report on stdout.
Exit codes: 0 success (all checks passed), 2 check failures, 1 input errors.
"""

from __future__ import annotations

import json
import sys
import time

import click
import numpy as np

from . import __version__
from .geometry import GeometryError, body_from_json
from .chord_integral import (
    chord_closed,
    chord_line_mc,
    chord_riesz_double,
    chord_volume_form,
)
from .chord_measure import (
    DiscreteSphericalMeasure,
    chord_measure_polytope,
    cone_chord_measure,
    lp_chord_measure,
    measure_diagnostics,
)
from .checks import SUITES, run_suite
from .concentration import sharpness_sequence
from .dual_quermass import dual_v
from .minkowski import (
    CollapseDetected,
    SolverConfig,
    solve_chord_log_minkowski,
    solve_chord_minkowski,
)
from .quadrature import SphereQuadrature
from .report import Check, Report


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise click.ClickException(f"cannot read {path}: {exc}")


def _load_body(path: str):
    doc = _load_json(path)
    try:
        return body_from_json(doc)
    except (KeyError, ValueError, GeometryError) as exc:
        raise click.ClickException(f"bad body file {path}: {exc}")


def _config_defaults(config_path: str | None) -> dict:
    if not config_path:
        return {}
    doc = _load_json(config_path)
    if not isinstance(doc, dict):
        raise click.ClickException("config file must hold a JSON object")
    return doc


def _emit(ctx_command: str, inputs: dict, seeds, results, checks, t0: float, csv_path):
    report = Report(
        command=ctx_command,
        inputs=inputs,
        seeds=list(seeds),
        results=results,
        checks=checks,
        wall_time_ms=int(round((time.time() - t0) * 1000)),
        version=__version__,
    )
    click.echo(report.dumps())
    if csv_path:
        report.write_csv(csv_path)
    if checks and not report.all_passed:
        sys.exit(2)


def _common(f):
    f = click.option("--seed", type=int, default=None, help="master RNG seed (default 0)")(f)
    f = click.option("--csv", "csv_path", type=click.Path(), default=None, help="also write checks/table as CSV")(f)
    f = click.option("--threads", type=int, default=None, help="worker threads for BLAS-bound kernels")(f)
    f = click.option("--config", "config_path", type=click.Path(exists=False), default=None, help="JSON file of flag defaults")(f)
    return f


def _resolve(cfg: dict, name: str, value, default):
    if value is not None:
        return value
    return cfg.get(name, default)


def _apply_threads(threads: int | None):
    if threads:
        try:
            import threadpoolctl

            threadpoolctl.threadpool_limits(threads)
        except ImportError:
            pass


@click.group()
@click.version_option(__version__)
def main():
    """Chord integrals, chord measures, and their Minkowski problems."""


@main.command()
@click.argument("body_file", type=click.Path())
@click.option("--q", type=float, default=None, help="chord exponent (default 1)")
@click.option("--method", type=click.Choice(["auto", "line_mc", "volume_form", "riesz", "closed"]), default=None)
@click.option("--samples", type=int, default=None)
@_common
def chord(body_file, q, method, samples, seed, csv_path, threads, config_path):
    """Estimate the chord integral I_q of a body."""
    t0 = time.time()
    cfg = _config_defaults(config_path)
    q = _resolve(cfg, "q", q, 1.0)
    method = _resolve(cfg, "method", method, "auto")
    samples = _resolve(cfg, "samples", samples, None)
    seed = int(_resolve(cfg, "seed", seed, 0))
    _apply_threads(threads)
    K = _load_body(body_file)
    try:
        if method == "closed" or (method == "auto" and chord_closed(K, q) is not None):
            est = chord_closed(K, q)
            if est is None:
                raise click.ClickException(f"no closed form for this body at q={q}")
        elif method in ("auto", "line_mc"):
            est = chord_line_mc(K, q, N=samples, seed=seed)
        elif method == "volume_form":
            est = chord_volume_form(K, q, seed=seed, **({"vol_N": samples} if samples else {}))
        else:
            est = chord_riesz_double(K, q, seed=seed, **({"N": samples} if samples else {}))
    except ValueError as exc:
        raise click.ClickException(str(exc))
    inputs = {"body": _load_json(body_file), "q": q, "method": method, "samples": samples}
    _emit("chord", inputs, [seed], est.to_json(), [], t0, csv_path)


@main.command()
@click.argument("body_file", type=click.Path())
@click.option("--z", required=True, help="base point, comma-separated coordinates")
@click.option("--q", type=float, default=None)
@click.option("--scheme", type=click.Choice(["auto", "product", "monte_carlo"]), default=None)
@_common
def dualv(body_file, z, q, scheme, seed, csv_path, threads, config_path):
    """Evaluate the dual quermassintegral V~_q(K, z)."""
    t0 = time.time()
    cfg = _config_defaults(config_path)
    q = _resolve(cfg, "q", q, 1.0)
    scheme = _resolve(cfg, "scheme", scheme, "auto")
    seed = int(_resolve(cfg, "seed", seed, 0))
    _apply_threads(threads)
    K = _load_body(body_file)
    try:
        zvec = np.array([float(v) for v in z.split(",")])
    except ValueError as exc:
        raise click.ClickException(f"bad --z: {exc}")
    if zvec.shape[0] != K.dim:
        raise click.ClickException(f"--z has {zvec.shape[0]} coordinates, body is {K.dim}-dimensional")
    quad = None
    if scheme == "product":
        quad = SphereQuadrature.product_grid(K.dim)
    elif scheme == "monte_carlo":
        quad = SphereQuadrature.monte_carlo(K.dim, seed=seed)
    try:
        value = dual_v(K, zvec, q, quad)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    inputs = {"body": _load_json(body_file), "z": zvec.tolist(), "q": q, "scheme": scheme}
    _emit("dualv", inputs, [seed], {"value": value}, [], t0, csv_path)


@main.command()
@click.argument("body_file", type=click.Path())
@click.option("--q", type=float, default=None)
@click.option("--cone", is_flag=True, help="cone-chord measure G_q instead of F_q")
@click.option("--lp", "lp_p", type=float, default=None, help="L_p chord measure with this p")
@_common
def measure(body_file, q, cone, lp_p, seed, csv_path, threads, config_path):
    """Compute the discrete chord measure of a polytope."""
    t0 = time.time()
    cfg = _config_defaults(config_path)
    q = _resolve(cfg, "q", q, 2.0)
    seed = int(_resolve(cfg, "seed", seed, 0))
    _apply_threads(threads)
    if cone and lp_p is not None:
        raise click.ClickException("--cone and --lp are mutually exclusive")
    P = _load_body(body_file)
    try:
        if cone:
            mu = cone_chord_measure(P, q)
        elif lp_p is not None:
            mu = lp_chord_measure(P, lp_p, q)
        else:
            mu = chord_measure_polytope(P, q)
    except (TypeError, ValueError) as exc:
        raise click.ClickException(str(exc))
    diag = measure_diagnostics(mu)
    inputs = {"body": _load_json(body_file), "q": q, "cone": cone, "lp": lp_p}
    results = {"measure": mu.to_json(), "diagnostics": diag.to_json(), "quadrature_tol": mu.tol}
    _emit("measure", inputs, [seed], results, [], t0, csv_path)


@main.command()
@click.argument("measure_file", type=click.Path())
@click.option("--problem", type=click.Choice(["chord", "log"]), default=None)
@click.option("--q", type=float, default=None)
@click.option("--max-iters", type=int, default=None)
@click.option("--residual-tol", type=float, default=None)
@_common
def solve(measure_file, problem, q, max_iters, residual_tol, seed, csv_path, threads, config_path):
    """Solve a chord (Minkowski) or cone-chord (log-Minkowski) problem."""
    t0 = time.time()
    cfg = _config_defaults(config_path)
    problem = _resolve(cfg, "problem", problem, "chord")
    q = _resolve(cfg, "q", q, 2.0)
    max_iters = int(_resolve(cfg, "max_iters", max_iters, 300))
    residual_tol = float(_resolve(cfg, "residual_tol", residual_tol, 1e-2))
    seed = int(_resolve(cfg, "seed", seed, 0))
    _apply_threads(threads)
    doc = _load_json(measure_file)
    try:
        mu = DiscreteSphericalMeasure.from_json(doc)
    except (KeyError, ValueError) as exc:
        raise click.ClickException(f"bad measure file {measure_file}: {exc}")
    scfg = SolverConfig(
        q=q, max_iters=max_iters, residual_tol=residual_tol, seed=seed, symmetric=problem == "log"
    )
    try:
        if problem == "chord":
            res = solve_chord_minkowski(mu, scfg)
        else:
            res = solve_chord_log_minkowski(mu, scfg)
    except CollapseDetected as exc:
        raise click.ClickException(f"collapse detected: {exc}")
    except (ValueError, RuntimeError) as exc:
        raise click.ClickException(str(exc))
    checks = [Check("residual", res.converged, res.residual, residual_tol, scfg.measure_tol_budget)]
    inputs = {"measure": doc, "problem": problem, "q": q, "max_iters": max_iters, "residual_tol": residual_tol}
    _emit("solve", inputs, [seed], res.to_json(), checks, t0, csv_path)


@main.command()
@click.argument("suite", type=click.Choice(list(SUITES)))
@click.option("--n", type=int, default=None, help="ambient dimension (default 3)")
@_common
def check(suite, n, seed, csv_path, threads, config_path):
    """Run an invariant suite and report pass/fail per check."""
    t0 = time.time()
    cfg = _config_defaults(config_path)
    n = int(_resolve(cfg, "n", n, 3))
    seed = int(_resolve(cfg, "seed", seed, 0))
    _apply_threads(threads)
    if not 2 <= n <= 6:
        raise click.ClickException("--n must be in [2, 6]")
    results, checks = run_suite(suite, n, seed)
    _emit("check", {"suite": suite, "n": n}, [seed], results, checks, t0, csv_path)


@main.command()
@click.option("--n", type=int, default=None)
@click.option("--k", type=int, default=None)
@click.option("--q", type=float, default=None)
@click.option("--jmax", type=int, default=None)
@_common
def sharpness(n, k, q, jmax, seed, csv_path, threads, config_path):
    """Track the subspace-concentration sharpness sequence of flattening boxes."""
    t0 = time.time()
    cfg = _config_defaults(config_path)
    n = int(_resolve(cfg, "n", n, 3))
    k = int(_resolve(cfg, "k", k, 1))
    q = float(_resolve(cfg, "q", q, 3.0))
    jmax = int(_resolve(cfg, "jmax", jmax, 16))
    seed = int(_resolve(cfg, "seed", seed, 0))
    _apply_threads(threads)
    j_list = [2**i for i in range(0, max(1, jmax.bit_length())) if 2**i <= jmax]
    try:
        rows = sharpness_sequence(k, q, n, j_list)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    limit = rows[-1]["limit"]
    final = rows[-1]["ratio"]
    checks = [Check("sharpness-approach", final >= 0.95 * limit, final, 0.95 * limit, 0.0)]
    inputs = {"n": n, "k": k, "q": q, "jmax": jmax}
    _emit("sharpness", inputs, [seed], {"table": rows}, checks, t0, csv_path)


if __name__ == "__main__":
    main()
