"""Invariant suites behind the ``check`` CLI command.

Each suite returns (results, checks): a results table for the report body and
a list of pass/fail checks with observed values, bounds and tolerances.
"""

from __future__ import annotations

import math

import numpy as np

from .geometry import (
    Ball,
    HPolytope,
    centroid,
    diameter,
    hausdorff_distance,
    random_polytope,
    random_symmetric_polytope,
    surface_area,
    translate_body,
    unit_ball_volume,
    volume,
)
from .chord_integral import chord_line_mc
from .chord_measure import (
    chord_measure_polytope,
    cone_chord_measure,
    measure_diagnostics,
    polytope_chord_integral,
    q_zero_limit_check,
    variational_check,
)
from .concentration import SubspaceSpec, subspace_mass_ratio
from .dual_quermass import mean_curvature_limit
from .minkowski import SolverConfig, solve_chord_log_minkowski, solve_chord_minkowski
from .report import Check

SUITES = ("identities", "variational", "concentration", "limits", "solver-roundtrip")


def _cube(n: int) -> HPolytope:
    return HPolytope(np.vstack([np.eye(n), -np.eye(n)]), np.ones(2 * n))


def suite_identities(n: int, seed: int):
    """Special-case chord integrals against volume and surface area."""
    results = {"table": []}
    checks = []
    for label, K in [("ball", Ball(np.zeros(n), 1.0)), ("cube", _cube(n))]:
        V = volume(K)
        S = surface_area(K)
        targets = {
            "I1": (1.0, V),
            "I0": (0.0, unit_ball_volume(n - 1) * S / (n * unit_ball_volume(n))),
            f"I{n + 1}": (float(n + 1), (n + 1) * V * V / unit_ball_volume(n)),
        }
        for name, (q, target) in targets.items():
            est = chord_line_mc(K, q, N=1_000_000, seed=seed)
            rel = abs(est.value / target - 1.0)
            z = abs(est.value - target) / max(est.std_error, 1e-300)
            ok = rel <= 5e-3 and (name != "I1" or z <= 3.0)
            results["table"].append(
                {"body": label, "check": name, "estimate": est.value, "target": target, "rel_err": rel, "z": z}
            )
            checks.append(Check(f"{label}-{name}", ok, rel, 5e-3, 5e-3))
    return results, checks


def suite_variational(n: int, seed: int):
    """Finite differences of I_q under Minkowski perturbation vs the measure pairing."""
    rng = np.random.default_rng(seed)
    q = 2.0
    K = random_polytope(n, 2 * n + 2, rng)
    L = HPolytope(K.normals, np.ones_like(K.offsets))
    t_seq = [1e-2 * 0.5**j for j in range(8)]
    rows = variational_check(K, L, q, t_seq)
    base = polytope_chord_integral(K, q)
    mism = np.array([r["mismatch"] for r in rows])
    ts = np.array([r["t"] for r in rows])
    slope = float(np.polyfit(np.log(ts), np.log(np.maximum(mism, 1e-300)), 1)[0])
    terminal = float(mism[-1])
    bound = 1e-3 * (n + q - 1.0) * base
    checks = [
        Check("halving-rate", slope >= 0.8, slope, 0.8, 0.0),
        Check("terminal-mismatch", terminal <= bound, terminal, bound, 0.0),
    ]
    return {"table": rows, "I_q": base}, checks


def suite_concentration(n: int, seed: int, bodies: int = 10):
    """Cone-chord subspace mass ratios against their bounds."""
    rng = np.random.default_rng(seed)
    results = {"table": []}
    worst = math.inf
    for b in range(bodies):
        P = random_symmetric_polytope(n, n + 2, rng)
        for q in range(1, n + 2):
            for k in range(1, n):
                from itertools import combinations

                for axes in combinations(range(n), k):
                    xi = SubspaceSpec.coordinate(n, axes)
                    ratio, bound = subspace_mass_ratio(P, xi, float(q))
                    slack = bound - ratio
                    worst = min(worst, slack)
                    if slack < 0.05:
                        results["table"].append(
                            {"body": b, "q": q, "axes": list(axes), "ratio": ratio, "bound": bound}
                        )
    checks = [Check("concentration-slack", worst >= -1e-6, worst, 0.0, 1e-6)]
    return results, checks


def suite_limits(n: int, seed: int):
    """Mean-curvature boundary limit and the q -> 0 chord-measure limit."""
    checks = []
    results = {"table": []}
    B = Ball(np.zeros(n), 1.0)
    z = np.eye(n)[0]
    target = (n - 1) * unit_ball_volume(n - 1) / (2.0 * n)
    est, resid = mean_curvature_limit(B, z, [0.1, 0.08, 0.06, 0.04, 0.02])
    rel = abs(est / target - 1.0)
    checks.append(Check("mean-curvature-ball", rel <= 0.02, rel, 0.02, 0.0))
    results["table"].append({"check": "mean-curvature-ball", "estimate": est, "target": target, "fit_residual": resid})
    if n == 3:
        rows = q_zero_limit_check(B, [0.02])
        rel = rows[0]["rel_err"]
        checks.append(Check("q-zero-total-mass", rel <= 0.03, rel, 0.03, 0.0))
        results["table"].extend(rows)
    return results, checks


def suite_solver_roundtrip(n: int, seed: int):
    """Round trips: prescribe F_q / G_q of a known body, re-solve, compare."""
    rng = np.random.default_rng(seed)
    checks = []
    results = {"table": []}

    P = random_polytope(n, 2 * n + 2, rng)
    mu = chord_measure_polytope(P, 1.0)
    res = solve_chord_minkowski(mu, SolverConfig(q=1.0, seed=seed))
    shift = centroid(P) - centroid(res.body)
    hd = hausdorff_distance(translate_body(res.body, shift), P) / diameter(P)
    checks.append(Check("chord-q1-residual", res.residual <= 1e-2, res.residual, 1e-2, 0.0))
    checks.append(Check("chord-q1-hausdorff", hd <= 1e-3, hd, 1e-3, 0.0))
    results["table"].append({"problem": "chord", "q": 1, "residual": res.residual, "hausdorff_rel": hd})

    Ps = random_symmetric_polytope(n, n + 2, rng)
    mus = cone_chord_measure(Ps, 2.0)
    res2 = solve_chord_log_minkowski(mus, SolverConfig(q=2.0, seed=seed, symmetric=True))
    checks.append(Check("log-q2-residual", res2.residual <= 1e-2, res2.residual, 1e-2, 0.0))
    results["table"].append({"problem": "log", "q": 2, "residual": res2.residual})
    return results, checks


def run_suite(name: str, n: int, seed: int):
    if name == "identities":
        return suite_identities(n, seed)
    if name == "variational":
        return suite_variational(n, seed)
    if name == "concentration":
        return suite_concentration(n, seed)
    if name == "limits":
        return suite_limits(n, seed)
    if name == "solver-roundtrip":
        return suite_solver_roundtrip(n, seed)
    raise ValueError(f"unknown suite {name!r}; choose from {SUITES}")
