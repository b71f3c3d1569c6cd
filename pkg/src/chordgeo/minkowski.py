"""Solvers for the discrete chord Minkowski and log-Minkowski problems.

Given a discrete measure μ on the sphere, find a polytope whose chord measure
F_q (resp. cone-chord measure G_q) equals μ. Both problems are solved by
maximizing a 0-homogeneous objective over support vectors in log coordinates,
with an Armijo backtracking line search and a closed-form rescaling at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from itertools import combinations

import numpy as np

from .geometry import (
    EmptyInteriorError,
    HPolytope,
    circumradius,
    unit_ball_volume,
    volume,
)
from .chord_measure import (
    DiscreteSphericalMeasure,
    MeasureConfig,
    chord_measure_polytope,
    measure_diagnostics,
)


class NonConvergence(RuntimeError):
    """Ascent exhausted max_iters without meeting the residual contract."""


class DegenerateDrift(RuntimeError):
    """More than half of the prescribed facets became redundant."""


class CollapseDetected(RuntimeError):
    """Iterates flattened out; the data likely violates the mass inequality."""


class NotEven(ValueError):
    """Measure is not symmetric under u -> -u."""


class NonpositiveSupport(ValueError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    q: float = 2.0
    max_iters: int = 300
    step0: float = 1.0
    armijo_c: float = 1e-4
    armijo_shrink: float = 0.5
    grad_tol: float = 1e-6
    residual_tol: float = 1e-2
    measure_tol_budget: float = 1e-3
    seed: int = 0
    symmetric: bool = False
    measure_cfg: MeasureConfig | None = None

    def __post_init__(self):
        if self.q <= 0:
            raise ValueError("q must be positive")
        for name in ("step0", "grad_tol", "residual_tol", "measure_tol_budget"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    def measure_config(self, n: int) -> MeasureConfig:
        if self.measure_cfg is not None:
            return self.measure_cfg
        # solver loops re-evaluate the measure constantly; trade per-call
        # accuracy (folded into measure_tol_budget) for wall time
        base = MeasureConfig.for_dim(n)
        return replace(base, polar=24, azimuth=48, radial_points=6, refine=False)


@dataclass(frozen=True)
class SolverResult:
    body: HPolytope
    objective_trace: tuple
    residual: float
    unmatched_atoms: tuple
    scale_lambda: float
    iterations: int
    converged: bool

    def to_json(self) -> dict:
        from .geometry import body_to_json

        return {
            "body": body_to_json(self.body),
            "objective_trace": list(self.objective_trace),
            "residual": self.residual,
            "unmatched_atoms": list(self.unmatched_atoms),
            "scale_lambda": self.scale_lambda,
            "iterations": self.iterations,
            "converged": self.converged,
        }


# ---------------------------------------------------------------------------
# data validation
# ---------------------------------------------------------------------------


def validate_chord_data(mu: DiscreteSphericalMeasure, tol: float = 1e-3) -> dict:
    """Existence conditions for the chord Minkowski problem.

    The data must not concentrate on a closed hemisphere and must have zero
    centroid vector. Returns a report rather than raising.
    """
    diag = measure_diagnostics(mu)
    violations = []
    if diag.hemisphere_margin <= tol * mu.total_mass:
        violations.append(
            {
                "kind": "hemisphere",
                "detail": "measure concentrated on a closed hemisphere",
                "margin": diag.hemisphere_margin,
            }
        )
    cnorm = float(np.linalg.norm(diag.centroid_vector))
    if cnorm > tol * mu.total_mass:
        violations.append(
            {"kind": "centroid", "detail": "nonzero centroid vector", "norm": cnorm}
        )
    if np.any(mu.masses < 0):
        violations.append({"kind": "negative_mass", "detail": "masses must be >= 0"})
    return {
        "ok": not violations,
        "violations": violations,
        "hemisphere_margin": diag.hemisphere_margin,
        "centroid_norm": cnorm,
    }


def _antipodal_pairs(mu: DiscreteSphericalMeasure, tol: float = 1e-9):
    m = mu.directions.shape[0]
    partner = np.full(m, -1, dtype=int)
    for i in range(m):
        if partner[i] >= 0:
            continue
        d = np.linalg.norm(mu.directions + mu.directions[i], axis=1)
        j = int(np.argmin(d))
        if d[j] > tol or j == i:
            raise NotEven(f"atom {i} has no antipodal partner")
        if abs(mu.masses[i] - mu.masses[j]) > 1e-9 * max(mu.total_mass, 1.0):
            raise NotEven(f"atoms {i}, {j} are antipodal but carry unequal mass")
        partner[i], partner[j] = j, i
    return [(i, int(partner[i])) for i in range(m) if i < partner[i]]


def _candidate_subspaces(dirs: np.ndarray, k: int):
    """Orthonormal bases for subspaces spanned by atom directions plus the
    coordinate subspaces, deduplicated by projector."""
    n = dirs.shape[1]
    seen = []
    out = []
    pool = [dirs[list(c)] for c in combinations(range(dirs.shape[0]), k)]
    pool += [np.eye(n)[list(c)] for c in combinations(range(n), k)]
    for vecs in pool:
        u, s, _ = np.linalg.svd(vecs.T, full_matrices=False)
        if np.sum(s > 1e-9) != k:
            continue
        basis = u[:, :k].T
        proj = basis.T @ basis
        if any(np.max(np.abs(proj - p)) < 1e-8 for p in seen):
            continue
        seen.append(proj)
        out.append(basis)
    return out


def validate_log_data(mu: DiscreteSphericalMeasure, q: float, tol: float = 1e-12) -> dict:
    """Subspace mass inequality for the even chord log-Minkowski problem:
    μ(ξ_k ∩ S^{n-1})/|μ| < (k + min(k, q-1))/(n+q-1) over subspaces spanned
    by atom directions (where the discrete supremum is attained) and the
    coordinate subspaces, for k = 1..n-1.
    """
    _antipodal_pairs(mu)
    n = mu.dim
    total = mu.total_mass
    worst = None
    violations = []
    for k in range(1, n):
        bound = (k + min(k, q - 1.0)) / (n + q - 1.0)
        for basis in _candidate_subspaces(mu.directions, k):
            resid = mu.directions - (mu.directions @ basis.T) @ basis
            inside = np.linalg.norm(resid, axis=1) <= 1e-9
            ratio = float(np.sum(mu.masses[inside])) / total
            margin = bound - ratio
            if worst is None or margin < worst["margin"]:
                worst = {"k": k, "ratio": ratio, "bound": bound, "margin": margin}
            if ratio >= bound - tol:
                violations.append({"k": k, "ratio": ratio, "bound": bound})
    return {"ok": not violations, "violations": violations, "worst": worst}


def entropy(K: HPolytope, mu: DiscreteSphericalMeasure) -> float:
    """E_μ(K) = -(1/|μ|) Σ m_i log h_K(u_i)."""
    from .geometry import support_batch

    h = support_batch(K, mu.directions)
    if np.any(h <= 0):
        raise NonpositiveSupport("support function must be positive at every atom")
    return -float(np.dot(mu.masses, np.log(h))) / mu.total_mass


# ---------------------------------------------------------------------------
# shared ascent machinery
# ---------------------------------------------------------------------------

_COLLAPSE_RATIO = 1e-6


def _try_body(U: np.ndarray, h: np.ndarray) -> HPolytope | None:
    try:
        return HPolytope(U, h)
    except EmptyInteriorError:
        return None


def _collapsed(P: HPolytope) -> bool:
    return P._cheb_radius / max(circumradius(P), 1e-300) < _COLLAPSE_RATIO


def _ascend(U, cfg: SolverConfig, evaluate, grad_groups):
    """Armijo ascent in log support coordinates.

    ``evaluate(h)`` returns (objective, gradient wrt log h) or None when the
    candidate support vector has empty interior. ``grad_groups`` ties
    variables together (symmetric mode); each group moves by the sum of its
    members' gradient components.
    """
    m = U.shape[0]
    y = np.zeros(m)
    trace = []
    val, g = evaluate(np.ones(m))
    # the fixed quadrature rule makes the objective deterministic in h, so
    # the acceptance slack only needs to absorb rounding, not measure error
    noise = 1e-10
    it = 0
    gnorm = np.inf
    best = val
    d_prev = None
    s_prev = None
    for it in range(1, cfg.max_iters + 1):
        trace.append(val)
        d = np.zeros(m)
        for group in grad_groups:
            d[group] = np.sum(g[group])
        gnorm = float(np.max(np.abs(d)))
        if gnorm <= cfg.grad_tol:
            break
        best = max(best, val)
        if it > 20:
            gained = best - trace[0]
            window = val - trace[-20]
            if window < 1e-5 * max(gained, 1e-12):
                # tail progress negligible relative to total ascent
                break
        # Barzilai-Borwein trial step from the previous gradient change
        step = cfg.step0
        if d_prev is not None:
            dg = d_prev - d
            denom = float(dg @ dg)
            if denom > 0:
                step = abs(s_prev * float(d_prev @ dg)) / denom
                step = min(max(step, 1e-8), 1e3)
        accepted = False
        s = step
        while s > 1e-14:
            y_new = y + s * d
            out = evaluate(np.exp(y_new))
            if out is not None:
                val_new, g_new = out
                if val_new >= val + cfg.armijo_c * s * float(d @ d) - noise:
                    d_prev, s_prev = d, s
                    y, val, g = y_new, val_new, g_new
                    accepted = True
                    break
            s *= cfg.armijo_shrink
        if not accepted:
            break
    trace.append(val)
    return np.exp(y), tuple(trace), it, gnorm


def _coordinate_polish(U, h, masses, q, mcfg, tol, sweeps: int = 3):
    """Per-atom root polish after the ascent.

    Near-redundant facets make the objective almost non-smooth: a tiny
    change in one support value can swing that facet's mass by orders of
    magnitude while every other coordinate is converged, which global
    gradient steps cannot resolve. The stationarity condition decouples per
    atom — F_i <m,h> = m_i (n+q-1) I_q — and F_i is locally monotone
    decreasing in h_i (raising the plane shrinks its facet), so a bracketed
    scalar root finder fixes the stragglers directly.
    """
    from scipy.optimize import brentq

    n = U.shape[1]
    h = h.copy()

    def state(hvec):
        F = chord_measure_polytope(HPolytope(U, hvec), q, mcfg).masses
        Iq = float(np.dot(hvec, F)) / (n + q - 1.0)
        return F, Iq, float(np.dot(masses, hvec))

    for _ in range(sweeps):
        F, Iq, pairing = state(h)
        with np.errstate(divide="ignore", invalid="ignore"):
            rel = np.abs(F * pairing / ((n + q - 1.0) * Iq) - masses) / np.where(
                masses > 0, masses, 1.0
            )
        bad = [i for i in np.argsort(-rel) if masses[i] > 0 and rel[i] > 0.5 * tol]
        if not bad:
            break
        improved = False
        for i in bad[:4]:
            def gap(yi, i=i):
                hh = h.copy()
                hh[i] = math.exp(yi)
                Fi, Ii, pi = state(hh)
                return Fi[i] * pi - masses[i] * (n + q - 1.0) * Ii

            y0 = math.log(h[i])
            g0 = gap(y0)
            step = 0.02 if g0 > 0 else -0.02
            y1, g1 = y0, g0
            for _ in range(40):
                y1 += step
                g1 = gap(y1)
                if g1 == 0 or (g1 > 0) != (g0 > 0):
                    break
            else:
                continue
            lo, hi = (y0, y1) if y0 < y1 else (y1, y0)
            try:
                h[i] = math.exp(brentq(gap, lo, hi, xtol=1e-12, maxiter=60))
                improved = True
            except ValueError:
                continue
        if not improved:
            break
    return h


def _pair_polish(U, h, masses, pairs, q, mcfg, tol, sweeps: int = 3):
    """Per-pair root polish for the symmetric log problem.

    Mirrors the per-atom polish: the pair stationarity condition is
    (G_i + G_j) |μ| = (m_i + m_j) I_q with both antipodal support values
    moving together, and the pair's cone-chord mass is locally monotone
    decreasing in its support value near redundancy.
    """
    from scipy.optimize import brentq

    n = U.shape[1]
    total = float(np.sum(masses))
    h = h.copy()

    def state(hvec):
        F = chord_measure_polytope(HPolytope(U, hvec), q, mcfg).masses
        Iq = float(np.dot(hvec, F)) / (n + q - 1.0)
        return hvec * F / (n + q - 1.0), Iq

    for _ in range(sweeps):
        G, Iq = state(h)
        rel = []
        for i, j in pairs:
            m_pair = masses[i] + masses[j]
            rel.append(abs((G[i] + G[j]) * total / (m_pair * Iq) - 1.0))
        order = np.argsort(rel)[::-1]
        bad = [k for k in order if rel[k] > 0.5 * tol]
        if not bad:
            break
        improved = False
        for k in bad[:4]:
            i, j = pairs[k]
            m_pair = masses[i] + masses[j]

            def gap(y, i=i, j=j, m_pair=m_pair):
                hh = h.copy()
                hh[i] = hh[j] = math.exp(y)
                Gn, In = state(hh)
                return (Gn[i] + Gn[j]) * total - m_pair * In

            y0 = math.log(h[i])
            g0 = gap(y0)
            step = 0.02 if g0 > 0 else -0.02
            y1, g1 = y0, g0
            for _ in range(40):
                y1 += step
                g1 = gap(y1)
                if g1 == 0 or (g1 > 0) != (g0 > 0):
                    break
            else:
                continue
            lo, hi = (y0, y1) if y0 < y1 else (y1, y0)
            try:
                h[i] = h[j] = math.exp(brentq(gap, lo, hi, xtol=1e-12, maxiter=60))
                improved = True
            except ValueError:
                continue
        if not improved:
            break
    return h


def _unmatched(P: HPolytope) -> tuple:
    from .geometry import facet_decomposition

    return tuple(i for i, f in enumerate(facet_decomposition(P)) if f.redundant)


# ---------------------------------------------------------------------------
# chord Minkowski problem: prescribe F_q
# ---------------------------------------------------------------------------


def solve_chord_minkowski(mu: DiscreteSphericalMeasure, cfg: SolverConfig) -> SolverResult:
    """Find P with F_q(P, ·) = μ by maximizing log I_q/(n+q-1) - log <h, μ>."""
    report = validate_chord_data(mu)
    if not report["ok"]:
        raise ValueError(f"invalid chord data: {report['violations']}")
    n = mu.dim
    q = cfg.q
    U = mu.directions
    masses = mu.masses
    mcfg = cfg.measure_config(n)

    def evaluate(h):
        P = _try_body(U, h)
        if P is None or _collapsed(P):
            # feasibility projection: reject the step, let the search shrink
            return None
        F = chord_measure_polytope(P, q, mcfg).masses
        Iq = float(np.dot(P.offsets, F)) / (n + q - 1.0)
        pairing = float(np.dot(masses, P.offsets))
        val = math.log(Iq) / (n + q - 1.0) - math.log(pairing)
        grad = P.offsets * (F / ((n + q - 1.0) * Iq) - masses / pairing)
        return val, grad

    groups = [[i] for i in range(U.shape[0])]
    h, trace, iters, gnorm = _ascend(U, cfg, evaluate, groups)
    h = _coordinate_polish(U, h, masses, q, mcfg, cfg.residual_tol)
    P0 = HPolytope(U, h)
    F0 = chord_measure_polytope(P0, q, mcfg).masses
    I0 = float(np.dot(P0.offsets, F0)) / (n + q - 1.0)
    lam = (float(np.dot(masses, P0.offsets)) / ((n + q - 1.0) * I0)) ** (1.0 / (n + q - 2.0))
    F_scaled = lam ** (n + q - 2.0) * F0
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.abs(F_scaled - masses) / np.where(masses > 0, masses, 1.0)
    residual = float(np.max(rel[masses > 0]))
    body = HPolytope(U, lam * h)
    unmatched = _unmatched(body)
    if len(unmatched) > U.shape[0] / 2:
        raise DegenerateDrift(f"{len(unmatched)} of {U.shape[0]} facets redundant")
    converged = residual <= cfg.residual_tol + cfg.measure_tol_budget
    if not converged and iters >= cfg.max_iters:
        raise NonConvergence(
            f"residual {residual:.3e} after {iters} iterations (grad norm {gnorm:.2e})"
        )
    return SolverResult(body, trace, residual, unmatched, lam, iters, converged)


# ---------------------------------------------------------------------------
# chord log-Minkowski problem: prescribe G_q (even data)
# ---------------------------------------------------------------------------


def _cone_masses(P: HPolytope, F: np.ndarray, q: float) -> np.ndarray:
    return P.offsets * F / (P.dim + q - 1.0)


def solve_chord_log_minkowski(mu: DiscreteSphericalMeasure, cfg: SolverConfig) -> SolverResult:
    """Find symmetric P with G_q(P, ·) = μ by maximizing
    E_μ + log I_q/(n+q-1) over even support vectors."""
    n = mu.dim
    q = cfg.q
    if not 1 <= q <= n + 1:
        raise ValueError("log problem requires 1 <= q <= n+1")
    report = validate_log_data(mu, q)
    if not report["ok"]:
        raise ValueError(f"invalid log-Minkowski data: {report['violations']}")
    if q == n + 1:
        # G_{n+1} = ((n+1)/ω_n) V(K) G_1(K, ·): the q = 1 maximizer has the
        # prescribed measure up to the volume factor, fixed by rescaling
        inner = solve_chord_log_minkowski(replace(cfg, q=1.0), mu)
        K1 = inner.body
        lam = (unit_ball_volume(n) / ((n + 1.0) * volume(K1))) ** (1.0 / (2.0 * n))
        body = HPolytope(K1.normals, lam * K1.offsets)
        G = _cone_masses(body, chord_measure_polytope(body, q, cfg.measure_config(n)).masses, q)
        rel = np.abs(G - mu.masses) / np.where(mu.masses > 0, mu.masses, 1.0)
        residual = float(np.max(rel[mu.masses > 0]))
        converged = residual <= cfg.residual_tol + cfg.measure_tol_budget
        return SolverResult(
            body, inner.objective_trace, residual, inner.unmatched_atoms, lam, inner.iterations, converged
        )
    pairs = _antipodal_pairs(mu)
    U = mu.directions
    masses = mu.masses
    total = mu.total_mass
    mcfg = cfg.measure_config(n)

    def evaluate(h):
        P = _try_body(U, h)
        if P is None:
            return None
        if _collapsed(P):
            raise CollapseDetected("iterate inradius/outer-radius below 1e-6")
        F = chord_measure_polytope(P, q, mcfg).masses
        Iq = float(np.dot(P.offsets, F)) / (n + q - 1.0)
        ent = -float(np.dot(masses, np.log(P.offsets))) / total
        val = ent + math.log(Iq) / (n + q - 1.0)
        G = _cone_masses(P, F, q)
        grad = -masses / total + G / Iq
        return val, grad

    groups = [list(p) for p in pairs]
    h, trace, iters, gnorm = _ascend(U, cfg, evaluate, groups)
    h = _pair_polish(U, h, masses, pairs, q, mcfg, cfg.residual_tol)
    P0 = HPolytope(U, h)
    F0 = chord_measure_polytope(P0, q, mcfg).masses
    I0 = float(np.dot(P0.offsets, F0)) / (n + q - 1.0)
    # normalize I_q to 1, then scale by |μ|^{1/(n+q-1)}
    lam = (total / I0) ** (1.0 / (n + q - 1.0))
    body = HPolytope(U, lam * h)
    G_scaled = lam ** (n + q - 1.0) * _cone_masses(P0, F0, q)
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.abs(G_scaled - masses) / np.where(masses > 0, masses, 1.0)
    residual = float(np.max(rel[masses > 0]))
    unmatched = _unmatched(body)
    if len(unmatched) > U.shape[0] / 2:
        raise DegenerateDrift(f"{len(unmatched)} of {U.shape[0]} facets redundant")
    converged = residual <= cfg.residual_tol + cfg.measure_tol_budget
    if not converged and iters >= cfg.max_iters:
        raise NonConvergence(
            f"residual {residual:.3e} after {iters} iterations (grad norm {gnorm:.2e})"
        )
    return SolverResult(body, trace, residual, unmatched, lam, iters, converged)
