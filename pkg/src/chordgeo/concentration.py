"""Subspace concentration inequalities for cone-chord measures, the matching
sharpness sequence, and ellipsoid chord/entropy estimates."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Ball, Ellipsoid, HPolytope, support, unit_ball_volume
from .chord_integral import ball_chord_integral, chord_line_mc
from .chord_measure import MeasureConfig, cone_chord_measure


class NotSymmetric(ValueError):
    """Body is not origin-symmetric."""


@dataclass(frozen=True)
class SubspaceSpec:
    basis: np.ndarray  # (k, n) orthonormal rows

    def __post_init__(self):
        basis = np.atleast_2d(np.asarray(self.basis, dtype=float))
        gram = basis @ basis.T
        if np.max(np.abs(gram - np.eye(basis.shape[0]))) > 1e-12:
            raise ValueError("basis rows must be orthonormal to 1e-12")
        if not 1 <= basis.shape[0] <= basis.shape[1] - 1:
            raise ValueError("subspace dimension must be in [1, n-1]")
        object.__setattr__(self, "basis", basis)

    @property
    def k(self) -> int:
        return self.basis.shape[0]

    @classmethod
    def coordinate(cls, n: int, axes) -> "SubspaceSpec":
        return cls(np.eye(n)[list(axes)])


def _require_symmetric(P: HPolytope, tol: float = 1e-9):
    scale = max(1.0, float(np.max(np.abs(P.offsets))))
    for i in range(P.normals.shape[0]):
        d = np.linalg.norm(P.normals + P.normals[i], axis=1)
        j = int(np.argmin(d))
        if d[j] > tol or abs(P.offsets[i] - P.offsets[j]) > tol * scale:
            raise NotSymmetric("polytope facets are not antipodally paired")


def concentration_bound(k: int, q: float, n: int) -> float:
    """Mass-ratio bound for G_q on a k-subspace: min(2k/(n+q-1), 1) when
    q >= 2, k/n at q = 1."""
    if q == 1:
        return k / n
    return min(2.0 * k / (n + q - 1.0), 1.0)


def subspace_mass_ratio(
    P: HPolytope,
    xi: SubspaceSpec,
    q: float,
    cfg: MeasureConfig | None = None,
    angular_tol: float = 1e-9,
):
    """(G_q(P, ξ ∩ S^{n-1}) / G_q(P, S^{n-1}), theoretical bound)."""
    if q != int(q) or not 1 <= q <= P.dim + 1:
        raise ValueError("concentration bound holds for integer q in [1, n+1]")
    _require_symmetric(P)
    G = cone_chord_measure(P, q, cfg)
    resid = G.directions - (G.directions @ xi.basis.T) @ xi.basis
    inside = np.linalg.norm(resid, axis=1) <= angular_tol
    ratio = float(np.sum(G.masses[inside])) / G.total_mass
    return ratio, concentration_bound(xi.k, q, P.dim)


def _box(half_widths) -> HPolytope:
    n = len(half_widths)
    normals = np.vstack([np.eye(n), -np.eye(n)])
    offsets = np.concatenate([half_widths, half_widths]).astype(float)
    return HPolytope(normals, offsets)


def sharpness_sequence(k: int, q: float, n: int, j_list, cfg: MeasureConfig | None = None):
    """Mass ratios of the boxes [-1/j, 1/j]^k x [-1, 1]^{n-k} on ξ = span(e_1..e_k).

    As j grows the ratio approaches the bound 2k/(n+q-1), showing the
    concentration inequality is sharp in the regime k < q-1.
    """
    if not (1 <= k < q - 1 <= n):
        raise ValueError("sharpness family requires 1 <= k < q-1 <= n")
    xi = SubspaceSpec.coordinate(n, range(k))
    limit = 2.0 * k / (n + q - 1.0)
    rows = []
    for j in j_list:
        P = _box([1.0 / j] * k + [1.0] * (n - k))
        ratio, bound = subspace_mass_ratio(P, xi, q, cfg)
        rows.append({"j": int(j), "ratio": ratio, "bound": bound, "limit": limit})
    return rows


# ---------------------------------------------------------------------------
# ellipsoid estimates
# ---------------------------------------------------------------------------


def ellipsoid_bound_constant(q: float, n: int) -> float:
    """Constant c_{q,m,n} (m = floor(q)) in the ellipsoid chord bound; finite
    for non-integer q in (1, n+1), blowing up as q approaches an integer."""
    m = math.floor(q)
    if not (1 <= m < q < m + 1 <= n + 1):
        raise ValueError("need non-integer q with 1 <= floor(q) < q < floor(q)+1 <= n+1")
    w = unit_ball_volume
    if m == n:
        return (
            2.0 ** (q - n + 2) * q * (q - 1.0) * w(n - 1) ** 2
            / ((q - n) * (q - n + 1.0) * n * w(n))
        )
    return (
        2.0 ** (n - m + 3) * q * (q - 1.0) * (n - m) * w(m - 1) ** 2 * w(n - m) ** 2
        / ((m + 1.0 - q) * (q - m) * (q - m + 1.0) * n * w(n))
    )


def ellipsoid_chord_bound_check(E: Ellipsoid, q: float, N: int = 500_000, seed: int = 0):
    """I_q(E) against c_{q,m,n} (a_1..a_m)^2 a_m^{q-m-1} a_{m+1}..a_n.

    Returns a dict with the estimated lhs, its standard error, the rhs, and
    whether lhs <= rhs + 3σ.
    """
    n = E.dim
    a = E.semi_axes  # ascending
    if a[-1] > 1.0 + 1e-12:
        raise ValueError("bound requires semi-axes <= 1")
    m = math.floor(q)
    c = ellipsoid_bound_constant(q, n)
    rhs = c * float(np.prod(a[:m])) ** 2 * a[m - 1] ** (q - m - 1.0) * float(np.prod(a[m:]))
    if np.allclose(a, a[0]):
        lhs, sigma = ball_chord_integral(n, q, float(a[0])), 0.0
    else:
        est = chord_line_mc(E, q, N=N, seed=seed)
        lhs, sigma = est.value, est.std_error
    return {
        "lhs": lhs,
        "std_error": sigma,
        "rhs": rhs,
        "ok": lhs <= rhs + 3.0 * sigma,
    }


def _measure_entropy(E: Ellipsoid | Ball, directions: np.ndarray, masses: np.ndarray) -> float:
    h = np.array([support(E, u) for u in directions])
    if np.any(h <= 0):
        raise ValueError("support function must be positive at the atoms")
    return -float(np.dot(masses, np.log(h))) / float(np.sum(masses))


def ellipsoid_entropy_bound_check(E_seq, mu, q: float, t0: float, c0: float):
    """Entropy E_μ(E_l) against the axis-length bound
    -2 log(a_1..a_{m-1})/(n+q-1) - (q-m+1)/(n+q-1) log a_m
    - log(a_{m+1}..a_n)/(n+q-1) + t0 log a_1 + c0   (m = floor(q)).

    Diagnostic table: the bound is existential in (t0, c0), so only the
    eventual sign of entropy - bound is meaningful.
    """
    m = math.floor(q)
    rows = []
    for idx, E in enumerate(E_seq):
        n = E.dim
        a = np.sort(np.asarray(E.semi_axes if isinstance(E, Ellipsoid) else [E.radius] * n))
        bound = t0 * math.log(a[0]) + c0
        if m >= 2:
            bound -= 2.0 * float(np.sum(np.log(a[: m - 1]))) / (n + q - 1.0)
        if q != n + 1:
            bound -= (q - m + 1.0) / (n + q - 1.0) * math.log(a[m - 1])
        if m < n:
            bound -= float(np.sum(np.log(a[m:]))) / (n + q - 1.0)
        ent = _measure_entropy(E, mu.directions, mu.masses)
        rows.append({"index": idx, "entropy": ent, "bound": bound, "diff": ent - bound})
    return rows
