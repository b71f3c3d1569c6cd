"""Chord integrals I_q(K) by several independent routes.

I_q(K) = ∫ |K ∩ ℓ|^q dℓ over affine lines with the invariant measure
normalized by dℓ = dx du / (n ω_n). Estimators: line-space Monte Carlo, the
volume-form representation through Ṽ_{q-1}, a pair-distance (Riesz) route,
and closed forms where they exist.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import betaln

from .geometry import (
    Ball,
    Body,
    centroid,
    circumradius,
    contains,
    line_clip_batch,
    normalize,
    support,
    surface_area,
    unit_ball_volume,
    volume,
)
from .dual_quermass import dual_v_batch
from .quadrature import SphereQuadrature


@dataclass(frozen=True)
class ChordEstimate:
    value: float
    std_error: float
    method: str  # line_mc | volume_form | riesz_double | closed_form
    samples: int
    q: float
    seed: int | None = None
    flags: tuple = field(default=())

    def __post_init__(self):
        if self.method == "closed_form":
            assert self.std_error == 0.0
        if self.q >= 0:
            assert self.value >= 0

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "std_error": self.std_error,
            "method": self.method,
            "samples": self.samples,
            "q": self.q,
            "seed": self.seed,
            "flags": list(self.flags),
        }


def default_line_count(n: int) -> int:
    return 10 ** round(5 + n / 2)


def ball_chord_integral(n: int, q: float, radius: float = 1.0) -> float:
    """I_q of an n-ball: 2^{q-1}(n-1)ω_{n-1}·B((n-1)/2, (q+2)/2)·r^{n+q-1}."""
    if q <= -1:
        raise ValueError("chord integral requires q > -1")
    val = 2.0 ** (q - 1) * (n - 1) * unit_ball_volume(n - 1)
    val *= math.exp(betaln((n - 1) / 2.0, (q + 2) / 2.0))
    return val * radius ** (n + q - 1)


def chord_closed(K: Body, q: float) -> ChordEstimate | None:
    """Exact I_q where a closed form exists; None otherwise.

    Available for balls at any q > -1, and for any body at q ∈ {0, 1, n+1}
    through surface area and volume.
    """
    n = K.dim
    if isinstance(K, Ball):
        value = ball_chord_integral(n, q, K.radius)
        return ChordEstimate(value, 0.0, "closed_form", 0, q)
    if q == 1:
        return ChordEstimate(volume(K), 0.0, "closed_form", 0, q)
    if q == 0:
        value = unit_ball_volume(n - 1) * surface_area(K) / (n * unit_ball_volume(n))
        return ChordEstimate(value, 0.0, "closed_form", 0, q)
    if q == n + 1:
        value = (n + 1) * volume(K) ** 2 / unit_ball_volume(n)
        return ChordEstimate(value, 0.0, "closed_form", 0, q)
    return None


# ---------------------------------------------------------------------------
# line-space Monte Carlo
# ---------------------------------------------------------------------------

_N_BLOCKS = 32
_MIN_CHORD_FACTOR = 1e-14


def _sample_lines(K: Body, count: int, rng: np.random.Generator, c: np.ndarray, R: float):
    """Uniform direction u and uniform base point in the radius-R disk of u⊥."""
    n = K.dim
    u = rng.standard_normal((count, n))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    g = rng.standard_normal((count, n))
    g -= np.einsum("ij,ij->i", g, u)[:, None] * u
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = R * rng.uniform(size=count) ** (1.0 / (n - 1))
    base = c[None, :] + r[:, None] * g
    return u, base


def _chords(K: Body, base: np.ndarray, u: np.ndarray) -> np.ndarray:
    lo, hi, hit = line_clip_batch(K, base, u)
    return np.where(hit, np.maximum(hi - lo, 0.0), 0.0)


def chord_line_mc(K: Body, q: float, N: int | None = None, seed: int = 0) -> ChordEstimate:
    """Unbiased line-space MC estimate of I_q(K) with jackknife errors.

    Lines hit a disk envelope of the body's shadow in every direction; misses
    contribute zero chords, which keeps the estimator unbiased for q > 0 and
    (with miss exclusion) for -1 < q ≤ 0.
    """
    if q <= -1:
        raise ValueError("chord integral requires q > -1")
    n = K.dim
    N = default_line_count(n) if N is None else N
    if N < 1000:
        raise ValueError("need at least 1e3 lines")
    c = centroid(K)
    R = circumradius(K)
    disk_area = unit_ball_volume(n - 1) * R ** (n - 1)
    diam = 2.0 * R
    per_block = N // _N_BLOCKS
    flags = []
    block_means = np.empty(_N_BLOCKS)
    for b in range(_N_BLOCKS):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(b,)))
        u, base = _sample_lines(K, per_block, rng, c, R)
        chords = _chords(K, base, u)
        if q < 0:
            # one redraw pass for vanishing chords that would dominate X^q
            tiny = (chords > 0) & (chords < _MIN_CHORD_FACTOR * diam)
            if np.any(tiny):
                u2, base2 = _sample_lines(K, int(tiny.sum()), rng, c, R)
                chords[tiny] = _chords(K, base2, u2)
                flags.append("tiny_chord_redraw")
        hit = chords > 0
        if q > 0:
            vals = np.where(hit, chords, 0.0) ** q * hit
        elif q == 0:
            vals = hit.astype(float)
        else:
            vals = np.where(hit, np.where(hit, chords, 1.0) ** q, 0.0)
        block_means[b] = disk_area * float(np.mean(vals))
    value = float(np.mean(block_means))
    std_error = float(np.std(block_means, ddof=1) / math.sqrt(_N_BLOCKS))
    if q < 0 and value > 0 and std_error > 0.5 * value:
        flags.append("variance_blowup")
    return ChordEstimate(
        value, std_error, "line_mc", per_block * _N_BLOCKS, q, seed, tuple(sorted(set(flags)))
    )


def chord_directional(K: Body, u, q: float, M: int = 100_000, seed: int = 0) -> float:
    """Directional chord integral I_q(K, u) = ∫_{K|u⊥} X_K(x, u)^q dx."""
    if q <= -1:
        raise ValueError("directional chord integral requires q > -1")
    u = normalize(u)
    n = K.dim
    c = centroid(K)
    R = circumradius(K)
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(202,)))
    g = rng.standard_normal((M, n))
    g -= (g @ u)[:, None] * u[None, :]
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = R * rng.uniform(size=M) ** (1.0 / (n - 1))
    base = c[None, :] + r[:, None] * g
    chords = _chords(K, base, np.broadcast_to(u, base.shape))
    hit = chords > 0
    vals = np.where(hit, np.where(hit, chords, 1.0) ** q, 0.0)
    disk_area = unit_ball_volume(n - 1) * R ** (n - 1)
    return disk_area * float(np.mean(vals))


# ---------------------------------------------------------------------------
# volume-form and pair-distance estimators
# ---------------------------------------------------------------------------


def _uniform_interior(K: Body, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform points in K by rejection in its bounding box."""
    n = K.dim
    lo = np.array([-support(K, -e) for e in np.eye(n)])
    hi = np.array([support(K, e) for e in np.eye(n)])
    out = np.empty((count, n))
    got = 0
    while got < count:
        batch = max(2 * (count - got), 1024)
        pts = lo + rng.uniform(size=(batch, n)) * (hi - lo)
        pts = pts[contains(K, pts)]
        take = min(pts.shape[0], count - got)
        out[got : got + take] = pts[:take]
        got += take
    return out


def chord_volume_form(
    K: Body,
    q: float,
    vol_N: int = 4000,
    quad: SphereQuadrature | None = None,
    seed: int = 0,
) -> ChordEstimate:
    """I_q(K) = (q/ω_n) ∫_K Ṽ_{q-1}(K, z) dz, volume integral by MC."""
    if q <= 0:
        raise ValueError("volume-form representation requires q > 0")
    n = K.dim
    if quad is None:
        quad = SphereQuadrature.product_grid(n, 64, 128) if n <= 3 else SphereQuadrature.monte_carlo(n, seed=seed + 1)
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(303,)))
    Z = _uniform_interior(K, vol_N, rng)
    vals = dual_v_batch(K, Z, q - 1.0, quad)
    factor = q * volume(K) / unit_ball_volume(n)
    value = factor * float(np.mean(vals))
    std_error = abs(factor) * float(np.std(vals, ddof=1) / math.sqrt(vol_N))
    return ChordEstimate(value, std_error, "volume_form", vol_N, q, seed)


def chord_riesz_double(K: Body, q: float, N: int = 400_000, seed: int = 0) -> ChordEstimate:
    """Pair-distance route: I_q = q(q-1)/(nω_n) ∫_K∫_K |x-z|^{q-1-n} dx dz.

    The second point is drawn from the normalized |x-z|^{q-1-n} kernel around
    the first (radius ~ D·U^{1/(q-1)}), which turns the integrand into a
    bounded indicator and keeps the variance finite for every q > 1 — a
    uniform-pair sampler has infinite variance for q ≤ (n+2)/2.
    """
    if q <= 1:
        raise ValueError("pair-distance representation requires q > 1")
    n = K.dim
    D = 2.0 * circumradius(K)
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(404,)))
    Z = _uniform_interior(K, N, rng)
    omega = rng.standard_normal((N, n))
    omega /= np.linalg.norm(omega, axis=1, keepdims=True)
    r = D * rng.uniform(size=N) ** (1.0 / (q - 1.0))
    X = Z + r[:, None] * omega
    inside = contains(K, X).astype(float)
    factor = q * volume(K) * D ** (q - 1.0)
    vals = factor * inside
    value = float(np.mean(vals))
    std_error = float(np.std(vals, ddof=1) / math.sqrt(N))
    return ChordEstimate(value, std_error, "riesz_double", N, q, seed)
