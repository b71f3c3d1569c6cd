"""Convex body representations and geometric primitives.

Bodies are immutable after construction; every operation here is a pure
function, so they are safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, HalfspaceIntersection


class GeometryError(ValueError):
    """Base class for construction/validation failures."""


class EmptyInteriorError(GeometryError):
    """Halfspace intersection has (numerically) no interior."""


class UnboundedError(GeometryError):
    """Halfspace intersection is unbounded (normals do not positively span)."""


class DegenerateHullError(GeometryError):
    """Vertex set does not affinely span R^n."""


_UNIT_TOL = 1e-12


def unit_ball_volume(n: int) -> float:
    """Volume of the n-dimensional unit ball."""
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def sphere_area(n: int) -> float:
    """Surface measure of S^{n-1}, i.e. n * omega_n."""
    return n * unit_ball_volume(n)


def normalize(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    norm = np.linalg.norm(v)
    if norm < 1e-14:
        raise GeometryError("cannot normalize a (near-)zero vector")
    return v / norm


def _as_matrix(rows, dim=None) -> np.ndarray:
    a = np.atleast_2d(np.asarray(rows, dtype=float))
    if dim is not None and a.shape[1] != dim:
        raise GeometryError(f"expected vectors of dimension {dim}, got {a.shape[1]}")
    return a


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if not self.radius > 0:
            raise GeometryError("ball radius must be positive")

    @property
    def dim(self) -> int:
        return self.center.shape[0]


@dataclass(frozen=True)
class Ellipsoid:
    """Ellipsoid { x : sum ((x-c) . e_i)^2 / a_i^2 <= 1 }.

    Semi-axes are stored ascending; ``frame`` rows are the axis directions.
    """

    center: np.ndarray
    semi_axes: np.ndarray
    frame: np.ndarray = None

    def __post_init__(self):
        center = np.asarray(self.center, dtype=float)
        axes = np.asarray(self.semi_axes, dtype=float)
        n = center.shape[0]
        frame = np.eye(n) if self.frame is None else np.asarray(self.frame, dtype=float)
        if np.any(axes <= 0):
            raise GeometryError("semi-axes must be positive")
        order = np.argsort(axes, kind="stable")
        axes = axes[order]
        frame = frame[order]
        if np.max(np.abs(frame @ frame.T - np.eye(n))) > _UNIT_TOL * 100:
            raise GeometryError("frame is not orthonormal")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "semi_axes", axes)
        object.__setattr__(self, "frame", frame)

    @property
    def dim(self) -> int:
        return self.center.shape[0]


@dataclass(frozen=True)
class HPolytope:
    """Bounded intersection of halfspaces { x : normals @ x <= offsets }."""

    normals: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        normals = _as_matrix(self.normals)
        offsets = np.asarray(self.offsets, dtype=float).ravel()
        if normals.shape[0] != offsets.shape[0]:
            raise GeometryError("normals and offsets length mismatch")
        if normals.shape[1] < 2:
            raise GeometryError("dimension must be >= 2")
        norms = np.linalg.norm(normals, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-9):
            normals = normals / norms[:, None]
            offsets = offsets / norms
        object.__setattr__(self, "normals", normals)
        object.__setattr__(self, "offsets", offsets)
        # Chebyshev LP certifies boundedness + nonempty interior at build time.
        center, radius = _chebyshev(normals, offsets)
        scale = max(np.max(np.abs(offsets)), 1.0)
        if radius < 1e-10 * scale:
            raise EmptyInteriorError(
                f"inscribed-ball radius {radius:.3e} below degeneracy threshold"
            )
        object.__setattr__(self, "_cheb_center", center)
        object.__setattr__(self, "_cheb_radius", float(radius))

    @property
    def dim(self) -> int:
        return self.normals.shape[1]

    @property
    def chebyshev_center(self) -> np.ndarray:
        return self._cheb_center

    @property
    def inradius(self) -> float:
        return self._cheb_radius

    @cached_property
    def vertices(self) -> np.ndarray:
        interior = self._cheb_center
        hs = np.hstack([self.normals, -(self.offsets[:, None])])
        try:
            inter = HalfspaceIntersection(hs, interior)
        except Exception as exc:  # qhull precision failures
            raise DegenerateHullError(str(exc)) from exc
        pts = inter.intersections
        # dedupe near-identical vertices
        hull = ConvexHull(pts, qhull_options="QJ" if self.dim > 3 else None)
        return pts[hull.vertices] if self.dim == 2 else pts[np.unique(hull.vertices)]

    @cached_property
    def centroid(self) -> np.ndarray:
        total = 0.0
        acc = np.zeros(self.dim)
        for f in facet_decomposition(self):
            for simplex in f.simplices:
                apex = self._cheb_center
                verts = np.vstack([apex[None, :], simplex])
                vol = abs(np.linalg.det(simplex - apex)) / math.factorial(self.dim)
                if vol > 0:
                    total += vol
                    acc += vol * verts.mean(axis=0)
        if total <= 0:
            raise DegenerateHullError("zero volume in centroid computation")
        return acc / total

    @cached_property
    def circumradius(self) -> float:
        return float(np.max(np.linalg.norm(self.vertices - self.centroid, axis=1)))


@dataclass(frozen=True)
class VPolytope:
    """Convex hull of a vertex list; reduced to extreme points on build."""

    points: np.ndarray

    def __post_init__(self):
        pts = _as_matrix(self.points)
        if pts.shape[0] < pts.shape[1] + 1:
            raise DegenerateHullError("not enough points to span R^n")
        try:
            hull = ConvexHull(pts)
        except Exception as exc:
            raise DegenerateHullError(str(exc)) from exc
        object.__setattr__(self, "points", pts[np.unique(hull.vertices)])
        normals = hull.equations[:, :-1]
        offsets = -hull.equations[:, -1]
        object.__setattr__(self, "_hrep", (normals, offsets))

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def as_hpolytope(self) -> HPolytope:
        normals, offsets = self._hrep
        # merge duplicate facet normals produced by simplicial qhull output
        keep = []
        for i in range(normals.shape[0]):
            dup = False
            for j in keep:
                if (
                    np.dot(normals[i], normals[j]) > 1 - 1e-12
                    and abs(offsets[i] - offsets[j]) < 1e-9
                ):
                    dup = True
                    break
            if not dup:
                keep.append(i)
        return HPolytope(normals[keep], offsets[keep])


Body = Ball | Ellipsoid | HPolytope | VPolytope


@dataclass(frozen=True)
class FacetGeometry:
    normal: np.ndarray
    offset: float
    vertices: np.ndarray
    area: float
    simplices: tuple = field(default=(), repr=False)
    redundant: bool = False


def _chebyshev(normals: np.ndarray, offsets: np.ndarray):
    """Center and radius of the largest inscribed ball, by LP."""
    m, n = normals.shape
    c = np.zeros(n + 1)
    c[-1] = -1.0
    A = np.hstack([normals, np.ones((m, 1))])
    res = linprog(c, A_ub=A, b_ub=offsets, bounds=[(None, None)] * n + [(0, None)], method="highs")
    if res.status == 3:
        raise UnboundedError("halfspace normals do not positively span R^n")
    if not res.success:
        raise EmptyInteriorError(f"infeasible halfspace system: {res.message}")
    return res.x[:n], res.x[n]


# ---------------------------------------------------------------------------
# support / radial / X-ray
# ---------------------------------------------------------------------------


def support(K: Body, v) -> float:
    """Support function h_K(v) = max { x . v : x in K }, exact per body kind."""
    v = np.asarray(v, dtype=float)
    if isinstance(K, Ball):
        return float(K.center @ v + K.radius * np.linalg.norm(v))
    if isinstance(K, Ellipsoid):
        proj = K.frame @ v
        return float(K.center @ v + math.sqrt(np.sum((K.semi_axes * proj) ** 2)))
    if isinstance(K, HPolytope):
        return float(np.max(K.vertices @ v))
    if isinstance(K, VPolytope):
        return float(np.max(K.points @ v))
    raise TypeError(f"unsupported body type {type(K)!r}")


def _line_clip(K: Body, z: np.ndarray, u: np.ndarray):
    """Intersect the line z + t*u with K.

    Returns (t_minus, t_plus, hit). ``hit`` is False when the line misses K.
    """
    z = np.asarray(z, dtype=float)
    u = np.asarray(u, dtype=float)
    if isinstance(K, (HPolytope, VPolytope)):
        normals, offsets = _hrep(K)
        du = normals @ u
        slack = offsets - normals @ z
        lo, hi = -np.inf, np.inf
        for a, s in zip(du, slack):
            if a > 1e-13:
                hi = min(hi, s / a)
            elif a < -1e-13:
                lo = max(lo, s / a)
            elif s < -1e-11 * max(1.0, np.max(np.abs(offsets))):
                return 0.0, 0.0, False
        if lo > hi + 1e-13 or not np.isfinite(lo) or not np.isfinite(hi):
            return 0.0, 0.0, False
        return lo, min(hi, max(hi, lo)), True
    if isinstance(K, Ball):
        w = z - K.center
        b = w @ u
        c = w @ w - K.radius**2
        disc = b * b - c
        if disc < 0:
            return 0.0, 0.0, False
        root = math.sqrt(disc)
        return -b - root, -b + root, True
    if isinstance(K, Ellipsoid):
        A = K.frame / K.semi_axes[:, None]
        w = A @ (z - K.center)
        d = A @ u
        aa = d @ d
        b = w @ d
        c = w @ w - 1.0
        disc = b * b - aa * c
        if disc < 0 or aa <= 0:
            return 0.0, 0.0, False
        root = math.sqrt(disc)
        return (-b - root) / aa, (-b + root) / aa, True
    raise TypeError(f"unsupported body type {type(K)!r}")


def _hrep(K: HPolytope | VPolytope):
    if isinstance(K, HPolytope):
        return K.normals, K.offsets
    return K._hrep


def radial_extended(K: Body, z, u) -> float:
    """Extended radial function: largest t with z + t*u in K (0 on a miss).

    May be negative when z lies beyond K in direction u.
    """
    t0, t1, hit = _line_clip(K, z, normalize(u))
    return t1 if hit else 0.0


def xray(K: Body, x, u) -> float:
    """Parallel X-ray: length of the chord of K along the line x + R*u."""
    t0, t1, hit = _line_clip(K, x, normalize(u))
    return max(t1 - t0, 0.0) if hit else 0.0


def radial_batch(K: Body, z, U: np.ndarray) -> np.ndarray:
    """Vectorized radial_extended for a single base point and many directions."""
    t0, t1, hit = line_clip_batch(K, np.broadcast_to(np.asarray(z, float), U.shape), U)
    return np.where(hit, t1, 0.0)


def line_clip_batch(K: Body, Z: np.ndarray, U: np.ndarray):
    """Row-wise line clipping: line i is Z[i] + t*U[i].

    Returns (t_minus, t_plus, hit) arrays. Directions must be unit vectors.
    """
    Z = np.asarray(Z, dtype=float)
    U = np.asarray(U, dtype=float)
    if isinstance(K, (HPolytope, VPolytope)):
        normals, offsets = _hrep(K)
        du = U @ normals.T  # (N, m)
        slack = offsets[None, :] - Z @ normals.T
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = slack / du
        pos = du > 1e-13
        neg = du < -1e-13
        hi = np.where(pos, ratio, np.inf).min(axis=1)
        lo = np.where(neg, ratio, -np.inf).max(axis=1)
        para_bad = (~pos & ~neg & (slack < -1e-11 * max(1.0, np.max(np.abs(offsets))))).any(axis=1)
        hit = np.isfinite(hi) & np.isfinite(lo) & (hi >= lo - 1e-13) & ~para_bad
        return lo, hi, hit
    if isinstance(K, Ball):
        W = Z - K.center
        b = np.einsum("ij,ij->i", W, U)
        c = np.einsum("ij,ij->i", W, W) - K.radius**2
        disc = b * b - c
        hit = disc >= 0
        root = np.sqrt(np.maximum(disc, 0.0))
        return -b - root, -b + root, hit
    if isinstance(K, Ellipsoid):
        A = K.frame / K.semi_axes[:, None]
        W = (Z - K.center) @ A.T
        D = U @ A.T
        aa = np.einsum("ij,ij->i", D, D)
        b = np.einsum("ij,ij->i", W, D)
        c = np.einsum("ij,ij->i", W, W) - 1.0
        disc = b * b - aa * c
        hit = (disc >= 0) & (aa > 0)
        root = np.sqrt(np.maximum(disc, 0.0))
        safe = np.where(aa > 0, aa, 1.0)
        return (-b - root) / safe, (-b + root) / safe, hit
    raise TypeError(f"unsupported body type {type(K)!r}")


def contains(K: Body, pts: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Boolean membership test, vectorized over rows of ``pts``."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    if isinstance(K, (HPolytope, VPolytope)):
        normals, offsets = _hrep(K)
        scale = max(1.0, float(np.max(np.abs(offsets))))
        return (pts @ normals.T - offsets[None, :] <= tol * scale).all(axis=1)
    if isinstance(K, Ball):
        return np.linalg.norm(pts - K.center, axis=1) <= K.radius * (1 + tol)
    if isinstance(K, Ellipsoid):
        A = K.frame / K.semi_axes[:, None]
        W = (pts - K.center) @ A.T
        return np.einsum("ij,ij->i", W, W) <= 1 + tol
    raise TypeError(f"unsupported body type {type(K)!r}")


# ---------------------------------------------------------------------------
# Wulff shape + facet geometry
# ---------------------------------------------------------------------------


def wulff(normals, h) -> HPolytope:
    """Wulff shape {x : x . u_i <= h_i}; raises on unbounded/empty input.

    Redundant constraints are kept in place (zero-area facets) so that
    h-vectors keep stable solver coordinates.
    """
    return HPolytope(np.asarray(normals, dtype=float), np.asarray(h, dtype=float))


def facet_decomposition(P: HPolytope) -> list[FacetGeometry]:
    """Per-facet geometry: vertices, area, simplicial decomposition.

    Each simplex in ``simplices`` is the (n-1)-simplex obtained by fanning a
    boundary face of the facet from the facet centroid; rows are its vertices
    with the apex (centroid) first.
    """
    n = P.dim
    verts = P.vertices
    scale = max(1.0, float(np.max(np.abs(P.offsets))))
    diam = float(np.max(verts.max(axis=0) - verts.min(axis=0)))
    eps_area = 1e-12 * diam ** (n - 1)
    out = []
    for normal, offset in zip(P.normals, P.offsets):
        on = verts[np.abs(verts @ normal - offset) <= 1e-9 * scale]
        if on.shape[0] < n:
            out.append(
                FacetGeometry(normal, float(offset), on, 0.0, (), redundant=True)
            )
            continue
        centroid = on.mean(axis=0)
        basis = _tangent_basis(normal)
        proj = (on - centroid) @ basis.T  # (k, n-1)
        simplices, area = _fan_decomposition(proj, centroid, basis)
        redundant = area <= eps_area
        out.append(
            FacetGeometry(
                normal,
                float(offset),
                on,
                0.0 if redundant else area,
                () if redundant else tuple(simplices),
                redundant=redundant,
            )
        )
    return out


def _tangent_basis(normal: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the hyperplane orthogonal to ``normal`` (rows)."""
    n = normal.shape[0]
    # householder reflection taking e_n to normal
    e = np.zeros(n)
    e[-1] = 1.0
    v = normal - e if normal @ e < 0.999999 else None
    basis = np.eye(n)
    if v is not None:
        v = v / np.linalg.norm(v)
        basis = basis - 2.0 * np.outer(v, v)
    # columns of basis map e_i -> frame; rows 0..n-2 of basis.T span normal^perp
    frame = basis.T[:-1] if v is not None else np.eye(n)[:-1]
    # re-orthogonalize against the normal for numerical hygiene
    frame = frame - np.outer(frame @ normal, normal)
    q, _ = np.linalg.qr(frame.T)
    return q.T


def _fan_decomposition(proj: np.ndarray, centroid: np.ndarray, basis: np.ndarray):
    """Fan the convex hull of projected facet points from their centroid."""
    d = proj.shape[1]
    if d == 1:
        lo, hi = float(proj.min()), float(proj.max())
        area = hi - lo
        simplices = [
            np.vstack([centroid, centroid + hi * basis[0]]),
            np.vstack([centroid, centroid + lo * basis[0]]),
        ]
        return simplices, area
    try:
        hull = ConvexHull(proj)
    except Exception:
        return [], 0.0
    area = float(hull.volume)
    simplices = []
    for face in hull.simplices:
        base = proj[face] @ basis + centroid
        simplices.append(np.vstack([centroid, base]))
    return simplices, area


def simplex_volume(verts: np.ndarray) -> float:
    """d-volume of a d-simplex embedded in R^n (rows = d+1 vertices)."""
    edges = verts[1:] - verts[0]
    d = edges.shape[0]
    gram = edges @ edges.T
    det = np.linalg.det(gram)
    return math.sqrt(max(det, 0.0)) / math.factorial(d)


# ---------------------------------------------------------------------------
# volume / surface area / distance
# ---------------------------------------------------------------------------


def volume(K: Body) -> float:
    if isinstance(K, Ball):
        return unit_ball_volume(K.dim) * K.radius**K.dim
    if isinstance(K, Ellipsoid):
        return unit_ball_volume(K.dim) * float(np.prod(K.semi_axes))
    P = K.as_hpolytope() if isinstance(K, VPolytope) else K
    facets = facet_decomposition(P)
    c = P.chebyshev_center
    # cone decomposition about an interior point is origin-independent
    return sum((f.offset - f.normal @ c) * f.area for f in facets) / P.dim


def surface_area(K: Body) -> float:
    if isinstance(K, Ball):
        return sphere_area(K.dim) * K.radius ** (K.dim - 1)
    if isinstance(K, Ellipsoid):
        return _ellipsoid_surface_area(K)
    P = K.as_hpolytope() if isinstance(K, VPolytope) else K
    return sum(f.area for f in facet_decomposition(P))


def _ellipsoid_surface_area(E: Ellipsoid) -> float:
    a = E.semi_axes
    if E.dim == 2:
        from scipy.special import ellipe

        # perimeter of an ellipse with semi-axes a1 <= a2
        ecc2 = 1.0 - (a[0] / a[1]) ** 2
        return 4.0 * a[1] * float(ellipe(ecc2))
    if E.dim == 3:
        from scipy.integrate import dblquad

        ax, ay, az = a

        def integrand(phi, theta):
            st, ct = math.sin(theta), math.cos(theta)
            sp, cp = math.sin(phi), math.cos(phi)
            g = math.sqrt(
                (ay * az * st * cp) ** 2 + (ax * az * st * sp) ** 2 + (ax * ay * ct) ** 2
            )
            return g * st

        val, _ = dblquad(integrand, 0, math.pi, 0, 2 * math.pi, epsabs=1e-10)
        return val
    raise NotImplementedError("ellipsoid surface area only for n = 2, 3")


def direction_grid(n: int, resolution: int = 4096) -> np.ndarray:
    """Deterministic quasi-uniform grid of unit directions."""
    if n == 2:
        ang = np.linspace(0.0, 2 * math.pi, resolution, endpoint=False)
        return np.column_stack([np.cos(ang), np.sin(ang)])
    if n == 3:
        # Fibonacci sphere
        i = np.arange(resolution) + 0.5
        phi = math.pi * (3.0 - math.sqrt(5.0)) * i
        ct = 1.0 - 2.0 * i / resolution
        st = np.sqrt(np.maximum(1.0 - ct * ct, 0.0))
        return np.column_stack([st * np.cos(phi), st * np.sin(phi), ct])
    rng = np.random.default_rng(np.random.SeedSequence(entropy=0, spawn_key=(n, resolution)))
    g = rng.standard_normal((resolution, n))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def hausdorff_distance(K: Body, L: Body, resolution: int = 4096) -> float:
    """Sup of |h_K - h_L| over a deterministic direction grid plus any
    polytope normals of either body."""
    if K.dim != L.dim:
        raise GeometryError("bodies must share a dimension")
    dirs = [direction_grid(K.dim, resolution)]
    for body in (K, L):
        if isinstance(body, (HPolytope, VPolytope)):
            dirs.append(_hrep(body)[0])
    best = 0.0
    for block in dirs:
        hk = support_batch(K, block)
        hl = support_batch(L, block)
        best = max(best, float(np.max(np.abs(hk - hl))))
    return best


def support_batch(K: Body, V: np.ndarray) -> np.ndarray:
    V = np.atleast_2d(np.asarray(V, dtype=float))
    if isinstance(K, Ball):
        return V @ K.center + K.radius * np.linalg.norm(V, axis=1)
    if isinstance(K, Ellipsoid):
        proj = V @ K.frame.T
        return V @ K.center + np.sqrt(np.sum((proj * K.semi_axes) ** 2, axis=1))
    pts = K.vertices if isinstance(K, HPolytope) else K.points
    return (V @ pts.T).max(axis=1)


def centroid(K: Body) -> np.ndarray:
    if isinstance(K, (Ball, Ellipsoid)):
        return K.center
    P = K.as_hpolytope() if isinstance(K, VPolytope) else K
    return P.centroid


def circumradius(K: Body) -> float:
    """Radius of the smallest ball about the centroid containing K."""
    if isinstance(K, Ball):
        return K.radius
    if isinstance(K, Ellipsoid):
        return float(K.semi_axes[-1])
    P = K.as_hpolytope() if isinstance(K, VPolytope) else K
    return P.circumradius


def diameter(K: Body) -> float:
    return 2.0 * circumradius(K)


def boundary_point_info(K: Body, z, tol: float = 1e-8):
    """(is_boundary, outward_unit_normal) at z; normal is None off-boundary."""
    z = np.asarray(z, dtype=float)
    if isinstance(K, Ball):
        r = np.linalg.norm(z - K.center)
        if abs(r - K.radius) <= tol * K.radius:
            return True, (z - K.center) / r
        return False, None
    if isinstance(K, Ellipsoid):
        A = K.frame / K.semi_axes[:, None]
        w = A @ (z - K.center)
        if abs(w @ w - 1.0) <= 10 * tol:
            grad = (A.T @ w)
            return True, grad / np.linalg.norm(grad)
        return False, None
    P = K.as_hpolytope() if isinstance(K, VPolytope) else K
    scale = max(1.0, float(np.max(np.abs(P.offsets))))
    slack = P.offsets - P.normals @ z
    i = int(np.argmin(slack))
    if abs(slack[i]) <= tol * scale and np.all(slack >= -tol * scale):
        return True, P.normals[i]
    return False, None


def ellipsoid_mean_curvature(E: Ellipsoid, z) -> float:
    """Arithmetic-mean curvature of the ellipsoid boundary at z (analytic)."""
    z = np.asarray(z, dtype=float)
    n = E.dim
    w = E.frame @ (z - E.center)
    a2 = E.semi_axes**2
    grad = 2.0 * w / a2
    gn = np.linalg.norm(grad)
    hess_trace = float(np.sum(2.0 / a2))
    nu = grad / gn
    nuHnu = float(np.sum(2.0 * nu**2 / a2))
    return (hess_trace - nuHnu) / (gn * (n - 1))


# ---------------------------------------------------------------------------
# Minkowski scaling / translation helpers
# ---------------------------------------------------------------------------


def scale_body(K: Body, t: float, about=None) -> Body:
    """Homothety x -> about + t*(x - about); ``about`` defaults to the origin."""
    if t <= 0:
        raise GeometryError("scale factor must be positive")
    about = np.zeros(K.dim) if about is None else np.asarray(about, dtype=float)
    if isinstance(K, Ball):
        return Ball(about + t * (K.center - about), t * K.radius)
    if isinstance(K, Ellipsoid):
        return Ellipsoid(about + t * (K.center - about), t * K.semi_axes, K.frame)
    if isinstance(K, HPolytope):
        shift = K.normals @ about
        return HPolytope(K.normals, t * (K.offsets - shift) + shift)
    return VPolytope(about + t * (K.points - about))


def translate_body(K: Body, y) -> Body:
    y = np.asarray(y, dtype=float)
    if isinstance(K, Ball):
        return Ball(K.center + y, K.radius)
    if isinstance(K, Ellipsoid):
        return Ellipsoid(K.center + y, K.semi_axes, K.frame)
    if isinstance(K, HPolytope):
        return HPolytope(K.normals, K.offsets + K.normals @ y)
    return VPolytope(K.points + y)


# ---------------------------------------------------------------------------
# JSON schema
# ---------------------------------------------------------------------------


def body_to_json(K: Body) -> dict:
    if isinstance(K, Ball):
        return {
            "kind": "ball",
            "dim": K.dim,
            "center": K.center.tolist(),
            "radius": K.radius,
        }
    if isinstance(K, Ellipsoid):
        return {
            "kind": "ellipsoid",
            "dim": K.dim,
            "center": K.center.tolist(),
            "semi_axes": K.semi_axes.tolist(),
            "frame": K.frame.tolist(),
        }
    if isinstance(K, HPolytope):
        return {
            "kind": "hpolytope",
            "dim": K.dim,
            "normals": K.normals.tolist(),
            "offsets": K.offsets.tolist(),
        }
    if isinstance(K, VPolytope):
        return {"kind": "vpolytope", "dim": K.dim, "vertices": K.points.tolist()}
    raise TypeError(f"unsupported body type {type(K)!r}")


def _num(x):
    if isinstance(x, str):
        return float(x)
    if isinstance(x, list):
        return [_num(v) for v in x]
    return float(x)


def body_from_json(doc: dict) -> Body:
    try:
        kind = doc["kind"]
        if kind == "ball":
            return Ball(np.asarray(_num(doc["center"])), _num(doc["radius"]))
        if kind == "ellipsoid":
            return Ellipsoid(
                np.asarray(_num(doc["center"])),
                np.asarray(_num(doc["semi_axes"])),
                np.asarray(_num(doc["frame"])) if "frame" in doc else None,
            )
        if kind == "hpolytope":
            return HPolytope(np.asarray(_num(doc["normals"])), np.asarray(_num(doc["offsets"])))
        if kind == "vpolytope":
            return VPolytope(np.asarray(_num(doc["vertices"])))
    except KeyError as exc:
        raise GeometryError(f"body JSON missing field {exc}") from exc
    raise GeometryError(f"unknown body kind {doc.get('kind')!r}")


# ---------------------------------------------------------------------------
# random test bodies
# ---------------------------------------------------------------------------


def random_polytope(n: int, m: int, rng: np.random.Generator) -> HPolytope:
    """Random bounded polytope with ~m facets (retries on degeneracy)."""
    for _ in range(50):
        g = rng.standard_normal((max(m, n + 1), n))
        normals = g / np.linalg.norm(g, axis=1, keepdims=True)
        offsets = rng.uniform(0.5, 1.5, size=normals.shape[0])
        try:
            return HPolytope(normals, offsets)
        except GeometryError:
            continue
    raise GeometryError("failed to sample a valid polytope")


def random_symmetric_polytope(n: int, pairs: int, rng: np.random.Generator) -> HPolytope:
    """Random origin-symmetric polytope with ``pairs`` antipodal facet pairs."""
    for _ in range(50):
        g = rng.standard_normal((max(pairs, n), n))
        u = g / np.linalg.norm(g, axis=1, keepdims=True)
        h = rng.uniform(0.5, 1.5, size=u.shape[0])
        normals = np.vstack([u, -u])
        offsets = np.concatenate([h, h])
        try:
            return HPolytope(normals, offsets)
        except GeometryError:
            continue
    raise GeometryError("failed to sample a valid symmetric polytope")
