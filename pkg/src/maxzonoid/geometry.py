"""Convex bodies in the nonnegative orthant represented by support functions.

A max-zonoid is stored in exactly one of three forms: a discrete
spectral measure (canonical; a finite sum of cross-polytopes), a planar
vertex chain, or an analytic norm handle.  Every operation here is a
pure function of immutable values; Monte Carlo operations take explicit
seeds and chunk them deterministically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.special import ndtri
from scipy.stats import qmc

from . import _kernels
from .spectral import (
    ATOM_TOL,
    DiscreteSpectralMeasure,
    make_measure,
    polygon_from_spectral,
    rebase_reference,
    spectral_from_points,
    spectral_from_polygon_2d,
)

EPS = 1e-9


# ---------------------------------------------------------------------------
# representations


@dataclass(frozen=True)
class Polygon2D:
    """Anticlockwise vertex chain of a planar body, from a point on the
    positive x-axis to a point on the positive y-axis.  The body is the
    convex hull of the chain and the origin."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 2:
            raise ValueError("polygon chain needs at least two 2-D vertices")
        if np.any(v < -EPS):
            raise ValueError("polygon vertices must be nonnegative")
        if abs(v[0, 1]) > EPS or abs(v[-1, 0]) > EPS:
            raise ValueError("chain must start on the x-axis and end on the y-axis")
        v = v.copy()
        v[0, 1] = 0.0
        v[-1, 0] = 0.0
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @classmethod
    def from_chain(cls, vertices, repair_tol=EPS):
        """Clean a raw chain: dedup, drop collinear vertices, repair
        convexity violations below repair_tol, reject larger ones."""
        v = np.asarray(vertices, dtype=float)
        v = np.where(np.abs(v) <= EPS, 0.0, v)
        kept = [v[0]]
        for p in v[1:]:
            if np.abs(p - kept[-1]).max() > EPS:
                kept.append(p)
        out = [kept[0]]
        for p in kept[1:]:
            while len(out) >= 2:
                e1 = out[-1] - out[-2]
                e2 = p - out[-1]
                cross = e1[0] * e2[1] - e1[1] * e2[0]
                if cross < -repair_tol:
                    raise ValueError("chain violates convexity beyond tolerance")
                if cross <= EPS:
                    out.pop()
                else:
                    break
            out.append(p)
        return cls(np.array(out))

    @property
    def is_dependency(self):
        v = self.vertices
        return (
            np.abs(v[0] - (1.0, 0.0)).max() <= EPS
            and np.abs(v[-1] - (0.0, 1.0)).max() <= EPS
            and v.max() <= 1.0 + EPS
        )

    def support(self, points):
        vals = points @ self.vertices.T
        return np.maximum(vals.max(axis=1), 0.0)

    def area_with_origin(self):
        """Area of the body conv({0} | chain) by the shoelace fan."""
        a, b = self.vertices[:-1], self.vertices[1:]
        return 0.5 * float((a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]).sum())


@dataclass(frozen=True)
class AnalyticNorm:
    """Closed-form support function handle.

    fn maps (n, d) arrays of nonnegative points to (n,) values; grad,
    when given, maps (n, d) to the (n, d) support points (gradient of
    the norm where it is smooth)."""

    name: str
    d: int
    fn: Callable[[np.ndarray], np.ndarray]
    grad: Callable[[np.ndarray], np.ndarray] | None = None
    params: tuple = ()


@dataclass(frozen=True)
class MaxZonoid:
    """A max-zonoid in [0, inf)^d given by exactly one representation."""

    d: int
    spectral: DiscreteSpectralMeasure | None = None
    polygon: Polygon2D | None = None
    norm: AnalyticNorm | None = None

    def __post_init__(self):
        reps = [r for r in (self.spectral, self.polygon, self.norm) if r is not None]
        if len(reps) != 1:
            raise ValueError("exactly one representation must be given")
        if self.spectral is not None and self.spectral.d != self.d:
            raise ValueError("dimension mismatch between measure and body")
        if self.polygon is not None and self.d != 2:
            raise ValueError("polygon representation requires d = 2")
        if self.norm is not None and self.norm.d != self.d:
            raise ValueError("dimension mismatch between norm and body")

    def support(self, x):
        return support_function(self, x)

    def marginals(self):
        """Support values at the basis vectors."""
        return support_function(self, np.eye(self.d))


@dataclass(frozen=True)
class DependencySet(MaxZonoid):
    """A max-zonoid normalized so the support of every basis vector is 1
    (unit Frechet marginals)."""

    def __post_init__(self):
        super().__post_init__()
        marg = self.marginals()
        if np.abs(marg - 1.0).max() > 1e-9:
            raise ValueError(
                f"not normalized: support at basis vectors is {marg}, expected all 1"
            )


def _fields(K):
    return dict(d=K.d, spectral=K.spectral, polygon=K.polygon, norm=K.norm)


def as_dependency(K):
    """Assert the normalization h(e_i) = 1 and rewrap."""
    if isinstance(K, DependencySet):
        return K
    return DependencySet(**_fields(K))


def normalize_dependency(K):
    """Coordinatewise rescale onto unit marginals (always possible for a
    max-zonoid with positive coordinate extents)."""
    marg = K.marginals()
    if np.any(marg <= EPS):
        raise ValueError("body has a degenerate coordinate, cannot normalize")
    if np.abs(marg - 1.0).max() <= 1e-12:
        return as_dependency(K)
    return as_dependency(scale(K, 1.0 / marg))


def _rewrap(result, *inputs):
    if all(isinstance(K, DependencySet) for K in inputs):
        return as_dependency(result)
    return result


# ---------------------------------------------------------------------------
# constructors


def zonoid_from_atoms(points, masses, reference="l1"):
    sigma = make_measure(points, masses, reference)
    return MaxZonoid(d=sigma.d, spectral=sigma)


def cross_polytope(apex):
    """conv{0, apex_1 e_1, ..., apex_d e_d}; support max_i max(0, apex_i x_i)."""
    apex = np.asarray(apex, dtype=float)
    return MaxZonoid(d=apex.size, spectral=spectral_from_points([apex]))


def unit_cube(d):
    """Independence body [0,1]^d: unit atoms on the coordinate axes."""
    return DependencySet(d=d, spectral=make_measure(np.eye(d), np.ones(d)))


def unit_cross_polytope(d):
    """Complete-dependence body conv{0, e_1, ..., e_d}: one diagonal atom."""
    return DependencySet(d=d, spectral=make_measure(np.full((1, d), 1.0 / d), [float(d)]))


def zonoid_from_polygon(polygon):
    K = MaxZonoid(d=2, polygon=polygon)
    return as_dependency(K) if polygon.is_dependency else K


# ---------------------------------------------------------------------------
# support evaluation


def _coordinate_extent(K):
    """Boolean mask of coordinates where the body has positive extent."""
    if K.spectral is not None:
        return (K.spectral.scaled_atoms > ATOM_TOL).any(axis=0)
    if K.polygon is not None:
        return (K.polygon.vertices > ATOM_TOL).any(axis=0)
    return np.ones(K.d, dtype=bool)


def _support_finite(K, X):
    if K.spectral is not None:
        return _kernels.support_sum(K.spectral.scaled_atoms, X)
    if K.polygon is not None:
        return K.polygon.support(X)
    return np.asarray(K.norm.fn(X), dtype=float)


def support_function(K, x):
    """h(K, x) = sup over the body of the scalar product with x.

    x takes nonnegative coordinates, +inf allowed (the convention
    0 * inf = 0 applies in atom products, matching marginalization).
    """
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.shape[1] != K.d:
        raise ValueError(f"direction has dimension {X.shape[1]}, body has {K.d}")
    if np.any(X < 0):
        raise ValueError("directions must be nonnegative")
    out = np.empty(X.shape[0])
    inf_rows = np.isinf(X).any(axis=1)
    if inf_rows.any():
        extent = _coordinate_extent(K)
        hit = (np.isinf(X) & extent[None, :]).any(axis=1)
        out[hit] = np.inf
        rest = inf_rows & ~hit
        if rest.any():
            out[rest] = _support_finite(K, np.where(np.isinf(X[rest]), 0.0, X[rest]))
    fin = ~inf_rows
    if fin.any():
        out[fin] = _support_finite(K, np.ascontiguousarray(X[fin]))
    return float(out[0]) if single else out


def _support_clipped(K, U):
    """Support on arbitrary directions; valid because max-zonoids contain
    the origin and are coordinatewise comprehensive, so h(u) = h(u_+)."""
    return _support_finite(K, np.ascontiguousarray(np.clip(U, 0.0, None)))


# ---------------------------------------------------------------------------
# the operations algebra


def _to_spectral(K):
    if K.spectral is not None:
        return K.spectral
    if K.polygon is not None:
        return spectral_from_polygon_2d(K.polygon)
    return None


def _polygon_of(K, directions=512):
    """Planar vertex chain of a 2-D body; exact for discrete/polygonal
    bodies, a fine inscribed/circumscribed chain for analytic norms."""
    if K.d != 2:
        raise ValueError("polygon materialization requires d = 2")
    if K.polygon is not None:
        return K.polygon
    if K.spectral is not None:
        return polygon_from_spectral(K.spectral)
    theta = np.linspace(0.0, np.pi / 2, directions + 1)
    U = np.column_stack([np.cos(theta), np.sin(theta)])
    if K.norm.grad is not None:
        pts = np.asarray(K.norm.grad(U), dtype=float)
        h_e = support_function(K, np.eye(2))
        pts = np.vstack([[h_e[0], 0.0], pts, [0.0, h_e[1]]])
        return _ne_chain(pts)
    h = _support_finite(K, U)
    return _envelope_polygon(U, h)


def scale(K, lam):
    """Coordinatewise rescaled body: h(scale(K, lam), x) = h(K, lam * x)."""
    lam = np.broadcast_to(np.asarray(lam, dtype=float), (K.d,))
    if np.any(lam <= 0) or not np.all(np.isfinite(lam)):
        raise ValueError("scale factors must be positive finite")
    if np.all(lam == 1.0):
        return K
    if K.spectral is not None:
        sigma = K.spectral
        new = spectral_from_points(sigma.atoms * lam, sigma.masses, sigma.reference)
        return MaxZonoid(d=K.d, spectral=new)
    if K.polygon is not None:
        return MaxZonoid(d=2, polygon=Polygon2D.from_chain(K.polygon.vertices * lam))
    base = K.norm
    lam_c = lam.copy()
    fn = lambda X, _f=base.fn, _l=lam_c: _f(X * _l)
    grad = None
    if base.grad is not None:
        grad = lambda X, _g=base.grad, _l=lam_c: _g(X * _l) * _l
    return MaxZonoid(
        d=K.d, norm=AnalyticNorm(f"{base.name}*scaled", K.d, fn, grad, base.params)
    )


def project(K, coords):
    """Body of the sub-vector on the given coordinates: the support
    function of the result equals h(K, x lifted with zeros)."""
    coords = np.asarray(sorted(set(int(c) for c in np.atleast_1d(coords))))
    if coords.size == 0:
        raise ValueError("projection needs a nonempty coordinate subset")
    if coords.min() < 0 or coords.max() >= K.d:
        raise ValueError("coordinate subset out of range")
    if coords.size == K.d:
        return K
    if K.spectral is not None:
        sigma = K.spectral
        sub = sigma.atoms[:, coords]
        from .spectral import reference_norm_of

        norms = reference_norm_of(sub, sigma.reference)
        keep = norms > ATOM_TOL
        if not keep.any():
            raise ValueError("projection is degenerate (zero body)")
        new = spectral_from_points(sub[keep], sigma.masses[keep], sigma.reference)
        return _rewrap(MaxZonoid(d=coords.size, spectral=new), K)
    if K.polygon is not None:
        extent = float(K.polygon.vertices[:, coords[0]].max())
        atom = make_measure([[1.0]], [extent])
        return _rewrap(MaxZonoid(d=1, spectral=atom), K)
    base = K.norm
    d_old, idx = K.d, coords.copy()

    def fn(X, _f=base.fn, _d=d_old, _i=idx):
        full = np.zeros((X.shape[0], _d))
        full[:, _i] = X
        return _f(full)

    grad = None
    if base.grad is not None:

        def grad(X, _g=base.grad, _d=d_old, _i=idx):
            full = np.zeros((X.shape[0], _d))
            full[:, _i] = X
            return _g(full)[:, _i]

    out = MaxZonoid(
        d=coords.size,
        norm=AnalyticNorm(f"{base.name}|proj", coords.size, fn, grad, base.params),
    )
    return _rewrap(out, K)


def cartesian_product(K1, K2):
    """Body of the concatenation of independent vectors:
    h(K1 x K2, (x1, x2)) = h(K1, x1) + h(K2, x2)."""
    s1, s2 = _to_spectral(K1), _to_spectral(K2)
    if s1 is not None and s2 is not None:
        s2 = rebase_reference(s2, s1.reference)
        a1 = np.hstack([s1.atoms, np.zeros((s1.n_atoms, K2.d))])
        a2 = np.hstack([np.zeros((s2.n_atoms, K1.d)), s2.atoms])
        sigma = make_measure(
            np.vstack([a1, a2]), np.concatenate([s1.masses, s2.masses]), s1.reference
        )
        return _rewrap(MaxZonoid(d=K1.d + K2.d, spectral=sigma), K1, K2)
    d1, d2 = K1.d, K2.d

    def fn(X):
        return _support_finite(K1, np.ascontiguousarray(X[:, :d1])) + _support_finite(
            K2, np.ascontiguousarray(X[:, d1:])
        )

    out = MaxZonoid(d=d1 + d2, norm=AnalyticNorm("product", d1 + d2, fn))
    return _rewrap(out, K1, K2)


def minkowski_combine(K1, K2, lam, mode="sum"):
    """Weighted Minkowski sum lam*K1 + (1-lam)*K2 (lam scalar in [0,1] or
    vector in [0,1]^d), or spectral difference K1 - lam*K2 (lam scalar)."""
    if K1.d != K2.d:
        raise ValueError("bodies must share a dimension")
    d = K1.d
    if mode == "sum":
        lam_v = np.broadcast_to(np.asarray(lam, dtype=float), (d,))
        if np.any(lam_v < 0) or np.any(lam_v > 1):
            raise ValueError("weights must lie in [0, 1]")
        s1, s2 = _to_spectral(K1), _to_spectral(K2)
        if s1 is not None and s2 is not None:
            s2 = rebase_reference(s2, s1.reference)
            pts = np.vstack([s1.atoms * lam_v, s2.atoms * (1.0 - lam_v)])
            w = np.concatenate([s1.masses, s2.masses])
            from .spectral import reference_norm_of

            norms = reference_norm_of(pts, s1.reference)
            keep = norms > ATOM_TOL
            sigma = spectral_from_points(pts[keep], w[keep], s1.reference)
            return _rewrap(MaxZonoid(d=d, spectral=sigma), K1, K2)
        one_m = 1.0 - lam_v

        def fn(X, _l=lam_v.copy(), _o=one_m.copy()):
            return _support_finite(K1, X * _l) + _support_finite(K2, X * _o)

        out = MaxZonoid(d=d, norm=AnalyticNorm("minkowski-sum", d, fn))
        return _rewrap(out, K1, K2)
    if mode == "difference":
        lam_s = float(lam)
        if lam_s <= 0:
            raise ValueError("difference weight must be positive")
        s1, s2 = _to_spectral(K1), _to_spectral(K2)
        if s1 is None or s2 is None:
            raise ValueError("spectral difference needs discrete representations")
        s2 = rebase_reference(s2, s1.reference)
        masses = s1.masses.copy()
        for atom, m2 in zip(s2.atoms, s2.masses):
            dist = np.abs(s1.atoms - atom).max(axis=1)
            j = int(np.argmin(dist))
            if dist[j] > 1e-7:
                raise ValueError(
                    f"atom {atom.tolist()} of the subtrahend is absent from the minuend"
                )
            masses[j] -= lam_s * m2
        if masses.min() < -EPS:
            j = int(np.argmin(masses))
            raise ValueError(
                f"negative mass {masses[j]:.3g} at atom {s1.atoms[j].tolist()}"
            )
        keep = masses > ATOM_TOL
        if not keep.any():
            raise ValueError("difference is the degenerate body {0}")
        sigma = make_measure(s1.atoms[keep], masses[keep], s1.reference)
        return MaxZonoid(d=d, spectral=sigma)
    raise ValueError(f"unknown mode {mode!r}")


def _hull_ccw(pts):
    """Anticlockwise convex hull by the monotone chain, collinear
    vertices dropped."""
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]
    keep = [0] + [
        i for i in range(1, len(pts)) if np.abs(pts[i] - pts[i - 1]).max() > EPS
    ]
    pts = pts[keep]
    if len(pts) <= 2:
        return pts

    def half(seq):
        hull = []
        for p in seq:
            while len(hull) >= 2:
                e1 = hull[-1] - hull[-2]
                e2 = p - hull[-1]
                if e1[0] * e2[1] - e1[1] * e2[0] <= EPS:
                    hull.pop()
                else:
                    break
            hull.append(p)
        return hull

    lower = half(pts)
    upper = half(pts[::-1])
    return np.array(lower[:-1] + upper[:-1])


def _ne_chain(points):
    """Anticlockwise boundary chain of conv({0} | points) from the
    positive x-axis to the positive y-axis."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    pts = np.clip(pts, 0.0, None)
    xmax, ymax = pts[:, 0].max(), pts[:, 1].max()
    if xmax <= EPS or ymax <= EPS:
        raise ValueError("degenerate point set for a planar chain")
    pts = np.vstack([pts, [0.0, 0.0], [xmax, 0.0], [0.0, ymax]])
    hull = _hull_ccw(pts)
    on_x = hull[:, 1] <= EPS
    on_y = hull[:, 0] <= EPS
    start = int(np.flatnonzero(on_x)[np.argmax(hull[on_x, 0])])
    end = int(np.flatnonzero(on_y)[np.argmax(hull[on_y, 1])])
    idx = [start]
    while idx[-1] != end:
        idx.append((idx[-1] + 1) % len(hull))
    return Polygon2D.from_chain(hull[idx])


def _envelope_polygon(U, h):
    """Circumscribed chain from supporting lines <u_j, x> = h_j on an
    anticlockwise direction grid covering [e1, e2]."""
    verts = [np.array([h[0] / U[0, 0], 0.0])]
    for j in range(len(h) - 1):
        A = np.array([U[j], U[j + 1]])
        det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
        if abs(det) < 1e-14:
            continue
        x = np.linalg.solve(A, np.array([h[j], h[j + 1]]))
        verts.append(np.clip(x, 0.0, None))
    verts.append(np.array([0.0, h[-1] / U[-1, 1]]))
    return _ne_chain(np.array(verts))


def _clip_chain_region(poly, normal, offset):
    """Sutherland-Hodgman clip of a closed polygon by <normal, x> <= offset."""
    out = []
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        da = normal @ a - offset
        db = normal @ b - offset
        if da <= EPS:
            out.append(a)
        if (da < -EPS and db > EPS) or (da > EPS and db < -EPS):
            t = da / (da - db)
            out.append(a + t * (b - a))
    return out


def combine_2d(K1, K2, mode, p=2.0, lam=0.5, directions=512):
    """Planar-only closure operations: convex hull, intersection, and the
    power mean h = (lam*h1^p + (1-lam)*h2^p)^(1/p) materialized as a
    supporting-line envelope."""
    if K1.d != 2 or K2.d != 2:
        raise ValueError("planar combination requires d = 2")
    P1, P2 = _polygon_of(K1, directions), _polygon_of(K2, directions)
    if mode == "hull":
        chain = _ne_chain(np.vstack([P1.vertices, P2.vertices]))
        return as_dependency(MaxZonoid(d=2, polygon=chain))
    if mode == "intersection":
        poly = [np.zeros(2)] + list(P1.vertices)
        verts = P2.vertices
        for i in range(len(verts) - 1):
            a, b = verts[i], verts[i + 1]
            normal = np.array([b[1] - a[1], a[0] - b[0]])  # outward for ACW chain
            poly = _clip_chain_region(poly, normal, float(normal @ a))
            if not poly:
                raise ValueError("empty intersection")
        chain = _ne_chain(np.array(poly))
        return as_dependency(MaxZonoid(d=2, polygon=chain))
    if mode == "power_mean":
        if p < 1:
            raise ValueError("power-mean exponent must be >= 1")
        if not (0.0 <= lam <= 1.0):
            raise ValueError("power-mean weight must lie in [0, 1]")
        theta = np.linspace(0.0, np.pi / 2, directions + 1)
        U = np.column_stack([np.cos(theta), np.sin(theta)])
        h1, h2 = _support_finite(K1, U), _support_finite(K2, U)
        h = (lam * h1**p + (1.0 - lam) * h2**p) ** (1.0 / p)
        return as_dependency(MaxZonoid(d=2, polygon=_envelope_polygon(U, h)))
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# polar sets, volumes, metrics


def polar_2d(K, directions=4096):
    """The polar set {x in E : h(K, x) <= 1} as a planar chain; exact for
    polygonal and discrete bodies, radially sampled for analytic norms."""
    if K.d != 2:
        raise ValueError("polar materialization requires d = 2")
    if K.norm is not None:
        theta = np.linspace(0.0, np.pi / 2, directions + 1)
        U = np.column_stack([np.cos(theta), np.sin(theta)])
        pts = U / _support_finite(K, U)[:, None]
        return _ne_chain(pts)
    V = _polygon_of(K).vertices
    verts = [np.array([1.0 / V[0, 0], 0.0])]
    for i in range(1, len(V)):
        A = np.array([V[i - 1], V[i]])
        det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
        if abs(det) < 1e-14:
            continue
        verts.append(np.linalg.solve(A, np.ones(2)))
    verts.append(np.array([0.0, 1.0 / V[-1, 1]]))
    return _ne_chain(np.array(verts))


@dataclass(frozen=True)
class VolumeEstimate:
    value: float
    stderr: float
    method: str
    n_samples: int | None = None
    seed: int | None = None

    def __float__(self):
        return self.value


def polar_volume(K, method="auto", n=200_000, seed=0):
    """Lebesgue volume of the polar set.

    exact_2d: shoelace area of the exact polar chain (quadrature of the
    radial function for analytic norms).  mc: rejection sampling on the
    bounding box prod [0, 1/h(e_i)] with a binomial standard error.
    """
    if method == "auto":
        method = "exact_2d" if K.d == 2 else "mc"
    if method == "exact_2d":
        if K.d != 2:
            raise ValueError("exact polar area requires d = 2")
        if K.norm is not None:
            val, _ = quad(
                lambda t: 0.5
                / _support_finite(K, np.array([[math.cos(t), math.sin(t)]]))[0] ** 2,
                0.0,
                np.pi / 2,
                epsabs=1e-12,
                epsrel=1e-12,
            )
            return VolumeEstimate(float(val), 0.0, "exact_2d")
        return VolumeEstimate(polar_2d(K).area_with_origin(), 0.0, "exact_2d")
    if method == "mc":
        extents = K.marginals()
        if np.any(extents <= EPS):
            raise ValueError("degenerate body: polar set is unbounded")
        box = 1.0 / extents
        box_vol = float(np.prod(box))
        accepted = 0
        for chunk_lo, chunk_n, rng in _mc_chunks(n, seed):
            X = rng.random((chunk_n, K.d)) * box
            accepted += int((_support_finite(K, X) <= 1.0).sum())
        p_hat = accepted / n
        se = box_vol * math.sqrt(max(p_hat * (1.0 - p_hat), 1e-300) / n)
        return VolumeEstimate(box_vol * p_hat, se, "mc", n, seed)
    raise ValueError(f"unknown method {method!r}")


def _mc_chunks(n, seed, chunk=65536):
    """Deterministic chunked RNG streams: one spawned child per chunk index."""
    n_chunks = (n + chunk - 1) // chunk
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    for idx in range(n_chunks):
        lo = idx * chunk
        yield lo, min(chunk, n - lo), np.random.default_rng(children[idx])


def exp_support_integral_mc(K, n=200_000, seed=0, beta=0.5):
    """Importance-sampled integral of exp(-h(K, x)) over the orthant,
    with proposal Exp(beta)^d; finite variance for any beta < 1 because
    h dominates the maximum coordinate."""
    d = K.d
    total = 0.0
    total_sq = 0.0
    for _, chunk_n, rng in _mc_chunks(n, seed):
        X = rng.exponential(1.0 / beta, size=(chunk_n, d))
        w = beta**-d * np.exp(beta * X.sum(axis=1) - _support_finite(K, X))
        total += float(w.sum())
        total_sq += float((w * w).sum())
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0)
    return mean, math.sqrt(var / n)


def directions_sphere(n, d, skip=1):
    """Deterministic quasi-random directions on the full unit sphere;
    prefixes are nested so refinement in n is monotone."""
    eng = qmc.Sobol(d, scramble=False)
    eng.fast_forward(skip)
    pts = eng.random(n)
    g = ndtri(np.clip(pts, 1e-12, 1 - 1e-12))
    norms = np.linalg.norm(g, axis=1)
    keep = norms > 0  # the midpoint (0.5, ..., 0.5) maps to the origin
    return g[keep] / norms[keep, None]


def directions_simplex(n, d, skip=1):
    """Deterministic quasi-random directions on the l1 simplex in E."""
    eng = qmc.Sobol(d, scramble=False)
    eng.fast_forward(skip)
    pts = eng.random(n)
    e = -np.log(np.clip(1.0 - pts, 1e-15, 1.0))
    s = e.sum(axis=1)
    s[s == 0] = 1.0
    return e / s[:, None]


def _corner_directions(d):
    """All 0/1 indicator directions (2^d - 1 of them) for small d."""
    if d > 12:
        return np.eye(d)
    corners = ((np.arange(1, 2**d)[:, None] >> np.arange(d)) & 1).astype(float)
    return corners


def hausdorff_distance(K1, K2, grid_n=None):
    """Grid-limited Hausdorff distance: max over directions on the full
    unit sphere of |h(K1, u) - h(K2, u)|, nondecreasing in grid_n."""
    if K1.d != K2.d:
        raise ValueError("bodies must share a dimension")
    d = K1.d
    if grid_n is None:
        grid_n = 4096 if d == 2 else 20_000
    if d == 2:
        theta = 2.0 * np.pi * np.arange(grid_n) / grid_n
        U = np.column_stack([np.cos(theta), np.sin(theta)])
    else:
        U = directions_sphere(grid_n, d)
    diff = np.abs(_support_clipped(K1, U) - _support_clipped(K2, U))
    return float(diff.max())


def m_distance(K1, K2, grid_n=None, lam_tol=1e-6, passes=4):
    """Multiplicative (Banach-Mazur style) distance between dependency
    sets: log inf prod(lam_i) over lam with K1 in lam*K2 and K2 in
    lam*K1.  Containment is tested by support dominance on a direction
    grid; the product is minimized by coordinate descent with binary
    search, so the result is a grid-limited upper bound."""
    if K1.d != K2.d:
        raise ValueError("bodies must share a dimension")
    d = K1.d
    for K in (K1, K2):
        if np.abs(K.marginals() - 1.0).max() > 1e-6:
            raise ValueError("m-distance is defined for dependency sets")
    if grid_n is None:
        grid_n = 4096 if d == 2 else 20_000
    if d == 2:
        theta = np.linspace(0.0, np.pi / 2, grid_n + 1)
        U = np.column_stack([np.cos(theta), np.sin(theta)])
    else:
        U = directions_simplex(grid_n, d)
    U = np.vstack([U, _corner_directions(d)])
    h1 = _support_finite(K1, U)
    h2 = _support_finite(K2, U)

    def feasible(lam):
        Ul = np.ascontiguousarray(U * lam)
        if np.any(_support_finite(K2, Ul) < h1 * (1.0 - 1e-12) - 1e-12):
            return False
        return not np.any(_support_finite(K1, Ul) < h2 * (1.0 - 1e-12) - 1e-12)

    ones = np.ones(d)
    if feasible(ones):
        return 0.0
    lam = np.full(d, float(d))
    for _ in range(60):
        if feasible(lam):
            break
        lam *= 2.0
    else:
        raise ValueError("could not find a feasible starting scale")
    for _ in range(passes):
        for i in range(d):
            lo, hi = 1e-9, lam[i]
            while hi - lo > lam_tol:
                mid = 0.5 * (lo + hi)
                trial = lam.copy()
                trial[i] = mid
                if feasible(trial):
                    hi = mid
                else:
                    lo = mid
            lam[i] = hi
    return float(np.log(np.prod(lam)))
