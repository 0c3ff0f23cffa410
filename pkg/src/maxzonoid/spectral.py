"""Discrete spectral measures on a reference sphere.

A measure is a finite list of weighted atoms on the unit sphere of a
reference norm (l1 simplex by default) restricted to the nonnegative
orthant.  Measures are the canonical representation of max-zonoids:
every finite atom list induces a valid body, and every implemented
body operation maps atom lists to atom lists.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

ATOM_TOL = 1e-9
DEP_TOL = 1e-6

REFERENCE_NORMS = ("l1", "l2", "linf")


def reference_norm_of(points, reference):
    """Row-wise reference norm of nonnegative points, shape (m,)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if reference == "l1":
        return pts.sum(axis=1)
    if reference == "l2":
        return np.sqrt((pts * pts).sum(axis=1))
    if reference == "linf":
        return pts.max(axis=1)
    raise ValueError(f"unknown reference norm {reference!r}")


@dataclass(frozen=True)
class DiscreteSpectralMeasure:
    """Weighted atoms on the reference sphere in the nonnegative orthant.

    atoms : (m, d) array, each row with unit reference norm
    masses : (m,) positive array
    reference : one of "l1", "l2", "linf"
    """

    atoms: np.ndarray
    masses: np.ndarray
    reference: str = "l1"

    def __post_init__(self):
        atoms = np.atleast_2d(np.asarray(self.atoms, dtype=float))
        masses = np.atleast_1d(np.asarray(self.masses, dtype=float))
        if atoms.ndim != 2 or atoms.shape[0] != masses.shape[0]:
            raise ValueError("atoms must be (m, d) with one mass per atom")
        if atoms.shape[0] == 0:
            raise ValueError("measure needs at least one atom")
        if self.reference not in REFERENCE_NORMS:
            raise ValueError(f"unknown reference norm {self.reference!r}")
        if np.any(atoms < -ATOM_TOL):
            raise ValueError("atoms must lie in the nonnegative orthant")
        if np.any(masses <= 0):
            raise ValueError("masses must be positive")
        norms = reference_norm_of(atoms, self.reference)
        if np.any(np.abs(norms - 1.0) > 1e-7):
            worst = float(np.abs(norms - 1.0).max())
            raise ValueError(
                f"atoms must lie on the {self.reference} sphere (max |norm-1| = {worst:.3g})"
            )
        atoms = np.clip(atoms, 0.0, None) / norms[:, None]
        atoms.setflags(write=False)
        masses = masses.copy()
        masses.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "masses", masses)

    @property
    def d(self):
        return self.atoms.shape[1]

    @property
    def n_atoms(self):
        return self.atoms.shape[0]

    @property
    def total_mass(self):
        return float(self.masses.sum())

    @cached_property
    def scaled_atoms(self):
        """atoms * masses, the only array the support kernels need."""
        arr = self.atoms * self.masses[:, None]
        arr.setflags(write=False)
        return arr

    def marginal_sums(self):
        """sum_k mass_k * atom_{k,i} for each coordinate i."""
        return self.scaled_atoms.sum(axis=0)


@dataclass(frozen=True)
class DependencyReport:
    is_dependency: bool
    marginal_sums: np.ndarray
    total_mass: float


def make_measure(points, masses, reference="l1", merge=True):
    """Build a measure, merging atoms closer than ATOM_TOL on the sphere."""
    pts = np.atleast_2d(np.asarray(points, dtype=float)).copy()
    w = np.atleast_1d(np.asarray(masses, dtype=float)).copy()
    keep = w > 0
    pts, w = pts[keep], w[keep]
    if pts.shape[0] == 0:
        raise ValueError("measure needs at least one atom with positive mass")
    norms = reference_norm_of(pts, reference)
    pts = pts / norms[:, None]
    if merge and pts.shape[0] > 1:
        order = np.lexsort(pts.T[::-1])
        pts, w = pts[order], w[order]
        out_pts, out_w = [pts[0]], [w[0]]
        for p, m in zip(pts[1:], w[1:]):
            if np.abs(p - out_pts[-1]).max() <= ATOM_TOL:
                out_w[-1] += m
            else:
                out_pts.append(p)
                out_w.append(m)
        pts, w = np.array(out_pts), np.array(out_w)
    return DiscreteSpectralMeasure(pts, w, reference)


def spectral_from_points(points, weights=None, reference="l1"):
    """Measure induced by weighted points anywhere in the orthant.

    Each point z of weight w becomes the atom z/|z| with mass w*|z|;
    zero points are dropped.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if weights is None:
        weights = np.ones(pts.shape[0])
    w = np.atleast_1d(np.asarray(weights, dtype=float))
    if np.any(pts < -ATOM_TOL):
        raise ValueError("points must be nonnegative")
    if np.any(w <= 0):
        raise ValueError("weights must be positive")
    norms = reference_norm_of(pts, reference)
    keep = norms > ATOM_TOL
    if not keep.any():
        raise ValueError("all points are zero")
    return make_measure(pts[keep], w[keep] * norms[keep], reference)


def rebase_reference(sigma, new_reference):
    """Re-express atoms on another reference sphere; the induced body
    (and its support function) is unchanged."""
    if new_reference == sigma.reference:
        return sigma
    norms = reference_norm_of(sigma.atoms, new_reference)
    return DiscreteSpectralMeasure(
        sigma.atoms / norms[:, None], sigma.masses * norms, new_reference
    )


def validate_dependency(sigma):
    """Check the marginal normalization sum_k mass_k*atom_{k,i} = 1."""
    marg = sigma.marginal_sums()
    ok = bool(np.abs(marg - 1.0).max() <= DEP_TOL)
    return DependencyReport(ok, marg, sigma.total_mass)


def zonoid_from_spectral(sigma):
    """The max-zonoid whose support function is
    h(x) = sum_k mass_k * max_i atom_{k,i} x_i (exact)."""
    from .geometry import MaxZonoid

    return MaxZonoid(d=sigma.d, spectral=sigma)


def spectral_from_polygon_2d(polygon, reference="l1"):
    """Edge measure of a planar chain polygon.

    Consecutive chain vertices a, b contribute the atom u/|u| with mass
    |u| where u = (a_1 - b_1, b_2 - a_2).  With the l2 reference this is
    the length measure of the reflected body restricted to the positive
    quadrant.
    """
    verts = polygon.vertices
    a, b = verts[:-1], verts[1:]
    u = np.column_stack([a[:, 0] - b[:, 0], b[:, 1] - a[:, 1]])
    if np.any(u < -ATOM_TOL):
        raise ValueError("polygon chain is not anticlockwise monotone")
    return spectral_from_points(np.clip(u, 0.0, None), reference=reference)


def polygon_from_spectral(sigma):
    """Materialize the planar body of a 2-D measure as its vertex chain.

    Edges are the scaled atoms sorted by direction; exact inverse of
    spectral_from_polygon_2d up to atom merging.
    """
    from .geometry import Polygon2D

    if sigma.d != 2:
        raise ValueError("polygon materialization requires d = 2")
    ts = sigma.scaled_atoms  # rows (t_k, s_k): x-extent and y-extent per edge
    # anticlockwise from the x-axis: edge normals (s, t) sorted by slope t/s
    ratio = np.where(ts[:, 1] > 0, ts[:, 0] / np.where(ts[:, 1] > 0, ts[:, 1], 1.0), np.inf)
    order = np.argsort(ratio, kind="stable")
    ts = ts[order]
    start = np.array([ts[:, 0].sum(), 0.0])
    deltas = np.column_stack([-ts[:, 0], ts[:, 1]])
    verts = np.vstack([start, start + np.cumsum(deltas, axis=0)])
    return Polygon2D.from_chain(verts)
