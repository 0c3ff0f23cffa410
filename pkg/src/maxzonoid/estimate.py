"""Data-facing layer: empirical spectral measures from threshold
exceedances, half-plane estimation of planar dependency sets, and
Hausdorff convergence diagnostics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import (
    EPS,
    Polygon2D,
    _clip_chain_region,
    _ne_chain,
    hausdorff_distance,
    normalize_dependency,
)
from .spectral import make_measure, reference_norm_of, zonoid_from_spectral


@dataclass(frozen=True)
class DirectionEstimate:
    """An estimated stable-tail-dependence value for one direction on
    the reference sphere; values outside the coherent band
    [max_i u_i, sum_i u_i] are clipped and flagged."""

    direction: np.ndarray
    value: float
    clipped: bool = False


def direction_estimate(direction, value):
    u = np.asarray(direction, dtype=float)
    lo, hi = float(u.max()), float(u.sum())
    v = float(np.clip(value, lo, hi))
    return DirectionEstimate(u, v, clipped=v != float(value))


def empirical_spectral(samples, s, reference="l1"):
    """Empirical exceedance measure: one atom z/|z| of mass s/n per
    observation with |z| >= s."""
    X = samples.values if hasattr(samples, "values") else np.atleast_2d(
        np.asarray(samples, dtype=float)
    )
    if s <= 0:
        raise ValueError("threshold must be positive")
    if np.any(X <= 0):
        raise ValueError("samples must be strictly positive")
    norms = reference_norm_of(X, reference)
    hit = norms >= s
    n_exc = int(hit.sum())
    if n_exc == 0:
        raise ValueError(
            f"no exceedances above s={s:g} (max norm {norms.max():g}); "
            "lower the threshold"
        )
    atoms = X[hit] / norms[hit, None]
    mass = s / X.shape[0]
    return make_measure(atoms, np.full(n_exc, mass), reference)


def estimate_zonoid_2d(estimates):
    """Half-plane estimator of a planar dependency set.

    Intersects {x : <x, u_i> <= value_i} with the unit square and
    renormalizes the result onto unit marginals.  Valid in the plane,
    where every such body is a max-zonoid; deliberately not offered in
    higher dimensions, where the intersection need not be one.
    """
    if len(estimates) < 2:
        raise ValueError("need at least two direction estimates")
    poly = [np.array(p, dtype=float) for p in ((0, 0), (1, 0), (1, 1), (0, 1))]
    for est in estimates:
        u = np.asarray(est.direction, dtype=float)
        if u.shape != (2,):
            raise ValueError("the half-plane estimator is bivariate")
        poly = _clip_chain_region(poly, u, float(est.value))
        if not poly:
            raise ValueError("estimates produced an empty region")
    chain = _ne_chain(np.array(poly))
    xmax, ymax = chain.vertices[:, 0].max(), chain.vertices[:, 1].max()
    if xmax <= EPS or ymax <= EPS:
        raise ValueError("estimates produced a degenerate region")
    return Polygon2D.from_chain(chain.vertices / np.array([xmax, ymax]))


@dataclass(frozen=True)
class ConvergencePoint:
    s: float
    distance: float
    n_exceedances: int
    ok: bool


def convergence_diagnostic(samples, s_grid, target, reference="l1", grid_n=None):
    """Hausdorff distance between the normalized empirical max-zonoid at
    each threshold and a target body; entries without exceedances are
    flagged rather than failing the whole sweep."""
    X = samples.values if hasattr(samples, "values") else np.atleast_2d(
        np.asarray(samples, dtype=float)
    )
    norms = reference_norm_of(X, reference)
    out = []
    for s in np.asarray(s_grid, dtype=float):
        n_exc = int((norms >= s).sum())
        if n_exc == 0:
            out.append(ConvergencePoint(float(s), float("nan"), 0, False))
            continue
        try:
            sigma = empirical_spectral(X, s, reference)
            K = normalize_dependency(zonoid_from_spectral(sigma))
            dist = hausdorff_distance(K, target, grid_n=grid_n)
            out.append(ConvergencePoint(float(s), dist, n_exc, True))
        except ValueError:
            out.append(ConvergencePoint(float(s), float("nan"), n_exc, False))
    return out
