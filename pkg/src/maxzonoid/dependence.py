"""Scalar dependence functionals: extremal coefficients, the tail index
chi, Spearman and Kendall correlations, the inverted-Pearson covariance,
and the multivariate volume-based rho."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.integrate import quad

from .geometry import (
    _support_finite,
    _to_spectral,
    minkowski_combine,
    polar_volume,
    support_function,
    unit_cube,
)


def _body(model):
    return model.K if hasattr(model, "K") else model


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float
    method: str

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class ExtremalTable:
    """Map from nonempty coordinate subsets (0-based frozensets) to the
    extremal coefficients theta_A = h(K, e_A)."""

    d: int
    values: dict

    def __post_init__(self):
        vals = {}
        for key, v in self.values.items():
            A = frozenset(int(i) for i in key)
            if not A or min(A) < 0 or max(A) >= self.d:
                raise ValueError(f"invalid subset {sorted(key)}")
            vals[A] = float(v)
        object.__setattr__(self, "values", vals)

    def theta(self, subset):
        return self.values[frozenset(subset)]

    def is_complete(self):
        return len(self.values) == 2**self.d - 1


def indicator(A, d):
    e = np.zeros(d)
    e[list(A)] = 1.0
    return e


def extremal_coefficient(model, A):
    """theta_A = h(K, e_A), the effective number of independent
    coordinates among A."""
    K = _body(model)
    A = set(int(i) for i in A)
    if not A:
        raise ValueError("subset must be nonempty")
    if min(A) < 0 or max(A) >= K.d:
        raise ValueError("subset out of range")
    return float(support_function(K, indicator(A, K.d)))


def extremal_table(model, max_size=None):
    """All theta_A up to the given subset size (default: every subset)."""
    K = _body(model)
    d = K.d
    max_size = d if max_size is None else min(max_size, d)
    values = {}
    for k in range(1, max_size + 1):
        for A in combinations(range(d), k):
            values[frozenset(A)] = extremal_coefficient(model, A)
    return ExtremalTable(d, values)


def chi(model):
    """Bivariate tail dependence index chi = 2 - h(K, (1, 1)) in [0, 1]."""
    K = _body(model)
    if K.d != 2:
        raise ValueError("chi is bivariate")
    return 2.0 - float(support_function(K, np.ones(2)))


def _half_cube_sum(K):
    """L = (K + unit cube) / 2, the body whose polar volume carries
    Spearman's rho."""
    return minkowski_combine(K, unit_cube(K.d), 0.5, mode="sum")


def spearman_rho(model, method="auto", n=200_000, seed=0):
    """Spearman correlation from the polar volume of L = (K + cube)/2.

    Planar: rho = 3(2 V_2(L°) - 1), exact by polygon area or radial
    quadrature; "quadrature" integrates (1 + h(K,(t,1-t)))^-2 directly.
    For d >= 3: rho = c (d! V_d(L°) - 1), c = (d+1)/(2^d - d - 1), with
    the volume estimated by rejection sampling.
    """
    K = _body(model)
    d = K.d
    if method == "auto":
        method = "exact" if d == 2 else "mc"
    if method == "quadrature":
        if d != 2:
            raise ValueError("the J-integral form is bivariate")
        J, _ = quad(
            lambda t: (1.0 + _support_finite(K, np.array([[t, 1.0 - t]]))[0]) ** -2,
            0.0,
            1.0,
            epsabs=1e-12,
            epsrel=1e-12,
        )
        return Estimate(12.0 * J - 3.0, 0.0, "quadrature")
    L = _half_cube_sum(K)
    if method == "exact":
        if d != 2:
            raise ValueError("exact polar area requires d = 2")
        V = polar_volume(L, method="exact_2d")
        return Estimate(3.0 * (2.0 * V.value - 1.0), 0.0, "exact")
    if method == "mc":
        V = polar_volume(L, method="mc", n=n, seed=seed)
        if d == 2:
            return Estimate(3.0 * (2.0 * V.value - 1.0), 6.0 * V.stderr, "mc")
        c = (d + 1.0) / (2.0**d - d - 1.0)
        fact = math.factorial(d)
        return Estimate(c * (fact * V.value - 1.0), c * fact * V.stderr, "mc")
    raise ValueError(f"unknown method {method!r}")


def _tau_discrete(sigma):
    """Closed-form segment integration: between breakpoints the support
    point y = (P, Q) is constant and h(t) = P t + Q (1 - t), so the
    integrand P Q / h^2 integrates in closed form."""
    a = sigma.atoms
    w = sigma.masses
    brk = a[:, 1] / (a[:, 0] + a[:, 1])
    ts = np.unique(np.concatenate([[0.0, 1.0], brk[(brk > 0) & (brk < 1)]]))
    total = 0.0
    for ta, tb in zip(ts[:-1], ts[1:]):
        tm = 0.5 * (ta + tb)
        side1 = a[:, 0] * tm >= a[:, 1] * (1.0 - tm)
        P = float((w * a[:, 0])[side1].sum())  # y_1 on this segment
        Q = float((w * a[:, 1])[~side1].sum())  # y_2 on this segment
        if P <= 0.0 or Q <= 0.0:
            continue
        ha = P * ta + Q * (1.0 - ta)
        hb = P * tb + Q * (1.0 - tb)
        if abs(P - Q) < 1e-14:
            total += P * Q * (tb - ta) / (ha * hb)
        else:
            total += P * Q / (P - Q) * (1.0 / ha - 1.0 / hb)
    return 1.0 - total


def kendall_tau_2d(model, quad_tol=1e-10):
    """Kendall correlation tau = 1 - int_0^1 y1 y2 / h(t, 1-t)^2 dt where
    (y1, y2) is the support point in direction (t, 1-t)."""
    K = _body(model)
    if K.d != 2:
        raise ValueError("Kendall tau is bivariate")
    sigma = _to_spectral(K)
    if sigma is not None:
        return _tau_discrete(sigma)
    if K.norm.grad is not None:
        grad = lambda X: np.asarray(K.norm.grad(X), dtype=float)
    else:
        # difference noise in the gradient caps the useful tolerance
        quad_tol = max(quad_tol, 3e-8)

        def grad(X, h=1e-7):
            out = np.empty_like(X)
            for i in range(2):
                up, dn = X.copy(), X.copy()
                up[:, i] += h
                dn[:, i] = np.maximum(dn[:, i] - h, 0.0)
                out[:, i] = (_support_finite(K, up) - _support_finite(K, dn)) / (
                    up[:, i] - dn[:, i]
                )
            return out

    def integrand(t):
        X = np.array([[t, 1.0 - t]])
        y = grad(X)[0]
        h = _support_finite(K, X)[0]
        return y[0] * y[1] / (h * h)

    val, _ = quad(integrand, 0.0, 1.0, epsabs=quad_tol, epsrel=quad_tol, limit=200)
    return 1.0 - val


def inverted_pearson_2d(model, method="exact", n=200_000, seed=0):
    """Covariance of (1/xi_1, 1/xi_2), equal to 2 V_2(K°) - 1."""
    K = _body(model)
    if K.d != 2:
        raise ValueError("defined for bivariate models")
    if method == "exact":
        V = polar_volume(K, method="exact_2d")
        return Estimate(2.0 * V.value - 1.0, 0.0, "exact")
    V = polar_volume(K, method="mc", n=n, seed=seed)
    return Estimate(2.0 * V.value - 1.0, 2.0 * V.stderr, "mc")


def multivariate_rho(model, n=400_000, seed=0, method="auto"):
    """rho = (d! V_d(K°) - 1)/(d! - 1) in [0, 1], zero iff independent
    and one iff completely dependent."""
    K = _body(model)
    d = K.d
    if d < 2:
        raise ValueError("needs d >= 2")
    fact = math.factorial(d)
    if method == "auto":
        method = "exact_2d" if d == 2 else "mc"
    V = polar_volume(K, method=method, n=n, seed=seed)
    return Estimate(
        (fact * V.value - 1.0) / (fact - 1.0),
        fact * V.stderr / (fact - 1.0),
        V.method,
    )
