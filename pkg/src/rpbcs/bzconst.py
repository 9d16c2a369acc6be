"""Brillouin-zone sums and integrals for the infrared-bound constants.

With ``Y(p) = -(1/d) sum_m cos p_m`` and ``E_p = sum_m (1 - cos p_m)``:

* ``I_d**2 = (1/(d|L|)) sum_{p != Q} ({-sum cos p}_+)**2 / E_{p+Q}``, whose
  infinite-volume limit is ``int dp Y_+**2 / (1 - Y)``;
* ``G_d = (1/|L|) sum_{p != Q} E_{p+Q}**-0.5``;
* ``delta(beta)`` and ``delta'(beta)``, the ``1/beta`` remainders.

The infinite-volume integral is done by a midpoint product rule with
Richardson extrapolation, and independently through the lattice Green's
function ``int_0^inf I_0(t)**d e^{-dt} dt``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from .lattice import ConfigError

RESOLUTIONS = {3: (32, 64, 128), 4: (32, 64, 128), 5: (16, 24, 32)}


class DivergenceError(ArithmeticError):
    """The requested infinite-volume quantity does not exist."""


def e_p(p):
    """``sum_m (1 - cos p_m)`` along the last axis."""
    return np.sum(1.0 - np.cos(np.asarray(p, dtype=float)), axis=-1)


def y_p(p):
    """``-(1/d) sum_m cos p_m`` along the last axis."""
    return -np.mean(np.cos(np.asarray(p, dtype=float)), axis=-1)


def y_partial(p, idx):
    """``Y`` restricted to the axes in ``idx``."""
    p = np.asarray(p, dtype=float)
    return -np.mean(np.cos(p[..., list(idx)]), axis=-1)


def convex_weight(s):
    """``s**2 / (1 - s)`` on ``[0, 1)``."""
    s = np.asarray(s, dtype=float)
    return s * s / (1.0 - s)


def grid_points(d, L):
    """Dual grid of ``{-L+1..L}^d`` as a ``((2L)^d, d)`` array; ``Q`` included."""
    if d < 1 or L < 1:
        raise ConfigError("need d >= 1 and L >= 1")
    ks = np.pi * np.arange(-L + 1, L + 1) / L
    return np.array(list(itertools.product(ks, repeat=d)))


def _axis_cos(L):
    return np.cos(np.pi * np.arange(-L + 1, L + 1) / L)


def _grid_sum(d, cos_axis, fn):
    """``sum`` of ``fn(S)`` over the tensor grid, ``S = sum_m cos p_m``.

    The last axis is looped to keep memory at ``n**(d-1)``.
    """
    partial = np.zeros(1)
    for _ in range(d - 1):
        partial = (partial[:, None] + cos_axis[None, :]).ravel()
    return float(sum(np.sum(fn(partial + c)) for c in cos_axis))


def _i_terms(d):
    def fn(s):
        e_shift = d + s  # E_{p+Q}
        out = np.zeros_like(s)
        ok = e_shift > 1e-12
        num = np.maximum(-s[ok], 0.0) ** 2
        out[ok] = num / e_shift[ok]
        return out
    return fn


def i_d_finite(d, L):
    """Finite-lattice ``I_d`` (square root of the normalized grid sum)."""
    n = (2 * L) ** d
    total = _grid_sum(d, _axis_cos(L), _i_terms(d))
    return float(np.sqrt(total / (d * n)))


def g_d(d, L):
    """``(1/|L|) sum_{p != Q} E_{p+Q}**-1/2``."""
    n = (2 * L) ** d

    def fn(s):
        e_shift = d + s
        out = np.zeros_like(s)
        ok = e_shift > 1e-12
        out[ok] = 1.0 / np.sqrt(e_shift[ok])
        return out

    return _grid_sum(d, _axis_cos(L), fn) / n


def g_d_series(d, Ls=(4, 8, 16)):
    return [(L, g_d(d, L)) for L in Ls]


def delta_beta(d, L, beta, g):
    """``(1/|L|) sum_{p != Q} {-sum cos p}_+ / (2 d beta g E_{p+Q})``."""
    if beta <= 0 or g <= 0:
        raise ConfigError("need beta > 0 and g > 0")
    n = (2 * L) ** d

    def fn(s):
        e_shift = d + s
        out = np.zeros_like(s)
        ok = e_shift > 1e-12
        out[ok] = np.maximum(-s[ok], 0.0) / e_shift[ok]
        return out

    return _grid_sum(d, _axis_cos(L), fn) / (n * 2 * d * beta * g)


def delta_prime_beta(d, L, beta, g):
    """``(1/|L|) sum_{p != Q} 1 / (2 beta g E_{p+Q})``."""
    if beta <= 0 or g <= 0:
        raise ConfigError("need beta > 0 and g > 0")
    n = (2 * L) ** d

    def fn(s):
        e_shift = d + s
        out = np.zeros_like(s)
        ok = e_shift > 1e-12
        out[ok] = 1.0 / e_shift[ok]
        return out

    return _grid_sum(d, _axis_cos(L), fn) / (n * 2 * beta * g)


def finite_extrapolation(d, Ls=(8, 16, 32)):
    """``I_d`` from finite-lattice sums extrapolated in ``1/L``.

    The finite-size error of ``I_d**2`` scales like ``L**-(d-2)``; the error
    bar is the change between the one-term and two-term fits.
    """
    if d <= 2:
        raise DivergenceError(f"finite-lattice I_d has no limit for d={d} <= 2")
    Ls = tuple(Ls)
    sq = [i_d_finite(d, L) ** 2 for L in Ls]
    e = (d - 2, d - 1)
    one = richardson(Ls[1:], sq[1:], e[:1])
    two = richardson(Ls, sq, e)
    return float(np.sqrt(two)), float(abs(np.sqrt(two) - np.sqrt(one)))


def midpoint_integral(d, N):
    """Midpoint rule for ``int dp Y_+**2/(1-Y)`` with ``N`` nodes on ``(0, pi)``.

    The integrand is even in every ``p_m``, so the half-range grid covers the
    full torus; no node hits the singular corner ``p = Q``.
    """
    t = (np.arange(N) + 0.5) * np.pi / N
    cos_axis = np.cos(t)

    def fn(s):
        y = -s / d
        return np.maximum(y, 0.0) ** 2 / (1.0 - y)

    return _grid_sum(d, cos_axis, fn) / N ** d


def richardson(ns, values, exponents):
    """Fit ``v(N) = v + sum_j c_j N**-e_j`` exactly; return ``v``."""
    ns = np.asarray(ns, dtype=float)
    a = np.column_stack([np.ones_like(ns)] + [ns ** (-e) for e in exponents])
    return float(np.linalg.solve(a, np.asarray(values, dtype=float))[0])


@dataclass
class QuadratureResult:
    d: int
    estimate: float
    error: float
    squared: float
    resolutions: tuple
    raw: tuple
    exponents: tuple
    method: str = "midpoint+richardson"
    extra: dict = field(default_factory=dict)


def i_d_infinite(d, resolutions=None):
    """Infinite-volume ``I_d`` with an error bar.

    The midpoint error is driven by the ``1/|q|**2`` singularity at ``Q`` and
    scales like ``N**-(d-2)``; the next order is ``N**-(d-1)``.  The error bar
    is the change between the one-term and two-term extrapolations.
    """
    if d <= 2:
        raise DivergenceError(f"the integral of Y_+^2/(1-Y) diverges for d={d} <= 2 "
                              "(the 1/|p-Q|^2 singularity is not integrable)")
    ns = tuple(resolutions or RESOLUTIONS.get(d, (8, 12, 16)))
    if len(ns) != 3:
        raise ConfigError("need exactly three resolutions")
    vals = tuple(midpoint_integral(d, n) for n in ns)
    e = (d - 2, d - 1)
    one = richardson(ns[1:], vals[1:], e[:1])
    two = richardson(ns, vals, e)
    err = abs(np.sqrt(two) - np.sqrt(one))
    return QuadratureResult(d, float(np.sqrt(two)), float(max(err, np.finfo(float).eps)), two, ns, vals, e)


def watson_integral(d):
    """``int dp 1/(d - sum cos p) = int_0^inf (e^{-t} I_0(t))**d dt``."""
    val, err = integrate.quad(lambda t: special.i0e(t) ** d, 0, np.inf, limit=500, epsabs=1e-14, epsrel=1e-13)
    return val, err


def i_d_green(d, N=None):
    """Independent route: ``I_d**2 = d W_d - 1 - int_{Y<0} Y**2/(1-Y)``.

    Uses ``Y**2/(1-Y) = 1/(1-Y) - 1 - Y`` and ``int Y = 0``; the remaining
    integral has a bounded, continuously differentiable integrand so a plain
    midpoint rule is accurate to ``O(N**-2)``.
    """
    if d <= 2:
        raise DivergenceError(f"lattice Green's function diverges for d={d} <= 2")
    N = N or {3: 256, 4: 64, 5: 32}.get(d, 16)
    w, _ = watson_integral(d)
    t = (np.arange(N) + 0.5) * np.pi / N

    def fn(s):
        y = -s / d
        return np.minimum(y, 0.0) ** 2 / (1.0 - y)

    neg = _grid_sum(d, np.cos(t), fn) / N ** d
    neg_half = None
    if N >= 4:
        t2 = (np.arange(N // 2) + 0.5) * np.pi / (N // 2)
        neg_half = _grid_sum(d, np.cos(t2), fn) / (N // 2) ** d
    sq = d * w - 1.0 - neg
    err = abs((neg - neg_half) / 3.0) / (2 * np.sqrt(sq)) if neg_half is not None else np.nan
    return float(np.sqrt(sq)), float(err)


def convexity_check(d, n_samples, rng):
    """Largest violation of the two convexity steps over random ``p``.

    Returns ``(max Y_+ - mean Y_ijk_+, max F(Y_+) - mean F(Y_ijk_+))``; both
    are ``<= 0`` when the comparison with ``d = 3`` holds pointwise.
    """
    if d < 4:
        raise ConfigError("convexity comparison needs d >= 4")
    p = rng.uniform(-np.pi, np.pi, size=(n_samples, d))
    triples = list(itertools.combinations(range(d), 3))
    y = np.maximum(y_p(p), 0.0)
    ys = np.maximum(np.stack([y_partial(p, t) for t in triples], axis=-1), 0.0)
    lin = y - ys.mean(axis=-1)
    conv = convex_weight(y) - convex_weight(ys).mean(axis=-1)
    return float(lin.max()), float(conv.max())


@dataclass
class ConstantsReport:
    d: int
    I_d: float | None
    I_d_error: float | None
    I_d_green: float | None
    G_d: list
    delta: list
    method: dict


def constants_report(d, Ls=(4, 8, 16), betas=(1.0, 10.0), g=1.0):
    """Everything the CLI emits for one dimension."""
    if d >= 3:
        q = i_d_infinite(d)
        green, _ = i_d_green(d)
        i_val, i_err = q.estimate, q.error
        method = {"resolutions": list(q.resolutions), "raw_squared": list(q.raw),
                  "exponents": list(q.exponents), "method": q.method}
    else:
        i_val = i_err = green = None
        method = {"method": "divergent for d <= 2"}
    gd = [(L, g_d(d, L), i_d_finite(d, L)) for L in Ls]
    dl = [(L, b, delta_beta(d, L, b, g), delta_prime_beta(d, L, b, g)) for L in Ls for b in betas]
    return ConstantsReport(d, i_val, i_err, green, gd, dl, method)
