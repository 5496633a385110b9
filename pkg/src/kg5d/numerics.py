"""Shared numerical kernels: quadrature, series summation, root finding, stencils.

All functions here are pure and hold no module state beyond cached quadrature
nodes, so they are safe to call concurrently.

Quadrature uses an embedded Gauss-Legendre 7/15 pair on adaptively bisected
panels.  Integrands must be vectorized: ``f(x)`` receives a 1-D ndarray of
abscissae and must return an ndarray of the same shape.  Panel evaluation is
batched, so one call to ``integrate`` makes only a handful of calls to ``f``
even when hundreds of panels are in flight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    BracketingError,
    GridSizeError,
    NonConvergenceError,
    QuadratureError,
)


@dataclass(frozen=True)
class Tolerance:
    """Stopping control for iterative kernels.

    At least one of ``rel``/``abs`` must be positive; a result is accepted
    once the estimated error drops below ``max(abs, rel * |value|)``.
    ``max_iter`` bounds the work: quadrature panels, series terms, or root
    iterations depending on the consumer.
    """

    rel: float = 1e-10
    abs: float = 0.0
    max_iter: int = 10_000

    def __post_init__(self):
        if self.rel < 0 or self.abs < 0:
            raise ValueError("tolerances must be non-negative")
        if self.rel == 0 and self.abs == 0:
            raise ValueError("at least one of rel, abs must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")

    def threshold(self, value: float) -> float:
        return max(self.abs, self.rel * abs(value))


@dataclass(frozen=True)
class SeriesReport:
    """Outcome of a tail-bounded series summation."""

    value: float
    terms_used: int
    tail_bound: float
    converged: bool


# Embedded Gauss-Legendre pair.  leggauss is exact, no hand-typed constants.
_X7, _W7 = np.polynomial.legendre.leggauss(7)
_X15, _W15 = np.polynomial.legendre.leggauss(15)
_NODES = np.concatenate([_X15, _X7])  # 22 evaluations per panel


def _panel_estimates(f, starts, widths):
    """Evaluate the GL7/GL15 pair on a batch of panels.

    Returns (I15, err) arrays, one entry per panel, with err = |I15 - I7|.
    """
    half = 0.5 * widths
    mid = starts + half
    x = mid[:, None] + half[:, None] * _NODES[None, :]
    fx = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    if not np.all(np.isfinite(fx)):
        bad = x.ravel()[~np.isfinite(fx.ravel())][0]
        raise ValueError(f"integrand not finite at x={bad!r}")
    i15 = half * (fx[:, :15] @ _W15)
    i7 = half * (fx[:, 15:] @ _W7)
    return i15, np.abs(i15 - i7)


def integrate(f: Callable, a: float, b: float, tol: Tolerance = Tolerance()) -> float:
    """Adaptive panel quadrature of a vectorized integrand over [a, b].

    Panels whose error exceeds their width-proportional share of the budget
    are bisected until the summed error estimate passes ``tol``.  Exceeding
    ``tol.max_iter`` panels raises :class:`QuadratureError` carrying the best
    estimate and its error bound.
    """
    if not (a <= b):
        raise ValueError(f"need a <= b, got [{a}, {b}]")
    if a == b:
        return 0.0

    starts = np.array([a], dtype=float)
    widths = np.array([b - a], dtype=float)
    vals, errs = _panel_estimates(f, starts, widths)
    span = b - a

    while True:
        total = float(vals.sum())
        total_err = float(errs.sum())
        if total_err <= tol.threshold(total):
            return total
        # Split every panel holding more than its width-share of the budget.
        share = tol.threshold(total) * (widths / span)
        split = errs > np.maximum(share, 1e-300)
        if not split.any():
            split = errs == errs.max()
        n_new = len(starts) + split.sum()
        if n_new > tol.max_iter:
            raise QuadratureError(
                f"quadrature did not converge within {tol.max_iter} panels",
                estimate=total,
                error_bound=total_err,
            )
        keep_s, keep_w = starts[~split], widths[~split]
        keep_v, keep_e = vals[~split], errs[~split]
        hw = 0.5 * widths[split]
        new_s = np.concatenate([starts[split], starts[split] + hw])
        new_w = np.concatenate([hw, hw])
        new_v, new_e = _panel_estimates(f, new_s, new_w)
        starts = np.concatenate([keep_s, new_s])
        widths = np.concatenate([keep_w, new_w])
        vals = np.concatenate([keep_v, new_v])
        errs = np.concatenate([keep_e, new_e])


def sum_series(
    term: Callable[[int], float],
    tail_bound: Callable[[int], float],
    tol: Tolerance = Tolerance(),
) -> SeriesReport:
    """Sum ``term(1) + term(2) + ...`` until the caller's tail bound passes tol.

    ``tail_bound(n)`` must bound ``|sum_{k>n} term(k)|``; the caller owns its
    validity (integral test, geometric ratio, ...).  The summation stops at the
    first n whose tail bound is below ``max(tol.abs, tol.rel*|partial|)``.
    If ``tol.max_iter`` terms do not suffice the report carries the partial
    sum with ``converged=False`` rather than raising.
    """
    s = 0.0
    bound = math.inf
    n = 0
    for n in range(1, tol.max_iter + 1):
        s += term(n)
        bound = float(tail_bound(n))
        if bound < 0 or not math.isfinite(bound):
            raise ValueError(f"tail_bound({n}) = {bound} is not a finite bound")
        if bound <= tol.threshold(s):
            return SeriesReport(value=s, terms_used=n, tail_bound=bound, converged=True)
    return SeriesReport(value=s, terms_used=n, tail_bound=bound, converged=False)


def find_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: Tolerance = Tolerance(rel=1e-14, abs=0.0),
) -> float:
    """Bracketed root of a scalar function: bisection with secant acceleration.

    Requires f(lo) and f(hi) to have opposite signs.  Returns a point inside
    the initial bracket once the bracket width is below tolerance.  The secant
    step is taken only when it lands safely inside the current bracket, so the
    bisection convergence guarantee is never lost.
    """
    if not (lo < hi):
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if math.copysign(1.0, flo) == math.copysign(1.0, fhi):
        raise BracketingError(f"no sign change on [{lo}, {hi}]: f={flo}, {fhi}")

    for _ in range(tol.max_iter):
        width = hi - lo
        mid = 0.5 * (lo + hi)
        if width <= tol.threshold(mid) or width <= 4 * math.ulp(mid):
            return mid
        x = mid
        if fhi != flo:
            sec = hi - fhi * (hi - lo) / (fhi - flo)
            if lo + 0.1 * width < sec < hi - 0.1 * width:
                x = sec
        fx = f(x)
        if fx == 0.0:
            return x
        if math.copysign(1.0, fx) == math.copysign(1.0, flo):
            lo, flo = x, fx
        else:
            hi, fhi = x, fx
    raise NonConvergenceError(
        f"root not localized within {tol.max_iter} iterations",
        estimate=0.5 * (lo + hi),
        error_bound=hi - lo,
    )


def fd_derivative(values: np.ndarray, axis: int, order: int, step: float) -> np.ndarray:
    """Second-order finite-difference derivative of a uniformly sampled field.

    Central stencils in the interior, one-sided second-order stencils at the
    two boundary layers.  ``order`` is 1 or 2.  Needs at least 5 samples along
    ``axis``.
    """
    v = np.asarray(values)
    n = v.shape[axis]
    if n < 5:
        raise GridSizeError(f"need >= 5 points along axis {axis}, got {n}")
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    if step <= 0:
        raise ValueError("step must be positive")

    v = np.moveaxis(v, axis, 0)
    out = np.empty_like(v, dtype=np.result_type(v.dtype, float))
    if order == 1:
        out[1:-1] = (v[2:] - v[:-2]) / (2 * step)
        out[0] = (-3 * v[0] + 4 * v[1] - v[2]) / (2 * step)
        out[-1] = (3 * v[-1] - 4 * v[-2] + v[-3]) / (2 * step)
    else:
        out[1:-1] = (v[2:] - 2 * v[1:-1] + v[:-2]) / step**2
        out[0] = (2 * v[0] - 5 * v[1] + 4 * v[2] - v[3]) / step**2
        out[-1] = (2 * v[-1] - 5 * v[-2] + 4 * v[-3] - v[-4]) / step**2
    return np.moveaxis(out, 0, axis)


def fit_convergence_order(steps, residuals) -> float:
    """Least-squares slope of log(residual) against log(step).

    Used by the verification harnesses to report an observed order of
    accuracy from runs at a few grid resolutions.
    """
    h = np.log(np.asarray(steps, dtype=float))
    r = np.log(np.maximum(np.asarray(residuals, dtype=float), 1e-300))
    if len(h) < 2:
        raise ValueError("need at least two resolutions")
    slope = np.polyfit(h, r, 1)[0]
    return float(slope)
