"""Evaluation of phi with certified error bounds, plus the one-sided
derivative series and divided-difference utilities.

Values accumulate the affine recursion phi(g_n(t)) = A_n + B_n t + R_n phi(t)
along the digits of x; once |R_n| sup|phi| falls below tol the unknown
phi(t) is replaced by the midpoint 0 of the a-priori range.  Landing exactly
on 0 or 1 closes with the exact endpoint ordinate.  All tolerance contracts
are relative to IEEE double arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import errors
from .coding import Coding
from .ifs import SelfAffineSystem

_DEFAULT_MAX_DEPTH = 500_000


def sup_bound(system: SelfAffineSystem) -> float:
    """A priori bound: sup |phi| <= max_k(|c_k| + |e_k|) / (1 - max_k |d_k|)."""
    top = max(abs(br.c) + abs(br.e) for br in system.branches)
    dmax = max(abs(br.d) for br in system.branches)
    return top / (1.0 - dmax)


@dataclass(frozen=True)
class EvalResult:
    value: float
    error_bound: float
    depth_used: int


def evaluate_many(system: SelfAffineSystem, xs, tol: float,
                  max_depth: int | None = None):
    """Vectorised evaluate.  Returns (values, error_bounds, depths) arrays.

    Exact vertex hits return the stored ordinate with a zero bound.
    """
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    pts = np.asarray(xs, dtype=float)
    flat = pts.ravel()
    if flat.size and (flat.min() < 0.0 or flat.max() > 1.0):
        raise errors.OutOfDomain("points must lie in [0, 1]")
    if max_depth is None:
        max_depth = _DEFAULT_MAX_DEPTH

    part = np.asarray(system.xs)
    cuts = part[1:-1]
    lefts = part[:-1]
    a = np.asarray(system.a)
    c = np.asarray(system.c)
    d = np.asarray(system.d)
    e = np.asarray(system.e)
    y0, yr = system.ys[0], system.ys[-1]
    bound = sup_bound(system)

    t = flat.copy()
    A = np.zeros_like(t)
    B = np.zeros_like(t)
    R = np.ones_like(t)
    depth = np.zeros(t.shape, dtype=np.int64)

    # exact vertex hits bypass the recursion entirely
    vidx = np.searchsorted(part, t)
    vidx = np.clip(vidx, 0, len(part) - 1)
    exact_vertex = part[vidx] == t

    active = (~exact_vertex) & (np.abs(R) * bound > tol) & (t != 0.0) & (t != 1.0)
    steps = 0
    while active.any():
        if steps >= max_depth:
            worst = float((np.abs(R[active]) * bound).max())
            raise errors.NonConvergence(
                f"depth cap {max_depth} hit; achieved bound {worst:g} > tol {tol:g}",
                achieved_bound=worst, depth=steps)
        idx = np.flatnonzero(active)
        ti = t[idx]
        k = np.searchsorted(cuts, ti, side="right")
        ti = (ti - lefts[k]) / a[k]
        np.maximum(ti, 0.0, out=ti)      # clamp rounding undershoot
        t[idx] = ti
        Ri = R[idx]
        A[idx] += B[idx] * lefts[k] + Ri * e[k]
        B[idx] = B[idx] * a[k] + Ri * c[k]
        R[idx] = Ri * d[k]
        depth[idx] += 1
        active[idx] = (np.abs(R[idx]) * bound > tol) & (t[idx] != 0.0) & (t[idx] != 1.0)
        steps += 1

    closing = np.where(t == 0.0, y0, np.where(t == 1.0, yr, 0.0))
    values = A + B * t + R * closing
    errs = np.where((t == 0.0) | (t == 1.0), 0.0, np.abs(R) * bound)
    if exact_vertex.any():
        yarr = np.asarray(system.ys)
        values[exact_vertex] = yarr[vidx[exact_vertex]]
        errs[exact_vertex] = 0.0
        depth[exact_vertex] = 0
    return (values.reshape(pts.shape), errs.reshape(pts.shape),
            depth.reshape(pts.shape))


def evaluate(system: SelfAffineSystem, x: float, tol: float,
             max_depth: int | None = None) -> EvalResult:
    """phi(x) with |returned - phi(x)| <= error_bound <= tol."""
    values, errs, depths = evaluate_many(system, [x], tol, max_depth=max_depth)
    return EvalResult(float(values[0]), float(errs[0]), int(depths[0]))


def sample(system: SelfAffineSystem, n_points: int, tol: float):
    """Uniform grid including both endpoints: (xs, values, error_bounds)."""
    if n_points < 2:
        raise ValueError("need at least 2 points")
    xs = np.linspace(0.0, 1.0, n_points)
    values, errs, _ = evaluate_many(system, xs, tol)
    return xs, values, errs


def derivative_series(system: SelfAffineSystem, coding: Coding,
                      tol: float = 1e-12, *, gamma: float | None = None,
                      max_windows: int = 5_000_000) -> float:
    """One-sided derivative at the point addressed by the coding:

        sum_m (c_{k_m} / a_{k_m}) prod_{i<m} (d_{k_i} / a_{k_i}).

    Requires an eventually periodic coding so the tail admits a certified
    geometric bound: with per-period factor q = prod |d/a| < 1 the tail after
    a window of one period is (window sum) q / (1 - q).  Digits with d = 0
    terminate the series exactly.

    Raises NotDifferentiable when the supplied exponent gamma is <= 1 or the
    period is not contracting relative to the widths; TailBoundUnavailable
    when no period is available or the cap is hit.
    """
    if coding.max_digit() > system.r:
        raise errors.InvalidCoding("digit exceeds branch count")
    if gamma is not None and not gamma > 1.0:
        raise errors.NotDifferentiable(f"exponent {gamma} <= 1")
    a, c, d = system.a, system.c, system.d

    total = 0.0
    P = 1.0              # signed prod_{i<m} d/a
    for k in coding.prefix:
        total += (c[k - 1] / a[k - 1]) * P
        P *= d[k - 1] / a[k - 1]
        if P == 0.0:
            return total       # series terminates exactly

    if coding.period is None:
        raise errors.TailBoundUnavailable(
            "tail bound needs an eventually periodic coding")
    period = coding.period
    q = 1.0
    for k in period:
        q *= abs(d[k - 1]) / a[k - 1]
    if q >= 1.0:
        raise errors.NotDifferentiable(
            "period is not width-contracting; the series diverges")

    for _ in range(max_windows):
        window_abs = 0.0
        for k in period:
            term = (c[k - 1] / a[k - 1]) * P
            total += term
            window_abs += abs(term)
            P *= d[k - 1] / a[k - 1]
        if P == 0.0:
            return total
        tail = window_abs * q / (1.0 - q)
        if tail <= tol:
            return total
    raise errors.TailBoundUnavailable(
        f"tail bound {tail:g} above tol after {max_windows} windows")


def divided_difference(points, values) -> float:
    """Top coefficient f[x_0, ..., x_n] of the Newton table.

    Vanishes on polynomials of degree below n; points must be pairwise
    distinct.
    """
    xs = [float(p) for p in points]
    if len(set(xs)) != len(xs):
        raise errors.DuplicateAbscissa("points must be pairwise distinct")
    if len(xs) != len(values):
        raise ValueError("points and values must have equal length")
    col = [float(v) for v in values]
    n = len(xs)
    for level in range(1, n):
        col = [(col[i + 1] - col[i]) / (xs[i + level] - xs[i])
               for i in range(n - level)]
    return col[0]


def oscillation_lower_bound(points, values, dd: float | None = None) -> float:
    """Deviation of f from every polynomial P of degree below N:

        max_k |f(x_k) - P(x_k)| >= N! (delta/2)^N |f[x_0..x_N]|

    with delta the smallest gap of the strictly increasing points.  The
    divided difference kills P, and each Newton weight is at most
    (delta^N i! (N-i)!)^-1.
    """
    xs = [float(p) for p in points]
    if any(xs[i] >= xs[i + 1] for i in range(len(xs) - 1)):
        raise errors.NotIncreasing("points must be strictly increasing")
    if dd is None:
        dd = divided_difference(xs, values)
    n = len(xs) - 1
    delta = min(xs[i + 1] - xs[i] for i in range(n))
    return math.factorial(n) * (delta / 2.0) ** n * abs(dd)
