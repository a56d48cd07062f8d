"""Dimension spectrum of the exponent level sets.

The central object is beta(q), the unique root of

    sum_{d_k != 0} |d_k|^q a_k^beta = 1,

a strictly decreasing convex function with beta(0) = s_hat.  Its concave
conjugate beta*(alpha) = inf_q (alpha q + beta(q)) gives the dimension of
the level set at alpha on the concave part of the spectrum; regimes with a
nonempty overlap set and all |d_k| < a_k additionally carry a linear part
sigma (alpha - 1) between 1 and the tangency point alpha0.

The same numbers arise variationally: beta*(alpha) is the maximum of
H(p) = sum p log p / sum p log a over weight vectors with zeros on the
d_k = 0 branches satisfying sum p_k (log|d_k| - alpha log a_k) = 0, attained
at the Gibbs weights p_k = |d_k|^q a_k^beta(q).  duality_maximizer returns
the maximiser for an alpha; entropy_ratio and contraction_ratio expose the
two functionals for direct experimentation.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import errors
from .ifs import Regime, SpectrumConstants
from .roots import solve_decreasing

_END_TOL = 1e-12    # slack when classifying alpha against the support ends
_DEG_TOL = 1e-12    # all-rho-equal degeneracy


def _plus_arrays(constants: SpectrumConstants):
    ks = sorted(constants.index_plus)
    logd = np.array([math.log(abs(constants.d[k - 1])) for k in ks])
    loga = np.array([math.log(constants.a[k - 1]) for k in ks])
    return ks, logd, loga


def beta(constants: SpectrumConstants, q: float) -> float:
    """Root of sum |d_k|^q a_k^beta = 1 over the d_k != 0 branches."""
    _, logd, loga = _plus_arrays(constants)

    def f(b):
        with np.errstate(over="ignore"):
            return float(np.exp(q * logd + b * loga).sum()) - 1.0

    return solve_decreasing(f, -1.0, 1.0)


def alpha_of_q(constants: SpectrumConstants, q: float) -> float:
    """Negated slope of beta at q: the alpha whose conjugate is attained
    there.  Strictly decreasing from alpha_max (q -> -inf) to alpha_min."""
    _, logd, loga = _plus_arrays(constants)
    b = beta(constants, q)
    with np.errstate(over="ignore"):
        w = np.exp(q * logd + b * loga)
    return float((w * logd).sum() / (w * loga).sum())


def q_star(constants: SpectrumConstants, alpha: float) -> float:
    """Inverse of alpha_of_q; alpha must lie strictly inside
    (alpha_min, alpha_max)."""
    if not constants.alpha_min < alpha < constants.alpha_max:
        raise errors.OutOfRange(
            f"alpha = {alpha} not inside ({constants.alpha_min}, "
            f"{constants.alpha_max})")
    return solve_decreasing(lambda q: alpha_of_q(constants, q) - alpha,
                            -1.0, 1.0)


def _degenerate(constants: SpectrumConstants) -> bool:
    return (constants.alpha_max - constants.alpha_min
            <= _DEG_TOL * max(1.0, abs(constants.alpha_max)))


def beta_star(constants: SpectrumConstants, alpha: float) -> float:
    """Concave conjugate inf_q (alpha q + beta(q)).

    -inf outside [alpha_min, alpha_max]; the endpoint values are the
    partition exponents of the extremal-ratio branch sets.  When all ratios
    coincide beta is affine and the conjugate degenerates to a single point.
    """
    amin, amax = constants.alpha_min, constants.alpha_max
    if _degenerate(constants):
        return constants.s_hat if abs(alpha - constants.alpha_hat) <= 1e-9 \
            else -math.inf
    if alpha < amin - _END_TOL or alpha > amax + _END_TOL:
        return -math.inf
    if alpha <= amin + _END_TOL:
        return constants.s_min
    if alpha >= amax - _END_TOL:
        return constants.s_max
    q = q_star(constants, alpha)
    return alpha * q + beta(constants, q)


def entropy_ratio(p, a) -> float:
    """H(p) = sum p log p / sum p log a (terms with p_k = 0 drop out)."""
    if len(p) != len(a):
        raise ValueError("p must have one entry per branch")
    num = math.fsum(pk * math.log(pk) for pk in p if pk > 0.0)
    den = math.fsum(pk * math.log(ak) for pk, ak in zip(p, a) if pk > 0.0)
    return num / den


def contraction_ratio(p, constants: SpectrumConstants) -> float:
    """G(p) = sum p log p / sum p (log|d| - log a) over the d_k != 0 branches.

    In the overlap regime its maximum over the simplex is sigma, attained at
    p_star.  p must put no mass on d_k = 0 branches.
    """
    if len(p) != len(constants.a):
        raise ValueError("p must have one entry per branch")
    for k in constants.index_zero:
        if p[k - 1] != 0.0:
            raise ValueError(f"p_{k} must be 0 on a branch with d = 0")
    num = math.fsum(pk * math.log(pk) for pk in p if pk > 0.0)
    den = math.fsum(p[k - 1] * (math.log(abs(constants.d[k - 1]))
                                - math.log(constants.a[k - 1]))
                    for k in sorted(constants.index_plus) if p[k - 1] > 0.0)
    return num / den


@dataclass(frozen=True)
class DualityResult:
    """Weight vector realising the dimension at one alpha."""
    p: tuple[float, ...]
    entropy: float
    contraction: float | None
    q: float | None
    branch: str


def _tie_weights(constants: SpectrumConstants, alpha: float, s: float):
    r = len(constants.a)
    ties = [k for k in sorted(constants.index_plus)
            if abs(constants.rho[k] - alpha) <= 1e-9 * max(1.0, abs(alpha))]
    if len(ties) == 1:
        return tuple(1.0 if k == ties[0] else 0.0 for k in range(1, r + 1))
    return tuple(constants.a[k - 1] ** s if k in ties else 0.0
                 for k in range(1, r + 1))


def duality_maximizer(constants: SpectrumConstants, alpha: float) -> DualityResult:
    """Maximising weights for the dimension at alpha.

    Interior alphas use the Gibbs weights |d|^q a^beta(q); the support
    endpoints concentrate on the extremal-ratio branches; in the overlap
    regime every alpha below the tangency point returns p_star (the
    contraction_ratio maximiser).  OutOfRange outside the spectrum support.
    """
    r = len(constants.a)
    amin, amax = constants.alpha_min, constants.alpha_max
    if _degenerate(constants):
        if abs(alpha - constants.alpha_hat) > 1e-9:
            raise errors.OutOfRange(
                "all branch ratios coincide; only alpha_hat is attained")
        p = tuple(constants.a[k - 1] ** constants.s_hat
                  if k in constants.index_plus else 0.0
                  for k in range(1, r + 1))
        return DualityResult(p=p, entropy=entropy_ratio(p, constants.a),
                             contraction=_safe_g(p, constants), q=None,
                             branch="degenerate")
    if constants.regime is Regime.CASE_B and alpha < constants.alpha0:
        if alpha < 1.0 - _END_TOL:
            raise errors.OutOfRange(f"alpha = {alpha} below the support")
        p = constants.p_star
        return DualityResult(p=p, entropy=entropy_ratio(p, constants.a),
                             contraction=_safe_g(p, constants), q=None,
                             branch="linear")
    if alpha < amin - _END_TOL or alpha > amax + _END_TOL:
        raise errors.OutOfRange(f"alpha = {alpha} outside the support")
    if alpha <= amin + _END_TOL:
        p = _tie_weights(constants, amin, constants.s_min)
        return DualityResult(p=p, entropy=entropy_ratio(p, constants.a),
                             contraction=_safe_g(p, constants), q=None,
                             branch="endpoint")
    if alpha >= amax - _END_TOL:
        p = _tie_weights(constants, amax, constants.s_max)
        return DualityResult(p=p, entropy=entropy_ratio(p, constants.a),
                             contraction=_safe_g(p, constants), q=None,
                             branch="endpoint")
    q = q_star(constants, alpha)
    b = beta(constants, q)
    p = tuple(math.exp(q * math.log(abs(constants.d[k - 1]))
                       + b * math.log(constants.a[k - 1]))
              if k in constants.index_plus else 0.0
              for k in range(1, r + 1))
    return DualityResult(p=p, entropy=entropy_ratio(p, constants.a),
                         contraction=_safe_g(p, constants), q=q,
                         branch="legendre")


def _safe_g(p, constants):
    try:
        return contraction_ratio(p, constants)
    except (ValueError, ZeroDivisionError):
        return None


@dataclass(frozen=True)
class SpectrumPoint:
    """One abscissa of the dimension spectrum.  dim is None off the support
    (branch "empty"); branch "infinite" is the alpha = inf point, dimension 1
    exactly when some branch has d = 0."""
    alpha: float
    dim: float | None
    branch: str
    p_opt: tuple[float, ...] | None = None
    note: str | None = None


def spectrum_D(constants: SpectrumConstants, alpha: float) -> SpectrumPoint:
    """Dimension of the level set at alpha (math.inf allowed)."""
    if math.isinf(alpha) and alpha > 0:
        if constants.index_zero:
            return SpectrumPoint(alpha=math.inf, dim=1.0, branch="infinite")
        return SpectrumPoint(alpha=math.inf, dim=None, branch="empty")
    amin, amax = constants.alpha_min, constants.alpha_max

    if _degenerate(constants):
        if abs(alpha - constants.alpha_hat) <= 1e-9:
            res = duality_maximizer(constants, alpha)
            return SpectrumPoint(alpha=alpha, dim=constants.s_hat,
                                 branch="degenerate", p_opt=res.p)
        return SpectrumPoint(alpha=alpha, dim=None, branch="empty")

    if constants.regime is Regime.CASE_B:
        if alpha < 1.0 - _END_TOL or alpha > amax + _END_TOL:
            return SpectrumPoint(alpha=alpha, dim=None, branch="empty")
        if alpha <= 1.0 + _END_TOL:
            return SpectrumPoint(
                alpha=alpha, dim=0.0, branch="linear", p_opt=constants.p_star,
                note="left edge of the linear part; the level set is "
                     "nonempty with dimension 0")
        if alpha < constants.alpha0:
            res = duality_maximizer(constants, alpha)
            return SpectrumPoint(alpha=alpha,
                                 dim=constants.sigma * (alpha - 1.0),
                                 branch="linear", p_opt=res.p)
        if alpha >= amax - _END_TOL:
            res = duality_maximizer(constants, alpha)
            return SpectrumPoint(alpha=alpha, dim=constants.s_max,
                                 branch="endpoint", p_opt=res.p)
        res = duality_maximizer(constants, alpha)
        return SpectrumPoint(alpha=alpha, dim=beta_star(constants, alpha),
                             branch="legendre", p_opt=res.p)

    if alpha < amin - _END_TOL or alpha > amax + _END_TOL:
        return SpectrumPoint(alpha=alpha, dim=None, branch="empty")
    if alpha <= amin + _END_TOL:
        res = duality_maximizer(constants, alpha)
        return SpectrumPoint(alpha=alpha, dim=constants.s_min,
                             branch="endpoint", p_opt=res.p)
    if alpha >= amax - _END_TOL:
        res = duality_maximizer(constants, alpha)
        return SpectrumPoint(alpha=alpha, dim=constants.s_max,
                             branch="endpoint", p_opt=res.p)
    res = duality_maximizer(constants, alpha)
    return SpectrumPoint(alpha=alpha, dim=beta_star(constants, alpha),
                         branch="legendre", p_opt=res.p)


def _thread_count() -> int:
    raw = os.environ.get("AFFINE_SPECTRA_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def spectrum_table(constants: SpectrumConstants, *, points: int = 201,
                   include_infinite: bool = True) -> tuple[SpectrumPoint, ...]:
    """Spectrum sampled on a uniform grid over the support plus the
    distinguished abscissae (support ends, maximum location, tangency point),
    ending with the alpha = inf point when some branch has d = 0.

    AFFINE_SPECTRA_THREADS > 1 evaluates grid points in a thread pool.
    """
    if points < 2:
        raise ValueError("points must be >= 2")
    if _degenerate(constants):
        alphas = [constants.alpha_hat]
    else:
        if constants.regime is Regime.CASE_B:
            lo, hi = 1.0, constants.alpha_max
            special = [1.0, constants.alpha0, constants.alpha_hat,
                       constants.alpha_max]
        else:
            lo, hi = constants.alpha_min, constants.alpha_max
            special = [constants.alpha_min, constants.alpha_hat,
                       constants.alpha_max]
        grid = np.linspace(lo, hi, points)
        alphas = np.unique(np.concatenate([grid, np.array(special)])).tolist()

    workers = _thread_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda al: spectrum_D(constants, al), alphas))
    else:
        rows = [spectrum_D(constants, al) for al in alphas]
    if include_infinite and constants.index_zero:
        rows.append(spectrum_D(constants, math.inf))
    return tuple(rows)
