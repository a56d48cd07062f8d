"""Pointwise Holder exponents from digit statistics.

The one-sided exponent at a non-cut point is the liminf over n of

    (sum_{i<=n} log|d_{k_i}| + correction_n) / sum_{i<=n} log a_{k_i}

where the correction accounts for the terminal run of the extreme digit on
that side (digit r for the right side, digit 1 for the left): a long run
means the point hugs one end of its basic interval and the neighbouring
interval controls part of the oscillation.  Two corrected variants are
tracked; the exponent is the minimum of the plain and corrected liminfs.
Eventually periodic codings collapse to a closed form (one-period ratio).

Two-coding points get their own routine: their one-sided exponents are the
single-branch ratios rho_1 / rho_r, and two-sidedness hinges on whether the
vertex the point sits on carries a slope mismatch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import errors
from .coding import Coding, in_T
from .evaluate import derivative_series, evaluate_many
from .ifs import SelfAffineSystem, SpectrumConstants

_MIN_HORIZON = 16


def _check_side(side: str) -> None:
    if side not in ("right", "left"):
        raise ValueError("side must be 'right' or 'left'")


def _check_digits(coding: Coding, r: int) -> None:
    if coding.max_digit() > r:
        raise errors.InvalidCoding(
            f"digit {coding.max_digit()} exceeds branch count r = {r}")


def side_run_constants(constants: SpectrumConstants, side: str):
    """(K1, K2) for the requested side.

    Right side:  K1 = (log a_r / log a_1) log|d_1| - log|d_r|,
                 K2 = log a_r - log|d_r|; each is 0 when the contraction it
    divides by vanishes.  The left side swaps the roles of branches 1 and r.
    """
    _check_side(side)
    a, d = constants.a, constants.d
    la1, lar = math.log(a[0]), math.log(a[-1])
    d1, dr = abs(d[0]), abs(d[-1])
    if side == "right":
        k1 = 0.0 if (d1 == 0.0 or dr == 0.0) else \
            (lar / la1) * math.log(d1) - math.log(dr)
        k2 = 0.0 if dr == 0.0 else lar - math.log(dr)
    else:
        k1 = 0.0 if (d1 == 0.0 or dr == 0.0) else \
            (la1 / lar) * math.log(dr) - math.log(d1)
        k2 = 0.0 if d1 == 0.0 else la1 - math.log(d1)
    return k1, k2


@dataclass(frozen=True)
class ExponentTrace:
    """Ratio traces g0/g1/g2 for n = 1..len(g0) on one side: plain ratio,
    run-corrected with the cross-interval constant, and run-corrected with
    the vertex constant."""
    side: str
    g0: np.ndarray
    g1: np.ndarray
    g2: np.ndarray


def exponent_trace(system: SelfAffineSystem, constants: SpectrumConstants,
                   coding: Coding, n: int, side: str = "right") -> ExponentTrace:
    """Vectorised ratio traces over the first n digits.

    Raises InfiniteExponent if a zero-contraction digit occurs: after it the
    function is affine on a whole basic interval, so no finite ratio applies.
    """
    _check_side(side)
    _check_digits(coding, system.r)
    if n < 1:
        raise ValueError("n must be >= 1")
    digits = np.fromiter(coding.digits(n), dtype=np.int64, count=n)
    r = system.r
    if constants.index_zero:
        zero = np.zeros(r + 1, dtype=bool)
        for k in constants.index_zero:
            zero[k] = True
        if zero[digits].any():
            raise errors.InfiniteExponent(
                "coding contains a zero-contraction digit")

    d_abs = np.abs(np.asarray(constants.d))
    with np.errstate(divide="ignore"):
        logd = np.log(d_abs)
    loga = np.log(np.asarray(constants.a))
    num0 = np.cumsum(logd[digits - 1])
    den = np.cumsum(loga[digits - 1])

    extreme = r if side == "right" else 1
    pos = np.arange(1, n + 1, dtype=np.int64)
    lastnon = np.maximum.accumulate(np.where(digits != extreme, pos, 0))
    L = pos - lastnon
    boundary = np.where(lastnon > 0, digits[np.maximum(lastnon - 1, 0)], 0)
    probe_chi = boundary + 1 if side == "right" else boundary - 1
    probe_zeta = boundary if side == "right" else boundary - 1

    in_plus = np.zeros(r + 2, dtype=bool)
    for k in constants.index_plus:
        in_plus[k] = True
    in_lam = np.zeros(r + 2, dtype=bool)
    for k in constants.lambda_set:
        in_lam[k] = True
    valid = lastnon > 0
    chi = valid & in_plus[np.clip(probe_chi, 0, r + 1)]
    zeta = valid & in_lam[np.clip(probe_zeta, 0, r + 1)]

    k1, k2 = side_run_constants(constants, side)
    g0 = num0 / den
    g1 = (num0 + k1 * chi * L) / den
    g2 = (num0 + k2 * zeta * L) / den
    return ExponentTrace(side=side, g0=g0, g1=g1, g2=g2)


@dataclass(frozen=True)
class GammaBundle:
    """Liminf estimates (or exact values) of the three ratio variants and
    their minimum.  method is "exact-periodic" or "finite-horizon"."""
    gamma0: float
    gamma1: float
    gamma2: float
    gamma: float
    method: str
    horizon_used: int | None
    side: str


def gammas(system: SelfAffineSystem, constants: SpectrumConstants,
           coding: Coding, *, side: str = "right",
           horizon: int | None = None) -> GammaBundle:
    """Exponent candidates for one side.

    Eventually periodic codings (without an explicit horizon) use the exact
    one-period ratio, to which all three variants converge.  Otherwise the
    liminf of each trace is estimated by its minimum over the tail window
    (n/2, n]; a minimum over all of 1..n would instead converge to the
    infimum, which the early-digit transient drags below the liminf.  Fewer
    than 16 digits raise HorizonTooSmall.
    """
    _check_side(side)
    _check_digits(coding, system.r)
    probe = coding.prefix + (coding.period or ())
    if any(k in constants.index_zero for k in probe):
        raise errors.InfiniteExponent(
            "coding contains a zero-contraction digit")

    if coding.eventually_periodic and horizon is None:
        num = math.fsum(math.log(abs(system.d[k - 1])) for k in coding.period)
        den = math.fsum(math.log(system.a[k - 1]) for k in coding.period)
        g = num / den
        return GammaBundle(g, g, g, g, "exact-periodic", None, side)

    avail = coding.available()
    n = horizon if horizon is not None else avail
    if n is None:
        raise ValueError("periodic coding scans need an explicit horizon")
    if avail is not None:
        n = min(n, avail)
    if n < _MIN_HORIZON:
        raise errors.HorizonTooSmall(
            f"need >= {_MIN_HORIZON} digits, have {n}")
    tr = exponent_trace(system, constants, coding, n, side)
    lo = n // 2  # tail window (n/2, n], skips the early transient
    g0 = float(tr.g0[lo:].min())
    g1 = float(tr.g1[lo:].min())
    g2 = float(tr.g2[lo:].min())
    return GammaBundle(g0, g1, g2, min(g0, g1, g2), "finite-horizon", n, side)


@lru_cache(maxsize=128)
def is_polynomial(system: SelfAffineSystem) -> bool:
    """True when phi agrees with a cubic at a 7-point grid to 1e-10.

    Polynomial phi (the parabola family and friends) fall outside every
    exponent statement below; values and derivative series stay valid.
    """
    xs = np.linspace(0.0, 1.0, 7)
    values, _, _ = evaluate_many(system, xs, 1e-13)
    coeffs = np.polynomial.polynomial.polyfit(xs, values, 3)
    fit = np.polynomial.polynomial.polyval(xs, coeffs)
    return bool(np.max(np.abs(fit - values)) <= 1e-10)


@dataclass(frozen=True)
class SideExponent:
    side: str
    alpha: float
    derivative: float | None
    bundle: GammaBundle | None
    infinite: bool = False


def _is_constant(coding: Coding, digit: int) -> bool:
    return (coding.constant_tail() == digit
            and all(k == digit for k in coding.prefix))


def _holder_side(system: SelfAffineSystem, constants: SpectrumConstants,
                 coding: Coding, side: str, horizon: int | None,
                 series_tol: float) -> SideExponent:
    _check_side(side)
    _check_digits(coding, system.r)
    r = system.r
    tail = coding.constant_tail()
    if tail in (1, r):
        own = r if side == "right" else 1      # x = 1 resp. x = 0
        if _is_constant(coding, own):
            raise errors.Endpoint(
                f"x = {'1' if own == r else '0'} has no {side} side")
        if not _is_constant(coding, r if own == 1 else 1):
            raise errors.CutPointCoding(
                "eventually constant coding addresses a two-coding point; "
                "use cut_point_exponents")
    if is_polynomial(system):
        raise errors.PolynomialDegenerate(
            "phi is a polynomial; exponent statements do not apply")

    probe = coding.prefix + (coding.period or ())
    if any(k in constants.index_zero for k in probe):
        deriv = None
        try:
            deriv = derivative_series(system, coding, series_tol)
        except (errors.TailBoundUnavailable, errors.NotDifferentiable):
            pass
        return SideExponent(side=side, alpha=math.inf, derivative=deriv,
                            bundle=None, infinite=True)

    bundle = gammas(system, constants, coding, side=side, horizon=horizon)
    alpha = bundle.gamma
    deriv = None
    if alpha > 1.0 and coding.eventually_periodic:
        try:
            deriv = derivative_series(system, coding, series_tol, gamma=alpha)
        except (errors.TailBoundUnavailable, errors.NotDifferentiable):
            deriv = None
    return SideExponent(side=side, alpha=alpha, derivative=deriv, bundle=bundle)


def holder_right(system: SelfAffineSystem, constants: SpectrumConstants,
                 coding: Coding, *, horizon: int | None = None,
                 series_tol: float = 1e-12) -> SideExponent:
    """Right-side exponent at the point the coding addresses.

    Rejects codings of two-coding points (CutPointCoding) and the all-r
    coding of x = 1 (Endpoint); the all-1 coding of x = 0 is fine here.
    """
    return _holder_side(system, constants, coding, "right", horizon, series_tol)


def holder_left(system: SelfAffineSystem, constants: SpectrumConstants,
                coding: Coding, *, horizon: int | None = None,
                series_tol: float = 1e-12) -> SideExponent:
    """Left-side exponent; mirror of holder_right."""
    return _holder_side(system, constants, coding, "left", horizon, series_tol)


@dataclass(frozen=True)
class CutPointResult:
    """Exponents at a two-coding point sitting on the image of a vertex.

    alpha_right is the branch-1 ratio and alpha_left the branch-r ratio,
    except that a side becomes infinite when its coding passes through a
    zero-contraction digit (the side then lies inside an affine piece).
    With both sides above 1 the point is differentiable exactly when the
    stem's last digit avoids the slope-mismatch set; a mismatch pins the
    two-sided exponent to 1.  When both sides are affine the terminating
    series are exact slopes: equal slopes mean a flat spot, unequal ones a
    corner with exponent 1.
    """
    n0: int
    boundary_digit: int
    coding_left: Coding
    coding_right: Coding
    alpha_left: float
    alpha_right: float
    alpha: float
    differentiable: bool
    derivative_left: float | None
    derivative_right: float | None


def _rho_or_inf(constants: SpectrumConstants, k: int) -> float:
    if k in constants.index_zero:
        return math.inf
    return constants.rho[k]


def _cut_result(system: SelfAffineSystem, constants: SpectrumConstants,
                stem: tuple[int, ...], series_tol: float) -> CutPointResult:
    if not stem:
        raise errors.Endpoint("0 and 1 are not two-coding points")
    if is_polynomial(system):
        raise errors.PolynomialDegenerate(
            "phi is a polynomial; exponent statements do not apply")
    r = system.r
    k = stem[-1]
    if not 1 <= k < r:
        raise errors.InvalidCoding(f"stem must end in a digit below r, got {k}")
    left = Coding(prefix=stem, period=(r,))
    right = Coding(prefix=stem[:-1] + (k + 1,), period=(1,))
    # a d = 0 digit anywhere in a side's coding puts that side inside an
    # affine piece, which the rho of the tail digit alone would miss
    shared = set(stem[:-1])
    zero = constants.index_zero
    if (shared | {k + 1, 1}) & zero:
        alpha_right = math.inf
    else:
        alpha_right = _rho_or_inf(constants, 1)
    if (shared | {k, r}) & zero:
        alpha_left = math.inf
    else:
        alpha_left = _rho_or_inf(constants, r)

    def _series(coding):
        try:
            return derivative_series(system, coding, series_tol)
        except (errors.TailBoundUnavailable, errors.NotDifferentiable):
            return None

    deriv_right = _series(right) if alpha_right > 1.0 else None
    deriv_left = _series(left) if alpha_left > 1.0 else None
    if math.isinf(alpha_right) and math.isinf(alpha_left):
        # affine on both sides; the terminating series are exact slopes
        scale = max(1.0, abs(deriv_right), abs(deriv_left))
        if abs(deriv_right - deriv_left) <= 1e-12 * scale:
            alpha, differentiable = math.inf, True
        else:
            alpha, differentiable = 1.0, False  # corner of two lines
    elif alpha_right > 1.0 and alpha_left > 1.0:
        if k in constants.lambda_set:
            alpha, differentiable = 1.0, False
        else:
            alpha, differentiable = min(alpha_right, alpha_left), True
    else:
        alpha, differentiable = min(alpha_right, alpha_left), False
    return CutPointResult(n0=len(stem), boundary_digit=k, coding_left=left,
                          coding_right=right, alpha_left=alpha_left,
                          alpha_right=alpha_right, alpha=alpha,
                          differentiable=differentiable,
                          derivative_left=deriv_left,
                          derivative_right=deriv_right)


def cut_point_exponents(system: SelfAffineSystem, constants: SpectrumConstants,
                        x, *, series_tol: float = 1e-12) -> CutPointResult:
    """Exponent data at a two-coding point given as a number in (0, 1)."""
    query = in_T(system, x)
    if query.member and query.n0 == 0:
        raise errors.Endpoint("0 and 1 are not two-coding points")
    if not query.member:
        raise ValueError(f"x = {x} is not a two-coding point"
                         + ("" if query.decided else " (undecided at depth cap)"))
    stem = query.left.prefix
    return _cut_result(system, constants, stem, series_tol)


@dataclass(frozen=True)
class ExponentReport:
    """Two-sided exponent summary for one coding.

    Non-cut points carry per-side results (one of them None at 0 and 1);
    two-coding points carry a CutPointResult instead.
    """
    coding: Coding
    cut_point: bool
    alpha: float
    right: SideExponent | None = None
    left: SideExponent | None = None
    cut: CutPointResult | None = None

    @property
    def alpha_right(self) -> float | None:
        if self.cut is not None:
            return self.cut.alpha_right
        return self.right.alpha if self.right is not None else None

    @property
    def alpha_left(self) -> float | None:
        if self.cut is not None:
            return self.cut.alpha_left
        return self.left.alpha if self.left is not None else None


def _strip_tail(digits: tuple[int, ...], digit: int) -> tuple[int, ...]:
    out = list(digits)
    while out and out[-1] == digit:
        out.pop()
    return tuple(out)


def exponent_report(system: SelfAffineSystem, constants: SpectrumConstants,
                    coding: Coding, *, horizon: int | None = None,
                    series_tol: float = 1e-12) -> ExponentReport:
    """Route a coding to the applicable exponent computation.

    Eventually constant codings are normalised: the endpoints keep their
    single side, interior two-coding points go through the vertex routine,
    and everything else gets both one-sided liminfs with alpha their minimum.
    """
    _check_digits(coding, system.r)
    r = system.r
    tail = coding.constant_tail()
    if tail in (1, r):
        if _is_constant(coding, 1):
            right = holder_right(system, constants, coding,
                                 horizon=horizon, series_tol=series_tol)
            return ExponentReport(coding=coding, cut_point=False,
                                  alpha=right.alpha, right=right)
        if _is_constant(coding, r):
            left = holder_left(system, constants, coding,
                               horizon=horizon, series_tol=series_tol)
            return ExponentReport(coding=coding, cut_point=False,
                                  alpha=left.alpha, left=left)
        if tail == r:
            stem = _strip_tail(coding.prefix, r)
        else:
            base = _strip_tail(coding.prefix, 1)
            stem = base[:-1] + (base[-1] - 1,)
            if stem[-1] == 0:
                raise errors.InvalidCoding("digit 0 produced while normalising")
        cut = _cut_result(system, constants, stem, series_tol)
        return ExponentReport(coding=coding, cut_point=True,
                              alpha=cut.alpha, cut=cut)

    right = holder_right(system, constants, coding,
                         horizon=horizon, series_tol=series_tol)
    left = holder_left(system, constants, coding,
                       horizon=horizon, series_tol=series_tol)
    return ExponentReport(coding=coding, cut_point=False,
                          alpha=min(right.alpha, left.alpha),
                          right=right, left=left)
