"""Digit addresses of points under the branch partition.

A coding (k_1, k_2, ...) over {1..r} addresses the point
xi = lim S_{k_1} o ... o S_{k_n}(0) where S_k(x) = a_k x + b_k.  Points of
the countable set T (images of 0 and 1 under finite compositions) carry two
codings; everywhere we canonicalise to the *right* coding, whose tail is all
ones after an incremented digit.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import errors
from .ifs import SelfAffineSystem

FLOAT_CUT_TOL = 1e-14    # snapping tolerance for float cut-point detection


@dataclass(frozen=True)
class Coding:
    """Digit string: finite prefix, optionally followed by a repeating period.

    A coding with period None leaves the tail unspecified; operations that
    need the exact point treat it as the left endpoint of its basic interval.
    """
    prefix: tuple[int, ...] = ()
    period: tuple[int, ...] | None = None

    def __post_init__(self):
        for k in self.prefix:
            if not (isinstance(k, int) and k >= 1):
                raise errors.InvalidCoding(f"digit {k!r} must be an integer >= 1")
        if self.period is not None:
            if len(self.period) == 0:
                raise errors.InvalidCoding("period must be nonempty when given")
            for k in self.period:
                if not (isinstance(k, int) and k >= 1):
                    raise errors.InvalidCoding(f"digit {k!r} must be an integer >= 1")

    @property
    def eventually_periodic(self) -> bool:
        return self.period is not None

    def digit(self, i: int) -> int:
        """1-based digit k_i; periods repeat forever."""
        if i < 1:
            raise errors.InvalidCoding("digit positions are 1-based")
        if i <= len(self.prefix):
            return self.prefix[i - 1]
        if self.period is None:
            raise errors.InvalidCoding(
                f"coding has only {len(self.prefix)} digits, asked for {i}")
        return self.period[(i - len(self.prefix) - 1) % len(self.period)]

    def digits(self, n: int) -> tuple[int, ...]:
        """First n digits."""
        if n <= len(self.prefix):
            return self.prefix[:n]
        if self.period is None:
            raise errors.InvalidCoding(
                f"coding has only {len(self.prefix)} digits, asked for {n}")
        reps = (n - len(self.prefix) + len(self.period) - 1) // len(self.period)
        return (self.prefix + self.period * reps)[:n]

    def available(self) -> int | None:
        """Number of digits on hand, None when infinite."""
        return None if self.period is not None else len(self.prefix)

    def constant_tail(self) -> int | None:
        """The digit the coding ends in forever, if any."""
        if self.period is not None and len(set(self.period)) == 1:
            return self.period[0]
        return None

    def max_digit(self) -> int:
        m = max(self.prefix, default=1)
        if self.period is not None:
            m = max(m, max(self.period))
        return m


_PERIOD_RE = re.compile(r"\(([^()]*)\)\s*$")


def parse_coding(text: str) -> Coding:
    """Parse "1,2,(1,2)" or "(2,1)" or "1,1,2"; whitespace is ignored."""
    text = text.strip()
    if not text:
        raise errors.InvalidCoding("empty coding string")
    period = None
    m = _PERIOD_RE.search(text)
    if m:
        body = m.group(1).strip()
        if not body:
            raise errors.InvalidCoding("empty period ()")
        text = text[:m.start()].rstrip().rstrip(",")
    try:
        period = tuple(int(p) for p in m.group(1).split(",")) if m else None
        prefix = tuple(int(p) for p in text.split(",")) if text else ()
    except ValueError:
        raise errors.InvalidCoding(f"malformed coding string {text!r}") from None
    return Coding(prefix=prefix, period=period)


def format_coding(coding: Coding) -> str:
    parts = [str(k) for k in coding.prefix]
    if coding.period is not None:
        parts.append("(" + ",".join(str(k) for k in coding.period) + ")")
    return ",".join(parts) if coding.prefix else (parts[-1] if parts else "")


def coding_to_dict(coding: Coding) -> dict:
    return {"prefix": list(coding.prefix),
            "period": list(coding.period) if coding.period is not None else None}


def coding_from_dict(data: dict) -> Coding:
    period = data.get("period")
    return Coding(prefix=tuple(data.get("prefix", ())),
                  period=tuple(period) if period is not None else None)


def _check_digits(coding: Coding, r: int) -> None:
    if coding.max_digit() > r:
        raise errors.InvalidCoding(
            f"digit {coding.max_digit()} exceeds branch count r = {r}")


@dataclass(frozen=True)
class BasicInterval:
    """Image of [0,1] under the composition along `digits`; length is the
    product of the widths."""
    digits: tuple[int, ...]
    left: float
    right: float
    length: float


@dataclass(frozen=True)
class PointCoding:
    """Result of addressing a point: digit prefix plus the nested interval
    chain.  cut_point marks membership of T (tail of 1s emitted); ambiguous
    marks float-tolerance snapping on the way."""
    coding: Coding
    intervals: tuple[BasicInterval, ...]
    cut_point: bool
    ambiguous: bool = False


def _interval_chain(system: SelfAffineSystem, digits) -> tuple[BasicInterval, ...]:
    xs = system.xs
    a = system.a
    left, length = 0.0, 1.0
    chain = []
    for n, k in enumerate(digits, start=1):
        left = left + length * xs[k - 1]
        length = length * a[k - 1]
        chain.append(BasicInterval(tuple(digits[:n]), left, left + length, length))
    return tuple(chain)


def coding_of_point(system: SelfAffineSystem, x, depth: int) -> PointCoding:
    """Digit address of x in (0, 1) to the requested depth.

    Fraction inputs are resolved exactly against the stored (float, hence
    rational) partition; float inputs use a documented snapping tolerance of
    1e-14 per step, reporting `ambiguous` whenever a snap fired.  Points of T
    return the right coding (incremented digit, then all 1s) and cut_point.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    exact = isinstance(x, (Fraction, int))
    xv = Fraction(x) if exact else float(x)
    if not (0 < xv < 1):
        raise errors.OutOfDomain(f"x = {xv} not in (0, 1)")

    if exact:
        cuts = [Fraction(v) for v in system.xs]
        widths = [cuts[k + 1] - cuts[k] for k in range(system.r)]
    else:
        cuts = list(system.xs)
        widths = list(system.a)

    digits: list[int] = []
    t = xv
    cut = False
    ambiguous = False
    for _ in range(depth):
        if cut:
            digits.append(1)
            continue
        # branch with x_{k-1} <= t < x_k; landing exactly on an interior
        # vertex selects the right-hand branch and zeroes t (right coding)
        k = 1
        while k < system.r and t >= cuts[k]:
            k += 1
        if not exact:
            # snap to the nearest vertex when within tolerance
            if k < system.r and abs(t - cuts[k]) <= FLOAT_CUT_TOL:
                t, k = cuts[k], k + 1
                ambiguous = True
            elif k > 1 and abs(t - cuts[k - 1]) <= FLOAT_CUT_TOL and t != cuts[k - 1]:
                t = cuts[k - 1]
                ambiguous = True
        digits.append(k)
        t = (t - cuts[k - 1]) / widths[k - 1]
        if t == 0:
            cut = True
    return PointCoding(coding=Coding(prefix=tuple(digits),
                                     period=(1,) if cut else None),
                       intervals=_interval_chain(system, digits),
                       cut_point=cut, ambiguous=ambiguous)


def basic_interval(system: SelfAffineSystem, digits) -> BasicInterval:
    digits = tuple(digits)
    _check_digits(Coding(prefix=digits), system.r)
    if not digits:
        return BasicInterval((), 0.0, 1.0, 1.0)
    return _interval_chain(system, digits)[-1]


def project(system: SelfAffineSystem, coding: Coding, *, exact: bool = False):
    """Point addressed by the coding.

    Eventually periodic codings resolve exactly through the affine fixed
    point of the period composition; a bare prefix projects to the left
    endpoint of its basic interval (an implicit all-1 tail).  With
    exact=True the result is a Fraction over the stored coefficients.
    """
    _check_digits(coding, system.r)
    if exact:
        a = [Fraction(v) for v in system.a]
        b = [Fraction(v) for v in system.b]
        t = Fraction(0)
    else:
        a = list(system.a)
        b = list(system.b)
        t = 0.0
    if coding.period is not None:
        # fixed point of t -> A + Q t for the period composition
        A, Q = (Fraction(0), Fraction(1)) if exact else (0.0, 1.0)
        for k in coding.period:
            # prepend handled by composing left to right on (A, Q)
            A = A + Q * b[k - 1]
            Q = Q * a[k - 1]
        t = A / (1 - Q)
    for k in reversed(coding.prefix):
        t = a[k - 1] * t + b[k - 1]
    return t if exact else float(t)


@dataclass(frozen=True)
class CutPointQuery:
    """in_T answer.  For members, `left` is the coding with the all-r tail
    and `right` the all-1-tail twin (either may be None at 0 and 1).
    decided=False marks a rational orbit that neither terminated nor cycled
    within the depth cap."""
    member: bool
    left: Coding | None = None
    right: Coding | None = None
    decided: bool = True
    n0: int | None = None          # length of the stem before the tail
    boundary_digit: int | None = None  # k_{n0} of the all-r-tail coding


def _cut_codings_from_stem(stem: tuple[int, ...], r: int) -> CutPointQuery:
    """stem = digits of the all-r-tail coding with trailing r's stripped."""
    if not stem:
        # the point 1; only the all-r coding exists
        return CutPointQuery(member=True, left=Coding(period=(r,)), right=None,
                             n0=0, boundary_digit=None)
    left = Coding(prefix=stem, period=(r,))
    right = Coding(prefix=stem[:-1] + (stem[-1] + 1,), period=(1,))
    return CutPointQuery(member=True, left=left, right=right,
                         n0=len(stem), boundary_digit=stem[-1])


def in_T(system: SelfAffineSystem, target, *, max_depth: int = 4096) -> CutPointQuery:
    """Decide membership of the two-coding set T.

    `target` is a number in [0, 1] or a Coding.  Numbers run an exact
    rational orbit (floats are exact rationals) with cycle detection; if the
    orbit neither hits 0 nor revisits a state within max_depth steps the
    answer is (member=False, decided=False).  Codings decide by inspecting
    the tail: members are exactly the codings that end in all 1s or all rs.
    """
    r = system.r
    if isinstance(target, Coding):
        _check_digits(target, r)
        tail = target.constant_tail()
        if tail is None or (tail not in (1, r)):
            # non-constant period, or unspecified tail: not decidable as a
            # member unless the tail is constant; periodic non-constant tails
            # are definitely not in T
            return CutPointQuery(member=False,
                                 decided=target.period is not None)
        digits = list(target.prefix)
        if tail == r:
            while digits and digits[-1] == r:
                digits.pop()
            return _cut_codings_from_stem(tuple(digits), r)
        while digits and digits[-1] == 1:
            digits.pop()
        if not digits:
            # the point 0; only the all-1 coding exists
            return CutPointQuery(member=True, left=None, right=Coding(period=(1,)),
                                 n0=0, boundary_digit=None)
        stem = tuple(digits[:-1]) + (digits[-1] - 1,)
        if stem[-1] == 0:
            raise errors.InvalidCoding("digit 0 produced while normalising")
        return _cut_codings_from_stem(stem, r)

    x = Fraction(target)
    if x == 0:
        return CutPointQuery(member=True, left=None, right=Coding(period=(1,)),
                             n0=0, boundary_digit=None)
    if x == 1:
        return CutPointQuery(member=True, left=Coding(period=(r,)), right=None,
                             n0=0, boundary_digit=None)
    if not (0 < x < 1):
        raise errors.OutOfDomain(f"x = {x} not in [0, 1]")
    cuts = [Fraction(v) for v in system.xs]
    widths = [cuts[k + 1] - cuts[k] for k in range(r)]
    t = x
    digits: list[int] = []
    seen: set[Fraction] = set()
    for _ in range(max_depth):
        if t in seen:
            return CutPointQuery(member=False)
        seen.add(t)
        k = 1
        while k < r and t >= cuts[k]:
            k += 1
        digits.append(k)
        t = (t - cuts[k - 1]) / widths[k - 1]
        if t == 0:
            # digits is the right coding's stem with an incremented last digit
            stem = tuple(digits[:-1]) + (digits[-1] - 1,)
            return _cut_codings_from_stem(stem, r)
    return CutPointQuery(member=False, decided=False)


@dataclass(frozen=True)
class RunStats:
    """Digit statistics of the first n digits, for one orientation.

    s maps each digit to its count; L_plus / L_minus are the terminal run
    lengths of digit r and digit 1.  chi and zeta are the indicator values
    for the requested side; both are 0 when the run covers all n digits.
    """
    n: int
    s: dict[int, int]
    L_plus: int
    L_minus: int
    chi: int
    zeta: int
    side: str

    @property
    def L(self) -> int:
        return self.L_plus if self.side == "right" else self.L_minus


def run_stats(system: SelfAffineSystem, constants, coding: Coding, n: int,
              side: str = "right") -> RunStats:
    """Counts, terminal runs and correction indicators at depth n.

    Right side: runs of digit r; chi fires when the digit after the
    pre-run digit lies in I_plus, zeta when the pre-run digit is in the
    overlap set.  Left side mirrors with runs of digit 1 and the digit
    *below* the pre-run digit.
    """
    if side not in ("right", "left"):
        raise ValueError("side must be 'right' or 'left'")
    if n < 1:
        raise ValueError("n must be >= 1")
    digits = coding.digits(n)
    _check_digits(coding, system.r)
    r = system.r
    s: dict[int, int] = {}
    for k in digits:
        s[k] = s.get(k, 0) + 1
    lp = 0
    while lp < n and digits[n - 1 - lp] == r:
        lp += 1
    lm = 0
    while lm < n and digits[n - 1 - lm] == 1:
        lm += 1
    L = lp if side == "right" else lm
    chi = zeta = 0
    # a run covering all n digits contributes no correction
    if n - L >= 1:
        boundary = digits[n - L - 1]
        probe = boundary + 1 if side == "right" else boundary - 1
        chi = 1 if probe in constants.index_plus else 0
        zeta = 1 if (boundary if side == "right" else boundary - 1) \
            in constants.lambda_set else 0
    return RunStats(n=n, s=s, L_plus=lp, L_minus=lm, chi=chi, zeta=zeta, side=side)


@dataclass(frozen=True)
class RunStructure:
    """Blueprint for codings with prescribed terminal-run density.

    Blocks end at positions block_ends[j]; the last run_lengths[j] positions
    of block j hold digit r, guarded by the pivot digit k_star at positions
    block_ends[j] - run_lengths[j] and block_ends[j] + 1; all other positions
    draw iid from p.  lam is the run-density target, tau = lam/(1-lam) the
    run-to-free ratio along block ends.
    """
    lam: float
    k_star: int
    block_ends: tuple[int, ...]
    run_lengths: tuple[int, ...]
    p: tuple[float, ...]

    @property
    def tau(self) -> float:
        return self.lam / (1.0 - self.lam)

    def validate(self) -> None:
        if not 0.0 < self.lam < 1.0:
            raise errors.InvalidSchedule("lam must be in (0, 1)")
        if len(self.block_ends) != len(self.run_lengths) or not self.block_ends:
            raise errors.InvalidSchedule("schedule arrays must match and be nonempty")
        r = len(self.p)
        if not (1 <= self.k_star < r):
            raise errors.InvalidSchedule("k_star must be a digit below r")
        if abs(sum(self.p) - 1.0) > 1e-9 or any(v < 0 for v in self.p):
            raise errors.InvalidSchedule("p must be a probability vector")
        prev = -1   # virtual block end before the first block
        for j, (nj, lj) in enumerate(zip(self.block_ends, self.run_lengths), start=1):
            if lj < 1:
                raise errors.InvalidSchedule(f"run length l_{j} must be >= 1")
            if not prev + 1 < nj - lj:
                raise errors.InvalidSchedule(
                    f"block {j}: need n_(j-1) + 1 < n_j - l_j "
                    f"({prev}+1 !< {nj}-{lj})")
            if not abs(lj / nj - self.lam) < 1.0 / j:
                raise errors.InvalidSchedule(
                    f"block {j}: |l_j/n_j - lam| = {abs(lj / nj - self.lam)} "
                    f">= 1/{j}")
            if j >= 2 and not prev / nj <= 1.0 / j:
                raise errors.InvalidSchedule(
                    f"block {j}: n_(j-1)/n_j = {prev / nj} > 1/{j}")
            prev = nj


def default_schedule(lam: float, length: int, *, n1: int | None = None):
    """Block ends n_j = j n_(j-1) + j (bumped when the run would swallow the
    previous block); every block fits inside `length`."""
    if not 0.0 < lam < 1.0:
        raise errors.InvalidSchedule("lam must be in (0, 1)")
    if n1 is None:
        n1 = max(16, math.ceil(3.0 / (1.0 - lam)))
    if n1 > length:
        raise errors.InvalidSchedule(
            f"length {length} cannot hold a run block (need >= {n1})")
    ends = [n1]
    lens = [max(1, round(lam * n1))]
    j = 1
    while True:
        j += 1
        prev = ends[-1]
        nj = j * prev + j
        # keep the free segment of block j nonempty
        while nj - round(lam * nj) <= prev + 1:
            nj += j
        if nj > length:
            break
        ends.append(nj)
        lens.append(max(1, round(lam * nj)))
    return tuple(ends), tuple(lens)


def run_structure_for_target(system: SelfAffineSystem, constants, alpha: float,
                             *, length: int = 100_000, p=None,
                             block_ends=None, run_lengths=None) -> RunStructure:
    """Run structure whose generated codings have corrected-ratio limit alpha.

    Only meaningful in CaseB with alpha in (1, alpha0).  The density solves
    sum p_k (log|d_k| - alpha log a_k) = tau (alpha - 1) log a_r with p
    defaulting to the CaseB maximiser p_star.  An explicit schedule overrides
    the default one (which grows too slowly for short horizons).
    """
    from .ifs import Regime
    if constants.regime is not Regime.CASE_B:
        raise errors.OutOfRange("run-structured codings need a CaseB system")
    if not 1.0 < alpha < constants.alpha0:
        raise errors.OutOfRange(
            f"alpha must lie in (1, alpha0) = (1, {constants.alpha0})")
    r = system.r
    if p is None:
        p = constants.p_star
    p = tuple(float(v) for v in p)
    a, d = system.a, system.d
    num = math.fsum(p[k - 1] * (math.log(abs(d[k - 1])) - alpha * math.log(a[k - 1]))
                    for k in range(1, r + 1) if p[k - 1] > 0.0)
    tau = num / ((alpha - 1.0) * math.log(a[-1]))
    if tau <= 0.0:
        raise errors.OutOfRange("constraint gives nonpositive run density")
    lam = tau / (1.0 + tau)
    pivots = [k for k in sorted(constants.lambda_set) if d[k - 1] != 0.0]
    if not pivots:
        raise errors.OutOfRange("no overlap digit with nonzero contraction")
    k_star = pivots[0]
    if block_ends is None:
        block_ends, run_lengths = default_schedule(lam, length)
    else:
        block_ends = tuple(block_ends)
        if run_lengths is None:
            run_lengths = tuple(max(1, round(lam * nj)) for nj in block_ends)
        else:
            run_lengths = tuple(run_lengths)
    rs = RunStructure(lam=lam, k_star=k_star, block_ends=block_ends,
                      run_lengths=run_lengths, p=p)
    rs.validate()
    return rs


def generate_run_structured(rs: RunStructure, length: int, seed: int) -> Coding:
    """Sample a digit prefix of the given length from the run structure.

    Positions in runs carry digit r, guard positions carry k_star, and the
    rest draw iid from p with the seeded generator.  Past the last scheduled
    block all positions are free draws.
    """
    rs.validate()
    r = len(rs.p)
    rng = np.random.default_rng(seed)
    cum = np.cumsum(rs.p)
    cum[-1] = 1.0
    draws = np.searchsorted(cum, rng.random(length), side="right") + 1
    digits = draws.astype(np.int64)
    for nj, lj in zip(rs.block_ends, rs.run_lengths):
        if nj - lj > length:
            break
        # guard, run, trailing guard (1-based positions)
        digits[nj - lj - 1] = rs.k_star
        hi = min(nj, length)
        digits[nj - lj: hi] = r
        if nj + 1 <= length:
            digits[nj] = rs.k_star
    return Coding(prefix=tuple(int(v) for v in digits))
