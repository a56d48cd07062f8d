"""Self-affine interpolation systems and their derived constants.

A system is a family of r >= 2 planar affine maps

    T_k(x, y) = (a_k x + b_k,  c_k x + d_k y + e_k),      k = 1..r,

pinned to a polygonal line through (x_0, y_0), ..., (x_r, y_r) with
0 = x_0 < ... < x_r = 1.  The union of the T_k images of the attractor is
the graph of the unique continuous phi: [0,1] -> R satisfying

    phi(a_k x + b_k) = c_k x + d_k phi(x) + e_k.

Pinning forces a_k = x_k - x_{k-1}, b_k = x_{k-1},
d_k (y_r - y_0) + c_k = y_k - y_{k-1} and d_k y_0 + e_k = y_{k-1}; for each
branch the vertical contraction d_k is the one free parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from . import errors
from .roots import solve_decreasing

_REL_TOL = 1e-12          # linear pin relations
LAMBDA_TOL = 1e-10        # membership test for the overlap set
_TIE_TOL = 1e-12          # equality of exponent ratios rho_k


@dataclass(frozen=True)
class Branch:
    """One affine map T(x, y) = (a x + b, c x + d y + e)."""
    a: float
    b: float
    c: float
    d: float
    e: float


@dataclass(frozen=True)
class SelfAffineSystem:
    """Pinned branch family plus its interpolation polygon.

    `branches` are ordered left to right; `vertices` has r+1 points.
    Instances are immutable; use build_from_polygon / from_branches, both of
    which leave the system in a validated state.
    """
    branches: tuple[Branch, ...]
    vertices: tuple[tuple[float, float], ...]

    @property
    def r(self) -> int:
        return len(self.branches)

    @property
    def a(self) -> tuple[float, ...]:
        return tuple(br.a for br in self.branches)

    @property
    def b(self) -> tuple[float, ...]:
        return tuple(br.b for br in self.branches)

    @property
    def c(self) -> tuple[float, ...]:
        return tuple(br.c for br in self.branches)

    @property
    def d(self) -> tuple[float, ...]:
        return tuple(br.d for br in self.branches)

    @property
    def e(self) -> tuple[float, ...]:
        return tuple(br.e for br in self.branches)

    @property
    def xs(self) -> tuple[float, ...]:
        return tuple(v[0] for v in self.vertices)

    @property
    def ys(self) -> tuple[float, ...]:
        return tuple(v[1] for v in self.vertices)

    @property
    def index_zero(self) -> frozenset[int]:
        """1-based branch indices with d_k = 0."""
        return frozenset(k for k in range(1, self.r + 1)
                         if self.branches[k - 1].d == 0.0)

    @property
    def index_plus(self) -> frozenset[int]:
        """1-based branch indices with d_k != 0."""
        return frozenset(k for k in range(1, self.r + 1)
                         if self.branches[k - 1].d != 0.0)


def build_from_polygon(vertices, d) -> SelfAffineSystem:
    """Construct the unique pinned system through `vertices` with the given d.

    Args:
        vertices: sequence of r+1 points (x_k, y_k), x_0 = 0, x_r = 1,
            strictly increasing in x.
        d: sequence of r vertical contractions, each |d_k| < 1.

    Raises:
        NonMonotonePartition, ContractionOutOfRange, DegenerateSystem.
    """
    verts = tuple((float(x), float(y)) for x, y in vertices)
    dd = tuple(float(v) for v in d)
    if len(verts) < 3 or len(dd) != len(verts) - 1:
        raise ValueError(
            f"need r+1 vertices and r contractions, got {len(verts)} and {len(dd)}")
    xs = [v[0] for v in verts]
    if xs[0] != 0.0 or xs[-1] != 1.0 or any(xs[i] >= xs[i + 1] for i in range(len(xs) - 1)):
        raise errors.NonMonotonePartition(
            "vertex abscissae must satisfy 0 = x_0 < ... < x_r = 1")
    for k, dk in enumerate(dd, start=1):
        if not abs(dk) < 1.0:
            raise errors.ContractionOutOfRange(f"|d| = {abs(dk)} >= 1", branch=k)
    if sum(1 for dk in dd if dk != 0.0) < 2:
        raise errors.DegenerateSystem("need at least two branches with d_k != 0")
    y0, yr = verts[0][1], verts[-1][1]
    branches = []
    for k in range(1, len(verts)):
        x_lo, y_lo = verts[k - 1]
        x_hi, y_hi = verts[k]
        a = x_hi - x_lo
        b = x_lo
        c = (y_hi - y_lo) - dd[k - 1] * (yr - y0)
        e = y_lo - dd[k - 1] * y0
        branches.append(Branch(a, b, c, dd[k - 1], e))
    return SelfAffineSystem(tuple(branches), verts)


def from_branches(branches) -> SelfAffineSystem:
    """Reconstruct the polygon from raw branch tuples and validate.

    y_0 and y_r come from the branch fixed points phi(0) = e_1 / (1 - d_1),
    phi(1) = (c_r + e_r) / (1 - d_r); interior ordinates from the pin
    relation y_{k-1} = d_k y_0 + e_k.  Raw tuples are never trusted: the
    result is passed through validate().
    """
    brs = tuple(Branch(float(b.a), float(b.b), float(b.c), float(b.d), float(b.e))
                if isinstance(b, Branch) else Branch(*map(float, b))
                for b in branches)
    r = len(brs)
    if r < 2:
        raise errors.DegenerateSystem("need r >= 2 branches")
    for k, br in enumerate(brs, start=1):
        if not abs(br.d) < 1.0:
            raise errors.ContractionOutOfRange(f"|d| = {abs(br.d)} >= 1", branch=k)
    y0 = brs[0].e / (1.0 - brs[0].d)
    yr = (brs[-1].c + brs[-1].e) / (1.0 - brs[-1].d)
    xs = [0.0]
    for br in brs:
        xs.append(xs[-1] + br.a)
    ys = [brs[k].d * y0 + brs[k].e for k in range(r)] + [yr]
    system = SelfAffineSystem(brs, tuple(zip(xs, ys)))
    validate(system)
    return system


def validate(system: SelfAffineSystem) -> None:
    """Check every pin relation at tolerance 1e-12; raise a named error.

    The scale for each relation is max(1, magnitudes involved) so systems
    with large ordinates are not penalised.
    """
    xs, ys = system.xs, system.ys
    r = system.r
    if xs[0] != 0.0 or xs[-1] != 1.0 or any(xs[i] >= xs[i + 1] for i in range(r)):
        raise errors.NonMonotonePartition(
            "vertex abscissae must satisfy 0 = x_0 < ... < x_r = 1")
    total = math.fsum(br.a for br in system.branches)
    if abs(total - 1.0) > _REL_TOL:
        raise errors.SumNotOne(f"sum of widths is {total!r}")
    y0, yr = ys[0], ys[-1]
    for k in range(1, r + 1):
        br = system.branches[k - 1]
        if not (0.0 < br.a < 1.0):
            raise errors.ContractionOutOfRange(f"width a = {br.a}", branch=k)
        if not abs(br.d) < 1.0:
            raise errors.ContractionOutOfRange(f"|d| = {abs(br.d)} >= 1", branch=k)
        scale = max(1.0, abs(xs[k]), abs(xs[k - 1]))
        if abs(br.a - (xs[k] - xs[k - 1])) > _REL_TOL * scale:
            raise errors.WidthMismatch(
                f"a = {br.a!r} but x_k - x_(k-1) = {xs[k] - xs[k - 1]!r}", branch=k)
        if abs(br.b - xs[k - 1]) > _REL_TOL * scale:
            raise errors.OffsetMismatch(
                f"b = {br.b!r} but x_(k-1) = {xs[k - 1]!r}", branch=k)
        yscale = max(1.0, abs(ys[k]), abs(ys[k - 1]), abs(yr - y0))
        if abs(br.d * (yr - y0) + br.c - (ys[k] - ys[k - 1])) > _REL_TOL * yscale:
            raise errors.ShearMismatch(
                f"d (y_r - y_0) + c = {br.d * (yr - y0) + br.c!r} but "
                f"y_k - y_(k-1) = {ys[k] - ys[k - 1]!r}", branch=k)
        if abs(br.d * y0 + br.e - ys[k - 1]) > _REL_TOL * yscale:
            raise errors.LiftMismatch(
                f"d y_0 + e = {br.d * y0 + br.e!r} but y_(k-1) = {ys[k - 1]!r}",
                branch=k)
    if len(system.index_plus) < 2:
        raise errors.DegenerateSystem("need at least two branches with d_k != 0")


class Regime(str, Enum):
    """Which form of the spectrum applies."""
    CASE_A = "CaseA"   # some |d_k| >= a_k, or the overlap set is empty
    CASE_B = "CaseB"   # all |d_k| < a_k and the overlap set is nonempty


@dataclass(frozen=True)
class SpectrumConstants:
    """Everything derived from (a_k, d_k, c_k) that the spectrum and exponent
    layers consume.  `a` and `d` are carried so the object is self-contained
    (the CLI round-trips it through JSON).
    """
    a: tuple[float, ...]
    d: tuple[float, ...]
    index_plus: frozenset[int]
    index_zero: frozenset[int]
    rho: dict[int, float]          # log|d_k| / log a_k on index_plus
    alpha_min: float
    alpha_max: float
    s_min: float                   # sum over argmin-rho branches of a^s = 1
    s_max: float                   # same over argmax-rho branches
    s_hat: float                   # sum over index_plus of a^s = 1
    alpha_hat: float               # location of the spectrum maximum
    k1: float                      # terminal-run correction constants
    k2: float
    lambda_set: frozenset[int]     # indices k with overlapping expansions
    lambda_borderline: frozenset[int]  # |expression| <= tol but nonzero
    regime: Regime
    sigma: float | None            # CaseB only: sum (|d_k|/a_k)^sigma = 1
    p_star: tuple[float, ...] | None   # CaseB maximiser, zeros on index_zero
    alpha0: float | None           # CaseB kink between linear and concave parts

    def to_dict(self) -> dict:
        return {
            "a": list(self.a),
            "d": list(self.d),
            "index_plus": sorted(self.index_plus),
            "index_zero": sorted(self.index_zero),
            "rho": {str(k): v for k, v in sorted(self.rho.items())},
            "alpha_min": self.alpha_min,
            "alpha_max": self.alpha_max,
            "s_min": self.s_min,
            "s_max": self.s_max,
            "s_hat": self.s_hat,
            "alpha_hat": self.alpha_hat,
            "k1": self.k1,
            "k2": self.k2,
            "lambda_set": sorted(self.lambda_set),
            "lambda_borderline": sorted(self.lambda_borderline),
            "regime": self.regime.value,
            "sigma": self.sigma,
            "p_star": list(self.p_star) if self.p_star is not None else None,
            "alpha0": self.alpha0,
        }

    @staticmethod
    def from_dict(data: dict) -> "SpectrumConstants":
        return SpectrumConstants(
            a=tuple(data["a"]),
            d=tuple(data["d"]),
            index_plus=frozenset(data["index_plus"]),
            index_zero=frozenset(data["index_zero"]),
            rho={int(k): v for k, v in data["rho"].items()},
            alpha_min=data["alpha_min"],
            alpha_max=data["alpha_max"],
            s_min=data["s_min"],
            s_max=data["s_max"],
            s_hat=data["s_hat"],
            alpha_hat=data["alpha_hat"],
            k1=data["k1"],
            k2=data["k2"],
            lambda_set=frozenset(data["lambda_set"]),
            lambda_borderline=frozenset(data["lambda_borderline"]),
            regime=Regime(data["regime"]),
            sigma=data["sigma"],
            p_star=tuple(data["p_star"]) if data["p_star"] is not None else None,
            alpha0=data["alpha0"],
        )


def _partition_exponent(a_subset) -> float:
    """Solve sum a_k^s = 1 over the subset; s = 0 for a single branch."""
    subset = list(a_subset)
    if len(subset) == 1:
        return 0.0
    return solve_decreasing(lambda s: math.fsum(ak ** s for ak in subset) - 1.0,
                            0.0, 1.0)


def lambda_set(system: SelfAffineSystem, tol: float = LAMBDA_TOL):
    """Overlap index set: k in 1..r-1 where the two one-sided expansions of
    phi at the interior vertex x_k genuinely differ.

    Convention: 0/0 terms count as zero; k is declared a member outright when
    a_1 = d_1 with c_1 d_{k+1} != 0, or a_r = d_r with c_r d_k != 0 (the union
    of the two degenerate rules).  Expressions with 0 < |value| <= tol are
    classified out and reported in the borderline set.

    Returns (members, borderline) as frozensets.
    """
    a, c, d = system.a, system.c, system.d
    r = system.r
    members, borderline = set(), set()
    for k in range(1, r):
        dk, dk1 = d[k - 1], d[k]
        if max(abs(dk), abs(dk1)) == 0.0:
            continue
        if a[0] == d[0] and c[0] * dk1 != 0.0:
            members.add(k)
            continue
        if a[-1] == d[-1] and c[-1] * dk != 0.0:
            members.add(k)
            continue
        expr = c[k] * a[k - 1] - c[k - 1] * a[k]
        num_left = c[0] * dk1 * a[k - 1]
        if num_left != 0.0:
            expr += num_left / (a[0] - d[0])
        num_right = c[-1] * dk * a[k]
        if num_right != 0.0:
            expr -= num_right / (a[-1] - d[-1])
        if abs(expr) > tol:
            members.add(k)
        elif expr != 0.0:
            borderline.add(k)
    return frozenset(members), frozenset(borderline)


def two_branch_lambda_empty(system: SelfAffineSystem, tol: float = 1e-9) -> bool:
    """For r = 2 with |d_k| < a_k: the overlap set is empty iff the shears are
    proportional, c_1/(a_1-d_1) = c_2/(a_2-d_2), or d_1/a_1 + d_2/a_2 = 1.
    Independent of lambda_set(); used for cross-checking.
    """
    if system.r != 2:
        raise ValueError("criterion applies to two-branch systems only")
    (a1, a2), (c1, c2), (d1, d2) = system.a, system.c, system.d
    if not (abs(d1) < a1 and abs(d2) < a2):
        raise errors.ContractionOutOfRange("criterion needs |d_k| < a_k")
    g1, g2 = c1 / (a1 - d1), c2 / (a2 - d2)
    if abs(g1 - g2) <= tol * max(1.0, abs(g1), abs(g2)):
        return True
    return abs(d1 / a1 + d2 / a2 - 1.0) <= tol


def compute_constants(system: SelfAffineSystem, *,
                      lambda_tol: float = LAMBDA_TOL) -> SpectrumConstants:
    """Derive every spectrum constant for a validated system."""
    validate(system)
    a, d = system.a, system.d
    iplus = sorted(system.index_plus)
    izero = system.index_zero

    rho = {k: math.log(abs(d[k - 1])) / math.log(a[k - 1]) for k in iplus}
    alpha_min = min(rho.values())
    alpha_max = max(rho.values())
    min_ties = [k for k in iplus if abs(rho[k] - alpha_min) <= _TIE_TOL]
    max_ties = [k for k in iplus if abs(rho[k] - alpha_max) <= _TIE_TOL]
    s_min = _partition_exponent(a[k - 1] for k in min_ties)
    s_max = _partition_exponent(a[k - 1] for k in max_ties)
    s_hat = solve_decreasing(
        lambda s: math.fsum(a[k - 1] ** s for k in iplus) - 1.0, 0.0, 1.0)

    wts = [a[k - 1] ** s_hat for k in iplus]
    alpha_hat = (math.fsum(w * math.log(abs(d[k - 1])) for w, k in zip(wts, iplus))
                 / math.fsum(w * math.log(a[k - 1]) for w, k in zip(wts, iplus)))

    # terminal-run correction constants; zero when the relevant d vanishes
    if d[0] == 0.0 or d[-1] == 0.0:
        k1 = 0.0
    else:
        k1 = (math.log(a[-1]) / math.log(a[0])) * math.log(abs(d[0])) \
            - math.log(abs(d[-1]))
    k2 = 0.0 if d[-1] == 0.0 else math.log(a[-1]) - math.log(abs(d[-1]))

    lam, borderline = lambda_set(system, tol=lambda_tol)

    contractive = all(abs(d[k - 1]) < a[k - 1] for k in range(1, system.r + 1))
    if contractive and lam:
        regime = Regime.CASE_B
        sigma = solve_decreasing(
            lambda s: math.fsum((abs(d[k - 1]) / a[k - 1]) ** s for k in iplus) - 1.0,
            0.0, 2.0)
        p_star = tuple((abs(d[k - 1]) / a[k - 1]) ** sigma
                       if (k in system.index_plus) else 0.0
                       for k in range(1, system.r + 1))
        num = math.fsum(p_star[k - 1] * math.log(abs(d[k - 1])) for k in iplus)
        den = math.fsum(p_star[k - 1] * math.log(a[k - 1]) for k in iplus)
        alpha0 = num / den
    else:
        regime = Regime.CASE_A
        sigma = None
        p_star = None
        alpha0 = None

    return SpectrumConstants(
        a=a, d=d, index_plus=frozenset(iplus), index_zero=izero, rho=rho,
        alpha_min=alpha_min, alpha_max=alpha_max,
        s_min=s_min, s_max=s_max, s_hat=s_hat, alpha_hat=alpha_hat,
        k1=k1, k2=k2, lambda_set=lam, lambda_borderline=borderline,
        regime=regime, sigma=sigma, p_star=p_star, alpha0=alpha0)


def antiderivative_system(system: SelfAffineSystem) -> SelfAffineSystem:
    """System whose attractor is the graph of x -> integral_0^x phi.

    Requires all shears zero (c == 0); then psi = int phi is itself
    self-affine with widths a_k, shears a_k e_k and contractions a_k d_k.
    The total integral follows from self-affinity:
    I = sum a_k (e_k + d_k I), so I = (sum a_k e_k) / (1 - sum a_k d_k).
    The resulting system always has an empty overlap set.
    """
    if any(ck != 0.0 for ck in system.c):
        raise errors.ShearedSystem("antiderivative needs all shears c_k = 0")
    a, d, e = system.a, system.d, system.e
    r = system.r
    total = math.fsum(a[k] * e[k] for k in range(r)) \
        / (1.0 - math.fsum(a[k] * d[k] for k in range(r)))
    piece = [a[k] * (e[k] + d[k] * total) for k in range(r)]
    ys = [0.0]
    for k in range(r):
        ys.append(ys[-1] + piece[k])
    branches = []
    for k in range(r):
        branches.append(Branch(a=a[k], b=system.b[k], c=a[k] * e[k],
                               d=a[k] * d[k], e=ys[k]))
    out = SelfAffineSystem(tuple(branches),
                           tuple((system.xs[k], ys[k]) for k in range(r + 1)))
    validate(out)
    return out
