"""Bracketed bisection for strictly monotone scalar equations.

Every derived constant in this package (s_hat, sigma, beta(q), q*) solves
f(t) = 0 for a strictly monotone f.  Bisection is slower than Newton but has
no conditioning failure modes, which matters near the flat tails of the
pressure equations; brackets are expanded geometrically until they straddle
the root.
"""

from __future__ import annotations

from collections.abc import Callable


def solve_decreasing(f: Callable[[float], float], lo: float = 0.0,
                     hi: float = 1.0, *, rtol: float = 1e-12) -> float:
    """Root of a strictly decreasing f, expanding [lo, hi] as needed.

    Final bracket width is below rtol * max(1, |root|).
    """
    flo, fhi = f(lo), f(hi)
    step = max(1.0, hi - lo)
    while flo < 0.0:
        # root lies below lo
        hi, fhi = lo, flo
        lo -= step
        step *= 2.0
        flo = f(lo)
        if step > 1e18:
            raise ArithmeticError("bracket expansion failed (decreasing)")
    while fhi > 0.0:
        lo, flo = hi, fhi
        hi += step
        step *= 2.0
        fhi = f(hi)
        if step > 1e18:
            raise ArithmeticError("bracket expansion failed (decreasing)")
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    for _ in range(256):
        mid = 0.5 * (lo + hi)
        if hi - lo <= rtol * max(1.0, abs(mid)):
            break
        fm = f(mid)
        if fm > 0.0:
            lo = mid
        elif fm < 0.0:
            hi = mid
        else:
            return mid
    return 0.5 * (lo + hi)


def solve_increasing(f: Callable[[float], float], lo: float = 0.0,
                     hi: float = 1.0, *, rtol: float = 1e-12) -> float:
    return solve_decreasing(lambda t: -f(t), lo, hi, rtol=rtol)
