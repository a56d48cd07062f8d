import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from affine_spectra import (
    Coding,
    build_from_polygon,
    derivative_series,
    divided_difference,
    errors,
    evaluate,
    evaluate_many,
    oscillation_lower_bound,
    sample,
    sup_bound,
)


def test_parabola():
    s = build_from_polygon([(0.0, 0.0), (0.5, 0.5), (1.0, 0.0)], (0.25, 0.25))
    xs = np.linspace(0.0, 1.0, 1001)
    vals, errs, _ = evaluate_many(s, xs, 1e-10)
    assert np.max(np.abs(vals - 2.0 * xs * (1.0 - xs))) < 1e-9
    assert np.all(errs <= 1e-10)


def test_vertices_are_exact(make_system):
    for name in ("riesz-nagy:0.3", "okamoto:0.6", "skew-takagi:0.3,0.5,0.25"):
        system, _ = make_system(name)
        for x, y in system.vertices:
            res = evaluate(system, x, 1e-15)
            assert res.value == y
            assert res.error_bound == 0.0
            assert res.depth_used == 0


def test_error_bound_is_honest(make_system):
    rn, _ = make_system("riesz-nagy:0.3")
    xs = np.linspace(0.0, 1.0, 197)
    coarse, bound, _ = evaluate_many(rn, xs, 1e-4)
    tight, _, _ = evaluate_many(rn, xs, 1e-13)
    assert np.all(np.abs(coarse - tight) <= bound + 1e-13)
    assert np.all(bound <= 1e-4)


def test_tighter_tol_costs_depth(make_system):
    rn, _ = make_system("riesz-nagy:0.3")
    shallow = evaluate(rn, 0.3, 1e-4).depth_used
    deep = evaluate(rn, 0.3, 1e-12).depth_used
    assert shallow < deep


def test_sup_bound(make_system):
    for name in ("takagi:0.5", "riesz-nagy:0.3", "skew-takagi:0.3,0.5,0.25"):
        system, _ = make_system(name)
        _, vals, _ = sample(system, 513, 1e-10)
        assert np.max(np.abs(vals)) <= sup_bound(system) + 1e-9


def test_sample_hits_endpoints(make_system):
    skew, _ = make_system("skew-takagi:0.3,0.5,0.25")
    xs, vals, errs = sample(skew, 11, 1e-12)
    assert xs[0] == 0.0 and xs[-1] == 1.0
    assert vals[0] == skew.vertices[0][1]
    assert vals[-1] == skew.vertices[-1][1]


def test_okamoto_monotone(make_system):
    ok, _ = make_system("okamoto:0.5")
    _, vals, _ = sample(ok, 1025, 1e-12)
    assert np.all(np.diff(vals) >= -2e-12)


def test_domain_and_tol_errors(make_system):
    rn, _ = make_system("riesz-nagy:0.3")
    with pytest.raises(errors.OutOfDomain):
        evaluate(rn, -0.1, 1e-6)
    with pytest.raises(errors.OutOfDomain):
        evaluate_many(rn, np.array([0.5, 1.2]), 1e-6)
    with pytest.raises(ValueError):
        evaluate(rn, 0.5, 0.0)


def test_non_convergence_reports_progress(make_system):
    rn, _ = make_system("riesz-nagy:0.3")
    with pytest.raises(errors.NonConvergence) as exc:
        evaluate(rn, 0.3, 1e-30, max_depth=10)
    assert exc.value.depth == 10
    assert 0.0 < exc.value.achieved_bound < 1e-2


@given(seed=st.integers(0, 10 ** 9))
def test_self_affinity_identity(make_system, seed):
    # phi(a_k t + b_k) = c_k t + d_k phi(t) + e_k on every branch
    rng = np.random.default_rng(seed)
    skew, _ = make_system("skew-takagi:0.3,0.5,0.25")
    t = float(rng.uniform(0.0, 1.0))
    inner = evaluate(skew, t, 1e-13).value
    for b in skew.branches:
        outer = evaluate(skew, b.a * t + b.b, 1e-13).value
        assert outer == pytest.approx(b.c * t + b.d * inner + b.e, abs=1e-11)


# ----------------------------------------------------------- derivative series

def test_series_on_smooth_case():
    s = build_from_polygon([(0.0, 0.0), (0.5, 0.5), (1.0, 0.0)], (0.25, 0.25))
    # phi = 2x(1-x); phi'(0) = 2, phi'(1/3) = 2/3
    assert derivative_series(s, Coding(period=(1,))) == pytest.approx(
        2.0, abs=1e-9)
    assert derivative_series(s, Coding(period=(1, 2))) == pytest.approx(
        2.0 / 3.0, abs=1e-9)


def test_series_cut_values(make_system):
    skew, _ = make_system("skew-takagi:0.3,0.5,0.25")
    right = derivative_series(skew, Coding(prefix=(2,), period=(1,)))
    left = derivative_series(skew, Coding(prefix=(1,), period=(2,)))
    assert right == pytest.approx(20.0 / 7.0, abs=1e-9)
    assert left == pytest.approx(20.0 / 27.0, abs=1e-9)


def test_series_zero_shear_is_exact(make_system):
    rn, _ = make_system("riesz-nagy:0.3")
    assert derivative_series(rn, Coding(period=(1,))) == 0.0


def test_series_terminates_on_flat_branch():
    s = build_from_polygon([(0.0, 0.0), (0.3, 0.7), (0.6, 0.2), (1.0, 1.0)],
                           (0.4, 0.0, 0.3))
    got = derivative_series(s, Coding(prefix=(1, 3, 2), period=(1, 2)))
    b1, b2, b3 = s.branches
    want = (b1.c / b1.a
            + (b3.c / b3.a) * (b1.d / b1.a)
            + (b2.c / b2.a) * (b1.d / b1.a) * (b3.d / b3.a))
    assert got == pytest.approx(want, abs=1e-13)
    # independent check: the series equals the slope of the affine piece
    from affine_spectra import basic_interval, evaluate as ev
    bi = basic_interval(s, (1, 3, 2))
    lo = ev(s, bi.left, 1e-14).value
    hi = ev(s, bi.right, 1e-14).value
    assert got == pytest.approx((hi - lo) / bi.length, abs=1e-9)


def test_series_guards(make_system):
    rn, _ = make_system("riesz-nagy:0.3")
    tak, _ = make_system("takagi:0.5")
    with pytest.raises(errors.NotDifferentiable):
        derivative_series(rn, Coding(period=(2,)), gamma=0.9)
    with pytest.raises(errors.NotDifferentiable):
        derivative_series(tak, Coding(period=(1,)))  # |d/a| = sqrt(2) > 1
    with pytest.raises(errors.TailBoundUnavailable):
        derivative_series(rn, Coding(prefix=(1, 2, 1)))


# -------------------------------------------------- divided-difference helpers

def test_divided_difference_cubic():
    xs = [0.0, 0.13, 0.4, 0.77]
    vals = [5.0 * x ** 3 - x + 2.0 for x in xs]
    assert divided_difference(xs, vals) == pytest.approx(5.0, abs=1e-10)
    quad = [3.0 * x ** 2 for x in xs]
    assert divided_difference(xs, quad) == pytest.approx(0.0, abs=1e-10)
    with pytest.raises(errors.DuplicateAbscissa):
        divided_difference([0.1, 0.1, 0.3], [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        divided_difference([0.1, 0.2], [1.0])


def test_oscillation_bound_is_a_lower_bound(make_system):
    tak, _ = make_system("takagi:0.5")
    xs = np.linspace(0.125, 0.375, 6)
    vals, _, _ = evaluate_many(tak, xs, 1e-13)
    bound = oscillation_lower_bound(xs, vals)
    assert bound > 0.0
    # compare against the best fitting polynomial of degree N-1
    coeff = np.polyfit(xs, vals, len(xs) - 2)
    resid = np.max(np.abs(vals - np.polyval(coeff, xs)))
    assert bound <= resid + 1e-12
    with pytest.raises(errors.NotIncreasing):
        oscillation_lower_bound([0.3, 0.2], [1.0, 2.0])
