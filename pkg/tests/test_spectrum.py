import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from affine_spectra import (
    alpha_of_q,
    beta,
    beta_star,
    compute_constants,
    contraction_ratio,
    duality_maximizer,
    entropy_ratio,
    errors,
    q_star,
    spectrum_D,
    spectrum_table,
)
from conftest import random_polygon_system

SKEW = "skew-takagi:0.3,0.5,0.25"
LN2, LN3 = math.log(2.0), math.log(3.0)


# ---------------------------------------------------------------- beta and q*

def test_beta_takagi_closed_form(make_system):
    for w in (0.5, 1.5):
        _, c = make_system(f"takagi:{w}")
        for q in (-2.0, -0.3, 0.0, 1.0, 2.5):
            assert beta(c, q) == pytest.approx(1.0 - w * q, abs=1e-9)


def test_beta_anchors(make_system):
    _, crn = make_system("riesz-nagy:0.3")
    assert beta(crn, 1.0) == pytest.approx(0.0, abs=1e-9)  # |d| sums to one
    _, cok = make_system("okamoto:0.6")
    assert beta(cok, 1.0) == pytest.approx(math.log(1.4) / LN3, abs=1e-9)
    for c in (crn, cok):
        assert beta(c, 0.0) == pytest.approx(c.s_hat, abs=1e-11)


def test_beta_at_sigma(make_system):
    _, c = make_system(SKEW)
    assert beta(c, c.sigma) == pytest.approx(-c.sigma, abs=1e-9)


@given(seed=st.integers(0, 10 ** 9))
def test_beta_decreasing_convex(seed):
    rng = np.random.default_rng(seed)
    c = compute_constants(random_polygon_system(rng, allow_zero=True))
    qs = np.linspace(-2.0, 3.0, 21)
    vals = np.array([beta(c, q) for q in qs])
    diffs = np.diff(vals)
    assert np.all(diffs < 1e-10)            # strictly decreasing
    assert np.all(np.diff(diffs) > -1e-8)   # convex


def test_alpha_of_q_inverts(make_system):
    _, c = make_system("riesz-nagy:0.3")
    for q in (-1.5, 0.0, 0.7, 2.0):
        alpha = alpha_of_q(c, q)
        assert c.alpha_min < alpha < c.alpha_max
        assert q_star(c, alpha) == pytest.approx(q, abs=1e-7)
    for alpha in (0.8, 1.0, 1.3):
        assert alpha_of_q(c, q_star(c, alpha)) == pytest.approx(alpha,
                                                                abs=1e-9)


def test_q_star_out_of_range(make_system):
    _, c = make_system("riesz-nagy:0.3")
    for alpha in (c.alpha_min, c.alpha_max, 0.1, 5.0):
        with pytest.raises(errors.OutOfRange):
            q_star(c, alpha)


# -------------------------------------------------------------------- beta*

def test_beta_star_frozen(make_system):
    _, c = make_system("riesz-nagy:0.3")
    assert beta_star(c, 0.8) == pytest.approx(0.784060340309653, abs=1e-9)
    assert beta_star(c, 1.0) == pytest.approx(0.969236197058513, abs=1e-9)
    assert beta_star(c, 1.3) == pytest.approx(0.940560945378535, abs=1e-9)


def test_beta_star_endpoints(make_system):
    _, crn = make_system("riesz-nagy:0.3")
    assert beta_star(crn, crn.alpha_min) == pytest.approx(0.0, abs=1e-12)
    assert beta_star(crn, crn.alpha_max) == pytest.approx(0.0, abs=1e-12)
    assert beta_star(crn, crn.alpha_hat) == pytest.approx(1.0, abs=1e-9)
    _, cok = make_system("okamoto:0.6")
    assert beta_star(cok, cok.alpha_min) == pytest.approx(LN2 / LN3,
                                                          abs=1e-9)
    assert beta_star(cok, cok.alpha_max) == pytest.approx(0.0, abs=1e-12)
    assert beta_star(cok, cok.alpha_min - 1e-6) == -math.inf
    assert beta_star(cok, cok.alpha_max + 1e-6) == -math.inf


def test_beta_star_degenerate(make_system):
    _, c = make_system("okamoto:0.5")
    assert beta_star(c, c.alpha_hat) == pytest.approx(c.s_hat, abs=1e-11)
    assert beta_star(c, c.alpha_hat + 1e-3) == -math.inf
    assert beta_star(c, c.alpha_hat - 1e-3) == -math.inf


# -------------------------------------------------------------------- duality

def test_duality_legendre(make_system):
    _, c = make_system("riesz-nagy:0.3")
    for alpha in (0.8, 1.0, 1.3):
        res = duality_maximizer(c, alpha)
        assert res.branch == "legendre"
        assert math.fsum(res.p) == pytest.approx(1.0, abs=1e-9)
        assert res.entropy == pytest.approx(beta_star(c, alpha), abs=1e-8)
        # Gibbs form |d_k|^q a_k^beta(q)
        b = beta(c, res.q)
        for pk, dk, ak in zip(res.p, (0.3, 0.7), (0.5, 0.5)):
            assert pk == pytest.approx(dk ** res.q * ak ** b, abs=1e-8)


def test_duality_endpoint_concentrates(make_system):
    _, c = make_system("riesz-nagy:0.3")
    res = duality_maximizer(c, c.alpha_min)
    assert res.branch == "endpoint"
    assert res.p == pytest.approx((0.0, 1.0), abs=1e-12)
    _, cok = make_system("okamoto:0.6")
    res = duality_maximizer(cok, cok.alpha_min)
    assert res.branch == "endpoint"
    assert res.p[1] == 0.0
    assert res.p[0] == pytest.approx(0.5, abs=1e-9)  # tie weight (1/3)^s
    assert res.entropy == pytest.approx(LN2 / LN3, abs=1e-9)


def test_duality_linear_branch(make_system):
    _, c = make_system(SKEW)
    res = duality_maximizer(c, 1.2)
    assert res.branch == "linear"
    assert res.p == pytest.approx(c.p_star, abs=1e-11)
    assert res.contraction == pytest.approx(c.sigma, abs=1e-9)
    with pytest.raises(errors.OutOfRange):
        duality_maximizer(c, 0.99)


def test_duality_degenerate_branch(make_system):
    _, c = make_system("okamoto:0.5")
    res = duality_maximizer(c, c.alpha_hat)
    assert res.branch == "degenerate"
    assert res.p[1] == 0.0
    assert res.p[0] == pytest.approx(0.5, abs=1e-9)


def test_ratio_guards(make_system):
    _, c = make_system(SKEW)
    with pytest.raises(ValueError):
        entropy_ratio((0.5, 0.3, 0.2), (0.3, 0.7))
    with pytest.raises(ValueError):
        contraction_ratio((0.5, 0.5, 0.0), c)
    _, cok = make_system("okamoto:0.5")
    with pytest.raises(ValueError):
        contraction_ratio((0.3, 0.4, 0.3), cok)  # mass on the flat branch


def test_contraction_ratio_maximised_at_p_star(make_system):
    _, c = make_system(SKEW)
    top = contraction_ratio(c.p_star, c)
    assert top == pytest.approx(c.sigma, abs=1e-10)
    rng = np.random.default_rng(23)
    for _ in range(200):
        p = rng.dirichlet((1.0, 1.0))
        assert contraction_ratio(tuple(p), c) <= top + 1e-9


# ------------------------------------------------------------------ spectrum D

def test_spectrum_linear_part(make_system):
    _, c = make_system(SKEW)
    at1 = spectrum_D(c, 1.0)
    assert at1.dim == 0.0 and at1.branch == "linear"
    assert "dimension 0" in at1.note
    assert spectrum_D(c, 1.2).dim == pytest.approx(0.2 * c.sigma, abs=1e-10)
    # continuous and tangent at alpha0
    h = 1e-6
    at0 = spectrum_D(c, c.alpha0).dim
    left = spectrum_D(c, c.alpha0 - h).dim
    right = spectrum_D(c, c.alpha0 + h).dim
    assert at0 == pytest.approx(c.sigma * (c.alpha0 - 1.0), abs=1e-9)
    assert (at0 - left) / h == pytest.approx(c.sigma, abs=1e-4)
    assert (right - at0) / h == pytest.approx(c.sigma, abs=1e-4)


def test_spectrum_case_a(make_system):
    _, c = make_system("riesz-nagy:0.3")
    assert spectrum_D(c, 0.9).branch == "legendre"
    assert spectrum_D(c, c.alpha_hat).dim == pytest.approx(1.0, abs=1e-9)
    assert spectrum_D(c, c.alpha_min).dim == 0.0
    assert spectrum_D(c, 0.4).branch == "empty"
    assert spectrum_D(c, 0.4).dim is None


def test_spectrum_infinite_level_set(make_system):
    _, cok = make_system("okamoto:0.5")
    inf_pt = spectrum_D(cok, math.inf)
    assert inf_pt.branch == "infinite" and inf_pt.dim == 1.0
    _, cs = make_system(SKEW)
    assert spectrum_D(cs, math.inf).branch == "empty"


def test_spectrum_table(make_system):
    _, c = make_system(SKEW)
    tab = spectrum_table(c, points=31)
    alphas = [p.alpha for p in tab]
    assert alphas == sorted(alphas)
    assert alphas[0] == 1.0 and alphas[-1] == pytest.approx(c.alpha_max)
    assert any(abs(p.alpha - c.alpha0) < 1e-12 for p in tab)
    assert any(abs(p.alpha - c.alpha_hat) < 1e-12 for p in tab)
    dims = [p.dim for p in tab]
    peak = max(dims)
    assert peak == pytest.approx(c.s_hat, abs=1e-9)


def test_spectrum_table_degenerate(make_system):
    _, c = make_system("okamoto:0.5")
    tab = spectrum_table(c, points=11)
    assert len(tab) == 2
    assert tab[0].branch == "degenerate"
    assert tab[1].alpha == math.inf and tab[1].dim == 1.0
    finite_only = spectrum_table(c, points=11, include_infinite=False)
    assert len(finite_only) == 1
