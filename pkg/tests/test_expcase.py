"""Exponential nonlinearity: explicit profile, norms, unique shifted solution."""

import math

import numpy as np
import pytest

from blowup.expcase import (
    eval_U_lambda,
    eval_U_lambda_prime,
    exp_prime_norm,
    make_exp_problem_spec,
    make_exp_profile,
    solve_exp,
)
from blowup.oracles import exp_deriv_norm_x_quadrature

TWO_SQRT_2PI = 5.013256549262001


def test_profile_minimum():
    prof = make_exp_profile(math.pi ** 2 / 2.0)
    assert prof.mu_lambda == 0.0
    assert eval_U_lambda(prof, 0.0) == 0.0
    prof2 = make_exp_profile(1.0)
    assert prof2.mu_lambda == pytest.approx(math.log(math.pi ** 2 / 2.0), rel=1e-15)


def test_profile_half_point_identity():
    prof = make_exp_profile(0.7)
    # cos(pi/4) = 1/sqrt(2), so U(1/2) = mu + log 2
    assert eval_U_lambda(prof, 0.5) == pytest.approx(prof.mu_lambda + math.log(2.0), rel=1e-14)
    assert eval_U_lambda(prof, 0.5) == eval_U_lambda(prof, -0.5)


def test_profile_solves_ode():
    lam = 1.3
    prof = make_exp_profile(lam)
    h = 1e-4
    x = 0.3
    upp = (eval_U_lambda(prof, x - h) - 2.0 * eval_U_lambda(prof, x)
           + eval_U_lambda(prof, x + h)) / (h * h)
    assert upp == pytest.approx(lam * math.exp(eval_U_lambda(prof, x)), rel=1e-6)


def test_prime_formulas_agree():
    lam = 2.6
    prof = make_exp_profile(lam)
    assert eval_U_lambda_prime(prof, 0.0) == 0.0
    for x in np.linspace(0.04, 0.96, 20):
        time_map_form = math.sqrt(
            2.0 * lam * (math.exp(eval_U_lambda(prof, x)) - math.exp(prof.mu_lambda)))
        assert eval_U_lambda_prime(prof, x) == pytest.approx(time_map_form, rel=1e-10)
    # finite differences of U reproduce U'
    h = 1e-6
    for x in (0.2, 0.7):
        fd = (eval_U_lambda(prof, x + h) - eval_U_lambda(prof, x - h)) / (2.0 * h)
        assert eval_U_lambda_prime(prof, x) == pytest.approx(fd, rel=1e-7)
    assert eval_U_lambda_prime(prof, 0.4) == -eval_U_lambda_prime(prof, -0.4)


def test_profile_domain():
    prof = make_exp_profile(1.0)
    for bad in (1.0, -1.0, 2.0):
        with pytest.raises(ValueError):
            eval_U_lambda(prof, bad)
    with pytest.raises(ValueError):
        make_exp_profile(0.0)


def test_exp_prime_norm_half():
    assert exp_prime_norm(0.5) ** 0.5 == pytest.approx(TWO_SQRT_2PI, rel=1e-10)


def test_exp_prime_norm_diverges_toward_one():
    vals = [exp_prime_norm(1.0 - 10.0 ** (-k)) for k in range(1, 5)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    for bad in (0.0, 1.0, -0.2, 1.3):
        with pytest.raises(ValueError):
            exp_prime_norm(bad)


def test_exp_prime_norm_lambda_independent():
    # the derivative pi tan(pi x/2) carries no lambda; the x-space oracle
    # equals the closed form for every r, and solutions at different lambda
    # share identical derivative samples
    for r in (0.2, 0.5, 0.8):
        assert exp_prime_norm(r) == pytest.approx(exp_deriv_norm_x_quadrature(r), rel=1e-7)
    samples = [solve_exp(make_exp_problem_spec(0.5, 0.5, "1", "1", lam)).sample.derivs
               for lam in (0.1, 1.0, 10.0)]
    assert np.array_equal(samples[0], samples[1]) and np.array_equal(samples[1], samples[2])


def test_solve_exp_trivial_shift():
    sol = solve_exp(make_exp_problem_spec(0.4, 0.6, "1", "1", 1.0))
    assert sol.shift == 0.0
    prof = make_exp_profile(1.0)
    for x, u in zip(sol.sample.grid, sol.sample.values):
        assert u == pytest.approx(eval_U_lambda(prof, x), rel=1e-15)


def test_solve_exp_equal_coefficients_leave_profile_unshifted():
    # A = B with r1 = r2 evaluates both at the same norm: the nonlocal
    # factor cancels at the solution and u = U_lambda for every lambda
    for lam in (0.5, 2.0):
        sol = solve_exp(make_exp_problem_spec(0.3, 0.3, "1+t^2", "1+t^2", lam))
        assert sol.shift == 0.0


def test_solve_exp_generic_residual():
    lam = 2.0
    spec = make_exp_problem_spec(0.4, 0.6, "1+t", "2+t", lam)
    sol = solve_exp(spec)
    a_val = 1.0 + sol.deriv_norm_r1
    b_val = 2.0 + sol.deriv_norm_r2
    prof = make_exp_profile(lam)
    h = 1e-3
    for x in np.linspace(-0.9, 0.9, 31):
        u = [eval_U_lambda(prof, x + k * h) - sol.shift for k in (-2, -1, 0, 1, 2)]
        upp = (-u[0] + 16.0 * u[1] - 30.0 * u[2] + 16.0 * u[3] - u[4]) / (12.0 * h * h)
        rhs = lam * b_val * math.exp(u[2])
        assert abs(a_val * upp - rhs) / rhs <= 1e-7


def test_solve_exp_back_substitution():
    lam = 3.0
    spec = make_exp_problem_spec(0.4, 0.6, "1+t", "2+t", lam)
    sol = solve_exp(spec)
    prof = make_exp_profile(lam)
    prof1 = make_exp_profile(1.0)
    a_val = 1.0 + sol.deriv_norm_r1
    b_val = 2.0 + sol.deriv_norm_r2
    for x, u in zip(sol.sample.grid, sol.sample.values):
        # u + shift reproduces U_lambda
        assert u + sol.shift == pytest.approx(eval_U_lambda(prof, x), abs=1e-10)
        # u + log(lambda B / A) reproduces the lambda = 1 profile
        v = u + math.log(lam * b_val / a_val)
        assert v == pytest.approx(eval_U_lambda(prof1, x), abs=1e-10)


def test_mu_lambda_monotone_and_sign_change():
    lams = np.geomspace(0.1, 100.0, 12)
    mus = [make_exp_profile(lam).mu_lambda for lam in lams]
    assert all(b < a for a, b in zip(mus, mus[1:]))
    assert make_exp_profile(math.pi ** 2 / 2.0).mu_lambda == 0.0
    sol = solve_exp(make_exp_problem_spec(0.5, 0.5, "1", "1", 10.0))
    assert sol.sample.values.min() < 0.0 < sol.sample.values.max()


def test_exp_spec_validation():
    with pytest.raises(ValueError, match="'s'"):
        make_exp_problem_spec(0.5, 0.5, "1+s", "1", 1.0)
    with pytest.raises(ValueError, match="r1"):
        make_exp_problem_spec(1.0, 0.5, "1", "1", 1.0)
    with pytest.raises(ValueError, match="unbound"):
        make_exp_problem_spec(0.5, 0.5, "c*t", "1", 1.0)
    with pytest.raises(ValueError, match="nonpositive"):
        solve_exp(make_exp_problem_spec(0.5, 0.5, "t-1000", "1", 1.0))
    # coefficient failure carries the norm argument
    with pytest.raises(ValueError, match="t ="):
        solve_exp(make_exp_problem_spec(0.5, 0.5, "log(1-t)", "1", 1.0))
