"""Closed-form norms against the quadrature oracles and the exponent bounds."""

import numpy as np
import pytest

from blowup.norms import ExponentError, make_norm_table, norm_U, norm_U_prime, validate_exponents
from blowup.oracles import (
    deriv_norm_quadrature,
    deriv_norm_x_quadrature,
    norm_quadrature,
    norm_x_quadrature,
)
from blowup.timemap import eval_U, make_profile, symmetric_grid


def test_validate_exponents():
    assert validate_exponents(3.0, 0.99, 0.5, 0.49, 0.3) == []
    bad_q = validate_exponents(3.0, 1.0, 0.5, 0.3, 0.3)
    assert len(bad_q) == 1 and "q1" in bad_q[0] and "(p-1)/2" in bad_q[0]
    bad_r = validate_exponents(3.0, 0.5, 0.5, 0.5, 0.3)
    assert len(bad_r) == 1 and "r1" in bad_r[0] and "(p-1)/(p+1)" in bad_r[0]
    assert len(validate_exponents(3.0, -1.0, 2.0, 0.6, 0.0)) == 4
    with pytest.raises(ValueError):
        validate_exponents(1.0, 0.1, 0.1, 0.1, 0.1)


def test_norm_U_against_oracle(profile3):
    closed = norm_U(3.0, 0.5, profile3.mu_p)
    assert closed == pytest.approx(norm_quadrature(3.0, 0.5, profile3.mu_p), rel=1e-8)


def test_norm_U_oracle_mesh_consistency(profile3):
    # the oracle itself is mesh-converged: two meshes agree and match closed form
    a = norm_quadrature(3.0, 0.5, profile3.mu_p, n=1 << 17)
    b = norm_quadrature(3.0, 0.5, profile3.mu_p, n=1 << 18)
    assert a == pytest.approx(b, rel=1e-9)
    assert norm_U(3.0, 0.5, profile3.mu_p) == pytest.approx(b, rel=1e-8)


def test_norm_U_diverges_at_bound(profile3):
    bound = 1.0
    vals = [norm_U(3.0, bound * (1.0 - 10.0 ** (-k)), profile3.mu_p) for k in range(1, 5)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_norm_U_prime_against_oracles(profile3, profile2):
    closed = norm_U_prime(3.0, 1.0 / 3.0, profile3.mu_p)
    # x-space oracle runs the whole pointwise pipeline
    assert closed == pytest.approx(deriv_norm_x_quadrature(profile3, 1.0 / 3.0), rel=1e-7)
    # t-space oracle is the proof's change of variables, computed directly
    closed2 = norm_U_prime(2.0, 0.2, profile2.mu_p)
    assert closed2 == pytest.approx(deriv_norm_quadrature(2.0, 0.2, profile2.mu_p), rel=1e-8)


def test_norm_U_prime_diverges_at_bound(profile3):
    bound = 0.5
    vals = [norm_U_prime(3.0, bound * (1.0 - 10.0 ** (-k)), profile3.mu_p) for k in range(1, 5)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_make_norm_table_equal_exponents():
    table = make_norm_table(3.0, 0.5, 0.5, 1.0 / 3.0, 1.0 / 3.0)
    assert table.n_q1 == table.n_q2
    assert table.m_r1 == table.m_r2
    assert all(v > 0 for v in (table.n_q1, table.m_r1, table.mu_p, table.L_p))


def test_make_norm_table_rejects_and_reports():
    with pytest.raises(ExponentError) as err:
        make_norm_table(3.0, 0.5, 1.2, 0.3, 0.55)
    assert len(err.value.violations) == 2
    assert any("q2" in v for v in err.value.violations)
    assert any("r2" in v for v in err.value.violations)


def test_closed_vs_oracle_grid():
    # smaller sibling of the acceptance 5x5 sweep
    for p in (2.0, 5.0):
        mu = make_profile(p).mu_p
        for frac in (0.25, 0.6, 0.85):
            q = frac * (p - 1.0) / 2.0
            r = frac * (p - 1.0) / (p + 1.0)
            assert norm_U(p, q, mu) == pytest.approx(norm_quadrature(p, q, mu), rel=1e-7)
            assert norm_U_prime(p, r, mu) == pytest.approx(
                deriv_norm_quadrature(p, r, mu), rel=1e-7)


def test_norm_homogeneity_through_sampler(profile3):
    # ||c u||_q = c ||u||_q for the numeric norm functional on sampled values
    grid = symmetric_grid(201, 1e-3)
    vals = np.array([eval_U(profile3, x) for x in grid])
    q, c = 0.5, 3.7
    h = grid[1] - grid[0]

    def num_norm(v):
        f = np.abs(v) ** q
        return (h * (0.5 * (f[0] + f[-1]) + f[1:-1].sum())) ** (1.0 / q)

    assert num_norm(c * vals) == pytest.approx(c * num_norm(vals), rel=1e-10)


def test_norm_x_quadrature_matches_closed(profile3):
    closed = norm_U(3.0, 0.5, profile3.mu_p)
    assert norm_x_quadrature(profile3, 0.5) == pytest.approx(closed, rel=1e-8)
