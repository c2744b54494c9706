import math

import numpy as np
import pytest

from liouville_lab.errors import NoLargestZero, ParamMismatch, TailNotNegligible
from liouville_lab.legendre import gaunt_j, legendre, legendre_residual
from liouville_lab.shooting import ShootingParams, a_star, shoot
from liouville_lab.variational import (
    alpha_prime,
    alpha_prime_fd,
    compute_J,
    compute_K,
    diagnostics,
    largest_zero,
    largest_zero_velocity,
    largest_zero_velocity_fd,
    linearize,
    second_difference_alpha,
    solve_linearized,
)

TIGHT = dict(rel_tol=1e-12, abs_tol=1e-14)


@pytest.fixture(scope="module")
def lin4():
    return solve_linearized(ShootingParams(4.0, a_star(4.0)), **TIGHT)


@pytest.fixture(scope="module")
def lin10():
    return solve_linearized(ShootingParams(10.0, a_star(10.0)), **TIGHT)


class TestLinearize:
    def test_bounded_mode_at_first_exponent(self, lin4):
        _, lin = lin4
        assert lin.bounded
        assert len(lin.zeros) == 2  # frak_N(4) = 2

    def test_bounded_mode_at_second_exponent(self, lin10):
        _, lin = lin10
        assert lin.bounded
        assert len(lin.zeros) == 3  # frak_N(10) = 3

    def test_zeros_match_legendre_roots(self, lin4):
        # phi = P2((r^2-1)/(r^2+1)); roots of P2 at s = ±1/sqrt(3)
        _, lin = lin4
        s = 1.0 / math.sqrt(3.0)
        expected = [math.sqrt((1 - s) / (1 + s)), math.sqrt((1 + s) / (1 - s))]
        np.testing.assert_allclose(lin.zeros, expected, atol=1e-9)

    def test_matches_legendre_mode_pointwise(self, lin4, lin10):
        assert legendre_residual(2, lin4[1]) < 1e-8
        assert legendre_residual(3, lin10[1]) < 1e-8

    def test_taylor_start(self, lin4):
        # phi = 1 - (e^{2a}/2) r^2 + O(r^4)
        _, lin = lin4
        r = 1e-4
        e2a = math.exp(2 * a_star(4.0))
        assert abs(lin.phi(r) - (1 - e2a / 2 * r * r)) < 1e-12

    def test_linearize_from_profile(self):
        p = shoot(ShootingParams(3.0, 0.0), **TIGHT)
        lin = linearize(p, **TIGHT)
        assert lin.base is p
        assert not lin.bounded

    def test_param_mismatch_guard(self, lin4):
        with pytest.raises(ParamMismatch):
            legendre_residual(2, solve_linearized(ShootingParams(5.0, a_star(5.0)))[1])


class TestAlphaPrime:
    def test_negative_at_second_explicit(self):
        assert alpha_prime(ShootingParams(2.0, a_star(2.0)), **TIGHT) < 0

    def test_zero_at_bifurcation_exponents(self):
        for N in (4.0, 10.0):
            assert abs(alpha_prime(ShootingParams(N, a_star(N)), **TIGHT)) < 1e-6

    def test_nonzero_off_exponents(self):
        assert abs(alpha_prime(ShootingParams(5.0, a_star(5.0)), **TIGHT)) > 1e-3

    @pytest.mark.parametrize("N,a", [(5.0, a_star(5.0)), (2.0, 0.3), (8.0, -1.0)])
    def test_finite_difference_cross_check(self, N, a):
        ap = alpha_prime(ShootingParams(N, a), **TIGHT)
        fd = alpha_prime_fd(ShootingParams(N, a), h=1e-5, **TIGHT)
        assert abs(ap - fd) <= 1e-4 * max(abs(ap), 1e-3)


class TestJ:
    def test_exact_value_at_k2(self, lin4):
        assert abs(compute_J(*lin4) - 12.0 / 35.0) < 1e-6

    def test_zero_at_odd_k(self, lin10):
        assert abs(compute_J(*lin10)) < 1e-6

    def test_positive_at_even_k(self):
        pl = solve_linearized(ShootingParams(18.0, a_star(18.0)), **TIGHT)
        J = compute_J(*pl)
        assert J > 0
        assert abs(J - float(gaunt_j(4))) < 1e-6

    def test_tail_guard(self):
        # N=1 at large a decays too slowly for the cubic tail within t <= 40
        pl = solve_linearized(ShootingParams(1.0, 6.0))
        assert not pl[1].j_tail_ok
        with pytest.raises(TailNotNegligible):
            compute_J(*pl)

    def test_params_must_match(self, lin4, lin10):
        with pytest.raises(ParamMismatch):
            compute_J(lin4[0], lin10[1])


class TestK:
    def test_positive_at_even_exponent(self, lin4):
        sv = compute_K(*lin4, **TIGHT)
        assert sv.K_value > 0
        assert abs(sv.K_value - sv.K_flux) < 1e-8  # quadrature vs endpoint flux

    @pytest.mark.parametrize("N,a", [(4.0, a_star(4.0)), (1.0, 0.0), (6.0, 2.0)])
    def test_second_derivative_identity(self, N, a):
        pl = solve_linearized(ShootingParams(N, a), kind="uvar", **TIGHT)
        sv = compute_K(*pl, **TIGHT)
        fd = second_difference_alpha(ShootingParams(N, a))
        assert abs(2.0 * sv.K_value - fd) <= 1e-3 * max(abs(fd), 1e-6)

    def test_finite_at_monotone_regime(self):
        pl = solve_linearized(ShootingParams(1.0, 0.0), kind="uvar", **TIGHT)
        assert math.isfinite(compute_K(*pl, **TIGHT).K_value)


class TestZeroDynamics:
    def test_velocity_against_finite_difference(self):
        params = ShootingParams(6.0, a_star(6.0) + 0.5)
        v = largest_zero_velocity(params, **TIGHT)
        fd = largest_zero_velocity_fd(params, h=1e-3, **TIGHT)
        assert abs(v - fd) <= 0.05 * abs(fd)

    def test_sign_opposite_to_J(self):
        # dr/da * J < 0 when the truncated integral carries J's sign
        pl = solve_linearized(ShootingParams(6.0, a_star(6.0) + 0.5), **TIGHT)
        J = compute_J(*pl)
        v = largest_zero_velocity(ShootingParams(6.0, a_star(6.0) + 0.5), **TIGHT)
        assert v * J < 0

    def test_bounded_phi_rejected(self):
        with pytest.raises(NoLargestZero):
            largest_zero_velocity(ShootingParams(4.0, a_star(4.0)), **TIGHT)

    def test_largest_zero_continuity(self):
        r0 = largest_zero(ShootingParams(6.0, a_star(6.0) + 0.5))
        r1 = largest_zero(ShootingParams(6.0, a_star(6.0) + 0.5 + 1e-4))
        assert abs(r1 - r0) < 0.01


class TestInvariants:
    @pytest.mark.parametrize("N,a", [(1.0, -1.0), (3.0, 0.5), (8.0, 2.0), (15.0, 1.0)])
    def test_at_least_two_zeros(self, N, a):
        _, lin = solve_linearized(ShootingParams(N, a))
        assert len(lin.zeros) >= 2

    def test_zero_count_locally_constant(self):
        # away from critical points the count cannot change
        base = ShootingParams(4.0, a_star(4.0) + 1.0)
        n0 = len(solve_linearized(base)[1].zeros)
        for da in (-1e-3, 1e-3):
            n = len(solve_linearized(ShootingParams(4.0, base.a + da))[1].zeros)
            assert n == n0

    def test_bounded_iff_small_slope(self):
        for N, a in [(4.0, a_star(4.0)), (5.0, a_star(5.0)), (3.0, 1.0)]:
            _, lin = solve_linearized(ShootingParams(N, a), **TIGHT)
            assert lin.bounded == (abs(lin.alpha_prime) < 1e-6)

    def test_zero_count_near_exponent_transition(self):
        # on [N_k, N_k+1) the count at a*_N is k or k+1; record both sides
        counts = {}
        for N in (3.95, 4.05, 9.95, 10.05):
            _, lin = solve_linearized(ShootingParams(N, a_star(N)))
            counts[N] = len(lin.zeros)
        assert counts[3.95] in (2, 3) and counts[4.05] in (2, 3)
        assert counts[9.95] in (3, 4) and counts[10.05] in (3, 4)

    def test_intercept_matches_tail_fit(self):
        # w(t) ~ -alpha' t + b': check the reported intercept against the tail
        _, lin = solve_linearized(ShootingParams(5.0, a_star(5.0)), **TIGHT)
        t = math.log(lin.base.r_max) + 2.0
        w = lin.w(t)[0]
        assert abs(w - (-lin.alpha_prime * t + lin.intercept)) < 1e-4


def test_diagnostics_row():
    d = diagnostics(ShootingParams(4.0, a_star(4.0)), **TIGHT)
    assert abs(d.alpha - 6.0) < 1e-8
    assert abs(d.J_value - 12.0 / 35.0) < 1e-6
    assert d.K_value > 0
    assert d.zero_count == 2
    assert d.bounded


def test_diagnostics_csv(tmp_path):
    from liouville_lab.csvio import read_csv
    from liouville_lab.variational import write_diagnostics_csv

    rows = [diagnostics(ShootingParams(4.0, a_star(4.0)), **TIGHT)]
    path = tmp_path / "diag.csv"
    write_diagnostics_csv(path, rows)
    cols, data, _ = read_csv(path)
    assert cols == ["N", "a", "alpha", "alpha_prime", "J", "K", "zero_count", "bounded"]
    assert data[0][2] == pytest.approx(6.0, abs=1e-8)
    assert data[0][7] == 1.0
