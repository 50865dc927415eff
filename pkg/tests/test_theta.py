"""Theta foundation: defining properties, derivatives, and the derived
elliptic quantities, checked against independent oracles."""

import cmath

import numpy as np
import pytest

from dynell.exceptions import CapabilityError, ParameterError, SingularityError
from dynell.params import ModularParams, ThetaConfig
from dynell.theta import ThetaFunction, get_theta

from conftest import draw_cell


def theta_product_form(z, tau, n_factors=40):
    """Independent oracle: the sine/product representation.

    theta(z) = sin(pi z)/pi * prod_n (1 - 2 q^{2n} cos(2 pi z) + q^{4n})
                                    / (1 - q^{2n})^2,  q = exp(i pi tau).
    """
    q = cmath.exp(1j * cmath.pi * tau)
    val = cmath.sin(cmath.pi * z) / cmath.pi
    for n in range(1, n_factors):
        q2n = q ** (2 * n)
        val *= (1 - 2 * q2n * cmath.cos(2 * cmath.pi * z) + q2n**2) / (1 - q2n) ** 2
    return val


class TestDefiningProperties:
    def test_zero_at_origin(self, params):
        assert abs(get_theta(params).value(0.0)) < 1e-14

    def test_derivative_one_at_origin(self, params):
        assert abs(get_theta(params).deriv(0.0, 1) - 1.0) < 1e-13

    def test_odd(self, params):
        th = get_theta(params)
        z = 0.23 + 0.11j
        assert abs(th.value(-z) + th.value(z)) < 1e-13

    def test_zeros_exactly_on_lattice(self, params, rng):
        th = get_theta(params)
        for m, n in [(1, 0), (0, 1), (-2, 3), (5, -1)]:
            assert abs(th.value(m + n * params.tau)) < 1e-12
        # and nowhere else in a sample of generic points
        for _ in range(50):
            z = draw_cell(rng, params, margin=0.05)
            assert abs(th.value(z)) > 1e-3

    @pytest.mark.parametrize("seed", range(4))
    def test_quasi_periodicity(self, params, seed):
        th = get_theta(params)
        rng = np.random.default_rng(seed)
        for _ in range(250):
            z = complex(rng.uniform(-2, 2), rng.uniform(-1, 1))
            v = th.value(z)
            scale = max(1.0, abs(v))
            assert abs(th.value(z + 1) + v) / scale < 1e-10
            mult = cmath.exp(-1j * cmath.pi * params.tau - 2j * cmath.pi * z)
            assert abs(th.value(z + params.tau) + mult * v) / scale < 1e-10

    def test_sum_vs_product_form(self):
        p = ModularParams(tau=0.5j, gamma=0.05)
        th = get_theta(p)
        for z in (0.25, 0.23 + 0.11j, -0.4 + 0.2j):
            assert abs(th.value(z) - theta_product_form(z, p.tau)) < 1e-12

    def test_uniqueness_normalization_other_tau(self):
        for tau in (0.6j, 0.3 + 0.8j, 1.1j):
            p = ModularParams(tau=tau, gamma=0.05)
            th = get_theta(p)
            z = 0.31 + 0.17j
            assert abs(th.value(z) - theta_product_form(z, tau)) < 1e-12


class TestDerivatives:
    def test_zeroth_derivative_is_value(self, params):
        th = get_theta(params)
        assert th.deriv(0.0, 0) == th.value(0.0)

    def test_second_derivative_vs_finite_difference(self):
        p = ModularParams(tau=0.6j, gamma=0.05)
        th = get_theta(p)
        z, h = 0.3, 1e-4
        fd = (th.value(z + h) - 2 * th.value(z) + th.value(z - h)) / h**2
        assert abs(th.deriv(z, 2) - fd) < 1e-8

    def test_high_order_vs_taylor_shift(self, params):
        # reproducing theta(a+h) from 12 derivatives is an evaluation oracle
        th = get_theta(params)
        a, h = 0.21 + 0.13j, 0.05
        d = th.derivs(a, 12)
        fact = 1.0
        acc = 0j
        for k in range(13):
            acc += d[k] * h**k / fact
            fact *= k + 1
        assert abs(acc - th.value(a + h)) < 1e-10

    def test_capability_error(self, params):
        th = ThetaFunction(params, ThetaConfig(deriv_max=4))
        with pytest.raises(CapabilityError):
            th.derivs(0.1, 5)

    def test_reduction_consistency_far_arguments(self, params):
        # derivatives after argument reduction follow the Leibniz path
        th = get_theta(params)
        z0 = 0.23 + 0.11j
        far = z0 + 3 - 2 * params.tau
        d0 = th.derivs(z0, 6)
        dfar = th.derivs(far, 6)
        # compare against direct finite differences of the far value
        h = 1e-5
        fd1 = (th.value(far + h) - th.value(far - h)) / (2 * h)
        assert abs(dfar[1] - fd1) / max(1, abs(fd1)) < 1e-8
        assert np.isfinite(dfar).all() and np.isfinite(d0).all()


class TestLogDerivAndWp:
    def test_log_deriv_odd(self, params):
        th = get_theta(params)
        z = 0.23 + 0.11j
        assert abs(th.log_deriv(-z) + th.log_deriv(z)) < 1e-12

    def test_log_deriv_periodic(self, params):
        th = get_theta(params)
        z = 0.23 + 0.11j
        assert abs(th.log_deriv(z + 1) - th.log_deriv(z)) < 1e-10

    @pytest.mark.parametrize("eps", [1e-2, 1e-3])
    def test_log_deriv_residue_one(self, params, eps):
        th = get_theta(params)
        assert abs(eps * th.log_deriv(eps) - 1.0) < 5 * eps

    def test_pole_guard(self, params):
        th = get_theta(params)
        with pytest.raises(SingularityError):
            th.log_deriv(1e-8)
        with pytest.raises(SingularityError):
            th.wp(1.0 + 1e-9)

    def test_wp_even(self, params):
        th = get_theta(params)
        z = 0.31 + 0.07j
        assert abs(th.wp(z) - th.wp(-z)) < 1e-10

    def test_wp_periodic(self):
        p = ModularParams(tau=0.9j, gamma=0.05)
        th = get_theta(p)
        z = 0.31 + 0.07j
        assert abs(th.wp(z + p.tau) - th.wp(z)) / max(1, abs(th.wp(z))) < 1e-10
        assert abs(th.wp(z + 1) - th.wp(z)) / max(1, abs(th.wp(z))) < 1e-10

    @pytest.mark.parametrize("eps", [1e-2, 1e-3])
    def test_wp_double_pole_normalization(self, params, eps):
        th = get_theta(params)
        assert abs(th.wp(eps) * eps**2 - 1.0) < 10 * eps

    def test_wp_factorization_constant_is_one(self, params, rng):
        # wp(lam) - wp(z) = theta(z+lam) theta(z-lam)/(theta(z)^2 theta(lam)^2)
        th = get_theta(params)
        for _ in range(20):
            z = draw_cell(rng, params, margin=0.08)
            lam = draw_cell(rng, params, margin=0.08,
                            loci=lambda l: (l, z + l, z - l))
            lhs = th.wp(lam) - th.wp(z)
            rhs = th.value(z + lam) * th.value(z - lam) / (
                th.value(z) ** 2 * th.value(lam) ** 2
            )
            assert abs(lhs - rhs) / max(1.0, abs(rhs)) < 1e-9


class TestWeierstrassIdentity:
    def test_three_term_identity(self, params, rng):
        th = get_theta(params)
        for _ in range(200):
            z, lam, g = (draw_cell(rng, params) for _ in range(3))
            t1 = th.value(lam) ** 2 * th.value(z + g) * th.value(z - g)
            t2 = th.value(z) ** 2 * th.value(lam + g) * th.value(lam - g)
            t3 = th.value(g) ** 2 * th.value(z + lam) * th.value(z - lam)
            assert abs(t1 - t2 - t3) / max(1.0, abs(t1), abs(t2), abs(t3)) < 1e-10


class TestTaylorAt:
    def test_origin_coefficients(self, params):
        s = get_theta(params).taylor_at(0.0, 2)
        assert s.coefficient(0) == 0
        assert abs(s.coefficient(1) - 1.0) < 1e-13
        assert abs(s.coefficient(2)) < 1e-13

    def test_evaluation_oracle(self, params):
        th = get_theta(params)
        a, h = 0.21 + 0.13j, 0.05
        s = th.taylor_at(a, 12)
        assert abs(s.evaluate(h) - th.value(a + h)) < 1e-10

    def test_cubic_coefficient_matches_third_derivative(self, params):
        th = get_theta(params)
        s = th.taylor_at(0.0, 3)
        assert abs(s.coefficient(3) - th.deriv(0.0, 3) / 6.0) < 1e-13


class TestParams:
    def test_invalid_tau(self):
        with pytest.raises(ParameterError):
            ModularParams(tau=0.5, gamma=0.05)
        with pytest.raises(ParameterError):
            ModularParams(tau=0.3 - 0.2j, gamma=0.05)

    def test_derived_constants(self, params):
        assert params.hbar == -params.gamma
        assert params.eta == params.gamma / 2
        assert abs(params.q_nome - cmath.exp(2j * cmath.pi * params.tau)) == 0

    def test_lattice_distance(self, params):
        assert params.lattice_distance(0.0) == 0.0
        assert abs(params.lattice_distance(2 + 3 * params.tau + 0.1) - 0.1) < 1e-12


class TestBackends:
    def test_backend_equivalence(self, params):
        pytest.importorskip("dynell._theta_core")
        from dynell import _theta_core as cy
        from dynell import _theta_fallback as py

        tau, n_terms = params.tau, 12
        ncy, npy = cy.theta_norm(tau, n_terms), py.theta_norm(tau, n_terms)
        assert abs(ncy - npy) < 1e-15
        rng = np.random.default_rng(0)
        zs = rng.uniform(-3, 3, 100) + 1j * rng.uniform(-2, 2, 100)
        for z in zs:
            a = cy.theta_eval(complex(z), tau, n_terms, ncy)
            b = py.theta_eval(complex(z), tau, n_terms, npy)
            assert abs(a - b) <= 1e-13 * max(1.0, abs(b))
        for z in zs[:20]:
            da = cy.theta_derivs(complex(z), 12, tau, n_terms, ncy)
            db = py.theta_derivs(complex(z), 12, tau, n_terms, npy)
            for x, y in zip(da, db):
                assert abs(x - y) <= 1e-13 * max(1.0, abs(y))
