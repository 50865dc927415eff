"""Sector bases, dual polynomials, kernel identities, and the pole
projection, cross-checked against direct theta evaluation and contour
quadrature."""

from math import factorial

import numpy as np
import pytest

from dynell.exceptions import CapabilityError, SingularityError
from dynell.kernels import (
    dual_basis,
    duality_deviation,
    kernel_sum_residual,
    project_pole_part,
    sector_basis,
    zero_sector_basis,
)
from dynell.series import LaurentSeries, laurent_derive, laurent_mul, pairing, residue
from dynell.theta import get_theta

from conftest import draw_cell

LAM = 0.3 + 0.1j


class TestSectorBasis:
    def test_leading_coefficient(self, params):
        th = get_theta(params)
        basis = sector_basis(LAM, 6, params)
        for i, e in enumerate(basis):
            assert e.min_degree == -(i + 1)
            lead = th.value(LAM) * (-1.0) ** i * factorial(i)
            assert abs(e.coefficient(-(i + 1)) - lead) < 1e-12 * max(1, abs(lead))

    def test_single_term_pole_parts(self, params):
        # the full pole part of e_i is its leading term (simple pole of e_0)
        basis = sector_basis(LAM, 6, params)
        for i, e in enumerate(basis):
            for d in range(-i, 0):
                assert abs(e.coefficient(d)) < 1e-12

    def test_element_one_is_derivative_of_element_zero(self, params):
        basis = sector_basis(LAM, 4, params)
        d = laurent_derive(basis[0])
        for deg in range(d.min_degree, 4):
            assert abs(d.coefficient(deg) - basis[1].coefficient(deg)) < 1e-12

    def test_numeric_evaluation_oracle(self, params):
        th = get_theta(params)
        e0 = sector_basis(LAM, 4, params)[0]
        z = 0.04
        direct = th.value(LAM + z) / th.value(z)
        assert abs(e0.evaluate(z) - direct) < 1e-9

    def test_lattice_lambda_rejected(self, params):
        with pytest.raises(SingularityError):
            sector_basis(1e-9, 4, params)


class TestZeroSectorBasis:
    def test_leading_residue_one(self, params):
        e0 = zero_sector_basis(3, params)[0]
        assert abs(e0.coefficient(-1) - 1.0) < 1e-13

    def test_element_one_matches_minus_wp(self, params):
        # (theta'/theta)' = -wp; check the expansion against direct wp values
        th = get_theta(params)
        e1 = zero_sector_basis(10, params)[1]
        for s in (0.08, 0.05 + 0.06j):
            assert abs(e1.evaluate(s) + th.wp(s)) < 1e-8

    def test_pairing_with_constant(self, params):
        e0 = zero_sector_basis(2, params)[0]
        one = LaurentSeries(0, [1.0], order_valid=6)
        assert abs(pairing(one, e0) - 1.0) < 1e-13


class TestDualBasis:
    @pytest.mark.parametrize("lam", [LAM, None])
    def test_duality(self, params, lam):
        basis = dual_basis(lam, 8, params)
        assert duality_deviation(basis) < 1e-9

    def test_first_dual_pairs_to_one(self, params):
        basis = dual_basis(LAM, 4, params)
        poly = LaurentSeries(0, basis.dual[0])
        assert abs(pairing(poly, basis.primal[0]) - 1.0) < 1e-12

    def test_dual_constant_term(self, params):
        th = get_theta(params)
        basis = dual_basis(LAM, 4, params)
        assert abs(basis.dual[0][0] - 1.0 / th.value(LAM)) < 1e-12

    def test_dual_valuations(self, params):
        basis = dual_basis(LAM, 6, params)
        for i, c in enumerate(basis.dual):
            if i > 0:
                assert np.abs(c[:i]).max() < 1e-12
            assert abs(c[i]) > 0

    def test_duality_random_lambda(self, params, rng):
        for _ in range(10):
            lam = draw_cell(rng, params, margin=0.1)
            assert duality_deviation(dual_basis(lam, 12, params)) < 1e-9


class TestKernelSum:
    def test_w0_coefficient_lambda_sector(self, params):
        # the w^0 coefficient of both sides is theta(z+lam)/(theta(z)theta(lam))
        th = get_theta(params)
        z = 0.4 + 0.2j
        basis = dual_basis(LAM, 8, params)
        lhs = 0j
        for i in range(8):
            # e_i evaluated numerically at z
            deriv_val = _sector_derivative(th, LAM, z, i)
            lhs += deriv_val * basis.dual[i][0]
        rhs = th.value(z + LAM) / (th.value(z) * th.value(LAM))
        assert abs(lhs - rhs) < 1e-9

    def test_w0_coefficient_zero_sector(self, params):
        th = get_theta(params)
        z = 0.4 + 0.2j
        basis = dual_basis(None, 8, params)
        lhs = 0j
        for i in range(8):
            lhs += th.log_deriv_series(z, i)[i] * basis.dual[i][0]
        assert abs(lhs - th.log_deriv(z)) < 1e-9

    def test_residual_spec_point(self):
        from dynell.params import ModularParams

        p = ModularParams(tau=0.8j, gamma=0.05)
        assert kernel_sum_residual(0.3 + 0.1j, 0.4 + 0.2j, 12, p) < 1e-8
        assert kernel_sum_residual(None, 0.4 + 0.2j, 12, p) < 1e-8

    def test_residual_random(self, params, rng):
        for _ in range(10):
            z = draw_cell(rng, params, margin=0.1)
            lam = draw_cell(rng, params, margin=0.1, loci=lambda l: (l, z + l))
            assert kernel_sum_residual(lam, z, 12, params) < 1e-8


def _sector_derivative(th, lam, z, i):
    """i-th derivative of theta(lam+s)/theta(s) at s=z, via Taylor division."""
    fact = np.array([factorial(k) for k in range(i + 1)], dtype=np.complex128)
    num = th.derivs(lam + z, i) / fact
    den = th.derivs(z, i) / fact
    out = np.empty(i + 1, dtype=np.complex128)
    for j in range(i + 1):
        s = num[j]
        for k in range(j):
            s -= out[k] * den[j - k]
        out[j] = s / den[0]
    return out[i] * factorial(i)


class TestProjection:
    MU = 0.22 - 0.14j

    def test_regular_input_passthrough(self, params):
        eps = LaurentSeries(0, [1.0, 2.0, 3.0], order_valid=8)
        pi, rho = project_pole_part(eps, self.MU, 6, params)
        assert pi.is_zero
        assert rho.coefficient(1) == 2.0

    def test_simple_pole(self, params):
        th = get_theta(params)
        eps = LaurentSeries(-1, [1.0], order_valid=6)
        pi, rho = project_pole_part(eps, self.MU, 6, params)
        # pi = e_0 / theta(-mu), so its residue is exactly 1
        assert abs(residue(pi) - 1.0) < 1e-13
        assert rho.min_degree >= 0
        assert abs(pi.coefficient(0) - th.deriv(-self.MU, 1) / th.value(-self.MU)) < 1e-10

    def test_idempotent(self, params, rng):
        coeffs = rng.normal(size=9) + 1j * rng.normal(size=9)
        eps = LaurentSeries(-4, coeffs, order_valid=8)
        pi, rho = project_pole_part(eps, self.MU, 8, params)
        pi2, rho2 = project_pole_part(pi, self.MU, 8, params)
        assert rho2.is_zero or np.abs(rho2.coeffs).max() < 1e-9 * np.abs(pi.coeffs).max()
        diff = pi2 - pi
        assert diff.is_zero or np.abs(diff.coeffs).max() < 1e-9 * np.abs(pi.coeffs).max()

    def test_linear(self, params, rng):
        c1 = rng.normal(size=5) + 1j * rng.normal(size=5)
        c2 = rng.normal(size=5) + 1j * rng.normal(size=5)
        e1 = LaurentSeries(-3, c1, order_valid=8)
        e2 = LaurentSeries(-3, c2, order_valid=8)
        a = 0.7 - 0.4j
        pi_sum, _ = project_pole_part(e1.scale(a) + e2, self.MU, 8, params)
        p1, _ = project_pole_part(e1, self.MU, 8, params)
        p2, _ = project_pole_part(e2, self.MU, 8, params)
        comb = p1.scale(a) + p2
        lo = max(pi_sum.min_degree, comb.min_degree)
        hi = min(pi_sum.order_valid, comb.order_valid)
        scale = max(1.0, np.abs(comb.coeffs).max())
        for d in range(lo, hi + 1):
            assert abs(pi_sum.coefficient(d) - comb.coefficient(d)) < 1e-9 * scale

    def test_pole_order_capability(self, params):
        eps = LaurentSeries(-6, np.ones(8), order_valid=6)
        with pytest.raises(CapabilityError):
            project_pole_part(eps, self.MU, 6, params)


class TestQuadratureOracle:
    def test_residue_two_ways(self, params):
        """res_0(e_{i;lam} e_{j;-lam}) by series vs by contour quadrature."""
        n = 4
        bp = sector_basis(LAM, n, params)
        bm = sector_basis(-LAM, n, params)
        th = get_theta(params)
        radius = 0.3
        m_nodes = 256
        nodes = radius * np.exp(2j * np.pi * np.arange(m_nodes) / m_nodes)

        def e_num(lam, z, i):
            return _sector_derivative(th, lam, z, i)

        for i in range(n):
            for j in range(n):
                series_val = residue(laurent_mul(bp[i], bm[j]))
                vals = np.array(
                    [e_num(LAM, z, i) * e_num(-LAM, z, j) * z for z in nodes]
                )
                quad_val = vals.mean()  # (1/2pi i) oint f dz on |z| = r
                assert abs(series_val - quad_val) < 1e-8 * max(1.0, abs(series_val))
