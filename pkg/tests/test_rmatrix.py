"""R-matrix constructors against independent transliterations of the
formulas, the gauge conjugation, and the semiclassical limit."""

import numpy as np
import pytest

from dynell.exceptions import SingularityError
from dynell.params import ModularParams
from dynell.rmatrix import (
    classical_r,
    gauge_conjugate,
    gauge_residual,
    phi_ratio,
    r_bar,
    r_minus,
    r_plus,
    rmatrix,
    rmatrix_gamma_jets,
    t_matrix,
    weight_sector_leakage,
)
from dynell.series import Jet, shift_jet
from dynell.theta import get_theta, theta_with_capability

from conftest import draw_cell


def reference_matrices(th, z, lam, g):
    """Independent re-implementation, written directly from the formulas."""
    t = th.value
    rm = np.zeros((4, 4), complex)
    rm[0, 0] = rm[3, 3] = 1
    rm[1, 1] = t(z) / t(z + g)
    rm[2, 2] = t(lam - g) * t(lam + g) / t(lam) ** 2 * t(z) / t(z + g)
    rm[1, 2] = t(z + lam) * t(g) / (t(z + g) * t(lam))
    rm[2, 1] = -t(z - lam) * t(g) / (t(z + g) * t(lam))
    rp = np.zeros((4, 4), complex)
    rp[0, 0] = rp[3, 3] = 1
    rp[1, 1] = t(z) / t(z - g) * t(lam - g) * t(lam + g) / t(lam) ** 2
    rp[2, 2] = t(z) / t(z - g)
    rp[1, 2] = -t(z + lam) * t(g) / (t(z - g) * t(lam))
    rp[2, 1] = t(z - lam) * t(g) / (t(z - g) * t(lam))
    rb = np.zeros((4, 4), complex)
    rb[0, 0] = rb[3, 3] = 1
    rb[1, 1] = t(lam + g) * t(z) / (t(lam) * t(z - g))
    rb[2, 2] = t(lam - g) * t(z) / (t(lam) * t(z - g))
    rb[1, 2] = -t(lam + z) * t(g) / (t(lam) * t(z - g))
    rb[2, 1] = -t(-lam + z) * t(g) / (t(-lam) * t(z - g))
    return rm, rp, rb


class TestConstructors:
    def test_against_independent_reimplementation(self):
        p = ModularParams(tau=0.75j, gamma=0.02)
        th = get_theta(p)
        z, lam = 0.31, 0.17 + 0.05j
        ref_m, ref_p, ref_b = reference_matrices(th, z, lam, p.gamma)
        assert np.abs(r_minus(z, lam, p).matrix - ref_m).max() < 1e-13
        assert np.abs(r_plus(z, lam, p).matrix - ref_p).max() < 1e-13
        assert np.abs(r_bar(z, lam, p).matrix - ref_b).max() < 1e-13

    def test_against_reimplementation_random(self, params, rng):
        th = get_theta(params)
        g = params.gamma
        for _ in range(20):
            z = draw_cell(rng, params, margin=0.05,
                          loci=lambda z: (z, z + g, z - g))
            lam = draw_cell(rng, params, margin=0.05)
            refs = reference_matrices(th, z, lam, g)
            for kind, ref in zip(("rminus", "rplus", "rbar"), refs):
                assert np.abs(rmatrix(kind, z, lam, params).matrix - ref).max() < 1e-12

    def test_corner_entry_is_one(self, params, rng):
        for _ in range(5):
            z = draw_cell(rng, params, margin=0.05)
            lam = draw_cell(rng, params, margin=0.05)
            m = r_minus(z, lam, params).matrix
            assert m[0, 0] == 1.0 and m[3, 3] == 1.0

    @pytest.mark.parametrize("kind", ["rminus", "rplus", "rbar"])
    def test_gamma_zero_identity(self, kind):
        p = ModularParams(tau=0.75j, gamma=0.0)
        m = rmatrix(kind, 0.23 + 0.11j, 0.31 + 0.21j, p).matrix
        assert np.abs(m - np.eye(4)).max() < 1e-13

    def test_singularity_names_factor(self, params):
        with pytest.raises(SingularityError) as e:
            r_minus(-params.gamma, 0.3, params)  # z + gamma on the lattice
        assert "theta(z+gamma)" in str(e.value)

    @pytest.mark.parametrize("kind", ["rminus", "rplus", "rbar"])
    def test_weight_conservation(self, params, rng, kind):
        for _ in range(10):
            z = draw_cell(rng, params, margin=0.05,
                          loci=lambda z: (z, z + params.gamma, z - params.gamma))
            lam = draw_cell(rng, params, margin=0.05)
            assert weight_sector_leakage(rmatrix(kind, z, lam, params)) < 1e-14


class TestUnitarity:
    def test_plus_inverts_minus(self, params, rng):
        g = params.gamma
        for _ in range(50):
            z = draw_cell(rng, params, margin=0.05,
                          loci=lambda z: (z, z + g, z - g))
            lam = draw_cell(rng, params, margin=0.05)
            prod = r_plus(z, lam, params).matrix @ r_minus(z, lam, params).matrix
            assert np.abs(prod - np.eye(4)).max() < 1e-10

    def test_explicit_entries_match_numeric_inverse(self, params, rng):
        g = params.gamma
        for _ in range(50):
            z = draw_cell(rng, params, margin=0.05,
                          loci=lambda z: (z, z + g, z - g))
            lam = draw_cell(rng, params, margin=0.05)
            inv = np.linalg.inv(r_minus(z, lam, params).matrix)
            assert np.abs(r_plus(z, lam, params).matrix - inv).max() < 1e-10


class TestTMatrix:
    def test_identity_at_zero(self):
        assert np.abs(t_matrix(0.0).matrix - np.eye(2)).max() == 0.0

    def test_inverse_pair(self):
        lam = 0.37 - 0.21j
        prod = t_matrix(lam).matrix @ t_matrix(-lam).matrix
        assert np.abs(prod - np.eye(2)).max() < 1e-15

    def test_unit_determinant(self):
        lam = 0.37 - 0.21j
        assert abs(np.linalg.det(t_matrix(lam).matrix) - 1.0) < 1e-14


class TestClassicalR:
    def test_cartan_coefficient(self):
        p = ModularParams(tau=0.8j, gamma=0.05)
        th = get_theta(p)
        m = classical_r(0.3, 0.2 + 0.1j, p).matrix
        assert abs(m[0, 0] - 0.5 * th.log_deriv(0.3)) < 1e-13

    def test_raising_lowering_coefficients(self, params):
        th = get_theta(params)
        z, lam = 0.23 + 0.11j, 0.31 + 0.21j
        m = classical_r(z, lam, params).matrix
        assert abs(m[1, 2] - th.value(z + lam) / (th.value(z) * th.value(lam))) < 1e-13
        assert abs(m[2, 1] - th.value(z - lam) / (th.value(z) * th.value(-lam))) < 1e-13

    def test_antisymmetry_both_negated(self, params, rng):
        for _ in range(20):
            z = draw_cell(rng, params, margin=0.05)
            lam = draw_cell(rng, params, margin=0.05)
            a = classical_r(z, lam, params).matrix
            b = classical_r(-z, -lam, params).matrix
            assert np.abs(a + b).max() / max(1.0, np.abs(a).max()) < 1e-10

    def test_antisymmetry_factor_swap(self, params, rng):
        swap = np.zeros((4, 4))
        swap[0, 0] = swap[3, 3] = swap[1, 2] = swap[2, 1] = 1.0
        for _ in range(20):
            z = draw_cell(rng, params, margin=0.05)
            lam = draw_cell(rng, params, margin=0.05)
            a = classical_r(z, lam, params).matrix
            b = swap @ classical_r(-z, lam, params).matrix @ swap
            assert np.abs(a + b).max() / max(1.0, np.abs(a).max()) < 1e-10


class TestPhiRatio:
    def test_equal_arguments_give_one(self, params):
        j = phi_ratio(0.7, 0.7, 0.31 + 0.21j, 6, params)
        assert j.coeffs[0] == 1.0 and np.abs(j.coeffs[1:]).max() == 0.0

    def test_functional_equation_pair(self, params):
        # phi(lam+gamma)/phi(lam-gamma) equals theta(lam)/theta(lam-gamma)
        lam = 0.31 + 0.21j
        order = 8
        got = phi_ratio(-1.0, 1.0, lam, order, params)
        th = theta_with_capability(params, order + 1)
        expect = Jet.constant("gamma", th.value(lam), order) / shift_jet(
            th.derivs(lam, order), -1.0, order, param="gamma"
        )
        assert np.abs(got.coeffs - expect.coeffs).max() < 1e-10

    def test_generic_ratio_vs_bruteforce_jets(self, params):
        # oracle: exp of the difference of the shift-log series, assembled
        # independently from the same log-derivative data
        from math import factorial

        from dynell.series import half_tanh_coeffs

        lam, order, u, up = 0.31 + 0.21j, 8, 0.4 - 0.2j, -1.3 + 0.7j
        th = theta_with_capability(params, order + 1)
        B = th.log_deriv_series(lam, order - 1)
        t = half_tanh_coeffs((order + 1) // 2)
        s, sp = -u, -up
        log_acc = np.zeros(order + 1, dtype=np.complex128)
        for k in range(1, order + 1):
            pref = (s**k - sp**k) / factorial(k)
            log_acc[k] += pref * 0.5 * B[k - 1]
            for j in range(1, len(t) + 1):
                pw = k + 2 * j - 1
                idx = 2 * j + k - 2
                if pw <= order and idx < len(B):
                    log_acc[pw] += pref * (-t[j - 1]) * B[idx]
        expect = Jet("gamma", log_acc).exp()
        got = phi_ratio(u, up, lam, order, params)
        scale = np.maximum(1.0, np.abs(expect.coeffs))
        assert (np.abs(got.coeffs - expect.coeffs) / scale).max() < 1e-12


class TestGauge:
    def test_order_zero_is_identity_map(self, params):
        conj = gauge_conjugate(0.23 + 0.11j, 0.31 + 0.21j, 4, params)
        zeroth = np.array([[conj[r, c].coeffs[0] for c in range(4)] for r in range(4)])
        assert np.abs(zeroth - np.eye(4)).max() < 1e-13

    def test_diagonal_entry_reduction(self, params):
        # the (v1 v-1, v1 v-1) entry of the conjugated plus family equals the
        # rbar entry theta(lam+gamma) theta(z)/(theta(lam) theta(z-gamma))
        z, lam, order = 0.23 + 0.11j, 0.31 + 0.21j, 6
        conj = gauge_conjugate(z, lam, order, params)
        rb = rmatrix_gamma_jets("rbar", z, lam, order, params)
        assert np.abs(conj[1, 1].coeffs - rb[1, 1].coeffs).max() < 1e-10

    def test_full_matrix_residual(self, params, rng):
        for _ in range(10):
            z = draw_cell(rng, params, margin=0.1)
            lam = draw_cell(rng, params, margin=0.1)
            assert gauge_residual(z, lam, 6, params) < 1e-8


class TestSemiclassical:
    def test_limit_matches_classical_r(self, params, rng):
        from dynell.dybe import semiclassical_residual

        for _ in range(10):
            z = draw_cell(rng, params, margin=0.15,
                          loci=lambda z: (z,))
            lam = draw_cell(rng, params, margin=0.15,
                            loci=lambda l: (l, z + l, z - l))
            offid, coeff = semiclassical_residual(z, lam, params)
            assert offid < 1e-6
            # the identity-proportional part matches -(theta'/theta)(z)/2
            th = get_theta(params)
            assert abs(coeff + 0.5 * th.log_deriv(z)) < 1e-4
