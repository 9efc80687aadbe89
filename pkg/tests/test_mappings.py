import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from polyjet.inequalities import random_normalized_jet
from polyjet.jets import VectorJet, extract_homogeneous
from polyjet.mappings import (ALMOST_STARLIKE, QUASI_CONVEX, MappingFamily,
                              MembershipConfig, OneVarFamily, SupportingFunctional,
                              g_quasi, g_star, jet_of, lemma23_residual,
                              lemma24_residual, membership_test, supporting_apply)

finite = st.floats(min_value=-3.0, max_value=3.0)
cnum = st.tuples(finite, finite).map(lambda t: complex(*t))


def coeffs_of(jet, p=0):
    comp = jet.components[p]
    n = jet.n
    return [comp.coefficient(tuple(m if i == p else 0 for i in range(n)))
            for m in range(1, 5)]


class TestCatalogJets:
    def test_quasi_convex_order_zero(self):
        # (1/(1-z)) - 1 = z + z^2 + z^3 + z^4
        jet = jet_of(MappingFamily.quasi_convex_extremal(0.0, 1))
        assert coeffs_of(jet) == [1.0, 1.0, 1.0, 1.0]

    def test_almost_starlike_order_zero_is_koebe(self):
        jet = jet_of(MappingFamily.almost_starlike_extremal(0.0, 1))
        assert coeffs_of(jet) == [1.0, 2.0, 3.0, 4.0]

    def test_almost_starlike_half_is_z_exp_z(self):
        jet = jet_of(MappingFamily.almost_starlike_extremal(0.5, 1))
        assert np.allclose(coeffs_of(jet), [1.0, 1.0, 0.5, 1.0 / 6.0], atol=1e-15)

    def test_quasi_convex_half_is_log_series(self):
        jet = jet_of(MappingFamily.quasi_convex_extremal(0.5, 1))
        assert np.allclose(coeffs_of(jet), [1.0, 0.5, 1.0 / 3.0, 0.25], atol=1e-15)

    @pytest.mark.parametrize("alpha", [k / 10 for k in range(10)])
    def test_quasi_convex_product_formula(self, alpha):
        jet = jet_of(MappingFamily.quasi_convex_extremal(alpha, 1))
        got = coeffs_of(jet)
        for m in (2, 3, 4):
            want = math.prod(k - 2 * alpha for k in range(2, m + 1)) / math.factorial(m)
            assert abs(got[m - 1] - want) < 1e-12

    @pytest.mark.parametrize("alpha", [0.0, 0.1, 0.25, 0.4, 0.5, 0.75, 0.9])
    def test_almost_starlike_closed_forms(self, alpha):
        jet = jet_of(MappingFamily.almost_starlike_extremal(alpha, 1))
        got = coeffs_of(jet)
        assert abs(got[1] - 2 * (1 - alpha)) < 1e-12
        assert abs(got[2] - (1 - alpha) * (3 - 4 * alpha)) < 1e-12
        assert abs(got[3] - (1 - alpha) * (3 - 4 * alpha) * (4 - 6 * alpha) / 3) < 1e-12

    def test_diagonal_jets_have_diagonal_blocks(self):
        jet = jet_of(MappingFamily.quasi_convex_extremal(0.3, 3))
        p2 = extract_homogeneous(jet, 2)
        for k in range(3):
            e = tuple(2 if i == k else 0 for i in range(3))
            assert abs(jet.components[k].coefficient(e) - 0.7) < 1e-15
        assert np.count_nonzero(p2.coeffs) == 3

    def test_diagonal_product_mixes_coordinates(self):
        fam = MappingFamily.diagonal_product(
            [OneVarFamily("almost_starlike", 0.0), OneVarFamily("identity")])
        jet = jet_of(fam)
        assert coeffs_of(jet, 0) == [1.0, 2.0, 3.0, 4.0]
        assert coeffs_of(jet, 1) == [1.0, 0.0, 0.0, 0.0]

    def test_alpha_validation(self):
        with pytest.raises(ValueError, match="alpha"):
            MappingFamily.quasi_convex_extremal(1.0, 2)

    def test_user_jet_must_be_normalized(self):
        jet = VectorJet.from_coefficients(1, {(0, (1,)): 2.0})
        with pytest.raises(ValueError, match="normalized"):
            MappingFamily.from_jet(jet)


class TestGOperators:
    def test_identity_fixed_points(self):
        ident = VectorJet.identity(3)
        assert g_quasi(ident) == ident
        assert g_star(ident) == ident

    def test_g_quasi_one_variable(self):
        # f = z/(1-z): g = z + 2z^2/(1-z) = z + 2z^2 + 2z^3 + 2z^4
        f = VectorJet.from_coefficients(
            1, {(0, (1,)): 1, (0, (2,)): 1, (0, (3,)): 1, (0, (4,)): 1}, normalized=True)
        g = g_quasi(f)
        assert coeffs_of(g) == [1.0, 2.0, 2.0, 2.0]

    def test_g_star_koebe(self):
        # f = z/(1-z)^2: g = z(1-z)/(1+z) = z - 2z^2 + 2z^3 - 2z^4
        f = jet_of(MappingFamily.almost_starlike_extremal(0.0, 1))
        g = g_star(f)
        assert coeffs_of(g) == [1.0, -2.0, 2.0, -2.0]

    def test_g_star_koebe_fourth_block_arithmetic(self):
        # -3*4 + 3*(3*2) + 4*(2*3) - 4*(2*2*2) = -2, the z^4 coefficient of g
        assert -3 * 4 + 3 * (3 * 2) + 4 * (2 * 3) - 4 * (2 * 2 * 2) == -2

    def test_quasi_quadratic_doubles(self):
        rng = np.random.default_rng(1)
        for n in (1, 2, 3):
            jet = random_normalized_jet(rng, n)
            g = g_quasi(jet)
            assert np.allclose(g.degree_block(2), 2.0 * jet.degree_block(2), atol=1e-13)

    def test_star_quadratic_negates(self):
        rng = np.random.default_rng(2)
        for n in (1, 2, 3):
            jet = random_normalized_jet(rng, n)
            g = g_star(jet)
            assert np.allclose(g.degree_block(2), -jet.degree_block(2), atol=1e-13)

    def test_needs_normalized_jet(self):
        jet = VectorJet.from_coefficients(1, {(0, (1,)): 2.0})
        with pytest.raises(ValueError, match="normalized"):
            g_quasi(jet)
        with pytest.raises(ValueError, match="normalized"):
            g_star(jet)


class TestDerivativeIdentities:
    def test_identity_map_residuals_vanish(self):
        ident = VectorJet.identity(2)
        assert lemma23_residual(ident) == (0.0, 0.0)
        assert lemma24_residual(ident) == (0.0, 0.0, 0.0)

    def test_catalog_family(self):
        jet = jet_of(MappingFamily.quasi_convex_extremal(0.3, 1))
        r2, r3 = lemma23_residual(jet)
        assert r2 < 1e-10 and r3 < 1e-10
        jet = jet_of(MappingFamily.almost_starlike_extremal(0.3, 2))
        assert max(lemma24_residual(jet)) < 1e-10

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_random_jets(self, n):
        rng = np.random.default_rng(40 + n)
        for _ in range(25):
            jet = random_normalized_jet(rng, n)
            assert max(lemma23_residual(jet)) < 1e-10
            assert max(lemma24_residual(jet)) < 1e-10


class TestSupportingFunctional:
    def test_defining_property(self):
        z = np.array([0.2 + 0.1j, -0.7j, 0.3])
        assert supporting_apply(z, z) == pytest.approx(np.abs(z).max(), abs=1e-15)

    def test_tie_breaks_to_lowest_index(self):
        z = np.array([0.5, -0.5j])
        t = SupportingFunctional.at(z)
        assert t.index == 0
        assert supporting_apply(z, np.array([1.0, 1.0])) == pytest.approx(1.0, abs=1e-15)

    @given(st.lists(cnum, min_size=3, max_size=3), st.lists(cnum, min_size=3, max_size=3))
    def test_norm_one(self, z, v):
        z, v = np.array(z), np.array(v)
        if not np.abs(z).max() > 0:
            return
        assert abs(supporting_apply(z, v)) <= np.abs(v).max() + 1e-12

    @given(st.lists(cnum, min_size=2, max_size=2), cnum)
    def test_phase_covariance(self, z, lam):
        z = np.array(z)
        if not np.abs(z).max() > 0 or abs(lam) < 1e-6:
            return
        v = np.array([1.0 + 0.5j, -0.25])
        lhs = supporting_apply(lam * z, v)
        rhs = (abs(lam) / lam) * supporting_apply(z, v)
        assert abs(lhs - rhs) < 1e-12

    def test_zero_point_rejected(self):
        with pytest.raises(ValueError, match="z = 0"):
            supporting_apply(np.zeros(2), np.ones(2))

    def test_homogeneous_in_argument(self):
        z = np.array([0.5, 0.1j])
        v = np.array([0.3, 0.9])
        assert supporting_apply(z, 3.0 * v) == pytest.approx(3.0 * supporting_apply(z, v))


class TestMembership:
    def test_identity_passes_everything(self):
        fam = MappingFamily.identity(2)
        for tag in (QUASI_CONVEX, ALMOST_STARLIKE):
            cert = membership_test(fam, tag, 0.9)
            assert cert.verdict == "pass"
            assert cert.min_real == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("alpha", [0.0, 0.25, 0.5, 0.75])
    def test_quasi_extremal_own_class(self, alpha):
        fam = MappingFamily.quasi_convex_extremal(alpha, 2)
        cert = membership_test(fam, QUASI_CONVEX, alpha)
        assert cert.verdict == "pass"
        assert cert.min_real >= alpha - 1e-9

    @pytest.mark.parametrize("alpha", [0.0, 0.25, 0.5, 0.75])
    def test_star_extremal_own_class(self, alpha):
        fam = MappingFamily.almost_starlike_extremal(alpha, 2)
        cert = membership_test(fam, ALMOST_STARLIKE, alpha)
        assert cert.verdict == "pass"
        assert cert.min_real >= alpha - 1e-9

    def test_star_extremal_fails_higher_order_with_witness(self):
        fam = MappingFamily.almost_starlike_extremal(0.25, 2)
        cert = membership_test(fam, ALMOST_STARLIKE, 0.30)
        assert cert.verdict == "fail"
        assert cert.min_real < 0.30 - 1e-9
        # the infimum is approached along the real positive axis near the boundary
        witness = np.array(cert.argmin)
        j = int(np.argmax(np.abs(witness)))
        assert abs(witness[j] - 0.99) < 1e-12

    def test_quasi_extremal_fails_higher_order(self):
        fam = MappingFamily.quasi_convex_extremal(0.4, 3)
        cert = membership_test(fam, QUASI_CONVEX, 0.45)
        assert cert.verdict == "fail"

    def test_truncated_jet_is_labeled(self):
        fam = MappingFamily.from_jet(VectorJet.identity(2))
        cert = membership_test(fam, QUASI_CONVEX, 0.5)
        assert cert.truncated
        assert cert.verdict == "pass"
        assert "truncation" in cert.note

    def test_truncated_koebe_inconclusive_near_boundary(self):
        # the degree-4 truncation of the Koebe g dips negative near |z| = 1,
        # which must not count as a definite failure
        koebe = jet_of(MappingFamily.almost_starlike_extremal(0.0, 1))
        fam = MappingFamily.from_jet(koebe)
        cert = membership_test(fam, ALMOST_STARLIKE, 0.0)
        assert cert.truncated
        assert cert.verdict == "inconclusive_near_boundary"

    def test_bad_class_tag(self):
        with pytest.raises(ValueError, match="class tag"):
            membership_test(MappingFamily.identity(1), "starlike", 0.0)

    def test_empty_plan(self):
        with pytest.raises(ValueError, match="empty sampling plan"):
            membership_test(MappingFamily.identity(1), QUASI_CONVEX, 0.0,
                            MembershipConfig(radii=()))

    def test_diagonal_product_membership(self):
        fam = MappingFamily.diagonal_product(
            [OneVarFamily("almost_starlike", 0.25), OneVarFamily("identity")])
        cert = membership_test(fam, ALMOST_STARLIKE, 0.25)
        assert cert.verdict == "pass"

    def test_cross_operator_closed_forms(self):
        # the quasi-convex extremal is also almost starlike of some order;
        # its g_star ratio is evaluated through the derivative closed form
        fam = MappingFamily.quasi_convex_extremal(0.5, 1)
        cert = membership_test(fam, ALMOST_STARLIKE, 0.0)
        assert cert.verdict == "pass"
