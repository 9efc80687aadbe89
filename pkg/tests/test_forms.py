import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from polyjet.forms import (GridConfig, HomogeneousPoly, SymmetricForm,
                           UnsupportedArityError, coefficient_row_max,
                           form_sup_norm, mixed_d2, polarization_ratio, polarize,
                           poly_sup_norm)
from polyjet.jets import ScalarSeries, basis

finite = st.floats(min_value=-2.0, max_value=2.0)
cnum = st.tuples(finite, finite).map(lambda t: complex(*t))


def point_strategy(n):
    return st.lists(cnum, min_size=n, max_size=n).map(np.array)


def random_quadratic(rng, n, components=1):
    size = basis(n).sizes[2]
    coeffs = rng.standard_normal((components, size)) + 1j * rng.standard_normal((components, size))
    return HomogeneousPoly(n, 2, coeffs)


class TestPolarize:
    def test_cross_term(self):
        # P = x1 x2, L((1,0),(0,1)) = 1/2 from expanding P(x + y) - P(x - y)
        p = HomogeneousPoly.from_coefficients(2, 2, {(0, (1, 1)): 1.0})
        val = polarize(p, [np.array([1.0, 0.0]), np.array([0.0, 1.0])])
        assert val[0] == pytest.approx(0.5, abs=1e-14)

    @given(point_strategy(2))
    def test_diagonal_restriction(self, x):
        p = HomogeneousPoly.from_coefficients(
            2, 3, {(0, (3, 0)): 1.5, (0, (2, 1)): -0.5j, (0, (0, 3)): 2.0})
        args = [x] * 3
        got = polarize(p, args)[0]
        assert abs(got - p.evaluate(x)[0]) < 1e-10 * max(1.0, np.abs(x).max() ** 3)

    @given(point_strategy(2), point_strategy(2))
    def test_argument_symmetry(self, x, y):
        p = HomogeneousPoly.from_coefficients(2, 2, {(0, (2, 0)): 1.0, (0, (1, 1)): 2.0})
        a = polarize(p, [x, y])[0]
        b = polarize(p, [y, x])[0]
        assert abs(a - b) < 1e-12 * max(1.0, abs(a))

    def test_arity_mismatch(self):
        p = HomogeneousPoly.from_coefficients(2, 2, {(0, (1, 1)): 1.0})
        with pytest.raises(ValueError, match="arity mismatch"):
            polarize(p, [np.array([1.0, 0.0])])

    def test_series_arguments_match_numeric(self):
        # polarizing with series arguments then evaluating agrees with
        # polarizing the evaluations
        rng = np.random.default_rng(2)
        p = random_quadratic(rng, 2, components=2)
        x = [ScalarSeries.variable(2, 0), ScalarSeries.variable(2, 1)]
        w_poly = random_quadratic(rng, 2, components=2)
        w = w_poly.as_series()
        series_val = polarize(p, [x, w])
        z = np.array([0.4 - 0.2j, 0.1 + 0.3j])
        direct = polarize(p, [z, w_poly.evaluate(z)])
        for c in range(2):
            assert abs(series_val[c].evaluate(z) - direct[c]) < 1e-12


class TestMixedD2:
    def test_equal_arguments(self):
        rng = np.random.default_rng(3)
        p = random_quadratic(rng, 3, components=3)
        z = np.array([0.2, 0.5j, -0.3 + 0.1j])
        assert np.allclose(mixed_d2(p, z, z), p.evaluate(z), atol=1e-14)

    def test_zero_second_argument(self):
        rng = np.random.default_rng(4)
        p = random_quadratic(rng, 2, components=2)
        z = np.array([0.7, -0.2j])
        assert np.allclose(mixed_d2(p, z, np.zeros(2)), 0.0, atol=1e-15)

    def test_structured_difference_of_squares(self):
        # P_j(z) = z_j sum_l a_jl z_l gives the half-sum mixed form
        rng = np.random.default_rng(5)
        n = 3
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        mapping = {}
        for j in range(n):
            for l in range(n):
                e = [0] * n
                e[j] += 1
                e[l] += 1
                key = (j, tuple(e))
                mapping[key] = mapping.get(key, 0) + a[j, l]
        p = HomogeneousPoly.from_coefficients(n, 2, mapping, components=n)
        z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        w = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        want = 0.5 * (z * (a @ w) + w * (a @ z))
        assert np.allclose(mixed_d2(p, z, w), want, atol=1e-12)

    @given(point_strategy(2), point_strategy(2))
    def test_matches_polarize(self, z, w):
        p = HomogeneousPoly.from_coefficients(
            2, 2, {(0, (2, 0)): 1.0 + 0.5j, (0, (1, 1)): -2.0, (1, (0, 2)): 3.0j},
            components=2)
        a = mixed_d2(p, z, w)
        b = polarize(p, [z, w])
        scale = max(1.0, np.abs(z).max() * np.abs(w).max())
        assert np.allclose(a, b, atol=1e-12 * scale)

    def test_requires_degree_two(self):
        p = HomogeneousPoly.from_coefficients(2, 3, {(0, (3, 0)): 1.0})
        with pytest.raises(ValueError, match="quadratic"):
            mixed_d2(p, np.ones(2), np.ones(2))


class TestPolySupNorm:
    def test_unimodular_monomial(self):
        p = HomogeneousPoly.from_coefficients(2, 3, {(0, (3, 0)): 1.0})
        assert poly_sup_norm(p).value == pytest.approx(1.0, abs=1e-12)

    def test_cross_monomial(self):
        p = HomogeneousPoly.from_coefficients(2, 2, {(0, (1, 1)): 1.0})
        assert poly_sup_norm(p).value == pytest.approx(1.0, abs=1e-12)

    def test_koebe_quadratic_block(self):
        p = HomogeneousPoly.from_coefficients(1, 2, {(0, (2,)): 2.0})
        assert poly_sup_norm(p).value == pytest.approx(2.0, abs=1e-12)

    def test_resolution_too_small(self):
        p = HomogeneousPoly.from_coefficients(2, 2, {(0, (1, 1)): 1.0})
        with pytest.raises(ValueError, match="resolution too small"):
            poly_sup_norm(p, GridConfig(resolution=4))

    def test_monotone_in_resolution(self):
        rng = np.random.default_rng(6)
        p = random_quadratic(rng, 2)
        prev = 0.0
        for res in (8, 16, 32, 64):
            est = poly_sup_norm(p, GridConfig(resolution=res))
            assert est.value + 1e-12 >= prev
            prev = est.value

    def test_value_attained_at_argmax(self):
        rng = np.random.default_rng(7)
        p = random_quadratic(rng, 3, components=2)
        est = poly_sup_norm(p)
        attained = float(np.max(np.abs(p.evaluate(np.array(est.argmax)))))
        assert attained == pytest.approx(est.value, abs=1e-12)
        assert np.allclose(np.abs(np.array(est.argmax)), 1.0, atol=1e-12)

    def test_triangle_upper_bound(self):
        # the sup norm never exceeds the sum of coefficient magnitudes
        rng = np.random.default_rng(8)
        for n in (1, 2, 3):
            p = random_quadratic(rng, n, components=n)
            cap = float(np.abs(p.coeffs).sum(axis=1).max())
            assert poly_sup_norm(p).value <= cap + 1e-9


class TestFormSupNorm:
    def test_square_monomial(self):
        p = HomogeneousPoly.from_coefficients(2, 2, {(0, (2, 0)): 1.0})
        assert form_sup_norm(SymmetricForm(p)).value == pytest.approx(1.0, abs=1e-10)

    def test_cross_monomial_matches_diagonal(self):
        p = HomogeneousPoly.from_coefficients(2, 2, {(0, (1, 1)): 1.0})
        assert form_sup_norm(SymmetricForm(p)).value == pytest.approx(1.0, abs=1e-10)

    def test_scaling(self):
        rng = np.random.default_rng(9)
        p = random_quadratic(rng, 2)
        a = form_sup_norm(SymmetricForm(p)).value
        b = form_sup_norm(SymmetricForm(p * 2.0)).value
        assert b == pytest.approx(2.0 * a, rel=1e-12)

    def test_arity_unsupported(self):
        p = HomogeneousPoly.from_coefficients(2, 3, {(0, (3, 0)): 1.0})
        with pytest.raises(UnsupportedArityError):
            form_sup_norm(SymmetricForm(p))

    def test_form_evaluation_symmetry(self):
        rng = np.random.default_rng(10)
        p = random_quadratic(rng, 3)
        form = SymmetricForm(p)
        x = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        y = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        assert np.allclose(form(x, y), form(y, x), atol=1e-12)

    def test_dominates_diagonal(self):
        rng = np.random.default_rng(11)
        for n in (2, 3):
            p = random_quadratic(rng, n)
            pe = poly_sup_norm(p)
            fe = form_sup_norm(SymmetricForm(p), extra_starts=(pe.phases,))
            assert fe.value >= pe.value - 1e-9


class TestPolarizationRatio:
    def test_two_variables_equality(self):
        rng = np.random.default_rng(12)
        for _ in range(25):
            ratio = polarization_ratio(random_quadratic(rng, 2))
            assert abs(ratio - 1.0) <= 1e-6

    def test_three_variables_bound(self):
        rng = np.random.default_rng(13)
        cap = 0.75 * math.sqrt(3.0) + 1e-6
        for _ in range(25):
            assert polarization_ratio(random_quadratic(rng, 3)) <= cap

    def test_diagonal_sum_of_squares(self):
        p = HomogeneousPoly.from_coefficients(
            3, 2, {(0, (2, 0, 0)): 1.0, (0, (0, 2, 0)): 1.0, (0, (0, 0, 2)): 1.0})
        assert polarization_ratio(p) == pytest.approx(1.0, abs=1e-6)

    def test_zero_polynomial(self):
        p = HomogeneousPoly(2, 2, np.zeros((1, basis(2).sizes[2])))
        with pytest.raises(ValueError, match="zero polynomial"):
            polarization_ratio(p)

    def test_requires_degree_two(self):
        p = HomogeneousPoly.from_coefficients(2, 3, {(0, (3, 0)): 1.0})
        with pytest.raises(ValueError, match="quadratics"):
            polarization_ratio(p)


class TestCoefficientRowMax:
    def test_identity(self):
        assert coefficient_row_max(np.eye(3)) == 1.0

    def test_constant_rows(self):
        alpha = 0.0
        rows = np.full((2, 2), 1.0 - alpha)
        assert coefficient_row_max(rows) == 2.0

    def test_extremal_rows(self):
        # quasi-convex extremal quadratic block: a_kk = 1 - alpha, zero off-diagonal
        alpha = 0.3
        rows = np.diag([1.0 - alpha] * 3)
        assert coefficient_row_max(rows) == pytest.approx(1.0 - alpha, abs=1e-15)

    def test_rejects_bad_shape(self):
        with pytest.raises(ValueError):
            coefficient_row_max(np.ones(3))


class TestStructuredRowBound:
    @pytest.mark.parametrize("p,q", [(1, 1), (2, 1), (1, 2), (3, 1), (2, 2), (1, 3)])
    def test_row_sum_is_the_sup(self, p, q):
        # components z_k^q (sum_l a_kl z_l^p): the torus sup equals the max
        # absolute row sum, attained at the phase choices z_l = exp(-i arg(a_kl)/p)
        rng = np.random.default_rng(100 * p + q)
        n = 3
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        m = p + q
        mapping = {}
        for k in range(n):
            for l in range(n):
                e = [0] * n
                e[k] += q
                e[l] += p
                key = (k, tuple(e))
                mapping[key] = mapping.get(key, 0) + a[k, l]
        poly = HomogeneousPoly.from_coefficients(n, m, mapping, components=n)
        row_max = coefficient_row_max(a)
        est = poly_sup_norm(poly)
        assert est.value <= row_max + 1e-12
        assert row_max <= est.value + 1e-6
        # the lemma's maximizing phases attain the winning row sum exactly
        k_star = int(np.argmax(np.abs(a).sum(axis=1)))
        z = np.exp(-1j * np.angle(a[k_star]) / p)
        attained = abs(poly.evaluate(z)[k_star])
        assert attained == pytest.approx(row_max, abs=1e-12)
