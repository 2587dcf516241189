from fractions import Fraction
from math import comb

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from hermdeform.algebra import Alpha, SPoly, ZPoly
from hermdeform.deformation import (
    DeformParams,
    apply_ode_system,
    exp_deform,
    hermite,
    hermite_at_zero,
    m_at_zero,
    m_family,
    m_from_genfunc,
    m_next_in_n,
    m_next_in_s,
    m_organized_by_zero_values,
    m_poly,
    m_raise_s,
    ode_inhomogeneity,
    ode_residual,
    ode_system_matrix,
)

S = SPoly.s()
Z = ZPoly.z()
ALPHAS = [Alpha.PLUS, Alpha.MINUS]


def sympy_hermite(n: int) -> ZPoly:
    x = sympy.Symbol("x")
    coeffs = sympy.Poly(sympy.hermite(n, x), x).all_coeffs()
    return ZPoly.numeric([int(c) for c in reversed(coeffs)])


class TestHermite:
    def test_small_cases(self):
        assert hermite(0) == ZPoly.constant(1)
        assert hermite(2) == ZPoly.numeric([-2, 0, 4])
        assert hermite(4).leading() == SPoly.constant(16)

    @pytest.mark.parametrize("n", range(13))
    def test_matches_sympy(self, n):
        assert hermite(n) == sympy_hermite(n)

    @pytest.mark.parametrize("n", range(13))
    def test_value_at_zero(self, n):
        assert hermite(n).coeff(0) == SPoly.constant(hermite_at_zero(n))


class TestDeformParams:
    def test_symbolic_and_numeric(self):
        assert DeformParams(2, Alpha.PLUS).is_symbolic
        assert DeformParams(2, "-1", 3).s_value() == SPoly.constant(3)
        assert DeformParams(2, "-1", 3).alpha is Alpha.MINUS

    @pytest.mark.parametrize("kwargs", [
        {"n": -1, "alpha": 1},
        {"n": 1, "alpha": 1, "s": -2},
        {"n": 1, "alpha": 1, "s": True},
        {"n": 1, "alpha": 2},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            DeformParams(**kwargs)


class TestExpDeform:
    @pytest.mark.parametrize("alpha", ALPHAS)
    def test_constant_is_fixed(self, alpha):
        assert exp_deform(ZPoly.constant(1), S, alpha) == ZPoly.constant(1)

    @pytest.mark.parametrize("alpha", ALPHAS)
    def test_first_hermite(self, alpha):
        assert exp_deform(hermite(1), S, alpha) == Z * 2 + S * (2 * int(alpha))

    @pytest.mark.parametrize("alpha", ALPHAS)
    def test_inverse_direction(self, alpha):
        a = int(alpha)
        m2 = ZPoly((4 * S * (S + 1) - 2, 8 * a * S, SPoly.constant(4)))
        assert exp_deform(m2, -S, alpha) == hermite(2)

    @given(st.lists(st.integers(-5, 5), max_size=6), st.sampled_from(ALPHAS))
    def test_round_trip(self, coeffs, alpha):
        p = ZPoly.numeric(coeffs)
        assert exp_deform(exp_deform(p, S, alpha), -S, alpha) == p

    @pytest.mark.parametrize("alpha", ALPHAS)
    @pytest.mark.parametrize("n", range(9))
    def test_composition_adds_levels(self, n, alpha):
        h = hermite(n)
        for s in range(5):
            first = exp_deform(h, s, alpha)
            for t in range(5):
                assert exp_deform(first, t, alpha) == exp_deform(h, s + t, alpha)


class TestMFamily:
    @pytest.mark.parametrize("alpha", ALPHAS)
    def test_explicit_low_order(self, alpha):
        a = int(alpha)
        assert m_poly(DeformParams(0, alpha)) == ZPoly.constant(1)
        assert m_poly(DeformParams(1, alpha)) == Z * 2 + S * (2 * a)
        assert m_poly(DeformParams(2, alpha)) == (Z * Z + Z * (2 * a * S) + S * (S + 1) - Fraction(1, 2)).scale(4)
        expected3 = (
            Z * Z * Z
            + Z * Z * (3 * a * S)
            + Z * (3 * S * (S + 1) - Fraction(3, 2))
            + a * (S * (S + 1) * (S + 2) - Fraction(3, 2) * S)
        ).scale(8)
        assert m_poly(DeformParams(3, alpha)) == expected3

    @pytest.mark.parametrize("alpha", ALPHAS)
    @pytest.mark.parametrize("n", range(13))
    def test_structure(self, n, alpha):
        m = m_poly(DeformParams(n, alpha))
        assert m.degree == n
        assert m.leading() == SPoly.constant(2 ** n)
        assert max(c.degree for c in m.coeffs) <= n
        if n >= 1:
            assert m.coeff(n - 1) == S * (2 ** n * n * int(alpha))

    @pytest.mark.parametrize("alpha", ALPHAS)
    @pytest.mark.parametrize("n", range(1, 13))
    def test_derivative_lowers_index(self, n, alpha):
        m = m_family(n, alpha)
        assert m[n].derivative() == m[n - 1].scale(2 * n)

    @pytest.mark.parametrize("alpha", ALPHAS)
    @pytest.mark.parametrize("n", range(13))
    def test_routes_agree(self, n, alpha):
        params = DeformParams(n, alpha)
        m = m_poly(params)
        assert m == m_from_genfunc(params)
        assert m == m_organized_by_zero_values(n, alpha)
        assert m == exp_deform(hermite(n), S, alpha)

    @pytest.mark.parametrize("alpha", ALPHAS)
    @pytest.mark.parametrize("n", range(7))
    def test_numeric_mode_is_substitution(self, n, alpha):
        symbolic = m_poly(DeformParams(n, alpha))
        for s in range(4):
            assert m_poly(DeformParams(n, alpha, s)) == symbolic.substitute_s(s)
            assert m_from_genfunc(DeformParams(n, alpha, s)) == symbolic.substitute_s(s)

    def test_zero_s_gives_hermite(self):
        for n in range(8):
            assert m_poly(DeformParams(n, Alpha.MINUS, 0)) == hermite(n)

    @pytest.mark.parametrize("alpha", ALPHAS)
    @pytest.mark.parametrize("n", range(9))
    def test_value_at_zero(self, n, alpha):
        assert m_at_zero(n, alpha) == m_poly(DeformParams(n, alpha)).coeff(0)

    def test_value_at_zero_generating_function(self):
        # e^{-t^2}/(1-2t) の t^3 係数 6 に 3! を掛けたもの
        assert m_at_zero(3, Alpha.PLUS).evaluate(1) == 36

    @pytest.mark.parametrize("n", range(2, 10))
    def test_second_coefficient(self, n):
        expected = (1 - 2 * S - 2 * S * S) * (-(2 ** (n - 1)) * comb(n, 2))
        for alpha in ALPHAS:
            assert m_poly(DeformParams(n, alpha)).coeff(n - 2) == expected

    @pytest.mark.parametrize("alpha", ALPHAS)
    def test_parity(self, alpha):
        for n in range(8):
            m = m_poly(DeformParams(n, alpha))
            flipped = m_poly(DeformParams(n, Alpha(-int(alpha))))
            for p in range(n + 1):
                assert flipped.coeff(p) == m.coeff(p) * ((-1) ** (n - p))


class TestRecursions:
    @pytest.mark.parametrize("alpha", ALPHAS)
    @pytest.mark.parametrize("n", range(8))
    def test_next_in_s_symbolic(self, n, alpha):
        raised = m_next_in_s(m_family(n, alpha), alpha)
        assert raised == m_poly(DeformParams(n, alpha)).substitute_s(S + 1)

    @pytest.mark.parametrize("s", range(4))
    def test_next_in_s_numeric(self, s):
        for n in range(7):
            assert m_next_in_s(m_family(n, 1, s), 1) == m_poly(DeformParams(n, 1, s + 1))

    @pytest.mark.parametrize("alpha", ALPHAS)
    def test_raise_by_general_step(self, alpha):
        for n in range(7):
            assert m_raise_s(m_family(n, alpha, 1), 2, alpha) == m_poly(DeformParams(n, alpha, 3))
            assert m_raise_s(m_family(n, alpha, 0), S, alpha) == m_poly(DeformParams(n, alpha))
            assert m_raise_s(m_family(n, alpha, 2), 1, alpha) == m_next_in_s(m_family(n, alpha, 2), alpha)

    @pytest.mark.parametrize("alpha", ALPHAS)
    @pytest.mark.parametrize("n", range(8))
    def test_next_in_n(self, n, alpha):
        fam = m_family(n + 1, alpha)
        prev = fam[n - 1] if n >= 1 else fam[0]
        assert m_next_in_n(fam[n], prev, fam[: n + 1], n, S, alpha) == fam[n + 1]

    def test_next_in_n_numeric(self):
        fam = m_family(5, Alpha.MINUS, 2)
        assert m_next_in_n(fam[4], fam[3], fam[:5], 4, 2, Alpha.MINUS) == fam[5]

    def test_next_in_n_rejects_mismatch(self):
        fam = m_family(3, 1)
        with pytest.raises(ValueError):
            m_next_in_n(fam[2], fam[1], fam[:2], 2, S, 1)
        with pytest.raises(ValueError):
            m_next_in_n(fam[1], fam[0], fam[:3], 2, S, 1)

    def test_empty_family_rejected(self):
        with pytest.raises(ValueError):
            m_next_in_s([], 1)
        with pytest.raises(ValueError):
            m_next_in_s([ZPoly.constant(1), ZPoly.constant(2)], 1)


class TestOde:
    @pytest.mark.parametrize("alpha", ALPHAS)
    @pytest.mark.parametrize("n", range(11))
    def test_residual_vanishes(self, n, alpha):
        assert ode_residual(n, alpha).is_zero()

    @pytest.mark.parametrize("alpha", ALPHAS)
    @pytest.mark.parametrize("n", range(1, 9))
    def test_inhomogeneity_leading_terms(self, n, alpha):
        rhs = ode_inhomogeneity(n, alpha)
        a = int(alpha)
        assert rhs.degree == n - 1
        assert rhs.coeff(n - 1) == S * (2 ** (n + 1) * n * a)
        if n >= 2:
            assert rhs.coeff(n - 2) == S * (S + 1) * (2 ** (n + 1) * n * (n - 1))

    def test_inhomogeneity_vanishes_at_zero_index(self):
        assert ode_inhomogeneity(0, 1).is_zero()

    def test_system_entries(self):
        system = ode_system_matrix(3, Alpha.PLUS)
        assert system.size == 4
        assert system.matrix[1][0].coeff == S * -4
        assert system.matrix[3][1].coeff == S * -48
        for j in range(4):
            assert system.matrix[j][j].diag_shift == 2 * j
            for i in range(j + 1, 4):
                assert system.matrix[j][i].diag_shift is None
                assert system.matrix[j][i].coeff.is_zero()
        minus = ode_system_matrix(3, Alpha.MINUS)
        assert minus.matrix[1][0].coeff == S * 4

    @pytest.mark.parametrize("alpha", ALPHAS)
    @pytest.mark.parametrize("n", range(7))
    def test_system_annihilates_family(self, n, alpha):
        system = ode_system_matrix(n, alpha)
        assert all(r.is_zero() for r in apply_ode_system(system, m_family(n, alpha)))

    def test_system_size_mismatch(self):
        with pytest.raises(ValueError):
            apply_ode_system(ode_system_matrix(2, 1), m_family(1, 1))
