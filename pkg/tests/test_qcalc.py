from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings

from helpers import rand_qlaurent, rand_qword, rand_qoperator, rand_qpoly_scalar, randoms
from starlax.errors import FloorTooDeep, InsufficientCoefficients, NotIntegrable
from starlax.qcalc import (
    QLaurent,
    QOperator,
    QWord,
    compose,
    discrete_kp_map,
    discrete_kp_matrix,
    leibniz_expansion,
    normal_form,
    q_apply,
    q_commutator,
)
from starlax.scalars import QScalar, q_binomial, q_number

q = QScalar.q
X = QLaurent.x
M = QOperator.mul
T = QOperator.shift
Dq = QOperator.dq


class TestAction:
    def test_q_derivative_of_cube(self):
        assert q_apply(Dq(), X(3)) == X(2, 1 + q() + q(2))

    def test_shift_fixes_constants(self):
        c = QLaurent.const(Fraction(7, 2))
        assert q_apply(T(), c) == c

    @pytest.mark.parametrize("m", range(0, 7))
    def test_exchange_rule(self, m):
        A = compose(Dq(), T()) - compose(T(), Dq()).scale(q())
        assert q_apply(A, X(m)) == 0
        word = QWord((("dq", 1), ("T", 1)))
        assert word.apply(X(m)) == (T() * Dq()).scale(q()).apply(X(m))

    def test_difference_quotient(self):
        f = X(2, 3) + X(-2)
        # (f(qx) - f(x)) / ((q - 1) x)
        expected = (f.shift(1) - f) * X(-1, 1 / (q() - 1))
        assert f.dq() == expected

    def test_inverse_derivative(self):
        assert X(2).dq(-1) == X(3, 1 / q_number(3))
        assert X(-3).dq(-1).dq() == X(-3)
        with pytest.raises(NotIntegrable):
            X(-1).dq(-1)

    def test_product_rule(self):
        f, g = X(2) + 1, X(3, q())
        assert (f * g).dq() == f.dq() * g + f.shift(1) * g.dq()


class TestNormalForm:
    def test_first_order(self):
        u = X(2) + X(-1, 3)
        assert normal_form(QWord((("dq", 1), ("f", u)))) == M(u.dq()) + M(u.shift(1)) * Dq()

    def test_second_order(self):
        u = X(3) + 2
        got = normal_form(QWord((("dq", 2), ("f", u))))
        expected = M(u.dq(2)) + M(u.dq().shift(1) * q_number(2)) * Dq() + M(u.shift(2)) * Dq(2)
        assert got == expected

    def test_trivial_word(self):
        u = X(1) - X(4)
        assert normal_form(QWord((("dq", 0), ("f", u)))) == M(u)

    def test_exchange(self):
        assert normal_form(QWord((("dq", 1), ("T", 1)))) == (T() * Dq()).scale(q())

    def test_idempotent(self):
        A = M(X(2)) * T() * Dq(2) + M(X(1))
        assert normal_form(A) == A
        assert normal_form(normal_form(A)) == A

    @settings(max_examples=200, deadline=None)
    @given(randoms)
    def test_faithful_on_monomials(self, rng):
        word = rand_qword(rng)
        A = normal_form(word)
        for m in range(0, 7):
            assert q_apply(A, X(m)) == q_apply(word, X(m))

    @settings(max_examples=50, deadline=None)
    @given(randoms)
    def test_composition_is_associative(self, rng):
        a, b, c = (rand_qoperator(rng, 1, 2, 2) for _ in range(3))
        assert (a * b) * c == a * (b * c)

    @settings(max_examples=50, deadline=None)
    @given(randoms)
    def test_composition_acts_as_composition(self, rng):
        a, b = rand_qoperator(rng), rand_qoperator(rng)
        for m in range(0, 5):
            assert (a * b).apply(X(m)) == a.apply(b.apply(X(m)))


class TestLeibniz:
    @pytest.mark.parametrize("n", range(0, 5))
    def test_positive_coefficients(self, n):
        exp = leibniz_expansion(n)
        assert [t.coeff for t in exp.terms] == [q_binomial(n, k) for k in range(n + 1)]

    def test_inverse_coefficients(self):
        exp = leibniz_expansion(-1, 4)
        for k, term in enumerate(exp.terms):
            assert term.coeff == q(-k * (k + 1) // 2) * (-1) ** k
            assert (term.shift, term.order, term.power) == (-k - 1, k, -k - 1)
        assert exp.floor == -5

    def test_render(self):
        assert leibniz_expansion(1).render() == "dq*u = T(u)*dq + (dq u)"
        assert leibniz_expansion(-1, 3).render() == (
            "dq^-1*u = T^-1(u)*dq^-1 - q^-1*T^-2(dq u)*dq^-2 + q^-3*T^-3(dq^2 u)*dq^-3"
            " - q^-6*T^-4(dq^3 u)*dq^-4 + O(dq^-5)"
        )
        assert leibniz_expansion(1).render(latex=True) == "\\partial_q u = \\tau(u) \\partial_q + (\\partial_q u)"

    def test_negative_power_needs_depth(self):
        with pytest.raises(FloorTooDeep):
            leibniz_expansion(-1)

    @pytest.mark.parametrize("n", range(0, 5))
    def test_matches_normal_form(self, n):
        u = X(3) + X(-2, q())
        assert leibniz_expansion(n).substitute(u) == normal_form(QWord((("dq", n), ("f", u))))

    @pytest.mark.parametrize("n", range(0, 6))
    def test_classical_limit(self, n):
        exp = leibniz_expansion(n)
        assert [t.coeff.at(1) for t in exp.terms] == [comb(n, k) for k in range(n + 1)]

    @pytest.mark.parametrize("m", range(0, 6))
    @pytest.mark.parametrize("depth", [2, 4])
    def test_inverse_undoes_derivative(self, m, depth):
        u = X(m, 2) + X(m + 1)
        inv = leibniz_expansion(-1, depth).substitute(u)
        assert inv.floor == -1 - depth
        assert inv.agrees_with(compose(Dq(-1), M(u), inv.floor), inv.floor)
        forward = normal_form(QWord((("dq", 1), ("f", u))))
        # dq^-1 (dq u) = u
        assert compose(Dq(-1), forward, inv.floor).agrees_with(M(u), inv.floor)


class TestCommutator:
    def test_self(self):
        a = M(X(2) + 1) * Dq()
        assert not q_commutator(a, a)

    def test_monomials(self):
        got = q_commutator(M(X(1)) * Dq(), M(X(2)) * Dq())
        assert got == M(X(2, q())) * Dq() + M(X(3, q(2) - q())) * Dq(2)
        assert got.render() == "(-q + q^2)*x^3*dq^2 + q*x^2*dq"

    @pytest.mark.parametrize("i", range(0, 4))
    @pytest.mark.parametrize("j", range(0, 4))
    def test_first_order_identity(self, i, j):
        a, b = X(i, 2), X(j) + X(j + 1, q())
        got = q_commutator(M(a) * Dq(), M(b) * Dq())
        expected = M(a * b.dq() - b * a.dq()) * Dq() + M(a * b.shift(1) - b * a.shift(1)) * Dq(2)
        assert got == expected

    @pytest.mark.parametrize("i", range(0, 4))
    @pytest.mark.parametrize("j", range(0, 4))
    def test_classical_limit(self, i, j):
        a, b = X(i), X(j, 3)
        got = q_commutator(M(a) * Dq(), M(b) * Dq()).at_q(1)
        classical = M((a * b.dq() - b * a.dq()).at_q(1)) * Dq()
        assert got == classical


class TestDiscreteKP:
    def test_top_of_triangle(self):
        b = [X(0), X(1), X(2)]
        assert discrete_kp_map(b, 2)[2] == b[2]

    def test_next_row(self):
        n = 3
        M_ = discrete_kp_matrix(n)
        expected = q_binomial(n, 1) / (-(q() - 1) * q(n - 1))
        assert M_[(n - 1, n)] == X(-1, expected)
        assert M_[(n - 1, n - 1)] == QLaurent.const(1)

    def test_triangular(self):
        M_ = discrete_kp_matrix(4)
        assert all(j >= i for i, j in M_)
        assert all(M_[(i, i)] == 1 for i in range(5))

    def test_ordinary_binomial_convention(self):
        M_ = discrete_kp_matrix(3, "ordinary")
        assert M_[(1, 3)] == X(-2, comb(3, 2) / ((q() - 1) ** 2 * q(2)))
        with pytest.raises(ValueError):
            discrete_kp_matrix(3, "gauss")

    def test_conventions_differ(self):
        assert discrete_kp_matrix(3, "q")[(1, 3)] != discrete_kp_matrix(3, "ordinary")[(1, 3)]

    def test_short_list(self):
        with pytest.raises(InsufficientCoefficients):
            discrete_kp_map([X(0)], 2)

    @settings(max_examples=100, deadline=None)
    @given(randoms)
    def test_linear(self, rng):
        n = rng.randint(0, 4)
        b1 = [rand_qlaurent(rng) for _ in range(n + 1)]
        b2 = [rand_qlaurent(rng) for _ in range(n + 1)]
        c = rand_qpoly_scalar(rng)
        mapped = discrete_kp_map([x + y * c for x, y in zip(b1, b2)], n)
        expected = [x + y * c for x, y in zip(discrete_kp_map(b1, n), discrete_kp_map(b2, n))]
        assert mapped == expected
