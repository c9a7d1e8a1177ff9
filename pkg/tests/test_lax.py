from fractions import Fraction

import pytest

from starlax.diffalg import DiffPoly, equals_mod_total_derivative, u
from starlax.errors import InsufficientCoefficients
from starlax.lax import (
    LaxOperator,
    charge_rate,
    conserved_charge,
    dispersionless_limit,
    frac_power,
    generator,
    hamilton_velocity,
    lax_flow,
    moyal_to_sato,
    nth_root,
    sato_intertwining,
    sato_to_moyal,
)
from starlax.parsing import parse_diffpoly, parse_symbol
from starlax.symbols import MOYAL, PSDO_LEFT, PhaseSymbol, bracket, commutative_product, project, star, star_power

P = PhaseSymbol.p
k = DiffPoly.kappa()
half = Fraction(1, 2)
KDV = LaxOperator.kdv()

T3 = parse_diffpoly("3/2*u*u_x + k^2*u_xxx")
T5 = parse_diffpoly("15/8*u^2*u_x + 5/2*k^2*(u*u_xxx + 2*u_x*u_xx) + k^4*u^(5)")
T7 = parse_diffpoly(
    "35/16*u^3*u_x + 35/8*k^2*u^2*u_xxx + 35/2*k^2*u*u_x*u_xx + 35/8*k^2*u_x^3"
    " + 7/2*k^4*u*u^(5) + 21/2*k^4*u_x*u^(4) + 35/2*k^4*u_xx*u_xxx + k^6*u^(7)"
)


class TestOperators:
    def test_kdv(self):
        assert KDV.order == 2
        assert KDV.symbol == P(2) + PhaseSymbol.const(u())
        assert KDV.fields == {0: 0}

    def test_from_symbol(self):
        L = LaxOperator.from_symbol(parse_symbol("p^3 + u1*p + u2"))
        assert L.order == 3
        assert L.fields == {1: 1, 0: 2}

    def test_from_symbol_needs_monic(self):
        with pytest.raises(ValueError):
            LaxOperator.from_symbol(parse_symbol("2*p^2 + u"))

    def test_kp_tail(self):
        L = LaxOperator.kp(3)
        assert L.order == 1
        assert L.symbol.floor == -3
        assert L.fields == {-1: 0, -2: 1, -3: 2}


class TestRoots:
    def test_depth_one(self):
        assert nth_root(KDV, 1) == PhaseSymbol({1: 1, -1: u() * half}, -1)

    def test_depth_five(self):
        R = nth_root(KDV, 5)
        assert R[-2] == 0 and R[-4] == 0
        assert R[-3] == -(u() ** 2) / 8
        assert R[-5] == u() ** 3 / 16 + (k**2 / 8) * (u(1) ** 2 - 2 * u() * u(2))

    def test_a7_value(self):
        a7 = nth_root(KDV, 7)[-7]
        expected = parse_diffpoly(
            "-5/128*u^4 - 5/16*k^2*(u*u_x^2 - 2*u^2*u_xx) - 1/8*k^4*(u_xx^2 - 2*u_x*u_xxx + 2*u*u^(4))"
        )
        assert a7 == expected
        assert a7.derivative_balance() == {0}

    def test_exact_power_has_trivial_root(self):
        L = LaxOperator.from_symbol(P(3))
        assert nth_root(L, 2) == PhaseSymbol({1: 1}, -2)

    @pytest.mark.parametrize("depth", range(1, 10))
    def test_root_consistency_kdv(self, depth):
        R = nth_root(KDV, depth)
        assert star(R, R).agrees_with(KDV.symbol.truncate(1 - depth), 1 - depth)
        assert all(not R[-e] for e in range(2, depth + 1, 2))

    @pytest.mark.parametrize("depth", range(1, 6))
    def test_root_consistency_order_three(self, depth):
        L = LaxOperator.from_symbol(parse_symbol("u1*p + u2 + p^3", star_mode=True))
        R = nth_root(L, depth)
        cube = star_power(R, 3, MOYAL, 2 - depth)
        assert cube.agrees_with(L.symbol.truncate(2 - depth), 2 - depth)

    def test_psdo_root(self):
        R = nth_root(KDV, 4, PSDO_LEFT)
        sq = star(R, R, PSDO_LEFT)
        assert sq.agrees_with(KDV.symbol.truncate(-3), -3)


class TestFractionalPowers:
    def test_integer_power_is_exact(self):
        assert frac_power(KDV, 2) == KDV.symbol
        assert frac_power(KDV, 4) == star(KDV.symbol, KDV.symbol)

    def test_plus_part_of_three_halves(self):
        expected = parse_symbol("3/2*u*p + 3/2*k*u_x + p^3", star_mode=True)
        assert project(frac_power(KDV, 3), 0) == expected
        assert generator(KDV, 3) == P(3) + P() * (Fraction(3, 2) * u())

    def test_plus_part_of_five_halves(self):
        B = generator(KDV, 5)
        assert B.top() == 5
        assert B[3] == u() * Fraction(5, 2)


class TestFlows:
    def test_t1(self):
        assert lax_flow(KDV, 1)[0] == u(1)

    def test_t3(self):
        assert lax_flow(KDV, 3)[0] == T3

    def test_t5(self):
        assert lax_flow(KDV, 5)[0] == T5

    def test_t7(self):
        assert lax_flow(KDV, 7)[0] == T7

    @pytest.mark.parametrize("kk", [1, 3, 5, 7, 9])
    def test_weight_homogeneity(self, kk):
        rhs = lax_flow(KDV, kk)[0]
        assert rhs.weight() == {kk + 2}
        assert rhs.derivative_balance() == {1}

    @pytest.mark.parametrize("kk", [3, 5, 7])
    def test_time_reversal(self, kk):
        assert lax_flow(KDV, kk, sign="d16")[0] == -lax_flow(KDV, kk)[0]

    @pytest.mark.parametrize("kk", [3, 5, 7])
    def test_standard_ordered_product_at_doubled_kappa(self, kk):
        # p^2 + u has the same symbol in both orderings
        psdo = lax_flow(KDV, kk, kind=PSDO_LEFT)[0]
        assert psdo.scale_kappa(2) == lax_flow(KDV, kk)[0]

    def test_kappa_one_half(self):
        assert lax_flow(KDV, 3)[0].substitute_kappa(half) == parse_diffpoly("3/2*u*u_x + 1/4*u_xxx")

    def test_dispersionless(self):
        flow = dispersionless_limit(lax_flow(KDV, 3))
        assert flow[0] == Fraction(3, 2) * u() * u(1)
        assert dispersionless_limit(u()) == u()

    def test_normalize(self):
        assert lax_flow(KDV, 3, normalize=True)[0] == T3 / 3

    def test_flows_commute(self):
        t3, t5 = lax_flow(KDV, 3).rhs, lax_flow(KDV, 5).rhs
        assert t5[0].evolve(t3) == t3[0].evolve(t5)

    def test_rejects_trivial_flows(self):
        with pytest.raises(ValueError):
            lax_flow(KDV, 4)
        with pytest.raises(ValueError):
            lax_flow(KDV, 3, m=3)
        with pytest.raises(ValueError):
            lax_flow(KDV, 3, sign="up")

    def test_boussinesq(self):
        L = LaxOperator.boussinesq()
        flow = lax_flow(L, 2)
        assert set(flow.rhs) == {1, 2}
        # the u1 coefficient sits at p^1 = p^(n-2); nothing evolves at p^2
        t1 = lax_flow(L, 1)
        assert t1[1] == u(1, 1) and t1[2] == u(1, 2)

    def test_kp_first_flows(self):
        L = LaxOperator.kp(3)
        t2 = lax_flow(L, 2)
        assert t2[0] == 2 * u(1, 1)
        assert t2.untracked == (2,)
        assert lax_flow(L, 1)[0] == u(1)

    def test_render(self):
        flow = lax_flow(KDV, 3)
        assert flow.render() == "u_t3 = 3/2*u*u_x + k^2*u_xxx"
        assert flow.render(latex=True) == "u_{t_3} = \\frac{3}{2} u u_x + \\kappa^2 u_{xxx}"
        assert flow.to_json()["rhs"] == {"u": "3/2*u*u_x + k^2*u_xxx"}


class TestCharges:
    def test_first(self):
        assert conserved_charge(KDV, 1) == u() / 2

    def test_second_value(self):
        h = conserved_charge(KDV, 3)
        assert h == Fraction(3, 8) * u() ** 2 + half * k**2 * u(2)
        assert equals_mod_total_derivative(h, Fraction(3, 8) * u() ** 2)

    def test_third_value(self):
        h = conserved_charge(KDV, 5)
        expected = parse_diffpoly("5/16*u^3 + 5/4*k^2*u*u_xx + 5/8*k^2*u_x^2 + 1/2*k^4*u^(4)")
        assert h == expected

    @pytest.mark.parametrize("kk", [1, 3, 5, 7])
    @pytest.mark.parametrize("flow", [3, 5])
    def test_conservation(self, kk, flow):
        h = conserved_charge(KDV, kk)
        assert equals_mod_total_derivative(charge_rate(h, lax_flow(KDV, flow)), DiffPoly())

    def test_trivial_multiple(self):
        with pytest.raises(ValueError):
            conserved_charge(KDV, 2)


class TestSatoDictionary:
    def test_low_orders(self):
        v = [DiffPoly.var(f) for f in range(3)]
        u0, u1, u2 = sato_to_moyal(v)
        assert u0 == v[0]
        assert u1 == v[1] + half * v[0].diff()
        assert u2 == v[2] + v[1].diff() + v[0].diff(2) / 4

    def test_inverse(self):
        v = [DiffPoly.var(f) for f in range(4)]
        assert moyal_to_sato(sato_to_moyal(v)) == v
        assert moyal_to_sato(sato_to_moyal(v, kappa=None), kappa=None) == v

    def test_symbolic_kappa(self):
        v = [DiffPoly.var(f) for f in range(2)]
        assert sato_to_moyal(v, kappa=None)[1] == v[1] + k * v[0].diff()

    def test_short_list(self):
        with pytest.raises(InsufficientCoefficients):
            sato_to_moyal([u()], 2)

    @pytest.mark.parametrize("depth,kk", [(3, 2), (4, 2), (4, 3), (5, 3)])
    def test_flows_intertwine(self, depth, kk):
        residuals = sato_intertwining(depth, kk)
        assert residuals and not any(residuals.values())


class TestPhaseSpace:
    @pytest.mark.parametrize("H", [generator(KDV, 3), parse_symbol("(p^2 + x^2)/2"), parse_symbol("p^3 + x*u*p")])
    def test_hamilton_equations(self, H):
        xdot, pdot = hamilton_velocity(H)
        assert xdot == H.diff_p()
        assert pdot == -H.diff_x()

    def test_reversed_arguments_flip_sign(self):
        H = parse_symbol("(p^2 + x^2)/2")
        xdot, pdot = hamilton_velocity(H, "d16")
        assert xdot == -H.diff_p() and pdot == H.diff_x()

    def test_coordinate_brackets(self):
        x = parse_symbol("x")
        assert bracket(P(), x) == PhaseSymbol.const(1)
        assert bracket(x, P()) == PhaseSymbol.const(-1)


class TestDispersionlessProjection:
    def test_limit_of_projected_product(self):
        a = parse_symbol("p^2 + u + u1*p^-1 + u2*p^-2", floor=-2)
        b = parse_symbol("p + k*u_x*p^-1 + u*p^-2", floor=-2)
        lhs = dispersionless_limit(project(star(a, b), 0))
        assert lhs == project(commutative_product(a, b), 0).substitute_kappa(0)
