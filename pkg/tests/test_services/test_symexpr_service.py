"""Tests for the expression language: parsing, calculus, evaluation, rendering."""
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from models.expression import Neg, ParseContext, Pow, Sym, add, exp, mul, neg, num, power
from services.symexpr_service import (
    bind_params, denominators, differentiate, evaluate, evaluate_array, evaluate_exact,
    finite_difference, free_names, from_sympy, numerically_equal, parse, relative_residual, render,
    sample_points, simplify, substitute, to_sympy,
)
from utils.validators import ParseError, UndeclaredNameError

XY = ParseContext(coords=("x", "y"))
XYB = ParseContext(coords=("x", "y"), params=("b",))


class TestParse:
    def test_unary_minus_binds_looser_than_power(self):
        assert evaluate(parse("-x^2", XY), {"x": 3.0}) == pytest.approx(-9.0)

    def test_negated_power_tree(self):
        assert parse("-x^2", XY) == Neg(Pow(Sym("x"), 2))
        assert parse("(-x)^2", XY) == Pow(Sym("x"), 2)
        assert evaluate(parse("y - -x^2", XY), {"x": 3.0, "y": 1.0}) == pytest.approx(10.0)
        assert evaluate(parse("2*-x^2", XY), {"x": 3.0}) == pytest.approx(-18.0)

    def test_precedence_of_products_and_sums(self):
        assert evaluate(parse("1 + 2*x*y - y", XY), {"x": 2.0, "y": 3.0}) == pytest.approx(10.0)

    def test_functions(self):
        e = parse("exp(x) + sinh(y) - cosh(y)", XY)
        assert evaluate(e, {"x": 0.0, "y": 0.7}) == pytest.approx(1.0 - np.exp(-0.7))

    def test_signed_integer_exponent(self):
        assert evaluate_exact(parse("b^-2", XYB), {"b": Fraction(2)}) == Fraction(1, 4)

    def test_parameter_denominator(self):
        assert evaluate_exact(parse("1/(b+2)", XYB), {"b": Fraction(3)}) == Fraction(1, 5)

    def test_undeclared_name(self):
        with pytest.raises(UndeclaredNameError):
            parse("x + z", XY)

    def test_dangling_operator(self):
        with pytest.raises(ParseError):
            parse("x +", XY)

    def test_empty(self):
        with pytest.raises(ParseError):
            parse("", XY)

    def test_zero_literal_denominator(self):
        with pytest.raises(ParseError):
            parse("x/0", XY)

    def test_coordinate_denominator_rejected(self):
        with pytest.raises(ParseError):
            parse("1/x", XY)

    def test_integer_names_act_as_exponents(self):
        ctx = XY.with_integer("n", 3)
        assert evaluate(parse("2*(x+1)^n", ctx), {"x": 1.0}) == pytest.approx(16.0)


class TestDifferentiate:
    def test_polynomial(self):
        d = differentiate(parse("x^3 + x*y", XY), "x")
        assert evaluate(d, {"x": 2.0, "y": 5.0}) == pytest.approx(17.0)

    def test_chain_rule(self):
        e = parse("exp(-b*x)*y", XYB)
        d = differentiate(e, "x")
        expected = parse("-b*exp(-b*x)*y", XYB)
        assert numerically_equal(d, expected, ["x", "y"], params={"b": Fraction(3, 2)})

    def test_constant_in_other_variable(self):
        assert evaluate(differentiate(parse("sinh(y)", XY), "x"), {"x": 1.0, "y": 1.0}) == 0.0

    def test_matches_finite_difference(self):
        e = parse("sin(x)*exp(y) + x^2*cosh(y)", XY)
        env = sample_points(["x", "y"], 50, seed=7)
        analytic = evaluate_array(differentiate(e, "y"), env)
        numeric = finite_difference(e, "y", env, step=1e-6)
        assert np.max(np.abs(analytic - numeric)) < 1e-5


class TestStructure:
    def test_free_names(self):
        assert free_names(parse("b*x + exp(y)", XYB)) == {"b", "x", "y"}

    def test_denominators(self):
        found = denominators(parse("x/(b+2) + y/b", XYB))
        assert len(found) == 2

    def test_substitute_and_bind(self):
        e = substitute(parse("x + b", XYB), "x", Sym("y"))
        assert free_names(e) == {"y", "b"}
        assert free_names(bind_params(e, {"b": Fraction(1)})) == {"y"}

    def test_simplify_folds_constants(self):
        e = simplify(add(num(2), num(3), mul(num(0), Sym("x"))))
        assert render(e) == "5"

    def test_exact_evaluation_of_exp_at_zero(self):
        assert evaluate_exact(exp(num(0)), {}) == 1


class TestRender:
    @pytest.mark.parametrize("src", [
        "-x^2 + y",
        "(x - y)*(x + y)",
        "-(1 + b*x + exp(-b*x))/b",
        "2*(y + 1)^3*x",
        "x - (y - 1)",
    ])
    def test_render_parses_back_to_the_same_function(self, src):
        e = parse(src, XYB)
        again = parse(render(e), XYB)
        assert numerically_equal(e, again, ["x", "y"], params={"b": Fraction(5, 3)})


class TestSympyBridge:
    def test_round_trip(self):
        e = parse("exp(b*x)*(y + 1)^2 - x/b", XYB)
        back = from_sympy(to_sympy(e))
        assert numerically_equal(e, back, ["x", "y"], params={"b": Fraction(-2, 3)})

    @given(st.integers(-5, 5), st.integers(-5, 5), st.integers(0, 4))
    def test_polynomials_survive_the_bridge(self, a, c, k):
        e = add(mul(num(a), Sym("x")), mul(num(c), Sym("y") ** k))
        back = from_sympy(to_sympy(e))
        env = {"x": 0.75, "y": -1.25}
        assert evaluate(back, env) == pytest.approx(evaluate(e, env))


class TestRelativeResidual:
    def test_cancellation_of_large_terms_stays_small(self):
        # (e^x + 1)^2 - e^{2x} - 2e^x - 1 vanishes identically.
        x = Sym("x")
        e = add(power(add(exp(x), num(1)), 2), neg(exp(mul(num(2), x))), mul(num(-2), exp(x)), num(-1))
        env = {"x": np.array([25.0, 30.0, 35.0])}
        assert relative_residual(e, env) < 1e-12

    def test_genuine_violation_is_order_one(self):
        e = add(power(Sym("x"), 2), num(1))
        assert relative_residual(e, {"x": np.array([0.0, 3.0])}) == pytest.approx(1.0)

    def test_never_exceeds_the_absolute_value(self):
        e = add(mul(num(3), Sym("x")), num(-1))
        env = {"x": np.array([0.1, 0.2])}
        assert relative_residual(e, env) <= np.max(np.abs(evaluate_array(e, env)))

    def test_measured_against_the_size_of_the_terms(self):
        # 1/(x - 1e-9) - 1/x is about 0.1 while each term is about 1e4.
        x = Sym("x")
        e = add(power(add(x, num(Fraction(-1, 10**9))), -1), neg(power(x, -1)))
        assert relative_residual(e, {"x": np.array([1e-4])}) < 1e-3

    def test_overflow_is_infinite(self):
        e = exp(Sym("x"))
        assert relative_residual(e, {"x": np.array([1e4])}) == float("inf")
