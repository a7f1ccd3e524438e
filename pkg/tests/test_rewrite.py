"""The seventeen rewrite rules, strategies, and the combination reading."""

from fractions import Fraction

import pytest

from lamalg.parser import parse_term
from lamalg.rewrite import (
    BETA_FIRST,
    FACTOR_FIRST,
    ByGroup,
    FuelExhausted,
    Leftmost,
    RandomChoice,
    Rightmost,
    RuleId,
    is_normal,
    lincomb,
    lincomb_coeff,
    normal_form,
    normalize,
    step,
)
from lamalg.syntax import Var, alpha_eq, term_str

# One smallest redex per rule: (rule, input, one-step reduct).
MINIMAL_REDEXES = [
    (RuleId.PLUS_ZERO, "x + zero", "x"),
    (RuleId.ZERO_SCALAR, "0 . x", "zero"),
    (RuleId.ONE_SCALAR, "1 . x", "x"),
    (RuleId.SCALAR_ZERO_TERM, "2 . zero", "zero"),
    (RuleId.SCALAR_SCALAR, "2 . 3 . x", "6 . x"),
    (RuleId.SCALAR_DISTRIB, "2 . (x + y)", "2 . x + 2 . y"),
    (RuleId.FACTOR_BOTH, "2 . x + 3 . x", "5 . x"),
    (RuleId.FACTOR_ONE, "2 . x + x", "3 . x"),
    (RuleId.FACTOR_NONE, "x + x", "2 . x"),
    (RuleId.APP_DISTRIB_L, "(f + g) x", "f x + g x"),
    (RuleId.APP_DISTRIB_R, "f (x + y)", "f x + f y"),
    (RuleId.SCALAR_OUT_L, "(2 . f) x", "2 . f x"),
    (RuleId.SCALAR_OUT_R, "f (2 . x)", "2 . f x"),
    (RuleId.ZERO_APP_L, "zero x", "zero"),
    (RuleId.ZERO_APP_R, "f zero", "zero"),
    (RuleId.BETA_TERM, "(\\x:X. x + x) y", "y + y"),
    (RuleId.BETA_TYPE, "(/\\Z. \\x:Z. x) @ Y", "\\x:Y. x"),
]


class TestRules:
    def test_every_rule_has_a_case(self):
        assert {rule for rule, _, _ in MINIMAL_REDEXES} == set(RuleId)

    @pytest.mark.parametrize(
        "rule, src, expected", MINIMAL_REDEXES, ids=[r.value for r, _, _ in MINIMAL_REDEXES]
    )
    def test_minimal_redex(self, rule, src, expected):
        steps = step(parse_term(src))
        found = [s for s in steps if s.rule == rule]
        assert found, f"{rule.value} not offered on {src}"
        assert any(alpha_eq(s.term, parse_term(expected)) for s in found)

    def test_beta_requires_basis_argument(self):
        # A sum is not a basis term, so no beta step fires at the root.
        t = parse_term("(\\x:X. x) (y + y)")
        assert all(s.rule != RuleId.BETA_TERM for s in step(t))

    def test_beta_accepts_abstraction_argument(self):
        t = parse_term("(\\x:X -> X. x) (\\y:X. y)")
        assert any(s.rule == RuleId.BETA_TERM for s in step(t))

    def test_capture_avoiding_substitution(self):
        t = parse_term("(\\x:X. \\y:X. x) y")
        nf = normal_form(t)
        # The free y must not be captured by the inner binder.
        assert isinstance(nf.body, Var) and nf.body.name == "y"
        assert nf.var != "y"


class TestNormalization:
    def test_section_chain(self):
        assert alpha_eq(normal_form(parse_term("0.9 . t + 1.1 . t")), parse_term("2 . t"))

    def test_is_normal(self):
        assert is_normal(parse_term("2 . x"))
        assert not is_normal(parse_term("1 . x"))

    def test_all_strategies_agree(self):
        t = parse_term("((\\x:X. x + x) + (\\y:X. 2 . y)) (u + v)")
        results = [
            normalize(t, strategy).term
            for strategy in (
                Leftmost(),
                Rightmost(),
                ByGroup(BETA_FIRST),
                ByGroup(FACTOR_FIRST),
                RandomChoice(7),
            )
        ]
        for r in results[1:]:
            assert alpha_eq(r, results[0])

    def test_random_strategy_is_seeded(self):
        t = parse_term("((\\x:X. x + x) + (\\y:X. 2 . y)) (u + v)")
        a = normalize(t, RandomChoice(3))
        b = normalize(t, RandomChoice(3))
        assert [s.rule for s in a.trace] == [s.rule for s in b.trace]

    def test_fuel_exhaustion_raises(self):
        loop = parse_term("(\\x:X. b + x x) (\\x:X. b + x x)")
        with pytest.raises(FuelExhausted):
            normal_form(loop, fuel=50)

    def test_normalize_reports_exhaustion(self):
        loop = parse_term("(\\x:X. b + x x) (\\x:X. b + x x)")
        res = normalize(t=loop, fuel=30)
        assert res.exhausted and len(res.trace) == 30


class TestCombinationReading:
    def test_weights_accumulate(self):
        t = parse_term("2 . x + 1/2 . x + y")
        combo = {term_str(atom): coeff for coeff, atom in lincomb(t)}
        assert combo == {"x": Fraction(5, 2), "y": Fraction(1)}

    def test_zero_literal_contributes_nothing(self):
        # An explicitly weighted atom is recorded even at weight zero; the
        # empty sum itself never appears in the reading.
        assert lincomb(parse_term("zero + zero")) == []
        assert lincomb(parse_term("0 . x + zero")) == [(Fraction(0), Var("x"))]

    def test_bookkeeping_steps_preserve_the_reading(self):
        t = parse_term("2 . (x + y) + 3 . x + x")
        before = lincomb_coeff(t, Var("x"))
        for s in step(t):
            if s.rule in (RuleId.SCALAR_DISTRIB, RuleId.FACTOR_BOTH, RuleId.FACTOR_ONE):
                assert lincomb_coeff(s.term, Var("x")) == before

    def test_y_combinator_accumulates_copies(self):
        loop = parse_term("(\\x:X. b + x x) (\\x:X. b + x x)")
        partial = normalize(loop, Leftmost(), fuel=49).term
        assert lincomb_coeff(partial, Var("b")) >= 1
