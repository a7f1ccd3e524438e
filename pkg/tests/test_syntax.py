"""Canonical forms, alpha-equivalence, and the type algebra."""

from fractions import Fraction

import pytest

from lamalg.syntax import (
    ZERO,
    ZERO_TYPE,
    Abs,
    App,
    Arrow,
    Forall,
    Scaled,
    Sum,
    TyAbs,
    TyVar,
    Var,
    Zero,
    alpha_eq,
    canonical,
    classify,
    floor_scalar,
    summands,
    term_key,
    term_str,
    tsum,
    ty_join,
    ty_scale,
    type_equiv,
    type_str,
    unit,
    unit_equiv,
)

X, Y = TyVar("X"), TyVar("Y")


class TestTermSums:
    def test_sum_flattens_and_sorts(self):
        a, b = Var("a"), Var("b")
        t = tsum([tsum([b, a]), a])
        assert isinstance(t, Sum)
        assert t.parts == (a, a, b)

    def test_singleton_sum_collapses(self):
        assert tsum([Var("a")]) == Var("a")

    def test_empty_sum_is_zero(self):
        assert tsum([]) == ZERO

    def test_zero_summands_are_kept(self):
        # The term algebra does not apply the unit law; rewriting does.
        t = tsum([Var("a"), ZERO])
        assert isinstance(t, Sum)
        assert ZERO in t.parts

    def test_sum_constructor_rejects_nesting(self):
        with pytest.raises(AssertionError):
            Sum((Sum((Var("b"), Var("a"))), Var("c")))

    def test_canonical_sorts_sum_parts(self):
        raw = Sum((Var("c"), Var("b"), Var("a")))
        assert canonical(raw) == tsum([Var("a"), Var("b"), Var("c")])


class TestAlphaEquivalence:
    def test_bound_names_do_not_matter(self):
        s = Abs("x", X, Var("x"))
        t = Abs("y", X, Var("y"))
        assert alpha_eq(s, t)
        assert term_key(s) == term_key(t)

    def test_free_names_do_matter(self):
        assert not alpha_eq(Var("x"), Var("y"))

    def test_type_binders_are_nameless(self):
        s = TyAbs("Z", Abs("x", TyVar("Z"), Var("x")))
        t = TyAbs("W", Abs("x", TyVar("W"), Var("x")))
        assert alpha_eq(s, t)

    def test_annotations_distinguish(self):
        assert not alpha_eq(Abs("x", X, Var("x")), Abs("x", Y, Var("x")))


class TestTypeAlgebra:
    def test_join_orders_summands(self):
        assert type_equiv(ty_join([unit(Y), unit(X)]), ty_join([unit(X), unit(Y)]))

    def test_join_drops_zero(self):
        assert type_equiv(ty_join([unit(X), ZERO_TYPE]), unit(X))
        assert ty_join([]) == ZERO_TYPE

    def test_scale_floors_are_exact_copies(self):
        assert len(summands(ty_scale(3, unit(X)))) == 3
        assert ty_scale(0, unit(X)) == ZERO_TYPE
        assert ty_scale(2, ZERO_TYPE) == ZERO_TYPE

    def test_unit_equiv_is_alpha(self):
        a = Forall("Z", Arrow(TyVar("Z"), unit(TyVar("Z"))))
        b = Forall("W", Arrow(TyVar("W"), unit(TyVar("W"))))
        assert unit_equiv(a, b)
        assert not unit_equiv(a, Forall("Z", Arrow(TyVar("Z"), unit(X))))

    def test_summands_of_zero_is_empty(self):
        assert summands(ZERO_TYPE) == ()


class TestScalars:
    @pytest.mark.parametrize(
        "value, expected",
        [
            (Fraction(0), 0),
            (Fraction(1, 2), 0),
            (Fraction(9, 10), 0),
            (Fraction(1), 1),
            (Fraction(11, 10), 1),
            (Fraction(5, 2), 2),
        ],
    )
    def test_floor(self, value, expected):
        assert floor_scalar(value) == expected


class TestClassify:
    def test_open_term(self):
        assert classify(Var("x")) == "open"

    def test_abstraction_is_value(self):
        assert classify(Abs("x", X, Var("x"))) == "value"

    def test_sum_of_values_is_value(self):
        lam = Abs("x", X, Var("x"))
        assert classify(tsum([lam, Scaled(Fraction(1, 2), lam)])) == "value"

    def test_redex_is_neutral(self):
        lam = Abs("x", X, Var("x"))
        assert classify(App(lam, lam)) == "neutral"

    def test_zero_is_neutral_and_normal(self):
        # The empty sum is closed and normal but not a value; it seeds every
        # reducibility candidate in the termination argument.
        assert classify(ZERO) == "neutral"


class TestPrinting:
    def test_spellings(self):
        t = App(
            TyAbs("Z", Abs("x", TyVar("Z"), tsum([Var("x"), ZERO]))),
            Var("y"),
        )
        assert term_str(t) == "(/\\Z. \\x:Z. x + zero) y"
        assert type_str(ZERO_TYPE) == "Zero"
        assert type_str(ty_join([unit(X), unit(X)])) == "X + X"

    def test_scaled_printing_nests_right(self):
        t = Scaled(Fraction(5, 2), Scaled(Fraction(2), Var("v")))
        assert term_str(t) == "5/2 . 2 . v"
