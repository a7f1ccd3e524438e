"""Abstraction into the additive fragment and its square order."""

import pytest

from lamalg.additive import (
    a_is_normal,
    a_normal_form,
    a_normalize,
    a_synthesize,
    derive,
    injective_matching,
    is_additive,
    lesssim,
    sigma,
    sqleq,
    strip_zero_parts,
)
from lamalg.parser import parse_context, parse_term, parse_type
from lamalg.rewrite import normal_form
from lamalg.syntax import alpha_eq, term_str, type_equiv


def ab(src: str):
    """Parse and abstract in one go."""
    return sigma(parse_term(src))


class TestSigma:
    @pytest.mark.parametrize(
        "src, expected",
        [
            # Weights become copy counts by flooring.
            ("0.9 . y", "zero"),
            ("1.1 . y", "y"),
            ("5/2 . y", "y + y"),
            ("3 . y", "y + y + y"),
            ("0 . y", "zero"),
            # Everything else is mapped structurally.
            ("zero", "zero"),
            ("x + 2 . y", "x + y + y"),
            ("\\x:U. 1/2 . x", "\\x:U. zero"),
            ("f (2 . x)", "f (x + x)"),
            ("(/\\Z. 3/2 . x) @ Y", "(/\\Z. x) @ Y"),
        ],
    )
    def test_floors_weights_into_copies(self, src, expected):
        assert alpha_eq(ab(src), parse_term(expected))

    def test_output_is_additive(self):
        for src in ("0.9 . y", "5/2 . f (1/2 . x)", "\\x:U. 2 . x + 0.3 . y"):
            assert is_additive(ab(src))

    def test_idempotent(self):
        t = ab("5/2 . f (1/2 . x) + 0.9 . y")
        assert alpha_eq(sigma(t), t)

    def test_nested_weights_floor_separately(self):
        # The floor of a product is not the product of floors: this is the
        # abstraction's intrinsic loss of precision.
        assert alpha_eq(ab("2 . (1/2 . x)"), parse_term("zero + zero"))
        assert alpha_eq(ab("1 . x"), parse_term("x"))


class TestIsAdditive:
    def test_accepts_weight_free_terms(self):
        for src in ("x", "zero", "x + y", "\\x:U. x x", "(/\\Z. \\x:Z. x) @ Y"):
            assert is_additive(parse_term(src))

    def test_rejects_any_scaling(self):
        for src in ("2 . x", "\\x:U. 1/2 . x", "f (0.9 . y)"):
            assert not is_additive(parse_term(src))


class TestNormalization:
    def test_beta_on_copied_arguments(self):
        t = ab("(\\x:U. f x) (2 . b)")
        nf = a_normal_form(t)
        assert alpha_eq(nf, parse_term("f b + f b"))

    def test_agrees_with_abstracted_normal_form(self):
        src = "((\\x:U. g x) + (\\y:U. h y)) (b1 + b2)"
        t = parse_term(src)
        assert alpha_eq(a_normal_form(sigma(t)), sigma(normal_form(t)))

    def test_normalize_reports_steps(self):
        res = a_normalize(ab("(\\x:U. x) b"))
        assert not res.exhausted and len(res.trace) >= 1
        assert a_is_normal(res.term)

    def test_zero_application_collapses(self):
        assert alpha_eq(a_normal_form(ab("zero b")), parse_term("zero"))


class TestStripZeroParts:
    def test_drops_zero_summands(self):
        t = parse_term("x + zero + y")
        assert term_str(strip_zero_parts(t)) == "x + y"

    def test_all_zero_collapses_to_zero(self):
        assert term_str(strip_zero_parts(parse_term("zero + zero"))) == "zero"

    def test_recurses_under_binders(self):
        t = parse_term("\\x:U. x + zero")
        assert alpha_eq(strip_zero_parts(t), parse_term("\\x:U. x"))


class TestSquareOrder:
    """sqleq embeds summands injectively, reading zero as padding."""

    @pytest.mark.parametrize(
        "small, large",
        [
            ("zero", "x"),
            ("x", "x"),
            ("x", "x + x"),
            ("x + zero", "x"),
            ("x", "x + zero"),
            ("x + y", "y + x + x"),
            ("\\x:U. zero", "\\x:U. x"),
            ("f b", "f b + f b"),
        ],
    )
    def test_holds(self, small, large):
        assert sqleq(parse_term(small), parse_term(large))

    @pytest.mark.parametrize(
        "small, large",
        [
            ("x + x", "x"),
            ("x", "y"),
            ("x + x", "x + y"),
            ("\\x:U. x", "\\x:U. zero"),
        ],
    )
    def test_fails(self, small, large):
        assert not sqleq(parse_term(small), parse_term(large))

    def test_lesssim_closes_under_normalization(self):
        # The redex and its contractum sit in the same equivalence class.
        a = ab("(\\x:U. x) b")
        b = parse_term("b + b")
        assert not sqleq(a, b)
        assert lesssim(a, b)
        assert not lesssim(b, a)


class TestAbstractedTyping:
    def test_matches_copy_count_semantics(self):
        ctx = parse_context("y:Y")
        got = a_synthesize(ctx, ab("5/2 . y"))
        assert type_equiv(got, parse_type("Y + Y"))

    def test_derivation_root_agrees(self):
        ctx = parse_context("b:U, f:U -> T")
        t = ab("f (2 . b)")
        d = derive(ctx, t)
        assert type_equiv(d.ty, a_synthesize(ctx, t))
        assert d.premises  # applications have sub-derivations


class TestInjectiveMatching:
    def test_basic(self):
        assert injective_matching([[True]])
        assert injective_matching([])
        assert not injective_matching([[False]])
        # Two rows competing for one column.
        assert not injective_matching([[True, False], [True, False]])
        # Solvable only by the augmenting path that reassigns row 0.
        assert injective_matching([[True, True], [True, False]])
