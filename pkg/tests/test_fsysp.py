"""Translation into the pair calculus and the arrangement-modulo order."""

import pytest

from lamalg.additive import derive, sigma
from lamalg.fsysp import (
    CoercionError,
    FApp,
    FArrow,
    FFst,
    FLam,
    FPair,
    FProd,
    FSnd,
    FStar,
    FTyVar,
    FVar,
    coerce,
    f_alpha_eq,
    f_canonical,
    f_check,
    f_lessapprox,
    f_normal_form,
    f_normalize,
    f_parts,
    f_sqleq,
    f_term_str,
    f_type_str,
    translate,
    ttype,
    tunit,
)
from lamalg.parser import parse_context, parse_term, parse_type, parse_unit

X, Y = FVar("x"), FVar("y")


class TestTypeTranslation:
    @pytest.mark.parametrize(
        "src, expected",
        [
            ("Zero", "1"),
            ("X", "X"),
            ("X + Y", "X * Y"),
            ("X + X + Y", "X * X * Y"),
        ],
    )
    def test_sums_become_products(self, src, expected):
        assert f_type_str(ttype(parse_type(src))) == expected

    def test_units(self):
        assert f_type_str(tunit(parse_unit("U -> (T + T)"))) == "U -> T * T"
        assert f_type_str(tunit(parse_unit("forall Z. Z -> Z"))) == "forall Z. Z -> Z"


class TestTranslate:
    CTX = "b1:U, b2:U, g:U -> W, h:U -> V"
    TERM = "((\\x:U. g x) + (\\y:U. h y)) (b1 + b2)"

    def _translation(self):
        ctx = parse_context(self.CTX)
        return translate(derive(ctx, sigma(parse_term(self.TERM))))

    def test_sums_become_pairs_with_annotations_erased(self):
        tr = self._translation()
        assert (
            f_term_str(tr.fterm)
            == "(((\\x. g x) b1, (\\x. g x) b2), ((\\y. h y) b1, (\\y. h y) b2))"
        )
        assert f_type_str(tr.shape) == "W * W * (V * V)"

    def test_normal_form_pairs_the_four_results(self):
        nf = f_normal_form(self._translation().fterm)
        assert f_term_str(nf) == "((g b1, g b2), (h b1, h b2))"

    def test_zero_becomes_star(self):
        tr = translate(derive(parse_context(""), parse_term("zero")))
        assert f_alpha_eq(tr.fterm, FStar())
        assert f_type_str(tr.shape) == "1"

    def test_copied_argument_is_paired(self):
        ctx = parse_context("b:U, f:U -> T")
        tr = translate(derive(ctx, sigma(parse_term("f (2 . b)"))))
        assert f_term_str(f_normal_form(tr.fterm)) == "(f b, f b)"


class TestNormalization:
    def test_projections(self):
        assert f_term_str(f_normal_form(FApp(FFst(), FPair(X, Y)))) == "x"
        assert f_term_str(f_normal_form(FApp(FSnd(), FPair(X, Y)))) == "y"

    def test_beta_counts_steps(self):
        res = f_normalize(FApp(FLam("z", FPair(FVar("z"), FVar("z"))), X))
        assert f_term_str(res.term) == "(x, x)" and res.steps == 1
        assert not res.exhausted


class TestSquareOrder:
    """f_sqleq compares the multiset of pair leaves, star reading as padding."""

    def test_associativity_is_invisible(self):
        z = FVar("z")
        a = FPair(X, FPair(Y, z))
        b = FPair(FPair(X, Y), z)
        assert f_sqleq(a, b) and f_sqleq(b, a)

    def test_component_order_is_invisible(self):
        assert f_sqleq(FPair(X, Y), FPair(Y, X))
        assert f_sqleq(FPair(Y, X), FPair(X, Y))

    def test_star_is_bottom_padding(self):
        assert f_sqleq(FStar(), FPair(X, Y))
        assert not f_sqleq(FPair(X, Y), FStar())
        assert f_sqleq(FPair(FStar(), X), X)
        assert f_sqleq(X, FPair(FStar(), X))

    def test_duplication_moves_up_only(self):
        assert f_sqleq(X, FPair(X, X))
        assert not f_sqleq(FPair(X, X), X)

    def test_compares_under_binders_by_position(self):
        # Same function written with the binders in either order; the bound
        # names differ but the leaves match positionally.
        a = FLam("y", FLam("x", FPair(FVar("x"), FVar("y"))))
        b = FLam("x", FLam("y", FPair(FVar("x"), FVar("y"))))
        assert f_sqleq(a, b) and f_sqleq(b, a)

    def test_distinct_leaves_stay_apart(self):
        assert not f_sqleq(X, Y)
        assert not f_sqleq(FPair(X, X), FPair(X, Y))

    def test_lessapprox_closes_under_normalization(self):
        redex = FApp(FLam("z", FVar("z")), X)
        assert not f_sqleq(redex, X)
        assert f_lessapprox(redex, X) and f_lessapprox(X, redex)


class TestCanonicalAndParts:
    def test_parts_flatten_and_drop_star(self):
        got = [f_term_str(p) for p in f_parts(FPair(FPair(X, Y), FStar()))]
        assert got == ["x", "y"]

    def test_canonical_sorts_and_strips(self):
        assert f_term_str(f_canonical(FPair(FStar(), FPair(Y, X)))) == "(x, y)"

    def test_canonical_is_stable_under_renaming(self):
        a = f_canonical(FLam("p", FLam("q", FPair(FVar("q"), FVar("p")))))
        b = f_canonical(FLam("u", FLam("v", FPair(FVar("v"), FVar("u")))))
        assert f_alpha_eq(a, b)


class TestCoercion:
    A, B, C = FTyVar("A"), FTyVar("B"), FTyVar("C")

    def test_pair_rearrangement(self):
        co = coerce(FPair(X, Y), FProd(self.A, self.B), FProd(self.B, self.A))
        assert f_term_str(f_normal_form(co)) == "(y, x)"

    def test_arrow_rearranges_the_argument(self):
        f = FVar("f")
        co = coerce(
            f,
            FArrow(FProd(self.A, self.B), self.C),
            FArrow(FProd(self.B, self.A), self.C),
        )
        applied = f_normal_form(FApp(co, FPair(X, Y)))
        assert f_term_str(applied) == "f (y, x)"

    def test_rejects_non_rearrangements(self):
        with pytest.raises(CoercionError):
            coerce(X, self.A, self.B)
        with pytest.raises(CoercionError):
            # Dropping a component is not a rearrangement.
            coerce(FPair(X, Y), FProd(self.A, self.B), self.A)


class TestCheck:
    def test_shape_agrees_with_expected_modulo_arrangement(self):
        ctx = parse_context("b1:U, b2:U, g:U -> W, h:U -> V")
        t = sigma(parse_term("((\\x:U. g x) + (\\y:U. h y)) (b1 + b2)"))
        chk = f_check(derive(ctx, t))
        assert chk.agrees
        assert f_type_str(chk.shape) == "W * W * (V * V)"
        assert f_type_str(chk.expected) == "V * V * W * W"

    def test_simple_terms(self):
        for src, ctx in [("zero", ""), ("x + y", "x:X, y:Y"), ("\\x:U. x", "")]:
            chk = f_check(derive(parse_context(ctx), parse_term(src)))
            assert chk.agrees
