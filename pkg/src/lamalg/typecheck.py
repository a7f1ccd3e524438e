"""Type synthesis and the precision preorder on types.

Types are canonical multisets of unit summands, so the equality judgement
is just canonical-form equality.  Weighted terms synthesize floor-weighted
sums; applications require an arrow-sum head whose domains agree and an
argument whose summands all share that domain.

The precision preorder `precedes` (written ≼ infix in the docs) holds when
the left type's summands embed injectively into the right's, unit-by-unit,
contravariantly in arrow domains.  Along reduction, synthesized types only
grow in multiplicity, never in the set of distinct summands.
"""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import (
    Abs,
    App,
    Arrow,
    Context,
    Forall,
    Scaled,
    Sum,
    Term,
    TyAbs,
    TyApp,
    Type,
    UnitType,
    TyVar,
    Var,
    ZERO_TYPE,
    Zero,
    context_free_tyvars,
    floor_scalar,
    summands,
    ty_join,
    ty_scale,
    unit,
    unit_equiv,
)
from .rewrite import Step, step

UNBOUND_VARIABLE = "unbound_variable"
NOT_AN_ARROW_SUM = "not_an_arrow_sum"
DOMAIN_MISMATCH = "domain_mismatch"
NOT_FORALL = "not_forall"
NOT_UNIT_TYPE = "not_unit_type"
VARIABLE_ESCAPES = "variable_escapes"


class TypingError(Exception):
    """A typing failure with a machine-readable kind."""

    def __init__(self, kind: str, message: str) -> None:
        super().__init__(message)
        self.kind = kind


def synthesize(ctx: Context, t: Term) -> Type:
    """Synthesize the canonical type of a term, or raise TypingError."""
    match t:
        case Var(name):
            if name not in ctx:
                raise TypingError(UNBOUND_VARIABLE, f"unbound variable {name}")
            return unit(ctx[name])
        case Zero():
            return ZERO_TYPE
        case Abs(var, ann, body):
            inner = dict(ctx)
            inner[var] = ann
            return unit(Arrow(ann, synthesize(inner, body)))
        case TyAbs(var, body):
            if var in context_free_tyvars(ctx):
                raise TypingError(
                    VARIABLE_ESCAPES, f"type variable {var} occurs free in the context"
                )
            body_ty = synthesize(ctx, body)
            us = summands(body_ty)
            if len(us) != 1:
                raise TypingError(
                    NOT_UNIT_TYPE,
                    f"type abstraction body must have a unit type, got {body_ty}",
                )
            return unit(Forall(var, us[0]))
        case App(fn, arg):
            return _synth_app(ctx, fn, arg)
        case TyApp(fn, ty):
            fn_ty = synthesize(ctx, fn)
            us = summands(fn_ty)
            if len(us) == 1 and isinstance(us[0], Forall):
                return unit(_instantiate(us[0], ty))
            raise TypingError(NOT_FORALL, f"type application head has type {fn_ty}")
        case Scaled(coeff, body):
            return ty_scale(floor_scalar(coeff), synthesize(ctx, body))
        case Sum(parts):
            return ty_join(synthesize(ctx, p) for p in parts)
    raise TypeError(f"not a term: {t!r}")


def _instantiate(u: Forall, ty: UnitType) -> UnitType:
    from .syntax import subst_type_in_unit

    return subst_type_in_unit(u.body, u.var, ty)


def _synth_app(ctx: Context, fn: Term, arg: Term) -> Type:
    fn_ty = synthesize(ctx, fn)
    arg_ty = synthesize(ctx, arg)
    heads = summands(fn_ty)
    for u in heads:
        if not isinstance(u, Arrow):
            raise TypingError(
                NOT_AN_ARROW_SUM, f"application head summand {u} is not an arrow"
            )
    arrows: list[Arrow] = list(heads)  # type: ignore[arg-type]
    for u in arrows[1:]:
        if not unit_equiv(u.dom, arrows[0].dom):
            raise TypingError(
                DOMAIN_MISMATCH,
                f"arrow domains differ: {arrows[0].dom} vs {u.dom}",
            )
    args = summands(arg_ty)
    for v in args[1:]:
        if not unit_equiv(v, args[0]):
            raise TypingError(
                DOMAIN_MISMATCH, f"argument summands differ: {args[0]} vs {v}"
            )
    if arrows and args and not unit_equiv(args[0], arrows[0].dom):
        raise TypingError(
            DOMAIN_MISMATCH,
            f"argument type {args[0]} does not match domain {arrows[0].dom}",
        )
    if not arrows or not args:
        return ZERO_TYPE
    beta = len(args)
    return ty_join(ty_scale(beta, u.cod) for u in arrows)


# ---------------------------------------------------------------------------
# The precision preorder
# ---------------------------------------------------------------------------

_Env = tuple[str, ...]


def _var_leq(a: str, b: str, enva: _Env, envb: _Env) -> bool:
    if a in enva or b in envb:
        return a in enva and b in envb and enva.index(a) == envb.index(b)
    return a == b


def _unit_leq(a: UnitType, b: UnitType, enva: _Env, envb: _Env) -> bool:
    match (a, b):
        case (TyVar(x), TyVar(y)):
            return _var_leq(x, y, enva, envb)
        case (Arrow(d1, c1), Arrow(d2, c2)):
            return _unit_leq(d2, d1, envb, enva) and _type_leq(c1, c2, enva, envb)
        case (Forall(x, b1), Forall(y, b2)):
            return _unit_leq(b1, b2, (x,) + enva, (y,) + envb)
        case _:
            return False


def _type_leq(a: Type, b: Type, enva: _Env, envb: _Env) -> bool:
    return _match_units(list(summands(a)), list(summands(b)), enva, envb) is not None


def _match_units(
    left: list[UnitType], right: list[UnitType], enva: _Env, envb: _Env
) -> list[int] | None:
    """Injective embedding of left summands into right ones, or None.

    Augmenting-path matching keeps this polynomial; assigning slots by
    direct backtracking goes factorial on near-misses between sums of many
    pairwise-comparable summands.
    """
    if len(left) > len(right):
        return None
    compat = [[_unit_leq(l, r, enva, envb) for r in right] for l in left]
    match_of_col: list[int | None] = [None] * len(right)

    def place(i: int, seen: set[int]) -> bool:
        for j in range(len(right)):
            if compat[i][j] and j not in seen:
                seen.add(j)
                if match_of_col[j] is None or place(match_of_col[j], seen):
                    match_of_col[j] = i
                    return True
        return False

    if not all(place(i, set()) for i in range(len(left))):
        return None
    assignment = [0] * len(left)
    for j, i in enumerate(match_of_col):
        if i is not None:
            assignment[i] = j
    return assignment


def precedes(a: Type, b: Type) -> bool:
    """Precision preorder: left summands embed injectively into right ones."""
    return _type_leq(a, b, (), ())


def precedes_witness(a: Type, b: Type) -> list[tuple[int, int]] | None:
    """The embedding found by `precedes`, as (left index, right index) pairs."""
    result = _match_units(list(summands(a)), list(summands(b)), (), ())
    if result is None:
        return None
    return list(enumerate(result))


# ---------------------------------------------------------------------------
# Subject reduction checking
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SRResult:
    """Subject-reduction outcome for one reduct of a term.

    ``type_after`` is None when the reduct fails to typecheck at all, which
    also counts as a violation.
    """

    reduction: Step
    type_before: Type
    type_after: Type | None
    ok: bool


def sr_check(ctx: Context, t: Term) -> list[SRResult]:
    """Check every one-step reduct: its type must sit above the original's."""
    before = synthesize(ctx, t)
    results = []
    for s in step(t):
        try:
            after: Type | None = synthesize(ctx, s.term)
        except TypingError:
            after = None
        ok = after is not None and precedes(before, after)
        results.append(SRResult(s, before, after, ok))
    return results
