"""The additive calculus: weight-free terms, abstraction, and the ⊑ order.

Additive terms reuse the core constructors minus `Scaled`.  The abstraction
`sigma` sends a weighted term to an additive one by replacing each weight
with floor-many copies of its body.  Reduction keeps only the seven rules
that make sense without weights: distribution, zero-application, dropping a
zero summand, and the two beta rules — crucially there is NO factoring, so
`x + x` is additive-normal.

`sqleq` decides the copy-count order ⊑: every left summand must embed,
injectively, under a summand of the right term, while zero summands act as
the unit of the sum and pad either side freely — exactly the unit law the
type-level sum already has.  `lesssim` compares additive normal forms
with ⊑.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .rewrite import (
    DEFAULT_FUEL,
    FuelExhausted,
    Leftmost,
    NormalizeResult,
    RuleId,
    Step,
    Strategy,
    step,
)
from .syntax import (
    Abs,
    App,
    Context,
    Scaled,
    Sum,
    Term,
    TyAbs,
    TyApp,
    Type,
    UnitType,
    Var,
    Zero,
    floor_scalar,
    term_parts,
    tsum,
    ty_key,
)
from .typecheck import TypingError, synthesize

ADDITIVE_RULES = frozenset(
    {
        RuleId.PLUS_ZERO,
        RuleId.APP_DISTRIB_L,
        RuleId.APP_DISTRIB_R,
        RuleId.ZERO_APP_L,
        RuleId.ZERO_APP_R,
        RuleId.BETA_TERM,
        RuleId.BETA_TYPE,
    }
)


def is_additive(t: Term) -> bool:
    """True when the term contains no scaled subterm."""
    match t:
        case Scaled():
            return False
        case Abs(_, _, body) | TyAbs(_, body):
            return is_additive(body)
        case App(fn, arg):
            return is_additive(fn) and is_additive(arg)
        case TyApp(fn, _):
            return is_additive(fn)
        case Sum(parts):
            return all(is_additive(p) for p in parts)
        case _:
            return True


def strip_zero_parts(t: Term) -> Term:
    """The representative of a term modulo the sum-unit law.

    Zero summands pad a sum without changing its meaning, so the order
    `sqleq` relates two terms exactly when it relates their stripped
    representatives; equality of representatives is the induced notion
    of sameness (used e.g. when checking antisymmetry).
    """
    match t:
        case Sum(parts):
            return tsum(
                [strip_zero_parts(p) for p in parts if not isinstance(p, Zero)]
            )
        case Abs(v, ann, body):
            return Abs(v, ann, strip_zero_parts(body))
        case TyAbs(v, body):
            return TyAbs(v, strip_zero_parts(body))
        case TyApp(fn, ty):
            return TyApp(strip_zero_parts(fn), ty)
        case App(fn, arg):
            return App(strip_zero_parts(fn), strip_zero_parts(arg))
        case Scaled(coeff, body):
            return Scaled(coeff, strip_zero_parts(body))
        case _:
            return t


def sigma(t: Term) -> Term:
    """Abstract weights away: each weight becomes floor-many copies."""
    match t:
        case Var() | Zero():
            return t
        case Abs(var, ann, body):
            return Abs(var, ann, sigma(body))
        case TyAbs(var, body):
            return TyAbs(var, sigma(body))
        case App(fn, arg):
            return App(sigma(fn), sigma(arg))
        case TyApp(fn, ty):
            return TyApp(sigma(fn), ty)
        case Scaled(coeff, body):
            return tsum([sigma(body)] * floor_scalar(coeff))
        case Sum(parts):
            return tsum(sigma(p) for p in parts)
    raise TypeError(f"not a term: {t!r}")


def a_step(t: Term) -> list[Step]:
    """One-step additive reducts (the seven weight-free rules)."""
    return [s for s in step(t) if s.rule in ADDITIVE_RULES]


def a_is_normal(t: Term) -> bool:
    """True when no additive rule applies."""
    return not a_step(t)


def a_normalize(
    t: Term, strategy: Strategy | None = None, fuel: int = DEFAULT_FUEL
) -> NormalizeResult:
    """Normalize with the additive rule set only."""
    strategy = strategy or Leftmost()
    trace: list[Step] = []
    current = t
    for _ in range(fuel):
        steps = a_step(current)
        if not steps:
            return NormalizeResult(current, tuple(trace), False)
        chosen = strategy.select(steps)
        trace.append(chosen)
        current = chosen.term
    if not a_step(current):
        return NormalizeResult(current, tuple(trace), False)
    return NormalizeResult(current, tuple(trace), True)


def a_normal_form(t: Term, fuel: int = DEFAULT_FUEL) -> Term:
    """Additive normal form; raises FuelExhausted when fuel runs out."""
    res = a_normalize(t, Leftmost(), fuel)
    if res.exhausted:
        raise FuelExhausted(res)
    return res.term


def a_synthesize(ctx: Context, t: Term) -> Type:
    """Type synthesis for additive terms (no weighted rule needed)."""
    if not is_additive(t):
        raise TypingError("not_additive", f"term has weighted subterms: {t}")
    return synthesize(ctx, t)


# ---------------------------------------------------------------------------
# The copy-count order ⊑
# ---------------------------------------------------------------------------

_Env = tuple[str, ...]


@dataclass
class _Cmp:
    """Environment pairs for alpha-aware comparison of open terms."""

    enva: _Env = ()
    envb: _Env = ()
    tyenva: _Env = ()
    tyenvb: _Env = ()

    def bind(self, x: str, y: str) -> "_Cmp":
        return _Cmp((x,) + self.enva, (y,) + self.envb, self.tyenva, self.tyenvb)

    def bind_ty(self, x: str, y: str) -> "_Cmp":
        return _Cmp(self.enva, self.envb, (x,) + self.tyenva, (y,) + self.tyenvb)


def _var_matches(a: str, b: str, enva: _Env, envb: _Env) -> bool:
    if a in enva or b in envb:
        return a in enva and b in envb and enva.index(a) == envb.index(b)
    return a == b


def _atom_leq(a: Term, b: Term, env: _Cmp) -> bool:
    """⊑ between non-sum terms: same constructor, componentwise."""
    match (a, b):
        case (Zero(), _):
            return True
        case (_, Zero()):
            return False
        case (Var(x), Var(y)):
            return _var_matches(x, y, env.enva, env.envb)
        case (Abs(x, ua, ba), Abs(y, ub, bb)):
            if ty_key(ua, env.tyenva) != ty_key(ub, env.tyenvb):
                return False
            return _sqleq(ba, bb, env.bind(x, y))
        case (TyAbs(x, ba), TyAbs(y, bb)):
            return _sqleq(ba, bb, env.bind_ty(x, y))
        case (App(fa, xa), App(fb, xb)):
            return _sqleq(fa, fb, env) and _sqleq(xa, xb, env)
        case (TyApp(fa, ta), TyApp(fb, tb)):
            if ty_key(ta, env.tyenva) != ty_key(tb, env.tyenvb):
                return False
            return _sqleq(fa, fb, env)
        case _:
            return False


def _sqleq(a: Term, b: Term, env: _Cmp) -> bool:
    # Zero summands are the unit of the sum and pad freely on either side,
    # mirroring the unit law the type equivalence already has.  The left
    # summands must embed injectively into the right's; surplus right
    # summands sit above the empty sum and need no partner.
    left = tuple(p for p in term_parts(a) if not isinstance(p, Zero))
    right = tuple(p for p in term_parts(b) if not isinstance(p, Zero))
    if not left:
        return True
    if not right:
        return False
    compat = [
        [_atom_leq(l, r, env) for r in right]
        for l in left
    ]
    return injective_matching(compat)


def injective_matching(compat: list[list[bool]]) -> bool:
    """Can every row be matched to a distinct column it is compatible with?"""
    n_rows = len(compat)
    n_cols = len(compat[0]) if compat else 0
    match_of_col: list[int | None] = [None] * n_cols

    def try_row(i: int, seen: set[int]) -> bool:
        for j in range(n_cols):
            if compat[i][j] and j not in seen:
                seen.add(j)
                if match_of_col[j] is None or try_row(match_of_col[j], seen):
                    match_of_col[j] = i
                    return True
        return False

    return all(try_row(i, set()) for i in range(n_rows))


def sqleq(a: Term, b: Term) -> bool:
    """The copy-count order on additive terms.

    A term sits below another when each of its summands embeds, injectively,
    under some summand of the other; components the right side has and the
    left lacks are treated as present with count zero.
    """
    return _sqleq(a, b, _Cmp())


def lesssim(a: Term, b: Term, fuel: int = DEFAULT_FUEL) -> bool:
    """⊑ on additive normal forms."""
    return sqleq(a_normal_form(a, fuel), a_normal_form(b, fuel))


# ---------------------------------------------------------------------------
# Typing derivations
# ---------------------------------------------------------------------------

AX = "ax"
AX_ZERO = "ax_zero"
ARROW_I = "arrow_i"
ARROW_E = "arrow_e"
FORALL_I = "forall_i"
FORALL_E = "forall_e"
SUM_I = "sum_i"


@dataclass(frozen=True)
class Derivation:
    """A typing derivation for an additive term.

    Premises appear in structural order; for sums that is the canonical
    summand order.  Replaying the tree reproduces `a_synthesize` at the root.
    """

    rule: str
    ctx: tuple[tuple[str, UnitType], ...]
    term: Term
    ty: Type
    premises: tuple["Derivation", ...] = field(default_factory=tuple)

    def context(self) -> Context:
        return dict(self.ctx)


def derive(ctx: Context, t: Term) -> Derivation:
    """Build the syntax-directed derivation for an additive term."""
    if not is_additive(t):
        raise TypingError("not_additive", f"term has weighted subterms: {t}")
    return _derive(ctx, t)


def _derive(ctx: Context, t: Term) -> Derivation:
    frozen = tuple(sorted(ctx.items(), key=lambda kv: kv[0]))
    ty = synthesize(ctx, t)
    match t:
        case Var():
            return Derivation(AX, frozen, t, ty)
        case Zero():
            return Derivation(AX_ZERO, frozen, t, ty)
        case Abs(var, ann, body):
            inner = dict(ctx)
            inner[var] = ann
            return Derivation(ARROW_I, frozen, t, ty, (_derive(inner, body),))
        case TyAbs(_, body):
            return Derivation(FORALL_I, frozen, t, ty, (_derive(ctx, body),))
        case App(fn, arg):
            return Derivation(ARROW_E, frozen, t, ty, (_derive(ctx, fn), _derive(ctx, arg)))
        case TyApp(fn, _):
            return Derivation(FORALL_E, frozen, t, ty, (_derive(ctx, fn),))
        case Sum(parts):
            return Derivation(SUM_I, frozen, t, ty, tuple(_derive(ctx, p) for p in parts))
    raise TypeError(f"not a term: {t!r}")
