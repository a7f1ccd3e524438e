"""Translation into System F with pairs, and the approximation order on it.

The target calculus is Curry-style: lambda abstraction carries no type
annotation and quantifiers leave no trace in terms.  Terms are built from
variables, lambdas, applications, a unit value (star), pairs, and the two
projection constants; reduction is beta plus projection on pairs.

Types mirror the source algebra structurally: a sum of k units becomes a
k-fold product and the empty sum becomes the unit type 1.  `ttype` gives
the canonical image of a source type (summands in canonical order,
left-nested).

`translate` turns a typing derivation of an additive term into a target
term plus its structural product type (its "shape").  Sums become tuples:
alpha-equal summands sit in right-nested runs, and summands that share a
head cluster together, ordered by keys of their additive normal forms so
that a term and its reduct line their components up whenever possible.
Applications project every function component onto every argument
component.  When two structural types present the same units in different
arrangements, a small planner (`plan_moves`) produces an explicit chain of
swap/associate/unit moves whose term side is built from pairs and
projections (`coerce`).

`f_sqleq` decides the approximation order on target terms.  Pairs inherit
the sum's equational theory — associativity, commutativity, and the unit
value absorbing a component — so a term is compared through its multiset
of pair leaves: each left leaf must embed injectively under a right leaf,
surplus right leaves pad freely, and leaves compare as a congruence.
`f_lessapprox` compares normal forms.
"""

from __future__ import annotations

from dataclasses import dataclass

from .additive import (
    ARROW_E,
    ARROW_I,
    AX,
    AX_ZERO,
    Derivation,
    FORALL_E,
    FORALL_I,
    SUM_I,
    a_normal_form,
    injective_matching,
)
from .rewrite import DEFAULT_FUEL, FuelExhausted
from .syntax import (
    App,
    Arrow,
    Forall,
    Term,
    TyApp,
    TyVar,
    Type,
    UnitType,
    Var,
    ZeroType,
    summands,
    term_key,
    ty_key,
)


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


class FType:
    __slots__ = ()


@dataclass(frozen=True)
class FTyVar(FType):
    name: str


@dataclass(frozen=True)
class FArrow(FType):
    dom: FType
    cod: FType


@dataclass(frozen=True)
class FForall(FType):
    var: str
    body: FType


@dataclass(frozen=True)
class FOne(FType):
    pass


@dataclass(frozen=True)
class FProd(FType):
    left: FType
    right: FType


F_ONE = FOne()


def ftype_key(ft: FType, env: tuple[str, ...] = ()) -> tuple:
    """Structural key; bound type variables are numbered, not named."""
    match ft:
        case FTyVar(name):
            if name in env:
                return (0, env.index(name))
            return (1, name)
        case FArrow(dom, cod):
            return (2, ftype_key(dom, env), ftype_key(cod, env))
        case FForall(var, body):
            return (3, ftype_key(body, (var,) + env))
        case FOne():
            return (4,)
        case FProd(left, right):
            return (5, ftype_key(left, env), ftype_key(right, env))
    raise TypeError(f"not a target type: {ft!r}")


def ftype_eq(a: FType, b: FType) -> bool:
    return ftype_key(a) == ftype_key(b)


def free_ftyvars(ft: FType) -> frozenset[str]:
    match ft:
        case FTyVar(name):
            return frozenset({name})
        case FArrow(dom, cod):
            return free_ftyvars(dom) | free_ftyvars(cod)
        case FForall(var, body):
            return free_ftyvars(body) - {var}
        case FProd(left, right):
            return free_ftyvars(left) | free_ftyvars(right)
        case _:
            return frozenset()


def _fresh(base: str, avoid: frozenset[str]) -> str:
    if base not in avoid:
        return base
    i = 1
    while f"{base}{i}" in avoid:
        i += 1
    return f"{base}{i}"


def fsubst_type(ft: FType, name: str, repl: FType) -> FType:
    match ft:
        case FTyVar(n):
            return repl if n == name else ft
        case FArrow(dom, cod):
            return FArrow(fsubst_type(dom, name, repl), fsubst_type(cod, name, repl))
        case FForall(var, body):
            if var == name:
                return ft
            if var in free_ftyvars(repl):
                fresh = _fresh(var, free_ftyvars(repl) | free_ftyvars(body))
                body = fsubst_type(body, var, FTyVar(fresh))
                return FForall(fresh, fsubst_type(body, name, repl))
            return FForall(var, fsubst_type(body, name, repl))
        case FProd(left, right):
            return FProd(fsubst_type(left, name, repl), fsubst_type(right, name, repl))
        case _:
            return ft


def ttype(t: Type) -> FType:
    """Canonical image of a source type: left-nested product of its units."""
    if isinstance(t, ZeroType):
        return F_ONE
    return _leftnest_types([tunit(u) for u in summands(t)])


def tunit(u: UnitType) -> FType:
    match u:
        case TyVar(name):
            return FTyVar(name)
        case Arrow(dom, cod):
            return FArrow(tunit(dom), ttype(cod))
        case Forall(var, body):
            return FForall(var, tunit(body))
    raise TypeError(f"not a unit type: {u!r}")


def _leftnest_types(parts: list[FType]) -> FType:
    out = parts[0]
    for p in parts[1:]:
        out = FProd(out, p)
    return out


def _rightnest_types(parts: list[FType]) -> FType:
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = FProd(p, out)
    return out


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------


class FTerm:
    __slots__ = ()


@dataclass(frozen=True)
class FVar(FTerm):
    name: str


@dataclass(frozen=True)
class FLam(FTerm):
    var: str
    body: FTerm


@dataclass(frozen=True)
class FApp(FTerm):
    fn: FTerm
    arg: FTerm


@dataclass(frozen=True)
class FStar(FTerm):
    pass


@dataclass(frozen=True)
class FPair(FTerm):
    left: FTerm
    right: FTerm


@dataclass(frozen=True)
class FFst(FTerm):
    pass


@dataclass(frozen=True)
class FSnd(FTerm):
    pass


F_STAR = FStar()
F_FST = FFst()
F_SND = FSnd()


def fterm_key(t: FTerm, env: tuple[str, ...] = ()) -> tuple:
    match t:
        case FVar(name):
            if name in env:
                return (0, env.index(name))
            return (1, name)
        case FLam(var, body):
            return (2, fterm_key(body, (var,) + env))
        case FApp(fn, arg):
            return (3, fterm_key(fn, env), fterm_key(arg, env))
        case FStar():
            return (4,)
        case FPair(left, right):
            return (5, fterm_key(left, env), fterm_key(right, env))
        case FFst():
            return (6,)
        case FSnd():
            return (7,)
    raise TypeError(f"not a target term: {t!r}")


def f_alpha_eq(a: FTerm, b: FTerm) -> bool:
    return fterm_key(a) == fterm_key(b)


def f_free_vars(t: FTerm) -> frozenset[str]:
    match t:
        case FVar(name):
            return frozenset({name})
        case FLam(var, body):
            return f_free_vars(body) - {var}
        case FApp(fn, arg):
            return f_free_vars(fn) | f_free_vars(arg)
        case FPair(left, right):
            return f_free_vars(left) | f_free_vars(right)
        case _:
            return frozenset()


def f_subst(t: FTerm, name: str, repl: FTerm) -> FTerm:
    match t:
        case FVar(n):
            return repl if n == name else t
        case FLam(var, body):
            if var == name:
                return t
            if var in f_free_vars(repl):
                fresh = _fresh(var, f_free_vars(repl) | f_free_vars(body))
                body = f_subst(body, var, FVar(fresh))
                return FLam(fresh, f_subst(body, name, repl))
            return FLam(var, f_subst(body, name, repl))
        case FApp(fn, arg):
            return FApp(f_subst(fn, name, repl), f_subst(arg, name, repl))
        case FPair(left, right):
            return FPair(f_subst(left, name, repl), f_subst(right, name, repl))
        case _:
            return t


def _fchildren(t: FTerm) -> list[tuple[int, FTerm]]:
    match t:
        case FLam(_, body):
            return [(0, body)]
        case FApp(fn, arg):
            return [(0, fn), (1, arg)]
        case FPair(left, right):
            return [(0, left), (1, right)]
        case _:
            return []


def _freplace(t: FTerm, idx: int, child: FTerm) -> FTerm:
    match t:
        case FLam(var, _):
            return FLam(var, child)
        case FApp(fn, arg):
            return FApp(child, arg) if idx == 0 else FApp(fn, child)
        case FPair(left, right):
            return FPair(child, right) if idx == 0 else FPair(left, child)
    raise TypeError(f"no children: {t!r}")


def _fcontract(t: FTerm) -> FTerm | None:
    """The reduct when the term itself is a beta or projection redex."""
    match t:
        case FApp(FLam(var, body), arg):
            return f_subst(body, var, arg)
        case FApp(FFst(), FPair(left, _)):
            return left
        case FApp(FSnd(), FPair(_, right)):
            return right
    return None


def f_step(t: FTerm) -> list[FTerm]:
    """One-step reducts, outermost-leftmost first."""
    out: list[FTerm] = []
    root = _fcontract(t)
    if root is not None:
        out.append(root)
    for idx, child in _fchildren(t):
        out.extend(_freplace(t, idx, r) for r in f_step(child))
    return out


@dataclass(frozen=True)
class FNormalizeResult:
    term: FTerm
    steps: int
    exhausted: bool


def f_normalize(t: FTerm, fuel: int = DEFAULT_FUEL) -> FNormalizeResult:
    current = t
    for used in range(fuel):
        reducts = f_step(current)
        if not reducts:
            return FNormalizeResult(current, used, False)
        current = reducts[0]
    if not f_step(current):
        return FNormalizeResult(current, fuel, False)
    return FNormalizeResult(current, fuel, True)


def f_normal_form(t: FTerm, fuel: int = DEFAULT_FUEL) -> FTerm:
    res = f_normalize(t, fuel)
    if res.exhausted:
        raise FuelExhausted(res)
    return res.term


# ---------------------------------------------------------------------------
# The approximation order
# ---------------------------------------------------------------------------


def f_parts(t: FTerm) -> tuple[FTerm, ...]:
    """The pair leaves of a term; unit components are dropped.

    Pairing mirrors the source sum, which is associative, commutative,
    and absorbs its unit, so only the multiset of leaves carries meaning:
    reduction freely re-associates the tuple tree a sum translates to.
    """
    if isinstance(t, FPair):
        return f_parts(t.left) + f_parts(t.right)
    if isinstance(t, FStar):
        return ()
    return (t,)


def f_canonical(t: FTerm, env: tuple[str, ...] = ()) -> FTerm:
    """The arrangement representative: unit-free, sorted, left-nested pairs.

    Leaves sort by their nameless key relative to the enclosing binders, so
    alpha-variants get alpha-equal representatives.  Two terms relate under
    `f_sqleq` in both directions exactly when their representatives are
    alpha-equal.
    """
    match t:
        case FPair() | FStar():
            leaves = sorted(
                (f_canonical(p, env) for p in f_parts(t)),
                key=lambda leaf: fterm_key(leaf, env),
            )
            if not leaves:
                return F_STAR
            out = leaves[0]
            for leaf in leaves[1:]:
                out = FPair(out, leaf)
            return out
        case FLam(var, body):
            return FLam(var, f_canonical(body, (var,) + env))
        case FApp(fn, arg):
            return FApp(f_canonical(fn, env), f_canonical(arg, env))
        case _:
            return t


def f_sqleq(a: FTerm, b: FTerm) -> bool:
    """The approximation order on target terms.

    Every pair leaf of the left term must embed, injectively, under a
    leaf of the right term; the unit value (the image of the empty sum)
    pads either side freely, and leaves compare as a congruence.  This
    mirrors the copy-count order on the source side leaf for leaf.
    """
    memo: dict[tuple, bool] = {}

    def atoms(
        x: FTerm, y: FTerm, envx: tuple[str, ...], envy: tuple[str, ...]
    ) -> bool:
        if isinstance(x, FVar) and isinstance(y, FVar):
            if x.name in envx or y.name in envy:
                return (x.name in envx and y.name in envy
                        and envx.index(x.name) == envy.index(y.name))
            return x.name == y.name
        key = (id(x), id(y), envx, envy)
        cached = memo.get(key)
        if cached is not None:
            return cached
        res = False
        if isinstance(x, FLam) and isinstance(y, FLam):
            res = sq(x.body, y.body, (x.var,) + envx, (y.var,) + envy)
        elif isinstance(x, FApp) and isinstance(y, FApp):
            # A projection-headed application encodes a unary former; it is
            # congruent only to a projection of the same kind.
            xh = isinstance(x.fn, (FFst, FSnd))
            yh = isinstance(y.fn, (FFst, FSnd))
            if xh or yh:
                res = type(x.fn) is type(y.fn) and sq(x.arg, y.arg, envx, envy)
            else:
                res = sq(x.fn, y.fn, envx, envy) and sq(x.arg, y.arg, envx, envy)
        elif type(x) is type(y) and not isinstance(x, (FLam, FApp)):
            res = True
        memo[key] = res
        return res

    def sq(x: FTerm, y: FTerm, envx: tuple[str, ...], envy: tuple[str, ...]) -> bool:
        left = f_parts(x)
        right = f_parts(y)
        if not left:
            return True
        if not right:
            return False
        compat = [[atoms(l, r, envx, envy) for r in right] for l in left]
        return injective_matching(compat)

    return sq(a, b, (), ())


def f_lessapprox(a: FTerm, b: FTerm, fuel: int = DEFAULT_FUEL) -> bool:
    """The approximation order on normal forms."""
    return f_sqleq(f_normal_form(a, fuel), f_normal_form(b, fuel))


# ---------------------------------------------------------------------------
# Shape moves: explicit coercions between product arrangements
# ---------------------------------------------------------------------------


class CoercionError(Exception):
    pass


@dataclass(frozen=True)
class Move:
    """One rearrangement at a position inside a structural type.

    Path steps: "l"/"r" descend a product, "dom"/"cod" an arrow, "all" a
    quantifier.  Ops: swap, assocl/assocr, dropl/dropr (remove a unit
    component), addl/addr (insert one).
    """

    path: tuple[str, ...]
    op: str


_INVERSE_OP = {
    "swap": "swap",
    "assocl": "assocr",
    "assocr": "assocl",
    "dropl": "addl",
    "addl": "dropl",
    "dropr": "addr",
    "addr": "dropr",
}


def inverse_move(m: Move) -> Move:
    return Move(m.path, _INVERSE_OP[m.op])


def _apply_op_type(ft: FType, op: str) -> FType:
    match (op, ft):
        case ("swap", FProd(a, b)):
            return FProd(b, a)
        case ("assocl", FProd(a, FProd(b, c))):
            return FProd(FProd(a, b), c)
        case ("assocr", FProd(FProd(a, b), c)):
            return FProd(a, FProd(b, c))
        case ("dropl", FProd(FOne(), a)):
            return a
        case ("dropr", FProd(a, FOne())):
            return a
        case ("addl", _):
            return FProd(F_ONE, ft)
        case ("addr", _):
            return FProd(ft, F_ONE)
    raise CoercionError(f"{op} does not apply to this type")


def apply_move_type(ft: FType, m: Move) -> FType:
    if not m.path:
        return _apply_op_type(ft, m.op)
    head, rest = m.path[0], Move(m.path[1:], m.op)
    match (head, ft):
        case ("l", FProd(a, b)):
            return FProd(apply_move_type(a, rest), b)
        case ("r", FProd(a, b)):
            return FProd(a, apply_move_type(b, rest))
        case ("dom", FArrow(d, c)):
            return FArrow(apply_move_type(d, rest), c)
        case ("cod", FArrow(d, c)):
            return FArrow(d, apply_move_type(c, rest))
        case ("all", FForall(v, b)):
            return FForall(v, apply_move_type(b, rest))
    raise CoercionError(f"path step {head!r} does not apply to this type")


def _pfst(e: FTerm) -> FTerm:
    return FApp(F_FST, e)


def _psnd(e: FTerm) -> FTerm:
    return FApp(F_SND, e)


def _apply_op_term(e: FTerm, op: str) -> FTerm:
    match op:
        case "swap":
            return FPair(_psnd(e), _pfst(e))
        case "assocl":
            return FPair(FPair(_pfst(e), _pfst(_psnd(e))), _psnd(_psnd(e)))
        case "assocr":
            return FPair(_pfst(_pfst(e)), FPair(_psnd(_pfst(e)), _psnd(e)))
        case "dropl":
            return _psnd(e)
        case "dropr":
            return _pfst(e)
        case "addl":
            return FPair(F_STAR, e)
        case "addr":
            return FPair(e, F_STAR)
    raise CoercionError(f"unknown op {op!r}")


def move_term(m: Move, e: FTerm) -> FTerm:
    if not m.path:
        return _apply_op_term(e, m.op)
    head, rest = m.path[0], Move(m.path[1:], m.op)
    match head:
        case "l":
            return FPair(move_term(rest, _pfst(e)), _psnd(e))
        case "r":
            return FPair(_pfst(e), move_term(rest, _psnd(e)))
        case "cod":
            x = _fresh("c", f_free_vars(e))
            return FLam(x, move_term(rest, FApp(e, FVar(x))))
        case "dom":
            x = _fresh("c", f_free_vars(e))
            return FLam(x, FApp(e, move_term(inverse_move(rest), FVar(x))))
        case "all":
            return move_term(rest, e)
    raise CoercionError(f"unknown path step {head!r}")


def _merge_spines(a: FType, b: FType) -> tuple[list[Move], FType]:
    """Moves turning FProd(a, b) of two left spines into one left spine."""
    if isinstance(b, FProd):
        moves = [Move((), "assocl")]
        inner, merged = _merge_spines(a, b.left)
        moves.extend(Move(("l",) + m.path, m.op) for m in inner)
        return moves, FProd(merged, b.right)
    return [], FProd(a, b)


def _spine_leaves(ft: FType) -> list[FType]:
    if isinstance(ft, FProd):
        return _spine_leaves(ft.left) + [ft.right]
    return [ft]


def _swap_adjacent(n: int, i: int) -> list[Move]:
    """Moves swapping leaves i and i+1 of an n-leaf left spine."""
    base = ("l",) * (n - 2 - i)
    if i == 0:
        return [Move(base, "swap")]
    return [Move(base, "assocr"), Move(base + ("r",), "swap"), Move(base, "assocl")]


def _sort_spine(ft: FType) -> tuple[list[Move], FType]:
    leaves = _spine_leaves(ft)
    n = len(leaves)
    moves: list[Move] = []
    changed = True
    while changed:
        changed = False
        for i in range(n - 1):
            if ftype_key(leaves[i]) > ftype_key(leaves[i + 1]):
                moves.extend(_swap_adjacent(n, i))
                leaves[i], leaves[i + 1] = leaves[i + 1], leaves[i]
                changed = True
    return moves, _leftnest_types(leaves)


def plan_to_normal(ft: FType) -> tuple[list[Move], FType]:
    """Moves taking a type to its arrangement normal form.

    The normal form is unit-free and left-nested with leaves sorted by
    structural key, recursively inside arrows and quantifiers; two types
    are rearrangements of each other exactly when their normal forms agree.
    """
    if isinstance(ft, FProd):
        ml, nl = plan_to_normal(ft.left)
        mr, nr = plan_to_normal(ft.right)
        moves = [Move(("l",) + m.path, m.op) for m in ml]
        moves += [Move(("r",) + m.path, m.op) for m in mr]
        if isinstance(nl, FOne):
            moves.append(Move((), "dropl"))
            return moves, nr
        if isinstance(nr, FOne):
            moves.append(Move((), "dropr"))
            return moves, nl
        merge_moves, merged = _merge_spines(nl, nr)
        moves += merge_moves
        sort_moves, result = _sort_spine(merged)
        moves += sort_moves
        return moves, result
    if isinstance(ft, FArrow):
        md, nd = plan_to_normal(ft.dom)
        mc, nc = plan_to_normal(ft.cod)
        moves = [Move(("dom",) + m.path, m.op) for m in md]
        moves += [Move(("cod",) + m.path, m.op) for m in mc]
        return moves, FArrow(nd, nc)
    if isinstance(ft, FForall):
        mb, nb = plan_to_normal(ft.body)
        return [Move(("all",) + m.path, m.op) for m in mb], FForall(ft.var, nb)
    return [], ft


def plan_moves(src: FType, dst: FType) -> list[Move]:
    """A move chain from src to dst, or CoercionError when none exists."""
    m1, n1 = plan_to_normal(src)
    m2, n2 = plan_to_normal(dst)
    if ftype_key(n1) != ftype_key(n2):
        raise CoercionError("types are not rearrangements of each other")
    return m1 + [inverse_move(m) for m in reversed(m2)]


def _norm_key(ft: FType) -> tuple:
    return ftype_key(plan_to_normal(ft)[1])


def _rearrange(e: FTerm, src: FType, dst: FType) -> FTerm:
    if ftype_key(src) == ftype_key(dst):
        return e
    if isinstance(src, (FProd, FOne)) or isinstance(dst, (FProd, FOne)):
        pool: dict[tuple, list[tuple[FTerm, FType]]] = {}
        for path, leaf in _flat_leaves(src):
            pool.setdefault(_norm_key(leaf), []).append((_project(e, path), leaf))

        def build(shape: FType) -> FTerm:
            if isinstance(shape, FProd):
                return FPair(build(shape.left), build(shape.right))
            if isinstance(shape, FOne):
                return F_STAR
            matches = pool.get(_norm_key(shape))
            if not matches:
                raise CoercionError("no source component matches a target leaf")
            term, leaf = matches.pop(0)
            return _rearrange(term, leaf, shape)

        out = build(dst)
        if any(pool.values()):
            raise CoercionError("source component left over after rearrangement")
        return out
    if isinstance(src, FArrow) and isinstance(dst, FArrow):
        x = _fresh("c", f_free_vars(e))
        arg = _rearrange(FVar(x), dst.dom, src.dom)
        return FLam(x, _rearrange(FApp(e, arg), src.cod, dst.cod))
    if isinstance(src, FForall) and isinstance(dst, FForall):
        # Quantifiers leave no trace in terms; align the bound names and
        # rearrange underneath.
        body_dst = (
            dst.body
            if dst.var == src.var
            else fsubst_type(dst.body, dst.var, FTyVar(src.var))
        )
        return _rearrange(e, src.body, body_dst)
    raise CoercionError("types are not rearrangements of each other")


def coerce(e: FTerm, src: FType, dst: FType) -> FTerm:
    """Rearrange a term of type src into one of type dst, validating types.

    The subject is bound once and each target product leaf projects the
    matching source leaf back out of it; leaves whose internal arrangement
    differs are adapted through an eta-expansion.  The result stays linear
    in the subject size (a move chain applied term-by-term would copy the
    subject at every step).
    """
    if ftype_key(src) == ftype_key(dst):
        return e
    if _norm_key(src) != _norm_key(dst):
        raise CoercionError("types are not rearrangements of each other")
    if isinstance(e, (FVar, FStar)):
        return _rearrange(e, src, dst)
    x = _fresh("c", f_free_vars(e))
    return FApp(FLam(x, _rearrange(FVar(x), src, dst)), e)


# ---------------------------------------------------------------------------
# Translation of typing derivations
# ---------------------------------------------------------------------------


class TranslateError(Exception):
    pass


@dataclass(frozen=True)
class Translation:
    fterm: FTerm
    shape: FType


@dataclass(frozen=True)
class _Entry:
    """One summand of a translated term: the source atom it stands for,
    the structural type of its image, and the image itself."""

    atom: Term
    shape: FType
    fterm: FTerm
    bound: bool


def _leftnest_terms(parts: list[FTerm]) -> FTerm:
    out = parts[0]
    for p in parts[1:]:
        out = FPair(out, p)
    return out


def _flat_leaves(shape: FType) -> list[tuple[tuple[str, ...], FType]]:
    """Product leaves with their projection paths; unit leaves are dropped."""
    if isinstance(shape, FProd):
        left = [(("l",) + p, s) for p, s in _flat_leaves(shape.left)]
        right = [(("r",) + p, s) for p, s in _flat_leaves(shape.right)]
        return left + right
    if isinstance(shape, FOne):
        return []
    return [((), shape)]


def _project(e: FTerm, path: tuple[str, ...]) -> FTerm:
    for step in path:
        e = _pfst(e) if step == "l" else _psnd(e)
    return e


class _Translator:
    def __init__(self, fuel: int = DEFAULT_FUEL) -> None:
        self.fuel = fuel
        self._nf_memo: dict[tuple, tuple] = {}

    def nf_key(self, t: Term) -> tuple:
        k = term_key(t)
        cached = self._nf_memo.get(k)
        if cached is None:
            cached = term_key(a_normal_form(t, self.fuel))
            self._nf_memo[k] = cached
        return cached

    # -- entry ordering -----------------------------------------------------

    def entry_sort_key(self, e: _Entry) -> tuple:
        return (ftype_key(e.shape), int(e.bound), self.nf_key(e.atom), term_key(e.atom))

    def subterm_sort_key(self, t: Term, bound: frozenset[str]) -> tuple:
        is_bound = isinstance(t, Var) and t.name in bound
        return (int(is_bound), self.nf_key(t), term_key(t))

    # -- assembling entry multisets into tuples ------------------------------

    def assemble(self, entries: list[_Entry], bound: frozenset[str]) -> tuple[FTerm, FType]:
        if not entries:
            return F_STAR, F_ONE
        if len(entries) == 1:
            return entries[0].fterm, entries[0].shape
        classes = _group_by(entries, lambda e: term_key(e.atom))
        if len(classes) == 1:
            terms = [e.fterm for e in entries]
            shapes = [e.shape for e in entries]
            out_t = terms[-1]
            out_s = shapes[-1]
            for t, s in zip(reversed(terms[:-1]), reversed(shapes[:-1])):
                out_t = FPair(t, out_t)
                out_s = FProd(s, out_s)
            return out_t, out_s
        if all(isinstance(e.atom, App) for e in entries):
            heads = _group_by(entries, lambda e: term_key(e.atom.fn))
            if len(heads) > 1:
                ordered = sorted(
                    heads.values(),
                    key=lambda g: self.subterm_sort_key(g[0].atom.fn, bound),
                )
            else:
                args = _group_by(entries, lambda e: term_key(e.atom.arg))
                ordered = sorted(
                    args.values(),
                    key=lambda g: self.subterm_sort_key(g[0].atom.arg, bound),
                )
            return self._leftnest_groups(ordered, bound)
        if all(isinstance(e.atom, TyApp) for e in entries):
            heads = _group_by(entries, lambda e: term_key(e.atom.fn))
            if len(heads) > 1:
                ordered = sorted(
                    heads.values(),
                    key=lambda g: self.subterm_sort_key(g[0].atom.fn, bound),
                )
            else:
                tys = _group_by(entries, lambda e: ty_key(e.atom.ty))
                ordered = sorted(tys.values(), key=lambda g: ty_key(g[0].atom.ty))
            return self._leftnest_groups(ordered, bound)
        families: list[list[_Entry]] = []
        apps = [e for e in entries if isinstance(e.atom, App)]
        tyapps = [e for e in entries if isinstance(e.atom, TyApp)]
        rest = [e for e in entries if not isinstance(e.atom, (App, TyApp))]
        if apps:
            families.append(apps)
        if tyapps:
            families.append(tyapps)
        families.extend(_group_by(rest, lambda e: term_key(e.atom)).values())
        families.sort(key=lambda f: min(self.entry_sort_key(e) for e in f))
        return self._leftnest_groups(families, bound)

    def _leftnest_groups(
        self, groups: list[list[_Entry]], bound: frozenset[str]
    ) -> tuple[FTerm, FType]:
        built = [self.assemble(g, bound) for g in groups]
        out_t, out_s = built[0]
        for t, s in built[1:]:
            out_t = FPair(out_t, t)
            out_s = FProd(out_s, s)
        return out_t, out_s

    # -- per-rule translation -------------------------------------------------

    def node(self, d: Derivation, bound: frozenset[str]) -> list[_Entry]:
        if d.rule == AX:
            assert isinstance(d.term, Var)
            ann = d.context()[d.term.name]
            return [_Entry(d.term, tunit(ann), FVar(d.term.name), d.term.name in bound)]
        if d.rule == AX_ZERO:
            return []
        if d.rule == SUM_I:
            out: list[_Entry] = []
            for p in d.premises:
                out.extend(self.node(p, bound))
            return out
        if d.rule == ARROW_I:
            var, ann, _ = d.term.var, d.term.ann, d.term.body  # type: ignore[union-attr]
            body_entries = self.node(d.premises[0], bound | {var})
            body_term, body_shape = self.assemble(body_entries, bound | {var})
            shape = FArrow(tunit(ann), body_shape)
            return [_Entry(d.term, shape, FLam(var, body_term), False)]
        if d.rule == FORALL_I:
            inner = self.node(d.premises[0], bound)
            if len(inner) != 1:
                raise TranslateError("quantifier over a non-unit body")
            e = inner[0]
            shape = FForall(d.term.var, e.shape)  # type: ignore[union-attr]
            return [_Entry(d.term, shape, e.fterm, False)]
        if d.rule == FORALL_E:
            inner = self.node(d.premises[0], bound)
            if len(inner) != 1 or not isinstance(inner[0].shape, FForall):
                raise TranslateError("instantiation of a non-quantifier")
            e = inner[0]
            shape = fsubst_type(e.shape.body, e.shape.var, tunit(d.term.ty))  # type: ignore[union-attr]
            return [_Entry(d.term, shape, e.fterm, False)]
        if d.rule == ARROW_E:
            heads = self.node(d.premises[0], bound)
            args = self.node(d.premises[1], bound)
            if not heads or not args:
                return []
            out = []
            for h in heads:
                arrow_leaves = _flat_leaves(h.shape)
                for a in args:
                    arg_leaves = _flat_leaves(a.shape)
                    atom = App(h.atom, a.atom)
                    if not arrow_leaves or not arg_leaves:
                        out.append(_Entry(atom, F_ONE, F_STAR, False))
                        continue
                    inner_terms: list[FTerm] = []
                    inner_shapes: list[FType] = []
                    for ph, fa in arrow_leaves:
                        if not isinstance(fa, FArrow):
                            raise TranslateError("function component is not an arrow")
                        comps = [
                            FApp(
                                _project(h.fterm, ph),
                                coerce(_project(a.fterm, pa), sj, fa.dom),
                            )
                            for pa, sj in arg_leaves
                        ]
                        inner_terms.append(_leftnest_terms(comps))
                        inner_shapes.append(_leftnest_types([fa.cod] * len(arg_leaves)))
                    out.append(
                        _Entry(
                            atom,
                            _leftnest_types(inner_shapes),
                            _leftnest_terms(inner_terms),
                            False,
                        )
                    )
            return out
        raise TranslateError(f"unknown rule {d.rule!r}")


def _group_by(items, key) -> dict:
    groups: dict = {}
    for it in items:
        groups.setdefault(key(it), []).append(it)
    return groups


def translate(d: Derivation, fuel: int = DEFAULT_FUEL) -> Translation:
    """Translate a typing derivation into a target term and its shape."""
    tr = _Translator(fuel)
    entries = tr.node(d, frozenset())
    fterm, shape = tr.assemble(entries, frozenset())
    return Translation(fterm, shape)


@dataclass(frozen=True)
class FCheck:
    fterm: FTerm
    shape: FType
    expected: FType
    agrees: bool


def f_check(d: Derivation, fuel: int = DEFAULT_FUEL) -> FCheck:
    """Translate and compare the shape against the canonical type image.

    The shape and the canonical image arrange the same units differently;
    they must agree up to moves (same arrangement normal form).
    """
    tr = translate(d, fuel)
    want = ttype(d.ty)
    _, n1 = plan_to_normal(tr.shape)
    _, n2 = plan_to_normal(want)
    return FCheck(tr.fterm, tr.shape, want, ftype_key(n1) == ftype_key(n2))


# ---------------------------------------------------------------------------
# Printers
# ---------------------------------------------------------------------------

_F_ATOM, _F_APP, _F_TOP = 2, 1, 0


def f_term_str(t: FTerm, prec: int = _F_TOP) -> str:
    match t:
        case FVar(name):
            return name
        case FStar():
            return "*"
        case FFst():
            return "fst"
        case FSnd():
            return "snd"
        case FPair(left, right):
            return f"({f_term_str(left)}, {f_term_str(right)})"
        case FLam(var, body):
            s = f"\\{var}. {f_term_str(body)}"
            return f"({s})" if prec > _F_TOP else s
        case FApp(fn, arg):
            s = f"{f_term_str(fn, _F_APP)} {f_term_str(arg, _F_ATOM)}"
            return f"({s})" if prec > _F_APP else s
    raise TypeError(f"not a target term: {t!r}")


_FT_ATOM, _FT_PROD, _FT_TOP = 2, 1, 0


def f_type_str(ft: FType, prec: int = _FT_TOP) -> str:
    match ft:
        case FTyVar(name):
            return name
        case FOne():
            return "1"
        case FProd(left, right):
            s = f"{f_type_str(left, _FT_PROD)} * {f_type_str(right, _FT_ATOM)}"
            return f"({s})" if prec > _FT_PROD else s
        case FArrow(dom, cod):
            s = f"{f_type_str(dom, _FT_PROD)} -> {f_type_str(cod)}"
            return f"({s})" if prec > _FT_TOP else s
        case FForall(var, body):
            s = f"forall {var}. {f_type_str(body)}"
            return f"({s})" if prec > _FT_TOP else s
    raise TypeError(f"not a target type: {ft!r}")
