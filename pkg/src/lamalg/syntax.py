"""Core syntax: terms and types of a lambda calculus with weighted sums.

Terms carry exact nonnegative rational weights (`fractions.Fraction`) on
scaled subterms.  Sums of terms and sums of types are kept in a canonical
form: flattened (no sum directly under a sum) and sorted by a nameless
structural key, so that associativity/commutativity of + is equality of
representations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

Scalar = Fraction


def as_scalar(value: Union[int, str, Fraction]) -> Fraction:
    """Convert to an exact nonnegative rational, rejecting negatives."""
    f = Fraction(value)
    if f < 0:
        raise ValueError(f"scalars must be nonnegative, got {f}")
    return f


def floor_scalar(a: Fraction) -> int:
    """Exact floor of a scalar."""
    return math.floor(a)


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


class UnitType:
    """Base class for unit types (variables, arrows, quantified types)."""

    def __str__(self) -> str:
        return unit_str(self)


@dataclass(frozen=True)
class TyVar(UnitType):
    """A type variable."""

    name: str


@dataclass(frozen=True)
class Arrow(UnitType):
    """A function type; the domain is a unit type, the codomain any type."""

    dom: UnitType
    cod: "Type"


@dataclass(frozen=True)
class Forall(UnitType):
    """A universally quantified unit type."""

    var: str
    body: UnitType


class Type:
    """Base class for types: the empty type or a sum of unit types."""

    def __str__(self) -> str:
        return type_str(self)


@dataclass(frozen=True)
class ZeroType(Type):
    """The empty weighted sum of types."""


@dataclass(frozen=True)
class TySum(Type):
    """A nonempty multiset of unit summands, stored sorted."""

    units: tuple[UnitType, ...]

    def __post_init__(self) -> None:
        assert self.units, "TySum must be nonempty; use ZeroType"


ZERO_TYPE = ZeroType()


def ty_sum(units: Iterable[UnitType]) -> Type:
    """Build the canonical sum of unit types (ZeroType when empty)."""
    items = sorted(units, key=ty_key)
    if not items:
        return ZERO_TYPE
    return TySum(tuple(items))


def unit(u: UnitType) -> Type:
    """The singleton type holding one unit summand."""
    return TySum((u,))


def summands(t: Type) -> tuple[UnitType, ...]:
    """The unit summands of a canonical type (empty for ZeroType)."""
    return () if isinstance(t, ZeroType) else t.units


def ty_join(parts: Iterable[Type]) -> Type:
    """Sum of types: multiset union of all unit summands."""
    units: list[UnitType] = []
    for p in parts:
        units.extend(summands(p))
    return ty_sum(units)


def ty_scale(n: int, t: Type) -> Type:
    """n-fold sum of a type (ZeroType when n is 0)."""
    return ty_sum(summands(t) * n)


def ty_key(u: UnitType, env: tuple[str, ...] = ()) -> tuple:
    """Nameless sort/equality key for a unit type (binders de Bruijn-coded)."""
    match u:
        case TyVar(name):
            if name in env:
                return (0, env.index(name))
            return (1, name)
        case Arrow(dom, cod):
            return (2, ty_key(dom, env), type_key(cod, env))
        case Forall(var, body):
            return (3, ty_key(body, (var,) + env))
    raise TypeError(f"not a unit type: {u!r}")


def type_key(t: Type, env: tuple[str, ...] = ()) -> tuple:
    """Nameless key for a canonical type."""
    if isinstance(t, ZeroType):
        return (0,)
    return (1, tuple(sorted(ty_key(u, env) for u in t.units)))


def unit_equiv(a: UnitType, b: UnitType) -> bool:
    """Alpha-equivalence of unit types."""
    return ty_key(a) == ty_key(b)


def type_equiv(a: Type, b: Type) -> bool:
    """Alpha-equivalence of canonical types (multiset equality of summands)."""
    return type_key(a) == type_key(b)


def free_tyvars_unit(u: UnitType) -> frozenset[str]:
    """Free type variables of a unit type."""
    match u:
        case TyVar(name):
            return frozenset({name})
        case Arrow(dom, cod):
            return free_tyvars_unit(dom) | free_tyvars_type(cod)
        case Forall(var, body):
            return free_tyvars_unit(body) - {var}
    raise TypeError(f"not a unit type: {u!r}")


def free_tyvars_type(t: Type) -> frozenset[str]:
    """Free type variables of a type."""
    out: frozenset[str] = frozenset()
    for u in summands(t):
        out |= free_tyvars_unit(u)
    return out


def _fresh(name: str, avoid: frozenset[str]) -> str:
    base = name.rstrip("0123456789")
    i = 1
    candidate = name
    while candidate in avoid:
        candidate = f"{base}{i}"
        i += 1
    return candidate


def subst_type_in_unit(u: UnitType, x: str, repl: UnitType) -> UnitType:
    """Capture-avoiding substitution of a unit type for a type variable."""
    match u:
        case TyVar(name):
            return repl if name == x else u
        case Arrow(dom, cod):
            return Arrow(subst_type_in_unit(dom, x, repl), subst_type_in_type(cod, x, repl))
        case Forall(var, body):
            if var == x:
                return u
            if var in free_tyvars_unit(repl) and x in free_tyvars_unit(body):
                fresh = _fresh(var, free_tyvars_unit(repl) | free_tyvars_unit(body) | {x})
                body = subst_type_in_unit(body, var, TyVar(fresh))
                var = fresh
            return Forall(var, subst_type_in_unit(body, x, repl))
    raise TypeError(f"not a unit type: {u!r}")


def subst_type_in_type(t: Type, x: str, repl: UnitType) -> Type:
    """Substitute in every summand and re-canonicalize (order may change)."""
    return ty_sum(subst_type_in_unit(u, x, repl) for u in summands(t))


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------


class Term:
    """Base class for terms."""

    def __str__(self) -> str:
        return term_str(self)


@dataclass(frozen=True)
class Var(Term):
    """A term variable."""

    name: str


@dataclass(frozen=True)
class Abs(Term):
    """A lambda abstraction with an annotated unit-type domain."""

    var: str
    ann: UnitType
    body: Term


@dataclass(frozen=True)
class TyAbs(Term):
    """A type abstraction."""

    var: str
    body: Term


@dataclass(frozen=True)
class App(Term):
    """An application."""

    fn: Term
    arg: Term


@dataclass(frozen=True)
class TyApp(Term):
    """A type application `t @ U`."""

    fn: Term
    ty: UnitType


@dataclass(frozen=True)
class Zero(Term):
    """The empty sum of terms."""


@dataclass(frozen=True)
class Scaled(Term):
    """A term scaled by a nonnegative rational weight."""

    coeff: Fraction
    body: Term

    def __post_init__(self) -> None:
        assert isinstance(self.coeff, Fraction) and self.coeff >= 0, (
            f"weight must be a nonnegative Fraction, got {self.coeff!r}"
        )


@dataclass(frozen=True)
class Sum(Term):
    """A sum of two or more summands, flattened and sorted."""

    parts: tuple[Term, ...]

    def __post_init__(self) -> None:
        assert len(self.parts) >= 2, "Sum needs at least two summands"
        assert not any(isinstance(p, Sum) for p in self.parts), "Sum must be flat"


ZERO = Zero()


def scaled(coeff, body: Term) -> Scaled:
    """Build a scaled term, validating the weight."""
    return Scaled(as_scalar(coeff), body)


def tsum(parts: Iterable[Term]) -> Term:
    """Build the canonical sum of terms: flatten, sort, unwrap singletons."""
    flat: list[Term] = []
    for p in parts:
        if isinstance(p, Sum):
            flat.extend(p.parts)
        else:
            flat.append(p)
    if not flat:
        return ZERO
    flat.sort(key=term_key)
    if len(flat) == 1:
        return flat[0]
    return Sum(tuple(flat))


def term_parts(t: Term) -> tuple[Term, ...]:
    """The summands of a term viewed as a sum (itself when not a Sum)."""
    return t.parts if isinstance(t, Sum) else (t,)


def term_key(t: Term, env: tuple[str, ...] = (), tyenv: tuple[str, ...] = ()) -> tuple:
    """Nameless sort/equality key for a term."""
    match t:
        case Var(name):
            if name in env:
                return (0, env.index(name))
            return (1, name)
        case App(fn, arg):
            return (2, term_key(fn, env, tyenv), term_key(arg, env, tyenv))
        case TyApp(fn, ty):
            return (3, term_key(fn, env, tyenv), ty_key(ty, tyenv))
        case Abs(var, ann, body):
            return (4, ty_key(ann, tyenv), term_key(body, (var,) + env, tyenv))
        case TyAbs(var, body):
            return (5, term_key(body, env, (var,) + tyenv))
        case Zero():
            return (6,)
        case Scaled(coeff, body):
            return (7, (coeff.numerator, coeff.denominator), term_key(body, env, tyenv))
        case Sum(parts):
            return (8, tuple(sorted(term_key(p, env, tyenv) for p in parts)))
    raise TypeError(f"not a term: {t!r}")


def alpha_eq(a: Term, b: Term) -> bool:
    """Alpha-equivalence of terms (modulo sum order, which is canonical)."""
    return term_key(a) == term_key(b)


def canonical(t: Term) -> Term:
    """Re-establish the canonical form bottom-up (flat, sorted sums)."""
    match t:
        case Var() | Zero():
            return t
        case Abs(var, ann, body):
            return Abs(var, ann, canonical(body))
        case TyAbs(var, body):
            return TyAbs(var, canonical(body))
        case App(fn, arg):
            return App(canonical(fn), canonical(arg))
        case TyApp(fn, ty):
            return TyApp(canonical(fn), ty)
        case Scaled(coeff, body):
            return Scaled(coeff, canonical(body))
        case Sum(parts):
            return tsum(canonical(p) for p in parts)
    raise TypeError(f"not a term: {t!r}")


def is_basis(t: Term) -> bool:
    """Basis terms: variables and both kinds of abstraction."""
    return isinstance(t, (Var, Abs, TyAbs))


def free_vars(t: Term) -> frozenset[str]:
    """Free term variables."""
    match t:
        case Var(name):
            return frozenset({name})
        case Abs(var, _, body):
            return free_vars(body) - {var}
        case TyAbs(_, body):
            return free_vars(body)
        case App(fn, arg):
            return free_vars(fn) | free_vars(arg)
        case TyApp(fn, _):
            return free_vars(fn)
        case Zero():
            return frozenset()
        case Scaled(_, body):
            return free_vars(body)
        case Sum(parts):
            out: frozenset[str] = frozenset()
            for p in parts:
                out |= free_vars(p)
            return out
    raise TypeError(f"not a term: {t!r}")


def free_tyvars_term(t: Term) -> frozenset[str]:
    """Free type variables of a term (from annotations and type applications)."""
    match t:
        case Var() | Zero():
            return frozenset()
        case Abs(_, ann, body):
            return free_tyvars_unit(ann) | free_tyvars_term(body)
        case TyAbs(var, body):
            return free_tyvars_term(body) - {var}
        case App(fn, arg):
            return free_tyvars_term(fn) | free_tyvars_term(arg)
        case TyApp(fn, ty):
            return free_tyvars_term(fn) | free_tyvars_unit(ty)
        case Scaled(_, body):
            return free_tyvars_term(body)
        case Sum(parts):
            out: frozenset[str] = frozenset()
            for p in parts:
                out |= free_tyvars_term(p)
            return out
    raise TypeError(f"not a term: {t!r}")


def subst_term(t: Term, x: str, b: Term) -> Term:
    """Substitute a basis term for a variable, capture-avoidingly."""
    if not is_basis(b):
        raise ValueError(f"substitution needs a basis term, got {b}")
    return _subst(t, x, b)


def _subst(t: Term, x: str, b: Term) -> Term:
    match t:
        case Var(name):
            return b if name == x else t
        case Abs(var, ann, body):
            if var == x:
                return t
            if var in free_vars(b) and x in free_vars(body):
                fresh = _fresh(var, free_vars(b) | free_vars(body) | {x})
                body = _subst(body, var, Var(fresh))
                var = fresh
            return Abs(var, ann, _subst(body, x, b))
        case TyAbs(var, body):
            return TyAbs(var, _subst(body, x, b))
        case App(fn, arg):
            return App(_subst(fn, x, b), _subst(arg, x, b))
        case TyApp(fn, ty):
            return TyApp(_subst(fn, x, b), ty)
        case Zero():
            return t
        case Scaled(coeff, body):
            return Scaled(coeff, _subst(body, x, b))
        case Sum(parts):
            return tsum(_subst(p, x, b) for p in parts)
    raise TypeError(f"not a term: {t!r}")


def subst_type_in_term(t: Term, x: str, repl: UnitType) -> Term:
    """Substitute a unit type for a type variable throughout a term."""
    match t:
        case Var() | Zero():
            return t
        case Abs(var, ann, body):
            return Abs(var, subst_type_in_unit(ann, x, repl), subst_type_in_term(body, x, repl))
        case TyAbs(var, body):
            if var == x:
                return t
            if var in free_tyvars_unit(repl) and x in free_tyvars_term(body):
                fresh = _fresh(var, free_tyvars_unit(repl) | free_tyvars_term(body) | {x})
                body = subst_type_in_term(body, var, TyVar(fresh))
                var = fresh
            return TyAbs(var, subst_type_in_term(body, x, repl))
        case App(fn, arg):
            return App(subst_type_in_term(fn, x, repl), subst_type_in_term(arg, x, repl))
        case TyApp(fn, ty):
            return TyApp(subst_type_in_term(fn, x, repl), subst_type_in_unit(ty, x, repl))
        case Scaled(coeff, body):
            return Scaled(coeff, subst_type_in_term(body, x, repl))
        case Sum(parts):
            return tsum(subst_type_in_term(p, x, repl) for p in parts)
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# Value / neutral classification
# ---------------------------------------------------------------------------


def _is_value_shape(t: Term) -> bool:
    match t:
        case Abs() | TyAbs():
            return True
        case Sum(parts):
            return all(_is_value_shape(p) for p in parts)
        case Scaled(_, body):
            return _is_value_shape(body)
        case _:
            return False


def classify(t: Term) -> str:
    """Classify a term: 'value', 'neutral' (closed non-value), or 'open'."""
    if free_vars(t):
        return "open"
    return "value" if _is_value_shape(t) else "neutral"


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

_ATOM, _APP, _SCALE, _SUM = 0, 1, 2, 3


def _frac_str(f: Fraction) -> str:
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


def _wrap(s: str, level: int, limit: int) -> str:
    return f"({s})" if level > limit else s


def _term_str(t: Term) -> tuple[str, int]:
    match t:
        case Var(name):
            return name, _ATOM
        case Zero():
            return "zero", _ATOM
        case Abs(var, ann, body):
            s, _ = _term_str(body)
            return f"\\{var}:{unit_str(ann)}. {s}", _SUM
        case TyAbs(var, body):
            s, _ = _term_str(body)
            return f"/\\{var}. {s}", _SUM
        case App(fn, arg):
            fs, fl = _term_str(fn)
            xs, xl = _term_str(arg)
            return f"{_wrap(fs, fl, _APP)} {_wrap(xs, xl, _ATOM)}", _APP
        case TyApp(fn, ty):
            fs, fl = _term_str(fn)
            return f"{_wrap(fs, fl, _APP)} @ {_unit_str_atomic(ty)}", _APP
        case Scaled(coeff, body):
            bs, bl = _term_str(body)
            return f"{_frac_str(coeff)} . {_wrap(bs, bl, _SCALE)}", _SCALE
        case Sum(parts):
            rendered = [_wrap(*_term_str(p), _SCALE) for p in parts]
            return " + ".join(rendered), _SUM
    raise TypeError(f"not a term: {t!r}")


def term_str(t: Term) -> str:
    """Render a term in the concrete syntax."""
    return _term_str(t)[0]


def _unit_str_atomic(u: UnitType) -> str:
    s = unit_str(u)
    if isinstance(u, TyVar):
        return s
    return f"({s})"


def unit_str(u: UnitType) -> str:
    """Render a unit type."""
    match u:
        case TyVar(name):
            return name
        case Arrow(dom, cod):
            ds = unit_str(dom)
            if isinstance(dom, (Arrow, Forall)):
                ds = f"({ds})"
            cs = type_str(cod)
            if isinstance(cod, TySum) and len(cod.units) > 1:
                cs = f"({cs})"
            return f"{ds} -> {cs}"
        case Forall(var, body):
            return f"forall {var}. {unit_str(body)}"
    raise TypeError(f"not a unit type: {u!r}")


def type_str(t: Type) -> str:
    """Render a type."""
    if isinstance(t, ZeroType):
        return "Zero"
    rendered = []
    for u in t.units:
        s = unit_str(u)
        if isinstance(u, Forall):
            s = f"({s})"
        rendered.append(s)
    return " + ".join(rendered)


# ---------------------------------------------------------------------------
# Contexts
# ---------------------------------------------------------------------------

Context = dict[str, UnitType]


def context_free_tyvars(ctx: Context) -> frozenset[str]:
    """Free type variables appearing in a context's bindings."""
    out: frozenset[str] = frozenset()
    for u in ctx.values():
        out |= free_tyvars_unit(u)
    return out
