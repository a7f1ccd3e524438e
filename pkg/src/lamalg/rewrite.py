"""Rewrite engine: one-step reduction, strategies, and normalization.

Rules operate modulo associativity/commutativity of + (sums are canonical
multisets), match syntactically as written (no implicit `1 . u` coercion),
and apply in any context, including under binders.  The rules fall into
four groups: scalar bookkeeping (E), factoring (F), application
distribution (A), and the two beta rules.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .syntax import (
    Abs,
    App,
    Scaled,
    Sum,
    Term,
    TyAbs,
    TyApp,
    ZERO,
    Zero,
    alpha_eq,
    is_basis,
    subst_term,
    subst_type_in_term,
    term_key,
    tsum,
)


class RuleId(Enum):
    """The seventeen reduction rules."""

    PLUS_ZERO = "plus_zero"              # u + 0 -> u
    ZERO_SCALAR = "zero_scalar"          # 0 . u -> 0
    ONE_SCALAR = "one_scalar"            # 1 . u -> u
    SCALAR_ZERO_TERM = "scalar_zero"     # a . 0 -> 0
    SCALAR_SCALAR = "scalar_scalar"      # a . (b . u) -> (a*b) . u
    SCALAR_DISTRIB = "scalar_distrib"    # a . (u + v) -> a . u + a . v
    FACTOR_BOTH = "factor_both"          # a . u + b . u -> (a + b) . u
    FACTOR_ONE = "factor_one"            # a . u + u -> (a + 1) . u
    FACTOR_NONE = "factor_none"          # u + u -> 2 . u
    APP_DISTRIB_L = "app_distrib_l"      # (t + u) r -> t r + u r
    APP_DISTRIB_R = "app_distrib_r"      # r (t + u) -> r t + r u
    SCALAR_OUT_L = "scalar_out_l"        # (a . u) r -> a . (u r)
    SCALAR_OUT_R = "scalar_out_r"        # r (a . u) -> a . (r u)
    ZERO_APP_L = "zero_app_l"            # 0 r -> 0
    ZERO_APP_R = "zero_app_r"            # r 0 -> 0
    BETA_TERM = "beta_term"              # (\x:U. t) b -> t[b/x], b a basis term
    BETA_TYPE = "beta_type"              # (/\X. t) @ U -> t[U/X]


GROUP_E = frozenset(
    {
        RuleId.PLUS_ZERO,
        RuleId.ZERO_SCALAR,
        RuleId.ONE_SCALAR,
        RuleId.SCALAR_ZERO_TERM,
        RuleId.SCALAR_SCALAR,
        RuleId.SCALAR_DISTRIB,
    }
)
GROUP_F = frozenset({RuleId.FACTOR_BOTH, RuleId.FACTOR_ONE, RuleId.FACTOR_NONE})
GROUP_A = frozenset(
    {
        RuleId.APP_DISTRIB_L,
        RuleId.APP_DISTRIB_R,
        RuleId.SCALAR_OUT_L,
        RuleId.SCALAR_OUT_R,
        RuleId.ZERO_APP_L,
        RuleId.ZERO_APP_R,
    }
)
GROUP_BETA = frozenset({RuleId.BETA_TERM, RuleId.BETA_TYPE})


def rule_group(rule: RuleId) -> str:
    """Group label of a rule: 'E', 'F', 'A', or 'beta'."""
    if rule in GROUP_E:
        return "E"
    if rule in GROUP_F:
        return "F"
    if rule in GROUP_A:
        return "A"
    return "beta"


Path = tuple[int, ...]


@dataclass(frozen=True)
class Step:
    """One reduction step: the whole-term reduct, the rule, and where."""

    term: Term
    rule: RuleId
    path: Path


def _local_steps(t: Term) -> list[tuple[Term, RuleId, Path]]:
    """Redexes whose pattern is rooted at this node (path relative to it)."""
    out: list[tuple[Term, RuleId, Path]] = []
    match t:
        case Scaled(a, body):
            if a == 0:
                out.append((ZERO, RuleId.ZERO_SCALAR, ()))
            if a == 1:
                out.append((body, RuleId.ONE_SCALAR, ()))
            match body:
                case Zero():
                    out.append((ZERO, RuleId.SCALAR_ZERO_TERM, ()))
                case Scaled(b, inner):
                    out.append((Scaled(a * b, inner), RuleId.SCALAR_SCALAR, ()))
                case Sum(parts):
                    reduct = tsum(Scaled(a, p) for p in parts)
                    out.append((reduct, RuleId.SCALAR_DISTRIB, ()))
        case Sum(parts):
            for i, p in enumerate(parts):
                if isinstance(p, Zero):
                    rest = parts[:i] + parts[i + 1 :]
                    out.append((tsum(rest), RuleId.PLUS_ZERO, (i,)))
            for i in range(len(parts)):
                for j in range(i + 1, len(parts)):
                    out.extend(
                        (tsum(parts[:i] + parts[i + 1 : j] + parts[j + 1 :] + (r,)), rule, (i,))
                        for r, rule in _pair_steps(parts[i], parts[j])
                    )
        case App(fn, arg):
            match fn:
                case Sum(parts):
                    out.append((tsum(App(p, arg) for p in parts), RuleId.APP_DISTRIB_L, ()))
                case Scaled(a, body):
                    out.append((Scaled(a, App(body, arg)), RuleId.SCALAR_OUT_L, ()))
                case Zero():
                    out.append((ZERO, RuleId.ZERO_APP_L, ()))
                case Abs(var, _, body):
                    if is_basis(arg):
                        out.append((subst_term(body, var, arg), RuleId.BETA_TERM, ()))
            match arg:
                case Sum(parts):
                    out.append((tsum(App(fn, p) for p in parts), RuleId.APP_DISTRIB_R, ()))
                case Scaled(a, body):
                    out.append((Scaled(a, App(fn, body)), RuleId.SCALAR_OUT_R, ()))
                case Zero():
                    out.append((ZERO, RuleId.ZERO_APP_R, ()))
        case TyApp(fn, ty):
            match fn:
                case TyAbs(var, body):
                    out.append((subst_type_in_term(body, var, ty), RuleId.BETA_TYPE, ()))
    return out


def _pair_steps(a: Term, b: Term) -> list[tuple[Term, RuleId]]:
    """Factoring reducts for one unordered pair of summands."""
    out: list[tuple[Term, RuleId]] = []
    if isinstance(a, Scaled) and isinstance(b, Scaled) and alpha_eq(a.body, b.body):
        out.append((Scaled(a.coeff + b.coeff, a.body), RuleId.FACTOR_BOTH))
    if isinstance(a, Scaled) and alpha_eq(a.body, b):
        out.append((Scaled(a.coeff + 1, a.body), RuleId.FACTOR_ONE))
    if isinstance(b, Scaled) and alpha_eq(b.body, a):
        out.append((Scaled(b.coeff + 1, b.body), RuleId.FACTOR_ONE))
    if alpha_eq(a, b):
        out.append((Scaled(Fraction(2), a), RuleId.FACTOR_NONE))
    return out


def _children(t: Term) -> list[tuple[int, Term]]:
    match t:
        case Abs(_, _, body) | TyAbs(_, body) | Scaled(_, body):
            return [(0, body)]
        case App(fn, arg):
            return [(0, fn), (1, arg)]
        case TyApp(fn, _):
            return [(0, fn)]
        case Sum(parts):
            return list(enumerate(parts))
        case _:
            return []


def _replace_child(t: Term, idx: int, child: Term) -> Term:
    match t:
        case Abs(var, ann, _):
            return Abs(var, ann, child)
        case TyAbs(var, _):
            return TyAbs(var, child)
        case Scaled(a, _):
            return Scaled(a, child)
        case App(fn, arg):
            return App(child, arg) if idx == 0 else App(fn, child)
        case TyApp(_, ty):
            return TyApp(child, ty)
        case Sum(parts):
            return tsum(parts[:idx] + (child,) + parts[idx + 1 :])
    raise TypeError(f"no child {idx} in {t!r}")


def step(t: Term) -> list[Step]:
    """All one-step reducts, sorted by (path, rule, reduct key)."""
    found: dict[tuple, Step] = {}

    def walk(node: Term, path: Path, rebuild) -> None:
        for reduct, rule, sub in _local_steps(node):
            whole = rebuild(reduct)
            key = (path + sub, rule.value, term_key(whole))
            found.setdefault(key, Step(whole, rule, path + sub))
        for idx, child in _children(node):
            walk(
                child,
                path + (idx,),
                lambda new, idx=idx, node=node: rebuild(_replace_child(node, idx, new)),
            )

    walk(t, (), lambda new: new)
    return [found[k] for k in sorted(found)]


def is_normal(t: Term) -> bool:
    """True when no rule applies anywhere."""
    return not step(t)


# ---------------------------------------------------------------------------
# Strategies
# ---------------------------------------------------------------------------


class Strategy:
    """A deterministic choice function over the sorted redex list."""

    def select(self, steps: list[Step]) -> Step:
        raise NotImplementedError


class Leftmost(Strategy):
    """Pick the redex with the smallest (path, rule, reduct) key."""

    def select(self, steps: list[Step]) -> Step:
        return steps[0]


class Rightmost(Strategy):
    """Pick the redex with the largest (path, rule, reduct) key."""

    def select(self, steps: list[Step]) -> Step:
        return steps[-1]


class RandomChoice(Strategy):
    """Pick uniformly from the redex list with a seeded generator."""

    def __init__(self, seed: int) -> None:
        self.rng = random.Random(seed)

    def select(self, steps: list[Step]) -> Step:
        return steps[self.rng.randrange(len(steps))]


class ByGroup(Strategy):
    """Restrict to the first rule group (in priority order) that has a redex."""

    def __init__(self, priority: tuple[str, ...] = ("beta", "A", "E", "F")) -> None:
        self.priority = priority

    def select(self, steps: list[Step]) -> Step:
        for group in self.priority:
            filtered = [s for s in steps if rule_group(s.rule) == group]
            if filtered:
                return filtered[0]
        return steps[0]


BETA_FIRST = ("beta", "A", "E", "F")
FACTOR_FIRST = ("F", "E", "A", "beta")

DEFAULT_FUEL = 10_000


@dataclass(frozen=True)
class NormalizeResult:
    """Final term, the trace of steps taken, and whether fuel ran out."""

    term: Term
    trace: tuple[Step, ...]
    exhausted: bool


def normalize(
    t: Term, strategy: Strategy | None = None, fuel: int = DEFAULT_FUEL, want_trace: bool = True
) -> NormalizeResult:
    """Reduce with a strategy until normal or out of fuel."""
    strategy = strategy or Leftmost()
    trace: list[Step] = []
    current = t
    for _ in range(fuel):
        steps = step(current)
        if not steps:
            return NormalizeResult(current, tuple(trace), False)
        chosen = strategy.select(steps)
        current = chosen.term
        if want_trace:
            trace.append(chosen)
    if not step(current):
        return NormalizeResult(current, tuple(trace), False)
    return NormalizeResult(current, tuple(trace), True)


class FuelExhausted(Exception):
    """Raised by callers that require a normal form within the fuel bound."""

    def __init__(self, result: NormalizeResult) -> None:
        super().__init__(f"no normal form within {len(result.trace)} steps")
        self.result = result


def normal_form(t: Term, fuel: int = DEFAULT_FUEL) -> Term:
    """Leftmost normal form; raises FuelExhausted when fuel runs out."""
    res = normalize(t, Leftmost(), fuel, want_trace=False)
    if res.exhausted:
        raise FuelExhausted(res)
    return res.term


# ---------------------------------------------------------------------------
# Formal linear-combination reading
# ---------------------------------------------------------------------------


def lincomb(t: Term) -> list[tuple[Fraction, Term]]:
    """Read a term as a weighted combination of its non-sum, non-scaled atoms.

    Scalar-bookkeeping and factoring steps (groups E and F) leave this
    reading unchanged; distribution and beta steps may change it.
    """
    acc: dict[tuple, tuple[Fraction, Term]] = {}

    def add(node: Term, weight: Fraction) -> None:
        match node:
            case Zero():
                return
            case Sum(parts):
                for p in parts:
                    add(p, weight)
            case Scaled(a, body):
                add(body, weight * a)
            case _:
                key = term_key(node)
                if key in acc:
                    acc[key] = (acc[key][0] + weight, acc[key][1])
                else:
                    acc[key] = (weight, node)

    add(t, Fraction(1))
    return [acc[k] for k in sorted(acc)]


def lincomb_coeff(t: Term, atom: Term) -> Fraction:
    """Coefficient of one atom (up to alpha) in the combination reading."""
    target = term_key(atom)
    for coeff, rep in lincomb(t):
        if term_key(rep) == target:
            return coeff
    return Fraction(0)
