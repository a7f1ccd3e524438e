"""Rule-saturation reference models for the three order relations.

``typecheck.precedes``, ``additive.sqleq``, and ``fsysp.f_sqleq`` decide
their orders by structural analysis.  This module rebuilds each relation a
second, deliberately naive way: enumerate every inhabitant of a bounded
universe, then saturate the defining rules of the order over that universe
until nothing new can be derived.  ``check_*`` compares the saturated
relation against the decision procedure on every pair and reports the
disagreements (an empty report is the expected outcome).

Universes are closed under subterms and deduplicated by nameless key, so
alpha-equivalent inhabitants share one representative.  Congruence rules
are applied representative-to-representative, with conclusions looked up
by key; rule instances whose conclusion falls outside the universe are
dropped, which is the usual finite-universe reading of a least fixpoint.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .additive import sqleq, strip_zero_parts
from .fsysp import (
    F_FST,
    F_SND,
    F_STAR,
    FApp,
    FFst,
    FLam,
    FPair,
    FSnd,
    FTerm,
    FVar,
    f_canonical,
    f_parts,
    f_sqleq,
    f_term_str,
    fterm_key,
)
from .syntax import (
    ZERO,
    ZERO_TYPE,
    Abs,
    App,
    Arrow,
    Forall,
    Sum,
    Term,
    TyAbs,
    TyApp,
    TySum,
    TyVar,
    Type,
    UnitType,
    Var,
    term_key,
    term_str,
    tsum,
    ty_join,
    ty_key,
    ty_scale,
    type_key,
    type_str,
    unit,
)
from .typecheck import precedes

__all__ = [
    "Agreement",
    "type_universe",
    "precedes_closure",
    "check_precedes",
    "term_size",
    "additive_universe",
    "sqleq_closure",
    "check_sqleq",
    "f_term_size",
    "f_term_universe",
    "f_sqleq_closure",
    "check_f_sqleq",
]

_MISMATCH_CAP = 50


@dataclass(frozen=True)
class Agreement:
    """Outcome of comparing a decision procedure against a saturated relation."""

    universe: int
    pairs: int
    related: int
    mismatch_total: int
    mismatches: tuple[tuple[str, str, bool, bool], ...]  # (left, right, saturated, decided)

    @property
    def ok(self) -> bool:
        return self.mismatch_total == 0


class _Closure:
    """A growable relation on indices, kept transitively closed as it grows."""

    def __init__(self, n: int):
        self.fwd: list[set[int]] = [set() for _ in range(n)]
        self.bwd: list[set[int]] = [set() for _ in range(n)]
        self.queue: deque[tuple[int, int]] = deque()

    def add(self, i: int, j: int) -> None:
        if j not in self.fwd[i]:
            self.fwd[i].add(j)
            self.bwd[j].add(i)
            self.queue.append((i, j))

    def has(self, i: int, j: int) -> bool:
        return j in self.fwd[i]

    def size(self) -> int:
        return sum(len(s) for s in self.fwd)

    def drain(self, apply_rules) -> None:
        while self.queue:
            i, j = self.queue.popleft()
            for k in list(self.fwd[j]):
                self.add(i, k)
            for k in list(self.bwd[i]):
                self.add(k, j)
            apply_rules(i, j)


# ---------------------------------------------------------------------------
# Precision order on types
# ---------------------------------------------------------------------------

# Quantifier binders are named by nesting level, so every binder position in
# the universe has a fixed name and alpha-classes collapse structurally.
_BOUND = ("B1", "B2", "B3", "B4")


class _TypeTables:
    """All canonical types of bounded depth, at every binder-nesting level."""

    def __init__(self, max_depth: int, base: tuple[str, ...]):
        self.max_depth = max_depth
        self.base = base
        self._units: dict[tuple[int, int], list[UnitType]] = {}
        self._types: dict[tuple[int, int], list[Type]] = {}
        self.units(max_depth, 0)
        self.types(max_depth, 0)

    def units(self, depth: int, level: int) -> list[UnitType]:
        cell = self._units.get((depth, level))
        if cell is not None:
            return cell
        out: dict[tuple, UnitType] = {}
        for name in self.base + _BOUND[:level]:
            tv = TyVar(name)
            out.setdefault(ty_key(tv), tv)
        if depth > 1:
            for dom in self.units(depth - 1, level):
                for cod in self.types(depth - 1, level):
                    arrow = Arrow(dom, cod)
                    out.setdefault(ty_key(arrow), arrow)
            for body in self.units(depth - 1, level + 1):
                forall = Forall(_BOUND[level], body)
                out.setdefault(ty_key(forall), forall)
        cell = list(out.values())
        self._units[(depth, level)] = cell
        return cell

    def types(self, depth: int, level: int) -> list[Type]:
        cell = self._types.get((depth, level))
        if cell is not None:
            return cell
        out: dict[tuple, Type] = {type_key(ZERO_TYPE): ZERO_TYPE}
        for u in self.units(depth, level):
            t = unit(u)
            out.setdefault(type_key(t), t)
        if depth > 1:
            prev = self.types(depth - 1, level)
            for t1 in prev:
                for t2 in prev:
                    j = ty_join([t1, t2])
                    out.setdefault(type_key(j), j)
        cell = list(out.values())
        self._types[(depth, level)] = cell
        return cell

    def domain(self) -> list[Type]:
        """Every type any saturation rule may mention, deduplicated."""
        out: dict[tuple, Type] = {}
        for cell in self._types.values():
            for t in cell:
                out.setdefault(type_key(t), t)
        for cell in self._units.values():
            for u in cell:
                t = unit(u)
                out.setdefault(type_key(t), t)
        return list(out.values())


def type_universe(max_depth: int = 3, base: tuple[str, ...] = ("X", "Y")) -> list[Type]:
    """Canonical types of the given depth over the base variables."""
    return list(_TypeTables(max_depth, base).types(max_depth, 0))


def _single(t: Type) -> UnitType | None:
    if isinstance(t, TySum) and len(t.units) == 1:
        return t.units[0]
    return None


def _precedes_matrix(domain: list[Type]) -> np.ndarray:
    n = len(domain)
    idx = {type_key(t): i for i, t in enumerate(domain)}

    # Join table: jmap[a, b] is the index of domain[a] + domain[b], or -1.
    jmap = np.full((n, n), -1, dtype=np.int32)
    for a in range(n):
        for b in range(a, n):
            j = idx.get(type_key(ty_join([domain[a], domain[b]])))
            if j is not None:
                jmap[a, b] = j
                jmap[b, a] = j
    partners = [np.nonzero(jmap[a] >= 0)[0] for a in range(n)]

    relation = np.zeros((n, n), dtype=bool)
    np.fill_diagonal(relation, True)

    # Weakening: n-fold sums of the same type, ordered by the repeat count
    # (the 0-fold sum is the empty type, whose own chain never grows).
    for i, t in enumerate(domain):
        chain = [idx[type_key(ZERO_TYPE)]]
        count = 1
        while True:
            j = idx.get(type_key(ty_scale(count, t)))
            if j is None or j == chain[-1]:
                break
            chain.append(j)
            count += 1
        for p in range(len(chain)):
            for q in range(p, len(chain)):
                relation[chain[p], chain[q]] = True

    arrows = [i for i, t in enumerate(domain) if isinstance(_single(t), Arrow)]
    arrow_ids = np.array(arrows, dtype=np.intp)
    arrow_dom = np.array(
        [idx[type_key(unit(_single(domain[i]).dom))] for i in arrows], dtype=np.intp
    )
    arrow_cod = np.array([idx[type_key(_single(domain[i]).cod)] for i in arrows], dtype=np.intp)

    forall_groups: dict[str, list[int]] = {}
    for i, t in enumerate(domain):
        u = _single(t)
        if isinstance(u, Forall):
            forall_groups.setdefault(u.var, []).append(i)
    forall_ids = {
        var: (
            np.array(ids, dtype=np.intp),
            np.array([idx[type_key(unit(_single(domain[i]).body))] for i in ids], dtype=np.intp),
        )
        for var, ids in forall_groups.items()
    }

    while True:
        before = int(relation.sum())

        # Arrow congruence: contravariant domain, covariant codomain.
        if len(arrows) > 0:
            good = relation[np.ix_(arrow_dom, arrow_dom)].T & relation[np.ix_(arrow_cod, arrow_cod)]
            relation[np.ix_(arrow_ids, arrow_ids)] |= good

        # Quantifier congruence: bodies compared under the shared binder.
        for ids, bodies in forall_ids.values():
            relation[np.ix_(ids, ids)] |= relation[np.ix_(bodies, bodies)]

        # Sum congruence: both components may move, the join follows.
        for a in range(n):
            row_a = np.nonzero(relation[a])[0]
            for c in partners[a]:
                target = jmap[a, c]
                row_c = np.nonzero(relation[c])[0]
                cols = jmap[np.ix_(row_a, row_c)].ravel()
                cols = cols[cols >= 0]
                if cols.size:
                    relation[target, cols] = True

        # Transitivity.
        reach = relation.astype(np.uint8)
        relation |= (reach @ reach) > 0

        if int(relation.sum()) == before:
            return relation


def precedes_closure(
    max_depth: int = 3, base: tuple[str, ...] = ("X", "Y")
) -> tuple[list[Type], set[tuple[int, int]]]:
    """Saturate the precision-order rules over all types of bounded depth."""
    tables = _TypeTables(max_depth, base)
    domain = tables.domain()
    matrix = _precedes_matrix(domain)
    universe = tables.types(max_depth, 0)
    idx = {type_key(t): i for i, t in enumerate(domain)}
    keep = np.array([idx[type_key(t)] for t in universe], dtype=np.intp)
    sub = matrix[np.ix_(keep, keep)]
    pairs = {(int(i), int(j)) for i, j in zip(*np.nonzero(sub))}
    return universe, pairs


def check_precedes(max_depth: int = 3, base: tuple[str, ...] = ("X", "Y")) -> Agreement:
    """Compare the matching-based decision against the saturated relation."""
    universe, closed = precedes_closure(max_depth, base)
    mismatches: list[tuple[str, str, bool, bool]] = []
    total = 0
    for i, a in enumerate(universe):
        for j, b in enumerate(universe):
            decided = precedes(a, b)
            saturated = (i, j) in closed
            if decided != saturated:
                total += 1
                if len(mismatches) < _MISMATCH_CAP:
                    mismatches.append((type_str(a), type_str(b), saturated, decided))
    return Agreement(
        universe=len(universe),
        pairs=len(universe) ** 2,
        related=len(closed),
        mismatch_total=total,
        mismatches=tuple(mismatches),
    )


# ---------------------------------------------------------------------------
# Copy-count order on additive terms
# ---------------------------------------------------------------------------

_ANN = TyVar("X")


def term_size(t: Term) -> int:
    """Node count of a term, annotations included."""
    match t:
        case Abs(_, _, body):
            return 2 + term_size(body)
        case TyAbs(_, body):
            return 1 + term_size(body)
        case App(fn, arg):
            return 1 + term_size(fn) + term_size(arg)
        case TyApp(fn, _):
            return 2 + term_size(fn)
        case Sum(parts):
            return len(parts) - 1 + sum(term_size(p) for p in parts)
        case _:
            return 1  # Zero


@dataclass
class _TermUniverse:
    terms: list[Term] = field(default_factory=list)
    index: dict[tuple, int] = field(default_factory=dict)
    sizes: list[int] = field(default_factory=list)

    def intern(self, t: Term, size: int) -> None:
        k = term_key(t)
        if k not in self.index:
            self.index[k] = len(self.terms)
            self.terms.append(t)
            self.sizes.append(size)

    def lookup(self, t: Term) -> int | None:
        return self.index.get(term_key(t))


def additive_universe(max_size: int = 6, variables: tuple[str, ...] = ("x", "y")) -> list[Term]:
    """Every canonical additive term up to the size bound over the pool."""
    return _additive_universe(max_size, variables).terms


def _additive_universe(max_size: int, variables: tuple[str, ...]) -> _TermUniverse:
    uni = _TermUniverse()
    by_size: dict[int, list[Term]] = {s: [] for s in range(1, max_size + 1)}

    def intern(t: Term, s: int) -> None:
        before = len(uni.terms)
        uni.intern(t, s)
        if len(uni.terms) > before:
            by_size[s].append(t)

    for v in variables:
        intern(Var(v), 1)
    intern(ZERO, 1)
    for s in range(2, max_size + 1):
        if s >= 3:
            for body in by_size[s - 2]:
                for v in variables:
                    intern(Abs(v, _ANN, body), s)
        for body in by_size[s - 1]:
            intern(TyAbs(_ANN.name, body), s)
        if s >= 3:
            for fn in by_size[s - 2]:
                intern(TyApp(fn, _ANN), s)
        for k in range(1, s - 1):
            for fn in by_size[k]:
                for arg in by_size[s - 1 - k]:
                    intern(App(fn, arg), s)
        # Sums: multisets of non-sum parts, plus-nodes included in the size.
        pool = [
            (sz, t)
            for sz in range(1, s)
            for t in by_size[sz]
            if not isinstance(t, Sum)
        ]

        def sums(start: int, remaining: int, chosen: list[Term]) -> None:
            if len(chosen) >= 2 and remaining == 0:
                intern(tsum(list(chosen)), s)
            for i in range(start, len(pool)):
                sz, t = pool[i]
                cost = sz if not chosen else sz + 1
                if cost <= remaining:
                    chosen.append(t)
                    sums(i, remaining - cost, chosen)
                    chosen.pop()

        sums(0, s, [])
    return uni


def sqleq_closure(
    max_size: int = 6, variables: tuple[str, ...] = ("x", "y")
) -> tuple[list[Term], set[tuple[int, int]]]:
    """Saturate the copy-count-order rules over bounded additive terms.

    Zero summands are the unit of the sum, so the rules run over the
    zero-stripped representative of each term and the saturated relation
    is pulled back to the full universe through that quotient.  Padding
    itself is one rule instance: whenever ``a <= b`` and a sum extends
    ``b`` with extra summands, ``a`` also sits below the extended sum
    (the extras absorb the empty sum, which is below everything).
    """
    uni = _additive_universe(max_size, variables)
    terms = uni.terms
    rep = [uni.lookup(strip_zero_parts(t)) for t in terms]
    assert all(r is not None for r in rep), "stripping closed over the universe"
    is_rep = [rep[i] == i for i in range(len(terms))]
    closure = _Closure(len(terms))

    # Repeat-count rule: n copies of t sit below m copies whenever n <= m
    # (zero copies is the zero term).
    for i, t in enumerate(terms):
        if not is_rep[i]:
            continue
        chain = [uni.lookup(ZERO)]
        count = 1
        while True:
            j = uni.lookup(tsum([t] * count))
            if j is None:
                break
            chain.append(rep[j])
            count += 1
        for p in range(len(chain)):
            for q in range(p, len(chain)):
                closure.add(chain[p], chain[q])

    # Application congruence tables.
    app_parent: dict[tuple[int, int], int] = {}
    apps_by_fn: dict[int, list[tuple[int, int]]] = {}
    apps_by_arg: dict[int, list[tuple[int, int]]] = {}
    # Sum congruence tables: every binary split of every canonical sum,
    # plus, per component, the sums extending it (for the padding rule).
    join_parent: dict[tuple[int, int], int] = {}
    joins_by_left: dict[int, list[tuple[int, int]]] = {}
    sum_supersets: dict[int, set[int]] = {}
    for p_i, t in enumerate(terms):
        if not is_rep[p_i]:
            continue
        if isinstance(t, App):
            f_i = uni.lookup(t.fn)
            a_i = uni.lookup(t.arg)
            app_parent[(f_i, a_i)] = p_i
            apps_by_fn.setdefault(f_i, []).append((a_i, p_i))
            apps_by_arg.setdefault(a_i, []).append((f_i, p_i))
        elif isinstance(t, Sum):
            parts = t.parts
            for mask in range(1, (1 << len(parts)) - 1):
                left = [parts[b] for b in range(len(parts)) if mask & (1 << b)]
                right = [parts[b] for b in range(len(parts)) if not mask & (1 << b)]
                l_i = uni.lookup(tsum(left))
                r_i = uni.lookup(tsum(right))
                join_parent[(l_i, r_i)] = p_i
                joins_by_left.setdefault(l_i, []).append((r_i, p_i))
                sum_supersets.setdefault(l_i, set()).add(p_i)
                sum_supersets.setdefault(r_i, set()).add(p_i)

    fwd = closure.fwd

    def apply_rules(a: int, b: int) -> None:
        ta, tb = terms[a], terms[b]
        for v in variables:
            pa = uni.lookup(Abs(v, _ANN, ta))
            if pa is not None:
                pb = uni.lookup(Abs(v, _ANN, tb))
                if pb is not None:
                    closure.add(pa, pb)
        pa = uni.lookup(TyAbs(_ANN.name, ta))
        if pa is not None:
            pb = uni.lookup(TyAbs(_ANN.name, tb))
            if pb is not None:
                closure.add(pa, pb)
        pa = uni.lookup(TyApp(ta, _ANN))
        if pa is not None:
            pb = uni.lookup(TyApp(tb, _ANN))
            if pb is not None:
                closure.add(pa, pb)
        for arg, p1 in apps_by_fn.get(a, ()):
            for arg2 in list(fwd[arg]):
                p2 = app_parent.get((b, arg2))
                if p2 is not None:
                    closure.add(p1, p2)
        for fn, p1 in apps_by_arg.get(a, ()):
            for fn2 in list(fwd[fn]):
                p2 = app_parent.get((fn2, b))
                if p2 is not None:
                    closure.add(p1, p2)
        for rest, p1 in joins_by_left.get(a, ()):
            for rest2 in list(fwd[rest]):
                p2 = join_parent.get((b, rest2))
                if p2 is not None:
                    closure.add(p1, p2)
        for p2 in sum_supersets.get(b, ()):
            closure.add(a, p2)

    closure.drain(apply_rules)
    members: dict[int, list[int]] = {}
    for i, r in enumerate(rep):
        members.setdefault(r, []).append(i)
    closed: set[tuple[int, int]] = set()
    for ri, js in enumerate(closure.fwd):
        for rj in js:
            for i in members[ri]:
                for j in members[rj]:
                    closed.add((i, j))
    return terms, closed


def check_sqleq(max_size: int = 6, variables: tuple[str, ...] = ("x", "y")) -> Agreement:
    """Compare the matching-based decision against the saturated relation."""
    terms, closed = sqleq_closure(max_size, variables)
    mismatches: list[tuple[str, str, bool, bool]] = []
    total = 0
    for i, a in enumerate(terms):
        for j, b in enumerate(terms):
            decided = sqleq(a, b)
            saturated = (i, j) in closed
            if decided != saturated:
                total += 1
                if len(mismatches) < _MISMATCH_CAP:
                    mismatches.append((term_str(a), term_str(b), saturated, decided))
    return Agreement(
        universe=len(terms),
        pairs=len(terms) ** 2,
        related=len(closed),
        mismatch_total=total,
        mismatches=tuple(mismatches),
    )


# ---------------------------------------------------------------------------
# Approximation order on translated terms
# ---------------------------------------------------------------------------


def f_term_size(t: FTerm) -> int:
    """Node count; a projection head counts as one former, not two."""
    match t:
        case FLam(_, body):
            return 1 + f_term_size(body)
        case FApp(fn, arg) if isinstance(fn, (FFst, FSnd)):
            return 1 + f_term_size(arg)
        case FApp(fn, arg):
            return 1 + f_term_size(fn) + f_term_size(arg)
        case FPair(left, right):
            return 1 + f_term_size(left) + f_term_size(right)
        case _:
            return 1


@dataclass
class _FUniverse:
    terms: list[FTerm] = field(default_factory=list)
    index: dict[tuple, int] = field(default_factory=dict)

    def intern(self, t: FTerm) -> bool:
        k = fterm_key(t)
        if k in self.index:
            return False
        self.index[k] = len(self.terms)
        self.terms.append(t)
        return True

    def lookup(self, t: FTerm) -> int | None:
        return self.index.get(fterm_key(t))


def f_term_universe(
    max_size: int = 6,
    variables: tuple[str, ...] = ("x", "y"),
    projections: bool = False,
) -> list[FTerm]:
    """Every target-language term up to the size bound over the pool.

    With ``projections`` the unary projection formers join the grammar
    (their congruence otherwise only ever fires through application).
    """
    return _f_universe(max_size, variables, projections).terms


def _f_universe(max_size: int, variables: tuple[str, ...], projections: bool) -> _FUniverse:
    uni = _FUniverse()
    by_size: dict[int, list[FTerm]] = {s: [] for s in range(1, max_size + 1)}

    def intern(t: FTerm, s: int) -> None:
        if uni.intern(t):
            by_size[s].append(t)

    for v in variables:
        intern(FVar(v), 1)
    intern(F_STAR, 1)
    for s in range(2, max_size + 1):
        for body in by_size[s - 1]:
            for v in variables:
                intern(FLam(v, body), s)
            if projections:
                intern(FApp(F_FST, body), s)
                intern(FApp(F_SND, body), s)
        for k in range(1, s - 1):
            for fn in by_size[k]:
                for arg in by_size[s - 1 - k]:
                    intern(FApp(fn, arg), s)
                    intern(FPair(fn, arg), s)
    return uni


def _f_leftnest(parts: list[FTerm]) -> FTerm:
    out = parts[0]
    for p in parts[1:]:
        out = FPair(out, p)
    return out


def f_sqleq_closure(
    max_size: int = 6,
    variables: tuple[str, ...] = ("x", "y"),
    projections: bool = False,
) -> tuple[list[FTerm], set[tuple[int, int]]]:
    """Saturate the approximation-order clauses over bounded terms.

    Pair arrangement and unit components carry no meaning (pairs inherit
    the sum's equational theory), so the rules run over the canonical
    arrangement representative of each term and the saturated relation is
    pulled back to the full universe through that quotient.  Padding is
    one rule instance: whenever ``a <= b`` and a pair extends ``b`` with
    extra leaves, ``a`` also sits below the extended pair (the extras
    absorb the unit value, which is below everything).
    """
    uni = _f_universe(max_size, variables, projections)
    terms = uni.terms
    rep = [uni.lookup(f_canonical(t)) for t in terms]
    assert all(r is not None for r in rep), "canonicalization closed over the universe"
    is_rep = [rep[i] == i for i in range(len(terms))]
    closure = _Closure(len(terms))

    star = uni.lookup(F_STAR)
    # Repeat-count chains: n leaves of t sit below m of them whenever
    # n <= m (zero leaves is the unit value).
    for i, t in enumerate(terms):
        if not is_rep[i]:
            continue
        chain = [star]
        stacked = t
        while True:
            j = uni.lookup(stacked)
            if j is None:
                break
            chain.append(rep[j])
            stacked = FPair(stacked, t)
        for p in range(len(chain)):
            for q in range(p, len(chain)):
                closure.add(chain[p], chain[q])

    # Application and projection congruence tables.
    app_parent: dict[tuple[int, int], int] = {}
    apps_by_fn: dict[int, list[tuple[int, int]]] = {}
    apps_by_arg: dict[int, list[tuple[int, int]]] = {}
    proj_parents: dict[tuple[bool, int], int] = {}  # (is_fst, child) -> parent
    # Pair congruence tables: every binary split of every canonical pair's
    # leaf multiset, plus, per side, the pairs extending it (for padding).
    join_parent: dict[tuple[int, int], int] = {}
    joins_by_left: dict[int, list[tuple[int, int]]] = {}
    pair_supersets: dict[int, set[int]] = {}
    for p_i, t in enumerate(terms):
        if not is_rep[p_i]:
            continue
        if isinstance(t, FApp) and isinstance(t.fn, (FFst, FSnd)):
            proj_parents[(isinstance(t.fn, FFst), uni.lookup(t.arg))] = p_i
        elif isinstance(t, FApp):
            f_i = uni.lookup(t.fn)
            a_i = uni.lookup(t.arg)
            app_parent[(f_i, a_i)] = p_i
            apps_by_fn.setdefault(f_i, []).append((a_i, p_i))
            apps_by_arg.setdefault(a_i, []).append((f_i, p_i))
        elif isinstance(t, FPair):
            leaves = f_parts(t)
            for mask in range(1, (1 << len(leaves)) - 1):
                chosen = [leaves[b] for b in range(len(leaves)) if mask & (1 << b)]
                others = [leaves[b] for b in range(len(leaves)) if not mask & (1 << b)]
                l_i = uni.lookup(_f_leftnest(chosen))
                r_i = uni.lookup(_f_leftnest(others))
                join_parent[(l_i, r_i)] = p_i
                joins_by_left.setdefault(l_i, []).append((r_i, p_i))
                pair_supersets.setdefault(l_i, set()).add(p_i)
                pair_supersets.setdefault(r_i, set()).add(p_i)

    fwd = closure.fwd

    def apply_rules(a: int, b: int) -> None:
        ta, tb = terms[a], terms[b]
        for v in variables:
            # Binding v can re-sort pair leaves underneath, so the wrapped
            # conclusions go back through the representative map.
            pa = uni.lookup(FLam(v, ta))
            if pa is not None:
                pb = uni.lookup(FLam(v, tb))
                if pb is not None:
                    closure.add(rep[pa], rep[pb])
        for is_fst in (True, False):
            pa = proj_parents.get((is_fst, a))
            pb = proj_parents.get((is_fst, b))
            if pa is not None and pb is not None:
                closure.add(pa, pb)
        for arg, p1 in apps_by_fn.get(a, ()):
            for arg2 in list(fwd[arg]):
                p2 = app_parent.get((b, arg2))
                if p2 is not None:
                    closure.add(p1, p2)
        for fn, p1 in apps_by_arg.get(a, ()):
            for fn2 in list(fwd[fn]):
                p2 = app_parent.get((fn2, b))
                if p2 is not None:
                    closure.add(p1, p2)
        for rest, p1 in joins_by_left.get(a, ()):
            for rest2 in list(fwd[rest]):
                p2 = join_parent.get((b, rest2))
                if p2 is not None:
                    closure.add(p1, p2)
        for p2 in pair_supersets.get(b, ()):
            closure.add(a, p2)

    closure.drain(apply_rules)
    members: dict[int, list[int]] = {}
    for i, r in enumerate(rep):
        members.setdefault(r, []).append(i)
    closed: set[tuple[int, int]] = set()
    for ri, js in enumerate(closure.fwd):
        for rj in js:
            for i in members[ri]:
                for j in members[rj]:
                    closed.add((i, j))
    return terms, closed


def check_f_sqleq(
    max_size: int = 6,
    variables: tuple[str, ...] = ("x", "y"),
    projections: bool = False,
) -> Agreement:
    """Compare the structural decision against the saturated relation."""
    terms, closed = f_sqleq_closure(max_size, variables, projections)
    mismatches: list[tuple[str, str, bool, bool]] = []
    total = 0
    for i, a in enumerate(terms):
        for j, b in enumerate(terms):
            decided = f_sqleq(a, b)
            saturated = (i, j) in closed
            if decided != saturated:
                total += 1
                if len(mismatches) < _MISMATCH_CAP:
                    mismatches.append((f_term_str(a), f_term_str(b), saturated, decided))
    return Agreement(
        universe=len(terms),
        pairs=len(terms) ** 2,
        related=len(closed),
        mismatch_total=total,
        mismatches=tuple(mismatches),
    )
