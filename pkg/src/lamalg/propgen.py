"""Deterministic fuzzing: typed-term generation and the metatheory harness.

The generator builds well-typed terms bottom-up over a fixed starting
context, threading binders and tracking the type of every piece.  Weighted
construction plus targeted decorations steer the stream so that every term
former, weights on both sides of one (including zero), and the redex pattern
of every rewrite rule all occur across a run.  Every emitted pair is
re-checked with the typechecker before it leaves the generator, and identical
configurations always produce identical streams.

``run_checks`` replays the metatheory on each sample:

* subject reduction at every node of the leftmost trace,
* termination of five reduction strategies within the fuel bound,
* agreement of all strategies' normal forms up to alpha-equivalence,
* both substitution properties (term-for-variable and type-for-variable),
* typing preservation of the copy-count abstraction,
* the copy-count square (abstract-then-normalize vs normalize-then-abstract),
* the product-translation square and the translated shape's type agreement,
* growth of type precision and summand counts along the leftmost trace,

together with spot axioms for the three orders and, once per run, the
rule-saturation agreement suites at small bounds.  Results are collected in
per-check reports plus one structured record per sample, ready to serialize
as line-delimited JSON; figures summarising a run can be rendered to files.
"""

from __future__ import annotations

import json
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from random import Random
from typing import Iterator

from .additive import a_synthesize, derive, lesssim, sigma
from .fsysp import f_check, f_lessapprox, f_sqleq, translate
from .oracles import (
    check_f_sqleq,
    check_precedes,
    check_sqleq,
    term_size,
)
from .rewrite import (
    BETA_FIRST,
    DEFAULT_FUEL,
    FACTOR_FIRST,
    ByGroup,
    Leftmost,
    RandomChoice,
    Rightmost,
    RuleId,
    Strategy,
    normalize,
    step,
)
from .syntax import (
    ZERO,
    ZERO_TYPE,
    Abs,
    App,
    Arrow,
    Context,
    Forall,
    Scaled,
    Term,
    TyAbs,
    TyApp,
    TyVar,
    Type,
    UnitType,
    Var,
    alpha_eq,
    floor_scalar,
    free_tyvars_unit,
    subst_term,
    subst_type_in_term,
    subst_type_in_type,
    subst_type_in_unit,
    summands,
    term_str,
    tsum,
    ty_join,
    ty_scale,
    type_equiv,
    type_str,
    unit,
    unit_equiv,
)
from .typecheck import precedes, sr_check, synthesize

# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

#: Weight pool mixing the neutral elements, values on both sides of one, and
#: values whose integer floors are zero, one and two.
SCALAR_POOL: tuple[Fraction, ...] = (
    Fraction(0),
    Fraction(1, 2),
    Fraction(9, 10),
    Fraction(1),
    Fraction(11, 10),
    Fraction(2),
    Fraction(5, 2),
)


@dataclass(frozen=True)
class GenConfig:
    """Everything that determines a fuzzing run.

    Two runs with equal configurations produce identical sample streams and
    identical reports.
    """

    seed: int = 0
    sample_count: int = 100
    max_depth: int = 4
    max_summands: int = 3
    scalars: tuple[Fraction, ...] = SCALAR_POOL
    tyvars: tuple[str, ...] = ("X", "Y")
    fuel: int = DEFAULT_FUEL
    #: Number of leftmost-trace nodes per sample given a full reduct-by-reduct
    #: subject-reduction sweep (each node checks all of its one-step reducts).
    sr_trace_cap: int = 25
    #: Bounds for the once-per-run rule-saturation agreement suites.
    oracle_type_depth: int = 2
    oracle_term_size: int = 4
    oracle_f_size: int = 4


def base_context(cfg: GenConfig) -> Context:
    """A deterministic starting context over the configured type variables.

    Provides a value of each base type, a few arrows (one of which returns
    two summands), and a polymorphic identity, so applications and type
    applications can use variables as well as fresh abstractions.
    """
    ctx: Context = {}
    for i, name in enumerate(cfg.tyvars):
        ctx[f"v{i}"] = TyVar(name)
    first = TyVar(cfg.tyvars[0])
    ctx["f0"] = Arrow(first, unit(first))
    ctx["f1"] = Arrow(first, ty_join([unit(first), unit(first)]))
    if len(cfg.tyvars) > 1:
        ctx["f2"] = Arrow(first, unit(TyVar(cfg.tyvars[1])))
    ctx["pid"] = Forall("Zp", Arrow(TyVar("Zp"), unit(TyVar("Zp"))))
    return ctx


# ---------------------------------------------------------------------------
# The generator
# ---------------------------------------------------------------------------


class _Gen:
    """Bottom-up construction of well-typed terms with a seeded source."""

    def __init__(self, cfg: GenConfig, rng: Random) -> None:
        self.cfg = cfg
        self.rng = rng
        self.counter = 0
        self.stable_scalars = tuple(
            c for c in cfg.scalars if c.denominator == 1
        ) or (Fraction(0), Fraction(1), Fraction(2))

    def fresh(self, base: str) -> str:
        self.counter += 1
        return f"{base}{self.counter}"

    def pick(self, options: list) -> object:
        return options[self.rng.randrange(len(options))]

    def chance(self, p: float) -> bool:
        return self.rng.random() < p

    def scalar(self, stable: bool = False) -> Fraction:
        # Integer weights have exact floors, so every rewrite preserves the
        # type of a subterm built from them to the letter.  Fractional
        # weights can merge across an integer boundary (2 . 1/2 . t turns
        # into 1 . t, and 1/2 . t + 1/2 . t into 1 . t), growing the type;
        # the precision order absorbs that growth except where a function
        # domain pins a unit exactly.  Positions reachable from an
        # application therefore draw from the integer weights only, and the
        # boundary-crossing pairs stay where growth is harmless.
        pool = self.stable_scalars if stable else self.cfg.scalars
        return pool[self.rng.randrange(len(pool))]

    # -- types ------------------------------------------------------------

    def gen_unit(self, depth: int, tyenv: tuple[str, ...]) -> UnitType:
        options = ["var", "var", "var"]
        if depth > 0:
            options += ["arrow", "arrow", "forall"]
        kind = self.pick(options)
        if kind == "var":
            return TyVar(self.pick(list(tyenv)))
        if kind == "arrow":
            return Arrow(
                self.gen_unit(depth - 1, tyenv), self.gen_type(depth - 1, tyenv)
            )
        binder = self.fresh("Z")
        return Forall(binder, self.gen_unit(depth - 1, tyenv + (binder,)))

    def gen_type(self, depth: int, tyenv: tuple[str, ...]) -> Type:
        count = self.rng.randint(1, self.cfg.max_summands)
        return ty_join(unit(self.gen_unit(depth, tyenv)) for _ in range(count))

    # -- terms ------------------------------------------------------------
    #
    # Every method returns a term that is well typed in the environment it
    # was built against; shapes with delicate typing side conditions compute
    # their type with the real typechecker rather than recreating its rules.

    def gen_basis(
        self, depth: int, env: Context, tyenv: tuple[str, ...], stable: bool = False
    ) -> tuple[Term, UnitType]:
        options = []
        if env:
            options += ["var"] * 4
        if depth > 0:
            options += ["lam", "lam", "tylam"]
        if not options:
            options = ["lam"]
        kind = self.pick(options)
        if kind == "var":
            name = self.pick(sorted(env))
            return Var(name), env[name]
        if kind == "lam":
            dom = self.gen_unit(max(depth - 1, 0), tyenv)
            x = self.fresh("u")
            inner = dict(env)
            inner[x] = dom
            body, body_ty = self.gen_term(max(depth - 1, 0), inner, tyenv, stable)
            return Abs(x, dom, body), Arrow(dom, body_ty)
        # Type abstraction: the binder is globally fresh, so it cannot occur
        # free in the environment, and a basis body always has a unit type.
        binder = self.fresh("Z")
        body, body_unit = self.gen_basis(
            max(depth - 1, 0), env, tyenv + (binder,), stable
        )
        return TyAbs(binder, body), Forall(binder, body_unit)

    def gen_homogeneous(
        self, depth: int, env: Context, tyenv: tuple[str, ...], stable: bool = False
    ) -> tuple[Term, UnitType]:
        """A term all of whose type summands share one unit (possibly none).

        Returns the term together with the shared unit, which callers use as
        an application domain.  Shapes intentionally include plain basis
        terms (unit count one), weighted and duplicated variants (other
        counts, including zero), and sums padded with weight-zero strangers.

        The kernel is always weight-stable: the unit it reports must survive
        every rewrite, because the caller pins it against a function domain.
        The weight layer on top only sets the copy count, which may grow
        benignly when the surrounding application is itself unpinned, so it
        follows the caller's stability demand.
        """
        kernel, kernel_unit = self.gen_basis(depth, env, tyenv, stable=True)
        shape = self.pick(["plain", "plain", "weight", "pair", "wpair", "ghost"])
        if shape == "plain":
            return kernel, kernel_unit
        if shape == "weight":
            return Scaled(self.scalar(stable), kernel), kernel_unit
        if shape == "pair":
            return tsum([kernel, kernel]), kernel_unit
        if shape == "wpair":
            left = Scaled(self.scalar(stable), kernel)
            right = (
                kernel if self.chance(0.5) else Scaled(self.scalar(stable), kernel)
            )
            return tsum([left, right]), kernel_unit
        # A weight-zero copy keeps the summand's unit aligned with the
        # kernel's.  A zero-weight summand of an unrelated unit type would
        # also typecheck here (it contributes no copies), but pulling its
        # weight out of an enclosing application exposes the alien argument
        # and the reduct stops typechecking, so such arguments stay out of
        # the generated distribution; see the dedicated regression test.
        return tsum([kernel, Scaled(Fraction(0), kernel)]), kernel_unit

    def gen_app(
        self, depth: int, env: Context, tyenv: tuple[str, ...], stable: bool = False
    ) -> tuple[Term, Type]:
        if self.chance(0.1):
            arg: Term = ZERO
            dom = self.gen_unit(max(depth - 1, 0), tyenv)
        else:
            arg, dom = self.gen_homogeneous(max(depth - 1, 0), env, tyenv, stable)

        arrows = sorted(
            name
            for name, u in env.items()
            if isinstance(u, Arrow) and unit_equiv(u.dom, dom)
        )
        fn: Term
        if arrows and self.chance(0.4):
            fn = Var(self.pick(arrows))
        else:
            fn = self._fresh_lambda(depth, env, tyenv, dom, stable)
            decoration = self.pick(["none", "none", "none", "sum", "weight", "zero"])
            if decoration == "sum":
                fn = tsum([fn, self._fresh_lambda(depth, env, tyenv, dom, stable)])
            elif decoration == "weight":
                fn = Scaled(self.scalar(stable), fn)
            elif decoration == "zero":
                fn = ZERO
        t = App(fn, arg)
        return t, synthesize(env, t)

    def _fresh_lambda(
        self,
        depth: int,
        env: Context,
        tyenv: tuple[str, ...],
        dom: UnitType,
        stable: bool = False,
    ) -> Term:
        x = self.fresh("u")
        inner = dict(env)
        inner[x] = dom
        body, _ = self.gen_term(max(depth - 2, 0), inner, tyenv, stable)
        return Abs(x, dom, body)

    def gen_tyapp(
        self, depth: int, env: Context, tyenv: tuple[str, ...], stable: bool = False
    ) -> tuple[Term, Type]:
        instance = self.gen_unit(max(depth - 1, 0), tyenv)
        polys = sorted(
            name for name, u in env.items() if isinstance(u, Forall)
        )
        if polys and self.chance(0.4):
            head: Term = Var(self.pick(polys))
        else:
            binder = self.fresh("Z")
            body, _ = self.gen_basis(
                max(depth - 1, 0), env, tyenv + (binder,), stable
            )
            head = TyAbs(binder, body)
        t = TyApp(head, instance)
        return t, synthesize(env, t)

    def gen_term(
        self, depth: int, env: Context, tyenv: tuple[str, ...], stable: bool = False
    ) -> tuple[Term, Type]:
        if depth <= 0:
            if self.chance(0.1):
                return ZERO, ZERO_TYPE
            b, u = self.gen_basis(0, env, tyenv, stable)
            return b, unit(u)
        options = ["basis"] * 3 + ["app"] * 3 + ["tyapp", "scaled", "scaled", "sum", "sum"]
        if self.chance(0.05):
            return ZERO, ZERO_TYPE
        kind = self.pick(options)
        if kind == "basis":
            b, u = self.gen_basis(depth, env, tyenv, stable)
            return b, unit(u)
        if kind == "app":
            return self.gen_app(depth, env, tyenv, stable)
        if kind == "tyapp":
            return self.gen_tyapp(depth, env, tyenv, stable)
        if kind == "scaled":
            body, body_ty = self.gen_term(depth - 1, env, tyenv, stable)
            if self.chance(0.3):
                body = Scaled(self.scalar(stable), body)
                body_ty = ty_scale(floor_scalar(body.coeff), body_ty)
            coeff = self.scalar(stable)
            return Scaled(coeff, body), ty_scale(floor_scalar(coeff), body_ty)
        count = self.rng.randint(2, self.cfg.max_summands)
        parts: list[tuple[Term, Type]] = [
            self.gen_term(depth - 1, env, tyenv, stable) for _ in range(count)
        ]
        if self.chance(0.3):
            parts.append((ZERO, ZERO_TYPE))
        if self.chance(0.3):
            dup, dup_ty = parts[self.rng.randrange(len(parts))]
            parts.append((dup, dup_ty))
        return tsum(p for p, _ in parts), ty_join(ty for _, ty in parts)


def gen_typed_term(
    cfg: GenConfig, ctx: Context | None = None
) -> Iterator[tuple[Term, Type]]:
    """Yield ``cfg.sample_count`` well-typed terms over ``ctx``.

    Every yielded pair is validated against the typechecker; a mismatch
    between the constructed type and the synthesized one is a generator bug
    and raises immediately.
    """
    if ctx is None:
        ctx = base_context(cfg)
    gen = _Gen(cfg, Random(cfg.seed))
    for _ in range(cfg.sample_count):
        t, ty = gen.gen_term(cfg.max_depth, ctx, cfg.tyvars)
        got = synthesize(ctx, t)
        if not type_equiv(got, ty):
            raise AssertionError(
                f"generator typing drift: built {type_str(ty)}, "
                f"checker says {type_str(got)} for {term_str(t)}"
            )
        yield t, got


# ---------------------------------------------------------------------------
# Check reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Failure:
    """One failed property instance."""

    sample: int
    term: str
    detail: str


@dataclass
class CheckReport:
    """Outcome of one named property over a whole run."""

    name: str
    samples: int = 0
    failures: list[Failure] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures


@dataclass
class FuzzResult:
    """Everything a fuzzing run produced."""

    config: GenConfig
    reports: list[CheckReport]
    records: list[dict]
    coverage: dict[str, int]
    seconds: float

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.reports)

    def report(self, name: str) -> CheckReport:
        for r in self.reports:
            if r.name == name:
                return r
        raise KeyError(name)

    def summary(self) -> dict:
        return {
            "seed": self.config.seed,
            "samples": self.config.sample_count,
            "ok": self.ok,
            "seconds": round(self.seconds, 3),
            "checks": {
                r.name: {
                    "samples": r.samples,
                    "failures": len(r.failures),
                    "seconds": round(r.seconds, 3),
                }
                for r in self.reports
            },
            "rule_coverage": dict(sorted(self.coverage.items())),
            "rules_covered": sum(1 for v in self.coverage.values() if v),
            "rules_total": len(RuleId),
        }


CHECK_NAMES = (
    "subject-reduction",
    "strong-normalization",
    "confluence",
    "substitution",
    "abstraction-typing",
    "additive-square",
    "translation-square",
    "translation-typing",
    "monotone-precision",
    "order-axioms",
    "oracle-agreement",
)


# ---------------------------------------------------------------------------
# The harness
# ---------------------------------------------------------------------------


def _strategies(cfg: GenConfig, sample: int) -> list[tuple[str, Strategy]]:
    return [
        ("leftmost", Leftmost()),
        ("rightmost", Rightmost()),
        ("beta-first", ByGroup(BETA_FIRST)),
        ("factor-first", ByGroup(FACTOR_FIRST)),
        ("random", RandomChoice(cfg.seed * 1_000_003 + sample)),
    ]


class _Run:
    """Mutable state for one ``run_checks`` invocation."""

    def __init__(self, cfg: GenConfig, ctx: Context) -> None:
        self.cfg = cfg
        self.ctx = ctx
        self.reports = {name: CheckReport(name) for name in CHECK_NAMES}
        self.coverage: Counter[str] = Counter({r.value: 0 for r in RuleId})
        self.records: list[dict] = []

    def fail(self, check: str, sample: int, t: Term, detail: str) -> None:
        self.reports[check].failures.append(Failure(sample, term_str(t), detail))

    def timed(self, check: str):
        report = self.reports[check]

        class _Timer:
            def __enter__(self_inner):
                self_inner.start = time.perf_counter()
                report.samples += 1
                return self_inner

            def __exit__(self_inner, *exc):
                report.seconds += time.perf_counter() - self_inner.start
                return False

        return _Timer()


def _leftmost_trace(t: Term, fuel: int) -> tuple[list[Term], bool]:
    """All nodes visited by the leftmost strategy, first to last."""
    res = normalize(t, Leftmost(), fuel)
    nodes = [t] + [s.term for s in res.trace]
    return nodes, res.exhausted


def _check_sample(run: _Run, i: int, t: Term, ty: Type) -> dict:
    cfg, ctx = run.cfg, run.ctx
    record: dict = {
        "sample": i,
        "term": term_str(t),
        "type": type_str(ty),
        "size": term_size(t),
    }

    nodes, exhausted = _leftmost_trace(t, cfg.fuel)
    record["leftmost_steps"] = len(nodes) - 1

    # Rule coverage counts every redex visible from the visited nodes, not
    # just the ones the strategy contracted.
    for node in nodes:
        for s in step(node):
            run.coverage[s.rule.value] += 1

    with run.timed("subject-reduction"):
        for node in nodes[: cfg.sr_trace_cap]:
            for res in sr_check(ctx, node):
                if not res.ok:
                    after = (
                        type_str(res.type_after)
                        if res.type_after is not None
                        else "an untypeable term"
                    )
                    run.fail(
                        "subject-reduction",
                        i,
                        node,
                        f"rule {res.reduction.rule.value} at {res.reduction.path}: "
                        f"{type_str(res.type_before)} does not precede {after}",
                    )

    normal_forms: dict[str, Term] = {}
    with run.timed("strong-normalization"):
        steps_by_strategy: dict[str, int] = {}
        for name, strat in _strategies(cfg, i):
            res = normalize(t, strat, cfg.fuel)
            steps_by_strategy[name] = len(res.trace)
            if res.exhausted:
                run.fail(
                    "strong-normalization",
                    i,
                    t,
                    f"strategy {name} exhausted {cfg.fuel} steps",
                )
            else:
                normal_forms[name] = res.term
        record["steps"] = steps_by_strategy

    with run.timed("confluence"):
        names = sorted(normal_forms)
        for other in names[1:]:
            if not alpha_eq(normal_forms[names[0]], normal_forms[other]):
                run.fail(
                    "confluence",
                    i,
                    t,
                    f"{names[0]} gives {term_str(normal_forms[names[0]])} but "
                    f"{other} gives {term_str(normal_forms[other])}",
                )

    nf = normal_forms.get("leftmost") if not exhausted else None
    if nf is not None:
        record["normal_form"] = term_str(nf)
        record["nf_type"] = type_str(synthesize(ctx, nf))

    _check_substitution(run, i, t, ty)
    _check_abstraction(run, i, t, ty, nf)
    _check_monotone(run, i, t, ty, nodes, exhausted)
    _check_order_axioms(run, i, t, ty, nodes)

    record["ok"] = not any(
        f.sample == i for r in run.reports.values() for f in r.failures
    )
    return record


def _check_substitution(run: _Run, i: int, t: Term, ty: Type) -> None:
    cfg, ctx = run.cfg, run.ctx
    with run.timed("substitution"):
        # Term for variable: extend the context, build a body that may use
        # the new variable, then substitute a basis term of the same type.
        rng = Random(cfg.seed * 7_777_777 + i)
        gen = _Gen(cfg, rng)
        basis, basis_unit = gen.gen_basis(2, ctx, cfg.tyvars)
        x = "subst_x"
        inner = dict(ctx)
        inner[x] = basis_unit
        body, body_ty = gen.gen_term(2, inner, cfg.tyvars)
        substituted = subst_term(body, x, basis)
        try:
            got = synthesize(ctx, substituted)
            if not type_equiv(got, body_ty):
                run.fail(
                    "substitution",
                    i,
                    body,
                    f"term substitution changed the type: {type_str(body_ty)} "
                    f"became {type_str(got)}",
                )
        except Exception as e:  # noqa: BLE001 - report, do not abort the run
            run.fail("substitution", i, body, f"term substitution broke typing: {e}")

        # Type for type variable, applied to the sample itself.
        target = gen.pick(list(cfg.tyvars))
        replacement = gen.gen_unit(1, cfg.tyvars)
        new_ctx = {
            name: subst_type_in_unit(u, target, replacement)
            for name, u in ctx.items()
        }
        try:
            got = synthesize(new_ctx, subst_type_in_term(t, target, replacement))
            want = subst_type_in_type(ty, target, replacement)
            if not type_equiv(got, want):
                run.fail(
                    "substitution",
                    i,
                    t,
                    f"type substitution [{target} := ...] expected "
                    f"{type_str(want)}, got {type_str(got)}",
                )
        except Exception as e:  # noqa: BLE001
            run.fail("substitution", i, t, f"type substitution broke typing: {e}")


def _check_abstraction(
    run: _Run, i: int, t: Term, ty: Type, nf: Term | None
) -> None:
    cfg, ctx = run.cfg, run.ctx
    with run.timed("abstraction-typing"):
        try:
            abstract_ty = a_synthesize(ctx, sigma(t))
            if not type_equiv(abstract_ty, ty):
                run.fail(
                    "abstraction-typing",
                    i,
                    t,
                    f"abstraction retyped {type_str(ty)} as {type_str(abstract_ty)}",
                )
        except Exception as e:  # noqa: BLE001
            run.fail("abstraction-typing", i, t, f"abstracted term failed typing: {e}")

    if nf is None:
        return

    with run.timed("additive-square"):
        if not lesssim(sigma(t), sigma(nf), cfg.fuel):
            run.fail(
                "additive-square",
                i,
                t,
                "abstracted normal form is not below the abstraction of the "
                f"normal form {term_str(nf)}",
            )

    with run.timed("translation-square"):
        try:
            before = derive(ctx, sigma(t))
            after = derive(ctx, sigma(nf))
            tr_before = translate(before, cfg.fuel)
            tr_after = translate(after, cfg.fuel)
            if not f_lessapprox(tr_before.fterm, tr_after.fterm, cfg.fuel):
                run.fail(
                    "translation-square",
                    i,
                    t,
                    "translated source does not approximate the translated "
                    f"normal form {term_str(nf)}",
                )
        except Exception as e:  # noqa: BLE001
            run.fail("translation-square", i, t, f"translation failed: {e}")
            return

    with run.timed("translation-typing"):
        for label, d in (("source", before), ("normal form", after)):
            chk = f_check(d, cfg.fuel)
            if not chk.agrees:
                run.fail(
                    "translation-typing",
                    i,
                    d.term,
                    f"translated {label} shape disagrees with its type image",
                )


def _check_monotone(
    run: _Run, i: int, t: Term, ty: Type, nodes: list[Term], exhausted: bool
) -> None:
    ctx = run.ctx
    with run.timed("monotone-precision"):
        types = [synthesize(ctx, node) for node in nodes]
        counts = [len(summands(node_ty)) for node_ty in types]
        for a, b in zip(counts, counts[1:]):
            if b < a:
                run.fail(
                    "monotone-precision",
                    i,
                    t,
                    f"summand count dropped from {a} to {b} along the "
                    "leftmost trace",
                )
                break
        if not exhausted and not precedes(types[0], types[-1]):
            run.fail(
                "monotone-precision",
                i,
                t,
                f"{type_str(types[0])} does not precede the normal form's "
                f"type {type_str(types[-1])}",
            )


def _check_order_axioms(
    run: _Run, i: int, t: Term, ty: Type, nodes: list[Term]
) -> None:
    ctx = run.ctx
    with run.timed("order-axioms"):
        # Reflexivity of all three orders on material from this sample.
        abstracted = sigma(t)
        tr = translate(derive(ctx, abstracted), run.cfg.fuel)
        if not precedes(ty, ty):
            run.fail("order-axioms", i, t, "type precision is not reflexive")
        if not _additive_refl(abstracted):
            run.fail("order-axioms", i, t, "copy-count order is not reflexive")
        if not f_sqleq(tr.fterm, tr.fterm):
            run.fail("order-axioms", i, t, "product-term order is not reflexive")

        # Transitivity of type precision along the reduction trace.
        if len(nodes) >= 3:
            first = synthesize(ctx, nodes[0])
            mid = synthesize(ctx, nodes[len(nodes) // 2])
            last = synthesize(ctx, nodes[-1])
            if precedes(first, mid) and precedes(mid, last) and not precedes(
                first, last
            ):
                run.fail("order-axioms", i, t, "type precision is not transitive")

        # Antisymmetry up to equivalence between the endpoints of the trace.
        first_ty = synthesize(ctx, nodes[0])
        last_ty = synthesize(ctx, nodes[-1])
        if (
            precedes(first_ty, last_ty)
            and precedes(last_ty, first_ty)
            and not type_equiv(first_ty, last_ty)
        ):
            run.fail(
                "order-axioms", i, t, "type precision is not antisymmetric"
            )

        # Copy-count chains: r below r + r below r + r + r, with transitivity.
        from .additive import sqleq

        doubled = tsum([abstracted, abstracted])
        tripled = tsum([abstracted, abstracted, abstracted])
        if not (
            sqleq(abstracted, doubled)
            and sqleq(doubled, tripled)
            and sqleq(abstracted, tripled)
        ):
            run.fail(
                "order-axioms", i, t, "copy-count chain ordering failed"
            )


def _additive_refl(t: Term) -> bool:
    from .additive import sqleq

    return sqleq(t, t)


def _run_oracle_agreement(run: _Run) -> None:
    cfg = run.cfg
    with run.timed("oracle-agreement"):
        suites = [
            ("type-precision", check_precedes(cfg.oracle_type_depth)),
            ("copy-count", check_sqleq(cfg.oracle_term_size)),
            ("product-term", check_f_sqleq(cfg.oracle_f_size)),
            (
                "product-term-projections",
                check_f_sqleq(cfg.oracle_f_size, projections=True),
            ),
        ]
        for label, agreement in suites:
            if not agreement.ok:
                sample = ", ".join(
                    f"{a!s} vs {b!s}: closure={c} decision={d}"
                    for a, b, c, d in agreement.mismatches[:3]
                )
                run.fail(
                    "oracle-agreement",
                    -1,
                    ZERO,
                    f"{label}: {agreement.mismatch_total} disagreements "
                    f"over {agreement.pairs} pairs ({sample})",
                )


def run_checks(cfg: GenConfig, ctx: Context | None = None) -> FuzzResult:
    """Generate ``cfg.sample_count`` terms and replay every property on each."""
    if ctx is None:
        ctx = base_context(cfg)
    run = _Run(cfg, ctx)
    started = time.perf_counter()
    for i, (t, ty) in enumerate(gen_typed_term(cfg, ctx)):
        run.records.append(_check_sample(run, i, t, ty))
    _run_oracle_agreement(run)
    elapsed = time.perf_counter() - started
    return FuzzResult(
        config=cfg,
        reports=list(run.reports.values()),
        records=run.records,
        coverage=dict(run.coverage),
        seconds=elapsed,
    )


# ---------------------------------------------------------------------------
# Reports on disk
# ---------------------------------------------------------------------------


def write_report(result: FuzzResult, path: str | Path) -> Path:
    """Write one JSON record per sample, then a summary line, to ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for record in result.records:
            fh.write(json.dumps(record, sort_keys=True) + "\n")
        fh.write(json.dumps({"summary": result.summary()}, sort_keys=True) + "\n")
    return path


def render_figures(result: FuzzResult, outdir: str | Path) -> list[Path]:
    """Render run-summary figures as PNG files and return their paths."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths: list[Path] = []

    steps = [r.get("leftmost_steps", 0) for r in result.records]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(steps, bins=max(1, min(30, max(steps) + 1 if steps else 1)))
    ax.set_xlabel("leftmost reduction steps")
    ax.set_ylabel("samples")
    ax.set_title("Reduction length distribution")
    fig.tight_layout()
    p = outdir / "fuzz_steps.png"
    fig.savefig(p, dpi=120)
    plt.close(fig)
    paths.append(p)

    names = sorted(result.coverage)
    values = [result.coverage[n] for n in names]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.barh(range(len(names)), values)
    ax.set_yticks(range(len(names)))
    ax.set_yticklabels(names, fontsize=7)
    ax.set_xlabel("redexes seen along leftmost traces")
    ax.set_title("Rewrite-rule coverage")
    fig.tight_layout()
    p = outdir / "fuzz_rules.png"
    fig.savefig(p, dpi=120)
    plt.close(fig)
    paths.append(p)

    sizes = [r.get("size", 0) for r in result.records]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.scatter(sizes, steps, s=12, alpha=0.6)
    ax.set_xlabel("term size")
    ax.set_ylabel("leftmost reduction steps")
    ax.set_title("Term size against reduction length")
    fig.tight_layout()
    p = outdir / "fuzz_size_steps.png"
    fig.savefig(p, dpi=120)
    plt.close(fig)
    paths.append(p)

    return paths
