"""Executable correspondence checking.

Repaired functions are compared against their sources extensionally: for
enumerated closed inputs, running the repaired function on converted inputs
must agree, under the target side's decidable relation, with converting the
source function's result. This is the artifact's executable stand-in for a
propositional correctness argument, and it is also used to gate the porting
of fast implementations (pointwise agreement up to a budget).
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .kernel import (
    CtorRef, Evaluator, GlobalEnv, IndRef, NonClosedValue, Term, mk_app,
)
from .surface.ast import GenSpec


class MissingDecider(Exception):
    pass


@dataclass
class PairResult:
    src: str
    tgt: str
    total: int
    failed: int
    counterexample: str | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.failed == 0 and self.error is None


@dataclass
class Report:
    results: list[PairResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def lines(self) -> list[str]:
        out = []
        for r in self.results:
            status = "pass" if r.ok else "fail"
            line = f"pair={r.src}~{r.tgt} status={status} checked={r.total} failed={r.failed}"
            if r.counterexample:
                line += f" counterexample={r.counterexample}"
            if r.error:
                line += f" error={r.error}"
            out.append(line)
        return out


def _nat(n: int) -> Term:
    t: Term = CtorRef("nat", 0)
    for _ in range(n):
        t = mk_app(CtorRef("nat", 1), t)
    return t


def enumerate_values(env: GlobalEnv, spec: GenSpec) -> list[Term]:
    """Deterministic enumeration of closed constructor trees."""
    if spec.kind == "nat":
        return [_nat(i) for i in range(spec.max + 1)]
    if spec.kind == "bool":
        return [CtorRef("bool", 0), CtorRef("bool", 1)]
    if spec.kind == "prod":
        a = enumerate_values(env, spec.children[0])
        b = enumerate_values(env, spec.children[1])
        ta = _spec_type(env, spec.children[0])
        tb = _spec_type(env, spec.children[1])
        return [mk_app(CtorRef("prod", 0), ta, tb, x, y)
                for x in a for y in b]
    if spec.kind == "list":
        elem = enumerate_values(env, spec.children[0])
        te = _spec_type(env, spec.children[0])
        out: list[Term] = []
        layer: list[Term] = [mk_app(CtorRef("list", 0), te)]
        out.extend(layer)
        for _ in range(spec.length):
            layer = [mk_app(CtorRef("list", 1), te, e, l)
                     for e in elem for l in layer]
            out.extend(layer)
        return out
    if spec.kind == "ind":
        return _enumerate_inductive(env, spec.ind, spec.max)
    raise ValueError(f"cannot enumerate {spec!r}")


def _spec_type(env: GlobalEnv, spec: GenSpec) -> Term:
    if spec.kind == "nat":
        return IndRef("nat")
    if spec.kind == "bool":
        return IndRef("bool")
    if spec.kind == "prod":
        return mk_app(IndRef("prod"), _spec_type(env, spec.children[0]),
                      _spec_type(env, spec.children[1]))
    if spec.kind == "list":
        return mk_app(IndRef("list"), _spec_type(env, spec.children[0]))
    if spec.kind == "ind":
        return IndRef(spec.ind)
    raise ValueError(f"no type for {spec!r}")


def _enumerate_inductive(env: GlobalEnv, name: str, nat_max: int) -> list[Term]:
    """Constructor trees of a non-parameterized inductive whose argument
    types are nat, bool, or the inductive itself (depth-capped by nat_max)."""
    decl = env.inductive(name)
    out: list[Term] = []

    def values_for(ty: Term, depth: int) -> list[Term]:
        if ty == IndRef("nat"):
            return [_nat(i) for i in range(nat_max + 1)]
        if ty == IndRef("bool"):
            return [CtorRef("bool", 0), CtorRef("bool", 1)]
        if ty == IndRef(name) and depth > 0:
            return build(depth - 1)
        return []

    def build(depth: int) -> list[Term]:
        acc: list[Term] = []
        for j, ctor in enumerate(decl.ctors):
            combos: list[list[Term]] = [[]]
            for (_, aty) in ctor.args:
                vals = values_for(aty, depth)
                combos = [c + [v] for c in combos for v in vals]
            for c in combos:
                acc.append(mk_app(CtorRef(name, j), *c))
        return acc

    return build(1)


@dataclass(frozen=True)
class CheckPair:
    src_fn: Term
    tgt_fn: Term
    arg_specs: tuple[GenSpec, ...]
    arg_fwds: tuple[Term | None, ...]
    result_fwd: Term | None
    decider: Term
    label: tuple[str, str] = ("src", "tgt")


@dataclass(frozen=True)
class CorrespondencePlan:
    pairs: tuple[CheckPair, ...]
    input_budget: int = 100000
    seed: int = 0


def _decide(ev: Evaluator, env: GlobalEnv, decider: Term, lhs: Term, rhs: Term) -> bool:
    from .kernel.reduce import VCtor, force
    v = force(ev.eval_closed(mk_app(decider, lhs, rhs)))
    if not isinstance(v, VCtor) or v.ind != "bool":
        raise NonClosedValue("decider did not evaluate to a boolean")
    true_index = next(j for j, c in enumerate(env.inductive("bool").ctors)
                      if c.name == "true")
    return v.index == true_index


def check_pair(env: GlobalEnv, pair: CheckPair, budget: int, seed: int) -> PairResult:
    ev = Evaluator(env)
    enums = [enumerate_values(env, s) for s in pair.arg_specs]
    tuples = list(itertools.product(*enums))
    if len(tuples) > budget:
        rng = random.Random(seed)
        tuples = rng.sample(tuples, budget)
    failed = 0
    counterexample = None
    from .kernel.reduce import VCtor
    try:
        for args in tuples:
            conv_args = []
            for a, fwd in zip(args, pair.arg_fwds):
                conv_args.append(mk_app(fwd, a) if fwd is not None else a)
            lhs = mk_app(pair.tgt_fn, *conv_args)
            rhs = mk_app(pair.src_fn, *args)
            if pair.result_fwd is not None:
                rhs = mk_app(pair.result_fwd, rhs)
            if not _decide(ev, env, pair.decider, lhs, rhs):
                failed += 1
                if counterexample is None:
                    from .surface.printer import Printer
                    p = Printer(env)
                    counterexample = ", ".join(p.term(a) for a in args)
    except NonClosedValue as e:
        return PairResult(pair.label[0], pair.label[1], len(tuples), failed,
                          counterexample, error=str(e))
    return PairResult(pair.label[0], pair.label[1], len(tuples), failed,
                      counterexample)


def check_correspondence(env: GlobalEnv, plan: CorrespondencePlan) -> Report:
    report = Report()
    for pair in plan.pairs:
        report.results.append(check_pair(env, pair, plan.input_budget, plan.seed))
    return report


def check_pointwise(env: GlobalEnv, f: Term, g: Term,
                    arg_specs: tuple[GenSpec, ...], decider: Term | None,
                    budget: int, seed: int = 0) -> PairResult:
    """Decider-checked pointwise agreement of two functions of the same type."""
    if decider is None:
        raise MissingDecider("the result setoid carries no decider")
    pair = CheckPair(f, g, arg_specs, (None,) * len(arg_specs), None, decider,
                     ("lhs", "rhs"))
    return check_pair(env, pair, budget, seed)
