"""Algorithmic subtyping with ordered contexts of existential variables.

The two judgments are mutually recursive and syntax-directed; no
unification and no backtracking.  Positive judgments keep the ground type
on the left, negative judgments keep it on the right, and existentials are
solved exactly once, by matching a ground type against an existential on
the non-ground side.  Shifts (and datatype constructors) are invariant:
both directions are checked underneath them.

Every call re-checks the metatheoretic postconditions (output context
shape, extension, groundness of the completed side, and strict decrease
of the decidability metric); violations raise InvariantViolation since
they are bugs here, never user errors.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvariantViolation, TypeCheckError
from .parser import pretty
from .syntax import (
    Arrow, Context, Data, Down, EVar, Forall, NegData, NegType, PosType,
    Solved, UVar, Universal, Unsolved, Up, alpha_equal, apply_context,
    extends, fresh_name, is_ground, num_prenex, subst_type, termsize,
    type_names,
)
from .wellformed import wf_context, wf_type


class NameSource:
    """Per-checking-run supply of fresh existential names.

    Names derive from the instantiated binder plus a monotone counter, so
    traces are readable and reproducible.  Confined to one checking
    session; independent sessions may run in parallel.
    """

    def __init__(self):
        self._counts = {}

    def fresh_evar(self, base: str, taken) -> str:
        n = self._counts.get(base, 0)
        while f"?{base}{n}" in taken:
            n += 1
        self._counts[base] = n + 1
        return f"?{base}{n}"


@dataclass(frozen=True)
class TraceStep:
    """One completed rule application, with contexts before and after."""

    rule: str
    goal: str
    context_before: str
    context_after: str


@dataclass(frozen=True)
class SubtypeResult:
    context: Context
    trace: tuple


def _alpha_iso(decl_ctx, p, q) -> bool:
    # extension checks inside the engine only ever see unchanged solutions
    return alpha_equal(p, q)


def _check_post(theta: Context, out: Context, ground, nonground, goal: str):
    """Postconditions shared by every rule: shape, extension, bounding."""
    if len(out.entries) != len(theta.entries):
        raise InvariantViolation(f"context shape changed in {goal}")
    for before, after in zip(theta.entries, out.entries):
        if isinstance(before, Universal):
            ok = before == after
        elif isinstance(before, Unsolved):
            ok = after.name == before.name and isinstance(after, (Unsolved, Solved))
        else:
            ok = (isinstance(after, Solved) and after.name == before.name
                  and alpha_equal(after.solution, before.solution))
        if not ok:
            raise InvariantViolation(f"context entry rewritten in {goal}")
    if not wf_context(out):
        raise InvariantViolation(f"ill-formed output context in {goal}")
    if not extends(theta, out, iso=_alpha_iso):
        raise InvariantViolation(f"output context does not extend input in {goal}")
    completed = apply_context(out, nonground)
    if not is_ground(completed):
        raise InvariantViolation(f"completed non-ground side not ground in {goal}")
    if termsize(completed) > termsize(ground):
        raise InvariantViolation(f"completed size exceeds ground size in {goal}")


def _metric_pos(p, q):
    return (termsize(p), num_prenex(p) + num_prenex(q))


def _metric_neg(n, m):
    return (termsize(m), num_prenex(m) + num_prenex(n))


def _check_metric(parent, child, goal: str):
    if parent is not None and child >= parent:
        raise InvariantViolation(f"decidability metric did not decrease at {goal}")


def _fail(goal: str, detail: str, trace):
    raise TypeCheckError("subtype-failure", f"{detail} (while checking {goal})",
                         trace=tuple(trace))


class _Engine:
    def __init__(self, names: NameSource):
        self.names = names
        self.trace = []

    def _record(self, rule, goal, before, after):
        self.trace.append(TraceStep(rule, goal, pretty(before), pretty(after)))

    # -- positive: p ground, q may contain unsolved existentials --------

    def pos(self, theta: Context, p: PosType, q: PosType, parent) -> Context:
        goal = f"{pretty(p)} <=+ {pretty(q)}"
        metric = _metric_pos(p, q)
        _check_metric(parent, metric, goal)

        if isinstance(q, EVar):
            entry = theta.lookup_evar(q.name)
            if entry is None:
                _fail(goal, f"existential {q.name} is not in scope", self.trace)
            if isinstance(entry, Solved):
                raise InvariantViolation(f"{q.name} already solved in {goal}")
            if not wf_type(theta.prefix_before(q.name), p):
                _fail(goal, f"solution {pretty(p)} mentions variables bound "
                            f"after {q.name} was introduced", self.trace)
            out = theta.solve(q.name, p)
            self._record("instantiate", goal, theta, out)
        elif isinstance(p, UVar) and isinstance(q, UVar):
            if p.name != q.name:
                _fail(goal, f"type variables {p.name} and {q.name} differ", self.trace)
            if not theta.has_universal(p.name):
                _fail(goal, f"type variable {p.name} is not in scope", self.trace)
            out = theta
            self._record("refl", goal, theta, out)
        elif isinstance(p, Down) and isinstance(q, Down):
            # invariant shift: check both directions, completing q's side first
            t1 = self.neg(theta, q.body, p.body, metric)
            t2 = self.neg(t1, p.body, apply_context(t1, q.body), metric)
            out = t2
            self._record("shift-thunk", goal, theta, out)
        elif isinstance(p, Data) and isinstance(q, Data):
            if p.constructor != q.constructor or len(p.args) != len(q.args):
                _fail(goal, f"constructors {pretty(p)} and {pretty(q)} do not match",
                      self.trace)
            out = theta
            for pa, qa in zip(p.args, q.args):
                qa = apply_context(out, qa)
                out = self.pos(out, pa, qa, metric)
                out = self.pos(out, apply_context(out, qa), pa, metric)
            self._record("data", goal, theta, out)
        else:
            _fail(goal, f"{pretty(p)} is not a subtype of {pretty(q)}", self.trace)

        _check_post(theta, out, p, q, goal)
        return out

    # -- negative: m ground, n may contain unsolved existentials --------

    def neg(self, theta: Context, n: NegType, m: NegType, parent) -> Context:
        goal = f"{pretty(n)} <=- {pretty(m)}"
        metric = _metric_neg(n, m)
        _check_metric(parent, metric, goal)

        if isinstance(m, Forall):
            # eliminate quantifiers on the ground side first
            binder = m.binder
            body = m.body
            if binder in set(theta.names()):
                binder = fresh_name(m.binder, set(theta.names()) | type_names(m.body)
                                    | type_names(n))
                body = subst_type(UVar(binder), m.binder, m.body)
            inner = self.neg(theta.push(Universal(binder)), n, body, metric)
            if not isinstance(inner.last(), Universal) or inner.last().name != binder:
                raise InvariantViolation(f"universal {binder} lost in {goal}")
            out = inner.drop_last()
            self._record("forall-right", goal, theta, out)
        elif isinstance(n, Forall):
            name = self.names.fresh_evar(n.binder, set(theta.names()))
            opened = subst_type(EVar(name), n.binder, n.body)
            inner = self.neg(theta.push(Unsolved(name)), opened, m, metric)
            if inner.last() is None or inner.last().name != name \
                    or isinstance(inner.last(), Universal):
                raise InvariantViolation(f"existential {name} lost in {goal}")
            # the algorithm need not have solved it; either way it goes out of scope
            out = inner.drop_last()
            self._record("forall-left", goal, theta, out)
        elif isinstance(n, Arrow) and isinstance(m, Arrow):
            t1 = self.pos(theta, m.domain, n.domain, metric)
            t2 = self.neg(t1, apply_context(t1, n.codomain), m.codomain, metric)
            out = t2
            self._record("arrow", goal, theta, out)
        elif isinstance(n, Up) and isinstance(m, Up):
            t1 = self.pos(theta, m.body, n.body, metric)
            t2 = self.pos(t1, apply_context(t1, n.body), m.body, metric)
            out = t2
            self._record("shift-return", goal, theta, out)
        elif isinstance(n, NegData) and isinstance(m, NegData):
            if n.constructor != m.constructor or len(n.args) != len(m.args):
                _fail(goal, f"constructors {pretty(n)} and {pretty(m)} do not match",
                      self.trace)
            out = theta
            for na, ma in zip(n.args, m.args):
                na = apply_context(out, na)
                out = self.pos(out, ma, na, metric)
                out = self.pos(out, apply_context(out, na), ma, metric)
            self._record("data", goal, theta, out)
        else:
            _fail(goal, f"{pretty(n)} is not a subtype of {pretty(m)}", self.trace)

        _check_post(theta, out, m, n, goal)
        return out


def _require(cond: bool, what: str):
    if not cond:
        raise ValueError(what)


def subtype_pos(theta: Context, p: PosType, q: PosType,
                names: NameSource = None) -> SubtypeResult:
    """Check p <=+ q under theta; p must be ground, q free of solved existentials.

    Returns the output context (same shape as the input, possibly with new
    solutions) and the derivation trace; raises TypeCheckError on failure.
    """
    _require(wf_context(theta), "input context is ill-formed")
    _require(wf_type(theta, p) and wf_type(theta, q), "types must be well-formed")
    _require(is_ground(p), "the left side of a positive judgment must be ground")
    _require(alpha_equal(apply_context(theta, q), q),
             "the right side must not mention solved existentials")
    eng = _Engine(names or NameSource())
    out = eng.pos(theta, p, q, None)
    return SubtypeResult(out, tuple(eng.trace))


def subtype_neg(theta: Context, n: NegType, m: NegType,
                names: NameSource = None) -> SubtypeResult:
    """Check n <=- m under theta; m must be ground, n free of solved existentials."""
    _require(wf_context(theta), "input context is ill-formed")
    _require(wf_type(theta, n) and wf_type(theta, m), "types must be well-formed")
    _require(is_ground(m), "the right side of a negative judgment must be ground")
    _require(alpha_equal(apply_context(theta, n), n),
             "the left side must not mention solved existentials")
    eng = _Engine(names or NameSource())
    out = eng.neg(theta, n, m, None)
    return SubtypeResult(out, tuple(eng.trace))


def isomorphic(theta: Context, a, b) -> bool:
    """Mutual subtyping of two ground, well-formed types of equal polarity."""
    _require(is_ground(a) and is_ground(b), "isomorphism is defined on ground types")
    if isinstance(a, PosType) != isinstance(b, PosType):
        return False
    check = subtype_pos if isinstance(a, PosType) else subtype_neg
    try:
        check(theta, a, b)
        check(theta, b, a)
        return True
    except TypeCheckError:
        return False
