"""Well-formedness checks for types, contexts, and typing environments.

These gate every public checker entry point: universal variables must be
bound in the context, existentials must be tracked by it, solutions and
environment bindings must be ground.
"""

from __future__ import annotations

from .syntax import (
    Arrow, Context, Data, Down, EVar, Forall, NegData, Solved, TypeEnv, UVar,
    Up, free_evars,
)


def wf_type(theta: Context, t) -> bool:
    """True iff `t` only mentions variables the context knows about."""
    return _wf(theta, t, frozenset())


def _wf(theta: Context, t, extra) -> bool:
    if isinstance(t, UVar):
        return t.name in extra or theta.has_universal(t.name)
    if isinstance(t, EVar):
        return theta.lookup_evar(t.name) is not None
    if isinstance(t, Down):
        return _wf(theta, t.body, extra)
    if isinstance(t, (Data, NegData)):
        return all(_wf(theta, a, extra) for a in t.args)
    if isinstance(t, Arrow):
        return _wf(theta, t.domain, extra) and _wf(theta, t.codomain, extra)
    if isinstance(t, Forall):
        # binders may shadow; track them separately instead of mutating theta
        return _wf(theta, t.body, extra | {t.binder})
    if isinstance(t, Up):
        return _wf(theta, t.body, extra)
    return False


def wf_context(theta: Context) -> bool:
    """Entry names are fresh and every solution is ground and scoped to its prefix."""
    seen = set()
    for i, e in enumerate(theta.entries):
        if e.name in seen:
            return False
        seen.add(e.name)
        if isinstance(e, Solved):
            if free_evars(e.solution):
                return False
            if not wf_type(Context(theta.entries[:i]), e.solution):
                return False
    return True


def wf_env(theta: Context, gamma: TypeEnv) -> bool:
    """Every binding's type is ground and well-formed in the context."""
    for _, p in gamma:
        if free_evars(p) or not wf_type(theta, p):
            return False
    return True
