"""The bounded declarative oracle: universes, subtyping search, type sets."""

import random

import pytest

from polarf import (
    Context, Data, OracleBudgetExceeded, Return, TypeCheckError, TypeEnv,
    UVar, Var, alpha_equal, candidate_universe, decl_iso, decl_subtype,
    decl_synth, parse_program, parse_type, subst_type,
)
from polarf.corpus import by_name
from polarf.oracle import typing_universe

from gen import gen_type

T = parse_type
ID_TYPE = T("dn (forall a. a -> up a)", "+")


class TestCandidateUniverse:
    def test_type_is_its_own_subterm(self):
        u = candidate_universe([ID_TYPE])
        assert any(alpha_equal(c, ID_TYPE) for c in u)

    def test_impredicative_instantiation_available(self):
        rhs = T("up (List (dn (forall b. b -> up b)))", "-")
        u = candidate_universe([T("forall a. up (List a)", "-"), rhs])
        assert any(alpha_equal(c, T("dn (forall b. b -> up b)", "+")) for c in u)

    def test_arrow_universe_is_exactly_int(self):
        u = candidate_universe([T("Int -> up Int", "-")])
        assert list(u) == [Data("Int", ())]

    def test_universals_in_scope_included(self):
        u = candidate_universe([Data("Int", ())], theta=("a",))
        assert UVar("a") in u

    def test_universe_cap_is_loud(self):
        rng = random.Random(30)
        big = [gen_type(rng, "+") for _ in range(80)]
        with pytest.raises(OracleBudgetExceeded):
            decl_subtype((), Data("Int", ()), Data("Int", ()),
                         universe=candidate_universe(big))


class TestDeclSubtype:
    def test_section3_displays(self):
        swap1 = T("forall a b. dn (a -> up b) -> List a -> up (List b)", "-")
        swap2 = T("forall b a. dn (a -> up b) -> List a -> up (List b)", "-")
        push1 = T("forall a. a -> forall b. b -> up (a * b)", "-")
        push2 = T("forall a b. a -> b -> up (a * b)", "-")
        impr1 = T("forall a. up (List a)", "-")
        impr2 = T("up (List (dn (forall b. b -> up b)))", "-")
        assert decl_subtype((), swap1, swap2) and decl_subtype((), swap2, swap1)
        assert decl_subtype((), push1, push2)
        assert decl_subtype((), impr1, impr2)
        mono = T("dn (Int -> String -> up (Int * String)) -> "
                 "List Int -> List String -> up (List (Int * String))", "-")
        poly = T("dn (forall a b. a -> b -> up (a * b)) -> "
                 "List Int -> List String -> up (List (Int * String))", "-")
        assert not decl_subtype((), mono, poly)
        assert not decl_subtype((), poly, mono)

    def test_reflexive_on_random_types(self):
        rng = random.Random(31)
        for _ in range(150):
            a = gen_type(rng, rng.choice("+-"))
            assert decl_subtype((), a, a)

    def test_transitive_on_instantiation_chains(self):
        rng = random.Random(32)
        hits = 0
        for _ in range(150):
            c = gen_type(rng, "-", quants=3)
            b = _instantiate_once(rng, c)
            a = _instantiate_once(rng, b)
            u = candidate_universe([a, b, c])
            if decl_subtype((), c, b, u) and decl_subtype((), b, a, u):
                hits += 1
                assert decl_subtype((), c, a, u)
        assert hits > 20

    def test_stability_under_substitution(self):
        from gen import instantiate_prenex, permute_prenex
        rng = random.Random(33)
        tried = 0
        for _ in range(300):
            a = gen_type(rng, "-", uvars=("c",))
            roll = rng.random()
            if roll < 0.4:
                b = a
            elif roll < 0.7:
                b = permute_prenex(rng, a)
            else:
                b = instantiate_prenex(rng, a)
            if "c" not in (_used(a) | _used(b)):
                continue
            if not decl_subtype(("c",), a, b):
                continue
            tried += 1
            for p in (Data("Int", ()), ID_TYPE):
                sa = subst_type(p, "c", a)
                sb = subst_type(p, "c", b)
                assert decl_subtype((), sa, sb)
            if tried >= 25:
                break
        assert tried >= 10

    def test_requires_ground_wf_inputs(self):
        with pytest.raises(ValueError):
            decl_subtype((), UVar("a"), UVar("a"))


def _used(t):
    from polarf import free_uvars
    return free_uvars(t)


def _instantiate_once(rng, n):
    from polarf import Forall
    if not isinstance(n, Forall):
        return n
    cand = rng.choice([Data("Int", ()), Data("Bool", ()), ID_TYPE])
    return subst_type(cand, n.binder, n.body)


class TestDeclIso:
    def test_map_binder_orders(self):
        p = T("forall a b. dn (a -> up b) -> List a -> up (List b)", "-")
        q = T("forall b a. dn (a -> up b) -> List a -> up (List b)", "-")
        assert decl_iso((), p, q)

    def test_int_is_self_isomorphic(self):
        assert decl_iso((), Data("Int", ()), Data("Int", ()))

    def test_instantiation_not_isomorphism(self):
        assert not decl_iso((), T("forall a. a -> up a", "-"),
                            T("Int -> up Int", "-"))


def _program_env(names):
    """The corpus environment pruned to the given names, as a TypeEnv."""
    from polarf.corpus import ENVIRONMENT
    prog = parse_program(ENVIRONMENT + "\nrun return true")
    keep = {name: ty for name, ty in prog.assumptions}
    return TypeEnv(tuple((n, keep[n]) for n in names))


class TestDeclSynth:
    def test_return_of_variable(self):
        gamma = TypeEnv((("x", ID_TYPE),))
        got = decl_synth((), gamma, Return(Var("x")))
        assert len(got) == 1
        assert alpha_equal(got[0], T("up (dn (forall a. a -> up a))", "-"))

    def test_c3_is_a_singleton_up_to_iso(self):
        gamma = _program_env(["head", "ids"])
        body = parse_program("run let t = head(ids); return t").body
        got = decl_synth((), gamma, body)
        want = T("up (dn (forall a. a -> up a))", "-")
        assert got
        assert all(decl_iso((), n, want, typing_universe(gamma, body))
                   for n in got)

    def test_a3_unannotated_is_untypeable(self):
        gamma = _program_env(["nil", "choose", "ids"])
        body = parse_program("run let n = nil(); let t = choose(n, ids); "
                             "return t").body
        assert decl_synth((), gamma, body) == ()

    def test_a3_annotated_is_typeable(self):
        gamma = _program_env(["nil", "choose", "ids"])
        body = parse_program(
            "run let n : List (dn (forall a. a -> up a)) = nil(); "
            "let t = choose(n, ids); return t").body
        got = decl_synth((), gamma, body)
        want = T("up (List (dn (forall a. a -> up a)))", "-")
        assert any(decl_iso((), n, want) for n in got)

    def test_agreement_with_typer_on_corpus_rows(self):
        # small rows with pruned environments keep the universes tiny
        from polarf import synth_computation
        cases = {
            "A5": ["id", "auto"],
            "A7": ["choose", "id", "auto"],
            "C1": ["length", "ids"],
            "C4": ["single", "id"],
            "D3": ["runST", "argST"],
        }
        for name, names in cases.items():
            ex = by_name(name)
            gamma = _program_env(names)
            body = parse_program("run " + ex.term, name).body
            try:
                alg = synth_computation(Context(), gamma, body).type
            except TypeCheckError:
                alg = None
            got = decl_synth((), gamma, body)
            if alg is None:
                assert got == (), name
            else:
                assert any(decl_iso((), alg, n, typing_universe(gamma, body))
                           for n in got), name
