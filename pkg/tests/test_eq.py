"""Many-sorted equational logic over finite algebras."""
import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import gen
from hybridkit import eq as eqm
from hybridkit.institution import BaseMorphism, FragmentSpec, ValidationError

x = eqm.Var("x", "s")


def unary(table):
    sig = eqm.EQSignature(["s"], [eqm.OpDecl("f", ["s"], "s")])
    return eqm.FiniteAlgebra(sig, {"s": ("0", "1")}, {"f": {(k,): v for k, v in table.items()}})


NEG = unary({"0": "1", "1": "0"})


def f(t):
    return eqm.App("f", (t,))


def test_eval_variable():
    assert eqm.eval_term(NEG, {"x": "0"}, x) == "0"


def test_eval_double_negation():
    assert eqm.eval_term(NEG, {"x": "0"}, f(f(x))) == "0"


def test_eval_unbound_variable_rejected():
    with pytest.raises(ValidationError):
        eqm.eval_term(NEG, {}, x)


def test_eval_missing_table_entry_rejected():
    broken = eqm.FiniteAlgebra(NEG.signature, NEG.carriers, {"f": {("0",): "1"}})
    with pytest.raises(ValidationError):
        eqm.eval_term(broken, {"x": "1"}, f(x))
    assert eqm.EQ.model_problems(broken)


def test_store_law_holds_on_every_pair():
    A = gen.store_algebra()
    law = gen.store_law()
    for m, e in itertools.product(A.carriers["mem"], A.carriers["elem"]):
        assert eqm.eval_term(A, {"m": m, "e": e}, law.lhs) == m
    assert eqm.eq_satisfy(A, law)


def test_syntactic_identity_is_satisfied():
    assert eqm.eq_satisfy(NEG, eqm.Equation((("x", "s"),), f(x), f(x)))


def test_monoid_unit_law():
    sig = eqm.EQSignature(["s"], [eqm.OpDecl("mul", ["s", "s"], "s"), eqm.OpDecl("e", [], "s")])
    table = {(a, b): str(int(a) ^ int(b)) for a in "01" for b in "01"}  # Z/2 with unit 0
    A = eqm.FiniteAlgebra(sig, {"s": ("0", "1")}, {"mul": table, "e": {(): "0"}})
    law = eqm.Equation((("x", "s"),), eqm.App("mul", (x, eqm.App("e"))), x)
    assert eqm.eq_satisfy(A, law)


def test_store_law_violated_at_one_pair():
    A = gen.store_algebra()
    tables = {k: dict(v) for k, v in A.tables.items()}
    tables["del"][("m1",)] = "m1"  # del(write(m0, e)) = del(m1) is now m1, not m0
    bad = eqm.FiniteAlgebra(A.signature, A.carriers, tables)
    assert not eqm.eq_satisfy(bad, gen.store_law())


def test_empty_carrier_rejected():
    sig = eqm.EQSignature(["s"], [])
    A = eqm.FiniteAlgebra(sig, {"s": ()}, {})
    with pytest.raises(ValidationError, match="empty carrier"):
        eqm.eq_satisfy(A, eqm.Equation((("x", "s"),), x, x))


def test_reflexive_equation_always_holds_on_random_algebras():
    import random
    rng = random.Random(7)
    for _ in range(100):
        sig = gen.eq_signature(rng)
        A = gen.algebra(rng, sig)
        for s in sig.sorts:
            v = eqm.Var("x", s)
            assert eqm.eq_satisfy(A, eqm.Equation((("x", s),), v, v))


# --- translation and reduct -------------------------------------------------

def test_identity_translation_and_reduct():
    A = gen.store_algebra()
    ident = eqm.EQ.identity(A.signature)
    assert eqm.eq_reduct(ident, A) == A
    law = gen.store_law()
    ident_small = eqm.EQ.identity(gen.store_signature())
    assert eqm.eq_translate(ident_small, law) == law


def test_inclusion_reduct_forgets_extra_operations():
    phi = BaseMorphism(gen.store_signature(), gen.store_signature(True), {
        "sort": {"mem": "mem", "elem": "elem"}, "op": {"write": "write", "del": "del"}})
    reduced = eqm.eq_reduct(phi, gen.store_algebra())
    assert set(reduced.tables) == {"write", "del"}
    assert reduced.signature == gen.store_signature()
    assert eqm.EQ.model_problems(reduced) == []


def test_sort_renaming_pulls_carrier_back():
    src = eqm.EQSignature(["s"], [eqm.OpDecl("f", ["s"], "s")])
    tgt = eqm.EQSignature(["s2"], [eqm.OpDecl("g", ["s2"], "s2")])
    phi = BaseMorphism(src, tgt, {"sort": {"s": "s2"}, "op": {"f": "g"}})
    A2 = eqm.FiniteAlgebra(tgt, {"s2": ("u", "v", "w")}, {"g": {("u",): "v", ("v",): "w", ("w",): "u"}})
    A = eqm.eq_reduct(phi, A2)
    assert A.carriers == {"s": ("u", "v", "w")}
    assert A.tables["f"] == A2.tables["g"]


def test_profile_mismatch_reported():
    src = eqm.EQSignature(["s"], [eqm.OpDecl("f", ["s"], "s")])
    tgt = eqm.EQSignature(["s", "t"], [eqm.OpDecl("g", ["t"], "s")])
    phi = BaseMorphism(src, tgt, {"sort": {"s": "s"}, "op": {"f": "g"}})
    assert any("profile" in p for p in eqm.EQ.morphism_problems(phi))


# --- enumeration ------------------------------------------------------------

def test_enumerate_depth0_single_sort():
    eqs = eqm.enumerate_equations(eqm.EQSignature(["s"], []), 0, 1)
    assert len(eqs) == 1
    e = eqs[0]
    assert e.lhs == e.rhs and isinstance(e.lhs, eqm.Var) and len(e.variables) == 1


def test_enumerate_unary_depth1_has_four():
    sig = eqm.EQSignature(["s"], [eqm.OpDecl("f", ["s"], "s")])
    eqs = eqm.enumerate_equations(sig, 1, 1)
    v = eqm.Var(eqm.var_name("s", 1), "s")
    want = {(v, v), (v, f(v)), (f(v), v), (f(v), f(v))}
    assert {(e.lhs, e.rhs) for e in eqs} == want and len(eqs) == 4


def test_store_law_needs_depth_two():
    sig = gen.store_signature()
    m, e = eqm.Var(eqm.var_name("mem", 1), "mem"), eqm.Var(eqm.var_name("elem", 1), "elem")
    target = (eqm.App("del", (eqm.App("write", (m, e)),)), m)
    shapes = lambda d: {(q.lhs, q.rhs) for q in eqm.enumerate_equations(sig, d, 1)}  # noqa: E731
    assert target not in shapes(1)
    assert target in shapes(2)


def test_enumeration_is_deterministic_and_well_formed():
    sig = gen.store_signature(True)
    a = eqm.enumerate_equations(sig, 1, 1)
    assert a == eqm.enumerate_equations(sig, 1, 1)
    for e in a:
        eqm.EQ.check_sentence(sig, e)


def test_fragment_kinds_coincide_for_equations():
    sig = gen.store_signature()
    full = eqm.EQ.fragment_sentences(sig, FragmentSpec.full(1))
    assert full == eqm.EQ.fragment_sentences(sig, FragmentSpec.negation_free(1))


# --- properties -------------------------------------------------------------

@given(st.randoms(use_true_random=False))
@settings(max_examples=300, deadline=None)
def test_satisfaction_condition(rng):
    src = gen.eq_signature(rng)
    phi, tgt = gen.eq_morphism(rng, src)
    assert eqm.EQ.morphism_problems(phi) == []
    A2 = gen.algebra(rng, tgt)
    e = gen.equation(rng, src, 2)
    assert eqm.EQ.check_satisfaction_condition(phi, A2, e)


@given(st.randoms(use_true_random=False))
@settings(max_examples=200, deadline=None)
def test_alpha_invariance(rng):
    sig = gen.eq_signature(rng)
    A = gen.algebra(rng, sig)
    e = gen.equation(rng, sig, 2)
    names = {n: f"y_{k}" for k, (n, _) in enumerate(e.variables)}
    renamed = eqm.alpha_rename(e, names)
    eqm.EQ.check_sentence(sig, renamed)
    assert eqm.eq_satisfy(A, e) == eqm.eq_satisfy(A, renamed)
