"""Random generators for signatures, models, morphisms and sentences.

Everything takes a ``random.Random`` so tests are reproducible from a seed
and can also be driven by hypothesis through ``st.randoms()``.
"""
from __future__ import annotations

import random
from itertools import product

from hybridkit import eq as eqm
from hybridkit import mvl, pl
from hybridkit.hybrid import (
    At,
    BaseAtom,
    Box,
    Conj,
    Diamond,
    Disj,
    HybridMorphism,
    HybridSignature,
    Imp,
    KripkeModel,
    Neg,
    Nominal,
)
from hybridkit.institution import BaseMorphism

CHAIN4 = mvl.chain(4)
MVL4 = mvl.MultiValuedLogic(CHAIN4)


# --- propositional and many-valued ------------------------------------------

def pl_signature(rng: random.Random, lo: int = 1, hi: int = 3, prefix: str = "p") -> pl.PLSignature:
    return pl.PLSignature([f"{prefix}{k}" for k in range(rng.randint(lo, hi))])


def pl_model(rng: random.Random, sig: pl.PLSignature) -> pl.PLModel:
    return pl.PLModel(sig, {p: rng.random() < 0.5 for p in sig.props})


def pl_formula(rng: random.Random, props, depth: int):
    if depth == 0 or rng.random() < 0.25:
        return pl.Atom(rng.choice(props))
    k = rng.randrange(4)
    if k == 0:
        return pl.Not(pl_formula(rng, props, depth - 1))
    cls = (pl.Or, pl.And, pl.Implies)[k - 1]
    return cls(pl_formula(rng, props, depth - 1), pl_formula(rng, props, depth - 1))


def prop_morphism(rng: random.Random, src, tgt) -> BaseMorphism:
    return BaseMorphism(src, tgt, {"prop": {p: rng.choice(tgt.props) for p in src.props}})


def mvl_model(rng: random.Random, sig: pl.PLSignature, L=CHAIN4) -> mvl.MVLModel:
    return mvl.MVLModel(sig, {p: rng.choice(L.elements) for p in sig.props})


def mvl_formula(rng: random.Random, props, depth: int, negation_free: bool = False):
    if depth == 0 or rng.random() < 0.25:
        r = rng.random()
        if r < 0.1:
            return mvl.Top()
        if r < 0.2:
            return mvl.Bot()
        return mvl.Prop(rng.choice(props))
    ops = (mvl.Join, mvl.Tensor) if negation_free else (mvl.Join, mvl.Tensor, mvl.Res)
    cls = rng.choice(ops)
    return cls(mvl_formula(rng, props, depth - 1, negation_free),
               mvl_formula(rng, props, depth - 1, negation_free))


def mvl_sentence(rng: random.Random, props, depth: int, L=CHAIN4) -> mvl.MVLSentence:
    return mvl.MVLSentence(mvl_formula(rng, props, depth), rng.choice(L.elements))


# --- equational -------------------------------------------------------------

def eq_signature(rng: random.Random, max_symbols: int = 3) -> eqm.EQSignature:
    sorts = ["s", "t"][: rng.randint(1, 2)]
    n_ops = rng.randint(1, max(1, max_symbols - len(sorts) + 1))
    ops = []
    for k in range(n_ops):
        arity = rng.randint(0, 2)
        ops.append(eqm.OpDecl(f"f{k}", [rng.choice(sorts) for _ in range(arity)], rng.choice(sorts)))
    return eqm.EQSignature(sorts, ops)


def algebra(rng: random.Random, sig: eqm.EQSignature, max_carrier: int = 3) -> eqm.FiniteAlgebra:
    carriers = {s: tuple(f"{s}{k}" for k in range(rng.randint(1, max_carrier))) for s in sig.sorts}
    tables = {}
    for o in sig.ops:
        tables[o.name] = {args: rng.choice(carriers[o.result])
                          for args in product(*(carriers[a] for a in o.args))}
    return eqm.FiniteAlgebra(sig, carriers, tables)


def term(rng: random.Random, sig: eqm.EQSignature, sort: str, depth: int, variables):
    makers = [o for o in sig.ops if o.result == sort and (depth > 0 or not o.args)]
    vs = [v for v in variables if v.sort == sort]
    if vs and (not makers or rng.random() < 0.4):
        return rng.choice(vs)
    if not makers:
        return None
    o = rng.choice(makers)
    args = []
    for a in o.args:
        t = term(rng, sig, a, depth - 1, variables)
        if t is None:
            return None
        args.append(t)
    return eqm.App(o.name, tuple(args))


def equation(rng: random.Random, sig: eqm.EQSignature, depth: int = 2) -> eqm.Equation:
    variables = [eqm.Var(f"x{k}", rng.choice(sig.sorts)) for k in range(rng.randint(0, 2))]
    for _ in range(50):
        sort = rng.choice(sig.sorts)
        lhs = term(rng, sig, sort, depth, variables)
        rhs = term(rng, sig, sort, depth, variables)
        if lhs is not None and rhs is not None:
            used = {v for t in (lhs, rhs) for v in eqm.vars_of(t)}
            return eqm.Equation(tuple((v.name, v.sort) for v in variables if v in used), lhs, rhs)
    # every sort has a variable or constant in practice; fall back to x = x
    s = sig.sorts[0]
    return eqm.Equation((("x", s),), eqm.Var("x", s), eqm.Var("x", s))


def eq_morphism(rng: random.Random, src: eqm.EQSignature) -> tuple[BaseMorphism, eqm.EQSignature]:
    """A morphism out of ``src`` into a fresh target that may merge sorts and operations."""
    tsorts = ["S", "T"][: rng.randint(1, 2)]
    smap = {s: rng.choice(tsorts) for s in src.sorts}
    tops: list[eqm.OpDecl] = []
    omap = {}
    for o in src.ops:
        prof = (tuple(smap[a] for a in o.args), smap[o.result])
        same = [t for t in tops if (t.args, t.result) == prof]
        if same and rng.random() < 0.5:
            omap[o.name] = rng.choice(same).name
        else:
            t = eqm.OpDecl(f"g{len(tops)}", prof[0], prof[1])
            tops.append(t)
            omap[o.name] = t.name
    for _ in range(rng.randint(0, 1)):
        tops.append(eqm.OpDecl(f"g{len(tops)}", [rng.choice(tsorts)], rng.choice(tsorts)))
    tgt = eqm.EQSignature(tsorts, tops)
    return BaseMorphism(src, tgt, {"sort": smap, "op": omap}), tgt


# --- hybrid -----------------------------------------------------------------

def hybrid_signature(rng: random.Random, logic, base, max_nominals: int = 2,
                     arities=(1,), prefix: str = "") -> HybridSignature:
    noms = [f"{prefix}i{k}" for k in range(rng.randint(0, max_nominals))]
    mods = [(f"{prefix}m{k}", n) for k, n in enumerate(arities)]
    return HybridSignature(logic, base, noms, mods)


def kripke(rng: random.Random, sig: HybridSignature, local, lo: int = 1, hi: int = 4,
           density: float = 0.35, prefix: str = "w") -> KripkeModel:
    """``local(rng, base_sig)`` makes one local model."""
    worlds = [f"{prefix}{k}" for k in range(rng.randint(lo, hi))]
    noms = {i: rng.choice(worlds) for i in sig.nominals}
    rels = {}
    for m, n in sig.modalities:
        rels[m] = [t for t in product(worlds, repeat=n + 1) if rng.random() < density]
    return KripkeModel(sig, worlds, noms, rels, {w: local(rng, sig.base) for w in worlds})


def hybrid_morphism(rng: random.Random, src: HybridSignature, tgt: HybridSignature,
                    base: BaseMorphism) -> HybridMorphism:
    noms = {i: rng.choice(tgt.nominals) for i in src.nominals}
    by_arity: dict[int, list[str]] = {}
    for m, n in tgt.modalities:
        by_arity.setdefault(n, []).append(m)
    mods = {m: rng.choice(by_arity[n]) for m, n in src.modalities}
    return HybridMorphism(src, tgt, base, noms, mods)


def hybrid_sentence(rng: random.Random, sig: HybridSignature, pool, depth: int, positive: bool = False):
    leaves = [BaseAtom(a) for a in pool] + [Nominal(i) for i in sig.nominals]
    if depth == 0 or rng.random() < 0.2:
        return rng.choice(leaves)
    kinds = ["or", "and", "dia"]
    if sig.nominals:
        kinds.append("at")
    if not positive:
        kinds += ["not", "imp", "box"]
    k = rng.choice(kinds)

    def sub():
        return hybrid_sentence(rng, sig, pool, depth - 1, positive)

    if k == "not":
        return Neg(sub())
    if k in ("or", "and", "imp"):
        return {"or": Disj, "and": Conj, "imp": Imp}[k](sub(), sub())
    if k == "at":
        return At(rng.choice(sig.nominals), sub())
    m, n = rng.choice(sig.modalities)
    return (Diamond if k == "dia" else Box)(m, tuple(sub() for _ in range(n)))


def hpl_pair(rng: random.Random, max_product: int = 9, nominals: int = 1, arities=(1,), props: int = 1):
    """Two random H-PL models over one signature with |W|*|W'| <= ``max_product``."""
    base = pl.PLSignature([f"p{k}" for k in range(props)])
    sig = hybrid_signature(rng, pl.PL, base, nominals, arities)
    a = rng.randint(1, 3)
    b = rng.randint(1, max(1, min(3, max_product // a)))
    left = kripke(rng, sig, pl_model, a, a, prefix="w")
    right = kripke(rng, sig, pl_model, b, b, prefix="u")
    return sig, left, right


def hmvl_pair(rng: random.Random, max_product: int = 9, nominals: int = 1, props: int = 1, L=CHAIN4):
    logic = mvl.MultiValuedLogic(L)
    base = pl.PLSignature([f"p{k}" for k in range(props)])
    sig = hybrid_signature(rng, logic, base, nominals, (1,))
    a = rng.randint(1, 3)
    b = rng.randint(1, max(1, min(3, max_product // a)))

    def local(r, s):
        return mvl_model(r, s, L)

    return sig, kripke(rng, sig, local, a, a, prefix="w"), kripke(rng, sig, local, b, b, prefix="u")


# --- the bounded store of the running example -------------------------------

def store_signature(extended=False):
    ops = [eqm.OpDecl("write", ["mem", "elem"], "mem"), eqm.OpDecl("del", ["mem"], "mem")]
    if extended:
        ops += [eqm.OpDecl("read", ["mem"], "elem"), eqm.OpDecl("empty", [], "mem")]
    return eqm.EQSignature(["mem", "elem"], ops)


def store_law():
    m, e = eqm.Var("m", "mem"), eqm.Var("e", "elem")
    return eqm.Equation((("m", "mem"), ("e", "elem")),
                        eqm.App("del", (eqm.App("write", (m, e)),)), m)


def store_algebra(read_first=True):
    """Bounded store: three memories in a cycle, write moves on, del moves back."""
    mems = ("m0", "m1", "m2")
    elems = ("a", "b")
    nxt = {"m0": "m1", "m1": "m2", "m2": "m0"}
    prv = {v: k for k, v in nxt.items()}
    read = {"m0": "a", "m1": "a" if read_first else "b", "m2": "b"}
    return eqm.FiniteAlgebra(store_signature(True), {"mem": mems, "elem": elems}, {
        "write": {(m, e): nxt[m] for m in mems for e in elems},
        "del": {(m,): prv[m] for m in mems},
        "read": {(m,): read[m] for m in mems},
        "empty": {(): "m0"},
    })


# --- satisfaction-condition triples -----------------------------------------

BASES = ("pl", "eq", "mvl")


def base_pieces(rng: random.Random, kind: str):
    """(logic, source base sig, base morphism, local model maker, atom maker) for one base logic."""
    if kind == "pl":
        src = pl_signature(rng, prefix="p")
        tgt = pl_signature(rng, prefix="r")
        return (pl.PL, src, prop_morphism(rng, src, tgt), pl_model,
                lambda r: pl_formula(r, src.props, rng.randint(0, 2)))
    if kind == "mvl":
        src = pl_signature(rng, prefix="p")
        tgt = pl_signature(rng, prefix="r")
        return (MVL4, src, prop_morphism(rng, src, tgt), mvl_model,
                lambda r: mvl_sentence(r, src.props, rng.randint(0, 2)))
    if kind == "eq":
        src = eq_signature(rng)
        phi, _ = eq_morphism(rng, src)

        def local(r, sig):
            return algebra(r, sig, 2)

        return eqm.EQ, src, phi, local, lambda r: equation(r, src, 1)
    raise ValueError(kind)


def hybrid_triple(rng: random.Random, kind: str, depth: int = 3, max_worlds: int = 4):
    """A random (morphism, target model, world, source sentence) over base ``kind``.

    The hybrid signatures have at most three symbols each besides the base.
    """
    logic, bsrc, bphi, local, atom = base_pieces(rng, kind)
    src_arities = rng.choice([(1,), (2,), (1, 1)])
    src = HybridSignature(logic, bsrc, [f"i{k}" for k in range(rng.randint(0, 3 - len(src_arities)))],
                          [(f"m{k}", n) for k, n in enumerate(src_arities)])
    tgt_mods = [(f"n{k}", n) for k, n in enumerate(sorted(set(src_arities)))]
    tgt_mods += [(f"n{len(tgt_mods)}", rng.choice((1, 2)))] if rng.random() < 0.3 else []
    tgt = HybridSignature(logic, bphi.target, [f"j{k}" for k in range(rng.randint(1, 2))], tgt_mods)
    phi = hybrid_morphism(rng, src, tgt, bphi)
    K2 = kripke(rng, tgt, local, 1, max_worlds, density=0.3)
    pool = [atom(rng) for _ in range(3)]
    rho = hybrid_sentence(rng, src, pool, depth)
    return phi, K2, rng.choice(K2.worlds), rho
