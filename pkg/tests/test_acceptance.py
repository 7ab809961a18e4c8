"""Acceptance criteria 1-9.

Each criterion is a function returning ``(passed, detail)``.  Under pytest
every criterion is one test and a PASS/FAIL line per criterion is printed in
the terminal summary; run this file directly to print the same lines.
"""
from __future__ import annotations

import os
import random
import sys
import tempfile
import time
from contextlib import redirect_stdout
from io import StringIO
from pathlib import Path

import pytest

HERE = Path(__file__).resolve().parent
sys.path.insert(0, str(HERE))

import gen  # noqa: E402
from conftest import ACCEPTANCE_LINES, FIXTURES  # noqa: E402
from hybridkit import cli, mvl, pl  # noqa: E402
from hybridkit.equiv import (  # noqa: E402
    BISIM,
    SIM,
    brute_force_largest,
    check_bisim,
    check_refinement,
    largest_bisim,
    largest_simulation,
    verify_invariance,
    verify_refinement_preservation,
)
from hybridkit.frontend import format_spec, load, parse_spec, tokenize  # noqa: E402
from hybridkit.hybrid import (  # noqa: E402
    BaseAtom,
    Box,
    HybridMorphism,
    hyb_reduct,
    hyb_sat_local,
    hyb_translate,
)
from hybridkit.institution import FragmentSpec, HybridKitError  # noqa: E402

LATTICES = FIXTURES / "lattices"


# --- 1. satisfaction condition ----------------------------------------------

def criterion_1(per_base: int = 1000, budget: float = 60.0):
    rng = random.Random(1)
    start = time.perf_counter()
    counts = {}
    failures = 0
    for kind in gen.BASES:
        n = 0
        while n < per_base:
            phi, K2, w, rho = gen.hybrid_triple(rng, kind, depth=3, max_worlds=4)
            if hyb_sat_local(hyb_reduct(phi, K2), w, rho) != hyb_sat_local(K2, w, hyb_translate(phi, rho)):
                failures += 1
            n += 1
        counts[kind] = n
    elapsed = time.perf_counter() - start
    ok = failures == 0 and elapsed < budget and all(v >= per_base for v in counts.values())
    return ok, f"{counts} triples, {failures} failures, {elapsed:.1f}s (limit {budget:.0f}s)"


# --- 2. bisimulation invariance and mutation --------------------------------

def _invariance_run(pair_maker, wanted: int, rng: random.Random):
    found = mutants = caught = rest_fail = violations = tries = 0
    while found < wanted and tries < 50 * wanted:
        tries += 1
        sig, left, right = pair_maker(rng)
        phi = HybridMorphism.identity(sig)
        search = largest_bisim(left, right, phi, FragmentSpec.atoms())
        if not search:
            continue
        found += 1
        B = search.relation
        violations += verify_invariance(B, depth=3).violation_count
        outside = [(a, b) for a in left.worlds for b in right.worlds if (a, b) not in B.pairs]
        if not outside:
            continue
        mutant = B.__class__(left, right, B.pairs | {rng.choice(outside)}, phi, B.fragment)
        mutants += 1
        if not verify_invariance(mutant, depth=3).ok:
            caught += 1
        elif not check_bisim(mutant).ok:
            rest_fail += 1
    return found, violations, mutants, caught, rest_fail


def criterion_2(wanted: int = 200):
    rng = random.Random(2)
    lines = []
    ok = True
    makers = {
        "H-PL": lambda r: gen.hpl_pair(r, nominals=r.randint(0, 1), props=r.randint(1, 2)),
        "H-MVL": lambda r: gen.hmvl_pair(r, nominals=r.randint(0, 1), props=1),
    }
    for name, maker in makers.items():
        found, violations, mutants, caught, rest_fail = _invariance_run(maker, wanted, rng)
        rate = caught / mutants if mutants else 1.0
        ok &= found >= wanted and violations == 0 and rate >= 0.95 and caught + rest_fail == mutants
        lines.append(f"{name}: {found} bisimilar pairs, {violations} violations; "
                     f"mutants caught {caught}/{mutants} ({rate:.1%}), rest failing check {rest_fail}")
    return ok, "; ".join(lines)


# --- 3. fixpoint against brute force ----------------------------------------

def criterion_3(instances: int = 500, budget: float = 120.0):
    rng = random.Random(3)
    start = time.perf_counter()
    agree = absent = 0
    for k in range(instances):
        sig, left, right = gen.hpl_pair(rng, max_product=9, nominals=rng.randint(0, 2),
                                        arities=rng.choice([(1,), (1,), (2,)]), props=rng.randint(1, 2))
        assert len(left.worlds) * len(right.worlds) <= 9
        phi = HybridMorphism.identity(sig)
        frag = rng.choice([FragmentSpec.atoms(), FragmentSpec.full(1)])
        mode = BISIM if k % 2 == 0 else SIM
        find = largest_bisim if mode == BISIM else largest_simulation
        got = find(left, right, phi, frag)
        oracle = brute_force_largest(left, right, phi, frag, mode)
        if got.pairs == oracle.pairs:
            agree += 1
        absent += not oracle
    elapsed = time.perf_counter() - start
    ok = agree == instances and elapsed < budget
    return ok, f"{agree}/{instances} equal ({absent} absence cases), {elapsed:.1f}s (limit {budget:.0f}s)"


# --- 4. refinement boundary -------------------------------------------------

def criterion_4():
    env = load((FIXTURES / "boundary.hyb").read_text(), FIXTURES)[1]
    R = env.relations["R"]
    rep = verify_refinement_preservation(R, depth=3)
    boxes = [b for b in rep.boundary if b["kind"] == "box"]
    # independent confirmation of one boxed sentence at the related pair
    box = Box("lam", (BaseAtom(pl.Atom("p")),))
    (w, w2), = R.pairs
    direct = hyb_sat_local(R.left, w, box) and not hyb_sat_local(R.right, w2, hyb_translate(R.morphism, box))
    ok = check_refinement(R).ok and rep.ok and bool(boxes) and direct
    return ok, (f"{rep.violation_count} positive-existential violations over {rep.sentence_classes} classes; "
                f"{len(boxes)} boxed counterexample(s), e.g. {boxes[0]['sentence'] if boxes else '-'}")


# --- 5. lattice laws --------------------------------------------------------

def criterion_5():
    good = {"bool": mvl.lattice_validate(mvl.boolean()), "chain(4)": mvl.lattice_validate(mvl.chain(4))}
    bad = mvl.lattice_validate(mvl.misprinted_lukasiewicz(4))
    ok = all(not v for v in good.values()) and bool(bad)
    return ok, (f"bool: {len(good['bool'])} violations, chain(4): {len(good['chain(4)'])} violations, "
                f"misprinted tensor: {len(bad)} violations (first: {bad[0] if bad else '-'})")


# --- 6. pointwise order gives implication -----------------------------------

def criterion_6(pairs: int = 200):
    rng = random.Random(6)
    lattices = [mvl.chain(4), mvl.chain(5), mvl.boolean()]
    held = 0
    for _ in range(pairs):
        L = rng.choice(lattices)
        logic = mvl.MultiValuedLogic(L)
        sig = gen.pl_signature(rng)
        lo = {p: rng.choice(L.elements) for p in sig.props}
        hi = {p: rng.choice([y for y in L.elements if L.le(lo[p], y)]) for p in sig.props}
        m, m2 = mvl.MVLModel(sig, lo), mvl.MVLModel(sig, hi)
        held += logic.elem_implies(m, m2, pl.prop_identity(sig), FragmentSpec.atoms())
    return held == pairs, f"{held}/{pairs} pointwise-ordered pairs satisfy the implication"


# --- 7. store example end to end --------------------------------------------

def criterion_7():
    path = FIXTURES / "store.hyb"
    out = StringIO()
    with redirect_stdout(out):
        status = cli.main(["check", str(path)])
    env = load(path.read_text(), FIXTURES)[1]
    R = env.relations["R"]
    refine_ok = check_refinement(R).ok
    found = largest_simulation(R.left, R.right, R.morphism, R.fragment)
    contains = bool(found) and R.pairs <= found.pairs
    ok = status == 0 and refine_ok and contains and R.pairs == {("star", "s1"), ("star", "s2")}
    return ok, f"exit {status}, check-refine {refine_ok}, find-refine contains R: {contains}"


# --- 8. textbook bisimulation -----------------------------------------------

def textbook_bisimilar(left, right):
    """Partition refinement on the disjoint union of two nominal-free Kripke
    models with one unary modality: states start out grouped by valuation and
    blocks are split by the set of successor blocks until nothing changes."""
    (lam, _), = left.signature.modalities
    states = [("L", w) for w in left.worlds] + [("R", w) for w in right.worlds]

    def model(s):
        return left if s[0] == "L" else right

    def succ(s):
        return [(s[0], t[1]) for t in model(s).relations[lam] if t[0] == s[1]]

    def label(s):
        v = model(s).local[s[1]].valuation
        return tuple(sorted(v.items()))

    block = {s: label(s) for s in states}
    while True:
        sig = {s: (block[s], frozenset(block[t] for t in succ(s))) for s in states}
        ids = {}
        new = {s: ids.setdefault(sig[s], len(ids)) for s in states}
        if len(set(new.values())) == len(set(block.values())):
            break
        block = new
    return {(a, b) for a in left.worlds for b in right.worlds if block[("L", a)] == block[("R", b)]}


def criterion_8(instances: int = 200):
    rng = random.Random(8)
    agree = nonempty = 0
    for _ in range(instances):
        sig, left, right = gen.hpl_pair(rng, max_product=16, nominals=0, props=rng.randint(1, 2))
        search = largest_bisim(left, right, HybridMorphism.identity(sig), FragmentSpec.atoms())
        ours = set(search.pairs or ())
        theirs = textbook_bisimilar(left, right)
        agree += ours == theirs
        nonempty += bool(theirs)
    return agree == instances, f"{agree}/{instances} agree ({nonempty} with a non-empty bisimulation)"


# --- 9. frontend robustness -------------------------------------------------

def _mutate(rng, toks):
    toks = list(toks)
    for _ in range(rng.randint(1, 3)):
        if not toks:
            break
        i = rng.randrange(len(toks))
        op = rng.randrange(4)
        if op == 0:
            del toks[i]
        elif op == 1:
            toks.insert(i, rng.choice(toks))
        elif op == 2:
            j = rng.randrange(len(toks))
            toks[i], toks[j] = toks[j], toks[i]
        else:
            toks[i] = rng.choice(["(", ")", "{", "}", ";", "x", "1/3", "@", "<", "[", ",", "=>", "!", "0"])
    return " ".join(toks)


def _malformed(text: str) -> bool:
    try:
        load(text, FIXTURES)
    except HybridKitError:
        return True
    return False


def criterion_9(inputs: int = 10_000):
    os.environ.setdefault("HYBRIDKIT_LATTICE_PATH", str(LATTICES))
    fixtures = sorted(FIXTURES.glob("*.hyb"))
    round_trip = sum(parse_spec(format_spec(parse_spec(p.read_text()))) == parse_spec(p.read_text())
                     for p in fixtures)
    sources = [[t.text for t in tokenize(p.read_text())][:-1] for p in fixtures]
    rng = random.Random(9)
    crashes = malformed = wrong_exit = 0
    with tempfile.TemporaryDirectory() as tmp:
        target = Path(tmp) / "fuzz.hyb"
        for k in range(inputs):
            if k % 2 == 0:
                data = _mutate(rng, rng.choice(sources)).encode()
            else:
                data = bytes(rng.randrange(256) for _ in range(rng.randint(0, 120)))
            target.write_bytes(data)
            try:
                with redirect_stdout(StringIO()):
                    status = cli.main(["check", str(target), "--depth", "1"])
            except Exception:  # any escape is a crash
                crashes += 1
                continue
            try:
                bad = _malformed(data.decode("utf-8"))
            except UnicodeDecodeError:
                bad = True
            if bad:
                malformed += 1
                wrong_exit += status != 2
    ok = round_trip == len(fixtures) and crashes == 0 and wrong_exit == 0
    return ok, (f"round trip {round_trip}/{len(fixtures)} fixtures; {inputs} fuzz inputs, {crashes} crashes, "
                f"{malformed} malformed of which {wrong_exit} did not exit 2")


CRITERIA = {
    1: ("satisfaction condition", criterion_1),
    2: ("bisimulation invariance", criterion_2),
    3: ("fixpoint equals brute force", criterion_3),
    4: ("refinement preservation boundary", criterion_4),
    5: ("residuated lattice laws", criterion_5),
    6: ("pointwise order gives implication", criterion_6),
    7: ("store example end to end", criterion_7),
    8: ("textbook bisimulation agreement", criterion_8),
    9: ("frontend robustness", criterion_9),
}


def run_criterion(k: int):
    name, fn = CRITERIA[k]
    ok, detail = fn()
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {k} ({name}): {detail}"
    ACCEPTANCE_LINES[k] = line
    print(line)
    return ok, line


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k):
    ok, line = run_criterion(k)
    assert ok, line


if __name__ == "__main__":
    results = [run_criterion(k)[0] for k in sorted(CRITERIA)]
    sys.exit(0 if all(results) else 1)
