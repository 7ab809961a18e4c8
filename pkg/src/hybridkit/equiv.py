"""Bisimulations and refinements between hybrid models.

Clause names follow the usual numbering: bisimulations are checked
against (i)-(v) and refinements against (f.i)-(f.iv).  The largest
relation is computed by deleting violating pairs until nothing changes.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Callable, Iterable, Optional, Sequence

from .hybrid import (
    At,
    BaseAtom,
    Box,
    Conj,
    Diamond,
    Disj,
    Evaluator,
    HybridMorphism,
    HybridSentence,
    Imp,
    KripkeModel,
    Neg,
    Nominal,
    check_morphism,
    default_pool,
    enumerate_hybrid,
    hyb_sat_local,
    hyb_translate,
    validate_model,
)
from .institution import FragmentSpec, ValidationError

BISIM = "bisim"
SIM = "sim"

BISIM_CLAUSES = {
    "i": "nominal agreement",
    "ii": "elementary equivalence of local models",
    "iii": "named worlds related",
    "iv": "forth",
    "v": "back",
}
SIM_CLAUSES = {
    "f.i": "nominal preservation",
    "f.ii": "local refinement",
    "f.iii": "named worlds related",
    "f.iv": "forth",
}


class PreconditionError(ValidationError):
    pass


@dataclass(frozen=True)
class WorldRelation:
    left: KripkeModel
    right: KripkeModel
    pairs: frozenset
    morphism: HybridMorphism
    fragment: FragmentSpec = FragmentSpec.atoms()

    def __post_init__(self):
        object.__setattr__(self, "pairs", frozenset(tuple(p) for p in self.pairs))

    def __hash__(self):
        return hash(self.pairs)

    def sorted_pairs(self) -> list[tuple[str, str]]:
        li = {w: k for k, w in enumerate(self.left.worlds)}
        ri = {w: k for k, w in enumerate(self.right.worlds)}
        return sorted(self.pairs, key=lambda p: (li.get(p[0], -1), ri.get(p[1], -1), p))

    def inverse(self) -> "WorldRelation":
        """Swap sides; only meaningful along an identity morphism."""
        if self.morphism.source != self.morphism.target:
            raise ValidationError("only relations along an identity morphism can be inverted")
        return WorldRelation(self.right, self.left, {(b, a) for a, b in self.pairs},
                             self.morphism, self.fragment)


@dataclass
class Condition:
    name: str
    title: str
    passed: bool = True
    violations: list[dict] = field(default_factory=list)

    def fail(self, **detail):
        self.passed = False
        self.violations.append(detail)


@dataclass
class ConditionReport:
    kind: str
    conditions: list[Condition]
    nonempty: bool

    @property
    def ok(self) -> bool:
        return self.nonempty and all(c.passed for c in self.conditions)

    def __getitem__(self, name: str) -> Condition:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "verdict": self.ok,
            "nonempty": self.nonempty,
            "conditions": [
                {"name": c.name, "title": c.title, "passed": c.passed, "violations": c.violations}
                for c in self.conditions
            ],
            "violations": [dict(v, condition=c.name) for c in self.conditions for v in c.violations],
        }


def check_inputs(left: KripkeModel, right: KripkeModel, phi: HybridMorphism) -> None:
    check_morphism(phi)
    if left.signature != phi.source:
        raise ValidationError("left model is not over the morphism's source signature")
    if right.signature != phi.target:
        raise ValidationError("right model is not over the morphism's target signature")
    for side, K in (("left", left), ("right", right)):
        problems = validate_model(K)
        if problems:
            raise ValidationError(f"{side} model: " + "; ".join(problems))


def check_relation(R: WorldRelation) -> None:
    check_inputs(R.left, R.right, R.morphism)
    lw, rw = set(R.left.worlds), set(R.right.worlds)
    for a, b in R.sorted_pairs():
        if a not in lw:
            raise ValidationError(f"pair ({a}, {b}): {a!r} is not a world of the left model")
        if b not in rw:
            raise ValidationError(f"pair ({a}, {b}): {b!r} is not a world of the right model")


class _Clauses:
    """Pair-level clause checks for one (left, right, morphism, fragment) setup."""

    def __init__(self, left, right, phi, frag):
        self.left, self.right, self.phi, self.frag = left, right, phi, frag
        self.logic = phi.source.logic
        self._local: dict[tuple[str, str, bool], Any] = {}

    def nominal_clash(self, w, w2, both_ways: bool) -> list[str]:
        bad = []
        for i in self.phi.source.nominals:
            here = self.left.nominals[i] == w
            there = self.right.nominals[self.phi.nom(i)] == w2
            if (here != there) if both_ways else (here and not there):
                bad.append(i)
        return bad

    def local_witness(self, w, w2, both_ways: bool):
        """A fragment sentence separating the local models, or ``None``."""
        key = (w, w2, both_ways)
        if key not in self._local:
            self._local[key] = self.logic.distinguishing_sentence(
                self.left.local[w], self.right.local[w2], self.phi.base, self.frag, both_ways)
        return self._local[key]

    def static_ok(self, p, mode) -> bool:
        both = mode == BISIM
        return not self.nominal_clash(*p, both) and self.local_witness(*p, both) is None

    def unmatched_forth(self, p, pairs) -> list[tuple[str, tuple]]:
        w, w2 = p
        bad = []
        for lam, _ in self.phi.source.modalities:
            targets = self.right.successors(self.phi.mod(lam), w2)
            for t in self.left.successors(lam, w):
                if not any(all((a, b) in pairs for a, b in zip(t[1:], t2[1:])) for t2 in targets):
                    bad.append((lam, t))
        return bad

    def unmatched_back(self, p, pairs) -> list[tuple[str, tuple]]:
        w, w2 = p
        bad = []
        for lam, _ in self.phi.source.modalities:
            sources = self.left.successors(lam, w)
            for t2 in self.right.successors(self.phi.mod(lam), w2):
                if not any(all((a, b) in pairs for a, b in zip(t[1:], t2[1:])) for t in sources):
                    bad.append((lam, t2))
        return bad

    def dynamic_ok(self, p, pairs, mode) -> bool:
        if self.unmatched_forth(p, pairs):
            return False
        return mode == SIM or not self.unmatched_back(p, pairs)

    def missing_named(self, pairs) -> list[tuple[str, tuple[str, str]]]:
        out = []
        for i in self.phi.source.nominals:
            need = (self.left.nominals[i], self.right.nominals[self.phi.nom(i)])
            if need not in pairs:
                out.append((i, need))
        return out

    def holds(self, pairs, mode) -> bool:
        """Whether ``pairs`` is a witness for ``mode``, without building a report."""
        if not pairs or self.missing_named(pairs):
            return False
        return all(self.static_ok(p, mode) and self.dynamic_ok(p, pairs, mode) for p in pairs)


def _report(R: WorldRelation, mode: str) -> ConditionReport:
    check_relation(R)
    cl = _Clauses(R.left, R.right, R.morphism, R.fragment)
    both = mode == BISIM
    names = list(BISIM_CLAUSES if both else SIM_CLAUSES)
    titles = BISIM_CLAUSES if both else SIM_CLAUSES
    conds = {n: Condition(n, titles[n]) for n in names}
    c_nom, c_loc, c_named, c_forth = (conds[n] for n in names[:4])
    pairs = R.pairs
    for p in R.sorted_pairs():
        for i in cl.nominal_clash(*p, both):
            c_nom.fail(pair=list(p), nominal=i)
        rho = cl.local_witness(*p, both)
        if rho is not None:
            c_loc.fail(pair=list(p), sentence=str(rho))
        for lam, t in cl.unmatched_forth(p, pairs):
            c_forth.fail(pair=list(p), modality=lam, tuple=list(t))
        if both:
            for lam, t in cl.unmatched_back(p, pairs):
                conds["v"].fail(pair=list(p), modality=lam, tuple=list(t))
    for i, need in cl.missing_named(pairs):
        c_named.fail(nominal=i, pair=list(need))
    return ConditionReport("bisimulation" if both else "refinement",
                           [conds[n] for n in names], bool(pairs))


def check_bisim(B: WorldRelation) -> ConditionReport:
    return _report(B, BISIM)


def check_refinement(R: WorldRelation) -> ConditionReport:
    return _report(R, SIM)


@dataclass
class Search:
    """Outcome of a search for the largest relation.

    ``relation`` is ``None`` when no witness exists; ``reason`` then says why.
    """

    relation: Optional[WorldRelation]
    reason: Optional[str] = None
    trace: list[dict] = field(default_factory=list)

    def __bool__(self):
        return self.relation is not None

    @property
    def pairs(self) -> Optional[frozenset]:
        return None if self.relation is None else self.relation.pairs


def _all_pairs(left: KripkeModel, right: KripkeModel) -> list[tuple[str, str]]:
    return [(a, b) for a in left.worlds for b in right.worlds]


def _largest(left, right, phi, frag, mode, order: Optional[random.Random] = None) -> Search:
    check_inputs(left, right, phi)
    cl = _Clauses(left, right, phi, frag)
    trace: list[dict] = []
    relation = []
    for p in _all_pairs(left, right):
        if cl.static_ok(p, mode):
            relation.append(p)
        else:
            trace.append({"step": "seed-drop", "pair": list(p)})
    current = set(relation)
    changed = True
    rounds = 0
    while changed:
        changed = False
        rounds += 1
        scan = [p for p in relation if p in current]
        if order is not None:
            order.shuffle(scan)
        for p in scan:
            if not cl.dynamic_ok(p, current, mode):
                current.discard(p)
                changed = True
                trace.append({"step": "delete", "round": rounds, "pair": list(p)})
    what = "bisimulation" if mode == BISIM else "refinement"
    missing = cl.missing_named(current)
    if missing:
        i, need = missing[0]
        empty = " (which is empty)" if not current else ""
        return Search(None, f"no {what} exists: nominal {i!r} needs pair ({need[0]}, {need[1]}), "
                            f"which is not in the largest candidate relation{empty}", trace)
    if not current:
        return Search(None, f"no {what} exists: the largest candidate relation is empty", trace)
    return Search(WorldRelation(left, right, frozenset(current), phi, frag), None, trace)


def largest_bisim(left: KripkeModel, right: KripkeModel, phi: HybridMorphism,
                  frag: FragmentSpec, order: Optional[random.Random] = None) -> Search:
    """Largest relation satisfying (i), (ii), (iv), (v), then checked for (iii)."""
    return _largest(left, right, phi, frag, BISIM, order)


def largest_simulation(left: KripkeModel, right: KripkeModel, phi: HybridMorphism,
                       frag: FragmentSpec, order: Optional[random.Random] = None) -> Search:
    return _largest(left, right, phi, frag, SIM, order)


BRUTE_FORCE_LIMIT = 16


def brute_force_largest(left: KripkeModel, right: KripkeModel, phi: HybridMorphism,
                        frag: FragmentSpec, mode: str = BISIM) -> Search:
    """Enumerate every relation and keep the union of those passing the clause checks.

    Pairs failing a per-pair clause cannot occur in any passing relation,
    so only subsets of the remaining pairs are enumerated.
    """
    if mode not in (BISIM, SIM):
        raise ValueError(f"mode must be {BISIM!r} or {SIM!r}")
    if len(left.worlds) * len(right.worlds) > BRUTE_FORCE_LIMIT:
        raise ValidationError(f"brute force is limited to |W|*|W'| <= {BRUTE_FORCE_LIMIT}")
    check_inputs(left, right, phi)
    cl = _Clauses(left, right, phi, frag)
    usable = [p for p in _all_pairs(left, right) if cl.static_ok(p, mode)]
    passing = []
    for mask in range(1, 1 << len(usable)):
        pairs = frozenset(p for k, p in enumerate(usable) if mask >> k & 1)
        if cl.holds(pairs, mode):
            passing.append(pairs)
    if not passing:
        return Search(None, "no relation passes the clause checks")
    union = frozenset().union(*passing)
    if not cl.holds(union, mode):
        union = max(passing, key=len)
    return Search(WorldRelation(left, right, union, phi, frag))


# --- truth-preservation harnesses --------------------------------------------

@dataclass
class PreservationReport:
    kind: str
    depth: int
    pairs_checked: int = 0
    sentence_classes: int = 0
    violations: list[dict] = field(default_factory=list)
    violation_count: int = 0
    precondition: Optional[ConditionReport] = None
    dropped_atoms: list[str] = field(default_factory=list)
    boundary: list[dict] = field(default_factory=list)
    global_checked: bool = False

    @property
    def ok(self) -> bool:
        return self.violation_count == 0

    def add(self, limit: int, **detail):
        self.violation_count += 1
        if len(self.violations) < limit:
            self.violations.append(detail)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "verdict": self.ok,
            "depth": self.depth,
            "pairs_checked": self.pairs_checked,
            "sentence_classes": self.sentence_classes,
            "violation_count": self.violation_count,
            "violations": self.violations,
            "precondition": None if self.precondition is None else self.precondition.to_dict(),
            "dropped_atoms": self.dropped_atoms,
            "boundary": self.boundary,
            "global_checked": self.global_checked,
        }


Key = tuple[int, int]


def sentence_classes(left: KripkeModel, right: KripkeModel, phi: HybridMorphism, pool: Sequence,
                     depth: int, positive: bool = False,
                     on_candidate: Optional[Callable[[str, Key, Callable[[], HybridSentence]], None]] = None,
                     ) -> tuple[dict[Key, HybridSentence], Evaluator, Evaluator]:
    """Group all sentences up to ``depth`` by their pair of extensions.

    A class key is ``(extension of rho in left, extension of its
    translation in right)``.  Satisfaction is compositional, so every
    sentence of a class behaves the same under every connective; one
    witness sentence per class is kept.  Combining only tuples that
    involve a class first reached at the previous level covers every
    sentence of the next level.
    """
    L, Rv = Evaluator(left), Evaluator(right)
    sig = phi.source
    logic = sig.logic
    witness: dict[Key, HybridSentence] = {}
    frontier: list[Key] = []

    def offer(key: Key, make: Callable[[], HybridSentence]) -> None:
        if key not in witness:
            witness[key] = make()
            frontier.append(key)

    for a in pool:
        offer((L.base(a), Rv.base(logic.translate(phi.base, a))), lambda a=a: BaseAtom(a))
    for i in sig.nominals:
        offer((L.nominal(i), Rv.nominal(phi.nom(i))), lambda i=i: Nominal(i))

    for _ in range(depth):
        if not frontier:
            break  # closed: deeper levels add no new classes
        known = list(witness)
        fresh = set(frontier)
        recent = list(frontier)
        frontier = []
        W = witness

        if not positive:
            for k in recent:
                key = (L.neg(k[0]), Rv.neg(k[1]))
                make = lambda k=k: Neg(W[k])
                if on_candidate:
                    on_candidate("negation", key, make)
                offer(key, make)
        binary = [("or", Disj, L.disj, Rv.disj), ("and", Conj, L.conj, Rv.conj)]
        if not positive:
            binary.append(("implication", Imp, L.imp, Rv.imp))
        for a in known:
            for b in known:
                if a not in fresh and b not in fresh:
                    continue
                for kind, cls, fl, fr in binary:
                    key = (fl(a[0], b[0]), fr(a[1], b[1]))
                    make = lambda cls=cls, a=a, b=b: cls(W[a], W[b])
                    if on_candidate and kind == "implication":
                        on_candidate(kind, key, make)
                    offer(key, make)
        for i in sig.nominals:
            j = phi.nom(i)
            for k in recent:
                offer((L.at(i, k[0]), Rv.at(j, k[1])), lambda i=i, k=k: At(i, W[k]))
        for lam, n in sig.modalities:
            mu = phi.mod(lam)
            for args in product(known, repeat=n):
                if not any(a in fresh for a in args):
                    continue
                lefts = [a[0] for a in args]
                rights = [a[1] for a in args]
                key = (L.diamond(lam, lefts), Rv.diamond(mu, rights))
                offer(key, lambda lam=lam, args=args: Diamond(lam, tuple(W[a] for a in args)))
                if not positive:
                    key = (L.box(lam, lefts), Rv.box(mu, rights))
                    make = lambda lam=lam, args=args: Box(lam, tuple(W[a] for a in args))
                    if on_candidate:
                        on_candidate("box", key, make)
                    offer(key, make)
    return witness, L, Rv


def _pool(R: WorldRelation, pool: Optional[Sequence], report: PreservationReport) -> list:
    sig = R.morphism.source
    if pool is None:
        pool = default_pool(sig, R.fragment)
    kept = []
    for a in pool:
        sig.logic.check_sentence(sig.base, a)
        if sig.logic.in_fragment(a, R.fragment):
            kept.append(a)
        else:
            report.dropped_atoms.append(str(a))
    return kept


def _literal_classes(R: WorldRelation, pool, depth, positive):
    """Exhaustive variant: every enumerated sentence is its own class."""
    sig = R.morphism.source
    out = {}
    for rho in enumerate_hybrid(sig, pool, depth, positive=positive):
        rho2 = hyb_translate(R.morphism, rho)
        lm = frozenset(w for w in R.left.worlds if hyb_sat_local(R.left, w, rho))
        rm = frozenset(w for w in R.right.worlds if hyb_sat_local(R.right, w, rho2))
        out.setdefault((lm, rm), rho)
    return out


def verify_invariance(B: WorldRelation, pool: Optional[Sequence] = None, depth: int = 3,
                      exhaustive: bool = False, limit: int = 50) -> PreservationReport:
    """Check that every related pair agrees on every sentence up to ``depth``.

    The relation is checked as a bisimulation first and the outcome kept in
    ``precondition``; sentences are checked regardless, so corrupted
    relations show up as violations.
    """
    report = PreservationReport("invariance", depth, precondition=check_bisim(B))
    atoms = _pool(B, pool, report)
    report.pairs_checked = len(B.pairs)
    if exhaustive:
        classes = _literal_classes(B, atoms, depth, positive=False)
        report.sentence_classes = len(classes)
        for (lm, rm), rho in classes.items():
            for a, b in B.sorted_pairs():
                if (a in lm) != (b in rm):
                    report.add(limit, pair=[a, b], sentence=str(rho), left=a in lm, right=b in rm)
        return report
    classes, L, Rv = sentence_classes(B.left, B.right, B.morphism, atoms, depth)
    report.sentence_classes = len(classes)
    for (lm, rm), rho in classes.items():
        for a, b in B.sorted_pairs():
            here, there = bool(lm & L.bit(a)), bool(rm & Rv.bit(b))
            if here != there:
                report.add(limit, pair=[a, b], sentence=str(rho), left=here, right=there)
    return report


def verify_global_invariance(B: WorldRelation, pool: Optional[Sequence] = None, depth: int = 3,
                             limit: int = 50) -> PreservationReport:
    check_relation(B)
    uncovered_left = [w for w in B.left.worlds if not any(a == w for a, _ in B.pairs)]
    uncovered_right = [w for w in B.right.worlds if not any(b == w for _, b in B.pairs)]
    if uncovered_left or uncovered_right:
        raise PreconditionError(
            "relation must be total and surjective; unrelated left worlds: "
            f"{uncovered_left}, unrelated right worlds: {uncovered_right}")
    report = PreservationReport("global-invariance", depth, precondition=check_bisim(B),
                                global_checked=True)
    atoms = _pool(B, pool, report)
    report.pairs_checked = len(B.pairs)
    classes, L, Rv = sentence_classes(B.left, B.right, B.morphism, atoms, depth)
    report.sentence_classes = len(classes)
    for (lm, rm), rho in classes.items():
        here, there = lm == L.all, rm == Rv.all
        if here != there:
            report.add(limit, sentence=str(rho), left=here, right=there)
    return report


def verify_refinement_preservation(R: WorldRelation, pool: Optional[Sequence] = None, depth: int = 3,
                                   boundary: bool = True, limit: int = 50,
                                   boundary_limit: int = 3) -> PreservationReport:
    """Positive existential sentences true on the left stay true on the right.

    With ``boundary`` the full language is searched as well for boxed,
    negated or implicational sentences that are true at a left world but
    false at its related right world, showing where preservation stops.
    """
    report = PreservationReport("refinement-preservation", depth, precondition=check_refinement(R))
    atoms = _pool(R, pool, report)
    report.pairs_checked = len(R.pairs)
    pairs = R.sorted_pairs()
    classes, L, Rv = sentence_classes(R.left, R.right, R.morphism, atoms, depth, positive=True)
    report.sentence_classes = len(classes)
    for (lm, rm), rho in classes.items():
        for a, b in pairs:
            if lm & L.bit(a) and not rm & Rv.bit(b):
                report.add(limit, pair=[a, b], sentence=str(rho), left=True, right=False)
    surjective = all(any(b == w for _, b in R.pairs) for w in R.right.worlds)
    if surjective:
        report.global_checked = True
        for (lm, rm), rho in classes.items():
            if lm == L.all and rm != Rv.all:
                report.add(limit, sentence=str(rho), scope="global", left=True, right=False)
    if boundary:
        found: dict[str, int] = {}

        def look(kind, key, make):
            if found.get(kind, 0) >= boundary_limit:
                return
            for a, b in pairs:
                if key[0] & L.bit(a) and not key[1] & Rv.bit(b):
                    found[kind] = found.get(kind, 0) + 1
                    report.boundary.append({"kind": kind, "pair": [a, b], "sentence": str(make())})
                    return

        sentence_classes(R.left, R.right, R.morphism, atoms, depth, on_candidate=look)
    return report


def is_total(R: WorldRelation) -> bool:
    return all(any(a == w for a, _ in R.pairs) for w in R.left.worlds)


def is_surjective(R: WorldRelation) -> bool:
    return all(any(b == w for _, b in R.pairs) for w in R.right.worlds)


def relation_from(left: KripkeModel, right: KripkeModel, pairs: Iterable, phi: Optional[HybridMorphism] = None,
                  frag: Optional[FragmentSpec] = None) -> WorldRelation:
    phi = phi or HybridMorphism.identity(left.signature)
    return WorldRelation(left, right, frozenset(pairs), phi, frag or FragmentSpec.atoms())
