"""Hybrid modal logic over an arbitrary base logic.

A hybrid signature adds nominals and polyadic modalities to a base
signature.  Models are Kripke structures whose worlds each carry a base
model.  A modality of arity ``n`` is interpreted by ``(n+1)``-tuples
``(w, w1, ..., wn)`` with the source world first.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Any, Mapping, Optional, Sequence

from .institution import (
    BaseMorphism,
    FragmentSpec,
    Institution,
    ValidationError,
    check_names,
    dedup,
)


@dataclass(frozen=True)
class HybridSignature:
    logic: Institution
    base: Any
    nominals: tuple[str, ...] = ()
    modalities: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "nominals", tuple(self.nominals))
        mods = self.modalities
        if isinstance(mods, Mapping):
            mods = mods.items()
        object.__setattr__(self, "modalities", tuple((str(m), int(n)) for m, n in mods))

    @property
    def arities(self) -> dict[str, int]:
        return dict(self.modalities)

    def arity(self, modality: str) -> int:
        for m, n in self.modalities:
            if m == modality:
                return n
        raise ValidationError(f"undeclared modality {modality!r}")


def signature_problems(sig: HybridSignature) -> list[str]:
    problems = sig.logic.signature_problems(sig.base)
    problems += check_names(sig.nominals, "nominal")
    problems += check_names([m for m, _ in sig.modalities], "modality")
    for m, n in sig.modalities:
        if n < 1:
            problems.append(f"modality {m!r} has arity {n} < 1")
    return problems


@dataclass(frozen=True)
class HybridMorphism:
    source: HybridSignature
    target: HybridSignature
    base: BaseMorphism
    nominals: Mapping[str, str] = field(default_factory=dict)
    modalities: Mapping[str, str] = field(default_factory=dict)

    def __hash__(self):
        return hash((self.source, self.target))

    def nom(self, i: str) -> str:
        try:
            return self.nominals[i]
        except KeyError:
            raise ValidationError(f"morphism does not map nominal {i!r}") from None

    def mod(self, m: str) -> str:
        try:
            return self.modalities[m]
        except KeyError:
            raise ValidationError(f"morphism does not map modality {m!r}") from None

    @classmethod
    def identity(cls, sig: HybridSignature) -> "HybridMorphism":
        return cls(sig, sig, sig.logic.identity(sig.base),
                   {i: i for i in sig.nominals}, {m: m for m, _ in sig.modalities})


def morphism_problems(phi: HybridMorphism) -> list[str]:
    src, tgt = phi.source, phi.target
    if src.logic != tgt.logic:
        return ["source and target use different base logics"]
    if phi.base.source != src.base or phi.base.target != tgt.base:
        return ["base morphism endpoints do not match the hybrid signatures"]
    problems = src.logic.morphism_problems(phi.base)
    for i in src.nominals:
        if i not in phi.nominals:
            problems.append(f"nominal {i!r} is not mapped")
        elif phi.nominals[i] not in tgt.nominals:
            problems.append(f"image {phi.nominals[i]!r} of nominal {i!r} is not declared in the target")
    tgt_ar = tgt.arities
    for m, n in src.modalities:
        if m not in phi.modalities:
            problems.append(f"modality {m!r} is not mapped")
        elif phi.modalities[m] not in tgt_ar:
            problems.append(f"image {phi.modalities[m]!r} of modality {m!r} is not declared in the target")
        elif tgt_ar[phi.modalities[m]] != n:
            problems.append(f"modality {m!r} of arity {n} mapped to {phi.modalities[m]!r} "
                            f"of arity {tgt_ar[phi.modalities[m]]}")
    return problems


def check_morphism(phi: HybridMorphism) -> None:
    problems = morphism_problems(phi)
    if problems:
        raise ValidationError("; ".join(problems))


# --- sentences --------------------------------------------------------------

class HybridSentence:
    prec = 6

    def _wrap(self, child: "HybridSentence", min_prec: int) -> str:
        s = str(child)
        return f"({s})" if child.prec < min_prec else s


@dataclass(frozen=True)
class BaseAtom(HybridSentence):
    sentence: Any

    def __str__(self):
        return "{" + str(self.sentence) + "}"


@dataclass(frozen=True)
class Nominal(HybridSentence):
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Neg(HybridSentence):
    arg: HybridSentence
    prec = 4

    def __str__(self):
        return "!" + self._wrap(self.arg, 4)


@dataclass(frozen=True)
class Conj(HybridSentence):
    left: HybridSentence
    right: HybridSentence
    prec = 3

    def __str__(self):
        return f"{self._wrap(self.left, 3)} /\\ {self._wrap(self.right, 4)}"


@dataclass(frozen=True)
class Disj(HybridSentence):
    left: HybridSentence
    right: HybridSentence
    prec = 2

    def __str__(self):
        return f"{self._wrap(self.left, 2)} \\/ {self._wrap(self.right, 3)}"


@dataclass(frozen=True)
class Imp(HybridSentence):
    left: HybridSentence
    right: HybridSentence
    prec = 1

    def __str__(self):
        return f"{self._wrap(self.left, 2)} => {self._wrap(self.right, 1)}"


@dataclass(frozen=True)
class At(HybridSentence):
    nominal: str
    arg: HybridSentence
    prec = 4

    def __str__(self):
        return f"@{self.nominal} {self._wrap(self.arg, 4)}"


@dataclass(frozen=True)
class Diamond(HybridSentence):
    modality: str
    args: tuple[HybridSentence, ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))

    def __str__(self):
        return f"<{self.modality}>({', '.join(map(str, self.args))})"


@dataclass(frozen=True)
class Box(HybridSentence):
    modality: str
    args: tuple[HybridSentence, ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))

    def __str__(self):
        return f"[{self.modality}]({', '.join(map(str, self.args))})"


BINARY = (Disj, Conj, Imp)


def check_sentence(sig: HybridSignature, rho: HybridSentence) -> None:
    """Raise :class:`ValidationError` unless ``rho`` is well formed over ``sig``."""
    if isinstance(rho, BaseAtom):
        sig.logic.check_sentence(sig.base, rho.sentence)
    elif isinstance(rho, Nominal):
        if rho.name not in sig.nominals:
            raise ValidationError(f"undeclared nominal {rho.name!r}")
    elif isinstance(rho, Neg):
        check_sentence(sig, rho.arg)
    elif isinstance(rho, BINARY):
        check_sentence(sig, rho.left)
        check_sentence(sig, rho.right)
    elif isinstance(rho, At):
        if rho.nominal not in sig.nominals:
            raise ValidationError(f"undeclared nominal {rho.nominal!r}")
        check_sentence(sig, rho.arg)
    elif isinstance(rho, (Box, Diamond)):
        n = sig.arity(rho.modality)
        if len(rho.args) != n:
            raise ValidationError(f"modality {rho.modality!r} takes {n} argument(s), got {len(rho.args)}")
        for a in rho.args:
            check_sentence(sig, a)
    else:
        raise ValidationError(f"not a hybrid sentence: {rho!r}")


def hyb_translate(phi: HybridMorphism, rho: HybridSentence) -> HybridSentence:
    if isinstance(rho, BaseAtom):
        return BaseAtom(phi.source.logic.translate(phi.base, rho.sentence))
    if isinstance(rho, Nominal):
        return Nominal(phi.nom(rho.name))
    if isinstance(rho, Neg):
        return Neg(hyb_translate(phi, rho.arg))
    if isinstance(rho, BINARY):
        return type(rho)(hyb_translate(phi, rho.left), hyb_translate(phi, rho.right))
    if isinstance(rho, At):
        return At(phi.nom(rho.nominal), hyb_translate(phi, rho.arg))
    if isinstance(rho, (Box, Diamond)):
        return type(rho)(phi.mod(rho.modality), tuple(hyb_translate(phi, a) for a in rho.args))
    raise ValidationError(f"not a hybrid sentence: {rho!r}")


def depth(rho: HybridSentence) -> int:
    if isinstance(rho, (BaseAtom, Nominal)):
        return 0
    if isinstance(rho, (Neg, At)):
        return 1 + depth(rho.arg)
    if isinstance(rho, BINARY):
        return 1 + max(depth(rho.left), depth(rho.right))
    return 1 + max(depth(a) for a in rho.args)


def is_positive_existential(rho: HybridSentence, frag: FragmentSpec, logic: Institution) -> bool:
    """No negation, no box, no implication, and base atoms inside ``frag``.

    Implication is excluded too: ``a => b`` behaves as ``!a \\/ b``.
    """
    if isinstance(rho, BaseAtom):
        return logic.in_fragment(rho.sentence, frag)
    if isinstance(rho, Nominal):
        return True
    if isinstance(rho, (Neg, Box, Imp)):
        return False
    if isinstance(rho, (Disj, Conj)):
        return (is_positive_existential(rho.left, frag, logic)
                and is_positive_existential(rho.right, frag, logic))
    if isinstance(rho, At):
        return is_positive_existential(rho.arg, frag, logic)
    return all(is_positive_existential(a, frag, logic) for a in rho.args)


def enumerate_hybrid(sig: HybridSignature, atom_pool: Sequence, depth: int,
                     positive: bool = False) -> list[HybridSentence]:
    """Every sentence of nesting depth <= ``depth`` over the pool and the nominals.

    With ``positive`` only disjunction, conjunction, satisfaction
    operators and diamonds are used.
    """
    if depth < 0:
        raise ValidationError("depth must be >= 0")
    level = dedup([BaseAtom(a) for a in atom_pool] + [Nominal(i) for i in sig.nominals])
    for _ in range(depth):
        nxt = list(level)
        if not positive:
            nxt.extend(Neg(a) for a in level)
        for op in ((Disj, Conj) if positive else BINARY):
            nxt.extend(op(a, b) for a in level for b in level)
        nxt.extend(At(i, a) for i in sig.nominals for a in level)
        for m, n in sig.modalities:
            nxt.extend(Diamond(m, args) for args in product(level, repeat=n))
            if not positive:
                nxt.extend(Box(m, args) for args in product(level, repeat=n))
        level = dedup(nxt)
    return level


# --- models -----------------------------------------------------------------

@dataclass(frozen=True)
class KripkeModel:
    signature: HybridSignature
    worlds: tuple[str, ...]
    nominals: Mapping[str, str]
    relations: Mapping[str, frozenset]
    local: Mapping[str, Any]

    def __post_init__(self):
        object.__setattr__(self, "worlds", tuple(self.worlds))
        rels = {m: frozenset() for m, _ in self.signature.modalities}
        for m, tuples in self.relations.items():
            rels[m] = frozenset(tuple(t) for t in tuples)
        object.__setattr__(self, "relations", rels)
        object.__setattr__(self, "nominals", dict(self.nominals))
        object.__setattr__(self, "local", dict(self.local))

    @cached_property
    def outgoing(self) -> dict[tuple[str, str], list[tuple[str, ...]]]:
        """``(modality, world) -> tuples starting at world``."""
        index: dict[tuple[str, str], list[tuple[str, ...]]] = {}
        for m, tuples in self.relations.items():
            for t in sorted(tuples):
                index.setdefault((m, t[0]), []).append(t)
        return index

    def successors(self, modality: str, w: str) -> list[tuple[str, ...]]:
        return self.outgoing.get((modality, w), [])


def validate_model(K: KripkeModel) -> list[str]:
    """List every violated model invariant; empty when ``K`` is valid."""
    sig = K.signature
    problems = check_names(K.worlds, "world")
    worlds = set(K.worlds)
    if not K.worlds:
        problems.append("model has no worlds")
    for i in sig.nominals:
        if i not in K.nominals:
            problems.append(f"nominal {i!r} is not interpreted")
        elif K.nominals[i] not in worlds:
            problems.append(f"nominal {i!r} denotes unknown world {K.nominals[i]!r}")
    for i in K.nominals:
        if i not in sig.nominals:
            problems.append(f"interpretation given for undeclared nominal {i!r}")
    arities = sig.arities
    for m, tuples in K.relations.items():
        if m not in arities:
            problems.append(f"relation given for undeclared modality {m!r}")
            continue
        for t in sorted(tuples):
            if len(t) != arities[m] + 1:
                problems.append(f"tuple {t} of {m!r} has length {len(t)}, expected {arities[m] + 1}")
            for x in t:
                if x not in worlds:
                    problems.append(f"tuple {t} of {m!r} mentions unknown world {x!r}")
    for w in K.worlds:
        if w not in K.local:
            problems.append(f"world {w!r} has no local model")
            continue
        m = K.local[w]
        sub = sig.logic.model_problems(m)
        problems += [f"local model of {w!r}: {p}" for p in sub]
        if not sub and sig.logic.signature_of(m) != sig.base:
            problems.append(f"local model of {w!r} is over a different signature")
    for w in K.local:
        if w not in worlds:
            problems.append(f"local model given for unknown world {w!r}")
    return problems


def check_model(K: KripkeModel) -> None:
    problems = validate_model(K)
    if problems:
        raise ValidationError("; ".join(problems))


def hyb_reduct(phi: HybridMorphism, K2: KripkeModel) -> KripkeModel:
    if K2.signature != phi.target:
        raise ValidationError("model is not over the morphism's target signature")
    src = phi.source
    logic = src.logic
    return KripkeModel(
        src,
        K2.worlds,
        {i: K2.nominals[phi.nom(i)] for i in src.nominals},
        {m: K2.relations[phi.mod(m)] for m, _ in src.modalities},
        {w: logic.reduct(phi.base, K2.local[w]) for w in K2.worlds},
    )


def hyb_sat_local(K: KripkeModel, w: str, rho: HybridSentence) -> bool:
    """Local satisfaction at world ``w``, clause by clause."""
    if w not in K.local:
        raise ValidationError(f"undeclared world {w!r}")
    if isinstance(rho, BaseAtom):
        return K.signature.logic.satisfy(K.local[w], rho.sentence)
    if isinstance(rho, Nominal):
        return _denot(K, rho.name) == w
    if isinstance(rho, Neg):
        return not hyb_sat_local(K, w, rho.arg)
    if isinstance(rho, Disj):
        return hyb_sat_local(K, w, rho.left) or hyb_sat_local(K, w, rho.right)
    if isinstance(rho, Conj):
        return hyb_sat_local(K, w, rho.left) and hyb_sat_local(K, w, rho.right)
    if isinstance(rho, Imp):
        return (not hyb_sat_local(K, w, rho.left)) or hyb_sat_local(K, w, rho.right)
    if isinstance(rho, At):
        return hyb_sat_local(K, _denot(K, rho.nominal), rho.arg)
    if isinstance(rho, Diamond):
        return any(all(hyb_sat_local(K, t[k + 1], a) for k, a in enumerate(rho.args))
                   for t in K.successors(rho.modality, w))
    if isinstance(rho, Box):
        # some component, not every component
        return all(any(hyb_sat_local(K, t[k + 1], a) for k, a in enumerate(rho.args))
                   for t in K.successors(rho.modality, w))
    raise ValidationError(f"not a hybrid sentence: {rho!r}")


def hyb_sat_global(K: KripkeModel, rho: HybridSentence) -> bool:
    return all(hyb_sat_local(K, w, rho) for w in K.worlds)


def _denot(K: KripkeModel, i: str) -> str:
    try:
        return K.nominals[i]
    except KeyError:
        raise ValidationError(f"undeclared nominal {i!r}") from None


class Evaluator:
    """Extensions of sentences in one model as world bitmasks.

    Each combinator maps argument extensions to the extension of the
    compound sentence, so whole classes of sentences can be evaluated
    without building them.
    """

    def __init__(self, K: KripkeModel):
        self.K = K
        self.index = {w: k for k, w in enumerate(K.worlds)}
        self.all = (1 << len(K.worlds)) - 1
        self._tuples = {
            m: [(1 << self.index[t[0]], tuple(1 << self.index[x] for x in t[1:])) for t in sorted(ts)]
            for m, ts in K.relations.items()
        }

    def bit(self, w: str) -> int:
        return 1 << self.index[w]

    def worlds_of(self, mask: int) -> frozenset[str]:
        return frozenset(w for w, k in self.index.items() if mask >> k & 1)

    def base(self, sentence) -> int:
        logic = self.K.signature.logic
        mask = 0
        for w, k in self.index.items():
            if logic.satisfy(self.K.local[w], sentence):
                mask |= 1 << k
        return mask

    def nominal(self, i: str) -> int:
        return self.bit(_denot(self.K, i))

    def neg(self, a: int) -> int:
        return self.all & ~a

    def disj(self, a: int, b: int) -> int:
        return a | b

    def conj(self, a: int, b: int) -> int:
        return a & b

    def imp(self, a: int, b: int) -> int:
        return (self.all & ~a) | b

    def at(self, i: str, a: int) -> int:
        return self.all if a & self.nominal(i) else 0

    def diamond(self, m: str, args: Sequence[int]) -> int:
        out = 0
        for src, targets in self._tuples[m]:
            if all(a & t for a, t in zip(args, targets)):
                out |= src
        return out

    def box(self, m: str, args: Sequence[int]) -> int:
        out = self.all
        for src, targets in self._tuples[m]:
            if not any(a & t for a, t in zip(args, targets)):
                out &= ~src
        return out

    def extension(self, rho: HybridSentence) -> int:
        if isinstance(rho, BaseAtom):
            return self.base(rho.sentence)
        if isinstance(rho, Nominal):
            return self.nominal(rho.name)
        if isinstance(rho, Neg):
            return self.neg(self.extension(rho.arg))
        if isinstance(rho, Disj):
            return self.disj(self.extension(rho.left), self.extension(rho.right))
        if isinstance(rho, Conj):
            return self.conj(self.extension(rho.left), self.extension(rho.right))
        if isinstance(rho, Imp):
            return self.imp(self.extension(rho.left), self.extension(rho.right))
        if isinstance(rho, At):
            return self.at(rho.nominal, self.extension(rho.arg))
        if isinstance(rho, Diamond):
            return self.diamond(rho.modality, [self.extension(a) for a in rho.args])
        if isinstance(rho, Box):
            return self.box(rho.modality, [self.extension(a) for a in rho.args])
        raise ValidationError(f"not a hybrid sentence: {rho!r}")


def extension(K: KripkeModel, rho: HybridSentence) -> frozenset[str]:
    """The set of worlds of ``K`` where ``rho`` holds."""
    ev = Evaluator(K)
    return ev.worlds_of(ev.extension(rho))


def default_pool(sig: HybridSignature, frag: Optional[FragmentSpec] = None) -> list:
    frag = frag or FragmentSpec.atoms()
    return sig.logic.atom_pool(sig.base, frag)
