"""Classical propositional logic as a base institution."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .institution import (
    BaseMorphism,
    FragmentKind,
    FragmentSpec,
    Institution,
    ValidationError,
    check_names,
    dedup,
)


@dataclass(frozen=True)
class PLSignature:
    props: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "props", tuple(self.props))


class PLSentence:
    prec = 5

    def _wrap(self, child: "PLSentence", min_prec: int) -> str:
        s = str(child)
        return f"({s})" if child.prec < min_prec else s


@dataclass(frozen=True)
class Atom(PLSentence):
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Not(PLSentence):
    arg: PLSentence
    prec = 4

    def __str__(self):
        return "!" + self._wrap(self.arg, 4)


@dataclass(frozen=True)
class And(PLSentence):
    left: PLSentence
    right: PLSentence
    prec = 3

    def __str__(self):
        return f"{self._wrap(self.left, 3)} /\\ {self._wrap(self.right, 4)}"


@dataclass(frozen=True)
class Or(PLSentence):
    left: PLSentence
    right: PLSentence
    prec = 2

    def __str__(self):
        return f"{self._wrap(self.left, 2)} \\/ {self._wrap(self.right, 3)}"


@dataclass(frozen=True)
class Implies(PLSentence):
    left: PLSentence
    right: PLSentence
    prec = 1

    def __str__(self):
        # right-associative
        return f"{self._wrap(self.left, 2)} => {self._wrap(self.right, 1)}"


BINARY = (Or, And, Implies)


@dataclass(frozen=True)
class PLModel:
    signature: PLSignature
    valuation: Mapping[str, bool]

    def __hash__(self):
        return hash((self.signature, tuple(sorted(self.valuation.items()))))


def atoms_of(rho: PLSentence) -> set[str]:
    if isinstance(rho, Atom):
        return {rho.name}
    if isinstance(rho, Not):
        return atoms_of(rho.arg)
    return atoms_of(rho.left) | atoms_of(rho.right)


def pl_satisfy(m: PLModel, rho: PLSentence) -> bool:
    if isinstance(rho, Atom):
        try:
            return m.valuation[rho.name]
        except KeyError:
            raise ValidationError(f"undeclared proposition {rho.name!r}") from None
    if isinstance(rho, Not):
        return not pl_satisfy(m, rho.arg)
    if isinstance(rho, Or):
        return pl_satisfy(m, rho.left) or pl_satisfy(m, rho.right)
    if isinstance(rho, And):
        return pl_satisfy(m, rho.left) and pl_satisfy(m, rho.right)
    if isinstance(rho, Implies):
        return (not pl_satisfy(m, rho.left)) or pl_satisfy(m, rho.right)
    raise ValidationError(f"not a propositional sentence: {rho!r}")


def rename(rho: PLSentence, f) -> PLSentence:
    """Apply ``f`` to every atom name, keeping the AST shape."""
    if isinstance(rho, Atom):
        return Atom(f(rho.name))
    if isinstance(rho, Not):
        return Not(rename(rho.arg, f))
    return type(rho)(rename(rho.left, f), rename(rho.right, f))


def pl_translate(phi: BaseMorphism, rho: PLSentence) -> PLSentence:
    return rename(rho, lambda p: phi("prop", p))


def pl_reduct(phi: BaseMorphism, m2: PLModel) -> PLModel:
    return PLModel(phi.source, {p: m2.valuation[phi("prop", p)] for p in phi.source.props})


def closure(atoms: list, depth: int, unary=(Not,), binary=BINARY) -> list:
    """All formulas of nesting depth <= ``depth`` over ``atoms``."""
    level = list(atoms)
    for _ in range(depth):
        nxt = list(level)
        for op in unary:
            nxt.extend(op(a) for a in level)
        for op in binary:
            nxt.extend(op(a, b) for a in level for b in level)
        level = dedup(nxt)
    return level


def prop_morphism_problems(phi: BaseMorphism, sig_type) -> list[str]:
    if not isinstance(phi.source, sig_type) or not isinstance(phi.target, sig_type):
        return ["morphism endpoints are not propositional signatures"]
    problems = []
    table = phi.maps.get("prop", {})
    for p in phi.source.props:
        if p not in table:
            problems.append(f"proposition {p!r} is not mapped")
        elif table[p] not in phi.target.props:
            problems.append(f"image {table[p]!r} of {p!r} is not declared in the target")
    for p in table:
        if p not in phi.source.props:
            problems.append(f"mapped proposition {p!r} is not declared in the source")
    return problems


def prop_identity(sig) -> BaseMorphism:
    return BaseMorphism(sig, sig, {"prop": {p: p for p in sig.props}})


@dataclass(frozen=True)
class PropositionalLogic(Institution):
    name = "pl"

    def signature_problems(self, sig) -> list[str]:
        if not isinstance(sig, PLSignature):
            return ["not a propositional signature"]
        return check_names(sig.props, "proposition")

    def check_sentence(self, sig, sentence) -> None:
        if not isinstance(sentence, PLSentence):
            raise ValidationError(f"not a propositional sentence: {sentence!r}")
        for p in sorted(atoms_of(sentence)):
            if p not in sig.props:
                raise ValidationError(f"undeclared proposition {p!r}")

    def model_problems(self, model) -> list[str]:
        if not isinstance(model, PLModel):
            return ["not a propositional model"]
        problems = []
        for p in model.signature.props:
            if p not in model.valuation:
                problems.append(f"proposition {p!r} has no truth value")
            elif not isinstance(model.valuation[p], bool):
                problems.append(f"value of {p!r} is not a boolean")
        for p in model.valuation:
            if p not in model.signature.props:
                problems.append(f"valuation assigns undeclared proposition {p!r}")
        return problems

    def signature_of(self, model):
        return model.signature

    def satisfy(self, model, sentence) -> bool:
        return pl_satisfy(model, sentence)

    def identity(self, sig) -> BaseMorphism:
        return prop_identity(sig)

    def morphism_problems(self, phi):
        return prop_morphism_problems(phi, PLSignature)

    def translate(self, phi, sentence):
        return pl_translate(phi, sentence)

    def reduct(self, phi, model):
        return pl_reduct(phi, model)

    def enumerate_fragment(self, sig, frag):
        atoms = [Atom(p) for p in sig.props]
        if frag.kind is FragmentKind.ATOMS:
            return atoms
        if frag.kind is FragmentKind.FULL:
            return closure(atoms, frag.depth)
        if frag.kind is FragmentKind.NEGATION_FREE:
            return closure(atoms, frag.depth, unary=(), binary=(Or, And))
        return list(frag.sentences)

    def in_fragment(self, sentence, frag: FragmentSpec) -> bool:
        if frag.kind is FragmentKind.FULL:
            return True
        if frag.kind is FragmentKind.ATOMS:
            return isinstance(sentence, Atom)
        if frag.kind is FragmentKind.NEGATION_FREE:
            return _negation_free(sentence)
        return sentence in frag.sentences


def _negation_free(rho) -> bool:
    if isinstance(rho, Atom):
        return True
    if isinstance(rho, (Or, And)):
        return _negation_free(rho.left) and _negation_free(rho.right)
    return False


PL = PropositionalLogic()
