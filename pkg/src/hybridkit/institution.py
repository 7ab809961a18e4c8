"""The base-logic contract every pluggable logic implements.

A base logic supplies signatures, sentences, models, a satisfaction
relation, sentence translation along signature morphisms and model
reducts.  Everything in :mod:`hybridkit.hybrid` and :mod:`hybridkit.equiv`
is written against this contract only.

Elementary equivalence (and its one-way variant) between local models is
decided here by bounded enumeration of a sentence fragment.
"""
from __future__ import annotations

import abc
import enum
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Iterable, Mapping, Optional


class HybridKitError(Exception):
    """Root of all errors raised by the library."""


class ValidationError(HybridKitError, ValueError):
    """An object is ill-formed with respect to its signature."""


class FragmentKind(enum.Enum):
    FULL = "full"
    ATOMS = "atoms"
    NEGATION_FREE = "negfree"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class FragmentSpec:
    """Selects the base sentences a comparison of local models looks at.

    ``depth`` bounds the connective nesting of enumerated sentences and
    ``max_vars`` the number of variables per sort (equational logic only).
    EXPLICIT fragments carry their sentences verbatim.
    """

    kind: FragmentKind = FragmentKind.ATOMS
    depth: int = 1
    max_vars: int = 1
    sentences: tuple = ()

    def __post_init__(self):
        if self.depth < 0 or self.max_vars < 0:
            raise ValidationError("fragment bounds must be >= 0")
        object.__setattr__(self, "sentences", tuple(self.sentences))
        if self.kind is FragmentKind.EXPLICIT and not self.sentences:
            raise ValidationError("explicit fragment needs at least one sentence")
        if self.kind is not FragmentKind.EXPLICIT and self.sentences:
            raise ValidationError("only explicit fragments list sentences")

    @classmethod
    def atoms(cls) -> "FragmentSpec":
        return cls(FragmentKind.ATOMS)

    @classmethod
    def full(cls, depth: int = 1, max_vars: int = 1) -> "FragmentSpec":
        return cls(FragmentKind.FULL, depth, max_vars)

    @classmethod
    def negation_free(cls, depth: int = 1) -> "FragmentSpec":
        return cls(FragmentKind.NEGATION_FREE, depth)

    @classmethod
    def explicit(cls, *sentences) -> "FragmentSpec":
        return cls(FragmentKind.EXPLICIT, sentences=tuple(sentences))


@dataclass(frozen=True)
class BaseMorphism:
    """A signature morphism given as per-namespace symbol maps.

    ``maps`` is keyed by namespace (``"prop"`` for propositional symbols,
    ``"sort"`` and ``"op"`` for equational signatures).
    """

    source: Any
    target: Any
    maps: Mapping[str, Mapping[str, str]] = field(default_factory=dict)

    def __call__(self, namespace: str, symbol: str) -> str:
        try:
            return self.maps[namespace][symbol]
        except KeyError:
            raise ValidationError(f"morphism does not map {namespace} {symbol!r}") from None

    def __hash__(self):
        return hash((self.source, self.target))


class Institution(abc.ABC):
    """A base logic.

    Subclasses are immutable value objects; two instances describing the
    same logic compare equal.
    """

    name: str = "?"

    # --- syntax and models -------------------------------------------------
    @abc.abstractmethod
    def signature_problems(self, sig) -> list[str]:
        """Return every invariant violation of ``sig`` (empty when valid)."""

    @abc.abstractmethod
    def check_sentence(self, sig, sentence) -> None:
        """Raise :class:`ValidationError` unless ``sentence`` is over ``sig``."""

    @abc.abstractmethod
    def model_problems(self, model) -> list[str]:
        ...

    @abc.abstractmethod
    def signature_of(self, model):
        ...

    @abc.abstractmethod
    def satisfy(self, model, sentence) -> bool:
        ...

    # --- morphisms ---------------------------------------------------------
    @abc.abstractmethod
    def identity(self, sig) -> BaseMorphism:
        ...

    @abc.abstractmethod
    def morphism_problems(self, phi: BaseMorphism) -> list[str]:
        ...

    @abc.abstractmethod
    def translate(self, phi: BaseMorphism, sentence):
        ...

    @abc.abstractmethod
    def reduct(self, phi: BaseMorphism, model):
        ...

    # --- fragments ---------------------------------------------------------
    @abc.abstractmethod
    def enumerate_fragment(self, sig, frag: FragmentSpec) -> list:
        """Uncached enumeration behind :meth:`fragment_sentences`."""

    @abc.abstractmethod
    def in_fragment(self, sentence, frag: FragmentSpec) -> bool:
        """Membership in the (unbounded) sentence subfunctor ``frag`` selects."""

    def atom_pool(self, sig, frag: FragmentSpec) -> list:
        """Base sentences used as atoms when enumerating hybrid sentences."""
        if frag.kind is FragmentKind.EXPLICIT:
            return list(frag.sentences)
        return self.fragment_sentences(sig, FragmentSpec.atoms())

    # --- generic machinery -------------------------------------------------
    def check_signature(self, sig) -> None:
        problems = self.signature_problems(sig)
        if problems:
            raise ValidationError("; ".join(problems))

    def check_model(self, model) -> None:
        problems = self.model_problems(model)
        if problems:
            raise ValidationError("; ".join(problems))

    def check_morphism(self, phi: BaseMorphism) -> None:
        problems = self.morphism_problems(phi)
        if problems:
            raise ValidationError("; ".join(problems))

    def fragment_sentences(self, sig, frag: FragmentSpec) -> list:
        """Deduplicated, deterministically ordered sentences of ``frag`` over ``sig``."""
        if frag.kind is FragmentKind.EXPLICIT:
            for s in frag.sentences:
                self.check_sentence(sig, s)
        return list(_cached_fragment(self, sig, frag))

    def distinguishing_sentence(self, m, m2, phi: BaseMorphism, frag: FragmentSpec,
                                both_ways: bool = True) -> Optional[Any]:
        """First fragment sentence on which ``m`` and ``m2`` disagree along ``phi``.

        With ``both_ways=False`` only sentences true in ``m`` but whose
        translation fails in ``m2`` count.
        """
        self._check_pair(m, m2, phi)
        for rho in self.fragment_sentences(phi.source, frag):
            here = self.satisfy(m, rho)
            if not here and not both_ways:
                continue
            there = self.satisfy(m2, self.translate(phi, rho))
            if here != there:
                return rho
        return None

    def elem_equiv(self, m, m2, phi: BaseMorphism, frag: FragmentSpec) -> bool:
        return self.distinguishing_sentence(m, m2, phi, frag) is None

    def elem_implies(self, m, m2, phi: BaseMorphism, frag: FragmentSpec) -> bool:
        return self.distinguishing_sentence(m, m2, phi, frag, both_ways=False) is None

    def check_satisfaction_condition(self, phi: BaseMorphism, m2, rho) -> bool:
        self.check_sentence(phi.source, rho)
        if self.signature_of(m2) != phi.target:
            raise ValidationError("model is not over the morphism's target signature")
        return self.satisfy(m2, self.translate(phi, rho)) == self.satisfy(self.reduct(phi, m2), rho)

    def _check_pair(self, m, m2, phi: BaseMorphism) -> None:
        if self.signature_of(m) != phi.source:
            raise ValidationError("left model is not over the morphism's source signature")
        if self.signature_of(m2) != phi.target:
            raise ValidationError("right model is not over the morphism's target signature")


@lru_cache(maxsize=256)
def _cached_fragment(logic: Institution, sig, frag: FragmentSpec) -> tuple:
    return tuple(dedup(logic.enumerate_fragment(sig, frag)))


def dedup(items: Iterable) -> list:
    """Drop repeats, keeping first occurrences (syntactic identity only)."""
    seen = set()
    out = []
    for x in items:
        if x not in seen:
            seen.add(x)
            out.append(x)
    return out


def check_names(names: Iterable[str], what: str) -> list[str]:
    problems = []
    seen = set()
    for n in names:
        if not isinstance(n, str) or not n:
            problems.append(f"{what} name {n!r} is not a non-empty string")
        elif n in seen:
            problems.append(f"duplicate {what} {n!r}")
        seen.add(n)
    return problems
