"""Syntax tree of a ``.hyb`` file.

Nodes compare structurally; source positions are carried but excluded
from equality so that a printed and re-parsed file compares equal.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from ..hybrid import HybridSentence
from ..institution import FragmentSpec
from .lexer import Pos

NOPOS = Pos(0, 0)


def _pos():
    return field(default=NOPOS, compare=False, repr=False)


@dataclass(frozen=True)
class Name(HybridSentence):
    """A bare identifier in a sentence: a nominal or a propositional atom."""

    name: str
    pos: Pos = _pos()
    prec = 6

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class SentenceText:
    """A hybrid sentence as written, before names are resolved."""

    tree: HybridSentence
    pos: Pos = _pos()

    def __str__(self):
        return str(self.tree)


@dataclass(frozen=True)
class LogicDecl:
    logic: str  # pl | eq | mvl
    lattice: Optional[str] = None  # bool, chain(n) or a lattice name
    pos: Pos = _pos()


@dataclass(frozen=True)
class LatticeDecl:
    name: str
    elements: tuple[str, ...]
    order: tuple[tuple[str, str], ...]
    tensor: Optional[tuple[tuple[str, str, str], ...]]  # None means "tensor meet"
    residuum: Optional[tuple[tuple[str, str, str], ...]] = None
    pos: Pos = _pos()


@dataclass(frozen=True)
class OpSpec:
    name: str
    args: tuple[str, ...]
    result: str


@dataclass(frozen=True)
class SignatureDecl:
    name: str
    props: tuple[str, ...] = ()
    sorts: tuple[str, ...] = ()
    ops: tuple[OpSpec, ...] = ()
    nominals: tuple[str, ...] = ()
    modalities: tuple[tuple[str, int], ...] = ()
    pos: Pos = _pos()


@dataclass(frozen=True)
class Assign:
    """``p = v;`` in a propositional or many-valued local model."""

    prop: str
    value: str


@dataclass(frozen=True)
class Carrier:
    sort: str
    elements: tuple[str, ...]


@dataclass(frozen=True)
class Entry:
    """``f(a, b) = c;`` in an algebra."""

    op: str
    args: tuple[str, ...]
    result: str


LocalItem = Union[Assign, Carrier, Entry]


@dataclass(frozen=True)
class LocalDecl:
    name: str
    signature: str
    items: tuple[LocalItem, ...]
    pos: Pos = _pos()


@dataclass(frozen=True)
class ModelDecl:
    name: str
    signature: str
    worlds: tuple[str, ...]
    nominals: tuple[tuple[str, str], ...] = ()
    relations: tuple[tuple[str, tuple[tuple[str, ...], ...]], ...] = ()
    # world -> inline items, or the name of a local declaration
    local: tuple[tuple[str, Union[str, tuple[LocalItem, ...]]], ...] = ()
    pos: Pos = _pos()


@dataclass(frozen=True)
class MorphismDecl:
    name: str
    source: str
    target: str
    maps: tuple[tuple[str, str, str], ...] = ()  # (namespace, from, to)
    pos: Pos = _pos()


@dataclass(frozen=True)
class RelationDecl:
    name: str
    left: str
    right: str
    pairs: tuple[tuple[str, str], ...]
    morphism: Optional[str] = None
    fragment: Optional[FragmentSpec] = None
    pos: Pos = _pos()


@dataclass(frozen=True)
class SentenceDecl:
    name: str
    signature: str
    sentence: SentenceText
    pos: Pos = _pos()


# --- commands ---------------------------------------------------------------

@dataclass(frozen=True)
class Sat:
    model: str
    world: Optional[str] = None
    sentence: Optional[SentenceText] = None
    ref: Optional[str] = None  # name of a sentence declaration
    pos: Pos = _pos()


@dataclass(frozen=True)
class CheckRelation:
    kind: str  # check-bisim | check-refine
    relation: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class FindRelation:
    kind: str  # find-bisim | find-refine
    left: str
    right: str
    morphism: Optional[str] = None
    fragment: Optional[FragmentSpec] = None
    pos: Pos = _pos()


@dataclass(frozen=True)
class Translate:
    morphism: str
    sentence: SentenceText
    pos: Pos = _pos()


@dataclass(frozen=True)
class Reduct:
    morphism: str
    model: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class Verify:
    relation: str
    mode: str = "invariance"  # invariance | global | refine
    depth: Optional[int] = None
    pool: Optional[tuple] = None
    pos: Pos = _pos()


@dataclass(frozen=True)
class Validate:
    pos: Pos = _pos()


Command = Union[Sat, CheckRelation, FindRelation, Translate, Reduct, Verify, Validate]
Declaration = Union[LogicDecl, LatticeDecl, SignatureDecl, LocalDecl, ModelDecl,
                    MorphismDecl, RelationDecl, SentenceDecl]


@dataclass(frozen=True)
class SpecFile:
    declarations: tuple = ()
    commands: tuple = ()

    @property
    def logic(self) -> Optional[LogicDecl]:
        for d in self.declarations:
            if isinstance(d, LogicDecl):
                return d
        return None
