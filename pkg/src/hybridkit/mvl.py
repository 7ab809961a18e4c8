"""Graded many-valued logic over a finite residuated lattice.

Truth values live in a finite lattice with a monoidal tensor and its
residuum.  A sentence is a pair ``(formula, grade)`` and holds in a model
when the grade is below the formula's value.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Optional

from .institution import (
    BaseMorphism,
    FragmentKind,
    FragmentSpec,
    Institution,
    ValidationError,
    check_names,
)
from .pl import PLSignature, closure, prop_identity, prop_morphism_problems


class ResiduatedLattice:
    """A finite lattice with tensor and residuum tables.

    The order is given by generating pairs; its reflexive-transitive
    closure is taken.  Meet, join, top and bottom are derived from the
    order and are ``None`` where they do not exist; :func:`lattice_validate`
    reports such gaps instead of the constructor raising.  When no residuum
    table is supplied it is derived as ``x => z = sup{y | x*y <= z}``.
    """

    def __init__(self, elements: Iterable[str], order: Iterable[tuple[str, str]],
                 tensor: Mapping[tuple[str, str], str],
                 residuum: Optional[Mapping[tuple[str, str], str]] = None,
                 name: str = "L"):
        self.name = name
        self.elements = tuple(elements)
        problems = check_names(self.elements, "lattice element")
        if problems:
            raise ValidationError("; ".join(problems))
        index = set(self.elements)
        self.leq = _closure(self.elements, order)
        for a, b in self.leq:
            if a not in index or b not in index:
                raise ValidationError(f"order pair ({a}, {b}) mentions an unknown element")
        self.tensor = dict(tensor)
        self.meet = {(x, y): self._bound(x, y, upper=False) for x, y in product(self.elements, repeat=2)}
        self.join = {(x, y): self._bound(x, y, upper=True) for x, y in product(self.elements, repeat=2)}
        self.top = self._extreme(upper=True)
        self.bottom = self._extreme(upper=False)
        self.derived_residuum = residuum is None
        self.residuum = dict(residuum) if residuum is not None else self._derive_residuum()

    def le(self, x: str, y: str) -> bool:
        return (x, y) in self.leq

    def _bound(self, x, y, upper):
        if upper:
            cands = [z for z in self.elements if self.le(x, z) and self.le(y, z)]
            best = [z for z in cands if all(self.le(z, c) for c in cands)]
        else:
            cands = [z for z in self.elements if self.le(z, x) and self.le(z, y)]
            best = [z for z in cands if all(self.le(c, z) for c in cands)]
        return best[0] if len(best) == 1 else None

    def _extreme(self, upper):
        for z in self.elements:
            if all(self.le(x, z) if upper else self.le(z, x) for x in self.elements):
                return z
        return None

    def _derive_residuum(self):
        table = {}
        for x, z in product(self.elements, repeat=2):
            acc = self.bottom
            for y in self.elements:
                t = self.tensor.get((x, y))
                if t is not None and self.le(t, z):
                    acc = None if acc is None else self.join[(acc, y)]
            table[(x, z)] = acc
        return table

    def _key(self):
        return (self.elements, frozenset(self.leq), frozenset(self.tensor.items()),
                frozenset(self.residuum.items()))

    def __eq__(self, other):
        return isinstance(other, ResiduatedLattice) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"ResiduatedLattice({self.name!r}, {list(self.elements)})"


def _closure(elements, pairs) -> set[tuple[str, str]]:
    rel = {(x, x) for x in elements} | {tuple(p) for p in pairs}
    changed = True
    while changed:
        changed = False
        for (a, b) in list(rel):
            for (c, d) in list(rel):
                if b == c and (a, d) not in rel:
                    rel.add((a, d))
                    changed = True
    return rel


def lattice_validate(L: ResiduatedLattice) -> list[str]:
    """Check every residuated-lattice axiom exhaustively; return the violations."""
    v = []
    els = L.elements
    for x, y in product(els, repeat=2):
        if x != y and L.le(x, y) and L.le(y, x):
            v.append(f"order not antisymmetric: {x} <= {y} <= {x}")
    for x, y in product(els, repeat=2):
        if L.meet[(x, y)] is None:
            v.append(f"no meet for ({x}, {y})")
        if L.join[(x, y)] is None:
            v.append(f"no join for ({x}, {y})")
    if L.top is None:
        v.append("no top element")
    if L.bottom is None:
        v.append("no bottom element")
    for x, y in product(els, repeat=2):
        t = L.tensor.get((x, y))
        if t not in els:
            v.append(f"tensor undefined or outside the carrier at ({x}, {y})")
        r = L.residuum.get((x, y))
        if r not in els:
            v.append(f"residuum undefined or outside the carrier at ({x}, {y})")
    if v:
        return v
    ten, res, le, top = L.tensor, L.residuum, L.le, L.top
    for x, y in product(els, repeat=2):
        if ten[(x, y)] != ten[(y, x)]:
            v.append(f"tensor not commutative at ({x}, {y})")
    for x in els:
        if ten[(x, top)] != x or ten[(top, x)] != x:
            v.append(f"unit law fails: {x} * {top} = {ten[(x, top)]}, {top} * {x} = {ten[(top, x)]}")
    for x, y, z in product(els, repeat=3):
        if ten[(ten[(x, y)], z)] != ten[(x, ten[(y, z)])]:
            v.append(f"tensor not associative at ({x}, {y}, {z})")
        if le(y, z) and not le(ten[(x, y)], ten[(x, z)]):
            v.append(f"tensor not monotone: {y} <= {z} but {x}*{y} !<= {x}*{z}")
        if le(y, res[(x, z)]) != le(ten[(x, y)], z):
            v.append(f"residuation fails at x={x}, y={y}, z={z}")
    return v


def _frac_label(q: Fraction) -> str:
    return str(q)


def chain(n: int, tensor=None, residuum=None, name: Optional[str] = None) -> ResiduatedLattice:
    """The ``n``-element chain ``{0, 1/(n-1), ..., 1}``.

    ``tensor`` and ``residuum`` are functions on :class:`Fraction`;
    the defaults are the Lukasiewicz t-norm and its residuum.
    """
    if n < 2:
        raise ValidationError("a chain needs at least two elements")
    qs = [Fraction(k, n - 1) for k in range(n)]
    labels = [_frac_label(q) for q in qs]
    if tensor is None:
        tensor = lambda x, y: max(Fraction(0), x + y - 1)  # noqa: E731
        residuum = residuum or lukasiewicz_residuum
    order = [(labels[k], labels[k + 1]) for k in range(n - 1)]
    ten = {(_frac_label(x), _frac_label(y)): _frac_label(tensor(x, y)) for x, y in product(qs, repeat=2)}
    res = None
    if residuum is not None:
        res = {(_frac_label(x), _frac_label(y)): _frac_label(residuum(x, y)) for x, y in product(qs, repeat=2)}
    return ResiduatedLattice(labels, order, ten, res, name=name or f"chain({n})")


def lukasiewicz_residuum(x: Fraction, y: Fraction) -> Fraction:
    return min(Fraction(1), 1 - x + y)


def boolean() -> ResiduatedLattice:
    ten = {(x, y): ("1" if x == y == "1" else "0") for x, y in product("01", repeat=2)}
    return ResiduatedLattice(("0", "1"), [("0", "1")], ten, name="bool")


def misprinted_lukasiewicz(n: int) -> ResiduatedLattice:
    """Chain with tensor ``1 - max{0, x+y-1}``, a common misprint of the t-norm."""
    return chain(n, tensor=lambda x, y: 1 - max(Fraction(0), x + y - 1),
                 residuum=lukasiewicz_residuum, name=f"misprinted({n})")


# --- formulas ---------------------------------------------------------------

class Formula:
    prec = 5

    def _wrap(self, child: "Formula", min_prec: int) -> str:
        s = str(child)
        return f"({s})" if child.prec < min_prec else s


@dataclass(frozen=True)
class Prop(Formula):
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Top(Formula):
    def __str__(self):
        return "top"


@dataclass(frozen=True)
class Bot(Formula):
    def __str__(self):
        return "bot"


@dataclass(frozen=True)
class Tensor(Formula):
    left: Formula
    right: Formula
    prec = 3

    def __str__(self):
        return f"{self._wrap(self.left, 3)} * {self._wrap(self.right, 4)}"


@dataclass(frozen=True)
class Join(Formula):
    left: Formula
    right: Formula
    prec = 2

    def __str__(self):
        return f"{self._wrap(self.left, 2)} \\/ {self._wrap(self.right, 3)}"


@dataclass(frozen=True)
class Res(Formula):
    left: Formula
    right: Formula
    prec = 1

    def __str__(self):
        return f"{self._wrap(self.left, 2)} -> {self._wrap(self.right, 1)}"


@dataclass(frozen=True)
class MVLSentence:
    formula: Formula
    grade: str

    def __str__(self):
        return f"({self.formula}, {self.grade})"


@dataclass(frozen=True)
class MVLModel:
    signature: PLSignature
    valuation: Mapping[str, str]

    def __hash__(self):
        return hash((self.signature, tuple(sorted(self.valuation.items()))))


def props_of(f: Formula) -> set[str]:
    if isinstance(f, Prop):
        return {f.name}
    if isinstance(f, (Top, Bot)):
        return set()
    return props_of(f.left) | props_of(f.right)


def rename(f: Formula, g) -> Formula:
    if isinstance(f, Prop):
        return Prop(g(f.name))
    if isinstance(f, (Top, Bot)):
        return f
    return type(f)(rename(f.left, g), rename(f.right, g))


def mvl_eval(L: ResiduatedLattice, m: MVLModel, f: Formula) -> str:
    if isinstance(f, Prop):
        try:
            return m.valuation[f.name]
        except KeyError:
            raise ValidationError(f"undeclared proposition {f.name!r}") from None
    if isinstance(f, Top):
        return L.top
    if isinstance(f, Bot):
        return L.bottom
    a, b = mvl_eval(L, m, f.left), mvl_eval(L, m, f.right)
    if isinstance(f, Join):
        return L.join[(a, b)]
    if isinstance(f, Tensor):
        return L.tensor[(a, b)]
    if isinstance(f, Res):
        return L.residuum[(a, b)]
    raise ValidationError(f"not a many-valued formula: {f!r}")


def mvl_satisfy(L: ResiduatedLattice, m: MVLModel, s: MVLSentence) -> bool:
    return L.le(s.grade, mvl_eval(L, m, s.formula))


def _no_residuum(f: Formula) -> bool:
    if isinstance(f, Res):
        return False
    if isinstance(f, (Join, Tensor)):
        return _no_residuum(f.left) and _no_residuum(f.right)
    return True


@dataclass(frozen=True)
class MultiValuedLogic(Institution):
    lattice: ResiduatedLattice
    name = "mvl"

    def signature_problems(self, sig) -> list[str]:
        if not isinstance(sig, PLSignature):
            return ["not a propositional signature"]
        return check_names(sig.props, "proposition")

    def check_sentence(self, sig, sentence) -> None:
        if not isinstance(sentence, MVLSentence):
            raise ValidationError(f"not a graded sentence: {sentence!r}")
        if sentence.grade not in self.lattice.elements:
            raise ValidationError(f"grade {sentence.grade!r} is not a lattice element")
        for p in sorted(props_of(sentence.formula)):
            if p not in sig.props:
                raise ValidationError(f"undeclared proposition {p!r}")

    def model_problems(self, model) -> list[str]:
        if not isinstance(model, MVLModel):
            return ["not a many-valued model"]
        problems = []
        for p in model.signature.props:
            if p not in model.valuation:
                problems.append(f"proposition {p!r} has no truth value")
            elif model.valuation[p] not in self.lattice.elements:
                problems.append(f"value {model.valuation[p]!r} of {p!r} is not a lattice element")
        for p in model.valuation:
            if p not in model.signature.props:
                problems.append(f"valuation assigns undeclared proposition {p!r}")
        return problems

    def signature_of(self, model):
        return model.signature

    def eval(self, model: MVLModel, f: Formula) -> str:
        return mvl_eval(self.lattice, model, f)

    def satisfy(self, model, sentence) -> bool:
        return mvl_satisfy(self.lattice, model, sentence)

    def identity(self, sig):
        return prop_identity(sig)

    def morphism_problems(self, phi):
        return prop_morphism_problems(phi, PLSignature)

    def translate(self, phi: BaseMorphism, sentence: MVLSentence) -> MVLSentence:
        return MVLSentence(rename(sentence.formula, lambda p: phi("prop", p)), sentence.grade)

    def reduct(self, phi: BaseMorphism, model: MVLModel) -> MVLModel:
        return MVLModel(phi.source, {p: model.valuation[phi("prop", p)] for p in phi.source.props})

    def enumerate_fragment(self, sig, frag):
        if frag.kind is FragmentKind.EXPLICIT:
            return list(frag.sentences)
        props = [Prop(p) for p in sig.props]
        if frag.kind is FragmentKind.ATOMS:
            formulas = props
        elif frag.kind is FragmentKind.FULL:
            formulas = closure(props + [Top(), Bot()], frag.depth, unary=(), binary=(Join, Tensor, Res))
        else:
            formulas = closure(props + [Top(), Bot()], frag.depth, unary=(), binary=(Join, Tensor))
        return [MVLSentence(f, g) for f in formulas for g in self.lattice.elements]

    def in_fragment(self, sentence, frag: FragmentSpec) -> bool:
        if frag.kind is FragmentKind.FULL:
            return True
        if frag.kind is FragmentKind.ATOMS:
            return isinstance(sentence.formula, Prop)
        if frag.kind is FragmentKind.NEGATION_FREE:
            return _no_residuum(sentence.formula)
        return sentence in frag.sentences
