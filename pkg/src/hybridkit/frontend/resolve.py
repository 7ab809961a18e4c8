"""Name resolution: from a parsed file to signatures, models and relations."""
from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Sequence

from .. import eq as eqm
from .. import mvl
from .. import pl
from ..equiv import WorldRelation
from ..hybrid import (
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
    morphism_problems,
    signature_problems,
)
from ..institution import BaseMorphism, FragmentSpec, Institution, ValidationError
from .lexer import Pos, SpecError
from .parser import parse_hybrid_text, parse_spec
from .syntax import (
    Assign,
    Carrier,
    Entry,
    LatticeDecl,
    LocalDecl,
    LogicDecl,
    ModelDecl,
    MorphismDecl,
    Name,
    RelationDecl,
    SentenceDecl,
    SentenceText,
    SignatureDecl,
    SpecFile,
)

LATTICE_PATH_VAR = "HYBRIDKIT_LATTICE_PATH"
MAX_CHAIN = 64
TRUE_VALUES = {"true": True, "1": True, "false": False, "0": False}


def lattice_search_path(extra: Sequence[Path] = ()) -> list[Path]:
    dirs = [Path(p) for p in os.environ.get(LATTICE_PATH_VAR, "").split(os.pathsep) if p]
    return list(extra) + dirs


@dataclass
class Env:
    """Everything a file declares, resolved to library objects."""

    logic_name: str
    logic: Institution
    lattice: Optional[mvl.ResiduatedLattice] = None
    lattices: dict[str, mvl.ResiduatedLattice] = field(default_factory=dict)
    signatures: dict[str, HybridSignature] = field(default_factory=dict)
    locals: dict[str, tuple[str, Any]] = field(default_factory=dict)
    models: dict[str, KripkeModel] = field(default_factory=dict)
    morphisms: dict[str, HybridMorphism] = field(default_factory=dict)
    relations: dict[str, WorldRelation] = field(default_factory=dict)
    sentences: dict[str, tuple[str, Any]] = field(default_factory=dict)
    model_sigs: dict[str, str] = field(default_factory=dict)
    where: dict[str, Pos] = field(default_factory=dict)

    def lookup(self, table: str, name: str, pos: Pos, what: str):
        found = getattr(self, table).get(name)
        if found is None:
            raise SpecError(f"unknown {what} {name!r}", pos)
        return found

    def signature_name(self, sig: HybridSignature) -> str:
        for n, s in self.signatures.items():
            if s == sig:
                return n
        return "?"


# --- lattices ---------------------------------------------------------------

def build_lattice(d: LatticeDecl) -> mvl.ResiduatedLattice:
    known = set(d.elements)
    rows = list(d.order) + [r[:2] for r in (d.tensor or ())] + [r[:2] for r in (d.residuum or ())]
    rows += [(r[2], r[2]) for r in (d.tensor or ()) + (d.residuum or ())]
    for row in rows:
        for x in row:
            if x not in known:
                raise SpecError(f"lattice {d.name!r} mentions unknown element {x!r}", d.pos)
    try:
        if d.tensor is None:
            bare = mvl.ResiduatedLattice(d.elements, d.order, {}, residuum={}, name=d.name)
            if any(v is None for v in bare.meet.values()):
                raise SpecError(f"lattice {d.name!r}: 'tensor meet' needs all meets to exist", d.pos)
            tensor = bare.meet
        else:
            tensor = {}
            for x, y, z in d.tensor:
                if tensor.setdefault((x, y), z) != z:
                    raise SpecError(f"lattice {d.name!r} gives two values for {x} * {y}", d.pos)
        residuum = None
        if d.residuum is not None:
            residuum = {(x, y): z for x, y, z in d.residuum}
        return mvl.ResiduatedLattice(d.elements, d.order, tensor, residuum, name=d.name)
    except ValidationError as e:
        raise SpecError(f"lattice {d.name!r}: {e}", d.pos) from None


def builtin_lattice(ref: str) -> Optional[mvl.ResiduatedLattice]:
    if ref == "bool":
        return mvl.boolean()
    m = re.fullmatch(r"chain\((\d+)\)", ref)
    if m:
        n = int(m.group(1))
        if not 2 <= n <= MAX_CHAIN:
            raise ValidationError(f"chain length must be between 2 and {MAX_CHAIN}")
        return mvl.chain(n)
    return None


def find_lattice_file(ref: str, search: Sequence[Path]) -> Optional[mvl.ResiduatedLattice]:
    for d in search:
        path = Path(d) / f"{ref}.lat"
        if path.is_file():
            spec = parse_spec(path.read_text(encoding="utf-8"))
            for decl in spec.declarations:
                if isinstance(decl, LatticeDecl) and decl.name == ref:
                    return build_lattice(decl)
    return None


# --- the resolver -----------------------------------------------------------

class Resolver:
    def __init__(self, spec: SpecFile, search: Sequence[Path] = ()):
        self.spec = spec
        self.search = lattice_search_path(search)

    def run(self) -> Env:
        decls = self.spec.declarations
        logic_decls = [d for d in decls if isinstance(d, LogicDecl)]
        if len(logic_decls) > 1:
            raise SpecError("duplicate logic directive", logic_decls[1].pos)
        seen: dict[str, Pos] = {}
        for d in decls:
            if isinstance(d, LogicDecl):
                continue
            if d.name in seen:
                raise SpecError(f"duplicate name {d.name!r} (first declared at {seen[d.name]})", d.pos)
            seen[d.name] = d.pos

        lattices = {}
        for d in decls:
            if isinstance(d, LatticeDecl):
                lattices[d.name] = build_lattice(d)
        choice = logic_decls[0] if logic_decls else LogicDecl("pl")
        env = self.make_env(choice, lattices)
        env.where = seen

        def of(kind):
            return [d for d in decls if isinstance(d, kind)]

        for d in of(SignatureDecl):
            env.signatures[d.name] = self.signature(env, d)
        for d in of(LocalDecl):
            sig = env.lookup("signatures", d.signature, d.pos, "signature")
            env.locals[d.name] = (d.signature, self.local_model(env, sig, d.items, d.pos))
        for d in of(ModelDecl):
            env.models[d.name] = self.model(env, d)
            env.model_sigs[d.name] = d.signature
        for d in of(MorphismDecl):
            env.morphisms[d.name] = self.morphism(env, d)
        for d in of(RelationDecl):
            env.relations[d.name] = self.relation(env, d)
        for d in of(SentenceDecl):
            sig = env.lookup("signatures", d.signature, d.pos, "signature")
            env.sentences[d.name] = (d.signature, resolve_sentence(d.sentence, sig))
        return env

    def make_env(self, choice: LogicDecl, lattices) -> Env:
        if choice.logic == "pl":
            return Env("pl", pl.PL, lattices=lattices)
        if choice.logic == "eq":
            return Env("eq", eqm.EQ, lattices=lattices)
        ref = choice.lattice or "bool"
        try:
            L = lattices.get(ref) or builtin_lattice(ref) or find_lattice_file(ref, self.search)
        except ValidationError as e:
            raise SpecError(str(e), choice.pos) from None
        if L is None:
            raise SpecError(f"unknown lattice {ref!r}", choice.pos)
        problems = mvl.lattice_validate(L)
        if problems:
            raise SpecError(f"lattice {ref!r} is not a residuated lattice: {problems[0]}"
                            + (f" (and {len(problems) - 1} more)" if len(problems) > 1 else ""),
                            choice.pos)
        return Env("mvl", mvl.MultiValuedLogic(L), lattice=L, lattices=lattices)

    def signature(self, env: Env, d: SignatureDecl) -> HybridSignature:
        if env.logic_name == "eq":
            if d.props:
                raise SpecError(f"signature {d.name!r}: props are not allowed over eq", d.pos)
            base = eqm.EQSignature(d.sorts, [eqm.OpDecl(o.name, o.args, o.result) for o in d.ops])
        else:
            if d.sorts or d.ops:
                raise SpecError(f"signature {d.name!r}: sorts and ops need 'logic eq'", d.pos)
            base = pl.PLSignature(d.props)
        sig = HybridSignature(env.logic, base, d.nominals, d.modalities)
        problems = signature_problems(sig)
        if problems:
            raise SpecError(f"signature {d.name!r}: {'; '.join(problems)}", d.pos)
        return sig

    def local_model(self, env: Env, sig: HybridSignature, items, pos: Pos):
        if env.logic_name == "eq":
            carriers: dict[str, tuple] = {}
            tables: dict[str, dict] = {}
            for it in items:
                if isinstance(it, Carrier):
                    if it.sort in carriers:
                        raise SpecError(f"carrier of {it.sort!r} given twice", pos)
                    carriers[it.sort] = it.elements
                elif isinstance(it, Entry):
                    row = tables.setdefault(it.op, {})
                    if row.setdefault(it.args, it.result) != it.result:
                        raise SpecError(f"{it.op}({', '.join(it.args)}) is given two values", pos)
                else:
                    raise SpecError(f"assignment {it.prop} = {it.value} needs a propositional logic", pos)
            return eqm.FiniteAlgebra(sig.base, carriers, tables)
        valuation: dict[str, Any] = {}
        for it in items:
            if not isinstance(it, Assign):
                raise SpecError("carriers and operation tables need 'logic eq'", pos)
            if it.prop in valuation:
                raise SpecError(f"proposition {it.prop!r} is assigned twice", pos)
            if env.logic_name == "pl":
                if it.value not in TRUE_VALUES:
                    raise SpecError(f"truth value of {it.prop!r} must be true or false, not {it.value!r}",
                                    pos, TRUE_VALUES)
                valuation[it.prop] = TRUE_VALUES[it.value]
            else:
                if it.value not in env.lattice.elements:
                    raise SpecError(f"{it.value!r} is not an element of lattice {env.lattice.name}",
                                    pos, env.lattice.elements)
                valuation[it.prop] = it.value
        if env.logic_name == "pl":
            return pl.PLModel(sig.base, valuation)
        return mvl.MVLModel(sig.base, valuation)

    def model(self, env: Env, d: ModelDecl) -> KripkeModel:
        sig = env.lookup("signatures", d.signature, d.pos, "signature")
        nominals: dict[str, str] = {}
        for i, w in d.nominals:
            if i in nominals:
                raise SpecError(f"model {d.name!r}: nominal {i!r} interpreted twice", d.pos)
            nominals[i] = w
        arities = sig.arities
        relations: dict[str, list] = {}
        for m, tuples in d.relations:
            if m not in arities:
                raise SpecError(f"model {d.name!r}: undeclared modality {m!r}", d.pos, arities)
            if m in relations:
                raise SpecError(f"model {d.name!r}: relation of {m!r} given twice", d.pos)
            relations[m] = list(tuples)
        local = {}
        for w, body in d.local:
            if w in local:
                raise SpecError(f"model {d.name!r}: world {w!r} has two local models", d.pos)
            if isinstance(body, str):
                sig_name, m = env.lookup("locals", body, d.pos, "local model")
                if sig_name != d.signature:
                    raise SpecError(f"local model {body!r} is over {sig_name!r}, not {d.signature!r}", d.pos)
                local[w] = m
            else:
                local[w] = self.local_model(env, sig, body, d.pos)
        return KripkeModel(sig, d.worlds, nominals, relations, local)

    def morphism(self, env: Env, d: MorphismDecl) -> HybridMorphism:
        src = env.lookup("signatures", d.source, d.pos, "signature")
        tgt = env.lookup("signatures", d.target, d.pos, "signature")
        allowed = ("sort", "op") if env.logic_name == "eq" else ("prop",)
        tables: dict[str, dict[str, str]] = {ns: {} for ns in allowed + ("nominal", "modality")}
        for ns, a, b in d.maps:
            if ns not in tables:
                raise SpecError(f"morphism {d.name!r}: {ns!r} maps are not available over "
                                f"{env.logic_name}", d.pos, tables)
            if tables[ns].setdefault(a, b) != b:
                raise SpecError(f"morphism {d.name!r}: {ns} {a!r} mapped twice", d.pos)
        # symbols left out map to the same name when the target has it
        if env.logic_name == "eq":
            defaults = {"sort": (src.base.sorts, tgt.base.sorts),
                        "op": ([o.name for o in src.base.ops], [o.name for o in tgt.base.ops])}
        else:
            defaults = {"prop": (src.base.props, tgt.base.props)}
        defaults["nominal"] = (src.nominals, tgt.nominals)
        defaults["modality"] = ([m for m, _ in src.modalities], [m for m, _ in tgt.modalities])
        for ns, (have, target) in defaults.items():
            for s in have:
                if s not in tables[ns] and s in target:
                    tables[ns][s] = s
        nominals, modalities = tables.pop("nominal"), tables.pop("modality")
        phi = HybridMorphism(src, tgt, BaseMorphism(src.base, tgt.base, tables), nominals, modalities)
        problems = morphism_problems(phi)
        if problems:
            raise SpecError(f"morphism {d.name!r}: {'; '.join(problems)}", d.pos)
        return phi

    def relation(self, env: Env, d: RelationDecl) -> WorldRelation:
        left = env.lookup("models", d.left, d.pos, "model")
        right = env.lookup("models", d.right, d.pos, "model")
        phi = morphism_for(env, left, right, d.morphism, d.pos)
        frag = check_fragment(env, phi, d.fragment, d.pos)
        return WorldRelation(left, right, frozenset(d.pairs), phi, frag)

def morphism_for(env: Env, left: KripkeModel, right: KripkeModel,
                 name: Optional[str], pos: Pos) -> HybridMorphism:
    if name is None:
        if left.signature != right.signature:
            raise SpecError("models are over different signatures; name a morphism with 'via'", pos)
        return HybridMorphism.identity(left.signature)
    phi = env.lookup("morphisms", name, pos, "morphism")
    if phi.source != left.signature or phi.target != right.signature:
        raise SpecError(f"morphism {name!r} does not go from the left model's signature "
                        "to the right model's signature", pos)
    return phi


def check_fragment(env: Env, phi: HybridMorphism, frag: Optional[FragmentSpec], pos: Pos) -> FragmentSpec:
    frag = frag or FragmentSpec.atoms()
    for s in frag.sentences:
        try:
            env.logic.check_sentence(phi.source.base, s)
        except ValidationError as e:
            raise SpecError(f"fragment sentence {s}: {e}", pos) from None
    return frag


def resolve(spec: SpecFile, search: Sequence[Path] = ()) -> Env:
    return Resolver(spec, search).run()


def resolve_sentence(text: SentenceText, sig: HybridSignature):
    """Turn names into nominals or atoms and check the result against ``sig``."""
    logic = sig.logic
    arities = sig.arities

    def go(rho):
        if isinstance(rho, Name):
            if rho.name in sig.nominals:
                return Nominal(rho.name)
            if logic.name == "pl" and rho.name in sig.base.props:
                return BaseAtom(pl.Atom(rho.name))
            raise SpecError(f"{rho.name!r} is neither a nominal nor a proposition of the signature",
                            rho.pos if rho.pos.line else text.pos)
        if isinstance(rho, BaseAtom):
            try:
                logic.check_sentence(sig.base, rho.sentence)
            except ValidationError as e:
                raise SpecError(f"in {rho}: {e}", text.pos) from None
            return rho
        if isinstance(rho, Nominal):
            return go(Name(rho.name))
        if isinstance(rho, Neg):
            return Neg(go(rho.arg))
        if isinstance(rho, (Conj, Disj, Imp)):
            return type(rho)(go(rho.left), go(rho.right))
        if isinstance(rho, At):
            if rho.nominal not in sig.nominals:
                raise SpecError(f"undeclared nominal {rho.nominal!r} in {rho}", text.pos, sig.nominals)
            return At(rho.nominal, go(rho.arg))
        if isinstance(rho, (Diamond, Box)):
            if rho.modality not in arities:
                raise SpecError(f"undeclared modality {rho.modality!r}", text.pos, arities)
            n = arities[rho.modality]
            if len(rho.args) != n:
                raise SpecError(f"modality {rho.modality!r} has arity {n} but is applied to "
                                f"{len(rho.args)} argument(s) in {rho}", text.pos)
            return type(rho)(rho.modality, tuple(go(a) for a in rho.args))
        raise SpecError(f"not a hybrid sentence: {rho!r}", text.pos)

    try:
        return go(text.tree)
    except RecursionError:
        raise SpecError("sentence is nested too deeply", text.pos) from None


def parse_sentence(text: str, sig: HybridSignature, base: Optional[str] = None):
    """Parse and resolve one hybrid sentence over ``sig``."""
    return resolve_sentence(parse_hybrid_text(text, base or sig.logic.name), sig)
