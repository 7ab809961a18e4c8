"""Pretty-printer producing text that parses back to the same tree."""
from __future__ import annotations

from typing import Optional

from .. import eq as eqm
from .. import mvl
from .. import pl
from ..hybrid import KripkeModel
from ..institution import FragmentKind, FragmentSpec
from .syntax import (
    Assign,
    Carrier,
    CheckRelation,
    Entry,
    FindRelation,
    LatticeDecl,
    LocalDecl,
    LogicDecl,
    ModelDecl,
    MorphismDecl,
    Reduct,
    RelationDecl,
    Sat,
    SentenceDecl,
    SignatureDecl,
    SpecFile,
    Translate,
    Validate,
    Verify,
)

INDENT = "  "


def format_fragment(frag: FragmentSpec) -> str:
    if frag.kind is FragmentKind.ATOMS:
        return "atoms"
    if frag.kind is FragmentKind.FULL:
        extra = f", vars={frag.max_vars}" if frag.max_vars != 1 else ""
        return f"full(depth={frag.depth}{extra})"
    if frag.kind is FragmentKind.NEGATION_FREE:
        return f"negfree(depth={frag.depth})"
    return "explicit { " + "; ".join(map(str, frag.sentences)) + " }"


def _local_item(it) -> str:
    if isinstance(it, Assign):
        return f"{it.prop} = {it.value};"
    if isinstance(it, Carrier):
        return f"carrier {it.sort} = {', '.join(it.elements)};"
    return f"{it.op}({', '.join(it.args)}) = {it.result};"


def _block(head: str, lines: list[str], depth: int = 0) -> list[str]:
    pad = INDENT * depth
    return [f"{pad}{head} {{"] + [pad + INDENT + ln for ln in lines] + [pad + "}"]


def _table(rows, op) -> str:
    return "{ " + " ".join(f"{x} {op} {y} = {z};" for x, y, z in rows) + " }"


def format_declaration(d) -> str:
    if isinstance(d, LogicDecl):
        return f"logic {d.logic}{' ' + d.lattice if d.lattice else ''};"
    if isinstance(d, LatticeDecl):
        lines = [f"elements {', '.join(d.elements)};"]
        if d.order:
            lines.append("order " + ", ".join(f"{a} < {b}" for a, b in d.order) + ";")
        lines.append("tensor meet;" if d.tensor is None else f"tensor {_table(d.tensor, '*')};")
        if d.residuum is not None:
            lines.append(f"residuum {_table(d.residuum, '->')};")
        return "\n".join(_block(f"lattice {d.name}", lines))
    if isinstance(d, SignatureDecl):
        lines = []
        for kw in ("props", "sorts"):
            if getattr(d, kw):
                lines.append(f"{kw} {', '.join(getattr(d, kw))};")
        for o in d.ops:
            args = " ".join(o.args)
            lines.append(f"op {o.name} : {args + ' ' if args else ''}-> {o.result};")
        if d.nominals:
            lines.append(f"nominals {', '.join(d.nominals)};")
        if d.modalities:
            lines.append("modalities " + ", ".join(f"{m} : {n}" for m, n in d.modalities) + ";")
        return "\n".join(_block(f"signature {d.name}", lines))
    if isinstance(d, LocalDecl):
        return "\n".join(_block(f"local {d.name} over {d.signature}", [_local_item(i) for i in d.items]))
    if isinstance(d, ModelDecl):
        lines = [f"worlds {', '.join(d.worlds)};"]
        lines += [f"nominal {i} = {w};" for i, w in d.nominals]
        for m, tuples in d.relations:
            lines.append(f"{m} = " + ", ".join("(" + ", ".join(t) + ")" for t in tuples) + ";")
        for w, body in d.local:
            if isinstance(body, str):
                lines.append(f"at {w} = {body};")
            else:
                lines += _block(f"at {w}", [_local_item(i) for i in body])
        return "\n".join(_block(f"model {d.name} over {d.signature}", lines))
    if isinstance(d, MorphismDecl):
        head = f"morphism {d.name} : {d.source} -> {d.target}"
        if not d.maps:
            return head + ";"
        return "\n".join(_block(head, [f"{ns} {a} -> {b};" for ns, a, b in d.maps]))
    if isinstance(d, RelationDecl):
        head = f"relation {d.name} from {d.left} to {d.right}"
        if d.morphism:
            head += f" via {d.morphism}"
        if d.fragment is not None:
            head += f" fragment {format_fragment(d.fragment)}"
        return head + " { " + ", ".join(f"({a}, {b})" for a, b in d.pairs) + " }"
    if isinstance(d, SentenceDecl):
        return f"sentence {d.name} over {d.signature} = {d.sentence};"
    raise TypeError(f"not a declaration: {d!r}")


def format_command(c) -> str:
    if isinstance(c, Validate):
        return "validate;"
    if isinstance(c, Sat):
        out = f"sat {c.model}"
        if c.world:
            out += f" at {c.world}"
        out += f" use {c.ref}" if c.ref else f" : {c.sentence}"
        return out + ";"
    if isinstance(c, CheckRelation):
        return f"{c.kind} {c.relation};"
    if isinstance(c, FindRelation):
        out = f"{c.kind} {c.left} {c.right}"
        if c.morphism:
            out += f" via {c.morphism}"
        if c.fragment is not None:
            out += f" fragment {format_fragment(c.fragment)}"
        return out + ";"
    if isinstance(c, Translate):
        return f"translate {c.morphism} : {c.sentence};"
    if isinstance(c, Reduct):
        return f"reduct {c.morphism} {c.model};"
    if isinstance(c, Verify):
        out = f"verify {c.relation} {c.mode}"
        if c.depth is not None:
            out += f" depth {c.depth}"
        if c.pool is not None:
            out += " pool { " + "; ".join(map(str, c.pool)) + " }"
        return out + ";"
    raise TypeError(f"not a command: {c!r}")


def format_spec(spec: SpecFile) -> str:
    parts = [format_declaration(d) for d in spec.declarations]
    parts += [format_command(c) for c in spec.commands]
    return "\n\n".join(parts) + ("\n" if parts else "")


def _local_items(m) -> tuple:
    if isinstance(m, eqm.FiniteAlgebra):
        items = [Carrier(s, tuple(m.carriers[s])) for s in m.signature.sorts if s in m.carriers]
        for o in m.signature.ops:
            for args, r in sorted(m.tables.get(o.name, {}).items()):
                items.append(Entry(o.name, tuple(args), r))
        return tuple(items)
    if isinstance(m, pl.PLModel):
        return tuple(Assign(p, "true" if m.valuation[p] else "false")
                     for p in m.signature.props if p in m.valuation)
    if isinstance(m, mvl.MVLModel):
        return tuple(Assign(p, m.valuation[p]) for p in m.signature.props if p in m.valuation)
    raise TypeError(f"unsupported local model {m!r}")


def model_decl(K: KripkeModel, name: str, signature: str) -> ModelDecl:
    """Render a Kripke model back into a declaration."""
    rels = tuple((m, tuple(sorted(K.relations[m]))) for m, _ in K.signature.modalities if K.relations.get(m))
    return ModelDecl(name, signature, K.worlds,
                     tuple((i, K.nominals[i]) for i in K.signature.nominals if i in K.nominals),
                     rels,
                     tuple((w, _local_items(K.local[w])) for w in K.worlds if w in K.local))


def format_model(K: KripkeModel, name: str, signature: Optional[str] = None) -> str:
    return format_declaration(model_decl(K, name, signature or "?"))
