"""Recursive-descent parser for ``.hyb`` files.

Base sentences inside ``{...}`` are parsed by the grammar of the active
base logic, which is taken from the file's ``logic`` directive wherever it
appears.  Bare identifiers in hybrid sentences stay unresolved
(:class:`Name`) until the signature is known.
"""
from __future__ import annotations

from typing import Callable, Optional

from .. import eq as eqm
from .. import mvl
from .. import pl
from ..hybrid import At, BaseAtom, Box, Conj, Diamond, Disj, Imp, Neg
from ..institution import FragmentSpec, ValidationError
from .lexer import SpecError, Token, tokenize
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
    Name,
    OpSpec,
    Reduct,
    RelationDecl,
    Sat,
    SentenceDecl,
    SentenceText,
    SignatureDecl,
    SpecFile,
    Translate,
    Validate,
    Verify,
)

LOGICS = ("pl", "eq", "mvl")
DECLARATIONS = ("logic", "lattice", "signature", "local", "model", "morphism", "relation", "sentence")
COMMANDS = ("sat", "check-bisim", "check-refine", "find-bisim", "find-refine",
            "translate", "reduct", "verify", "validate")
NAMESPACES = ("prop", "sort", "op", "nominal", "modality")
VERIFY_MODES = ("invariance", "global", "refine")


class Parser:
    def __init__(self, tokens: list[Token], logic: str = "pl"):
        self.tokens = tokens
        self.i = 0
        self.logic = logic

    # --- token helpers ------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def at(self, *kinds: str) -> bool:
        """Whether the current token is one of ``kinds`` (token kinds or keywords)."""
        t = self.tok
        return t.kind in kinds or (t.kind == "IDENT" and t.text in kinds)

    def error(self, expected, message: Optional[str] = None) -> SpecError:
        return SpecError(message or f"unexpected {self.tok}", self.tok.pos, expected)

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "EOF":
            self.i += 1
        return t

    def expect(self, *kinds: str) -> Token:
        if not self.at(*kinds):
            raise self.error(kinds)
        return self.advance()

    def accept(self, *kinds: str) -> Optional[Token]:
        return self.advance() if self.at(*kinds) else None

    def ident(self) -> str:
        return self.expect("IDENT").text

    def value(self) -> str:
        """An element label: identifier or number."""
        return self.expect("IDENT", "NUMBER").text

    def integer(self) -> int:
        t = self.expect("NUMBER")
        if not t.text.isdigit():
            raise SpecError(f"expected a whole number, found {t.text!r}", t.pos)
        return int(t.text)

    def comma_list(self, item: Callable, close: Optional[str] = None) -> list:
        out = [item()]
        while self.accept(","):
            if close and self.at(close):
                break
            out.append(item())
        return out

    def ident_list(self) -> tuple[str, ...]:
        return tuple(self.comma_list(self.ident))

    # --- files --------------------------------------------------------------

    def spec(self) -> SpecFile:
        decls, cmds = [], []
        while not self.at("EOF"):
            if self.at(*DECLARATIONS):
                decls.append(self.declaration())
            elif self.at(*COMMANDS):
                cmds.append(self.command())
            else:
                raise self.error(DECLARATIONS + COMMANDS + ("end of input",))
        return SpecFile(tuple(decls), tuple(cmds))

    def commands(self) -> tuple:
        cmds = []
        while not self.at("EOF"):
            cmds.append(self.command())
        return tuple(cmds)

    def end_block(self):
        self.expect("}")
        self.accept(";")

    def declaration(self):
        kw = self.tok.text
        return getattr(self, "decl_" + kw)()

    def decl_logic(self) -> LogicDecl:
        pos = self.advance().pos
        name = self.expect(*LOGICS).text
        lattice = None
        if name == "mvl":
            lattice = self.lattice_ref()
        self.expect(";")
        return LogicDecl(name, lattice, pos)

    def lattice_ref(self) -> str:
        name = self.ident()
        if self.accept("("):
            n = self.integer()
            self.expect(")")
            return f"{name}({n})"
        return name

    def decl_lattice(self) -> LatticeDecl:
        pos = self.advance().pos
        name = self.ident()
        self.expect("{")
        elements, order, tensor, residuum = None, [], (), None
        seen = set()
        while not self.at("}"):
            kw = self.expect("elements", "order", "tensor", "residuum")
            if kw.text in seen:
                raise SpecError(f"duplicate {kw.text!r} clause", kw.pos)
            seen.add(kw.text)
            if kw.text == "elements":
                elements = tuple(self.comma_list(self.value))
            elif kw.text == "order":
                for chain_ in self.comma_list(self.order_chain):
                    order.extend(zip(chain_, chain_[1:]))
            elif kw.text == "tensor":
                if self.accept("meet"):
                    tensor = None
                else:
                    tensor = self.table("*")
            else:
                residuum = self.table("->")
            self.expect(";")
        if elements is None:
            raise self.error(("elements",), f"lattice {name!r} has no elements clause")
        self.end_block()
        if "tensor" not in seen:
            raise SpecError(f"lattice {name!r} has no tensor clause", pos)
        return LatticeDecl(name, elements, tuple(order), tensor, residuum, pos)

    def order_chain(self) -> list[str]:
        out = [self.value()]
        self.expect("<")
        out.append(self.value())
        while self.accept("<"):
            out.append(self.value())
        return out

    def table(self, op: str) -> tuple[tuple[str, str, str], ...]:
        self.expect("{")
        rows = []
        while not self.at("}"):
            x = self.value()
            self.expect(op)
            y = self.value()
            self.expect("=")
            rows.append((x, y, self.value()))
            if not self.accept(";"):
                break
        self.expect("}")
        return tuple(rows)

    def decl_signature(self) -> SignatureDecl:
        pos = self.advance().pos
        name = self.ident()
        self.expect("{")
        fields: dict = {"props": (), "sorts": (), "nominals": (), "modalities": ()}
        ops = []
        seen = set()
        while not self.at("}"):
            kw = self.expect("props", "sorts", "op", "nominals", "modalities")
            if kw.text != "op":
                if kw.text in seen:
                    raise SpecError(f"duplicate {kw.text!r} clause", kw.pos)
                seen.add(kw.text)
            if kw.text == "op":
                op = self.ident()
                self.expect(":")
                args = []
                while self.at("IDENT"):
                    args.append(self.ident())
                self.expect("->")
                ops.append(OpSpec(op, tuple(args), self.ident()))
            elif kw.text == "modalities":
                fields["modalities"] = tuple(self.comma_list(self.modality_decl))
            else:
                fields[kw.text] = self.ident_list()
            self.expect(";")
        self.end_block()
        return SignatureDecl(name, ops=tuple(ops), pos=pos, **fields)

    def modality_decl(self) -> tuple[str, int]:
        m = self.ident()
        self.expect(":")
        return m, self.integer()

    def decl_local(self) -> LocalDecl:
        pos = self.advance().pos
        name = self.ident()
        self.expect("over")
        sig = self.ident()
        return LocalDecl(name, sig, self.local_block(), pos)

    def local_block(self) -> tuple:
        self.expect("{")
        items = []
        while not self.at("}"):
            items.append(self.local_item())
            self.expect(";")
        self.end_block()
        return tuple(items)

    def local_item(self):
        if self.at("carrier") and self.peek().kind == "IDENT":
            self.advance()
            sort = self.ident()
            self.expect("=")
            return Carrier(sort, tuple(self.comma_list(self.value)))
        name = self.ident()
        if self.accept("("):
            args = () if self.at(")") else tuple(self.comma_list(self.value))
            self.expect(")")
            self.expect("=")
            return Entry(name, args, self.value())
        if not self.at("="):
            raise self.error(("=", "("))
        self.advance()
        return Assign(name, self.value())

    def decl_model(self) -> ModelDecl:
        pos = self.advance().pos
        name = self.ident()
        self.expect("over")
        sig = self.ident()
        self.expect("{")
        worlds = None
        nominals, relations, local = [], [], []
        while not self.at("}"):
            if self.at("worlds") and self.peek().kind == "IDENT":
                if worlds is not None:
                    raise SpecError("duplicate 'worlds' clause", self.tok.pos)
                self.advance()
                worlds = self.ident_list()
                self.expect(";")
            elif self.at("nominal") and self.peek().kind == "IDENT":
                self.advance()
                i = self.ident()
                self.expect("=")
                nominals.append((i, self.ident()))
                self.expect(";")
            elif self.at("at") and self.peek().kind == "IDENT":
                self.advance()
                w = self.ident()
                if self.accept("="):
                    local.append((w, self.ident()))
                    self.expect(";")
                else:
                    local.append((w, self.local_block()))
            else:
                m = self.ident()
                self.expect("=")
                relations.append((m, tuple(self.comma_list(self.world_tuple))))
                self.expect(";")
        self.end_block()
        if worlds is None:
            raise SpecError(f"model {name!r} has no worlds clause", pos)
        return ModelDecl(name, sig, worlds, tuple(nominals), tuple(relations), tuple(local), pos)

    def world_tuple(self) -> tuple[str, ...]:
        self.expect("(")
        ws = self.ident_list()
        self.expect(")")
        return ws

    def decl_morphism(self) -> MorphismDecl:
        pos = self.advance().pos
        name = self.ident()
        self.expect(":")
        src = self.ident()
        self.expect("->")
        tgt = self.ident()
        maps = []
        if self.accept("{"):
            while not self.at("}"):
                ns = self.expect(*NAMESPACES).text
                a = self.ident()
                self.expect("->")
                maps.append((ns, a, self.ident()))
                self.expect(";")
            self.end_block()
        else:
            self.expect(";", "{")
        return MorphismDecl(name, src, tgt, tuple(maps), pos)

    def decl_relation(self) -> RelationDecl:
        pos = self.advance().pos
        name = self.ident()
        self.expect("from")
        left = self.ident()
        self.expect("to")
        right = self.ident()
        phi = self.ident() if self.accept("via") else None
        frag = self.fragment() if self.accept("fragment") else None
        self.expect("{")
        pairs = ()
        if not self.at("}"):
            pairs = tuple(self.comma_list(self.pair, close="}"))
        self.end_block()
        return RelationDecl(name, left, right, pairs, phi, frag, pos)

    def pair(self) -> tuple[str, str]:
        self.expect("(")
        a = self.ident()
        self.expect(",")
        b = self.ident()
        self.expect(")")
        return a, b

    def decl_sentence(self) -> SentenceDecl:
        pos = self.advance().pos
        name = self.ident()
        self.expect("over")
        sig = self.ident()
        self.expect("=")
        s = self.sentence_text()
        self.expect(";")
        return SentenceDecl(name, sig, s, pos)

    def fragment(self) -> FragmentSpec:
        kw = self.expect("atoms", "full", "negfree", "explicit")
        if kw.text == "atoms":
            return FragmentSpec.atoms()
        if kw.text == "explicit":
            self.expect("{")
            items = []
            while not self.at("}"):
                items.append(self.base_sentence())
                if not self.accept(";"):
                    break
            self.expect("}")
            if not items:
                raise SpecError("explicit fragment needs at least one sentence", kw.pos)
            return FragmentSpec.explicit(*items)
        depth, nvars = 1, 1
        if self.accept("("):
            self.expect("depth")
            self.expect("=")
            depth = self.integer()
            if kw.text == "full" and self.accept(","):
                self.expect("vars")
                self.expect("=")
                nvars = self.integer()
            self.expect(")")
        if kw.text == "full":
            return FragmentSpec.full(depth, nvars)
        return FragmentSpec.negation_free(depth)

    # --- commands -----------------------------------------------------------

    def command(self):
        if not self.at(*COMMANDS):
            raise self.error(COMMANDS)
        t = self.advance()
        kw, pos = t.text, t.pos
        if kw == "validate":
            out = Validate(pos)
        elif kw == "sat":
            model = self.ident()
            world = self.ident() if self.accept("at") else None
            if self.accept("use"):
                out = Sat(model, world, ref=self.ident(), pos=pos)
            else:
                self.expect(":", "use")
                out = Sat(model, world, self.sentence_text(), pos=pos)
        elif kw in ("check-bisim", "check-refine"):
            out = CheckRelation(kw, self.ident(), pos)
        elif kw in ("find-bisim", "find-refine"):
            left, right = self.ident(), self.ident()
            phi = self.ident() if self.accept("via") else None
            frag = self.fragment() if self.accept("fragment") else None
            out = FindRelation(kw, left, right, phi, frag, pos)
        elif kw == "translate":
            phi = self.ident()
            self.expect(":")
            out = Translate(phi, self.sentence_text(), pos)
        elif kw == "reduct":
            out = Reduct(self.ident(), self.ident(), pos)
        else:
            rel = self.ident()
            mode = self.advance().text if self.at(*VERIFY_MODES) else "invariance"
            depth = self.integer() if self.accept("depth") else None
            pool = None
            if self.accept("pool"):
                self.expect("{")
                items = []
                while not self.at("}"):
                    items.append(self.base_sentence())
                    if not self.accept(";"):
                        break
                self.expect("}")
                pool = tuple(items)
            out = Verify(rel, mode, depth, pool, pos)
        self.expect(";")
        return out

    # --- hybrid sentences ---------------------------------------------------

    def sentence_text(self) -> SentenceText:
        pos = self.tok.pos
        return SentenceText(self.hybrid(), pos)

    def hybrid(self):
        left = self.h_disj()
        if self.accept("=>"):
            return Imp(left, self.hybrid())
        return left

    def h_disj(self):
        left = self.h_conj()
        while self.accept("\\/"):
            left = Disj(left, self.h_conj())
        return left

    def h_conj(self):
        left = self.h_unary()
        while self.accept("/\\"):
            left = Conj(left, self.h_unary())
        return left

    def h_unary(self):
        if self.accept("!"):
            return Neg(self.h_unary())
        if self.accept("@"):
            i = self.ident()
            return At(i, self.h_unary())
        return self.h_primary()

    def h_primary(self):
        t = self.tok
        if self.accept("{"):
            s = self.base_sentence()
            self.expect("}")
            return BaseAtom(s)
        if t.kind == "IDENT":
            self.advance()
            return Name(t.text, t.pos)
        if self.accept("("):
            rho = self.hybrid()
            self.expect(")")
            return rho
        if self.at("<", "["):
            close = ">" if self.advance().kind == "<" else "]"
            m = self.ident()
            self.expect(close)
            self.expect("(")
            args = tuple(self.comma_list(self.hybrid))
            self.expect(")")
            return (Diamond if close == ">" else Box)(m, args)
        raise self.error(("{", "(", "<", "[", "!", "@", "IDENT"))

    # --- base sentences -----------------------------------------------------

    def base_sentence(self):
        if self.logic == "eq":
            return self.equation()
        if self.logic == "mvl":
            self.expect("(")
            f = self.mvl_formula()
            self.expect(",")
            g = self.value()
            self.expect(")")
            return mvl.MVLSentence(f, g)
        return self.pl_formula()

    def pl_formula(self):
        left = self.pl_disj()
        if self.accept("=>"):
            return pl.Implies(left, self.pl_formula())
        return left

    def pl_disj(self):
        left = self.pl_conj()
        while self.accept("\\/"):
            left = pl.Or(left, self.pl_conj())
        return left

    def pl_conj(self):
        left = self.pl_unary()
        while self.accept("/\\"):
            left = pl.And(left, self.pl_unary())
        return left

    def pl_unary(self):
        if self.accept("!"):
            return pl.Not(self.pl_unary())
        if self.accept("("):
            f = self.pl_formula()
            self.expect(")")
            return f
        if self.at("IDENT"):
            return pl.Atom(self.ident())
        raise self.error(("!", "(", "IDENT"))

    def mvl_formula(self):
        left = self.mvl_join()
        if self.accept("->"):
            return mvl.Res(left, self.mvl_formula())
        return left

    def mvl_join(self):
        left = self.mvl_tensor()
        while self.accept("\\/"):
            left = mvl.Join(left, self.mvl_tensor())
        return left

    def mvl_tensor(self):
        left = self.mvl_primary()
        while self.accept("*"):
            left = mvl.Tensor(left, self.mvl_primary())
        return left

    def mvl_primary(self):
        if self.accept("("):
            f = self.mvl_formula()
            self.expect(")")
            return f
        if self.accept("top"):
            return mvl.Top()
        if self.accept("bot"):
            return mvl.Bot()
        if self.at("IDENT"):
            return mvl.Prop(self.ident())
        raise self.error(("(", "top", "bot", "IDENT"))

    def equation(self):
        variables = []
        if self.accept("forall"):
            variables = self.comma_list(self.typed_var)
            self.expect(".")
        scope = {}
        for n, s in variables:
            if n in scope:
                raise SpecError(f"variable {n!r} is bound twice", self.tok.pos)
            scope[n] = s
        lhs = self.term(scope)
        self.expect("=")
        rhs = self.term(scope)
        try:
            return eqm.Equation(tuple(variables), lhs, rhs)
        except ValidationError as e:
            raise SpecError(str(e), self.tok.pos) from None

    def typed_var(self) -> tuple[str, str]:
        n = self.ident()
        self.expect(":")
        return n, self.ident()

    def term(self, scope):
        t = self.expect("IDENT")
        if self.accept("("):
            args = () if self.at(")") else tuple(self.comma_list(lambda: self.term(scope)))
            self.expect(")")
            return eqm.App(t.text, args)
        if t.text not in scope:
            raise SpecError(f"unbound variable {t.text!r} (write constants as {t.text}())", t.pos)
        return eqm.Var(t.text, scope[t.text])


def _find_logic(tokens: list[Token]) -> str:
    """The base logic named by a top-level ``logic`` directive, default ``pl``."""
    depth = 0
    start = True
    found = None
    for k, t in enumerate(tokens):
        if t.kind == "{":
            depth += 1
        elif t.kind == "}":
            depth = max(0, depth - 1)
        elif (depth == 0 and start and t.kind == "IDENT" and t.text == "logic"
              and tokens[k + 1].kind == "IDENT" and tokens[k + 1].text in LOGICS):
            if found is not None and found != tokens[k + 1].text:
                raise SpecError("conflicting logic directives", t.pos)
            found = tokens[k + 1].text
        start = depth == 0 and t.kind in (";", "}")
    return found or "pl"


def _guard(fn):
    try:
        return fn()
    except RecursionError:
        raise SpecError("input is nested too deeply") from None


def parse_spec(text: str) -> SpecFile:
    """Parse a whole ``.hyb`` file into a :class:`SpecFile`."""
    tokens = tokenize(text)
    return _guard(lambda: Parser(tokens, _find_logic(tokens)).spec())


def parse_commands(text: str, logic: str = "pl") -> tuple:
    """Parse a command list, as given with ``--cmd``."""
    return _guard(lambda: Parser(tokenize(text), logic).commands())


def parse_hybrid_text(text: str, logic: str = "pl") -> SentenceText:
    def go():
        p = Parser(tokenize(text), logic)
        s = p.sentence_text()
        p.expect("EOF")
        return s
    return _guard(go)


def parse_base(text: str, logic: str = "pl"):
    def go():
        p = Parser(tokenize(text), logic)
        s = p.base_sentence()
        p.expect("EOF")
        return s
    return _guard(go)
