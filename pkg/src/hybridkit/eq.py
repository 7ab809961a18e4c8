"""Many-sorted equational logic over finite algebras.

Carriers are finite, so a universally quantified equation is decided by
running through every assignment of its variables.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
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
class OpDecl:
    name: str
    args: tuple[str, ...]
    result: str

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class EQSignature:
    sorts: tuple[str, ...]
    ops: tuple[OpDecl, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "sorts", tuple(self.sorts))
        object.__setattr__(self, "ops", tuple(self.ops))

    def op(self, name: str) -> OpDecl:
        for o in self.ops:
            if o.name == name:
                return o
        raise ValidationError(f"undeclared operation {name!r}")


class Term:
    pass


@dataclass(frozen=True)
class Var(Term):
    name: str
    sort: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class App(Term):
    op: str
    args: tuple[Term, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))

    def __str__(self):
        return f"{self.op}({', '.join(map(str, self.args))})"


@dataclass(frozen=True)
class Equation:
    variables: tuple[tuple[str, str], ...]
    lhs: Term
    rhs: Term

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(tuple(v) for v in self.variables))

    def __str__(self):
        body = f"{self.lhs} = {self.rhs}"
        if not self.variables:
            return body
        prefix = ", ".join(f"{n}:{s}" for n, s in self.variables)
        return f"forall {prefix} . {body}"


@dataclass(frozen=True)
class FiniteAlgebra:
    signature: EQSignature
    carriers: Mapping[str, tuple[str, ...]]
    tables: Mapping[str, Mapping[tuple[str, ...], str]]

    def __hash__(self):
        return hash((self.signature,
                     tuple(sorted((s, tuple(c)) for s, c in self.carriers.items()))))


def term_depth(t: Term) -> int:
    if isinstance(t, Var) or not t.args:
        return 0
    return 1 + max(term_depth(a) for a in t.args)


def sort_of(sig: EQSignature, t: Term) -> str:
    if isinstance(t, Var):
        return t.sort
    return sig.op(t.op).result


def vars_of(t: Term) -> list[Var]:
    if isinstance(t, Var):
        return [t]
    return dedup(v for a in t.args for v in vars_of(a))


def check_term(sig: EQSignature, t: Term, scope: Mapping[str, str]) -> str:
    """Validate ``t`` against ``sig`` with bound variables ``scope``; return its sort."""
    if isinstance(t, Var):
        if t.name not in scope:
            raise ValidationError(f"variable {t.name!r} is not quantified")
        if scope[t.name] != t.sort:
            raise ValidationError(f"variable {t.name!r} used at sort {t.sort!r}, declared {scope[t.name]!r}")
        return t.sort
    decl = sig.op(t.op)
    if len(t.args) != len(decl.args):
        raise ValidationError(f"{t.op} expects {len(decl.args)} arguments, got {len(t.args)}")
    for a, s in zip(t.args, decl.args):
        got = check_term(sig, a, scope)
        if got != s:
            raise ValidationError(f"argument of {t.op} has sort {got!r}, expected {s!r}")
    return decl.result


def eval_term(A: FiniteAlgebra, env: Mapping[str, str], t: Term) -> str:
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise ValidationError(f"unbound variable {t.name!r}") from None
    args = tuple(eval_term(A, env, a) for a in t.args)
    try:
        return A.tables[t.op][args]
    except KeyError:
        raise ValidationError(f"no table entry for {t.op}{args}") from None


def eq_satisfy(A: FiniteAlgebra, eq: Equation) -> bool:
    names = [n for n, _ in eq.variables]
    domains = []
    for n, s in eq.variables:
        carrier = A.carriers.get(s, ())
        if not carrier:
            raise ValidationError(f"sort {s!r} of variable {n!r} has an empty carrier")
        domains.append(carrier)
    for values in product(*domains):
        env = dict(zip(names, values))
        if eval_term(A, env, eq.lhs) != eval_term(A, env, eq.rhs):
            return False
    return True


def rename_term(t: Term, sort_map, op_map) -> Term:
    if isinstance(t, Var):
        return Var(t.name, sort_map(t.sort))
    return App(op_map(t.op), tuple(rename_term(a, sort_map, op_map) for a in t.args))


def eq_translate(phi: BaseMorphism, eq: Equation) -> Equation:
    s = lambda x: phi("sort", x)  # noqa: E731
    o = lambda x: phi("op", x)  # noqa: E731
    return Equation(tuple((n, s(srt)) for n, srt in eq.variables),
                    rename_term(eq.lhs, s, o), rename_term(eq.rhs, s, o))


def eq_reduct(phi: BaseMorphism, A2: FiniteAlgebra) -> FiniteAlgebra:
    src = phi.source
    return FiniteAlgebra(
        src,
        {s: tuple(A2.carriers[phi("sort", s)]) for s in src.sorts},
        {o.name: A2.tables[phi("op", o.name)] for o in src.ops},
    )


def enumerate_terms(sig: EQSignature, max_depth: int, max_vars: int) -> dict[str, list[Term]]:
    """Terms of each sort with depth <= ``max_depth`` over ``max_vars`` variables per sort."""
    by_sort: dict[str, list[Term]] = {s: [] for s in sig.sorts}
    for s in sig.sorts:
        by_sort[s].extend(Var(var_name(s, k), s) for k in range(1, max_vars + 1))
    for o in sig.ops:
        if not o.args:
            by_sort[o.result].append(App(o.name))
    for _ in range(max_depth):
        nxt = {s: list(ts) for s, ts in by_sort.items()}
        for o in sig.ops:
            if o.args:
                for args in product(*(by_sort[a] for a in o.args)):
                    nxt[o.result].append(App(o.name, args))
        by_sort = {s: dedup(ts) for s, ts in nxt.items()}
    return by_sort


def var_name(sort: str, k: int) -> str:
    return f"{sort}_{k}"


def enumerate_equations(sig: EQSignature, max_depth: int, max_vars: int) -> list[Equation]:
    if max_depth < 0 or max_vars < 0:
        raise ValidationError("enumeration bounds must be >= 0")
    terms = enumerate_terms(sig, max_depth, max_vars)
    order = {s: i for i, s in enumerate(sig.sorts)}
    out = []
    for s in sig.sorts:
        for lhs in terms[s]:
            for rhs in terms[s]:
                vs = dedup(vars_of(lhs) + vars_of(rhs))
                vs.sort(key=lambda v: (order[v.sort], v.name))
                out.append(Equation(tuple((v.name, v.sort) for v in vs), lhs, rhs))
    return out


@dataclass(frozen=True)
class EquationalLogic(Institution):
    name = "eq"

    def signature_problems(self, sig) -> list[str]:
        if not isinstance(sig, EQSignature):
            return ["not an equational signature"]
        problems = check_names(sig.sorts, "sort") + check_names([o.name for o in sig.ops], "operation")
        for o in sig.ops:
            for s in o.args + (o.result,):
                if s not in sig.sorts:
                    problems.append(f"operation {o.name!r} mentions undeclared sort {s!r}")
        return problems

    def check_sentence(self, sig, sentence) -> None:
        if not isinstance(sentence, Equation):
            raise ValidationError(f"not an equation: {sentence!r}")
        names = [n for n, _ in sentence.variables]
        problems = check_names(names, "variable")
        if problems:
            raise ValidationError("; ".join(problems))
        scope = dict(sentence.variables)
        for n, s in sentence.variables:
            if s not in sig.sorts:
                raise ValidationError(f"variable {n!r} has undeclared sort {s!r}")
        left = check_term(sig, sentence.lhs, scope)
        right = check_term(sig, sentence.rhs, scope)
        if left != right:
            raise ValidationError(f"equation sides have different sorts {left!r} and {right!r}")

    def model_problems(self, model) -> list[str]:
        if not isinstance(model, FiniteAlgebra):
            return ["not a finite algebra"]
        sig = model.signature
        problems = []
        for s in sig.sorts:
            if s not in model.carriers:
                problems.append(f"sort {s!r} has no carrier")
            else:
                problems += check_names(model.carriers[s], f"element of {s}")
        for s in model.carriers:
            if s not in sig.sorts:
                problems.append(f"carrier for undeclared sort {s!r}")
        if problems:
            return problems
        for o in sig.ops:
            for s in o.args + (o.result,):
                if not model.carriers[s]:
                    problems.append(f"sort {s!r} used by {o.name!r} has an empty carrier")
            table = model.tables.get(o.name)
            if table is None:
                problems.append(f"operation {o.name!r} has no table")
                continue
            for args in product(*(model.carriers[a] for a in o.args)):
                if args not in table:
                    problems.append(f"{o.name}{args} is undefined")
                elif table[args] not in model.carriers[o.result]:
                    problems.append(f"{o.name}{args} = {table[args]!r} is outside the carrier of {o.result!r}")
        for name in model.tables:
            if name not in {o.name for o in sig.ops}:
                problems.append(f"table for undeclared operation {name!r}")
        return problems

    def signature_of(self, model):
        return model.signature

    def satisfy(self, model, sentence) -> bool:
        return eq_satisfy(model, sentence)

    def identity(self, sig) -> BaseMorphism:
        return BaseMorphism(sig, sig, {"sort": {s: s for s in sig.sorts},
                                       "op": {o.name: o.name for o in sig.ops}})

    def morphism_problems(self, phi: BaseMorphism) -> list[str]:
        src, tgt = phi.source, phi.target
        if not isinstance(src, EQSignature) or not isinstance(tgt, EQSignature):
            return ["morphism endpoints are not equational signatures"]
        problems = []
        sorts = phi.maps.get("sort", {})
        ops = phi.maps.get("op", {})
        for s in src.sorts:
            if s not in sorts:
                problems.append(f"sort {s!r} is not mapped")
            elif sorts[s] not in tgt.sorts:
                problems.append(f"image {sorts[s]!r} of sort {s!r} is not declared in the target")
        if problems:
            return problems
        for o in src.ops:
            if o.name not in ops:
                problems.append(f"operation {o.name!r} is not mapped")
                continue
            try:
                image = tgt.op(ops[o.name])
            except ValidationError as e:
                problems.append(str(e))
                continue
            want = (tuple(sorts[a] for a in o.args), sorts[o.result])
            if (image.args, image.result) != want:
                problems.append(f"profile of {o.name!r} is not preserved by its image {image.name!r}")
        return problems

    def translate(self, phi, sentence):
        return eq_translate(phi, sentence)

    def reduct(self, phi, model):
        return eq_reduct(phi, model)

    def enumerate_fragment(self, sig, frag: FragmentSpec):
        if frag.kind is FragmentKind.EXPLICIT:
            return list(frag.sentences)
        # equations are atomic and negation-free, so the bounded kinds coincide
        return enumerate_equations(sig, frag.depth, frag.max_vars)

    def in_fragment(self, sentence, frag: FragmentSpec) -> bool:
        if frag.kind is FragmentKind.EXPLICIT:
            return sentence in frag.sentences
        return True

    def atom_pool(self, sig, frag: FragmentSpec) -> list:
        if frag.kind is FragmentKind.EXPLICIT:
            return list(frag.sentences)
        return self.fragment_sentences(sig, frag)


EQ = EquationalLogic()


def alpha_rename(eq: Equation, names: Mapping[str, str]) -> Equation:
    """Rename bound variables of ``eq`` by ``names`` (missing names kept)."""
    def go(t: Term) -> Term:
        if isinstance(t, Var):
            return Var(names.get(t.name, t.name), t.sort)
        return App(t.op, tuple(go(a) for a in t.args))
    return Equation(tuple((names.get(n, n), s) for n, s in eq.variables), go(eq.lhs), go(eq.rhs))
