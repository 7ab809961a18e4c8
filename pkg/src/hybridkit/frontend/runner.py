"""Execute commands against a resolved file and build reports.

Exit statuses: 0 when every check passed, 1 when a check failed,
2 on input errors (lexing, parsing, resolution, invalid models).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .. import equiv
from .. import mvl
from ..hybrid import (
    check_model,
    extension,
    hyb_reduct,
    hyb_sat_global,
    hyb_sat_local,
    hyb_translate,
    morphism_problems,
    validate_model,
)
from ..institution import HybridKitError
from .lexer import SpecError
from .parser import parse_commands, parse_spec
from .printer import format_command, format_model
from .resolve import Env, Resolver, check_fragment, morphism_for, resolve_sentence
from .syntax import (
    CheckRelation,
    FindRelation,
    Reduct,
    Sat,
    SpecFile,
    Translate,
    Validate,
    Verify,
)

PASSED, FAILED, INPUT_ERROR = 0, 1, 2
DEFAULT_DEPTH = 3


@dataclass
class Options:
    depth: int = DEFAULT_DEPTH
    trace: bool = False


@dataclass
class Report:
    command: str
    kind: str
    verdict: Optional[bool]
    status: int
    conditions: list = field(default_factory=list)
    violations: list = field(default_factory=list)
    relation: Optional[dict] = None
    detail: dict = field(default_factory=dict)
    text: list = field(default_factory=list)  # human-readable lines

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "kind": self.kind,
            "verdict": self.verdict,
            "status": self.status,
            "conditions": self.conditions,
            "violations": self.violations,
            "relation": self.relation,
            **self.detail,
        }


def error_report(err: Exception, command: str = "") -> Report:
    detail = {"error": {"message": getattr(err, "message", str(err))}}
    if isinstance(err, SpecError):
        detail["error"].update(line=err.pos.line, col=err.pos.col, expected=err.expected)
    return Report(command, "error", None, INPUT_ERROR, detail=detail, text=[f"error: {err}"])


def _relation_dict(name: Optional[str], R: equiv.WorldRelation, env: Env) -> dict:
    return {
        "name": name,
        "from": _model_name(env, R.left),
        "to": _model_name(env, R.right),
        "pairs": [list(p) for p in R.sorted_pairs()],
    }


def _model_name(env: Env, K) -> Optional[str]:
    for n, m in env.models.items():
        if m is K:
            return n
    return None


def _condition_lines(rep: equiv.ConditionReport) -> list[str]:
    out = []
    for c in rep.conditions:
        state = "ok" if c.passed else f"FAILED ({len(c.violations)} violation(s))"
        out.append(f"  ({c.name}) {c.title}: {state}")
        for v in c.violations[:5]:
            out.append("      " + ", ".join(f"{k}={v[k]}" for k in v))
    if not rep.nonempty:
        out.append("  relation is empty")
    return out


def _status(ok: bool) -> int:
    return PASSED if ok else FAILED


class Runner:
    def __init__(self, env: Env, options: Optional[Options] = None):
        self.env = env
        self.options = options or Options()

    def run(self, cmd) -> Report:
        name = type(cmd).__name__.lower()
        return getattr(self, "do_" + name)(cmd, format_command(cmd))

    def do_sat(self, c: Sat, text: str) -> Report:
        env = self.env
        K = env.lookup("models", c.model, c.pos, "model")
        check_model(K)
        if c.ref is not None:
            sig_name, rho = env.lookup("sentences", c.ref, c.pos, "sentence")
            if env.signatures[sig_name] != K.signature:
                raise SpecError(f"sentence {c.ref!r} is over {sig_name!r}, not the model's signature", c.pos)
        else:
            rho = resolve_sentence(c.sentence, K.signature)
        if c.world is not None:
            if c.world not in K.worlds:
                raise SpecError(f"model {c.model!r} has no world {c.world!r}", c.pos, K.worlds)
            verdict = hyb_sat_local(K, c.world, rho)
        else:
            verdict = hyb_sat_global(K, rho)
        ext = [w for w in K.worlds if w in extension(K, rho)]
        where = f"at {c.world}" if c.world else "globally"
        return Report(text, "sat", verdict, _status(verdict),
                      detail={"model": c.model, "world": c.world, "sentence": str(rho), "extension": ext},
                      text=[f"{c.model} {where} {'satisfies' if verdict else 'does not satisfy'} {rho}",
                            f"  holds at: {', '.join(ext) or '(no world)'}"])

    def do_checkrelation(self, c: CheckRelation, text: str) -> Report:
        R = self.env.lookup("relations", c.relation, c.pos, "relation")
        rep = equiv.check_bisim(R) if c.kind == "check-bisim" else equiv.check_refinement(R)
        d = rep.to_dict()
        head = f"{c.relation} is {'a' if rep.ok else 'not a'} {rep.kind}"
        return Report(text, c.kind, rep.ok, _status(rep.ok), d["conditions"], d["violations"],
                      _relation_dict(c.relation, R, self.env), {"nonempty": rep.nonempty},
                      [head] + _condition_lines(rep))

    def do_findrelation(self, c: FindRelation, text: str) -> Report:
        env = self.env
        left = env.lookup("models", c.left, c.pos, "model")
        right = env.lookup("models", c.right, c.pos, "model")
        phi = morphism_for(env, left, right, c.morphism, c.pos)
        frag = check_fragment(env, phi, c.fragment, c.pos)
        find = equiv.largest_bisim if c.kind == "find-bisim" else equiv.largest_simulation
        search = find(left, right, phi, frag)
        detail = {"reason": search.reason}
        if self.options.trace:
            detail["trace"] = search.trace
        what = "bisimulation" if c.kind == "find-bisim" else "refinement"
        if not search:
            return Report(text, c.kind, False, FAILED, violations=[{"reason": search.reason}],
                          detail=detail, text=[search.reason])
        R = search.relation
        rep = equiv.check_bisim(R) if c.kind == "find-bisim" else equiv.check_refinement(R)
        d = rep.to_dict()
        rel = _relation_dict(None, R, env)
        lines = [f"largest {what} from {c.left} to {c.right}: "
                 + ", ".join(f"({a}, {b})" for a, b in rel["pairs"])]
        return Report(text, c.kind, rep.ok, _status(rep.ok), d["conditions"], d["violations"],
                      rel, detail, lines + _condition_lines(rep))

    def do_translate(self, c: Translate, text: str) -> Report:
        phi = self.env.lookup("morphisms", c.morphism, c.pos, "morphism")
        rho = resolve_sentence(c.sentence, phi.source)
        out = hyb_translate(phi, rho)
        return Report(text, "translate", True, PASSED, detail={"sentence": str(out)}, text=[str(out)])

    def do_reduct(self, c: Reduct, text: str) -> Report:
        env = self.env
        phi = env.lookup("morphisms", c.morphism, c.pos, "morphism")
        K = env.lookup("models", c.model, c.pos, "model")
        if K.signature != phi.target:
            raise SpecError(f"model {c.model!r} is not over the target of {c.morphism!r}", c.pos)
        Kr = hyb_reduct(phi, K)
        printed = format_model(Kr, f"{c.model}_reduct", env.signature_name(phi.source))
        return Report(text, "reduct", True, PASSED, detail={"model": printed}, text=printed.splitlines())

    def do_verify(self, c: Verify, text: str) -> Report:
        env = self.env
        R = env.lookup("relations", c.relation, c.pos, "relation")
        depth = c.depth if c.depth is not None else self.options.depth
        pool = list(c.pool) if c.pool is not None else None
        if c.mode == "refine":
            rep = equiv.verify_refinement_preservation(R, pool, depth)
        elif c.mode == "global":
            rep = equiv.verify_global_invariance(R, pool, depth)
        else:
            rep = equiv.verify_invariance(R, pool, depth)
        d = rep.to_dict()
        pre = d.pop("precondition")
        conds = pre["conditions"] if pre else []
        lines = [f"{rep.kind} of {c.relation} up to depth {depth}: "
                 f"{'no violations' if rep.ok else f'{rep.violation_count} violation(s)'} "
                 f"over {rep.sentence_classes} sentence classes"]
        lines += [f"  pair {v.get('pair')}: {v['sentence']}" for v in rep.violations[:10]]
        if rep.boundary:
            lines.append("  preservation fails outside the positive fragment, e.g.")
            lines += [f"    {b['kind']} at {b['pair']}: {b['sentence']}" for b in rep.boundary]
        extra = {k: d[k] for k in ("depth", "pairs_checked", "sentence_classes", "violation_count",
                                   "dropped_atoms", "boundary", "global_checked")}
        extra["precondition_verdict"] = None if pre is None else pre["verdict"]
        return Report(text, f"verify-{c.mode}", rep.ok, _status(rep.ok), conds, d["violations"],
                      _relation_dict(c.relation, R, env), extra, lines)

    def do_validate(self, c: Validate, text: str) -> Report:
        env = self.env
        problems = []
        for n, L in env.lattices.items():
            problems += [{"object": n, "problem": p} for p in mvl.lattice_validate(L)]
        for n, K in env.models.items():
            problems += [{"object": n, "problem": p} for p in validate_model(K)]
        for n, phi in env.morphisms.items():
            problems += [{"object": n, "problem": p} for p in morphism_problems(phi)]
        ok = not problems
        lines = ["all declarations are valid" if ok else f"{len(problems)} problem(s)"]
        lines += [f"  {p['object']}: {p['problem']}" for p in problems]
        return Report(text, "validate", ok, _status(ok), violations=problems, text=lines)


def load(text: str, base_dir: Optional[Path] = None) -> tuple[SpecFile, Env]:
    spec = parse_spec(text)
    env = Resolver(spec, [base_dir] if base_dir else ()).run()
    return spec, env


def run_text(text: str, cmd: Optional[str] = None, options: Optional[Options] = None,
             base_dir: Optional[Path] = None) -> tuple[int, list[Report]]:
    """Parse, resolve and run; returns the exit status and one report per command."""
    reports: list[Report] = []
    try:
        spec, env = load(text, base_dir)
        commands: Sequence = spec.commands
        if cmd is not None:
            commands = parse_commands(cmd, env.logic_name)
        runner = Runner(env, options)
        for c in commands:
            try:
                reports.append(runner.run(c))
            except HybridKitError as e:
                reports.append(error_report(e, format_command(c)))
                break
    except HybridKitError as e:
        reports.append(error_report(e))
    status = max((r.status for r in reports), default=PASSED)
    return status, reports


def render(reports: Sequence[Report], as_json: bool = False) -> str:
    if as_json:
        return "".join(json.dumps(r.to_dict(), sort_keys=True) + "\n" for r in reports)
    out = []
    for r in reports:
        tag = {PASSED: "PASS", FAILED: "FAIL", INPUT_ERROR: "ERROR"}[r.status]
        out.append(f"[{tag}] {r.command}" if r.command else f"[{tag}]")
        out += r.text
    return "\n".join(out) + ("\n" if out else "")
