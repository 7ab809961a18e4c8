"""Text front end: ``.hyb`` parser, printer, resolver and command runner."""
from .lexer import Pos, SpecError, tokenize
from .parser import parse_base, parse_commands, parse_hybrid_text, parse_spec
from .printer import format_command, format_declaration, format_fragment, format_model, format_spec
from .resolve import Env, parse_sentence, resolve, resolve_sentence
from .runner import Options, Report, Runner, load, render, run_text

__all__ = [
    "Env", "Options", "Pos", "Report", "Runner", "SpecError",
    "format_command", "format_declaration", "format_fragment", "format_model", "format_spec",
    "load", "parse_base", "parse_commands", "parse_hybrid_text", "parse_sentence", "parse_spec",
    "render", "resolve", "resolve_sentence", "run_text", "tokenize",
]
