"""Toolchain for Liffig: labelled if...fi blocks joined by gotos."""

from .interpreter import RunConfig, check_variant, run, step
from .model import Program, State, resolve_assertion
from .parser import ParseError, parse_formula, parse_program, parse_term
from .printer import pretty_print
from .semantics import apply_command, eval_formula, eval_term
from .transpile import emit_runtime_checked, to_c
from .vc import (DomainWindow, check_program, check_vc, extract_vcs, merge_snippet,
                 vcs_to_liffig)

__all__ = [
    "DomainWindow", "ParseError", "Program", "RunConfig", "State", "apply_command",
    "check_program", "check_variant", "check_vc", "emit_runtime_checked", "eval_formula",
    "eval_term", "extract_vcs", "merge_snippet", "parse_formula", "parse_program",
    "parse_term", "pretty_print", "resolve_assertion", "run", "step", "to_c", "vcs_to_liffig",
]
