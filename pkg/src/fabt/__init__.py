"""A typed-to-untyped lambda calculus compiler with runtime-checked wrappers,
its approximate back-translation, and a differential tester for contextual
equivalence."""

from .compiler import compile_modular, compile_term, confine, erase, protect
from .parser import parse_src, parse_tgt, parse_type
from .printer import show, show_type
from .source import typecheck

__all__ = [
    "compile_modular", "compile_term", "confine", "erase", "protect",
    "parse_src", "parse_tgt", "parse_type", "show", "show_type", "typecheck",
]
