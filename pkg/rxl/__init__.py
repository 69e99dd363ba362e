"""RXL language package: parsing, printing and evaluation."""
from rxl.exceptions import (
    RxlError,
    RxlSyntaxError,
    RxlRuntimeError,
    RuntimeErrorKind,
    RewriteError,
    UsageError,
    AssertionFailed,
)
from rxl.nodes import AstNode, NodeKind, count_ast_nodes, dump_ast
from rxl.parser import HOOK_DIRECTIVE, parse, parse_expression
from rxl.printer import print_program

__all__ = [
    "RxlError",
    "RxlSyntaxError",
    "RxlRuntimeError",
    "RuntimeErrorKind",
    "RewriteError",
    "UsageError",
    "AssertionFailed",
    "AstNode",
    "NodeKind",
    "count_ast_nodes",
    "dump_ast",
    "HOOK_DIRECTIVE",
    "parse",
    "parse_expression",
    "print_program",
]
