"""Parser and interpreter for the openCypher subset used by the rule scripts."""

from .ast import Script
from .parser import parse, parse_cached, parse_expr, tokenize
from .printer import to_text
from .runtime import ExecutionResult, Path, ResultTable, eval_expr, execute, list_intersection

__all__ = [
    "ExecutionResult",
    "Path",
    "ResultTable",
    "Script",
    "eval_expr",
    "execute",
    "list_intersection",
    "parse",
    "parse_cached",
    "parse_expr",
    "to_text",
    "tokenize",
]
