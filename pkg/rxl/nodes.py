"""
Syntax tree for RXL.

One node class with a kind tag. Kind-specific payload lives in ``value``:

    Program      value=directive strings      children=statements
    VarDecl      value=name                   children=[init] or []
    SignalDecl   value=name                   children=[expr]
    AlwaysStmt                                children=[expr]
    Label        value=label                  children=[statement]
    Assign       value=operator ("=", "+=")   children=[target, rhs]
    Update       value="++" or "--"           children=[target]
    Member       value=property name          children=[object]
    Index                                     children=[object, key]
    Ident        value=name ("this" included)
    Call / New                                children=[callee, *args]
    FunctionLit  value=name or None           children=[body]; params, arrow, source
    ObjectLit    value=keys                   children=values
    ArrayLit                                  children=elements
    ClassDecl    value=name                   children=methods (named FunctionLit)
    If                                        children=[cond, then, else?]
    While                                     children=[cond, body]
    ForOf        value=loop variable          children=[iterable, body]
    Return                                    children=[expr] or []
    Block                                     children=statements
    Literal      value=None/bool/float/str
    Binary       value=operator               children=[left, right]
    Unary        value=operator               children=[operand]
    Conditional                               children=[cond, then, else]
    Comment      value=comment text
"""
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterator, List, Optional


class NodeKind(str, Enum):
    PROGRAM = "Program"
    VAR_DECL = "VarDecl"
    SIGNAL_DECL = "SignalDecl"
    ALWAYS_STMT = "AlwaysStmt"
    ASSIGN = "Assign"
    UPDATE = "Update"
    MEMBER = "Member"
    INDEX = "Index"
    IDENT = "Ident"
    CALL = "Call"
    NEW = "New"
    FUNCTION_LIT = "FunctionLit"
    OBJECT_LIT = "ObjectLit"
    ARRAY_LIT = "ArrayLit"
    CLASS_DECL = "ClassDecl"
    IF = "If"
    WHILE = "While"
    FOR_OF = "ForOf"
    RETURN = "Return"
    BLOCK = "Block"
    LITERAL = "Literal"
    BINARY = "Binary"
    UNARY = "Unary"
    CONDITIONAL = "Conditional"
    LABEL = "Label"
    COMMENT = "Comment"


STATEMENT_KINDS = frozenset({
    NodeKind.VAR_DECL, NodeKind.SIGNAL_DECL, NodeKind.ALWAYS_STMT,
    NodeKind.CLASS_DECL, NodeKind.IF, NodeKind.WHILE, NodeKind.FOR_OF,
    NodeKind.RETURN, NodeKind.BLOCK, NodeKind.LABEL, NodeKind.COMMENT,
})


@dataclass(eq=False)
class AstNode:
    kind: NodeKind
    children: List["AstNode"] = field(default_factory=list)
    value: Any = None
    line: int = 0
    column: int = 0
    start: int = 0
    end: int = 0
    node_id: int = 0
    params: Optional[List[str]] = None
    arrow: bool = False
    source: Optional[str] = None
    declaration: bool = False  # statement-level named function

    def __repr__(self) -> str:
        return f"AstNode({self.kind.value}, value={self.value!r}, children={len(self.children)})"

    @property
    def is_expression_statement(self) -> bool:
        if self.kind is NodeKind.FUNCTION_LIT:
            return not self.is_function_declaration
        return self.kind not in STATEMENT_KINDS

    @property
    def is_function_declaration(self) -> bool:
        return self.kind is NodeKind.FUNCTION_LIT and self.declaration


def make_node(kind: NodeKind, children=None, value=None, like: Optional[AstNode] = None, **extra) -> AstNode:
    """Create a node, copying the source position from ``like`` when given."""
    node = AstNode(kind, list(children or []), value, **extra)
    if like is not None:
        node.line, node.column, node.start, node.end = like.line, like.column, like.start, like.end
    return node


def walk(node: AstNode) -> Iterator[AstNode]:
    """Pre-order traversal without recursion."""
    stack = [node]
    while stack:
        current = stack.pop()
        yield current
        stack.extend(reversed(current.children))


def renumber(program: AstNode) -> AstNode:
    """Assign fresh, unique node ids in pre-order."""
    for index, node in enumerate(walk(program), start=1):
        node.node_id = index
    return program


def count_ast_nodes(program: AstNode) -> int:
    """Count every node of the tree except comments."""
    return sum(1 for node in walk(program) if node.kind is not NodeKind.COMMENT)


def format_literal(value: Any) -> str:
    """Render a literal the way source text would spell it."""
    if value is None:
        return "null"
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, float):
        if value.is_integer() and abs(value) < 1e21:
            return str(int(value))
        return repr(value)
    return json.dumps(value, ensure_ascii=False)


def _payload(node: AstNode) -> str:
    kind = node.kind
    if kind is NodeKind.LITERAL:
        return format_literal(node.value)
    if kind is NodeKind.PROGRAM:
        return " ".join(json.dumps(d) for d in node.value or ())
    if kind is NodeKind.FUNCTION_LIT:
        name = node.value or "<anonymous>"
        params = " ".join(node.params or [])
        return f"{name} ({params}){' =>' if node.arrow else ''}"
    if kind is NodeKind.OBJECT_LIT:
        return " ".join(node.value or [])
    if kind is NodeKind.COMMENT:
        return json.dumps(node.value)
    if node.value is None:
        return ""
    return str(node.value)


def dump_ast(node: AstNode) -> str:
    """
    Render the tree as an s-expression, one node per line.

    Children are indented two spaces below their parent; the closing
    parentheses of a subtree trail its last line.
    """
    lines: List[str] = []

    def visit(current: AstNode, depth: int) -> None:
        payload = _payload(current)
        head = f"{'  ' * depth}({current.kind.value}"
        lines.append(f"{head} {payload}" if payload else head)
        for child in current.children:
            visit(child, depth + 1)
        lines[-1] += ")"

    visit(node, 0)
    return "\n".join(lines)
