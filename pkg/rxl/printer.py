"""Print syntax trees back to RXL surface syntax."""
import json
import re
from typing import List

from rxl.nodes import AstNode, NodeKind, format_literal

INDENT = "  "

_IDENTIFIER = re.compile(r"^[A-Za-z_$][A-Za-z0-9_$]*$")

_BINARY_PRECEDENCE = {
    "||": 3, "&&": 4,
    "==": 5, "!=": 5,
    "<": 6, "<=": 6, ">": 6, ">=": 6,
    "+": 7, "-": 7,
    "*": 8, "/": 8, "%": 8,
}

_ASSIGN, _CONDITIONAL, _UNARY, _POSTFIX, _CALL, _PRIMARY = 1, 2, 9, 10, 11, 12


def _precedence(node: AstNode) -> int:
    kind = node.kind
    if kind is NodeKind.ASSIGN:
        return _ASSIGN
    if kind is NodeKind.FUNCTION_LIT:
        return _ASSIGN if node.arrow else _PRIMARY
    if kind is NodeKind.CONDITIONAL:
        return _CONDITIONAL
    if kind is NodeKind.BINARY:
        return _BINARY_PRECEDENCE[node.value]
    if kind is NodeKind.UNARY:
        return _UNARY
    if kind is NodeKind.UPDATE:
        return _POSTFIX
    if kind in (NodeKind.CALL, NodeKind.MEMBER, NodeKind.INDEX, NodeKind.NEW):
        return _CALL
    return _PRIMARY


def _leftmost(node: AstNode) -> AstNode:
    """The node whose first token starts the printed expression."""
    while node.kind in (NodeKind.BINARY, NodeKind.ASSIGN, NodeKind.MEMBER, NodeKind.INDEX,
                        NodeKind.CALL, NodeKind.UPDATE, NodeKind.CONDITIONAL):
        first = node.children[0]
        if _precedence(first) < _precedence(node):
            return node
        node = first
    return node


def _property_name(key: str) -> str:
    return key if _IDENTIFIER.match(key) else json.dumps(key, ensure_ascii=False)


class Printer:
    """Renders statements line by line and expressions inline."""

    def program(self, node: AstNode) -> str:
        lines = [f"{json.dumps(d, ensure_ascii=False)};" for d in node.value or ()]
        lines.extend(self.statement(child, 0) for child in node.children)
        return "\n".join(lines) + ("\n" if lines else "")

    # Statements

    def statement(self, node: AstNode, depth: int) -> str:
        pad = INDENT * depth
        kind = node.kind
        if kind is NodeKind.VAR_DECL:
            if node.children:
                return f"{pad}let {node.value} = {self.expression(node.children[0], _ASSIGN, depth)};"
            return f"{pad}let {node.value};"
        if kind is NodeKind.SIGNAL_DECL:
            return f"{pad}signal {node.value} = {self.expression(node.children[0], _ASSIGN, depth)};"
        if kind is NodeKind.ALWAYS_STMT:
            return f"{pad}always: {self.expression(node.children[0], _ASSIGN, depth)};"
        if kind is NodeKind.LABEL:
            return f"{pad}{node.value}: {self.statement(node.children[0], depth).lstrip()}"
        if kind is NodeKind.COMMENT:
            return f"{pad}{node.value}"
        if kind is NodeKind.BLOCK:
            return pad + self.block(node, depth)
        if kind is NodeKind.RETURN:
            if node.children:
                return f"{pad}return {self.expression(node.children[0], _ASSIGN, depth)};"
            return f"{pad}return;"
        if kind is NodeKind.IF:
            return pad + self._if(node, depth)
        if kind is NodeKind.WHILE:
            cond = self.expression(node.children[0], _ASSIGN, depth)
            return f"{pad}while ({cond}) {self._body(node.children[1], depth)}"
        if kind is NodeKind.FOR_OF:
            iterable = self.expression(node.children[0], _ASSIGN, depth)
            return f"{pad}for (let {node.value} of {iterable}) {self._body(node.children[1], depth)}"
        if kind is NodeKind.CLASS_DECL:
            return pad + self._class(node, depth)
        if node.is_function_declaration:
            return pad + self._function(node, depth)
        return f"{pad}{self._expression_statement(node, depth)};"

    def _expression_statement(self, node: AstNode, depth: int) -> str:
        text = self.expression(node, _ASSIGN, depth)
        first = _leftmost(node)
        ambiguous = first.kind is NodeKind.OBJECT_LIT or (
            first.kind is NodeKind.FUNCTION_LIT and not first.arrow and first.value
        ) or (first.kind is NodeKind.LITERAL and isinstance(first.value, str))
        return f"({text})" if ambiguous else text

    def _body(self, node: AstNode, depth: int, dangling: bool = False) -> str:
        if node.kind is NodeKind.BLOCK:
            return self.block(node, depth)
        if dangling and node.kind is NodeKind.IF and len(node.children) == 2:
            # an else-less inner if would capture the outer else
            return "{\n" + self.statement(node, depth + 1) + "\n" + INDENT * depth + "}"
        return self.statement(node, depth).lstrip()

    def _if(self, node: AstNode, depth: int) -> str:
        cond = self.expression(node.children[0], _ASSIGN, depth)
        text = f"if ({cond}) {self._body(node.children[1], depth, dangling=len(node.children) > 2)}"
        if len(node.children) > 2:
            otherwise = node.children[2]
            if otherwise.kind is NodeKind.IF:
                text += " else " + self._if(otherwise, depth)
            else:
                text += " else " + self._body(otherwise, depth)
        return text

    def block(self, node: AstNode, depth: int) -> str:
        if not node.children:
            return "{}"
        inner = [self.statement(child, depth + 1) for child in node.children]
        return "{\n" + "\n".join(inner) + "\n" + INDENT * depth + "}"

    def _class(self, node: AstNode, depth: int) -> str:
        if not node.children:
            return f"class {node.value} {{}}"
        pad = INDENT * (depth + 1)
        methods = [f"{pad}{self._method(method, depth + 1)}" for method in node.children]
        return f"class {node.value} {{\n" + "\n".join(methods) + "\n" + INDENT * depth + "}"

    def _method(self, node: AstNode, depth: int) -> str:
        return f"{node.value}({', '.join(node.params or [])}) {self.block(node.children[0], depth)}"

    def _function(self, node: AstNode, depth: int) -> str:
        params = ", ".join(node.params or [])
        body = node.children[0]
        if node.arrow:
            head = f"({params}) =>"
            if body.kind is NodeKind.BLOCK:
                return f"{head} {self.block(body, depth)}"
            text = self.expression(body, _ASSIGN, depth)
            if _leftmost(body).kind is NodeKind.OBJECT_LIT:
                text = f"({text})"
            return f"{head} {text}"
        name = f" {node.value}" if node.value else ""
        return f"function{name}({params}) {self.block(body, depth)}"

    # Expressions

    def expression(self, node: AstNode, minimum: int, depth: int) -> str:
        text = self._expression(node, depth)
        if _precedence(node) < minimum:
            return f"({text})"
        return text

    def _expression(self, node: AstNode, depth: int) -> str:
        kind = node.kind
        children = node.children
        if kind is NodeKind.LITERAL:
            return format_literal(node.value)
        if kind is NodeKind.IDENT:
            return node.value
        if kind is NodeKind.BINARY:
            level = _BINARY_PRECEDENCE[node.value]
            left = self.expression(children[0], level, depth)
            right = self.expression(children[1], level + 1, depth)
            return f"{left} {node.value} {right}"
        if kind is NodeKind.UNARY:
            operand = children[0]
            text = self.expression(operand, _UNARY, depth)
            if node.value == "-" and text.startswith("-"):
                text = f"({text})"
            return f"{node.value}{text}"
        if kind is NodeKind.CONDITIONAL:
            cond = self.expression(children[0], _CONDITIONAL + 1, depth)
            then = self.expression(children[1], _ASSIGN, depth)
            otherwise = self.expression(children[2], _ASSIGN, depth)
            return f"{cond} ? {then} : {otherwise}"
        if kind is NodeKind.ASSIGN:
            target = self.expression(children[0], _CALL, depth)
            return f"{target} {node.value} {self.expression(children[1], _ASSIGN, depth)}"
        if kind is NodeKind.UPDATE:
            return f"{self.expression(children[0], _CALL, depth)}{node.value}"
        if kind is NodeKind.MEMBER:
            return f"{self._object_side(children[0], depth)}.{node.value}"
        if kind is NodeKind.INDEX:
            key = self.expression(children[1], _ASSIGN, depth)
            return f"{self._object_side(children[0], depth)}[{key}]"
        if kind is NodeKind.CALL:
            return f"{self._object_side(children[0], depth)}({self._arguments(children[1:], depth)})"
        if kind is NodeKind.NEW:
            callee = children[0]
            callee_text = self._expression(callee, depth)
            if any(n.kind is not NodeKind.MEMBER and n.kind is not NodeKind.IDENT for n in _callee_chain(callee)):
                callee_text = f"({callee_text})"
            return f"new {callee_text}({self._arguments(children[1:], depth)})"
        if kind is NodeKind.FUNCTION_LIT:
            return self._function(node, depth)
        if kind is NodeKind.ARRAY_LIT:
            return f"[{self._arguments(children, depth)}]"
        if kind is NodeKind.OBJECT_LIT:
            return self._object(node, depth)
        raise ValueError(f"{kind.value} is not an expression")

    def _object_side(self, node: AstNode, depth: int) -> str:
        text = self.expression(node, _CALL, depth)
        if node.kind is NodeKind.FUNCTION_LIT and not node.arrow:
            return f"({text})"
        return text

    def _arguments(self, nodes: List[AstNode], depth: int) -> str:
        return ", ".join(self.expression(arg, _ASSIGN, depth) for arg in nodes)

    def _object(self, node: AstNode, depth: int) -> str:
        if not node.children:
            return "{}"
        entries = []
        for key, value in zip(node.value, node.children):
            if value.kind is NodeKind.FUNCTION_LIT and not value.arrow and value.value == key:
                entries.append(self._method(value, depth))
            else:
                entries.append(f"{_property_name(key)}: {self.expression(value, _ASSIGN, depth)}")
        return "{" + ", ".join(entries) + "}"


def _callee_chain(node: AstNode) -> List[AstNode]:
    chain = [node]
    while node.kind is NodeKind.MEMBER:
        node = node.children[0]
        chain.append(node)
    return chain


def print_program(program: AstNode) -> str:
    """Render a Program (or any statement) as parseable RXL source."""
    printer = Printer()
    if program.kind is NodeKind.PROGRAM:
        return printer.program(program)
    if program.kind in (NodeKind.VAR_DECL, NodeKind.BLOCK) or not program.is_expression_statement:
        return printer.statement(program, 0)
    return printer.expression(program, _ASSIGN, 0)
