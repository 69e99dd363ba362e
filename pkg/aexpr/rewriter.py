"""
Source-to-source instrumentation for the compilation strategy.

The rewriter replaces every variable and member access of a program with a
call to a hook native:

    x               ->  __rx_get_local(__rx_scope_1, "x", x)
    x = v           ->  __rx_set_local(__rx_scope_1, "x", x = v)
    g               ->  __rx_get_global("g", g)
    o.k             ->  __rx_get_member(o, "k")
    o.k = v         ->  __rx_set_member(o, "k", v)
    o.k += v        ->  __rx_set_member(o, "k", v, "+=")
    o.k++           ->  __rx_set_member(o, "k", null, "++")
    o.k(a)          ->  __rx_call_member(o, "k", a)

Every lexical frame that declares a name starts with
``let __rx_scope_N = __rx_scope();`` so local hooks can name the scope that
owns the variable. ``for-of`` loops become indexed ``while`` loops so their
element reads go through ``__rx_get_member`` too. The output carries the
``"use aexpr-hooks"`` directive and is rejected if rewritten again.
"""
import copy
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Set

from rxl.exceptions import RewriteError
from rxl.nodes import AstNode, NodeKind, make_node, renumber
from rxl.parser import HOOK_DIRECTIVE, RESERVED_PREFIX

logger = logging.getLogger(__name__)

HOOK_NAMES = frozenset({
    "get_member", "set_member", "call_member",
    "get_local", "set_local", "get_global", "set_global",
})


def hook_name(name: str) -> str:
    return f"{RESERVED_PREFIX}{name}"


SCOPE_HOOK = hook_name("scope")


@dataclass
class _Frame:
    names: Set[str] = field(default_factory=set)
    scope_var: Optional[str] = None


def _declared_names(statements: List[AstNode]) -> List[str]:
    """Names a statement list binds in its own scope, in source order."""
    names: List[str] = []
    pending = list(statements)
    while pending:
        statement = pending.pop(0)
        kind = statement.kind
        if kind in (NodeKind.VAR_DECL, NodeKind.SIGNAL_DECL, NodeKind.CLASS_DECL):
            names.append(statement.value)
        elif statement.is_function_declaration:
            names.append(statement.value)
        elif kind is NodeKind.LABEL:
            pending.insert(0, statement.children[0])
        elif kind is NodeKind.IF or kind is NodeKind.WHILE:
            # non-block bodies run in the enclosing scope
            bodies = [child for child in statement.children[1:] if child.kind is not NodeKind.BLOCK]
            pending[0:0] = bodies
    return names


class Rewriter:
    """Rewrites one program unit. Instances are single-use."""

    def __init__(self):
        self._frames: List[_Frame] = []
        self._scope_count = 0
        self._loop_count = 0

    def rewrite(self, program: AstNode) -> AstNode:
        if program.kind is not NodeKind.PROGRAM:
            raise RewriteError(f"expected a Program node, got {program.kind.value}")
        directives = list(program.value or [])
        if HOOK_DIRECTIVE in directives:
            raise RewriteError("program is already instrumented", details={"directive": HOOK_DIRECTIVE})
        result = copy.deepcopy(program)
        result.value = [HOOK_DIRECTIVE] + directives
        result.children = self._frame(result.children)
        return renumber(result)

    # Frames

    def _frame(self, statements: List[AstNode], params: List[str] = ()) -> List[AstNode]:
        names = list(params) + _declared_names(statements)
        frame = _Frame(set(names))
        prologue = []
        if any(not name.startswith(RESERVED_PREFIX) for name in names):
            self._scope_count += 1
            frame.scope_var = f"{RESERVED_PREFIX}scope_{self._scope_count}"
            anchor = statements[0] if statements else None
            call = make_node(NodeKind.CALL, [make_node(NodeKind.IDENT, value=SCOPE_HOOK, like=anchor)], like=anchor)
            prologue.append(make_node(NodeKind.VAR_DECL, [call], frame.scope_var, like=anchor))
        self._frames.append(frame)
        try:
            body = [self._statement(statement) for statement in statements]
        finally:
            self._frames.pop()
        return prologue + body

    def _owner(self, name: str) -> Optional[_Frame]:
        for frame in reversed(self._frames):
            if name in frame.names:
                return frame
        return None

    # Statements

    def _statement(self, node: AstNode) -> AstNode:
        kind = node.kind
        children = node.children
        if kind in (NodeKind.VAR_DECL, NodeKind.SIGNAL_DECL, NodeKind.RETURN):
            node.children = [self._expression(child) for child in children]
            return node
        if kind is NodeKind.ALWAYS_STMT or kind is NodeKind.COMMENT:
            # constraints lift the raw expression themselves
            return node
        if kind is NodeKind.CLASS_DECL:
            node.children = [self._function(method) for method in children]
            return node
        if node.is_function_declaration:
            return self._function(node)
        if kind is NodeKind.IF or kind is NodeKind.WHILE:
            node.children = [self._expression(children[0])] + [self._body(child) for child in children[1:]]
            return node
        if kind is NodeKind.FOR_OF:
            return self._for_of(node)
        if kind is NodeKind.BLOCK:
            node.children = self._frame(children)
            return node
        if kind is NodeKind.LABEL:
            node.children = [self._statement(children[0])]
            return node
        return self._expression(node)

    def _body(self, node: AstNode) -> AstNode:
        if node.kind is NodeKind.BLOCK:
            node.children = self._frame(node.children)
            return node
        return self._statement(node)

    def _for_of(self, node: AstNode) -> AstNode:
        """
        for (let v of E) S  ->
            { let it = E; let i = 0;
              while (i < get_member(it, "length")) { let v = get_member(it, i); S; i++; } }
        """
        self._loop_count += 1
        iterator = f"{RESERVED_PREFIX}iter_{self._loop_count}"
        index = f"{RESERVED_PREFIX}index_{self._loop_count}"
        iterable, body = node.children
        source = self._expression(iterable)

        def ident(name: str) -> AstNode:
            return make_node(NodeKind.IDENT, value=name, like=node)

        def literal(value) -> AstNode:
            return make_node(NodeKind.LITERAL, value=value, like=node)

        item = make_node(NodeKind.VAR_DECL, [self._hook("get_member", [ident(iterator), ident(index)], node)],
                         node.value, like=node)
        step = make_node(NodeKind.UPDATE, [ident(index)], "++", like=node)
        statements = body.children if body.kind is NodeKind.BLOCK else [body]
        loop_body = make_node(NodeKind.BLOCK, self._frame([item] + list(statements) + [step]), like=body)
        condition = make_node(NodeKind.BINARY, [
            ident(index), self._hook("get_member", [ident(iterator), literal("length")], node),
        ], "<", like=node)
        setup = [
            make_node(NodeKind.VAR_DECL, [source], iterator, like=node),
            make_node(NodeKind.VAR_DECL, [literal(0.0)], index, like=node),
        ]
        loop = make_node(NodeKind.WHILE, [condition, loop_body], like=node)
        return make_node(NodeKind.BLOCK, setup + [loop], like=node)

    def _function(self, node: AstNode) -> AstNode:
        params = list(node.params or [])
        body = node.children[0]
        if body.kind is NodeKind.BLOCK:
            body.children = self._frame(body.children, params)
            return node
        if any(not name.startswith(RESERVED_PREFIX) for name in params):
            # concise arrow with parameters: the parameters need a scope variable
            ret = make_node(NodeKind.RETURN, [body], like=body)
            node.children = [make_node(NodeKind.BLOCK, self._frame([ret], params), like=body)]
            return node
        self._frames.append(_Frame(set(params)))
        try:
            node.children = [self._expression(body)]
        finally:
            self._frames.pop()
        return node

    # Expressions

    def _hook(self, name: str, args: List[AstNode], like: AstNode) -> AstNode:
        callee = make_node(NodeKind.IDENT, value=hook_name(name), like=like)
        return make_node(NodeKind.CALL, [callee] + args, like=like)

    def _name_literal(self, name: str, like: AstNode) -> AstNode:
        return make_node(NodeKind.LITERAL, value=name, like=like)

    def _variable_hook(self, action: str, name: str, value: AstNode, like: AstNode) -> AstNode:
        owner = self._owner(name)
        if owner is not None and owner.scope_var is not None:
            scope = make_node(NodeKind.IDENT, value=owner.scope_var, like=like)
            return self._hook(f"{action}_local", [scope, self._name_literal(name, like), value], like)
        return self._hook(f"{action}_global", [self._name_literal(name, like), value], like)

    def _member_key(self, target: AstNode) -> AstNode:
        if target.kind is NodeKind.MEMBER:
            return self._name_literal(target.value, target)
        return self._expression(target.children[1])

    def _expression(self, node: AstNode) -> AstNode:
        kind = node.kind
        children = node.children
        if kind is NodeKind.LITERAL:
            return node
        if kind is NodeKind.IDENT:
            name = node.value
            if name == "this" or name.startswith(RESERVED_PREFIX):
                return node
            return self._variable_hook("get", name, node, node)
        if kind is NodeKind.ASSIGN:
            return self._assign(node)
        if kind is NodeKind.UPDATE:
            return self._update(node)
        if kind is NodeKind.MEMBER or kind is NodeKind.INDEX:
            return self._hook("get_member", [self._expression(children[0]), self._member_key(node)], node)
        if kind is NodeKind.CALL:
            callee = children[0]
            args = [self._expression(arg) for arg in children[1:]]
            if callee.kind is NodeKind.MEMBER or callee.kind is NodeKind.INDEX:
                receiver = self._expression(callee.children[0])
                return self._hook("call_member", [receiver, self._member_key(callee)] + args, node)
            node.children = [self._expression(callee)] + args
            return node
        if kind is NodeKind.FUNCTION_LIT:
            return self._function(node)
        if kind in (NodeKind.BINARY, NodeKind.UNARY, NodeKind.CONDITIONAL, NodeKind.NEW,
                    NodeKind.ARRAY_LIT, NodeKind.OBJECT_LIT):
            node.children = [self._expression(child) for child in children]
            return node
        raise RewriteError(f"unsupported node {kind.value} in expression position",
                           details={"line": node.line, "column": node.column})

    def _assign(self, node: AstNode) -> AstNode:
        target, rhs = node.children
        op = node.value
        if target.kind is NodeKind.IDENT:
            name = target.value
            if name.startswith(RESERVED_PREFIX):
                node.children = [target, self._expression(rhs)]
                return node
            value = self._expression(rhs)
            if op != "=":
                # x op= v  ->  x = get(x) op v, one write and one notification
                current = self._variable_hook("get", name, copy.copy(target), target)
                value = make_node(NodeKind.BINARY, [current, value], op[0], like=node)
            inner = make_node(NodeKind.ASSIGN, [target, value], "=", like=node)
            return self._variable_hook("set", name, inner, node)
        obj = self._expression(target.children[0])
        key = self._member_key(target)
        args = [obj, key, self._expression(rhs)]
        if op != "=":
            args.append(self._name_literal(op, node))
        return self._hook("set_member", args, node)

    def _update(self, node: AstNode) -> AstNode:
        target = node.children[0]
        if target.kind is NodeKind.IDENT:
            if target.value.startswith(RESERVED_PREFIX):
                return node
            return self._variable_hook("set", target.value, node, node)
        obj = self._expression(target.children[0])
        key = self._member_key(target)
        nil = make_node(NodeKind.LITERAL, value=None, like=node)
        return self._hook("set_member", [obj, key, nil, self._name_literal(node.value, node)], node)


def rewrite(program: AstNode) -> AstNode:
    """
    Instrument a parsed program with access hooks.

    The input tree is left untouched.

    Raises:
        RewriteError: If the program already carries the hook directive
    """
    result = Rewriter().rewrite(program)
    logger.debug(f"Rewrote program into {len(result.children)} top-level statements")
    return result
