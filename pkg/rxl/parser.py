"""Recursive-descent parser producing RXL syntax trees."""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

from rxl.exceptions import RxlSyntaxError
from rxl.lexer import Token, TokenKind, tokenize
from rxl.nodes import AstNode, NodeKind, make_node, renumber

logger = logging.getLogger(__name__)

HOOK_DIRECTIVE = "use aexpr-hooks"
RESERVED_PREFIX = "__rx_"

ASSIGNMENT_OPERATORS = frozenset({"=", "+=", "-=", "*=", "/=", "%="})
EQUALITY_OPERATORS = {"==": "==", "===": "==", "!=": "!=", "!==": "!="}
COMPARISON_OPERATORS = {"<": "<", "<=": "<=", ">": ">", ">=": ">="}
ADDITIVE_OPERATORS = {"+": "+", "-": "-"}
MULTIPLICATIVE_OPERATORS = {"*": "*", "/": "/", "%": "%"}


@dataclass
class _Frame:
    """Names declared so far in one lexical scope."""
    names: List[str] = field(default_factory=list)
    binds_this: bool = False


class Parser:
    """
    Parser for RXL programs.

    Args:
        source: Program text
        capture_locals: Append an explicit scope record to every ``aexpr(fn)``
            call (needed by the interpretation strategy)
    """

    def __init__(self, source: str, capture_locals: bool = False):
        self._source = source
        self._tokens, self._comments = tokenize(source)
        self._pos = 0
        self._comment_pos = 0
        self._capture_locals = capture_locals
        self._allow_reserved = False
        self._frames: List[_Frame] = []

    # Entry points

    def parse_program(self) -> AstNode:
        first = self._peek()
        directives = self._directives()
        self._allow_reserved = HOOK_DIRECTIVE in directives
        self._frames.append(_Frame())
        statements = self._statement_list(None)
        self._frames.pop()
        program = make_node(NodeKind.PROGRAM, statements, tuple(directives))
        program.line, program.column, program.end = first.line, first.column, len(self._source)
        return renumber(program)

    def parse_single_expression(self) -> AstNode:
        self._frames.append(_Frame())
        expr = self._expression()
        self._frames.pop()
        self._expect_kind(TokenKind.EOF, "end of input")
        return renumber(expr)

    # Token helpers

    def _peek(self, offset: int = 0) -> Token:
        index = min(self._pos + offset, len(self._tokens) - 1)
        return self._tokens[index]

    def _previous(self) -> Token:
        return self._tokens[self._pos - 1]

    def _advance(self) -> Token:
        token = self._tokens[self._pos]
        if token.kind is not TokenKind.EOF:
            self._pos += 1
        return token

    def _error(self, message: str, token: Optional[Token] = None) -> RxlSyntaxError:
        token = token or self._peek()
        found = token.text or "end of input"
        return RxlSyntaxError(f"{message}, found {found!r}", token.line, token.column)

    def _check(self, text: str) -> bool:
        return self._peek().is_punct(text)

    def _match(self, text: str) -> bool:
        if self._check(text):
            self._advance()
            return True
        return False

    def _expect(self, text: str) -> Token:
        if not self._check(text):
            raise self._error(f"expected {text!r}")
        return self._advance()

    def _expect_kind(self, kind: TokenKind, description: str) -> Token:
        if self._peek().kind is not kind:
            raise self._error(f"expected {description}")
        return self._advance()

    def _expect_name(self, description: str = "identifier") -> str:
        return self._expect_kind(TokenKind.NAME, description).text

    def _end_statement(self) -> None:
        token = self._peek()
        if token.is_punct(";"):
            self._advance()
            return
        if token.is_punct("}") or token.kind is TokenKind.EOF:
            return
        if self._pos and token.line > self._previous().line:
            return
        raise self._error("expected ';'")

    def _node(self, kind: NodeKind, start: Token, children=None, value=None, **extra) -> AstNode:
        node = make_node(kind, children, value, **extra)
        node.line, node.column, node.start = start.line, start.column, start.start
        node.end = self._previous().end if self._pos else start.end
        return node

    # Lexical bookkeeping

    def _declare(self, name: str, token: Token) -> None:
        if name.startswith(RESERVED_PREFIX) and not self._allow_reserved:
            raise RxlSyntaxError(f"identifier {name!r} is reserved", token.line, token.column)
        self._frames[-1].names.append(name)

    def _visible_locals(self) -> List[str]:
        names: Dict[str, None] = {}
        for frame in self._frames:
            for name in frame.names:
                if not name.startswith(RESERVED_PREFIX):
                    names.pop(name, None)
                    names[name] = None
        if any(frame.binds_this for frame in self._frames):
            names["this"] = None
        return list(names)

    # Comments and directives

    def _pending_comments(self, before: int) -> List[AstNode]:
        nodes = []
        while self._comment_pos < len(self._comments) and self._comments[self._comment_pos].start < before:
            comment = self._comments[self._comment_pos]
            node = make_node(NodeKind.COMMENT, value=comment.text)
            node.line, node.column, node.start, node.end = comment.line, comment.column, comment.start, comment.end
            nodes.append(node)
            self._comment_pos += 1
        return nodes

    def _directives(self) -> List[str]:
        directives = []
        while self._peek().kind is TokenKind.STRING and (
            self._peek(1).is_punct(";") or self._peek(1).kind is TokenKind.EOF
        ):
            directives.append(self._advance().value)
            self._match(";")
        return directives

    # Statements

    def _statement_list(self, terminator: Optional[str]) -> List[AstNode]:
        statements: List[AstNode] = []
        while True:
            statements.extend(self._pending_comments(self._peek().start))
            token = self._peek()
            if token.kind is TokenKind.EOF:
                if terminator is not None:
                    raise self._error(f"expected {terminator!r}")
                break
            if terminator is not None and token.is_punct(terminator):
                break
            if token.is_punct(";"):
                self._advance()
                continue
            statements.append(self._statement())
        return statements

    def _statement(self) -> AstNode:
        token = self._peek()
        if token.kind is TokenKind.KEYWORD:
            handler = {
                "let": self._var_decl,
                "signal": self._signal_decl,
                "class": self._class_decl,
                "return": self._return,
                "if": self._if,
                "while": self._while,
                "for": self._for_of,
            }.get(token.text)
            if handler is not None:
                return handler()
            if token.text == "function" and self._peek(1).kind is TokenKind.NAME:
                return self._function_declaration()
        if token.is_punct("{"):
            return self._block()
        if token.kind is TokenKind.NAME and self._peek(1).is_punct(":"):
            if token.text == "always":
                return self._always()
            return self._label()
        expr = self._expression()
        self._end_statement()
        return expr

    def _var_decl(self) -> AstNode:
        start = self._advance()
        name_token = self._peek()
        name = self._expect_name("variable name")
        children = []
        if self._match("="):
            children.append(self._expression())
        self._declare(name, name_token)
        self._end_statement()
        return self._node(NodeKind.VAR_DECL, start, children, name)

    def _signal_decl(self) -> AstNode:
        start = self._advance()
        name_token = self._peek()
        name = self._expect_name("signal name")
        self._expect("=")
        expr = self._expression()
        self._declare(name, name_token)
        self._end_statement()
        return self._node(NodeKind.SIGNAL_DECL, start, [expr], name)

    def _always(self) -> AstNode:
        start = self._advance()
        self._expect(":")
        expr = self._expression()
        self._end_statement()
        return self._node(NodeKind.ALWAYS_STMT, start, [expr])

    def _label(self) -> AstNode:
        start = self._advance()
        self._expect(":")
        body = self._statement()
        return self._node(NodeKind.LABEL, start, [body], start.text)

    def _function_declaration(self) -> AstNode:
        start = self._peek()
        name_token = self._peek(1)
        self._declare(name_token.text, name_token)
        node = self._function(start)
        node.declaration = True
        return node

    def _class_decl(self) -> AstNode:
        start = self._advance()
        name_token = self._peek()
        name = self._expect_name("class name")
        self._declare(name, name_token)
        self._expect("{")
        methods = []
        while not self._check("}"):
            if self._match(";"):
                continue
            method_start = self._peek()
            if method_start.kind not in (TokenKind.NAME, TokenKind.KEYWORD):
                raise self._error("expected method name")
            self._advance()
            methods.append(self._function_rest(method_start, method_start.text, arrow=False))
        self._expect("}")
        return self._node(NodeKind.CLASS_DECL, start, methods, name)

    def _return(self) -> AstNode:
        start = self._advance()
        children = []
        token = self._peek()
        if not (token.is_punct(";") or token.is_punct("}") or token.kind is TokenKind.EOF
                or token.line > start.line):
            children.append(self._expression())
        self._end_statement()
        return self._node(NodeKind.RETURN, start, children)

    def _if(self) -> AstNode:
        start = self._advance()
        self._expect("(")
        cond = self._expression()
        self._expect(")")
        children = [cond, self._statement()]
        if self._peek().is_keyword("else"):
            self._advance()
            children.append(self._statement())
        return self._node(NodeKind.IF, start, children)

    def _while(self) -> AstNode:
        start = self._advance()
        self._expect("(")
        cond = self._expression()
        self._expect(")")
        body = self._statement()
        return self._node(NodeKind.WHILE, start, [cond, body])

    def _for_of(self) -> AstNode:
        start = self._advance()
        self._expect("(")
        if not self._peek().is_keyword("let"):
            raise self._error("expected 'let'")
        self._advance()
        name_token = self._peek()
        name = self._expect_name("loop variable")
        if not self._peek().is_keyword("of"):
            raise self._error("expected 'of'")
        self._advance()
        iterable = self._expression()
        self._expect(")")
        self._frames.append(_Frame())
        self._declare(name, name_token)
        body = self._statement()
        self._frames.pop()
        return self._node(NodeKind.FOR_OF, start, [iterable, body], name)

    def _block(self) -> AstNode:
        start = self._expect("{")
        self._frames.append(_Frame())
        statements = self._statement_list("}")
        self._frames.pop()
        self._expect("}")
        return self._node(NodeKind.BLOCK, start, statements)

    # Functions

    def _function(self, start: Token) -> AstNode:
        self._advance()  # 'function'
        name = None
        if self._peek().kind is TokenKind.NAME:
            name = self._advance().text
        return self._function_rest(start, name, arrow=False)

    def _parameters(self) -> List[Token]:
        self._expect("(")
        params: List[Token] = []
        if not self._check(")"):
            params.append(self._expect_kind(TokenKind.NAME, "parameter name"))
            while self._match(","):
                params.append(self._expect_kind(TokenKind.NAME, "parameter name"))
        self._expect(")")
        return params

    def _function_rest(self, start: Token, name: Optional[str], arrow: bool) -> AstNode:
        params = self._parameters()
        self._frames.append(_Frame(binds_this=True))
        for param in params:
            self._declare(param.text, param)
        body = self._block()
        self._frames.pop()
        node = self._node(NodeKind.FUNCTION_LIT, start, [body], name,
                          params=[p.text for p in params], arrow=arrow)
        node.source = self._source[node.start:node.end]
        return node

    def _arrow_ahead(self) -> bool:
        token = self._peek()
        if token.kind is TokenKind.NAME:
            return self._peek(1).is_punct("=>")
        if not token.is_punct("("):
            return False
        depth = 0
        offset = 0
        while True:
            current = self._peek(offset)
            if current.kind is TokenKind.EOF:
                return False
            if current.is_punct("("):
                depth += 1
            elif current.is_punct(")"):
                depth -= 1
                if depth == 0:
                    return self._peek(offset + 1).is_punct("=>")
            offset += 1

    def _arrow(self) -> AstNode:
        start = self._peek()
        if start.kind is TokenKind.NAME:
            params = [self._advance()]
        else:
            params = self._parameters()
        self._expect("=>")
        self._frames.append(_Frame())
        for param in params:
            self._declare(param.text, param)
        body = self._block() if self._check("{") else self._assignment()
        self._frames.pop()
        node = self._node(NodeKind.FUNCTION_LIT, start, [body], None,
                          params=[p.text for p in params], arrow=True)
        node.source = self._source[node.start:node.end]
        return node

    # Expressions

    def _expression(self) -> AstNode:
        return self._assignment()

    def _assignment(self) -> AstNode:
        if self._arrow_ahead():
            return self._arrow()
        start = self._peek()
        target = self._conditional()
        token = self._peek()
        if token.kind is TokenKind.PUNCT and token.text in ASSIGNMENT_OPERATORS:
            self._check_target(target, token)
            self._advance()
            value = self._assignment()
            return self._node(NodeKind.ASSIGN, start, [target, value], token.text)
        return target

    def _check_target(self, target: AstNode, token: Token) -> None:
        valid = target.kind in (NodeKind.MEMBER, NodeKind.INDEX) or (
            target.kind is NodeKind.IDENT and target.value != "this"
        )
        if not valid:
            raise RxlSyntaxError(f"invalid target for {token.text!r}", token.line, token.column)

    def _conditional(self) -> AstNode:
        start = self._peek()
        cond = self._or()
        if self._match("?"):
            then = self._assignment()
            self._expect(":")
            otherwise = self._assignment()
            return self._node(NodeKind.CONDITIONAL, start, [cond, then, otherwise])
        return cond

    def _binary_left(self, ops: Dict[str, str], sub_elem: Callable[[], AstNode]) -> AstNode:
        start = self._peek()
        left = sub_elem()
        while True:
            token = self._peek()
            if token.kind is not TokenKind.PUNCT or token.text not in ops:
                return left
            self._advance()
            left = self._node(NodeKind.BINARY, start, [left, sub_elem()], ops[token.text])

    def _or(self) -> AstNode:
        return self._binary_left({"||": "||"}, self._and)

    def _and(self) -> AstNode:
        return self._binary_left({"&&": "&&"}, self._equality)

    def _equality(self) -> AstNode:
        return self._binary_left(EQUALITY_OPERATORS, self._comparison)

    def _comparison(self) -> AstNode:
        return self._binary_left(COMPARISON_OPERATORS, self._additive)

    def _additive(self) -> AstNode:
        return self._binary_left(ADDITIVE_OPERATORS, self._multiplicative)

    def _multiplicative(self) -> AstNode:
        return self._binary_left(MULTIPLICATIVE_OPERATORS, self._unary)

    def _unary(self) -> AstNode:
        token = self._peek()
        if token.is_punct("!") or token.is_punct("-"):
            self._advance()
            operand = self._unary()
            return self._node(NodeKind.UNARY, token, [operand], token.text)
        return self._postfix()

    def _postfix(self) -> AstNode:
        start = self._peek()
        expr = self._call()
        token = self._peek()
        if (token.is_punct("++") or token.is_punct("--")) and token.line == self._previous().line:
            self._check_target(expr, token)
            self._advance()
            return self._node(NodeKind.UPDATE, start, [expr], token.text)
        return expr

    def _arguments(self) -> List[AstNode]:
        self._expect("(")
        args = []
        if not self._check(")"):
            args.append(self._assignment())
            while self._match(","):
                if self._check(")"):
                    break
                args.append(self._assignment())
        self._expect(")")
        return args

    def _member_suffix(self, start: Token, expr: AstNode) -> Optional[AstNode]:
        if self._match("."):
            token = self._peek()
            if token.kind not in (TokenKind.NAME, TokenKind.KEYWORD):
                raise self._error("expected property name")
            self._advance()
            return self._node(NodeKind.MEMBER, start, [expr], token.text)
        if self._match("["):
            key = self._expression()
            self._expect("]")
            return self._node(NodeKind.INDEX, start, [expr, key])
        return None

    def _call(self) -> AstNode:
        start = self._peek()
        if start.is_keyword("new"):
            self._advance()
            callee = self._primary()
            while (suffix := self._member_suffix(start, callee)) is not None:
                callee = suffix
            args = self._arguments() if self._check("(") else []
            expr = self._node(NodeKind.NEW, start, [callee, *args])
        else:
            expr = self._primary()
        while True:
            suffix = self._member_suffix(start, expr)
            if suffix is not None:
                expr = suffix
                continue
            if self._check("("):
                args = self._arguments()
                expr = self._node(NodeKind.CALL, start, [expr, *args])
                self._capture_scope(expr)
                continue
            return expr

    def _capture_scope(self, call: AstNode) -> None:
        callee = call.children[0]
        if not (self._capture_locals and callee.kind is NodeKind.IDENT
                and callee.value == "aexpr" and len(call.children) == 2):
            return
        names = self._visible_locals()
        values = [make_node(NodeKind.IDENT, value=name, like=call) for name in names]
        call.children.append(make_node(NodeKind.OBJECT_LIT, values, names, like=call))

    def _primary(self) -> AstNode:
        token = self._peek()
        if token.kind in (TokenKind.NUMBER, TokenKind.STRING):
            self._advance()
            return self._node(NodeKind.LITERAL, token, value=token.value)
        if token.kind is TokenKind.KEYWORD:
            if token.text in ("true", "false", "null"):
                self._advance()
                value = {"true": True, "false": False, "null": None}[token.text]
                return self._node(NodeKind.LITERAL, token, value=value)
            if token.text == "this":
                self._advance()
                return self._node(NodeKind.IDENT, token, value="this")
            if token.text == "function":
                return self._function(token)
            raise self._error("unexpected keyword")
        if token.kind is TokenKind.NAME:
            self._advance()
            return self._node(NodeKind.IDENT, token, value=token.text)
        if token.is_punct("("):
            self._advance()
            expr = self._expression()
            self._expect(")")
            return expr
        if token.is_punct("["):
            return self._array_literal()
        if token.is_punct("{"):
            return self._object_literal()
        raise self._error("expected expression")

    def _array_literal(self) -> AstNode:
        start = self._expect("[")
        elements = []
        while not self._check("]"):
            elements.append(self._assignment())
            if not self._match(","):
                break
        self._expect("]")
        return self._node(NodeKind.ARRAY_LIT, start, elements)

    def _object_literal(self) -> AstNode:
        start = self._expect("{")
        keys: List[str] = []
        values: List[AstNode] = []
        while not self._check("}"):
            key_token = self._peek()
            if key_token.kind in (TokenKind.NAME, TokenKind.KEYWORD):
                key = key_token.text
            elif key_token.kind is TokenKind.STRING:
                key = key_token.value
            elif key_token.kind is TokenKind.NUMBER:
                key = _number_key(key_token.value)
            else:
                raise self._error("expected property name")
            self._advance()
            if self._match(":"):
                value = self._assignment()
            elif self._check("("):
                value = self._function_rest(key_token, key, arrow=False)
            elif key_token.kind is TokenKind.NAME:
                value = self._node(NodeKind.IDENT, key_token, value=key)
            else:
                raise self._error("expected ':'")
            keys.append(key)
            values.append(value)
            if not self._match(","):
                break
        self._expect("}")
        return self._node(NodeKind.OBJECT_LIT, start, values, keys)


def _number_key(value: float) -> str:
    return str(int(value)) if value.is_integer() else repr(value)


def parse(source: str, capture_locals: bool = False) -> AstNode:
    """
    Parse a whole program.

    Args:
        source: RXL program text
        capture_locals: Expand ``aexpr(fn)`` call sites with an explicit scope record

    Returns:
        Program node

    Raises:
        RxlSyntaxError: With the line and column of the offending token
    """
    return Parser(source, capture_locals=capture_locals).parse_program()


def parse_expression(source: str) -> AstNode:
    """Parse a single expression, e.g. the source text of a function literal."""
    return Parser(source).parse_single_expression()
