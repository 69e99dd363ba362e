"""Tokenizer for RXL source text."""
import re
from dataclasses import dataclass
from enum import Enum
from typing import List, Tuple

from rxl.exceptions import RxlSyntaxError


class TokenKind(str, Enum):
    NUMBER = "number"
    STRING = "string"
    NAME = "name"
    KEYWORD = "keyword"
    PUNCT = "punct"
    EOF = "eof"


KEYWORDS = frozenset({
    "let", "signal", "function", "class", "return", "if", "else", "while",
    "for", "of", "new", "this", "true", "false", "null",
})

# Longest operators first so the alternation is greedy
PUNCTUATION = [
    "===", "!==", "=>", "==", "!=", "<=", ">=", "&&", "||", "++", "--",
    "+=", "-=", "*=", "/=", "%=",
    "(", ")", "{", "}", "[", "]", ",", ";", ".", ":", "?",
    "<", ">", "+", "-", "*", "/", "%", "!", "=",
]

_TOKEN_PATTERN = re.compile(
    r"""
    (?P<newline>\n)
    |(?P<space>[ \t\r\f\v]+)
    |(?P<line_comment>//[^\n]*)
    |(?P<block_comment>/\*.*?\*/)
    |(?P<number>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
    |(?P<string>"(?:[^"\\\n]|\\.)*"|'(?:[^'\\\n]|\\.)*')
    |(?P<name>[A-Za-z_$][A-Za-z0-9_$]*)
    |(?P<punct>"""
    + "|".join(re.escape(p) for p in PUNCTUATION)
    + r""")
    """,
    re.VERBOSE | re.DOTALL,
)

_ESCAPES = {
    "n": "\n", "t": "\t", "r": "\r", "b": "\b", "f": "\f", "v": "\v", "0": "\0",
    "\\": "\\", "'": "'", '"': '"', "/": "/",
}


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    value: object
    line: int
    column: int
    start: int
    end: int

    def is_punct(self, text: str) -> bool:
        return self.kind is TokenKind.PUNCT and self.text == text

    def is_keyword(self, text: str) -> bool:
        return self.kind is TokenKind.KEYWORD and self.text == text


@dataclass(frozen=True)
class Comment:
    text: str
    line: int
    column: int
    start: int
    end: int


def _unescape(body: str, line: int, column: int) -> str:
    out = []
    chars = iter(body)
    for ch in chars:
        if ch != "\\":
            out.append(ch)
            continue
        nxt = next(chars, None)
        if nxt == "u":
            digits = "".join(next(chars, "") for _ in range(4))
            if len(digits) != 4 or any(c not in "0123456789abcdefABCDEF" for c in digits):
                raise RxlSyntaxError(f"invalid escape sequence \\u{digits}", line, column)
            out.append(chr(int(digits, 16)))
            continue
        if nxt is None or nxt not in _ESCAPES:
            raise RxlSyntaxError(f"invalid escape sequence \\{nxt or ''}", line, column)
        out.append(_ESCAPES[nxt])
    return "".join(out)


def tokenize(source: str) -> Tuple[List[Token], List[Comment]]:
    """
    Split source text into tokens.

    Comments are returned separately so the parser can keep the ones that sit
    between statements.

    Args:
        source: RXL program text

    Returns:
        (tokens ending with an EOF token, comments in source order)

    Raises:
        RxlSyntaxError: On characters that start no token or unterminated literals
    """
    tokens: List[Token] = []
    comments: List[Comment] = []
    line = 1
    line_start = 0
    pos = 0
    length = len(source)

    while pos < length:
        match = _TOKEN_PATTERN.match(source, pos)
        column = pos - line_start + 1
        if match is None:
            ch = source[pos]
            if ch in "\"'":
                raise RxlSyntaxError("unterminated string literal", line, column)
            raise RxlSyntaxError(f"unexpected character {ch!r}", line, column)

        group = match.lastgroup
        text = match.group()
        end = match.end()

        if group == "newline":
            line += 1
            line_start = end
        elif group in ("line_comment", "block_comment"):
            comments.append(Comment(text, line, column, pos, end))
            newlines = text.count("\n")
            if newlines:
                line += newlines
                line_start = pos + text.rfind("\n") + 1
        elif group == "number":
            tokens.append(Token(TokenKind.NUMBER, text, float(text), line, column, pos, end))
        elif group == "string":
            value = _unescape(text[1:-1], line, column)
            tokens.append(Token(TokenKind.STRING, text, value, line, column, pos, end))
        elif group == "name":
            kind = TokenKind.KEYWORD if text in KEYWORDS else TokenKind.NAME
            tokens.append(Token(kind, text, text, line, column, pos, end))
        elif group == "punct":
            tokens.append(Token(TokenKind.PUNCT, text, text, line, column, pos, end))
        pos = end

    tokens.append(Token(TokenKind.EOF, "", None, line, pos - line_start + 1, pos, pos))
    return tokens, comments
