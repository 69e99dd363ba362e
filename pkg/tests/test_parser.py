"""Tests for the RXL lexer, parser and printer."""
import pytest

from rxl.exceptions import RxlSyntaxError
from rxl.lexer import TokenKind, tokenize
from rxl.nodes import NodeKind, count_ast_nodes, dump_ast, walk
from rxl.parser import parse, parse_expression
from rxl.printer import print_program
from tests.conftest import CORPUS_DIR

CORPUS = sorted(CORPUS_DIR.glob("*.rxl"))


class TestLexer:
    """Tokenizer behaviour."""

    def test_longest_operator_wins(self):
        tokens, _ = tokenize("a !== b === c => d")
        punct = [t.text for t in tokens if t.kind is TokenKind.PUNCT]
        assert punct == ["!==", "===", "=>"]

    def test_comments_are_split_off(self):
        tokens, comments = tokenize("x = 1; // trailing\n/* block\ncomment */ y")
        assert [c.text for c in comments] == ["// trailing", "/* block\ncomment */"]
        assert tokens[-1].kind is TokenKind.EOF
        y = tokens[-2]
        assert (y.text, y.line) == ("y", 3)

    def test_string_escapes(self):
        tokens, _ = tokenize(r'"a\nbA"')
        assert tokens[0].value == "a\nbA"

    def test_unterminated_string(self):
        with pytest.raises(RxlSyntaxError, match="unterminated string literal"):
            tokenize('let s = "open')

    def test_unexpected_character(self):
        with pytest.raises(RxlSyntaxError, match=r"Syntax error at 1:3: unexpected character '#'"):
            tokenize("a #")


class TestParser:
    """Syntax tree construction."""

    def test_precedence(self):
        program = parse("let x = 1 + 2 * 3;")
        decl = program.children[0]
        assert decl.kind is NodeKind.VAR_DECL
        assert decl.value == "x"
        plus = decl.children[0]
        assert (plus.kind, plus.value) == (NodeKind.BINARY, "+")
        assert (plus.children[1].kind, plus.children[1].value) == (NodeKind.BINARY, "*")

    def test_strict_equality_spellings_fold(self):
        assert parse_expression("a === b").value == "=="
        assert parse_expression("a !== b").value == "!="

    def test_directives(self):
        program = parse('"use strict";\nlet x = 1;')
        assert program.value == ("use strict",)
        assert len(program.children) == 1

    def test_newline_ends_statement(self):
        program = parse("let x = 1\nlet y = 2\nx = y")
        assert [c.kind for c in program.children] == [NodeKind.VAR_DECL, NodeKind.VAR_DECL, NodeKind.ASSIGN]

    def test_missing_semicolon_on_one_line(self):
        with pytest.raises(RxlSyntaxError, match="expected ';'"):
            parse("let x = 1 let y = 2;")

    def test_error_position(self):
        with pytest.raises(RxlSyntaxError) as exc_info:
            parse("let x = 1;\nlet = 5;")
        assert exc_info.value.line == 2
        assert exc_info.value.column == 5
        assert exc_info.value.message.startswith("Syntax error at 2:5: expected variable name")

    def test_invalid_assignment_target(self):
        with pytest.raises(RxlSyntaxError, match="invalid target"):
            parse("1 = 2;")

    def test_reserved_names_need_hook_directive(self):
        with pytest.raises(RxlSyntaxError, match="reserved"):
            parse("let __rx_scope_1 = 1;")
        program = parse('"use aexpr-hooks";\nlet __rx_scope_1 = 1;')
        assert program.children[0].value == "__rx_scope_1"

    def test_arrow_function(self):
        node = parse_expression("(a, b) => a + b")
        assert node.kind is NodeKind.FUNCTION_LIT
        assert node.arrow
        assert node.params == ["a", "b"]

    def test_statement_constructs(self):
        source = """
        class Point {
          constructor(x) { this.x = x; }
          norm() { return abs(this.x); }
        }
        function twice(f, v) { return f(f(v)); }
        signal s = 1;
        always: a == b;
        outer: while (true) { }
        for (let item of [1, 2]) { print(item); }
        if (x) { y = 1; } else if (z) { y = 2; } else y = 3;
        """
        kinds = [child.kind for child in parse(source).children]
        assert kinds == [
            NodeKind.CLASS_DECL, NodeKind.FUNCTION_LIT, NodeKind.SIGNAL_DECL,
            NodeKind.ALWAYS_STMT, NodeKind.LABEL, NodeKind.FOR_OF, NodeKind.IF,
        ]

    def test_node_ids_are_unique(self):
        program = parse("let a = [1, 2, {b: 3}]; a[0] += a.length;")
        ids = [node.node_id for node in walk(program)]
        assert len(ids) == len(set(ids))

    def test_capture_locals_appends_scope_record(self):
        program = parse("let a = 1;\nfunction f(b) { return aexpr(() => a + b); }", capture_locals=True)
        call = program.children[1].children[0].children[0].children[0]
        assert call.kind is NodeKind.CALL
        record = call.children[-1]
        assert record.kind is NodeKind.OBJECT_LIT
        assert record.value == ["a", "f", "b", "this"]

    def test_capture_locals_off_by_default(self):
        program = parse("let a = 1; aexpr(() => a);")
        assert len(program.children[1].children) == 2


class TestNodeCounting:
    """count_ast_nodes and dump_ast."""

    def test_empty_program_counts_itself(self):
        assert count_ast_nodes(parse("")) == 1

    def test_comments_are_kept_but_not_counted(self):
        program = parse("// note\nlet x = 1;")
        assert program.children[0].kind is NodeKind.COMMENT
        assert count_ast_nodes(program) == 3

    def test_dump_ast(self):
        assert dump_ast(parse("x = 1;")) == "(Program\n  (Assign =\n    (Ident x)\n    (Literal 1)))"


class TestPrinter:
    """print_program output."""

    @pytest.mark.parametrize("source,expected", [
        ("let f = (a, b) => a + b;", "let f = (a, b) => a + b;\n"),
        ("(1 + 2) * 3;", "(1 + 2) * 3;\n"),
        ("a - (b - c);", "a - (b - c);\n"),
        ("a - b - c;", "a - b - c;\n"),
        ("({a: 1});", "({a: 1});\n"),
        ("let o = {\"two words\": 2};", "let o = {\"two words\": 2};\n"),
        ("x = y ? 1 : 2;", "x = y ? 1 : 2;\n"),
        ("- -x;", "-(-x);\n"),
        ("let s = 'it\\'s';", "let s = \"it's\";\n"),
    ])
    def test_print(self, source, expected):
        assert print_program(parse(source)) == expected

    def test_print_keeps_directives_and_comments(self):
        text = print_program(parse('"use strict";\n// hello\nlet x = 1;'))
        assert text == '"use strict";\n// hello\nlet x = 1;\n'

    def test_dangling_else_stays_attached(self):
        source = "if (a) { if (b) x = 1; } else x = 2;"
        program = parse(source)
        reparsed = parse(print_program(program))
        assert dump_ast(reparsed) == dump_ast(program)

    @pytest.mark.parametrize("path", CORPUS, ids=lambda p: p.stem)
    def test_corpus_prints_stably(self, path):
        program = parse(path.read_text())
        printed = print_program(program)
        assert dump_ast(parse(printed)) == dump_ast(program)
        assert print_program(parse(printed)) == printed
