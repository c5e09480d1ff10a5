import random
from collections import Counter

import penman as penman_lib
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from amrtext.amr import (
    AmrGraph,
    PenmanError,
    diagnose,
    iter_blocks,
    lex,
    parse_metadata,
    parse_penman,
    serialize_penman,
    validate,
)
from conftest import MULTI, WANT
from graphgen import random_graph


def reference_triples(text):
    """Edges/attributes as read by the penman library's tree parser (no role normalization)."""
    tree = penman_lib.parse(text)
    defined = {v for v, _ in tree.nodes()}
    nodes, edges, attrs = {}, [], []

    def walk(node):
        var, branches = node
        for role, tgt in branches:
            if role == "/":
                nodes[var] = tgt
            elif isinstance(tgt, tuple):
                edges.append((var, role, tgt[0]))
                walk(tgt)
            elif tgt in defined:
                edges.append((var, role, tgt))
            else:
                attrs.append((var, role, tgt))

    walk(tree.node)
    return tree.node[0], nodes, Counter(edges), Counter(attrs)


class TestParse:
    def test_minimal_graph(self):
        g = parse_penman("(a / and)")
        assert g.root == "a"
        assert g.nodes == {"a": "and"}
        assert g.edges == () and g.attributes == ()

    def test_reentrancy_creates_edge_not_node(self, want):
        assert len(want.nodes) == 3
        assert len(want.edges) == 3
        assert want.in_degree()["b"] == 2
        assert want.reentrant_nodes() == ["b"]

    @pytest.mark.parametrize("text", [WANT, MULTI])
    def test_agrees_with_reference_reader(self, text):
        root, nodes, edges, attrs = reference_triples(text)
        g = parse_penman(text)
        assert g.root == root
        assert g.nodes == nodes
        assert Counter(g.edges) == edges
        assert Counter(g.attributes) == attrs

    def test_multi_counts(self, multi):
        assert multi.root == "m"
        assert len(multi.nodes) == 13
        # i2: ARG0 of wish-01, of wipe-out-02 and of live-01
        assert multi.in_degree()["i2"] == 3
        assert sorted((s, r) for s, r, t in multi.edges if t == "i2") == [
            ("l", ":ARG0"), ("w2", ":ARG0"), ("w3", ":ARG0")]
        assert validate(multi) == []

    def test_constants_are_attributes(self):
        g = parse_penman('(c / city :name (n / name :op1 "New" :op2 "York") :polarity - :quant 5)')
        assert set(g.nodes) == {"c", "n"}
        assert Counter(g.attributes) == Counter(
            [("n", ":op1", '"New"'), ("n", ":op2", '"York"'), ("c", ":polarity", "-"), ("c", ":quant", "5")])

    def test_inverse_roles_kept_verbatim(self):
        g = parse_penman("(p / person :ARG0-of (t / teach-01))")
        assert g.edges == (("p", ":ARG0-of", "t"),)

    def test_forward_reference(self):
        g = parse_penman("(a / x :ARG0 (b / y :ARG1 c) :ARG1 (c / z))")
        assert Counter(g.edges) == Counter([("a", ":ARG0", "b"), ("b", ":ARG1", "c"), ("a", ":ARG1", "c")])

    def test_duplicate_roles_allowed(self):
        g = parse_penman("(a / x :mod (b / y) :mod (c / z))")
        assert [r for _, r, _ in g.edges] == [":mod", ":mod"]

    def test_comments_skipped(self):
        g = parse_penman("# ::id x\n# ::snt hi\n(a / and)")
        assert g.nodes == {"a": "and"}

    def test_quoted_string_with_parens(self):
        g = parse_penman('(n / name :op1 "a (b) : c")')
        assert g.attributes == (("n", ":op1", '"a (b) : c"'),)


class TestParseErrors:
    @pytest.mark.parametrize("text, offset, fragment", [
        ("", 0, "empty"),
        ("   \n", 0, "empty"),
        ("(a / b", 0, "never closed"),
        ("(a / b))", 7, "unexpected ')'"),
        ("(a / b :ARG0 c)", 13, "never defined"),
        ("(a / b :ARG0 (a / c))", 14, "duplicate"),
        ("(a :ARG0 (b / c))", 3, "'/'"),
        ("(a / b :ARG0)", 12, "no target"),
        ('(a / b :op1 "x)', 12, "unterminated"),
    ])
    def test_error_diagnostics(self, text, offset, fragment):
        graph, diags = diagnose(text)
        assert graph is None
        errors = [d for d in diags if d.severity == "error"]
        assert errors and errors[0].offset == offset
        assert fragment in errors[0].message
        with pytest.raises(PenmanError) as info:
            parse_penman(text)
        assert info.value.diagnostics == diags

    def test_offsets_are_bytes(self):
        _, diags = diagnose("(a / ☃ :ARG0 z)")
        assert diags[0].offset == len("(a / ☃ :ARG0 ".encode("utf-8"))

    def test_diagnostic_format(self):
        _, diags = diagnose("(a / b :ARG0 c)")
        assert str(diags[0]) == "error:13:variable 'c' is referenced but never defined"

    @given(st.text(alphabet="()/ :abx\"-\n", max_size=40))
    @settings(max_examples=400)
    def test_fuzz_never_crashes(self, text):
        graph, diags = diagnose(text)
        has_error = any(d.severity == "error" for d in diags)
        assert (graph is None) == has_error

    def test_random_paren_strings(self):
        rng = random.Random(3)
        for _ in range(500):
            text = "".join(rng.choice("(()) a/b:c") for _ in range(rng.randint(0, 30)))
            graph, diags = diagnose(text)
            assert (graph is None) == bool(diags)


class TestSerialize:
    def test_fixed_point(self):
        assert serialize_penman(parse_penman("(a / and)")) == "(a / and)"

    def test_want_roundtrip(self, want):
        text = serialize_penman(want)
        assert parse_penman(text) == want
        # first visit defines, later visits are bare
        assert text.count("(b / boy)") == 1
        assert text.rstrip(")").endswith(":ARG0 b")

    def test_multi_roundtrip(self, multi):
        again = parse_penman(serialize_penman(multi))
        assert again == multi
        assert len(again.nodes) == 13

    def test_deterministic_layout(self, multi):
        assert serialize_penman(multi) == serialize_penman(parse_penman(serialize_penman(multi)))

    def test_random_roundtrip(self, rng):
        for _ in range(200):
            g = random_graph(rng)
            assert parse_penman(serialize_penman(g)) == g


class TestValidate:
    def test_valid(self, multi):
        assert validate(multi) == []

    def test_undeclared_edge_target(self):
        g = AmrGraph("a", {"a": "x"}, [("a", ":ARG0", "zz")])
        diags = validate(g)
        assert len(diags) == 1 and "'zz'" in diags[0].message

    def test_unreachable_node(self):
        g = AmrGraph("a", {"a": "x", "b": "y"})
        diags = validate(g)
        assert len(diags) == 1 and "'b'" in diags[0].message and "reachable" in diags[0].message

    def test_bad_role(self):
        g = AmrGraph("a", {"a": "x", "b": "y"}, [("a", "ARG0", "b")])
        assert len(validate(g)) == 1

    def test_undeclared_root(self):
        assert validate(AmrGraph("q", {"a": "x"}))


class TestProperties:
    def test_idempotent_normalization(self, rng):
        for _ in range(100):
            text = serialize_penman(random_graph(rng))
            once = parse_penman(text)
            twice = parse_penman(serialize_penman(once))
            assert once == twice
            assert serialize_penman(once) == serialize_penman(twice)

    def test_reentrancy_matches_in_degree(self, rng):
        for _ in range(100):
            g = parse_penman(serialize_penman(random_graph(rng)))
            indeg = Counter(t for _, _, t in g.edges)
            assert set(g.reentrant_nodes()) == {v for v in g.nodes if indeg[v] >= 2}

    def test_no_tokens_dropped(self, rng):
        for _ in range(100):
            text = serialize_penman(random_graph(rng))
            toks = lex(text)
            g = parse_penman(text)
            lexed_roles = Counter(t.text for t in toks if t.kind == "role")
            assert lexed_roles == Counter([r for _, r, _ in g.edges] + [r for _, r, _ in g.attributes])
            symbols = Counter(t.text for t in toks if t.kind in ("symbol", "string"))
            recovered = Counter(list(g.nodes)) + Counter(list(g.nodes.values()))
            nested = Counter(v for v in g.nodes if v != g.root)
            recovered += Counter(t for _, _, t in g.edges) - nested  # bare references
            recovered += Counter(v for _, _, v in g.attributes)
            assert symbols == recovered


class TestBlocks:
    def test_metadata(self):
        meta = parse_metadata(["# ::id abc.1 ::date 2020", "# ::snt Hello :: there"])
        assert meta == {"id": "abc.1", "date": "2020", "snt": "Hello :: there"}

    def test_blocks_and_offsets(self):
        text = "# header\n\n# ::id a\n(a / and)\n\n\n# ::id é\n(b / or)\n"
        blocks = [b for b in iter_blocks(text) if b.text.strip()]
        assert [b.metadata["id"] for b in blocks] == ["a", "é"]
        assert blocks[1].offset == text.encode().index(b"# ::id \xc3\xa9")
        assert parse_penman(blocks[1].text).nodes == {"b": "or"}
