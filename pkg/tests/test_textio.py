from fractions import Fraction

import pytest

from ttm.errors import ParseError
from ttm.textio import (
    format_table_tsv, parse, parse_path, parse_table_tsv, parse_value,
    print_document,
)

FIB_DOC = """
# Fibonacci example
graph R {
  vertices: * ;
  edge a: * -> * ;
  edge b: * -> * ;
}

map f: R -> R {
  vertex * -> * ;
  a -> a b ;
  b -> a ;
}

subst fib over a b { a -> a b ; b -> a }
"""


def test_parse_fibonacci():
    doc = parse(FIB_DOC)
    g = doc.graph("R")
    assert g.n_vertices == 1 and g.n_edges == 2
    f = doc.map("f")
    assert f.edge_image == ((0, 2), (0,))
    s = doc.substitution("fib")
    assert s.images == (("a", "b"), ("a",))


def test_print_parse_round_trip():
    doc = parse(FIB_DOC)
    text = print_document(doc)
    doc2 = parse(text)
    assert print_document(doc2) == text
    assert doc2.map("f") == doc.map("f")
    assert doc2.substitution("fib") == doc.substitution("fib")


def test_inverse_tokens():
    doc = parse("""
    graph G { vertices: v ; edge a: v -> v ; edge b: v -> v ; }
    map g: G -> G { vertex v -> v ; a -> a ~b ; b -> b ; }
    """)
    assert doc.map("g").edge_image[0] == (0, 3)


def test_undeclared_edge_error_position():
    bad = """graph G { vertices: v ; edge a: v -> v ; edge b: v -> v ; }
map f: G -> G { a -> a c ; b -> a ; }"""
    with pytest.raises(ParseError) as err:
        parse(bad)
    assert "c" in str(err.value)
    assert err.value.line == 2


def test_double_inversion_rejected():
    bad = """graph G { vertices: v ; edge a: v -> v ; edge b: v -> v ; }
map f: G -> G { a -> ~~a ; b -> a ; }"""
    with pytest.raises(ParseError) as err:
        parse(bad)
    assert "~~" in str(err.value) or "inversion" in str(err.value)


def test_vertex_image_inferred():
    doc = parse("""
    graph G { vertices: v ; edge a: v -> v ; edge b: v -> v ; }
    map f: G -> G { a -> a b ; b -> a ; }
    """)
    assert doc.map("f").vertex(0) == 0


def test_missing_image_rejected():
    with pytest.raises(ParseError):
        parse("""
        graph G { vertices: v ; edge a: v -> v ; edge b: v -> v ; }
        map f: G -> G { a -> a b ; }
        """)


def test_invalid_graph_reported():
    with pytest.raises(ParseError):
        parse("graph G { vertices: u v ; edge a: u -> v ; }")  # valence 1


def test_parse_path_tokens():
    doc = parse(FIB_DOC)
    g = doc.graph("R")
    assert parse_path(g, "a ~b a") == (0, 3, 0)
    with pytest.raises(ParseError):
        parse_path(g, "a ~~b")
    with pytest.raises(ParseError):
        parse_path(g, "a c")


def test_value_literals():
    assert parse_value("3/4") == Fraction(3, 4)
    assert parse_value("9") == Fraction(9)
    assert parse_value("0.5") == Fraction(1, 2)
    with pytest.raises(ParseError):
        parse_value("phi")


def test_table_tsv_round_trip():
    doc = parse(FIB_DOC)
    g = doc.graph("R")
    rows = [((0,), "9"), ((2,), "18"), ((0, 2), "9")]
    text = format_table_tsv(g, rows)
    table = parse_table_tsv(g, text)
    assert table.value((0,)) == 9
    assert table.value((0, 2)) == 9
    assert table.max_length == 2
