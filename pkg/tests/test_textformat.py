from importlib import resources

from hypothesis import given, strategies as st
import pytest

from catcohom.instances import b2, omega, parallel_edges, torus, torus_module, two_vertex, z2_category
from catcohom.category import LambdaModule
from catcohom.kgraph import KGraphModule
from catcohom.linalg import AbelianGroupStructure, IntMatrix
from catcohom.textformat import (
    CochainSpec,
    InputDocument,
    ParseError,
    build_cochain,
    document_from_category,
    document_from_kgraph,
    dump,
    parse,
)

BUNDLED = sorted(p.name for p in resources.files("catcohom").joinpath("data").iterdir() if p.name.endswith(".txt"))


@pytest.mark.parametrize("name", BUNDLED)
def test_bundled_files_round_trip(name):
    text = resources.files("catcohom").joinpath("data", name).read_text()
    doc = parse(text)
    assert parse(dump(doc)) == doc
    assert dump(parse(dump(doc))) == dump(doc)


def test_b2_file_parses():
    doc = parse(resources.files("catcohom").joinpath("data", "b2.txt").read_text())
    assert doc.kind == "kgraph" and sorted(doc.kgraph.edges) == ["f", "g"]


def _diag(text):
    with pytest.raises(ParseError) as info:
        parse(text)
    return info.value


def test_color_out_of_range_diagnostic():
    err = _diag("FORMAT 1\nKGRAPH\nRANK 2\nVERTEX v\nEDGE e 3 v v\n")
    assert (err.line, err.kind) == (5, "range")
    assert err.column == 8


def test_dangling_square_diagnostic():
    err = _diag("FORMAT 1\nKGRAPH\nRANK 2\nVERTEX v\nEDGE e 1 v v\nEDGE f 2 v v\nSQUARE e g = f e\n")
    assert (err.line, err.kind) == (7, "dangling")


def test_duplicate_and_syntax_diagnostics():
    assert _diag("FORMAT 1\nKGRAPH\nRANK 1\nVERTEX v\nVERTEX v\n").kind == "duplicate"
    assert _diag("FORMAT 1\nKGRAPH\nRANK 1\nBOGUS x\n").kind == "syntax"
    assert _diag("FORMAT 2\n").kind in {"syntax", "range"}


def test_matrix_shape_diagnostic():
    text = "FORMAT 1\nKGRAPH\nRANK 1\nVERTEX v\nEDGE e 1 v v\nMODULE\nFIBER v = 1\nACTION e = 1 0; 0 1\n"
    assert _diag(text).kind == "shape"


def test_cochain_values_build():
    text = "FORMAT 1\nKGRAPH\nRANK 1\nVERTEX v\nEDGE f 1 v v\nEDGE g 1 v v\nCOCHAIN 1\nVALUE f = 1\n"
    doc = parse(text)
    c = build_cochain(doc)
    k = doc.kgraph
    assert c(k.path("f")) == 1 and c(k.path("g")) == 0


def test_rule_cochain_builds():
    doc = parse(resources.files("catcohom").joinpath("data", "torus-heisenberg.txt").read_text())
    c = build_cochain(doc)
    k = doc.kgraph
    assert c(k.path("e.e"), k.path("e.f.f")) == 4


DOCS = [
    document_from_kgraph(b2()),
    document_from_kgraph(torus(), torus_module()),
    document_from_kgraph(two_vertex()),
    document_from_kgraph(parallel_edges()),
    document_from_category(z2_category()),
    document_from_category(omega(2, 1), LambdaModule.constant(omega(2, 1), AbelianGroupStructure(1, (2,)))),
]


@given(st.sampled_from(DOCS), st.integers(0, 2), st.dictionaries(st.integers(0, 3), st.integers(-9, 9), max_size=3))
def test_parse_dump_parse_is_identity(doc, degree, raw_values):
    if doc.kind == "category":
        cat = doc.category
        tuples = cat.composable_tuples(degree)
        keys = [(t,) if degree == 0 else t for t in tuples]
        width = lambda key: (doc.module.fibers[key[0] if degree == 0 else cat.src(key[-1])].ngens if doc.module else 1)
    else:
        k = doc.kgraph
        keys = [(v,) for v in k.vertices] if degree == 0 else [tuple(str(p) for p in t) for t in _kgraph_tuples(k, degree)]
        width = lambda key: 1
    values = {}
    for i, x in raw_values.items():
        if keys:
            key = keys[i % len(keys)]
            values[key] = tuple([x] * width(key))
    full = InputDocument(doc.kind, doc.category, doc.kgraph, None if doc.kind == "kgraph" else doc.module, CochainSpec(degree, values))
    again = parse(dump(full))
    assert again == full
    assert dump(again) == dump(full)


def _kgraph_tuples(k, n):
    from catcohom.kgraph import bounded_tuples

    return [t for t in bounded_tuples(k, n, 1) if all(p.edges for p in t)]


def test_module_round_trip_with_torsion():
    k = torus()
    m = KGraphModule(k, {"v": AbelianGroupStructure(1, (2,))}, {"e": IntMatrix([[1, 0], [0, 1]]), "f": IntMatrix([[1, 1], [0, 1]])})
    doc = document_from_kgraph(k, m)
    assert parse(dump(doc)) == doc
    assert "TORSION 2" in dump(doc)
