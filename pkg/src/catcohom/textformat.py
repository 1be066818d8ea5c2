"""Line-oriented input format for categories, k-graphs, modules and cochains.

::

    FORMAT 1
    KGRAPH
    RANK 2
    VERTEX v
    EDGE e 1 v v          # name color src range
    EDGE f 2 v v
    SQUARE e f = f e
    MODULE
    FIBER v = 2 TORSION   # free rank, then torsion orders
    ACTION e = 1 1; 0 1   # matrix rows separated by semicolons
    COCHAIN 2
    RULE bilinear 1 2

A ``CATEGORY`` section uses ``OBJECT``, ``MORPHISM name src range``,
``IDENTITY object morphism`` and ``COMPOSE a b = c`` instead.  ``#``
starts a comment.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .bar import CategoricalCochain, IntegerCoefficients, ModuleCoefficients
from .category import FiniteCategory, LambdaModule
from .errors import InvalidInputError
from .kgraph import KGraphModule, KGraphPresentation, PathWord, additive_cochain, bilinear_cochain, degree_cochain
from .linalg import AbelianGroupStructure, IntMatrix

FORMAT_VERSION = 1
RULES = {"degree": 1, "bilinear": 2, "additive": None}


class ParseError(InvalidInputError):
    """A diagnostic with a 1-based line and column."""

    def __init__(self, line: int, column: int, kind: str, message: str):
        self.line, self.column, self.kind = line, column, kind
        super().__init__(f"line {line}, column {column}: {kind}: {message}")


@dataclass
class CochainSpec:
    degree: int
    values: dict = field(default_factory=dict)  # tuple of names -> tuple of ints
    rule: tuple | None = None

    def canonical(self) -> tuple:
        return (self.degree, tuple(sorted(self.values.items())), self.rule)


@dataclass
class InputDocument:
    kind: str  # "category" or "kgraph"
    category: FiniteCategory | None = None
    kgraph: KGraphPresentation | None = None
    module: LambdaModule | KGraphModule | None = None
    cochain: CochainSpec | None = None

    def canonical(self) -> tuple:
        if self.kind == "category":
            c = self.category
            shape = (
                c.objects,
                tuple((m, c.src(m), c.tgt(m)) for m in c.morphisms),
                tuple(sorted(c.identities.items())),
                tuple(sorted(c.table.items())),
            )
        else:
            k = self.kgraph
            shape = (k.rank, k.vertices, tuple(sorted(k.edges.items())), tuple(k.squares))
        mod = None
        if self.module is not None:
            acts = self.module.actions if isinstance(self.module, LambdaModule) else self.module.edge_actions
            mod = (
                tuple(sorted((v, g.free_rank, g.torsion) for v, g in self.module.fibers.items())),
                tuple(sorted((m, tuple(map(tuple, a.tolist())), a.cols) for m, a in acts.items())),
            )
        return (self.kind, shape, mod, None if self.cochain is None else self.cochain.canonical())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, InputDocument):
            return NotImplemented
        return self.canonical() == other.canonical()


_TOKEN = re.compile(r"\S+")


class _Line:
    def __init__(self, number: int, text: str):
        self.number = number
        body = text.split("#", 1)[0]
        self.tokens = [(m.group(), m.start() + 1) for m in _TOKEN.finditer(body)]

    def words(self) -> list[str]:
        return [t for t, _ in self.tokens]

    def col(self, i: int) -> int:
        if i < len(self.tokens):
            return self.tokens[i][1]
        return self.tokens[-1][1] + len(self.tokens[-1][0]) if self.tokens else 1

    def error(self, i: int, kind: str, message: str) -> ParseError:
        return ParseError(self.number, self.col(i), kind, message)


def _int(line: _Line, i: int, what: str) -> int:
    try:
        return int(line.words()[i])
    except (IndexError, ValueError):
        raise line.error(i, "syntax", f"expected an integer {what}") from None


def _arity(line: _Line, n: int, usage: str) -> list[str]:
    w = line.words()
    if len(w) != n:
        raise line.error(min(len(w), n), "syntax", f"expected '{usage}'")
    return w


def _split_eq(line: _Line, left: int, usage: str) -> tuple[list[str], list[str], int]:
    w = line.words()
    if "=" not in w:
        raise line.error(len(w), "syntax", f"expected '{usage}'")
    eq = w.index("=")
    if left >= 0 and eq != left:
        raise line.error(eq, "syntax", f"expected '{usage}'")
    return w[1:eq], w[eq + 1:], eq


def _matrix(line: _Line, start: int) -> tuple[list[list[int]], int]:
    text = " ".join(line.words()[start:])
    rows = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            rows.append([int(t) for t in chunk.split()])
        except ValueError:
            raise line.error(start, "syntax", "matrix entries must be integers") from None
    widths = {len(r) for r in rows}
    if len(widths) > 1:
        raise line.error(start, "syntax", "matrix rows have different lengths")
    return rows, (widths.pop() if widths else 0)


class _Parser:
    def __init__(self, text: str):
        self.lines = [_Line(i, t) for i, t in enumerate(text.splitlines(), start=1)]
        self.lines = [ln for ln in self.lines if ln.tokens]
        self.kind: str | None = None
        # category data
        self.objects: dict[str, _Line] = {}
        self.morphisms: dict[str, tuple[str, str]] = {}
        self.identities: dict[str, str] = {}
        self.table: dict[tuple[str, str], str] = {}
        # k-graph data
        self.rank: int | None = None
        self.vertices: dict[str, _Line] = {}
        self.edges: dict[str, tuple[int, str, str]] = {}
        self.squares: list = []
        # module and cochain
        self.fibers: dict[str, AbelianGroupStructure] = {}
        self.actions: dict[str, tuple[_Line, list[list[int]], int]] = {}
        self.has_module = False
        self.cochain: CochainSpec | None = None
        self.section: str | None = None

    def parse(self) -> InputDocument:
        if not self.lines:
            raise ParseError(1, 1, "syntax", "empty document")
        first = self.lines[0]
        if first.words() != ["FORMAT", str(FORMAT_VERSION)]:
            raise first.error(0, "syntax", f"document must start with 'FORMAT {FORMAT_VERSION}'")
        for line in self.lines[1:]:
            self.dispatch(line)
        if self.kind is None:
            raise ParseError(first.number, 1, "syntax", "missing CATEGORY or KGRAPH section")
        return self.build()

    def dispatch(self, line: _Line) -> None:
        key = line.words()[0]
        if key in ("CATEGORY", "KGRAPH"):
            _arity(line, 1, key)
            if self.kind is not None:
                raise line.error(0, "duplicate", "a document holds exactly one CATEGORY or KGRAPH section")
            self.kind = key.lower()
            self.section = self.kind
            return
        if key == "MODULE":
            _arity(line, 1, "MODULE")
            if self.kind is None or self.has_module:
                raise line.error(0, "syntax", "MODULE must follow the CATEGORY or KGRAPH section, once")
            self.has_module = True
            self.section = "module"
            return
        if key == "COCHAIN":
            _arity(line, 2, "COCHAIN n")
            if self.kind is None or self.cochain is not None:
                raise line.error(0, "syntax", "COCHAIN must follow the CATEGORY or KGRAPH section, once")
            deg = _int(line, 1, "degree")
            if deg < 0:
                raise line.error(1, "syntax", "cochain degree must be non-negative")
            self.cochain = CochainSpec(deg)
            self.section = "cochain"
            return
        handler = getattr(self, f"_{self.section}_{key.lower()}", None) if self.section else None
        if handler is None:
            raise line.error(0, "syntax", f"unknown keyword {key!r} here")
        handler(line)

    # -- CATEGORY ----------------------------------------------------------
    def _category_object(self, line: _Line) -> None:
        _, name = _arity(line, 2, "OBJECT name")
        if name in self.objects:
            raise line.error(1, "duplicate", f"object {name} declared twice")
        self.objects[name] = line

    def _category_morphism(self, line: _Line) -> None:
        _, name, s, t = _arity(line, 4, "MORPHISM name src range")
        if name in self.morphisms or name in self.objects:
            raise line.error(1, "duplicate", f"identifier {name} declared twice")
        for i, o in ((2, s), (3, t)):
            if o not in self.objects:
                raise line.error(i, "dangling", f"unknown object {o}")
        self.morphisms[name] = (s, t)

    def _category_identity(self, line: _Line) -> None:
        _, obj, m = _arity(line, 3, "IDENTITY object morphism")
        if obj not in self.objects:
            raise line.error(1, "dangling", f"unknown object {obj}")
        if m not in self.morphisms:
            raise line.error(2, "dangling", f"unknown morphism {m}")
        if obj in self.identities:
            raise line.error(1, "duplicate", f"identity of {obj} declared twice")
        self.identities[obj] = m

    def _category_compose(self, line: _Line) -> None:
        _arity(line, 5, "COMPOSE a b = c")
        left, right, _ = _split_eq(line, 3, "COMPOSE a b = c")
        for i, m in ((1, left[0]), (2, left[1]), (4, right[0])):
            if m not in self.morphisms:
                raise line.error(i, "dangling", f"unknown morphism {m}")
        key = (left[0], left[1])
        if key in self.table:
            raise line.error(1, "duplicate", f"composite {left[0]} {left[1]} declared twice")
        self.table[key] = right[0]

    # -- KGRAPH ------------------------------------------------------------
    def _kgraph_rank(self, line: _Line) -> None:
        _arity(line, 2, "RANK k")
        if self.rank is not None:
            raise line.error(0, "duplicate", "RANK declared twice")
        self.rank = _int(line, 1, "rank")
        if self.rank < 1:
            raise line.error(1, "range", "rank must be at least 1")

    def _kgraph_vertex(self, line: _Line) -> None:
        _, name = _arity(line, 2, "VERTEX name")
        if name in self.vertices or name in self.edges:
            raise line.error(1, "duplicate", f"identifier {name} declared twice")
        self.vertices[name] = line

    def _kgraph_edge(self, line: _Line) -> None:
        _, name, _, s, r = _arity(line, 5, "EDGE name color src range")
        if self.rank is None:
            raise line.error(0, "syntax", "RANK must come before the first EDGE")
        if name in self.edges or name in self.vertices:
            raise line.error(1, "duplicate", f"identifier {name} declared twice")
        color = _int(line, 2, "color")
        if not 1 <= color <= self.rank:
            raise line.error(2, "range", f"color {color} outside 1..{self.rank}")
        for i, v in ((3, s), (4, r)):
            if v not in self.vertices:
                raise line.error(i, "dangling", f"unknown vertex {v}")
        self.edges[name] = (color, s, r)

    def _kgraph_square(self, line: _Line) -> None:
        _arity(line, 6, "SQUARE a b = c d")
        left, right, _ = _split_eq(line, 3, "SQUARE a b = c d")
        for i, e in zip((1, 2, 4, 5), left + right):
            if e not in self.edges:
                raise line.error(i, "dangling", f"unknown edge {e}")
        self.squares.append(((left[0], left[1]), (right[0], right[1])))

    # -- MODULE ------------------------------------------------------------
    def _objects(self) -> dict:
        return self.objects if self.kind == "category" else self.vertices

    def _arrows(self) -> dict:
        return self.morphisms if self.kind == "category" else self.edges

    def _module_fiber(self, line: _Line) -> None:
        w = line.words()
        if len(w) < 4 or w[2] != "=":
            raise line.error(min(len(w), 2), "syntax", "expected 'FIBER object = free [TORSION orders...]'")
        obj = w[1]
        if obj not in self._objects():
            raise line.error(1, "dangling", f"unknown object {obj}")
        if obj in self.fibers:
            raise line.error(1, "duplicate", f"fiber of {obj} declared twice")
        free = _int(line, 3, "free rank")
        torsion: list[int] = []
        if len(w) > 4:
            if w[4] != "TORSION":
                raise line.error(4, "syntax", "expected TORSION")
            torsion = [_int(line, i, "torsion order") for i in range(5, len(w))]
        try:
            self.fibers[obj] = AbelianGroupStructure(free, tuple(torsion))
        except (ValueError, InvalidInputError) as exc:
            raise line.error(3, "range", str(exc)) from None

    def _module_action(self, line: _Line) -> None:
        w = line.words()
        if len(w) < 3 or w[2] != "=":
            raise line.error(min(len(w), 2), "syntax", "expected 'ACTION arrow = rows'")
        arrow = w[1]
        if arrow not in self._arrows():
            raise line.error(1, "dangling", f"unknown morphism {arrow}")
        if arrow in self.actions:
            raise line.error(1, "duplicate", f"action of {arrow} declared twice")
        rows, cols = _matrix(line, 3)
        self.actions[arrow] = (line, rows, cols)

    # -- COCHAIN -----------------------------------------------------------
    def _cochain_value(self, line: _Line) -> None:
        left, right, eq = _split_eq(line, -1, "VALUE args = entries")
        n = self.cochain.degree
        if len(left) != max(n, 1):
            raise line.error(1, "syntax", f"a degree-{n} value needs {max(n, 1)} arguments")
        known = self._objects() if n == 0 else None
        for i, a in enumerate(left, start=1):
            if known is not None and a not in known:
                raise line.error(i, "dangling", f"unknown object {a}")
            if known is None and self.kind == "category" and a not in self.morphisms:
                raise line.error(i, "dangling", f"unknown morphism {a}")
        key = tuple(left)
        if key in self.cochain.values:
            raise line.error(1, "duplicate", f"value at {' '.join(left)} declared twice")
        self.cochain.values[key] = tuple(_int(line, i, "entry") for i in range(eq + 1, len(line.words())))

    def _cochain_rule(self, line: _Line) -> None:
        w = line.words()
        if self.kind != "kgraph":
            raise line.error(0, "syntax", "RULE is only available for k-graphs")
        if len(w) < 2 or w[1] not in RULES:
            raise line.error(1, "syntax", f"rule must be one of {', '.join(sorted(RULES))}")
        name = w[1]
        if self.cochain.rule is not None:
            raise line.error(0, "duplicate", "RULE declared twice")
        if name == "additive":
            pairs = []
            for i in range(2, len(w)):
                e, sep, v = w[i].partition("=")
                if not sep or e not in self.edges:
                    raise line.error(i, "dangling" if sep else "syntax", f"expected edge=value, got {w[i]}")
                try:
                    pairs.append((e, int(v)))
                except ValueError:
                    raise line.error(i, "syntax", "edge value must be an integer") from None
            rule: tuple = ("additive", tuple(sorted(pairs)))
            degree = 1
        else:
            degree = RULES[name]
            _arity(line, 2 + degree, f"RULE {name} " + " ".join("i" * degree))
            coords = tuple(_int(line, i, "color") for i in range(2, 2 + degree))
            for i, cidx in enumerate(coords, start=2):
                if not 1 <= cidx <= (self.rank or 0):
                    raise line.error(i, "range", f"color {cidx} outside 1..{self.rank}")
            rule = (name,) + coords
        if degree != self.cochain.degree:
            raise line.error(1, "syntax", f"rule {name} has degree {degree}, section says {self.cochain.degree}")
        self.cochain.rule = rule

    # -- assembly ----------------------------------------------------------
    def build(self) -> InputDocument:
        doc = InputDocument(self.kind, cochain=self.cochain)
        if self.kind == "category":
            missing = [o for o in self.objects if o not in self.identities]
            if missing:
                ln = self.objects[missing[0]]
                raise ln.error(1, "syntax", f"object {missing[0]} has no IDENTITY line")
            doc.category = FiniteCategory(self.objects, self.morphisms, self.identities, self.table)
        else:
            if self.rank is None:
                raise ParseError(self.lines[0].number, 1, "syntax", "KGRAPH section needs a RANK line")
            doc.kgraph = KGraphPresentation(self.rank, self.vertices, self.edges, self.squares)
        if self.has_module:
            doc.module = self._build_module(doc)
        return doc

    def _build_module(self, doc: InputDocument):
        objs = self._objects()
        for o, ln in objs.items():
            if o not in self.fibers:
                raise ln.error(1, "syntax", f"MODULE has no FIBER for {o}")
        actions = {}
        for arrow, (s, t) in self._ends().items():
            if arrow not in self.actions:
                if doc.kind == "category" and arrow in self.identities.values():
                    actions[arrow] = IntMatrix.identity(self.fibers[s].ngens)
                    continue
                raise ParseError(self.lines[-1].number, 1, "syntax", f"MODULE has no ACTION for {arrow}")
            ln, rows, cols = self.actions[arrow]
            want = (self.fibers[s].ngens, self.fibers[t].ngens)
            if not rows:
                rows, cols = [[0] * want[1] for _ in range(want[0])], want[1]
            if (len(rows), cols) != want:
                raise ln.error(3, "shape", f"matrix is {len(rows)}x{cols}, expected {want[0]}x{want[1]}")
            actions[arrow] = IntMatrix(rows, cols)
        if doc.kind == "category":
            return LambdaModule(doc.category, self.fibers, actions)
        return KGraphModule(doc.kgraph, self.fibers, actions)

    def _ends(self) -> dict[str, tuple[str, str]]:
        if self.kind == "category":
            return dict(self.morphisms)
        return {e: (s, r) for e, (_, s, r) in self.edges.items()}


def parse(text: str) -> InputDocument:
    return _Parser(text).parse()


def parse_file(path: str | Path) -> InputDocument:
    return parse(Path(path).read_text())


def _rows(m: IntMatrix) -> str:
    return "; ".join(" ".join(str(x) for x in row) for row in m.tolist())


def dump(doc: InputDocument) -> str:
    out = [f"FORMAT {FORMAT_VERSION}"]
    if doc.kind == "category":
        c = doc.category
        out.append("CATEGORY")
        out += [f"OBJECT {o}" for o in c.objects]
        out += [f"MORPHISM {m} {c.src(m)} {c.tgt(m)}" for m in c.morphisms]
        out += [f"IDENTITY {o} {m}" for o, m in sorted(c.identities.items())]
        out += [f"COMPOSE {a} {b} = {r}" for (a, b), r in sorted(c.table.items())]
        acts = doc.module.actions if doc.module is not None else {}
    else:
        k = doc.kgraph
        out += ["KGRAPH", f"RANK {k.rank}"]
        out += [f"VERTEX {v}" for v in k.vertices]
        out += [f"EDGE {e} {c} {s} {r}" for e, (c, s, r) in sorted(k.edges.items())]
        out += [f"SQUARE {a} {b} = {c} {d}" for (a, b), (c, d) in k.squares]
        acts = doc.module.edge_actions if doc.module is not None else {}
    if doc.module is not None:
        out.append("MODULE")
        for v, g in sorted(doc.module.fibers.items()):
            tors = f" TORSION {' '.join(map(str, g.torsion))}" if g.torsion else ""
            out.append(f"FIBER {v} = {g.free_rank}{tors}")
        for m, a in sorted(acts.items()):
            out.append(f"ACTION {m} = {_rows(a)}".rstrip())
    if doc.cochain is not None:
        out.append(f"COCHAIN {doc.cochain.degree}")
        if doc.cochain.rule is not None:
            rule = doc.cochain.rule
            if rule[0] == "additive":
                out.append("RULE additive " + " ".join(f"{e}={v}" for e, v in rule[1]))
            else:
                out.append("RULE " + " ".join(map(str, rule)))
        for key, val in sorted(doc.cochain.values.items()):
            out.append(f"VALUE {' '.join(key)} = {' '.join(map(str, val))}".rstrip())
    return "\n".join(out) + "\n"


def build_cochain(doc: InputDocument) -> CategoricalCochain:
    """The cochain declared in the document, zero off the listed values."""
    spec = doc.cochain
    if spec is None:
        raise InvalidInputError("the document has no COCHAIN section")
    n = spec.degree
    if doc.kind == "category":
        module = doc.module or LambdaModule.constant(doc.category)
        table = {(k[0] if n == 0 else k): v for k, v in spec.values.items()}
        return CategoricalCochain.from_table(n, table, ModuleCoefficients(module), doc.category)
    k = doc.kgraph
    if spec.rule is not None:
        if doc.module is not None:
            raise InvalidInputError("RULE cochains take values in constant Z; drop the MODULE section")
        name = spec.rule[0]
        if name == "degree":
            return degree_cochain(k, spec.rule[1])
        if name == "bilinear":
            return bilinear_cochain(k, spec.rule[1], spec.rule[2])
        return additive_cochain(k, dict(spec.rule[1]))
    if doc.module is not None:
        coeffs = doc.module
        lift = lambda v: tuple(v)
    else:
        coeffs = IntegerCoefficients()
        lift = lambda v: int(v[0]) if v else 0
    if n == 0:
        table = {key[0]: lift(v) for key, v in spec.values.items()}
        return CategoricalCochain(0, lambda v: table.get(v, coeffs.zero(v)), coeffs, k.category())
    table: dict[tuple[PathWord, ...], object] = {}
    for key, v in spec.values.items():
        table[tuple(k.path(a) for a in key)] = lift(v)
    return CategoricalCochain(
        n, lambda *ps: table.get(tuple(ps), coeffs.zero(ps[-1].src)), coeffs, k.category()
    )


def document_from_kgraph(k: KGraphPresentation, module: KGraphModule | None = None) -> InputDocument:
    return InputDocument("kgraph", kgraph=k, module=module)


def document_from_category(c: FiniteCategory, module: LambdaModule | None = None) -> InputDocument:
    return InputDocument("category", category=c, module=module)
