"""k-graphs presented by a colored skeleton and factorization squares.

Paths are edge words read from the range end: ``e f`` means ``e`` then
``f`` with ``src(e) == rng(f)``, so ``rng(e f) = rng(e)``.  A square
``a b = c d`` says that the bi-colored path ``a b`` is the same morphism as
``c d``, where ``c`` has the color of ``b`` and ``d`` the color of ``a``.
The normal form of a path is the representative whose colors are sorted
(all color-1 edges at the range end, then color 2, and so on).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .bar import (
    CategoricalCochain,
    Coefficients,
    IntegerCoefficients,
    delta_tilde,
)
from .category import FiniteCategory, ValidationReport, congruent
from .errors import InvalidInputError
from .linalg import AbelianGroupStructure, IntMatrix, subquotient_structure, kernel_basis


@dataclass(frozen=True, order=True)
class PathWord:
    rng: str
    src: str
    edges: tuple[str, ...]
    degree: tuple[int, ...]

    def is_vertex(self) -> bool:
        return not self.edges

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def total_degree(self) -> int:
        return sum(self.degree)

    def __str__(self) -> str:
        return ".".join(self.edges) if self.edges else self.rng

    def __repr__(self) -> str:
        return f"<{self}>"


def _add(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    return tuple(x + y for x, y in zip(a, b))


def _sub(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    return tuple(x - y for x, y in zip(a, b))


def leq(a: Sequence[int], b: Sequence[int]) -> bool:
    return all(x <= y for x, y in zip(a, b))


class KGraphPresentation:
    def __init__(
        self,
        rank: int,
        vertices: Iterable[str],
        edges: Mapping[str, tuple[int, str, str]],
        squares: Iterable[tuple[tuple[str, str], tuple[str, str]]] = (),
    ):
        """``edges`` maps a name to ``(color, src, rng)`` with colors in 1..rank."""
        if rank < 1:
            raise InvalidInputError("rank must be at least 1")
        self.rank = rank
        self.vertices: tuple[str, ...] = tuple(sorted(set(vertices)))
        vs = set(self.vertices)
        self.edges = {}
        for name, (color, s, r) in edges.items():
            if not 1 <= color <= rank:
                raise InvalidInputError(f"edge {name} has color {color} outside 1..{rank}")
            if s not in vs or r not in vs:
                raise InvalidInputError(f"edge {name} refers to an unknown vertex")
            if name in vs:
                raise InvalidInputError(f"edge name {name} clashes with a vertex name")
            self.edges[name] = (int(color), s, r)
        self.squares: list[tuple[tuple[str, str], tuple[str, str]]] = []
        self._swap: dict[tuple[str, str], tuple[str, str]] = {}
        self._duplicates: list[tuple[str, str]] = []
        for (a, b), (c, d) in squares:
            for e in (a, b, c, d):
                if e not in self.edges:
                    raise InvalidInputError(f"square {a} {b} = {c} {d} refers to unknown edge {e}")
            self.squares.append(((a, b), (c, d)))
            for key, val in (((a, b), (c, d)), ((c, d), (a, b))):
                if key in self._swap and self._swap[key] != val:
                    self._duplicates.append(key)
                self._swap.setdefault(key, val)
        self._into: dict[tuple[str, int], list[str]] = {}
        for name in sorted(self.edges):
            color, _, r = self.edges[name]
            self._into.setdefault((r, color), []).append(name)

    # -- skeleton ---------------------------------------------------------

    def color(self, e: str) -> int:
        return self.edges[e][0]

    def edge_src(self, e: str) -> str:
        return self.edges[e][1]

    def edge_rng(self, e: str) -> str:
        return self.edges[e][2]

    def edges_into(self, v: str, color: int) -> list[str]:
        """Edges of the given color with range ``v``, sorted by name."""
        return self._into.get((v, color), [])

    def unit_degree(self, color: int) -> tuple[int, ...]:
        return tuple(int(i == color - 1) for i in range(self.rank))

    def zero_degree(self) -> tuple[int, ...]:
        return (0,) * self.rank

    def vertex(self, v: str) -> PathWord:
        if v not in self.vertices:
            raise InvalidInputError(f"unknown vertex {v}")
        return PathWord(v, v, (), self.zero_degree())

    def check_composable(self, word: Sequence[str]) -> None:
        for i, e in enumerate(word):
            if e not in self.edges:
                raise InvalidInputError(f"unknown edge {e!r} at position {i}")
        for i in range(len(word) - 1):
            if self.edge_src(word[i]) != self.edge_rng(word[i + 1]):
                raise InvalidInputError(
                    f"word {'.'.join(word)} is not composable at position {i}: "
                    f"src({word[i]}) = {self.edge_src(word[i])} but rng({word[i + 1]}) = {self.edge_rng(word[i + 1])}"
                )

    def _make(self, word: tuple[str, ...], vertex: str | None = None) -> PathWord:
        if not word:
            return self.vertex(vertex)
        deg = [0] * self.rank
        for e in word:
            deg[self.color(e) - 1] += 1
        return PathWord(self.edge_rng(word[0]), self.edge_src(word[-1]), word, tuple(deg))

    def swap(self, a: str, b: str) -> tuple[str, str]:
        try:
            return self._swap[(a, b)]
        except KeyError:
            raise InvalidInputError(f"no square for the pair {a} {b}") from None

    # -- normal forms -----------------------------------------------------

    def normalize(self, word: Sequence[str], vertex: str | None = None) -> PathWord:
        """Color-sorted normal form, rewriting the leftmost inversion first."""
        w = list(word)
        self.check_composable(w)
        if not w:
            if vertex is None:
                raise InvalidInputError("an empty word needs its vertex")
            return self.vertex(vertex)
        if vertex is not None and self.edge_rng(w[0]) != vertex:
            raise InvalidInputError(f"word starts at {self.edge_rng(w[0])}, not {vertex}")
        colors = [self.color(e) for e in w]
        i = 0
        while i < len(w) - 1:
            if colors[i] > colors[i + 1]:
                w[i], w[i + 1] = self.swap(w[i], w[i + 1])
                colors[i], colors[i + 1] = colors[i + 1], colors[i]
                i = max(i - 1, 0)
            else:
                i += 1
        return self._make(tuple(w))

    def path(self, spec: str | Sequence[str]) -> PathWord:
        """Parse ``"e.f"`` (or a vertex name, or an edge list) into a normal-form path."""
        if isinstance(spec, str):
            if spec in self.vertices:
                return self.vertex(spec)
            spec = spec.split(".")
        return self.normalize(tuple(spec))

    def all_normal_forms(self, word: Sequence[str]) -> set[tuple[str, ...]]:
        """Every sorted word reachable by fixing inversions in any order."""
        start = tuple(word)
        self.check_composable(start)
        seen, stack, finals = {start}, [start], set()
        while stack:
            w = stack.pop()
            moved = False
            for i in range(len(w) - 1):
                if self.color(w[i]) > self.color(w[i + 1]):
                    moved = True
                    c, d = self.swap(w[i], w[i + 1])
                    nxt = w[:i] + (c, d) + w[i + 2:]
                    if nxt not in seen:
                        seen.add(nxt)
                        stack.append(nxt)
            if not moved:
                finals.add(w)
        return finals

    def compose(self, p: PathWord, q: PathWord) -> PathWord:
        if p.src != q.rng:
            raise InvalidInputError(f"cannot compose {p} (source {p.src}) with {q} (range {q.rng})")
        if p.is_vertex():
            return q
        if q.is_vertex():
            return p
        return self.normalize(p.edges + q.edges)

    def reorder(self, word: Sequence[str], target: Sequence[int]) -> tuple[str, ...]:
        """Representative of the same morphism with the given color sequence."""
        w = list(word)
        if sorted(target) != sorted(self.color(e) for e in w):
            raise InvalidInputError("target color sequence has the wrong multiset of colors")
        for i, want in enumerate(target):
            j = i
            while self.color(w[j]) != want:
                j += 1
            while j > i:
                w[j - 1], w[j] = self.swap(w[j - 1], w[j])
                j -= 1
        return tuple(w)

    def factor(self, lam: PathWord, m: Sequence[int]) -> tuple[PathWord, PathWord]:
        """The unique ``(mu, nu)`` with ``lam = mu nu`` and ``d(mu) = m``."""
        m = tuple(m)
        if not leq(m, lam.degree) or any(x < 0 for x in m):
            raise InvalidInputError(f"cannot factor a path of degree {lam.degree} at {m}")
        rest = _sub(lam.degree, m)
        target = [c for c in range(1, self.rank + 1) for _ in range(m[c - 1])]
        target += [c for c in range(1, self.rank + 1) for _ in range(rest[c - 1])]
        w = self.reorder(lam.edges, target)
        k = sum(m)
        head = self._make(w[:k], lam.rng)
        tail = self._make(w[k:], head.src)
        return head, tail

    def segment(self, lam: PathWord, p: Sequence[int], q: Sequence[int]) -> PathWord:
        """``lam(p, q)``."""
        front, _ = self.factor(lam, q)
        _, back = self.factor(front, p)
        return back

    # -- enumeration ------------------------------------------------------

    def enumerate_paths(self, v: str, degree: Sequence[int]) -> list[PathWord]:
        """All paths with range ``v`` and the given degree, in normal form."""
        degree = tuple(degree)
        if len(degree) != self.rank or any(x < 0 for x in degree):
            raise InvalidInputError(f"bad degree {degree} for a rank-{self.rank} graph")
        colors = [c for c in range(1, self.rank + 1) for _ in range(degree[c - 1])]
        out: list[PathWord] = []

        def walk(at: str, i: int, word: tuple[str, ...]) -> None:
            if i == len(colors):
                out.append(self._make(word, v))
                return
            for e in self.edges_into(at, colors[i]):
                walk(self.edge_src(e), i + 1, word + (e,))

        walk(v, 0, ())
        return out

    def degrees_up_to(self, total: int) -> list[tuple[int, ...]]:
        out = [d for d in product(range(total + 1), repeat=self.rank) if sum(d) <= total]
        return sorted(out, key=lambda d: (sum(d), d))

    def paths_up_to(self, total: int, v: str | None = None) -> list[PathWord]:
        verts = self.vertices if v is None else (v,)
        out = []
        for d in self.degrees_up_to(total):
            for u in verts:
                out.extend(self.enumerate_paths(u, d))
        return out

    def category(self) -> KGraphCategory:
        return KGraphCategory(self)

    def __repr__(self) -> str:
        return f"KGraphPresentation(rank={self.rank}, {len(self.vertices)} vertices, {len(self.edges)} edges)"


class KGraphCategory:
    """The path category of a k-graph, seen through the category protocol."""

    def __init__(self, k: KGraphPresentation):
        self.k = k
        self.objects = k.vertices

    def src(self, p: PathWord) -> str:
        return p.src

    def tgt(self, p: PathWord) -> str:
        return p.rng

    def compose(self, p: PathWord, q: PathWord) -> PathWord:
        return self.k.compose(p, q)

    def identity(self, v: str) -> PathWord:
        return self.k.vertex(v)

    def is_identity(self, p: PathWord) -> bool:
        return p.is_vertex()


def bounded_tuples(k: KGraphPresentation, n: int, bound: int, total: bool = False) -> Iterator[tuple[PathWord, ...]]:
    """Composable n-tuples whose components each have total degree <= bound.

    With ``total=True`` the bound applies to the sum over the tuple instead.
    """
    if n == 0:
        yield from k.vertices
        return
    by_range: dict[str, list[PathWord]] = {v: k.paths_up_to(bound, v) for v in k.vertices}

    def walk(prefix: tuple[PathWord, ...], budget: int) -> Iterator:
        if len(prefix) == n:
            yield prefix
            return
        at = prefix[-1].src if prefix else None
        pool = by_range[at] if at is not None else [p for v in k.vertices for p in by_range[v]]
        for p in pool:
            left = budget - p.total_degree if total else budget
            if left < 0:
                continue
            yield from walk(prefix + (p,), left)

    yield from walk((), bound)


def validate_kgraph(k: KGraphPresentation) -> ValidationReport:
    rep = ValidationReport()
    for key in k._duplicates:
        rep.add("bijectivity", f"pair {key[0]} {key[1]} is assigned two different partners", *key)
    for (a, b), (c, d) in k.squares:
        ca, cb, cc, cd = (k.color(e) for e in (a, b, c, d))
        if ca == cb:
            rep.add("square", f"square {a} {b} = {c} {d} is not bi-colored", a, b)
            continue
        if cc != cb or cd != ca:
            rep.add("square", f"square {a} {b} = {c} {d} does not swap the colors", a, b)
        if k.edge_src(a) != k.edge_rng(b) or k.edge_src(c) != k.edge_rng(d):
            rep.add("square", f"square {a} {b} = {c} {d} pairs a non-composable word", a, b)
        if k.edge_rng(a) != k.edge_rng(c) or k.edge_src(b) != k.edge_src(d):
            rep.add("compatibility", f"square {a} {b} = {c} {d} changes the range or source", a, b)
    # Every composable bi-colored pair must have exactly one partner.
    for a in sorted(k.edges):
        for b in sorted(k.edges):
            if k.color(a) != k.color(b) and k.edge_src(a) == k.edge_rng(b) and (a, b) not in k._swap:
                rep.add("bijectivity", f"composable pair {a} {b} has no square", a, b)
    if rep.violations:
        return rep
    if k.rank >= 3:
        for a in sorted(k.edges):
            for b in sorted(k.edges):
                if k.edge_src(a) != k.edge_rng(b):
                    continue
                for c in sorted(k.edges):
                    if k.edge_src(b) != k.edge_rng(c):
                        continue
                    if len({k.color(a), k.color(b), k.color(c)}) < 3:
                        continue
                    forms = k.all_normal_forms((a, b, c))
                    if len(forms) != 1:
                        rep.add("cube", f"word {a}.{b}.{c} has {len(forms)} distinct normal forms", a, b, c)
    rep.notes.append("row-finite: the skeleton is finite")
    for v in k.vertices:
        for color in range(1, k.rank + 1):
            if not k.edges_into(v, color):
                rep.add("no-sources", f"vertex {v} receives no edge of color {color}", v, color)
    return rep


def normalize(k: KGraphPresentation, vertex: str, word: Sequence[str]) -> PathWord:
    return k.normalize(word, vertex)


def compose(k: KGraphPresentation, p: PathWord, q: PathWord) -> PathWord:
    return k.compose(p, q)


def enumerate_paths(k: KGraphPresentation, v: str, degree: Sequence[int]) -> list[PathWord]:
    return k.enumerate_paths(v, degree)


# --------------------------------------------------------------------------
# Cohomology with constant coefficients

def square_relation_matrix(k: KGraphPresentation) -> IntMatrix:
    """One row per square: c(a) + c(b) - c(c) - c(d) on edge values."""
    names = sorted(k.edges)
    idx = {e: i for i, e in enumerate(names)}
    rows = []
    for (a, b), (c, d) in k.squares:
        row = [0] * len(names)
        row[idx[a]] += 1
        row[idx[b]] += 1
        row[idx[c]] -= 1
        row[idx[d]] -= 1
        rows.append(row)
    return IntMatrix(rows, len(names))


def vertex_difference_matrix(k: KGraphPresentation) -> IntMatrix:
    """Edge values of the coboundary of a vertex function: b(src e) - b(rng e)."""
    names = sorted(k.edges)
    vidx = {v: i for i, v in enumerate(k.vertices)}
    rows = []
    for e in names:
        row = [0] * len(k.vertices)
        row[vidx[k.edge_src(e)]] += 1
        row[vidx[k.edge_rng(e)]] -= 1
        rows.append(row)
    return IntMatrix(rows, len(k.vertices))


def h1_constant(k: KGraphPresentation, coefficient: int | AbelianGroupStructure = 1) -> AbelianGroupStructure:
    """``H^1`` with constant coefficients ``Z^r``.

    A 1-cocycle with constant coefficients is additive, so it is determined
    by its edge values subject to one relation per square.
    """
    if isinstance(coefficient, AbelianGroupStructure):
        if coefficient.torsion:
            raise InvalidInputError("h1_constant supports free coefficients Z^r only")
        r = coefficient.free_rank
    else:
        r = int(coefficient)
    sq = square_relation_matrix(k)
    cycles = kernel_basis(sq) if sq.rows else [
        tuple(int(i == j) for i in range(len(k.edges))) for j in range(len(k.edges))
    ]
    vd = vertex_difference_matrix(k)
    one = subquotient_structure(cycles, vd.columns(), len(k.edges))
    return AbelianGroupStructure.from_orders(list(one.orders) * r)


@dataclass
class CocycleVerdict:
    ok: bool
    checked: int
    witness: tuple | None = None
    value: object = None

    def to_json(self) -> dict:
        return {
            "cocycle": self.ok,
            "checked": self.checked,
            "witness": None if self.witness is None else [str(p) for p in self.witness],
            "value": self.value,
        }


def check_cocycle_kgraph(
    k: KGraphPresentation, n: int, c: CategoricalCochain, bound: int = 3
) -> CocycleVerdict:
    """Sweep ``delta~ c`` over all (n+1)-tuples with components of total degree <= bound."""
    if n not in (1, 2):
        raise InvalidInputError("bounded cocycle sweeps are for degrees 1 and 2")
    cat = c.category
    dc = delta_tilde(cat, n, c)
    checked = 0
    for tup in bounded_tuples(k, n + 1, bound):
        checked += 1
        val = dc(*tup)
        if not c.coeffs.is_zero(tup[-1].src, val):
            return CocycleVerdict(False, checked, tup, val)
    return CocycleVerdict(True, checked)


# --------------------------------------------------------------------------
# Common cochains on k-graphs (integer values)

def degree_cochain(k: KGraphPresentation, i: int) -> CategoricalCochain:
    """``c(l) = d(l)_i`` (colors counted from 1)."""
    return CategoricalCochain(1, lambda lam: lam.degree[i - 1], IntegerCoefficients(), k.category(), f"degree{i}")


def bilinear_cochain(k: KGraphPresentation, i: int, j: int) -> CategoricalCochain:
    """``c(l, m) = d(l)_i d(m)_j``; for i=1, j=2 this is the Heisenberg cocycle."""
    return CategoricalCochain(
        2, lambda a, b: a.degree[i - 1] * b.degree[j - 1], IntegerCoefficients(), k.category(), f"bilinear{i}{j}"
    )


def additive_cochain(k: KGraphPresentation, edge_values: Mapping[str, int]) -> CategoricalCochain:
    """The additive 1-cochain with the given edge values (missing edges count 0)."""
    vals = dict(edge_values)
    return CategoricalCochain(
        1, lambda lam: sum(vals.get(e, 0) for e in lam.edges), IntegerCoefficients(), k.category(), "additive"
    )


def vertex_function(k: KGraphPresentation, values: Mapping[str, int]) -> CategoricalCochain:
    vals = dict(values)
    return CategoricalCochain(0, lambda v: vals.get(v, 0), IntegerCoefficients(), k.category(), "vertex")


# --------------------------------------------------------------------------
# Modules given on the skeleton

class KGraphModule(Coefficients):
    """Fibers at vertices and a matrix per edge; paths act by composing edge matrices.

    ``A(e1 ... en) = A(en) ... A(e1)``.  Also usable directly as the
    coefficient system of categorical cochains on the path category.
    """

    def __init__(self, k: KGraphPresentation, fibers: Mapping[str, AbelianGroupStructure], edge_actions: Mapping[str, IntMatrix]):
        self.k = k
        self.fibers = dict(fibers)
        self.edge_actions = dict(edge_actions)

    @classmethod
    def constant(cls, k: KGraphPresentation, group: AbelianGroupStructure | None = None) -> KGraphModule:
        group = group or AbelianGroupStructure(1, ())
        ident = IntMatrix.identity(group.ngens)
        return cls(k, {v: group for v in k.vertices}, {e: ident for e in k.edges})

    def matrix(self, p: PathWord) -> IntMatrix:
        m = IntMatrix.identity(self.fibers[p.rng].ngens)
        for e in p.edges:
            m = self.edge_actions[e] @ m
        return m

    def act(self, p: PathWord, vec):
        out = tuple(vec)
        for e in p.edges:
            out = self.edge_actions[e].apply(out)
        return self.fibers[p.src].reduce(out)

    def zero(self, v):
        return self.fibers[v].zero()

    def combine(self, v, terms):
        g = self.fibers[v]
        acc = [0] * g.ngens
        for kk, a in terms:
            for i, x in enumerate(a):
                acc[i] += kk * x
        return g.reduce(acc)

    def validate(self) -> ValidationReport:
        rep = ValidationReport()
        k = self.k
        for e, (_, s, r) in k.edges.items():
            mat = self.edge_actions.get(e)
            if mat is None:
                rep.add("action", f"no matrix for edge {e}", e)
                continue
            if mat.shape != (self.fibers[s].ngens, self.fibers[r].ngens):
                rep.add("shape", f"matrix for {e} has shape {mat.shape}", e)
                continue
            for j, o in enumerate(self.fibers[r].orders):
                if o and any(self.fibers[s].reduce(tuple(o * x for x in mat.column(j)))):
                    rep.add("well-defined", f"matrix for {e} does not kill generator {j}", e)
        if rep.violations:
            return rep
        for (a, b), (c, d) in k.squares:
            lhs = self.edge_actions[b] @ self.edge_actions[a]
            rhs = self.edge_actions[d] @ self.edge_actions[c]
            if not congruent(lhs, rhs, self.fibers[k.edge_src(b)]):
                rep.add("square", f"A({b})A({a}) != A({d})A({c})", a, b)
        return rep


# --------------------------------------------------------------------------
# Finite path categories

def is_acyclic(k: KGraphPresentation) -> bool:
    state: dict[str, int] = {}

    def visit(v: str) -> bool:
        state[v] = 1
        for e, (_, s, r) in k.edges.items():
            if r == v:
                if state.get(s) == 1:
                    return False
                if s not in state and not visit(s):
                    return False
        state[v] = 2
        return True

    return all(state.get(v) == 2 or visit(v) for v in k.vertices)


def all_paths(k: KGraphPresentation) -> list[PathWord]:
    """Every path of an acyclic k-graph."""
    if not is_acyclic(k):
        raise InvalidInputError("the path category is infinite (the skeleton has a cycle)")
    out: list[PathWord] = []
    total = 0
    while True:
        layer = [p for d in product(range(total + 1), repeat=k.rank) if sum(d) == total
                 for v in k.vertices for p in k.enumerate_paths(v, d)]
        if not layer:
            break
        out.extend(layer)
        total += 1
    return out


def path_name(p: PathWord) -> str:
    return str(p) if p.edges else f"({p.rng})"


def to_finite_category(k: KGraphPresentation) -> tuple[FiniteCategory, dict[str, PathWord]]:
    """Composition table of the path category of an acyclic k-graph.

    Returns the category and the map from morphism names to paths.
    """
    paths = all_paths(k)
    names = {path_name(p): p for p in paths}
    by_range: dict[str, list[PathWord]] = {}
    for p in paths:
        by_range.setdefault(p.rng, []).append(p)
    table = {}
    for p in paths:
        for q in by_range.get(p.src, []):
            table[(path_name(p), path_name(q))] = path_name(k.compose(p, q))
    cat = FiniteCategory(
        k.vertices,
        {path_name(p): (p.src, p.rng) for p in paths},
        {v: path_name(k.vertex(v)) for v in k.vertices},
        table,
    )
    return cat, names
