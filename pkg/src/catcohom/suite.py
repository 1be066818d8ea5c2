"""Worked instances: the non-injectivity counterexample and the translation identities.

Each check returns a :class:`SuiteItem`; the CLI renders lists of them.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Iterator, Sequence

from .bar import CategoricalCochain, IntegerCoefficients, ModuleCoefficients, check_cocycle_finite, cohomology_finite, is_coboundary, normalize_cocycle
from .category import LambdaModule
from .errors import InvalidInputError
from .groupoid import ContinuousCochain, GroupoidElement, InfinitePath, delta_c, sample_paths, sigma0, sigma1, sigma2
from .instances import b2, ex47_graph, torus, two_vertex
from .kgraph import (
    KGraphPresentation,
    PathWord,
    additive_cochain,
    bilinear_cochain,
    bounded_tuples,
    degree_cochain,
    h1_constant,
    to_finite_category,
    vertex_function,
)
from .sheaf import eta_g, psi_pullback

GROUPOID_SEED = 4747
IDENTITY_SEED = 4546


@dataclass
class SuiteItem:
    name: str
    status: str
    payload: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def to_json(self) -> dict:
        return {"name": self.name, "status": self.status, "payload": self.payload}


def _status(flag: bool) -> str:
    return "ok" if flag else "violation"


# --------------------------------------------------------------------------
# The counterexample family, cut at depth N

@dataclass(frozen=True, order=True)
class Ex47Path:
    """``x+ = f e1 e2 ...``, ``x- = g e1 e2 ...`` or ``w_n = e_n e_(n+1) ...``."""

    level: int
    name: str

    @property
    def rng(self) -> str:
        return f"v{self.level}"

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True, order=True)
class Ex47Element:
    """``(x, m, y)`` with ``m = level(y) - level(x)``."""

    x: Ex47Path
    m: int
    y: Ex47Path

    def compose(self, other: Ex47Element) -> Ex47Element:
        if self.y != other.x:
            raise InvalidInputError("source of the first element differs from the range of the second")
        return Ex47Element(self.x, self.m + other.m, other.y)

    def inverse(self) -> Ex47Element:
        return Ex47Element(self.y, -self.m, self.x)

    def is_unit(self) -> bool:
        return self.x == self.y and self.m == 0

    def __repr__(self) -> str:
        return f"({self.x}, {self.m}, {self.y})"


class Ex47Instance:
    """The counterexample 1-graph and its path groupoid, cut at vertex ``v_N``."""

    def __init__(self, n: int):
        if n < 2:
            raise InvalidInputError("the counterexample needs truncation depth N >= 2")
        self.n = n
        self.graph = ex47_graph(n)
        self.plus = Ex47Path(0, "x+")
        self.minus = Ex47Path(0, "x-")
        self.paths = [self.plus, self.minus] + [Ex47Path(i, f"w{i}") for i in range(1, n + 1)]

    def unit(self, x: Ex47Path) -> Ex47Element:
        return Ex47Element(x, 0, x)

    def element(self, x: Ex47Path, y: Ex47Path) -> Ex47Element:
        return Ex47Element(x, y.level - x.level, y)

    def elements(self) -> list[Ex47Element]:
        return [self.element(x, y) for x in self.paths for y in self.paths]

    def composable_tuples(self, n: int) -> Iterator[tuple[Ex47Element, ...]]:
        """All composable n-tuples; paths for n = 0."""
        if n == 0:
            yield from self.paths
            return
        for chain in product(self.paths, repeat=n + 1):
            yield tuple(self.element(a, b) for a, b in zip(chain, chain[1:]))

    def initial(self, x: Ex47Path, q: int) -> PathWord:
        """``x(0, q)`` inside the cut graph."""
        if x not in self.paths:
            raise InvalidInputError(f"{x!r} is not one of the enumerated paths")
        if x.level + q > self.n:
            raise InvalidInputError(f"segment of length {q} from {x!r} leaves the cut graph")
        if q == 0:
            return self.graph.vertex(x.rng)
        if x.level == 0:
            head = "f" if x == self.plus else "g"
            return self.graph.path([head] + [f"e{i}" for i in range(1, q)])
        return self.graph.path([f"e{i}" for i in range(x.level, x.level + q)])

    def presentation(self, g: Ex47Element) -> tuple[PathWord, PathWord]:
        """``(x(0, l), y(0, j))`` with ``sigma^l x = sigma^j y``."""
        top = max(1, g.x.level, g.y.level)
        return self.initial(g.x, top - g.x.level), self.initial(g.y, top - g.y.level)

    def generator_cocycle(self) -> CategoricalCochain:
        """``c(l) = 1`` iff ``l = f e1 ... e_j``, on the path category of the cut graph."""
        return CategoricalCochain(1, lambda lam: int(_is_f_path(lam)), IntegerCoefficients(), self.graph.category(), "c")

    def sigma1(self, c: CategoricalCochain) -> ContinuousCochain:
        def fn(g: Ex47Element):
            lam, mu = self.presentation(g)
            return c(lam) - c(mu)

        return ContinuousCochain(1, fn, name="sigma1")


def _is_f_path(lam: PathWord) -> bool:
    return bool(lam.edges) and lam.edges[0] == "f" and all(
        e == f"e{i}" for i, e in enumerate(lam.edges[1:], start=1)
    )


def b_c_counterexample(inst: Ex47Instance, c: ContinuousCochain, x: Ex47Path) -> int:
    """``b_c(x) = c(x, -n, x+)`` and ``b_c(x+) = 0``."""
    if x not in inst.paths:
        raise InvalidInputError(f"{x!r} is not one of the enumerated paths")
    if x == inst.plus:
        return 0
    return c(inst.element(x, inst.plus))


def counterexample_kgraph_side(n: int = 10, multiples: Sequence[int] = (1, 2, 3, 4, 5)) -> SuiteItem:
    inst = Ex47Instance(n)
    cat, names = to_finite_category(inst.graph)
    module = LambdaModule.constant(cat)
    coeffs = ModuleCoefficients(module)
    c = CategoricalCochain(1, lambda m: (int(_is_f_path(names[m])),), coeffs, cat, "c")
    cocycle = check_cocycle_finite(cat, 1, c) is None
    witnesses = {}
    for k in multiples:
        witnesses[k] = is_coboundary(cat, module, 1, c.scale(k))
    zero_witness = is_coboundary(cat, module, 1, c.scale(0))
    zero_ok = zero_witness is not None and all(not any(zero_witness(v)) for v in cat.objects)
    h1 = cohomology_finite(cat, module, 1)
    ok = cocycle and all(w is None for w in witnesses.values()) and zero_ok
    return SuiteItem(
        "counterexample-kgraph-side",
        _status(ok),
        {
            "N": n,
            "cocycle": cocycle,
            "c(f)": c("f")[0],
            "c(g)": c("g")[0],
            "coboundary_found": {str(k): w is not None for k, w in witnesses.items()},
            "zero_multiple_potential_is_zero": zero_ok,
            "obstruction": "n = n c(f) = b(v0) - b(v1) = n c(g) = 0",
            "h1": h1.to_json(),
        },
    )


def _check_potential(inst: Ex47Instance, c: ContinuousCochain) -> tuple[bool, bool, object]:
    """Whether ``c`` is additive, and whether ``c(x,m,y) = b_c(x) - b_c(y)`` everywhere."""
    for g, h in inst.composable_tuples(2):
        if c(g.compose(h)) != c(g) + c(h):
            return False, False, (g, h)
    b = {x: b_c_counterexample(inst, c, x) for x in inst.paths}
    minus_b = ContinuousCochain(0, lambda x: -b[x])
    for g in inst.elements():
        if c(g) != b[g.x] - b[g.y] or delta_c(0, minus_b, (g,)) != c(g):
            return True, False, g
    return True, True, None


def counterexample_groupoid_side(n: int = 10, trials: int = 20, seed: int = GROUPOID_SEED) -> SuiteItem:
    inst = Ex47Instance(n)
    rng = random.Random(seed)
    cases: list[tuple[str, ContinuousCochain]] = [
        ("sigma1(c)", inst.sigma1(inst.generator_cocycle())),
        ("zero", ContinuousCochain(1, lambda g: 0)),
    ]
    for t in range(trials):
        pot = {x: rng.randint(-9, 9) for x in inst.paths}
        cases.append((f"random-{t}", ContinuousCochain(1, lambda g, p=pot: p[g.y] - p[g.x])))
    results = {}
    ok = True
    for name, c in cases:
        additive, recovered, witness = _check_potential(inst, c)
        results[name] = {"cocycle": additive, "coboundary": recovered}
        if witness is not None:
            results[name]["witness"] = repr(witness)
        ok = ok and additive and recovered
    return SuiteItem(
        "counterexample-groupoid-side",
        _status(ok),
        {"N": n, "seed": seed, "elements": len(inst.elements()), "cases": results},
    )


# --------------------------------------------------------------------------
# Random data on k-graph path groupoids

class Sampler:
    """Seeded random groupoid elements and resolution generators."""

    def __init__(self, k: KGraphPresentation, seed: int, max_path: int = 2):
        self.k = k
        self.rng = random.Random(seed)
        self.tails = sample_paths(k)
        self.paths = k.paths_up_to(max_path)
        self._ending: dict[str, list[PathWord]] = {}
        for p in self.paths:
            self._ending.setdefault(p.src, []).append(p)

    def ending_at(self, v: str) -> list[PathWord]:
        return self._ending[v]

    def element(self, tail: InfinitePath | None = None) -> GroupoidElement:
        t = tail or self.rng.choice(self.tails)
        pool = self.ending_at(t.rng)
        return GroupoidElement.from_presentation(self.rng.choice(pool), self.rng.choice(pool), t)

    def element_from(self, x: InfinitePath) -> GroupoidElement:
        """A random element with range ``x``."""
        lam_deg = self.rng.choice([p.degree for p in self.paths])
        lam = x.initial(lam_deg)
        tail = x.shift(lam_deg)
        mu = self.rng.choice(self.ending_at(tail.rng))
        return GroupoidElement.from_presentation(lam, mu, tail)

    def composable(self, n: int) -> tuple[GroupoidElement, ...]:
        out = [self.element()]
        while len(out) < n:
            out.append(self.element_from(out[-1].y))
        return tuple(out)

    def pbar_generator(self, n: int) -> tuple[GroupoidElement, tuple[PathWord, ...]]:
        g = self.element()
        lams: list[PathWord] = []
        v = g.y.rng
        for _ in range(n):
            lam = self.rng.choice(self.ending_at(v))
            lams.append(lam)
            v = lam.rng
        return g, tuple(reversed(lams))


def _identity_item(name: str, lhs: Callable, rhs: Callable, gens: Sequence) -> SuiteItem:
    failures = [g for g in gens if lhs(g) != rhs(g)]
    payload = {"samples": len(gens), "failures": len(failures)}
    if failures:
        payload["first_failure"] = repr(failures[0])
    return SuiteItem(name, _status(not failures), payload)


def paper_identity_suite(samples: int = 100, seed: int = IDENTITY_SEED) -> list[SuiteItem]:
    """``psi^* eta sigma`` against the categorical cochain in degrees 0, 1 and 2."""
    items: list[SuiteItem] = []
    for label, k in (("torus", torus()), ("two-vertex", two_vertex()), ("b2", b2())):
        sampler = Sampler(k, seed)
        rng = random.Random(seed + 1)
        # Degree 0: vertex functions.
        f = vertex_function(k, {v: rng.randint(-5, 5) for v in k.vertices})
        gens = [sampler.pbar_generator(0) for _ in range(samples)]
        lhs = psi_pullback(0, eta_g(0, sigma0(f)))
        items.append(_identity_item(f"{label}/degree0/vertex-function", lhs, lambda g: f(g[0].y.rng), gens))
        # Degree 1: degree coordinates and random edge values.
        cocycles = [(f"degree{i}", degree_cochain(k, i)) for i in range(1, k.rank + 1)]
        for t in range(3):
            vals = {e: rng.randint(-4, 4) for e in k.edges}
            c = additive_cochain(k, vals)
            if all(c(k.compose(k.path(a), k.path(b))) == c(k.path(c_)) + c(k.path(d)) for (a, b), (c_, d) in k.squares):
                cocycles.append((f"edge-values-{t}", c))
        for cname, c in cocycles:
            gens = [sampler.pbar_generator(1) for _ in range(samples)]
            lhs = psi_pullback(1, eta_g(1, sigma1(c)))
            items.append(_identity_item(f"{label}/degree1/{cname}", lhs, lambda g, c=c: c(*g[1]), gens))
        # Degree 2: the product of degree coordinates, normalized.
        i, j = (1, 2) if k.rank >= 2 else (1, 1)
        c2 = normalize_cocycle(k.category(), 2, bilinear_cochain(k, i, j), bounded_tuples(k, 2, 2))
        gens = [sampler.pbar_generator(2) for _ in range(samples)]
        lhs = psi_pullback(2, eta_g(2, sigma2(c2)))
        items.append(_identity_item(f"{label}/degree2/bilinear{i}{j}", lhs, lambda g: c2(*g[1]), gens))
    return items


def b2_item() -> SuiteItem:
    h1 = h1_constant(b2())
    return SuiteItem(
        "b2-h1",
        _status(h1.free_rank == 2 and not h1.torsion),
        {
            "h1": h1.to_json(),
            "groupoid_side": "not computed: the infinite path space of B2 is a full shift",
        },
    )


def run_all(n: int = 10) -> list[SuiteItem]:
    return [b2_item(), counterexample_kgraph_side(n), counterexample_groupoid_side(n)] + paper_identity_suite()
