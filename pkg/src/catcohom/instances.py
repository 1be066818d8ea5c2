"""Built-in categories, k-graphs and modules used by the suite and the tests."""
from __future__ import annotations

from itertools import product

from .category import FiniteCategory, LambdaModule
from .kgraph import KGraphModule, KGraphPresentation
from .linalg import AbelianGroupStructure, IntMatrix


def b2() -> KGraphPresentation:
    """The 1-graph with one vertex and two loops."""
    return KGraphPresentation(1, ["v"], {"f": (1, "v", "v"), "g": (1, "v", "v")})


def one_loop() -> KGraphPresentation:
    """The 1-graph with one vertex and one loop."""
    return KGraphPresentation(1, ["v"], {"e": (1, "v", "v")})


def torus() -> KGraphPresentation:
    """T^2: one vertex, one loop of each color, ``ef = fe``."""
    return KGraphPresentation(
        2, ["v"], {"e": (1, "v", "v"), "f": (2, "v", "v")}, [(("e", "f"), ("f", "e"))]
    )


def two_vertex() -> KGraphPresentation:
    """A 2-graph on two vertices where every edge swaps the vertices."""
    return KGraphPresentation(
        2,
        ["u", "w"],
        {
            "e1": (1, "w", "u"),
            "e2": (1, "u", "w"),
            "f1": (2, "w", "u"),
            "f2": (2, "u", "w"),
        },
        [(("e1", "f2"), ("f1", "e2")), (("e2", "f1"), ("f2", "e1"))],
    )


def parallel_edges() -> KGraphPresentation:
    """A one-vertex 2-graph with two edges of each color and a twisted square table."""
    loops = {"e1": (1, "v", "v"), "e2": (1, "v", "v"), "f1": (2, "v", "v"), "f2": (2, "v", "v")}
    squares = [
        (("e1", "f1"), ("f1", "e2")),
        (("e1", "f2"), ("f2", "e1")),
        (("e2", "f1"), ("f1", "e1")),
        (("e2", "f2"), ("f2", "e2")),
    ]
    return KGraphPresentation(2, ["v"], loops, squares)


def ex47_graph(n: int) -> KGraphPresentation:
    """The counterexample 1-graph cut at vertex ``v_n``.

    ``f, g: v1 -> v0`` and ``e_i: v_{i+1} -> v_i`` for ``i < n``.
    """
    if n < 1:
        raise ValueError("truncation depth must be at least 1")
    vertices = [f"v{i}" for i in range(n + 1)]
    edges = {"f": (1, "v1", "v0"), "g": (1, "v1", "v0")}
    for i in range(1, n):
        edges[f"e{i}"] = (1, f"v{i + 1}", f"v{i}")
    return KGraphPresentation(1, vertices, edges)


def z2_category() -> FiniteCategory:
    """The group Z/2 as a one-object category."""
    return FiniteCategory(
        ["*"],
        {"1": ("*", "*"), "t": ("*", "*")},
        {"*": "1"},
        {("1", "1"): "1", ("1", "t"): "t", ("t", "1"): "t", ("t", "t"): "1"},
    )


def _grid_name(p: tuple[int, ...]) -> str:
    return "".join(str(a) for a in p)


def omega(k: int = 2, size: int = 2) -> FiniteCategory:
    """``Omega_k`` cut to objects in ``[0, size]^k``.

    Morphisms are pairs ``(m, n)`` with ``m <= n``; ``r = m``, ``s = n`` and
    ``(m, n)(n, p) = (m, p)``.
    """
    points = list(product(range(size + 1), repeat=k))
    objects = [f"p{_grid_name(p)}" for p in points]
    pairs = [(m, n) for m in points for n in points if all(a <= b for a, b in zip(m, n))]
    name = lambda m, n: f"w{_grid_name(m)}_{_grid_name(n)}"
    morphisms = {name(m, n): (f"p{_grid_name(n)}", f"p{_grid_name(m)}") for m, n in pairs}
    identities = {f"p{_grid_name(m)}": name(m, m) for m in points}
    table = {}
    for m, n in pairs:
        for n2, p in pairs:
            if n2 == n:
                table[(name(m, n), name(n, p))] = name(m, p)
    return FiniteCategory(objects, morphisms, identities, table)


def integers() -> AbelianGroupStructure:
    return AbelianGroupStructure(1, ())


def cyclic(n: int) -> AbelianGroupStructure:
    return AbelianGroupStructure.from_orders([n])


def z2_constant() -> LambdaModule:
    return LambdaModule.constant(z2_category())


def torus_module() -> KGraphModule:
    """``Z^2`` on T^2 with ``A(e) = [[1,1],[0,1]]`` and ``A(f) = 2I``; the two commute."""
    k = torus()
    z2 = AbelianGroupStructure(2, ())
    return KGraphModule(
        k, {"v": z2}, {"e": IntMatrix([[1, 1], [0, 1]]), "f": IntMatrix([[2, 0], [0, 2]])}
    )


def dyadic_module(factor: int = 2) -> KGraphModule:
    """``Z`` on the one-loop 1-graph with the loop acting by ``factor``."""
    k = one_loop()
    return KGraphModule(k, {"v": integers()}, {"e": IntMatrix([[factor]])})


KGRAPHS = {
    "b2": b2,
    "torus": torus,
    "one-loop": one_loop,
    "two-vertex": two_vertex,
    "parallel-edges": parallel_edges,
}
