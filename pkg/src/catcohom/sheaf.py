"""Sheaves over the path groupoid at desk scale.

Stalks of the sheaf induced by a k-graph module are direct limits of the
module fibers along an infinite path.  Along an eventually periodic path
the forward maps repeat with the period of the cycle, so equality in the
limit reduces to membership in a stabilized kernel.

Chains of the two resolutions are :class:`FormalChain` objects over
generators:

* ``P``-generators: tuples ``(g0, ..., gn)`` of composable groupoid elements;
* ``Pbar``-generators: pairs ``(g, (l1, ..., ln))`` with ``g = (x, m, y)``
  and ``s(ln) = r(y)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, Mapping, Sequence

from .bar import IntegerCoefficients
from .chains import FormalChain
from .errors import InvalidInputError, StabilizationError
from .groupoid import ContinuousCochain, GroupoidElement, InfinitePath, _pos, _vmax, composable
from .kgraph import KGraphModule, PathWord, _add, _sub, leq
from .linalg import AbelianGroupStructure, IntMatrix, kernel_basis, solve_integer

STABILIZATION_CAP = 64


# --------------------------------------------------------------------------
# Stalks

def _reference_stage(x: InfinitePath, p: Sequence[int]) -> tuple[int, ...]:
    """Smallest stage ``>= p`` of the form ``prefix + t*period``."""
    r = x.prefix.degree
    while not leq(p, r):
        r = _add(r, x.cycle.degree)
    return r


def _push(module: KGraphModule, x: InfinitePath, p, q, value) -> tuple[int, ...]:
    if p == q:
        return tuple(value)
    return module.act(x.segment(p, q), value)


def _kernel_of_power(group: AbelianGroupStructure, power: IntMatrix) -> list[tuple[int, ...]]:
    """Generators of ``{v : power v = 0 in group}``."""
    g = group.ngens
    rel = group.relations()
    block = power.hstack(rel) if rel.cols else power
    return [tuple(v[:g]) for v in kernel_basis(block)] + [tuple(c) for c in rel.columns()]


def stabilized_power(module: KGraphModule, x: InfinitePath) -> tuple[IntMatrix, AbelianGroupStructure]:
    """``T^n`` for the period map ``T`` at the reference stage, with ``ker T^n`` stable."""
    cache = module.__dict__.setdefault("_stable_cache", {})
    if x in cache:
        return cache[x]
    r = x.prefix.degree
    period = x.segment(r, _add(r, x.cycle.degree))
    group = module.fibers[period.rng]
    t = module.matrix(period)
    power = IntMatrix.identity(group.ngens)
    for _ in range(STABILIZATION_CAP):
        nxt = t @ power
        # ker T^n is contained in ker T^(n+1); equal once T^n kills all of ker T^(n+1).
        if all(not any(group.reduce(power.apply(v))) for v in _kernel_of_power(group, nxt)):
            cache[x] = (power, group)
            return power, group
        power = nxt
    raise StabilizationError(f"kernel chain along {x} did not stabilize within {STABILIZATION_CAP} steps")


@dataclass(frozen=True)
class StalkElement:
    """``phi^x_p(a)``: the class of ``a`` in the fiber at ``x(p)``."""

    module: KGraphModule
    x: InfinitePath
    stage: tuple[int, ...]
    value: tuple[int, ...]

    @classmethod
    def make(cls, module: KGraphModule, x: InfinitePath, stage: Sequence[int], value: Sequence[int]) -> StalkElement:
        stage = tuple(stage)
        group = module.fibers[x.vertex_at(stage)]
        if len(value) != group.ngens:
            raise InvalidInputError(f"value {tuple(value)} does not fit the fiber {group}")
        return cls(module, x, stage, group.reduce(value))

    def at_stage(self, q: Sequence[int]) -> tuple[int, ...]:
        q = tuple(q)
        if not leq(self.stage, q):
            raise InvalidInputError("can only push to a later stage")
        return _push(self.module, self.x, self.stage, q, self.value)

    def reference(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        r = _reference_stage(self.x, self.stage)
        return r, self.at_stage(r)

    def is_zero(self) -> bool:
        _, v = self.reference()
        # Every stage is dominated by a reference stage r + t*period, so the
        # class vanishes iff some power of the period map kills v.
        # Reference stages all carry the same fiber and period map.
        power, group = stabilized_power(self.module, self.x)
        return not any(group.reduce(power.apply(v)))


def _check_same(s1: StalkElement, s2: StalkElement) -> None:
    if s1.module is not s2.module:
        raise InvalidInputError("stalk elements come from different modules")
    if s1.x != s2.x:
        raise InvalidInputError("stalk elements live over different paths")


def stalk_add(s1: StalkElement, s2: StalkElement, k: int = 1) -> StalkElement:
    """``s1 + k*s2`` computed at the larger of the two stages."""
    _check_same(s1, s2)
    q = _vmax(s1.stage, s2.stage)
    a, b = s1.at_stage(q), s2.at_stage(q)
    return StalkElement.make(s1.module, s1.x, q, [u + k * w for u, w in zip(a, b)])


def stalk_eq(s1: StalkElement, s2: StalkElement) -> bool:
    return stalk_add(s1, s2, -1).is_zero()


def act(g: GroupoidElement, s: StalkElement) -> StalkElement:
    """``(x, n, y) . phi^y_q(b) = phi^x_p(b')`` after aligning stages along ``g``."""
    if s.x != g.y:
        raise InvalidInputError("stalk element is not over the source of the groupoid element")
    l, j = g.lags()
    t = _pos(_sub(s.stage, j))
    value = s.at_stage(_add(j, t))
    return StalkElement.make(s.module, g.x, _add(l, t), value)


@dataclass(frozen=True)
class BasicOpenSet:
    """``S_{a, lam}``: classes of ``a`` at stage ``d(lam)`` on paths extending ``lam``."""

    value: tuple[int, ...]
    lam: PathWord


def basic_open_contains(S: BasicOpenSet, s: StalkElement) -> bool:
    if not s.x.extends(S.lam):
        return False
    return stalk_eq(s, StalkElement.make(s.module, s.x, S.lam.degree, S.value))


# --------------------------------------------------------------------------
# Module morphisms and exactness

class KGraphModuleMorphism:
    """A natural transformation between k-graph modules, one matrix per vertex."""

    def __init__(self, source: KGraphModule, target: KGraphModule, components: Mapping[str, IntMatrix]):
        self.source, self.target = source, target
        self.components = dict(components)
        self.check_natural()

    def check_natural(self) -> None:
        k = self.source.k
        for v in k.vertices:
            if v not in self.components:
                raise InvalidInputError(f"missing component at vertex {v}")
            comp = self.components[v]
            if comp.shape != (self.target.fibers[v].ngens, self.source.fibers[v].ngens):
                raise InvalidInputError(f"component at {v} has the wrong shape")
            for rel in self.source.fibers[v].relations().columns():
                if any(self.target.fibers[v].reduce(comp.apply(rel))):
                    raise InvalidInputError(f"component at {v} does not respect the relations")
        for e in sorted(k.edges):
            _, s, r = k.edges[e]
            word = k.path(e)
            for col in IntMatrix.identity(self.source.fibers[r].ngens).columns():
                lhs = self.target.act(word, self.components[r].apply(col))
                rhs = self.target.fibers[s].reduce(self.components[s].apply(self.source.act(word, col)))
                if lhs != rhs:
                    raise InvalidInputError(f"morphism is not natural along edge {e}")

    def apply(self, v: str, value: Sequence[int]) -> tuple[int, ...]:
        return self.target.fibers[v].reduce(self.components[v].apply(value))

    def then(self, other: KGraphModuleMorphism) -> KGraphModuleMorphism:
        """``other o self``."""
        return KGraphModuleMorphism(
            self.source,
            other.target,
            {v: other.components[v] @ self.components[v] for v in self.source.k.vertices},
        )

    @classmethod
    def identity(cls, module: KGraphModule) -> KGraphModuleMorphism:
        return cls(module, module, {v: IntMatrix.identity(g.ngens) for v, g in module.fibers.items()})


def module_morphism_to_sheaf(eta: KGraphModuleMorphism, s: StalkElement) -> StalkElement:
    """``[a] -> [eta(a)]`` on stalks."""
    if s.module is not eta.source:
        raise InvalidInputError("stalk element is not from the source module")
    return StalkElement.make(eta.target, s.x, s.stage, eta.apply(s.x.vertex_at(s.stage), s.value))


@dataclass
class ExactnessVerdict:
    ok: bool
    checked: int
    failure: str | None = None

    def to_json(self) -> dict:
        return {"exact": self.ok, "checked": self.checked, "failure": self.failure}


def _box(n: int, radius: int):
    return product(range(-radius, radius + 1), repeat=n)


def exactness_probe(
    alpha: KGraphModuleMorphism,
    beta: KGraphModuleMorphism,
    paths: Sequence[InfinitePath],
    radius: int = 2,
    max_push: int = 8,
) -> ExactnessVerdict:
    """Check ``0 -> A -> B -> C -> 0`` is exact on stalks at each path.

    Fiber values are drawn from a box of the given radius at the reference
    stage; kernel elements are pushed forward until they lift.
    """
    A, B, C = alpha.source, alpha.target, beta.target
    if beta.source is not B:
        raise InvalidInputError("the two morphisms do not compose")
    checked = 0
    for x in paths:
        r = x.prefix.degree
        period = x.cycle.degree
        v = x.vertex_at(r)
        for a in _box(A.fibers[v].ngens, radius):
            checked += 1
            sa = StalkElement.make(A, x, r, a)
            image = module_morphism_to_sheaf(alpha, sa)
            if image.is_zero() and not sa.is_zero():
                return ExactnessVerdict(False, checked, f"{x}: {a} is killed by the first map")
            if not module_morphism_to_sheaf(beta, image).is_zero():
                return ExactnessVerdict(False, checked, f"{x}: composite is nonzero on {a}")
        for b in _box(B.fibers[v].ngens, radius):
            checked += 1
            sb = StalkElement.make(B, x, r, b)
            if not module_morphism_to_sheaf(beta, sb).is_zero():
                continue
            stage, found = r, False
            for _ in range(max_push):
                val = sb.at_stage(stage)
                w = x.vertex_at(stage)
                grel = B.fibers[w].relations()
                system = alpha.components[w].hstack(grel) if grel.cols else alpha.components[w]
                if solve_integer(system, val) is not None:
                    found = True
                    break
                stage = _add(stage, period)
            if not found:
                return ExactnessVerdict(False, checked, f"{x}: {b} is in the kernel but has no preimage")
        for c in _box(C.fibers[v].ngens, radius):
            checked += 1
            sc = StalkElement.make(C, x, r, c)
            stage, found = r, False
            for _ in range(max_push):
                w = x.vertex_at(stage)
                crel = C.fibers[w].relations()
                system = beta.components[w].hstack(crel) if crel.cols else beta.components[w]
                if solve_integer(system, sc.at_stage(stage)) is not None:
                    found = True
                    break
                stage = _add(stage, period)
            if not found:
                return ExactnessVerdict(False, checked, f"{x}: {c} has no preimage")
    return ExactnessVerdict(True, checked)


# --------------------------------------------------------------------------
# The resolution P_n = Z[G^(n+1)]

def _check_p(n: int, chain: FormalChain) -> None:
    for gen in chain:
        if len(gen) != n + 1:
            raise InvalidInputError(f"generator has {len(gen)} entries, expected {n + 1}")
        if not composable(gen):
            raise InvalidInputError("generator is not composable")


def apply_partial(n: int, chain: FormalChain):
    """``partial_n``; for n = 0 the augmentation, returned as an int."""
    _check_p(n, chain)
    if n == 0:
        return sum(k for _, k in chain.items())

    def boundary(gen):
        terms = {gen[:-1]: (-1) ** n}
        for i in range(1, n + 1):
            merged = gen[: i - 1] + (gen[i - 1].compose(gen[i]),) + gen[i + 1:]
            terms[merged] = terms.get(merged, 0) + (-1) ** (i - 1)
        return FormalChain(terms)

    return chain.map_linear(boundary)


def apply_homotopy_P(n: int, chain, base: InfinitePath | None = None) -> FormalChain:
    """``s_n[g0, ..., gn] = [r(g0), g0, ..., gn]``; ``s_-1`` sends ``k`` to ``k[x]``."""
    if n == -1:
        if base is None:
            raise InvalidInputError("s_-1 needs the base path")
        return FormalChain.generator((GroupoidElement.unit(base),), int(chain))
    _check_p(n, chain)
    return chain.map_linear(lambda gen: FormalChain.generator((GroupoidElement.unit(gen[0].x),) + gen))


def act_P(g: GroupoidElement, chain: FormalChain) -> FormalChain:
    """Left action on ``P_n``: ``g . [g0, ...] = [g g0, ...]``."""
    return chain.map_linear(lambda gen: FormalChain.generator((g.compose(gen[0]),) + gen[1:]))


# --------------------------------------------------------------------------
# The resolution Pbar^n built from the bar complex

def _step(y: InfinitePath, lam: PathWord) -> GroupoidElement:
    """``(y, -d(lam), lam y)``."""
    return GroupoidElement.from_presentation(y.k.vertex(y.rng), lam, y)


def _check_pbar(n: int, chain: FormalChain) -> None:
    for g, lams in chain:
        if len(lams) != n:
            raise InvalidInputError(f"generator has {len(lams)} paths, expected {n}")
        if n and lams[-1].src != g.y.rng:
            raise InvalidInputError("last path does not end at the range of the tail")
        for a, b in zip(lams, lams[1:]):
            if a.src != b.rng:
                raise InvalidInputError("paths are not composable")


def apply_underline_d(n: int, chain: FormalChain):
    """``dbar_n``; for n = 0 the augmentation, returned as an int."""
    _check_pbar(n, chain)
    if n == 0:
        return sum(k for _, k in chain.items())

    def boundary(gen):
        g, lams = gen
        k = g.k
        terms: dict = {}

        def add(key, coeff):
            terms[key] = terms.get(key, 0) + coeff

        add((g, lams[1:]), 1)
        for j in range(1, n):
            merged = lams[: j - 1] + (k.compose(lams[j - 1], lams[j]),) + lams[j + 1:]
            add((g, merged), (-1) ** j)
        last = lams[-1]
        add((g.compose(_step(g.y, last)), lams[:-1]), (-1) ** n)
        return FormalChain(terms)

    return chain.map_linear(boundary)


def act_pbar(g: GroupoidElement, chain: FormalChain) -> FormalChain:
    """``(x, m, y) . [(y, l, z), lams] = [(x, m + l, z), lams]``."""
    return chain.map_linear(lambda gen: FormalChain.generator((g.compose(gen[0]), gen[1])))


def psi(n: int, gen) -> FormalChain:
    """``psi_n[(x,m,y), (l1..ln)] = (-1)^ceil(n/2) [g0, ..., gn]``.

    ``g1 = (y, -d(ln), ln y)`` and ``gi = (l_{n-i+2}..ln y, -d(l_{n-i+1}), l_{n-i+1}..ln y)``.
    """
    g, lams = gen
    if len(lams) != n:
        raise InvalidInputError("degree mismatch")
    out = [g]
    tail = g.y
    for lam in reversed(lams):
        step = _step(tail, lam)
        out.append(step)
        tail = step.y
    sign = -1 if (n + 1) // 2 % 2 else 1
    return FormalChain.generator(tuple(out), sign)


def apply_psi(n: int, chain: FormalChain) -> FormalChain:
    _check_pbar(n, chain)
    return chain.map_linear(lambda gen: psi(n, gen))


# --------------------------------------------------------------------------
# Cochains on P_n

class EquivariantCochain:
    """A function on ``P_n``-generators, extended linearly to chains."""

    def __init__(self, degree: int, fn: Callable, coeffs=None, action=None):
        self.degree = degree
        self._fn = fn
        self.coeffs = coeffs or IntegerCoefficients()
        self.action = action or (lambda g, value: value)

    def __call__(self, gen):
        return self._fn(tuple(gen))

    def on_chain(self, chain, base: InfinitePath):
        if isinstance(chain, int):
            raise InvalidInputError("cochains are evaluated on chains, not augmentations")
        return self.coeffs.combine(base.rng, [(k, self(gen)) for gen, k in chain.items()])


def xi(n: int, f: EquivariantCochain, unit: Callable = GroupoidElement.unit) -> ContinuousCochain:
    """``xi f(g1..gn) = f([r(g1), g1..gn])``; ``xi f(x) = f([x])`` for n = 0.

    ``unit`` maps a point of the unit space to its unit element.
    """
    if f.degree != n:
        raise InvalidInputError("degree mismatch")
    if n == 0:
        return ContinuousCochain(0, lambda x: f((unit(x),)), f.coeffs, f.action)
    return ContinuousCochain(n, lambda *gs: f((unit(gs[0].x),) + tuple(gs)), f.coeffs, f.action)


def eta_g(n: int, f: ContinuousCochain) -> EquivariantCochain:
    """``eta f([g0..gn]) = g0 . f(g1..gn)``; ``eta f([g]) = g . f(s(g))`` for n = 0."""
    if f.degree != n:
        raise InvalidInputError("degree mismatch")
    if n == 0:
        return EquivariantCochain(0, lambda gen: f.action(gen[0], f(gen[0].y)), f.coeffs, f.action)
    return EquivariantCochain(n, lambda gen: f.action(gen[0], f(*gen[1:])), f.coeffs, f.action)


def boundary_pullback(n: int, f: EquivariantCochain) -> EquivariantCochain:
    """``f o partial_(n+1)``."""
    return EquivariantCochain(
        n + 1,
        lambda gen: f.on_chain(apply_partial(n + 1, FormalChain.generator(gen)), gen[0].x),
        f.coeffs,
        f.action,
    )


def psi_pullback(n: int, f: EquivariantCochain) -> Callable:
    """``psi_n^* f`` as a function on ``Pbar^n``-generators."""
    return lambda gen: f.on_chain(psi(n, gen), gen[0].x)
