"""Eventually periodic infinite paths and the path groupoid.

An eventually periodic path is ``prefix . cycle . cycle . ...``.  Every
coordinate of the cycle's degree must be positive, so that repeating the
cycle eventually covers every degree; with that restriction segments,
shifts and equality are all computable.  Paths are stored in a canonical
form (smallest period, then smallest prefix), so equality and hashing are
structural.

Groupoid elements are triples ``(x, n, y)`` meaning ``sigma^l(x) =
sigma^j(y)`` for some ``l - j = n``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, Iterable, Sequence

from .bar import CategoricalCochain, Coefficients, IntegerCoefficients
from .errors import DepthExhaustedError, InvalidInputError, NotACocycleError, UnsupportedElementError
from .kgraph import KGraphPresentation, PathWord, _add, _sub, check_cocycle_kgraph, leq

DEFAULT_DEPTH = 8


def _vmax(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    return tuple(max(x, y) for x, y in zip(a, b))


def _pos(a: Sequence[int]) -> tuple[int, ...]:
    return tuple(max(x, 0) for x in a)


class _PathEngine:
    """Per-graph caches for segment computations."""

    _engines: dict[int, _PathEngine] = {}

    def __init__(self, k: KGraphPresentation):
        self.k = k
        self.initial_cache: dict = {}
        self.canon_cache: dict = {}

    @classmethod
    def of(cls, k: KGraphPresentation) -> _PathEngine:
        eng = getattr(k, "_path_engine", None)
        if eng is None:
            eng = cls(k)
            k._path_engine = eng
        return eng

    def initial(self, prefix: PathWord, cycle: PathWord, q: tuple[int, ...]) -> PathWord:
        """``x(0, q)`` for ``x = prefix cycle cycle ...``."""
        key = (prefix, cycle, q)
        hit = self.initial_cache.get(key)
        if hit is not None:
            return hit
        k = self.k
        word = prefix
        while not leq(q, word.degree):
            word = k.compose(word, cycle)
        head, _ = k.factor(word, q)
        self.initial_cache[key] = head
        return head

    def segment(self, prefix, cycle, p, q) -> PathWord:
        front = self.initial(prefix, cycle, q)
        return self.k.factor(front, p)[1]

    def canonical(self, prefix: PathWord, cycle: PathWord) -> tuple[PathWord, PathWord]:
        key = (prefix, cycle)
        hit = self.canon_cache.get(key)
        if hit is not None:
            return hit
        k = self.k
        a0, p0 = prefix.degree, cycle.degree
        seg = lambda p, q: self.segment(prefix, cycle, p, q)
        two = _add(p0, p0)
        size = sum(p0)
        period = p0
        for cand in sorted(
            (d for d in product(range(1, size + 1), repeat=k.rank) if sum(d) <= size),
            key=lambda d: (sum(d), d),
        ):
            if seg(a0, _add(a0, two)) == seg(_add(a0, cand), _add(_add(a0, cand), two)):
                period = cand
                break
        start = a0
        for cand in sorted(
            (d for d in product(range(sum(a0) + 1), repeat=k.rank) if sum(d) <= sum(a0)),
            key=lambda d: (sum(d), d),
        ):
            slack = _add(_pos(_sub(a0, cand)), two)
            if seg(cand, _add(cand, slack)) == seg(_add(cand, period), _add(_add(cand, period), slack)):
                start = cand
                break
        out = (self.initial(prefix, cycle, start), seg(start, _add(start, period)))
        self.canon_cache[key] = out
        self.canon_cache.setdefault(out, out)
        return out


class InfinitePath:
    """``prefix . cycle^infinity`` in canonical form."""

    __slots__ = ("k", "prefix", "cycle", "_hash")

    def __init__(self, k: KGraphPresentation, prefix: PathWord, cycle: PathWord):
        if cycle.src != cycle.rng:
            raise InvalidInputError(f"cycle {cycle} is not a closed path")
        if prefix.src != cycle.rng:
            raise InvalidInputError(f"prefix {prefix} does not end where the cycle {cycle} starts")
        if any(x <= 0 for x in cycle.degree):
            raise InvalidInputError(f"cycle {cycle} must have every degree coordinate positive")
        self.k = k
        self.prefix, self.cycle = _PathEngine.of(k).canonical(prefix, cycle)
        self._hash = hash((self.prefix, self.cycle))

    @classmethod
    def periodic(cls, k: KGraphPresentation, cycle: str | PathWord, prefix: str | PathWord | None = None) -> InfinitePath:
        cyc = k.path(cycle) if isinstance(cycle, str) else cycle
        if prefix is None:
            pre = k.vertex(cyc.rng)
        else:
            pre = k.path(prefix) if isinstance(prefix, str) else prefix
        return cls(k, pre, cyc)

    @property
    def rng(self) -> str:
        return self.prefix.rng

    def initial(self, q: Sequence[int]) -> PathWord:
        return _PathEngine.of(self.k).initial(self.prefix, self.cycle, tuple(q))

    def segment(self, p: Sequence[int], q: Sequence[int]) -> PathWord:
        p, q = tuple(p), tuple(q)
        if not leq(p, q):
            raise InvalidInputError(f"segment needs p <= q, got {p} and {q}")
        return _PathEngine.of(self.k).segment(self.prefix, self.cycle, p, q)

    def vertex_at(self, p: Sequence[int]) -> str:
        return self.initial(p).src

    def shift(self, p: Sequence[int]) -> InfinitePath:
        p = tuple(p)
        end = self.prefix.degree
        while not leq(p, end):
            end = _add(end, self.cycle.degree)
        return InfinitePath(self.k, self.segment(p, end), self.cycle)

    def prepend(self, lam: PathWord) -> InfinitePath:
        if lam.src != self.rng:
            raise InvalidInputError(f"{lam} ends at {lam.src}, path starts at {self.rng}")
        return InfinitePath(self.k, self.k.compose(lam, self.prefix), self.cycle)

    def extends(self, lam: PathWord) -> bool:
        return self.initial(lam.degree) == lam

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, InfinitePath):
            return NotImplemented
        return self.k is other.k and self.prefix == other.prefix and self.cycle == other.cycle

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: InfinitePath) -> bool:
        return (self.prefix, self.cycle) < (other.prefix, other.cycle)

    def __repr__(self) -> str:
        return f"{self.prefix}({self.cycle})^inf"


def paths_equal_by_segments(x: InfinitePath, y: InfinitePath, depth: Sequence[int]) -> bool:
    """Compare ``x(0, depth)`` with ``y(0, depth)``; the brute-force check."""
    return x.initial(depth) == y.initial(depth)


def sample_paths(k: KGraphPresentation, max_cycle: int = 2, max_prefix: int = 1) -> list[InfinitePath]:
    """Distinct eventually periodic paths with short cycles and prefixes."""
    cycles = []
    for d in k.degrees_up_to(max_cycle * k.rank):
        if all(x >= 1 for x in d) and all(x <= max_cycle for x in d):
            for v in k.vertices:
                cycles.extend(p for p in k.enumerate_paths(v, d) if p.src == p.rng)
    out = set()
    for cyc in cycles:
        base = InfinitePath(k, k.vertex(cyc.rng), cyc)
        out.add(base)
        for pre in k.paths_up_to(max_prefix):
            if pre.src == cyc.rng and not pre.is_vertex():
                out.add(base.prepend(pre))
    return sorted(out)


# --------------------------------------------------------------------------
# Groupoid elements

class GroupoidElement:
    """``(x, n, y)`` with ``sigma^l(x) = sigma^j(y)`` and ``l - j = n``.

    ``hint`` optionally records one such pair ``(l, j)``; it is not part of
    the identity of the element.
    """

    __slots__ = ("x", "n", "y", "hint")

    def __init__(self, x: InfinitePath, n: Sequence[int], y: InfinitePath, hint=None):
        self.x, self.n, self.y = x, tuple(n), y
        self.hint = hint

    @classmethod
    def from_presentation(cls, lam: PathWord, mu: PathWord, tail: InfinitePath) -> GroupoidElement:
        if lam.src != mu.src or lam.src != tail.rng:
            raise InvalidInputError(f"presentation ({lam}, {mu}) does not match the tail at {tail.rng}")
        return cls(
            tail.prepend(lam), _sub(lam.degree, mu.degree), tail.prepend(mu), (lam.degree, mu.degree)
        )

    @classmethod
    def unit(cls, x: InfinitePath) -> GroupoidElement:
        z = x.k.zero_degree()
        return cls(x, z, x, (z, z))

    @property
    def k(self) -> KGraphPresentation:
        return self.x.k

    def range(self) -> InfinitePath:
        return self.x

    def source(self) -> InfinitePath:
        return self.y

    def is_unit(self) -> bool:
        return self.x == self.y and not any(self.n)

    def inverse(self) -> GroupoidElement:
        hint = None if self.hint is None else (self.hint[1], self.hint[0])
        return GroupoidElement(self.y, tuple(-a for a in self.n), self.x, hint)

    def compose(self, other: GroupoidElement) -> GroupoidElement:
        if self.y != other.x:
            raise InvalidInputError("source of the first element differs from the range of the second")
        hint = None
        if self.hint is not None and other.hint is not None:
            (l1, j1), (l2, j2) = self.hint, other.hint
            d = _vmax(j1, l2)
            hint = (_add(l1, _sub(d, j1)), _add(j2, _sub(d, l2)))
        return GroupoidElement(self.x, _add(self.n, other.n), other.y, hint)

    __mul__ = compose

    def lags(self, depth: int = DEFAULT_DEPTH) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Some ``(l, j)`` with ``sigma^l(x) = sigma^j(y)`` and ``l - j = n``."""
        if self.hint is not None:
            return self.hint
        base = _pos(self.n)
        for t in range(depth + 1):
            l = tuple(b + t for b in base)
            j = _sub(l, self.n)
            if self.x.shift(l) == self.y.shift(j):
                self.hint = (l, j)
                return self.hint
        raise DepthExhaustedError(f"no alignment of {self} found within depth {depth}")

    def presentation(self, depth: int = DEFAULT_DEPTH) -> tuple[PathWord, PathWord, InfinitePath]:
        l, j = self.lags(depth)
        return self.x.initial(l), self.y.initial(j), self.x.shift(l)

    def in_cylinder(self, lam: PathWord, mu: PathWord) -> bool:
        """Membership in ``Z(lam, mu)``."""
        if lam.src != mu.src or self.n != _sub(lam.degree, mu.degree):
            return False
        if not (self.x.extends(lam) and self.y.extends(mu)):
            return False
        return self.x.shift(lam.degree) == self.y.shift(mu.degree)

    def key(self):
        return (self.x, self.n, self.y)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupoidElement):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __lt__(self, other: GroupoidElement) -> bool:
        return (self.x, self.n, self.y) < (other.x, other.n, other.y)

    def __repr__(self) -> str:
        return f"({self.x!r}, {self.n}, {self.y!r})"


def compose(g: GroupoidElement, h: GroupoidElement) -> GroupoidElement:
    return g.compose(h)


def inverse(g: GroupoidElement) -> GroupoidElement:
    return g.inverse()


def composable(elements: Sequence[GroupoidElement]) -> bool:
    return all(a.y == b.x for a, b in zip(elements, elements[1:]))


# --------------------------------------------------------------------------
# Continuous cochains

class ContinuousCochain:
    """A function on composable n-tuples of groupoid elements.

    Degree 0 cochains are evaluated on infinite paths (points of the unit
    space).  ``action(g, value)`` is the groupoid action on values; the
    default is the trivial action of a constant coefficient sheaf.
    """

    def __init__(self, degree: int, fn: Callable, coeffs: Coefficients | None = None, action=None, name: str = ""):
        self.degree = degree
        self._fn = fn
        self.coeffs = coeffs or IntegerCoefficients()
        self.action = action or (lambda g, value: value)
        self.name = name

    def __call__(self, *args):
        if len(args) != max(self.degree, 1):
            raise InvalidInputError(f"degree-{self.degree} cochain called with {len(args)} arguments")
        return self._fn(*args)

    def fiber(self, args):
        return args[0] if self.degree == 0 else args[0].x


def sigma0(f: CategoricalCochain | Callable[[str], object], coeffs: Coefficients | None = None) -> ContinuousCochain:
    """``sigma^0_f(x) = f(r(x))``."""
    coeffs = coeffs or getattr(f, "coeffs", None)
    return ContinuousCochain(0, lambda x: f(x.rng), coeffs, name="sigma0")


def sigma1_on_presentation(c: CategoricalCochain, lam: PathWord, mu: PathWord):
    return c.coeffs.sub(lam.src, c(lam), c(mu))


def sigma1(c: CategoricalCochain, check_bound: int | None = 2) -> ContinuousCochain:
    """``sigma^1_c(lam t, d(lam) - d(mu), mu t) = c(lam) - c(mu)``.

    The cochain is first checked to be a 1-cocycle on tuples up to
    ``check_bound`` (skipped when None).
    """
    if c.degree != 1:
        raise InvalidInputError("sigma1 needs a degree-1 cochain")
    if check_bound is not None:
        verdict = check_cocycle_kgraph(c.category.k, 1, c, check_bound)
        if not verdict.ok:
            raise NotACocycleError(f"not a 1-cocycle: fails at {verdict.witness}", verdict.witness)

    def fn(g: GroupoidElement):
        lam, mu, _ = g.presentation()
        return sigma1_on_presentation(c, lam, mu)

    return ContinuousCochain(1, fn, c.coeffs, name="sigma1")


def delta_c(n: int, f: ContinuousCochain, args: Sequence):
    """Groupoid coboundary of ``f`` evaluated at a composable (n+1)-tuple."""
    if f.degree != n:
        raise InvalidInputError("degree mismatch")
    A = f.coeffs
    if n == 0:
        (g,) = args
        return A.sub(g.x.rng, f.action(g, f(g.y)), f(g.x))
    args = tuple(args)
    if len(args) != n + 1 or not composable(args):
        raise InvalidInputError("tuple is not composable")
    terms = [(1, f.action(args[0], f(*args[1:])))]
    for i in range(1, n + 1):
        merged = args[: i - 1] + (args[i - 1].compose(args[i]),) + args[i + 1:]
        terms.append(((-1) ** i, f(*merged)))
    terms.append(((-1) ** (n + 1), f(*args[:-1])))
    return A.combine(args[0].x.rng, terms)


def coboundary_c(n: int, f: ContinuousCochain) -> ContinuousCochain:
    return ContinuousCochain(n + 1, lambda *a: delta_c(n, f, a), f.coeffs, f.action)


# --------------------------------------------------------------------------
# The degree-2 translation on the cylinders Z(lam, s(lam)) and Z(s(lam), lam)

@dataclass(frozen=True)
class CylinderData:
    mu: PathWord
    nu: PathWord


def classify_cylinder(g: GroupoidElement) -> CylinderData:
    """``(mu, nu)`` with ``g`` in ``Z(mu, nu)`` and one of them a vertex."""
    k = g.k
    if all(a >= 0 for a in g.n):
        if g.x.shift(g.n) == g.y:
            return CylinderData(g.x.initial(g.n), k.vertex(g.y.rng))
    if all(a <= 0 for a in g.n):
        m = tuple(-a for a in g.n)
        if g.y.shift(m) == g.x:
            return CylinderData(k.vertex(g.x.rng), g.y.initial(m))
    raise UnsupportedElementError(
        f"{g} is not in a cylinder of the form Z(l, s(l)) or Z(s(l), l); general partitions are not supported"
    )


def sigma2_restricted(c: CategoricalCochain, g: GroupoidElement, h: GroupoidElement):
    """The degree-2 translation ``sigma_c(g, h)`` for a normalized 2-cocycle ``c``.

    Only pairs where ``g``, ``h`` and ``gh`` each lie in a cylinder with a
    vertex leg are supported.  The last of the six terms uses ``nu_gh``.
    """
    k = g.k
    gh = g.compose(h)
    cg, ch, cgh = classify_cylinder(g), classify_cylinder(h), classify_cylinder(gh)
    y = g.y  # = h.x
    dmax = _vmax(cg.nu.degree, ch.mu.degree)
    alpha = y.segment(cg.nu.degree, dmax)
    beta = y.segment(ch.mu.degree, dmax)
    mu_alpha = k.compose(cg.mu, alpha)
    if not leq(cgh.mu.degree, mu_alpha.degree):
        raise UnsupportedElementError("product cylinder does not align with the factors")
    head, gamma = k.factor(mu_alpha, cgh.mu.degree)
    if head != cgh.mu or k.compose(cgh.nu, gamma) != k.compose(ch.nu, beta):
        raise UnsupportedElementError("product cylinder does not align with the factors")
    A = c.coeffs
    return A.combine(
        cg.mu.src,
        [
            (1, c(cg.mu, alpha)),
            (-1, c(cg.nu, alpha)),
            (1, c(ch.mu, beta)),
            (-1, c(ch.nu, beta)),
            (-1, c(cgh.mu, gamma)),
            (1, c(cgh.nu, gamma)),
        ],
    )


def sigma2(c: CategoricalCochain) -> ContinuousCochain:
    return ContinuousCochain(2, lambda g, h: sigma2_restricted(c, g, h), c.coeffs, name="sigma2")
