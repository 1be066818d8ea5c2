"""Finite categories given by composition tables, and modules over them.

Conventions follow the arrows-only picture: a morphism ``m`` has a source
``src(m)`` and a range ``tgt(m)``, and ``compose(a, b)`` is the composite
``ab`` which is defined exactly when ``src(a) == tgt(b)``.  A composable
n-tuple ``(l1, ..., ln)`` therefore satisfies ``src(li) == tgt(l(i+1))``.

A module is contravariant: the action of ``m`` is a matrix sending the fiber
at ``tgt(m)`` to the fiber at ``src(m)``, and ``A(ab) = A(b) A(a)``.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import CapacityError, InvalidInputError
from .linalg import AbelianGroupStructure, IntMatrix

DEFAULT_CAP = 200_000


def basis_cap() -> int:
    """Basis-size cap for cochain computations; ``CATCOHOM_CAP`` overrides."""
    raw = os.environ.get("CATCOHOM_CAP")
    if raw is None:
        return DEFAULT_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise InvalidInputError(f"CATCOHOM_CAP must be an integer, got {raw!r}") from None
    if cap <= 0:
        raise InvalidInputError("CATCOHOM_CAP must be positive")
    return cap


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    witness: tuple = ()

    def to_json(self) -> dict:
        return {"kind": self.kind, "message": self.message, "witness": [str(w) for w in self.witness]}


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind: str, message: str, *witness) -> None:
        self.violations.append(Violation(kind, message, tuple(witness)))

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def extend(self, other: ValidationReport) -> None:
        self.violations.extend(other.violations)
        self.notes.extend(other.notes)

    def to_json(self) -> dict:
        return {"ok": self.ok, "violations": [v.to_json() for v in self.violations], "notes": list(self.notes)}


class FiniteCategory:
    """A small category presented by its full composition table.

    The constructor only checks that identifiers are consistent; the
    category axioms are checked by :func:`validate_category`, which reports
    violations as data instead of raising.
    """

    def __init__(
        self,
        objects: Iterable[str],
        morphisms: Mapping[str, tuple[str, str]],
        identities: Mapping[str, str],
        compose: Mapping[tuple[str, str], str],
    ):
        self.objects: tuple[str, ...] = tuple(sorted(set(objects)))
        self._ends = {m: (s, t) for m, (s, t) in morphisms.items()}
        self.morphisms: tuple[str, ...] = tuple(sorted(self._ends))
        self.identities = dict(identities)
        self.table = dict(compose)
        objs = set(self.objects)
        for m, (s, t) in self._ends.items():
            if s not in objs or t not in objs:
                raise InvalidInputError(f"morphism {m} refers to an unknown object")
        for v, m in self.identities.items():
            if v not in objs or m not in self._ends:
                raise InvalidInputError(f"identity {m} for {v} refers to an unknown identifier")
        for (a, b), c in self.table.items():
            for x in (a, b, c):
                if x not in self._ends:
                    raise InvalidInputError(f"composition {a} {b} = {c} refers to unknown morphism {x}")
        self._identity_set = set(self.identities.values())
        self._by_range: dict[str, list[str]] = {v: [] for v in self.objects}
        for m in self.morphisms:
            self._by_range[self._ends[m][1]].append(m)

    def src(self, m: str) -> str:
        return self._ends[m][0]

    def tgt(self, m: str) -> str:
        return self._ends[m][1]

    def identity(self, v: str) -> str:
        try:
            return self.identities[v]
        except KeyError:
            raise InvalidInputError(f"object {v} has no identity morphism") from None

    def is_identity(self, m: str) -> bool:
        return m in self._identity_set

    def compose(self, a: str, b: str) -> str:
        if self.src(a) != self.tgt(b):
            raise InvalidInputError(f"{a} and {b} are not composable")
        try:
            return self.table[(a, b)]
        except KeyError:
            raise InvalidInputError(f"composition {a} {b} missing from the table") from None

    def with_range(self, v: str) -> list[str]:
        return self._by_range[v]

    def count_composable(self, n: int) -> int:
        if n == 0:
            return len(self.objects)
        ways = {v: 1 for v in self.objects}  # tuples ending at (source) v
        # Build from the right: tuples (l1..ln) counted by tgt(l1).
        for _ in range(n):
            nxt = {v: 0 for v in self.objects}
            for m in self.morphisms:
                nxt[self.tgt(m)] += ways[self.src(m)]
            ways = nxt
        return sum(ways.values())

    def composable_tuples(self, n: int) -> list:
        """Composable n-tuples in lexicographic order; n = 0 gives the objects."""
        if n < 0:
            raise InvalidInputError("arity must be non-negative")
        if n == 0:
            return list(self.objects)
        out: list[tuple[str, ...]] = []

        def extend(prefix: tuple[str, ...]) -> None:
            if len(prefix) == n:
                out.append(prefix)
                return
            for m in self._by_range[self.src(prefix[-1])]:
                extend(prefix + (m,))

        for m in self.morphisms:
            extend((m,))
        return out

    def iter_composable(self, n: int) -> Iterator:
        yield from self.composable_tuples(n)

    def __repr__(self) -> str:
        return f"FiniteCategory({len(self.objects)} objects, {len(self.morphisms)} morphisms)"


def validate_category(c: FiniteCategory) -> ValidationReport:
    rep = ValidationReport()
    for v in c.objects:
        if v not in c.identities:
            rep.add("identity", f"object {v} has no identity morphism", v)
            continue
        i = c.identities[v]
        if c.src(i) != v or c.tgt(i) != v:
            rep.add("identity", f"identity {i} of {v} is not an endomorphism of {v}", v, i)
    for a, b in product(c.morphisms, repeat=2):
        composable = c.src(a) == c.tgt(b)
        present = (a, b) in c.table
        if composable and not present:
            rep.add("closure", f"composite {a} {b} is missing", a, b)
        elif present and not composable:
            rep.add("closure", f"composite {a} {b} given for a non-composable pair", a, b)
        elif present:
            ab = c.table[(a, b)]
            if c.tgt(ab) != c.tgt(a) or c.src(ab) != c.src(b):
                rep.add("endpoints", f"{a} {b} = {ab} has the wrong range or source", a, b)
    if rep.violations:
        return rep
    for v, i in c.identities.items():
        for m in c.morphisms:
            if c.tgt(m) == v and c.table[(i, m)] != m:
                rep.add("identity", f"{i} {m} != {m}", i, m)
            if c.src(m) == v and c.table[(m, i)] != m:
                rep.add("identity", f"{m} {i} != {m}", m, i)
    for a, b, d in c.composable_tuples(3):
        left = c.table[(c.table[(a, b)], d)]
        right = c.table[(a, c.table[(b, d)])]
        if left != right:
            rep.add("associativity", f"({a} {b}) {d} = {left} but {a} ({b} {d}) = {right}", a, b, d)
    return rep


def _reduce_rows(m: IntMatrix, orders: Sequence[int]) -> IntMatrix:
    return IntMatrix(
        [[x % o if o else x for x in row] for row, o in zip(m.data, orders)], m.cols
    )


def congruent(a: IntMatrix, b: IntMatrix, target: AbelianGroupStructure) -> bool:
    """Equality of two homomorphisms into ``target`` given by matrices."""
    if a.shape != b.shape:
        return False
    return _reduce_rows(a - b, target.orders).is_zero()


class LambdaModule:
    """Fibers ``A_v`` plus action matrices ``A(m): A_tgt(m) -> A_src(m)``.

    Matrices act on canonical generators (torsion first, then free) and have
    shape ``gens(src) x gens(tgt)``.
    """

    def __init__(
        self,
        category,
        fibers: Mapping[str, AbelianGroupStructure],
        actions: Mapping[str, IntMatrix],
    ):
        self.category = category
        self.fibers = dict(fibers)
        self.actions = dict(actions)

    @classmethod
    def constant(cls, category: FiniteCategory, group: AbelianGroupStructure | None = None) -> LambdaModule:
        group = group or AbelianGroupStructure(1, ())
        ident = IntMatrix.identity(group.ngens)
        return cls(
            category,
            {v: group for v in category.objects},
            {m: ident for m in category.morphisms},
        )

    def fiber(self, v: str) -> AbelianGroupStructure:
        return self.fibers[v]

    def matrix(self, m: str) -> IntMatrix:
        return self.actions[m]

    def act(self, m: str, vec: Sequence[int]) -> tuple[int, ...]:
        return self.fibers[self.category.src(m)].reduce(self.actions[m].apply(vec))

    def is_constant_identity(self) -> bool:
        return all(a == IntMatrix.identity(a.rows) for a in self.actions.values())


def validate_module(c: FiniteCategory, a: LambdaModule) -> ValidationReport:
    rep = ValidationReport()
    for v in c.objects:
        if v not in a.fibers:
            rep.add("fiber", f"no fiber given at {v}", v)
    for m in c.morphisms:
        if m not in a.actions:
            rep.add("action", f"no action matrix for {m}", m)
    if rep.violations:
        return rep
    for m in c.morphisms:
        src, tgt = a.fibers[c.src(m)], a.fibers[c.tgt(m)]
        mat = a.actions[m]
        if mat.shape != (src.ngens, tgt.ngens):
            rep.add("shape", f"action of {m} has shape {mat.shape}, expected {(src.ngens, tgt.ngens)}", m)
            continue
        for j, o in enumerate(tgt.orders):
            if o == 0:
                continue
            col = tuple(o * x for x in mat.column(j))
            if any(src.reduce(col)):
                rep.add("well-defined", f"action of {m} does not kill the order-{o} generator {j}", m)
    if rep.violations:
        return rep
    for v in c.objects:
        i = c.identities.get(v)
        if i is not None and not congruent(a.actions[i], IntMatrix.identity(a.fibers[v].ngens), a.fibers[v]):
            rep.add("identity", f"identity {i} does not act as the identity", i)
    for l, m in c.composable_tuples(2):
        lm = c.compose(l, m)
        if not congruent(a.actions[lm], a.actions[m] @ a.actions[l], a.fibers[c.src(m)]):
            rep.add("contravariance", f"A({l} {m}) != A({m}) A({l})", l, m)
    return rep


class ModuleMorphism:
    """Natural transformation between modules: one matrix per object."""

    def __init__(self, source: LambdaModule, target: LambdaModule, components: Mapping[str, IntMatrix]):
        self.source = source
        self.target = target
        self.components = dict(components)

    def apply(self, v: str, vec: Sequence[int]) -> tuple[int, ...]:
        return self.target.fibers[v].reduce(self.components[v].apply(vec))

    def then(self, other: ModuleMorphism) -> ModuleMorphism:
        """``other`` after ``self``."""
        return ModuleMorphism(
            self.source, other.target, {v: other.components[v] @ self.components[v] for v in self.components}
        )

    def validate(self, morphisms: Iterable) -> ValidationReport:
        rep = ValidationReport()
        cat = self.source.category
        for v, mat in self.components.items():
            src, tgt = self.source.fibers[v], self.target.fibers[v]
            if mat.shape != (tgt.ngens, src.ngens):
                rep.add("shape", f"component at {v} has shape {mat.shape}", v)
                continue
            for j, o in enumerate(src.orders):
                if o and any(tgt.reduce(tuple(o * x for x in mat.column(j)))):
                    rep.add("well-defined", f"component at {v} does not kill generator {j}", v)
        if rep.violations:
            return rep
        for m in morphisms:
            s, t = cat.src(m), cat.tgt(m)
            lhs = self.target.matrix(m) @ self.components[t]
            rhs = self.components[s] @ self.source.matrix(m)
            if not congruent(lhs, rhs, self.target.fibers[s]):
                rep.add("naturality", f"square for {m} does not commute", m)
        return rep


def check_capacity(size: int, what: str) -> None:
    cap = basis_cap()
    if size > cap:
        raise CapacityError(f"{what}: {size} basis elements exceeds the cap of {cap}")
