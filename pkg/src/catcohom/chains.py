"""Formal Z-linear combinations of hashable generators."""
from __future__ import annotations

from typing import Callable, Hashable, Iterable, Iterator


class FormalChain:
    """Finite Z-combination of generators, kept with zero coefficients pruned.

    Two chains are equal iff they have the same nonzero coefficients, so
    equality is purely syntactic once generators are canonical.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: dict | Iterable[tuple[Hashable, int]] | None = None):
        acc: dict = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for gen, coeff in items:
                if coeff:
                    acc[gen] = acc.get(gen, 0) + coeff
        self._terms = {g: c for g, c in acc.items() if c}

    @classmethod
    def generator(cls, gen: Hashable, coeff: int = 1) -> FormalChain:
        return cls({gen: coeff})

    @classmethod
    def zero(cls) -> FormalChain:
        return cls()

    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __iter__(self) -> Iterator:
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, gen: Hashable) -> int:
        return self._terms.get(gen, 0)

    def __add__(self, other: FormalChain) -> FormalChain:
        out = dict(self._terms)
        for g, c in other._terms.items():
            out[g] = out.get(g, 0) + c
        return FormalChain(out)

    def __neg__(self) -> FormalChain:
        return FormalChain({g: -c for g, c in self._terms.items()})

    def __sub__(self, other: FormalChain) -> FormalChain:
        return self + (-other)

    def __mul__(self, k: int) -> FormalChain:
        return FormalChain({g: k * c for g, c in self._terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int) and other == 0:
            return not self._terms
        if not isinstance(other, FormalChain):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def map_linear(self, fn: Callable[[Hashable], FormalChain]) -> FormalChain:
        """Extend ``fn`` (generator -> chain) Z-linearly."""
        out: dict = {}
        for g, c in self._terms.items():
            for h, e in fn(g).items():
                out[h] = out.get(h, 0) + c * e
        return FormalChain(out)

    def sorted_items(self, key=repr) -> list:
        return sorted(self._terms.items(), key=lambda t: key(t[0]))

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join(f"{c}*{g!r}" for g, c in self.sorted_items())
