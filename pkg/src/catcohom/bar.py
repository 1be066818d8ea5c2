"""Bar resolution, categorical cochains and cohomology of finite categories.

Any object with ``src``, ``tgt``, ``compose``, ``identity`` and
``is_identity`` can play the role of the category here, so the same code runs
on finite composition tables and on the (infinite) path categories of
k-graphs; only :func:`cohomology_finite` and :func:`is_coboundary` need the
full finite tuple enumeration.
"""
from __future__ import annotations

from typing import Callable, Hashable, Iterable, Sequence

from .category import FiniteCategory, LambdaModule, check_capacity
from .chains import FormalChain
from .errors import InvalidInputError, NotACocycleError, UnsupportedDegreeError
from .linalg import AbelianGroupStructure, IntMatrix, kernel_basis, solve_integer, subquotient_structure


# --------------------------------------------------------------------------
# Coefficient systems

class Coefficients:
    """Arithmetic in the fibers plus the contravariant action.

    ``act(m, a)`` sends a value in the fiber at ``tgt(m)`` to the fiber at
    ``src(m)``.  Values of fiber ``v`` are added with :meth:`combine`.
    """

    def zero(self, v):
        raise NotImplementedError

    def combine(self, v, terms: Iterable[tuple[int, object]]):
        raise NotImplementedError

    def act(self, m, value):
        raise NotImplementedError

    def is_zero(self, v, value) -> bool:
        return self.combine(v, [(1, value)]) == self.zero(v)

    def sub(self, v, a, b):
        return self.combine(v, [(1, a), (-1, b)])

    def equal(self, v, a, b) -> bool:
        return self.is_zero(v, self.sub(v, a, b))


class IntegerCoefficients(Coefficients):
    """The constant module Z with identity actions; values are plain ints."""

    def zero(self, v):
        return 0

    def combine(self, v, terms):
        return sum(k * a for k, a in terms)

    def act(self, m, value):
        return value

    def is_zero(self, v, value) -> bool:
        return value == 0


class ConstantCoefficients(Coefficients):
    """Constant module on a fixed abelian group; values are reduced int tuples."""

    def __init__(self, group: AbelianGroupStructure):
        self.group = group

    def zero(self, v):
        return self.group.zero()

    def combine(self, v, terms):
        acc = [0] * self.group.ngens
        for k, a in terms:
            for i, x in enumerate(a):
                acc[i] += k * x
        return self.group.reduce(acc)

    def act(self, m, value):
        return value


class ModuleCoefficients(Coefficients):
    def __init__(self, module: LambdaModule):
        self.module = module
        self.category = module.category

    def zero(self, v):
        return self.module.fibers[v].zero()

    def combine(self, v, terms):
        g = self.module.fibers[v]
        acc = [0] * g.ngens
        for k, a in terms:
            for i, x in enumerate(a):
                acc[i] += k * x
        return g.reduce(acc)

    def act(self, m, value):
        return self.module.act(m, value)


class SymbolicCoefficients(Coefficients):
    """The universal coefficient system used for exhaustive identity checks.

    A value is a formal chain of pairs ``(tuple, path)`` standing for
    ``A(path)`` applied to the unknown value of a cochain at ``tuple``.
    An identity that holds here holds for every cochain and every module.
    """

    def __init__(self, category):
        self.category = category

    def zero(self, v):
        return FormalChain()

    def combine(self, v, terms):
        out = FormalChain()
        for k, a in terms:
            out = out + a * k
        return out

    def act(self, m, value: FormalChain):
        cat = self.category
        return value.map_linear(lambda key: FormalChain.generator((key[0], cat.compose(key[1], m))))

    def is_zero(self, v, value) -> bool:
        return value.is_zero()

    def symbol(self, n: int, args: tuple):
        fiber = args[0] if n == 0 else self.category.src(args[-1])
        return FormalChain.generator((args, self.category.identity(fiber)))


# --------------------------------------------------------------------------
# Cochains

def value_fiber(category, n: int, args: tuple):
    return args[0] if n == 0 else category.src(args[-1])


class CategoricalCochain:
    """A function on composable n-tuples (objects when n = 0).

    ``c(l1, ..., ln)`` lies in the fiber at ``src(ln)``; a degree-0 cochain
    is called with a single object.
    """

    def __init__(self, degree: int, fn: Callable, coeffs: Coefficients, category, name: str = ""):
        if degree < 0:
            raise InvalidInputError("cochain degree must be non-negative")
        self.degree = degree
        self._fn = fn
        self.coeffs = coeffs
        self.category = category
        self.name = name

    def __call__(self, *args):
        if len(args) != max(self.degree, 1):
            raise InvalidInputError(f"degree-{self.degree} cochain called with {len(args)} arguments")
        return self._fn(*args)

    @classmethod
    def from_table(cls, degree: int, table: dict, coeffs: Coefficients, category, name: str = "") -> CategoricalCochain:
        """Tabulated cochain, zero off the table. Keys are tuples (objects for degree 0)."""
        table = dict(table)

        def fn(*args):
            key = args[0] if degree == 0 else tuple(args)
            if key in table:
                return table[key]
            return coeffs.zero(value_fiber(category, degree, tuple(args)))

        return cls(degree, fn, coeffs, category, name)

    @classmethod
    def symbolic(cls, degree: int, category) -> CategoricalCochain:
        coeffs = SymbolicCoefficients(category)
        return cls(degree, lambda *a: coeffs.symbol(degree, tuple(a)), coeffs, category, "generic")

    def tabulate(self, tuples: Iterable) -> dict:
        out = {}
        for t in tuples:
            args = (t,) if self.degree == 0 else tuple(t)
            key = t if self.degree == 0 else tuple(t)
            out[key] = self(*args)
        return out

    def __add__(self, other: CategoricalCochain) -> CategoricalCochain:
        return self.combine([(1, self), (1, other)])

    def __sub__(self, other: CategoricalCochain) -> CategoricalCochain:
        return self.combine([(1, self), (-1, other)])

    def scale(self, k: int) -> CategoricalCochain:
        return self.combine([(k, self)])

    def combine(self, terms: Sequence[tuple[int, CategoricalCochain]]) -> CategoricalCochain:
        n, cat, A = self.degree, self.category, self.coeffs

        def fn(*args):
            v = value_fiber(cat, n, tuple(args))
            return A.combine(v, [(k, c(*args)) for k, c in terms])

        return CategoricalCochain(n, fn, A, cat)


class BarCochain:
    """A module map ``P^n -> A`` given by its value on every generator.

    Generators are composable (n+1)-tuples; the value on ``[l0..ln]`` lies
    in the fiber at ``src(ln)``.
    """

    def __init__(self, degree: int, fn: Callable[[tuple], object], coeffs: Coefficients, category):
        self.degree = degree
        self._fn = fn
        self.coeffs = coeffs
        self.category = category

    def __call__(self, gen: tuple):
        if len(gen) != self.degree + 1:
            raise InvalidInputError(f"degree-{self.degree} bar cochain evaluated on a {len(gen)}-tuple")
        return self._fn(tuple(gen))

    def on_chain(self, chain: FormalChain, v):
        return self.coeffs.combine(v, [(k, self(g)) for g, k in chain.items()])

    @classmethod
    def from_basic(cls, degree: int, basic: dict, coeffs: Coefficients, category) -> BarCochain:
        """Equivariant extension of values on the generators ``[l1..ln, s(ln)]``.

        ``basic`` is keyed by n-tuples (objects when degree = 0); the value on
        an arbitrary generator is forced by equivariance.
        """
        basic = dict(basic)
        cat = category

        def fn(gen):
            *head, last = gen
            key = cat.tgt(last) if degree == 0 else tuple(head)
            fiber = key if degree == 0 else cat.src(head[-1])
            base = basic.get(key, coeffs.zero(fiber))
            return coeffs.act(last, base)

        return cls(degree, fn, coeffs, category)


def is_equivariant(f: BarCochain, generators: Iterable[tuple], extensions: Callable[[object], Iterable]) -> tuple | None:
    """First ``(generator, m)`` with ``f([..ln m]) != A(m) f([..ln])``, or None."""
    cat, A = f.category, f.coeffs
    for gen in generators:
        for m in extensions(cat.src(gen[-1])):
            moved = gen[:-1] + (cat.compose(gen[-1], m),)
            if not A.equal(cat.src(m), f(moved), A.act(m, f(gen))):
                return gen, m
    return None


# --------------------------------------------------------------------------
# Bar resolution

def _check_composable(cat, gen: tuple) -> None:
    for i in range(len(gen) - 1):
        if cat.src(gen[i]) != cat.tgt(gen[i + 1]):
            raise InvalidInputError(f"generator {gen!r} is not composable at position {i}")


def apply_d(cat, n: int, chain: FormalChain):
    """Bar boundary ``d_n``; for n = 0 the augmentation, returned as an int."""
    if n < 0:
        raise InvalidInputError("d_n needs n >= 0")
    for gen in chain:
        if len(gen) != n + 1:
            raise InvalidInputError(f"generator {gen!r} does not have degree {n}")
        _check_composable(cat, gen)
    if n == 0:
        return sum(k for _, k in chain.items())

    def d(gen):
        terms = {gen[1:]: 1}
        for i in range(1, n + 1):
            merged = gen[: i - 1] + (cat.compose(gen[i - 1], gen[i]),) + gen[i + 1:]
            terms[merged] = terms.get(merged, 0) + (-1) ** i
        return FormalChain(terms)

    return chain.map_linear(d)


def apply_s(cat, n: int, chain, base=None) -> FormalChain:
    """Contracting homotopy ``s_n``; ``s_-1`` takes an int multiple of the unit at ``base``."""
    if n == -1:
        if base is None:
            raise InvalidInputError("s_-1 needs the base object")
        return FormalChain.generator((cat.identity(base),), int(chain))
    for gen in chain:
        if len(gen) != n + 1:
            raise InvalidInputError(f"generator {gen!r} does not have degree {n}")
    sign = (-1) ** (n + 1)
    return chain.map_linear(lambda g: FormalChain.generator(g + (cat.identity(cat.src(g[-1])),), sign))


def bar_base(cat, gen: tuple):
    return cat.src(gen[-1])


def homotopy_defect(cat, gen: tuple) -> FormalChain:
    """``(d s + s d - id)`` applied to one generator; zero when the identity holds."""
    n = len(gen) - 1
    chain = FormalChain.generator(gen)
    out = apply_d(cat, n + 1, apply_s(cat, n, chain))
    if n == 0:
        out = out + apply_s(cat, -1, apply_d(cat, 0, chain), base=bar_base(cat, gen))
    else:
        out = out + apply_s(cat, n - 1, apply_d(cat, n, chain))
    return out - chain


# --------------------------------------------------------------------------
# Coboundaries and the comparison maps

def delta_tilde(cat, n: int, c: CategoricalCochain) -> CategoricalCochain:
    """Categorical coboundary of a degree-n cochain (lazy; evaluated on demand)."""
    if c.degree != n:
        raise InvalidInputError(f"cochain has degree {c.degree}, not {n}")
    A = c.coeffs
    if n == 0:
        def fn(lam):
            return A.sub(cat.src(lam), c(cat.src(lam)), A.act(lam, c(cat.tgt(lam))))
    else:
        last_sign = (-1) ** (n - 1)

        def fn(*lams):
            v = cat.src(lams[-1])
            terms = [(1, c(*lams[1:]))]
            for i in range(1, n + 1):
                merged = lams[: i - 1] + (cat.compose(lams[i - 1], lams[i]),) + lams[i + 1:]
                terms.append(((-1) ** i, c(*merged)))
            terms.append((last_sign, A.act(lams[-1], c(*lams[:-1]))))
            return A.combine(v, terms)

    return CategoricalCochain(n + 1, fn, A, cat)


def delta_bar(cat, n: int, f: BarCochain) -> BarCochain:
    """``f o d_(n+1)``."""
    return BarCochain(
        n + 1,
        lambda gen: f.on_chain(apply_d(cat, n + 1, FormalChain.generator(gen)), cat.src(gen[-1])),
        f.coeffs,
        cat,
    )


def zeta(cat, n: int, f: BarCochain) -> CategoricalCochain:
    if f.degree != n:
        raise InvalidInputError("degree mismatch")
    if n == 0:
        return CategoricalCochain(0, lambda v: f((cat.identity(v),)), f.coeffs, cat)
    return CategoricalCochain(
        n, lambda *lams: f(tuple(lams) + (cat.identity(cat.src(lams[-1])),)), f.coeffs, cat
    )


def eta(cat, n: int, c: CategoricalCochain) -> BarCochain:
    if c.degree != n:
        raise InvalidInputError("degree mismatch")
    A = c.coeffs
    if n == 0:
        return BarCochain(0, lambda gen: A.act(gen[0], c(cat.tgt(gen[0]))), A, cat)
    return BarCochain(n, lambda gen: A.act(gen[-1], c(*gen[:-1])), A, cat)


def first_nonzero(c: CategoricalCochain, tuples: Iterable):
    """First tuple where ``c`` is nonzero, or None."""
    cat = c.category
    for t in tuples:
        args = (t,) if c.degree == 0 else tuple(t)
        if not c.coeffs.is_zero(value_fiber(cat, c.degree, args), c(*args)):
            return t
    return None


# --------------------------------------------------------------------------
# Finite cohomology

def _basis(cat: FiniteCategory, module: LambdaModule, n: int) -> tuple[list, dict[Hashable, int], int]:
    """Tuples of arity n and the offset of each tuple's fiber block."""
    size = cat.count_composable(n)
    check_capacity(size, f"composable {n}-tuples")
    tuples = cat.composable_tuples(n)
    offsets, pos = {}, 0
    for t in tuples:
        offsets[t] = pos
        pos += module.fibers[value_fiber(cat, n, (t,) if n == 0 else t)].ngens
    check_capacity(pos, f"degree-{n} cochain basis")
    return tuples, offsets, pos


def _fiber_of(cat, n, t):
    return t if n == 0 else cat.src(t[-1])


def coboundary_matrix(cat: FiniteCategory, module: LambdaModule, n: int) -> tuple[IntMatrix, dict, dict]:
    """Matrix of ``delta~^n`` on the free covers of the fibers.

    Returns the matrix together with the offset tables of its domain
    (n-tuples) and codomain ((n+1)-tuples).
    """
    _, dom, ncols = _basis(cat, module, n)
    rows_t, cod, nrows = _basis(cat, module, n + 1)
    data = [[0] * ncols for _ in range(nrows)]

    def add_block(row0: int, col0: int, mat: IntMatrix, sign: int) -> None:
        for i, row in enumerate(mat.data):
            target = data[row0 + i]
            for j, x in enumerate(row):
                if x:
                    target[col0 + j] += sign * x

    for tau in rows_t:
        r0 = cod[tau]
        v = cat.src(tau[-1])
        ident = IntMatrix.identity(module.fibers[v].ngens)
        if n == 0:
            (lam,) = tau
            add_block(r0, dom[cat.src(lam)], ident, 1)
            add_block(r0, dom[cat.tgt(lam)], module.actions[lam], -1)
            continue
        add_block(r0, dom[tau[1:]], ident, 1)
        for i in range(1, n + 1):
            merged = tau[: i - 1] + (cat.compose(tau[i - 1], tau[i]),) + tau[i + 1:]
            add_block(r0, dom[merged], ident, (-1) ** i)
        add_block(r0, dom[tau[:-1]], module.actions[tau[-1]], (-1) ** (n - 1))
    return IntMatrix(data, ncols), dom, cod


def relation_columns(cat: FiniteCategory, module: LambdaModule, n: int, offsets: dict, size: int) -> list[tuple[int, ...]]:
    cols = []
    for t, off in offsets.items():
        for i, d in enumerate(module.fibers[_fiber_of(cat, n, t)].torsion):
            vec = [0] * size
            vec[off + i] = d
            cols.append(tuple(vec))
    return cols


def cohomology_finite(cat: FiniteCategory, module: LambdaModule | None, n: int) -> AbelianGroupStructure:
    """``H^n`` of a finite category with coefficients in ``module`` (constant Z by default)."""
    if n < 0:
        raise InvalidInputError("cohomology degree must be non-negative")
    module = module or LambdaModule.constant(cat)
    dn, dom, cod = coboundary_matrix(cat, module, n)
    return _homology_from(cat, module, n, dn, dom, cod, lambda: coboundary_matrix(cat, module, n - 1)[0])


def _homology_from(cat, module, n, dn, dom, cod, previous) -> AbelianGroupStructure:
    size = dn.cols
    rel_next = relation_columns(cat, module, n + 1, cod, dn.rows)
    rel_here = relation_columns(cat, module, n, dom, size)
    # Cocycles: x with D x in the relation lattice of the next degree.
    if rel_next:
        aug = dn.hstack(-IntMatrix.from_columns(rel_next, dn.rows))
    else:
        aug = dn
    cycles = [k[:size] for k in kernel_basis(aug)]
    boundaries = list(rel_here)
    if n > 0:
        boundaries.extend(previous().columns())
    return subquotient_structure(cycles, boundaries, size)


def cohomology_hom_model(cat: FiniteCategory, module: LambdaModule | None, n: int) -> AbelianGroupStructure:
    """``H^n`` computed through ``Hom(P^n, A)`` and ``f -> f o d``, independently of ``delta~``."""
    module = module or LambdaModule.constant(cat)
    A = ModuleCoefficients(module)

    def matrix(m: int) -> tuple[IntMatrix, dict, dict]:
        _, dom, ncols = _basis(cat, module, m)
        rows_t, cod, nrows = _basis(cat, module, m + 1)
        cols = []
        for t, off in dom.items():
            fib = module.fibers[_fiber_of(cat, m, t)]
            for j in range(fib.ngens):
                e = tuple(int(i == j) for i in range(fib.ngens))
                f = BarCochain.from_basic(m, {t: e}, A, cat)
                df = delta_bar(cat, m, f)
                col = [0] * nrows
                for tau in rows_t:
                    gen = tau + (cat.identity(cat.src(tau[-1])),)
                    val = df(gen)
                    for i, x in enumerate(val):
                        col[cod[tau] + i] = x
                cols.append(tuple(col))
        return IntMatrix.from_columns(cols, nrows), dom, cod

    dn, dom, cod = matrix(n)
    return _homology_from(cat, module, n, dn, dom, cod, lambda: matrix(n - 1)[0])


def cochain_vector(c: CategoricalCochain, offsets: dict, size: int) -> list[int]:
    vec = [0] * size
    for t, off in offsets.items():
        val = c(t) if c.degree == 0 else c(*t)
        for i, x in enumerate(val):
            vec[off + i] = x
    return vec


def check_cocycle_finite(cat: FiniteCategory, n: int, c: CategoricalCochain):
    """First (n+1)-tuple where ``delta~ c`` is nonzero, or None."""
    return first_nonzero(delta_tilde(cat, n, c), cat.composable_tuples(n + 1))


def is_coboundary(cat: FiniteCategory, module: LambdaModule | None, n: int, c: CategoricalCochain) -> CategoricalCochain | None:
    """A witness ``b`` with ``delta~ b = c``, or None when ``c`` is not a coboundary."""
    if n < 1:
        raise UnsupportedDegreeError("coboundaries are only defined in degree >= 1")
    module = module or LambdaModule.constant(cat)
    bad = check_cocycle_finite(cat, n, c)
    if bad is not None:
        raise NotACocycleError(f"cochain is not a cocycle: coboundary nonzero at {bad}", bad)
    d_prev, dom, cod = coboundary_matrix(cat, module, n - 1)
    target = cochain_vector(c, cod, d_prev.rows)
    rel = relation_columns(cat, module, n, cod, d_prev.rows)
    system = d_prev.hstack(IntMatrix.from_columns(rel, d_prev.rows)) if rel else d_prev
    sol = solve_integer(system, target)
    if sol is None:
        return None
    table = {}
    for t, off in dom.items():
        fib = module.fibers[_fiber_of(cat, n - 1, t)]
        table[t] = fib.reduce(sol[off: off + fib.ngens])
    return CategoricalCochain.from_table(n - 1, table, c.coeffs, cat, "witness")


def normalize_cocycle(cat, n: int, c: CategoricalCochain, check_tuples: Iterable | None = None) -> CategoricalCochain:
    """A cohomologous cocycle vanishing whenever an argument is an identity.

    Degree 1 is returned unchanged (the cocycle identity already kills
    identities).  Degree 2 subtracts ``delta~ b`` with ``b(l) = c(l, s(l))``
    and then checks its own output on ``check_tuples`` (all composable pairs
    for a finite category).
    """
    if n == 1:
        return c
    if n != 2:
        raise UnsupportedDegreeError(f"normalization is implemented for degrees 1 and 2, not {n}")
    b = CategoricalCochain(1, lambda lam: c(lam, cat.identity(cat.src(lam))), c.coeffs, cat)
    out = c - delta_tilde(cat, 1, b)
    if check_tuples is None and isinstance(cat, FiniteCategory):
        check_tuples = cat.composable_tuples(2)
    if check_tuples is not None:
        for l, m in check_tuples:
            if (cat.is_identity(l) or cat.is_identity(m)) and not c.coeffs.is_zero(cat.src(m), out(l, m)):
                raise NotACocycleError(f"normalization left a nonzero value at {(l, m)}; input is not a cocycle", (l, m))
    return out
