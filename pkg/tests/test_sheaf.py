import random

from hypothesis import given, strategies as st
import pytest

from catcohom.chains import FormalChain
from catcohom.errors import InvalidInputError
from catcohom.groupoid import ContinuousCochain, GroupoidElement, InfinitePath, coboundary_c, sample_paths
from catcohom.instances import dyadic_module, parallel_edges, torus, torus_module, two_vertex, b2
from catcohom.kgraph import KGraphModule
from catcohom.linalg import AbelianGroupStructure, IntMatrix
from catcohom.sheaf import (
    BasicOpenSet,
    EquivariantCochain,
    KGraphModuleMorphism,
    StalkElement,
    _step,
    act,
    act_P,
    act_pbar,
    apply_homotopy_P,
    apply_partial,
    apply_psi,
    apply_underline_d,
    basic_open_contains,
    boundary_pullback,
    eta_g,
    exactness_probe,
    module_morphism_to_sheaf,
    psi,
    stalk_add,
    stalk_eq,
    xi,
)
from catcohom.suite import Ex47Instance, Sampler

GRAPHS = {"torus": torus(), "two-vertex": two_vertex(), "b2": b2()}
Z = AbelianGroupStructure(1, ())


def one_dim(k, factor):
    return KGraphModule(k, {v: Z for v in k.vertices}, {e: IntMatrix([[factor]]) for e in k.edges})


def gen(*g):
    return FormalChain.generator(tuple(g))


# -- stalks --------------------------------------------------------------

def test_dyadic_stalk():
    m = dyadic_module()
    x = InfinitePath.periodic(m.k, "e")
    s = lambda p, a: StalkElement.make(m, x, (p,), (a,))
    assert stalk_eq(s(0, 1), s(1, 2))
    assert not stalk_eq(s(0, 1), s(1, 1))
    assert stalk_eq(s(2, 3), s(5, 24))
    assert not s(0, 1).is_zero()


def test_zero_map_kills_everything():
    m = dyadic_module(0)
    x = InfinitePath.periodic(m.k, "e")
    for a in range(-3, 4):
        for b in range(-3, 4):
            assert stalk_eq(StalkElement.make(m, x, (0,), (a,)), StalkElement.make(m, x, (0,), (b,)))


def test_constant_module_stalk():
    k = parallel_edges()
    m = KGraphModule.constant(k)
    x = sample_paths(k)[0]
    for p in [(0, 0), (1, 0), (2, 3)]:
        for q in [(0, 0), (1, 1), (4, 0)]:
            assert stalk_eq(StalkElement.make(m, x, p, (5,)), StalkElement.make(m, x, q, (5,)))
            assert not stalk_eq(StalkElement.make(m, x, p, (5,)), StalkElement.make(m, x, q, (4,)))


def test_torsion_that_dies_later():
    # Z/4 with the loop acting by 2: 2 at stage 0 becomes 0 at stage 1.
    k = dyadic_module().k
    m = KGraphModule(k, {"v": AbelianGroupStructure.from_orders([4])}, {"e": IntMatrix([[2]])})
    x = InfinitePath.periodic(k, "e")
    assert StalkElement.make(m, x, (0,), (2,)).is_zero()
    assert StalkElement.make(m, x, (0,), (1,)).is_zero()  # 1 -> 2 -> 0
    m3 = KGraphModule(k, {"v": AbelianGroupStructure.from_orders([6])}, {"e": IntMatrix([[2]])})
    assert not StalkElement.make(m3, x, (0,), (1,)).is_zero()
    assert StalkElement.make(m3, x, (0,), (3,)).is_zero()


def test_stalk_add_rejects_different_paths():
    k = b2()
    m = KGraphModule.constant(k)
    a = StalkElement.make(m, InfinitePath.periodic(k, "f"), (0,), (1,))
    b = StalkElement.make(m, InfinitePath.periodic(k, "g"), (0,), (1,))
    with pytest.raises(InvalidInputError):
        stalk_add(a, b)


@given(st.integers(0, 4), st.integers(0, 4), st.integers(-9, 9), st.integers(-9, 9), st.integers(0, 3))
def test_stalk_eq_is_equivalence_and_add_well_defined(p, q, a, b, lift):
    m = torus_module()
    x = sample_paths(m.k)[0]
    s1 = StalkElement.make(m, x, (p, q), (a, b))
    s2 = StalkElement.make(m, x, (p + lift, q + lift), s1.at_stage((p + lift, q + lift)))
    s3 = StalkElement.make(m, x, (p + lift + 1, q + lift), s2.at_stage((p + lift + 1, q + lift)))
    assert stalk_eq(s1, s1) and stalk_eq(s1, s2) and stalk_eq(s2, s1)
    assert stalk_eq(s1, s3) and stalk_eq(s2, s3)
    other = StalkElement.make(m, x, (q, p), (b, a))
    assert stalk_eq(stalk_add(s1, other), stalk_add(s2, other))
    assert stalk_eq(stalk_add(s1, other), stalk_add(other, s3))


# -- the groupoid action ---------------------------------------------------

def test_unit_acts_trivially():
    m = torus_module()
    x = sample_paths(m.k)[0]
    s = StalkElement.make(m, x, (1, 2), (3, -1))
    assert stalk_eq(act(GroupoidElement.unit(x), s), s)


def test_action_functoriality_on_torus():
    m = torus_module()
    sampler = Sampler(m.k, seed=50)
    rng = random.Random(51)
    for _ in range(50):
        g, h = sampler.composable(2)
        s = StalkElement.make(m, h.y, (rng.randint(0, 3), rng.randint(0, 3)), (rng.randint(-5, 5), rng.randint(-5, 5)))
        assert stalk_eq(act(g * h, s), act(g, act(h, s)))
        assert stalk_eq(act(g.inverse(), act(g, act(h, s))), act(h, s))
        t = StalkElement.make(m, h.y, (0, 0), (1, 0))
        assert stalk_eq(act(h, stalk_add(s, t)), stalk_add(act(h, s), act(h, t)))


def test_action_rejects_mismatch():
    k = b2()
    m = KGraphModule.constant(k)
    s = StalkElement.make(m, InfinitePath.periodic(k, "f"), (0,), (1,))
    with pytest.raises(InvalidInputError):
        act(GroupoidElement.unit(InfinitePath.periodic(k, "g")), s)


# -- basic open sets -----------------------------------------------------

def test_basic_open_sets():
    m = torus_module()
    k = m.k
    x = sample_paths(k)[0]
    lam, mu = k.path("e"), k.path("e.f")
    assert basic_open_contains(BasicOpenSet((1, 2), lam), StalkElement.make(m, x, lam.degree, (1, 2)))
    pushed = m.act(mu, (1, 2))
    lam_mu = k.compose(lam, mu)
    assert basic_open_contains(BasicOpenSet((1, 2), lam), StalkElement.make(m, x, lam_mu.degree, pushed))
    assert not basic_open_contains(BasicOpenSet((1, 2), lam), StalkElement.make(m, x, lam.degree, (1, 3)))
    k2 = parallel_edges()
    m2 = KGraphModule.constant(k2)
    y = InfinitePath.periodic(k2, "e1.f1")
    assert not basic_open_contains(BasicOpenSet((1,), k2.path("e2")), StalkElement.make(m2, y, (1, 0), (1,)))


# -- module morphisms and exactness ----------------------------------------

def _ses(k, multiplier=2):
    a, b = one_dim(k, 1), one_dim(k, 1)
    z2 = AbelianGroupStructure.from_orders([2])
    c = KGraphModule(k, {v: z2 for v in k.vertices}, {e: IntMatrix([[1]]) for e in k.edges})
    alpha = KGraphModuleMorphism(a, b, {v: IntMatrix([[multiplier]]) for v in k.vertices})
    beta = KGraphModuleMorphism(b, c, {v: IntMatrix([[1]]) for v in k.vertices})
    return alpha, beta


def five_presentations(k):
    return [
        InfinitePath.periodic(k, "e.f"),
        InfinitePath.periodic(k, "f.e.f.e"),
        InfinitePath.periodic(k, "e.f", prefix="e"),
        InfinitePath.periodic(k, "e.e.f.f", prefix="f.f"),
        InfinitePath.periodic(k, "e.f.f", prefix="e.e"),
    ]


def test_stalk_exactness_on_torus():
    k = torus()
    alpha, beta = _ses(k)
    verdict = exactness_probe(alpha, beta, five_presentations(k))
    assert verdict.ok and verdict.checked > 0


def test_stalk_exactness_on_parallel_edges():
    k = parallel_edges()
    alpha, beta = _ses(k)
    paths = sample_paths(k)[:5]
    assert len(set(paths)) == 5
    assert exactness_probe(alpha, beta, paths).ok


def test_exactness_probe_detects_failure():
    k = torus()
    alpha, beta = _ses(k, multiplier=4)
    verdict = exactness_probe(alpha, beta, five_presentations(k)[:1])
    assert not verdict.ok and "no preimage" in verdict.failure


def test_non_natural_morphism_rejected():
    m = torus_module()
    with pytest.raises(InvalidInputError):
        KGraphModuleMorphism(m, m, {"v": IntMatrix([[1, 0], [0, 2]])})


def test_morphism_functoriality_on_stalks():
    m = torus_module()
    x = sample_paths(m.k)[0]
    ident = KGraphModuleMorphism.identity(m)
    twice = KGraphModuleMorphism(m, m, {"v": IntMatrix([[2, 0], [0, 2]])})
    shear = KGraphModuleMorphism(m, m, {"v": IntMatrix([[1, 3], [0, 1]])})
    for stage in [(0, 0), (1, 2)]:
        s = StalkElement.make(m, x, stage, (2, -1))
        assert stalk_eq(module_morphism_to_sheaf(ident, s), s)
        both = module_morphism_to_sheaf(twice.then(shear), s)
        assert stalk_eq(both, module_morphism_to_sheaf(shear, module_morphism_to_sheaf(twice, s)))


# -- the resolutions -----------------------------------------------------

def test_partial_examples():
    s = Sampler(torus(), seed=1)
    g0, g1 = s.composable(2)
    assert apply_partial(1, gen(g0, g1)) == gen(g0) * -1 + gen(g0 * g1)
    assert apply_partial(0, gen(g0)) == 1


def test_partial_rejects_non_composable():
    k = b2()
    g = GroupoidElement.unit(InfinitePath.periodic(k, "f"))
    h = GroupoidElement.unit(InfinitePath.periodic(k, "g"))
    with pytest.raises(InvalidInputError):
        apply_partial(1, gen(g, h))


def test_homotopy_examples():
    s = Sampler(two_vertex(), seed=2)
    (g,) = s.composable(1)
    assert apply_homotopy_P(0, gen(g)) == gen(GroupoidElement.unit(g.x), g)
    assert apply_homotopy_P(-1, 1, base=g.x) == gen(GroupoidElement.unit(g.x))


@pytest.mark.parametrize("name", sorted(GRAPHS))
def test_P_identities_on_random_generators(name):
    s = Sampler(GRAPHS[name], seed=7)
    for _ in range(200):
        n = s.rng.randint(0, 3)
        c = gen(*s.composable(n + 1))
        if n >= 1:
            dd = apply_partial(n - 1, apply_partial(n, c))
            assert (dd == 0) if n == 1 else dd.is_zero()
        base = next(iter(c))[0].x
        back = apply_partial(n + 1, apply_homotopy_P(n, c))
        if n == 0:
            back = back + apply_homotopy_P(-1, apply_partial(0, c), base=base)
        else:
            back = back + apply_homotopy_P(n - 1, apply_partial(n, c))
        assert back == c


def test_underline_d_examples():
    k = torus()
    y = sample_paths(k)[0]
    g = GroupoidElement.from_presentation(k.path("e"), k.vertex("v"), y)
    lam = k.path("f")
    expected = gen(g, ()) - gen(g * _step(g.y, lam), ())
    assert apply_underline_d(1, gen(g, (lam,))) == expected
    moved = g * _step(g.y, lam)
    assert moved.n == tuple(a - b for a, b in zip(g.n, lam.degree))
    assert apply_underline_d(0, gen(g, ())) == 1


def test_psi_low_degrees():
    s = Sampler(two_vertex(), seed=3)
    g, lams = s.pbar_generator(0)
    assert psi(0, (g, lams)) == gen(g)
    g, (lam,) = s.pbar_generator(1)
    assert psi(1, (g, (lam,))) == gen(g, _step(g.y, lam)) * -1


@pytest.mark.parametrize("name", sorted(GRAPHS))
def test_pbar_identities_and_psi_intertwining(name):
    s = Sampler(GRAPHS[name], seed=8)
    for n in (1, 2, 3):
        for _ in range(200):
            g, lams = s.pbar_generator(n)
            c = FormalChain.generator((g, lams))
            dd = apply_underline_d(n - 1, apply_underline_d(n, c))
            assert (dd == 0) if n == 1 else dd.is_zero()
            lhs = apply_psi(n - 1, apply_underline_d(n, c)) if n > 1 else None
            rhs = apply_partial(n, apply_psi(n, c))
            if n == 1:
                # psi_0 is the identity on generators [(x,m,y)] -> [(x,m,y)].
                lhs = FormalChain([((gg,), k) for (gg, _), k in apply_underline_d(1, c).items()])
            assert lhs == rhs


@pytest.mark.parametrize("name", sorted(GRAPHS))
def test_actions_commute_with_boundaries(name):
    s = Sampler(GRAPHS[name], seed=12)
    for _ in range(50):
        n = s.rng.randint(1, 2)
        c = gen(*s.composable(n + 1))
        g = s.element_from(next(iter(c))[0].x).inverse()
        assert act_P(g, apply_partial(n, c)) == apply_partial(n, act_P(g, c))
        h = s.element_from(g.x).inverse()
        assert act_P(h * g, c) == act_P(h, act_P(g, c))
        pg, lams = s.pbar_generator(n)
        pc = FormalChain.generator((pg, lams))
        u = s.element_from(pg.x).inverse()
        assert act_pbar(u, apply_underline_d(n, pc)) == apply_underline_d(n, act_pbar(u, pc))
        assert act_P(u, apply_psi(n, pc)) == apply_psi(n, act_pbar(u, pc))


# -- xi and eta ----------------------------------------------------------

def _indicator(t):
    return lambda *args: int(tuple(args) == t)


def test_xi_eta_round_trips_on_full_bases():
    inst = Ex47Instance(3)
    for n in range(3):
        index = list(inst.composable_tuples(n))
        tuples_n1 = list(inst.composable_tuples(n + 1))
        for t in index:
            key = (t,) if n == 0 else t
            f = ContinuousCochain(n, _indicator(key))
            back = xi(n, eta_g(n, f), unit=inst.unit)
            for u in index:
                args = (u,) if n == 0 else u
                assert back(*args) == f(*args)
            # Equivariant basis element: value on [g0, g1..gn] is g0 . indicator(g1..gn).
            if n == 0:
                e = EquivariantCochain(0, lambda gen_, t=t: int(gen_[0].y == t))
            else:
                e = EquivariantCochain(n, lambda gen_, t=t: int(tuple(gen_[1:]) == t))
            again = eta_g(n, xi(n, e, unit=inst.unit))
            for gen_ in tuples_n1 if n else [(g,) for g in inst.elements()]:
                assert again(gen_) == e(gen_)


def test_xi_unit_case():
    inst = Ex47Instance(3)
    e = EquivariantCochain(0, lambda g: 10 * g[0].x.level + g[0].y.level)
    f = xi(0, e, unit=inst.unit)
    assert all(f(x) == e((inst.unit(x),)) for x in inst.paths)


def test_xi_intertwines_boundaries():
    inst = Ex47Instance(3)
    rng = random.Random(13)
    for n in range(2):
        table = {}

        def fn(gen_, table=table):
            key = tuple(gen_[1:]) if n else gen_[0].y
            return table.setdefault(key, rng.randint(-5, 5))

        f = EquivariantCochain(n, fn)
        lhs = coboundary_c(n, xi(n, f, unit=inst.unit))
        rhs = xi(n + 1, boundary_pullback(n, f), unit=inst.unit)
        for t in inst.composable_tuples(n + 1):
            assert lhs(*t) == rhs(*t)


def test_eta_images_are_equivariant():
    k = torus()
    s = Sampler(k, seed=14)
    f = ContinuousCochain(1, lambda g: sum(g.n) * 3 + g.n[0])
    e = eta_g(1, f)
    for _ in range(50):
        g0, g1 = s.composable(2)
        u = s.element_from(g0.x).inverse()
        assert e((u * g0, g1)) == e((g0, g1))
        assert e((g0, g1)) == e((GroupoidElement.unit(g1.x), g1))
