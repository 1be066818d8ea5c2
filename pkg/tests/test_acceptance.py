"""Acceptance criteria, one PASS/FAIL line each with runtime against its limit.

Run ``pytest tests/test_acceptance.py -s -v`` or ``python3 tests/test_acceptance.py``.
"""
from __future__ import annotations

import os
import sys
import time

sys.path.insert(0, os.path.dirname(__file__))

import pytest

from catcohom import cli
from catcohom.bar import (
    CategoricalCochain,
    ModuleCoefficients,
    apply_d,
    cohomology_finite,
    delta_tilde,
    eta,
    homotopy_defect,
    zeta,
)
from catcohom.chains import FormalChain
from catcohom.groupoid import ContinuousCochain, InfinitePath, sample_paths
from catcohom.instances import b2, dyadic_module, omega, parallel_edges, torus, two_vertex, z2_category
from catcohom.kgraph import bounded_tuples
from catcohom.sheaf import (
    EquivariantCochain,
    StalkElement,
    apply_homotopy_P,
    apply_partial,
    apply_psi,
    apply_underline_d,
    eta_g,
    exactness_probe,
    stalk_eq,
    xi,
)
from catcohom.suite import (
    Ex47Instance,
    counterexample_groupoid_side,
    counterexample_kgraph_side,
    paper_identity_suite,
)
from exhaustive import p_generators, pbar_generators
from oracles import cyclic_group_cohomology, grid_nerve_cohomology
from test_bar import _bar_basis, _cat_basis, finite_cases
from test_sheaf import _indicator, _ses, five_presentations

GRAPHS = {"torus": torus(), "b2": b2(), "two-vertex": two_vertex()}


def _report(name: str, ok: bool, elapsed: float, limit: float, detail: str = "") -> str:
    verdict = "PASS" if ok and elapsed < limit else "FAIL"
    return f"{verdict} {name} {elapsed:.3f}s/{limit:g}s {detail}".rstrip()


def run_criterion(name: str, limit: float, check) -> tuple[bool, float, str]:
    start = time.perf_counter()
    ok, detail = check()
    elapsed = time.perf_counter() - start
    return ok, elapsed, _report(name, ok, elapsed, limit, detail)


# -- the eight checks; each returns (ok, detail) ------------------------

def b2_cohomology():
    report, code = cli.run(["h1", "builtin:b2"])
    group = report["results"][0]["payload"]["group"]
    return code == 0 and group == {"free_rank": 2, "torsion": []}, f"H^1={group}"


def counterexample_kgraph():
    item = counterexample_kgraph_side(10)
    p = item.payload
    ok = (
        item.ok
        and p["cocycle"]
        and (p["c(f)"], p["c(g)"]) == (1, 0)
        and p["coboundary_found"] == {str(n): False for n in range(1, 6)}
    )
    return ok, f"coboundary_found={p['coboundary_found']}"


def counterexample_groupoid():
    item = counterexample_groupoid_side(10)
    cases = item.payload["cases"]
    ok = item.ok and "sigma1(c)" in cases and sum(n.startswith("random-") for n in cases) == 20
    ok = ok and all(v["cocycle"] and v["coboundary"] for v in cases.values())
    return ok, f"{len(cases)} cocycles on {item.payload['elements']} elements"


def commuting_diagrams():
    items = [it for it in paper_identity_suite(samples=100) if it.name.startswith("torus/")]
    degrees = {it.name.split("/")[1] for it in items}
    ok = degrees == {"degree0", "degree1", "degree2"}
    ok = ok and all(it.ok and it.payload["samples"] >= 100 and it.payload["failures"] == 0 for it in items)
    return ok, f"{len(items)} identities x 100 generators"


def complex_identities():
    counted = 0
    failures = []
    for name, k in GRAPHS.items():
        cat = k.category()
        # Bar side: d d = 0 and the contracting homotopy.
        for n in range(4):
            for t in bounded_tuples(k, n + 1, 3, total=True):
                counted += 1
                if not homotopy_defect(cat, t).is_zero():
                    failures.append((name, "bar-homotopy", t))
                if n >= 1:
                    dd = apply_d(cat, n - 1, apply_d(cat, n, FormalChain.generator(t)))
                    if (dd != 0) if n == 1 else not dd.is_zero():
                        failures.append((name, "bar-dd", t))
        for n in range(3):
            c = CategoricalCochain.symbolic(n, cat)
            ddc = delta_tilde(cat, n + 1, delta_tilde(cat, n, c))
            for t in bounded_tuples(k, n + 2, 3, total=True):
                counted += 1
                if not ddc(*t).is_zero():
                    failures.append((name, "delta-tilde", t))
        # Groupoid side: boundary and homotopy on P, dbar and psi on Pbar.
        for n in range(4):
            for t in p_generators(k, n):
                counted += 1
                c = FormalChain.generator(t)
                if n >= 1:
                    dd = apply_partial(n - 1, apply_partial(n, c))
                    if (dd != 0) if n == 1 else not dd.is_zero():
                        failures.append((name, "partial", t))
                back = apply_partial(n + 1, apply_homotopy_P(n, c))
                if n == 0:
                    back = back + apply_homotopy_P(-1, apply_partial(0, c), base=t[0].x)
                else:
                    back = back + apply_homotopy_P(n - 1, apply_partial(n, c))
                if back != c:
                    failures.append((name, "P-homotopy", t))
        for n in range(1, 4):
            for gen in pbar_generators(k, n):
                counted += 1
                c = FormalChain.generator(gen)
                dbar = apply_underline_d(n, c)
                dd = apply_underline_d(n - 1, dbar)
                if (dd != 0) if n == 1 else not dd.is_zero():
                    failures.append((name, "dbar", gen))
                if n == 1:
                    lhs = FormalChain([((g,), m) for (g, _), m in dbar.items()])
                else:
                    lhs = apply_psi(n - 1, dbar)
                if lhs != apply_partial(n, apply_psi(n, c)):
                    failures.append((name, "psi", gen))
    return not failures, f"{counted} generators, {len(failures)} failures"


def round_trips():
    checked = 0
    bad = 0
    for cat, module in finite_cases():
        A = ModuleCoefficients(module)
        for n in range(3):
            for f in _bar_basis(cat, module, n):
                back = eta(cat, n, zeta(cat, n, f))
                for g in cat.composable_tuples(n + 1):
                    checked += 1
                    bad += not A.equal(cat.src(g[-1]), back(g), f(g))
            for c in _cat_basis(cat, module, n):
                back = zeta(cat, n, eta(cat, n, c))
                for t in cat.composable_tuples(n):
                    args = (t,) if n == 0 else t
                    checked += 1
                    bad += not A.equal(t if n == 0 else cat.src(t[-1]), back(*args), c(*args))
    inst = Ex47Instance(3)
    for n in range(3):
        index = list(inst.composable_tuples(n))
        for t in index:
            key = (t,) if n == 0 else t
            f = ContinuousCochain(n, _indicator(key))
            back = xi(n, eta_g(n, f), unit=inst.unit)
            for u in index:
                args = (u,) if n == 0 else u
                checked += 1
                bad += back(*args) != f(*args)
            if n == 0:
                e = EquivariantCochain(0, lambda g, t=t: int(g[0].y == t))
                gens = [(g,) for g in inst.elements()]
            else:
                e = EquivariantCochain(n, lambda g, t=t: int(tuple(g[1:]) == t))
                gens = list(inst.composable_tuples(n + 1))
            again = eta_g(n, xi(n, e, unit=inst.unit))
            for g in gens:
                checked += 1
                bad += again(g) != e(g)
    return bad == 0, f"{checked} evaluations, {bad} mismatches"


def oracle_cross_checks():
    got = []
    ok = True
    z2 = z2_category()
    for n in range(5):
        g = cohomology_finite(z2, None, n)
        ok = ok and (g.free_rank, list(g.torsion)) == cyclic_group_cohomology(2, n)
        got.append(str(g))
    grid = omega(2, 2)
    for n in range(3):
        g = cohomology_finite(grid, None, n)
        ok = ok and (g.free_rank, list(g.torsion)) == grid_nerve_cohomology(2, 2, n)
        got.append(str(g))
    return ok, " ".join(got)


def stalk_colimit():
    m = dyadic_module()
    x = InfinitePath.periodic(m.k, "e")
    s = lambda p, a: StalkElement.make(m, x, (p,), (a,))
    ok = stalk_eq(s(0, 1), s(1, 2)) and not stalk_eq(s(0, 1), s(1, 1))
    torus_paths = five_presentations(torus())
    on_torus = exactness_probe(*_ses(torus()), torus_paths)
    pe = parallel_edges()
    distinct = sample_paths(pe)[:5]
    on_pe = exactness_probe(*_ses(pe), distinct)
    ok = ok and len(torus_paths) == len(set(distinct)) == 5 and on_torus.ok and on_pe.ok
    return ok, f"{on_torus.checked + on_pe.checked} stalk checks"


CRITERIA = [
    ("b2-cohomology", 1.0, b2_cohomology),
    ("counterexample-kgraph-side", 5.0, counterexample_kgraph),
    ("counterexample-groupoid-side", 10.0, counterexample_groupoid),
    ("commuting-diagram-identities", 10.0, commuting_diagrams),
    ("complex-identities", 30.0, complex_identities),
    ("isomorphism-round-trips", 5.0, round_trips),
    ("oracle-cross-checks", 30.0, oracle_cross_checks),
    ("stalk-colimit", 1.0, stalk_colimit),
]


@pytest.mark.parametrize("name,limit,check", CRITERIA, ids=[c[0] for c in CRITERIA])
def test_acceptance(name, limit, check, capsys):
    ok, elapsed, line = run_criterion(name, limit, check)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line
    assert elapsed < limit, line


if __name__ == "__main__":
    results = [run_criterion(*c) for c in CRITERIA]
    for _, _, line in results:
        print(line)
    sys.exit(0 if all(ok and line.startswith("PASS") for ok, _, line in results) else 1)
