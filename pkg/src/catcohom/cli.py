"""Command line front end: ``catcohom <command> [FILE] [options]``.

Every command prints one JSON report.  Exit status is 0 when every item is
ok, 1 when a violation was found and 2 on errors (capacity, unsupported
degree, bad input).
"""
from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
import time
from importlib import resources
from pathlib import Path
from typing import Sequence

from . import __version__
from .bar import CategoricalCochain, ModuleCoefficients, check_cocycle_finite, cohomology_finite, is_coboundary
from .category import LambdaModule, validate_category, validate_module
from .errors import CatcohomError, InvalidInputError, NotACocycleError, UnsupportedDegreeError
from .groupoid import GroupoidElement, sample_paths, sigma0, sigma1, sigma2_restricted
from .kgraph import (
    KGraphModule,
    KGraphPresentation,
    check_cocycle_kgraph,
    h1_constant,
    is_acyclic,
    path_name,
    to_finite_category,
    validate_kgraph,
    vertex_difference_matrix,
)
from .linalg import AbelianGroupStructure, IntMatrix, kernel_basis, solve_integer
from .suite import SuiteItem, counterexample_groupoid_side, counterexample_kgraph_side, run_all
from .textformat import InputDocument, build_cochain, parse

BUILTIN_PREFIX = "builtin:"
SIGMA_SEED = 1729


def builtin_names() -> list[str]:
    data = resources.files("catcohom") / "data"
    return sorted(p.name[:-4] for p in data.iterdir() if p.name.endswith(".txt"))


def read_input(spec: str) -> tuple[str, bytes]:
    if spec.startswith(BUILTIN_PREFIX):
        name = spec[len(BUILTIN_PREFIX):]
        res = resources.files("catcohom") / "data" / f"{name}.txt"
        if not res.is_file():
            raise InvalidInputError(f"no bundled input named {name}; try one of {', '.join(builtin_names())}")
        raw = res.read_bytes()
    else:
        raw = Path(spec).read_bytes()
    return spec, raw


def _item(name: str, status: str, **payload) -> SuiteItem:
    return SuiteItem(name, status, payload)


def _render(value):
    """Witnesses and tuples as plain identifiers."""
    if isinstance(value, (list, tuple)):
        return [_render(v) for v in value]
    if hasattr(value, "edges") and hasattr(value, "rng"):
        return path_name(value)
    return value if isinstance(value, (int, str, bool, type(None), dict)) else str(value)


def _finite_view(doc: InputDocument):
    """The document as a finite category with module, converting acyclic k-graphs."""
    if doc.kind == "category":
        return doc.category, doc.module
    k = doc.kgraph
    if not is_acyclic(k):
        return None, None
    cat, names = to_finite_category(k)
    module = None
    if doc.module is not None:
        module = LambdaModule(
            cat, dict(doc.module.fibers), {m: doc.module.matrix(p) for m, p in names.items()}
        )
    return cat, module


# --------------------------------------------------------------------------
# Commands

def cmd_validate(doc: InputDocument, args) -> list[SuiteItem]:
    if doc.kind == "category":
        rep = validate_category(doc.category)
        if doc.module is not None and rep.ok:
            rep.extend(validate_module(doc.category, doc.module))
    else:
        rep = validate_kgraph(doc.kgraph)
        if doc.module is not None:
            rep.extend(doc.module.validate())
    return [_item("validate", "ok" if rep.ok else "violation", **rep.to_json())]


def _kgraph_cohomology(doc: InputDocument, n: int):
    k: KGraphPresentation = doc.kgraph
    if doc.module is not None and not _is_constant_z(doc.module):
        raise UnsupportedDegreeError("k-graphs with cycles support constant Z coefficients only")
    if n == 0:
        return AbelianGroupStructure(len(kernel_basis(vertex_difference_matrix(k))), ())
    if n == 1:
        return h1_constant(k)
    raise UnsupportedDegreeError(f"degree {n} cohomology of a k-graph with cycles is not computed here")


def _is_constant_z(module: KGraphModule) -> bool:
    return all(g.free_rank == 1 and not g.torsion for g in module.fibers.values()) and all(
        a == IntMatrix.identity(1) for a in module.edge_actions.values()
    )


def cmd_cohomology(doc: InputDocument, args) -> list[SuiteItem]:
    n = args.n
    cat, module = _finite_view(doc)
    if cat is not None:
        group = cohomology_finite(cat, module, n)
    else:
        group = _kgraph_cohomology(doc, n)
    return [_item(f"H^{n}", "ok", group=group.to_json(), text=str(group))]


def cmd_h1(doc: InputDocument, args) -> list[SuiteItem]:
    if doc.kind == "kgraph" and (doc.module is None or _is_constant_z(doc.module)):
        group = h1_constant(doc.kgraph)
    else:
        cat, module = _finite_view(doc)
        if cat is None:
            raise UnsupportedDegreeError("h1 with a non-constant module needs an acyclic k-graph")
        group = cohomology_finite(cat, module, 1)
    return [_item("H^1", "ok", group=group.to_json(), text=str(group))]


def cmd_check_cocycle(doc: InputDocument, args) -> list[SuiteItem]:
    c = build_cochain(doc)
    if c.degree != args.n:
        raise InvalidInputError(f"the document's cochain has degree {c.degree}, not {args.n}")
    if doc.kind == "category":
        bad = check_cocycle_finite(doc.category, args.n, c)
        payload = {"cocycle": bad is None, "witness": _render(bad)}
    else:
        if args.n not in (1, 2):
            raise UnsupportedDegreeError("bounded cocycle sweeps on k-graphs cover degrees 1 and 2")
        verdict = check_cocycle_kgraph(doc.kgraph, args.n, c, args.bound)
        payload = verdict.to_json()
        payload["bound"] = args.bound
    return [_item("check-cocycle", "ok" if payload["cocycle"] else "violation", **payload)]


def cmd_cobound(doc: InputDocument, args) -> list[SuiteItem]:
    n = args.n
    c = build_cochain(doc)
    if c.degree != n:
        raise InvalidInputError(f"the document's cochain has degree {c.degree}, not {n}")
    cat, module = _finite_view(doc)
    try:
        if cat is not None:
            if doc.kind == "kgraph":
                c = _tabulate_on(cat, module, to_finite_category(doc.kgraph)[1], c)
            witness = is_coboundary(cat, module, n, c)
            table = None if witness is None else _witness_table(cat, n - 1, witness)
        else:
            table = _kgraph_potential(doc, n, c)
    except NotACocycleError as exc:
        return [_item("cobound", "violation", cocycle=False, witness=_render(exc.witness))]
    return [_item("cobound", "ok", cocycle=True, coboundary=table is not None, potential=table)]


def _witness_table(cat, degree: int, b) -> dict:
    out = {}
    for t in cat.composable_tuples(degree):
        key = t if degree == 0 else " ".join(t)
        out[key] = _render(b(t) if degree == 0 else b(*t))
    return out


def _tabulate_on(cat, module, names, c) -> CategoricalCochain:
    """Move a cochain on an acyclic k-graph onto its finite path category."""
    n = c.degree
    table = {}
    for t in cat.composable_tuples(n):
        val = c(t) if n == 0 else c(*(names[m] for m in t))
        table[t] = (val,) if isinstance(val, int) else tuple(val)
    module = module or LambdaModule.constant(cat)
    return CategoricalCochain.from_table(n, table, ModuleCoefficients(module), cat)


def _kgraph_potential(doc: InputDocument, n: int, c):
    if n != 1 or (doc.module is not None and not _is_constant_z(doc.module)):
        raise UnsupportedDegreeError("coboundary search on a k-graph with cycles covers degree 1 with constant Z")
    k = doc.kgraph
    verdict = check_cocycle_kgraph(k, 1, c, 3)
    if not verdict.ok:
        raise NotACocycleError("not a 1-cocycle", verdict.witness)
    edges = sorted(k.edges)
    target = [_scalar(c(k.path(e))) for e in edges]
    sol = solve_integer(vertex_difference_matrix(k), target)
    if sol is None:
        return None
    return {v: [x] for v, x in zip(k.vertices, sol)}


def _scalar(v) -> int:
    return v if isinstance(v, int) else v[0]


def cmd_sigma(doc: InputDocument, args) -> list[SuiteItem]:
    if doc.kind != "kgraph":
        raise InvalidInputError("sigma needs a k-graph document")
    k = doc.kgraph
    c = build_cochain(doc)
    n = args.n
    if c.degree != n:
        raise InvalidInputError(f"the document's cochain has degree {c.degree}, not {n}")
    tails = sample_paths(k)
    if not tails:
        raise InvalidInputError("the k-graph has no eventually periodic paths with short cycles")
    rng = random.Random(args.seed)
    paths = k.paths_up_to(2)
    values = []
    for _ in range(args.samples):
        t = rng.choice(tails)
        if n == 0:
            values.append({"path": repr(t), "value": _render(sigma0(c)(t))})
            continue
        pool = [p for p in paths if p.src == t.rng]
        if n == 1:
            g = GroupoidElement.from_presentation(rng.choice(pool), rng.choice(pool), t)
            values.append({"element": repr(g), "value": _render(sigma1(c, None)(g))})
            continue
        if n != 2:
            raise UnsupportedDegreeError("sigma is implemented for degrees 0, 1 and 2")
        l2 = rng.choice(pool)
        l1 = rng.choice([p for p in paths if p.src == l2.rng])
        g = GroupoidElement.from_presentation(k.vertex(t.rng), l2, t)
        h = GroupoidElement.from_presentation(k.vertex(l2.rng), l1, g.y)
        values.append({"pair": [repr(g), repr(h)], "value": _render(sigma2_restricted(c, g, h))})
    return [_item(f"sigma{n}", "ok", seed=args.seed, samples=values)]


def cmd_paper_suite(doc, args) -> list[SuiteItem]:
    return run_all(args.N)


def cmd_counterexample(doc, args) -> list[SuiteItem]:
    return [counterexample_kgraph_side(args.N), counterexample_groupoid_side(args.N)]


COMMANDS = {
    "validate": (cmd_validate, True),
    "cohomology": (cmd_cohomology, True),
    "h1": (cmd_h1, True),
    "check-cocycle": (cmd_check_cocycle, True),
    "cobound": (cmd_cobound, True),
    "sigma": (cmd_sigma, True),
    "paper-suite": (cmd_paper_suite, False),
    "counterexample": (cmd_counterexample, False),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="catcohom", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"catcohom {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, needs_file: bool, help_text: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help_text)
        if needs_file:
            sp.add_argument("file", help=f"input document, or {BUILTIN_PREFIX}NAME for a bundled one")
        sp.add_argument("--timing", action="store_true", help="record wall time in the report")
        return sp

    add("validate", True, "check category or k-graph axioms and the module")
    add("cohomology", True, "H^n with the document's module (constant Z by default)").add_argument(
        "--n", type=int, required=True
    )
    add("h1", True, "H^1 with constant Z coefficients")
    sp = add("check-cocycle", True, "check the document's cochain is a cocycle")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--bound", type=int, default=3, help="total degree bound per slot for k-graphs")
    add("cobound", True, "find a potential for the document's cocycle").add_argument("--n", type=int, required=True)
    sp = add("sigma", True, "evaluate the groupoid translation of the document's cochain")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--samples", type=int, default=5)
    sp.add_argument("--seed", type=int, default=SIGMA_SEED)
    add("paper-suite", False, "run the built-in identity checks").add_argument("--N", type=int, default=10)
    add("counterexample", False, "run the non-injectivity counterexample").add_argument("--N", type=int, default=10)
    return p


def run(argv: Sequence[str] | None = None) -> tuple[dict, int]:
    args = build_parser().parse_args(argv)
    fn, needs_file = COMMANDS[args.command]
    start = time.perf_counter()
    digest = None
    try:
        doc = None
        if needs_file:
            _, raw = read_input(args.file)
            digest = hashlib.sha256(raw).hexdigest()
            doc = parse(raw.decode("utf-8"))
        if getattr(args, "n", 0) is not None and getattr(args, "n", 0) < 0:
            raise UnsupportedDegreeError("degree must be non-negative")
        items = fn(doc, args)
    except (CatcohomError, OSError) as exc:
        items = [_item(args.command, "error", error=type(exc).__name__, message=str(exc))]
    report = {
        "tool_version": __version__,
        "input_digest": digest,
        "command": args.command,
        "results": [it.to_json() for it in items],
        "wall_time": round(time.perf_counter() - start, 6) if args.timing else None,
    }
    statuses = {it.status for it in items}
    code = 2 if "error" in statuses else 1 if "violation" in statuses else 0
    return report, code


def main(argv: Sequence[str] | None = None) -> int:
    report, code = run(argv)
    json.dump(report, sys.stdout, sort_keys=True, indent=2)
    sys.stdout.write("\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
