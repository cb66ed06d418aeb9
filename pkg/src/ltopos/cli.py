"""Command line front end for the check suites and single-property checks.

Exit codes: 0 pass, 1 check failure, 2 invalid input, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import BudgetExceeded, ToposError
from .essential import is_j_essential, maximal_essential_extension
from .fincat import FinCat, sieves_on
from .fixtures import BUILTIN_CATEGORIES, builtin
from .io import (
    load_category,
    load_presheaf,
    load_slice,
    presheaf_to_json,
    select_topology,
    subobject_from_json,
    subobject_to_json,
    write_output,
)
from .ordering import label
from .presheaf import omega
from .sheaves import injectivity, is_sheaf
from .slice import (
    graph,
    induced_topology,
    is_section,
    pullback_functor,
    pullback_subobject,
    sections_object,
    slice_closure,
    slice_sheaf_check,
    terminal_slice,
)
from .suites import SUITES, TOPOLOGY_FREE, SuiteContext, default_bases, run_suite
from .topology import classify_mono, enumerate_candidates, enumerate_grothendieck

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


def _categories(selector: str) -> list[FinCat]:
    if selector in ("builtin:all", "all"):
        return [builtin(n) for n in BUILTIN_CATEGORIES]
    return [load_category(selector)]


def _bases(args, cat: FinCat) -> list:
    if args.base:
        return [load_presheaf(b, cat) for b in args.base]
    return default_bases(cat, min(args.bound, 2))


def _suites(selector: str) -> list[str]:
    if selector == "all":
        return list(SUITES)
    names = [s.strip() for s in selector.split(",") if s.strip()]
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        raise ToposError(f"unknown suite(s) {unknown}; choose from {sorted(SUITES)}")
    return names


def cmd_run(args) -> tuple[int, dict]:
    report = {"bound": args.bound, "categories": {}}
    ok = True
    for cat in _categories(args.category):
        names = _suites(args.suite)
        tops = select_topology(args.topology, cat)
        bases = _bases(args, cat)
        entry = {"topologies": {}, "topology_free": {}}
        for name in names:
            if name in TOPOLOGY_FREE:
                res = run_suite(name, SuiteContext(cat, tops[0], bases, args.bound))
                entry["topology_free"][name] = res
                ok = ok and res["passed"]
        for n, j in enumerate(tops):
            key = j.label or f"topology{n}"
            per = {}
            for name in names:
                if name in TOPOLOGY_FREE:
                    continue
                res = run_suite(name, SuiteContext(cat, j, bases, args.bound))
                per[name] = res
                ok = ok and res["passed"]
            entry["topologies"][key] = per
        report["categories"][cat.name or "category"] = entry
    report["passed"] = ok
    return (EXIT_OK if ok else EXIT_FAIL), report


def cmd_enumerate(args) -> tuple[int, dict]:
    cat = load_category(args.category)
    kind = args.kind
    if kind in ("topologies", "weak", "productive_weak"):
        k = {"topologies": "topology"}.get(kind, kind)
        items = [j.describe() for j in enumerate_candidates(cat, k)]
        out = {"kind": kind, "count": len(items), "items": items}
    elif kind == "grothendieck":
        items = [J.describe() for J in enumerate_grothendieck(cat)]
        out = {"kind": kind, "count": len(items), "items": items}
    elif kind == "sieves":
        out = {"kind": kind, "sieves": {c: [sorted(s.members) for s in sieves_on(cat, c)]
                                        for c in cat.objects}}
    elif kind == "omega":
        Om = omega(cat)
        out = {"kind": kind, "sizes": {c: len(Om.carriers[c]) for c in cat.objects},
               "omega": presheaf_to_json(Om, with_category=False)}
    else:
        raise ToposError(f"unknown kind {kind!r}")
    return EXIT_OK, out


def _mono(args, cat):
    F = load_presheaf(args.presheaf, cat)
    if args.sub is None:
        raise ToposError("this check needs --sub with the selected elements")
    sel = json.loads(args.sub)
    if not isinstance(sel, dict):
        raise ToposError("--sub must be a JSON object keyed by object names")
    return subobject_from_json(sel, F)


def cmd_check(args) -> tuple[int, dict]:
    cat = load_category(args.category)
    target = args.target
    tops = select_topology(args.topology, cat) if target not in ("sections", "graph") else []
    j = tops[0] if tops else None
    B = load_presheaf(args.base[0], cat) if args.base else None
    out: dict = {"target": target}
    if target in ("sheaf", "separated"):
        F = load_presheaf(args.presheaf, cat)
        if B is None:
            rep = is_sheaf(F, j)
        else:
            rep = slice_sheaf_check(pullback_functor(F, B), induced_topology(j, B))
        out.update(rep.to_json())
        passed = rep.sheaf if target == "sheaf" else rep.separated
    elif target == "injective":
        F = load_presheaf(args.presheaf, cat)
        passed, detail = injectivity(F, j)
        out["detail"] = detail
    elif target in ("dense", "closed"):
        m = _mono(args, cat)
        if B is None:
            kind = classify_mono(m, j)
            dense, closed = kind in ("both", "dense"), kind in ("both", "closed")
        else:
            k = pullback_subobject(m, B)
            cl = slice_closure(k, pullback_functor(m.ambient, B), induced_topology(j, B))
            dense, closed = cl.is_whole(), cl == k
        out.update({"sub": subobject_to_json(m), "dense": dense, "closed": closed})
        passed = dense if target == "dense" else closed
    elif target == "essential":
        m = _mono(args, cat)
        rep = is_j_essential(m, j)
        out.update(rep.to_json())
        passed = rep.j_essential
    elif target == "extension":
        F = load_presheaf(args.presheaf, cat)
        ext = maximal_essential_extension(F)
        out.update({"extension": presheaf_to_json(ext.presheaf, with_category=False),
                    "maximal_count": ext.maximal_count})
        passed = True
    elif target in ("sections", "graph"):
        if args.slice:
            f = load_slice(args.slice, cat)
        elif B is not None:
            f = terminal_slice(B)
        else:
            raise ToposError("give --slice, or --base for the identity of the base")
        if target == "sections":
            S = sections_object(f).presheaf
            out["sizes"] = {c: len(S.carriers[c]) for c in cat.objects}
            passed = True
        else:
            passed = is_section(graph(f))
            out["section"] = passed
    else:
        raise ToposError(f"unknown check {target!r}")
    out["passed"] = bool(passed)
    return (EXIT_OK if passed else EXIT_FAIL), out


def _text(report: dict, indent: int = 0) -> list[str]:
    lines = []
    pad = "  " * indent
    for key in sorted(report):
        val = report[key]
        if isinstance(val, dict):
            if "passed" in val and indent >= 2:
                lines.append(f"{pad}{key}: {'PASS' if val['passed'] else 'FAIL'}")
                continue
            lines.append(f"{pad}{key}:")
            lines.extend(_text(val, indent + 1))
        elif isinstance(val, list):
            lines.append(f"{pad}{key}: {len(val)} item(s)")
        else:
            lines.append(f"{pad}{key}: {label(val) if isinstance(val, tuple) else val}")
    return lines


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ltopos", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, topology=True):
        sp.add_argument("--category", default="builtin:C1",
                        help="category file or builtin:C1|C2|M2|Z2 (run also accepts builtin:all)")
        if topology:
            sp.add_argument("--topology", default="builtin:identity",
                            help="file, idx:N, builtin:identity, builtin:maximal or all")
        sp.add_argument("--out", help="write the JSON report here")
        sp.add_argument("--format", choices=("json", "text"), default="json")

    r = sub.add_parser("run", help="run check suites")
    common(r)
    r.add_argument("--suite", default="all", help="comma separated: " + ",".join(SUITES))
    r.add_argument("--bound", type=int, default=2, help="per-stage size cap for fixtures")
    r.add_argument("--base", action="append", help="base presheaf for slice checks (repeatable)")

    e = sub.add_parser("enumerate", help="list topologies, sieves or Omega")
    common(e, topology=False)
    e.add_argument("kind", choices=("topologies", "productive_weak", "weak", "grothendieck",
                                    "sieves", "omega"))

    c = sub.add_parser("check", help="check one property")
    common(c)
    c.add_argument("target", choices=("sheaf", "separated", "injective", "dense", "closed",
                                      "essential", "extension", "sections", "graph"))
    c.add_argument("--presheaf", help="presheaf file or builtin:terminal|initial|yoneda:C")
    c.add_argument("--sub", help="selected elements as JSON, e.g. '{\"*\": [0]}'")
    c.add_argument("--base", action="append", help="evaluate in the slice over this presheaf")
    c.add_argument("--slice", help="slice object file")
    c.add_argument("--bound", type=int, default=2)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    handler = {"run": cmd_run, "enumerate": cmd_enumerate, "check": cmd_check}[args.command]
    try:
        code, report = handler(args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ToposError, OSError, ValueError, KeyError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = write_output(report, args.out)
    if args.format == "text":
        sys.stdout.write("\n".join(_text(report)) + "\n")
    elif not args.out:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
