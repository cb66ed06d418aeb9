"""Per-theorem check suites.  Every suite returns a JSON-ready dict with a
``passed`` flag; failures carry witnesses that can be replayed with ``check``."""

from __future__ import annotations

from dataclasses import dataclass, field

from .essential import (
    embeds_in,
    is_j_essential,
    maximal_essential_extension,
    essential_suite,
)
from .factorization import mono_factorization_suite, slice_perp_check, factorization_suite
from .fincat import FinCat
from .fixtures import enumerate_presheaves
from .io import presheaf_to_json, subobject_to_json
from .presheaf import (
    Subpresheaf,
    constant_presheaf,
    initial,
    is_isomorphic,
    iter_homs,
    subpresheaves,
    terminal,
)
from .sheaves import (
    injectivity,
    is_sheaf,
    matching_family_oracle,
    singleton,
    unique_absolute_retract_check,
)
from .slice import (
    SliceObject,
    constant_exponential_iso,
    constant_sections_iso,
    fibers,
    graph,
    group_exponential_formula,
    induced_topology,
    is_section,
    monoid_sections_formula,
    pullback_functor,
    pullback_subobject,
    sections_object,
    slice_closure,
    slice_is_injective,
    slice_sheaf_check,
)
from .topology import (
    TopologyCandidate,
    classify_mono,
    composition_law,
    enumerate_candidates,
    enumerate_grothendieck,
    enumerate_topologies,
    from_grothendieck,
    maximal_topology,
    pushout_preserves_density,
)


@dataclass
class SuiteContext:
    cat: FinCat
    j: TopologyCandidate
    bases: list = field(default_factory=list)
    bound: int = 2

    def default_bases(self) -> list:
        return self.bases or [terminal(self.cat)]


def default_bases(cat: FinCat, bound: int) -> list:
    """The terminal presheaf and every well-supported fixture up to ``bound``."""
    one = terminal(cat)
    out = [one]
    for B in enumerate_presheaves(cat, bound):
        if B.is_well_supported() and not is_isomorphic(B, one):
            out.append(B)
    return out


def _replay(target: str, F, sub: Subpresheaf | None = None, base=None) -> dict:
    out = {"target": target, "presheaf": presheaf_to_json(F, with_category=False)}
    if sub is not None:
        out["sub"] = subobject_to_json(sub)
    if base is not None:
        out["base"] = presheaf_to_json(base, with_category=False)
    return out


def _one_monoid_object(cat: FinCat) -> bool:
    return len(cat.objects) == 1


def _inverses(cat: FinCat) -> dict | None:
    (obj,) = cat.objects
    unit = cat.identity[obj]
    inv = {}
    for k in cat.morphisms:
        found = [h for h in cat.morphisms if cat.compose(h, k) == unit and cat.compose(k, h) == unit]
        if not found:
            return None
        inv[k] = found[0]
    return inv


# -- topologies and dense/closed monos --------------------------------------------------


def suite_topologies(ctx: SuiteContext) -> dict:
    cat = ctx.cat
    tops = enumerate_topologies(cat)
    groth = {from_grothendieck(J).key() for J in enumerate_grothendieck(cat)}
    agree = {j.key() for j in tops} == groth
    j = ctx.j
    counts = {"both": 0, "dense": 0, "closed": 0, "neither": 0}
    violations = []
    for m in _fixture_monos(cat, ctx.bound):
        kind = classify_mono(m, j)
        counts[kind] += 1
        whole = m.is_whole()
        dense = kind in ("both", "dense")
        closed = kind in ("both", "closed")
        expect = None
        if j.is_identity:
            expect = (whole, True)
        elif j.is_maximal:
            expect = (True, whole)
        if expect is not None and (dense, closed) != expect:
            violations.append(_replay("dense", m.ambient, m))
        if dense and closed and not whole:
            violations.append(_replay("closed", m.ambient, m))
    return {"passed": agree and not violations, "topologies": len(tops),
            "grothendieck": len(groth), "cross_oracle_agrees": agree,
            "monos": counts, "violations": len(violations), "witnesses": violations[:3]}


def _fixture_monos(cat, bound):
    for X in enumerate_presheaves(cat, bound):
        yield from subpresheaves(X)


# -- sheaves versus unique absolute retracts versus matching families ---------------------


def suite_sheaf_criteria(ctx: SuiteContext) -> dict:
    cat, j = ctx.cat, ctx.j
    n = 0
    disagreements = []
    for F in enumerate_presheaves(cat, ctx.bound):
        n += 1
        rep = is_sheaf(F, j)
        ura = unique_absolute_retract_check(F, j, bound=2).holds
        sep_m, sheaf_m = matching_family_oracle(F, j)
        if not (rep.sheaf == ura == sheaf_m) or rep.separated != sep_m:
            disagreements.append({"generator": rep.sheaf, "retract": ura, "matching": sheaf_m,
                                  "separated": [rep.separated, sep_m],
                                  "replay": _replay("sheaf", F)})
    return {"passed": not disagreements, "objects": n, "disagreements": len(disagreements),
            "witnesses": disagreements[:3]}


# -- the pullback functor preserves and reflects ---------------------------------------


def pullback_reflection_for_base(cat, j, B, bound) -> dict:
    jB = induced_topology(j, B)
    violations = []
    monos = 0
    for m in _fixture_monos(cat, bound):
        monos += 1
        g = pullback_functor(m.ambient, B)
        k = pullback_subobject(m, B)
        cl = slice_closure(k, g, jB)
        slice_dense = cl.is_whole()
        slice_closed = cl == k
        cls = classify_mono(m, j)
        dense = cls in ("both", "dense")
        closed = cls in ("both", "closed")
        if (dense, closed) != (slice_dense, slice_closed):
            violations.append({"kind": "mono", "dense": [dense, slice_dense],
                               "closed": [closed, slice_closed],
                               "replay": _replay("dense", m.ambient, m, B)})
    objects = 0
    for F in enumerate_presheaves(cat, bound):
        objects += 1
        rep = is_sheaf(F, j)
        srep = slice_sheaf_check(pullback_functor(F, B), jB)
        if (rep.sheaf, rep.separated) != (srep.sheaf, srep.separated):
            violations.append({"kind": "object", "sheaf": [rep.sheaf, srep.sheaf],
                               "separated": [rep.separated, srep.separated],
                               "replay": _replay("sheaf", F, None, B)})
    return {"base": B.describe(), "well_supported": B.is_well_supported(), "monos": monos,
            "objects": objects, "violations": len(violations), "witnesses": violations[:3]}


def suite_pullback_reflection(ctx: SuiteContext) -> dict:
    per = [pullback_reflection_for_base(ctx.cat, ctx.j, B, ctx.bound) for B in ctx.default_bases()]
    return {"passed": all(p["violations"] == 0 for p in per), "bases": per}


# -- factorization --------------------------------------------------------------------


def suite_factorization(ctx: SuiteContext) -> dict:
    cat, j = ctx.cat, ctx.j
    bases = ctx.default_bases()
    main = factorization_suite(cat, j, bound=min(ctx.bound, 2), bases=bases)
    cor = mono_factorization_suite(cat, bound=min(ctx.bound, 2), bases=bases)
    l23 = [slice_perp_check(cat, j, B, bound=min(ctx.bound, 2)) for B in bases]
    l23_bad = sum(r["violations"] for r in l23)
    return {"passed": main.consistent and cor.consistent and l23_bad == 0,
            "statements": main.to_json(), "all_monos": cor.to_json(),
            "perp_inclusion": {"checked": sum(r["checked"] for r in l23), "violations": l23_bad}}


# -- sections and slice sheaves --------------------------------------------------------


def suite_slice_sheaves(ctx: SuiteContext) -> dict:
    cat, j = ctx.cat, ctx.j
    maximal = j.is_maximal
    counts = {"slice_objects": 0, "sufficient": 0, "sheaves": 0}
    violations = []
    fixtures = enumerate_presheaves(cat, ctx.bound)
    for B in fixtures:
        jB = induced_topology(j, B)
        for X in fixtures:
            for f in iter_homs(X, B):
                so = SliceObject.of(f)
                counts["slice_objects"] += 1
                section = is_section(graph(so))
                S_sheaf = is_sheaf(sections_object(so).presheaf, j).sheaf
                f_sheaf = slice_sheaf_check(so, jB).sheaf
                if section and S_sheaf:
                    counts["sufficient"] += 1
                    if not f_sheaf:
                        violations.append({"rule": "section and sheaf of sections imply sheaf"})
                if f_sheaf:
                    counts["sheaves"] += 1
                    if not S_sheaf:
                        violations.append({"rule": "sections of a sheaf form a sheaf"})
                    if maximal and not section:
                        violations.append({"rule": "maximal topology: sheaf implies section"})
    out = {"passed": not violations, **counts, "violations": len(violations),
           "witnesses": violations[:3]}
    out["constant_bases"] = _constant_base_props(cat, ctx.bound)
    out["passed"] = out["passed"] and out["constant_bases"]["violations"] == 0
    return out


def _constant_base_props(cat: FinCat, bound: int) -> dict:
    """Sheaf and injectivity in a slice over a constant presheaf, fiber by fiber."""
    mx = maximal_topology(cat)
    checked = violations = 0
    for n in range(1, bound + 1):
        A = list(range(n))
        F = constant_presheaf(cat, A)
        jF = induced_topology(mx, F)
        for G in enumerate_presheaves(cat, bound):
            for alpha in iter_homs(G, F):
                so = SliceObject.of(alpha)
                checked += 1
                section = is_section(graph(so))
                H = fibers(alpha, A)
                sheaf_side = slice_sheaf_check(so, jF).sheaf
                fib_sheaf = all(is_sheaf(H[a].presheaf, mx).sheaf for a in A)
                inj_side = slice_is_injective(so)
                fib_inj = all(injectivity(H[a].presheaf, mx)[0] for a in A)
                if sheaf_side != (section and fib_sheaf) or inj_side != (section and fib_inj):
                    violations += 1
    return {"checked": checked, "violations": violations}


def suite_section_formulas(ctx: SuiteContext) -> dict:
    cat = ctx.cat
    results = {"exponential": [0, 0], "sections": [0, 0], "monoid": [0, 0], "group": [0, 0]}

    def tally(name, ok):
        results[name][0] += 1
        if not ok:
            results[name][1] += 1

    for n in range(0, 4):
        A = list(range(n))
        F = constant_presheaf(cat, A)
        for G in enumerate_presheaves(cat, min(ctx.bound, 2)):
            r = constant_exponential_iso(G, F, A)
            tally("exponential", r["bijective"] and r["natural"])
            for alpha in iter_homs(G, F):
                r = constant_sections_iso(alpha, A)
                tally("sections", r["bijective"] and r["natural"])
    if _one_monoid_object(cat):
        (obj,) = cat.objects
        elements = list(cat.morphisms)
        # right action: x.(mn) = (x.m).n, i.e. mn is the composite m after n
        mult = {(m, n): cat.compose(m, n) for m in elements for n in elements}
        fixtures = enumerate_presheaves(cat, ctx.bound)
        for B in fixtures:
            for X in fixtures:
                for f in iter_homs(X, B):
                    tally("monoid", monoid_sections_formula(SliceObject.of(f), mult, elements)["equal"])
        inv = _inverses(cat)
        if inv is not None:
            for B in fixtures:
                for X in fixtures:
                    r = group_exponential_formula(X, B, inv)
                    tally("group", r["bijective"] and r["action"])
    out = {k: {"checked": v[0], "failures": v[1]} for k, v in results.items()}
    out["passed"] = all(v[1] == 0 for v in results.values())
    return out


# -- essential extensions ---------------------------------------------------------------


def suite_essential(ctx: SuiteContext) -> dict:
    cat, j = ctx.cat, ctx.j
    one, zero = terminal(cat), initial(cat)
    empty_in_one = Subpresheaf.empty(one)
    basics = {
        "empty_in_terminal_essential_under_maximal":
            bool(is_j_essential(empty_in_one, maximal_topology(cat)).j_essential),
        "maximal_extension_of_empty_is_terminal":
            is_isomorphic(maximal_essential_extension(zero).presheaf, one),
    }
    rep = essential_suite(cat, j, ctx.default_bases(), bound=ctx.bound)
    inj = _essential_into_injective(cat, min(ctx.bound, 2))
    passed = rep.passed and all(basics.values()) and inj["violations"] == 0
    return {"passed": passed, "basics": basics, "checks": rep.to_json()["checks"],
            "into_injective": inj}


def _essential_into_injective(cat, bound) -> dict:
    """An essential extension A <= X embeds over A into the injective Omega^A."""
    checked = violations = 0
    for m in _fixture_monos(cat, bound):
        if not is_j_essential(m, maximal_topology(cat)).essential:
            continue
        checked += 1
        E, sigma = singleton(m.presheaf)
        if not embeds_in(m, E, sigma):
            violations += 1
    return {"checked": checked, "violations": violations}


# -- weak topologies ---------------------------------------------------------------------


def suite_weak(ctx: SuiteContext) -> dict:
    cat = ctx.cat
    weak = enumerate_candidates(cat, "weak")
    prod = enumerate_candidates(cat, "productive_weak")
    tops = enumerate_topologies(cat)
    wk, pk = {j.key() for j in weak}, {j.key() for j in prod}
    nested = {j.key() for j in tops} <= pk <= wk
    fixtures = enumerate_presheaves(cat, min(ctx.bound, 2))
    pushout_failures = necessity = sufficiency = 0
    for j in weak:
        pushout_failures += len(pushout_preserves_density(fixtures, j)["failures"])
        for F in fixtures:
            law = composition_law(F, j)
            necessity += len(law["necessity"])
            if not j.is_topology:
                sufficiency += len(law["sufficiency"])
    return {"passed": nested and pushout_failures == 0 and necessity == 0,
            "weak": len(weak), "productive_weak": len(prod), "topologies": len(tops),
            "nested": nested, "pushout_failures": pushout_failures,
            "composition": {"necessity_failures": necessity,
                            "sufficiency": "not claimed",
                            "sufficiency_failures_for_non_topologies": sufficiency}}


SUITES = {
    "topologies": suite_topologies,
    "sheaf_criteria": suite_sheaf_criteria,
    "pullback_reflection": suite_pullback_reflection,
    "factorization": suite_factorization,
    "slice_sheaves": suite_slice_sheaves,
    "section_formulas": suite_section_formulas,
    "essential": suite_essential,
    "weak": suite_weak,
}

# suites whose outcome does not depend on the selected topology
TOPOLOGY_FREE = ("section_formulas", "weak")


def run_suite(name: str, ctx: SuiteContext) -> dict:
    return SUITES[name](ctx)


__all__ = ["SUITES", "TOPOLOGY_FREE", "SuiteContext", "default_bases",
           "pullback_reflection_for_base", "run_suite"]
