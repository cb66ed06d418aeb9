"""Essential and j-essential monomorphisms, maximal essential extensions and
the checks relating them to sheaves, injectives and slices."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import BudgetExceeded, ConditionViolation, NotSeparated, OracleDisagreement
from .fixtures import enumerate_presheaves
from .ordering import jsonable, skey
from .presheaf import (
    NatTrans,
    Presheaf,
    Subpresheaf,
    generate_congruence,
    iter_homs,
    mono_image,
    subpresheaves,
)
from .sheaves import (
    dense_extensions,
    embed_separated_in_sheaf,
    injectivity,
    is_sheaf,
    singleton,
)
from .slice import (
    induced_topology,
    pullback_functor,
    pullback_subobject,
    transport_subobject,
    transport_topology,
)
from .topology import TopologyCandidate, chains, is_dense, relative


def _sub_json(m: Subpresheaf) -> dict:
    return {c: sorted((jsonable(x) for x in m.selected[c]), key=skey) for c in m.ambient.cat.objects}


@dataclass
class EssentialReport:
    mono: Subpresheaf
    essential: bool
    j_dense: bool | None = None
    j_essential: bool | None = None
    collapse_witness: dict | None = None

    def to_json(self) -> dict:
        return {
            "mono": _sub_json(self.mono),
            "essential": self.essential,
            "j_dense": self.j_dense,
            "j_essential": self.j_essential,
            "collapse_witness": self.collapse_witness,
        }


def collapse_witness(iota: Subpresheaf) -> dict | None:
    """A pair whose generated congruence stays injective on the subobject, if any."""
    A, B = iota.selected, iota.ambient
    for c in B.cat.objects:
        xs = B.carriers[c]
        for n, x in enumerate(xs):
            for y in xs[n + 1:]:
                theta = generate_congruence(B, [(c, x, y)])
                clash = False
                for d in B.cat.objects:
                    seen = set()
                    for a in A[d]:
                        r = theta.rep[d][a]
                        if r in seen:
                            clash = True
                            break
                        seen.add(r)
                    if clash:
                        break
                if not clash:
                    return {"stage": c, "pair": [jsonable(x), jsonable(y)],
                            "quotient": {d: [[jsonable(v) for v in cls] for cls in theta.classes(d)]
                                         for d in B.cat.objects}}
    return None


def is_essential(iota: Subpresheaf) -> EssentialReport:
    """Decided by collapsing each pair of the ambient object and testing injectivity on A.

    A non-mono g with g restricted to A mono identifies some pair x != y; the
    congruence generated by that pair is contained in the kernel of g, so it is
    injective on A as well.
    """
    w = collapse_witness(iota)
    return EssentialReport(iota, w is None, collapse_witness=w)


def is_j_essential(iota: Subpresheaf, j: TopologyCandidate) -> EssentialReport:
    rep = is_essential(iota)
    rep.j_dense = is_dense(iota, j)
    rep.j_essential = rep.essential and rep.j_dense
    return rep


# -- the three equivalent forms by direct enumeration --------------------------------


@dataclass
class EssentialFormsResult:
    agree: bool
    oracle: bool
    forms: dict
    maps_checked: int
    witness: dict | None = None


def _targets(B: Presheaf) -> tuple:
    """Every image of a map out of B is isomorphic to one of these."""
    return enumerate_presheaves(B.cat, max(B.sizes(), default=0))


def essential_forms_check(iota: Subpresheaf, j: TopologyCandidate) -> EssentialFormsResult:
    """Compare the congruence oracle with the three g-quantified forms.

    mono_to_mono: g iota mono implies g mono.  dense_to_dense: g iota dense mono
    implies g dense mono.  dense_to_mono: g iota dense mono implies g mono.
    The quantifier over g ranges over maps into presheaves no larger than the
    ambient per stage, which is complete: a failure for any g is also a
    failure for the corestriction of g to its image.
    """
    if not is_dense(iota, j):
        raise ConditionViolation("the mono is not j-dense")
    B = iota.ambient
    incl = iota.inclusion()
    forms = {"mono_to_mono": True, "dense_to_dense": True, "dense_to_mono": True}
    witness = None
    n = 0
    for T in _targets(B):
        for g in iter_homs(B, T):
            n += 1
            gi = g @ incl
            if not gi.is_mono():
                continue
            g_mono = g.is_mono()
            gi_dense = is_dense(mono_image(gi), j)
            if not g_mono:
                forms["mono_to_mono"] = False
                if gi_dense:
                    forms["dense_to_mono"] = False
                    forms["dense_to_dense"] = False
            elif gi_dense and not is_dense(mono_image(g), j):
                forms["dense_to_dense"] = False
            if not g_mono and witness is None:
                witness = {"target": T.describe(),
                           "map": {c: [[jsonable(x), jsonable(y)] for x, y in comp.items()]
                                   for c, comp in g.components.items()}}
    oracle = is_essential(iota).essential
    agree = forms["mono_to_mono"] == forms["dense_to_dense"] == forms["dense_to_mono"] == oracle
    return EssentialFormsResult(agree, oracle, forms, n, witness)


# -- maximal essential extensions ------------------------------------------------


@dataclass
class MaximalExtension:
    source: Presheaf
    ambient: Presheaf
    extension: Subpresheaf
    inclusion: NatTrans
    maximal_count: int
    explored: int

    @property
    def presheaf(self) -> Presheaf:
        return self.extension.presheaf


def _order(s: Subpresheaf):
    return (s.size(), skey(s._signature[1]))


def maximal_essential_extension(F: Presheaf, budget: int = 20000) -> MaximalExtension:
    """Search the essential extensions of F inside the injective Omega^F.

    F sits in Omega^F through the singleton map.  Subobjects between an
    essential extension and F are again essential over F, so every essential
    extension is reached by adding one generated element at a time.  The least
    maximal extension in canonical order is returned with the number of
    maximal ones.
    """
    E, sigma = singleton(F)
    base = mono_image(sigma)
    seen = {base}
    frontier = [base]
    maximal = []
    while frontier:
        nxt = []
        for H in frontier:
            grown = False
            for c in E.cat.objects:
                for x in E.carriers[c]:
                    if x in H.selected[c]:
                        continue
                    H2 = H | Subpresheaf.generated(E, [(c, x)])
                    if H2 in seen:
                        if _is_ess_over(base, H2):
                            grown = True
                        continue
                    if _is_ess_over(base, H2):
                        grown = True
                        seen.add(H2)
                        nxt.append(H2)
                        if len(seen) > budget:
                            raise BudgetExceeded("too many essential extensions")
            if not grown:
                maximal.append(H)
        frontier = sorted(nxt, key=_order)
    maximal.sort(key=_order)
    best = maximal[0]
    inc = NatTrans(F, best.presheaf, sigma.components, check=False)
    return MaximalExtension(F, E, best, inc, len(maximal), len(seen))


_ESS_CACHE: dict = {}


def _is_ess_over(base: Subpresheaf, H: Subpresheaf) -> bool:
    key = (base, H)
    if key not in _ESS_CACHE:
        if len(_ESS_CACHE) > 100000:
            _ESS_CACHE.clear()
        _ESS_CACHE[key] = is_essential(relative(base, H)).essential
    return _ESS_CACHE[key]


def embeds_in(ext: Subpresheaf, G: Presheaf, along: NatTrans) -> bool:
    """Whether the inclusion A >-> ext.ambient followed by some map into G is a
    mono extending ``along``: A -> G."""
    fixed = {c: {x: along.components[c][x] for x in ext.selected[c]} for c in G.cat.objects}
    return any(h.is_mono() for h in iter_homs(ext.ambient, G, fixed=fixed))


# -- slices ------------------------------------------------------------------------


def slice_essential(iota: Subpresheaf, B: Presheaf, j: TopologyCandidate | None = None) -> dict:
    """Whether the product of iota with B is (j_B-)essential over B.

    Decided twice: by collapsing pairs inside a single fiber of X x B, and by
    transporting to the category of elements of B.
    """
    P = pullback_functor(iota.ambient, B)
    sub = pullback_subobject(iota, B)
    direct = _fiberwise_essential(sub, P.structure)
    tsub = transport_subobject(sub, P)
    via = is_essential(tsub).essential
    if direct != via:
        raise OracleDisagreement("slice essentiality differs between the two routes")
    out = {"essential": direct}
    if j is not None:
        jt = transport_topology(induced_topology(j, B))
        dense = is_dense(tsub, jt)
        if dense != is_dense(sub, j):
            raise OracleDisagreement("slice density differs from density in the total object")
        out["j_dense"] = dense
        out["j_essential"] = direct and dense
    return out


def _fiberwise_essential(sub: Subpresheaf, structure: NatTrans) -> bool:
    X = sub.ambient
    for c in X.cat.objects:
        xs = X.carriers[c]
        for n, x in enumerate(xs):
            for y in xs[n + 1:]:
                if structure.components[c][x] != structure.components[c][y]:
                    continue
                theta = generate_congruence(X, [(c, x, y)])
                if all(len({theta.rep[d][a] for a in sub.selected[d]}) == len(sub.selected[d])
                       for d in X.cat.objects):
                    return False
    return True


# -- the essential-extension suite ----------------------------------------------------------


@dataclass
class EssentialSuiteReport:
    topology: str
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v.get("violations", 0) == 0 for v in self.checks.values())

    def to_json(self) -> dict:
        return {"topology": self.topology, "checks": self.checks, "passed": self.passed}


def _fixture_monos(cat, bound):
    for X in enumerate_presheaves(cat, bound):
        for A in subpresheaves(X):
            yield A


def composition_check(cat, j: TopologyCandidate, bound: int) -> dict:
    necessity = sufficiency = checked = 0
    witness = None
    for X in enumerate_presheaves(cat, bound):
        subs = subpresheaves(X)
        ess = {a: is_j_essential(a, j).j_essential for a in subs}
        for a, a2 in chains(X, subs):
            checked += 1
            inner = is_j_essential(relative(a, a2), j).j_essential
            whole = ess[a]
            both = inner and ess[a2]
            if whole and not both:
                necessity += 1
                witness = witness or {"object": X.describe(), "A": _sub_json(a), "A2": _sub_json(a2)}
            if both and not whole:
                sufficiency += 1
    claimed = bool(j.is_topology)
    out = {"checked": checked, "necessity_failures": necessity,
           "sufficiency_failures": sufficiency,
           "sufficiency": "claimed" if claimed else "not claimed",
           "violations": necessity + (sufficiency if claimed else 0), "witness": witness}
    return out


def sheaf_embedding_check(cat, j: TopologyCandidate, bound: int) -> dict:
    """A j-essential in X and A >-> F with F a sheaf: the unique extension X -> F is mono."""
    checked = violations = unavailable = 0
    witness = None
    sheaves = [F for F in enumerate_presheaves(cat, bound) if is_sheaf(F, j).sheaf]
    for a in _fixture_monos(cat, bound):
        if not is_j_essential(a, j).j_essential:
            continue
        A = a.presheaf
        targets = []
        try:
            emb = embed_separated_in_sheaf(A, j)
            targets.append((emb.sheaf, emb.inclusion))
        except NotSeparated:
            pass
        except ConditionViolation:
            unavailable += 1
        for F in sheaves:
            targets.extend((F, m) for m in iter_homs(A, F) if m.is_mono())
        for F, m in targets:
            checked += 1
            exts = list(iter_homs(a.ambient, F, fixed=m.components))
            if len(exts) != 1 or not exts[0].is_mono():
                violations += 1
                witness = witness or {"mono": _sub_json(a), "extensions": len(exts)}
    return {"checked": checked, "violations": violations, "witness": witness,
            "embedding_not_a_sheaf": unavailable}


def injective_check(cat, j: TopologyCandidate, bound: int, ext_bound: int = 1) -> dict:
    """j-injective fixtures have no proper j-essential extension (within ext_bound)."""
    checked = violations = 0
    witness = None
    for F in enumerate_presheaves(cat, bound):
        if not injectivity(F, j)[0]:
            continue
        checked += 1
        for G, inner in dense_extensions(F, j, ext_bound):
            if inner.is_whole():
                continue
            if is_essential(inner).essential:
                violations += 1
                witness = witness or {"object": F.describe(), "extension": G.describe()}
                break
    return {"checked": checked, "violations": violations, "witness": witness}


def reflection_check(cat, j: TopologyCandidate, B: Presheaf, bound: int) -> dict:
    """Pi_B(iota) j_B-essential implies iota j-essential."""
    checked = violations = 0
    witness = None
    for a in _fixture_monos(cat, bound):
        sl = slice_essential(a, B, j)
        if not sl["j_essential"]:
            continue
        checked += 1
        if not is_j_essential(a, j).j_essential:
            violations += 1
            witness = witness or {"mono": _sub_json(a), "ambient": a.ambient.describe()}
    return {"base": B.describe(), "well_supported": B.is_well_supported(), "checked": checked,
            "violations": violations, "witness": witness}


def essential_forms_sweep(cat, j: TopologyCandidate, bound: int) -> dict:
    checked = violations = 0
    witness = None
    for a in _fixture_monos(cat, bound):
        if not is_dense(a, j):
            continue
        r = essential_forms_check(a, j)
        checked += 1
        if not r.agree:
            violations += 1
            witness = witness or {"mono": _sub_json(a), "forms": r.forms, "oracle": r.oracle}
    return {"checked": checked, "violations": violations, "witness": witness}


def essential_suite(cat, j: TopologyCandidate, B: Presheaf | list | None = None,
                    bound: int = 2) -> EssentialSuiteReport:
    from .presheaf import terminal

    bases = [terminal(cat)] if B is None else (list(B) if isinstance(B, (list, tuple)) else [B])
    rep = EssentialSuiteReport(j.label or "custom")
    rep.checks["composition"] = composition_check(cat, j, bound)
    rep.checks["essential_forms"] = essential_forms_sweep(cat, j, bound)
    rep.checks["sheaf_embedding"] = sheaf_embedding_check(cat, j, bound)
    rep.checks["no_proper_extension"] = injective_check(cat, j, bound)
    refl = [reflection_check(cat, j, b, bound) for b in bases]
    rep.checks["reflection"] = {"bases": refl, "violations": sum(r["violations"] for r in refl)}
    return rep


__all__ = [
    "EssentialReport", "EssentialFormsResult", "MaximalExtension", "EssentialSuiteReport",
    "collapse_witness", "is_essential", "is_j_essential", "essential_forms_check",
    "maximal_essential_extension", "embeds_in", "slice_essential", "composition_check",
    "sheaf_embedding_check", "injective_check", "reflection_check", "essential_forms_sweep",
    "essential_suite",
]
