"""Separated objects, sheaves, j-injectives and the embedding into a sheaf.

The main decision procedure tests maps out of j-dense subobjects of
representables.  A map S -> F from a dense sieve S on C extends to Y(C) in as
many ways as there are x in F(C) restricting correctly, so F is separated
(a sheaf) iff every such count is at most one (exactly one).

The matching-family oracle redoes the same decision from the Grothendieck
side with its own enumeration, and the unique-absolute-retract check works
with arbitrary dense extensions F >-> G instead of generators.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import BudgetExceeded, ConditionViolation, NotSeparated
from .fincat import Sieve
from .ordering import jsonable, label
from .presheaf import (
    Exponential,
    NatTrans,
    Presheaf,
    Subpresheaf,
    char,
    count_homs,
    iter_homs,
    mono_image,
    omega,
    product,
    yoneda,
)
from .presheaf.core import DEFAULT_BUDGET
from .topology import (
    GrothendieckTopology,
    TopologyCandidate,
    associated_grothendieck,
    closure,
    dense_sieves,
    is_dense,
)


@dataclass
class SheafReport:
    obj: Presheaf
    separated: bool
    sheaf: bool
    j_injective: bool | None = None
    witnesses: list = field(default_factory=list)

    def witness(self, check: str):
        return next((w for w in self.witnesses if w["check"] == check), None)

    def to_json(self) -> dict:
        return {
            "object": self.obj.describe(),
            "separated": self.separated,
            "sheaf": self.sheaf,
            "j_injective": self.j_injective,
            "witnesses": self.witnesses,
        }


def sieve_subobject(cat, s: Sieve) -> Subpresheaf:
    """The subpresheaf of Y(C) given by a sieve S on C."""
    Y = yoneda(cat, s.at)
    return Subpresheaf(Y, {d: {k for k in s.members if cat.dom[k] == d} for d in cat.objects},
                       check=False)


def _generator_witness(check, s: Sieve, h: NatTrans, n: int) -> dict:
    return {
        "check": check,
        "stage": s.at,
        "dense_sieve": sorted(s.members),
        "map": {c: {k: jsonable(v) for k, v in comp.items()} for c, comp in h.components.items()},
        "extensions": n,
    }


def _generator_scan(F: Presheaf, j: TopologyCandidate, want_sheaf: bool = True):
    """Return (separated witness, sheaf witness), each None when no failure exists."""
    cat = F.cat
    sep_w = sheaf_w = None
    for c in cat.objects:
        for s in dense_sieves(j, c):
            sub = sieve_subobject(cat, s)
            if sub.is_whole():
                continue
            for h in iter_homs(sub.presheaf, F):
                n = count_homs(sub.ambient, F, fixed=h.components, limit=2)
                if n >= 2 and sep_w is None:
                    sep_w = _generator_witness("separated", s, h, n)
                if n != 1 and sheaf_w is None:
                    sheaf_w = _generator_witness("sheaf", s, h, n)
                if sep_w is not None and (sheaf_w is not None or not want_sheaf):
                    return sep_w, sheaf_w
    return sep_w, sheaf_w


def is_separated(F: Presheaf, j: TopologyCandidate) -> SheafReport:
    return is_sheaf(F, j)


def is_sheaf(F: Presheaf, j: TopologyCandidate, injective: bool = False) -> SheafReport:
    sep_w, sheaf_w = _generator_scan(F, j)
    rep = SheafReport(F, sep_w is None, sheaf_w is None)
    rep.witnesses = [w for w in (sep_w, sheaf_w) if w is not None]
    if rep.sheaf:
        rep.j_injective = True
    elif injective:
        ok, detail = injectivity(F, j)
        rep.j_injective = ok
        if not ok:
            rep.witnesses.append(detail)
    return rep


# -- matching families ------------------------------------------------------


def _matching_families(F: Presheaf, members: list, cat):
    """Compatible choices x_f in F(dom f) for f in the sieve, by backtracking."""
    chosen: dict = {}

    def compatible(f, x):
        for g in cat.morphisms:
            if cat.cod[g] != cat.dom[f]:
                continue
            fg = cat.table[(f, g)]
            want = x if fg == f else chosen.get(fg)
            if want is not None and F.actions[g][x] != want:
                return False
        for f2, x2 in chosen.items():
            for g in cat.morphisms:
                if cat.cod[g] == cat.dom[f2] and cat.table[(f2, g)] == f:
                    if F.actions[g][x2] != x:
                        return False
        return True

    def rec(n):
        if n == len(members):
            yield dict(chosen)
            return
        f = members[n]
        for x in F.carriers[cat.dom[f]]:
            if compatible(f, x):
                chosen[f] = x
                yield from rec(n + 1)
                del chosen[f]

    yield from rec(0)


def matching_family_check(F: Presheaf, J: GrothendieckTopology) -> tuple[bool, bool]:
    """(separated, sheaf) from amalgamations of matching families on covering sieves."""
    cat = F.cat
    separated = sheaf = True
    for c in cat.objects:
        for cover in J.covers[c]:
            members = sorted(cover)
            for fam in _matching_families(F, members, cat):
                n = sum(1 for x in F.carriers[c]
                        if all(F.actions[f][x] == fam[f] for f in members))
                if n > 1:
                    separated = False
                if n != 1:
                    sheaf = False
    return separated, sheaf


def matching_family_oracle(F: Presheaf, j: TopologyCandidate) -> tuple[bool, bool]:
    return matching_family_check(F, associated_grothendieck(j))


# -- dense extensions and retractions ---------------------------------------


def _fresh_labels(F: Presheaf, c, n: int) -> list:
    used = set(F.carriers[c])
    out, i = [], 0
    while len(out) < n:
        cand = ("new", c, i)
        if cand not in used:
            out.append(cand)
        i += 1
    return out


def extensions_of(F: Presheaf, bound: int, budget: int = DEFAULT_BUDGET):
    """Every presheaf G containing F as a subpresheaf with at most ``bound`` new
    elements per stage.  New elements are labelled ``("new", C, i)``."""
    cat = F.cat
    for extra in itertools.product(range(bound + 1), repeat=len(cat.objects)):
        new = {c: _fresh_labels(F, c, n) for c, n in zip(cat.objects, extra)}
        carriers = {c: list(F.carriers[c]) + new[c] for c in cat.objects}
        cells = [(k, x) for k in cat.non_identities for x in new[cat.cod[k]]]
        options = [carriers[cat.dom[k]] for k, _ in cells]
        count = 1
        for o in options:
            count *= len(o)
        if count > budget:
            raise BudgetExceeded(f"{count} candidate extensions exceed the budget")
        for values in itertools.product(*options):
            acts = {k: dict(F.actions[k]) for k in cat.non_identities}
            for (k, x), v in zip(cells, values):
                acts[k][x] = v
            G = Presheaf(cat, carriers, acts, check=False)
            if not G.violations():
                yield G


def dense_extensions(F: Presheaf, j: TopologyCandidate, bound: int):
    for G in extensions_of(F, bound):
        inner = Subpresheaf(G, F.carriers, check=False)
        if is_dense(inner, j):
            yield G, inner


def retractions(inner: Subpresheaf, limit: int | None = None) -> list[NatTrans]:
    """Maps G -> F fixing F, for ``inner`` = F as a subpresheaf of G."""
    G = inner.ambient
    F = inner.presheaf
    fixed = {c: {x: x for x in inner.selected[c]} for c in G.cat.objects}
    out = []
    for r in iter_homs(G, F, fixed=fixed):
        out.append(r)
        if limit is not None and len(out) >= limit:
            break
    return out


@dataclass
class RetractCheck:
    holds: bool
    extensions_checked: int
    witness: dict | None = None


def unique_absolute_retract_check(F: Presheaf, j: TopologyCandidate, bound: int = 2) -> RetractCheck:
    """Every dense extension of F (within ``bound``) has exactly one retraction."""
    checked = 0
    for G, inner in dense_extensions(F, j, bound):
        checked += 1
        n = len(retractions(inner, limit=2))
        if n != 1:
            return RetractCheck(False, checked, {
                "extension": G.describe(), "retractions": n,
            })
    return RetractCheck(True, checked)


# -- j-injectivity -----------------------------------------------------------


def diagonal(F: Presheaf) -> Subpresheaf:
    P = product(F, F).obj
    return Subpresheaf(P, {c: {(x, x) for x in F.carriers[c]} for c in F.cat.objects},
                       check=False)


def singleton(F: Presheaf, budget: int = DEFAULT_BUDGET) -> tuple[Exponential, NatTrans]:
    """The mono F -> Omega^F transposing char of the diagonal."""
    E = Exponential(F, omega(F.cat), budget)
    return E, E.transpose(F, char(diagonal(F)))


def injectivity(F: Presheaf, j: TopologyCandidate, budget: int = DEFAULT_BUDGET) -> tuple[bool, dict]:
    """F is j-injective iff F >-> closure of F in Omega^F has a retraction.

    Omega^F is injective, and a map from any G into it that sends a dense
    subobject into the closed subobject cl(F) lands entirely in cl(F).
    """
    E, sigma = singleton(F, budget)
    img = mono_image(sigma)
    cl = closure(img, j)
    Fbar = cl.presheaf
    fixed = {c: {sigma.components[c][x]: x for x in F.carriers[c]} for c in F.cat.objects}
    for _r in iter_homs(Fbar, F, fixed=fixed):
        return True, {"check": "injective", "closure_sizes": list(Fbar.sizes()), "retraction": True}
    return False, {"check": "injective", "closure_sizes": list(Fbar.sizes()), "retraction": False}


def is_j_injective(F: Presheaf, j: TopologyCandidate, budget: int = DEFAULT_BUDGET) -> bool:
    return injectivity(F, j, budget)[0]


def injective_refutation(F: Presheaf, j: TopologyCandidate, bound: int) -> dict | None:
    """A dense extension of F (within bound) admitting no retraction, if any."""
    for G, inner in dense_extensions(F, j, bound):
        if not retractions(inner, limit=1):
            return {"extension": G.describe()}
    return None


# -- Omega_j and the embedding of a separated object ------------------------


@dataclass
class OmegaJ:
    j: TopologyCandidate
    sub: Subpresheaf

    @property
    def presheaf(self) -> Presheaf:
        return self.sub.presheaf

    def inclusion(self) -> NatTrans:
        return self.sub.inclusion()

    def closed_char(self, m: Subpresheaf) -> NatTrans:
        """j . char(m), landing in Omega_j."""
        chi = char(m)
        jc = self.j.j.components
        comps = {c: {x: jc[c][s] for x, s in chi.components[c].items()} for c in m.ambient.cat.objects}
        return NatTrans(m.ambient, self.presheaf, comps, check=False)


def omega_j(j: TopologyCandidate) -> OmegaJ:
    Om = omega(j.cat)
    sub = Subpresheaf(Om, {c: {s for s in Om.carriers[c] if j(s) == s} for c in j.cat.objects},
                      check=False)
    return OmegaJ(j, sub)


@dataclass
class SheafEmbedding:
    source: Presheaf
    ambient: Exponential
    singleton: NatTrans
    closure: Subpresheaf
    inclusion: NatTrans

    @property
    def sheaf(self) -> Presheaf:
        return self.closure.presheaf


def embed_separated_in_sheaf(F: Presheaf, j: TopologyCandidate,
                             budget: int = DEFAULT_BUDGET, verify: bool = True) -> SheafEmbedding:
    """Dense mono from a separated F into a j-sheaf.

    Transposes ``j . char(diagonal)`` to F -> Omega_j^F, then closes the image.
    """
    OJ = omega_j(j)
    E = Exponential(F, OJ.presheaf, budget)
    sigma = E.transpose(F, OJ.closed_char(diagonal(F)))
    for c in F.cat.objects:
        seen: dict = {}
        for x in F.carriers[c]:
            v = sigma.components[c][x]
            if v in seen:
                raise NotSeparated(
                    f"{label(seen[v])} and {label(x)} at {c} have the same closed singleton",
                    witness={"stage": c, "pair": [jsonable(seen[v]), jsonable(x)]},
                )
            seen[v] = x
    img = mono_image(sigma)
    cl = closure(img, j)
    S = cl.presheaf
    inc = NatTrans(F, S, sigma.components, check=False)
    emb = SheafEmbedding(F, E, sigma, cl, inc)
    if verify and not is_sheaf(S, j).sheaf:
        raise ConditionViolation("closure inside Omega_j^F is not a sheaf")
    return emb
