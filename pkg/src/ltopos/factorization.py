"""Orthogonality against dense monos, left cancelability and the factorization
suite relating sheaves, separated objects and (M, M-perp) factorizations."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .errors import BudgetExceeded, NotSeparated
from .fincat import FinCat
from .fixtures import enumerate_presheaves
from .ordering import jsonable
from .presheaf import (
    NatTrans,
    Presheaf,
    Subpresheaf,
    identity,
    iter_homs,
    mono_image,
    omega,
    pair,
    product,
    pushout,
    terminal,
)
from .sheaves import dense_extensions, embed_separated_in_sheaf, is_sheaf, sieve_subobject
from .slice import (
    SliceMorphism,
    SliceObject,
    elements_of,
    induced_topology,
    transport,
    transport_topology,
)
from .topology import TopologyCandidate, is_dense, maximal_topology


def _map_json(h: NatTrans) -> dict:
    return {c: [[jsonable(x), jsonable(y)] for x, y in comp.items()] for c, comp in h.components.items()}


def as_subobject(f: NatTrans) -> Subpresheaf:
    return mono_image(f)


def in_dense_monos(f: NatTrans, j: TopologyCandidate) -> bool:
    return f.is_mono() and is_dense(mono_image(f), j)


@dataclass
class MorphismClassSpec:
    """A class of arrows given by a membership predicate.

    ``kind`` is one of ``dense_monos``, ``dense_monos_slice``, ``perp_of`` or
    ``custom``; ``bound`` caps per-stage sizes wherever enumeration is needed.
    """

    kind: str
    j: TopologyCandidate | None = None
    base: Presheaf | None = None
    bound: int = 2
    predicate: Callable | None = None
    name: str = ""

    def contains(self, f) -> bool:
        if self.kind == "dense_monos":
            return in_dense_monos(f, self.j)
        if self.kind == "dense_monos_slice":
            return f.is_mono() and is_dense(mono_image(f.map), self.j)
        if self.kind == "perp_of":
            return perp_membership(f, self.j).holds
        if self.kind == "custom":
            return bool(self.predicate(f))
        raise ValueError(f"unknown class kind {self.kind!r}")


# -- orthogonality -------------------------------------------------------------


@dataclass
class OrthogonalityResult:
    holds: bool
    squares: int
    witness: dict | None = None
    mode: str = "exact"


def _diagonals(f: NatTrans, g: NatTrans, u: NatTrans, v: NatTrans, limit: int = 2) -> int:
    """Arrows w with w f = u and g w = v."""
    E, C = f.target, g.source
    fixed: dict = {c: {} for c in E.cat.objects}
    for c in E.cat.objects:
        for a, e in f.components[c].items():
            prev = fixed[c].get(e)
            if prev is not None and prev != u.components[c][a]:
                return 0
            fixed[c][e] = u.components[c][a]
    allowed = {c: {e: [x for x in C.carriers[c] if g.components[c][x] == v.components[c][e]]
                   for e in E.carriers[c]} for c in E.cat.objects}
    n = 0
    for _w in iter_homs(E, C, fixed=fixed, allowed=allowed):
        n += 1
        if n >= limit:
            break
    return n


def is_right_orthogonal(g: NatTrans, f: NatTrans) -> OrthogonalityResult:
    """Unique diagonal for every commutative square from f to g."""
    A, E = f.source, f.target
    C = g.source
    squares = 0
    for v in iter_homs(E, g.target):
        allowed = {c: {a: [x for x in C.carriers[c]
                           if g.components[c][x] == v.components[c][f.components[c][a]]]
                       for a in A.carriers[c]} for c in A.cat.objects}
        for u in iter_homs(A, C, allowed=allowed):
            squares += 1
            n = _diagonals(f, g, u, v)
            if n != 1:
                return OrthogonalityResult(False, squares, {
                    "u": _map_json(u), "v": _map_json(v), "diagonals": n})
    return OrthogonalityResult(True, squares)


@dataclass
class PerpResult:
    holds: bool
    witness: dict | None = None
    mode: str = "exact"
    cross_checked: int = 0


def perp_membership(g: NatTrans, j, bound: int | None = None) -> PerpResult:
    """g in M-perp, decided on generator squares (dense sieve S >-> Y(C)).

    Every dense mono is built from these, so the test is exact.  With a
    ``bound`` the verdict is re-checked against every dense extension of every
    fixture presheaf up to that size.  ``j`` may be a topology or a
    ``MorphismClassSpec`` of kind ``dense_monos``.
    """
    if isinstance(j, MorphismClassSpec):
        if j.kind != "dense_monos":
            raise ValueError("perp_membership needs a class of dense monos")
        bound = j.bound if bound is None else bound
        j = j.j
    cat = g.source.cat
    C, D = g.source, g.target
    Om = omega(cat)
    witness = None
    for c in cat.objects:
        top = Om.top(c)
        for s in Om.carriers[c]:
            if j(s) != top or s == top:
                continue
            sub = sieve_subobject(cat, s)
            for v in D.carriers[c]:
                allowed = {d: {k: [x for x in C.carriers[d] if g.components[d][x] == D.act(k, v)]
                               for k in sub.selected[d]} for d in cat.objects}
                for u in iter_homs(sub.presheaf, C, allowed=allowed):
                    n = sum(1 for x in C.carriers[c] if g.components[c][x] == v
                            and all(C.act(k, x) == u.components[cat.dom[k]][k] for k in s.members))
                    if n != 1:
                        witness = {"stage": c, "dense_sieve": sorted(s.members),
                                   "v": jsonable(v), "u": _map_json(u), "diagonals": n}
                        break
                if witness:
                    break
            if witness:
                break
        if witness:
            break
    result = PerpResult(witness is None, witness)
    if bound is not None:
        for F in enumerate_presheaves(cat, bound):
            for G, inner in dense_extensions(F, j, 1):
                f = inner.inclusion()
                r = is_right_orthogonal(g, f)
                result.cross_checked += 1
                if r.holds is False and result.holds:
                    raise AssertionError("generator test accepted an arrow refuted by a dense mono")
    return result


# -- left cancelability --------------------------------------------------------


@dataclass
class CancelResult:
    holds: bool
    pairs: int
    witness: dict | None = None
    mode: str = "bounded"


def composable_pairs(cat: FinCat, bound: int, budget: int = 10**6):
    objs = enumerate_presheaves(cat, bound)
    n = 0
    for A in objs:
        for X in objs:
            fs = list(iter_homs(A, X))
            if not fs:
                continue
            for Y in objs:
                gs = list(iter_homs(X, Y))
                for f in fs:
                    for g in gs:
                        n += 1
                        if n > budget:
                            raise BudgetExceeded("too many composable pairs")
                        yield f, g


def is_left_cancelable(cls: MorphismClassSpec, cat: FinCat, bound: int | None = None) -> CancelResult:
    """g f in the class implies f in the class, over fixture pairs up to ``bound``."""
    bound = cls.bound if bound is None else bound
    pairs = 0
    for f, g in composable_pairs(cat, bound):
        pairs += 1
        if cls.contains(g @ f) and not cls.contains(f):
            return CancelResult(False, pairs, {"f": _map_json(f), "g": _map_json(g),
                                               "f_source": f.source.describe(),
                                               "f_target": f.target.describe(),
                                               "g_target": g.target.describe()})
    return CancelResult(True, pairs)


# -- factorization -------------------------------------------------------------


@dataclass
class Factorization:
    first: NatTrans           # the M-member, applied first
    second: NatTrans          # the M-perp member
    route: str
    first_in_class: bool
    second_in_class: bool

    @property
    def middle(self) -> Presheaf:
        return self.first.target

    @property
    def valid(self) -> bool:
        return self.first_in_class and self.second_in_class


def factor_through_sheaf(f: NatTrans, j: TopologyCandidate) -> Factorization:
    """A --(iota, f)--> F x B --pi--> B, with iota: A >-> F the dense sheaf embedding."""
    A, B = f.source, f.target
    emb = embed_separated_in_sheaf(A, j)
    iota = emb.inclusion
    P = product(emb.sheaf, B)
    first = pair(iota, f, P)
    second = P.legs[1]
    if second @ first != f:
        raise AssertionError("factorization does not compose to f")
    return Factorization(first, second, "sheaf_embedding",
                         in_dense_monos(first, j), perp_membership(second, j).holds)


def find_factorization(f: NatTrans, j: TopologyCandidate, bound: int = 1) -> Factorization | None:
    """Try the sheaf route, then f . id, then dense extensions of the source up to ``bound``."""
    try:
        fac = factor_through_sheaf(f, j)
        if fac.valid:
            return fac
    except NotSeparated:
        pass
    trivial = Factorization(identity(f.source), f, "trivial", True, perp_membership(f, j).holds)
    if trivial.valid:
        return trivial
    for G, inner in dense_extensions(f.source, j, bound):
        for e in iter_homs(G, f.target, fixed=f.components):
            if perp_membership(e, j).holds:
                return Factorization(inner.inclusion(), e, "search", True, True)
    return None


# -- the equivalence suite -------------------------------------------------------


def nonseparated_witness(j: TopologyCandidate):
    """For j other than the identity: the pushout T +_S T of S >-> T = j(S).

    Returns ``(W, info)`` or ``None`` when j is the identity.
    """
    cat = j.cat
    Om = omega(cat)
    for c in cat.objects:
        for s in Om.carriers[c]:
            t = j(s)
            if t == s:
                continue
            T = sieve_subobject(cat, t)
            S = Subpresheaf(T.presheaf, sieve_subobject(cat, s).selected, check=False)
            incl = S.inclusion()
            W = pushout(incl, incl).obj
            W.name = "W"
            return W, {"stage": c, "sieve": sorted(s.members), "closure": sorted(t.members),
                       "object": W.describe()}
    return None


# Four statements about E and their four counterparts in every slice E/B.
STATEMENTS = (
    "all_sheaves", "all_separated", "enough_sheaves", "factorization",
    "slice_all_sheaves", "slice_all_separated", "slice_enough_sheaves", "slice_factorization",
)


@dataclass
class SuiteReport:
    topology: str
    statements: dict = field(default_factory=dict)
    hypothesis: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        decided = {s["verdict"] for s in self.statements.values() if s["verdict"] != "undecided"}
        return len(decided) <= 1

    def verdicts(self) -> dict:
        return {k: v["verdict"] for k, v in self.statements.items()}

    def to_json(self) -> dict:
        return {"topology": self.topology, "statements": self.statements,
                "hypothesis": self.hypothesis, "consistent": self.consistent, "notes": self.notes}


def _statement(verdict, mode, witness=None, evidence=None) -> dict:
    out = {"verdict": verdict, "mode": mode, "witness": witness}
    if evidence is not None:
        out["evidence"] = evidence
    return out


def _sampled_bases(cat: FinCat, bases) -> list:
    if bases is not None:
        return list(bases)
    return [terminal(cat)]


def factorization_suite(cat: FinCat, j: TopologyCandidate, bound: int = 2, bases=None,
                        cancel_bound: int = 2) -> SuiteReport:
    """Evaluate the eight equivalent statements for ``j`` on ``cat``.

    Exact reductions: every statement holds iff j is the identity.  For any
    other j the pushout witness W is computed and checked to be non-separated,
    which refutes the four statements in E and, taking B = 1, their slice forms.
    Bounded scans over fixtures are attached as evidence.
    """
    rep = SuiteReport(j.label or "custom")
    bases = _sampled_bases(cat, bases)
    fixtures = enumerate_presheaves(cat, bound)

    M = MorphismClassSpec("dense_monos", j, bound=cancel_bound)
    lc = is_left_cancelable(M, cat, cancel_bound)
    rep.hypothesis["left_cancelable"] = {"holds": lc.holds, "mode": "bounded", "pairs": lc.pairs,
                                         "witness": lc.witness}
    if not lc.holds:
        rep.notes.append("hypothesis fails: the class of dense monos is not left cancelable; "
                         "statements are still evaluated")

    non_sheaf = [F for F in fixtures if not is_sheaf(F, j).sheaf]
    non_sep = [F for F in fixtures if not is_sheaf(F, j).separated]

    if j.is_identity:
        for key in ("all_sheaves", "all_separated"):
            rep.statements[key] = _statement(True, "exact", evidence={
                "fixtures": len(fixtures), "failures": len(non_sheaf if key == "all_sheaves" else non_sep)})
        emb_ok = sum(1 for F in fixtures if embed_separated_in_sheaf(F, j).closure.is_whole())
        rep.statements["enough_sheaves"] = _statement(True, "exact", evidence={"embedded": emb_ok})
        fact_ok = 0
        arrows = 0
        for A in fixtures:
            for B in fixtures:
                for f in iter_homs(A, B):
                    arrows += 1
                    if find_factorization(f, j, 0) is not None:
                        fact_ok += 1
        rep.statements["factorization"] = _statement(fact_ok == arrows, "exact",
                                            evidence={"arrows": arrows, "factored": fact_ok})
        for key, base_key in (("slice_all_separated", "all_separated"), ("slice_all_sheaves", "all_sheaves"), ("slice_enough_sheaves", "enough_sheaves"), ("slice_factorization", "factorization")):
            ids = []
            for B in bases:
                jt = transport_topology(induced_topology(j, B))
                ids.append(jt.is_identity)
            rep.statements[key] = _statement(all(ids) and rep.statements[base_key]["verdict"],
                                             "exact", evidence={"bases": len(bases),
                                                                "identity_on_elements": all(ids)})
        return rep

    W, info = nonseparated_witness(j)
    wrep = is_sheaf(W, j)
    info["separated"] = wrep.separated
    info["generator_witness"] = wrep.witness("separated")
    decided = not wrep.separated
    verdict = False if decided else "undecided"
    mode = "exact" if decided else "bounded"
    rep.statements["all_sheaves"] = _statement(verdict, mode, info, {"fixtures": len(fixtures),
                                                           "non_sheaves": len(non_sheaf)})
    rep.statements["all_separated"] = _statement(verdict, mode, info, {"fixtures": len(fixtures),
                                                            "non_separated": len(non_sep)})
    try:
        embed_separated_in_sheaf(W, j)
        emb_witness = {"embedding_refused": False}
    except NotSeparated as exc:
        emb_witness = {"embedding_refused": True, "collapse": exc.witness}
    rep.statements["enough_sheaves"] = _statement(verdict, mode, {"object": info["object"], **emb_witness})

    bang_W = NatTrans(W, terminal(cat), {c: {x: "*" for x in W.carriers[c]} for c in cat.objects},
                      check=False)
    fac = find_factorization(bang_W, j, 1)
    rep.statements["factorization"] = _statement(
        verdict if fac is None else "undecided", mode,
        {"arrow": "W -> 1", "object": info["object"], "factorization_found": fac is not None})

    for key, base_key in (("slice_all_separated", "all_separated"), ("slice_all_sheaves", "all_sheaves"), ("slice_enough_sheaves", "enough_sheaves"), ("slice_factorization", "factorization")):
        rep.statements[key] = _statement(rep.statements[base_key]["verdict"], mode,
                                         {"base": "1", "object": info["object"]},
                                         {"bases": len(bases)})
    return rep


def mono_factorization_suite(cat: FinCat, bound: int = 2, bases=None) -> SuiteReport:
    """The same suite for the maximal topology, where the dense monos are all monos."""
    rep = factorization_suite(cat, maximal_topology(cat), bound, bases)
    rep.topology = "maximal (all monos)"
    return rep


# -- slice orthogonality ----------------------------------------------------------


def transport_morphism(h: SliceMorphism) -> NatTrans:
    P, Q = transport(h.source), transport(h.target)
    el = elements_of(h.source.base)
    comps = {o: {x: h.map.components[c][x] for x in P.carriers[o]} for o, (c, _b) in el.point.items()}
    return NatTrans(P, Q, comps, check=False)


def slice_perp_membership(h: SliceMorphism, j: TopologyCandidate) -> PerpResult:
    """h in M_B-perp, decided on the category of elements of B."""
    jt = transport_topology(induced_topology(j, h.source.base))
    return perp_membership(transport_morphism(h), jt)


def slice_perp_check(cat: FinCat, j: TopologyCandidate, B: Presheaf, bound: int = 2) -> dict:
    """Every fixture slice arrow in M_B-perp is in M-perp as an arrow of E."""
    objs = []
    for X in enumerate_presheaves(cat, bound):
        for f in iter_homs(X, B):
            objs.append(SliceObject.of(f))
    checked = violations = 0
    witness = None
    for f in objs:
        for g in objs:
            allowed = {c: {x: g.fiber(c, f.structure.components[c][x]) for x in f.total.carriers[c]}
                       for c in cat.objects}
            for hmap in iter_homs(f.total, g.total, allowed=allowed):
                h = SliceMorphism(f, g, hmap)
                if slice_perp_membership(h, j).holds:
                    checked += 1
                    if not perp_membership(hmap, j).holds:
                        violations += 1
                        witness = witness or {"map": _map_json(hmap)}
    return {"checked": checked, "violations": violations, "witness": witness}


