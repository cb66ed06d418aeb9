"""The slice topos over B: induced topology, pullback functor, sections object.

Slice objects are arrows ``f: X -> B`` held directly.  For decisions (sheaf,
essential, injective) a slice object is also transported to a presheaf on the
category of elements of B, whose fibre over ``(C, b)`` is ``f_C^{-1}(b)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .errors import BaseMismatch, ConditionViolation, NotNatural, OracleDisagreement
from .fincat import ElementsCategory, Sieve, category_of_elements
from .presheaf import (
    Exponential,
    NatTrans,
    Presheaf,
    Subpresheaf,
    char,
    exp_map,
    identity,
    iter_homs,
    name_of_identity,
    omega,
    product,
    product_map,
    pullback,
    terminal,
)
from .presheaf.core import DEFAULT_BUDGET
from .sheaves import SheafReport, is_j_injective, is_sheaf, sieve_subobject
from .topology import TopologyCandidate, classify_candidate, closure, maximal_topology


@dataclass(eq=False)
class SliceObject:
    total: Presheaf
    base: Presheaf
    structure: NatTrans

    def __post_init__(self):
        if self.structure.source != self.total or self.structure.target != self.base:
            raise BaseMismatch("structure map must go from the total object to the base")

    @classmethod
    def of(cls, f: NatTrans) -> "SliceObject":
        return cls(f.source, f.target, f)

    def fiber(self, c, b) -> list:
        return [x for x in self.total.carriers[c] if self.structure.components[c][x] == b]

    def describe(self) -> dict:
        return {"total": self.total.describe(), "base": self.base.describe(),
                "structure": self.structure.describe()}


@dataclass(eq=False)
class SliceMorphism:
    source: SliceObject
    target: SliceObject
    map: NatTrans

    def violations(self) -> list[str]:
        if self.target.structure @ self.map != self.source.structure:
            return ["triangle over the base does not commute"]
        return []

    def is_mono(self) -> bool:
        return self.map.is_mono()


def slice_morphisms(f: SliceObject, g: SliceObject):
    """Every map over the base from f to g."""
    cat = f.total.cat
    allowed = {
        c: {x: g.fiber(c, f.structure.components[c][x]) for x in f.total.carriers[c]}
        for c in cat.objects
    }
    for h in iter_homs(f.total, g.total, allowed=allowed):
        yield SliceMorphism(f, g, h)


# -- slice topologies --------------------------------------------------------


@dataclass(eq=False)
class SliceTopology:
    base: Presheaf
    l: NatTrans                      # Omega x B -> Omega
    j: TopologyCandidate | None = None

    def value(self, s: Sieve, b) -> Sieve:
        return self.l.components[s.at][(s, b)]


def slice_topology_violations(jB: SliceTopology) -> list[str]:
    """The three conditions on l: idempotence, preservation of true, and meets."""
    B, l = jB.base, jB.l
    cat = B.cat
    Om = omega(cat)
    out = []
    if l.violations():
        out.append("l is not natural")
        return out
    comp = l.components
    for c in cat.objects:
        top = Om.top(c)
        for b in B.carriers[c]:
            if comp[c][(top, b)] != top:
                out.append(f"(2) fails at {c}")
                break
        for s in Om.carriers[c]:
            for b in B.carriers[c]:
                if comp[c][(comp[c][(s, b)], b)] != comp[c][(s, b)]:
                    out.append(f"(1) fails at {c}")
                    break
        for s, t in itertools.product(Om.carriers[c], repeat=2):
            meet = Sieve(c, s.members & t.members)
            for b in B.carriers[c]:
                lhs = comp[c][(meet, b)].members
                rhs = comp[c][(s, b)].members & comp[c][(t, b)].members
                if lhs != rhs:
                    out.append(f"(3) fails at {c}")
                    break
    return sorted(set(out))


def check_slice_topology(jB: SliceTopology) -> bool:
    return not slice_topology_violations(jB)


def induced_topology(j: TopologyCandidate, B: Presheaf) -> SliceTopology:
    """l = j . pi_Omega on Omega x B."""
    cat = B.cat
    Om = omega(cat)
    P = product(Om, B).obj
    comps = {c: {(s, b): j.j.components[c][s] for s, b in P.carriers[c]} for c in cat.objects}
    jB = SliceTopology(B, NatTrans(P, Om, comps, check=False), j)
    bad = slice_topology_violations(jB)
    if bad and j.is_topology:
        raise ConditionViolation("; ".join(bad))
    return jB


# -- pullback functor --------------------------------------------------------


def pullback_functor(A, B: Presheaf):
    """Pi_B on objects (A -> A x B -> B) and on arrows (f -> f x id_B)."""
    if isinstance(A, NatTrans):
        src, tgt = pullback_functor(A.source, B), pullback_functor(A.target, B)
        return SliceMorphism(src, tgt, product_map(A, identity(B)))
    P = product(A, B)
    return SliceObject(P.obj, B, P.legs[1])


def pullback_subobject(m: Subpresheaf, B: Presheaf) -> Subpresheaf:
    """Pi_B(m) as the subobject m x B of A x B."""
    P = product(m.ambient, B).obj
    return Subpresheaf(P, {c: {(a, b) for a, b in P.carriers[c] if a in m.selected[c]}
                           for c in B.cat.objects}, check=False)


def slice_closure(k: Subpresheaf, g: SliceObject, jB: SliceTopology) -> Subpresheaf:
    """Closure of a slice subobject of g, via l and (when known) via j on the carrier."""
    cat = g.total.cat
    Om = omega(cat)
    chi = char(k)
    sel = {}
    for c in cat.objects:
        top = Om.top(c)
        sel[c] = {x for x in g.total.carriers[c]
                  if jB.value(chi.components[c][x], g.structure.components[c][x]) == top}
    via_l = Subpresheaf(g.total, sel, check=False)
    if jB.j is not None and jB.j.is_weak:
        via_j = closure(k, jB.j)
        if via_j != via_l:
            raise OracleDisagreement("slice closure differs from the closure of the carrier")
    return via_l


# -- sections object and the adjunction ---------------------------------------


@dataclass(eq=False)
class SectionsObject:
    slice_obj: SliceObject
    XB: Exponential
    BB: Exponential
    fB: NatTrans
    iB: NatTrans
    presheaf: Presheaf

    def value(self, c, elem, d, g, b):
        """gamma_D(g, b) for the section ``elem = (gamma, '*')`` at stage c."""
        return self.XB.value(c, elem[0], d, g, b)

    def at_identity(self, c, elem, b):
        return self.XB.at_identity(c, elem[0], b)


def sections_object(f: SliceObject, budget: int = DEFAULT_BUDGET) -> SectionsObject:
    """Pullback of i_B: 1 -> B^B along f^B: X^B -> B^B."""
    X, B = f.total, f.base
    XB = Exponential(B, X, budget)
    BB = Exponential(B, B, budget)
    fB = exp_map(f.structure, B, XB, BB)
    iB = name_of_identity(B, BB)
    S = pullback(fB, iB).obj
    S.name = "S(f)"
    return SectionsObject(f, XB, BB, fB, iB, S)


def counit(f: SliceObject, S: SectionsObject | None = None) -> SliceMorphism:
    """Pi_B(S(f)) -> f, ((gamma, *), b) -> gamma_C(id_C, b)."""
    S = S or sections_object(f)
    src = pullback_functor(S.presheaf, f.base)
    comps = {c: {(e, b): S.at_identity(c, e, b) for e, b in src.total.carriers[c]}
             for c in f.total.cat.objects}
    return SliceMorphism(src, f, NatTrans(src.total, f.total, comps, check=False))


def unit(A: Presheaf, B: Presheaf, S: SectionsObject | None = None) -> NatTrans:
    """A -> S(Pi_B A), a -> (gamma with gamma_D(k, b) = (A(k)a, b))."""
    S = S or sections_object(pullback_functor(A, B))
    cat = A.cat
    comps = {}
    for c in cat.objects:
        rows = S.XB.yf[c].obj.carriers
        comps[c] = {
            a: (tuple(tuple((A.act(g, a), b) for g, b in rows[e]) for e in cat.objects), "*")
            for a in A.carriers[c]
        }
    return NatTrans(A, S.presheaf, comps, check=False)


def sections_map(h: SliceMorphism, S_src: SectionsObject | None = None,
                 S_tgt: SectionsObject | None = None) -> NatTrans:
    """S(h): gamma -> h . gamma."""
    S_src = S_src or sections_object(h.source)
    S_tgt = S_tgt or sections_object(h.target)
    cat = h.map.source.cat
    comps = {
        c: {
            e: (tuple(tuple(h.map.components[d][v] for v in row) for d, row in zip(cat.objects, e[0])), "*")
            for e in S_src.presheaf.carriers[c]
        }
        for c in cat.objects
    }
    return NatTrans(S_src.presheaf, S_tgt.presheaf, comps, check=False)


def triangle_identities(A: Presheaf, f: SliceObject) -> dict:
    """Both triangle identities of Pi_B -| S, at the object A and at f."""
    B = f.base
    PA = pullback_functor(A, B)
    S_PA = sections_object(PA)
    eta_A = unit(A, B, S_PA)
    lhs1 = counit(PA, S_PA).map @ pullback_functor(eta_A, B).map
    first = lhs1 == identity(PA.total)

    S_f = sections_object(f)
    PS = pullback_functor(S_f.presheaf, B)
    S_PS = sections_object(PS)
    eta_S = unit(S_f.presheaf, B, S_PS)
    eps = counit(f, S_f)
    lhs2 = sections_map(eps, S_PS, S_f) @ eta_S
    second = lhs2 == identity(S_f.presheaf)
    return {"counit_after_unit": first, "sections_after_unit": second}


def adjunction_bijection(A: Presheaf, f: SliceObject) -> dict:
    """Hom_{E/B}(Pi_B A, f) -> Hom(A, S f), phi -> S(phi) . eta_A, checked bijective."""
    B = f.base
    PA = pullback_functor(A, B)
    S_PA = sections_object(PA)
    S_f = sections_object(f)
    eta = unit(A, B, S_PA)
    images = set()
    left = 0
    for phi in slice_morphisms(PA, f):
        left += 1
        images.add((sections_map(phi, S_PA, S_f) @ eta).key())
    right = {h.key() for h in iter_homs(A, S_f.presheaf)}
    return {"slice_side": left, "sections_side": len(right),
            "bijective": len(images) == left and images == right}


def graph(f: SliceObject) -> SliceMorphism:
    """(id_X, f): f >-> Pi_B(X)."""
    tgt = pullback_functor(f.total, f.base)
    comps = {c: {x: (x, f.structure.components[c][x]) for x in f.total.carriers[c]}
             for c in f.total.cat.objects}
    return SliceMorphism(f, tgt, NatTrans(f.total, tgt.total, comps, check=False))


def section_retraction(m: SliceMorphism) -> SliceMorphism | None:
    """A left inverse of m over the base, or None."""
    src, tgt = m.source, m.target
    cat = src.total.cat
    fixed = {c: {m.map.components[c][x]: x for x in src.total.carriers[c]} for c in cat.objects}
    allowed = {
        c: {y: src.fiber(c, tgt.structure.components[c][y]) for y in tgt.total.carriers[c]}
        for c in cat.objects
    }
    for r in iter_homs(tgt.total, src.total, fixed=fixed, allowed=allowed):
        return SliceMorphism(tgt, src, r)
    return None


def is_section(m: SliceMorphism) -> bool:
    return section_retraction(m) is not None


# -- transport to the category of elements ------------------------------------


@lru_cache(maxsize=256)
def elements_of(B: Presheaf) -> ElementsCategory:
    return category_of_elements(B.cat, B)


def transport(f: SliceObject) -> Presheaf:
    """The presheaf (C, b) -> f_C^{-1}(b) on the category of elements of B."""
    el = elements_of(f.base)
    X = f.total
    carriers = {o: f.fiber(c, b) for o, (c, b) in el.point.items()}
    acts = {}
    for name, (k, b) in el.arrow.items():
        acts[name] = {x: X.act(k, x) for x in carriers[el.obj_at[(f.total.cat.cod[k], b)]]}
    return Presheaf(el.cat, carriers, acts, check=False, name=f"el({X.name or 'X'})")


def transport_subobject(k: Subpresheaf, f: SliceObject) -> Subpresheaf:
    P = transport(f)
    el = elements_of(f.base)
    return Subpresheaf(P, {o: set(P.carriers[o]) & k.selected[c] for o, (c, _b) in el.point.items()},
                       check=False)


def transport_topology(jB: SliceTopology) -> TopologyCandidate:
    """j'(S') on (C, b) is the lift of l(S, b), S being S' read as a sieve on C."""
    el = elements_of(jB.base)
    E = el.cat
    Om = omega(E)
    comps = {}
    for o, (c, b) in el.point.items():
        comp = {}
        for s in Om.carriers[o]:
            down = Sieve(c, frozenset(el.arrow[m][0] for m in s.members))
            up = jB.value(down, b)
            comp[s] = Sieve(o, frozenset(m for m in E.into(o) if el.arrow[m][0] in up.members))
        comps[o] = comp
    try:
        cand = classify_candidate(NatTrans(Om, Om, comps, check=False), "transported")
    except NotNatural as exc:
        raise ConditionViolation(f"transported topology is not natural: {exc}") from None
    if jB.j is not None:
        for flag in ("is_weak", "is_productive_weak", "is_topology"):
            if getattr(jB.j, flag) and not getattr(cand, flag) and el.point:
                raise ConditionViolation(f"transported topology lost {flag}")
    return cand


def _slice_direct(f: SliceObject, jB: SliceTopology) -> tuple[bool, bool]:
    """(separated, sheaf) from slice generators Y(C) --b--> B, without transport."""
    cat = f.total.cat
    B, X = f.base, f.total
    Om = omega(cat)
    separated = sheaf = True
    for c in cat.objects:
        top = Om.top(c)
        for b in B.carriers[c]:
            for s in Om.carriers[c]:
                if jB.value(s, b) != top:
                    continue
                sub = sieve_subobject(cat, s)
                allowed = {d: {k: f.fiber(d, B.act(k, b)) for k in sub.selected[d]}
                           for d in cat.objects}
                for h in iter_homs(sub.presheaf, X, allowed=allowed):
                    n = sum(1 for x in f.fiber(c, b)
                            if all(X.act(k, x) == h.components[cat.dom[k]][k] for k in s.members))
                    separated &= n <= 1
                    sheaf &= n == 1
    return separated, sheaf


def slice_sheaf_check(f: SliceObject, jB: SliceTopology, cross_check: bool = True) -> SheafReport:
    P = transport(f)
    jt = transport_topology(jB)
    rep = is_sheaf(P, jt)
    if cross_check:
        sep, sh = _slice_direct(f, jB)
        if (sep, sh) != (rep.separated, rep.sheaf):
            raise OracleDisagreement("slice sheaf check: transport and direct routes disagree")
    return rep


def slice_is_injective(f: SliceObject, jB: SliceTopology | None = None) -> bool:
    """Injectivity in the slice; with no topology, against every slice mono."""
    P = transport(f)
    if jB is None:
        jt = maximal_topology(P.cat)
    else:
        jt = transport_topology(jB)
    return is_j_injective(P, jt)


# -- fibres and the explicit section formulas ---------------------------------


def fibers(alpha: NatTrans, values) -> dict:
    """H_a(C) = alpha_C^{-1}(a) for each a; alpha should land in a constant presheaf."""
    G = alpha.source
    return {a: Subpresheaf(G, {c: {x for x in G.carriers[c] if alpha.components[c][x] == a}
                               for c in G.cat.objects})
            for a in values}


def constant_exponential_iso(G: Presheaf, F: Presheaf, A) -> dict:
    """G^F(C) -> prod_A G(C), gamma -> (gamma_C(id_C, a))_a, for F constant on A.

    Returns per-stage bijectivity and naturality flags.
    """
    A = list(F.carriers[F.cat.objects[0]]) if A is None else list(A)
    E = Exponential(F, G)
    cat = G.cat
    phi = {c: {g: tuple(E.at_identity(c, g, a) for a in A) for g in E.carriers[c]}
           for c in cat.objects}
    bij = all(
        len(set(phi[c].values())) == len(phi[c]) and
        set(phi[c].values()) == set(itertools.product(G.carriers[c], repeat=len(A)))
        for c in cat.objects
    )
    natural = all(
        phi[cat.dom[k]][E.act(k, g)] == tuple(G.act(k, x) for x in phi[cat.cod[k]][g])
        for k in cat.morphisms for g in E.carriers[cat.cod[k]]
    )
    return {"bijective": bij, "natural": natural}


def constant_sections_iso(alpha: NatTrans, A) -> dict:
    """S(alpha)(C) -> prod_a alpha_C^{-1}(a), section -> (gamma_C(id_C, a))_a."""
    f = SliceObject.of(alpha)
    S = sections_object(f)
    G = alpha.source
    cat = G.cat
    A = list(A)
    phi = {c: {e: tuple(S.at_identity(c, e, a) for a in A) for e in S.presheaf.carriers[c]}
           for c in cat.objects}
    bij = all(
        len(set(phi[c].values())) == len(phi[c]) and
        set(phi[c].values()) == set(itertools.product(*(f.fiber(c, a) for a in A)))
        for c in cat.objects
    )
    natural = all(
        phi[cat.dom[k]][S.presheaf.act(k, e)] == tuple(G.act(k, x) for x in phi[cat.cod[k]][e])
        for k in cat.morphisms for e in S.presheaf.carriers[cat.cod[k]]
    )
    return {"bijective": bij, "natural": natural}


def monoid_sections_formula(f: SliceObject, mult, elements) -> dict:
    """Compare S(f) with the families x_{m,b} in f^{-1}(b) satisfying x_{mn,bn} = x_{m,b} n.

    ``mult[(m, n)]`` is the product mn; the base category must have one object.
    """
    cat = f.total.cat
    (obj,) = cat.objects
    X, B = f.total, f.base
    cells = [(m, b) for m in elements for b in B.carriers[obj]]
    formula = set()
    for values in itertools.product(*(f.fiber(obj, b) for _m, b in cells)):
        x = dict(zip(cells, values))
        if all(x[(mult[(m, n)], B.act(n, b))] == X.act(n, x[(m, b)])
               for m, b in cells for n in elements):
            formula.add(tuple(values))
    S = sections_object(f)
    computed = {tuple(S.value(obj, e, obj, m, b) for m, b in cells) for e in S.presheaf.carriers[obj]}
    return {"formula": len(formula), "sections": len(S.presheaf.carriers[obj]),
            "equal": formula == computed and len(computed) == len(S.presheaf.carriers[obj])}


def group_exponential_formula(X: Presheaf, B: Presheaf, inverse) -> dict:
    """X^B as prod_B X with (x_b) . g = (x_{b g^-1} . g)_b, for a one-object groupoid."""
    cat = X.cat
    (obj,) = cat.objects
    unit_arrow = cat.identity[obj]
    E = Exponential(B, X)
    bs = list(B.carriers[obj])
    phi = {g: tuple(E.value(obj, g, obj, unit_arrow, b) for b in bs) for g in E.carriers[obj]}
    bij = (len(set(phi.values())) == len(phi)
           and set(phi.values()) == set(itertools.product(X.carriers[obj], repeat=len(bs))))
    action_ok = True
    for k in cat.morphisms:
        kinv = inverse[k]
        for g in E.carriers[obj]:
            xs = dict(zip(bs, phi[g]))
            expected = tuple(X.act(k, xs[B.act(kinv, b)]) for b in bs)
            if phi[E.act(k, g)] != expected:
                action_ok = False
    return {"bijective": bij, "action": action_ok}


def terminal_slice(B: Presheaf) -> SliceObject:
    return SliceObject(B, B, identity(B))


def global_point(B: Presheaf) -> SliceObject:
    """B -> 1 as an object of the slice over 1."""
    one = terminal(B.cat)
    return SliceObject(B, one, NatTrans(B, one, {c: {x: "*" for x in B.carriers[c]}
                                                 for c in B.cat.objects}, check=False))
