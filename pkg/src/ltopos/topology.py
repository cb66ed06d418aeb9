"""Lawvere-Tierney, weak and productive weak topologies on presheaf categories.

A candidate is any natural endo-map ``j`` of Omega.  The order on Omega is
pointwise sieve inclusion.  Closures are computed by classifying
``j . char(m)``, which works for weak topologies too (they just lose
idempotence).

The Grothendieck side at the bottom of the module is written independently
of the Omega machinery (its own sieve generation and pullback) so that the two
enumerations can check each other.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

from .errors import AxiomViolation, BudgetExceeded, NotNatural, NotWeak
from .fincat import FinCat, Sieve
from .presheaf import (
    NatTrans,
    Presheaf,
    Subpresheaf,
    char,
    image_factorization,
    iter_homs,
    omega,
    pushout,
)
from .presheaf.core import DEFAULT_BUDGET


@dataclass(eq=False)
class TopologyCandidate:
    j: NatTrans
    is_weak: bool
    is_productive_weak: bool
    is_topology: bool
    label: str = ""
    failures: dict = field(default_factory=dict, repr=False)

    @property
    def cat(self) -> FinCat:
        return self.j.source.cat

    def __call__(self, s: Sieve) -> Sieve:
        return self.j.components[s.at][s]

    def key(self) -> tuple:
        return self.j.key()

    def __eq__(self, other):
        if not isinstance(other, TopologyCandidate):
            return NotImplemented
        return self.j == other.j

    def __hash__(self):
        return hash(self.key())

    @cached_property
    def is_identity(self) -> bool:
        return all(s == t for c in self.cat.objects for s, t in self.j.components[c].items())

    @cached_property
    def is_maximal(self) -> bool:
        Om = omega(self.cat)
        return all(t == Om.top(c) for c in self.cat.objects for t in self.j.components[c].values())

    def kind(self) -> str:
        if self.is_topology:
            return "topology"
        if self.is_productive_weak:
            return "productive_weak"
        if self.is_weak:
            return "weak"
        return "none"

    def table(self) -> dict:
        """``{object: [(sieve, j(sieve)), ...]}`` in canonical sieve order."""
        Om = omega(self.cat)
        return {c: [(s, self.j.components[c][s]) for s in Om.carriers[c]] for c in self.cat.objects}

    def describe(self) -> dict:
        return {
            "label": self.label,
            "kind": self.kind(),
            "weak": self.is_weak,
            "productive_weak": self.is_productive_weak,
            "topology": self.is_topology,
            "map": {
                c: [[sorted(s.members), sorted(t.members)] for s, t in rows]
                for c, rows in self.table().items()
            },
        }


def classify_candidate(j: NatTrans, label: str = "") -> TopologyCandidate:
    cat = j.source.cat
    Om = omega(cat)
    if j.source != Om or j.target != Om:
        raise NotNatural("candidate must be a map Omega -> Omega")
    problems = j.violations()
    if problems:
        raise NotNatural("; ".join(problems[:3]))
    comp = j.components
    failures = {}

    for c in cat.objects:
        top = Om.top(c)
        if comp[c][top] != top:
            failures["true"] = (c, top)
            break

    meet_le = meet_eq = True
    for c in cat.objects:
        sieves = Om.carriers[c]
        for s, t in itertools.combinations_with_replacement(sieves, 2):
            lhs = comp[c][Sieve(c, s.members & t.members)].members
            rhs = comp[c][s].members & comp[c][t].members
            if lhs != rhs:
                meet_eq = False
                failures.setdefault("meet_eq", (c, s, t))
                if not lhs <= rhs:
                    meet_le = False
                    failures.setdefault("meet_le", (c, s, t))
    idem = True
    for c in cat.objects:
        for s in Om.carriers[c]:
            if comp[c][comp[c][s]] != comp[c][s]:
                idem = False
                failures.setdefault("idempotent", (c, s))
                break

    preserves_true = "true" not in failures
    weak = preserves_true and meet_le
    productive = weak and meet_eq
    topology = preserves_true and idem and meet_eq
    return TopologyCandidate(j, weak, productive, topology, label, failures)


def topology_from_function(cat: FinCat, fn: Callable[[Sieve], Sieve], label: str = "") -> TopologyCandidate:
    Om = omega(cat)
    comps = {c: {s: fn(s) for s in Om.carriers[c]} for c in cat.objects}
    return classify_candidate(NatTrans(Om, Om, comps, check=False), label)


def identity_topology(cat: FinCat) -> TopologyCandidate:
    return topology_from_function(cat, lambda s: s, "identity")


def maximal_topology(cat: FinCat) -> TopologyCandidate:
    Om = omega(cat)
    return topology_from_function(cat, lambda s: Om.top(s.at), "maximal")


_KINDS = ("topology", "productive_weak", "weak")


def enumerate_candidates(cat: FinCat, kind: str = "topology",
                         budget: int = DEFAULT_BUDGET) -> list[TopologyCandidate]:
    """All natural endo-maps of Omega of the given kind, in canonical order.

    Every kind requires ``j . true = true``, and naturality then forces
    ``S <= j(S)``, so the search only offers sieves above S as values.
    """
    if kind not in _KINDS:
        raise ValueError(f"unknown kind {kind!r}; expected one of {_KINDS}")
    Om = omega(cat)
    allowed = {
        c: {s: [t for t in Om.carriers[c] if s.members <= t.members] for s in Om.carriers[c]}
        for c in cat.objects
    }
    fixed = {c: {Om.top(c): Om.top(c)} for c in cat.objects}
    out = []
    seen = 0
    for j in iter_homs(Om, Om, fixed=fixed, allowed=allowed):
        seen += 1
        if seen > budget:
            raise BudgetExceeded(f"more than {budget} candidate maps")
        cand = classify_candidate(j)
        if getattr(cand, "is_" + kind):
            out.append(cand)
    for n, cand in enumerate(out):
        if cand.is_identity:
            cand.label = "identity"
        elif cand.is_maximal:
            cand.label = "maximal"
        else:
            cand.label = f"{kind}#{n}"
    return out


def enumerate_topologies(cat: FinCat) -> list[TopologyCandidate]:
    return enumerate_candidates(cat, "topology")


# -- closure ---------------------------------------------------------------


def _require_weak(j: TopologyCandidate):
    if not j.is_weak:
        raise NotWeak(f"candidate {j.label or '?'} is not a weak topology")


def closure(m: Subpresheaf, j: TopologyCandidate) -> Subpresheaf:
    """The subobject classified by ``j . char(m)``."""
    _require_weak(j)
    F = m.ambient
    cat = F.cat
    chi = char(m)
    Om = omega(cat)
    sel = {}
    for c in cat.objects:
        top = Om.top(c)
        jc = j.j.components[c]
        sel[c] = {x for x, s in chi.components[c].items() if jc[s] == top}
    return Subpresheaf(F, sel, check=False)


def is_dense(m: Subpresheaf, j: TopologyCandidate) -> bool:
    return closure(m, j).is_whole()


def is_closed(m: Subpresheaf, j: TopologyCandidate) -> bool:
    return closure(m, j) == m


def classify_mono(m: Subpresheaf, j: TopologyCandidate) -> str:
    cl = closure(m, j)
    dense, closed = cl.is_whole(), cl == m
    if dense and closed:
        return "both"
    if dense:
        return "dense"
    if closed:
        return "closed"
    return "neither"


def is_dense_arrow(f: NatTrans, j: TopologyCandidate) -> bool:
    return classify_mono(image_factorization(f).image, j) in ("dense", "both")


def dense_sieves(j: TopologyCandidate, c) -> list[Sieve]:
    """Sieves S on c whose subobject S of Y(c) is j-dense, i.e. j(S) = t(c)."""
    Om = omega(j.cat)
    top = Om.top(c)
    return [s for s in Om.carriers[c] if j.j.components[c][s] == top]


# -- Grothendieck side -----------------------------------------------------


def _sieve_family(cat: FinCat, c) -> list[frozenset]:
    """Independent sieve generation: close every subset of arrows under precomposition."""
    arrows = [k for k in cat.morphisms if cat.cod[k] == c]
    found = set()
    for r in range(len(arrows) + 1):
        for subset in itertools.combinations(arrows, r):
            closed = set(subset)
            grew = True
            while grew:
                grew = False
                for f in list(closed):
                    for g in cat.morphisms:
                        if cat.cod[g] == cat.dom[f]:
                            fg = cat.table[(f, g)]
                            if fg not in closed:
                                closed.add(fg)
                                grew = True
            found.add(frozenset(closed))
    return sorted(found, key=lambda s: (len(s), sorted(s)))


def _pull(cat: FinCat, members: frozenset, h: str) -> frozenset:
    d = cat.dom[h]
    return frozenset(g for g in cat.morphisms if cat.cod[g] == d and cat.table[(h, g)] in members)


@dataclass(eq=False)
class GrothendieckTopology:
    cat: FinCat
    covers: dict  # object -> frozenset of frozensets of morphism names

    def key(self) -> tuple:
        return tuple(tuple(sorted(tuple(sorted(s)) for s in self.covers[c])) for c in self.cat.objects)

    def __eq__(self, other):
        return isinstance(other, GrothendieckTopology) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def covering(self, c, members) -> bool:
        return frozenset(members) in self.covers[c]

    def violations(self) -> list[str]:
        cat = self.cat
        out = []
        for c in cat.objects:
            maximal = frozenset(k for k in cat.morphisms if cat.cod[k] == c)
            if maximal not in self.covers[c]:
                out.append(f"maximal sieve on {c} does not cover")
        for c in cat.objects:
            for s in self.covers[c]:
                for h in cat.morphisms:
                    if cat.cod[h] == c and _pull(cat, s, h) not in self.covers[cat.dom[h]]:
                        out.append(f"covers on {c} not stable along {h}")
        for c in cat.objects:
            for r in _sieve_family(cat, c):
                if r in self.covers[c]:
                    continue
                for s in self.covers[c]:
                    if all(_pull(cat, r, h) in self.covers[cat.dom[h]] for h in s):
                        out.append(f"transitivity fails on {c}")
                        break
        return out

    def describe(self) -> dict:
        return {c: [sorted(s) for s in sorted(self.covers[c], key=lambda s: (len(s), sorted(s)))]
                for c in self.cat.objects}


def enumerate_grothendieck(cat: FinCat, budget: int = DEFAULT_BUDGET) -> list[GrothendieckTopology]:
    """Every Grothendieck topology, by brute force over families of sieves."""
    per_object = []
    for c in cat.objects:
        sieves = _sieve_family(cat, c)
        maximal = frozenset(k for k in cat.morphisms if cat.cod[k] == c)
        rest = [s for s in sieves if s != maximal]
        options = []
        for r in range(len(rest) + 1):
            for subset in itertools.combinations(rest, r):
                options.append(frozenset(subset) | {maximal})
        per_object.append(options)
    total = 1
    for opts in per_object:
        total *= len(opts)
    if total > budget:
        raise BudgetExceeded(f"{total} families of covers exceed the budget {budget}")
    out = []
    for choice in itertools.product(*per_object):
        J = GrothendieckTopology(cat, dict(zip(cat.objects, choice)))
        if not J.violations():
            out.append(J)
    out.sort(key=lambda J: J.key())
    return out


def associated_grothendieck(j: TopologyCandidate) -> GrothendieckTopology:
    if not j.is_topology:
        raise AxiomViolation("only a topology has an associated Grothendieck topology")
    cat = j.cat
    Om = omega(cat)
    covers = {c: frozenset(s.members for s in Om.carriers[c] if j(s) == Om.top(c))
              for c in cat.objects}
    J = GrothendieckTopology(cat, covers)
    bad = J.violations()
    if bad:
        raise AxiomViolation("; ".join(bad[:3]))
    return J


def from_grothendieck(J: GrothendieckTopology) -> TopologyCandidate:
    bad = J.violations()
    if bad:
        raise AxiomViolation("; ".join(bad[:3]))
    cat = J.cat

    def fn(s: Sieve) -> Sieve:
        return Sieve(s.at, frozenset(
            k for k in cat.into(s.at) if _pull(cat, s.members, k) in J.covers[cat.dom[k]]))

    return topology_from_function(cat, fn)


# -- property helpers shared by tests and suites ----------------------------


def chains(F: Presheaf, subs: list[Subpresheaf] | None = None):
    """Every chain A <= A2 <= F of subpresheaves."""
    from .presheaf import subpresheaves

    subs = subs if subs is not None else subpresheaves(F)
    for a in subs:
        for a2 in subs:
            if a <= a2:
                yield a, a2


def relative(inner: Subpresheaf, outer: Subpresheaf) -> Subpresheaf:
    """``inner`` viewed as a subpresheaf of ``outer.presheaf``."""
    return Subpresheaf(outer.presheaf, inner.selected, check=False)


def composition_law(F: Presheaf, j: TopologyCandidate) -> dict:
    """Check A dense in F  <=>  A dense in A2 and A2 dense in F over all chains.

    Returns counts of necessity failures (always a violation) and of
    sufficiency failures (a violation only for topologies).
    """
    necessity, sufficiency, checked = [], [], 0
    for a, a2 in chains(F):
        checked += 1
        total = is_dense(a, j)
        parts = is_dense(relative(a, a2), j) and is_dense(a2, j)
        if total and not parts:
            necessity.append((a, a2))
        if parts and not total:
            sufficiency.append((a, a2))
    return {"checked": checked, "necessity": necessity, "sufficiency": sufficiency}


def pushout_preserves_density(presheaves, j: TopologyCandidate) -> dict:
    """Push every dense mono between the given presheaves along every map out of its domain.

    Counts pushouts whose new leg fails to be a dense mono.
    """
    from .presheaf import subpresheaves

    checked, failures = 0, []
    for X in presheaves:
        for m in subpresheaves(X):
            if not is_dense(m, j):
                continue
            inc = m.inclusion()
            for Y in presheaves:
                for f in iter_homs(inc.source, Y):
                    checked += 1
                    leg = pushout(inc, f).legs[1]
                    if not (leg.is_mono() and is_dense(image_factorization(leg).image, j)):
                        failures.append((m, f))
    return {"checked": checked, "failures": failures}
