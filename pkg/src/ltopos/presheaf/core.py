"""Presheaves on a finite category, natural transformations and subpresheaves.

A presheaf F stores ``carriers[C]`` (canonically sorted) and, for each
morphism ``k: D -> C``, the restriction ``F(k): F(C) -> F(D)``.
"""

from __future__ import annotations

import itertools
from functools import cached_property
from typing import Any, Iterator, Mapping

from ..errors import BaseMismatch, BudgetExceeded, InvalidPresheaf, NotNatural
from ..fincat import FinCat
from ..ordering import canonical, label, skey

DEFAULT_BUDGET = 10**6


class Presheaf:
    def __init__(self, cat: FinCat, carriers: Mapping, actions: Mapping | None = None,
                 *, check: bool = True, name: str = ""):
        self.cat = cat
        self.name = name
        self.carriers = {c: canonical(carriers.get(c, ())) for c in cat.objects}
        actions = actions or {}
        acts = {}
        for k in cat.morphisms:
            src = self.carriers[cat.cod[k]]
            if k in cat.identities:
                acts[k] = {x: x for x in src}
            elif k in actions:
                acts[k] = dict(actions[k])
            elif not src:
                acts[k] = {}
            else:
                raise InvalidPresheaf(f"no action given for morphism {k}")
        self.actions = acts
        if check:
            problems = self.violations()
            if problems:
                raise InvalidPresheaf("; ".join(problems[:5]))

    def violations(self) -> list[str]:
        cat = self.cat
        out = []
        for k in cat.morphisms:
            src, tgt = self.carriers[cat.cod[k]], set(self.carriers[cat.dom[k]])
            a = self.actions[k]
            if set(a) != set(src):
                out.append(f"action of {k} is not defined on exactly F({cat.cod[k]})")
                continue
            if any(v not in tgt for v in a.values()):
                out.append(f"action of {k} leaves F({cat.dom[k]})")
        if out:
            return out
        for (g, f), gf in cat.table.items():
            ag, af, agf = self.actions[g], self.actions[f], self.actions[gf]
            for x in self.carriers[cat.cod[g]]:
                if agf[x] != af[ag[x]]:
                    out.append(f"F({gf}) != F({f}) F({g}) at {label(x)}")
                    break
        return out

    def act(self, k: str, x):
        return self.actions[k][x]

    @cached_property
    def index(self) -> dict:
        return {c: {x: i for i, x in enumerate(xs)} for c, xs in self.carriers.items()}

    @cached_property
    def act_idx(self) -> dict:
        cat = self.cat
        out = {}
        for k in cat.morphisms:
            idx = self.index[cat.dom[k]]
            a = self.actions[k]
            out[k] = tuple(idx[a[x]] for x in self.carriers[cat.cod[k]])
        return out

    def size(self) -> int:
        return sum(len(xs) for xs in self.carriers.values())

    def sizes(self) -> tuple:
        return tuple(len(self.carriers[c]) for c in self.cat.objects)

    def elements(self) -> Iterator[tuple]:
        for c in self.cat.objects:
            for x in self.carriers[c]:
                yield c, x

    @cached_property
    def _signature(self):
        return (
            self.cat,
            tuple(self.carriers[c] for c in self.cat.objects),
            tuple(tuple(self.act_idx[k]) for k in self.cat.morphisms),
        )

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Presheaf):
            return NotImplemented
        return self._signature == other._signature

    def __hash__(self):
        return hash(self._signature)

    def __repr__(self):
        sizes = ", ".join(f"{c}:{len(self.carriers[c])}" for c in self.cat.objects)
        return f"<Presheaf {self.name or ''}[{sizes}]>"

    def is_empty(self) -> bool:
        return self.size() == 0

    def is_well_supported(self) -> bool:
        """True when every carrier is inhabited, i.e. F -> 1 is epi."""
        return all(self.carriers[c] for c in self.cat.objects)

    def describe(self) -> dict:
        return {
            "carriers": {c: [label(x) for x in self.carriers[c]] for c in self.cat.objects},
            "actions": {
                k: {label(x): label(y) for x, y in self.actions[k].items()}
                for k in self.cat.non_identities
            },
        }


def same_base(*ps):
    cat = ps[0].cat
    for p in ps[1:]:
        if p.cat != cat:
            raise BaseMismatch("presheaves live on different categories")
    return cat


class NatTrans:
    def __init__(self, source: Presheaf, target: Presheaf, components: Mapping,
                 *, check: bool = True):
        same_base(source, target)
        self.source = source
        self.target = target
        self.components = {c: dict(components.get(c, {})) for c in source.cat.objects}
        if check:
            problems = self.violations()
            if problems:
                raise NotNatural("; ".join(problems[:5]))

    @classmethod
    def _from_index(cls, source, target, assign) -> "NatTrans":
        comps = {}
        for c in source.cat.objects:
            tc = target.carriers[c]
            comps[c] = {x: tc[v] for x, v in zip(source.carriers[c], assign[c])}
        return cls(source, target, comps, check=False)

    def violations(self) -> list[str]:
        cat = self.source.cat
        out = []
        for c in cat.objects:
            comp = self.components[c]
            tgt = set(self.target.carriers[c])
            if set(comp) != set(self.source.carriers[c]):
                out.append(f"component at {c} has the wrong domain")
            elif any(v not in tgt for v in comp.values()):
                out.append(f"component at {c} leaves the target carrier")
        if out:
            return out
        for k in cat.non_identities:
            c, d = cat.cod[k], cat.dom[k]
            for x in self.source.carriers[c]:
                if self.components[d][self.source.act(k, x)] != self.target.act(k, self.components[c][x]):
                    out.append(f"naturality square for {k} fails at {label(x)}")
                    break
        return out

    def __call__(self, c, x):
        return self.components[c][x]

    def key(self) -> tuple:
        """Canonical nested-tuple encoding (images in source-carrier order)."""
        cat = self.source.cat
        return tuple(
            tuple(self.components[c][x] for x in self.source.carriers[c]) for c in cat.objects
        )

    def __eq__(self, other):
        if not isinstance(other, NatTrans):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and self.key() == other.key())

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"<NatTrans {self.source!r} -> {self.target!r}>"

    def __matmul__(self, other: "NatTrans") -> "NatTrans":
        """``g @ f`` is the composite ``g . f`` (f applied first)."""
        if other.target != self.source:
            raise BaseMismatch("composite of non-composable transformations")
        comps = {
            c: {x: self.components[c][y] for x, y in other.components[c].items()}
            for c in self.source.cat.objects
        }
        return NatTrans(other.source, self.target, comps, check=False)

    def is_mono(self) -> bool:
        return all(len(set(comp.values())) == len(comp) for comp in self.components.values())

    def is_epi(self) -> bool:
        return all(
            set(self.components[c].values()) == set(self.target.carriers[c])
            for c in self.source.cat.objects
        )

    def is_iso(self) -> bool:
        return self.is_mono() and self.is_epi()

    def restrict(self, sub: "Subpresheaf") -> "NatTrans":
        return self @ sub.inclusion()

    def describe(self) -> dict:
        return {
            c: {label(x): label(y) for x, y in self.components[c].items()}
            for c in self.source.cat.objects
        }


def identity(F: Presheaf) -> NatTrans:
    return NatTrans(F, F, {c: {x: x for x in F.carriers[c]} for c in F.cat.objects}, check=False)


class Subpresheaf:
    def __init__(self, ambient: Presheaf, selected: Mapping, *, check: bool = True):
        self.ambient = ambient
        self.selected = {c: frozenset(selected.get(c, ())) for c in ambient.cat.objects}
        if check:
            cat = ambient.cat
            for c in cat.objects:
                if not self.selected[c] <= set(ambient.carriers[c]):
                    raise InvalidPresheaf(f"selection at {c} is not inside the carrier")
            for k in cat.non_identities:
                for x in self.selected[cat.cod[k]]:
                    if ambient.act(k, x) not in self.selected[cat.dom[k]]:
                        raise InvalidPresheaf(f"selection not closed under {k}")

    @classmethod
    def whole(cls, F: Presheaf) -> "Subpresheaf":
        return cls(F, F.carriers, check=False)

    @classmethod
    def empty(cls, F: Presheaf) -> "Subpresheaf":
        return cls(F, {}, check=False)

    @classmethod
    def generated(cls, F: Presheaf, elems) -> "Subpresheaf":
        """Smallest subpresheaf containing the given ``(C, x)`` pairs."""
        sel = {c: set() for c in F.cat.objects}
        for c, x in elems:
            for k in F.cat.into(c):
                sel[F.cat.dom[k]].add(F.act(k, x))
        return cls(F, sel, check=False)

    @cached_property
    def _signature(self):
        return (self.ambient, tuple(
            tuple(sorted(self.selected[c], key=skey)) for c in self.ambient.cat.objects))

    def __eq__(self, other):
        if not isinstance(other, Subpresheaf):
            return NotImplemented
        return self._signature == other._signature

    def __hash__(self):
        return hash(self._signature)

    def __le__(self, other: "Subpresheaf") -> bool:
        return all(self.selected[c] <= other.selected[c] for c in self.ambient.cat.objects)

    def __or__(self, other: "Subpresheaf") -> "Subpresheaf":
        return Subpresheaf(self.ambient, {
            c: self.selected[c] | other.selected[c] for c in self.ambient.cat.objects}, check=False)

    def __and__(self, other: "Subpresheaf") -> "Subpresheaf":
        return Subpresheaf(self.ambient, {
            c: self.selected[c] & other.selected[c] for c in self.ambient.cat.objects}, check=False)

    def __repr__(self):
        sizes = ", ".join(f"{c}:{len(self.selected[c])}" for c in self.ambient.cat.objects)
        return f"<Subpresheaf [{sizes}] of {self.ambient!r}>"

    def is_whole(self) -> bool:
        return all(len(self.selected[c]) == len(self.ambient.carriers[c])
                   for c in self.ambient.cat.objects)

    def size(self) -> int:
        return sum(len(s) for s in self.selected.values())

    @cached_property
    def presheaf(self) -> Presheaf:
        cat = self.ambient.cat
        acts = {
            k: {x: self.ambient.act(k, x) for x in self.selected[cat.cod[k]]}
            for k in cat.morphisms
        }
        return Presheaf(cat, self.selected, acts, check=False)

    def inclusion(self) -> NatTrans:
        P = self.presheaf
        return NatTrans(P, self.ambient, {c: {x: x for x in P.carriers[c]} for c in P.cat.objects},
                        check=False)

    def describe(self) -> dict:
        return {c: [label(x) for x in sorted(self.selected[c], key=skey)]
                for c in self.ambient.cat.objects}


def subpresheaves(F: Presheaf, limit: int | None = None) -> list[Subpresheaf]:
    """Every subpresheaf of F, ordered by size then content."""
    principal = [Subpresheaf.generated(F, [(c, x)]) for c, x in F.elements()]
    seen = {Subpresheaf.empty(F)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for s in frontier:
            for p in principal:
                if p <= s:
                    continue
                u = s | p
                if u not in seen:
                    seen.add(u)
                    nxt.append(u)
                    if limit is not None and len(seen) > limit:
                        raise BudgetExceeded(f"more than {limit} subpresheaves")
        frontier = nxt
    return sorted(seen, key=lambda s: (s.size(), skey(s._signature[1])))


def mono_image(f: NatTrans) -> Subpresheaf:
    return Subpresheaf(f.target, {c: set(f.components[c].values()) for c in f.source.cat.objects},
                       check=False)


# -- hom-set search --------------------------------------------------------


class _HomSearch:
    """Backtracking enumeration of natural transformations F -> G.

    Fixing the value at ``(C, x)`` forces the value at ``(D, F(k)x)`` for every
    ``k: D -> C``; conflicts prune the branch.  Solutions come out in canonical
    (lexicographic) order.
    """

    def __init__(self, F: Presheaf, G: Presheaf, fixed=None, allowed=None):
        same_base(F, G)
        self.F, self.G = F, G
        cat = F.cat
        self.objs = cat.objects
        self.restr = {
            c: [(k, cat.dom[k], F.act_idx[k], G.act_idx[k]) for k in cat.into(c)
                if k not in cat.identities]
            for c in cat.objects
        }
        self.assign = {c: [None] * len(F.carriers[c]) for c in cat.objects}
        self.order = [(c, i) for c in cat.objects for i in range(len(F.carriers[c]))]
        self.domains = {}
        for c in cat.objects:
            n = len(G.carriers[c])
            for i in range(len(F.carriers[c])):
                self.domains[(c, i)] = range(n)
        if allowed:
            for c, per in allowed.items():
                gi = G.index[c]
                for x, vals in per.items():
                    i = F.index[c][x]
                    self.domains[(c, i)] = sorted(gi[v] for v in vals if v in gi)
        self.allowed_sets = {key: set(v) for key, v in self.domains.items()} if allowed else None
        self.ok = all(len(d) for d in self.domains.values())
        self.trail: list = []
        if fixed and self.ok:
            for c, per in fixed.items():
                for x, y in per.items():
                    if y not in G.index[c] or not self._place(c, F.index[c][x], G.index[c][y]):
                        self.ok = False
                        return
            self.trail = []

    def _place(self, c, i, v) -> bool:
        assign, restr, allowed = self.assign, self.restr, self.allowed_sets
        stack = [(c, i, v)]
        while stack:
            c, i, v = stack.pop()
            cur = assign[c][i]
            if cur is not None:
                if cur != v:
                    return False
                continue
            if allowed is not None and v not in allowed[(c, i)]:
                return False
            assign[c][i] = v
            self.trail.append((c, i))
            for _k, d, fa, ga in restr[c]:
                stack.append((d, fa[i], ga[v]))
        return True

    def _undo(self, mark):
        trail, assign = self.trail, self.assign
        while len(trail) > mark:
            c, i = trail.pop()
            assign[c][i] = None

    def run(self) -> Iterator[dict]:
        if not self.ok:
            return
        yield from self._search(0)

    def _search(self, pos) -> Iterator[dict]:
        order, assign = self.order, self.assign
        while pos < len(order) and assign[order[pos][0]][order[pos][1]] is not None:
            pos += 1
        if pos == len(order):
            yield assign
            return
        c, i = order[pos]
        for v in self.domains[(c, i)]:
            mark = len(self.trail)
            if self._place(c, i, v):
                yield from self._search(pos + 1)
            self._undo(mark)


def iter_homs(F: Presheaf, G: Presheaf, fixed=None, allowed=None) -> Iterator[NatTrans]:
    """Natural transformations F -> G in canonical order.

    ``fixed`` pins some component values (``{C: {x: y}}``); ``allowed``
    restricts the admissible images of individual elements.
    """
    for assign in _HomSearch(F, G, fixed, allowed).run():
        yield NatTrans._from_index(F, G, assign)


def count_homs(F: Presheaf, G: Presheaf, fixed=None, allowed=None, limit: int | None = None) -> int:
    n = 0
    for _ in _HomSearch(F, G, fixed, allowed).run():
        n += 1
        if limit is not None and n >= limit:
            break
    return n


def hom_set(F: Presheaf, G: Presheaf, budget: int = DEFAULT_BUDGET) -> list[NatTrans]:
    out = []
    for h in iter_homs(F, G):
        out.append(h)
        if len(out) > budget:
            raise BudgetExceeded(f"hom-set larger than {budget}")
    return out


def extensions(sub: Subpresheaf, h: NatTrans, limit: int | None = None) -> list[NatTrans]:
    """Maps ``sub.ambient -> h.target`` restricting to ``h`` on ``sub``."""
    out = []
    for g in iter_homs(sub.ambient, h.target, fixed=h.components):
        out.append(g)
        if limit is not None and len(out) >= limit:
            break
    return out


def is_isomorphic(F: Presheaf, G: Presheaf) -> bool:
    if F.sizes() != G.sizes():
        return False
    return any(h.is_iso() for h in iter_homs(F, G))


# -- basic presheaves ------------------------------------------------------


def terminal(cat: FinCat) -> Presheaf:
    return Presheaf(cat, {c: ("*",) for c in cat.objects},
                    {k: {"*": "*"} for k in cat.morphisms}, check=False, name="1")


def initial(cat: FinCat) -> Presheaf:
    return Presheaf(cat, {}, {}, check=False, name="0")


def yoneda(cat: FinCat, c) -> Presheaf:
    cat.check_object(c)
    carriers = {d: cat.hom(d, c) for d in cat.objects}
    acts = {
        k: {h: cat.compose(h, k) for h in carriers[cat.cod[k]]} for k in cat.morphisms
    }
    return Presheaf(cat, carriers, acts, check=False, name=f"Y({c})")


def constant_presheaf(cat: FinCat, A) -> Presheaf:
    A = canonical(A)
    return Presheaf(cat, {c: A for c in cat.objects},
                    {k: {a: a for a in A} for k in cat.morphisms}, check=False,
                    name="const{" + ",".join(label(a) for a in A) + "}")


def global_sections(G: Presheaf) -> list[dict]:
    """Families (theta_C) with G(k)(theta_C) = theta_D for every k: D -> C."""
    one = terminal(G.cat)
    return [{c: h.components[c]["*"] for c in G.cat.objects} for h in iter_homs(one, G)]


def bang(F: Presheaf) -> NatTrans:
    one = terminal(F.cat)
    return NatTrans(F, one, {c: {x: "*" for x in F.carriers[c]} for c in F.cat.objects},
                    check=False)


def from_initial(G: Presheaf) -> NatTrans:
    return NatTrans(initial(G.cat), G, {}, check=False)


def relabel(F: Presheaf, perms: Mapping) -> Presheaf:
    """Copy of F with elements renamed by ``perms[C]: old -> new``."""
    cat = F.cat
    acts = {
        k: {perms[cat.cod[k]][x]: perms[cat.dom[k]][y] for x, y in F.actions[k].items()}
        for k in cat.morphisms
    }
    return Presheaf(cat, {c: [perms[c][x] for x in F.carriers[c]] for c in cat.objects}, acts,
                    check=False, name=F.name)


def all_functions(src, tgt):
    """Every function src -> tgt as a dict, in canonical order."""
    src, tgt = list(src), list(tgt)
    for values in itertools.product(tgt, repeat=len(src)):
        yield dict(zip(src, values))


Element = Any
