"""Pointwise finite limits and colimits, images, congruences and quotients."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from ..errors import IllTypedDiagram
from ..ordering import skey
from .core import NatTrans, Presheaf, Subpresheaf, initial, same_base, terminal


@dataclass
class Cone:
    """A (co)limit object with its legs and the factory for mediating arrows."""

    obj: Presheaf
    legs: list[NatTrans]
    mediate: Callable = field(repr=False)
    inclusion: Subpresheaf | None = None


def _pointwise(cat, carriers, fn) -> Presheaf:
    acts = {k: {x: fn(k, x) for x in carriers[cat.cod[k]]} for k in cat.morphisms}
    return Presheaf(cat, carriers, acts, check=False)


def product(*factors: Presheaf) -> Cone:
    """n-ary product; elements are tuples.  ``product()`` is the terminal cone."""
    if not factors:
        raise IllTypedDiagram("use terminal_cone for the empty product")
    cat = same_base(*factors)
    carriers = {}
    for c in cat.objects:
        rows = [()]
        for F in factors:
            rows = [r + (x,) for r in rows for x in F.carriers[c]]
        carriers[c] = rows
    P = _pointwise(cat, carriers, lambda k, t: tuple(F.act(k, x) for F, x in zip(factors, t)))
    P.name = " x ".join(F.name or "?" for F in factors)
    legs = [
        NatTrans(P, F, {c: {t: t[n] for t in P.carriers[c]} for c in cat.objects}, check=False)
        for n, F in enumerate(factors)
    ]

    def mediate(arrows: Sequence[NatTrans]) -> NatTrans:
        src = arrows[0].source
        if len(arrows) != len(factors) or any(a.target != F for a, F in zip(arrows, factors)):
            raise IllTypedDiagram("cone does not match the product")
        return NatTrans(src, P, {
            c: {x: tuple(a.components[c][x] for a in arrows) for x in src.carriers[c]}
            for c in cat.objects
        }, check=False)

    return Cone(P, legs, mediate)


def pair(f: NatTrans, g: NatTrans, P: Cone | None = None) -> NatTrans:
    """The arrow (f, g) into the product of the codomains."""
    P = P or product(f.target, g.target)
    return P.mediate([f, g])


def product_map(f: NatTrans, g: NatTrans) -> NatTrans:
    """f x g between the binary products."""
    src = product(f.source, g.source)
    tgt = product(f.target, g.target)
    return tgt.mediate([f @ src.legs[0], g @ src.legs[1]])


def terminal_cone(cat) -> Cone:
    one = terminal(cat)

    def mediate(arrows):
        (src,) = arrows
        return NatTrans(src, one, {c: {x: "*" for x in src.carriers[c]} for c in cat.objects},
                        check=False)

    return Cone(one, [], mediate)


def equalizer(f: NatTrans, g: NatTrans) -> Cone:
    if f.source != g.source or f.target != g.target:
        raise IllTypedDiagram("equalizer needs a parallel pair")
    A = f.source
    cat = A.cat
    sub = Subpresheaf(A, {
        c: {x for x in A.carriers[c] if f.components[c][x] == g.components[c][x]}
        for c in cat.objects
    }, check=False)
    E = sub.presheaf
    leg = sub.inclusion()

    def mediate(arrows):
        (h,) = arrows
        if f @ h != g @ h:
            raise IllTypedDiagram("arrow does not equalize the pair")
        return NatTrans(h.source, E, h.components, check=False)

    return Cone(E, [leg], mediate, inclusion=sub)


def pullback(f: NatTrans, g: NatTrans) -> Cone:
    if f.target != g.target:
        raise IllTypedDiagram("pullback needs a cospan")
    cat = f.source.cat
    A, B = f.source, g.source
    carriers = {
        c: [(a, b) for a in A.carriers[c] for b in B.carriers[c]
            if f.components[c][a] == g.components[c][b]]
        for c in cat.objects
    }
    P = _pointwise(cat, carriers, lambda k, t: (A.act(k, t[0]), B.act(k, t[1])))
    legs = [
        NatTrans(P, A, {c: {t: t[0] for t in P.carriers[c]} for c in cat.objects}, check=False),
        NatTrans(P, B, {c: {t: t[1] for t in P.carriers[c]} for c in cat.objects}, check=False),
    ]

    def mediate(arrows):
        p, q = arrows
        if f @ p != g @ q:
            raise IllTypedDiagram("cone does not commute")
        return NatTrans(p.source, P, {
            c: {x: (p.components[c][x], q.components[c][x]) for x in p.source.carriers[c]}
            for c in cat.objects
        }, check=False)

    return Cone(P, legs, mediate)


def limit(kind: str, *diagram) -> Cone:
    if kind == "terminal":
        return terminal_cone(diagram[0])
    if kind == "product":
        return product(*diagram)
    if kind == "pullback":
        return pullback(*diagram)
    if kind == "equalizer":
        return equalizer(*diagram)
    raise IllTypedDiagram(f"unknown limit kind {kind!r}")


# -- congruences and quotients ---------------------------------------------


@dataclass
class Congruence:
    on: Presheaf
    rep: dict  # object -> {element: canonical representative}

    def related(self, c, x, y) -> bool:
        return self.rep[c][x] == self.rep[c][y]

    def classes(self, c) -> list[tuple]:
        groups: dict = {}
        for x in self.on.carriers[c]:
            groups.setdefault(self.rep[c][x], []).append(x)
        return [tuple(v) for _, v in sorted(groups.items(), key=lambda kv: skey(kv[0]))]

    def is_diagonal(self) -> bool:
        return all(self.rep[c][x] == x for c in self.on.cat.objects for x in self.on.carriers[c])


def generate_congruence(F: Presheaf, pairs) -> Congruence:
    """Least action-compatible equivalence relation containing ``pairs``."""
    cat = F.cat
    parent = {c: {x: x for x in F.carriers[c]} for c in cat.objects}

    def find(c, x):
        p = parent[c]
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    todo = list(pairs)
    while todo:
        c, x, y = todo.pop()
        rx, ry = find(c, x), find(c, y)
        if rx == ry:
            continue
        if skey(ry) < skey(rx):
            rx, ry = ry, rx
        parent[c][ry] = rx
        for k in cat.into(c):
            if k in cat.identities:
                continue
            todo.append((cat.dom[k], F.act(k, x), F.act(k, y)))
    rep = {c: {x: find(c, x) for x in F.carriers[c]} for c in cat.objects}
    # representatives must be the skey-least member of each class
    for c in cat.objects:
        best: dict = {}
        for x, r in rep[c].items():
            if r not in best or skey(x) < skey(best[r]):
                best[r] = x
        rep[c] = {x: best[r] for x, r in rep[c].items()}
    return Congruence(F, rep)


def quotient(F: Presheaf, theta: Congruence) -> tuple[Presheaf, NatTrans]:
    cat = F.cat
    carriers = {c: set(theta.rep[c].values()) for c in cat.objects}
    Q = _pointwise(cat, carriers, lambda k, r: theta.rep[cat.dom[k]][F.act(k, r)])
    proj = NatTrans(F, Q, theta.rep, check=False)
    return Q, proj


def kernel(f: NatTrans) -> Congruence:
    F = f.source
    rep = {}
    for c in F.cat.objects:
        first: dict = {}
        for x in F.carriers[c]:
            first.setdefault(f.components[c][x], x)
        rep[c] = {x: first[f.components[c][x]] for x in F.carriers[c]}
    return Congruence(F, rep)


# -- colimits --------------------------------------------------------------


def coproduct(*summands: Presheaf) -> Cone:
    cat = same_base(*summands)
    carriers = {c: [(n, x) for n, F in enumerate(summands) for x in F.carriers[c]]
                for c in cat.objects}
    S = _pointwise(cat, carriers, lambda k, t: (t[0], summands[t[0]].act(k, t[1])))
    S.name = " + ".join(F.name or "?" for F in summands)
    legs = [
        NatTrans(F, S, {c: {x: (n, x) for x in F.carriers[c]} for c in cat.objects}, check=False)
        for n, F in enumerate(summands)
    ]

    def mediate(arrows):
        tgt = arrows[0].target
        return NatTrans(S, tgt, {
            c: {t: arrows[t[0]].components[c][t[1]] for t in S.carriers[c]} for c in cat.objects
        }, check=False)

    return Cone(S, legs, mediate)


def coequalizer(f: NatTrans, g: NatTrans) -> Cone:
    if f.source != g.source or f.target != g.target:
        raise IllTypedDiagram("coequalizer needs a parallel pair")
    A, B = f.source, f.target
    theta = generate_congruence(
        B, [(c, f.components[c][a], g.components[c][a]) for c, a in A.elements()])
    Q, proj = quotient(B, theta)

    def mediate(arrows):
        (h,) = arrows
        if h @ f != h @ g:
            raise IllTypedDiagram("arrow does not coequalize the pair")
        return NatTrans(Q, h.target, {c: {r: h.components[c][r] for r in Q.carriers[c]}
                                      for c in B.cat.objects}, check=False)

    return Cone(Q, [proj], mediate)


def pushout(f: NatTrans, g: NatTrans) -> Cone:
    """Pushout of the span ``A <-f- U -g-> B``."""
    if f.source != g.source:
        raise IllTypedDiagram("pushout needs a span")
    S = coproduct(f.target, g.target)
    Q = coequalizer(S.legs[0] @ f, S.legs[1] @ g)
    proj = Q.legs[0]
    legs = [proj @ S.legs[0], proj @ S.legs[1]]

    def mediate(arrows):
        p, q = arrows
        if p @ f != q @ g:
            raise IllTypedDiagram("cocone does not commute")
        return Q.mediate([S.mediate([p, q])])

    return Cone(Q.obj, legs, mediate)


def initial_cone(cat) -> Cone:
    zero = initial(cat)

    def mediate(arrows):
        (tgt,) = arrows
        return NatTrans(zero, tgt, {}, check=False)

    return Cone(zero, [], mediate)


def colimit(kind: str, *diagram) -> Cone:
    if kind == "initial":
        return initial_cone(diagram[0])
    if kind == "coproduct":
        return coproduct(*diagram)
    if kind == "pushout":
        return pushout(*diagram)
    if kind == "coequalizer":
        return coequalizer(*diagram)
    raise IllTypedDiagram(f"unknown colimit kind {kind!r}")


# -- images ----------------------------------------------------------------


@dataclass
class ImageFactorization:
    epi: NatTrans
    image: Subpresheaf

    @property
    def mono(self) -> NatTrans:
        return self.image.inclusion()


def image_factorization(f: NatTrans) -> ImageFactorization:
    cat = f.source.cat
    img = Subpresheaf(f.target, {c: set(f.components[c].values()) for c in cat.objects},
                      check=False)
    epi = NatTrans(f.source, img.presheaf, f.components, check=False)
    return ImageFactorization(epi, img)
