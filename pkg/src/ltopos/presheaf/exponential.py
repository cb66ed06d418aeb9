"""Exponentials G^F with G^F(C) = Hom(Y(C) x F, G)."""

from __future__ import annotations

from ..errors import BaseMismatch, BudgetExceeded
from .core import DEFAULT_BUDGET, NatTrans, Presheaf, iter_homs, same_base, yoneda
from .limits import Cone, product


class Exponential(Presheaf):
    """Elements at stage C are the canonical keys of transformations Y(C) x F -> G."""

    def __init__(self, F: Presheaf, G: Presheaf, budget: int = DEFAULT_BUDGET):
        cat = same_base(F, G)
        self.cat = cat
        self.exponent, self.codomain = F, G
        self.yf: dict[str, Cone] = {c: product(yoneda(cat, c), F) for c in cat.objects}
        carriers = {}
        total = 0
        for c in cat.objects:
            keys = []
            for h in iter_homs(self.yf[c].obj, G):
                keys.append(h.key())
                total += 1
                if total > budget:
                    raise BudgetExceeded(f"exponential exceeds {budget} elements")
            carriers[c] = keys
        acts = {}
        for k in cat.morphisms:
            c, d = cat.cod[k], cat.dom[k]
            acts[k] = {g: self._restrict(k, c, d, g) for g in carriers[c]}
        super().__init__(cat, carriers, acts, check=False,
                         name=f"{G.name or '?'}^{F.name or '?'}")

    def _restrict(self, k, c, d, key):
        # (gamma . (Y(k) x F))_E(g, y) = gamma_E(k g, y)
        cat = self.cat
        src_c, src_d = self.yf[c].obj, self.yf[d].obj
        out = []
        for e_pos, e in enumerate(cat.objects):
            lookup = dict(zip(src_c.carriers[e], key[e_pos]))
            out.append(tuple(lookup[(cat.compose(k, g), y)] for g, y in src_d.carriers[e]))
        return tuple(out)

    def nat(self, c, key) -> NatTrans:
        src = self.yf[c].obj
        comps = {e: dict(zip(src.carriers[e], key[pos]))
                 for pos, e in enumerate(self.cat.objects)}
        return NatTrans(src, self.codomain, comps, check=False)

    def value(self, c, key, d, g, y):
        """gamma_D(g, y) for gamma = key at stage c."""
        pos = self.cat.objects.index(d)
        src = self.yf[c].obj
        return key[pos][src.index[d][(g, y)]]

    def at_identity(self, c, key, y):
        return self.value(c, key, c, self.cat.identity[c], y)

    def transpose(self, H: Presheaf, h: NatTrans) -> NatTrans:
        """Hom(H x F, G) -> Hom(H, G^F);  h must have source ``product(H, F).obj``."""
        cat = self.cat
        if h.source != product(H, self.exponent).obj or h.target != self.codomain:
            raise BaseMismatch("transpose expects a map H x F -> G")
        comps = {}
        for c in cat.objects:
            src = self.yf[c].obj
            comp = {}
            for z in H.carriers[c]:
                key = tuple(
                    tuple(h.components[e][(H.act(g, z), y)] for g, y in src.carriers[e])
                    for e in cat.objects
                )
                comp[z] = key
            comps[c] = comp
        return NatTrans(H, self, comps, check=False)

    def untranspose(self, phi: NatTrans) -> NatTrans:
        """Hom(H, G^F) -> Hom(H x F, G) via (z, y) -> phi(z)_C(id_C, y)."""
        H = phi.source
        P = product(H, self.exponent).obj
        comps = {
            c: {(z, y): self.at_identity(c, phi.components[c][z], y) for z, y in P.carriers[c]}
            for c in self.cat.objects
        }
        return NatTrans(P, self.codomain, comps, check=False)

    def evaluation(self) -> NatTrans:
        P = product(self, self.exponent).obj
        comps = {
            c: {(g, y): self.at_identity(c, g, y) for g, y in P.carriers[c]}
            for c in self.cat.objects
        }
        return NatTrans(P, self.codomain, comps, check=False)


def exponential(F: Presheaf, G: Presheaf, budget: int = DEFAULT_BUDGET) -> Exponential:
    return Exponential(F, G, budget)


def exp_map(alpha: NatTrans, F: Presheaf, source_exp: Exponential | None = None,
            target_exp: Exponential | None = None) -> NatTrans:
    """alpha^F : G^F -> H^F, (alpha^F(gamma))_D(k, y) = alpha_D(gamma_D(k, y))."""
    GF = source_exp or exponential(F, alpha.source)
    HF = target_exp or exponential(F, alpha.target)
    cat = F.cat
    comps = {}
    for c in cat.objects:
        comps[c] = {
            key: tuple(tuple(alpha.components[e][v] for v in row)
                       for e, row in zip(cat.objects, key))
            for key in GF.carriers[c]
        }
    return NatTrans(GF, HF, comps, check=False)


def name_of_identity(F: Presheaf, FF: Exponential | None = None) -> NatTrans:
    """i_F : 1 -> F^F, (i_F)_C(*) = the projection Y(C) x F -> F."""
    from .core import terminal

    FF = FF or exponential(F, F)
    cat = F.cat
    comps = {}
    for c in cat.objects:
        src = FF.yf[c].obj
        key = tuple(tuple(y for _g, y in src.carriers[e]) for e in cat.objects)
        comps[c] = {"*": key}
    return NatTrans(terminal(cat), FF, comps, check=False)
