"""The subobject classifier: sieves, ``true``, meet and characteristic maps."""

from __future__ import annotations

from functools import lru_cache

from ..errors import BaseMismatch
from ..fincat import FinCat, Sieve, maximal_sieve, pullback_sieve, sieves_on
from .core import NatTrans, Presheaf, Subpresheaf, terminal
from .limits import product


class Omega(Presheaf):
    """Omega(C) is the set of sieves on C; restriction is pullback of sieves."""

    def __init__(self, cat: FinCat):
        carriers = {c: sieves_on(cat, c) for c in cat.objects}
        acts = {
            k: {s: pullback_sieve(cat, s, k) for s in carriers[cat.cod[k]]} for k in cat.morphisms
        }
        super().__init__(cat, carriers, acts, check=False, name="Omega")

    def top(self, c) -> Sieve:
        return maximal_sieve(self.cat, c)

    def bottom(self, c) -> Sieve:
        return Sieve(c, frozenset())

    @property
    def true(self) -> NatTrans:
        one = terminal(self.cat)
        return NatTrans(one, self, {c: {"*": self.top(c)} for c in self.cat.objects}, check=False)

    @property
    def square(self):
        return product(self, self)

    @property
    def meet(self) -> NatTrans:
        sq = self.square.obj
        return NatTrans(sq, self, {
            c: {(s, t): Sieve(c, s.members & t.members) for s, t in sq.carriers[c]}
            for c in self.cat.objects
        }, check=False)

    def leq(self, s: Sieve, t: Sieve) -> bool:
        return s.members <= t.members


@lru_cache(maxsize=64)
def omega(cat: FinCat) -> Omega:
    return Omega(cat)


def char(m: Subpresheaf) -> NatTrans:
    """char(m)_C(x) = {k: D -> C | F(k)(x) in m(D)}."""
    F = m.ambient
    cat = F.cat
    Om = omega(cat)
    comps = {}
    for c in cat.objects:
        into = cat.into(c)
        comps[c] = {
            x: Sieve(c, frozenset(k for k in into if F.act(k, x) in m.selected[cat.dom[k]]))
            for x in F.carriers[c]
        }
    return NatTrans(F, Om, comps, check=False)


def subobject_from_char(chi: NatTrans) -> Subpresheaf:
    F = chi.source
    Om = chi.target
    if not isinstance(Om, Omega):
        Om = omega(F.cat)
        if chi.target != Om:
            raise BaseMismatch("characteristic map must land in Omega")
    return Subpresheaf(F, {
        c: {x for x in F.carriers[c] if chi.components[c][x] == Om.top(c)} for c in F.cat.objects
    }, check=False)
