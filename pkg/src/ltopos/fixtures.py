"""Builtin fixture categories and exhaustive presheaf enumeration."""

from __future__ import annotations

import itertools
from functools import lru_cache

from .fincat import FinCat, MonoidPresentation, make_category, monoid_as_category
from .presheaf import Presheaf, Subpresheaf, subpresheaves


def terminal_category() -> FinCat:
    return make_category(["*"], [("id", "*", "*")], {"*": "id"}, name="C1")


def walking_arrow() -> FinCat:
    return make_category(
        ["a", "b"],
        [("id_a", "a", "a"), ("id_b", "b", "b"), ("u", "a", "b")],
        {"a": "id_a", "b": "id_b"},
        name="C2",
    )


def idempotent_monoid() -> MonoidPresentation:
    return MonoidPresentation(("1", "e"), "1",
                              {("1", "1"): "1", ("1", "e"): "e", ("e", "1"): "e", ("e", "e"): "e"})


def cyclic_group_2() -> MonoidPresentation:
    return MonoidPresentation(("1", "g"), "1",
                              {("1", "1"): "1", ("1", "g"): "g", ("g", "1"): "g", ("g", "g"): "1"})


@lru_cache(maxsize=None)
def builtin(name: str) -> FinCat:
    if name == "C1":
        return terminal_category()
    if name == "C2":
        return walking_arrow()
    if name == "M2":
        return monoid_as_category(idempotent_monoid(), name="M2")
    if name == "Z2":
        return monoid_as_category(cyclic_group_2(), name="Z2")
    raise KeyError(name)


BUILTIN_CATEGORIES = ("C1", "C2", "M2", "Z2")


def _actions_for(cat: FinCat, sizes: dict):
    """Every functorial assignment of restriction maps on the carriers range(n)."""
    morphs = list(cat.non_identities)
    checks_at = {}
    position = {k: n for n, k in enumerate(morphs)}
    for (g, f), gf in cat.table.items():
        involved = [m for m in (g, f, gf) if m in position]
        if not involved:
            continue
        last = max(position[m] for m in involved)
        checks_at.setdefault(last, []).append((g, f, gf))
    ident = {k: tuple(range(sizes[cat.cod[k]])) for k in cat.identities}
    chosen: dict = {}

    def get(k):
        return ident[k] if k in ident else chosen[k]

    def rec(n):
        if n == len(morphs):
            yield dict(chosen)
            return
        k = morphs[n]
        src, tgt = sizes[cat.cod[k]], sizes[cat.dom[k]]
        for values in itertools.product(range(tgt), repeat=src):
            chosen[k] = values
            ok = True
            for g, f, gf in checks_at.get(n, ()):
                ag, af, agf = get(g), get(f), get(gf)
                if any(agf[x] != af[ag[x]] for x in range(sizes[cat.cod[g]])):
                    ok = False
                    break
            if ok:
                yield from rec(n + 1)
        chosen.pop(k, None)

    yield from rec(0)


def _canonical_form(cat: FinCat, sizes: dict, acts: dict):
    objs = cat.objects
    morphs = cat.non_identities
    best = None
    for perm_tuple in itertools.product(*(itertools.permutations(range(sizes[c])) for c in objs)):
        perm = dict(zip(objs, perm_tuple))
        form = []
        for k in morphs:
            pc, pd = perm[cat.cod[k]], perm[cat.dom[k]]
            inv = [0] * len(pc)
            for old, new in enumerate(pc):
                inv[new] = old
            form.append(tuple(pd[acts[k][inv[x]]] for x in range(len(pc))))
        form = tuple(form)
        if best is None or form < best:
            best = form
    return best


@lru_cache(maxsize=None)
def enumerate_presheaves(cat: FinCat, max_size: int, min_size: int = 0) -> tuple:
    """Presheaves with ``min_size..max_size`` elements per stage, one per iso class.

    Elements are the integers ``0..n-1``; output order is by total size, then
    size vector, then action table.
    """
    found = []
    objs = cat.objects
    for size_vec in itertools.product(range(min_size, max_size + 1), repeat=len(objs)):
        sizes = dict(zip(objs, size_vec))
        forms = set()
        for acts in _actions_for(cat, sizes):
            forms.add(_canonical_form(cat, sizes, acts))
        for form in sorted(forms):
            found.append((sum(size_vec), size_vec, form))
    found.sort()
    out = []
    for n, (_total, size_vec, form) in enumerate(found):
        sizes = dict(zip(objs, size_vec))
        acts = {}
        for k, table in zip(cat.non_identities, form):
            acts[k] = {x: table[x] for x in range(sizes[cat.cod[k]])}
        name = f"{cat.name or 'P'}#{n}"
        out.append(Presheaf(cat, {c: range(sizes[c]) for c in objs}, acts, name=name))
    return tuple(out)


def fixture_presheaves(cat: FinCat, max_size: int = 3) -> tuple:
    return enumerate_presheaves(cat, max_size)


def fixture_monos(cat: FinCat, max_size: int = 3) -> list[Subpresheaf]:
    """Every subpresheaf of every fixture presheaf."""
    out = []
    for F in enumerate_presheaves(cat, max_size):
        out.extend(subpresheaves(F))
    return out
