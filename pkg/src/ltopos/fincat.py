"""Finite categories, sieves, monoids and categories of elements.

Composition follows ``compose(g, f) = g . f``: apply ``f`` first.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Mapping, NamedTuple

from .errors import CodomainMismatch, InvalidCategory, UnknownObject
from .ordering import skey


class Sieve(NamedTuple):
    at: str
    members: frozenset

    def __repr__(self):
        return f"Sieve({self.at}: {{{', '.join(sorted(self.members))}}})"


@dataclass(frozen=True)
class Violation:
    kind: str
    where: tuple
    message: str

    def __str__(self):
        return f"{self.kind}{self.where}: {self.message}"


@dataclass(frozen=True, eq=False)
class FinCat:
    objects: tuple
    dom: Mapping[str, str]
    cod: Mapping[str, str]
    identity: Mapping[str, str]
    table: Mapping[tuple, str]
    name: str = ""

    @cached_property
    def _signature(self):
        return (
            self.objects,
            tuple(sorted(self.dom.items())),
            tuple(sorted(self.cod.items())),
            tuple(sorted(self.identity.items())),
            tuple(sorted(self.table.items())),
        )

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, FinCat):
            return NotImplemented
        return self._signature == other._signature

    def __hash__(self):
        return hash(self._signature)

    def __repr__(self):
        label = self.name or "FinCat"
        return f"<{label}: {len(self.objects)} objects, {len(self.morphisms)} morphisms>"

    @cached_property
    def morphisms(self) -> tuple:
        return tuple(sorted(self.dom))

    @cached_property
    def _into(self):
        out = {c: [] for c in self.objects}
        for k in self.morphisms:
            out[self.cod[k]].append(k)
        return {c: tuple(ks) for c, ks in out.items()}

    @cached_property
    def _hom(self):
        out = {}
        for k in self.morphisms:
            out.setdefault((self.dom[k], self.cod[k]), []).append(k)
        return {key: tuple(v) for key, v in out.items()}

    @cached_property
    def identities(self) -> frozenset:
        return frozenset(self.identity.values())

    def into(self, c) -> tuple:
        """Morphisms with codomain ``c``, sorted."""
        try:
            return self._into[c]
        except KeyError:
            raise UnknownObject(c) from None

    def hom(self, a, b) -> tuple:
        return self._hom.get((a, b), ())

    def compose(self, g: str, f: str) -> str:
        return self.table[(g, f)]

    def check_object(self, c):
        if c not in self._into:
            raise UnknownObject(f"{c!r} is not an object of {self!r}")

    @cached_property
    def non_identities(self) -> tuple:
        return tuple(k for k in self.morphisms if k not in self.identities)

    def to_json(self) -> dict:
        forced = set()
        for k in self.morphisms:
            forced.add((self.identity[self.cod[k]], k))
            forced.add((k, self.identity[self.dom[k]]))
        return {
            "objects": list(self.objects),
            "morphisms": [
                {"name": k, "dom": self.dom[k], "cod": self.cod[k]} for k in self.morphisms
            ],
            "identities": {c: self.identity[c] for c in self.objects},
            "composition": [
                [g, f, gf] for (g, f), gf in sorted(self.table.items()) if (g, f) not in forced
            ],
        }


def validate_category(raw: Mapping[str, Any], name: str = "") -> FinCat:
    """Build a FinCat from the JSON-style description, completing identity composites.

    Raises :class:`InvalidCategory` carrying every law violation found.
    """
    violations: list[Violation] = []
    objects = [str(o) for o in raw.get("objects", [])]
    if len(set(objects)) != len(objects):
        violations.append(Violation("DuplicateObject", (), "object names repeat"))
    objset = set(objects)
    dom, cod = {}, {}
    for m in raw.get("morphisms", []):
        k, d, c = str(m["name"]), str(m["dom"]), str(m["cod"])
        if k in dom:
            violations.append(Violation("DuplicateMorphism", (k,), "morphism declared twice"))
        if d not in objset or c not in objset:
            violations.append(Violation("UnknownIdentifier", (k,), f"endpoints {d}->{c} undeclared"))
        dom[k], cod[k] = d, c
    identity = {}
    ids_raw = raw.get("identities", {})
    for c in objects:
        if c not in ids_raw:
            violations.append(Violation("MissingIdentity", (c,), "no identity declared"))
            continue
        i = str(ids_raw[c])
        if i not in dom:
            violations.append(Violation("UnknownIdentifier", (i,), "identity is not a declared morphism"))
        elif dom[i] != c or cod[i] != c:
            violations.append(Violation("MissingIdentity", (c,), f"{i} is not an endomorphism of {c}"))
        identity[c] = i
    if violations:
        raise InvalidCategory(violations)

    table: dict[tuple, str] = {}
    for entry in raw.get("composition", []):
        g, f, gf = (str(x) for x in entry)
        for x in (g, f, gf):
            if x not in dom:
                violations.append(Violation("UnknownIdentifier", (g, f, gf), f"{x} undeclared"))
        if (g, f) in table and table[(g, f)] != gf:
            violations.append(Violation("ConflictingComposite", (g, f), "listed twice with different values"))
        table[(g, f)] = gf
    if violations:
        raise InvalidCategory(violations)

    for k in dom:
        for pair in ((identity[cod[k]], k), (k, identity[dom[k]])):
            if pair in table and table[pair] != k:
                violations.append(
                    Violation("IdentityLawFailure", pair + (table[pair],), f"identity composite must be {k}")
                )
            table.setdefault(pair, k)

    for (g, f), gf in table.items():
        if cod[f] != dom[g]:
            violations.append(Violation("IllTypedComposite", (g, f, gf), "pair is not composable"))
        elif dom[gf] != dom[f] or cod[gf] != cod[g]:
            violations.append(Violation("IllTypedComposite", (g, f, gf), "composite has wrong endpoints"))
    for f in dom:
        for g in dom:
            if cod[f] == dom[g] and (g, f) not in table:
                violations.append(Violation("CompositionNotTotal", (g, f), "composite missing"))
    if violations:
        raise InvalidCategory(violations)

    for f in dom:
        for g in dom:
            if cod[f] != dom[g]:
                continue
            gf = table[(g, f)]
            for h in dom:
                if cod[g] != dom[h]:
                    continue
                if table[(h, gf)] != table[(table[(h, g)], f)]:
                    violations.append(
                        Violation("AssociativityFailure", (h, g, f), "h(gf) != (hg)f")
                    )
    if violations:
        raise InvalidCategory(violations)
    return FinCat(
        objects=tuple(sorted(objects)),
        dom=dict(sorted(dom.items())),
        cod=dict(sorted(cod.items())),
        identity=dict(sorted(identity.items())),
        table=dict(sorted(table.items())),
        name=name,
    )


def make_category(objects, morphisms, identities, composition=(), name: str = "") -> FinCat:
    """Shorthand: ``morphisms`` is a list of ``(name, dom, cod)`` triples."""
    return validate_category(
        {
            "objects": list(objects),
            "morphisms": [{"name": k, "dom": d, "cod": c} for k, d, c in morphisms],
            "identities": dict(identities),
            "composition": [list(t) for t in composition],
        },
        name=name,
    )


@dataclass(frozen=True, eq=False)
class MonoidPresentation:
    elements: tuple
    unit: str
    mult: Mapping[tuple, str]

    def check(self) -> list[Violation]:
        out = []
        els = set(self.elements)
        if self.unit not in els:
            out.append(Violation("MissingIdentity", (self.unit,), "unit is not an element"))
        for a in self.elements:
            for b in self.elements:
                if (a, b) not in self.mult or self.mult[(a, b)] not in els:
                    out.append(Violation("CompositionNotTotal", (a, b), "product missing"))
        if out:
            return out
        for a in self.elements:
            if self.mult[(self.unit, a)] != a or self.mult[(a, self.unit)] != a:
                out.append(Violation("IdentityLawFailure", (a,), "unit law fails"))
            for b in self.elements:
                for c in self.elements:
                    if self.mult[(self.mult[(a, b)], c)] != self.mult[(a, self.mult[(b, c)])]:
                        out.append(Violation("AssociativityFailure", (a, b, c), "(ab)c != a(bc)"))
        return out


def monoid_as_category(m: MonoidPresentation, name: str = "", obj: str = "*") -> FinCat:
    bad = m.check()
    if bad:
        raise InvalidCategory(bad)
    forced = {(m.unit, a) for a in m.elements} | {(a, m.unit) for a in m.elements}
    return make_category(
        [obj],
        [(str(a), obj, obj) for a in m.elements],
        {obj: str(m.unit)},
        [(str(a), str(b), str(m.mult[(a, b)])) for a in m.elements for b in m.elements
         if (a, b) not in forced],
        name=name,
    )


def sieves_on(cat: FinCat, c) -> list[Sieve]:
    """All sieves on ``c``, smallest first; brute force over subsets."""
    cat.check_object(c)
    arrows = cat.into(c)
    out = []
    for r in range(len(arrows) + 1):
        for subset in itertools.combinations(arrows, r):
            members = frozenset(subset)
            if all(
                cat.compose(f, g) in members
                for f in members
                for g in cat.into(cat.dom[f])
            ):
                out.append(Sieve(c, members))
    out.sort(key=lambda s: skey(s.members))
    return out


def maximal_sieve(cat: FinCat, c) -> Sieve:
    return Sieve(c, frozenset(cat.into(c)))


def pullback_sieve(cat: FinCat, s: Sieve, h: str) -> Sieve:
    if cat.cod[h] != s.at:
        raise CodomainMismatch(f"{h} has codomain {cat.cod[h]}, sieve lives on {s.at}")
    d = cat.dom[h]
    return Sieve(d, frozenset(g for g in cat.into(d) if cat.compose(h, g) in s.members))


@dataclass(frozen=True, eq=False)
class ElementsCategory:
    """The category of elements of a presheaf ``base`` on ``over``.

    Objects are named ``"C@i"`` for the i-th element of ``base(C)``; the morphism
    ``"k@i"`` goes from ``(dom k, base(k)(b))`` to ``(cod k, b)`` with b the
    i-th element of ``base(cod k)``.
    """

    cat: FinCat
    over: FinCat
    base: Any
    point: Mapping[str, tuple]      # object -> (C, b)
    obj_at: Mapping[tuple, str]     # (C, b) -> object
    arrow: Mapping[str, tuple]      # morphism -> (k, b at codomain)
    lift: Mapping[tuple, str]       # (k, b) -> morphism


def category_of_elements(cat: FinCat, B) -> ElementsCategory:
    point, obj_at = {}, {}
    for c in cat.objects:
        for i, b in enumerate(B.carriers[c]):
            name = f"{c}@{i}"
            point[name] = (c, b)
            obj_at[(c, b)] = name
    morphisms, arrow, lift = [], {}, {}
    for k in cat.morphisms:
        c, d = cat.cod[k], cat.dom[k]
        for i, b in enumerate(B.carriers[c]):
            name = f"{k}@{i}"
            morphisms.append((name, obj_at[(d, B.act(k, b))], obj_at[(c, b)]))
            arrow[name] = (k, b)
            lift[(k, b)] = name
    identities = {o: lift[(cat.identity[c], b)] for o, (c, b) in point.items()}
    composition = []
    for g_name, (g, b) in arrow.items():
        for f_name, (f, b2) in arrow.items():
            if cat.cod[f] == cat.dom[g] and b2 == B.act(g, b):
                composition.append((g_name, f_name, lift[(cat.compose(g, f), b)]))
    elements = make_category(point, morphisms, identities, composition,
                             name=f"el({cat.name or 'C'})")
    return ElementsCategory(elements, cat, B, point, obj_at, arrow, lift)
