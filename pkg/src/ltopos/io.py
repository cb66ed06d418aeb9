"""JSON formats for categories, presheaves, transformations, topologies and slice objects.

Elements are JSON scalars or lists (lists are read back as tuples).  Since JSON
object keys are strings, a non-string element used as a key is written as its
compact JSON text, e.g. ``"0"`` or ``"[0,\\"*\\"]"``.
"""

from __future__ import annotations

import json
from contextlib import contextmanager
from pathlib import Path
from typing import Any

from .errors import InvalidCategory, InvalidPresheaf, NotNatural, UnknownObject
from .fincat import FinCat, Violation, validate_category
from .fixtures import BUILTIN_CATEGORIES, builtin
from .ordering import jsonable
from .presheaf import NatTrans, Presheaf, Subpresheaf, initial, omega, terminal, yoneda
from .slice import SliceObject
from .topology import (
    TopologyCandidate,
    classify_candidate,
    enumerate_topologies,
    identity_topology,
    maximal_topology,
)


def dumps(obj: Any) -> str:
    """Canonical JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def elem_key(x) -> str:
    return x if isinstance(x, str) else json.dumps(jsonable(x), separators=(",", ":"))


def _elem(v):
    if isinstance(v, list):
        return tuple(_elem(e) for e in v)
    return v


def _load(src, base_dir: Path | None = None):
    """A dict passes through; a string is a path relative to ``base_dir``."""
    if isinstance(src, dict):
        return src, base_dir
    path = Path(src)
    if base_dir is not None and not path.is_absolute():
        path = base_dir / path
    with open(path, encoding="utf-8") as fh:
        return json.load(fh), path.parent


@contextmanager
def _reading(what: str):
    """Report structurally broken JSON as invalid input rather than a crash."""
    try:
        yield
    except (TypeError, AttributeError, KeyError, IndexError) as exc:
        raise InvalidPresheaf(f"malformed {what}: {exc!r}") from exc


# -- categories ------------------------------------------------------------


def load_category(src, base_dir: Path | None = None) -> FinCat:
    if isinstance(src, str) and src.startswith("builtin:"):
        name = src.split(":", 1)[1]
        if name not in BUILTIN_CATEGORIES:
            raise UnknownObject(f"unknown builtin category {name!r}")
        return builtin(name)
    raw, _ = _load(src, base_dir)
    if not isinstance(raw, dict):
        raise InvalidCategory([Violation("Malformed", (), "expected a JSON object")])
    try:
        return validate_category(raw, name=str(raw.get("name", "")))
    except (TypeError, KeyError, AttributeError) as exc:
        raise InvalidCategory([Violation("Malformed", (), f"unreadable description: {exc!r}")])


def category_to_json(cat: FinCat) -> dict:
    out = cat.to_json()
    if cat.name:
        out["name"] = cat.name
    return out


# -- presheaves and transformations ------------------------------------------------


def presheaf_from_json(raw: dict, cat: FinCat | None = None, base_dir: Path | None = None) -> Presheaf:
    if cat is None:
        if "category" not in raw:
            raise InvalidPresheaf("presheaf file names no category")
        cat = load_category(raw["category"], base_dir)
    carriers_raw = raw.get("carriers", {})
    unknown = set(carriers_raw) - set(cat.objects)
    if unknown:
        raise UnknownObject(f"carriers for unknown objects {sorted(unknown)}")
    carriers = {c: [_elem(v) for v in carriers_raw.get(c, [])] for c in cat.objects}
    keyed = {c: {elem_key(x): x for x in carriers[c]} for c in cat.objects}
    actions = {}
    for k, table in raw.get("actions", {}).items():
        if k not in cat.dom:
            raise UnknownObject(f"action for unknown morphism {k!r}")
        if k in cat.identities:
            continue
        src = keyed[cat.cod[k]]
        act = {}
        for key, v in table.items():
            if key not in src:
                raise InvalidPresheaf(f"action {k} given on {key!r}, not an element of F({cat.cod[k]})")
            act[src[key]] = _elem(v)
        actions[k] = act
    return Presheaf(cat, carriers, actions, name=str(raw.get("name", "")))


def load_presheaf(src, cat: FinCat | None = None, base_dir: Path | None = None) -> Presheaf:
    if isinstance(src, str) and src.startswith("builtin:"):
        if cat is None:
            raise InvalidPresheaf("builtin presheaves need a category")
        what = src.split(":")[1:]
        if what == ["terminal"]:
            return terminal(cat)
        if what == ["initial"]:
            return initial(cat)
        if what[0] == "yoneda" and len(what) == 2:
            return yoneda(cat, what[1])
        if what[0] == "fixture" and len(what) == 3:
            from .fixtures import enumerate_presheaves

            with _reading("fixture selector"):
                return enumerate_presheaves(cat, int(what[1]))[int(what[2])]
        raise InvalidPresheaf(f"unknown builtin presheaf {src!r}")
    raw, bd = _load(src, base_dir)
    with _reading("presheaf"):
        return presheaf_from_json(raw, cat, bd)


def presheaf_to_json(F: Presheaf, with_category: bool = True) -> dict:
    cat = F.cat
    out = {
        "carriers": {c: [jsonable(x) for x in F.carriers[c]] for c in cat.objects},
        "actions": {k: {elem_key(x): jsonable(y) for x, y in F.actions[k].items()}
                    for k in cat.non_identities},
    }
    if with_category:
        out["category"] = category_to_json(cat)
    return out


def nattrans_from_json(raw: dict, F: Presheaf, G: Presheaf) -> NatTrans:
    comps = {}
    for c in F.cat.objects:
        table = raw.get("components", {}).get(c, {})
        keyed = {elem_key(x): x for x in F.carriers[c]}
        comp = {}
        for key, v in table.items():
            if key not in keyed:
                raise NotNatural(f"component at {c} mentions {key!r}, not an element of the source")
            comp[keyed[key]] = _elem(v)
        missing = [x for x in F.carriers[c] if x not in comp]
        if missing:
            raise NotNatural(f"component at {c} is not total")
        comps[c] = comp
    return NatTrans(F, G, comps)


def nattrans_to_json(h: NatTrans) -> dict:
    return {"components": {c: {elem_key(x): jsonable(y) for x, y in comp.items()}
                           for c, comp in h.components.items()}}


def subobject_from_json(selected: dict, F: Presheaf) -> Subpresheaf:
    sel = {}
    for c in F.cat.objects:
        keyed = {elem_key(x): x for x in F.carriers[c]}
        vals = selected.get(c, [])
        chosen = set()
        for v in vals:
            key = elem_key(_elem(v))
            if key not in keyed:
                raise InvalidPresheaf(f"{v!r} is not an element of F({c})")
            chosen.add(keyed[key])
        sel[c] = chosen
    return Subpresheaf(F, sel)


def subobject_to_json(m: Subpresheaf) -> dict:
    return {c: [jsonable(x) for x in m.ambient.carriers[c] if x in m.selected[c]]
            for c in m.ambient.cat.objects}


# -- topologies --------------------------------------------------------------


def topology_from_json(raw: dict, cat: FinCat, label: str = "file") -> TopologyCandidate:
    """Either ``{"map": {obj: [[S, j(S)], ...]}}`` or a transformation file whose
    keys are sieves written as JSON lists of morphism names."""
    Om = omega(cat)
    comps = {}
    for c in cat.objects:
        by_members = {frozenset(s.members): s for s in Om.carriers[c]}

        def sieve(names, c=c):
            key = frozenset(str(n) for n in names)
            if key not in by_members:
                raise NotNatural(f"{sorted(key)} is not a sieve on {c}")
            return by_members[key]

        if "map" in raw:
            pairs = [(sieve(s), sieve(t)) for s, t in raw["map"].get(c, [])]
        else:
            pairs = [(sieve(json.loads(k)), sieve(v))
                     for k, v in raw.get("components", {}).get(c, {}).items()]
        comp = dict(pairs)
        if len(comp) != len(Om.carriers[c]):
            raise NotNatural(f"topology map is not total at {c}")
        comps[c] = comp
    return classify_candidate(NatTrans(Om, Om, comps), label)


def topology_to_json(j: TopologyCandidate) -> dict:
    return j.describe()


def select_topology(selector: str, cat: FinCat) -> list[TopologyCandidate]:
    """``builtin:identity``, ``builtin:maximal``, ``idx:N``, ``all`` or a file path."""
    if selector == "builtin:identity":
        return [identity_topology(cat)]
    if selector == "builtin:maximal":
        return [maximal_topology(cat)]
    if selector == "all":
        return list(enumerate_topologies(cat))
    if selector.startswith("idx:"):
        tops = enumerate_topologies(cat)
        n = int(selector[4:])
        if not 0 <= n < len(tops):
            raise UnknownObject(f"topology index {n} out of range 0..{len(tops) - 1}")
        return [tops[n]]
    raw, _ = _load(selector)
    with _reading("topology"):
        return [topology_from_json(raw, cat, label=Path(selector).stem)]


# -- slice objects -----------------------------------------------------------------


def slice_from_json(raw: dict, cat: FinCat, base_dir: Path | None = None) -> SliceObject:
    B = load_presheaf(raw["base"], cat, base_dir)
    X = load_presheaf(raw["total"], cat, base_dir)
    return SliceObject(X, B, nattrans_from_json(raw["structure"], X, B))


def load_slice(src, cat: FinCat, base_dir: Path | None = None) -> SliceObject:
    raw, bd = _load(src, base_dir)
    with _reading("slice object"):
        return slice_from_json(raw, cat, bd)


def slice_to_json(f: SliceObject) -> dict:
    return {"base": presheaf_to_json(f.base, False), "total": presheaf_to_json(f.total, False),
            "structure": nattrans_to_json(f.structure)}


def write_output(obj: Any, path: str | None) -> str:
    text = dumps(obj)
    if path:
        Path(path).write_text(text, encoding="utf-8")
    return text
