from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from ltopos.errors import CodomainMismatch, InvalidCategory, UnknownObject
from ltopos.fincat import (
    MonoidPresentation,
    Sieve,
    category_of_elements,
    maximal_sieve,
    monoid_as_category,
    pullback_sieve,
    sieves_on,
    validate_category,
)
from ltopos.fixtures import BUILTIN_CATEGORIES, builtin, enumerate_presheaves
from ltopos.presheaf import initial, terminal

from conftest import finite_set

cats = st.sampled_from(BUILTIN_CATEGORIES).map(builtin)

C2_RAW = {
    "objects": ["a", "b"],
    "morphisms": [{"name": "id_a", "dom": "a", "cod": "a"},
                  {"name": "id_b", "dom": "b", "cod": "b"},
                  {"name": "u", "dom": "a", "cod": "b"}],
    "identities": {"a": "id_a", "b": "id_b"},
    "composition": [],
}


def test_terminal_and_walking_arrow_validate():
    assert len(builtin("C1").morphisms) == 1
    C2 = validate_category(C2_RAW)
    assert C2.objects == ("a", "b")
    assert C2.compose("u", "id_a") == "u"
    assert C2.compose("id_b", "u") == "u"


def test_bad_identity_composite_is_reported():
    raw = dict(C2_RAW, composition=[["id_b", "u", "id_a"]])
    with pytest.raises(InvalidCategory) as exc:
        validate_category(raw)
    kinds = {v.kind for v in exc.value.violations}
    assert kinds & {"IdentityLawFailure", "IllTypedComposite", "AssociativityFailure"}


def test_missing_identity_and_unknown_names():
    raw = dict(C2_RAW, identities={"a": "id_a"})
    with pytest.raises(InvalidCategory) as exc:
        validate_category(raw)
    assert exc.value.violations[0].kind == "MissingIdentity"
    raw = dict(C2_RAW, morphisms=C2_RAW["morphisms"] + [{"name": "v", "dom": "a", "cod": "z"}])
    with pytest.raises(InvalidCategory):
        validate_category(raw)


def test_composition_must_be_total():
    raw = {
        "objects": ["*"],
        "morphisms": [{"name": "1", "dom": "*", "cod": "*"}, {"name": "e", "dom": "*", "cod": "*"}],
        "identities": {"*": "1"},
        "composition": [],
    }
    with pytest.raises(InvalidCategory) as exc:
        validate_category(raw)
    assert exc.value.violations[0].kind == "CompositionNotTotal"
    assert exc.value.violations[0].where == ("e", "e")


def test_associativity_failure_names_the_triple():
    # e.e = f, e.f = e, f.e = f, f.f = f  gives (ee)e = fe = f but e(ee) = ef = e
    raw = {
        "objects": ["*"],
        "morphisms": [{"name": n, "dom": "*", "cod": "*"} for n in ("1", "e", "f")],
        "identities": {"*": "1"},
        "composition": [["e", "e", "f"], ["e", "f", "e"], ["f", "e", "f"], ["f", "f", "f"]],
    }
    with pytest.raises(InvalidCategory) as exc:
        validate_category(raw)
    fails = [v for v in exc.value.violations if v.kind == "AssociativityFailure"]
    assert fails and all(len(v.where) == 3 for v in fails)


def test_monoids_as_categories():
    trivial = monoid_as_category(MonoidPresentation(("1",), "1", {("1", "1"): "1"}))
    assert len(trivial.objects) == 1 and len(trivial.morphisms) == 1
    M2, Z2 = builtin("M2"), builtin("Z2")
    assert M2.morphisms == ("1", "e") and M2.compose("e", "e") == "e"
    assert Z2.compose("g", "g") == "1"
    bad = MonoidPresentation(("1", "e"), "1", {("1", "1"): "1", ("1", "e"): "e", ("e", "1"): "1",
                                              ("e", "e"): "e"})
    with pytest.raises(InvalidCategory):
        monoid_as_category(bad)


def test_sieve_counts():
    C1, C2, M2 = builtin("C1"), builtin("C2"), builtin("M2")
    assert [s.members for s in sieves_on(C1, "*")] == [frozenset(), frozenset({"id"})]
    assert [sorted(s.members) for s in sieves_on(C2, "b")] == [[], ["u"], ["id_b", "u"]]
    assert [sorted(s.members) for s in sieves_on(M2, "*")] == [[], ["e"], ["1", "e"]]
    with pytest.raises(UnknownObject):
        sieves_on(C1, "zz")


def test_pullback_sieve_examples():
    C2 = builtin("C2")
    assert pullback_sieve(C2, Sieve("b", frozenset({"u"})), "u") == maximal_sieve(C2, "a")
    assert pullback_sieve(C2, Sieve("b", frozenset()), "u").members == frozenset()
    with pytest.raises(CodomainMismatch):
        pullback_sieve(C2, Sieve("a", frozenset()), "u")


@given(cats)
def test_composition_laws(cat):
    for f in cat.morphisms:
        assert cat.compose(cat.identity[cat.cod[f]], f) == f
        assert cat.compose(f, cat.identity[cat.dom[f]]) == f
        for g in cat.morphisms:
            if cat.cod[f] != cat.dom[g]:
                continue
            gf = cat.compose(g, f)
            assert (cat.dom[gf], cat.cod[gf]) == (cat.dom[f], cat.cod[g])
            for h in cat.morphisms:
                if cat.cod[g] == cat.dom[h]:
                    assert cat.compose(h, gf) == cat.compose(cat.compose(h, g), f)


@given(cats)
def test_sieves_are_closed_and_stable(cat):
    for c in cat.objects:
        ss = sieves_on(cat, c)
        assert ss[0].members == frozenset() and maximal_sieve(cat, c) in ss
        for s in ss:
            for f in s.members:
                for g in cat.into(cat.dom[f]):
                    assert cat.compose(f, g) in s.members
            for h in cat.into(c):
                assert pullback_sieve(cat, s, h) in sieves_on(cat, cat.dom[h])


@given(cats)
def test_elements_of_terminal_is_the_category(cat):
    el = category_of_elements(cat, terminal(cat))
    assert len(el.cat.objects) == len(cat.objects)
    assert len(el.cat.morphisms) == len(cat.morphisms)
    for (g, f), gf in cat.table.items():
        assert el.cat.compose(el.lift[(g, "*")], el.lift[(f, "*")]) == el.lift[(gf, "*")]


def test_elements_of_empty_and_two_point():
    C1 = builtin("C1")
    assert category_of_elements(C1, initial(C1)).cat.objects == ()
    el = category_of_elements(C1, finite_set(2))
    assert len(el.cat.objects) == 2 and len(el.cat.morphisms) == 2


@given(cats, st.integers(0, 3))
def test_elements_hom_sets_match_action(cat, idx):
    Bs = enumerate_presheaves(cat, 2)
    B = Bs[idx % len(Bs)]
    el = category_of_elements(cat, B)
    for name, (k, b) in el.arrow.items():
        d, bd = el.point[el.cat.dom[name]]
        assert bd == B.act(k, b) and d == cat.dom[k]
