from __future__ import annotations

from hypothesis import given, strategies as st

from ltopos.fincat import MonoidPresentation, monoid_as_category
from ltopos.fixtures import builtin, enumerate_presheaves
from ltopos.presheaf import (
    NatTrans,
    Subpresheaf,
    bang,
    constant_presheaf,
    identity,
    initial,
    is_isomorphic,
    iter_homs,
    omega,
    product,
    subpresheaves,
    terminal,
)
from ltopos.sheaves import is_sheaf
from ltopos.slice import (
    SliceObject,
    SliceTopology,
    adjunction_bijection,
    check_slice_topology,
    constant_sections_iso,
    graph,
    group_exponential_formula,
    induced_topology,
    is_section,
    monoid_sections_formula,
    pullback_functor,
    pullback_subobject,
    sections_object,
    slice_closure,
    slice_morphisms,
    slice_sheaf_check,
    terminal_slice,
    transport,
    transport_topology,
    triangle_identities,
)
from ltopos.topology import closure, enumerate_topologies, identity_topology, maximal_topology

from conftest import finite_set

NAMES = ("C1", "C2", "M2", "Z2")


def fixtures(name, size=2):
    return enumerate_presheaves(builtin(name), size)


def slice_objects(name, size=2):
    out = []
    pool = fixtures(name, size)
    for B in pool:
        for X in pool:
            out.extend(SliceObject.of(f) for f in iter_homs(X, B))
    return out


def slice_cases(names=NAMES, size=2):
    return st.sampled_from(names).flatmap(lambda n: st.tuples(
        st.sampled_from(enumerate_topologies(builtin(n))), st.sampled_from(slice_objects(n, size))))


# -- induced topology ------------------------------------------------------


def test_induced_over_terminal_is_j():
    for name in NAMES:
        cat = builtin(name)
        one = terminal(cat)
        for j in enumerate_topologies(cat):
            jB = induced_topology(j, one)
            assert all(jB.value(s, "*") == j(s) for c, s in omega(cat).elements())
            jt = transport_topology(jB)
            assert jt.is_topology and (jt.is_identity, jt.is_maximal) == (j.is_identity, j.is_maximal)


def test_induced_examples(C1):
    two = finite_set(2)
    assert check_slice_topology(induced_topology(identity_topology(C1), two))
    jB = induced_topology(maximal_topology(C1), two)
    Om = omega(C1)
    assert all(t == Om.top("*") for t in jB.l.components["*"].values())


def test_mutated_l_fails(C1):
    two = finite_set(2)
    jB = induced_topology(identity_topology(C1), two)
    Om = omega(C1)
    comps = {c: dict(v) for c, v in jB.l.components.items()}
    comps["*"][(Om.top("*"), 0)] = Om.bottom("*")
    bad = SliceTopology(two, NatTrans(jB.l.source, Om, comps, check=False))
    assert not check_slice_topology(bad)


@given(st.sampled_from(NAMES), st.data())
def test_induced_topologies_satisfy_conditions(name, data):
    cat = builtin(name)
    j = data.draw(st.sampled_from(enumerate_topologies(cat)))
    B = data.draw(st.sampled_from(fixtures(name, 3)))
    jB = induced_topology(j, B)
    assert check_slice_topology(jB)
    assert transport_topology(jB).is_topology or not any(B.carriers.values())


# -- pullback functor ------------------------------------------------------


@given(st.sampled_from(NAMES), st.data())
def test_pullback_functor_basics(name, data):
    cat = builtin(name)
    B = data.draw(st.sampled_from(fixtures(name)))
    A = data.draw(st.sampled_from(fixtures(name)))
    PB1 = pullback_functor(terminal(cat), B)
    assert PB1.structure.is_iso()
    assert is_isomorphic(pullback_functor(A, terminal(cat)).total, A)
    for m in subpresheaves(A):
        h = pullback_functor(m.inclusion(), B)
        assert not h.violations() and h.is_mono()
        assert pullback_subobject(m, B).size() == h.map.source.size()
    g = data.draw(st.sampled_from(fixtures(name)))
    for f in list(iter_homs(A, g))[:3]:
        for k in list(iter_homs(g, A))[:3]:
            lhs = pullback_functor(k @ f, B).map
            rhs = pullback_functor(k, B).map @ pullback_functor(f, B).map
            assert lhs == rhs
    assert pullback_functor(identity(A), B).map == identity(product(A, B).obj)


def test_slice_closure_examples(C2):
    for F in fixtures("C2"):
        for B in fixtures("C2")[:4]:
            g = pullback_functor(F, B)
            for m in subpresheaves(F):
                k = pullback_subobject(m, B)
                assert slice_closure(k, g, induced_topology(identity_topology(C2), B)) == k
                assert slice_closure(k, g, induced_topology(maximal_topology(C2), B)).is_whole()
                for j in enumerate_topologies(C2):
                    assert slice_closure(k, g, induced_topology(j, B)) == closure(k, j)


# -- sections --------------------------------------------------------------


@given(st.sampled_from(NAMES), st.data())
def test_sections_of_identity_is_terminal(name, data):
    B = data.draw(st.sampled_from(fixtures(name)))
    S = sections_object(terminal_slice(B)).presheaf
    assert is_isomorphic(S, terminal(B.cat))


def test_constant_base_sections(C2):
    for n in range(3):
        A = list(range(n))
        F = constant_presheaf(C2, A)
        for G in fixtures("C2"):
            for alpha in iter_homs(G, F):
                r = constant_sections_iso(alpha, A)
                assert r == {"bijective": True, "natural": True}


def test_monoid_formula_on_idempotent_monoid(M2):
    elems = list(M2.morphisms)
    mult = {(m, n): M2.compose(m, n) for m in elems for n in elems}
    for f in slice_objects("M2"):
        assert monoid_sections_formula(f, mult, elems)["equal"]


def _right_zero_monoid():
    els = ("1", "a", "b")
    mult = {}
    for x in els:
        for y in els:
            mult[(x, y)] = y if x == "1" else (x if y == "1" else y)
    return monoid_as_category(MonoidPresentation(els, "1", mult), name="R3")


def test_monoid_formula_needs_the_right_order():
    cat = _right_zero_monoid()
    assert cat.compose("a", "b") != cat.compose("b", "a")
    elems = list(cat.morphisms)
    right = {(m, n): cat.compose(m, n) for m in elems for n in elems}
    swapped = {(m, n): cat.compose(n, m) for m in elems for n in elems}
    pool = enumerate_presheaves(cat, 3)
    total = swapped_failures = 0
    for B in pool:
        for X in pool:
            for f in iter_homs(X, B):
                so = SliceObject.of(f)
                total += 1
                assert monoid_sections_formula(so, right, elems)["equal"]
                swapped_failures += not monoid_sections_formula(so, swapped, elems)["equal"]
    assert (total, swapped_failures) == (213, 8)


def test_group_formula(Z2):
    inv = {"1": "1", "g": "g"}
    for X in fixtures("Z2", 3):
        for B in fixtures("Z2", 3):
            assert group_exponential_formula(X, B, inv) == {"bijective": True, "action": True}


@given(slice_cases(names=("C1", "C2", "M2")))
def test_adjunction(case):
    _j, f = case
    A = f.total
    assert triangle_identities(A, f) == {"counit_after_unit": True, "sections_after_unit": True}
    assert adjunction_bijection(A, f)["bijective"]


# -- graphs and slice sheaves ----------------------------------------------


def test_graph_examples(C1):
    for B in fixtures("C2"):
        assert is_section(graph(terminal_slice(B)))
        subterminal = all(len(B.carriers[c]) <= 1 for c in B.cat.objects)
        assert graph(terminal_slice(B)).map.is_iso() == subterminal
    two, one = finite_set(2), finite_set(1)
    f = SliceObject.of(NatTrans(two, one, {"*": {0: 0, 1: 0}}))
    assert is_section(graph(f))
    assert is_section(graph(SliceObject.of(bang(initial(C1)))))


@given(slice_cases())
def test_slice_morphisms_commute(case):
    _j, f = case
    for h in slice_morphisms(f, f):
        assert not h.violations()


def test_identity_topology_every_slice_object_is_a_sheaf():
    for name in NAMES:
        cat = builtin(name)
        j = identity_topology(cat)
        for f in slice_objects(name)[:40]:
            assert slice_sheaf_check(f, induced_topology(j, f.base)).sheaf


@given(slice_cases(names=("C1", "M2")))
def test_graph_section_and_sheaf_of_sections_give_a_sheaf(case):
    j, f = case
    jB = induced_topology(j, f.base)
    sheaf = slice_sheaf_check(f, jB).sheaf
    if is_section(graph(f)) and is_sheaf(sections_object(f).presheaf, j).sheaf:
        assert sheaf
    if sheaf:
        assert is_sheaf(sections_object(f).presheaf, j).sheaf
        if j.is_maximal:
            assert is_section(graph(f))


@given(slice_cases())
def test_separated_slice_matches_transport(case):
    j, f = case
    jB = induced_topology(j, f.base)
    rep = slice_sheaf_check(f, jB)
    trep = is_sheaf(transport(f), transport_topology(jB))
    assert (rep.separated, rep.sheaf) == (trep.separated, trep.sheaf)


@given(st.sampled_from(NAMES), st.data())
def test_pullback_preserves_and_reflects_over_well_supported_bases(name, data):
    cat = builtin(name)
    j = data.draw(st.sampled_from(enumerate_topologies(cat)))
    B = data.draw(st.sampled_from([B for B in fixtures(name, 3) if B.is_well_supported()]))
    jB = induced_topology(j, B)
    F = data.draw(st.sampled_from(fixtures(name)))
    for m in subpresheaves(F):
        k = pullback_subobject(m, B)
        cl = slice_closure(k, pullback_functor(F, B), jB)
        assert cl.is_whole() == closure(m, j).is_whole()
        assert (cl == k) == (closure(m, j) == m)
    rep, srep = is_sheaf(F, j), slice_sheaf_check(pullback_functor(F, B), jB)
    assert (rep.sheaf, rep.separated) == (srep.sheaf, srep.separated)


def test_reflection_breaks_over_the_empty_base(C1):
    zero = initial(C1)
    j = identity_topology(C1)
    jB = induced_topology(j, zero)
    F = finite_set(2)
    m = Subpresheaf.empty(F)
    assert not closure(m, j).is_whole()
    k = pullback_subobject(m, zero)
    assert slice_closure(k, pullback_functor(F, zero), jB).is_whole()


def test_constant_base_fiber_criteria():
    from ltopos.suites import _constant_base_props

    for name in ("C1", "C2", "M2"):
        res = _constant_base_props(builtin(name), 2)
        assert res["checked"] > 0 and res["violations"] == 0
