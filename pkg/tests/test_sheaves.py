from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from ltopos.errors import NotSeparated
from ltopos.fixtures import builtin, enumerate_presheaves
from ltopos.presheaf import (
    coproduct,
    global_sections,
    initial,
    is_isomorphic,
    mono_image,
    product,
    subpresheaves,
    terminal,
)
from ltopos.sheaves import (
    embed_separated_in_sheaf,
    injective_refutation,
    injectivity,
    is_j_injective,
    is_separated,
    is_sheaf,
    matching_family_oracle,
    omega_j,
    retractions,
    unique_absolute_retract_check,
)
from ltopos.topology import enumerate_topologies, identity_topology, is_dense, maximal_topology

from conftest import finite_set

NAMES = ("C1", "C2", "M2", "Z2")


def fixtures(name, size=2):
    return enumerate_presheaves(builtin(name), size)


def topologies_and_fixtures(size=2):
    return st.sampled_from(NAMES).flatmap(lambda n: st.tuples(
        st.sampled_from(enumerate_topologies(builtin(n))), st.sampled_from(fixtures(n, size))))


def test_identity_makes_everything_a_sheaf():
    for name in NAMES:
        j = identity_topology(builtin(name))
        for F in fixtures(name):
            rep = is_sheaf(F, j)
            assert rep.sheaf and rep.separated and rep.witnesses == []


def test_maximal_sheaves_on_a_point(C1):
    j = maximal_topology(C1)
    for n in range(4):
        rep = is_sheaf(finite_set(n), j)
        assert rep.sheaf == (n == 1)
        assert rep.separated == (n <= 1)
        assert bool(rep.witnesses) == (n != 1)
    assert is_sheaf(finite_set(0), j).witness("sheaf")["extensions"] == 0


@given(topologies_and_fixtures())
def test_report_invariants(case):
    j, F = case
    rep = is_sheaf(F, j, injective=True)
    if rep.sheaf:
        assert rep.separated and rep.j_injective
    assert (rep.witness("separated") is None) == rep.separated
    assert (rep.witness("sheaf") is None) == rep.sheaf
    assert is_separated(F, j).separated == rep.separated


@given(topologies_and_fixtures(), st.data())
def test_products_of_sheaves(case, data):
    j, F = case
    G = data.draw(st.sampled_from(fixtures(j.cat.name)))
    both = is_sheaf(F, j).sheaf and is_sheaf(G, j).sheaf
    P = product(F, G).obj
    if both:
        assert is_sheaf(P, j).sheaf
    if not F.is_empty() and not G.is_empty() and all(F.carriers.values()) and all(G.carriers.values()):
        assert is_sheaf(P, j).sheaf == both


@given(topologies_and_fixtures())
def test_three_oracles_agree(case):
    j, F = case
    rep = is_sheaf(F, j)
    sep, sh = matching_family_oracle(F, j)
    assert (rep.separated, rep.sheaf) == (sep, sh)
    assert unique_absolute_retract_check(F, j, bound=2).holds == rep.sheaf


def test_unique_absolute_retract_examples(C1):
    j = maximal_topology(C1)
    assert unique_absolute_retract_check(finite_set(1), j, 2).holds
    res = unique_absolute_retract_check(finite_set(2), j, 2)
    assert not res.holds and res.witness["retractions"] == 2
    assert res.witness["extension"]["carriers"]["*"][:2] == ["0", "1"]
    for n in range(3):
        assert unique_absolute_retract_check(finite_set(n), identity_topology(C1), 2).holds


def test_injective_examples(C1):
    j = maximal_topology(C1)
    for n in range(4):
        assert is_j_injective(finite_set(n), j) == (n > 0)
    ok, detail = injectivity(finite_set(0), j)
    assert not ok and detail["retraction"] is False
    assert injective_refutation(finite_set(0), j, 1) is not None


@given(topologies_and_fixtures())
def test_injectivity_agrees_with_bounded_extensions(case):
    j, F = case
    inj = is_j_injective(F, j)
    refutation = injective_refutation(F, j, 1)
    if inj:
        assert refutation is None
    if is_sheaf(F, j).sheaf:
        assert inj


def test_injectivity_refutations_found_when_not_injective():
    for name in ("C1", "C2", "M2"):
        for j in enumerate_topologies(builtin(name)):
            for F in fixtures(name, 2):
                if not is_j_injective(F, j):
                    assert injective_refutation(F, j, 2) is not None, (name, j.label, F)


@pytest.mark.parametrize("name", NAMES)
def test_omega_j_is_a_sheaf(name):
    for j in enumerate_topologies(builtin(name)):
        OJ = omega_j(j)
        assert all(j(s) == s for c, s in OJ.presheaf.elements())
        assert is_sheaf(OJ.presheaf, j).sheaf


def test_embedding_examples(C1):
    j = maximal_topology(C1)
    emb = embed_separated_in_sheaf(finite_set(1), j)
    assert emb.sheaf.sizes() == (1,) and emb.inclusion.is_iso()
    emb = embed_separated_in_sheaf(finite_set(0), j)
    assert emb.sheaf.sizes() == (1,)
    with pytest.raises(NotSeparated) as exc:
        embed_separated_in_sheaf(finite_set(2), j)
    assert exc.value.witness["stage"] == "*"
    for n in range(3):
        emb = embed_separated_in_sheaf(finite_set(n), identity_topology(C1))
        assert emb.inclusion.is_iso()


@given(topologies_and_fixtures())
def test_embedding_is_a_dense_mono_into_a_sheaf(case):
    j, F = case
    if not is_sheaf(F, j).separated:
        with pytest.raises(NotSeparated):
            embed_separated_in_sheaf(F, j)
        return
    emb = embed_separated_in_sheaf(F, j)
    assert emb.inclusion.is_mono()
    assert is_dense(mono_image(emb.inclusion), j)
    assert is_sheaf(emb.sheaf, j).sheaf
    if is_sheaf(F, j).sheaf:
        assert is_isomorphic(emb.sheaf, F)


@given(topologies_and_fixtures())
def test_retracts_and_subobjects_of_sheaves(case):
    j, F = case
    if not is_sheaf(F, j).sheaf:
        return
    for m in subpresheaves(F):
        A = m.presheaf
        assert is_sheaf(A, j).separated
        if retractions(m, limit=1):
            assert is_sheaf(A, j).sheaf


@pytest.mark.parametrize("name", NAMES)
def test_global_sections_under_maximal(name):
    j = maximal_topology(builtin(name))
    for F in fixtures(name):
        if is_sheaf(F, j).sheaf:
            assert len(global_sections(F)) == 1
        if is_j_injective(F, j):
            assert len(global_sections(F)) >= 1


@pytest.mark.parametrize("name", NAMES)
def test_adding_a_point_to_a_sheaf_is_not_dense(name):
    cat = builtin(name)
    one = terminal(cat)
    for j in enumerate_topologies(cat):
        if j.is_maximal:
            continue
        for G in fixtures(name):
            if not is_sheaf(G, j).sheaf:
                continue
            S = coproduct(G, one)
            assert not is_dense(mono_image(S.legs[0]), j)


def test_initial_object_is_a_sheaf_iff_no_empty_cover(C2):
    from ltopos.fincat import Sieve, maximal_sieve

    zero = initial(C2)
    for j in enumerate_topologies(C2):
        empty_covers = any(j(Sieve(c, frozenset())) == maximal_sieve(C2, c) for c in C2.objects)
        assert is_sheaf(zero, j).sheaf == (not empty_covers)
