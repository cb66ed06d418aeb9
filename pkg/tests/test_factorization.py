from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from ltopos.errors import NotSeparated
from ltopos.factorization import (
    STATEMENTS,
    MorphismClassSpec,
    factor_through_sheaf,
    factorization_suite,
    find_factorization,
    is_left_cancelable,
    is_right_orthogonal,
    mono_factorization_suite,
    nonseparated_witness,
    perp_membership,
    slice_perp_check,
    slice_perp_membership,
)
from ltopos.fixtures import builtin, enumerate_presheaves
from ltopos.presheaf import NatTrans, bang, identity, iter_homs, subpresheaves
from ltopos.sheaves import dense_extensions, is_sheaf
from ltopos.slice import SliceMorphism, pullback_functor, terminal_slice
from ltopos.topology import enumerate_topologies, identity_topology, is_dense, maximal_topology

from conftest import finite_set

NAMES = ("C1", "C2", "M2", "Z2")


def fixtures(name, size=2):
    return enumerate_presheaves(builtin(name), size)


def cases(size=2):
    return st.sampled_from(NAMES).flatmap(lambda n: st.tuples(
        st.sampled_from(enumerate_topologies(builtin(n))), st.sampled_from(fixtures(n, size))))


def point_in_two():
    return NatTrans(finite_set(1), finite_set(2), {"*": {0: 0}})


# -- orthogonality -----------------------------------------------------------


def test_isos_are_orthogonal_to_everything(C2):
    for F in fixtures("C2"):
        for m in subpresheaves(F):
            assert is_right_orthogonal(identity(F), m.inclusion()).holds


def test_everything_is_orthogonal_to_isos(C2):
    for A in fixtures("C2"):
        for B in fixtures("C2"):
            for g in list(iter_homs(A, B))[:3]:
                assert is_right_orthogonal(g, identity(A)).holds


def test_two_diagonals_witness(C1):
    g = bang(finite_set(2))
    res = is_right_orthogonal(g, point_in_two())
    assert not res.holds and res.witness["diagonals"] == 2
    res = perp_membership(g, maximal_topology(C1))
    assert not res.holds and res.witness["diagonals"] == 2


def test_sheaves_map_to_terminal_in_perp():
    for name in NAMES:
        for j in enumerate_topologies(builtin(name)):
            for F in fixtures(name):
                rep = is_sheaf(F, j)
                res = perp_membership(bang(F), j)
                assert res.holds == rep.sheaf
                if not rep.separated:
                    assert res.witness["diagonals"] >= 2


@given(cases(), st.data())
def test_generator_test_agrees_with_all_dense_monos(case, data):
    j, F = case
    B = data.draw(st.sampled_from(fixtures(j.cat.name)))
    for g in list(iter_homs(F, B))[:4]:
        fast = perp_membership(g, j).holds
        slow = all(is_right_orthogonal(g, m.inclusion()).holds
                   for X in fixtures(j.cat.name) for m in subpresheaves(X) if is_dense(m, j))
        if fast:
            assert slow
        ext = all(is_right_orthogonal(g, inner.inclusion()).holds
                  for X in fixtures(j.cat.name, 1) for _G, inner in dense_extensions(X, j, 1))
        if fast:
            assert ext


def test_bounded_cross_check_runs(C2):
    for j in enumerate_topologies(C2):
        cls = MorphismClassSpec("dense_monos", j, bound=1)
        for F in fixtures("C2", 1):
            res = perp_membership(bang(F), cls)
            assert res.cross_checked > 0


def test_projection_from_sheaf_is_slice_perp():
    for name in ("C1", "C2", "M2"):
        cat = builtin(name)
        for j in enumerate_topologies(cat):
            for B in fixtures(name)[:5]:
                for F in fixtures(name):
                    if not is_sheaf(F, j).sheaf:
                        continue
                    src = pullback_functor(F, B)
                    h = SliceMorphism(src, terminal_slice(B), src.structure)
                    assert slice_perp_membership(h, j).holds


@pytest.mark.parametrize("name", NAMES)
def test_slice_perp_lies_in_perp(name):
    cat = builtin(name)
    for j in enumerate_topologies(cat):
        for B in fixtures(name, 1):
            res = slice_perp_check(cat, j, B, bound=1)
            assert res["violations"] == 0


# -- left cancelability ------------------------------------------------------


def test_all_monos_are_left_cancelable():
    for name in NAMES:
        cat = builtin(name)
        res = is_left_cancelable(MorphismClassSpec("dense_monos", maximal_topology(cat)), cat, 2)
        assert res.holds and res.pairs > 0


def test_isos_are_not_left_cancelable(C1):
    res = is_left_cancelable(MorphismClassSpec("dense_monos", identity_topology(C1)), C1, 2)
    assert not res.holds
    # g f = id on a point while f: 1 -> 2 is a non-iso mono
    assert res.witness["f_source"]["carriers"]["*"] == ["0"]
    assert len(res.witness["f_target"]["carriers"]["*"]) == 2


def test_truncated_class_is_not_left_cancelable(C1):
    def truncated(f):
        # every mono except the swap of a two-element set
        swap = f.source.sizes() == (2,) and f.components["*"] == {0: 1, 1: 0}
        return f.is_mono() and not swap

    cls = MorphismClassSpec("custom", predicate=truncated, name="monos without the swap")
    res = is_left_cancelable(cls, C1, 2)
    assert not res.holds
    assert res.witness["f"]["*"] == [[0, 1], [1, 0]]


# -- factorizations ----------------------------------------------------------


def test_identity_topology_factors_trivially(C2):
    j = identity_topology(C2)
    for A in fixtures("C2"):
        for B in fixtures("C2"):
            for f in iter_homs(A, B):
                fac = find_factorization(f, j, 0)
                assert fac is not None and fac.valid
                assert fac.second @ fac.first == f


def test_factor_through_singleton_sheaf(C1):
    j = maximal_topology(C1)
    f = NatTrans(finite_set(1), finite_set(2), {"*": {0: 1}})
    fac = factor_through_sheaf(f, j)
    assert fac.valid and fac.second @ fac.first == f
    assert fac.middle.sizes() == (2,)
    with pytest.raises(NotSeparated):
        factor_through_sheaf(bang(finite_set(2)), j)


@given(cases())
def test_sheaf_domain_factorization(case):
    j, A = case
    if not is_sheaf(A, j).sheaf:
        return
    for B in fixtures(j.cat.name):
        for f in list(iter_homs(A, B))[:3]:
            fac = factor_through_sheaf(f, j)
            assert fac.second @ fac.first == f and fac.second_in_class
            assert fac.first.is_mono()
            if fac.first_in_class:
                assert not j.is_identity or fac.first.is_iso()
            found = find_factorization(f, j)
            if found is not None:
                assert found.valid and found.second @ found.first == f
            elif j.is_identity:
                pytest.fail("the identity topology always factors")


# -- the equivalence suite ---------------------------------------------------


def test_nonseparated_witness():
    for name in NAMES:
        for j in enumerate_topologies(builtin(name)):
            res = nonseparated_witness(j)
            if j.is_identity:
                assert res is None
            else:
                W, info = res
                assert not is_sheaf(W, j).separated
                assert set(info) >= {"stage", "sieve", "closure", "object"}


def test_identity_suite_all_true():
    for name in NAMES:
        rep = factorization_suite(builtin(name), identity_topology(builtin(name)))
        assert set(rep.statements) == set(STATEMENTS)
        assert all(v is True for v in rep.verdicts().values()) and rep.consistent
        assert all(s["mode"] == "exact" for s in rep.statements.values())


def test_maximal_suite_on_a_point(C1):
    rep = factorization_suite(C1, maximal_topology(C1))
    verdicts = rep.verdicts()
    assert verdicts["all_sheaves"] is False and verdicts["all_separated"] is False
    assert rep.statements["all_sheaves"]["witness"]["object"]["carriers"]["*"]
    assert rep.statements["all_separated"]["witness"]["separated"] is False
    assert rep.consistent
    assert rep.hypothesis["left_cancelable"]["holds"] is True
    cor = mono_factorization_suite(C1)
    assert cor.consistent and cor.topology == "maximal (all monos)"


@pytest.mark.parametrize("name", NAMES)
def test_suite_consistent_everywhere(name):
    cat = builtin(name)
    for j in enumerate_topologies(cat):
        rep = factorization_suite(cat, j)
        assert rep.consistent
        expected = j.is_identity
        assert all(v is expected for v in rep.verdicts().values())
        out = rep.to_json()
        assert out["consistent"] and set(out["statements"]) == set(STATEMENTS)
