import pytest

from normrel import (
    EquivRelation, NotBournNormalError, StructureError, Subobject,
    canonical_lift, codiscrete, counit_epsilon, counit_epsilon_prime,
    diagonal, enumerate_congruences, enumerate_subobjects, fully_faithful,
    has_null_support, in_N0, is_bourn_normal, is_bourn_normal_to,
    is_cartesian_discrete_fibration, is_discrete_fibration, kernel_pair,
    meet_all, nor, normal_to_witnesses, rel, structure_map,
)
from normrel.catalog import (
    as_gpcirc, bundled_instances, cyclic_group, empty_algebra,
    symmetric_group3,
)


def gpds_instance(name):
    return next(x for x in bundled_instances()["gpds"] if x.name == name)


def sign_relation():
    s3 = symmetric_group3()
    return s3, EquivRelation.from_classes(s3, [[0, 4, 5], [1, 2, 3]])


class TestIsBournNormalTo:
    def test_even_subgroup_of_z4(self):
        z4 = cyclic_group(4)
        n = Subobject(z4, frozenset({0, 2}))
        r = EquivRelation.from_classes(z4, [[0, 2], [1, 3]])
        assert is_bourn_normal_to(n, r)

    def test_identity_against_codiscrete(self, corpus):
        for x in corpus.values():
            if x.size == 0:
                continue
            whole = Subobject(x, frozenset(x.elements))
            assert is_bourn_normal_to(whole, codiscrete(x))

    def test_transposition_against_codiscrete(self):
        s3 = symmetric_group3()
        t = Subobject(s3, frozenset({0, 1}))
        d = is_bourn_normal_to(t, codiscrete(s3))
        assert not d
        assert d.failed_square == "class-cover"
        assert d.witness is not None

    def test_empty_mono_normal_to_everything(self):
        z2 = as_gpcirc(cyclic_group(2), "z2")
        empty = Subobject(z2, frozenset())
        for r in enumerate_congruences(z2):
            assert is_bourn_normal_to(empty, r)

    def test_restriction_square_failure(self):
        # the whole group against the diagonal fails the first square
        z4 = cyclic_group(4)
        d = is_bourn_normal_to(Subobject(z4, frozenset(z4.elements)),
                               diagonal(z4))
        assert not d and d.failed_square == "restriction"


class TestNor:
    def test_sign_kernel_pair_normalizes_to_a3(self):
        s3, sign = sign_relation()
        assert nor(sign).members == {0, 4, 5}

    def test_diagonal_normalizes_to_least_subobject(self):
        s3 = symmetric_group3()
        assert nor(diagonal(s3)).members == {0}
        z2 = as_gpcirc(cyclic_group(2))
        assert nor(diagonal(z2)).members == frozenset()

    def test_codiscrete_on_disconnected_groupoid_is_everything(self):
        disc = gpds_instance("disc_z2z2")
        assert nor(codiscrete(disc)).members == frozenset(disc.elements)

    def test_gpcirc_codiscrete_normalizes_empty(self):
        z2 = as_gpcirc(cyclic_group(2))
        assert nor(codiscrete(z2)).members == frozenset()

    def test_nor_is_bourn_normal_to_its_input(self, corpus):
        for x in corpus.values():
            if x.size > 9:
                continue
            for r in enumerate_congruences(x):
                assert is_bourn_normal_to(nor(r), r)

    def test_nor_domain_has_null_support(self, corpus):
        for x in corpus.values():
            if x.size > 9:
                continue
            for r in enumerate_congruences(x):
                assert has_null_support(nor(r).structure())


class TestRel:
    def test_even_subgroup(self):
        z4 = cyclic_group(4)
        n = Subobject(z4, frozenset({0, 2}))
        proj = structure_map(z4, cyclic_group(2), (0, 1, 0, 1))
        assert rel(n) == kernel_pair(proj)

    def test_trivial_and_full(self):
        s3 = symmetric_group3()
        assert rel(Subobject(s3, frozenset({0}))) == diagonal(s3)
        assert rel(Subobject(s3, frozenset(s3.elements))) == codiscrete(s3)

    def test_transposition_generates_codiscrete(self):
        s3 = symmetric_group3()
        assert rel(Subobject(s3, frozenset({0, 1}))) == codiscrete(s3)

    def test_empty_mono_gives_diagonal(self):
        z2 = as_gpcirc(cyclic_group(2))
        assert rel(Subobject(z2, frozenset())) == diagonal(z2)

    def test_defined_on_non_monos(self):
        z4, z2 = cyclic_group(4), cyclic_group(2)
        proj = structure_map(z4, z2, (0, 1, 0, 1))
        assert rel(proj) == codiscrete(z2)

    def test_faithful_on_bourn_normals(self, corpus):
        # distinct Bourn-normal subobjects keep distinct witness data
        for x in corpus.values():
            if x.size > 9:
                continue
            normals = [s for s in enumerate_subobjects(x) if is_bourn_normal(s)]
            tagged = {(rel(s), s.members) for s in normals}
            assert len(tagged) == len(normals)


class TestIsBournNormal:
    def test_a3(self):
        s3 = symmetric_group3()
        assert is_bourn_normal(Subobject(s3, frozenset({0, 4, 5})))

    def test_transposition_subgroup(self):
        s3 = symmetric_group3()
        d = is_bourn_normal(Subobject(s3, frozenset({0, 1})))
        assert not d
        assert "image is not a class" in d.message

    def test_disconnected_part_of_connected_groupoid(self):
        conn = gpds_instance("conn_z2")
        g = conn.groupoid
        endos = frozenset(a for a in conn.elements if g.src[a] == g.tgt[a])
        assert is_bourn_normal(Subobject(conn, endos))

    def test_agrees_with_cartesian_fibration_formulation(self, corpus):
        for x in corpus.values():
            if x.size > 9:
                continue
            for s in enumerate_subobjects(x):
                assert bool(is_bourn_normal(s)) == \
                    is_cartesian_discrete_fibration(s)

    def test_canonical_lift_properties(self):
        s3 = symmetric_group3()
        a3 = Subobject(s3, frozenset({0, 4, 5}))
        m = canonical_lift(a3)
        assert fully_faithful(m)
        assert is_discrete_fibration(m)


class TestWitnesses:
    def test_a3_unique_witness(self):
        s3, sign = sign_relation()
        assert normal_to_witnesses(Subobject(s3, frozenset({0, 4, 5}))) == [sign]

    def test_empty_mono_two_witnesses(self):
        z2 = as_gpcirc(cyclic_group(2), "z2")
        ws = normal_to_witnesses(Subobject(z2, frozenset()))
        assert len(ws) == 2

    def test_non_normal_has_none(self):
        s3 = symmetric_group3()
        assert normal_to_witnesses(Subobject(s3, frozenset({0, 1}))) == []

    def test_initiality_over_corpus(self, corpus):
        for x in corpus.values():
            if x.size > 9:
                continue
            for s in enumerate_subobjects(x):
                ws = normal_to_witnesses(s)
                if ws:
                    assert rel(s) == meet_all(ws)

    def test_existential_agreement(self, corpus):
        for x in corpus.values():
            if x.size > 9:
                continue
            for s in enumerate_subobjects(x):
                assert bool(is_bourn_normal(s)) == bool(normal_to_witnesses(s))


class TestComparisons:
    def test_epsilon_is_identity_in_groups(self):
        s3 = symmetric_group3()
        eps = counit_epsilon(Subobject(s3, frozenset({0, 4, 5})))
        assert eps.is_iso
        assert eps.composite_members == {0, 4, 5}

    def test_epsilon_on_connected_groupoid_is_strict(self):
        conn = gpds_instance("conn_z2")
        eps = counit_epsilon(Subobject(conn, frozenset(conn.elements)))
        assert not eps.is_iso
        g = conn.groupoid
        assert eps.composite_members == frozenset(
            a for a in conn.elements if g.src[a] == g.tgt[a])

    def test_epsilon_on_gpcirc_is_empty(self):
        z2 = as_gpcirc(cyclic_group(2))
        eps = counit_epsilon(Subobject(z2, frozenset(z2.elements)))
        assert eps.composite_members == frozenset()
        assert not eps.is_iso

    def test_epsilon_requires_bourn_normal(self):
        s3 = symmetric_group3()
        with pytest.raises(NotBournNormalError):
            counit_epsilon(Subobject(s3, frozenset({0, 1})))

    def test_epsilon_prime_equality_in_groups(self, gp_corpus):
        for g in gp_corpus:
            if g.size > 8:
                continue
            for r in enumerate_congruences(g):
                assert counit_epsilon_prime(r).is_iso

    def test_epsilon_prime_strict_on_gpcirc(self):
        z2 = as_gpcirc(cyclic_group(2))
        epr = counit_epsilon_prime(codiscrete(z2))
        assert not epr.is_iso
        assert epr.inner == diagonal(z2)
        assert counit_epsilon_prime(diagonal(z2)).is_iso


class TestN0:
    def test_groups_all_normals_in_n0(self):
        s3 = symmetric_group3()
        for s in enumerate_subobjects(s3):
            if is_bourn_normal(s):
                assert in_N0(s)

    def test_connected_normal_not_in_n0(self):
        conn = gpds_instance("conn_z2")
        whole = Subobject(conn, frozenset(conn.elements))
        assert is_bourn_normal(whole)
        assert not in_N0(whole)
        g = conn.groupoid
        endos = frozenset(a for a in conn.elements if g.src[a] == g.tgt[a])
        assert in_N0(Subobject(conn, endos))

    def test_gpcirc_only_empty(self):
        z2 = as_gpcirc(cyclic_group(2))
        assert in_N0(Subobject(z2, frozenset()))
        assert not in_N0(Subobject(z2, frozenset(z2.elements)))

    def test_empty_structure(self):
        e = empty_algebra()
        assert in_N0(Subobject(e, frozenset()))


def test_mono_coercion_rejects_non_injective():
    z4, z2 = cyclic_group(4), cyclic_group(2)
    proj = structure_map(z4, z2, (0, 1, 0, 1))
    with pytest.raises(StructureError):
        is_bourn_normal_to(proj, diagonal(z2))


def test_structure_map_as_mono_input():
    z4 = cyclic_group(4)
    sub = Subobject(z4, frozenset({0, 2}))
    inc = sub.inclusion()
    assert is_bourn_normal(inc)
    assert rel(inc) == rel(sub)
