import pytest

import oracles
from normrel import (
    GP, GPCIRC, GPDS,
    ParseError, StructureError, Subobject,
    are_isomorphic, canonical_final_map, dump_structure, enumerate_subobjects,
    final_kernel, has_null_support, is_mono, kernel, load_structure,
    product_in_context, quotient, structure_map, subalgebra_closure,
    unit_element, validate_structure,
)
from normrel.relations import EquivRelation, codiscrete, diagonal
from normrel.catalog import (
    as_gpcirc, bundled_instances, cyclic_group, dihedral_group, empty_algebra,
    groupoid_from_components, indiscrete_groupoid, klein_group,
    quaternion_group, symmetric_group3,
)

Z4_DOC = """\
# the cyclic group of order 4
context gp
carrier 4
op mul 2
0 1 2 3
1 2 3 0
2 3 0 1
3 0 1 2
op inv 1
0 3 2 1
"""


def gpds_instance(name):
    return next(x for x in bundled_instances()["gpds"] if x.name == name)


class TestLoad:
    def test_z4_document(self):
        x = load_structure(Z4_DOC)
        assert x.context == GP
        assert x.size == 4
        assert x.apply("mul", 1, 3) == 0
        assert validate_structure(x).ok

    def test_empty_gpcirc_document(self):
        x = load_structure("context gpcirc\ncarrier 0\n")
        assert x.context == GPCIRC
        assert x.size == 0
        assert validate_structure(x).ok

    def test_malformed_row_is_parse_error(self):
        bad = Z4_DOC.replace("1 2 3 0", "1 2 3")
        with pytest.raises(ParseError) as err:
            load_structure(bad)
        assert "expected 4" in str(err.value)

    def test_out_of_range_entry(self):
        bad = Z4_DOC.replace("0 3 2 1", "0 3 2 9")
        with pytest.raises(ParseError):
            load_structure(bad)

    def test_missing_operation(self):
        with pytest.raises(ParseError):
            load_structure("context gp\ncarrier 1\nop mul 2\n0\n")

    def test_gpds_document_roundtrip(self):
        x = gpds_instance("conn_z2")
        assert load_structure(dump_structure(x)) == x

    def test_roundtrip_whole_corpus(self, corpus):
        for x in corpus.values():
            assert load_structure(dump_structure(x)) == x


class TestValidate:
    def test_known_groups_are_ok(self, gp_corpus):
        for g in gp_corpus:
            assert validate_structure(g).ok

    def test_corrupted_mul_entry(self):
        x = load_structure(Z4_DOC.replace("1 2 3 0", "1 2 3 1"))
        report = validate_structure(x)
        assert not report.ok
        axioms = {v.axiom for v in report.violations}
        assert axioms & {"associativity", "identity", "inverse"}
        assert all(isinstance(v.witness, tuple) for v in report.violations)

    def test_groupoid_with_bad_identity(self):
        x = gpds_instance("pair2")
        # point object 1's identity at a non-endo arrow
        g = x.groupoid
        broken = x.__class__(x.context, x.size, x.ops,
                             g.__class__(g.n_objects, g.src, g.tgt,
                                         (g.identities[0], 1)),
                             name="broken")
        report = validate_structure(broken)
        assert not report.ok
        assert any(v.axiom == "identity-missing" and v.witness == (1,)
                   for v in report.violations)

    def test_nonempty_gpcirc_agrees_with_gp(self, gp_corpus):
        # nonempty models of the extended variety are exactly the groups
        for g in gp_corpus:
            if g.size <= 6:
                assert validate_structure(as_gpcirc(g)).ok
        bad = load_structure(Z4_DOC.replace("1 2 3 0", "1 2 3 1"))
        assert not validate_structure(as_gpcirc(bad)).ok

    def test_empty_gp_is_invalid(self):
        x = load_structure("context gp\ncarrier 0\n")
        report = validate_structure(x)
        assert any(v.axiom == "carrier-nonempty" for v in report.violations)


class TestMaps:
    def test_inclusion_is_mono(self):
        z4 = cyclic_group(4)
        sub = Subobject(z4, frozenset({0, 2}))
        assert is_mono(sub.inclusion())

    def test_projection_is_not_mono(self):
        z4, z2 = cyclic_group(4), cyclic_group(2)
        proj = structure_map(z4, z2, (0, 1, 0, 1))
        assert not is_mono(proj)

    def test_empty_map_is_mono(self):
        empty = empty_algebra()
        z2 = as_gpcirc(cyclic_group(2))
        f = structure_map(empty, z2, ())
        assert is_mono(f)

    def test_non_homomorphism_rejected(self):
        z4, z2 = cyclic_group(4), cyclic_group(2)
        with pytest.raises(StructureError):
            structure_map(z4, z2, (0, 0, 1, 0))


class TestKernel:
    def test_mod2_kernel(self):
        z4, z2 = cyclic_group(4), cyclic_group(2)
        proj = structure_map(z4, z2, (0, 1, 0, 1))
        assert kernel(proj).members == {0, 2}

    def test_groupoid_collapse_kernel(self):
        conn = gpds_instance("conn_z2")
        pair2 = indiscrete_groupoid(2)
        # collapse every vertex group: send (s,t,g) to the unique arrow s->t
        mapping = []
        for a in conn.elements:
            s, t = conn.groupoid.src[a], conn.groupoid.tgt[a]
            b = next(x for x in pair2.elements
                     if pair2.groupoid.src[x] == s and pair2.groupoid.tgt[x] == t)
            mapping.append(b)
        f = structure_map(conn, pair2, mapping)
        expected = frozenset(a for a in conn.elements
                             if conn.groupoid.src[a] == conn.groupoid.tgt[a])
        assert kernel(f).members == expected

    def test_gpcirc_kernel_is_empty(self):
        z2 = as_gpcirc(cyclic_group(2))
        assert kernel(structure_map(z2, z2, (0, 1))).members == frozenset()

    def test_kernel_domain_has_null_support(self, corpus):
        for x in corpus.values():
            k = final_kernel(x)
            assert has_null_support(k.structure())


class TestFinalKernel:
    def test_gp_final_kernel_is_everything(self):
        z4 = cyclic_group(4)
        assert final_kernel(z4).members == frozenset(z4.elements)

    def test_gpds_final_kernel_is_endo_part(self):
        conn = gpds_instance("conn_z2")
        g = conn.groupoid
        expected = frozenset(a for a in conn.elements if g.src[a] == g.tgt[a])
        assert final_kernel(conn).members == expected

    def test_gpcirc_final_kernel_is_empty(self):
        z2 = as_gpcirc(cyclic_group(2))
        assert final_kernel(z2).members == frozenset()

    def test_matches_kernel_of_final_map(self, corpus):
        for x in corpus.values():
            assert final_kernel(x).members == kernel(canonical_final_map(x)).members


class TestQuotient:
    def test_z4_mod_two_classes(self):
        z4 = cyclic_group(4)
        r = EquivRelation.from_classes(z4, [[0, 2], [1, 3]])
        q, proj = quotient(z4, r)
        assert q.size == 2
        assert are_isomorphic(q, cyclic_group(2))
        assert set(proj.mapping) == {0, 1}

    def test_quotient_by_diagonal(self):
        s3 = symmetric_group3()
        q, _ = quotient(s3, diagonal(s3))
        assert are_isomorphic(q, s3)

    def test_quotient_by_codiscrete(self):
        s3 = symmetric_group3()
        q, _ = quotient(s3, codiscrete(s3))
        assert q.size == 1

    def test_incompatible_partition_rejected(self):
        z4 = cyclic_group(4)
        bad = EquivRelation.from_classes(z4, [[0, 1]])
        with pytest.raises(StructureError):
            quotient(z4, bad)

    def test_groupoid_quotient(self):
        conn = gpds_instance("conn_z2")
        q, proj = quotient(conn, codiscrete(conn))
        assert validate_structure(q).ok
        assert q.size == 4  # one arrow per hom-set
        assert are_isomorphic(q, indiscrete_groupoid(2))
        assert proj.codomain == q


class TestProduct:
    def test_group_square(self):
        prod, p1, p2 = product_in_context(cyclic_group(4))
        assert prod.size == 16
        assert validate_structure(prod).ok
        assert p1.mapping[7] == 1 and p2.mapping[7] == 3

    def test_groupoid_square_is_parallel_pairs(self):
        disc = gpds_instance("disc_z2z2")
        prod, p1, p2 = product_in_context(disc)
        assert prod.size == 8  # 4 + 4 parallel pairs
        assert validate_structure(prod).ok
        for i in range(prod.size):
            assert disc.parallel(p1.mapping[i], p2.mapping[i])

    def test_empty_square(self):
        prod, _, _ = product_in_context(empty_algebra())
        assert prod.size == 0


class TestNullSupport:
    def test_groups_always(self, gp_corpus):
        assert all(has_null_support(g) for g in gp_corpus)

    def test_groupoids(self):
        assert has_null_support(gpds_instance("disc_z2z2"))
        assert not has_null_support(gpds_instance("pair2"))
        assert not has_null_support(gpds_instance("conn_z2"))

    def test_gpcirc(self):
        assert not has_null_support(as_gpcirc(cyclic_group(2)))
        assert has_null_support(empty_algebra())


class TestSubalgebras:
    def test_gp_closure_of_nothing_is_unit(self):
        s3 = symmetric_group3()
        assert subalgebra_closure(s3, ()) == {0}

    def test_gp_closure_of_generator(self):
        z4 = cyclic_group(4)
        assert subalgebra_closure(z4, (1,)) == frozenset(z4.elements)
        assert subalgebra_closure(z4, (2,)) == {0, 2}

    def test_gpcirc_closure_of_nothing_is_empty(self):
        z2 = as_gpcirc(cyclic_group(2))
        assert subalgebra_closure(z2, ()) == frozenset()

    def test_subgroup_counts_match_oracle(self, gp_corpus):
        for g in gp_corpus:
            if g.size > 8:
                continue
            expected = {s for s in oracles.brute_subgroups(g)}
            got = {s.members for s in enumerate_subobjects(g)}
            assert got == expected

    def test_gpcirc_subalgebras_are_subgroups_plus_empty(self):
        s3 = symmetric_group3()
        subs = enumerate_subobjects(as_gpcirc(s3, "s3"))
        expected = {frozenset()} | set(oracles.brute_subgroups(s3))
        assert {s.members for s in subs} == expected

    def test_pair3_subgroupoids_count_object_partitions(self):
        # wide subgroupoids of the 3-object indiscrete groupoid correspond
        # to equivalence relations on the objects: Bell(3) = 5
        subs = enumerate_subobjects(gpds_instance("pair3"))
        assert len(subs) == 5

    def test_conn_z2_subgroupoid_count(self):
        assert len(enumerate_subobjects(gpds_instance("conn_z2"))) == 7

    def test_gp_subobject_must_not_be_empty(self):
        with pytest.raises(StructureError):
            Subobject(cyclic_group(2), frozenset())

    def test_gpds_subobject_needs_identities(self):
        pair2 = gpds_instance("pair2")
        with pytest.raises(StructureError):
            Subobject(pair2, frozenset({0}))


class TestIsomorphism:
    def test_q8_not_isomorphic_to_d4(self):
        assert not are_isomorphic(quaternion_group(), dihedral_group(4))

    def test_klein_not_cyclic(self):
        assert not are_isomorphic(klein_group(), cyclic_group(4))

    def test_context_mismatch(self):
        assert not are_isomorphic(cyclic_group(2), as_gpcirc(cyclic_group(2)))


def test_unit_element():
    assert unit_element(symmetric_group3()) == 0
    assert unit_element(quaternion_group()) == 0


def test_groupoid_component_cover_checked():
    with pytest.raises(StructureError):
        groupoid_from_components(2, [([0], cyclic_group(2))])
