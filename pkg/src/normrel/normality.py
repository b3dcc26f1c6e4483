"""Bourn-normality: the two-pullback test, normalization, and the least
witnessing relation.

A mono n : N -> X is Bourn-normal to an equivalence relation R on X when
both squares below are pullbacks at carrier level:

  (a) the restriction square: every parallel pair of image elements is
      R-related (the pullback of R along n is all of N*N);
  (b) the class square: for each a in N, sending b to (n a, n b) is a
      bijection onto the R-pairs whose first leg is n a.  Together with (a)
      this says the image of n meets a hom-set in exactly a class of R.

``nor`` sends a relation to the composite of its second projection with the
kernel of the first one (the class of the initial part: the unit class in
gp, the arrows related to an identity in gpds, the empty subalgebra in
gpcirc).  ``rel`` sends an arrow to the congruence generated by the image
pairs, which is the least relation the arrow is Bourn-normal to whenever it
is Bourn-normal to anything.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .relations import (
    EquivRelation, RelationMorphism,
    codiscrete, enumerate_congruences, generated_congruence,
    relation_morphism, relation_pair_subobject,
    is_discrete_fibration, fully_faithful,
)
from .structures import (
    StructureMap, StructureError, Subobject,
    compose_maps, final_kernel, has_null_support, is_mono, kernel,
)

MonoLike = Union[Subobject, StructureMap]


class NotBournNormalError(Exception):
    def __init__(self, diagnosis: "NormalityDiagnosis"):
        self.diagnosis = diagnosis
        super().__init__(diagnosis.message)


@dataclass(frozen=True)
class NormalityDiagnosis:
    holds: bool
    failed_square: Optional[str] = None  # "restriction" | "class-cover"
    message: str = ""
    witness: Optional[tuple] = None

    def __bool__(self) -> bool:
        return self.holds


def as_subobject(n: MonoLike) -> Subobject:
    """Monos are tested through their image subobject."""
    if isinstance(n, Subobject):
        return n
    if not is_mono(n):
        raise StructureError("map is not a mono (carrier function not injective)")
    return Subobject(n.codomain, n.image)


def is_bourn_normal_to(n: MonoLike, relation: EquivRelation) -> NormalityDiagnosis:
    """Carrier-level test of the two pullback squares, with a witness for
    the first failure."""
    sub = as_subobject(n)
    x = sub.parent
    if relation.base != x:
        raise StructureError("relation does not live on the mono's codomain")
    members = sub.members
    for a in members:
        for b in members:
            if x.parallel(a, b) and not relation.related(a, b):
                return NormalityDiagnosis(
                    False, "restriction",
                    f"parallel image pair ({a},{b}) is not related",
                    (a, b))
    for a in members:
        for b in relation.class_of(a):
            if b not in members:
                return NormalityDiagnosis(
                    False, "class-cover",
                    f"image is not a class of the relation: "
                    f"{b} is related to image element {a} but lies outside",
                    (a, b))
    return NormalityDiagnosis(True, message="Bourn-normal")


def rel(n: MonoLike) -> EquivRelation:
    """Congruence generated by the diagonal together with all (parallel)
    image pairs of n.  Defined for arbitrary maps, mono or not."""
    if isinstance(n, Subobject):
        x = n.parent
        items = sorted(n.members)
    else:
        x = n.codomain
        items = list(n.mapping)
    seeds = [(a, b) for a in items for b in items if x.parallel(a, b)]
    return generated_congruence(x, seeds)


def nor(relation: EquivRelation) -> Subobject:
    """Normalization: second projection composed with the kernel of the
    first, computed literally on the relation's pair subobject."""
    pair_sub, p1, p2 = relation_pair_subobject(relation)
    r1 = compose_maps(p1, pair_sub.inclusion())
    r2 = compose_maps(p2, pair_sub.inclusion())
    k = kernel(r1)
    members = frozenset(r2.mapping[i] for i in k.members)
    if len(members) != len(k.members):
        raise StructureError("normalization projection is not injective")
    return Subobject(relation.base, members)


def is_bourn_normal(n: MonoLike) -> NormalityDiagnosis:
    """Existential-quantifier-free test: n is Bourn-normal iff it is
    Bourn-normal to rel(n)."""
    return is_bourn_normal_to(n, rel(n))


def canonical_lift(n: MonoLike) -> RelationMorphism:
    """The witness morphism from the codiscrete relation on the domain of n
    to rel(n), over n itself."""
    sub = as_subobject(n)
    inc = sub.inclusion()
    return relation_morphism(codiscrete(inc.domain), rel(sub), inc)


def is_cartesian_discrete_fibration(n: MonoLike) -> bool:
    """Equivalent formulation of Bourn-normality: the canonical lift is
    fully faithful (cartesian) and a discrete fibration."""
    m = canonical_lift(n)
    return fully_faithful(m) and is_discrete_fibration(m)


def normal_to_witnesses(n: MonoLike, max_carrier: int = 12) -> list[EquivRelation]:
    """All congruences n is Bourn-normal to, by brute-force enumeration."""
    sub = as_subobject(n)
    return [r for r in enumerate_congruences(sub.parent, max_carrier)
            if is_bourn_normal_to(sub, r)]


def in_n0(n: MonoLike) -> bool:
    """Membership in the coreflective class: Bourn-normal with null-support
    domain."""
    sub = as_subobject(n)
    return has_null_support(sub.structure()) and bool(is_bourn_normal(sub))


in_N0 = in_n0


@dataclass(frozen=True)
class EpsilonComparison:
    """The comparison mono into a Bourn-normal n: the final-object kernel k
    of its domain, composed with n, recovers nor(rel(n))."""

    mono: Subobject
    kernel_part: Subobject          # k inside the domain structure of n
    composite_members: frozenset    # image of n . k inside the codomain
    normalized: Subobject           # nor(rel(n))

    @property
    def is_iso(self) -> bool:
        return self.composite_members == self.mono.members


@dataclass(frozen=True)
class EpsilonPrimeComparison:
    """Pair-set inclusion rel(nor(S)) <= S."""

    relation: EquivRelation
    inner: EquivRelation

    @property
    def is_iso(self) -> bool:
        return self.inner == self.relation


ComparisonMono = Union[EpsilonComparison, EpsilonPrimeComparison]


def counit_epsilon(n: MonoLike) -> EpsilonComparison:
    """Comparison nor(rel(n)) -> n for a Bourn-normal n.

    Raises NotBournNormalError otherwise; aborts if the defining identity
    nor(rel(n)) = n . final_kernel(dom n) fails, since that would falsify
    the whole suite.
    """
    sub = as_subobject(n)
    diagnosis = is_bourn_normal(sub)
    if not diagnosis:
        raise NotBournNormalError(diagnosis)
    dom = sub.structure()
    k = final_kernel(dom)
    inc = sub.sorted_members()
    composite = frozenset(inc[a] for a in k.members)
    normalized = nor(rel(sub))
    if composite != normalized.members:
        raise StructureError(
            f"normalization identity failed: n.k gives {sorted(composite)}, "
            f"nor(rel(n)) gives {sorted(normalized.members)}")
    return EpsilonComparison(sub, k, composite, normalized)


def counit_epsilon_prime(relation: EquivRelation) -> EpsilonPrimeComparison:
    """Comparison rel(nor(S)) -> S; the containment is a theorem, so a
    violation aborts with a counterexample."""
    inner = rel(nor(relation))
    extra = inner.pairs() - relation.pairs()
    if extra:
        raise StructureError(
            f"containment rel(nor(S)) <= S failed at {sorted(extra)[0]}")
    return EpsilonPrimeComparison(relation, inner)
