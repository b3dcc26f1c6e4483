"""Internal reflexive and equivalence relations on a finite structure.

A relation on X lives inside X*X taken in the ambient fibre, so in gpds it
may only relate parallel arrows.  Equivalence relations are stored as
partitions in canonical form: class ids are assigned in order of each
class's least member, so two relations are equal iff their class-id arrays
are equal.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Optional, Sequence

from .structures import (
    GPDS,
    FiniteStructure, StructureMap, Subobject,
    product_in_context, quotient,
)


class RelationError(Exception):
    """Bad relation input (base mismatch, non-parallel pair, ...)."""


class CarrierBoundExceeded(RelationError):
    """Enumeration was asked for a carrier above the configured bound."""


def _canonical_class_ids(n: int, class_of) -> tuple[int, ...]:
    ids: dict = {}
    out = []
    for a in range(n):
        key = class_of(a)
        if key not in ids:
            ids[key] = len(ids)
        out.append(ids[key])
    return tuple(out)


@dataclass(frozen=True)
class EquivRelation:
    """A compatible partition of the carrier, in canonical form."""

    base: FiniteStructure
    class_ids: tuple[int, ...]

    @property
    def num_classes(self) -> int:
        return max(self.class_ids, default=-1) + 1

    def related(self, a: int, b: int) -> bool:
        return self.class_ids[a] == self.class_ids[b]

    def class_of(self, a: int) -> tuple[int, ...]:
        cid = self.class_ids[a]
        return tuple(e for e in self.base.elements if self.class_ids[e] == cid)

    def classes(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.num_classes)]
        for a in self.base.elements:
            out[self.class_ids[a]].append(a)
        return tuple(tuple(c) for c in out)

    def pairs(self) -> frozenset[tuple[int, int]]:
        acc = []
        for c in self.classes():
            acc.extend(itertools.product(c, c))
        return frozenset(acc)

    def refines(self, other: "EquivRelation") -> bool:
        """Partition order: every class of self lies inside an other-class."""
        if other.base != self.base:
            raise RelationError("relations live on different structures")
        image: dict = {}
        for a in self.base.elements:
            c = image.setdefault(self.class_ids[a], other.class_ids[a])
            if c != other.class_ids[a]:
                return False
        return True

    def to_literal(self, include_singletons: bool = False) -> str:
        parts = []
        for c in self.classes():
            if len(c) > 1 or include_singletons:
                parts.append("{" + ",".join(map(str, c)) + "}")
        return ",".join(parts)

    @classmethod
    def from_class_ids(cls, base: FiniteStructure,
                       ids: Sequence[int]) -> "EquivRelation":
        ids = tuple(ids)
        if len(ids) != base.size:
            raise RelationError("class-id array does not match carrier")
        canon = _canonical_class_ids(base.size, lambda a: ids[a])
        rel = cls(base, canon)
        if base.context == GPDS:
            for c in rel.classes():
                for b in c[1:]:
                    if not base.parallel(c[0], b):
                        raise RelationError(
                            f"class cell mixes hom-sets: ({c[0]},{b})")
        return rel

    @classmethod
    def from_classes(cls, base: FiniteStructure,
                     classes: Iterable[Iterable[int]]) -> "EquivRelation":
        """Unlisted elements become singleton classes."""
        ids = list(range(base.size))
        seen: set[int] = set()
        offset = base.size
        for i, c in enumerate(classes):
            for a in c:
                if not 0 <= a < base.size:
                    raise RelationError(f"class element {a} out of range")
                if a in seen:
                    raise RelationError(f"element {a} appears in two classes")
                seen.add(a)
                ids[a] = offset + i
        return cls.from_class_ids(base, ids)


def diagonal(x: FiniteStructure) -> EquivRelation:
    return EquivRelation(x, tuple(x.elements))


def codiscrete(x: FiniteStructure) -> EquivRelation:
    """One class per hom-set in gpds, a single class otherwise."""
    return EquivRelation(x, _canonical_class_ids(x.size, x.hom_key))


@dataclass(frozen=True)
class RelationCheck:
    ok: bool
    reason: Optional[str] = None
    witness: Optional[tuple] = None

    def __bool__(self) -> bool:
        return self.ok


def is_internal_equivalence(x: FiniteStructure,
                            pairs: Iterable[tuple[int, int]]) -> RelationCheck:
    """Reflexive + symmetric + transitive + operation compatible (+ parallel
    cells in gpds), with a named witness on the first failure."""
    pair_set = set()
    for (a, b) in pairs:
        if not (0 <= a < x.size and 0 <= b < x.size):
            return RelationCheck(False, "range", (a, b))
        pair_set.add((a, b))
    for (a, b) in pair_set:
        if not x.parallel(a, b):
            return RelationCheck(False, "parallel", (a, b))
    for a in x.elements:
        if (a, a) not in pair_set:
            return RelationCheck(False, "reflexivity", (a,))
    for (a, b) in pair_set:
        if (b, a) not in pair_set:
            return RelationCheck(False, "symmetry", (a, b))
    for (a, b) in pair_set:
        for (c, d) in pair_set:
            if b == c and (a, d) not in pair_set:
                return RelationCheck(False, "transitivity", (a, b, d))
    for o in x.ops:
        if o.arity == 1:
            for (a, b) in pair_set:
                if (o.table[a], o.table[b]) not in pair_set:
                    return RelationCheck(False, f"compatibility:{o.name}", (a, b))
        else:
            for (a, b) in pair_set:
                row_a, row_b = o.table[a], o.table[b]
                for (c, d) in pair_set:
                    u, v = row_a[c], row_b[d]
                    if u is None:
                        continue
                    if (u, v) not in pair_set:
                        return RelationCheck(
                            False, f"compatibility:{o.name}", (a, b, c, d))
    return RelationCheck(True)


def as_relation(x: FiniteStructure,
                pairs: Iterable[tuple[int, int]]) -> EquivRelation:
    """Build an EquivRelation from a raw pair set, checking it first."""
    pair_list = list(pairs)
    check = is_internal_equivalence(x, pair_list)
    if not check:
        raise RelationError(f"not an internal equivalence relation: "
                            f"{check.reason} at {check.witness}")
    parent = list(x.elements)

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for (a, b) in pair_list:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra
    return EquivRelation.from_class_ids(x, [find(a) for a in x.elements])


def _partition_seeds(r: EquivRelation) -> list[tuple[int, int]]:
    seeds = []
    for c in r.classes():
        seeds.extend((c[0], b) for b in c[1:])
    return seeds


def generated_congruence(x: FiniteStructure,
                         seeds: Iterable[tuple[int, int]]) -> EquivRelation:
    """Least internal equivalence relation containing the seed pairs.

    Union-find handles reflexivity, symmetry and transitivity; a worklist of
    merge events closes under the elementary translations of every
    operation.  Each union strictly decreases the class count, so the loop
    terminates.
    """
    n = x.size
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    pending: list[tuple[int, int]] = []
    for (a, b) in seeds:
        if not (0 <= a < n and 0 <= b < n):
            raise RelationError(f"seed pair ({a},{b}) out of range")
        if not x.parallel(a, b):
            raise RelationError(f"seed pair ({a},{b}) is not parallel")
        pending.append((a, b))

    unaries = [o.table for o in x.ops if o.arity == 1]
    binaries = [o.table for o in x.ops if o.arity == 2]
    while pending:
        a, b = pending.pop()
        ra, rb = find(a), find(b)
        if ra == rb:
            continue
        parent[rb] = ra
        for table in unaries:
            pending.append((table[a], table[b]))
        for table in binaries:
            row_a, row_b = table[a], table[b]
            for z in range(n):
                u, v = row_a[z], row_b[z]
                if u is not None and v is not None:
                    pending.append((u, v))
                u, v = table[z][a], table[z][b]
                if u is not None and v is not None:
                    pending.append((u, v))
    return EquivRelation.from_class_ids(x, [find(a) for a in range(n)])


def meet(r: EquivRelation, s: EquivRelation) -> EquivRelation:
    if r.base != s.base:
        raise RelationError("meet of relations on different structures")
    rc, sc = r.class_ids, s.class_ids
    return EquivRelation.from_class_ids(
        r.base,
        _canonical_class_ids(r.base.size, lambda a: (rc[a], sc[a])))


def join(r: EquivRelation, s: EquivRelation) -> EquivRelation:
    if r.base != s.base:
        raise RelationError("join of relations on different structures")
    return generated_congruence(r.base, _partition_seeds(r) + _partition_seeds(s))


def meet_all(relations: Sequence[EquivRelation]) -> EquivRelation:
    if not relations:
        raise RelationError("meet_all of an empty family")
    return reduce(meet, relations)


def kernel_pair(f: StructureMap) -> EquivRelation:
    """Fibers of f as a relation on the domain."""
    return EquivRelation.from_class_ids(
        f.domain,
        _canonical_class_ids(f.domain.size, lambda a: f.mapping[a]))


def is_effective(x: FiniteStructure, r: EquivRelation) -> bool:
    """Whether r is the kernel pair of its own quotient projection (always
    true in these varieties; kept as a structural self-test)."""
    _, proj = quotient(x, r)
    return kernel_pair(proj) == r


def enumerate_congruences(x: FiniteStructure, max_carrier: int = 12,
                          method: str = "closure") -> list[EquivRelation]:
    """All internal equivalence relations on x.

    ``closure`` grows the lattice by joining principal congruences, so the
    cost tracks the lattice size; ``filter`` scans every set partition and
    is kept as a cross-validation oracle for small carriers.
    """
    if x.size > max_carrier:
        raise CarrierBoundExceeded(
            f"carrier {x.size} exceeds enumeration bound {max_carrier}")
    if method == "filter":
        return _enumerate_by_filter(x)
    if method != "closure":
        raise RelationError(f"unknown enumeration method {method!r}")
    delta = diagonal(x)
    atoms = [(a, b) for a in x.elements for b in range(a + 1, x.size)
             if x.parallel(a, b)]
    found = {delta}
    frontier = [delta]
    while frontier:
        r = frontier.pop()
        seeds_r = _partition_seeds(r)
        for (a, b) in atoms:
            if r.related(a, b):
                continue
            grown = generated_congruence(x, seeds_r + [(a, b)])
            if grown not in found:
                found.add(grown)
                frontier.append(grown)
    return sorted(found, key=lambda r: (-r.num_classes, r.class_ids))


def _set_partitions(n: int):
    """Restricted-growth-string enumeration of all partitions of 0..n-1."""
    if n == 0:
        yield ()
        return
    rgs = [0] * n

    def rec(i: int, top: int):
        if i == n:
            yield tuple(rgs)
            return
        for v in range(top + 2):
            rgs[i] = v
            yield from rec(i + 1, max(top, v))

    yield from rec(1, 0)


def _enumerate_by_filter(x: FiniteStructure) -> list[EquivRelation]:
    out = []
    for ids in _set_partitions(x.size):
        try:
            rel = EquivRelation.from_class_ids(x, ids)
        except RelationError:
            continue
        if is_internal_equivalence(x, rel.pairs()):
            out.append(rel)
    return sorted(set(out), key=lambda r: (-r.num_classes, r.class_ids))


# ---------------------------------------------------------------------------
# relation morphisms and discrete (op)fibrations


@dataclass(frozen=True)
class RelationMorphism:
    """A structure map between base objects that restricts to the pair sets
    (build via :func:`relation_morphism`, which validates)."""

    source: EquivRelation
    target: EquivRelation
    base_map: StructureMap

    def pair_map(self, a: int, b: int) -> tuple[int, int]:
        return (self.base_map.mapping[a], self.base_map.mapping[b])


def relation_morphism(source: EquivRelation, target: EquivRelation,
                      base_map: StructureMap) -> RelationMorphism:
    if base_map.domain != source.base or base_map.codomain != target.base:
        raise RelationError("base map does not match the relation bases")
    f = base_map.mapping
    for (a, b) in source.pairs():
        if not target.related(f[a], f[b]):
            raise RelationError(
                f"pair ({a},{b}) does not land in the target relation")
    return RelationMorphism(source, target, base_map)


def is_discrete_fibration(m: RelationMorphism) -> bool:
    """The square pairing second projections with the base map is a
    pullback: over each (x, (u, f x)) there is exactly one source pair."""
    f = m.base_map.mapping
    source_pairs = m.source.pairs()
    for x_el in m.source.base.elements:
        expected = set(m.target.class_of(f[x_el]))
        hits = [f[a] for a in m.source.base.elements
                if (a, x_el) in source_pairs]
        if len(hits) != len(expected) or set(hits) != expected:
            return False
    return True


def is_discrete_opfibration(m: RelationMorphism) -> bool:
    """Dual condition on first projections."""
    f = m.base_map.mapping
    source_pairs = m.source.pairs()
    for x_el in m.source.base.elements:
        expected = set(m.target.class_of(f[x_el]))
        hits = [f[b] for b in m.source.base.elements
                if (x_el, b) in source_pairs]
        if len(hits) != len(expected) or set(hits) != expected:
            return False
    return True


def fully_faithful(m: RelationMorphism) -> bool:
    """The joint-projection square is a pullback: two base elements are
    source-related exactly when their images are target-related."""
    f = m.base_map.mapping
    x = m.source.base
    for a in x.elements:
        for b in x.elements:
            if not x.parallel(a, b):
                continue
            if m.source.related(a, b) != m.target.related(f[a], f[b]):
                return False
    return True


def relation_pair_subobject(r: EquivRelation):
    """The pair set of r as a subobject of the ambient product, together
    with the two projection maps of the product."""
    prod, p1, p2 = product_in_context(r.base)
    n = r.base.size
    if r.base.context == GPDS:
        index = {}
        for i in range(prod.size):
            index[(p1.mapping[i], p2.mapping[i])] = i
        members = frozenset(index[(a, b)] for (a, b) in r.pairs())
    else:
        members = frozenset(a * n + b for (a, b) in r.pairs())
    return Subobject(prod, members), p1, p2


# ---------------------------------------------------------------------------
# Mal'tsev verification


@dataclass(frozen=True)
class MaltsevReport:
    ok: bool
    mode: str
    relations_checked: int
    counterexample: Optional[tuple] = None

    def __bool__(self) -> bool:
        return self.ok


def _reflexive_compatible_closure(prod, diag: frozenset[int],
                                  seeds: Iterable[int]) -> frozenset[int]:
    # Subalgebra of the product above the diagonal: closure under the
    # componentwise operations only, never under symmetry or transitivity.
    members = set(diag) | set(seeds)
    work = list(members)
    unaries = [o.table for o in prod.ops if o.arity == 1]
    binaries = [o.table for o in prod.ops if o.arity == 2]
    while work:
        a = work.pop()
        for table in unaries:
            v = table[a]
            if v not in members:
                members.add(v)
                work.append(v)
        for table in binaries:
            row = table[a]
            for b in tuple(members):
                for v in (row[b], table[b][a]):
                    if v is not None and v not in members:
                        members.add(v)
                        work.append(v)
    return frozenset(members)


def _symmetric_transitive_failure(x, decode, members) -> Optional[tuple]:
    pair_set = {decode(i) for i in members}
    for (a, b) in pair_set:
        if (b, a) not in pair_set:
            return ("symmetry", (a, b))
    by_first: dict[int, list[int]] = {}
    for (a, b) in pair_set:
        by_first.setdefault(a, []).append(b)
    for (a, b) in pair_set:
        for c in by_first.get(b, ()):
            if (a, c) not in pair_set:
                return ("transitivity", (a, b, c))
    return None


def verify_maltsev(x: FiniteStructure, exhaustive_bound: int = 5,
                   samples: int = 1000, seed: int = 0) -> MaltsevReport:
    """Check that every reflexive compatible relation on x is an equivalence
    relation.

    Carriers up to ``exhaustive_bound`` are handled exhaustively by
    enumerating all subalgebras of x*x above the diagonal; larger carriers
    draw random seed pairs, close them under reflexivity and compatibility
    only, and test symmetry and transitivity of the result.
    """
    if x.size == 0:
        return MaltsevReport(True, "vacuous", 0)
    prod, p1, p2 = product_in_context(x)

    def decode(i: int) -> tuple[int, int]:
        return (p1.mapping[i], p2.mapping[i])

    diag = frozenset(i for i in range(prod.size)
                     if p1.mapping[i] == p2.mapping[i])
    if x.size <= exhaustive_bound:
        seen = {_reflexive_compatible_closure(prod, diag, ())}
        frontier = list(seen)
        while frontier:
            current = frontier.pop()
            failure = _symmetric_transitive_failure(x, decode, current)
            if failure is not None:
                pairs = tuple(sorted(decode(i) for i in current))
                return MaltsevReport(False, "exhaustive", len(seen),
                                     (pairs,) + failure)
            for i in range(prod.size):
                if i in current:
                    continue
                grown = _reflexive_compatible_closure(prod, diag, current | {i})
                if grown not in seen:
                    seen.add(grown)
                    frontier.append(grown)
        return MaltsevReport(True, "exhaustive", len(seen))

    rng = random.Random(seed)
    candidates = [i for i in range(prod.size) if i not in diag]
    checked = 0
    for _ in range(samples):
        k = rng.randint(1, 3) if candidates else 0
        seeds = rng.sample(candidates, min(k, len(candidates)))
        closure = _reflexive_compatible_closure(prod, diag, seeds)
        checked += 1
        failure = _symmetric_transitive_failure(x, decode, closure)
        if failure is not None:
            pairs = tuple(sorted(decode(i) for i in closure))
            return MaltsevReport(False, "sampled", checked, (pairs,) + failure)
    return MaltsevReport(True, "sampled", checked)


# ---------------------------------------------------------------------------
# relation literals


def parse_relation_literal(x: FiniteStructure, text: str) -> EquivRelation:
    """Parse ``{0,2},{1,3}`` into a relation; omitted elements stay
    singletons.  The result is checked to be an internal equivalence."""
    text = text.strip()
    classes: list[list[int]] = []
    if text:
        import re

        if not re.fullmatch(r"\s*\{[^{}]*\}(\s*,\s*\{[^{}]*\})*\s*", text):
            raise RelationError(f"malformed relation literal: {text!r}")
        for chunk in re.findall(r"\{([^{}]*)\}", text):
            chunk = chunk.strip()
            if not chunk:
                classes.append([])
                continue
            try:
                classes.append([int(t) for t in chunk.split(",")])
            except ValueError:
                raise RelationError(
                    f"non-integer element in literal: {chunk!r}") from None
    rel = EquivRelation.from_classes(x, classes)
    check = is_internal_equivalence(x, rel.pairs())
    if not check:
        raise RelationError(
            f"literal is not a congruence: {check.reason} at {check.witness}")
    return rel
