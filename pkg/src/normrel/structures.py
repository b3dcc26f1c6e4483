"""Finite structures in the three verification contexts.

A structure is a finite carrier 0..n-1 with operation tables, tagged by one
of three contexts:

* ``gp``     -- finite groups with total ``mul`` and ``inv`` tables.  Pointed:
  the trivial group is both initial and final.
* ``gpds``   -- finite groupoids over a fixed object set S, presented by
  arrow carrier, src/tgt maps, identity arrows and a partial ``comp`` table
  defined exactly on composable pairs.  Quasi-pointed: the discrete groupoid
  on S is initial, the codiscrete one is final.
* ``gpcirc`` -- the variety of algebras with associative ``mul`` and ``inv``
  satisfying x*inv(x) = y*inv(y) and x*x*inv(x) = x*inv(x)*x = x.  Nonempty
  models are groups; the empty model is the initial object.

Everything here is immutable; all functions are pure.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Iterable, Iterator, Optional, Sequence

GP = "gp"
GPDS = "gpds"
GPCIRC = "gpcirc"
CONTEXTS = (GP, GPDS, GPCIRC)


class StructureError(Exception):
    """A structure, map or subset is malformed (not an axiom violation)."""


class ParseError(StructureError):
    """Structure file could not be parsed."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Operation:
    """A named operation table.  Partial entries (gpds comp) are None."""

    name: str
    arity: int
    table: tuple

    def value(self, *args: int) -> Optional[int]:
        if self.arity == 1:
            return self.table[args[0]]
        return self.table[args[0]][args[1]]


@dataclass(frozen=True)
class GroupoidShape:
    """Object bookkeeping for gpds structures."""

    n_objects: int
    src: tuple[int, ...]
    tgt: tuple[int, ...]
    identities: tuple[int, ...]


@dataclass(frozen=True)
class FiniteStructure:
    context: str
    size: int
    ops: tuple[Operation, ...]
    groupoid: Optional[GroupoidShape] = None
    name: str = ""
    el_names: tuple[str, ...] = ()

    @property
    def elements(self) -> range:
        return range(self.size)

    def op(self, name: str) -> Operation:
        for o in self.ops:
            if o.name == name:
                return o
        raise StructureError(f"structure has no operation {name!r}")

    def apply(self, name: str, *args: int) -> Optional[int]:
        return self.op(name).value(*args)

    def parallel(self, a: int, b: int) -> bool:
        """Same source and target; trivially true outside gpds."""
        if self.context != GPDS:
            return True
        g = self.groupoid
        return g.src[a] == g.src[b] and g.tgt[a] == g.tgt[b]

    def hom_key(self, a: int):
        if self.context != GPDS:
            return 0
        return (self.groupoid.src[a], self.groupoid.tgt[a])

    def is_identity_arrow(self, a: int) -> bool:
        return self.context == GPDS and a in self.groupoid.identities

    def element_name(self, a: int) -> str:
        if self.el_names:
            return self.el_names[a]
        return str(a)

    def __repr__(self) -> str:
        label = self.name or "structure"
        return f"<{self.context} {label} |{self.size}|>"


@dataclass(frozen=True)
class StructureMap:
    """A carrier function compatible with the operations (build via
    :func:`structure_map`, which validates)."""

    domain: FiniteStructure
    codomain: FiniteStructure
    mapping: tuple[int, ...]

    def __call__(self, a: int) -> int:
        return self.mapping[a]

    @property
    def image(self) -> frozenset[int]:
        return frozenset(self.mapping)


@dataclass(frozen=True)
class Subobject:
    """A mono presented as an operation-closed carrier subset.

    In gp the subset is a subgroup (never empty), in gpds a wide subgroupoid
    (contains every identity arrow), in gpcirc a subalgebra (possibly empty).
    """

    parent: FiniteStructure
    members: frozenset[int]

    def __post_init__(self):
        _check_closed_subset(self.parent, self.members)

    @property
    def size(self) -> int:
        return len(self.members)

    def sorted_members(self) -> tuple[int, ...]:
        return tuple(sorted(self.members))

    def structure(self) -> FiniteStructure:
        return _substructure(self.parent, self.sorted_members())

    def inclusion(self) -> StructureMap:
        return StructureMap(self.structure(), self.parent, self.sorted_members())

    def __le__(self, other: "Subobject") -> bool:
        return self.members <= other.members

    def __lt__(self, other: "Subobject") -> bool:
        return self.members < other.members


# ---------------------------------------------------------------------------
# shape checks and derived substructures


def _check_shape(x: FiniteStructure) -> None:
    n = x.size
    if x.context not in CONTEXTS:
        raise StructureError(f"unknown context {x.context!r}")
    if n < 0:
        raise StructureError("negative carrier size")
    if x.el_names and len(x.el_names) != n:
        raise StructureError("element-name list does not match carrier size")
    names = [o.name for o in x.ops]
    if len(set(names)) != len(names):
        raise StructureError("duplicate operation names")
    required = {GP: ("mul", "inv"), GPCIRC: ("mul", "inv"), GPDS: ("comp", "inv")}
    for req in required[x.context]:
        if req not in names:
            raise StructureError(f"{x.context} structure lacks operation {req!r}")
    for o in x.ops:
        if o.arity == 1:
            if len(o.table) != n:
                raise StructureError(f"unary table {o.name!r} has wrong length")
            rows: Iterable = [o.table]
        elif o.arity == 2:
            if len(o.table) != n or any(len(r) != n for r in o.table):
                raise StructureError(f"binary table {o.name!r} is not {n}x{n}")
            rows = o.table
        else:
            raise StructureError(f"operation {o.name!r} has arity {o.arity}")
        partial_ok = x.context == GPDS and o.name == "comp"
        for row in rows:
            for v in row:
                if v is None and not partial_ok:
                    raise StructureError(f"partial entry in total table {o.name!r}")
                if v is not None and not 0 <= v < n:
                    raise StructureError(f"table {o.name!r} entry {v} out of range")
    if x.context == GPDS:
        g = x.groupoid
        if g is None:
            raise StructureError("gpds structure lacks groupoid data")
        if g.n_objects < 0:
            raise StructureError("negative object count")
        if len(g.src) != n or len(g.tgt) != n:
            raise StructureError("src/tgt length does not match carrier")
        if any(not 0 <= s < g.n_objects for s in g.src + g.tgt):
            raise StructureError("src/tgt value out of range")
        if len(g.identities) != g.n_objects:
            raise StructureError("identity list does not match object count")
        if any(not 0 <= a < n for a in g.identities):
            raise StructureError("identity arrow index out of range")
    elif x.groupoid is not None:
        raise StructureError(f"{x.context} structure carries groupoid data")


def _check_closed_subset(x: FiniteStructure, members: frozenset[int]) -> None:
    if any(not 0 <= a < x.size for a in members):
        raise StructureError("subset element out of range")
    if x.context == GP and not members:
        raise StructureError("gp subobjects are nonempty")
    if x.context == GPDS:
        missing = [a for a in x.groupoid.identities if a not in members]
        if missing:
            raise StructureError(f"gpds subobject lacks identity arrow {missing[0]}")
    for o in x.ops:
        if o.arity == 1:
            for a in members:
                if o.table[a] not in members:
                    raise StructureError(
                        f"subset not closed under {o.name}: {o.name}({a}) outside")
        else:
            for a in members:
                row = o.table[a]
                for b in members:
                    v = row[b]
                    if v is not None and v not in members:
                        raise StructureError(
                            f"subset not closed under {o.name}: "
                            f"{o.name}({a},{b}) outside")


@lru_cache(maxsize=512)
def _substructure(x: FiniteStructure, members: tuple[int, ...]) -> FiniteStructure:
    local = {a: i for i, a in enumerate(members)}
    ops = []
    for o in x.ops:
        if o.arity == 1:
            table: tuple = tuple(local[o.table[a]] for a in members)
        else:
            table = tuple(
                tuple(
                    local[o.table[a][b]] if o.table[a][b] is not None else None
                    for b in members)
                for a in members)
        ops.append(Operation(o.name, o.arity, table))
    groupoid = None
    if x.context == GPDS:
        g = x.groupoid
        groupoid = GroupoidShape(
            g.n_objects,
            tuple(g.src[a] for a in members),
            tuple(g.tgt[a] for a in members),
            tuple(local[a] for a in g.identities),
        )
    el_names = tuple(x.el_names[a] for a in members) if x.el_names else ()
    return FiniteStructure(x.context, len(members), tuple(ops), groupoid,
                           name="", el_names=el_names)


# ---------------------------------------------------------------------------
# maps


def structure_map(domain: FiniteStructure, codomain: FiniteStructure,
                  mapping: Sequence[int]) -> StructureMap:
    """Validate and build a context morphism; raises StructureError."""
    if domain.context != codomain.context:
        raise StructureError("domain and codomain contexts differ")
    mapping = tuple(mapping)
    if len(mapping) != domain.size:
        raise StructureError("mapping length does not match domain carrier")
    if any(not 0 <= v < codomain.size for v in mapping):
        raise StructureError("mapping value out of range")
    if domain.context == GPDS:
        gd, gc = domain.groupoid, codomain.groupoid
        if gd.n_objects != gc.n_objects:
            raise StructureError("gpds maps must keep the object set fixed")
        for a in domain.elements:
            fa = mapping[a]
            if gc.src[fa] != gd.src[a] or gc.tgt[fa] != gd.tgt[a]:
                raise StructureError(f"map moves arrow {a} off its hom-set")
        for s, ida in enumerate(gd.identities):
            if mapping[ida] != gc.identities[s]:
                raise StructureError(f"map does not preserve identity at object {s}")
    for o in domain.ops:
        oc = codomain.op(o.name)
        if o.arity == 1:
            for a in domain.elements:
                if mapping[o.table[a]] != oc.table[mapping[a]]:
                    raise StructureError(
                        f"map does not preserve {o.name} at {a}")
        else:
            for a in domain.elements:
                row = o.table[a]
                for b in domain.elements:
                    v = row[b]
                    if v is None:
                        continue
                    w = oc.table[mapping[a]][mapping[b]]
                    if w is None or mapping[v] != w:
                        raise StructureError(
                            f"map does not preserve {o.name} at ({a},{b})")
    return StructureMap(domain, codomain, mapping)


def identity_map(x: FiniteStructure) -> StructureMap:
    return StructureMap(x, x, tuple(x.elements))


def compose_maps(g: StructureMap, f: StructureMap) -> StructureMap:
    """g after f."""
    if f.codomain != g.domain:
        raise StructureError("maps are not composable")
    return StructureMap(f.domain, g.codomain,
                        tuple(g.mapping[v] for v in f.mapping))


def is_mono(f: StructureMap) -> bool:
    """Monos coincide with injective-on-carrier maps in all three contexts."""
    return len(set(f.mapping)) == len(f.mapping)


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple

    def __str__(self) -> str:
        return f"{self.axiom} at {self.witness}"


@dataclass(frozen=True)
class StructureReport:
    ok: bool
    violations: tuple[Violation, ...]

    def __bool__(self) -> bool:
        return self.ok


def unit_element(x: FiniteStructure) -> int:
    """Unit of a nonempty, valid gp/gpcirc structure: x*inv(x)."""
    if x.context == GPDS:
        raise StructureError("groupoids have one identity per object")
    if x.size == 0:
        raise StructureError("empty structure has no unit")
    return x.apply("mul", 0, x.apply("inv", 0))


def validate_structure(x: FiniteStructure) -> StructureReport:
    """Exhaustive axiom scan; violations are data, not exceptions."""
    _check_shape(x)
    bad: list[Violation] = []
    if x.context == GP:
        _validate_group_like(x, bad, require_nonempty=True)
    elif x.context == GPCIRC:
        _validate_gpcirc(x, bad)
    else:
        _validate_groupoid(x, bad)
    return StructureReport(not bad, tuple(bad))


def _validate_group_like(x, bad, require_nonempty):
    n = x.size
    if n == 0:
        if require_nonempty:
            bad.append(Violation("carrier-nonempty", ()))
        return
    mul = x.op("mul").table
    inv = x.op("inv").table
    for a, b, c in itertools.product(range(n), repeat=3):
        if mul[mul[a][b]][c] != mul[a][mul[b][c]]:
            bad.append(Violation("associativity", (a, b, c)))
            break
    unit = None
    for e in range(n):
        if all(mul[e][a] == a == mul[a][e] for a in range(n)):
            unit = e
            break
    if unit is None:
        bad.append(Violation("identity", ()))
        return
    for a in range(n):
        if mul[a][inv[a]] != unit or mul[inv[a]][a] != unit:
            bad.append(Violation("inverse", (a,)))
            break


def _validate_gpcirc(x, bad):
    n = x.size
    if n == 0:
        return
    mul = x.op("mul").table
    inv = x.op("inv").table
    for a, b, c in itertools.product(range(n), repeat=3):
        if mul[mul[a][b]][c] != mul[a][mul[b][c]]:
            bad.append(Violation("associativity", (a, b, c)))
            break
    norm = mul[0][inv[0]]
    for a in range(n):
        if mul[a][inv[a]] != norm:
            bad.append(Violation("inv-constant", (0, a)))
            break
    for a in range(n):
        if mul[mul[a][a]][inv[a]] != a:
            bad.append(Violation("left-norm-identity", (a,)))
            break
        if mul[mul[a][inv[a]]][a] != a:
            bad.append(Violation("right-norm-identity", (a,)))
            break


def _validate_groupoid(x, bad):
    g = x.groupoid
    comp = x.op("comp").table
    inv = x.op("inv").table
    for s, ida in enumerate(g.identities):
        if g.src[ida] != s or g.tgt[ida] != s:
            bad.append(Violation("identity-missing", (s,)))
    for a in x.elements:
        for b in x.elements:
            defined = comp[a][b] is not None
            composable = g.tgt[a] == g.src[b]
            if defined != composable:
                bad.append(Violation("comp-domain", (a, b)))
                continue
            if defined:
                c = comp[a][b]
                if g.src[c] != g.src[a] or g.tgt[c] != g.tgt[b]:
                    bad.append(Violation("comp-source-target", (a, b)))
    if bad:
        return
    for a in x.elements:
        for b in x.elements:
            if comp[a][b] is None:
                continue
            for c in x.elements:
                if comp[b][c] is None:
                    continue
                if comp[comp[a][b]][c] != comp[a][comp[b][c]]:
                    bad.append(Violation("associativity", (a, b, c)))
                    return
    for a in x.elements:
        if comp[g.identities[g.src[a]]][a] != a or comp[a][g.identities[g.tgt[a]]] != a:
            bad.append(Violation("identity-law", (a,)))
            return
    for a in x.elements:
        ia = inv[a]
        if g.src[ia] != g.tgt[a] or g.tgt[ia] != g.src[a]:
            bad.append(Violation("inverse-source-target", (a,)))
            return
        if comp[a][ia] != g.identities[g.src[a]] or comp[ia][a] != g.identities[g.tgt[a]]:
            bad.append(Violation("inverse-law", (a,)))
            return


# ---------------------------------------------------------------------------
# kernels, supports, quotients, products


def kernel(f: StructureMap) -> Subobject:
    """Pullback of the initial arrow of the codomain along f.

    gp: preimage of the unit.  gpds: preimage of the identity arrows (a
    totally disconnected wide subgroupoid).  gpcirc: the empty subalgebra.
    """
    x, y = f.domain, f.codomain
    if x.context == GP:
        e = unit_element(y)
        members = frozenset(a for a in x.elements if f.mapping[a] == e)
    elif x.context == GPDS:
        idents = set(y.groupoid.identities)
        members = frozenset(a for a in x.elements if f.mapping[a] in idents)
    else:
        members = frozenset()
    return Subobject(x, members)


def has_null_support(x: FiniteStructure) -> bool:
    """Whether a (necessarily unique) map to the initial object exists."""
    if x.context == GP:
        return True
    if x.context == GPDS:
        g = x.groupoid
        return all(g.src[a] == g.tgt[a] for a in x.elements)
    return x.size == 0


def final_structure(x: FiniteStructure) -> FiniteStructure:
    """The final object of x's context (codiscrete groupoid for gpds)."""
    if x.context == GPDS:
        k = x.groupoid.n_objects
        mul_free = _codiscrete_groupoid(k)
        return mul_free
    table_mul = ((0,),)
    table_inv = (0,)
    ops = (Operation("mul", 2, table_mul), Operation("inv", 1, table_inv))
    return FiniteStructure(x.context, 1, ops, name="final")


@lru_cache(maxsize=64)
def _codiscrete_groupoid(k: int) -> FiniteStructure:
    # arrow (s,t) is index s*k + t
    n = k * k
    src = tuple(i // k for i in range(n))
    tgt = tuple(i % k for i in range(n))
    identities = tuple(s * k + s for s in range(k))
    comp = tuple(
        tuple(
            (a // k) * k + (b % k) if a % k == b // k else None
            for b in range(n))
        for a in range(n))
    inv = tuple((a % k) * k + a // k for a in range(n))
    ops = (Operation("comp", 2, comp), Operation("inv", 1, inv))
    return FiniteStructure(GPDS, n, ops, GroupoidShape(k, src, tgt, identities),
                           name="codiscrete")


def canonical_final_map(x: FiniteStructure) -> StructureMap:
    """The unique map from x to the final object of its context."""
    if x.context == GPDS:
        fin = final_structure(x)
        k = x.groupoid.n_objects
        mapping = tuple(x.groupoid.src[a] * k + x.groupoid.tgt[a]
                        for a in x.elements)
        return structure_map(x, fin, mapping)
    fin = final_structure(x)
    return structure_map(x, fin, (0,) * x.size)


def final_kernel(x: FiniteStructure) -> Subobject:
    """Kernel of the canonical map to the context's final object.

    gp: all of x.  gpds: the maximal totally disconnected subgroupoid (every
    endo-arrow).  gpcirc: the empty subalgebra.
    """
    return kernel(canonical_final_map(x))


def product_in_context(x: FiniteStructure):
    """x*x in the ambient fibre, with the two projections.

    gp/gpcirc: full cartesian square.  gpds: arrows are the parallel pairs
    (product in the fibre of groupoids over the fixed object set).
    """
    n = x.size
    if x.context != GPDS:
        mul = x.op("mul").table
        inv = x.op("inv").table
        pmul = tuple(
            tuple(mul[p // n][q // n] * n + mul[p % n][q % n]
                  for q in range(n * n))
            for p in range(n * n))
        pinv = tuple(inv[p // n] * n + inv[p % n] for p in range(n * n))
        prod = FiniteStructure(
            x.context, n * n,
            (Operation("mul", 2, pmul), Operation("inv", 1, pinv)),
            name=f"{x.name}^2" if x.name else "")
        p1 = StructureMap(prod, x, tuple(p // n for p in range(n * n)))
        p2 = StructureMap(prod, x, tuple(p % n for p in range(n * n)))
        return prod, p1, p2

    g = x.groupoid
    pairs = [(a, b) for a in range(n) for b in range(n) if x.parallel(a, b)]
    index = {ab: i for i, ab in enumerate(pairs)}
    comp = x.op("comp").table
    inv = x.op("inv").table
    m = len(pairs)
    pcomp = []
    for (a, b) in pairs:
        row = []
        for (c, d) in pairs:
            if comp[a][c] is None:
                row.append(None)
            else:
                row.append(index[(comp[a][c], comp[b][d])])
        pcomp.append(tuple(row))
    pinv = tuple(index[(inv[a], inv[b])] for (a, b) in pairs)
    shape = GroupoidShape(
        g.n_objects,
        tuple(g.src[a] for (a, _) in pairs),
        tuple(g.tgt[a] for (a, _) in pairs),
        tuple(index[(ida, ida)] for ida in g.identities),
    )
    prod = FiniteStructure(
        GPDS, m, (Operation("comp", 2, tuple(pcomp)), Operation("inv", 1, pinv)),
        shape, name=f"{x.name}^2" if x.name else "")
    p1 = StructureMap(prod, x, tuple(a for (a, _) in pairs))
    p2 = StructureMap(prod, x, tuple(b for (_, b) in pairs))
    return prod, p1, p2


def quotient(x: FiniteStructure, relation) -> tuple[FiniteStructure, StructureMap]:
    """Quotient by an internal equivalence relation, with its projection.

    The table construction doubles as a compatibility check: an incompatible
    partition raises StructureError while filling the tables.
    """
    if relation.base != x:
        raise StructureError("relation lives on a different structure")
    cls = relation.class_ids
    n_classes = relation.num_classes
    ops = []
    for o in x.ops:
        if o.arity == 1:
            utable: list = [None] * n_classes
            for a in x.elements:
                v = cls[o.table[a]]
                if utable[cls[a]] is None:
                    utable[cls[a]] = v
                elif utable[cls[a]] != v:
                    raise StructureError(
                        f"relation is not compatible with {o.name} at {a}")
            ops.append(Operation(o.name, 1, tuple(utable)))
        else:
            btable = [[None] * n_classes for _ in range(n_classes)]
            for a in x.elements:
                row = o.table[a]
                for b in x.elements:
                    v = row[b]
                    if v is None:
                        continue
                    ca, cb = cls[a], cls[b]
                    if btable[ca][cb] is None:
                        btable[ca][cb] = cls[v]
                    elif btable[ca][cb] != cls[v]:
                        raise StructureError(
                            f"relation is not compatible with {o.name} at ({a},{b})")
            ops.append(Operation(o.name, 2, tuple(tuple(r) for r in btable)))
    groupoid = None
    if x.context == GPDS:
        g = x.groupoid
        src = [0] * n_classes
        tgt = [0] * n_classes
        for a in x.elements:
            src[cls[a]] = g.src[a]
            tgt[cls[a]] = g.tgt[a]
        identities = tuple(cls[ida] for ida in g.identities)
        groupoid = GroupoidShape(g.n_objects, tuple(src), tuple(tgt), identities)
    q = FiniteStructure(x.context, n_classes, tuple(ops), groupoid,
                        name=f"{x.name}/~" if x.name else "")
    return q, StructureMap(x, q, cls)


# ---------------------------------------------------------------------------
# subalgebra machinery


def _constants(x: FiniteStructure) -> frozenset[int]:
    # gp carries an implicit unit constant; gpds the identity arrows.
    if x.context == GP:
        return frozenset((unit_element(x),))
    if x.context == GPDS:
        return frozenset(x.groupoid.identities)
    return frozenset()


def subalgebra_closure(x: FiniteStructure, seed: Iterable[int]) -> frozenset[int]:
    """Least operation-closed subset containing the seed and the context
    constants (unit in gp, identity arrows in gpds, nothing in gpcirc)."""
    members = set(_constants(x)) | set(seed)
    work = list(members)
    unaries = [o.table for o in x.ops if o.arity == 1]
    binaries = [o.table for o in x.ops if o.arity == 2]
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


def enumerate_subobjects(x: FiniteStructure,
                         containing: Iterable[int] = ()) -> list[Subobject]:
    """All operation-closed subsets above ``containing``, smallest first.

    Grown by closing one extra element at a time, so the cost tracks the
    size of the subalgebra lattice rather than 2^carrier.
    """
    base = subalgebra_closure(x, containing)
    seen = {base}
    frontier = [base]
    while frontier:
        current = frontier.pop()
        for a in x.elements:
            if a in current:
                continue
            grown = subalgebra_closure(x, current | {a})
            if grown not in seen:
                seen.add(grown)
                frontier.append(grown)
    found = sorted(seen, key=lambda s: (len(s), tuple(sorted(s))))
    return [Subobject(x, s) for s in found]


def are_isomorphic(a: FiniteStructure, b: FiniteStructure) -> bool:
    """Table-level isomorphism test by exhaustive carrier bijection search.

    Meant for small instances (tests, spot checks); gpds bijections must fix
    the object set, which prunes the search to hom-set-wise matchings.
    """
    if a.context != b.context or a.size != b.size:
        return False
    if {o.name: o.arity for o in a.ops} != {o.name: o.arity for o in b.ops}:
        return False
    if a.context == GPDS:
        if a.groupoid.n_objects != b.groupoid.n_objects:
            return False
        blocks: dict = {}
        for e in a.elements:
            blocks.setdefault(a.hom_key(e), ([], []))[0].append(e)
        for e in b.elements:
            blocks.setdefault(b.hom_key(e), ([], []))[1].append(e)
        if any(len(p) != len(q) for p, q in blocks.values()):
            return False
        groups = list(blocks.values())
        choices = [itertools.permutations(q) for _, q in groups]
        for assignment in itertools.product(*choices):
            mapping = [0] * a.size
            for (p, _), img in zip(groups, assignment):
                for e, v in zip(p, img):
                    mapping[e] = v
            if _is_iso_mapping(a, b, mapping):
                return True
        return False
    for perm in itertools.permutations(range(b.size)):
        if _is_iso_mapping(a, b, list(perm)):
            return True
    return False


def _is_iso_mapping(a: FiniteStructure, b: FiniteStructure,
                    mapping: list[int]) -> bool:
    try:
        structure_map(a, b, mapping)
    except StructureError:
        return False
    return len(set(mapping)) == len(mapping)


# ---------------------------------------------------------------------------
# file format


class _Lines:
    def __init__(self, text: str):
        self.items: list[tuple[int, str]] = []
        for i, raw in enumerate(text.splitlines(), start=1):
            body = raw.split("#", 1)[0].strip()
            if body:
                self.items.append((i, body))
        self.pos = 0

    def peek(self) -> Optional[tuple[int, str]]:
        return self.items[self.pos] if self.pos < len(self.items) else None

    def take(self, what: str) -> tuple[int, str]:
        item = self.peek()
        if item is None:
            raise ParseError(f"unexpected end of document, expected {what}")
        self.pos += 1
        return item


def _ints(text: str, lineno: int, expect: Optional[int] = None) -> list[int]:
    try:
        values = [int(t) for t in text.split()]
    except ValueError:
        raise ParseError("non-integer table entry", lineno) from None
    if expect is not None and len(values) != expect:
        raise ParseError(
            f"row has {len(values)} entries, expected {expect}", lineno)
    return values


def load_structure(text: str) -> FiniteStructure:
    """Parse the canonical text format.  Does not validate axioms."""
    lines = _Lines(text)
    name = ""
    item = lines.peek()
    if item and item[1].startswith("name "):
        lines.take("name")
        name = item[1][5:].strip()
    lineno, line = lines.take("context line")
    parts = line.split()
    if len(parts) != 2 or parts[0] != "context":
        raise ParseError("expected `context gp|gpds|gpcirc`", lineno)
    context = parts[1]
    if context not in CONTEXTS:
        raise ParseError(f"unknown context {context!r}", lineno)
    lineno, line = lines.take("carrier line")
    parts = line.split()
    if len(parts) != 2 or parts[0] != "carrier":
        raise ParseError("expected `carrier N`", lineno)
    try:
        n = int(parts[1])
    except ValueError:
        raise ParseError("carrier size is not an integer", lineno) from None
    if n < 0:
        raise ParseError("carrier size is negative", lineno)

    el_names: tuple[str, ...] = ()
    item = lines.peek()
    if item and item[1].split()[0] == "names":
        lineno, line = lines.take("names")
        toks = line.split()[1:]
        if len(toks) != n:
            raise ParseError(f"names line has {len(toks)} entries, expected {n}",
                             lineno)
        el_names = tuple(toks)

    groupoid = None
    if context == GPDS:
        lineno, line = lines.take("objects line")
        parts = line.split()
        if len(parts) != 2 or parts[0] != "objects":
            raise ParseError("expected `objects K`", lineno)
        try:
            k = int(parts[1])
        except ValueError:
            raise ParseError("object count is not an integer", lineno) from None
        fields = {}
        for key, count in (("src", n), ("tgt", n), ("id", k)):
            lineno, line = lines.take(f"{key} line")
            toks = line.split()
            if not toks or toks[0] != key:
                raise ParseError(f"expected `{key} ...`", lineno)
            values = _ints(line[len(key):], lineno, count)
            bound = k if key in ("src", "tgt") else n
            for v in values:
                if not 0 <= v < bound:
                    raise ParseError(f"{key} entry {v} out of range", lineno)
            fields[key] = tuple(values)
        groupoid = GroupoidShape(k, fields["src"], fields["tgt"], fields["id"])

    ops: list[Operation] = []
    while lines.peek() is not None:
        lineno, line = lines.take("op header")
        parts = line.split()
        if parts[0] != "op" or len(parts) != 3:
            raise ParseError("expected `op NAME ARITY`", lineno)
        op_name = parts[1]
        try:
            arity = int(parts[2])
        except ValueError:
            raise ParseError("arity is not an integer", lineno) from None
        if arity not in (1, 2):
            raise ParseError(f"unsupported arity {arity}", lineno)
        if any(o.name == op_name for o in ops):
            raise ParseError(f"duplicate operation {op_name!r}", lineno)
        if arity == 1:
            if n == 0:
                table: tuple = ()
            else:
                rlineno, row = lines.take("unary table row")
                values = _ints(row, rlineno, n)
                for v in values:
                    if not 0 <= v < n:
                        raise ParseError(f"table entry {v} out of range", rlineno)
                table = tuple(values)
            ops.append(Operation(op_name, 1, table))
        elif context == GPDS and op_name == "comp":
            partial: list[list] = [[None] * n for _ in range(n)]
            while True:
                rlineno, row = lines.take("`a b c` triple or `end`")
                if row == "end":
                    break
                values = _ints(row, rlineno, 3)
                a, b, c = values
                for v in values:
                    if not 0 <= v < n:
                        raise ParseError(f"comp entry {v} out of range", rlineno)
                if partial[a][b] is not None:
                    raise ParseError(f"duplicate comp entry for ({a},{b})", rlineno)
                partial[a][b] = c
            ops.append(Operation(op_name, 2, tuple(tuple(r) for r in partial)))
        else:
            rows = []
            for _ in range(n):
                rlineno, row = lines.take("binary table row")
                values = _ints(row, rlineno, n)
                for v in values:
                    if not 0 <= v < n:
                        raise ParseError(f"table entry {v} out of range", rlineno)
                rows.append(tuple(values))
            ops.append(Operation(op_name, 2, tuple(rows)))

    if n == 0 and not ops:
        # a carrier-0 document may omit its tables entirely
        ops = [Operation("mul", 2, ()), Operation("inv", 1, ())]

    structure = FiniteStructure(context, n, tuple(ops), groupoid,
                                name=name, el_names=el_names)
    try:
        _check_shape(structure)
    except StructureError as exc:
        raise ParseError(str(exc)) from None
    return structure


def load_structure_path(path) -> FiniteStructure:
    from pathlib import Path

    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {p}: {exc}") from None
    structure = load_structure(text)
    if not structure.name:
        structure = replace(structure, name=p.stem)
    return structure


def dump_structure(x: FiniteStructure) -> str:
    """Canonical text form; load_structure(dump_structure(x)) == x."""
    _check_shape(x)
    out = []
    if x.name:
        out.append(f"name {x.name}")
    out.append(f"context {x.context}")
    out.append(f"carrier {x.size}")
    if x.el_names:
        out.append("names " + " ".join(x.el_names))
    if x.context == GPDS:
        g = x.groupoid
        out.append(f"objects {g.n_objects}")
        out.append("src " + " ".join(map(str, g.src)))
        out.append("tgt " + " ".join(map(str, g.tgt)))
        out.append("id " + " ".join(map(str, g.identities)))
    for o in x.ops:
        out.append(f"op {o.name} {o.arity}")
        if o.arity == 1:
            if x.size:
                out.append(" ".join(map(str, o.table)))
        elif x.context == GPDS and o.name == "comp":
            for a in x.elements:
                for b in x.elements:
                    if o.table[a][b] is not None:
                        out.append(f"{a} {b} {o.table[a][b]}")
            out.append("end")
        else:
            for row in o.table:
                out.append(" ".join(map(str, row)))
    return "\n".join(out) + "\n"
