"""Builders for the bundled instance corpus.

Groups are given by explicit Cayley tables, groupoids by components: each
component is a set of objects together with a vertex group, and contributes
one arrow (s, t, g) for every ordered object pair in the component and every
group element.
"""

from __future__ import annotations

import itertools
from importlib import resources
from pathlib import Path

from .structures import (
    GP, GPCIRC, GPDS,
    FiniteStructure, GroupoidShape, Operation, StructureError,
    dump_structure, load_structure_path, unit_element,
)


def group_from_tables(mul, inv, name="", el_names=()) -> FiniteStructure:
    n = len(mul)
    ops = (Operation("mul", 2, tuple(tuple(r) for r in mul)),
           Operation("inv", 1, tuple(inv)))
    return FiniteStructure(GP, n, ops, name=name, el_names=tuple(el_names))


def cyclic_group(n: int, name: str = "") -> FiniteStructure:
    if n < 1:
        raise StructureError("cyclic group order must be positive")
    mul = [[(a + b) % n for b in range(n)] for a in range(n)]
    inv = [(-a) % n for a in range(n)]
    return group_from_tables(mul, inv, name or f"z{n}")


def direct_product(a: FiniteStructure, b: FiniteStructure,
                   name: str = "") -> FiniteStructure:
    if a.context != GP or b.context != GP:
        raise StructureError("direct_product expects gp structures")
    na, nb = a.size, b.size
    amul, ainv = a.op("mul").table, a.op("inv").table
    bmul, binv = b.op("mul").table, b.op("inv").table
    size = na * nb
    mul = [[amul[p // nb][q // nb] * nb + bmul[p % nb][q % nb]
            for q in range(size)] for p in range(size)]
    inv = [ainv[p // nb] * nb + binv[p % nb] for p in range(size)]
    return group_from_tables(mul, inv, name or f"{a.name}x{b.name}")


def klein_group(name: str = "z2xz2") -> FiniteStructure:
    return direct_product(cyclic_group(2), cyclic_group(2), name)


def dihedral_group(n: int, name: str = "") -> FiniteStructure:
    """Dihedral group of order 2n; element r^i s^j has index i + n*j."""
    if n < 1:
        raise StructureError("dihedral parameter must be positive")
    size = 2 * n

    def mul_el(p, q):
        i, j = p % n, p // n
        k, l = q % n, q // n
        return (i + (k if j == 0 else -k)) % n + n * ((j + l) % 2)

    mul = [[mul_el(p, q) for q in range(size)] for p in range(size)]
    inv = [next(q for q in range(size) if mul[p][q] == 0) for p in range(size)]
    return group_from_tables(mul, inv, name or f"d{n}")


def quaternion_group(name: str = "q8") -> FiniteStructure:
    """Unit quaternions; index 2*b + s encodes (-1)^s * basis[b]."""
    basis = "1ijk"
    prod = {
        ("1", "1"): (0, "1"), ("1", "i"): (0, "i"), ("1", "j"): (0, "j"),
        ("1", "k"): (0, "k"), ("i", "1"): (0, "i"), ("j", "1"): (0, "j"),
        ("k", "1"): (0, "k"), ("i", "i"): (1, "1"), ("j", "j"): (1, "1"),
        ("k", "k"): (1, "1"), ("i", "j"): (0, "k"), ("j", "i"): (1, "k"),
        ("j", "k"): (0, "i"), ("k", "j"): (1, "i"), ("k", "i"): (0, "j"),
        ("i", "k"): (1, "j"),
    }

    def mul_el(p, q):
        sign, b = prod[(basis[p // 2], basis[q // 2])]
        return 2 * basis.index(b) + (sign + p % 2 + q % 2) % 2

    mul = [[mul_el(p, q) for q in range(8)] for p in range(8)]
    inv = [next(q for q in range(8) if mul[p][q] == 0) for p in range(8)]
    names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
    return group_from_tables(mul, inv, name, names)


_S3_PERMS = ((0, 1, 2), (1, 0, 2), (2, 1, 0), (0, 2, 1), (1, 2, 0), (2, 0, 1))
_S3_NAMES = ("e", "s01", "s02", "s12", "r", "rr")


def symmetric_group3(name: str = "s3") -> FiniteStructure:
    """S3 on three points; index 1..3 are the transpositions."""
    perms = _S3_PERMS

    def compose(p, q):  # apply q first, then p
        return tuple(p[q[i]] for i in range(3))

    mul = [[perms.index(compose(p, q)) for q in perms] for p in perms]
    inv = [next(q for q in range(6) if mul[p][q] == 0) for p in range(6)]
    return group_from_tables(mul, inv, name, _S3_NAMES)


def as_gpcirc(group: FiniteStructure, name: str = "") -> FiniteStructure:
    """Reinterpret a group table in the quasi-pointed variety."""
    if group.context != GP:
        raise StructureError("as_gpcirc expects a gp structure")
    return FiniteStructure(GPCIRC, group.size, group.ops,
                           name=name or group.name, el_names=group.el_names)


def empty_algebra(name: str = "empty") -> FiniteStructure:
    ops = (Operation("mul", 2, ()), Operation("inv", 1, ()))
    return FiniteStructure(GPCIRC, 0, ops, name=name)


def groupoid_from_components(n_objects: int,
                             components: list[tuple[list[int], FiniteStructure]],
                             name: str = "") -> FiniteStructure:
    """Groupoid over n_objects whose connected components are given as
    (object list, vertex group) pairs covering the object set."""
    covered = sorted(obj for objs, _ in components for obj in objs)
    if covered != list(range(n_objects)):
        raise StructureError("components must partition the object set")
    arrows: list[tuple[int, int, int, int]] = []  # (component, src, tgt, g)
    for ci, (objs, grp) in enumerate(components):
        if grp.context != GP:
            raise StructureError("vertex structures must be groups")
        for s, t in itertools.product(sorted(objs), repeat=2):
            for g in grp.elements:
                arrows.append((ci, s, t, g))
    index = {arrow: i for i, arrow in enumerate(arrows)}
    n = len(arrows)
    src = tuple(a[1] for a in arrows)
    tgt = tuple(a[2] for a in arrows)
    comp_rows = []
    for (ci, s, t, g) in arrows:
        grp = components[ci][1]
        mul = grp.op("mul").table
        row = []
        for (cj, s2, t2, h) in arrows:
            if ci != cj or t != s2:
                row.append(None)
            else:
                row.append(index[(ci, s, t2, mul[g][h])])
        comp_rows.append(tuple(row))
    inv = tuple(index[(ci, t, s, components[ci][1].op("inv").table[g])]
                for (ci, s, t, g) in arrows)
    identities = []
    for obj in range(n_objects):
        ci = next(i for i, (objs, _) in enumerate(components) if obj in objs)
        e = unit_element(components[ci][1])
        identities.append(index[(ci, obj, obj, e)])
    shape = GroupoidShape(n_objects, src, tgt, tuple(identities))
    ops = (Operation("comp", 2, tuple(comp_rows)), Operation("inv", 1, inv))
    return FiniteStructure(GPDS, n, ops, shape, name=name)


def discrete_groupoid(n_objects: int, name: str = "") -> FiniteStructure:
    z1 = cyclic_group(1)
    comps = [([s], z1) for s in range(n_objects)]
    return groupoid_from_components(n_objects, comps, name or f"delta{n_objects}")


def indiscrete_groupoid(n_objects: int, name: str = "") -> FiniteStructure:
    return groupoid_from_components(
        n_objects, [(list(range(n_objects)), cyclic_group(1))],
        name or f"pair{n_objects}")


# ---------------------------------------------------------------------------
# the bundled corpus


def bundled_instances() -> dict[str, list[FiniteStructure]]:
    """All bundled structures, keyed by context subdirectory."""
    gp = [
        cyclic_group(1), cyclic_group(2), cyclic_group(3), cyclic_group(4),
        cyclic_group(5), cyclic_group(6), cyclic_group(7), cyclic_group(8),
        klein_group(),
        direct_product(cyclic_group(2), cyclic_group(4), "z2xz4"),
        direct_product(cyclic_group(2), klein_group(), "z2cubed"),
        symmetric_group3(),
        dihedral_group(4),
        quaternion_group(),
    ]
    z2 = cyclic_group(2)
    z3 = cyclic_group(3)
    gpcirc = [
        empty_algebra(),
        as_gpcirc(z2, "z2"),
        as_gpcirc(z3, "z3"),
        as_gpcirc(symmetric_group3(), "s3"),
    ]
    gpds = [
        discrete_groupoid(2, "delta2"),
        groupoid_from_components(2, [([0], z2), ([1], z2)], "disc_z2z2"),
        indiscrete_groupoid(2, "pair2"),
        groupoid_from_components(2, [([0, 1], z2)], "conn_z2"),
        indiscrete_groupoid(3, "pair3"),
        groupoid_from_components(3, [([0, 1], z2), ([2], z3)], "mixed_z2_z3"),
        groupoid_from_components(2, [([0, 1], klein_group())], "conn_klein"),
    ]
    return {"gp": gp, "gpcirc": gpcirc, "gpds": gpds}


def corpus_dir() -> Path:
    """Directory of the installed .alg corpus files."""
    return Path(resources.files("normrel") / "corpus")


def corpus_paths(context: str | None = None) -> list[Path]:
    root = corpus_dir()
    dirs = [root / context] if context else sorted(p for p in root.iterdir()
                                                   if p.is_dir())
    out: list[Path] = []
    for d in dirs:
        out.extend(sorted(d.glob("*.alg")))
    return out


def load_corpus(context: str | None = None) -> list[FiniteStructure]:
    return [load_structure_path(p) for p in corpus_paths(context)]


def write_bundled_corpus(target: Path) -> list[Path]:
    """Regenerate the .alg corpus under ``target`` (used to build the
    committed files; tests check the committed files match)."""
    target = Path(target)
    written = []
    for sub, instances in bundled_instances().items():
        d = target / sub
        d.mkdir(parents=True, exist_ok=True)
        for x in instances:
            p = d / f"{x.name}.alg"
            p.write_text(dump_structure(x), encoding="utf-8")
            written.append(p)
    return written
