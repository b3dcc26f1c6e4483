"""Executable replay of the verified propositions on concrete instances.

Each suite runs a family of decidable checks over one structure and returns
a VerificationReport.  Failing checks carry a JSON-serializable witness
whose fields map onto CLI flags, so a failure can be replayed from the
command line.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

from . import normality
from .relations import (
    EquivRelation, kernel_pair, enumerate_congruences, meet_all,
)
from .structures import (
    GP, GPCIRC, GPDS,
    FiniteStructure, ParseError, StructureError, Subobject,
    enumerate_subobjects, final_kernel, has_null_support, kernel,
    load_structure_path, quotient, validate_structure,
)

SUITES = ("normalization", "rel", "triangles", "equivalence", "context")


@dataclass(frozen=True)
class CheckResult:
    id: str
    anchor: str
    passed: bool
    witness: Optional[dict] = None

    def to_dict(self) -> dict:
        return {"id": self.id, "anchor": self.anchor, "pass": self.passed,
                "witness": self.witness}


@dataclass
class VerificationReport:
    suite: str
    instance: str
    checks: list[CheckResult] = field(default_factory=list)
    ms: float = 0.0

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"suite": self.suite, "instance": self.instance,
                "checks": [c.to_dict() for c in self.checks],
                "ms": round(self.ms, 3)}

    def summary(self) -> str:
        good = sum(c.passed for c in self.checks)
        status = "PASS" if self.ok else "FAIL"
        return (f"{self.instance}: {self.suite} {good}/{len(self.checks)} "
                f"{status} ({self.ms:.1f} ms)")


class _Recorder:
    def __init__(self, suite: str, instance: str):
        self.report = VerificationReport(suite, instance)
        self.t0 = time.perf_counter()

    def add(self, check_id: str, anchor: str, passed: bool,
            witness: Optional[dict] = None):
        self.report.checks.append(
            CheckResult(check_id, anchor, bool(passed),
                        witness if not passed else None))

    def done(self) -> VerificationReport:
        self.report.ms = (time.perf_counter() - self.t0) * 1000.0
        return self.report


# cached per-instance analysis shared by the suites


@lru_cache(maxsize=256)
def _congruences(x: FiniteStructure, bound: int) -> tuple[EquivRelation, ...]:
    return tuple(enumerate_congruences(x, bound))


@lru_cache(maxsize=256)
def _subobjects(x: FiniteStructure) -> tuple[Subobject, ...]:
    return tuple(enumerate_subobjects(x))


def _subset_flag(sub: Subobject) -> str:
    return ",".join(map(str, sub.sorted_members()))


def _wit(sub: Optional[Subobject] = None, relation: Optional[EquivRelation] = None,
         **extra) -> dict:
    out: dict = dict(extra)
    if sub is not None:
        out["subset"] = _subset_flag(sub)
    if relation is not None:
        out["rel"] = relation.to_literal(include_singletons=True)
    return out


# ---------------------------------------------------------------------------
# suites


def suite_normalization(x: FiniteStructure, instance: str = "",
                        max_carrier: int = 12) -> VerificationReport:
    """Normalization facts: nor(R) is Bourn-normal to R and matches both the
    quotient kernel and the composite of a witnessed mono with the final
    kernel of its domain."""
    rec = _Recorder("normalization", instance or x.name)
    congs = _congruences(x, max_carrier)
    subs = _subobjects(x)
    for i, r in enumerate(congs):
        m = normality.nor(r)
        rec.add(f"nor-bourn-normal:R{i}",
                "the normalization of a relation is Bourn-normal to it",
                normality.is_bourn_normal_to(m, r),
                _wit(m, r))
        _, proj = quotient(x, r)
        rec.add(f"nor-eq-quotient-kernel:R{i}",
                "the normalization equals the kernel of the quotient projection",
                kernel(proj).members == m.members,
                _wit(m, r, quotient_kernel=sorted(kernel(proj).members)))
    for j, n in enumerate(subs):
        dom = n.structure()
        inc = n.sorted_members()
        kpart = final_kernel(dom)
        composite = frozenset(inc[a] for a in kpart.members)
        for i, r in enumerate(congs):
            if not normality.is_bourn_normal_to(n, r):
                continue
            m = normality.nor(r)
            rec.add(f"nor-eq-mono-after-final-kernel:N{j}:R{i}",
                    "nor(R) equals a witnessed mono composed with the final "
                    "kernel of its domain",
                    m.members == composite,
                    _wit(n, r, nor=sorted(m.members),
                         composite=sorted(composite)))
            equality_expected = has_null_support(dom)
            rec.add(f"nor-below-mono:N{j}:R{i}",
                    "nor(R) is contained in every witnessed mono, with "
                    "equality exactly for null-support domains",
                    m.members <= n.members
                    and (m.members == n.members) == equality_expected,
                    _wit(n, r, nor=sorted(m.members)))
    return rec.done()


def _coset_partition(x: FiniteStructure, members: frozenset[int]) -> EquivRelation:
    # group-theoretic route, independent of the congruence-closure engine
    mul = x.op("mul").table
    classes = []
    seen: set[int] = set()
    for a in x.elements:
        if a in seen:
            continue
        coset = sorted(mul[a][m] for m in members)
        seen.update(coset)
        classes.append(coset)
    return EquivRelation.from_classes(x, classes)


def suite_rel(x: FiniteStructure, instance: str = "",
              max_carrier: int = 12) -> VerificationReport:
    """The least-witness construction against the brute-force witness scan,
    plus the context-specific witness counting."""
    rec = _Recorder("rel", instance or x.name)
    congs = _congruences(x, max_carrier)
    subs = _subobjects(x)
    for j, n in enumerate(subs):
        witnesses = [r for r in congs if normality.is_bourn_normal_to(n, r)]
        verdict = normality.is_bourn_normal(n)
        rec.add(f"normal-iff-witnessed:N{j}",
                "the quantifier-free test agrees with the witness scan",
                bool(verdict) == bool(witnesses),
                _wit(n, detail=verdict.message,
                     witnesses=[w.to_literal(True) for w in witnesses]))
        if not witnesses:
            continue
        least = normality.rel(n)
        rec.add(f"rel-initial:N{j}",
                "rel(n) is the meet of every relation n is Bourn-normal to",
                least == meet_all(witnesses),
                _wit(n, relation=least))
        if x.context in (GP, GPDS):
            rec.add(f"witness-unique:N{j}",
                    "in a protomodular context the witnessing relation is unique",
                    len(witnesses) == 1,
                    _wit(n, count=len(witnesses)))
        if x.context == GP:
            cosets = _coset_partition(x, n.members)
            _, proj = quotient(x, cosets)
            rec.add(f"rel-eq-coset-kernel-pair:N{j}",
                    "rel(n) is the kernel pair of the projection onto the "
                    "coset quotient",
                    least == kernel_pair(proj),
                    _wit(n, relation=least))
    if x.context == GPCIRC and x.size:
        empty = Subobject(x, frozenset())
        witnesses = [r for r in congs if normality.is_bourn_normal_to(empty, r)]
        rec.add("empty-mono-witnesses",
                "the empty mono is Bourn-normal to every relation (witness "
                "uniqueness genuinely fails here)",
                len(witnesses) == len(congs) and len(witnesses) >= 2,
                _wit(empty, count=len(witnesses)))
    return rec.done()


def suite_triangles(x: FiniteStructure, instance: str = "",
                    max_carrier: int = 12) -> VerificationReport:
    """The two comparison equations and the bijectivity of the normalized
    comparison, checked as equalities of carrier maps and pair sets."""
    rec = _Recorder("triangles", instance or x.name)
    congs = _congruences(x, max_carrier)
    subs = _subobjects(x)
    for j, n in enumerate(subs):
        if not normality.is_bourn_normal(n):
            continue
        try:
            eps = normality.counit_epsilon(n)
        except StructureError as exc:
            rec.add(f"epsilon-identity:N{j}",
                    "the comparison into n is the final kernel of its domain",
                    False, _wit(n, error=str(exc)))
            continue
        rec.add(f"epsilon-identity:N{j}",
                "the comparison into n is the final kernel of its domain",
                eps.composite_members == eps.normalized.members, _wit(n))
        lhs = normality.rel(Subobject(x, eps.composite_members))
        epr = normality.counit_epsilon_prime(normality.rel(n))
        rec.add(f"rel-epsilon-eq-epsilon-prime:N{j}",
                "applying rel to the mono comparison gives the relation "
                "comparison at rel(n)",
                lhs == epr.inner and lhs.pairs() <= normality.rel(n).pairs(),
                _wit(n, lhs=lhs.to_literal(True),
                     rhs=epr.inner.to_literal(True)))
    for i, s in enumerate(congs):
        m = normality.nor(s)
        epr = normality.counit_epsilon_prime(s)
        inner_nor = normality.nor(epr.inner)
        eps_ns = normality.counit_epsilon(m)
        rec.add(f"nor-epsilon-prime-eq-epsilon:S{i}",
                "applying nor to the relation comparison gives the mono "
                "comparison at nor(S)",
                inner_nor.members == eps_ns.composite_members,
                _wit(m, s, inner_nor=sorted(inner_nor.members)))
        rec.add(f"nor-epsilon-prime-iso:S{i}",
                "the normalized comparison is a carrier bijection",
                inner_nor.members == m.members,
                _wit(m, s, inner_nor=sorted(inner_nor.members)))
    return rec.done()


def suite_equivalence(x: FiniteStructure, instance: str = "",
                      max_carrier: int = 12) -> VerificationReport:
    """Round trips on the coreflective classes and the comparison
    inequalities elsewhere."""
    rec = _Recorder("equivalence", instance or x.name)
    congs = _congruences(x, max_carrier)
    subs = _subobjects(x)
    bourn = [n for n in subs if normality.is_bourn_normal(n)]
    n0 = [n for n in bourn if has_null_support(n.structure())]
    for j, n in enumerate(n0):
        rec.add(f"nor-rel-identity:N{j}",
                "nor . rel is the identity on null-support Bourn-normal monos",
                normality.nor(normality.rel(n)).members == n.members,
                _wit(n))
    rel_n0 = []
    for n in n0:
        r = normality.rel(n)
        if r not in rel_n0:
            rel_n0.append(r)
    for i, s in enumerate(rel_n0):
        rec.add(f"rel-nor-identity:S{i}",
                "rel . nor is the identity on relations of null-support monos",
                normality.rel(normality.nor(s)) == s,
                _wit(relation=s))
    for j, n in enumerate(bourn):
        reflected = normality.nor(normality.rel(n))
        strict_expected = not has_null_support(n.structure())
        rec.add(f"coreflection:N{j}",
                "nor(rel(n)) <= n, strictly exactly off the null-support class",
                reflected.members <= n.members
                and (reflected.members < n.members) == strict_expected,
                _wit(n, reflected=sorted(reflected.members)))
    if x.context in (GP, GPDS):
        nor_members = {normality.nor(s).members for s in congs}
        rec.add("correspondence-counts",
                "nor and rel are mutually inverse bijections between "
                "relations and null-support Bourn-normal monos",
                len(n0) == len(congs)
                and set(rel_n0) == set(congs)
                and nor_members == {n.members for n in n0},
                {"n0": len(n0), "congruences": len(congs)})
    else:
        rec.add("rel-n0-trivial",
                "the image of the null-support class under rel is just the "
                "discrete relation",
                len(rel_n0) == 1,
                {"rel_n0": [r.to_literal(True) for r in rel_n0]})
    return rec.done()


def conjugation_closed(x: FiniteStructure, members: frozenset[int]) -> bool:
    """Conjugation test for wide subgroupoids, written directly against the
    tables so it shares nothing with the pullback checker."""
    g = x.groupoid
    comp = x.op("comp").table
    inv = x.op("inv").table
    for alpha in members:
        if g.src[alpha] != g.tgt[alpha]:
            continue
        y = g.src[alpha]
        for f in x.elements:
            if g.tgt[f] != y:
                continue
            if comp[comp[f][alpha]][inv[f]] not in members:
                return False
    return True


def suite_context_specific(x: FiniteStructure, instance: str = "",
                           max_carrier: int = 12) -> VerificationReport:
    """Per-context characterizations of the Bourn-normal monos."""
    rec = _Recorder("context", instance or x.name)
    congs = _congruences(x, max_carrier)
    subs = _subobjects(x)
    if x.context == GP:
        for j, n in enumerate(subs):
            if not normality.is_bourn_normal(n):
                continue
            _, proj = quotient(x, normality.rel(n))
            rec.add(f"bourn-normal-is-kernel:N{j}",
                    "every Bourn-normal mono of groups is the kernel of its "
                    "quotient projection",
                    kernel(proj).members == n.members,
                    _wit(n, quotient_kernel=sorted(kernel(proj).members)))
    elif x.context == GPDS:
        for j, n in enumerate(subs):
            rec.add(f"conjugation-agreement:N{j}",
                    "the pullback test agrees with closure under conjugation",
                    bool(normality.is_bourn_normal(n))
                    == conjugation_closed(x, n.members),
                    _wit(n))
    else:
        if x.size:
            for i, r in enumerate(congs):
                count = sum(
                    1 for n in subs if normality.is_bourn_normal_to(n, r))
                rec.add(f"two-bourn-normals:R{i}",
                        "every relation on a nonempty algebra has exactly two "
                        "Bourn-normal subobjects",
                        count == 2,
                        _wit(relation=r, count=count))
    return rec.done()


_SUITE_FUNCTIONS = {
    "normalization": suite_normalization,
    "rel": suite_rel,
    "triangles": suite_triangles,
    "equivalence": suite_equivalence,
    "context": suite_context_specific,
}


def run_instance(x: FiniteStructure, instance: str = "",
                 max_carrier: int = 12) -> VerificationReport:
    """All suites on one structure, merged into a single report with
    suite-prefixed check ids."""
    instance = instance or x.name
    t0 = time.perf_counter()
    merged = VerificationReport("all", instance)
    for suite_name in SUITES:
        part = _SUITE_FUNCTIONS[suite_name](x, instance, max_carrier)
        for c in part.checks:
            merged.checks.append(
                CheckResult(f"{suite_name}/{c.id}", c.anchor, c.passed,
                            c.witness))
    merged.ms = (time.perf_counter() - t0) * 1000.0
    return merged


def run_all(paths, max_carrier: int = 12) -> list[VerificationReport]:
    """One merged report per corpus file; a file that fails to load or
    validate contributes a load-failure report without aborting the batch."""
    reports = []
    for path in paths:
        instance = getattr(path, "stem", str(path))
        try:
            x = load_structure_path(path)
            report = validate_structure(x)
            if not report.ok:
                raise StructureError(
                    "axiom violations: "
                    + "; ".join(str(v) for v in report.violations))
        except (ParseError, StructureError) as exc:
            failed = VerificationReport("all", instance)
            failed.checks.append(CheckResult(
                "load", "the instance file loads and satisfies its axioms",
                False, {"error": str(exc), "path": str(path)}))
            reports.append(failed)
            continue
        reports.append(run_instance(x, instance, max_carrier))
    return reports
