"""normrel: finite-model verification of the correspondence between
Bourn-normal subobjects and internal equivalence relations, instantiated in
finite groups, finite groupoids over a fixed object set, and the variety of
groups extended with an empty model."""

from .structures import (
    GP, GPCIRC, GPDS, CONTEXTS,
    FiniteStructure, GroupoidShape, Operation, StructureMap, Subobject,
    ParseError, StructureError, StructureReport, Violation,
    are_isomorphic, canonical_final_map, compose_maps, dump_structure,
    enumerate_subobjects, final_kernel, final_structure, has_null_support,
    identity_map, is_mono, kernel, load_structure, load_structure_path,
    product_in_context, quotient, structure_map, subalgebra_closure,
    unit_element, validate_structure,
)
from .relations import (
    CarrierBoundExceeded, EquivRelation, MaltsevReport, RelationCheck,
    RelationError, RelationMorphism,
    as_relation, codiscrete, diagonal, enumerate_congruences, fully_faithful,
    generated_congruence, is_discrete_fibration, is_discrete_opfibration,
    is_effective, is_internal_equivalence, join, kernel_pair, meet, meet_all,
    parse_relation_literal, relation_morphism, relation_pair_subobject,
    verify_maltsev,
)
from .normality import (
    ComparisonMono, EpsilonComparison, EpsilonPrimeComparison,
    NormalityDiagnosis, NotBournNormalError,
    as_subobject, canonical_lift, counit_epsilon, counit_epsilon_prime,
    in_N0, in_n0, is_bourn_normal, is_bourn_normal_to,
    is_cartesian_discrete_fibration, nor, normal_to_witnesses, rel,
)
from .theorems import (
    CheckResult, VerificationReport, conjugation_closed, run_all,
    run_instance, suite_context_specific, suite_equivalence,
    suite_normalization, suite_rel, suite_triangles,
)
from . import catalog

__version__ = "0.1.0"
