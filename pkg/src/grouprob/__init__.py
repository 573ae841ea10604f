"""grouprob: exact verification of stochastic inequalities on metric groups.

The package enumerates Rademacher-sum laws on abelian metric (semi)groups
in exact rational arithmetic, checks the moment-comparison, maximal,
tail-product, and i.i.d. maximal inequalities with their explicit
universal constants, builds the constructive Banach envelope for normed
instances, and certifies bi-invariant word-norm bounds on free groups.
"""

from .algebra import (AuditReport, GroupError, GroupInstance,
                      InstanceMismatchError, adjoin_identity, audit_axioms,
                      find_idempotent)
from .envelope import (BanachEnvelope, EnvelopeElement, FiniteDistribution,
                       NotNormedError, Stage, check_cancellative,
                       embed_to_banach, envelope_roundtrip)
from .instances import (KINDS, SpecError, enumerate_elements, list_kinds,
                        parse_group_spec, serialize_group_spec)
from .normedness import (check_j_normed, check_normed_equivalence,
                         check_torsion_free, check_weak_commutativity)
from .rademacher import (DistanceDistribution, LaminarFamily,
                         RademacherScenario, check_kk, check_levy, check_mont,
                         check_tail_product, dyadic_level, enumerate_levy,
                         enumerate_rademacher, kk_constant, moment,
                         sample_rademacher, sharpness_ratio, validate_laminar)
from .reports import InequalityReport
from .wordnorm import (ConjugateDecomposition, ConjugateFactor, NormBounds,
                       abelianization_lower_bound, biinv_norm, free_reduce,
                       parse_word, refute_normedness_f2, verify_witness)

__version__ = "0.1.0"

__all__ = [
    "AuditReport", "BanachEnvelope", "ConjugateDecomposition",
    "ConjugateFactor", "DistanceDistribution", "EnvelopeElement",
    "FiniteDistribution", "GroupError", "GroupInstance", "InequalityReport",
    "InstanceMismatchError", "KINDS", "LaminarFamily", "NormBounds",
    "NotNormedError", "RademacherScenario", "SpecError", "Stage",
    "abelianization_lower_bound", "adjoin_identity", "audit_axioms",
    "biinv_norm", "check_cancellative", "check_j_normed", "check_kk",
    "check_levy", "check_mont", "check_normed_equivalence",
    "check_tail_product", "check_torsion_free", "check_weak_commutativity",
    "dyadic_level", "embed_to_banach", "enumerate_elements", "enumerate_levy",
    "enumerate_rademacher", "envelope_roundtrip", "find_idempotent",
    "free_reduce", "kk_constant", "list_kinds", "moment", "parse_group_spec",
    "parse_word", "refute_normedness_f2", "sample_rademacher",
    "serialize_group_spec", "sharpness_ratio", "validate_laminar",
    "verify_witness",
]
