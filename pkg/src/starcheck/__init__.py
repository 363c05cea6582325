"""Star-relation calculus and symmetry audits over finite algebras."""

from .algebra import (
    Congruence,
    FiniteAlgebra,
    Homomorphism,
    Signature,
    all_congruences,
    check_homomorphism,
    compose_homomorphisms,
    congruence_generated,
    constants_subalgebra,
    direct_power,
    identity_homomorphism,
    image_factorization,
    parse_algebra,
    serialize_algebra,
    subalgebra_closure,
)
from .checkers import (
    AuditReport,
    ConditionOutcome,
    GraphSymmetryVerdict,
    PermutabilityVerdict,
    ReflexiveEnumeration,
    SymmetryVerdict,
    Verdict,
    audit_algebra,
    check_star_permutes,
    enumerate_reflexive_compatible,
    graph_left_star_symmetric,
    is_left_star_symmetric,
    is_star_symmetric,
)
from .contexts import (
    IdealContext,
    NullClass,
    Pointed,
    ProtoPointed,
    Total,
    context_label,
    is_null_morphism,
    is_saturating,
    n_kernel,
    null_class,
    parse_context,
    validate_context,
)
from .errors import BudgetError, ContextError, ParseError
from .relations import (
    Relation,
    compose,
    congruence_relation,
    diagonal,
    full_relation,
    graph_image,
    inverse_image,
    kernel_pair,
    opposite,
    pair_set_text,
    relation_predicates,
    star,
    star_kernel,
    star_via_pullback,
)
from .terms import (
    App,
    SubstitutionGraph,
    FreeAlgebraModel,
    MaltsevSearch,
    SearchStatus,
    SubtractiveSearch,
    TermOperation,
    Var,
    substitution_graph,
    evaluate_term,
    find_e_subtractive_terms,
    find_maltsev_term,
    free_term_operations,
    term_table,
    term_text,
    verify_term_identities,
)

__version__ = "0.1.0"
