"""eqseq: proof toolkit for G3-style sequent calculi with equality."""

from .syntax import (
    Atom,
    BOT,
    BoundVar,
    Eq,
    EqSeqError,
    Formula,
    FunApp,
    Param,
    Sequent,
    Term,
    occurrences,
    replace_at,
    substitute,
)
from .calculus import (
    CalculusSpec,
    Flag,
    PRESETS,
    Precedence,
    Replacement,
    RuleId,
    RuleInstance,
    applicable_instances,
    premisses_of,
    resolve_preset,
    resolve_spec,
)
from .checker import CheckReport, Derivation, check, stats
from .parser import (
    ParseError,
    parse_derivation,
    parse_formula,
    parse_sequent,
    parse_term,
    print_derivation,
    print_formula,
    print_sequent,
)
from .search import (
    Chain,
    DecidedUnderivable,
    Exhausted,
    Proved,
    SearchLimits,
    Signature,
    WitnessPlan,
    chain_extract,
    chain_to_derivation,
    decide_function_free,
    exact_decide,
    prove,
    saturate_forward,
)
from .transform import (
    TransformReport,
    cut_eliminate_pipeline,
    eliminate_rep1r_plus,
    eliminate_rep2r_plus,
    equivalence_translate,
    orient_function_free,
    project_succedent,
    renormalize,
    right_normalize,
    scope_restrict,
    semishorten,
    single_occurrence_normalize,
    weaken_hp,
)

__all__ = [
    "Atom",
    "BOT",
    "BoundVar",
    "CalculusSpec",
    "Chain",
    "CheckReport",
    "DecidedUnderivable",
    "Derivation",
    "Eq",
    "EqSeqError",
    "Exhausted",
    "Flag",
    "Formula",
    "FunApp",
    "PRESETS",
    "Param",
    "ParseError",
    "Precedence",
    "Proved",
    "Replacement",
    "RuleId",
    "RuleInstance",
    "SearchLimits",
    "Sequent",
    "Signature",
    "Term",
    "TransformReport",
    "WitnessPlan",
    "applicable_instances",
    "chain_extract",
    "chain_to_derivation",
    "check",
    "cut_eliminate_pipeline",
    "decide_function_free",
    "eliminate_rep1r_plus",
    "eliminate_rep2r_plus",
    "equivalence_translate",
    "exact_decide",
    "occurrences",
    "orient_function_free",
    "parse_derivation",
    "parse_formula",
    "parse_sequent",
    "parse_term",
    "premisses_of",
    "print_derivation",
    "print_formula",
    "print_sequent",
    "project_succedent",
    "prove",
    "renormalize",
    "replace_at",
    "resolve_preset",
    "resolve_spec",
    "right_normalize",
    "saturate_forward",
    "scope_restrict",
    "semishorten",
    "single_occurrence_normalize",
    "stats",
    "substitute",
    "weaken_hp",
]

__version__ = "0.1.0"
