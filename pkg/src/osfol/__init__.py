"""Resolution theorem proving for order-sorted first-order logic.

The library covers the sorted language (hierarchies, signatures, terms,
clauses, formulas), order-sorted unification, the clausification and
un-Skolemization transforms, a saturation prover with replayable traces,
and a distributed report procedure over signature-labeled agent networks.
"""

from .language import (
    App,
    Atom,
    Clause,
    Exists,
    ForAll,
    Formula,
    FreshNames,
    Literal,
    Not,
    Or,
    And,
    Implies,
    Signature,
    Substitution,
    Var,
    WellSortednessError,
    apply_substitution,
    check_well_sorted,
    format_formula,
    standardize_apart,
)
from .network import Agent, AgentNetwork, combined_kb, common_language, validate_tree
from .parser import ParseError, parse_clause, parse_formula, parse_problem, print_problem
from .report import Message, ReportOutcome, osfol_recv, osfol_send, run_report, run_report_safe
from .saturation import (
    Limits,
    Proved,
    ResourceLimit,
    Saturated,
    factor,
    replay,
    resolvents,
    saturate,
    subsumes,
)
from .sorts import BOT, TOP, NoGlb, SortHierarchy, SortModuleError, load_sort_module, synthesize_glbs
from .transform import (
    check_acceptable,
    clausify,
    relativize,
    skolemize,
    to_prenex,
    unskolemize,
)
from .unification import UnifyFailure, merge_variables, unify_atoms, unify_terms

__all__ = [name for name in dir() if not name.startswith("_")]
