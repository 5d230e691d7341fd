"""Symbolic terms with xor, equational unification, disjoint-theory
combination, and the DNUT tagging discipline."""

from .acun import Gf2System, build_gf2_system, unify_acun
from .bsca import (
    BscaConfig,
    BscaTrace,
    ChoiceSpaceExceeded,
    CombinedResult,
    combine_unifiers,
    purify_problems,
    purify_terms,
    solve_systems,
    split_problems,
    unify_combined,
    variable_identifications,
)
from .dnut import DnutReport, DnutViolation, dnut_check, dnut_tag
from .oracle import (
    BoundExceeded,
    GenConfig,
    HarnessReport,
    TheoremReport,
    check_theorem,
    free_unifiable,
    gen_dnut_protocol,
    gen_problem,
    gen_raw_protocol,
    gen_untagged_set,
    ground_unifiable,
    run_harness,
)
from .terms import (
    ZERO,
    Const,
    Penc,
    Pk,
    Problem,
    Senc,
    Seq,
    Sh,
    TagConst,
    Term,
    Theory,
    Var,
    Xor,
    Zero,
    acun_normal_form,
    equal_mod,
    interms,
    is_pure,
    is_subterm,
    subterms_of_set,
)
from .textfmt import (
    Entry,
    ParseError,
    ProblemFile,
    parse_problem_file,
    parse_substitution,
    parse_term,
    render_problem_file,
    render_substitution,
    render_term,
)
from .unify import ImpureTermError, Substitution, unify_free_xor, unify_std

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
