"""Workbench for probabilistic team semantics.

Evaluate dependency-logic formulas on finite weighted teams with exact
rational arithmetic, translate between the logics, and decide
satisfiability, validity, and conditional-independence implication by
compilation into first-order real arithmetic.
"""

from .atoms import (AtomVerdict, eval_conditional_independence,
                    eval_dependence, eval_fo_literal,
                    eval_marginal_equivalence, eval_marginal_identity)
from .checker import Strategy, Verdict, check, check_qpl, eval_flat, witness_search
from .parser import Mode, parse, parse_fo, parse_qpl
from .rewrite import (FreshNameSource, TargetLogic, ci_to_marg_indep,
                      dep_to_ci, dep_to_equiv, equiv_to_identity_dep,
                      identity_to_equiv, identity_to_marg_indep, lower)
from .solver import SolverConfig, SolverVerdict, linear_qe, solve
from .syntax import Formula, expand_sugar, free_vars, unparse
from .team import (BINARY_STRUCTURE, LocalDistribution, ProbabilisticTeam,
                   Structure, compact, default_structure, duplicate, extend,
                   load_structure, load_team, marginal_weight, normalize,
                   plain_union, restrict, scaled_union, support)

__version__ = "0.1.0"
