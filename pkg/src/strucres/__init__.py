"""Structural resolution for Horn-clause logic programs.

Terms and substitutions (:mod:`strucres.terms`), matching and unification
(:mod:`strucres.unify`), programs and their concrete syntax
(:mod:`strucres.program`, :mod:`strucres.syntax`), reductions and the
productivity check (:mod:`strucres.reductions`), rewriting trees
(:mod:`strucres.trees`), proof search (:mod:`strucres.search`) and a
brute-force model oracle (:mod:`strucres.oracle`).
"""

from .program import Clause, Kind, Program, TypingFunction, goal_clause
from .reductions import (FuelExhausted, ProductivityVerdict, Verdict, productivity_check, rewrite_normal_form,
                         rewrite_step, s_step, sld_step)
from .search import (CoinductiveAnswer, Exhausted, Fail, FuelOut, ImpliedWitness, InductiveFailure,
                     NonProductiveRejected, Observation, Refutation, colp_s_solve, implied_at_infinity,
                     observe, s_refute, sld_solve)
from .syntax import ParseError, parse_clause, parse_program, parse_query, parse_term
from .terms import (App, RationalTerm, Substitution, Var, distance, gamma, rational_equal, truncate,
                    unfold)
from .trees import (EMPTY_TREE, RewTree, apply_subst_tree, build_rew, classify_nodes, find_success_subtree,
                    to_dot, transition)
from .unify import mgm, mgu

__version__ = "0.1.0"

__all__ = [
    "App", "Clause", "CoinductiveAnswer", "EMPTY_TREE", "Exhausted", "Fail", "FuelExhausted", "FuelOut",
    "ImpliedWitness", "InductiveFailure", "Kind", "NonProductiveRejected", "Observation", "ParseError",
    "ProductivityVerdict", "Program", "RationalTerm", "Refutation", "RewTree", "Substitution",
    "TypingFunction", "Var", "Verdict", "apply_subst_tree", "build_rew", "classify_nodes", "colp_s_solve",
    "distance", "find_success_subtree", "gamma", "goal_clause", "implied_at_infinity", "mgm", "mgu",
    "observe", "parse_clause", "parse_program", "parse_query", "parse_term", "productivity_check",
    "rational_equal", "rewrite_normal_form", "rewrite_step", "s_refute", "s_step", "sld_solve",
    "sld_step", "to_dot", "transition", "truncate", "unfold",
]
