"""Monotone iterations for mixed monotone operators on ordered sets.

A is mixed monotone when it is nondecreasing in x and nonincreasing in y. The
coupled iteration x_{n+1} = A(x_n, y_n), y_{n+1} = A(y_n, x_n) from x0 <= y0
produces nested brackets [x_n, y_n]; this package records them, classifies
the point they isolate, checks the theory exhaustively on small lattices and
solves cone problems with a certified contraction factor.
"""
from .cone import (ComponentwiseUniverse, LowerUpperPair, PhiSpec, SolveReport, cone_leq,
                   cone_vector, construct_lu_pair, grid_function_cone, linked,
                   multistart_coupled_search, phi_condition_check, power_phi, residual_bound,
                   self_bounded_check, solve)
from .engine import (AttractionVerdict, CoupledTrace, StopPolicy, VerdictKind, classify,
                     detect_lu_onset, is_coupled_fixed_point, is_coupled_lu_fixed_point, run,
                     sandwich_check)
from .errors import *  # noqa: F401,F403
from .finite import (FinitePoset, TableOperator, enumerate_coupled_fixed_points,
                     generate_random_lattice, generate_random_mixed_monotone, validate_poset)
from .operators import (BivariateOperator, OperatorPower, check_mixed_monotone, power_apply,
                        projection, s_compose)
from .oracle import check_instance, replay, verify_theorem_suite
from .order import OrderedUniverse, OrderInterval, intersect_interval_chain, sup_inf_of_trace
from .problems import ProblemSpec, builtin_problems, make_problem

__version__ = "0.1.0"
