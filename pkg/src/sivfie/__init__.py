"""Chelyshkov operational-matrix solver for 2-D stochastic Ito-Volterra-Fredholm
integral equations, with a Monte-Carlo error harness."""
from .basis import Basis, build_basis, eval_basis_1d, eval_basis_2d
from .harness import absolute_errors, compare_bases, confidence_interval, run_trials
from .problems import ProblemSpec, custom_problem, problem1, problem2
from .solver import SingularSystem, SolveResult, solve_sivfie
from .stochastic import BrownianPath, sample_brownian_path

__version__ = "0.1.0"
