"""Collocation assembly and linear solve for the 2-D stochastic integral equation.

With ``f ~ Psi^T F`` the collocated equation at a node ``(u, v)`` reads::

    Psi^T F - Psi^T K1 I_hat F - Psi^T K2 F_hat(F) P_hat Psi
            - Psi^T K3 F_hat(F) Q_hat Psi = Psi^T G

``F_hat`` is linear in ``F`` through the triple-product tensor, so every row is
linear in ``F`` and the system is solved once, without iteration.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from .basis import Basis, eval_basis_2d
from .opmat import OperationalMatrixSet, build_operational_matrices, triple_product_tensor_2d
from .problems import ProblemSpec
from .quadproj import (
    QuadratureRule,
    default_rule,
    evaluate_expansion,
    project_function_2d,
    project_kernel_4d,
)
from .stochastic import BrownianPath, StochasticOMSet, stochastic_om

PIVOT_RTOL = 1e-12


class SingularSystem(np.linalg.LinAlgError):
    def __init__(self, message, condition=np.inf, seed=None):
        super().__init__(message)
        self.condition = condition
        self.seed = seed


@dataclass(frozen=True, eq=False)
class CollocationSystem:
    A: np.ndarray
    rhs: np.ndarray
    nodes: list

    def __post_init__(self):
        n = self.A.shape[0]
        if self.A.shape != (n, n) or self.rhs.shape != (n,) or len(self.nodes) != n:
            raise ValueError("collocation system is not square with one row per node")


@dataclass(frozen=True, eq=False)
class SolveResult:
    F: np.ndarray
    residual_norm: float
    basis: Basis = field(repr=False)
    seed: int | None = None

    @property
    def degree(self) -> int:
        return self.basis.degree

    @property
    def basis_kind(self) -> str:
        return self.basis.kind

    def __call__(self, u, v):
        return evaluate_expansion(self.F, self.basis, u, v)


def newton_cotes_nodes(N: int) -> np.ndarray:
    """Midpoint nodes ``(2i - 1) / (2 (N + 1))``, ``i = 1..N+1``."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    i = np.arange(1, N + 2)
    return (2 * i - 1) / (2.0 * (N + 1))


def collocation_points(N: int) -> list:
    x = newton_cotes_nodes(N)
    return [(float(a), float(b)) for a in x for b in x]


def assemble_system(G, K1, K2, K3, omset: OperationalMatrixSet,
                    stochset: StochasticOMSet, basis: Basis,
                    ito_acts_on_solution: bool = True) -> CollocationSystem:
    """Build ``A F = rhs`` at the tensor grid of Newton-Cotes nodes.

    When ``ito_acts_on_solution`` is False the Ito term has no ``f`` factor and
    ``Psi^T K3 Q_hat Psi`` moves to the right-hand side.
    """
    n = basis.size_2d
    G = np.asarray(G, dtype=float)
    mats = [np.asarray(K, dtype=float) for K in (K1, K2, K3)]
    if G.shape != (n,):
        raise ValueError(f"G has shape {G.shape}, expected ({n},)")
    for name, K in zip(("K1", "K2", "K3"), mats):
        if K.shape != (n, n):
            raise ValueError(f"{name} has shape {K.shape}, expected ({n}, {n})")
    for name, M in (("I_hat", omset.I_hat), ("P_I_hat", omset.P_I_hat),
                    ("Q_s_hat", stochset.Q_s_hat)):
        if M.shape != (n, n):
            raise ValueError(f"{name} has shape {M.shape}, expected ({n}, {n})")
    K1, K2, K3 = mats

    nodes = collocation_points(basis.degree)
    pu = np.array([p[0] for p in nodes])
    pv = np.array([p[1] for p in nodes])
    Psi = eval_basis_2d(basis, pu, pv)  # one row per node
    T2 = triple_product_tensor_2d(omset.triple)

    fred = Psi @ (K1 @ omset.I_hat)
    # Psi^T K F_hat(F) W Psi = sum_{a,b,c} (K^T Psi)_a T2[a,b,c] (W Psi)_b F_c
    volt = np.einsum("pa,abc,pb->pc", Psi @ K2, T2, Psi @ omset.P_I_hat.T)
    ito_left = Psi @ K3
    ito_right = Psi @ stochset.Q_s_hat.T
    rhs = Psi @ G
    if ito_acts_on_solution:
        ito = np.einsum("pa,abc,pb->pc", ito_left, T2, ito_right)
    else:
        ito = np.zeros((n, n))
        rhs = rhs + np.einsum("pa,pa->p", ito_left, ito_right)
    A = Psi - fred - volt - ito
    return CollocationSystem(A, rhs, nodes)


def solve_linear(system: CollocationSystem, seed=None) -> np.ndarray:
    """Dense LU with partial pivoting; returns ``(F, max |A F - rhs|)``."""
    A, rhs = system.A, system.rhs
    scale = np.linalg.norm(A, np.inf)
    with warnings.catch_warnings():
        # singularity is judged by the pivot test below
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(A, check_finite=True)
    smallest = float(np.min(np.abs(np.diag(lu))))
    if scale == 0.0 or smallest < PIVOT_RTOL * scale:
        cond = float(np.linalg.cond(A)) if scale > 0 else np.inf
        raise SingularSystem(
            f"collocation matrix is singular: pivot {smallest:.3e} vs norm {scale:.3e}, "
            f"condition estimate {cond:.3e}",
            condition=cond, seed=seed,
        )
    F = lu_solve((lu, piv), rhs)
    residual = float(np.max(np.abs(A @ F - rhs)))
    return F, residual


def project_problem(problem: ProblemSpec, basis: Basis, path: BrownianPath,
                    rule: QuadratureRule | None = None):
    """Coefficients ``G`` and kernel matrices ``K1, K2, K3`` for one realisation."""
    rule = rule or default_rule(basis.degree)
    G = project_function_2d(lambda s, t: problem.g(s, t, path), basis, rule)
    Ks = [project_kernel_4d(k, basis, rule) for k in (problem.k1, problem.k2, problem.k3)]
    return G, Ks


def solve_sivfie(problem: ProblemSpec, basis: Basis, path: BrownianPath,
                 rule: QuadratureRule | None = None,
                 omset: OperationalMatrixSet | None = None) -> SolveResult:
    """Project, assemble and solve one realisation end to end."""
    rule = rule or default_rule(basis.degree)
    omset = omset or build_operational_matrices(basis, rule)
    G, (K1, K2, K3) = project_problem(problem, basis, path, rule)
    stoch = stochastic_om(basis, path)
    system = assemble_system(G, K1, K2, K3, omset, stoch, basis,
                             problem.ito_acts_on_solution)
    F, residual = solve_linear(system, seed=path.seed)
    F.setflags(write=False)
    return SolveResult(F, residual, basis, path.seed)
