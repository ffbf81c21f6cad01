"""Gauss-Legendre quadrature on [0, 1] and projections onto the 2-D basis."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import Basis, eval_basis_1d, eval_basis_2d


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def order(self) -> int:
        return len(self.nodes)


def _legendre_and_derivative(q: int, x: np.ndarray):
    p0 = np.ones_like(x)
    p1 = x.copy()
    for n in range(1, q):
        p0, p1 = p1, ((2 * n + 1) * x * p1 - n * p0) / (n + 1)
    # derivative from P_q and P_{q-1}
    dp = q * (x * p1 - p0) / (x * x - 1.0)
    return p1, dp


def gauss_legendre_rule(q: int, tol: float = 1e-15, max_iter: int = 100) -> QuadratureRule:
    """``q``-point Gauss-Legendre rule mapped to [0, 1].

    Roots of ``P_q`` are found by Newton iteration from the Tricomi-style
    initial guesses ``cos(pi (k - 1/4) / (q + 1/2))``; nodes are returned in
    ascending order and the weights sum to one.
    """
    if int(q) != q or q < 1:
        raise ValueError(f"quadrature order must be a positive integer, got {q!r}")
    q = int(q)
    k = np.arange(1, q + 1)
    x = np.cos(np.pi * (k - 0.25) / (q + 0.5))
    converged = np.zeros(q, dtype=bool)
    for _ in range(max_iter):
        p, dp = _legendre_and_derivative(q, x)
        step = p / dp
        x = np.where(converged, x, x - step)
        converged |= np.abs(step) <= tol
        if converged.all():
            break
    else:
        bad = int(np.flatnonzero(~converged)[0])
        raise QuadratureError(
            f"Newton iteration for Gauss-Legendre node {bad} of {q} did not converge"
        )
    _, dp = _legendre_and_derivative(q, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    order = np.argsort(x)
    nodes = 0.5 * (x[order] + 1.0)
    weights = 0.5 * w[order]
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(nodes, weights)


def default_rule(N: int) -> QuadratureRule:
    """Per-axis rule of order ``2N + 4`` used for all projections."""
    return gauss_legendre_rule(2 * N + 4)


def weighted_basis(basis: Basis, rule: QuadratureRule) -> np.ndarray:
    """``A[i, a] = w_a psi_i(x_a)``: applying ``A`` to samples projects in 1-D."""
    return (eval_basis_1d(basis, rule.nodes) * rule.weights[:, None]).T


def _as_grid(values, shape) -> np.ndarray:
    return np.broadcast_to(np.asarray(values, dtype=float), shape)


def project_function_2d(y, basis: Basis, rule: QuadratureRule | None = None) -> np.ndarray:
    """Coefficients ``w_ij = int int psi_i(s) y(s, t) psi_j(t)`` in Kronecker order.

    ``y`` is a vectorised callable ``y(s, t)``.
    """
    rule = rule or default_rule(basis.degree)
    x = rule.nodes
    S, T = np.meshgrid(x, x, indexing="ij")
    Y = _as_grid(y(S, T), S.shape)
    A = weighted_basis(basis, rule)
    return (A @ Y @ A.T).reshape(-1)


def project_kernel_4d(kernel, basis: Basis, rule: QuadratureRule | None = None) -> np.ndarray:
    """Kernel matrix ``K`` with ``kernel(u,v,s,t) ~ Psi(u,v)^T K Psi(s,t)``.

    The kernel is sampled on the full 4-D tensor grid of ``rule``.
    """
    rule = rule or default_rule(basis.degree)
    x = rule.nodes
    U, V, S, T = np.meshgrid(x, x, x, x, indexing="ij")
    grid = _as_grid(kernel(U, V, S, T), U.shape)
    A = weighted_basis(basis, rule)
    K = np.einsum("ia,jb,abcd,kc,ld->ijkl", A, A, grid, A, A, optimize=True)
    n = basis.size_2d
    return K.reshape(n, n)


def evaluate_expansion(coeffs, basis: Basis, u, v):
    """``coeffs . Psi(u, v)``; broadcasts over ``u`` and ``v``."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (basis.size_2d,):
        raise ValueError(
            f"coefficient vector has shape {coeffs.shape}, expected ({basis.size_2d},)"
        )
    out = eval_basis_2d(basis, u, v) @ coeffs
    return out[()] if np.ndim(out) == 0 else out
