"""Deterministic operational matrices: Gram, integration and product."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import Basis, eval_basis_1d, monomials
from .quadproj import QuadratureRule, default_rule, weighted_basis


@dataclass(frozen=True, eq=False)
class OperationalMatrixSet:
    I_hat: np.ndarray
    P_I: np.ndarray
    P_I_hat: np.ndarray
    triple: np.ndarray  # 1-D triple products T[a, b, c]

    @property
    def size_2d(self) -> int:
        return self.I_hat.shape[0]


def gram_matrix_1d(basis: Basis, rule: QuadratureRule | None = None) -> np.ndarray:
    rule = rule or default_rule(basis.degree)
    return weighted_basis(basis, rule) @ eval_basis_1d(basis, rule.nodes)


def gram_matrix(basis: Basis, rule: QuadratureRule | None = None) -> np.ndarray:
    """Quadrature of ``int int Psi(s,t) Psi(s,t)^T``.

    The tensor-product rule factorises, so this is the Kronecker square of the
    1-D Gram matrix. Nothing is rounded to the identity.
    """
    g = gram_matrix_1d(basis, rule)
    return np.kron(g, g)


def antiderivative_1d(basis: Basis, u) -> np.ndarray:
    """``int_0^u psi_i(s) ds`` for every member ``i``, evaluated exactly."""
    N = basis.degree
    u = np.asarray(u, dtype=float)
    powers = monomials(u, N + 1)[..., 1:] / np.arange(1, N + 2)
    return powers @ basis.H.T


def integral_matrix_1d(basis: Basis, rule: QuadratureRule | None = None) -> np.ndarray:
    """``P_I[i, j] = int_0^1 (int_0^u psi_i) psi_j(u) du``."""
    rule = rule or default_rule(basis.degree)
    if rule.order < basis.degree + 2:
        raise ValueError("integration matrix needs a rule of order >= N + 2")
    prim = antiderivative_1d(basis, rule.nodes)
    return (prim * rule.weights[:, None]).T @ eval_basis_1d(basis, rule.nodes)


def integral_om(basis: Basis, rule: QuadratureRule | None = None) -> np.ndarray:
    """2-D integration matrix with ``int_0^u int_0^v Psi ~ P_hat Psi(u, v)``."""
    p = integral_matrix_1d(basis, rule)
    return np.kron(p, p)


def triple_product_tensor(basis: Basis, rule: QuadratureRule | None = None) -> np.ndarray:
    rule = rule or default_rule(basis.degree)
    need = -(-(3 * basis.degree + 1) // 2) + 1
    if rule.order < need:
        raise ValueError(f"triple products need a rule of order >= {need}")
    V = eval_basis_1d(basis, rule.nodes)
    return np.einsum("q,qa,qb,qc->abc", rule.weights, V, V, V)


def triple_product_tensor_2d(triple: np.ndarray) -> np.ndarray:
    """2-D triple products ``T2[alpha, beta, gamma]`` in Kronecker order.

    ``T2[(a,b), (c,d), (i,j)] = T[a,c,i] * T[b,d,j]``.
    """
    n = triple.shape[0]
    t2 = np.einsum("aci,bdj->abcdij", triple, triple)
    return t2.reshape(n * n, n * n, n * n)


def product_om(F, triple: np.ndarray) -> np.ndarray:
    """Product matrix ``F_hat`` with ``Psi Psi^T F ~ F_hat Psi``; linear in ``F``."""
    n = triple.shape[0]
    F = np.asarray(F, dtype=float)
    if F.shape != (n * n,):
        raise ValueError(f"F has shape {F.shape}, expected ({n * n},)")
    Fhat = np.einsum("aci,bdj,ij->abcd", triple, triple, F.reshape(n, n))
    return Fhat.reshape(n * n, n * n)


def build_operational_matrices(
    basis: Basis, rule: QuadratureRule | None = None
) -> OperationalMatrixSet:
    rule = rule or default_rule(basis.degree)
    P = integral_matrix_1d(basis, rule)
    mats = OperationalMatrixSet(
        I_hat=gram_matrix(basis, rule),
        P_I=P,
        P_I_hat=np.kron(P, P),
        triple=triple_product_tensor(basis, rule),
    )
    for m in (mats.I_hat, mats.P_I, mats.P_I_hat, mats.triple):
        m.setflags(write=False)
    return mats
