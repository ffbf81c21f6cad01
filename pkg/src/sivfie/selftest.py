"""Quick in-process invariant checks behind ``sivfie selftest``."""
from __future__ import annotations

import numpy as np

from .basis import build_basis, eval_basis_2d
from .opmat import gram_matrix_1d, integral_om
from .problems import custom_problem
from .quadproj import gauss_legendre_rule
from .solver import solve_sivfie
from .stochastic import ito_integral_oracle, sample_brownian_path, zero_path


def _orthonormality():
    worst = 0.0
    for kind in ("chelyshkov", "slp"):
        for N in range(9):
            b = build_basis(kind, N)
            g = gram_matrix_1d(b, gauss_legendre_rule(N + 2))
            worst = max(worst, float(np.max(np.abs(g - np.eye(N + 1)))))
    return worst < 1e-10, f"max |Gram - I| = {worst:.2e}"


def direct_integral_om(basis, q=12):
    """2-D integration matrix by nested quadrature, without any factorisation.

    ``int_0^u int_0^v Psi`` is itself integrated with a Gauss rule mapped onto
    ``[0, u] x [0, v]``, then projected with a tensor rule on the unit square.
    """
    rule = gauss_legendre_rule(q)
    x, w = rule.nodes, rule.weights
    n = basis.size_2d
    P = np.zeros((n, n))
    for u, wu in zip(x, w):
        for v, wv in zip(x, w):
            S, T = np.meshgrid(u * x, v * x, indexing="ij")
            inner = u * v * np.einsum("ab,abk->k", np.outer(w, w), eval_basis_2d(basis, S, T))
            P += wu * wv * np.outer(inner, eval_basis_2d(basis, u, v))
    return P


def _kronecker():
    b = build_basis("chelyshkov", 3)
    err = float(np.max(np.abs(integral_om(b) - direct_integral_om(b))))
    return err < 1e-10, f"max |P (x) P - direct 2-D quadrature| = {err:.2e}"


def _isometry(paths=2000, M=2**10):
    vals = np.empty(paths)
    for i in range(paths):
        vals[i] = ito_integral_oracle(lambda t: t, sample_brownian_path(M, 10_000 + i))
    sq = vals**2
    se = sq.std(ddof=1) / np.sqrt(paths)
    dev = abs(sq.mean() - 1.0 / 3.0)
    return dev < 3 * se, f"E[(int s dB)^2] = {sq.mean():.4f} (1/3, 3 SE = {3 * se:.4f})"


def _fredholm():
    def g(u, v, path):
        return 8.0 / 9.0 * u * v
    problem = custom_problem(g, k1=lambda u, v, s, t: u * v * s * t,
                             exact=lambda u, v: u * v)
    res = solve_sivfie(problem, build_basis("chelyshkov", 2), zero_path())
    x = np.linspace(0, 1, 7)
    U, V = np.meshgrid(x, x)
    err = float(np.max(np.abs(res(U, V) - U * V)))
    return err < 1e-9, f"max error {err:.2e}"


CHECKS = {
    "orthonormality": _orthonormality,
    "kronecker factorization": _kronecker,
    "ito isometry": _isometry,
    "fredholm exactness": _fredholm,
}


def run_selftest(echo=print) -> bool:
    ok_all = True
    for name, check in CHECKS.items():
        ok, detail = check()
        ok_all &= ok
        echo(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return ok_all
