"""Orthonormal polynomial bases on [0, 1] and their monomial transforms.

A basis of degree ``N`` is carried by a square matrix ``H`` whose row ``i``
holds the monomial coefficients of the ``i``-th orthonormal polynomial, so that
``Psi(s) = H @ (1, s, ..., s**N)``.

Two families are supported:

* ``"chelyshkov"``: orthonormal Chelyshkov polynomials. Every member depends
  on ``N``; member ``i`` spans the powers ``s**i ... s**N`` and ``H`` is upper
  triangular.
* ``"slp"``: shifted Legendre polynomials ``sqrt(2i+1) P_i(2s-1)``. ``H`` is
  lower triangular.

2-D vectors use Kronecker order: entry ``(i, j)`` sits at ``i*(N+1) + j``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np
from scipy.linalg import solve_triangular

CHELYSHKOV = "chelyshkov"
SHIFTED_LEGENDRE = "slp"
KINDS = (CHELYSHKOV, SHIFTED_LEGENDRE)

_INT64_MAX = 2**63 - 1

_ALIASES = {
    "chelyshkov": CHELYSHKOV,
    "ocp": CHELYSHKOV,
    "slp": SHIFTED_LEGENDRE,
    "shifted_legendre": SHIFTED_LEGENDRE,
    "shiftedlegendre": SHIFTED_LEGENDRE,
    "legendre": SHIFTED_LEGENDRE,
}


class BasisOverflowError(OverflowError):
    """Integer coefficients of the requested degree do not fit in 64 bits."""


@dataclass(frozen=True, eq=False)
class Basis:
    kind: str
    degree: int
    # integer monomial coefficients before the sqrt(2i+1) normalisation
    int_coeffs: tuple = field(repr=False)
    H: np.ndarray = field(repr=False)
    Hinv: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return self.degree + 1

    @property
    def size_2d(self) -> int:
        return (self.degree + 1) ** 2


def normalize_kind(kind: str) -> str:
    try:
        return _ALIASES[kind.strip().lower()]
    except KeyError:
        raise ValueError(f"unknown basis kind {kind!r}; expected one of {KINDS}") from None


def _check_int64(value: int, N: int) -> int:
    if abs(value) > _INT64_MAX:
        raise BasisOverflowError(
            f"coefficient {value} exceeds 64-bit range at degree N={N}"
        )
    return value


def _chelyshkov_int_rows(N: int) -> list[list[int]]:
    rows = []
    for i in range(N + 1):
        row = [0] * (N + 1)
        for k in range(N - i + 1):
            a = _check_int64(comb(N - i, k), N)
            b = _check_int64(comb(N + k + i + 1, N - i), N)
            row[k + i] = _check_int64((-1) ** k * a * b, N)
        rows.append(row)
    return rows


def _shifted_legendre_int_rows(N: int) -> list[list[int]]:
    # (n+1) P_{n+1} = (2n+1)(2s-1) P_n - n P_{n-1}, in exact rationals
    polys: list[list[Fraction]] = [[Fraction(1)] + [Fraction(0)] * N]
    if N >= 1:
        polys.append([Fraction(-1), Fraction(2)] + [Fraction(0)] * (N - 1))
    for n in range(1, N):
        p, q = polys[n], polys[n - 1]
        nxt = [Fraction(0)] * (N + 1)
        for k in range(N + 1):
            shifted = 2 * p[k - 1] if k > 0 else Fraction(0)
            nxt[k] = ((2 * n + 1) * (shifted - p[k]) - n * q[k]) / (n + 1)
        polys.append(nxt)
    rows = []
    for poly in polys:
        row = []
        for c in poly:
            if c.denominator != 1:
                raise ArithmeticError("shifted Legendre coefficient is not integral")
            row.append(_check_int64(int(c), N))
        rows.append(row)
    return rows


def build_basis(kind: str, N: int) -> Basis:
    """Build the degree-``N`` orthonormal basis of the given kind.

    Coefficients are first assembled as exact integers (``int_coeffs``) and
    only then scaled by ``sqrt(2i+1)`` in double precision. Degrees whose
    integer coefficients leave the signed 64-bit range raise
    :class:`BasisOverflowError`.
    """
    kind = normalize_kind(kind)
    if int(N) != N or N < 0:
        raise ValueError(f"degree must be a nonnegative integer, got {N!r}")
    N = int(N)
    if kind == CHELYSHKOV:
        rows = _chelyshkov_int_rows(N)
    else:
        rows = _shifted_legendre_int_rows(N)

    scale = np.sqrt(2.0 * np.arange(N + 1) + 1.0)
    H = np.array(rows, dtype=float) * scale[:, None]
    lower = kind == SHIFTED_LEGENDRE
    Hinv = solve_triangular(H, np.eye(N + 1), lower=lower)
    H.setflags(write=False)
    Hinv.setflags(write=False)
    return Basis(kind, N, tuple(tuple(r) for r in rows), H, Hinv)


def monomials(s, N: int) -> np.ndarray:
    """Rows ``(1, s, ..., s**N)`` for each entry of ``s`` (shape ``s.shape + (N+1,)``)."""
    s = np.asarray(s, dtype=float)
    out = np.empty(s.shape + (N + 1,))
    out[..., 0] = 1.0
    for k in range(1, N + 1):
        out[..., k] = out[..., k - 1] * s
    return out


def eval_basis_1d(basis: Basis, s) -> np.ndarray:
    """Evaluate ``Psi(s) = H T_N(s)``; vectorised over ``s``."""
    return monomials(s, basis.degree) @ basis.H.T


def eval_basis_2d(basis: Basis, s, t) -> np.ndarray:
    """Kronecker product ``Psi(s) (x) Psi(t)``, broadcast over ``s`` and ``t``."""
    ps = eval_basis_1d(basis, s)
    pt = eval_basis_1d(basis, t)
    n = basis.size
    out = ps[..., :, None] * pt[..., None, :]
    return out.reshape(out.shape[:-2] + (n * n,))


def jacobi_p(n: int, alpha: float, beta: float, x):
    """Jacobi polynomial ``P_n^{(alpha, beta)}(x)`` by the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    if n == 0:
        return p_prev
    p = (alpha + 1.0) + (alpha + beta + 2.0) * (x - 1.0) / 2.0
    for m in range(2, n + 1):
        c = 2 * m + alpha + beta
        a1 = 2 * m * (m + alpha + beta) * (c - 2)
        a2 = (c - 1) * (alpha * alpha - beta * beta)
        a3 = (c - 1) * c * (c - 2)
        a4 = 2 * (m + alpha - 1) * (m + beta - 1) * c
        p_prev, p = p, ((a2 + a3 * x) * p - a4 * p_prev) / a1
    return p


def jacobi_crosscheck(basis: Basis, i: int, s):
    """Unnormalised Chelyshkov member ``i`` through its Jacobi representation.

    Returns ``(-1)**(N-i) * s**i * P_{N-i}^{(0, 2i+1)}(2s - 1)``; multiplying by
    ``sqrt(2i+1)`` should reproduce ``eval_basis_1d(basis, s)[..., i]``.
    """
    if basis.kind != CHELYSHKOV:
        raise ValueError("Jacobi cross-check applies to the Chelyshkov basis only")
    N = basis.degree
    if not 0 <= i <= N:
        raise IndexError(f"member index {i} outside 0..{N}")
    s = np.asarray(s, dtype=float)
    return (-1) ** (N - i) * s**i * jacobi_p(N - i, 0.0, 2.0 * i + 1.0, 2.0 * s - 1.0)
