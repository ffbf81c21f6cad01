"""Benchmark problems and the general problem container.

All callables are vectorised with numpy broadcasting:

* ``g(u, v, path)`` is the forcing term; it may read the Brownian path;
* kernels are ``k(u, v, s, t)``;
* ``exact(u, v)`` is the reference solution, if known.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .quadproj import gauss_legendre_rule
from .stochastic import (
    BrownianPath,
    ito_double_integral_oracle,
    path_value,
    running_path_integral,
)


def zero_kernel(u, v, s, t):
    return np.zeros(np.broadcast(u, v, s, t).shape)


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    name: str
    g: Callable
    k1: Callable = zero_kernel
    k2: Callable = zero_kernel
    k3: Callable = zero_kernel
    exact: Optional[Callable] = None
    # False: the Ito term is int int k3 dB dB with no f(s, t) factor
    ito_acts_on_solution: bool = True


def custom_problem(g, k1=zero_kernel, k2=zero_kernel, k3=zero_kernel, exact=None,
                   name="custom", ito_acts_on_solution=True) -> ProblemSpec:
    return ProblemSpec(name, g, k1, k2, k3, exact, ito_acts_on_solution)


# Problem 1 ---------------------------------------------------------------

def _p1_kernel(u, v, s, t):
    return u + v + s + t


def _p1_ito_kernel(u, v, s, t):
    return u * v * s * t


def _p1_forcing(u, v, path: BrownianPath):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    deterministic = -7.0 / 6.0 - u * v * (5 * u**2 + 9 * u * v + 5 * v**2) / 6.0
    left = u**2 * path_value(path, u) - 2.0 * running_path_integral(path, 0, u)
    right = v * path_value(path, v) - running_path_integral(path, 0, v)
    return deterministic - 2.0 * u * v * left * right


def _p1_exact(u, v):
    return np.asarray(u, dtype=float) + v


def problem1() -> ProblemSpec:
    """Linear-kernel benchmark with exact solution ``u + v``.

    The forcing keeps its original Brownian factor
    ``u**2 B(u) - 2 int_0^u B``; :func:`exact_solution_residual` measures how
    far that leaves ``u + v`` from solving the equation.
    """
    return ProblemSpec("problem1", _p1_forcing, _p1_kernel, _p1_kernel,
                       _p1_ito_kernel, _p1_exact)


# Problem 2 ---------------------------------------------------------------

def _p2_kernel(u, v, s, t):
    return u * s * np.sin(t + v)


def _p2_ito_kernel(u, v, s, t):
    return (s + t) * np.cos(u * v)


def _p2_forcing(u, v, path: BrownianPath):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    det = (
        u * v
        + (np.cos(v + 1) + np.sin(v) - np.sin(1 + v)) / 3.0
        + u**4 * (v * np.cos(2 * v) + np.sin(v) - np.sin(2 * v)) / 3.0
    )
    Bu = path_value(path, u)
    Bv = path_value(path, v)
    c = np.cos(u * v)
    sq_u = u**2 * Bu - 2.0 * running_path_integral(path, 1, u)
    sq_v = v**2 * Bv - 2.0 * running_path_integral(path, 1, v)
    lin_u = u * Bu - running_path_integral(path, 0, u)
    lin_v = v * Bv - running_path_integral(path, 0, v)
    return det - c * sq_u * lin_v - c * sq_v * lin_u


def _p2_exact(u, v):
    return np.asarray(u, dtype=float) * v


def problem2(ito_acts_on_solution: bool = True) -> ProblemSpec:
    """Trigonometric-kernel benchmark with exact solution ``u * v``.

    The reference form of this equation has no ``f(s, t)`` in its Ito term, but the
    Brownian part of the forcing is exactly the one produced by
    ``(s + t) cos(uv) f(s, t)`` with ``f = st``. ``ito_acts_on_solution=False``
    gives that reference form (kernel-only Ito forcing).
    """
    return ProblemSpec("problem2", _p2_forcing, _p2_kernel, _p2_kernel,
                       _p2_ito_kernel, _p2_exact, ito_acts_on_solution)


BUILTIN = {"1": problem1, "2": problem2, "problem1": problem1, "problem2": problem2}


def get_problem(name) -> ProblemSpec:
    try:
        return BUILTIN[str(name).strip().lower()]()
    except KeyError:
        raise ValueError(f"unknown problem {name!r}; expected 1 or 2") from None


# Config-defined problems ---------------------------------------------------

def _poly_term_list(terms, nvars, what):
    out = []
    for term in terms:
        coef = float(term["coef"])
        powers = [int(p) for p in term.get("powers", [0] * nvars)]
        if len(powers) != nvars or any(p < 0 for p in powers):
            raise ValueError(f"{what}: each term needs {nvars} nonnegative powers")
        out.append((coef, powers))
    return out


def _polynomial(terms):
    def f(*xs):
        xs = [np.asarray(x, dtype=float) for x in xs]
        total = np.zeros(np.broadcast(*xs).shape)
        for coef, powers in terms:
            part = coef
            for x, p in zip(xs, powers):
                part = part * x**p
            total = total + part
        return total
    return f


def _kernel_from_config(cfg, what):
    if cfg is None:
        return zero_kernel
    form = cfg.get("form", "zero")
    if form == "zero":
        return zero_kernel
    if form == "constant":
        c = float(cfg["value"])
        return lambda u, v, s, t: np.full(np.broadcast(u, v, s, t).shape, c)
    if form == "polynomial":
        return _polynomial(_poly_term_list(cfg["terms"], 4, what))
    raise ValueError(f"{what}: unknown kernel form {form!r}")


def _surface_from_config(cfg, what):
    form = cfg.get("form", "polynomial")
    if form == "polynomial":
        return _polynomial(_poly_term_list(cfg["terms"], 2, what))
    if form == "zero":
        return lambda u, v: np.zeros(np.broadcast(u, v).shape)
    raise ValueError(f"{what}: unknown form {form!r}")


def problem_from_config(cfg) -> ProblemSpec:
    """Build a problem from plain data; no code is evaluated.

    ``cfg`` is either a built-in name (``1``/``2``) or a mapping with a
    polynomial ``g`` and optional ``exact`` (terms of
    ``{"coef": c, "powers": [pu, pv]}``) plus kernels ``k1``..``k3`` given as
    ``{"form": "zero" | "constant" | "polynomial", ...}`` with 4-variable
    powers ``[pu, pv, ps, pt]``. The forcing is deterministic.
    """
    if isinstance(cfg, (str, int)):
        return get_problem(cfg)
    if "g" not in cfg:
        raise ValueError("custom problem needs a forcing term 'g'")
    g_det = _surface_from_config(cfg["g"], "g")
    exact = _surface_from_config(cfg["exact"], "exact") if cfg.get("exact") else None
    return ProblemSpec(
        name=str(cfg.get("name", "custom")),
        g=lambda u, v, path: g_det(u, v),
        k1=_kernel_from_config(cfg.get("k1"), "k1"),
        k2=_kernel_from_config(cfg.get("k2"), "k2"),
        k3=_kernel_from_config(cfg.get("k3"), "k3"),
        exact=exact,
        ito_acts_on_solution=bool(cfg.get("ito_acts_on_solution", True)),
    )


# Transcription check ------------------------------------------------------

def exact_solution_residual(problem: ProblemSpec, path: BrownianPath, u: float, v: float,
                            q: int = 24) -> float:
    """``f - g - Fredholm - Volterra - Ito`` at ``(u, v)`` for the exact ``f``.

    Deterministic integrals use Gauss-Legendre quadrature; the Ito double
    integral uses the left-point oracle on the path grid. A faithful forcing
    term gives a residual at the size of the oracle's discretisation error.
    """
    if problem.exact is None:
        raise ValueError(f"{problem.name} has no exact solution")
    f = problem.exact
    rule = gauss_legendre_rule(q)
    x, w = rule.nodes, rule.weights
    S, T = np.meshgrid(x, x, indexing="ij")
    W = np.outer(w, w)
    fred = np.sum(W * problem.k1(u, v, S, T) * f(S, T))
    Sv, Tv = u * S, v * T
    volt = u * v * np.sum(W * problem.k2(u, v, Sv, Tv) * f(Sv, Tv))
    if problem.ito_acts_on_solution:
        def integrand(s, t):
            return problem.k3(u, v, s, t) * f(s, t)
    else:
        def integrand(s, t):
            return problem.k3(u, v, s, t)
    ito = ito_double_integral_oracle(integrand, path, u, v)
    g = float(problem.g(u, v, path))
    return float(f(u, v)) - g - float(fred) - float(volt) - ito
