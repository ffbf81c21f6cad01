"""Brownian paths, reference Ito integrals and the stochastic operational matrix.

Paths live on a uniform grid ``t_k = k / M`` over [0, 1]. Increments are drawn
from ``numpy.random.Generator(PCG64(seed)).standard_normal`` (numpy's ziggurat
normal sampler) and scaled by ``sqrt(1/M)``; the same ``(M, seed)`` therefore
replays the same path bit for bit on a given numpy build.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .basis import Basis

DEFAULT_GRID = 2**12
ORACLE_GRID = 2**14


class DomainError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class BrownianPath:
    M: int
    values: np.ndarray = field(repr=False)
    increments: np.ndarray = field(repr=False)
    seed: int | None = None

    @property
    def dt(self) -> float:
        return 1.0 / self.M

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.M + 1) / self.M

    @classmethod
    def from_values(cls, values, seed: int | None = None) -> "BrownianPath":
        """Wrap an explicit grid of values (``values[0]`` must be 0)."""
        values = np.array(values, dtype=float)
        if values.ndim != 1 or len(values) < 2:
            raise ValueError("a path needs at least two grid values")
        if values[0] != 0.0:
            raise ValueError("Brownian paths start at 0")
        values.setflags(write=False)
        inc = np.diff(values)
        inc.setflags(write=False)
        return cls(len(values) - 1, values, inc, seed)


def _is_power_of_two(m: int) -> bool:
    return m >= 1 and m & (m - 1) == 0


def sample_brownian_path(M: int = DEFAULT_GRID, seed: int = 0) -> BrownianPath:
    if not _is_power_of_two(M) or M < 2:
        raise ValueError(f"grid size must be a power of two >= 2, got {M}")
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    rng = np.random.Generator(np.random.PCG64(seed))
    inc = rng.standard_normal(M) * np.sqrt(1.0 / M)
    values = np.empty(M + 1)
    values[0] = 0.0
    np.cumsum(inc, out=values[1:])
    inc.setflags(write=False)
    values.setflags(write=False)
    return BrownianPath(M, values, inc, int(seed))


def zero_path(M: int = 4) -> BrownianPath:
    """Path with all increments zero; removes every Brownian term."""
    return BrownianPath.from_values(np.zeros(M + 1))


def _check_unit(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any((t < 0.0) | (t > 1.0)) or np.any(np.isnan(t)):
        raise DomainError("time outside [0, 1]")
    return t


def path_value(path: BrownianPath, t):
    """Piecewise-linear interpolation of the path; exact at grid points."""
    t = _check_unit(t)
    out = np.interp(t * path.M, np.arange(path.M + 1), path.values)
    return float(out) if out.ndim == 0 else out


def _interval_nodes(path: BrownianPath, a: float, b: float) -> np.ndarray:
    if not 0.0 <= a <= b <= 1.0:
        raise DomainError(f"invalid interval [{a}, {b}]")
    lo = int(np.floor(a * path.M)) + 1
    hi = int(np.ceil(b * path.M)) - 1
    inner = np.arange(lo, hi + 1) / path.M
    inner = inner[(inner > a) & (inner < b)]
    return np.concatenate(([a], inner, [b]))


def weighted_path_integral(path: BrownianPath, k: int, a: float, b: float) -> float:
    """Trapezoidal ``int_a^b s**k B(s) ds`` on the path grid.

    Partial cells at either end use interpolated path values.
    """
    if a == b:
        if not 0.0 <= a <= 1.0:
            raise DomainError(f"invalid interval [{a}, {b}]")
        return 0.0
    s = _interval_nodes(path, a, b)
    f = s**k * path_value(path, s)
    return float(np.sum(0.5 * np.diff(s) * (f[:-1] + f[1:])))


def running_path_integral(path: BrownianPath, k: int, x):
    """Vectorised ``int_0^x s**k B(s) ds`` with the same trapezoid as
    :func:`weighted_path_integral` (equal up to summation order)."""
    x = _check_unit(x)
    t = path.times
    f = t**k * path.values
    cum = np.concatenate(([0.0], np.cumsum(0.5 * path.dt * (f[:-1] + f[1:]))))
    idx = np.minimum(np.floor(x * path.M).astype(int), path.M - 1)
    fx = x**k * path_value(path, x)
    out = cum[idx] + 0.5 * (x - t[idx]) * (f[idx] + fx)
    return float(out) if out.ndim == 0 else out


def ito_integral_oracle(h, path: BrownianPath, a: float = 0.0, b: float = 1.0) -> float:
    """Left-point sum ``sum h(t_k) (B(t_{k+1}) - B(t_k))`` over ``[a, b]``.

    ``h`` is a vectorised callable of time; a path-dependent integrand can
    close over the path (e.g. ``lambda t: path_value(path, t)``).
    """
    if a == b:
        return 0.0
    s = _interval_nodes(path, a, b)
    dB = np.diff(path_value(path, s))
    hv = np.broadcast_to(np.asarray(h(s[:-1]), dtype=float), dB.shape)
    return float(np.dot(hv, dB))


def ito_double_integral_oracle(h2, path: BrownianPath, u: float, v: float) -> float:
    """Left-point sum of ``int_0^u int_0^v h2(s, t) dB(t) dB(s)``.

    Cost is quadratic in the number of grid cells; use a modest grid.
    """
    if u == 0.0 or v == 0.0:
        return 0.0
    s = _interval_nodes(path, 0.0, u)
    t = _interval_nodes(path, 0.0, v)
    dBs = np.diff(path_value(path, s))
    dBt = np.diff(path_value(path, t))
    S, T = np.meshgrid(s[:-1], t[:-1], indexing="ij")
    hv = np.broadcast_to(np.asarray(h2(S, T), dtype=float), S.shape)
    return float(dBs @ hv @ dBt)


def phi_s_diagonal(N: int, b_quarter: float, b_half: float) -> np.ndarray:
    """Simpson-rule coefficients ``(1 - i/6) B(1/2) - i / (3 * 2**(i-2)) B(1/4)``.

    For ``N >= 7`` the ``B(1/2)`` weight turns negative; no guard is applied.
    """
    i = np.arange(N + 1, dtype=float)
    return (1.0 - i / 6.0) * b_half - (i / (3.0 * 2.0 ** (i - 2.0))) * b_quarter


def phi_s_matrix(N: int, path: BrownianPath) -> np.ndarray:
    d = phi_s_diagonal(N, path_value(path, 0.25), path_value(path, 0.5))
    return np.diag(d)


@dataclass(frozen=True, eq=False)
class StochasticOMSet:
    Phi_s: np.ndarray
    Q_s: np.ndarray
    Q_s_hat: np.ndarray


def stochastic_om(basis: Basis, path: BrownianPath) -> StochasticOMSet:
    """``Q_s = H Phi_s H^-1`` and its Kronecker square."""
    phi = phi_s_matrix(basis.degree, path)
    q = basis.H @ phi @ basis.Hinv
    q_hat = np.kron(q, q)
    for m in (phi, q, q_hat):
        m.setflags(write=False)
    return StochasticOMSet(phi, q, q_hat)


def save_path_csv(path: BrownianPath, destination) -> None:
    destination = Path(destination)
    with destination.open("w", newline="") as fh:
        fh.write(f"# seed={path.seed if path.seed is not None else ''}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "B"])
        for t, b in zip(path.times, path.values):
            writer.writerow([repr(float(t)), repr(float(b))])


def load_path_csv(source) -> BrownianPath:
    source = Path(source)
    seed = None
    with source.open(newline="") as fh:
        first = fh.readline()
        if first.startswith("# seed="):
            raw = first.strip()[len("# seed="):]
            seed = int(raw) if raw else None
        else:
            fh.seek(0)
        reader = csv.DictReader(fh)
        rows = [(float(r["t"]), float(r["B"])) for r in reader]
    times = np.array([r[0] for r in rows])
    M = len(rows) - 1
    if M < 1 or not np.allclose(times, np.arange(M + 1) / M, rtol=0, atol=1e-15):
        raise ValueError(f"{source}: times are not a uniform grid on [0, 1]")
    return BrownianPath.from_values([r[1] for r in rows], seed=seed)
