"""A dense cyclic subgroup of T^H_p, built and certified at desk scale.

The generator is ``omega_0 = (exp(2 pi i a_n))`` with rationally independent,
rapidly decreasing ``a_n``.  Condition ``a_n < 1 / (2^n k_n)`` involves the
Kronecker covering number ``k_n`` of ``(a_1, ..., a_{n-1})`` at tolerance
``2^-n``; only an upper bound for it is computable, obtained from a grid sweep
plus the 1-Lipschitz dependence of the residuals on the targets.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .errors import BudgetExhausted, ParameterError, SpecTooShort
from .torus import TorusSeq, canonical_angles, dist_p, validate_p

PRIMES = (2, 3, 5, 7, 11, 13)
MAX_LEVEL = 4
RESIDUAL_SLACK = 1e-15
_CHUNK = 1 << 18


def nearest_int_dist(x: np.ndarray) -> np.ndarray:
    """``<x>``: distance to the nearest integer."""
    return np.abs(x - np.rint(x))


def _slack(k: np.ndarray, alphas: np.ndarray, targets: np.ndarray) -> np.ndarray:
    # open comparison, padded by the rounding error of k*a - y so a float
    # residual never claims more than the exact one
    mag = np.abs(k)[:, None] * np.abs(alphas)[None, :] + np.abs(targets)[None, :] + 1.0
    return RESIDUAL_SLACK + 8 * np.finfo(float).eps * mag


@dataclass(frozen=True)
class KroneckerResult:
    k: int
    residuals: tuple
    exhausted: bool


def _hits(alphas: np.ndarray, targets: np.ndarray, tol: float, start: int, cap: int):
    """Yield every ``k`` in ``[start, cap]`` meeting all residual bounds, in order."""
    k0 = start
    while k0 <= cap:
        k = np.arange(k0, min(cap, k0 + _CHUNK - 1) + 1, dtype=np.int64)
        x = k[:, None].astype(float) * alphas[None, :] - targets[None, :]
        ok = np.all(nearest_int_dist(x) < tol - _slack(k, alphas, targets), axis=1)
        for idx in np.flatnonzero(ok):
            yield int(k[idx])
        k0 = int(k[-1]) + 1


def _residuals(k: int, alphas, targets) -> tuple:
    return tuple(float(nearest_int_dist(k * a - y)) for a, y in zip(alphas, targets))


def kronecker_search(
    alphas: Sequence[float], targets: Sequence[float], tol: float, cap: int
) -> KroneckerResult:
    """Least ``k`` in ``1..cap`` with ``<k a_s - y_s> < tol`` for every ``s``."""
    if len(alphas) != len(targets):
        raise ParameterError(f"{len(alphas)} alphas but {len(targets)} targets")
    if not tol > 0:
        raise ParameterError("tol must be positive")
    cap = int(cap)
    if cap < 1:
        raise ParameterError("cap must be >= 1")
    a = np.asarray(alphas, dtype=float)
    y = np.asarray(targets, dtype=float)
    for k in _hits(a, y, float(tol), 1, cap):
        return KroneckerResult(k, _residuals(k, a, y), False)
    return KroneckerResult(cap, (), True)


def kronecker_covering_bound(
    alphas: Sequence[float], tol: float, grid_levels: int, cap: int
) -> int:
    """Certified ``k_hat``: every real target tuple admits ``k <= k_hat`` within ``tol``.

    Targets on the grid ``{j / grid_levels}`` are covered with margin
    ``tol - h``; any real tuple is within ``h/2`` of a grid point, so its
    residuals stay below ``tol``.
    """
    a = np.asarray(alphas, dtype=float)
    dim = a.size
    if dim == 0:
        return 1
    levels = int(grid_levels)
    h = 1.0 / levels
    margin = tol - h
    if margin <= 0:
        raise ParameterError(f"grid spacing {h} too coarse for tol {tol}")
    if levels**dim > 50_000_000:
        raise BudgetExhausted(f"grid of {levels}^{dim} points is too large")
    grid = np.arange(levels) * h
    covered = np.zeros((levels,) * dim, dtype=bool)
    remaining = covered.size
    for k in range(1, int(cap) + 1):
        x = k * a
        slack = RESIDUAL_SLACK + 8 * np.finfo(float).eps * (k * np.abs(a) + 2.0)
        sel = []
        for s in range(dim):
            idx = np.flatnonzero(nearest_int_dist(x[s] - grid) < margin - slack[s])
            if idx.size == 0:
                break
            sel.append(idx)
        else:
            box = np.ix_(*sel)
            newly = int(np.count_nonzero(~covered[box]))
            if newly:
                covered[box] = True
                remaining -= newly
                if remaining == 0:
                    return k
    raise BudgetExhausted(f"grid not covered within cap={cap}")


@dataclass(frozen=True)
class GeneratorSpec:
    """Truncated generator ``(a_1, ..., a_n)`` with its certified covering bounds.

    ``k_bounds[i]`` is ``k_hat`` for level ``i + 2``; ``a_n = frac(sqrt(prime_n)) / 2^scale_n``.
    """

    alphas: tuple
    k_bounds: tuple
    primes: tuple
    scales: tuple
    grid_levels: tuple
    provenance: str = "fractional parts of square roots of distinct primes, scaled by powers of two"

    def __len__(self):
        return len(self.alphas)

    def check(self) -> list:
        """Return the list of violated conditions (empty when valid)."""
        bad = []
        a = self.alphas
        if not all(0 < x < 0.5 for x in a):
            bad.append("alphas must lie in (0, 1/2)")
        if any(y >= x for x, y in zip(a, a[1:])):
            bad.append("alphas must be strictly decreasing")
        for n in range(2, len(a) + 1):
            if not a[n - 1] < 1.0 / (2**n * self.k_bounds[n - 2]):
                bad.append(f"a_{n} >= 1/(2^{n} k_{n})")
        return bad

    def power(self, k: int) -> TorusSeq:
        """``omega_0^k`` restricted to the stored coordinates."""
        return TorusSeq(tuple(canonical_angles(k * np.asarray(self.alphas))))

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "GeneratorSpec":
        d = json.loads(text)
        return cls(**{k: tuple(v) if isinstance(v, list) else v for k, v in d.items()})


def build_generator(n_max: int, cap: int = 10**7) -> GeneratorSpec:
    """Construct and certify ``a_1, ..., a_{n_max}`` (``2 <= n_max <= 4``)."""
    n_max = int(n_max)
    if not 2 <= n_max <= MAX_LEVEL:
        raise ParameterError(f"n_max must be in 2..{MAX_LEVEL}, got {n_max}")
    alphas = [math.sqrt(2) - 1]
    scales, k_bounds, levels = [0], [], []
    for n in range(2, n_max + 1):
        tol = 2.0**-n
        grid = 2 ** (n + 2)
        k_hat = kronecker_covering_bound(alphas, tol, grid, cap)
        bound = min(alphas[-1], 1.0 / (2**n * k_hat))
        frac = math.sqrt(PRIMES[n - 1]) % 1.0
        j = 0
        while not frac / 2**j < bound:
            j += 1
        alphas.append(frac / 2**j)
        scales.append(j)
        k_bounds.append(k_hat)
        levels.append(grid)
    spec = GeneratorSpec(tuple(alphas), tuple(k_bounds), PRIMES[:n_max], tuple(scales), tuple(levels))
    if spec.check():
        raise BudgetExhausted(f"generator failed its conditions: {spec.check()}")
    return spec


def truncation_bound(omega: TorusSeq, n: int, p: float) -> float:
    """Left side of the truncation-level inequality for level ``n``.

    ``sum_{s>=n} |1 - z_s|^p + (n-1)(2 pi)^p / 2^(pn) + (4 pi)^p / (2^(pn) (2^p - 1))``.
    """
    ang = omega.as_array()
    tail = 2.0 * np.abs(np.sin(np.pi * ang[n - 1 :]))
    return (
        math.fsum(tail**p)
        + (n - 1) * (2 * math.pi) ** p / 2 ** (p * n)
        + (4 * math.pi) ** p / (2 ** (p * n) * (2**p - 1))
    )


def select_level(omega: TorusSeq, eps: float, p: float, n_limit: int = 60) -> int:
    """Least ``n`` whose :func:`truncation_bound` is below ``eps^q``, ``q = max(p, 1)``."""
    target = eps ** max(p, 1.0)
    for n in range(1, n_limit + 1):
        if truncation_bound(omega, n, p) < target:
            return n
    raise ParameterError(f"no level n <= {n_limit} meets the bound for eps={eps}")


@dataclass(frozen=True)
class PowerResult:
    k: int
    level: int
    searched_coords: int
    tol: float
    residuals: tuple
    distance: float


def approx_power(
    omega: TorusSeq | Sequence[float], eps: float, spec: GeneratorSpec, p: float, cap: int = 10**7
) -> PowerResult:
    """Find ``k`` with ``dist_p(omega, omega_0^k) < eps``, checked directly.

    The level ``n`` comes from :func:`select_level`.  If ``n <= len(spec)`` the
    Kronecker search runs on the first ``n - 1`` coordinates, otherwise on all
    stored coordinates (the truncated generator has no tail), at tolerance
    ``2^-n``.  For ``p = 0`` every stored coordinate is searched with
    ``2 pi 2^-n < eps``.  Successive Kronecker hits are tried until the metric
    check passes.
    """
    omega = omega if isinstance(omega, TorusSeq) else TorusSeq(tuple(omega))
    p = validate_p(p)
    eps = float(eps)
    if not eps > 0:
        raise ParameterError("eps must be positive")
    if len(omega) > len(spec):
        tail = omega.as_array()[len(spec) :]
        deficit = math.fsum((2.0 * np.abs(np.sin(np.pi * tail))) ** p)
        raise SpecTooShort(
            f"omega has {len(omega)} coordinates but the generator only {len(spec)}", deficit
        )
    d0 = dist_p(omega, (), p)
    if d0 < eps:
        return PowerResult(0, 0, 0, 0.0, (), d0)

    if p == 0:
        # sup metric: no level selection, every stored coordinate within 2 pi 2^-n < eps
        n = max(1, math.ceil(math.log2(2 * math.pi / eps)) + 1)
        coords = len(spec)
    else:
        n = select_level(omega, eps, p)
        coords = n - 1 if n <= len(spec) else len(spec)
    tol = 2.0**-n
    alphas = np.asarray(spec.alphas[:coords])
    targets = omega.as_array(len(spec))[:coords]
    for k in _hits(alphas, targets, tol, 1, int(cap)):
        d = dist_p(omega, spec.power(k), p)
        if d < eps:
            return PowerResult(k, n, coords, tol, _residuals(k, alphas, targets), d)
    raise BudgetExhausted(f"no power k <= {cap} within eps={eps}")
