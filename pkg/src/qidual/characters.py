"""Finitely supported characters of T^H_p and the combinatorics around them.

A character ``chi = (n_1, ..., n_s, 0, ...)`` in Z_0^inf pairs with
``omega = (exp(2 pi i phi_k))`` as ``exp(2 pi i sum n_k phi_k)``; here the
pairing is returned as its canonical phase in ``[-1/2, 1/2)``.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

from .errors import BudgetExhausted, ParameterError
from .torus import TorusSeq, canonical_angle

# relative slack used when a real budget is compared against a closed bound
TIE_SLACK = 1e-12


@dataclass(frozen=True)
class Character:
    """Sparse integer vector; ``items`` holds sorted ``(index, coeff)`` pairs, coeff != 0."""

    items: tuple = ()

    def __post_init__(self):
        merged = {}
        for idx, n in self.items:
            idx, n = int(idx), int(n)
            if idx < 1:
                raise ParameterError(f"character indices start at 1, got {idx}")
            merged[idx] = merged.get(idx, 0) + n
        object.__setattr__(self, "items", tuple(sorted((i, n) for i, n in merged.items() if n)))

    @classmethod
    def from_dict(cls, coeffs: Mapping) -> "Character":
        return cls(tuple((int(k), int(v)) for k, v in coeffs.items()))

    @classmethod
    def from_dense(cls, coeffs: Sequence[int], offset: int = 0) -> "Character":
        return cls(tuple((offset + i + 1, int(n)) for i, n in enumerate(coeffs) if n))

    @classmethod
    def unit(cls, index: int, sign: int = 1) -> "Character":
        return cls(((index, sign),))

    def as_dict(self) -> dict:
        return dict(self.items)

    def to_json(self) -> str:
        return json.dumps({str(i): n for i, n in self.items})

    @classmethod
    def from_json(cls, text: str) -> "Character":
        return cls.from_dict(json.loads(text))

    def __add__(self, other: "Character") -> "Character":
        return Character(self.items + other.items)

    def __neg__(self) -> "Character":
        return Character(tuple((i, -n) for i, n in self.items))

    def __sub__(self, other: "Character") -> "Character":
        return self + (-other)

    def __bool__(self):
        return bool(self.items)

    @property
    def support(self) -> tuple:
        return tuple(i for i, _ in self.items)

    @property
    def max_index(self) -> int:
        return self.items[-1][0] if self.items else 0

    def shifted(self, k: int) -> "Character":
        """Move the support ``k`` places to the right."""
        return Character(tuple((i + k, n) for i, n in self.items))


def support_size(chi: Character) -> int:
    """Number of nonzero coordinates, ``l(chi)``."""
    return len(chi.items)


def norm(chi: Character, q="one") -> float:
    """``|chi|_q`` for real ``q >= 1``; ``"one"`` is l^1 and ``"b"`` the sup norm."""
    coeffs = [abs(n) for _, n in chi.items]
    if q == "one":
        return float(sum(coeffs))
    if q in ("b", "inf", math.inf):
        return float(max(coeffs, default=0))
    q = float(q)
    if not q >= 1:
        raise ParameterError(f"norm exponent must be >= 1, got {q}")
    if not coeffs:
        return 0.0
    if q == 1:
        return float(sum(coeffs))
    return math.fsum(c**q for c in coeffs) ** (1.0 / q)


def pair(chi: Character, omega: TorusSeq | Sequence[float]) -> float:
    """Canonical phase ``t`` with ``(chi, omega) = exp(2 pi i t)``."""
    angles = omega.angles if isinstance(omega, TorusSeq) else tuple(omega)
    terms = [n * float(angles[i - 1]) for i, n in chi.items if i <= len(angles)]
    return float(canonical_angle(math.fsum(terms)))


def re_nonnegative(phase: float, tol: float = 0.0) -> bool:
    """``Re exp(2 pi i phase) >= 0``; the boundary phases +-1/4 count as nonnegative."""
    return abs(phase) <= 0.25 + tol


# ---------------------------------------------------------------- windows A(k, m)


@dataclass(frozen=True)
class WindowSet:
    """``A(k, m)``: characters supported on indices ``> m`` with ``|chi|_1 <= k + 1``."""

    k: int
    m: int

    def __post_init__(self):
        if self.k < 0 or self.m < 0:
            raise ParameterError("WindowSet needs k, m >= 0")

    def __contains__(self, chi: Character) -> bool:
        return all(i > self.m for i in chi.support) and norm(chi, "one") <= self.k + 1


def _l1_ball(dim: int, radius: int) -> Iterator[tuple]:
    if dim == 0:
        yield ()
        return
    for n in range(-radius, radius + 1):
        for rest in _l1_ball(dim - 1, radius - abs(n)):
            yield (n,) + rest


def window_enumerate(w: WindowSet, support_max: int) -> list:
    """All characters of ``A(k, m)`` with support inside ``(m, support_max]``."""
    if support_max <= w.m:
        raise ParameterError(f"empty index range: support_max={support_max} <= m={w.m}")
    dim = support_max - w.m
    return [Character.from_dense(v, offset=w.m) for v in _l1_ball(dim, w.k + 1)]


def l1_ball_count(dim: int, radius: int) -> int:
    """Number of integer points of ``Z^dim`` with l^1 norm ``<= radius``."""
    return sum(2**i * math.comb(dim, i) * math.comb(radius, i) for i in range(min(dim, radius) + 1))


def lemma1_bounds(eps: float, q: float) -> tuple[int, int]:
    """Window indices ``a = [1/(4 eps)] - 1`` and ``b = [(1/(4 eps))^q]``.

    With them ``A(a, 0) ⊂ {chi : 4 eps |chi|_q <= 1} ⊂ A(b, 0)``.
    """
    eps, q = float(eps), float(q)
    if not 0 < eps < 0.25:
        raise ParameterError(f"eps must lie in (0, 1/4), got {eps}")
    if not q >= 1:
        raise ParameterError(f"q must be >= 1, got {q}")
    r = 1.0 / (4.0 * eps)
    a = math.floor(r * (1 + TIE_SLACK)) - 1
    b = math.floor(r**q * (1 + TIE_SLACK))
    return a, b


def in_polar_ball(chi: Character, eps: float, q: float) -> bool:
    """``4 eps |chi|_q <= 1`` with ties counted as inside."""
    r = 1.0 / (4.0 * eps)
    return norm(chi, q) <= r * (1 + TIE_SLACK)


# ---------------------------------------------------------------- T-sequence neighbourhoods


@dataclass(frozen=True)
class TSeqNeighborhood:
    """``W = U_k (A*_{i_1} + ... + A*_{i_k})`` with ``A*_n = {0, +-e_m : m >= n}``.

    Only a finite prefix of the thresholds is stored; past it they continue
    by consecutive integers.
    """

    thresholds: tuple

    def __post_init__(self):
        t = tuple(int(i) for i in self.thresholds)
        if not t or t[0] < 1 or any(b <= a for a, b in zip(t, t[1:])):
            raise ParameterError(f"thresholds must be strictly increasing positive integers: {t}")
        object.__setattr__(self, "thresholds", t)

    def threshold(self, t: int) -> int:
        """The ``t``-th threshold ``i_t`` (1-based)."""
        if t <= len(self.thresholds):
            return self.thresholds[t - 1]
        return self.thresholds[-1] + (t - len(self.thresholds))


def unit_indices(chi: Character) -> list:
    """Indices of the ``|chi|_1`` signed unit vectors making up ``chi``, ascending."""
    return sorted(itertools.chain.from_iterable([i] * abs(n) for i, n in chi.items))


def tseq_member(chi: Character, w: TSeqNeighborhood) -> bool:
    """Whether ``chi`` lies in ``w``: sorted unit indices must dominate the thresholds."""
    return all(m >= w.threshold(t) for t, m in enumerate(unit_indices(chi), start=1))


def tseq_window_inclusion(w: TSeqNeighborhood, k: int, support_max: int) -> int:
    """Least ``m`` such that ``A(k, m) ⊂ W`` over indices up to ``support_max``."""
    if k < 0:
        raise ParameterError("k must be nonnegative")
    for m in range(support_max):
        if all(tseq_member(chi, w) for chi in window_enumerate(WindowSet(k, m), support_max)):
            return m
    raise BudgetExhausted(f"no m < {support_max} with A({k}, m) inside W")
