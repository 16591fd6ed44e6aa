"""The a-adic groups G_p: digit expansions, Q-approximation and character arithmetic.

Everything touching ``gamma(n) = a_1 ... a_{n-1}`` uses Python integers and
:class:`fractions.Fraction`; floats appear only in norms and the torus image.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Mapping, Sequence, Union

from .characters import Character
from .errors import NotInQError, ParameterError
from .torus import TorusSeq, canonical_angle, chord, validate_p

Number = Union[Fraction, int, float]


@dataclass(frozen=True)
class GammaSeq:
    """Integer bases ``a_1, ..., a_L >= 2`` and their cumulative products."""

    a: tuple
    gammas: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        a = tuple(int(x) for x in self.a)
        if any(x < 2 for x in a):
            raise ParameterError(f"bases must be integers >= 2, got {a}")
        g = [1]
        for x in a:
            g.append(g[-1] * x)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "gammas", tuple(g))

    @classmethod
    def squares(cls, length: int) -> "GammaSeq":
        """The default base ``a_k = (k + 1)^2``."""
        return cls(tuple((k + 1) ** 2 for k in range(1, length + 1)))

    def __len__(self):
        return len(self.a)

    def base(self, k: int) -> int:
        """``a_k`` (1-based)."""
        if not 1 <= k <= len(self.a):
            raise ParameterError(f"base index {k} outside 1..{len(self.a)}")
        return self.a[k - 1]

    def gamma(self, n: int) -> int:
        """``gamma(n)``, defined for ``1 <= n <= len + 1``."""
        if not 1 <= n <= len(self.a) + 1:
            raise ParameterError(f"gamma index {n} outside 1..{len(self.a) + 1}")
        return self.gammas[n - 1]

    def reciprocal_sum(self) -> float:
        return math.fsum(1.0 / x for x in self.a)

    def to_json(self) -> str:
        return json.dumps(
            {
                "a": [str(x) for x in self.a],
                "gamma": [str(g) for g in self.gammas],
                "reciprocal_sum": self.reciprocal_sum(),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "GammaSeq":
        return cls(tuple(int(x) for x in json.loads(text)["a"]))


def _exact(x: Number) -> Fraction:
    if isinstance(x, float) and not math.isfinite(x):
        raise ParameterError("value must be finite")
    return Fraction(x)


def nearest_int_dist(x: Fraction) -> Fraction:
    """``<x>`` exactly."""
    return abs(x - round(x))


# ---------------------------------------------------------------- digits


@dataclass(frozen=True)
class AdicDigits:
    """Digits ``eps_1..eps_N`` of ``x = sum eps_k / gamma(k+1)``; ``remainder`` is what is left."""

    digits: tuple
    base: GammaSeq
    remainder: Fraction = Fraction(0)

    def __post_init__(self):
        d = tuple(int(e) for e in self.digits)
        if len(d) > len(self.base):
            raise ParameterError(f"{len(d)} digits but base has length {len(self.base)}")
        for k, e in enumerate(d, start=1):
            if not 0 <= e < self.base.base(k):
                raise ParameterError(f"digit eps_{k} = {e} outside 0..{self.base.base(k) - 1}")
        object.__setattr__(self, "digits", d)

    @property
    def exact(self) -> bool:
        return self.remainder == 0

    def to_json(self) -> str:
        return json.dumps(
            {"digits": [str(e) for e in self.digits], "a": [str(x) for x in self.base.a[: len(self.digits)]],
             "remainder": str(self.remainder)}
        )


def digits_of(x: Number, base: GammaSeq, n: int) -> AdicDigits:
    """Greedy expansion ``eps_k = floor(x gamma(k+1)) - a_k floor(x gamma(k))``.

    Floats are converted to their exact binary value; the result carries the
    remainder ``x - from_digits(...)``, zero iff the denominator divides ``gamma(n+1)``.
    """
    x = _exact(x)
    if not 0 <= x < 1:
        raise ParameterError(f"x must lie in [0, 1), got {x}")
    if not 0 <= n <= len(base):
        raise ParameterError(f"depth {n} outside 0..{len(base)}")
    digits = [
        math.floor(x * base.gamma(k + 1)) - base.base(k) * math.floor(x * base.gamma(k))
        for k in range(1, n + 1)
    ]
    value = sum((Fraction(e, base.gamma(k + 1)) for k, e in enumerate(digits, start=1)), Fraction(0))
    return AdicDigits(tuple(digits), base, x - value)


def from_digits(d: AdicDigits) -> Fraction:
    """``sum eps_k / gamma(k+1)`` (the remainder is not added back)."""
    return sum((Fraction(e, d.base.gamma(k + 1)) for k, e in enumerate(d.digits, start=1)), Fraction(0))


def r0_dist(x: Number, y: Number, base: GammaSeq, n: int):
    """``max_{k <= n} <gamma(k) (x - y)>``; exact for rational input, float otherwise."""
    if not 1 <= n <= len(base) + 1:
        raise ParameterError(f"depth {n} outside 1..{len(base) + 1}")
    if isinstance(x, float) or isinstance(y, float):
        diff = float(x) - float(y)
        return max(abs(float(canonical_angle(base.gamma(k) * diff))) for k in range(1, n + 1))
    diff = Fraction(x) - Fraction(y)
    return max(nearest_int_dist(base.gamma(k) * diff) for k in range(1, n + 1))


@dataclass(frozen=True)
class QApprox:
    value: Fraction
    level: int
    distance: Fraction


def q_approx(x: AdicDigits, eps: Number) -> QApprox:
    """Truncation ``x_N`` of a digit string with ``r0(x, x_N) < eps``.

    ``N`` is the least level with ``a_{N-1} > 1/eps`` and ``<gamma(n) x> < eps``
    for every ``n >= N``.  Since ``x`` has finitely many digits the tail
    condition only needs checking up to the digit depth.
    """
    eps = _exact(eps)
    if not eps > 0:
        raise ParameterError("eps must be positive")
    base = x.base
    value = from_digits(x)
    depth = len(x.digits)
    for level in range(2, len(base) + 2):
        if not base.base(level - 1) > 1 / eps:
            continue
        if all(nearest_int_dist(base.gamma(k) * value) < eps for k in range(level, depth + 1)):
            break
    else:
        raise ParameterError(f"no base a_k > 1/eps = {float(1 / eps):.4g} in a window of length {len(base)}")
    approx = from_digits(AdicDigits(x.digits[: level - 1], base))
    check_to = max(level, depth + 1)
    dist = max(nearest_int_dist(base.gamma(k) * (value - approx)) for k in range(1, min(check_to, len(base) + 1) + 1))
    if not dist < eps:
        raise AssertionError(f"Q-approximation postcondition failed: {dist} >= {eps}")
    return QApprox(approx, level, dist)


# ---------------------------------------------------------------- G_p norms and embedding


def embed_phases(x: Number, base: GammaSeq, n: int) -> tuple:
    """Canonical phases of ``gamma(k) x`` for ``k = 1..n``; exact when ``x`` is rational."""
    if not 1 <= n <= len(base) + 1:
        raise ParameterError(f"depth {n} outside 1..{len(base) + 1}")
    x = x if isinstance(x, float) else Fraction(x)
    return tuple(canonical_angle(base.gamma(k) * x) for k in range(1, n + 1))


def embed_Sp(x: Number, base: GammaSeq, n: int) -> TorusSeq:
    """``S_p(z) = (z, z^gamma(2), ..., z^gamma(n))`` as a torus sequence."""
    return TorusSeq(tuple(float(t) for t in embed_phases(x, base, n)))


def norm_gp(x: Number, base: GammaSeq, p: float, n: int) -> float:
    """Truncated ``||z||_p = (sum_{k<=n} |1 - z^gamma(k)|^p)^(1/p)``, sup for ``p = 0``."""
    p = validate_p(p)
    chords = [chord(t) for t in embed_phases(x, base, n)]
    if p == 0:
        return max(chords)
    return math.fsum(c**p for c in chords) ** (1.0 / p)


# ---------------------------------------------------------------- characters of G_p


class Tail(str, Enum):
    ZEROS = "Zeros"
    MAX_MINUS_ONE = "MaxMinusOne"


@dataclass(frozen=True)
class DigitChar:
    """Character ``(omega_k)`` of G_p: a digit head and one of two admissible tails."""

    head: tuple
    tail: Tail
    base: GammaSeq

    def __post_init__(self):
        head = tuple(int(w) for w in self.head)
        if len(head) > len(self.base):
            raise ParameterError("digit head longer than the base window")
        for k, w in enumerate(head, start=1):
            if not 0 <= w < self.base.base(k):
                raise ParameterError(f"digit omega_{k} = {w} outside 0..{self.base.base(k) - 1}")
        object.__setattr__(self, "head", head)
        object.__setattr__(self, "tail", Tail(self.tail))

    def digit(self, k: int) -> int:
        if k <= len(self.head):
            return self.head[k - 1]
        return 0 if self.tail is Tail.ZEROS else self.base.base(k) - 1

    def to_json(self) -> str:
        return json.dumps({"head": [str(w) for w in self.head], "tail": self.tail.value})


def _mixed_radix(n: int, base: GammaSeq) -> list:
    digits = []
    k = 1
    while n:
        if k > len(base):
            raise ParameterError("integer does not fit the base window")
        n, w = divmod(n, base.base(k))
        digits.append(w)
        k += 1
    return digits


def int_to_digitchar(n: int, base: GammaSeq) -> DigitChar:
    """Digit form of the character ``z -> z^n``.

    Positive ``n``: mixed-radix digits, zero tail.  Negative ``n``: complement
    of the digits of ``|n|`` with an ``a_k - 1`` tail, i.e. zeros below the
    first nonzero digit ``omega_j``, then ``a_j - omega_j``, then
    ``a_k - omega_k - 1``.
    """
    n = int(n)
    if abs(n) >= base.gamma(len(base) + 1):
        raise ParameterError(f"|n| = {abs(n)} does not fit a window of length {len(base)}")
    if n >= 0:
        return DigitChar(tuple(_mixed_radix(n, base)), Tail.ZEROS, base)
    w = _mixed_radix(-n, base)
    j = next(i for i, d in enumerate(w) if d)
    head = [0] * j + [base.base(j + 1) - w[j]] + [base.base(k + 1) - w[k] - 1 for k in range(j + 1, len(w))]
    return DigitChar(tuple(head), Tail.MAX_MINUS_ONE, base)


def digitchar_to_int(chi: DigitChar) -> int:
    """Inverse of :func:`int_to_digitchar`; an ``a_k - 1`` tail from position ``m+1`` is ``-gamma(m+1)``."""
    base = chi.base
    value = sum(w * base.gamma(k) for k, w in enumerate(chi.head, start=1))
    if chi.tail is Tail.MAX_MINUS_ONE:
        value -= base.gamma(len(chi.head) + 1)
    return value


def order_level(x: Fraction, base: GammaSeq) -> int:
    """Least ``k`` with ``gamma(k) x`` an integer; raises if ``x`` is not in Q at this depth."""
    x = Fraction(x)
    for k in range(1, len(base) + 2):
        if (base.gamma(k) * x).denominator == 1:
            return k
    raise NotInQError(f"{x} has no gamma(k) x integral for k <= {len(base) + 1}")


def pair_gp(n: int, x: Number, base: GammaSeq) -> Fraction:
    """Phase of ``(n, z) = z^n`` for ``z = exp(2 pi i x)`` in Q."""
    x = Fraction(x)
    order_level(x, base)
    return canonical_angle(int(n) * x)


def pair_digitchar(chi: DigitChar, x: Number, base: GammaSeq | None = None) -> Fraction:
    """Phase of ``z^(sum omega_k gamma(k))`` for ``z`` in Q, from the digit form.

    Terms with ``gamma(k) x`` integral vanish, so the (possibly infinite) sum
    is finite on Q.
    """
    base = base or chi.base
    x = Fraction(x)
    stop = order_level(x, base)
    total = sum((chi.digit(k) * base.gamma(k) * x for k in range(1, stop)), Fraction(0))
    return canonical_angle(total)


class SparseGammaChar(Character):
    """Character ``n = sum n_k e_k`` of T^H_p, read on the embedded copy of G_p."""

    @classmethod
    def from_dict(cls, coeffs: Mapping) -> "SparseGammaChar":
        return cls(tuple((int(k), int(v)) for k, v in coeffs.items()))


def _check_window(chi: Character, base: GammaSeq):
    if chi.max_index > len(base) + 1:
        raise ParameterError(f"support reaches {chi.max_index}, window covers gamma(1..{len(base) + 1})")


def quotient_reduce(chi: Character, base: GammaSeq) -> int:
    """Image ``sum n_k gamma(k)`` of ``chi`` in the quotient by the annihilator of G_p."""
    _check_window(chi, base)
    return sum(n * base.gamma(k) for k, n in chi.items)


def annihilator_test(chi: Character, base: GammaSeq) -> bool:
    """``chi`` kills the embedded G_p iff ``sum n_k gamma(k) == 0``."""
    return quotient_reduce(chi, base) == 0


def pair_sparse(chi: Character, x: Number, base: GammaSeq) -> Fraction:
    """Phase ``sum n_k (gamma(k) x)`` mod 1 of ``chi`` on ``S_p(exp(2 pi i x))``, exact."""
    _check_window(chi, base)
    x = Fraction(x)
    return canonical_angle(sum((n * base.gamma(k) * x for k, n in chi.items), Fraction(0)))


def parse_digits(digits: Sequence[int], base: GammaSeq) -> AdicDigits:
    return AdicDigits(tuple(digits), base)
