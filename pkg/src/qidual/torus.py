"""Torus arithmetic, the metrics of T^H_p and the quotient map l^p -> T^H_p.

Points of the circle are stored as angles ``phi`` in turns, ``z = exp(2*pi*i*phi)``,
canonicalised into the half-open interval ``[-1/2, 1/2)``.  Sequences are
finite windows with an exact all-zero tail, so every value computed here is
exact for the represented (finitely supported) element.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import ParameterError

Real = Union[float, int, Fraction]


def canonical_angle(x: Real) -> Real:
    """Reduce ``x`` mod 1 into ``[-1/2, 1/2)``.

    Exact rationals stay exact (a :class:`~fractions.Fraction` comes back);
    everything else is reduced in double precision.  ``1/2`` maps to ``-1/2``.
    """
    if isinstance(x, Rational):
        x = Fraction(x)
        return x - math.floor(x + Fraction(1, 2))
    x = float(x)
    if not math.isfinite(x):
        raise ParameterError(f"angle must be finite, got {x!r}")
    r = x - math.floor(x + 0.5)
    # x - floor(x + .5) can round up to exactly 0.5 for x just below a half-integer
    if r >= 0.5:
        r -= 1.0
    return r


def canonical_angles(x: np.ndarray) -> np.ndarray:
    """Vectorised :func:`canonical_angle` for float arrays."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ParameterError("angles must be finite")
    r = x - np.floor(x + 0.5)
    return np.where(r >= 0.5, r - 1.0, r)


def chord(phi: Real) -> float:
    """Return ``|1 - exp(2*pi*i*phi)| = 2|sin(pi*phi)|``."""
    return 2.0 * abs(math.sin(math.pi * float(canonical_angle(phi))))


def validate_p(p: float, *, allow_quasi: bool = False) -> float:
    """Check an exponent: ``p == 0`` (sup case) or ``p >= 1``.

    ``allow_quasi`` additionally admits ``0 < p < 1``, which only the metric
    ``dist_p`` accepts.
    """
    p = float(p)
    if not math.isfinite(p) or p < 0:
        raise ParameterError(f"exponent p must be 0 or >= 1, got {p}")
    if 0 < p < 1 and not allow_quasi:
        raise ParameterError(f"exponent p must be 0 or >= 1, got {p}")
    return p


def conjugate(p: float) -> float:
    """Hoelder conjugate ``q`` with ``1/p + 1/q = 1`` (defined for ``p > 1``)."""
    p = validate_p(p)
    if p <= 1:
        raise ParameterError(f"conjugate exponent needs p > 1, got {p}")
    return p / (p - 1.0)


def _lp(values: np.ndarray, p: float) -> float:
    """Norm of nonnegative ``values``: sup for p = 0, sum^(min(1, 1/p)) otherwise."""
    if values.size == 0:
        return 0.0
    if p == 0:
        return float(values.max())
    if p == 1:
        return math.fsum(values)
    s = math.fsum(values**p)
    return s ** (1.0 / p) if p > 1 else s


@dataclass(frozen=True)
class TorusSeq:
    """Truncated element ``(z_n)`` of T^H_p; beyond ``angles`` every ``z_n = 1``."""

    angles: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "angles", tuple(float(canonical_angle(a)) for a in self.angles))

    @classmethod
    def identity(cls, length: int = 0) -> "TorusSeq":
        return cls((0.0,) * length)

    def __len__(self):
        return len(self.angles)

    def __mul__(self, other: "TorusSeq") -> "TorusSeq":
        a, b = _padded(self, other)
        return TorusSeq(tuple(canonical_angles(a + b)))

    def inverse(self) -> "TorusSeq":
        return TorusSeq(tuple(-a for a in self.angles))

    def is_identity(self) -> bool:
        return all(a == 0.0 for a in self.angles)

    def as_array(self, length: int | None = None) -> np.ndarray:
        arr = np.asarray(self.angles, dtype=float)
        if length is not None and length > arr.size:
            arr = np.concatenate([arr, np.zeros(length - arr.size)])
        return arr


@dataclass(frozen=True)
class RealSeq:
    """Truncated element ``(x_n)`` of l^p together with its exponent."""

    values: tuple
    p: float = 2.0

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not all(math.isfinite(v) for v in vals):
            raise ParameterError("RealSeq entries must be finite")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "p", validate_p(self.p))

    def __add__(self, other: "RealSeq") -> "RealSeq":
        if other.p != self.p:
            raise ParameterError(f"exponent mismatch: {self.p} vs {other.p}")
        n = max(len(self.values), len(other.values))
        a = self.values + (0.0,) * (n - len(self.values))
        b = other.values + (0.0,) * (n - len(other.values))
        return RealSeq(tuple(x + y for x, y in zip(a, b)), self.p)


def _as_torus(w) -> TorusSeq:
    return w if isinstance(w, TorusSeq) else TorusSeq(tuple(w))


def _padded(w1, w2) -> tuple[np.ndarray, np.ndarray]:
    w1, w2 = _as_torus(w1), _as_torus(w2)
    n = max(len(w1), len(w2))
    return w1.as_array(n), w2.as_array(n)


def dist_p(w1, w2, p: float) -> float:
    """Chordal metric ``d_p``: ``(sum |z1_n - z2_n|^p)^(1/p)``, sup for ``p = 0``.

    For ``0 < p < 1`` the outer exponent is 1 (quasi-norm case).
    """
    p = validate_p(p, allow_quasi=True)
    a, b = _padded(w1, w2)
    chords = 2.0 * np.abs(np.sin(np.pi * (a - b)))
    return _lp(chords, p)


def rho_p(w1, w2, p: float) -> float:
    """Angle metric: coordinatewise differences canonicalised, then the l^p norm."""
    p = validate_p(p)
    a, b = _padded(w1, w2)
    return _lp(np.abs(canonical_angles(a - b)), p)


def quotient_iso(x: RealSeq | Sequence[float]) -> TorusSeq:
    """The isomorphism ``l^p / Z_0^inf -> T^H_p``: reduce every coordinate mod 1."""
    values = x.values if isinstance(x, RealSeq) else tuple(x)
    return TorusSeq(tuple(canonical_angles(np.asarray(values, dtype=float))))


def quotient_dist(x: RealSeq, y: RealSeq) -> float:
    """Quotient metric ``d*`` with ``s_n = (y_n - x_n) mod 1`` in ``[-1/2, 1/2)``.

    Satisfies ``pi * d* <= dist_p(iso(x), iso(y)) <= 2*pi * d*`` for ``p >= 1``.
    """
    if x.p != y.p:
        raise ParameterError(f"exponent mismatch: {x.p} vs {y.p}")
    n = max(len(x.values), len(y.values))
    a = np.asarray(x.values + (0.0,) * (n - len(x.values)))
    b = np.asarray(y.values + (0.0,) * (n - len(y.values)))
    return _lp(np.abs(canonical_angles(b - a)), x.p)


def chord_sandwich_holds(phis: Iterable[float], p: float, tol: float = 1e-12) -> bool:
    """Check ``pi^p |phi|^p <= chord(phi)^p <= (2 pi)^p |phi|^p`` on every ``phi``."""
    phi = np.abs(canonical_angles(np.fromiter(phis, dtype=float)))
    c = 2.0 * np.abs(np.sin(np.pi * phi))
    lo, mid, hi = (np.pi * phi) ** p, c**p, (2 * np.pi * phi) ** p
    return bool(np.all(lo <= mid + tol) and np.all(mid <= hi + tol))
