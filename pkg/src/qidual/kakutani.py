"""Shifted product measures on the torus and the Kakutani dichotomy.

Two one-parameter density families on ``T = [-1/2, 1/2)`` are supported:

* ``LinearShift``: ``f(x) = x + 1``;
* ``ExpFamily``: ``f_c(x) = exp(-c|x|) / a`` with ``a = (2/c)(1 - exp(-c/2))``,
  one parameter ``c_n`` per coordinate.

For a shift ``omega = (exp(2 pi i phi_n))`` the product measure ``mu = prod mu_n``
and its translate are equivalent or mutually singular according as the
product of Hellinger affinities ``prod P_n(phi_n)`` is positive or zero.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import ParameterError
from .quadrature import integrate
from .torus import TorusSeq, canonical_angle

DEFAULT_P_EQ = 1e-3
DEFAULT_P_SING = 1e-12
# relative drop of the product over the final TAIL_WINDOW factors
TAIL_WINDOW = 10
TAIL_REL_DROP = 1e-6


class Kind(str, Enum):
    LINEAR_SHIFT = "LinearShift"
    EXP_FAMILY = "ExpFamily"


class Verdict(str, Enum):
    EQUIVALENT_LIKE = "EquivalentLike"
    SINGULAR_LIKE = "SingularLike"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class DensityFamily:
    kind: Kind
    c_list: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        cs = tuple(float(c) for c in self.c_list)
        if self.kind is Kind.EXP_FAMILY:
            bad = [c for c in cs if not 0 < c <= 1]
            if bad:
                raise ParameterError(f"ExpFamily parameters must lie in (0, 1]; got {bad[:3]}")
        elif cs:
            raise ParameterError("LinearShift takes no parameters")
        object.__setattr__(self, "c_list", cs)

    @classmethod
    def linear(cls) -> "DensityFamily":
        return cls(Kind.LINEAR_SHIFT)

    @classmethod
    def exponential(cls, c_list: Sequence[float]) -> "DensityFamily":
        return cls(Kind.EXP_FAMILY, tuple(c_list))

    @classmethod
    def exponential_constant(cls, c: float, n: int) -> "DensityFamily":
        return cls(Kind.EXP_FAMILY, (float(c),) * n)

    def c(self, index: int) -> float:
        if self.kind is not Kind.EXP_FAMILY:
            raise ParameterError("LinearShift has no parameter c")
        if not 1 <= index <= len(self.c_list):
            raise ParameterError(f"index {index} outside 1..{len(self.c_list)}")
        return self.c_list[index - 1]


def _exp_norm(c: float) -> float:
    return (2.0 / c) * -math.expm1(-c / 2.0)


def _density_fn(family: DensityFamily, index: int):
    """Vectorised density on [-1/2, 1/2)."""
    if family.kind is Kind.LINEAR_SHIFT:
        return lambda x: x + 1.0
    c = family.c(index)
    a = _exp_norm(c)
    return lambda x: np.exp(-c * np.abs(x)) / a


def density_eval(family: DensityFamily, index: int, x: float) -> float:
    x = float(canonical_angle(x))
    if family.kind is Kind.EXP_FAMILY:
        family.c(index)  # range check
    return float(_density_fn(family, index)(np.float64(x)))


def hellinger_closed(c: float, phi: float) -> float:
    """Closed-form Hellinger affinity of ``f_c`` and its shift by ``phi``.

    ``P_c(phi) = [2 sinh(c(1-2|phi|)/4) + c|phi| cosh(c(1-2|phi|)/4)] / (2 sinh(c/4))``.
    """
    c = float(c)
    if not 0 < c <= 1:
        raise ParameterError(f"c must lie in (0, 1], got {c}")
    t = abs(float(canonical_angle(phi)))
    u = c * (1.0 - 2.0 * t) / 4.0
    return (2.0 * math.sinh(u) + c * t * math.cosh(u)) / (2.0 * math.sinh(c / 4.0))


def hellinger_quad(
    family: DensityFamily, index: int, phi: float, tol: float = 1e-12, max_evals: int = 10**6
) -> float:
    """Hellinger affinity ``int sqrt(f(x) f((x + phi) mod 1)) dx`` by quadrature.

    The interval is split at every corner of the integrand: ``0`` (exp family),
    ``-phi`` and the wraparound seam ``1/2 - phi``.
    """
    if not tol > 0:
        raise ParameterError(f"tol must be positive, got {tol}")
    phi = float(canonical_angle(phi))
    f = _density_fn(family, index)

    def integrand(x):
        y = x + phi
        y = y - np.floor(y + 0.5)
        return np.sqrt(f(x) * f(y))

    cuts = [-0.5, 0.5, float(canonical_angle(-phi)), float(canonical_angle(0.5 - phi))]
    if family.kind is Kind.EXP_FAMILY:
        cuts.append(0.0)
    value, _, _ = integrate(integrand, cuts, tol=tol, max_evals=max_evals)
    return value


@dataclass
class HellingerTrace:
    partial_products: list
    verdict: Verdict
    thresholds: tuple = field(default=(DEFAULT_P_EQ, DEFAULT_P_SING))

    def to_json(self) -> str:
        rows = [{"N": n, "product": p} for n, p in enumerate(self.partial_products, start=1)]
        return json.dumps(rows)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["N", "product"])
        for n, p in enumerate(self.partial_products, start=1):
            w.writerow([n, repr(p)])
        return buf.getvalue()


def _classify(products: Sequence[float], p_eq: float, p_sing: float) -> Verdict:
    final = products[-1] if products else 1.0
    if final < p_sing:
        return Verdict.SINGULAR_LIKE
    if final > p_eq:
        ref = products[-1 - TAIL_WINDOW] if len(products) > TAIL_WINDOW else 1.0
        if ref > 0 and (ref - final) / ref < TAIL_REL_DROP:
            return Verdict.EQUIVALENT_LIKE
    return Verdict.INCONCLUSIVE


def kakutani_classify(
    family: DensityFamily,
    shift: TorusSeq | Sequence[float],
    n_max: int,
    p_eq: float = DEFAULT_P_EQ,
    p_sing: float = DEFAULT_P_SING,
) -> HellingerTrace:
    """Partial Hellinger products ``prod_{n<=N} P_n(phi_n)`` for ``N = 1..n_max``.

    The verdict is a finite-N heuristic: ``EquivalentLike`` when the final
    product exceeds ``p_eq`` and has stopped moving (relative drop below 1e-6
    over the last ten factors), ``SingularLike`` when it is below ``p_sing``.
    """
    if not 0 < p_sing < p_eq < 1:
        raise ParameterError(f"need 0 < p_sing < p_eq < 1, got p_sing={p_sing}, p_eq={p_eq}")
    n_max = int(n_max)
    if n_max < 1:
        raise ParameterError("n_max must be positive")
    angles = shift.angles if isinstance(shift, TorusSeq) else tuple(float(canonical_angle(a)) for a in shift)
    phis = list(angles[:n_max]) + [0.0] * max(0, n_max - len(angles))

    if family.kind is Kind.EXP_FAMILY:
        if len(family.c_list) < n_max:
            raise ParameterError(f"ExpFamily has {len(family.c_list)} parameters, need {n_max}")
        factors = [hellinger_closed(family.c_list[i], phis[i]) for i in range(n_max)]
    else:
        cache = {}
        factors = []
        for phi in phis:
            if phi not in cache:
                cache[phi] = 1.0 if phi == 0.0 else min(1.0, hellinger_quad(family, 1, phi))
            factors.append(cache[phi])

    products = []
    acc = 1.0
    for fct in factors:
        acc *= min(fct, 1.0)
        products.append(acc)
    return HellingerTrace(products, _classify(products, p_eq, p_sing), (p_eq, p_sing))
