"""Polars of the balls ``U_eps = {omega : rho_p(omega, 1) < eps}`` and their bipolars.

For ``p > 1`` the polar of ``U_eps`` is ``{chi : 4 eps |chi|_q <= 1}``; for
``p = 1`` it is only known to sit between two sup-norm balls.  The bipolar of
``U_eps`` (its quasi-convex hull) is probed with an exact integer search,
which is how :func:`hull_witness` exhibits an unbounded hull for ``p > 1``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .characters import TIE_SLACK, Character, norm
from .errors import BudgetExhausted, ParameterError
from .torus import TorusSeq, canonical_angle, chord, conjugate, dist_p, validate_p


class PolarVerdict(str, Enum):
    MEMBER = "Member"
    NON_MEMBER = "NonMember"
    BOUNDARY_ZONE = "BoundaryZone"


def _check_eps(eps: float) -> float:
    eps = float(eps)
    if not 0 < eps < 0.25:
        raise ParameterError(f"eps must lie in (0, 1/4), got {eps}")
    return eps


def polar_member_closed(chi: Character, eps: float, p: float) -> PolarVerdict:
    """Decide ``chi in U_eps^polar`` from the closed-form description.

    ``p > 1``: member iff ``4 eps |chi|_q <= 1``.  ``p = 1``: member when
    ``|chi|_b <= 1/(4 eps)``, non-member when ``|chi|_b > 1/(2 eps)``,
    otherwise ``BOUNDARY_ZONE``.
    """
    eps = _check_eps(eps)
    p = validate_p(p)
    r = 1.0 / (4.0 * eps)
    if p == 1:
        nb = norm(chi, "b")
        if nb <= r * (1 + TIE_SLACK):
            return PolarVerdict.MEMBER
        if nb > 2 * r * (1 + TIE_SLACK):
            return PolarVerdict.NON_MEMBER
        return PolarVerdict.BOUNDARY_ZONE
    if p < 1:
        raise ParameterError("polar membership needs p >= 1")
    q = conjugate(p)
    return PolarVerdict.MEMBER if norm(chi, q) <= r * (1 + TIE_SLACK) else PolarVerdict.NON_MEMBER


def holder_extremal(chi: Character, eps: float, p: float) -> TorusSeq:
    """The point ``phi_i = eps sign(n_i) (|n_i| / |chi|_q)^(q/p)`` on the rho_p eps-sphere.

    It maximises ``sum n_i phi_i`` over the closed ball, with value ``eps |chi|_q``.
    """
    p = validate_p(p)
    if p <= 1:
        raise ParameterError("Hoelder extremal needs p > 1")
    if not chi:
        raise ParameterError("zero character: the supremum is trivially 0")
    q = conjugate(p)
    nq = norm(chi, q)
    phis = [0.0] * chi.max_index
    for i, n in chi.items:
        phis[i - 1] = eps * math.copysign((abs(n) / nq) ** (q / p), n)
    return TorusSeq(tuple(phis))


def polar_sup_oracle(chi: Character, eps: float, p: float) -> float:
    """``sup {sum n_i phi_i : rho_p(phi, 0) <= eps}``, evaluated at the Hoelder point."""
    eps = float(eps)
    if not eps > 0:
        raise ParameterError("eps must be positive")
    point = holder_extremal(chi, eps, p)
    return math.fsum(n * point.angles[i - 1] for i, n in chi.items)


# ---------------------------------------------------------------- bipolar search


@dataclass(frozen=True)
class BipolarResult:
    sup: float
    maximizer: Character
    states: int


def _group_cost(s: int, mult: int, q: float) -> float:
    """Least ``sum |n_i|^q`` over ``mult`` integers summing to ``s`` (spread evenly)."""
    k, r = divmod(abs(s), mult)
    return r * (k + 1) ** q + (mult - r) * k**q


def bipolar_search(
    omega: TorusSeq | Sequence[float],
    eps: float,
    p: float,
    coeff_cap: int | None = None,
    max_states: int = 2_000_000,
) -> BipolarResult:
    """Maximise ``|pair(chi, omega)|`` over ``chi`` with ``4 eps |chi|_q <= 1``.

    Coordinates of ``omega`` with equal angles are merged: inside such a group
    only the coefficient sum matters and the cheapest way to realise a sum is
    the even spread (``|n|^q`` is convex).  A dynamic programme over the groups
    then keeps, for each reachable phase mod 1, the least budget spent.
    ``omega`` is in the bipolar of ``U_eps`` iff the returned ``sup <= 1/4``.
    """
    eps = _check_eps(eps)
    p = validate_p(p)
    if p <= 1:
        raise ParameterError("bipolar search needs p > 1")
    q = conjugate(p)
    radius = 1.0 / (4.0 * eps)
    if coeff_cap is None:
        coeff_cap = math.ceil(radius)
    if coeff_cap < math.ceil(radius * (1 - TIE_SLACK)):
        raise ParameterError(f"coeff_cap {coeff_cap} < ceil(1/(4 eps)) = {math.ceil(radius)}")
    budget = radius**q * (1 + TIE_SLACK)

    angles = omega.angles if isinstance(omega, TorusSeq) else tuple(float(canonical_angle(a)) for a in omega)
    groups = {}
    for idx, a in enumerate(angles, start=1):
        if a != 0.0:
            groups.setdefault(a, []).append(idx)
    group_list = sorted(groups.items(), key=lambda kv: kv[1][0])

    # phase -> (cost, path); path is a nested tuple (prev_path, group_no, s)
    states = {0.0: (0.0, None)}
    for g, (angle, idxs) in enumerate(group_list):
        mult = len(idxs)
        options = []
        s = 1
        while True:
            if -(-s // mult) > coeff_cap:
                break
            c = _group_cost(s, mult, q)
            if c > budget:
                break
            options.append((s, c))
            s += 1
        new_states = dict(states)
        for phase, (cost, path) in states.items():
            for s, c in options:
                total = cost + c
                if total > budget:
                    break
                for signed in (s, -s):
                    key = float(canonical_angle(phase + signed * angle))
                    cur = new_states.get(key)
                    if cur is None or total < cur[0]:
                        new_states[key] = (total, (path, g, signed))
        states = new_states
        if len(states) > max_states:
            raise BudgetExhausted(f"bipolar search exceeded {max_states} states")

    best_phase = max(states, key=lambda ph: (abs(ph), -states[ph][0]))
    coeffs = {}
    path = states[best_phase][1]
    while path is not None:
        path, g, s = path
        idxs = group_list[g][1]
        k, r = divmod(abs(s), len(idxs))
        sign = 1 if s > 0 else -1
        for j, idx in enumerate(idxs):
            n = k + (1 if j < r else 0)
            if n:
                coeffs[idx] = sign * n
    return BipolarResult(abs(best_phase), Character.from_dict(coeffs), len(states))


def bipolar_sup(omega, eps: float, p: float, coeff_cap: int | None = None) -> float:
    """Maximum canonical phase ``|pair(chi, omega)|`` over the polar of ``U_eps``."""
    return bipolar_search(omega, eps, p, coeff_cap).sup


# ---------------------------------------------------------------- hull witness


@dataclass(frozen=True)
class HullWitness:
    """A far-away point of the bipolar of ``U_eps`` (``p > 1``)."""

    p: float
    eps: float
    radius: float
    m0: int
    delta: float
    n_coords: int
    distance: float
    bipolar_sup: float
    maximizer_l1: int

    @property
    def omega(self) -> TorusSeq:
        return TorusSeq((self.delta,) * self.n_coords)

    @property
    def certified(self) -> bool:
        return self.bipolar_sup <= 0.25 and self.distance >= self.radius

    def to_json(self) -> str:
        return json.dumps({**asdict(self), "certified": self.certified}, sort_keys=True)


@dataclass(frozen=True)
class BoundedCertificate:
    """For ``p = 1``: every point of the bipolar of ``U_eps`` has small coordinates.

    With ``m = [1/(4 eps)]`` the characters ``m e_j`` and ``m * sign`` vectors lie
    in the polar; stepping through partial sums of the latter (each step at
    most 1/4) shows ``sum |phi_i| <= 1/(4m)``, hence also ``|phi_j| <= 1/(4m)``.
    """

    eps: float
    m: int
    per_coordinate_bound: float
    l1_bound: float

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


MAX_WITNESS_COORDS = 50_000_000


def hull_witness(p: float, eps: float, radius: float) -> HullWitness | BoundedCertificate:
    """Exhibit non-local-quasi-convexity (``p > 1``) or certify boundedness (``p = 1``).

    For ``p > 1`` the witness repeats ``delta = (1 - 1e-6) / (4 m0)``,
    ``m0 = [(1/(4 eps))^q]``, on ``N`` coordinates with ``N`` the least integer
    such that ``chord(delta) N^(1/p) >= radius``.  Both postconditions (bipolar
    membership by exact search, distance from the identity) are checked here.
    """
    eps = _check_eps(eps)
    p = validate_p(p)
    radius = float(radius)
    if not radius >= 0 or not math.isfinite(radius):
        raise ParameterError(f"radius must be finite and >= 0, got {radius}")
    r = 1.0 / (4.0 * eps)
    if p == 1:
        m = math.floor(r * (1 + TIE_SLACK))
        bound = 1.0 / (4 * m)
        return BoundedCertificate(eps, m, bound, bound)
    if p < 1:
        raise ParameterError("hull witness needs p >= 1")
    q = conjugate(p)
    m0 = math.floor(r**q * (1 + TIE_SLACK))
    delta = (1.0 - 1e-6) / (4 * m0)
    c = chord(delta)
    n = 0
    if radius > 0:
        n = max(1, math.ceil((radius / c) ** p))
        while n > 1 and c * (n - 1) ** (1.0 / p) >= radius:
            n -= 1
        while c * n ** (1.0 / p) < radius:
            n += 1
    if n > MAX_WITNESS_COORDS:
        raise ParameterError(f"witness would need {n} coordinates")
    omega = TorusSeq((delta,) * n)
    res = bipolar_search(omega, eps, p)
    distance = dist_p(omega, (), p)
    witness = HullWitness(p, eps, radius, m0, delta, n, distance, res.sup, int(norm(res.maximizer, "one")))
    if not witness.certified:
        raise BudgetExhausted(f"witness failed its own certificate: {witness}")
    return witness
