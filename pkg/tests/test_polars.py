import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qidual.characters import Character, norm, pair
from qidual.errors import ParameterError
from qidual.polars import (
    BoundedCertificate,
    HullWitness,
    PolarVerdict,
    bipolar_search,
    bipolar_sup,
    holder_extremal,
    hull_witness,
    polar_member_closed,
    polar_sup_oracle,
)
from qidual.torus import TorusSeq, canonical_angle, dist_p, rho_p


@pytest.mark.parametrize(
    "coeffs, want",
    [({1: 1}, PolarVerdict.MEMBER), ({1: 5, 2: 2}, PolarVerdict.NON_MEMBER), ({}, PolarVerdict.MEMBER), ({1: 3, 2: 4}, PolarVerdict.MEMBER)],
)
def test_closed_form_examples(coeffs, want):
    assert polar_member_closed(Character.from_dict(coeffs), 0.05, 2) is want


def test_closed_form_p1_zones():
    eps = 0.05  # thresholds 5 and 10 on the sup norm
    assert polar_member_closed(Character.from_dict({1: 5, 2: -5}), eps, 1) is PolarVerdict.MEMBER
    assert polar_member_closed(Character.from_dict({1: 7}), eps, 1) is PolarVerdict.BOUNDARY_ZONE
    assert polar_member_closed(Character.from_dict({1: 10}), eps, 1) is PolarVerdict.BOUNDARY_ZONE
    assert polar_member_closed(Character.from_dict({1: 11}), eps, 1) is PolarVerdict.NON_MEMBER


def test_closed_form_rejects_bad_eps():
    for eps in (0, 0.25, -0.1):
        with pytest.raises(ParameterError):
            polar_member_closed(Character.unit(1), eps, 2)


@pytest.mark.parametrize(
    "coeffs, eps, want",
    [({1: 1}, 0.05, 0.05), ({1: 3, 2: 4}, 0.1, 0.5), ({1: 1, 2: 1}, 0.1, 0.1 * math.sqrt(2))],
)
def test_sup_oracle_examples(coeffs, eps, want):
    assert polar_sup_oracle(Character.from_dict(coeffs), eps, 2) == pytest.approx(want, abs=1e-14)


@settings(max_examples=100)
@given(
    st.dictionaries(st.integers(1, 4), st.integers(-6, 6), min_size=1, max_size=4).filter(lambda d: any(d.values())),
    st.sampled_from([1.5, 2.0, 3.0]),
)
def test_holder_point_on_sphere_and_attains(coeffs, p):
    chi = Character.from_dict(coeffs)
    eps = 0.07
    point = holder_extremal(chi, eps, p)
    assert rho_p(point, (), p) == pytest.approx(eps, rel=1e-12)
    q = p / (p - 1)
    assert polar_sup_oracle(chi, eps, p) == pytest.approx(eps * norm(chi, q), rel=1e-12)


def test_sup_oracle_not_beaten_by_sampling():
    rng = np.random.default_rng(7)
    chi = Character.from_dict({1: 3, 2: -4, 3: 1})
    eps, p = 0.1, 2
    best = polar_sup_oracle(chi, eps, p)
    x = rng.normal(size=(20000, 3))
    x *= eps * rng.uniform(0, 1, (20000, 1)) ** (1 / 3) / np.linalg.norm(x, axis=1, keepdims=True)
    assert (x @ np.array([3, -4, 1])).max() <= best + 1e-12


def brute_bipolar(angles, eps, p):
    q = p / (p - 1)
    budget = (1 / (4 * eps)) ** q * (1 + 1e-12)
    r = math.floor(1 / (4 * eps) + 1e-9)
    best = 0.0
    for n in itertools.product(range(-r, r + 1), repeat=len(angles)):
        if sum(abs(v) ** q for v in n) <= budget:
            best = max(best, abs(canonical_angle(math.fsum(v * a for v, a in zip(n, angles)))))
    return best


@pytest.mark.parametrize("p", [2.0, 3.0])
@settings(max_examples=25)
@given(
    st.lists(
        st.sampled_from([0.01, 0.03, -0.07, 0.11, 0.2, 0.3, -0.41, 0.013]), min_size=1, max_size=3
    )
)
def test_bipolar_dp_matches_brute_force(p, angles):
    eps = 0.12
    res = bipolar_search(angles, eps, p)
    assert res.sup == pytest.approx(brute_bipolar(angles, eps, p), abs=1e-12)
    # the reported maximiser is feasible and attains the reported phase
    q = p / (p - 1)
    assert norm(res.maximizer, q) <= (1 / (4 * eps)) * (1 + 1e-12)
    assert abs(pair(res.maximizer, angles)) == pytest.approx(res.sup, abs=1e-12)


def test_bipolar_examples():
    assert bipolar_sup([], 0.05, 2) == 0.0
    res = bipolar_search([0.01] * 25, 0.05, 2)
    assert res.sup == pytest.approx(0.25, abs=1e-12)
    assert norm(res.maximizer, "one") == 25
    # a single coordinate at 0.3: n = +-5 is on the boundary of the polar and reaches phase -1/2
    assert bipolar_sup([0.3], 0.05, 2) == pytest.approx(0.5)
    assert brute_bipolar([0.3], 0.05, 2) == pytest.approx(0.5)


def test_hull_witness_p2():
    w = hull_witness(2, 0.05, 10)
    assert isinstance(w, HullWitness)
    assert w.m0 == 25
    assert w.delta == pytest.approx((1 - 1e-6) / 100)
    assert w.n_coords == 25339
    assert w.distance >= 10
    assert dist_p(w.omega, (), 2) == pytest.approx(w.distance)
    assert w.bipolar_sup <= 0.25
    assert w.certified
    # one coordinate fewer would not reach the radius
    assert 2 * math.sin(math.pi * w.delta) * math.sqrt(w.n_coords - 1) < 10


def test_hull_witness_trivial_radius():
    w = hull_witness(2, 0.05, 0)
    assert w.n_coords == 0 and w.omega == TorusSeq(())


def test_hull_witness_p1_bounded():
    c = hull_witness(1, 0.05, 10)
    assert isinstance(c, BoundedCertificate)
    assert c.m == 5
    assert c.per_coordinate_bound == pytest.approx(0.05)


def test_hull_witness_p1_bound_is_sharp_enough():
    # any coordinate beyond 1/(4m) is pushed past phase 1/4 by m e_j, which lies in the polar
    c = hull_witness(1, 0.05, 10)
    phi = c.per_coordinate_bound * 1.01
    assert abs(pair(Character.from_dict({1: c.m}), [phi])) > 0.25
    assert polar_member_closed(Character.from_dict({1: c.m}), 0.05, 1) is PolarVerdict.MEMBER
