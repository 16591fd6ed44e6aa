import math

import numpy as np
import pytest

from qidual.errors import BudgetExhausted, ParameterError, SpecTooShort
from qidual.monothetic import (
    GeneratorSpec,
    approx_power,
    build_generator,
    truncation_bound,
    kronecker_covering_bound,
    kronecker_search,
    select_level,
)
from qidual.torus import TorusSeq, dist_p

A1 = math.sqrt(2) - 1


def rescan(alphas, targets, tol, cap):
    """Plain loop, one k at a time."""
    for k in range(1, cap + 1):
        if all(abs(k * a - y - round(k * a - y)) < tol for a, y in zip(alphas, targets)):
            return k
    return None


@pytest.fixture(scope="module")
def spec3():
    return build_generator(3)


def test_kronecker_examples():
    r = kronecker_search([A1], [0.5], 0.1, 100)
    assert r.k == 1 and r.residuals[0] == pytest.approx(0.0857864376, abs=1e-9)
    assert kronecker_search([A1], [0.0], 0.5, 10).k == 1
    r = kronecker_search([A1], [0.25], 0.01, 10**6)
    assert r.k == rescan([A1], [0.25], 0.01, 10**6) == 3


@pytest.mark.parametrize("seed", range(5))
def test_kronecker_matches_rescan(seed):
    rng = np.random.default_rng(seed)
    alphas = [A1, math.sqrt(3) % 1 / 16]
    targets = list(rng.uniform(-0.5, 0.5, 2))
    r = kronecker_search(alphas, targets, 0.02, 200_000)
    assert r.k == rescan(alphas, targets, 0.02, 200_000)


def test_kronecker_exhausted_and_errors():
    r = kronecker_search([0.5], [0.25], 0.1, 50)
    assert r.exhausted and r.k == 50
    with pytest.raises(ParameterError):
        kronecker_search([0.1], [0.1, 0.2], 0.1, 10)
    with pytest.raises(ParameterError):
        kronecker_search([0.1], [0.1], 0.0, 10)


def test_covering_bound_examples():
    assert kronecker_covering_bound([], 0.25, 4, 10) == 1
    assert kronecker_covering_bound([A1], 0.25, 20, 100) <= 4
    with pytest.raises(ParameterError):
        kronecker_covering_bound([A1], 0.01, 20, 100)
    with pytest.raises(BudgetExhausted):
        kronecker_covering_bound([0.5], 0.1, 20, 100)


def test_covering_bound_random_probes(spec3):
    alphas = spec3.alphas[:2]
    k_hat = spec3.k_bounds[1]
    rng = np.random.default_rng(3)
    for y in rng.uniform(-0.5, 0.5, (1000, 2)):
        k = rescan(alphas, y, 1 / 8, k_hat)
        assert k is not None and k <= k_hat


def test_generator_conditions(spec3):
    assert spec3.check() == []
    a = spec3.alphas
    assert a[0] == pytest.approx(0.414213562373095)
    assert a[1] == pytest.approx((math.sqrt(3) % 1) / 2 ** spec3.scales[1])
    assert a[0] > a[1] > a[2] > 0
    assert a[1] < 1 / (4 * spec3.k_bounds[0])
    assert a[2] < 1 / (8 * spec3.k_bounds[1])
    assert GeneratorSpec.from_json(spec3.to_json()) == spec3


def test_generator_range():
    with pytest.raises(ParameterError):
        build_generator(1)
    with pytest.raises(ParameterError):
        build_generator(9)


def test_broken_spec_detected(spec3):
    bad = GeneratorSpec(spec3.alphas[::-1], spec3.k_bounds, spec3.primes, spec3.scales, spec3.grid_levels)
    assert bad.check()


def test_level_selection():
    omega = TorusSeq((0.3, 0.1))
    n = select_level(omega, 0.2, 2)
    assert truncation_bound(omega, n, 2) < 0.04
    assert n == 1 or truncation_bound(omega, n - 1, 2) >= 0.04


def test_approx_power_identity(spec3):
    r = approx_power([], 0.1, spec3, 2)
    assert r.k == 0 and r.distance == 0.0


@pytest.mark.parametrize("p", [0, 1, 2])
def test_approx_power_example(spec3, p):
    omega = (0.3, 0.1)
    r = approx_power(omega, 0.2, spec3, p)
    assert r.k > 0
    assert dist_p(omega, spec3.power(r.k), p) < 0.2
    assert all(x < r.tol for x in r.residuals)


def test_approx_power_spec_too_short(spec3):
    with pytest.raises(SpecTooShort) as err:
        approx_power([0.1, 0.1, 0.1, 0.25], 0.2, spec3, 2)
    assert err.value.deficit == pytest.approx(2.0)
