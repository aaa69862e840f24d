import json
import math

import numpy as np
import pytest

from widthlab.errors import BadDimensions, CannotSatisfy, DimensionMismatch
from widthlab.systems import (OrthonormalSystem, QuadratureRule, abs_power,
                              bounded_subsystem, lp_norm, sphere_harmonics_system,
                              trig_prefix_system, trig_system)

NORM_COS_L1 = 2.0 * math.sqrt(2.0) / math.pi          # (1/2pi) int |sqrt2 cos| dt
NORM_COS_L4 = 1.5 ** 0.25                             # (1/2pi) int (sqrt2 cos)^4 = 3/2


@pytest.fixture(scope="module")
def trig3():
    return trig_system(1)


@pytest.fixture(scope="module")
def sphere9():
    return sphere_harmonics_system(2)


class TestQuadrature:
    def test_weights_must_sum_to_one(self):
        with pytest.raises(BadDimensions):
            QuadratureRule(np.array([0.0, 1.0]), np.array([0.5, 0.6]))

    def test_negative_weights_rejected(self):
        with pytest.raises(BadDimensions):
            QuadratureRule(np.array([0.0, 1.0]), np.array([1.5, -0.5]))


class TestTrigSystem:
    def test_gram_is_identity(self, trig3):
        assert np.max(np.abs(trig3.gram() - np.eye(3))) < 1e-12

    def test_gram_identity_all_sizes(self):
        for k in (0, 2, 4, 7):
            s = trig_system(k)
            assert np.max(np.abs(s.gram() - np.eye(s.n))) < 1e-8

    def test_constant_function_every_p(self, trig3):
        for p in (1.0, 1.5, 2.0, 4.0, np.inf):
            assert lp_norm(trig3, [1.0, 0.0, 0.0], p) == pytest.approx(1.0, abs=1e-12)

    def test_cosine_l1(self, trig3):
        assert lp_norm(trig3, [0.0, 1.0, 0.0], 1.0) == pytest.approx(NORM_COS_L1, abs=1e-3)

    def test_cosine_l4(self, trig3):
        assert lp_norm(trig3, [0.0, 1.0, 0.0], 4.0) == pytest.approx(NORM_COS_L4, abs=1e-12)

    def test_cosine_sup(self, trig3):
        # the grid contains t=0 where sqrt2*cos peaks exactly
        assert lp_norm(trig3, [0.0, 1.0, 0.0], np.inf) == pytest.approx(math.sqrt(2.0))

    def test_sine_sup_bias_below_one_percent(self, trig3):
        val = lp_norm(trig3, [0.0, 0.0, 1.0], np.inf)
        assert math.sqrt(2.0) * 0.99 <= val <= math.sqrt(2.0)

    def test_p2_matches_euclidean(self):
        rng = np.random.default_rng(1)
        s = trig_system(3)
        for _ in range(50):
            a = rng.standard_normal(s.n)
            assert lp_norm(s, a, 2.0) == pytest.approx(np.linalg.norm(a), abs=1e-8)

    def test_evaluator_matches_values(self, trig3):
        theta = trig3.quadrature.nodes
        for k in range(3):
            assert trig3.evaluator(k, theta[5]) == pytest.approx(trig3.values[k, 5])

    def test_dimension_mismatch(self, trig3):
        with pytest.raises(DimensionMismatch):
            lp_norm(trig3, [1.0, 0.0], 2.0)

    def test_p_below_one_rejected(self, trig3):
        with pytest.raises(BadDimensions):
            lp_norm(trig3, [1.0, 0.0, 0.0], 0.5)


class TestSphereSystem:
    def test_degree_zero_is_constant(self):
        s = sphere_harmonics_system(0)
        assert s.n == 1
        for p in (1.0, 2.0, 7.0, np.inf):
            assert lp_norm(s, [1.0], p) == pytest.approx(1.0, abs=1e-12)

    def test_gram_is_identity(self, sphere9):
        assert sphere9.n == 9
        assert np.max(np.abs(sphere9.gram() - np.eye(9))) < 1e-8

    def test_gram_identity_degree_twelve(self):
        s = sphere_harmonics_system(12)
        assert s.n == 169
        assert np.max(np.abs(s.gram() - np.eye(169))) < 1e-8

    def test_zonal_degree_one(self, sphere9):
        # index 2 is the (k=1, order=0) harmonic sqrt(3) cos(polar)
        y10 = np.zeros(9)
        y10[2] = 1.0
        assert lp_norm(sphere9, y10, 4.0) ** 4 == pytest.approx(9.0 / 5.0, abs=1e-10)
        assert lp_norm(sphere9, y10, np.inf) == pytest.approx(math.sqrt(3.0), abs=1e-12)

    def test_sup_bounds_certified(self, sphere9):
        grid_max = np.max(np.abs(sphere9.values), axis=1)
        assert np.all(sphere9.sup_norms >= grid_max - 1e-12)

    def test_degree_cap(self):
        with pytest.raises(BadDimensions):
            sphere_harmonics_system(13)


class TestNormAxioms:
    @pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 4.0, np.inf])
    def test_triangle_and_homogeneity(self, p):
        rng = np.random.default_rng(97 if np.isinf(p) else int(p * 10))
        for system in (trig_system(2), sphere_harmonics_system(1)):
            x = rng.standard_normal((1000, system.n))
            y = rng.standard_normal((1000, system.n))
            nx = system.lp_norm_many(x, p)
            ny = system.lp_norm_many(y, p)
            nxy = system.lp_norm_many(x + y, p)
            assert np.all(nxy <= nx + ny + 1e-8)
            c = rng.standard_normal(1000)
            ncx = system.lp_norm_many(c[:, None] * x, p)
            assert np.max(np.abs(ncx - np.abs(c) * nx)) < 1e-8

    def test_monotone_in_p(self):
        # on a probability space the L_p norms increase with p
        rng = np.random.default_rng(5)
        grid = [1.0, 1.5, 2.0, 4.0, 8.0, np.inf]
        for system in (trig_system(2), sphere_harmonics_system(2)):
            x = rng.standard_normal((200, system.n))
            norms = [system.lp_norm_many(x, p) for p in grid]
            for lo, hi in zip(norms, norms[1:]):
                assert np.all(lo <= hi + 1e-10)


class TestPrefix:
    @pytest.mark.parametrize("n", [1, 2, 4, 6])
    def test_prefix_orthonormal(self, n):
        s = trig_prefix_system(n)
        assert s.n == n
        assert np.max(np.abs(s.gram() - np.eye(n))) < 1e-12

    def test_prefix_bounds(self, trig3):
        with pytest.raises(BadDimensions):
            trig3.prefix(4)


class TestBoundedSubsystem:
    def test_trig_keeps_everything(self, trig3):
        sub = bounded_subsystem(trig3, 0.9)
        assert sub.size == 3
        assert sub.bound == pytest.approx(math.sqrt(2.0))

    def test_bound_depends_only_on_fraction_for_trig(self):
        bounds = {bounded_subsystem(trig_system(k), 0.5).bound for k in (1, 3, 5, 8)}
        assert bounds == {math.sqrt(2.0)}

    def test_sphere_half_fraction(self):
        s = sphere_harmonics_system(4)
        sub = bounded_subsystem(s, 0.5)
        assert sub.size == 13
        assert sub.bound <= 3.0 * math.sqrt(2 * 4 + 1)

    def test_single_function(self):
        s = sphere_harmonics_system(0)
        sub = bounded_subsystem(s, 1e-9)
        assert sub.size == 1

    def test_selected_functions_orthonormal(self):
        s = sphere_harmonics_system(3)
        sub = bounded_subsystem(s, 0.4)
        idx = list(sub.indices)
        w = s.quadrature.weights
        gram = (s.values[idx] * w) @ s.values[idx].T
        assert np.max(np.abs(gram - np.eye(len(idx)))) < 1e-8

    def test_infinite_sup_norm_fails(self, trig3):
        broken = OrthonormalSystem(
            name="broken",
            quadrature=trig3.quadrature,
            values=trig3.values,
            sup_norms=np.array([1.0, np.inf, np.inf]),
        )
        with pytest.raises(CannotSatisfy):
            bounded_subsystem(broken, 0.9)

    def test_fraction_validation(self, trig3):
        with pytest.raises(BadDimensions):
            bounded_subsystem(trig3, 1.0)


class TestSerialization:
    def test_json_fields(self, trig3):
        payload = json.loads(trig3.to_json())
        assert payload["name"] == "trig-3"
        assert payload["n"] == 3
        assert len(payload["weights"]) == len(payload["nodes"])
        assert payload["sup_norms"] == pytest.approx([1.0, math.sqrt(2), math.sqrt(2)])


def test_abs_power_matches_numpy():
    rng = np.random.default_rng(2)
    a = np.abs(rng.standard_normal(500)) + 1e-6
    for p in (0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 7.0, 8.5, 3.3):
        assert np.allclose(abs_power(a, p), a**p, rtol=1e-12)
