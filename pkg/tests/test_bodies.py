import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from widthlab.bodies import (LpBall, MultiplierSpec, PolarBody, dual_gauge,
                             euclidean_ball, induced_ball, linear_image,
                             multiplier_diagonal, support_function,
                             truncate_multiplier)
from widthlab.errors import BadDimensions, SingularMatrix, SpectrumExhausted
from widthlab.manifolds import sphere
from widthlab.systems import trig_system

COS_L1 = 2.0 * math.sqrt(2.0) / math.pi


@pytest.fixture(scope="module")
def trig3():
    return trig_system(1)


class TestGaugeAxioms:
    @given(st.integers(min_value=0, max_value=2**31 - 1))
    @settings(max_examples=25, deadline=None)
    def test_lp_ball_axioms(self, seed):
        rng = np.random.default_rng(seed)
        p = float(rng.choice([1.0, 1.5, 2.0, 4.0, np.inf]))
        body = LpBall(4, p)
        x = rng.standard_normal((50, 4))
        y = rng.standard_normal((50, 4))
        gx = body.gauge_many(x)
        assert np.allclose(body.gauge_many(-x), gx, atol=1e-12)
        assert np.all(body.gauge_many(x + y) <= gx + body.gauge_many(y) + 1e-8)
        c = rng.standard_normal(50)
        assert np.allclose(body.gauge_many(c[:, None] * x), np.abs(c) * gx, atol=1e-8)

    @given(st.integers(min_value=0, max_value=2**31 - 1))
    @settings(max_examples=10, deadline=None)
    def test_induced_ball_axioms(self, seed):
        rng = np.random.default_rng(seed)
        body = induced_ball(trig_system(1), float(rng.choice([1.0, 1.5, 4.0])))
        x = rng.standard_normal((50, 3))
        y = rng.standard_normal((50, 3))
        assert np.all(body.gauge_many(x + y)
                      <= body.gauge_many(x) + body.gauge_many(y) + 1e-8)

    def test_zero_iff_origin(self, trig3):
        body = induced_ball(trig3, 1.5)
        assert body.gauge(np.zeros(3)) == 0.0
        for k in range(3):
            assert body.gauge(np.eye(3)[k]) > 1e-12


class TestInducedBall:
    def test_p2_unit_vectors(self, trig3):
        body = induced_ball(trig3, 2.0)
        for k in range(3):
            assert body.gauge(np.eye(3)[k]) == pytest.approx(1.0, abs=1e-10)

    def test_p1_cosine(self, trig3):
        body = induced_ball(trig3, 1.0)
        assert body.gauge([0.0, 1.0, 0.0]) == pytest.approx(COS_L1, abs=1e-3)
        # the rescaled coefficient vector lands on the boundary
        assert body.gauge(np.array([0.0, 1.0, 0.0]) / body.gauge([0.0, 1.0, 0.0])) \
            == pytest.approx(1.0, abs=1e-12)

    def test_pinf_cosine(self, trig3):
        body = induced_ball(trig3, np.inf)
        assert body.gauge([0.0, 1.0, 0.0]) == pytest.approx(math.sqrt(2.0), abs=1e-12)

    def test_containment_chain(self, trig3):
        # for p >= 2: gauge_p >= euclidean >= gauge_1 pointwise
        rng = np.random.default_rng(8)
        x = rng.standard_normal((500, 3))
        g1 = induced_ball(trig3, 1.0).gauge_many(x)
        g2 = induced_ball(trig3, 2.0).gauge_many(x)
        g4 = induced_ball(trig3, 4.0).gauge_many(x)
        eu = np.linalg.norm(x, axis=1)
        assert np.all(g4 >= g2 - 1e-10)
        assert np.allclose(g2, eu, atol=1e-8)
        assert np.all(g2 >= g1 - 1e-10)

    def test_gradients_by_finite_differences(self, trig3):
        rng = np.random.default_rng(9)
        for p in (1.5, 2.0, 4.0, 8.0):
            body = induced_ball(trig3, p)
            y = rng.standard_normal((10, 3))
            g, grad = body.gauge_grad_many(y)
            eps = 1e-7
            for i in range(3):
                yp = y.copy()
                yp[:, i] += eps
                fd = (body.gauge_many(yp) - g) / eps
                assert np.allclose(fd, grad[:, i], atol=1e-5)


class TestLinearImage:
    def test_identity_preserves_gauge(self, trig3):
        rng = np.random.default_rng(2)
        base = induced_ball(trig3, 4.0)
        image = linear_image(base, np.eye(3))
        x = rng.standard_normal((100, 3))
        assert np.allclose(image.gauge_many(x), base.gauge_many(x), atol=1e-12)

    def test_semiaxis_on_boundary(self):
        body = linear_image(euclidean_ball(2), np.diag([2.0, 1.0]))
        assert body.gauge([2.0, 0.0]) == pytest.approx(1.0)
        assert body.gauge([0.0, 1.0]) == pytest.approx(1.0)

    def test_singular_rejected(self):
        with pytest.raises(SingularMatrix):
            linear_image(euclidean_ball(2), np.zeros((2, 2)))

    def test_descriptor(self):
        body = linear_image(euclidean_ball(2), np.diag([2.0, 1.0]))
        desc = body.descriptor()
        assert desc["matrix"] == {"diagonal": [2.0, 1.0]}
        json.dumps(desc)  # serializable


class TestDualGauge:
    def test_p2_self_dual(self, trig3):
        rng = np.random.default_rng(4)
        for _ in range(5):
            x = rng.standard_normal(3)
            assert dual_gauge(trig3, 2.0, x, restarts=8) == pytest.approx(
                np.linalg.norm(x), abs=1e-6)

    def test_zero_vector(self, trig3):
        assert dual_gauge(trig3, 2.0, np.zeros(3)) == 0.0

    def test_p1_bounded_by_sup_norm(self, trig3):
        val = dual_gauge(trig3, 1.0, np.array([0.0, 1.0, 0.0]), restarts=16)
        assert val <= math.sqrt(2.0) + 1e-6

    @pytest.mark.parametrize("p", [2.0, 4.0, 8.0])
    def test_dominated_by_dual_exponent_norm(self, trig3, p):
        # pairing through an orthonormal system is an L2 inner product, so
        # Hoelder gives h_p(x) <= ||x||_(p') pointwise
        from widthlab._optim import support_values

        p_dual = p / (p - 1.0)
        rng = np.random.default_rng(int(p))
        x = rng.standard_normal((500, 3))
        h = support_values(induced_ball(trig3, p), x, restarts=4, iters=250, seed=0)
        dom = trig3.lp_norm_many(x, p_dual)
        assert np.all(h <= dom + 1e-6)

    def test_polar_body_matches_support_function(self, trig3):
        body = induced_ball(trig3, 4.0)
        polar = PolarBody(body, restarts=6, iters=300, seed=0)
        x = np.array([0.3, -0.7, 0.2])
        assert polar.gauge(x) == pytest.approx(
            support_function(body, x, restarts=8), rel=1e-4)


class TestMultiplier:
    def test_sobolev_block_on_sphere(self):
        space = sphere(2)
        spec = MultiplierSpec(lambda_fn=lambda t: 1.0 / t, regularly_varying=True)
        diag = multiplier_diagonal(spec, space, 5)
        assert np.allclose(diag[:3], 0.5)      # eigenvalue 2 with multiplicity 3
        assert np.allclose(diag[3:], 1.0 / 6)  # next eigenvalue 6

    def test_constant_rate_gives_identity(self):
        space = sphere(2)
        spec = MultiplierSpec(lambda_fn=lambda t: 1.0)
        assert np.allclose(truncate_multiplier(spec, space, 4), np.eye(4))

    def test_exact_block_boundary(self):
        space = sphere(2)
        spec = MultiplierSpec(lambda_fn=lambda t: t ** -0.5, regularly_varying=True)
        n = space.tau(3) - 1  # counts exclude the constant term
        diag = multiplier_diagonal(spec, space, n)
        assert diag[-1] == pytest.approx(space.eigenvalue(3) ** -0.5)

    def test_nonincreasing_when_regularly_varying(self):
        space = sphere(3)
        spec = MultiplierSpec(lambda_fn=lambda t: t ** -1.2, regularly_varying=True)
        diag = multiplier_diagonal(spec, space, 40)
        assert np.all(np.diff(diag) <= 1e-15)

    def test_sequence_exhaustion(self):
        spec = MultiplierSpec(sequence=np.array([1.0, 0.5]))
        with pytest.raises(SpectrumExhausted):
            multiplier_diagonal(spec, None, 3)

    def test_spec_validation(self):
        with pytest.raises(BadDimensions):
            MultiplierSpec()
        with pytest.raises(BadDimensions):
            MultiplierSpec(sequence=np.array([1.0, -0.5]))
        with pytest.raises(BadDimensions):
            MultiplierSpec(sequence=np.array([0.5, 1.0]), regularly_varying=True)


def test_descriptors_roundtrip(trig3):
    bodies = [
        LpBall(2, np.inf),
        induced_ball(trig3, 1.5),
        linear_image(euclidean_ball(2), np.array([[2.0, 1.0], [0.0, 1.0]])),
    ]
    for body in bodies:
        desc = body.descriptor()
        assert "kind" in desc
        json.dumps(desc)
