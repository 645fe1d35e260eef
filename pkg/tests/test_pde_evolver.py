import math

import numpy as np
import pytest

from replicator_selfsim import (
    Grid,
    NegativityError,
    PdeState,
    StabilityViolation,
    ValidationError,
    evolve,
    functionals,
    inner_Au_u,
    nonlocal_terms,
    similarity_state,
    step,
    suggest_dt,
)
from replicator_selfsim.similarity import eval_u


@pytest.fixture(scope="module")
def oracle(similarity_11):
    return functionals(similarity_11.g)


def zero_state(n=101, t=1.0):
    g = Grid(10.0, n)
    return PdeState(g, np.zeros(n), t)


def gaussian_state(n=101, t=1.0, height=1.0):
    g = Grid(10.0, n)
    u = height * np.exp(-g.x**2)
    u[0] = u[-1] = 0.0
    return PdeState(g, u, t)


class TestGrid:
    def test_geometry(self):
        g = Grid(30.0, 2001)
        assert g.x_min == -30.0 and g.dx == pytest.approx(0.03)
        x = g.x
        assert x[1000] == 0.0 and np.array_equal(x, -x[::-1])
        assert x[-1] == pytest.approx(30.0, rel=1e-15)

    @pytest.mark.parametrize("n", [2000, 3])
    def test_bad_node_count(self, n):
        with pytest.raises(ValidationError):
            Grid(30.0, n)

    def test_negative_state_rejected(self):
        g = Grid(1.0, 5)
        with pytest.raises(ValidationError):
            PdeState(g, np.array([0, -1.0, 0, 0, 0]), 1.0)


class TestNonlocal:
    def test_zero_field(self):
        assert nonlocal_terms(zero_state()) == (0.0, 0.0)
        assert inner_Au_u(zero_state(), 1.0) == 0.0

    def test_second_order_against_quadrature(self, similarity_11, oracle):
        errs = []
        for n in (1001, 2001, 4001):
            K, Lam = nonlocal_terms(similarity_state(similarity_11, Grid(30.0, n)))
            errs.append((abs(K - oracle.K), abs(Lam - oracle.Lam)))
        assert errs[1][0] < 1e-3 and errs[1][1] < 1e-3
        for coarse, fine in zip(errs, errs[1:]):
            assert 3.6 < coarse[0] / fine[0] < 4.4
            assert 3.6 < coarse[1] / fine[1] < 4.4

    def test_inner_product_at_unit_time(self, similarity_11, oracle):
        state = similarity_state(similarity_11, Grid(30.0, 4001))
        assert inner_Au_u(state, 1.0) == pytest.approx(-oracle.K - 0.5 * oracle.Lam, rel=1e-3)

    @pytest.mark.parametrize("t", [0.5, 1.0, 4.0])
    def test_inner_product_negative(self, t):
        assert inner_Au_u(gaussian_state(t=t), 2.0) < 0


class TestStep:
    def test_zero_is_fixed_point(self):
        s = step(zero_state(), 1.0, 0.1)
        assert np.all(s.u == 0) and s.t == 1.1
        out = evolve(zero_state(), 1.0, 2.0)
        assert np.all(out.u == 0) and out.t == 2.0

    def test_one_step_local_error(self, similarity_11):
        errs = []
        for n in (1001, 2001):
            st = similarity_state(similarity_11, Grid(30.0, n))
            dt = 0.9 * suggest_dt(st, 1.0)
            new = step(st, 1.0, dt)
            exact = eval_u(similarity_11, 1.0 + dt, st.grid.x)
            errs.append(np.max(np.abs(new.u[1:-1] - exact[1:-1])) / (dt * st.grid.dx**2))
        # error / (dt dx^2) stays bounded as both shrink
        assert errs[1] < 2 * errs[0] and errs[1] < 1.0

    def test_mass_drift_per_step(self, similarity_11):
        st = similarity_state(similarity_11, Grid(30.0, 2001))
        new = step(st, 1.0, 0.9 * suggest_dt(st, 1.0))
        assert abs(new.mass - st.mass) < 1e-8

    def test_boundaries_held_at_zero(self):
        new = step(gaussian_state(), 1.0, 1e-3)
        assert new.u[0] == 0.0 and new.u[-1] == 0.0

    def test_negative_undershoot_raises(self):
        st = gaussian_state()
        with pytest.raises(NegativityError):
            step(st, 1.0, 20 * suggest_dt(st, 1.0))

    def test_non_finite_raises(self):
        with pytest.raises(StabilityViolation):
            step(gaussian_state(height=1e200), 1.0, 1.0)


class TestSuggestDt:
    def test_zero_field_unbounded(self):
        assert suggest_dt(zero_state(), 1.0) == math.inf

    def test_diffusion_limited_halves(self):
        st1, st2 = gaussian_state(n=1001, height=1.0), gaussian_state(n=1001, height=2.0)
        assert suggest_dt(st2, 0.01) == pytest.approx(suggest_dt(st1, 0.01) / 2, rel=1e-14)

    def test_drift_limited_scales_with_time(self):
        a, b = gaussian_state(t=1e-6), gaussian_state(t=8e-6)
        assert suggest_dt(b, 1.0) / suggest_dt(a, 1.0) == pytest.approx(4.0, rel=1e-12)


class TestEvolve:
    def test_symmetry_preserved(self, similarity_11):
        out = evolve(similarity_state(similarity_11, Grid(30.0, 501)), 1.0, 1.2)
        assert np.array_equal(out.u, out.u[::-1])

    def test_histories_and_positivity(self, similarity_11):
        out = evolve(similarity_state(similarity_11, Grid(30.0, 501)), 1.0, 1.2)
        assert out.t == 1.2
        assert len(out.mass_history) == len(out.dt_history) + 1
        assert np.all(out.u >= 0)
        assert max(abs(m - 1) for _, m in out.mass_history) < 1e-4

    def test_requires_forward_time(self):
        with pytest.raises(ValidationError):
            evolve(gaussian_state(), 1.0, 0.5)
