import math

import pytest

from echosqueeze.decoherence import (
    CollisionScenario,
    DecoherenceParams,
    cavity_signal_factor,
    cavity_variance_mix,
    collision_contrast,
    collision_oracle,
    collision_signal,
    max_tolerable_asymptote,
    max_tolerable_collisions,
    spontaneous_budget,
    spontaneous_signal_factor,
)


def params(**kw):
    base = dict(kappa=1.0, delta_abs=2.0, gamma_sp=1.0, g=5.0, n_atoms=100)
    base.update(kw)
    return DecoherenceParams(**base)


class TestParams:
    def test_cooperativity(self):
        assert params().cooperativity == pytest.approx(100.0)
        assert params(kappa=0.0).cooperativity == math.inf

    @pytest.mark.parametrize("kw", [dict(kappa=-1), dict(delta_abs=0.0), dict(n_atoms=0), dict(alpha=0.5), dict(alpha=101)])
    def test_validation(self, kw):
        with pytest.raises(ValueError):
            params(**kw)

    def test_alpha_default_is_clamped_pmf(self):
        p = params()
        assert p.alpha_at(0.5) == pytest.approx(math.sqrt(2) * 50 * math.sin(0.5))
        assert p.alpha_at(1e-6) == 1.0
        assert params(alpha=3.0).alpha_at(0.5) == 3.0

    def test_gamma_coll(self):
        assert params(chi=0.5).gamma_coll == pytest.approx(0.25)


class TestCavityAndEmission:
    def test_signal_factors(self):
        p = params(alpha=10.0)
        assert cavity_signal_factor(0.4, p) == pytest.approx(math.exp(-0.4 / 2.0))
        assert spontaneous_signal_factor(0.4, p) == pytest.approx(math.exp(-2 * 10 * 0.4 * 2.0 / 100))

    def test_variance_mix(self):
        mix = cavity_variance_mix(0.0, 3.0, 5.0)
        assert (mix.var_x, mix.var_y) == (3.0, 5.0)
        mix = cavity_variance_mix(50.0, 3.0, 5.0)
        assert mix.var_x == pytest.approx(4.0) and mix.var_y == pytest.approx(4.0)
        with pytest.raises(ValueError):
            cavity_variance_mix(-1.0, 1.0, 1.0)

    def test_budget_optimum(self):
        p = params(alpha=20.0)
        mu = 0.3
        b = spontaneous_budget(mu, p)
        assert b.delta_opt == pytest.approx(math.sqrt(100 / 40))
        combined = cavity_signal_factor(mu, p, b.delta_opt) * spontaneous_signal_factor(mu, p, b.delta_opt)
        assert combined == pytest.approx(b.net_factor)
        for d in (0.5 * b.delta_opt, 2 * b.delta_opt):
            assert cavity_signal_factor(mu, p, d) * spontaneous_signal_factor(mu, p, d) < combined
        assert b.mu_bound == pytest.approx(math.sqrt(100 / (math.sqrt(2) * 100)))
        assert b.gamma_eff == pytest.approx(2.0 / 100)


class TestCollisions:
    def test_closed_form(self):
        scn = CollisionScenario(10, 2, 0.5)
        assert collision_signal(scn) == pytest.approx(4 * math.cos(0.5) ** 2)
        assert collision_contrast(scn) == pytest.approx(math.cos(0.5) ** 2)

    def test_no_collisions_full_contrast(self):
        for mu in (0.1, 0.7, 1.5):
            assert collision_contrast(CollisionScenario(30, 0, mu)) == 1.0

    def test_all_collided(self):
        assert collision_signal(CollisionScenario(5, 5, 0.3)) == 0.0
        assert collision_contrast(CollisionScenario(5, 5, 0.3)) == 0.0
        assert collision_oracle(CollisionScenario(5, 5, 0.3)) == 0.0

    @pytest.mark.parametrize("n", [1, 4, 7, 12])
    def test_oracle(self, n):
        for n_col in range(n + 1):
            for mu in (0.2, 1.0, math.pi / 2):
                scn = CollisionScenario(n, n_col, mu)
                assert collision_oracle(scn) == pytest.approx(collision_signal(scn), abs=1e-10)

    def test_oracle_size_limit(self):
        with pytest.raises(ValueError):
            collision_oracle(CollisionScenario(17, 1, 0.1))

    @pytest.mark.parametrize("kw", [dict(n_atoms=0, n_collided=0), dict(n_atoms=3, n_collided=4), dict(n_atoms=3, n_collided=-1)])
    def test_validation(self, kw):
        with pytest.raises(ValueError):
            CollisionScenario(mu=0.1, **kw)

    def test_max_tolerable(self):
        assert max_tolerable_collisions(0.1) == pytest.approx(199.666, abs=1e-3)
        assert max_tolerable_collisions(0.0) == math.inf
        assert max_tolerable_collisions(math.pi / 2) == 0.0
        assert max_tolerable_asymptote(0.1) == pytest.approx(200.0)
        assert max_tolerable_asymptote(0.0) == math.inf
        # at the tolerable count the contrast falls by e
        mu = 0.2
        assert math.cos(mu) ** max_tolerable_collisions(mu) == pytest.approx(math.exp(-1))
