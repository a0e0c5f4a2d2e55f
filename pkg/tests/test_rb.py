import numpy as np
import pytest

from noisimrl.circuits import composite_unitary
from noisimrl.errors import NumericalError
from noisimrl.noise import RBModel, apply_ground_truth, apply_rb_model, NOISE_1Q
from noisimrl.rb import (
    RBFit,
    fit_decay,
    rb_characterize,
    rb_sequence,
    survival_probability,
    simulate,
)


class TestSequences:
    @pytest.mark.parametrize("m", [1, 3, 10])
    def test_1q_identity_up_to_phase(self, m, rng):
        for _ in range(10):
            c = rb_sequence(1, m, rng)
            u = composite_unitary(c)
            assert abs(abs(np.trace(u)) - 2) < 1e-9

    @pytest.mark.parametrize("m", [1, 3, 10])
    def test_1q_one_gate_per_body_moment(self, m, rng):
        c = rb_sequence(1, m, rng)
        for moment in c.moments[:m]:
            assert len(moment.gates) == 1

    @pytest.mark.parametrize("n,m", [(2, 1), (3, 1), (3, 4)])
    def test_multiqubit_identity_survival(self, n, m, rng):
        for _ in range(5):
            c = rb_sequence(n, m, rng)
            assert survival_probability(simulate(c)) == pytest.approx(1.0, abs=1e-9)

    def test_noiseless_survival_1q(self, rng):
        c = rb_sequence(1, 8, rng)
        assert survival_probability(simulate(c)) == pytest.approx(1.0, abs=1e-10)


class TestAnalyticSurvival:
    def test_per_gate_depolarizing(self, rng):
        # under pure per-gate depolarizing, the unitary part cancels and the
        # survival is exactly 1/2 + (1 - lambda)^G / 2 with G the gate count
        lam = 0.02
        for m in (3, 10):
            c = rb_sequence(1, m, rng)
            noisy = apply_rb_model(c, RBModel(1 - lam))
            expected = 0.5 + 0.5 * (1 - lam) ** c.n_gates()
            got = survival_probability(simulate(noisy))
            assert got == pytest.approx(expected, abs=1e-12)


class TestFit:
    def test_recovers_exact_decay(self):
        depths = np.array([3, 5, 7, 10, 15, 20, 25, 30])
        a, p, b = 0.47, 0.975, 0.5
        fit = fit_decay(depths, [[a * p**d + b] for d in depths], 1)
        assert fit.a == pytest.approx(a, abs=1e-6)
        assert fit.p == pytest.approx(p, abs=1e-6)
        assert fit.b == pytest.approx(b, abs=1e-6)

    def test_flat_data_raises(self):
        with pytest.raises(NumericalError):
            fit_decay([3, 5, 7], [[0.5], [0.5], [0.501]], 1)

    def test_mean_over_replicates(self):
        depths = [2, 4, 8, 16]
        fit = fit_decay(
            depths, [[0.9, 0.9], [0.8, 0.8], [0.7, 0.7], [0.55, 0.55]], 1
        )
        assert isinstance(fit, RBFit)
        assert fit.mean_survivals == (0.9, 0.8, 0.7, 0.55)


class TestCharacterize:
    def test_recovers_depolarizing_parameter(self, rng):
        attach = lambda c: apply_rb_model(c, RBModel(0.98))
        result = rb_characterize(attach, 1, rng)
        assert result.fit.p == pytest.approx(0.98, abs=0.005)
        assert set(result.samples) == {3, 5, 7, 10, 15, 20, 25, 30}
        assert all(len(v) == 30 for v in result.samples.values())

    def test_ground_truth_decays(self, rng):
        attach = lambda c: apply_ground_truth(c, NOISE_1Q)
        result = rb_characterize(
            attach, 1, rng, depths=(3, 7, 15, 30), replicates=10
        )
        assert 0.9 < result.fit.p < 1.0
