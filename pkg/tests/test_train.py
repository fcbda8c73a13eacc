import math

import numpy as np
import pytest

from asymloss import convexify
from asymloss.data import Dataset
from asymloss.errors import ConfigError, EmptyData, NonFiniteObjective
from asymloss.losses import ConstantQuartet, attach_weights, symmetric_quartet
from asymloss.models import Stump, decide, predict_soft
from asymloss.train import (
    TrainConfig,
    _descent_loop,
    _risk_and_grad,
    cross_validate,
    empirical_risk,
    fit_boosting,
    fit_lasso,
    fit_linear,
    fit_network,
    lambda_theory,
)


def make_dataset(n=200, p=3, seed=0, coef_scale=1.0):
    """Noisy logistic labels; non-separable with high probability."""
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, p))
    beta = coef_scale * rng.normal(size=p)
    eta = 1 / (1 + np.exp(-(X @ beta)))
    y = np.where(rng.random(n) < eta, 1, -1)
    return Dataset(X=X, y=y, feature_names=[f"x{j}" for j in range(p)])


def symmetric_weighted(n=200, seed=0, **kw):
    return attach_weights(symmetric_quartet(), make_dataset(n=n, seed=seed, **kw))


class TestEmpiricalRisk:
    @pytest.mark.parametrize("kind", ("logistic", "exponential", "hinge"))
    def test_zero_model_symmetric(self, kind):
        wdata = symmetric_weighted()
        res = fit_linear(wdata, TrainConfig(max_iterations=1, tolerance=1e-2))
        res.model.theta[:] = 0.0
        assert empirical_risk(res.model, wdata, kind) == pytest.approx(2.0, abs=1e-12)

    def test_single_sample_hinge(self):
        # omega(+1) = 2*(l(-1,1) - l(1,1)) = 3 for this quartet
        data = Dataset(X=np.array([[1.0]]), y=np.array([1]), feature_names=["x"])
        wdata = attach_weights(ConstantQuartet(0.0, 1.5, 1.0, 0.0), data)
        assert wdata.omega[0] == pytest.approx(3.0)
        res = fit_linear(wdata, TrainConfig(max_iterations=1, tolerance=1e-2))
        res.model.theta[:] = 0.0
        assert empirical_risk(res.model, wdata, "hinge") == pytest.approx(3.0)

    def test_perfect_margin_hinge_is_zero(self):
        data = Dataset(X=np.array([[1.0], [-1.0]]), y=np.array([1, -1]), feature_names=["x"])
        wdata = attach_weights(symmetric_quartet(), data)
        res = fit_linear(wdata, TrainConfig(convexifier="hinge"))
        scores = predict_soft(res.model, data.X)
        assert (data.y * scores >= 1 - 1e-9).all()
        assert empirical_risk(res.model, wdata, "hinge") == pytest.approx(0.0, abs=1e-9)

    def test_empty_data(self):
        empty = Dataset(X=np.zeros((0, 1)), y=np.zeros(0), feature_names=["x"])
        wdata = attach_weights(symmetric_quartet(), empty)
        model = fit_linear(
            attach_weights(symmetric_quartet(),
                           Dataset(X=np.array([[1.0], [-1.0]]), y=np.array([1, -1]),
                                   feature_names=["x"])),
            TrainConfig(max_iterations=1, tolerance=1e-2),
        ).model
        with pytest.raises(EmptyData):
            empirical_risk(model, wdata, "hinge")
        with pytest.raises(EmptyData):
            fit_linear(wdata, TrainConfig())


class TestGradients:
    @pytest.mark.parametrize("kind", ("logistic", "exponential"))
    def test_analytic_matches_central_differences(self, kind):
        conv = convexify.get(kind)
        wdata = symmetric_weighted(n=80, seed=2)
        Z = np.hstack([np.ones((wdata.n, 1)), wdata.data.X])
        y, omega = wdata.data.y.astype(float), wdata.omega
        rng = np.random.default_rng(4)
        h = 1e-6
        for _ in range(20):
            theta = rng.normal(scale=0.5, size=Z.shape[1])
            _, grad = _risk_and_grad(theta, Z, y, omega, conv)
            for j in range(len(theta)):
                e = np.zeros_like(theta)
                e[j] = h
                fp = _risk_and_grad(theta + e, Z, y, omega, conv)[0]
                fm = _risk_and_grad(theta - e, Z, y, omega, conv)[0]
                num = (fp - fm) / (2 * h)
                assert grad[j] == pytest.approx(num, rel=1e-5, abs=1e-8)


class TestFitLinear:
    def test_objective_trace_non_increasing(self):
        for kind in ("logistic", "exponential", "hinge"):
            res = fit_linear(symmetric_weighted(seed=1), TrainConfig(convexifier=kind))
            assert (np.diff(res.trace) <= 1e-12).all()

    def test_symmetric_reduction_matches_unweighted(self):
        data = make_dataset(n=300, seed=7)
        cfg = TrainConfig(tolerance=1e-15, max_iterations=50_000)
        weighted = fit_linear(attach_weights(symmetric_quartet(), data), cfg)
        # unweighted: identical rows with omega = 1 (half the symmetric 0/1 weight)
        unweighted_q = ConstantQuartet(0.0, 0.5, 0.5, 0.0)
        unweighted = fit_linear(attach_weights(unweighted_q, data), cfg)
        assert weighted.model.theta == pytest.approx(unweighted.model.theta, abs=1e-6)

    def test_weight_scale_equivariance_exact_iterates(self):
        # scaling omega by 4 and the initial step by 1/4 reproduces the fit
        data = make_dataset(n=150, seed=9)
        base = attach_weights(ConstantQuartet(0.0, 1.0, 1.0, 0.0), data)
        scaled = attach_weights(ConstantQuartet(0.0, 4.0, 4.0, 0.0), data)
        r1 = fit_linear(base, TrainConfig(learning_rate=0.4, max_iterations=500, tolerance=1e-12))
        r2 = fit_linear(scaled, TrainConfig(learning_rate=0.1, max_iterations=500, tolerance=1e-12))
        assert np.array_equal(r1.model.theta, r2.model.theta)
        assert np.array_equal(4.0 * r1.trace, r2.trace)
        assert np.array_equal(decide(r1.model, data.X), decide(r2.model, data.X))

    def test_separable_two_points_hinge(self):
        data = Dataset(X=np.array([[2.0], [-2.0]]), y=np.array([1, -1]), feature_names=["x"])
        res = fit_linear(attach_weights(symmetric_quartet(), data), TrainConfig(convexifier="hinge"))
        assert res.converged
        assert np.array_equal(decide(res.model, data.X), data.y)

    def test_deterministic(self):
        wdata = symmetric_weighted(seed=3)
        r1 = fit_linear(wdata, TrainConfig())
        r2 = fit_linear(wdata, TrainConfig())
        assert np.array_equal(r1.model.theta, r2.model.theta)

    def test_nonfinite_guard(self):
        cfg = TrainConfig()
        with pytest.raises(NonFiniteObjective):
            _descent_loop(np.zeros(1), lambda t: math.inf, lambda t: np.zeros(1), cfg)


class TestFitLasso:
    def test_huge_lambda_kills_coefficients(self):
        wdata = symmetric_weighted(seed=5)
        res = fit_lasso(wdata, TrainConfig(), lam=100.0)
        assert np.all(res.model.theta[1:] == 0.0)
        # intercept survives to fit the base rate
        assert res.diagnostics["lambda"] == 100.0

    def test_zero_lambda_matches_fit_linear(self):
        wdata = symmetric_weighted(seed=6)
        cfg = TrainConfig(tolerance=1e-12)
        plain = fit_linear(wdata, cfg)
        lasso = fit_lasso(wdata, cfg, lam=0.0)
        assert lasso.objective == pytest.approx(plain.objective, abs=1e-5)

    def test_cv_selects_from_grid_deterministically(self):
        wdata = symmetric_weighted(n=120, seed=8)
        cfg = TrainConfig(lasso_lambdas=(0.2, 0.05, 0.0125), cv_folds=4, tolerance=1e-10)
        r1 = fit_lasso(wdata, cfg)
        r2 = fit_lasso(wdata, cfg)
        assert r1.diagnostics["lambda"] == r2.diagnostics["lambda"]
        assert r1.diagnostics["lambda"] in (0.2, 0.05, 0.0125)
        assert len(r1.diagnostics["cv_table"]) == 3

    def test_penalized_objective_trace_non_increasing(self):
        wdata = symmetric_weighted(seed=10)
        res = fit_lasso(wdata, TrainConfig(), lam=0.05)
        assert (np.diff(res.trace) <= 1e-12).all()


class TestFitBoosting:
    def test_separable_single_round(self):
        data = Dataset(
            X=np.array([[0.0], [1.0], [2.0], [3.0]]),
            y=np.array([-1, -1, 1, 1]),
            feature_names=["x"],
        )
        res = fit_boosting(
            attach_weights(symmetric_quartet(), data),
            TrainConfig(convexifier="exponential", rounds=1),
        )
        assert np.array_equal(decide(res.model, data.X), data.y)

    def test_round_one_matches_textbook_adaboost(self):
        # hand-run on x = 0..4, y = (+,+,-,+,-): the first stump in
        # (feature, split) order with minimal weighted error is
        # 1{x > 1.5} -> -1 side, error 0.2, coefficient 0.5*log(0.8/0.2)
        data = Dataset(
            X=np.arange(5.0).reshape(-1, 1),
            y=np.array([1, 1, -1, 1, -1]),
            feature_names=["x"],
        )
        res = fit_boosting(
            attach_weights(symmetric_quartet(), data),
            TrainConfig(convexifier="exponential", rounds=1, shrinkage=1.0),
        )
        assert res.model.stumps[0] == Stump(feature=0, split=1.5, polarity=-1)
        assert res.model.coefs[0] == pytest.approx(0.5 * math.log(4.0), abs=1e-12)

    def test_identical_labels_predict_that_label(self):
        data = Dataset(X=np.arange(6.0).reshape(-1, 1), y=np.ones(6, dtype=int),
                       feature_names=["x"])
        res = fit_boosting(
            attach_weights(symmetric_quartet(), data),
            TrainConfig(convexifier="exponential", rounds=10),
        )
        assert (decide(res.model, data.X) == 1).all()
        rng = np.random.default_rng(0)
        assert (decide(res.model, rng.normal(size=(20, 1)) * 10) == 1).all()

    def test_l1_budget_respected(self):
        wdata = symmetric_weighted(n=100, seed=11)
        res = fit_boosting(
            wdata, TrainConfig(convexifier="exponential", rounds=200, l1_budget=1.5)
        )
        assert res.model.coefs.sum() <= 1.5 + 1e-12

    def test_logistic_boosting_decreases_risk(self):
        wdata = symmetric_weighted(n=100, seed=12)
        res = fit_boosting(wdata, TrainConfig(convexifier="logistic", rounds=15))
        assert res.trace[-1] < res.trace[0]

    def test_hinge_rejected(self):
        with pytest.raises(ConfigError):
            fit_boosting(symmetric_weighted(), TrainConfig(convexifier="hinge"))


class TestFitNetwork:
    def test_full_batch_descent_on_realizable_data(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(60, 2))
        y = np.where(X[:, 0] + X[:, 1] >= 0, 1, -1)
        data = Dataset(X=X, y=y, feature_names=["a", "b"])
        wdata = attach_weights(symmetric_quartet(), data)
        cfg = TrainConfig(convexifier="hinge", epochs=60, batch_size=60,
                          learning_rate=0.01, seed=1)
        res = fit_network(wdata, cfg, family="deep")
        assert (np.diff(res.trace) <= 1e-10).all()

    def test_single_sample_saturates(self):
        data = Dataset(X=np.array([[0.5]]), y=np.array([1]), feature_names=["x"])
        wdata = attach_weights(symmetric_quartet(), data)
        cfg = TrainConfig(convexifier="hinge", epochs=300, batch_size=1,
                          learning_rate=0.1, seed=0)
        res = fit_network(wdata, cfg, family="deep")
        assert predict_soft(res.model, data.X, c=np.array([0.5]))[0] == 1.0

    def test_deterministic_given_seed(self):
        wdata = symmetric_weighted(n=80, seed=13)
        cfg = TrainConfig(convexifier="hinge", epochs=5, seed=42)
        r1 = fit_network(wdata, cfg, family="shallow")
        r2 = fit_network(wdata, cfg, family="shallow")
        for w1, w2 in zip(r1.model.weights, r2.model.weights):
            assert np.array_equal(w1, w2)
        r3 = fit_network(wdata, TrainConfig(convexifier="hinge", epochs=5, seed=43),
                         family="shallow")
        assert not all(
            np.array_equal(w1, w3) for w1, w3 in zip(r1.model.weights, r3.model.weights)
        )

    def test_out_scale_projected(self):
        wdata = symmetric_weighted(n=30, seed=14)
        cfg = TrainConfig(convexifier="hinge", epochs=2, learning_rate=1000.0, seed=0)
        res = fit_network(wdata, cfg, family="deep")
        assert abs(res.model.out_scale) <= 30

    def test_exponential_rejected(self):
        with pytest.raises(ConfigError):
            fit_network(symmetric_weighted(), TrainConfig(convexifier="exponential"))

    def test_shallow_uses_sigmoid_single_layer(self):
        wdata = symmetric_weighted(n=50, seed=15)
        res = fit_network(wdata, TrainConfig(convexifier="hinge", epochs=2), family="shallow")
        assert res.model.activation == "sigmoid"
        assert len(res.model.weights) == 2  # one hidden layer + scalar head


class TestCrossValidate:
    def test_single_candidate_returned(self):
        wdata = symmetric_weighted(n=60, seed=16)
        label, cfg, table = cross_validate(wdata, [("only", TrainConfig())], k=3)
        assert label == "only"
        assert len(table) == 1

    def test_dominated_candidate_loses(self):
        wdata = symmetric_weighted(n=120, seed=17)
        good = TrainConfig(tolerance=1e-10)
        bad = TrainConfig(max_iterations=1, tolerance=1e-10)  # barely trained
        label, _, table = cross_validate(wdata, [("bad", bad), ("good", good)], k=4)
        assert label == "good"
        risks = {t["candidate"]: t["cv_risk"] for t in table}
        assert risks["good"] < risks["bad"]

    def test_requires_two_folds(self):
        with pytest.raises(ConfigError):
            cross_validate(symmetric_weighted(), [("a", TrainConfig())], k=1)


class TestConfigValidation:
    def test_counts_positive(self):
        with pytest.raises(ConfigError):
            TrainConfig(epochs=0)
        with pytest.raises(ConfigError):
            TrainConfig(tolerance=0.0)
        with pytest.raises(ConfigError):
            TrainConfig(lasso_lambdas=(0.1, -0.2))
        with pytest.raises(ConfigError):
            TrainConfig(convexifier="square")

    def test_lambda_theory_positive(self):
        assert lambda_theory(n=1000, p=45, L=1.5, M=3.0, F_star=1.0) > 0
