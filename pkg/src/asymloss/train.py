"""Weighted convexified empirical risk minimization.

All families minimize (1/n) sum_i omega_i * phi(-y_i f(x_i)) over their
function class:

  fit_linear    full-batch (sub)gradient descent with Armijo backtracking
  fit_lasso     proximal gradient (soft-thresholding), lambda by K-fold CV
  fit_boosting  functional-gradient boosting over decision stumps
  fit_network   mini-batch SGD through the c(x)-fed two-ReLU output stage

Convex solvers are deterministic (zero init, no randomness); stochastic
pieces (CV folds, SGD shuffles, init) draw from a generator seeded by the
config, so a fit is a pure function of (data, config).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import convexify
from .convexify import Convexifier, phi, phi_derivative
from .errors import ConfigError, EmptyData, NonFiniteObjective
from .losses import WeightedDataset
from .models import (
    LinearModel,
    ModelMeta,
    NeuralNet,
    SoftDecisionModel,
    Stump,
    StumpEnsemble,
    expand_powers,
    predict_soft,
)

_MIN_STEP = 1e-20
_ARMIJO = 1e-4


@dataclass
class TrainConfig:
    convexifier: str = "logistic"
    max_iterations: int = 10_000
    tolerance: float = 1e-8  # relative objective decrease
    learning_rate: float = 0.1  # initial line-search step / SGD rate
    lr_schedule: str = "constant"  # "constant" or "inv_sqrt"
    seed: int = 0
    degree: int = 1  # polynomial dictionary degree for linear families
    # lasso
    lasso_lambdas: tuple[float, ...] | None = None  # None -> automatic grid
    n_lambdas: int = 20
    cv_folds: int = 10
    # boosting
    rounds: int = 100
    shrinkage: float = 1.0
    l1_budget: float | None = None
    # networks
    epochs: int = 200
    batch_size: int = 32
    hidden_width: int = 15
    hidden_layers: int = 2  # deep family; shallow always uses one
    init_scale: float | None = None  # None -> sqrt(6/(fan_in+fan_out))

    def __post_init__(self):
        for name in ("max_iterations", "cv_folds", "rounds", "epochs", "batch_size",
                     "hidden_width", "hidden_layers", "n_lambdas"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.tolerance <= 0:
            raise ConfigError("tolerance must be > 0")
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be > 0")
        if self.lr_schedule not in ("constant", "inv_sqrt"):
            raise ConfigError(f"unknown lr_schedule {self.lr_schedule!r}")
        if self.lasso_lambdas is not None:
            lams = tuple(float(l) for l in self.lasso_lambdas)
            if any(l <= 0 for l in lams):
                raise ConfigError("lasso lambda grid must be strictly positive")
            self.lasso_lambdas = lams
        convexify.get(self.convexifier)  # validates the name


@dataclass
class FitResult:
    model: SoftDecisionModel
    objective: float
    iterations: int
    converged: bool
    trace: np.ndarray
    diagnostics: dict = field(default_factory=dict)


def empirical_risk(model: SoftDecisionModel, wdata: WeightedDataset, conv: Convexifier | str) -> float:
    """(1/n) sum omega_i phi(-y_i f(x_i)); networks consume the per-row c_i."""
    if wdata.n == 0:
        raise EmptyData("empirical risk needs at least one row")
    conv = convexify.get(conv)
    f = predict_soft(model, wdata.data.X, c=wdata.c)
    return float(np.mean(wdata.omega * phi(conv, -wdata.data.y * f)))


def _standardize(Z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = Z.mean(axis=0)
    scale = Z.std(axis=0)
    scale[scale == 0] = 1.0  # constant columns pass through centered
    return mean, scale


def _design(wdata: WeightedDataset, degree: int):
    if wdata.n == 0:
        raise EmptyData("cannot fit on an empty dataset")
    D = expand_powers(wdata.data.X, degree)
    mean, scale = _standardize(D)
    Z = np.hstack([np.ones((wdata.n, 1)), (D - mean) / scale])
    return Z, mean, scale


def _risk_and_grad(theta, Z, y, omega, conv):
    s = -y * (Z @ theta)
    vals = omega * phi(conv, s)
    obj = float(np.mean(vals))
    grad = Z.T @ (-omega * y * phi_derivative(conv, s)) / Z.shape[0]
    return obj, grad


def _descent_loop(theta, objective, gradient, config):
    """Full-batch (sub)gradient descent with Armijo backtracking.

    Returns (theta, trace, iterations, converged). The trace holds accepted
    objective values only, so it is non-increasing by construction.
    """
    obj = objective(theta)
    if not math.isfinite(obj):
        raise NonFiniteObjective(f"objective is {obj} at the initial point")
    grad = gradient(theta)
    if not np.isfinite(grad).all():
        raise NonFiniteObjective("gradient is not finite at the initial point")
    trace = [obj]
    step = config.learning_rate
    converged = False
    it = 0
    while it < config.max_iterations:
        gnorm2 = float(grad @ grad)
        if gnorm2 == 0.0:
            converged = True
            break
        accepted = False
        while step >= _MIN_STEP:
            trial = theta - step * grad
            t_obj = objective(trial)
            if math.isfinite(t_obj) and t_obj <= obj - _ARMIJO * step * gnorm2:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            converged = True  # no further descent possible at machine precision
            break
        it += 1
        rel_dec = (obj - t_obj) / max(abs(obj), 1e-300)
        theta, obj = trial, t_obj
        grad = gradient(theta)
        if not np.isfinite(grad).all():
            raise NonFiniteObjective("gradient overflowed during descent")
        trace.append(obj)
        if rel_dec <= config.tolerance:
            converged = True
            break
        step = min(step * 2.0, 1e8)
    return theta, np.array(trace), it, converged


def _ista_loop(theta, smooth, gradient, penalty, prox, config):
    """Proximal gradient descent; majorization backtracking on the smooth part."""
    g_obj = smooth(theta)
    if not math.isfinite(g_obj):
        raise NonFiniteObjective(f"objective is {g_obj} at the initial point")
    obj = g_obj + penalty(theta)
    trace = [obj]
    step = config.learning_rate
    converged = False
    it = 0
    while it < config.max_iterations:
        grad = gradient(theta)
        if not np.isfinite(grad).all():
            raise NonFiniteObjective("gradient overflowed during descent")
        accepted = False
        while step >= _MIN_STEP:
            trial = prox(theta - step * grad, step)
            delta = trial - theta
            t_smooth = smooth(trial)
            if math.isfinite(t_smooth) and t_smooth <= g_obj + float(grad @ delta) + float(
                delta @ delta
            ) / (2.0 * step):
                accepted = True
                break
            step *= 0.5
        if not accepted:
            converged = True
            break
        it += 1
        t_obj = t_smooth + penalty(trial)
        rel_dec = (obj - t_obj) / max(abs(obj), 1e-300)
        theta, obj, g_obj = trial, t_obj, t_smooth
        trace.append(obj)
        if rel_dec <= config.tolerance:
            converged = True
            break
        step = min(step * 2.0, 1e8)
    return theta, np.array(trace), it, converged


def fit_linear(wdata: WeightedDataset, config: TrainConfig) -> FitResult:
    """Weighted convexified ERM over the (standardized) linear dictionary."""
    conv = convexify.get(config.convexifier)
    Z, mean, scale = _design(wdata, config.degree)
    y, omega = wdata.data.y.astype(float), wdata.omega

    def objective(t):
        return float(np.mean(omega * phi(conv, -y * (Z @ t))))

    def gradient(t):
        return _risk_and_grad(t, Z, y, omega, conv)[1]

    theta0 = np.zeros(Z.shape[1])
    theta, trace, it, converged = _descent_loop(theta0, objective, gradient, config)
    model = LinearModel(
        theta=theta,
        feature_names=list(wdata.data.feature_names),
        mean=mean,
        scale=scale,
        degree=config.degree,
        meta=ModelMeta(
            family="linear",
            convexifier=conv.kind,
            seed=config.seed,
            hyperparameters={"degree": config.degree},
        ),
    )
    return FitResult(model=model, objective=float(trace[-1]), iterations=it,
                     converged=converged, trace=trace)


def _soft_threshold(v: np.ndarray, t: float) -> np.ndarray:
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def _fit_lasso_at(wdata: WeightedDataset, config: TrainConfig, lam: float,
                  theta0: np.ndarray | None = None):
    conv = convexify.get(config.convexifier)
    Z, mean, scale = _design(wdata, config.degree)
    y, omega = wdata.data.y.astype(float), wdata.omega
    pen_mask = np.ones(Z.shape[1])
    pen_mask[0] = 0.0  # intercept unpenalized

    def smooth(t):
        return float(np.mean(omega * phi(conv, -y * (Z @ t))))

    def penalty(t):
        return lam * float(np.abs(t * pen_mask).sum())

    def gradient(t):
        return _risk_and_grad(t, Z, y, omega, conv)[1]

    def prox(v, step):
        shrunk = _soft_threshold(v, step * lam)
        return np.where(pen_mask > 0, shrunk, v)

    theta0 = np.zeros(Z.shape[1]) if theta0 is None else theta0.copy()
    theta, trace, it, converged = _ista_loop(theta0, smooth, gradient, penalty, prox, config)
    return theta, mean, scale, trace, it, converged


def _lambda_grid(wdata: WeightedDataset, config: TrainConfig) -> np.ndarray:
    if config.lasso_lambdas is not None:
        return np.sort(np.array(config.lasso_lambdas, dtype=float))[::-1]
    conv = convexify.get(config.convexifier)
    Z, _, _ = _design(wdata, config.degree)
    y, omega = wdata.data.y.astype(float), wdata.omega
    # intercept-only optimum, then the smallest lambda killing every coefficient
    cfg0 = replace(config, max_iterations=200)
    b0 = np.zeros(1)

    def obj0(t):
        return float(np.mean(omega * phi(conv, -y * t[0])))

    def grad0(t):
        s = -y * t[0]
        return np.array([float(np.mean(-omega * y * phi_derivative(conv, s)))])

    b0, _, _, _ = _descent_loop(b0, obj0, grad0, cfg0)
    theta = np.zeros(Z.shape[1])
    theta[0] = b0[0]
    grad = _risk_and_grad(theta, Z, y, omega, conv)[1]
    lam_max = float(np.abs(grad[1:]).max())
    if lam_max <= 0:
        lam_max = 1.0
    return np.geomspace(lam_max, lam_max * 1e-3, config.n_lambdas)


def lambda_theory(n: int, p: int, L: float, M: float, F_star: float,
                  c: float = 2.0, delta: float = 0.1) -> float:
    """Theoretical penalty level for the l1-penalized weighted ERM.

    Reported as a diagnostic; cross-validation is the selection mechanism.
    """
    return 8 * c * L * F_star * math.sqrt(2 * math.log(2 * p) / n) + \
        4 * c * L * M * F_star * math.sqrt(2 * math.log(1 / delta) / n)


def _cv_folds(n: int, k: int, seed: int) -> list[np.ndarray]:
    if n < k:
        raise EmptyData(f"cannot split {n} rows into {k} folds")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    return [np.sort(chunk) for chunk in np.array_split(perm, k)]


def fit_lasso(wdata: WeightedDataset, config: TrainConfig,
              lam: float | None = None) -> FitResult:
    """l1-penalized weighted ERM; lambda chosen by K-fold CV unless given.

    The grid is traversed from the largest lambda down with warm starts; CV
    ties break toward the larger lambda.
    """
    conv = convexify.get(config.convexifier)
    cv_table = []
    if lam is None:
        grid = _lambda_grid(wdata, config)
        folds = _cv_folds(wdata.n, config.cv_folds, config.seed)
        all_idx = np.arange(wdata.n)
        fold_risks = np.zeros((len(grid), len(folds)))
        for fi, hold in enumerate(folds):
            train_idx = np.setdiff1d(all_idx, hold)
            wtrain, whold = wdata.subset(train_idx), wdata.subset(hold)
            warm = None
            for li, lam_i in enumerate(grid):
                theta, mean, scale, *_ = _fit_lasso_at(wtrain, config, lam_i, theta0=warm)
                warm = theta
                model = LinearModel(theta=theta, feature_names=list(wdata.data.feature_names),
                                    mean=mean, scale=scale, degree=config.degree)
                fold_risks[li, fi] = empirical_risk(model, whold, conv)
        mean_risk = fold_risks.mean(axis=1)
        best = int(np.argmin(mean_risk))  # first index = largest lambda wins ties
        lam = float(grid[best])
        cv_table = [
            {"lambda": float(l), "cv_risk": float(r)} for l, r in zip(grid, mean_risk)
        ]
    theta, mean, scale, trace, it, converged = _fit_lasso_at(wdata, config, float(lam))
    model = LinearModel(
        theta=theta,
        feature_names=list(wdata.data.feature_names),
        mean=mean,
        scale=scale,
        degree=config.degree,
        meta=ModelMeta(
            family="lasso",
            convexifier=conv.kind,
            seed=config.seed,
            hyperparameters={"lambda": float(lam), "degree": config.degree},
        ),
    )
    # diagnostic only: the theoretical penalty level with observable proxies
    # (surrogate Lipschitz bound, loss bound from max|omega|/4, dictionary sup)
    Zs = (expand_powers(wdata.data.X, config.degree) - mean) / scale
    lam_theory = lambda_theory(
        n=wdata.n,
        p=Zs.shape[1],
        L=conv.L,
        M=float(np.max(wdata.omega)) / 4.0,
        F_star=float(np.max(np.abs(Zs))) if Zs.size else 1.0,
    )
    return FitResult(model=model, objective=float(trace[-1]), iterations=it,
                     converged=converged, trace=trace,
                     diagnostics={"lambda": float(lam), "cv_table": cv_table,
                                  "lambda_theory": lam_theory})


# ---------------------------------------------------------------------------
# boosting

def _stump_candidates(X: np.ndarray) -> list[tuple[int, np.ndarray]]:
    """Per feature: split midpoints of sorted unique values."""
    out = []
    for j in range(X.shape[1]):
        u = np.unique(X[:, j])
        if u.size >= 2:
            out.append((j, (u[1:] + u[:-1]) / 2.0))
    return out


def _best_stump(X, r, candidates):
    """Stump maximizing |sum_i r_i h(x_i)| over threshold rules and the two
    constant rules (one-node trees); splits must strictly beat the constant."""
    total = float(r.sum())
    best = (abs(total), Stump(feature=0, split=None, polarity=1 if total >= 0 else -1))
    for j, splits in candidates:
        order = np.argsort(X[:, j], kind="stable")
        xs = X[order, j]
        csum = np.concatenate([[0.0], np.cumsum(r[order])])
        # for split s: corr(+1 polarity) = sum_{x>s} r - sum_{x<=s} r
        ks = np.searchsorted(xs, splits, side="right")
        corr = total - 2.0 * csum[ks]
        i = int(np.argmax(np.abs(corr)))
        if abs(corr[i]) > best[0]:
            polarity = 1 if corr[i] >= 0 else -1
            best = (abs(float(corr[i])), Stump(feature=j, split=float(splits[i]), polarity=polarity))
    if best[0] == 0.0:
        return 0.0, None
    return best


def fit_boosting(wdata: WeightedDataset, config: TrainConfig) -> FitResult:
    """Functional-gradient boosting over depth-1 stumps.

    Exponential convexifier (default): round weights omega_i * exp(-y_i F_i),
    coefficient 0.5*log(correct/incorrect weighted ratio), shrunk by the
    shrinkage factor. Logistic: coefficient by golden-section line search.
    Stops after `rounds`, on a training-risk plateau, or when the l1 budget
    is exhausted; returns converged=False when no stump improves.
    """
    conv = convexify.get(config.convexifier)
    if conv.kind == "hinge":
        raise ConfigError("boosting supports the exponential or logistic convexifier")
    if wdata.n == 0:
        raise EmptyData("cannot fit on an empty dataset")
    X, y, omega = wdata.data.X, wdata.data.y.astype(float), wdata.omega
    candidates = _stump_candidates(X)
    F = np.zeros(wdata.n)
    stumps: list[Stump] = []
    coefs: list[float] = []
    trace = [float(np.mean(omega * phi(conv, -y * F)))]
    converged = True
    rounds_done = 0
    budget_left = math.inf if config.l1_budget is None else float(config.l1_budget)
    for _ in range(config.rounds):
        r = omega * y * phi_derivative(conv, -y * F)  # negative functional gradient
        _, stump = _best_stump(X, r, candidates)
        if stump is None:
            converged = False
            break
        h = stump.predict(X).astype(float)
        if conv.kind == "exponential":
            w = omega * np.exp(-y * F)
            err = float(w[h != y].sum() / w.sum())
            err = min(max(err, 1e-12), 1 - 1e-12)
            beta = 0.5 * math.log((1 - err) / err)
        else:
            beta = _golden_section(
                lambda b: float(np.mean(omega * phi(conv, -y * (F + b * h)))), 0.0, 20.0
            )
        if beta <= 0:
            converged = False
            break
        beta *= config.shrinkage
        stop_after = False
        if beta > budget_left:
            beta = budget_left
            stop_after = True
        F = F + beta * h
        stumps.append(stump)
        coefs.append(beta)
        budget_left -= beta
        rounds_done += 1
        obj = float(np.mean(omega * phi(conv, -y * F)))
        rel_dec = (trace[-1] - obj) / max(abs(trace[-1]), 1e-300)
        trace.append(obj)
        if stop_after or budget_left <= 0:
            break
        if 0 <= rel_dec <= config.tolerance:
            break
    model = StumpEnsemble(
        stumps=stumps,
        coefs=np.array(coefs),
        feature_names=list(wdata.data.feature_names),
        l1_budget=config.l1_budget,
        meta=ModelMeta(
            family="stumps",
            convexifier=conv.kind,
            seed=config.seed,
            hyperparameters={"rounds": config.rounds, "shrinkage": config.shrinkage},
        ),
    )
    return FitResult(model=model, objective=float(trace[-1]), iterations=rounds_done,
                     converged=converged, trace=np.array(trace))


def _golden_section(f, lo: float, hi: float, iters: int = 80) -> float:
    g = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c1, c2 = b - g * (b - a), a + g * (b - a)
    f1, f2 = f(c1), f(c2)
    for _ in range(iters):
        if f1 <= f2:
            b, c2, f2 = c2, c1, f1
            c1 = b - g * (b - a)
            f1 = f(c1)
        else:
            a, c1, f1 = c1, c2, f2
            c2 = a + g * (b - a)
            f2 = f(c2)
    return (a + b) / 2.0


# ---------------------------------------------------------------------------
# networks

def _init_net(fan_sizes: list[int], config: TrainConfig, rng: np.random.Generator):
    weights, biases = [], []
    for fan_in, fan_out in zip(fan_sizes[:-1], fan_sizes[1:]):
        s = config.init_scale
        if s is None:
            s = math.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-s, s, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return weights, biases


def _net_forward(Xs, c, weights, biases, activation, d):
    hs = [Xs]
    h = Xs
    for w, b in zip(weights[:-1], biases[:-1]):
        z = h @ w + b
        h = np.maximum(z, 0.0) if activation == "relu" else 1.0 / (1.0 + np.exp(-z))
        hs.append(h)
    theta = (h @ weights[-1] + biases[-1])[:, 0]
    u = theta + c * d
    f = np.clip(u, -1.0, 1.0)  # = relu(u+1) - relu(u-1) - 1
    return hs, u, f


def fit_network(wdata: WeightedDataset, config: TrainConfig, family: str = "deep") -> FitResult:
    """Mini-batch SGD on the weighted hinge (or logistic) objective.

    The per-row thresholds c_i feed the output stage; the output scale d is
    projected to |d| <= n after every step. Deterministic given the seed
    (init and the per-epoch shuffles come from one Philox stream).
    """
    conv = convexify.get(config.convexifier)
    if conv.kind == "exponential":
        raise ConfigError("networks support the hinge or logistic convexifier")
    if family not in ("shallow", "deep"):
        raise ConfigError(f"unknown network family {family!r}")
    if wdata.n == 0:
        raise EmptyData("cannot fit on an empty dataset")
    X, y, omega, c = wdata.data.X, wdata.data.y.astype(float), wdata.omega, wdata.c
    mean, scale = _standardize(X)
    Xs = (X - mean) / scale
    n, p = Xs.shape
    activation = "sigmoid" if family == "shallow" else "relu"
    n_hidden = 1 if family == "shallow" else config.hidden_layers
    fan_sizes = [p] + [config.hidden_width] * n_hidden + [1]
    rng = np.random.Generator(np.random.Philox(config.seed))
    weights, biases = _init_net(fan_sizes, config, rng)
    d = 1.0

    def full_objective():
        _, _, f = _net_forward(Xs, c, weights, biases, activation, d)
        return float(np.mean(omega * phi(conv, -y * f)))

    trace = [full_objective()]
    batch = min(config.batch_size, n)
    step_count = 0
    for _ in range(config.epochs):
        perm = rng.permutation(n)
        for start in range(0, n, batch):
            idx = perm[start : start + batch]
            hs, u, f = _net_forward(Xs[idx], c[idx], weights, biases, activation, d)
            yb, wb = y[idx], omega[idx]
            m = idx.size
            # dL/df for the weighted surrogate, averaged over the batch
            df = wb * -yb * phi_derivative(conv, -yb * f) / m
            du = df * ((np.abs(u) < 1.0).astype(float))  # two-ReLU stage subgradient
            grad_d = float(du @ c[idx])
            delta = du[:, None]  # gradient w.r.t. theta(x), shape (m,1)
            grads_w, grads_b = [], []
            for l in range(len(weights) - 1, -1, -1):
                grads_w.append(hs[l].T @ delta)
                grads_b.append(delta.sum(axis=0))
                if l > 0:
                    back = delta @ weights[l].T
                    if activation == "relu":
                        back *= (hs[l] > 0).astype(float)
                    else:
                        back *= hs[l] * (1.0 - hs[l])
                    delta = back
            grads_w.reverse()
            grads_b.reverse()
            step_count += 1
            lr = config.learning_rate
            if config.lr_schedule == "inv_sqrt":
                lr = lr / math.sqrt(step_count)
            for l in range(len(weights)):
                weights[l] -= lr * grads_w[l]
                biases[l] -= lr * grads_b[l]
            d -= lr * grad_d
            d = float(np.clip(d, -n, n))  # the |d| <= n constraint
        obj = full_objective()
        if not math.isfinite(obj):
            raise NonFiniteObjective("network objective overflowed")
        trace.append(obj)
    model = NeuralNet(
        weights=weights,
        biases=biases,
        activation=activation,
        out_scale=d,
        feature_names=list(wdata.data.feature_names),
        mean=mean,
        scale=scale,
        meta=ModelMeta(
            family=family,
            convexifier=conv.kind,
            seed=config.seed,
            hyperparameters={
                "epochs": config.epochs,
                "batch_size": config.batch_size,
                "hidden_width": config.hidden_width,
                "hidden_layers": n_hidden,
                "learning_rate": config.learning_rate,
                "lr_schedule": config.lr_schedule,
            },
        ),
    )
    return FitResult(model=model, objective=float(trace[-1]), iterations=config.epochs,
                     converged=True, trace=np.array(trace))


# ---------------------------------------------------------------------------
# cross-validation

def cross_validate(wdata: WeightedDataset, candidates, k: int, seed: int = 0,
                   fitter=None):
    """Pick the candidate config minimizing mean held-out weighted risk.

    `candidates` is a list of (label, TrainConfig); supply them ordered from
    most to least regularized; exact ties keep the earliest. `fitter`
    defaults to fit_linear. Returns (best_label, best_config, table).
    """
    if k < 2:
        raise ConfigError("cross-validation needs k >= 2")
    if not candidates:
        raise ConfigError("no candidates to select from")
    if wdata.n == 0:
        raise EmptyData("cannot cross-validate on an empty dataset")
    fitter = fitter or fit_linear
    folds = _cv_folds(wdata.n, k, seed)
    all_idx = np.arange(wdata.n)
    table = []
    risks = np.zeros(len(candidates))
    for ci, (label, cfg) in enumerate(candidates):
        conv = convexify.get(cfg.convexifier)
        fold_risk = []
        for hold in folds:
            train_idx = np.setdiff1d(all_idx, hold)
            res = fitter(wdata.subset(train_idx), cfg)
            fold_risk.append(empirical_risk(res.model, wdata.subset(hold), conv))
        risks[ci] = float(np.mean(fold_risk))
        table.append({"candidate": label, "cv_risk": risks[ci]})
    best = int(np.argmin(risks))  # argmin keeps the earliest on exact ties
    return candidates[best][0], candidates[best][1], table
