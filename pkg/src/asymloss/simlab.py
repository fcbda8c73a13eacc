"""Monte Carlo laboratory: the two-group DGP, exact conditional-probability
and Bayes oracles, a brute-force finite-support risk oracle, and the
replication drivers (cost-ratio comparison, FP/FN equalization sweeps,
plug-in vs ERM, model-error comparison).

DGP: G ~ Bernoulli(rho), Z ~ N(0, I_d), eps ~ N(0,1), and

    Y = 2 * 1{ 2G + Z.gamma + tau*((1/d) sum Z_j^2 + 2 Z_1 sum_{j>=2} Z_j) >= sigma*eps } - 1

so eta(g,z) = Phi(index / sigma) exactly. Group losses put psi_g on false
negatives and phi_g on false positives, making the threshold
c(g) = phi_g / (phi_g + psi_g).

Randomness: Philox (counter-based) keyed per replication via
numpy.random.SeedSequence(master_seed, spawn_key=(replication,)); normal
variates by the inverse normal CDF (scipy.special.ndtri, Wichura's AS241
rational approximation) applied to Philox uniforms. Replications are
independent tasks whose results merge by index, so schedules (and --jobs)
cannot change the output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from joblib import Parallel, delayed
from scipy.special import expit, ndtr, ndtri

from .data import Dataset
from .errors import ConfigError, SupportTooLarge
from .losses import GroupQuartet, LossQuartet, attach_weights, symmetric_quartet
from .metrics import FiniteSupport, bayes_decisions, report_from_decisions
from .models import predict_soft
from .train import TrainConfig, fit_boosting, fit_lasso, fit_linear, fit_network

DEFAULT_GAMMA_HEAD = (1.0, 0.9, 0.8)


@dataclass
class SimConfig:
    n: int = 1000
    test_fraction: float = 0.3
    d: int = 15
    rho: float = 0.2
    sigma: float = 0.3
    tau: float = 0.0
    gamma: tuple[float, ...] | None = None
    psi0: float = 3.0
    psi1: float = 1.0
    phi0: float = 1.7
    phi1: float = 1.0
    replications: int = 500
    seed: int = 0
    train: TrainConfig = field(default_factory=TrainConfig)

    def __post_init__(self):
        if not 0.0 < self.rho < 1.0:
            raise ConfigError("rho must lie in (0,1)")
        if self.sigma <= 0:
            raise ConfigError("sigma must be > 0")
        if self.n < 20:
            raise ConfigError("n must be >= 20")
        if self.gamma is None:
            self.gamma = DEFAULT_GAMMA_HEAD + (0.0,) * (self.d - len(DEFAULT_GAMMA_HEAD))
        self.gamma = tuple(float(g) for g in self.gamma)
        if len(self.gamma) != self.d:
            raise ConfigError(f"gamma has length {len(self.gamma)}, d={self.d}")
        if self.replications < 1:
            raise ConfigError("replications must be >= 1")

    def group_quartet(self) -> GroupQuartet:
        return GroupQuartet(psi={0: self.psi0, 1: self.psi1}, phi={0: self.phi0, 1: self.phi1})

    def thresholds(self) -> dict[int, float]:
        return {
            0: self.phi0 / (self.phi0 + self.psi0),
            1: self.phi1 / (self.phi1 + self.psi1),
        }

    def feature_names(self) -> list[str]:
        return ["g"] + [f"z{j}" for j in range(1, self.d + 1)]


@dataclass
class SimDraw:
    data: Dataset  # features [g, z1..zd], groups = g
    eta: np.ndarray
    c: np.ndarray


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.Philox(seed))
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def replication_seed(master_seed: int, index: int) -> np.random.SeedSequence:
    """Per-replication key: order-independent, collision-free by construction."""
    return np.random.SeedSequence(int(master_seed), spawn_key=(int(index),))


def _normals(rng: np.random.Generator, shape) -> np.ndarray:
    # inverse-CDF sampling; uniforms live in [0,1), floor away the exact 0
    u = np.maximum(rng.random(shape), 2.0**-60)
    return ndtri(u)


def latent_index(config: SimConfig, g: np.ndarray, z: np.ndarray) -> np.ndarray:
    z = np.atleast_2d(z)
    nl = 0.0
    if config.tau != 0.0:
        nl = config.tau * (
            (z**2).sum(axis=1) / config.d + 2.0 * z[:, 0] * z[:, 1:].sum(axis=1)
        )
    return 2.0 * np.asarray(g, dtype=float) + z @ np.asarray(config.gamma) + nl


def eta_oracle(config: SimConfig, g, z) -> np.ndarray:
    """Exact P(Y=1|G=g, Z=z) = Phi_sigma(latent index)."""
    return ndtr(latent_index(config, np.atleast_1d(g), z) / config.sigma)


def bayes_rule(config: SimConfig, g, z) -> np.ndarray:
    """sign(eta - c(g)) with ties to +1."""
    g = np.atleast_1d(np.asarray(g, dtype=int))
    eta = eta_oracle(config, g, z)
    c = np.vectorize(config.thresholds().get, otypes=[float])(g)
    return np.where(eta >= c, 1, -1)


def draw(config: SimConfig, seed) -> SimDraw:
    """One sample of size n from the DGP; deterministic given the seed.

    Draw order (fixed): G uniforms, Z normals, eps normals.
    """
    rng = _rng(seed)
    g = (rng.random(config.n) < config.rho).astype(int)
    z = _normals(rng, (config.n, config.d))
    eps = _normals(rng, config.n)
    index = latent_index(config, g, z)
    y = np.where(index >= config.sigma * eps, 1, -1)
    eta = ndtr(index / config.sigma)
    c = np.vectorize(config.thresholds().get, otypes=[float])(g)
    data = Dataset(
        X=np.column_stack([g.astype(float), z]),
        y=y,
        feature_names=config.feature_names(),
        groups=g,
    )
    return SimDraw(data=data, eta=eta, c=c)


def brute_force_bayes(support: FiniteSupport, quartet: LossQuartet):
    """Exhaustive minimizer over all 2^|support| decision rules.

    Returns (decisions, risk). Ties (exactly equal risks) break toward the
    rule agreeing most with pointwise sign(eta - c), then lexicographically.
    """
    n = support.n
    if n > 20:
        raise SupportTooLarge(f"brute force capped at 20 support points, got {n}")
    cells = quartet.cell_table(support.data)
    eta, p = support.etas, support.probs
    r_plus = p * (eta * cells[:, 0] + (1 - eta) * cells[:, 2])
    r_minus = p * (eta * cells[:, 1] + (1 - eta) * cells[:, 3])
    codes = np.arange(2**n, dtype=np.int64)
    bits = (codes[:, None] >> np.arange(n)) & 1  # bit j = decision +1 at point j
    risks = bits @ r_plus + (1 - bits) @ r_minus
    best_risk = risks.min()
    tied = np.flatnonzero(risks == best_risk)
    reference = bayes_decisions(quartet, support)
    agreement = (np.where(bits[tied] == 1, 1, -1) == reference).sum(axis=1)
    winner = tied[int(np.argmax(agreement))]  # argmax keeps the lowest code on ties
    decisions = np.where(bits[winner] == 1, 1, -1)
    return decisions, float(best_risk)


# ---------------------------------------------------------------------------
# replication drivers

def _quantiles(values: np.ndarray) -> dict:
    values = np.asarray(values, dtype=float)
    return {
        "mean": float(np.mean(values)),
        "min": float(np.min(values)),
        "q1": float(np.quantile(values, 0.25)),
        "median": float(np.quantile(values, 0.5)),
        "q3": float(np.quantile(values, 0.75)),
        "max": float(np.max(values)),
    }


def _ratio_summary(ratios: np.ndarray) -> dict:
    return {"p_ratio_gt_1": float(np.mean(ratios > 1.0)), **_quantiles(ratios)}


def _test_cost(model, test: Dataset, quartet: GroupQuartet, c_test: np.ndarray) -> float:
    scores = predict_soft(model, test.X, c=c_test)
    decisions = np.where(scores >= 0, 1, -1)
    return report_from_decisions(test, quartet, decisions).overall_cost


def _comparison_rep(config: SimConfig, rep: int, plug_in: bool) -> dict:
    sim = draw(config, replication_seed(config.seed, rep))
    n_test = int(np.ceil(config.test_fraction * config.n))
    train_data, test_data = sim.data.split(config.test_fraction)
    c_test = sim.c[config.n - n_test :]
    quartet = config.group_quartet()

    sym = attach_weights(symmetric_quartet(), train_data)
    fit_sym = fit_linear(sym, config.train)
    wtrain = attach_weights(quartet, train_data)
    fit_w = fit_linear(wtrain, config.train)

    cost_w = _test_cost(fit_w.model, test_data, quartet, c_test)
    if plug_in:
        # plug-in: estimate eta with the symmetric logit, then threshold at c(x)
        eta_hat = expit(predict_soft(fit_sym.model, test_data.X))
        decisions = np.where(eta_hat >= c_test, 1, -1)
        cost_base = report_from_decisions(test_data, quartet, decisions).overall_cost
    else:
        cost_base = _test_cost(fit_sym.model, test_data, quartet, c_test)
    if cost_w > 0:
        ratio = cost_base / cost_w
    else:
        ratio = 1.0 if cost_base <= 0 else math.inf
    return {
        "replication": rep,
        "cost_baseline": cost_base,
        "cost_weighted": cost_w,
        "ratio": ratio,
    }


def _run_reps(worker, config: SimConfig, jobs: int, reps: int, *args) -> list[dict]:
    if jobs == 1:
        rows = [worker(config, r, *args) for r in range(reps)]
    else:
        rows = Parallel(n_jobs=jobs)(delayed(worker)(config, r, *args) for r in range(reps))
    return sorted(rows, key=lambda row: row["replication"])


def run_comparison(config: SimConfig, jobs: int = 1):
    """Unweighted vs weighted logit, test-set total cost per replication.

    Returns (rows, summary); summary holds P(ratio > 1) and the ratio's
    mean/min/quartiles/max across replications.
    """
    rows = _run_reps(_comparison_rep, config, jobs, config.replications, False)
    summary = _ratio_summary(np.array([r["ratio"] for r in rows]))
    return rows, summary


def run_plugin_comparison(config: SimConfig, jobs: int = 1):
    """Plug-in rule (symmetric logit + c(x) threshold) vs weighted logit."""
    rows = _run_reps(_comparison_rep, config, jobs, config.replications, True)
    summary = _ratio_summary(np.array([r["ratio"] for r in rows]))
    return rows, summary


def _sweep_rep(config: SimConfig, rep: int) -> dict:
    sim = draw(config, replication_seed(config.seed, rep))
    train_data, test_data = sim.data.split(config.test_fraction)
    quartet = config.group_quartet()
    wtrain = attach_weights(quartet, train_data)
    fit_w = fit_linear(wtrain, config.train)
    scores = predict_soft(fit_w.model, test_data.X)
    decisions = np.where(scores >= 0, 1, -1)
    report = report_from_decisions(test_data, quartet, decisions)
    return {
        "replication": rep,
        "fp0": report.group_fp_rates.get(0),
        "fp1": report.group_fp_rates.get(1),
        "fn0": report.group_fn_rates.get(0),
        "fn1": report.group_fn_rates.get(1),
    }


def run_equalization_sweep(config: SimConfig, param: str, grid, jobs: int = 1):
    """Average group FP/FN rates of the weighted logit along a loss-parameter
    sweep. Draws are shared across grid points (same replication seeds), so
    curves differ only through the loss weights."""
    if param not in ("phi0", "psi0", "phi1", "psi1"):
        raise ConfigError(f"cannot sweep {param!r}; pick a group loss parameter")
    rows = []
    for value in grid:
        cfg = replace(config, **{param: float(value)})
        reps = _run_reps(_sweep_rep, cfg, jobs, cfg.replications)
        means = {
            key: float(np.mean([r[key] for r in reps if r[key] is not None]))
            for key in ("fp0", "fp1", "fn0", "fn1")
        }
        rows.append({"param": param, "value": float(value), **means})
    return rows


def find_crossing(values: np.ndarray, gaps: np.ndarray) -> float | None:
    """First sign change of `gaps` along `values`, linearly interpolated."""
    values = np.asarray(values, dtype=float)
    gaps = np.asarray(gaps, dtype=float)
    for i in range(len(gaps) - 1):
        if gaps[i] == 0:
            return float(values[i])
        if gaps[i] * gaps[i + 1] < 0:
            t = gaps[i] / (gaps[i] - gaps[i + 1])
            return float(values[i] + t * (values[i + 1] - values[i]))
    if gaps[-1] == 0:
        return float(values[-1])
    return None


DEFAULT_FAMILY_CONVEXIFIER = {
    "linear": "logistic",
    "lasso": "logistic",
    "stumps": "exponential",
    "shallow": "hinge",
    "deep": "hinge",
}


def _fit_family(wdata, family: str, config: TrainConfig):
    cfg = replace(config, convexifier=DEFAULT_FAMILY_CONVEXIFIER[family])
    if family == "linear":
        return fit_linear(wdata, cfg)
    if family == "lasso":
        return fit_lasso(wdata, cfg)
    if family == "stumps":
        return fit_boosting(wdata, cfg)
    if family in ("shallow", "deep"):
        return fit_network(wdata, cfg, family=family)
    raise ConfigError(f"unknown family {family!r}")


def _error_rep(config: SimConfig, rep: int, families: tuple[str, ...]) -> dict:
    sim = draw(config, replication_seed(config.seed, rep))
    train_data, test_data = sim.data.split(config.test_fraction)
    wtrain = attach_weights(symmetric_quartet(), train_data)
    c_sym = np.full(test_data.n, 0.5)  # the symmetric quartet's threshold
    out = {"replication": rep}
    for family in families:
        res = _fit_family(wtrain, family, config.train)
        c_arg = c_sym if family in ("shallow", "deep") else None
        scores = predict_soft(res.model, test_data.X, c=c_arg)
        decisions = np.where(scores >= 0, 1, -1)
        out[f"error_{family}"] = float(np.mean(decisions != test_data.y))
    return out


def run_error_comparison(config: SimConfig, families=("linear", "deep"), jobs: int = 1):
    """Symmetric-loss misclassification errors per model family (the ML
    prediction experiment; note this table's sigma is 1, not the cost-ratio
    baseline's 0.3)."""
    rows = _run_reps(_error_rep, config, jobs, config.replications, tuple(families))
    summary = {
        f"mean_error_{f}": float(np.mean([r[f"error_{f}"] for r in rows])) for f in families
    }
    return rows, summary
