"""Decision evaluation: realized-cost confusion cells, group error rates,
AUC, and exact excess risk on finite supports.

Cost cells accumulate the realized loss of every row landing in the cell,
so "True Positive Cost" can be negative when correct detention carries a
net benefit. The overall cost is the grand sum of the four cells.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .data import Dataset
from .errors import OracleMismatch, SingleClass
from .losses import LossQuartet, weight_table
from .models import NeuralNet, SoftDecisionModel, decide, predict_soft


@dataclass
class MetricsReport:
    n: int
    tp: int
    fn: int
    tn: int
    fp: int
    tp_cost: float
    fn_cost: float
    tn_cost: float
    fp_cost: float
    overall_cost: float
    tp_rate: float | None
    fp_rate: float | None
    auc: float | None
    group_fp_rates: dict[int, float | None] = field(default_factory=dict)
    group_fn_rates: dict[int, float | None] = field(default_factory=dict)
    excess_risk: float | None = None

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "counts": {"TP": self.tp, "FN": self.fn, "TN": self.tn, "FP": self.fp},
            "costs": {
                "TP": self.tp_cost,
                "FN": self.fn_cost,
                "TN": self.tn_cost,
                "FP": self.fp_cost,
                "overall": self.overall_cost,
            },
            "tp_rate": self.tp_rate,
            "fp_rate": self.fp_rate,
            "auc": self.auc,
            "group_fp_rates": {str(k): v for k, v in self.group_fp_rates.items()},
            "group_fn_rates": {str(k): v for k, v in self.group_fn_rates.items()},
            "excess_risk": self.excess_risk,
        }


def auc(scores, labels) -> float:
    """Mann-Whitney AUC: P(score+ > score-) + 0.5 P(tie), via average ranks."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels)
    pos = labels == 1
    n1, n0 = int(pos.sum()), int((~pos).sum())
    if n1 == 0 or n0 == 0:
        raise SingleClass("AUC needs at least one sample of each label")
    _, inv, counts = np.unique(scores, return_inverse=True, return_counts=True)
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    ranks = (starts + (counts + 1) / 2.0)[inv]  # average ranks, ties shared
    return float((ranks[pos].sum() - n1 * (n1 + 1) / 2.0) / (n1 * n0))


def group_rates(decisions, labels, groups, expected_groups=None):
    """Per-group FP and FN rates as shares WITHIN the group.

    FP_g = #(f=+1, y=-1, G=g)/#(G=g); FN_g analogous. Groups listed in
    `expected_groups` but absent from the data map to None.
    """
    decisions = np.asarray(decisions)
    labels = np.asarray(labels)
    groups = np.asarray(groups)
    gids = sorted(set(np.unique(groups).tolist()) | set(expected_groups or []))
    fp_rates: dict[int, float | None] = {}
    fn_rates: dict[int, float | None] = {}
    for g in gids:
        mask = groups == g
        size = int(mask.sum())
        if size == 0:
            fp_rates[g] = None
            fn_rates[g] = None
            continue
        fp_rates[g] = float(((decisions == 1) & (labels == -1) & mask).sum() / size)
        fn_rates[g] = float(((decisions == -1) & (labels == 1) & mask).sum() / size)
    return fp_rates, fn_rates


def report_from_decisions(
    data: Dataset,
    quartet: LossQuartet,
    decisions: np.ndarray,
    scores: np.ndarray | None = None,
) -> MetricsReport:
    decisions = np.asarray(decisions)
    losses = quartet.realized_losses(data, decisions)
    pos, dec_pos = data.y == 1, decisions == 1
    cells = {
        "tp": pos & dec_pos,
        "fn": pos & ~dec_pos,
        "tn": ~pos & ~dec_pos,
        "fp": ~pos & dec_pos,
    }
    counts = {k: int(m.sum()) for k, m in cells.items()}
    costs = {k: float(losses[m].sum()) for k, m in cells.items()}
    auc_value = None
    if scores is not None:
        try:
            auc_value = auc(scores, data.y)
        except SingleClass:
            auc_value = None
    gfp, gfn = ({}, {})
    if data.groups is not None:
        gfp, gfn = group_rates(decisions, data.y, data.groups)
    n_pos, n_neg = counts["tp"] + counts["fn"], counts["fp"] + counts["tn"]
    return MetricsReport(
        n=data.n,
        **counts,
        tp_cost=costs["tp"],
        fn_cost=costs["fn"],
        tn_cost=costs["tn"],
        fp_cost=costs["fp"],
        overall_cost=float(losses.sum()),
        tp_rate=counts["tp"] / n_pos if n_pos else None,
        fp_rate=counts["fp"] / n_neg if n_neg else None,
        auc=auc_value,
        group_fp_rates=gfp,
        group_fn_rates=gfn,
    )


def evaluate(model: SoftDecisionModel, data: Dataset, quartet: LossQuartet) -> MetricsReport:
    """Decide with the model, accumulate realized losses per confusion cell."""
    c = weight_table(quartet, data)[1] if isinstance(model, NeuralNet) else None
    scores = predict_soft(model, data.X, c=c)
    decisions = np.where(scores >= 0, 1, -1)
    return report_from_decisions(data, quartet, decisions, scores=scores)


# ---------------------------------------------------------------------------
# finite-support oracles

@dataclass
class FiniteSupport:
    """A discrete covariate distribution with known eta(x) = P(Y=1|x).

    The label column of `data` is a placeholder; only X/groups/extras matter.
    """

    data: Dataset
    probs: np.ndarray
    etas: np.ndarray

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=float)
        self.etas = np.asarray(self.etas, dtype=float)
        if self.probs.shape != (self.data.n,) or self.etas.shape != (self.data.n,):
            raise OracleMismatch("support arrays do not match the support points")
        if (self.probs < 0).any() or abs(self.probs.sum() - 1.0) > 1e-9:
            raise OracleMismatch("support probabilities must be >= 0 and sum to 1")
        if ((self.etas <= 0) | (self.etas >= 1)).any():
            raise OracleMismatch("eta values must lie strictly inside (0,1)")

    @property
    def n(self) -> int:
        return self.data.n


def support_risk(decisions: np.ndarray, quartet: LossQuartet, support: FiniteSupport) -> float:
    """Exact population risk of a hard rule on the support (definitional)."""
    decisions = np.asarray(decisions)
    if decisions.shape != (support.n,):
        raise OracleMismatch("one decision per support point required")
    cells = quartet.cell_table(support.data)
    dec_pos = decisions == 1
    loss_pos = np.where(dec_pos, cells[:, 0], cells[:, 1])  # outcome +1
    loss_neg = np.where(dec_pos, cells[:, 2], cells[:, 3])  # outcome -1
    return float(np.sum(support.probs * (support.etas * loss_pos + (1 - support.etas) * loss_neg)))


def bayes_decisions(quartet: LossQuartet, support: FiniteSupport) -> np.ndarray:
    """sign(eta - c) pointwise, ties to +1."""
    _, c = weight_table(quartet, support.data)
    return np.where(support.etas >= c, 1, -1)


def excess_risk(model_or_decisions, quartet: LossQuartet, support: FiniteSupport) -> float:
    """Exact excess risk over the support: the disagreement-weighted identity

        sum_x P(x) * b(x) * |eta(x) - c(x)| * 1{decision != sign(eta - c)}.
    """
    cells = quartet.cell_table(support.data)
    b = cells[:, 1] - cells[:, 0] + cells[:, 2] - cells[:, 3]
    _, c = weight_table(quartet, support.data)
    if isinstance(model_or_decisions, np.ndarray):
        decisions = model_or_decisions
        if decisions.shape != (support.n,):
            raise OracleMismatch("one decision per support point required")
    else:
        decisions = decide(model_or_decisions, support.data.X, c=c)
    bayes = np.where(support.etas >= c, 1, -1)
    disagree = decisions != bayes
    return float(np.sum(support.probs[disagree] * b[disagree] * np.abs(support.etas - c)[disagree]))
