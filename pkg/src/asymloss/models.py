"""Soft-decision model families and their serialization.

Every family produces a real-valued score whose sign (ties to +1) is the
binary decision. Linear and stump-ensemble scores are raw and unclamped:
only the sign matters for decisions, so clamping would change nothing and
would break hinge gradients. The network families end in the two-ReLU
output stage

    f(x) = relu(u + 1) - relu(u - 1) - 1,   u = theta(x) + c(x) * d,

which is exactly clamp(u, -1, 1), so network outputs always lie in [-1, 1]
and the known threshold c(x) enters the architecture directly with one
trainable scale d (|d| <= n enforced during training).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import DimensionMismatch, DomainError, SchemaError

SCHEMA_VERSION = 1

FAMILIES = ("linear", "lasso", "stumps", "shallow", "deep")


@dataclass
class ModelMeta:
    family: str
    convexifier: str | None = None
    seed: int | None = None
    hyperparameters: dict = field(default_factory=dict)


def expand_powers(X: np.ndarray, degree: int) -> np.ndarray:
    """Per-feature power dictionary [x, x^2, ..., x^degree] (no cross terms)."""
    if not 1 <= degree <= 3:
        raise SchemaError(f"dictionary degree must be 1..3, got {degree}")
    return np.hstack([X**k for k in range(1, degree + 1)])


def power_names(feature_names: list[str], degree: int) -> list[str]:
    out = []
    for k in range(1, degree + 1):
        out += [n if k == 1 else f"{n}^{k}" for n in feature_names]
    return out


def _check_width(X: np.ndarray, feature_names: list[str]) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != len(feature_names):
        raise DimensionMismatch(
            f"input has {X.shape[1]} features, model dictionary expects {len(feature_names)}"
        )
    return X


@dataclass
class LinearModel:
    """f(x) = theta . [1, standardized dictionary of x]."""

    theta: np.ndarray  # intercept first
    feature_names: list[str]
    mean: np.ndarray
    scale: np.ndarray
    degree: int = 1
    meta: ModelMeta = field(default_factory=lambda: ModelMeta(family="linear"))

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=float)
        self.mean = np.asarray(self.mean, dtype=float)
        self.scale = np.asarray(self.scale, dtype=float)
        p = len(self.feature_names) * self.degree
        if self.theta.shape != (p + 1,):
            raise SchemaError(f"theta length {self.theta.shape} != 1+{p}")
        if self.mean.shape != (p,) or self.scale.shape != (p,):
            raise SchemaError("standardization arrays do not match the dictionary")
        if (self.scale <= 0).any():
            raise SchemaError("standardization scales must be > 0")

    def scores(self, X: np.ndarray) -> np.ndarray:
        X = _check_width(X, self.feature_names)
        Z = (expand_powers(X, self.degree) - self.mean) / self.scale
        return self.theta[0] + Z @ self.theta[1:]


@dataclass(frozen=True)
class Stump:
    """x -> polarity if x[feature] > split else -polarity.

    split=None is the one-node tree: the constant rule h(x) = polarity.
    """

    feature: int
    split: float | None
    polarity: int

    def predict(self, X: np.ndarray) -> np.ndarray:
        if self.split is None:
            return np.full(X.shape[0], self.polarity)
        return np.where(X[:, self.feature] > self.split, self.polarity, -self.polarity)


@dataclass
class StumpEnsemble:
    """Nonnegative combination of decision stumps with an optional l1 budget."""

    stumps: list[Stump]
    coefs: np.ndarray
    feature_names: list[str]
    l1_budget: float | None = None
    meta: ModelMeta = field(default_factory=lambda: ModelMeta(family="stumps"))

    def __post_init__(self):
        self.coefs = np.asarray(self.coefs, dtype=float)
        if len(self.stumps) != self.coefs.shape[0]:
            raise SchemaError("one coefficient per stump required")
        if (self.coefs < 0).any():
            raise SchemaError("stump coefficients must be >= 0")
        if self.l1_budget is not None and self.coefs.sum() > self.l1_budget * (1 + 1e-12):
            raise SchemaError("stump coefficients exceed the l1 budget")

    def scores(self, X: np.ndarray) -> np.ndarray:
        X = _check_width(X, self.feature_names)
        out = np.zeros(X.shape[0])
        for stump, coef in zip(self.stumps, self.coefs):
            out += coef * stump.predict(X)
        return out


@dataclass
class NeuralNet:
    """Hidden layers, a linear scalar head, then the two-ReLU output stage.

    `weights[l]` has shape (fan_in, fan_out); the last pair is the scalar
    head. Activation applies to hidden layers only (sigmoid for the shallow
    family, ReLU for deep).
    """

    weights: list[np.ndarray]
    biases: list[np.ndarray]
    activation: str
    out_scale: float  # the scalar multiplying c(x) in the output stage
    feature_names: list[str]
    mean: np.ndarray
    scale: np.ndarray
    meta: ModelMeta = field(default_factory=lambda: ModelMeta(family="deep"))

    def __post_init__(self):
        self.weights = [np.asarray(w, dtype=float) for w in self.weights]
        self.biases = [np.asarray(b, dtype=float) for b in self.biases]
        if self.activation not in ("sigmoid", "relu"):
            raise SchemaError(f"unknown activation {self.activation!r}")
        if len(self.weights) != len(self.biases) or not self.weights:
            raise SchemaError("weights/biases must pair up")
        fan_in = len(self.feature_names)
        for l, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.ndim != 2 or w.shape[0] != fan_in or b.shape != (w.shape[1],):
                raise SchemaError(f"layer {l}: shape {w.shape} breaks the chain at {fan_in}")
            fan_in = w.shape[1]
        if fan_in != 1:
            raise SchemaError("head must output a scalar")
        self.mean = np.asarray(self.mean, dtype=float)
        self.scale = np.asarray(self.scale, dtype=float)
        if self.mean.shape != (len(self.feature_names),) or self.scale.shape != self.mean.shape:
            raise SchemaError("standardization arrays do not match the inputs")
        if (self.scale <= 0).any():
            raise SchemaError("standardization scales must be > 0")

    def _hidden_activation(self, z: np.ndarray) -> np.ndarray:
        if self.activation == "relu":
            return np.maximum(z, 0.0)
        return 1.0 / (1.0 + np.exp(-z))

    def head(self, X: np.ndarray) -> np.ndarray:
        """theta(x): the pre-output scalar, before the c-neuron enters."""
        X = _check_width(X, self.feature_names)
        h = (X - self.mean) / self.scale
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            h = self._hidden_activation(h @ w + b)
        return (h @ self.weights[-1] + self.biases[-1])[:, 0]

    def scores(self, X: np.ndarray, c: np.ndarray) -> np.ndarray:
        u = self.head(X) + np.asarray(c, dtype=float) * self.out_scale
        # relu(u+1) - relu(u-1) - 1 pointwise; the clamp form is the same
        # function without the one-ulp float drift of the two-ReLU expression
        return np.clip(u, -1.0, 1.0)


SoftDecisionModel = Union[LinearModel, StumpEnsemble, NeuralNet]


def predict_soft(model: SoftDecisionModel, X: np.ndarray, c=None) -> np.ndarray:
    """Soft scores; `c` (scalar or per-row, in (0,1)) is required for nets."""
    if isinstance(model, NeuralNet):
        if c is None:
            raise DomainError("network families need the threshold c(x) at predict time")
        X = np.atleast_2d(np.asarray(X, dtype=float))
        c = np.broadcast_to(np.asarray(c, dtype=float), (X.shape[0],))
        if ((c <= 0) | (c >= 1)).any():
            raise DomainError("threshold c must lie strictly inside (0,1)")
        return model.scores(X, c)
    return model.scores(X)


def decide(model: SoftDecisionModel, X: np.ndarray, c=None) -> np.ndarray:
    """sign of the soft score with sign(0) = +1."""
    s = predict_soft(model, X, c)
    return np.where(s >= 0, 1, -1)


def _meta_doc(meta: ModelMeta) -> dict:
    return {
        "convexifier": meta.convexifier,
        "seed": meta.seed,
        "hyperparameters": meta.hyperparameters,
    }


def serialize(model: SoftDecisionModel) -> dict:
    """JSON-ready document; floats survive a round trip exactly (repr encoding)."""
    doc = {"schema_version": SCHEMA_VERSION, "family": model.meta.family}
    doc.update(_meta_doc(model.meta))
    doc["feature_names"] = list(model.feature_names)
    if isinstance(model, LinearModel):
        doc["standardization"] = {"mean": model.mean.tolist(), "scale": model.scale.tolist()}
        doc["parameters"] = {"theta": model.theta.tolist(), "degree": model.degree}
    elif isinstance(model, StumpEnsemble):
        doc["standardization"] = None
        doc["parameters"] = {
            "stumps": [[s.feature, s.split, s.polarity] for s in model.stumps],
            "coefs": model.coefs.tolist(),
            "l1_budget": model.l1_budget,
        }
    elif isinstance(model, NeuralNet):
        doc["standardization"] = {"mean": model.mean.tolist(), "scale": model.scale.tolist()}
        doc["parameters"] = {
            "weights": [w.tolist() for w in model.weights],
            "biases": [b.tolist() for b in model.biases],
            "activation": model.activation,
            "out_scale": model.out_scale,
        }
    else:
        raise SchemaError(f"cannot serialize {type(model).__name__}")
    return doc


def _require(doc: dict, key: str):
    if key not in doc:
        raise SchemaError(f"model document missing field {key!r}")
    return doc[key]


def deserialize(doc: dict) -> SoftDecisionModel:
    if _require(doc, "schema_version") != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema version {doc['schema_version']}")
    family = _require(doc, "family")
    if family not in FAMILIES:
        raise SchemaError(f"unknown model family {family!r}")
    meta = ModelMeta(
        family=family,
        convexifier=_require(doc, "convexifier"),
        seed=doc.get("seed"),
        hyperparameters=doc.get("hyperparameters", {}),
    )
    names = list(_require(doc, "feature_names"))
    params = _require(doc, "parameters")
    std = _require(doc, "standardization")
    try:
        if family in ("linear", "lasso"):
            return LinearModel(
                theta=np.array(_require(params, "theta"), dtype=float),
                feature_names=names,
                mean=np.array(_require(std, "mean"), dtype=float),
                scale=np.array(_require(std, "scale"), dtype=float),
                degree=int(_require(params, "degree")),
                meta=meta,
            )
        if family == "stumps":
            stumps = [
                Stump(feature=int(j), split=None if s is None else float(s), polarity=int(p))
                for j, s, p in _require(params, "stumps")
            ]
            return StumpEnsemble(
                stumps=stumps,
                coefs=np.array(_require(params, "coefs"), dtype=float),
                feature_names=names,
                l1_budget=params.get("l1_budget"),
                meta=meta,
            )
        return NeuralNet(
            weights=[np.array(w, dtype=float) for w in _require(params, "weights")],
            biases=[np.array(b, dtype=float) for b in _require(params, "biases")],
            activation=_require(params, "activation"),
            out_scale=float(_require(params, "out_scale")),
            feature_names=names,
            mean=np.array(_require(std, "mean"), dtype=float),
            scale=np.array(_require(std, "scale"), dtype=float),
            meta=meta,
        )
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"malformed model document: {exc}")


def save_model(model: SoftDecisionModel, path) -> None:
    with open(path, "w") as fh:
        json.dump(serialize(model), fh, indent=2)


def load_model(path) -> SoftDecisionModel:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: invalid JSON ({exc})")
    return deserialize(doc)
