"""The three convexifying functions and their closed-form population quantities.

Each convexifier phi is convex, non-decreasing, with phi(0)=1, and comes with
a calibration pair (gamma, C) such that for all x, c in (0,1)

    |x - c| <= C * (x + c - 2xc - inf_y Q_c(x,y))^gamma,
    Q_c(x,y) = x(1-c) phi(-y) + (1-x) c phi(y).

Pairs: logistic (1/2, sqrt(2 ln 2)), exponential (1/2, 2), hinge (1, 1).
Closed forms implemented here:

    hinge:        inf_y Q = min(2x(1-c), 2c(1-x));      gap = |x - c|
    exponential:  inf_y Q = 2 sqrt(x c (1-x)(1-c));     gap = (sqrt(x(1-c)) - sqrt(c(1-x)))^2
    logistic:     inf_y Q = (x(1-c) + (1-x)c) * H2(t),  t = x(1-c)/(x(1-c)+(1-x)c)

with H2 the binary entropy in bits. Population minimizers of the conditional
convexified risk: log(eta(1-c)/((1-eta)c)) for logistic, half that for
exponential, sign(eta - c) for hinge (ties to +1).

Note the logistic/exponential minimizers are unbounded even though only
signs matter for decisions; linear-model scores are deliberately left
unclamped (see models module).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from .errors import ConfigError, DomainError

LN2 = math.log(2.0)

KINDS = ("logistic", "exponential", "hinge")

_CALIBRATION = {
    "logistic": (0.5, math.sqrt(2.0 * LN2)),
    "exponential": (0.5, 2.0),
    "hinge": (1.0, 1.0),
}

# Lipschitz bound of phi on the default evaluation interval [-40, 40];
# reported for diagnostics only.
_EVAL_HALF_WIDTH = 40.0


@dataclass(frozen=True)
class Convexifier:
    kind: str
    gamma: float = field(init=False)
    C: float = field(init=False)
    L: float = field(init=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown convexifier {self.kind!r}; choose from {KINDS}")
        gamma, C = _CALIBRATION[self.kind]
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "L", float(phi_derivative(self, _EVAL_HALF_WIDTH)))


def get(kind: str | Convexifier) -> Convexifier:
    return kind if isinstance(kind, Convexifier) else Convexifier(kind)


def phi(conv: Convexifier, z):
    """phi(z); logistic uses the log1p large-z branch to avoid overflow."""
    z = np.asarray(z, dtype=float)
    if conv.kind == "logistic":
        # log2(1+e^z) = z/ln2 + log1p(e^-z)/ln2 for z>0, log1p(e^z)/ln2 otherwise
        out = np.where(
            z > 0,
            (z + np.log1p(np.exp(-np.abs(z)))) / LN2,
            np.log1p(np.exp(-np.abs(z))) / LN2,
        )
        return out if out.shape else float(out)
    if conv.kind == "exponential":
        out = np.exp(z)
        return out if out.shape else float(out)
    out = np.maximum(0.0, 1.0 + z)
    return out if out.shape else float(out)


def phi_derivative(conv: Convexifier, z):
    """phi'(z); hinge subgradient is 0 / 0.5 / 1 below / at / above the kink."""
    z = np.asarray(z, dtype=float)
    if conv.kind == "logistic":
        out = expit(z) / LN2
        return out if out.shape else float(out)
    if conv.kind == "exponential":
        out = np.exp(z)
        return out if out.shape else float(out)
    out = np.where(z > -1.0, 1.0, 0.0) + np.where(z == -1.0, 0.5, 0.0)
    return out if out.shape else float(out)


def _check_interior(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 < value < 1.0:
        raise DomainError(f"{name}={value} must lie strictly inside (0,1)")
    return value


@dataclass(frozen=True)
class QFunctional:
    """Arguments of Q_c(x, .): conditional probability x and threshold c."""

    x: float
    c: float

    def __post_init__(self):
        _check_interior("x", self.x)
        _check_interior("c", self.c)


def q_value(conv: Convexifier, q: QFunctional, y) -> float:
    """Q_c(x,y) = x(1-c) phi(-y) + (1-x) c phi(y)."""
    return q.x * (1.0 - q.c) * phi(conv, -np.asarray(y)) + (1.0 - q.x) * q.c * phi(conv, y)


def population_minimizer(conv: Convexifier, eta: float, c: float):
    """Pointwise minimizer of the conditional convexified risk.

    Logistic: log(eta(1-c)/((1-eta)c)); exponential: half of that; hinge:
    +1 if eta >= c else -1.
    """
    eta = _check_interior("eta", eta)
    c = _check_interior("c", c)
    if conv.kind == "hinge":
        return 1 if eta >= c else -1
    logit = math.log(eta * (1.0 - c)) - math.log((1.0 - eta) * c)
    return logit if conv.kind == "logistic" else 0.5 * logit


def inf_q_closed_form(conv: Convexifier, q: QFunctional) -> float:
    """inf over y in R of Q_c(x,y), analytic per kind."""
    x, c = q.x, q.c
    if conv.kind == "hinge":
        return min(2.0 * x * (1.0 - c), 2.0 * c * (1.0 - x))
    if conv.kind == "exponential":
        return 2.0 * math.sqrt(x * c * (1.0 - x) * (1.0 - c))
    s = x * (1.0 - c) + (1.0 - x) * c
    t = x * (1.0 - c) / s
    if t <= 0.0 or t >= 1.0:
        raise DomainError(f"degenerate mixture weight t={t}")
    entropy_bits = -(t * math.log2(t) + (1.0 - t) * math.log2(1.0 - t))
    return s * entropy_bits


def calibration_gap(conv: Convexifier, q: QFunctional) -> float:
    """(x + c - 2xc) - inf_y Q_c(x,y); always >= 0, equals |x-c| for hinge."""
    gap = (q.x + q.c - 2.0 * q.x * q.c) - inf_q_closed_form(conv, q)
    # closed forms guarantee gap >= 0; clip float dust so callers can **gamma
    return max(gap, 0.0)


def calibration_bound(conv: Convexifier, q: QFunctional) -> float:
    """C * gap^gamma, the right-hand side of the calibration inequality."""
    return conv.C * calibration_gap(conv, q) ** conv.gamma
