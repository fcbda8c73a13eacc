"""Covariate-driven loss quartets and the derived weighting scheme.

A quartet assigns a real loss to each (decision f, outcome y) cell, cell
values possibly depending on the sample. Everything downstream derives from
the four cells at a given x:

    a(x) = l(-1,1) - l(1,1) + l(-1,-1) - l(1,-1)      (difference of net losses)
    b(x) = l(-1,1) - l(1,1) + l(1,-1) - l(-1,-1)      (sum of net losses)
    omega(y,x) = y*a(x) + b(x)                        (per-sample weight)
    c(x) = (l(1,-1) - l(-1,-1)) / b(x)                (decision threshold)
    d(y,x) = 0.25*(l(1,1)+l(-1,1))*(1+y)
           + 0.25*(l(1,-1)+l(-1,-1))*(1-y) - 0.25*omega(y,x)

For any hard decision f in {-1,+1} the pointwise identity

    l(f,y,x) = 0.5*omega(y,x)*1{-y*f >= 0} + d(y,x)

holds exactly, so risk minimization is a weighted classification problem.
Weights are nonnegative iff both one-sided net losses are, which `validate`
checks row by row instead of assuming.

Cell naming follows the tabular convention (decision sign, outcome sign):
l_pp = l(+1,+1), l_np = l(-1,+1), l_pn = l(+1,-1), l_nn = l(-1,-1).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .data import Dataset, Row
from .errors import AssumptionViolation, DegenerateLoss, SchemaError

# Validation thresholds, not modeling choices; override per quartet if needed.
DEFAULT_CB = 1e-9
DEFAULT_M = 1e12

CELLS = ("l_pp", "l_np", "l_pn", "l_nn")


class LossQuartet:
    """Base class: four loss cells evaluated per sample.

    Subclasses implement `cell_values(row)`; vectorized `cell_table` is
    overridden where a closed form makes it cheap.
    """

    c_b: float = DEFAULT_CB
    M: float = DEFAULT_M

    def cell_values(self, row: Row) -> tuple[float, float, float, float]:
        """(l_pp, l_np, l_pn, l_nn) at this sample."""
        raise NotImplementedError

    def cell_table(self, data: Dataset) -> np.ndarray:
        """(n, 4) array of cells in CELLS order."""
        return np.array([self.cell_values(data.row(i)) for i in range(data.n)], dtype=float)

    def loss(self, decision: int, outcome: int, row: Row) -> float:
        l_pp, l_np, l_pn, l_nn = self.cell_values(row)
        if outcome == 1:
            return l_pp if decision == 1 else l_np
        return l_pn if decision == 1 else l_nn

    def realized_losses(self, data: Dataset, decisions: np.ndarray) -> np.ndarray:
        """l(f_i, y_i, x_i) for every row, vectorized from the cell table."""
        cells = self.cell_table(data)
        pos = data.y == 1
        dec_pos = np.asarray(decisions) == 1
        out = np.where(
            pos,
            np.where(dec_pos, cells[:, 0], cells[:, 1]),
            np.where(dec_pos, cells[:, 2], cells[:, 3]),
        )
        return out


@dataclass
class ConstantQuartet(LossQuartet):
    """Four scalars, the classical cost-sensitive setting."""

    l_pp: float
    l_np: float
    l_pn: float
    l_nn: float
    c_b: float = DEFAULT_CB
    M: float = DEFAULT_M

    def cell_values(self, row: Row):
        return (self.l_pp, self.l_np, self.l_pn, self.l_nn)

    def cell_table(self, data: Dataset) -> np.ndarray:
        return np.tile([self.l_pp, self.l_np, self.l_pn, self.l_nn], (data.n, 1))


def symmetric_quartet() -> ConstantQuartet:
    """The 0/1 loss: both mistakes cost 1, correct decisions cost 0."""
    return ConstantQuartet(l_pp=0.0, l_np=1.0, l_pn=1.0, l_nn=0.0)


@dataclass
class GroupQuartet(LossQuartet):
    """Group-specific false-negative weight psi_g and false-positive weight
    phi_g; correct decisions cost nothing. Requires row group ids."""

    psi: dict[int, float]
    phi: dict[int, float]
    c_b: float = DEFAULT_CB
    M: float = DEFAULT_M

    def cell_values(self, row: Row):
        if row.group is None:
            raise SchemaError("GroupQuartet needs a group id on every row")
        try:
            return (0.0, self.psi[row.group], self.phi[row.group], 0.0)
        except KeyError:
            raise SchemaError(f"no loss weights for group {row.group}")

    def cell_table(self, data: Dataset) -> np.ndarray:
        if data.groups is None:
            raise SchemaError("GroupQuartet needs a group column")
        unknown = set(np.unique(data.groups).tolist()) - (set(self.psi) & set(self.phi))
        if unknown:
            raise SchemaError(f"no loss weights for groups {sorted(unknown)}")
        cells = np.zeros((data.n, 4))
        psi = np.vectorize(self.psi.get, otypes=[float])(data.groups)
        phi = np.vectorize(self.phi.get, otypes=[float])(data.groups)
        cells[:, 1] = psi
        cells[:, 2] = phi
        return cells


@dataclass
class TabularQuartet(LossQuartet):
    """Cells read from four named extra columns of the dataset."""

    columns: dict[str, str]  # cell name -> dataset extra column
    c_b: float = DEFAULT_CB
    M: float = DEFAULT_M

    def __post_init__(self):
        missing = [c for c in CELLS if c not in self.columns]
        if missing:
            raise SchemaError(f"tabular loss spec missing cells {missing}")

    def cell_values(self, row: Row):
        try:
            return tuple(float(row.extras[self.columns[c]]) for c in CELLS)
        except KeyError as exc:
            raise SchemaError(f"row {row.index} missing loss column {exc}")

    def cell_table(self, data: Dataset) -> np.ndarray:
        cols = []
        for c in CELLS:
            name = self.columns[c]
            if name not in data.extras:
                raise SchemaError(f"dataset has no column {name!r} for cell {c}")
            cols.append(np.asarray(data.extras[name], dtype=float))
        return np.column_stack(cols)


@dataclass(frozen=True)
class NetLossPair:
    """a = difference of the two one-sided net losses, b = their sum."""

    a: float
    b: float


@dataclass(frozen=True)
class WeightedSample:
    y: int
    x: np.ndarray
    group: int | None
    omega: float
    c: float


def _net_from_cells(cells: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    l_pp, l_np, l_pn, l_nn = cells[..., 0], cells[..., 1], cells[..., 2], cells[..., 3]
    a = l_np - l_pp + l_nn - l_pn
    b = l_np - l_pp + l_pn - l_nn
    return a, b


def compute_net_losses(quartet: LossQuartet, row: Row) -> NetLossPair:
    a, b = _net_from_cells(np.array(quartet.cell_values(row)))
    return NetLossPair(a=float(a), b=float(b))


def weight(pair: NetLossPair, y: int) -> float:
    """omega(y,x) = y*a(x) + b(x)."""
    return y * pair.a + pair.b


def threshold(quartet: LossQuartet, row: Row) -> float:
    """c(x), the fraction of net false-positive losses in total net losses."""
    l_pp, l_np, l_pn, l_nn = quartet.cell_values(row)
    denom = l_np - l_pp + l_pn - l_nn
    if denom <= 0:
        raise DegenerateLoss(
            f"row {row.index}: sum of net losses {denom} <= 0", rows=[row.index]
        )
    return (l_pn - l_nn) / denom


def residual_term(quartet: LossQuartet, y: int, row: Row) -> float:
    """d(y,x), the decision-free part of the pointwise risk decomposition."""
    l_pp, l_np, l_pn, l_nn = quartet.cell_values(row)
    pair = compute_net_losses(quartet, row)
    d0 = 0.25 * (l_pp + l_np) * (1 + y) + 0.25 * (l_pn + l_nn) * (1 - y)
    return d0 - 0.25 * weight(pair, y)


@dataclass(frozen=True)
class ValidationReport:
    n: int
    min_margin_pos: float  # min over rows of l_np - l_pp - c_b
    min_margin_neg: float  # min over rows of l_pn - l_nn - c_b
    max_abs_loss: float
    c_b: float
    M: float

    @property
    def passed(self) -> bool:
        return self.min_margin_pos >= 0 and self.min_margin_neg >= 0


def validate(quartet: LossQuartet, data: Dataset) -> ValidationReport:
    """Check both one-sided net losses >= c_b and |l| <= M on every row.

    Raises AssumptionViolation listing offending rows: negative weights would
    make the convexification invalid.
    """
    if data.n == 0:
        return ValidationReport(
            n=0, min_margin_pos=np.inf, min_margin_neg=np.inf,
            max_abs_loss=0.0, c_b=quartet.c_b, M=quartet.M,
        )
    cells = quartet.cell_table(data)
    pos_net = cells[:, 1] - cells[:, 0]  # l(-1,1) - l(1,1)
    neg_net = cells[:, 2] - cells[:, 3]  # l(1,-1) - l(-1,-1)
    bad = (pos_net < quartet.c_b) | (neg_net < quartet.c_b)
    if bad.any():
        rows = np.flatnonzero(bad)
        raise AssumptionViolation(
            f"{rows.size} rows violate the net-loss positivity assumption "
            f"(first offenders {rows[:10].tolist()}; worst margins "
            f"{pos_net.min():.6g}/{neg_net.min():.6g} vs c_b={quartet.c_b:g})",
            rows=rows.tolist(),
        )
    too_big = np.abs(cells).max(axis=1) > quartet.M
    if too_big.any():
        rows = np.flatnonzero(too_big)
        raise AssumptionViolation(
            f"{rows.size} rows exceed the loss magnitude bound M={quartet.M:g}",
            rows=rows.tolist(),
        )
    return ValidationReport(
        n=data.n,
        min_margin_pos=float(pos_net.min() - quartet.c_b),
        min_margin_neg=float(neg_net.min() - quartet.c_b),
        max_abs_loss=float(np.abs(cells).max()),
        c_b=quartet.c_b,
        M=quartet.M,
    )


def weight_table(quartet: LossQuartet, data: Dataset) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized (omega_i, c_i) for every row; assumes validation passed."""
    cells = quartet.cell_table(data)
    a, b = _net_from_cells(cells)
    if (b <= 0).any():
        rows = np.flatnonzero(b <= 0)
        raise DegenerateLoss(
            f"sum of net losses <= 0 on rows {rows[:10].tolist()}", rows=rows.tolist()
        )
    omega = data.y * a + b
    c = (cells[:, 2] - cells[:, 3]) / b
    return omega, c


@dataclass
class WeightedDataset:
    """A dataset with (omega_i, c_i) attached; what the trainers consume."""

    data: Dataset
    omega: np.ndarray
    c: np.ndarray

    @property
    def n(self) -> int:
        return self.data.n

    def subset(self, idx: np.ndarray) -> "WeightedDataset":
        return WeightedDataset(self.data.subset(idx), self.omega[idx], self.c[idx])


def weigh_dataset(quartet: LossQuartet, data: Dataset) -> list[WeightedSample]:
    """Per-row weighted samples, row order preserved. Validates first."""
    validate(quartet, data)
    omega, c = weight_table(quartet, data)
    return [
        WeightedSample(
            y=int(data.y[i]),
            x=data.X[i],
            group=None if data.groups is None else int(data.groups[i]),
            omega=float(omega[i]),
            c=float(c[i]),
        )
        for i in range(data.n)
    ]


def attach_weights(quartet: LossQuartet, data: Dataset) -> WeightedDataset:
    """Validate then bundle (data, omega, c) for training."""
    validate(quartet, data)
    omega, c = weight_table(quartet, data)
    return WeightedDataset(data=data, omega=omega, c=c)


def quartet_from_spec(spec: dict) -> LossQuartet:
    """Build a quartet from its JSON loss-specification document."""
    kind = spec.get("type")
    if kind == "constant":
        try:
            return ConstantQuartet(
                l_pp=float(spec["l_pp"]),
                l_np=float(spec["l_np"]),
                l_pn=float(spec["l_pn"]),
                l_nn=float(spec["l_nn"]),
            )
        except KeyError as exc:
            raise SchemaError(f"constant loss spec missing {exc}")
    if kind == "symmetric":
        return symmetric_quartet()
    if kind == "group":
        try:
            psi = {int(k): float(v) for k, v in spec["psi"].items()}
            phi = {int(k): float(v) for k, v in spec["phi"].items()}
        except (KeyError, AttributeError):
            raise SchemaError("group loss spec needs 'psi' and 'phi' mappings")
        return GroupQuartet(psi=psi, phi=phi)
    if kind == "tabular":
        cols = spec.get("columns")
        if not isinstance(cols, dict):
            raise SchemaError("tabular loss spec needs a 'columns' mapping")
        return TabularQuartet(columns=cols)
    if kind == "pretrial":
        from . import pretrial

        return pretrial.pretrial_quartet(pretrial.tables_from_spec(spec))
    raise SchemaError(f"unknown loss spec type {kind!r}")


def load_loss_spec(path) -> LossQuartet:
    with open(path) as fh:
        try:
            spec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: invalid JSON ({exc})")
    return quartet_from_spec(spec)
