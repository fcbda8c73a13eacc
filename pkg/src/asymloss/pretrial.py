"""Pretrial-detention cost-benefit losses and roster ingestion.

Loss cells per record (group G, crime category, detention days d):

    l(+1,+1) = -gamma_eb^G * EBD(crime) + ECD(d)    detention benefit nets out
    l(+1,-1) =  gamma_eb^G * C                      recidivism-cost constant
    l(-1,+1) =  lambda_ec^G * ECD(d)
    l(-1,-1) =  0

EBD is the per-crime economic benefit of detention (thousands of dollars,
scaled by 0.05), ECD the economic cost of detention (0.347 per day), and C
the expected recidivism cost (median 23, or the per-crime column). Group
scalings gamma_eb = lambda_ec double the protected group's entries.

The sign of the EBD term makes detention benefits REDUCE the realized loss
of a true positive (so True Positive Cost can be negative); set
`detention_benefit_reduces_loss=False` to take the raw formula instead,
which fails positivity validation on any roster with EBD > 0.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, replace

import numpy as np

from .data import Dataset, Row
from .errors import NegativeDuration, ParseError, SchemaError, UnknownCrimeType
from .losses import LossQuartet, attach_weights, symmetric_quartet, weight_table
from .metrics import auc as auc_metric
from .metrics import report_from_decisions
from .models import predict_soft
from .train import TrainConfig, fit_boosting, fit_lasso, fit_linear, fit_network

# Summary cost-benefit entries per crime type, thousands of dollars:
# expected recidivism cost C and economic benefit of detention EBD.
COST_TABLE = {
    "Murder": (10754.0, 11732.0),
    "Rape/Sexual Assault": (266.0, 353.0),
    "Aggravated Assault": (126.0, 127.0),
    "Robbery": (48.0, 230.0),
    "Arson/Other": (23.0, 292.0),
    "Motor Vehicle Theft": (11.0, 53.0),
    "Household Burglary": (7.0, 64.0),
    "Forgery/Counterfeiting": (5.0, 46.0),
    "Fraud": (5.0, 49.0),
    "Larceny/Theft": (3.0, 43.0),
}

ECD_SLOPE = 0.347  # thousands of dollars per detention day
EBD_SCALE = 0.05
RECIDIVISM_CONSTANT = 23.0  # median future recidivism cost


@dataclass
class CostBenefitTables:
    ebd_by_crime: dict[str, float] = field(
        default_factory=lambda: {k: v[1] for k, v in COST_TABLE.items()}
    )
    c_by_crime: dict[str, float] = field(
        default_factory=lambda: {k: v[0] for k, v in COST_TABLE.items()}
    )
    ecd_slope: float = ECD_SLOPE
    ebd_scale: float = EBD_SCALE
    recidivism_constant: float = RECIDIVISM_CONSTANT
    group_scaling: dict[int, float] = field(default_factory=lambda: {0: 1.0, 1: 2.0})
    correct_release_loss: float = 0.0  # rho^G
    recidivism_cost_mode: str = "constant"  # or "per_crime"
    detention_benefit_reduces_loss: bool = True
    map_unknown_crime_to_other: bool = False

    def __post_init__(self):
        if self.recidivism_cost_mode not in ("constant", "per_crime"):
            raise SchemaError(f"unknown recidivism cost mode {self.recidivism_cost_mode!r}")
        for table in (self.ebd_by_crime, self.c_by_crime):
            bad = {k: v for k, v in table.items() if v < 0}
            if bad:
                raise SchemaError(f"monetary table entries must be >= 0: {bad}")

    def resolve_crime(self, crime: str) -> str:
        if crime in self.ebd_by_crime:
            return crime
        if self.map_unknown_crime_to_other and "Arson/Other" in self.ebd_by_crime:
            return "Arson/Other"
        raise UnknownCrimeType(f"crime category {crime!r} not in the cost tables")


def ebd(tables: CostBenefitTables, crime: str) -> float:
    """Scaled economic benefit of detention for the crime type."""
    return tables.ebd_scale * tables.ebd_by_crime[tables.resolve_crime(crime)]


def ecd(tables: CostBenefitTables, detention_days: float) -> float:
    """Economic cost of detention, linear in days."""
    if detention_days < 0:
        raise NegativeDuration(f"detention days must be >= 0, got {detention_days}")
    return tables.ecd_slope * detention_days


def recidivism_cost(tables: CostBenefitTables, crime: str | None = None) -> float:
    """Expected recidivism cost: the constant median, or the per-crime column."""
    if tables.recidivism_cost_mode == "constant":
        return tables.recidivism_constant
    if crime is None:
        raise UnknownCrimeType("per-crime recidivism cost needs a crime category")
    return tables.c_by_crime[tables.resolve_crime(crime)]


class PretrialQuartet(LossQuartet):
    """Loss quartet over rows carrying 'crime' and 'detention_days' extras
    plus a group id."""

    def __init__(self, tables: CostBenefitTables):
        self.tables = tables

    def _scaling(self, group: int | None) -> float:
        if group is None:
            raise SchemaError("pretrial quartet needs a group id on every row")
        try:
            return self.tables.group_scaling[group]
        except KeyError:
            raise SchemaError(f"no group scaling for group {group}")

    def cell_values(self, row: Row):
        try:
            crime = row.extras["crime"]
            days = float(row.extras["detention_days"])
        except KeyError as exc:
            raise SchemaError(f"row {row.index} missing pretrial column {exc}")
        scale = self._scaling(row.group)
        benefit = scale * ebd(self.tables, crime)
        cost_detention = ecd(self.tables, days)
        sign = -1.0 if self.tables.detention_benefit_reduces_loss else 1.0
        l_pp = sign * benefit + cost_detention
        l_pn = scale * recidivism_cost(self.tables, crime)
        l_np = scale * cost_detention
        l_nn = self.tables.correct_release_loss
        return (l_pp, l_np, l_pn, l_nn)


def pretrial_quartet(tables: CostBenefitTables | None = None) -> PretrialQuartet:
    return PretrialQuartet(tables or CostBenefitTables())


def tables_from_spec(spec: dict) -> CostBenefitTables:
    """Build tables from a loss-spec JSON document (type 'pretrial')."""
    kwargs = {}
    for key in (
        "ecd_slope",
        "ebd_scale",
        "recidivism_constant",
        "correct_release_loss",
        "recidivism_cost_mode",
        "detention_benefit_reduces_loss",
        "map_unknown_crime_to_other",
    ):
        if key in spec:
            kwargs[key] = spec[key]
    if "group_scaling" in spec:
        kwargs["group_scaling"] = {int(k): float(v) for k, v in spec["group_scaling"].items()}
    if "ebd_by_crime" in spec:
        kwargs["ebd_by_crime"] = {str(k): float(v) for k, v in spec["ebd_by_crime"].items()}
    if "c_by_crime" in spec:
        kwargs["c_by_crime"] = {str(k): float(v) for k, v in spec["c_by_crime"].items()}
    return CostBenefitTables(**kwargs)


def export_cost_tables(tables: CostBenefitTables, path) -> None:
    """Dump the embedded tables for audit."""
    doc = {
        "ebd_by_crime": tables.ebd_by_crime,
        "c_by_crime": tables.c_by_crime,
        "ecd_slope": tables.ecd_slope,
        "ebd_scale": tables.ebd_scale,
        "recidivism_constant": tables.recidivism_constant,
        "group_scaling": {str(k): v for k, v in tables.group_scaling.items()},
        "correct_release_loss": tables.correct_release_loss,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)


# ---------------------------------------------------------------------------
# roster ingestion

REQUIRED_FIELDS = (
    "outcome",
    "race",
    "female",
    "priors",
    "decile_score",
    "felony",
    "crime_category",
    "detention_days",
)


@dataclass(frozen=True)
class PretrialRecord:
    y: int
    race: str
    group: int
    female: int
    priors: float
    decile_score: float
    felony: int
    crime_category: str
    detention_days: float
    age: float | None = None


def _parse_binary(value, name: str, row: int) -> int:
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ParseError(f"column {name!r} value {value!r} is not numeric", row=row)
    if v not in (0.0, 1.0):
        raise ParseError(f"column {name!r} must be 0/1, got {value!r}", row=row)
    return int(v)


def read_roster(path, schema: dict) -> list[PretrialRecord]:
    """Parse a COMPAS-style CSV into typed records.

    `schema` maps canonical field names to CSV columns under "columns";
    "protected_race" (default "African-American") defines group 1. The
    outcome may be encoded 0/1 (1 = re-offended) or -1/+1. Rows are taken
    as already restricted to the analysis sample (scored within 30 days,
    no ordinary traffic offenses, two-year observation window); no
    filtering happens here.
    """
    columns = schema.get("columns", {})
    missing = [f for f in REQUIRED_FIELDS if f not in columns]
    if missing:
        raise SchemaError(f"schema config missing column mappings for {missing}")
    protected = schema.get("protected_race", "African-American")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: empty file or missing header")
        for field_name, col in columns.items():
            if col not in reader.fieldnames:
                raise SchemaError(f"{path}: missing column {col!r} (mapped from {field_name!r})")
        records = []
        for i, raw in enumerate(reader):
            def get(name):
                return raw[columns[name]]

            try:
                y_raw = float(get("outcome"))
            except (TypeError, ValueError):
                raise ParseError(f"outcome {get('outcome')!r} is not numeric", row=i)
            if y_raw in (0.0, 1.0):
                y = 1 if y_raw == 1.0 else -1
            elif y_raw in (-1.0,):
                y = -1
            else:
                raise ParseError(f"outcome must be 0/1 or -1/+1, got {y_raw}", row=i)
            try:
                priors = float(get("priors"))
                decile = float(get("decile_score"))
                days = float(get("detention_days"))
            except (TypeError, ValueError) as exc:
                raise ParseError(str(exc), row=i)
            if days < 0:
                raise NegativeDuration(f"row {i}: detention days {days} < 0")
            race = str(get("race"))
            age = None
            if "age" in columns:
                try:
                    age = float(get("age"))
                except (TypeError, ValueError):
                    raise ParseError(f"age {get('age')!r} is not numeric", row=i)
            records.append(
                PretrialRecord(
                    y=y,
                    race=race,
                    group=1 if race == protected else 0,
                    female=_parse_binary(get("female"), "female", i),
                    priors=priors,
                    decile_score=decile,
                    felony=_parse_binary(get("felony"), "felony", i),
                    crime_category=str(get("crime_category")),
                    detention_days=days,
                    age=age,
                )
            )
    return records


def roster_dataset(records: list[PretrialRecord]) -> Dataset:
    """Feature dictionary of the empirical tables.

    Columns: race one-hot (first sorted category is the baseline), female,
    priors count, decile score, felony flag, and race x score interactions
    (same baseline). Group/crime/days ride along as extras.
    """
    if not records:
        raise SchemaError("empty roster")
    races = sorted({r.race for r in records})
    dummies = races[1:]  # drop-first to keep the dictionary non-collinear
    names = (
        [f"race={r}" for r in dummies]
        + ["female", "priors", "decile_score", "felony"]
        + [f"race={r} x score" for r in dummies]
    )
    X = np.zeros((len(records), len(names)))
    for i, rec in enumerate(records):
        k = len(dummies)
        for j, r in enumerate(dummies):
            X[i, j] = 1.0 if rec.race == r else 0.0
            X[i, k + 4 + j] = rec.decile_score if rec.race == r else 0.0
        X[i, k] = rec.female
        X[i, k + 1] = rec.priors
        X[i, k + 2] = rec.decile_score
        X[i, k + 3] = rec.felony
    return Dataset(
        X=X,
        y=np.array([r.y for r in records]),
        feature_names=names,
        groups=np.array([r.group for r in records]),
        extras={
            "crime": np.array([r.crime_category for r in records], dtype=object),
            "detention_days": np.array([r.detention_days for r in records]),
        },
    )


def ingest_roster(path, schema: dict) -> Dataset:
    return roster_dataset(read_roster(path, schema))


# ---------------------------------------------------------------------------
# the empirical comparison table

TABLE3_ROWS = (
    "True Positive Cost",
    "False Negative Cost",
    "True Negative Cost",
    "False Positive Cost",
    "Overall cost",
    "TP",
    "FN",
    "TN",
    "FP",
    "TP Rate",
    "FP Rate",
    "AUC_train",
    "AUC_test",
)


def _fit_family(wdata, family: str, config: TrainConfig):
    if family == "linear":
        return fit_linear(wdata, config)
    if family == "lasso":
        return fit_lasso(wdata, config)
    if family == "stumps":
        return fit_boosting(wdata, replace(config, convexifier="exponential"))
    if family in ("shallow", "deep"):
        cfg = config if config.convexifier != "exponential" else replace(config, convexifier="hinge")
        return fit_network(wdata, cfg, family=family)
    raise SchemaError(f"unknown model family {family!r}")


def _column(model, family, train_data, test_data, quartet, c_train, c_test) -> dict:
    def scores_for(data, c):
        c_arg = c if family in ("shallow", "deep") else None
        return predict_soft(model, data.X, c=c_arg)

    test_scores = scores_for(test_data, c_test)
    decisions = np.where(test_scores >= 0, 1, -1)
    rep = report_from_decisions(test_data, quartet, decisions, scores=test_scores)
    train_scores = scores_for(train_data, c_train)
    try:
        auc_train = auc_metric(train_scores, train_data.y)
    except Exception:
        auc_train = None
    return {
        "True Positive Cost": rep.tp_cost,
        "False Negative Cost": rep.fn_cost,
        "True Negative Cost": rep.tn_cost,
        "False Positive Cost": rep.fp_cost,
        "Overall cost": rep.overall_cost,
        "TP": rep.tp,
        "FN": rep.fn,
        "TN": rep.tn,
        "FP": rep.fp,
        "TP Rate": rep.tp_rate,
        "FP Rate": rep.fp_rate,
        "AUC_train": auc_train,
        "AUC_test": rep.auc,
    }


def run_empirical(
    roster: Dataset,
    families: list[str],
    config: TrainConfig,
    tables: CostBenefitTables | None = None,
    test_fraction: float = 0.3,
    seed: int = 0,
    quartet: LossQuartet | None = None,
):
    """Unweighted (symmetric) vs weighted (pretrial losses) fits per family,
    evaluated on the held-out rows under the pretrial costs.

    Returns {(family, variant): {row label: value}} keyed columns. Rows are
    shuffled with the seed before the positional split. Passing `quartet`
    overrides the pretrial losses for both weighting and evaluation.
    """
    quartet = quartet if quartet is not None else pretrial_quartet(tables)
    rng = np.random.default_rng(seed)
    shuffled = roster.subset(rng.permutation(roster.n))
    train_data, test_data = shuffled.split(test_fraction)
    c_train = weight_table(quartet, train_data)[1]
    c_test = weight_table(quartet, test_data)[1]
    wtrain_sym = attach_weights(symmetric_quartet(), train_data)
    wtrain = attach_weights(quartet, train_data)
    columns = {}
    # each variant's net consumes its own training loss's threshold at
    # predict time: 0.5 for the symmetric fit, the pretrial c(x) otherwise
    variants = (
        ("unweighted", wtrain_sym, np.full(train_data.n, 0.5), np.full(test_data.n, 0.5)),
        ("weighted", wtrain, c_train, c_test),
    )
    for family in families:
        for variant, wdata, c_tr, c_te in variants:
            res = _fit_family(wdata, family, replace(config, seed=seed))
            columns[(family, variant)] = _column(
                res.model, family, train_data, test_data, quartet, c_tr, c_te
            )
    return columns
