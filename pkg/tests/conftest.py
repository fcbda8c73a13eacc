import csv

import numpy as np
import pytest

CRIMES = [
    "Murder",
    "Rape/Sexual Assault",
    "Aggravated Assault",
    "Robbery",
    "Arson/Other",
    "Motor Vehicle Theft",
    "Household Burglary",
    "Forgery/Counterfeiting",
    "Fraud",
    "Larceny/Theft",
]

ROSTER_SCHEMA = {
    "columns": {
        "outcome": "two_year_recid",
        "race": "race",
        "female": "female",
        "priors": "priors_count",
        "decile_score": "decile_score",
        "felony": "is_felony",
        "crime_category": "crime",
        "detention_days": "days",
        "age": "age",
    },
    "protected_race": "African-American",
}


def synthetic_roster_rows(n=200, seed=0):
    rng = np.random.default_rng(seed)
    races = rng.choice(["African-American", "Caucasian", "Hispanic"], size=n, p=[0.5, 0.35, 0.15])
    decile = rng.integers(1, 11, size=n)
    priors = rng.poisson(2.0, size=n)
    female = rng.integers(0, 2, size=n)
    felony = rng.integers(0, 2, size=n)
    days = np.round(rng.exponential(8.0, size=n), 1)
    age = rng.integers(18, 70, size=n)
    crimes = rng.choice(CRIMES, size=n)
    logit = -2.2 + 0.35 * decile + 0.15 * priors - 0.4 * female
    p = 1 / (1 + np.exp(-logit))
    recid = (rng.random(n) < p).astype(int)
    rows = []
    for i in range(n):
        rows.append(
            {
                "two_year_recid": int(recid[i]),
                "race": races[i],
                "female": int(female[i]),
                "priors_count": int(priors[i]),
                "decile_score": int(decile[i]),
                "is_felony": int(felony[i]),
                "crime": crimes[i],
                "days": float(days[i]),
                "age": int(age[i]),
            }
        )
    return rows


def write_roster_csv(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)


@pytest.fixture
def roster_csv(tmp_path):
    path = tmp_path / "roster.csv"
    write_roster_csv(path, synthetic_roster_rows())
    return path


@pytest.fixture
def roster_schema():
    return dict(ROSTER_SCHEMA)
