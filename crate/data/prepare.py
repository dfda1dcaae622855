#!/usr/bin/env python3
"""Convert raw benchmark files into the header-row CSVs in this directory.

Usage: prepare.py <raw_dir>

<raw_dir> must contain adult/adult.data, german/german.data and
compas/compas-scores-two-years.csv (the layout of the `responsibly`
package's dataset directory). Only the standard library is used.
"""
import csv
import sys
from pathlib import Path

ADULT_COLUMNS = [
    "age", "workclass", "fnlwgt", "education", "education-num", "marital-status",
    "occupation", "relationship", "race", "sex", "capital-gain", "capital-loss",
    "hours-per-week", "native-country", "income",
]

GERMAN_COLUMNS = [
    "status", "duration", "credit_history", "purpose", "credit_amount", "savings",
    "present_employment", "installment_rate", "status_sex", "other_debtors",
    "present_residence_since", "property", "age", "installment_plans", "housing",
    "number_of_existing_credits", "job", "number_of_people_liable_for", "telephone",
    "foreign_worker", "credit",
]
GERMAN_MALE = {"A91", "A93", "A94"}

COMPAS_COLUMNS = [
    "sex", "age", "age_cat", "race", "juv_fel_count", "juv_misd_count",
    "juv_other_count", "priors_count", "c_charge_degree", "two_year_recid",
]


def adult(raw: Path, out: Path) -> int:
    rows = []
    with open(raw / "adult" / "adult.data") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            rows.append([v.strip() for v in line.split(",")])
    with open(out / "adult.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(ADULT_COLUMNS)
        w.writerows(rows)
    return len(rows)


def german(raw: Path, out: Path) -> int:
    header = [c for c in GERMAN_COLUMNS if c != "status_sex"]
    header[header.index("installment_rate") + 1:header.index("installment_rate") + 1] = ["personal_status", "sex"]
    n = 0
    with open(raw / "german" / "german.data") as f, open(out / "german_credit.csv", "w", newline="") as g:
        w = csv.writer(g, lineterminator="\n")
        w.writerow(header)
        for line in f:
            values = line.split()
            if not values:
                continue
            rec = dict(zip(GERMAN_COLUMNS, values))
            rec["personal_status"] = rec["status_sex"]
            rec["sex"] = "male" if rec["status_sex"] in GERMAN_MALE else "female"
            w.writerow([rec[c] for c in header])
            n += 1
    return n


def compas(raw: Path, out: Path) -> int:
    n = 0
    with open(raw / "compas" / "compas-scores-two-years.csv", newline="") as f, \
            open(out / "compas.csv", "w", newline="") as g:
        w = csv.writer(g, lineterminator="\n")
        w.writerow(COMPAS_COLUMNS)
        for rec in csv.DictReader(f):
            # ProPublica's screening filters.
            days = rec["days_b_screening_arrest"]
            if days == "" or not -30 <= int(float(days)) <= 30:
                continue
            if rec["is_recid"] == "-1" or rec["c_charge_degree"] == "O" or rec["score_text"] == "N/A":
                continue
            w.writerow([rec[c] for c in COMPAS_COLUMNS])
            n += 1
    return n


def main() -> None:
    raw = Path(sys.argv[1])
    out = Path(__file__).resolve().parent
    print("adult", adult(raw, out))
    print("german_credit", german(raw, out))
    print("compas", compas(raw, out))


if __name__ == "__main__":
    main()
