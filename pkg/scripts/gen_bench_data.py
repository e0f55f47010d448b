#!/usr/bin/env python3
"""Regenerate the four benchmark datasets under kb_data/bench/.

Synthetic patient registers of increasing size, disjoint across datasets
(no shared patient IRIs) so the combined graph is a clean union. The
shapes feed queries q1-q6: type triples, demographics, symptom booleans,
test participations, microscopy results, prescriptions with durations.

Deterministic: fixed seed, stable iteration order.
"""

from __future__ import annotations

import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "vbdss" / "kb_data" / "bench"

SIZES = {"dataset1": 150, "dataset2": 300, "dataset3": 450, "dataset4": 600}

SYMPTOMS = [
    "has_Fever",
    "has_Headache",
    "has_Nausea",
    "has_Chills",
    "has_Vomiting",
    "has_Rash",
    "has_Muscle_Pain",
    "has_Weakness",
    "has_JointPains",
    "has_Dry_Skin",
]
TESTS = ["microscopic_examination_1", "rdt_1", "elisa_test_1", "blood_test_1", "nat_test_1"]
DRUGS = ["primaquine_1", "act_al_1", "act_sp_1", "chloroquine_1"]
GENDERS = ["male", "female", "other"]
NAMES = ["Asha", "Bina", "Chand", "Divya", "Esha", "Farid", "Gita", "Hari", "Indu", "Jai"]


REVIEW_CASES = 40  # per dataset: the active cases the register queries target


def write_dataset(name: str, patients: int, rng: random.Random) -> None:
    lines = [
        "# Synthetic patient register for query benchmarking (generated by",
        "# scripts/gen_bench_data.py; do not edit by hand).",
        "@prefix : <http://example.org/vbd#> .",
        "",
    ]
    for i in range(1, patients + 1):
        pid = f":{name}_p{i:04d}"
        under_review = i <= REVIEW_CASES
        parts = [f"{pid} a :patient"]
        parts.append(f':has_Name "{rng.choice(NAMES)} {name[-1]}{i:04d}"')
        parts.append(f':has_Gender "{rng.choice(GENDERS)}"')
        parts.append(f":has_Age {rng.randint(1, 90)}")
        for symptom in rng.sample(SYMPTOMS, rng.randint(2, 5)):
            parts.append(f":{symptom} true")
        for test in rng.sample(TESTS, rng.randint(0, 2)):
            parts.append(f":undergoes :{test}")
        if under_review or rng.random() < 0.5:
            result = rng.choice(["positive", "negative"])
            parts.append(f':has_ME_Result "{result}"')
        if under_review or rng.random() < 0.4:
            parts.append(f":is_Prescribed :{rng.choice(DRUGS)}")
        # the review block: cases flagged for active follow-up, which the
        # shipped register queries anchor on
        if under_review:
            parts.append(":has_High_Suspicion_Of_Malaria true")
            if rng.random() < 0.6:
                parts.append(":is_Prescribed_RDT true")
            if rng.random() < 0.5:
                parts.append(":prepare_Slide true")
        lines.append(" ;\n    ".join(parts) + " .")
    # course durations live on the shared drug individuals
    lines.append("")
    for drug, days in zip(DRUGS, (1, 3, 3, 3)):
        lines.append(f":{drug} :is_Prescribed_For_Duration {days} .")
    (OUT / f"{name}.ttl").write_text("\n".join(lines) + "\n", encoding="utf-8")


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    rng = random.Random(20240917)
    for name, patients in SIZES.items():
        write_dataset(name, patients, rng)
        print(f"wrote {name}.ttl ({patients} patients)")


if __name__ == "__main__":
    main()
