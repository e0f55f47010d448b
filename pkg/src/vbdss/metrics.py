"""Ontology quality metrics.

Six measures over a schema census:

* relationship richness   RR = |Prop| / (|Subclass| + |Prop|)
* attribute richness      AR = |Attribute| / |Class|
* class richness          CR = |Class with instance| / |Class|
* average population      AP = |Individual| / |Class|
* Score_rk = (|rel|*|class|*100 + (|subclass|+|rel|)*|prop|) / ((|subclass|+|rel|)*|class|)
* Score_bk = (|Class with instance|*100 + |Individual|) / |class|

where |Prop| counts object plus data properties, |Attribute| counts data
properties only, and |rel| counts object properties only. "Class with
instance" defaults to inferred membership (a class is populated when any
of its subclasses is); pass ``inferred=False`` for the direct-only variant.

All functions are pure; a zero denominator raises UndefinedMetricError.
Values are kept at full precision and only rounded for display.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import UndefinedMetricError
from .ontology import MetricCounts, OntologySchema


def relationship_richness(counts: MetricCounts) -> float:
    denom = counts.subclassof_count + counts.property_count
    if denom == 0:
        raise UndefinedMetricError("relationship richness undefined: no subclass axioms or properties")
    return counts.property_count / denom


def attribute_richness(counts: MetricCounts) -> float:
    if counts.class_count == 0:
        raise UndefinedMetricError("attribute richness undefined: no classes")
    return counts.data_property_count / counts.class_count


def class_richness(counts: MetricCounts, schema: OntologySchema, *, inferred: bool = True) -> float:
    if counts.class_count == 0:
        raise UndefinedMetricError("class richness undefined: no classes")
    return len(schema.populated_classes(inferred=inferred)) / counts.class_count


def average_population(counts: MetricCounts) -> float:
    if counts.class_count == 0:
        raise UndefinedMetricError("average population undefined: no classes")
    return counts.individual_count / counts.class_count


def score_rk(counts: MetricCounts) -> float:
    rel = counts.object_property_count
    sub = counts.subclassof_count
    denom = (sub + rel) * counts.class_count
    if denom == 0:
        raise UndefinedMetricError("score_rk undefined: zero denominator")
    numer = rel * counts.class_count * 100 + (sub + rel) * counts.property_count
    return numer / denom


def score_bk(counts: MetricCounts, schema: OntologySchema, *, inferred: bool = True) -> float:
    if counts.class_count == 0:
        raise UndefinedMetricError("score_bk undefined: no classes")
    populated = len(schema.populated_classes(inferred=inferred))
    return (populated * 100 + counts.individual_count) / counts.class_count


@dataclass
class MetricsReport:
    rr: float
    ar: float
    cr: float
    ap: float
    score_rk: float
    score_bk: float
    populated_class_count: int
    inputs: MetricCounts

    def as_dict(self) -> dict:
        return {
            "relationship_richness": self.rr,
            "attribute_richness": self.ar,
            "class_richness": self.cr,
            "average_population": self.ap,
            "score_rk": self.score_rk,
            "score_bk": self.score_bk,
            "populated_class_count": self.populated_class_count,
            "inputs": self.inputs.as_dict(),
        }

    def render(self) -> str:
        """Two-decimal console table; underlying values stay full precision."""
        rows = [
            ("RR", self.rr),
            ("AR", self.ar),
            ("CR", self.cr),
            ("AP", self.ap),
            ("Score_rk", self.score_rk),
            ("Score_bk", self.score_bk),
        ]
        width = max(len(name) for name, _ in rows)
        lines = ["Metric".ljust(width + 2) + "Value", "-" * (width + 12)]
        lines += [f"{name.ljust(width + 2)}{value:.2f}" for name, value in rows]
        lines.append("")
        lines.append("Inputs")
        lines.append("-" * (width + 12))
        for key, val in self.inputs.as_dict().items():
            lines.append(f"{key}: {val}")
        lines.append(f"populated_class_count: {self.populated_class_count}")
        return "\n".join(lines)


def metrics_report(counts: MetricCounts, schema: OntologySchema, *, inferred: bool = True) -> MetricsReport:
    return MetricsReport(
        rr=relationship_richness(counts),
        ar=attribute_richness(counts),
        cr=class_richness(counts, schema, inferred=inferred),
        ap=average_population(counts),
        score_rk=score_rk(counts),
        score_bk=score_bk(counts, schema, inferred=inferred),
        populated_class_count=len(schema.populated_classes(inferred=inferred)),
        inputs=counts,
    )
