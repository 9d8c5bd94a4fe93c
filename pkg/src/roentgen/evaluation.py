"""The confirmatory-test harness: sampling, per-trial tallies, and the summary.

Percentages are carried as exact rationals so that trial precision, its
grand mean, and the error complement add up with zero drift; they are
rendered to one decimal place at the output boundary. Sampling uses a
seeded PCG64 generator (numpy's default_rng), so trial composition is
reproducible from a single integer seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .diagnosis import Diagnosis, NOT_PNEUMONIC, PNEUMONIC
from .errors import TrialError
from .imaging import LabeledImage

CONFUSION_CELLS = ("tp", "fp", "fn", "tn")


def mean(xs: Sequence) -> Fraction:
    """Arithmetic mean, exact when the inputs are exact."""
    if len(xs) == 0:
        raise ValueError("mean of an empty list is undefined")
    return sum((Fraction(x) for x in xs), Fraction(0)) / len(xs)


def srswor(ids: Sequence, k: int, rng: np.random.Generator) -> list:
    """Simple random sample without replacement: k distinct ids, uniform over subsets."""
    if k < 0:
        raise ValueError(f"sample size must be non-negative, got {k}")
    if k > len(ids):
        raise ValueError(f"cannot draw {k} from a population of {len(ids)}")
    if k == 0:
        return []
    chosen = rng.choice(len(ids), size=k, replace=False)
    return [ids[i] for i in chosen]


def build_trials(
    dataset: Sequence[LabeledImage],
    trials: int,
    per_class: int,
    rng: np.random.Generator,
) -> list[list[LabeledImage]]:
    """Draw `trials` disjoint test sets of per_class images per label.

    Each trial's sample is removed from the pool before the next draw, so
    no image appears in more than one trial.
    """
    pools = {
        PNEUMONIC: sorted(
            (li for li in dataset if li.label == PNEUMONIC), key=lambda li: li.id
        ),
        NOT_PNEUMONIC: sorted(
            (li for li in dataset if li.label == NOT_PNEUMONIC), key=lambda li: li.id
        ),
    }
    for label, pool in pools.items():
        needed = trials * per_class
        if len(pool) < needed:
            raise ValueError(
                f"not enough {label} images: need {needed}, have {len(pool)}"
            )
    out = []
    for _ in range(trials):
        test_set: list[LabeledImage] = []
        for label in (PNEUMONIC, NOT_PNEUMONIC):
            sample = srswor(pools[label], per_class, rng)
            taken = {li.id for li in sample}
            pools[label] = [li for li in pools[label] if li.id not in taken]
            test_set.extend(sample)
        out.append(test_set)
    return out


@dataclass(frozen=True)
class ImageRecord:
    id: str
    label: str
    diagnosis: str
    matched: bool

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "label": self.label,
            "diagnosis": self.diagnosis,
            "matched": self.matched,
        }


@dataclass(frozen=True)
class TrialResult:
    trial: int  # 1-based
    records: tuple[ImageRecord, ...]

    @property
    def sample_size(self) -> int:
        return len(self.records)

    @property
    def matched(self) -> int:
        return sum(1 for r in self.records if r.matched)

    @property
    def unmatched(self) -> int:
        return self.sample_size - self.matched

    def confusion(self) -> dict[str, int]:
        cells = dict.fromkeys(CONFUSION_CELLS, 0)
        for r in self.records:
            if r.label == PNEUMONIC:
                cells["tp" if r.diagnosis == PNEUMONIC else "fn"] += 1
            else:
                cells["fp" if r.diagnosis == PNEUMONIC else "tn"] += 1
        return cells

    @property
    def dpp(self) -> Fraction:
        """Diagnostic precision percentage: matched / sample size * 100."""
        return Fraction(self.matched, self.sample_size) * 100

    def to_dict(self) -> dict:
        return {
            "trial": self.trial,
            "sample_size": self.sample_size,
            "matched": self.matched,
            "unmatched": self.unmatched,
            "dpp": float(self.dpp),
            "confusion": self.confusion(),
            "records": [r.to_dict() for r in self.records],
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "TrialResult":
        records = tuple(
            ImageRecord(r["id"], r["label"], r["diagnosis"], r["matched"])
            for r in raw["records"]
        )
        return cls(raw["trial"], records)


def run_trial(
    classify: Callable[[LabeledImage], Diagnosis],
    test_set: Sequence[LabeledImage],
    trial: int = 1,
) -> TrialResult:
    """Diagnose every image in the set and tally matches against the labels."""
    if not test_set:
        raise ValueError("trial test set must be non-empty")
    records = []
    for item in test_set:
        try:
            diagnosis = classify(item)
        except Exception as exc:
            raise TrialError(f"classifier failed on {item.id!r}: {exc}", item.id) from exc
        records.append(
            ImageRecord(item.id, item.label, diagnosis.label, diagnosis.label == item.label)
        )
    return TrialResult(trial, tuple(records))


@dataclass(frozen=True)
class EvaluationReport:
    trials: tuple[TrialResult, ...]

    @property
    def gdpp(self) -> Fraction:
        return mean([t.dpp for t in self.trials])

    @property
    def gdep(self) -> Fraction:
        return 100 - self.gdpp

    def aggregate_confusion(self) -> dict[str, int]:
        total = dict.fromkeys(CONFUSION_CELLS, 0)
        for t in self.trials:
            for cell, count in t.confusion().items():
                total[cell] += count
        return total

    def to_dict(self) -> dict:
        return {
            "trials": [t.to_dict() for t in self.trials],
            "gdpp": float(self.gdpp),
            "gdep": float(self.gdep),
            "aggregate_confusion": self.aggregate_confusion(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, raw: dict) -> "EvaluationReport":
        return cls(tuple(TrialResult.from_dict(t) for t in raw["trials"]))

    @classmethod
    def from_json(cls, text: str) -> "EvaluationReport":
        return cls.from_dict(json.loads(text))


def summarize(trials: Sequence[TrialResult]) -> EvaluationReport:
    if not trials:
        raise ValueError("cannot summarize zero trials")
    return EvaluationReport(tuple(trials))


def format_percent(value: Fraction) -> str:
    """Whole percentages print bare ('92 %'), others to one decimal ('91.2 %')."""
    if value.denominator == 1:
        return f"{value.numerator} %"
    tenths = (value * 10 + Fraction(1, 2)) // 1  # round half up on the tenths
    return f"{tenths / 10} %"


def render_table(report: EvaluationReport) -> str:
    """Human-readable summary table mirroring the published layout."""
    lines = []
    for t in report.trials:
        lines.append(f"Trial {t.trial}")
        lines.append(f"  Matched Diagnosis    Tally Result: {t.matched}")
        lines.append(f"  Unmatched Diagnosis  Tally Result: {t.unmatched}")
        lines.append(f"  Diagnosis Precision Percentage  {format_percent(t.dpp)}")
    lines.append("Final Result")
    lines.append(f"  General Diagnosis Precision Percentage: {format_percent(report.gdpp)}")
    lines.append(f"  General Diagnosis Error Percentage: {format_percent(report.gdep)}")
    return "\n".join(lines)
