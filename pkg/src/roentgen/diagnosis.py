"""Diagnosis record and the decision threshold rule."""

from __future__ import annotations

from dataclasses import dataclass

PNEUMONIC = "pneumonic"
NOT_PNEUMONIC = "not_pneumonic"
LABELS = (PNEUMONIC, NOT_PNEUMONIC)


def decide_label(score: float, threshold: float) -> str:
    """score >= threshold reads as pneumonic: ties go to the positive class."""
    return PNEUMONIC if score >= threshold else NOT_PNEUMONIC


@dataclass(frozen=True)
class Diagnosis:
    label: str
    score: float
    threshold: float
    model_fingerprint: str
    image_id: str
    timestamp: str = ""

    def __post_init__(self):
        if self.label != decide_label(self.score, self.threshold):
            raise ValueError(
                f"label {self.label!r} contradicts score {self.score} at threshold {self.threshold}"
            )

    def to_dict(self) -> dict:
        return {
            "id": self.image_id,
            "label": self.label,
            "score": self.score,
            "threshold": self.threshold,
            "model_fingerprint": self.model_fingerprint,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "Diagnosis":
        return cls(
            label=raw["label"],
            score=raw["score"],
            threshold=raw["threshold"],
            model_fingerprint=raw["model_fingerprint"],
            image_id=raw["id"],
            timestamp=raw.get("timestamp", ""),
        )
