"""Core vocabulary: the five discourses, the 30-emotion set, confidence scales.

Everything else in the package speaks in these types. Canonical codes and
orderings are fixed here so that every export is byte-reproducible.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Dict, Iterable, Mapping


class Discourse(enum.Enum):
    """One of the five discourse positions, with its canonical export code."""

    MASTER = "M"
    UNIVERSITY = "U"
    ANALYST = "A"
    HYSTERIC = "H"
    CAPITALIST = "C"

    @property
    def code(self) -> str:
        return self.value

    @property
    def label(self) -> str:
        return self.name.capitalize()

    @classmethod
    def from_code(cls, code: str) -> "Discourse":
        try:
            return cls(code)
        except ValueError:
            raise ValueError(f"unknown discourse code: {code!r}") from None

    @classmethod
    def from_name(cls, name: str) -> "Discourse":
        key = name.strip()
        if len(key) == 1:
            return cls.from_code(key.upper())
        try:
            return cls[key.upper()]
        except KeyError:
            raise ValueError(f"unknown discourse name: {name!r}") from None


DISCOURSES = tuple(sorted(Discourse, key=lambda d: d.code))

# The 27 base emotion labels plus neutral, extended with anguish and anxiety.
# Kept in lexicographic order; this order is the tie-breaker everywhere.
EMOTIONS = (
    "admiration",
    "amusement",
    "anger",
    "anguish",
    "annoyance",
    "anxiety",
    "approval",
    "caring",
    "confusion",
    "curiosity",
    "desire",
    "disappointment",
    "disapproval",
    "disgust",
    "embarrassment",
    "excitement",
    "fear",
    "gratitude",
    "grief",
    "joy",
    "love",
    "nervousness",
    "neutral",
    "optimism",
    "pride",
    "realization",
    "relief",
    "remorse",
    "sadness",
    "surprise",
)

EMOTION_SET = frozenset(EMOTIONS)

assert len(EMOTIONS) == 30 and list(EMOTIONS) == sorted(EMOTIONS)


class ConfidenceLabel4(enum.Enum):
    """Four-level certainty scale used for emotion annotations."""

    DEFINITELY_NOT = "DN"
    PROBABLY_NOT = "PN"
    PROBABLY_YES = "PY"
    DEFINITELY_YES = "DY"

    @classmethod
    def from_code(cls, code: str) -> "ConfidenceLabel4":
        try:
            return cls(code)
        except ValueError:
            raise ValueError(f"unknown confidence label: {code!r}") from None


# Numeric values of the four-level scale; DY's value (3) is also the
# normalization divisor in the fused emotion score.
CONFIDENCE4_VALUES: Dict[ConfidenceLabel4, int] = {
    ConfidenceLabel4.DEFINITELY_NOT: 0,
    ConfidenceLabel4.PROBABLY_NOT: 1,
    ConfidenceLabel4.PROBABLY_YES: 2,
    ConfidenceLabel4.DEFINITELY_YES: 3,
}


def confidence4_to_score(label: ConfidenceLabel4) -> int:
    """Numeric value of a four-level confidence label (DN=0 .. DY=3)."""
    return CONFIDENCE4_VALUES[label]


class ConfidenceLevel3(enum.Enum):
    """Three-level confidence attached to fused discourse outcomes."""

    LOW = "Low"
    MID = "Mid"
    HIGH = "High"

    @property
    def rank(self) -> int:
        return _LEVEL3_RANK[self]

    @classmethod
    def from_label(cls, label: str) -> "ConfidenceLevel3":
        key = label.strip().capitalize()
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown confidence level: {label!r}") from None


_LEVEL3_RANK = {
    ConfidenceLevel3.LOW: 0,
    ConfidenceLevel3.MID: 1,
    ConfidenceLevel3.HIGH: 2,
}

# Default numeric scores for fused discourse confidence. Overridable via
# config; must stay strictly increasing Low < Mid < High within (0, 1].
DEFAULT_CONFIDENCE3_SCORES: Dict[ConfidenceLevel3, float] = {
    ConfidenceLevel3.HIGH: 1.0,
    ConfidenceLevel3.MID: 0.6,
    ConfidenceLevel3.LOW: 0.2,
}


def confidence3_to_score(
    level: ConfidenceLevel3,
    mapping: Mapping[ConfidenceLevel3, float] | None = None,
) -> float:
    """Numeric score of a fused confidence level under the given mapping."""
    scores = DEFAULT_CONFIDENCE3_SCORES if mapping is None else mapping
    lo = scores[ConfidenceLevel3.LOW]
    mid = scores[ConfidenceLevel3.MID]
    hi = scores[ConfidenceLevel3.HIGH]
    if not (0.0 < lo < mid < hi <= 1.0):
        raise ValueError(
            f"confidence mapping must be strictly increasing in (0, 1]: "
            f"Low={lo}, Mid={mid}, High={hi}"
        )
    return scores[level]


@dataclass(frozen=True, order=True)
class SentenceRef:
    """Address of one sentence: (dialogue id, zero-based position)."""

    dialogue_id: str
    sentence_index: int

    def __post_init__(self) -> None:
        if self.sentence_index < 0:
            raise ValueError("sentence_index must be non-negative")


def combo_key(discourses: Iterable[Discourse]) -> str:
    """Canonical key of a discourse combination: sorted codes joined by ','.

    Order-insensitive; two runs over the same set give byte-identical keys.
    """
    codes = sorted({d.code for d in discourses})
    if not codes:
        raise ValueError("empty combination")
    return ",".join(codes)


def emotion_key(emotions: Iterable[str]) -> str:
    """Canonical key of an emotion combination: sorted names joined by ','."""
    names = sorted(set(emotions))
    if not names:
        raise ValueError("empty combination")
    for name in names:
        if name not in EMOTION_SET:
            raise ValueError(f"unknown emotion: {name!r}")
    return ",".join(names)


def manifest() -> Dict[str, object]:
    """Machine-readable name tables for the UI and for file validation."""
    return {
        "discourses": [{"code": d.code, "label": d.label} for d in DISCOURSES],
        "emotions": list(EMOTIONS),
        "discourse_confidence": [lvl.value for lvl in
                                 (ConfidenceLevel3.HIGH, ConfidenceLevel3.MID,
                                  ConfidenceLevel3.LOW)],
        "emotion_confidence": [lbl.value for lbl in ConfidenceLabel4],
        "emotion_confidence_values": {
            lbl.value: val for lbl, val in CONFIDENCE4_VALUES.items()
        },
        "weight": {"min": 0.0, "max": 1.0, "step": 0.1},
        "max_discourses": 4,
    }


def manifest_json() -> str:
    """Manifest serialized with stable key order."""
    return json.dumps(manifest(), indent=2, ensure_ascii=False) + "\n"
