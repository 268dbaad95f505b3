"""Fusing three voters' ballots into the "common user" vote.

Discourse fusion is frequency-driven: unanimity gives High confidence,
a two-voter majority gives Mid, a single mention is dropped. The weight
starts at 1.0 and loses 0.2 for every distinct single-mention discourse
that shares a ballot with the winner. Two or more empty ballots collapse
the sentence to the "none" sentinel. Emotion fusion averages the numeric
four-level labels and rescales into [0, 1].
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .ingest import (
    Corpus,
    FORMAT_VERSION,
    ValidationError,
    VoterBallot,
    atomic_write_text,
    check_envelope,
    load_json,
    stable_dumps,
)
from .vocab import (
    CONFIDENCE4_VALUES,
    ConfidenceLevel3,
    Discourse,
    EMOTIONS,
    SentenceRef,
)

log = logging.getLogger(__name__)

VOTERS_PER_SENTENCE = 3
WEIGHT_DECREMENT_TENTHS = 2  # 0.2 per stray single-mention co-occurrence


@dataclass(frozen=True)
class FusedDiscourse:
    """One fused outcome; ``discourse`` is None for the "none" sentinel."""

    discourse: Optional[Discourse]
    confidence: ConfidenceLevel3
    weight: float

    @property
    def is_none(self) -> bool:
        return self.discourse is None

    @property
    def code(self) -> str:
        return "none" if self.discourse is None else self.discourse.code


NONE_SENTINEL = FusedDiscourse(None, ConfidenceLevel3.LOW, 0.0)


@dataclass(frozen=True)
class CommonUserRecord:
    sentence: SentenceRef
    discourses: Tuple[FusedDiscourse, ...]
    emotion_scores: Dict[str, float]

    @property
    def discarded(self) -> bool:
        """True when no usable discourse came out of fusion."""
        return not self.discourses or any(d.is_none for d in self.discourses)

    def __post_init__(self) -> None:
        if any(d.is_none for d in self.discourses) and len(self.discourses) != 1:
            raise ValidationError("the none sentinel must stand alone")
        missing = [e for e in EMOTIONS if e not in self.emotion_scores]
        if missing:
            raise ValidationError(f"emotion scores missing for: {missing[:3]}...")


def _check_triplet(ballots: Sequence[VoterBallot]) -> None:
    if len(ballots) != VOTERS_PER_SENTENCE:
        raise ValidationError("exactly three voters required")
    sentences = {b.sentence for b in ballots}
    if len(sentences) != 1:
        raise ValidationError("ballots must reference the same sentence")
    voters = {b.voter_id for b in ballots}
    if len(voters) != VOTERS_PER_SENTENCE:
        raise ValidationError("ballots must come from distinct voters")


def fuse_discourses(ballots: Sequence[VoterBallot]) -> List[FusedDiscourse]:
    """Derive the common user's discourse set from exactly three ballots."""
    _check_triplet(ballots)

    votes = [b.discourses for b in ballots]
    empty_count = sum(1 for v in votes if not v)
    if empty_count >= 2:
        return [NONE_SENTINEL]

    frequency: Dict[Discourse, int] = {}
    for vote in votes:
        for d in vote:
            frequency[d] = frequency.get(d, 0) + 1

    fused: List[FusedDiscourse] = []
    for d, count in frequency.items():
        if count < 2:
            continue
        confidence = ConfidenceLevel3.HIGH if count == 3 else ConfidenceLevel3.MID
        strays = {
            other
            for vote in votes
            if d in vote
            for other in vote
            if other is not d and frequency[other] == 1
        }
        tenths = max(0, 10 - WEIGHT_DECREMENT_TENTHS * len(strays))
        fused.append(FusedDiscourse(d, confidence, tenths / 10))

    fused.sort(key=lambda f: (-f.confidence.rank, -f.weight, f.code))
    return fused


def fuse_emotions(ballots: Sequence[VoterBallot]) -> Dict[str, float]:
    """Average the three voters' four-level labels into scores in [0, 1].

    An emotion a voter did not mention counts as Definitely Not (0).
    """
    _check_triplet(ballots)
    totals = {emotion: 0 for emotion in EMOTIONS}
    for ballot in ballots:
        for entry in ballot.emotion_entries:
            totals[entry.emotion] += CONFIDENCE4_VALUES[entry.confidence]
    divisor = VOTERS_PER_SENTENCE * 3  # three voters, top label value 3
    return {emotion: totals[emotion] / divisor for emotion in EMOTIONS}


def fuse_sentence(ballots: Sequence[VoterBallot]) -> CommonUserRecord:
    return CommonUserRecord(
        sentence=ballots[0].sentence,
        discourses=tuple(fuse_discourses(ballots)),
        emotion_scores=fuse_emotions(ballots),
    )


def fuse_corpus(
    corpus: Corpus, ballots: Sequence[VoterBallot]
) -> List[CommonUserRecord]:
    """Fuse every fully annotated sentence; partially annotated ones are
    skipped with a warning. Records with no usable discourse stay in the
    output flagged as discarded."""
    by_sentence: Dict[SentenceRef, List[VoterBallot]] = {}
    for ballot in ballots:
        corpus.resolve(ballot.sentence)  # raises on unknown reference
        by_sentence.setdefault(ballot.sentence, []).append(ballot)

    records: List[CommonUserRecord] = []
    for ref in corpus.all_refs():
        group = by_sentence.get(ref)
        if group is None:
            continue
        if len(group) < VOTERS_PER_SENTENCE:
            log.warning(
                "%s/%d: %d of %d ballots, sentence skipped",
                ref.dialogue_id, ref.sentence_index, len(group),
                VOTERS_PER_SENTENCE,
            )
            continue
        records.append(fuse_sentence(group))
    return records


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------


def _fused_discourse_to_dict(f: FusedDiscourse) -> dict:
    return {"d": f.code, "conf": f.confidence.value, "w": f.weight}


def _fused_discourse_from_dict(item: dict, source: str) -> FusedDiscourse:
    code = item.get("d")
    if code == "none":
        discourse = None
    else:
        try:
            discourse = Discourse.from_code(str(code))
        except ValueError as exc:
            raise ValidationError(f"{source}: {exc}") from None
    confidence = ConfidenceLevel3.from_label(str(item.get("conf")))
    weight = float(item.get("w", 0.0))
    return FusedDiscourse(discourse, confidence, weight)


def fused_to_dict(records: Sequence[CommonUserRecord]) -> dict:
    payload_records = []
    for record in records:
        payload_records.append({
            "dialogue": record.sentence.dialogue_id,
            "sentence": record.sentence.sentence_index,
            "discarded": record.discarded,
            "discourses": [_fused_discourse_to_dict(f) for f in record.discourses],
            "emotions": {
                e: record.emotion_scores[e]
                for e in EMOTIONS
                if record.emotion_scores[e] != 0.0
            },
        })
    return {
        "version": FORMAT_VERSION,
        "kind": "fused",
        "fusion": {
            "voters": VOTERS_PER_SENTENCE,
            "weight_decrement": WEIGHT_DECREMENT_TENTHS / 10,
        },
        "records": payload_records,
    }


def fused_from_dict(payload: dict, source: str = "<memory>") -> List[CommonUserRecord]:
    check_envelope(payload, "fused", source)
    records = []
    for item in payload.get("records", []):
        scores = {emotion: 0.0 for emotion in EMOTIONS}
        for emotion, value in item.get("emotions", {}).items():
            if emotion not in scores:
                raise ValidationError(f"{source}: unknown emotion: {emotion!r}")
            scores[emotion] = float(value)
        records.append(CommonUserRecord(
            sentence=SentenceRef(item["dialogue"], item["sentence"]),
            discourses=tuple(
                _fused_discourse_from_dict(f, source)
                for f in item.get("discourses", [])
            ),
            emotion_scores=scores,
        ))
    return records


def save_fused(
    records: Sequence[CommonUserRecord], path: Union[str, Path]
) -> None:
    atomic_write_text(path, stable_dumps(fused_to_dict(records)))


def load_fused(path: Union[str, Path]) -> List[CommonUserRecord]:
    return fused_from_dict(load_json(path), source=str(path))
