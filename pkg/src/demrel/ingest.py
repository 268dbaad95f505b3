"""Corpus and ballot ingestion: parsing, validation, round-trip persistence.

Dialogue lines use the ``__eou__`` utterance separator. Ballots travel as
JSON-lines, one record per (voter, sentence); the same validator backs both
file ingestion and the annotation service.
"""
from __future__ import annotations

import io
import json
import logging
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .vocab import (
    ConfidenceLabel4,
    ConfidenceLevel3,
    Discourse,
    EMOTION_SET,
    SentenceRef,
)

log = logging.getLogger(__name__)

UTTERANCE_SEPARATOR = "__eou__"
MAX_DISCOURSES_PER_BALLOT = 4

FORMAT_VERSION = 1


class ValidationError(ValueError):
    """Raised when an input file or record violates the data model."""


@dataclass(frozen=True)
class Dialogue:
    dialogue_id: str
    sentences: Tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.sentences:
            raise ValidationError(f"dialogue {self.dialogue_id!r} has no sentences")
        for text in self.sentences:
            if not text or text != text.strip():
                raise ValidationError(
                    f"dialogue {self.dialogue_id!r}: sentences must be trimmed "
                    f"and non-empty"
                )


@dataclass
class Corpus:
    dialogues: Dict[str, Dialogue] = field(default_factory=dict)
    source: str = ""
    format: str = ""

    def sentence_count(self) -> int:
        return sum(len(d.sentences) for d in self.dialogues.values())

    def resolve(self, ref: SentenceRef) -> str:
        dialogue = self.dialogues.get(ref.dialogue_id)
        if dialogue is None:
            raise ValidationError(f"unknown dialogue: {ref.dialogue_id!r}")
        if ref.sentence_index >= len(dialogue.sentences):
            raise ValidationError(
                f"sentence index {ref.sentence_index} out of range for "
                f"dialogue {ref.dialogue_id!r} ({len(dialogue.sentences)} sentences)"
            )
        return dialogue.sentences[ref.sentence_index]

    def all_refs(self) -> List[SentenceRef]:
        refs = []
        for did in sorted(self.dialogues):
            for idx in range(len(self.dialogues[did].sentences)):
                refs.append(SentenceRef(did, idx))
        return refs


# Raw voter confidence on a discourse: a Low/Mid/High label or a number in
# [0, 1]. Preserved verbatim; vote fusion ignores it.
RawConfidence = Union[ConfidenceLevel3, float]


@dataclass(frozen=True)
class DiscourseEntry:
    discourse: Discourse
    confidence: RawConfidence
    weight: Optional[float]


@dataclass(frozen=True)
class EmotionEntry:
    emotion: str
    confidence: ConfidenceLabel4


@dataclass(frozen=True)
class VoterBallot:
    voter_id: str
    sentence: SentenceRef
    discourse_entries: Tuple[DiscourseEntry, ...]
    emotion_entries: Tuple[EmotionEntry, ...]

    @property
    def discourses(self) -> frozenset:
        return frozenset(e.discourse for e in self.discourse_entries)

    @property
    def is_empty(self) -> bool:
        """True when the voter assigned no discourse at all ("none")."""
        return not self.discourse_entries


def _parse_raw_confidence(value: object, where: str) -> RawConfidence:
    if isinstance(value, str):
        return ConfidenceLevel3.from_label(value)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{where}: confidence must be a label or a number")
    conf = float(value)
    if not 0.0 <= conf <= 1.0:
        raise ValidationError(f"{where}: confidence out of range: {conf}")
    return conf


def ballot_from_dict(record: dict, where: str = "ballot") -> VoterBallot:
    """Validate and canonicalize one ballot record.

    This is the single validation path: file ingestion and the annotation
    service both funnel through it. Entries come out sorted by discourse
    code / emotion name so serialized ballots are byte-stable.
    """
    if not isinstance(record, dict):
        raise ValidationError(f"{where}: record must be an object")
    voter = record.get("voter")
    if not isinstance(voter, str) or not voter.strip():
        raise ValidationError(f"{where}: field 'voter' must be a non-empty string")
    dialogue = record.get("dialogue")
    if not isinstance(dialogue, str) or not dialogue:
        raise ValidationError(f"{where}: field 'dialogue' must be a non-empty string")
    sentence = record.get("sentence")
    if isinstance(sentence, bool) or not isinstance(sentence, int) or sentence < 0:
        raise ValidationError(
            f"{where}: field 'sentence' must be a non-negative integer"
        )

    raw_discourses = record.get("discourses", [])
    if not isinstance(raw_discourses, list):
        raise ValidationError(f"{where}: field 'discourses' must be a list")
    if len(raw_discourses) > MAX_DISCOURSES_PER_BALLOT:
        raise ValidationError(
            f"{where}: max {MAX_DISCOURSES_PER_BALLOT} discourses per ballot"
        )
    discourse_entries: List[DiscourseEntry] = []
    seen_d = set()
    for i, item in enumerate(raw_discourses):
        slot = f"{where}: discourses[{i}]"
        if not isinstance(item, dict):
            raise ValidationError(f"{slot}: entry must be an object")
        try:
            discourse = Discourse.from_code(str(item.get("d")))
        except ValueError as exc:
            raise ValidationError(f"{slot}: {exc}") from None
        if discourse in seen_d:
            raise ValidationError(f"{slot}: duplicate discourse {discourse.code}")
        seen_d.add(discourse)
        confidence = _parse_raw_confidence(item.get("conf"), slot)
        weight = item.get("w")
        if weight is not None:
            if isinstance(weight, bool) or not isinstance(weight, (int, float)):
                raise ValidationError(f"{slot}: weight must be a number or null")
            weight = float(weight)
            if not 0.0 <= weight <= 1.0:
                raise ValidationError(f"{slot}: weight out of range: {weight}")
        discourse_entries.append(DiscourseEntry(discourse, confidence, weight))

    raw_emotions = record.get("emotions", [])
    if not isinstance(raw_emotions, list):
        raise ValidationError(f"{where}: field 'emotions' must be a list")
    emotion_entries: List[EmotionEntry] = []
    seen_e = set()
    for i, item in enumerate(raw_emotions):
        slot = f"{where}: emotions[{i}]"
        if not isinstance(item, dict):
            raise ValidationError(f"{slot}: entry must be an object")
        emotion = item.get("e")
        if emotion not in EMOTION_SET:
            raise ValidationError(f"{slot}: unknown emotion: {emotion!r}")
        if emotion in seen_e:
            raise ValidationError(f"{slot}: duplicate emotion {emotion!r}")
        seen_e.add(emotion)
        try:
            conf = ConfidenceLabel4.from_code(str(item.get("conf")))
        except ValueError as exc:
            raise ValidationError(f"{slot}: {exc}") from None
        emotion_entries.append(EmotionEntry(emotion, conf))

    discourse_entries.sort(key=lambda e: e.discourse.code)
    emotion_entries.sort(key=lambda e: e.emotion)
    return VoterBallot(
        voter_id=voter,
        sentence=SentenceRef(dialogue, sentence),
        discourse_entries=tuple(discourse_entries),
        emotion_entries=tuple(emotion_entries),
    )


def ballot_to_dict(ballot: VoterBallot) -> dict:
    discourses = []
    for entry in ballot.discourse_entries:
        conf: object
        if isinstance(entry.confidence, ConfidenceLevel3):
            conf = entry.confidence.value
        else:
            conf = entry.confidence
        discourses.append({"d": entry.discourse.code, "conf": conf, "w": entry.weight})
    emotions = [
        {"e": entry.emotion, "conf": entry.confidence.value}
        for entry in ballot.emotion_entries
    ]
    return {
        "voter": ballot.voter_id,
        "dialogue": ballot.sentence.dialogue_id,
        "sentence": ballot.sentence.sentence_index,
        "discourses": discourses,
        "emotions": emotions,
    }


def ballot_line(ballot: VoterBallot) -> str:
    """Canonical single-line JSON encoding of a ballot."""
    return json.dumps(ballot_to_dict(ballot), ensure_ascii=False)


def parse_dailydialog(
    stream: Union[io.TextIOBase, Iterable[str]],
    dialogue_ids: Optional[Sequence[str]] = None,
    source: str = "<stream>",
) -> Corpus:
    """Parse dialogue-per-line text, utterances separated by ``__eou__``.

    Lines without any non-empty utterance are skipped with a warning. When
    ``dialogue_ids`` is given it must supply one id per non-blank line;
    otherwise ids are ``line-<k>`` with k the 1-based source line number.
    """
    corpus = Corpus(source=source, format="dailydialog")
    used_ids = 0
    saw_any_line = False
    for lineno, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        saw_any_line = True
        utterances = [u.strip() for u in line.split(UTTERANCE_SEPARATOR)]
        utterances = [u for u in utterances if u]
        if not utterances:
            log.warning("%s:%d: no utterances, line skipped", source, lineno)
            continue
        if dialogue_ids is not None:
            if used_ids >= len(dialogue_ids):
                raise ValidationError(
                    f"{source}: id sidecar has fewer entries than dialogue lines"
                )
            dialogue_id = dialogue_ids[used_ids]
            used_ids += 1
        else:
            dialogue_id = f"line-{lineno}"
        if dialogue_id in corpus.dialogues:
            raise ValidationError(f"{source}:{lineno}: duplicate dialogue id "
                                  f"{dialogue_id!r}")
        corpus.dialogues[dialogue_id] = Dialogue(dialogue_id, tuple(utterances))
    if not saw_any_line:
        raise ValidationError(f"{source}: empty file")
    if not corpus.dialogues:
        raise ValidationError(f"{source}: no dialogues found")
    return corpus


def parse_ballots(
    stream: Union[io.TextIOBase, Iterable[str]],
    source: str = "<stream>",
) -> List[VoterBallot]:
    """Parse a JSONL ballot file; later duplicates of (voter, sentence) win."""
    effective: Dict[Tuple[str, SentenceRef], VoterBallot] = {}
    order: List[Tuple[str, SentenceRef]] = []
    for lineno, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        where = f"{source}:{lineno}"
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{where}: invalid JSON: {exc.msg}") from None
        ballot = ballot_from_dict(record, where=where)
        key = (ballot.voter_id, ballot.sentence)
        if key in effective:
            log.warning("%s: duplicate ballot for voter=%s %s, last record wins",
                        where, ballot.voter_id, ballot.sentence)
        else:
            order.append(key)
        effective[key] = ballot
    return [effective[key] for key in order]


# ---------------------------------------------------------------------------
# Persistence helpers shared by every artifact writer
# ---------------------------------------------------------------------------


def stable_dumps(obj: object) -> str:
    """Deterministic pretty JSON; key order is construction order."""
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def atomic_write_text(path: Union[str, Path], text: str) -> None:
    """Write via a temp file + rename so partial outputs never land."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def check_envelope(payload: dict, kind: str, source: str) -> None:
    if not isinstance(payload, dict):
        raise ValidationError(f"{source}: expected a JSON object")
    version = payload.get("version")
    if version != FORMAT_VERSION:
        raise ValidationError(
            f"{source}: version tag mismatch: expected {FORMAT_VERSION}, "
            f"got {version!r}"
        )
    if payload.get("kind") != kind:
        raise ValidationError(
            f"{source}: expected kind {kind!r}, got {payload.get('kind')!r}"
        )


def load_json(path: Union[str, Path]) -> dict:
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(
            f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}"
        ) from None
    return payload


def corpus_to_dict(corpus: Corpus) -> dict:
    return {
        "version": FORMAT_VERSION,
        "kind": "corpus",
        "provenance": {"source": corpus.source, "format": corpus.format},
        "dialogues": [
            {"id": did, "sentences": list(corpus.dialogues[did].sentences)}
            for did in sorted(corpus.dialogues)
        ],
    }


def corpus_from_dict(payload: dict, source: str = "<memory>") -> Corpus:
    check_envelope(payload, "corpus", source)
    provenance = payload.get("provenance", {})
    corpus = Corpus(
        source=str(provenance.get("source", "")),
        format=str(provenance.get("format", "")),
    )
    for item in payload.get("dialogues", []):
        did = item["id"]
        if did in corpus.dialogues:
            raise ValidationError(f"{source}: duplicate dialogue id {did!r}")
        corpus.dialogues[did] = Dialogue(did, tuple(item["sentences"]))
    return corpus


def save_corpus(corpus: Corpus, path: Union[str, Path]) -> None:
    atomic_write_text(path, stable_dumps(corpus_to_dict(corpus)))


def load_corpus(path: Union[str, Path]) -> Corpus:
    return corpus_from_dict(load_json(path), source=str(path))


def save_ballots(ballots: Sequence[VoterBallot], path: Union[str, Path]) -> None:
    lines = [ballot_line(b) for b in ballots]
    atomic_write_text(path, "\n".join(lines) + ("\n" if lines else ""))


def load_ballots(path: Union[str, Path]) -> List[VoterBallot]:
    path = Path(path)
    with path.open("r", encoding="utf-8") as handle:
        return parse_ballots(handle, source=str(path))
