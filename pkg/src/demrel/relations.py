"""Discourse-emotion relation statistics over fused sentence records.

For every (discourse set, emotion set) pair realized by at least one
sentence the table holds four quantities: the conditional probability of
the discourse set given the emotion set (confidence-weighted), the weight
level aggregated from discourse weights, their product (the relation), and
the relation intensity, normalized against the best relation among entries
with the same set sizes.

Set membership is exact: a sentence contributes to a pair only when its
discourse set and emotion set equal the pair's sets. Under this reading
the probabilities in each emotion row sum to 1 by construction.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

from .fuse import CommonUserRecord
from .ingest import (
    FORMAT_VERSION,
    ValidationError,
    atomic_write_text,
    check_envelope,
    load_json,
    stable_dumps,
)
from .vocab import (
    ConfidenceLevel3,
    Discourse,
    SentenceRef,
    combo_key,
    confidence3_to_score,
    emotion_key,
)

log = logging.getLogger(__name__)

WEIGHT_MODES = ("product", "sum")
NORMALIZE_MODES = ("per-class", "global")


@dataclass(frozen=True)
class RelateConfig:
    """Knobs for view construction and table normalization.

    The snapshot of these values travels inside every relations artifact,
    so any number in an output file can be reproduced from the file alone.
    """

    tau: float = 0.33
    max_emotions: int = 3
    max_discourses: int = 5
    weight_mode: str = "product"
    normalize: str = "per-class"
    confidence_scores: Tuple[float, float, float] = (0.2, 0.6, 1.0)  # L, M, H

    def __post_init__(self) -> None:
        if not 0.0 <= self.tau <= 1.0:
            raise ValidationError(f"tau out of range: {self.tau}")
        if self.max_emotions < 1:
            raise ValidationError("max_emotions must be at least 1")
        if not 1 <= self.max_discourses <= 5:
            raise ValidationError("max_discourses must be in 1..5")
        if self.weight_mode not in WEIGHT_MODES:
            raise ValidationError(f"unknown weight_mode: {self.weight_mode!r}")
        if self.normalize not in NORMALIZE_MODES:
            raise ValidationError(f"unknown normalize mode: {self.normalize!r}")
        self.level_scores()  # validates monotonicity

    def level_scores(self) -> Dict[ConfidenceLevel3, float]:
        lo, mid, hi = self.confidence_scores
        mapping = {
            ConfidenceLevel3.LOW: lo,
            ConfidenceLevel3.MID: mid,
            ConfidenceLevel3.HIGH: hi,
        }
        try:
            confidence3_to_score(ConfidenceLevel3.LOW, mapping)
        except ValueError as exc:
            raise ValidationError(str(exc)) from None
        return mapping

    def to_dict(self) -> dict:
        return {
            "tau": self.tau,
            "max_emotions": self.max_emotions,
            "max_discourses": self.max_discourses,
            "weight_mode": self.weight_mode,
            "normalize": self.normalize,
            "confidence_scores": {
                "Low": self.confidence_scores[0],
                "Mid": self.confidence_scores[1],
                "High": self.confidence_scores[2],
            },
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "RelateConfig":
        scores = payload.get("confidence_scores", {})
        return cls(
            tau=float(payload.get("tau", 0.33)),
            max_emotions=int(payload.get("max_emotions", 3)),
            max_discourses=int(payload.get("max_discourses", 5)),
            weight_mode=str(payload.get("weight_mode", "product")),
            normalize=str(payload.get("normalize", "per-class")),
            confidence_scores=(
                float(scores.get("Low", 0.2)),
                float(scores.get("Mid", 0.6)),
                float(scores.get("High", 1.0)),
            ),
        )


@dataclass(frozen=True)
class SentenceView:
    """One sentence reduced to numeric inputs for the relation formulas."""

    sentence: SentenceRef
    discourse_conf: Dict[Discourse, float]
    discourse_weight: Dict[Discourse, float]
    emotion_conf: Dict[str, float]

    @property
    def discourse_set(self) -> FrozenSet[Discourse]:
        return frozenset(self.discourse_conf)

    @property
    def emotion_set(self) -> FrozenSet[str]:
        return frozenset(self.emotion_conf)


def build_views(
    records: Sequence[CommonUserRecord], config: RelateConfig
) -> List[SentenceView]:
    """Turn fused records into views; discarded records are dropped.

    The emotion set keeps scores at or above ``tau``, truncated to the
    ``max_emotions`` strongest (ties broken by name).
    """
    scores = config.level_scores()
    views: List[SentenceView] = []
    for record in records:
        if record.discarded:
            continue
        discourse_conf = {}
        discourse_weight = {}
        for fused in record.discourses:
            assert fused.discourse is not None
            discourse_conf[fused.discourse] = scores[fused.confidence]
            discourse_weight[fused.discourse] = fused.weight
        kept = sorted(
            (
                (emotion, value)
                for emotion, value in record.emotion_scores.items()
                if value >= config.tau
            ),
            key=lambda item: (-item[1], item[0]),
        )[: config.max_emotions]
        views.append(SentenceView(
            sentence=record.sentence,
            discourse_conf=discourse_conf,
            discourse_weight=discourse_weight,
            emotion_conf=dict(sorted(kept)),
        ))
    return views


def _usable(views: Sequence[SentenceView], config: RelateConfig) -> List[SentenceView]:
    """Views that can enter the relation math at all."""
    usable = []
    for view in views:
        if not view.emotion_conf:
            continue
        if len(view.discourse_conf) > config.max_discourses:
            log.warning(
                "%s/%d: %d discourses exceed the configured cap, view skipped",
                view.sentence.dialogue_id, view.sentence.sentence_index,
                len(view.discourse_conf),
            )
            continue
        usable.append(view)
    return usable


def _view_products(view: SentenceView) -> Tuple[float, float]:
    """(product of own discourse confidences, product of emotion confidences)."""
    d_prod = math.prod(view.discourse_conf.values())
    e_prod = math.prod(view.emotion_conf.values())
    return d_prod, e_prod


def conditional_probability(
    discourses: FrozenSet[Discourse],
    emotions: FrozenSet[str],
    views: Sequence[SentenceView],
    config: Optional[RelateConfig] = None,
) -> Optional[float]:
    """Probability of the discourse set given the emotion set.

    Returns None when the emotion set never occurs (empty denominator).
    """
    if not discourses or not emotions:
        raise ValidationError("discourse and emotion sets must be non-empty")
    config = config or RelateConfig()
    numerator = 0.0
    denominator = 0.0
    for view in _usable(views, config):
        if view.emotion_set != emotions:
            continue
        d_prod, e_prod = _view_products(view)
        denominator += d_prod * e_prod
        if view.discourse_set == discourses:
            numerator += d_prod * e_prod
    if denominator == 0.0:
        return None
    return numerator / denominator


def weight_level(
    discourses: FrozenSet[Discourse],
    emotions: FrozenSet[str],
    views: Sequence[SentenceView],
    weight_mode: str = "product",
    config: Optional[RelateConfig] = None,
) -> float:
    """Aggregate discourse weight over sentences matching both sets.

    ``product`` multiplies the per-sentence weight products together;
    ``sum`` adds them. With no matching sentence the level is 0 (the pair
    is unrealized, so there is nothing to weigh).
    """
    if weight_mode not in WEIGHT_MODES:
        raise ValidationError(f"unknown weight_mode: {weight_mode!r}")
    config = config or RelateConfig()
    per_sentence = [
        math.prod(view.discourse_weight.values())
        for view in _usable(views, config)
        if view.discourse_set == discourses and view.emotion_set == emotions
    ]
    if not per_sentence:
        return 0.0
    if weight_mode == "product":
        return math.prod(per_sentence)
    return sum(per_sentence)


def relation(
    discourses: FrozenSet[Discourse],
    emotions: FrozenSet[str],
    views: Sequence[SentenceView],
    config: Optional[RelateConfig] = None,
) -> Optional[float]:
    """Relation of co-occurrence: conditional probability times weight level."""
    config = config or RelateConfig()
    prob = conditional_probability(discourses, emotions, views, config)
    if prob is None:
        return None
    return prob * weight_level(discourses, emotions, views, config.weight_mode,
                               config)


@dataclass(frozen=True)
class RelationEntry:
    emotions: FrozenSet[str]
    discourses: FrozenSet[Discourse]
    prob: float
    weight_level: float
    relation: float
    ri: float
    support: int

    @property
    def emotion_key(self) -> str:
        return emotion_key(self.emotions)

    @property
    def discourse_key(self) -> str:
        return combo_key(self.discourses)

    @property
    def sizes(self) -> Tuple[int, int]:
        return (len(self.discourses), len(self.emotions))


@dataclass
class RelationTable:
    entries: List[RelationEntry] = field(default_factory=list)
    config: RelateConfig = field(default_factory=RelateConfig)

    def emotion_keys(self) -> List[str]:
        seen = []
        for entry in self.entries:
            key = entry.emotion_key
            if key not in seen:
                seen.append(key)
        return seen

    def discourse_keys(self) -> List[str]:
        return sorted({entry.discourse_key for entry in self.entries})

    def lookup(self, emotions, discourses) -> Optional[RelationEntry]:
        emotions = frozenset(emotions)
        discourses = frozenset(discourses)
        for entry in self.entries:
            if entry.emotions == emotions and entry.discourses == discourses:
                return entry
        return None


def relation_table(
    views: Sequence[SentenceView], config: Optional[RelateConfig] = None
) -> RelationTable:
    """Compute all four quantities for every realized set pair.

    Pairs are exactly the (discourse set, emotion set) combinations seen in
    the views, never a powerset. The relation intensity divides by the
    best relation among entries with the same (set sizes) class, or by the
    global best under ``normalize="global"``.
    """
    config = config or RelateConfig()
    usable = _usable(views, config)

    groups: Dict[Tuple[FrozenSet[Discourse], FrozenSet[str]], List[SentenceView]] = {}
    denominators: Dict[FrozenSet[str], float] = {}
    for view in usable:
        key = (view.discourse_set, view.emotion_set)
        groups.setdefault(key, []).append(view)
        d_prod, e_prod = _view_products(view)
        denominators[view.emotion_set] = (
            denominators.get(view.emotion_set, 0.0) + d_prod * e_prod
        )

    raw: List[Tuple[FrozenSet[str], FrozenSet[Discourse], float, float, int]] = []
    for (discourses, emotions), members in groups.items():
        numerator = 0.0
        per_sentence_weights = []
        for view in members:
            d_prod, e_prod = _view_products(view)
            numerator += d_prod * e_prod
            per_sentence_weights.append(math.prod(view.discourse_weight.values()))
        prob = numerator / denominators[emotions]
        if config.weight_mode == "product":
            level = math.prod(per_sentence_weights)
        else:
            level = sum(per_sentence_weights)
        raw.append((emotions, discourses, prob, level, len(members)))

    raw.sort(key=lambda item: (
        len(item[0]), len(item[1]), emotion_key(item[0]), combo_key(item[1]),
    ))

    maxima: Dict[Tuple[int, int], float] = {}
    for emotions, discourses, prob, level, _ in raw:
        klass = (len(discourses), len(emotions))
        if config.normalize == "global":
            klass = (0, 0)
        value = prob * level
        maxima[klass] = max(maxima.get(klass, 0.0), value)

    entries: List[RelationEntry] = []
    warned = set()
    for emotions, discourses, prob, level, support in raw:
        klass = (len(discourses), len(emotions))
        if config.normalize == "global":
            klass = (0, 0)
        rel = prob * level
        class_max = maxima[klass]
        if class_max > 0.0:
            ri = rel / class_max
        else:
            ri = 0.0
            if klass not in warned:
                log.warning("all relations are zero in size class %s; "
                            "relation intensity set to 0", klass)
                warned.add(klass)
        entries.append(RelationEntry(
            emotions=emotions,
            discourses=discourses,
            prob=prob,
            weight_level=level,
            relation=rel,
            ri=ri,
            support=support,
        ))
    return RelationTable(entries=entries, config=config)


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------


def table_to_dict(table: RelationTable) -> dict:
    return {
        "version": FORMAT_VERSION,
        "kind": "relations",
        "config": table.config.to_dict(),
        "entries": [
            {
                "emotions": sorted(entry.emotions),
                "discourses": sorted(d.code for d in entry.discourses),
                "prob": entry.prob,
                "weight_level": entry.weight_level,
                "relation": entry.relation,
                "ri": entry.ri,
                "support": entry.support,
            }
            for entry in table.entries
        ],
    }


def table_from_dict(payload: dict, source: str = "<memory>") -> RelationTable:
    check_envelope(payload, "relations", source)
    config = RelateConfig.from_dict(payload.get("config", {}))
    entries = []
    for item in payload.get("entries", []):
        entries.append(RelationEntry(
            emotions=frozenset(item["emotions"]),
            discourses=frozenset(Discourse.from_code(c) for c in item["discourses"]),
            prob=float(item["prob"]),
            weight_level=float(item["weight_level"]),
            relation=float(item["relation"]),
            ri=float(item["ri"]),
            support=int(item["support"]),
        ))
    return RelationTable(entries=entries, config=config)


def save_table(table: RelationTable, path: Union[str, Path]) -> None:
    atomic_write_text(path, stable_dumps(table_to_dict(table)))


def load_table(path: Union[str, Path]) -> RelationTable:
    return table_from_dict(load_json(path), source=str(path))
