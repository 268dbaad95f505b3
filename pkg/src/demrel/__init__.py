"""Toolkit for multi-voter discourse/emotion annotation of dialogues,
common-user vote fusion, and discourse-emotion relation statistics."""

from .vocab import (
    ConfidenceLabel4,
    ConfidenceLevel3,
    Discourse,
    DISCOURSES,
    EMOTIONS,
    SentenceRef,
    combo_key,
    confidence3_to_score,
    confidence4_to_score,
    emotion_key,
    manifest,
)
from .ingest import (
    Corpus,
    Dialogue,
    DiscourseEntry,
    EmotionEntry,
    ValidationError,
    VoterBallot,
    load_ballots,
    load_corpus,
    parse_ballots,
    parse_dailydialog,
    save_ballots,
    save_corpus,
)
from .fuse import (
    CommonUserRecord,
    FusedDiscourse,
    NONE_SENTINEL,
    fuse_corpus,
    fuse_discourses,
    fuse_emotions,
    fuse_sentence,
    load_fused,
    save_fused,
)
from .relations import (
    RelateConfig,
    RelationEntry,
    RelationTable,
    SentenceView,
    build_views,
    conditional_probability,
    load_table,
    relation,
    relation_table,
    save_table,
    weight_level,
)

__version__ = "0.1.0"

__all__ = [
    "CommonUserRecord",
    "ConfidenceLabel4",
    "ConfidenceLevel3",
    "Corpus",
    "DISCOURSES",
    "Dialogue",
    "Discourse",
    "DiscourseEntry",
    "EMOTIONS",
    "EmotionEntry",
    "FusedDiscourse",
    "NONE_SENTINEL",
    "RelateConfig",
    "RelationEntry",
    "RelationTable",
    "SentenceRef",
    "SentenceView",
    "ValidationError",
    "VoterBallot",
    "build_views",
    "combo_key",
    "conditional_probability",
    "confidence3_to_score",
    "confidence4_to_score",
    "emotion_key",
    "fuse_corpus",
    "fuse_discourses",
    "fuse_emotions",
    "fuse_sentence",
    "load_ballots",
    "load_corpus",
    "load_fused",
    "load_table",
    "manifest",
    "parse_ballots",
    "parse_dailydialog",
    "relation",
    "relation_table",
    "save_ballots",
    "save_corpus",
    "save_fused",
    "save_table",
    "weight_level",
]
