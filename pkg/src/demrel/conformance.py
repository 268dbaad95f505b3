"""Conformance checks against the shipped reference vectors.

Three suites: the 29 fusion-rule vectors (checked as stated and under
voter permutations / discourse relabelings), the fully annotated reference
dialogue, and the numeric worked example for the relation quantities.
"""
from __future__ import annotations

import json
import math
from importlib import resources
from itertools import permutations
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .fuse import FusedDiscourse, fuse_discourses
from .ingest import DiscourseEntry, VoterBallot
from .relations import (
    RelateConfig,
    SentenceView,
    conditional_probability,
    relation_table,
    weight_level,
)
from .vocab import ConfidenceLevel3, Discourse, SentenceRef

# Any injective assignment works; fusion is equivariant under relabeling.
DEFAULT_LABELING = {
    "d1": Discourse.MASTER,
    "d2": Discourse.UNIVERSITY,
    "d3": Discourse.ANALYST,
    "d4": Discourse.HYSTERIC,
}

NUMERIC_TOLERANCE = 1e-12


def _load_data(name: str) -> dict:
    text = resources.files("demrel.data").joinpath(name).read_text("utf-8")
    return json.loads(text)


def load_fusion_rules() -> List[dict]:
    return _load_data("fusion_rules.json")["rules"]


def load_reference_dialogue() -> dict:
    return _load_data("reference_dialogue.json")


def _ballot(
    voter_id: str,
    sentence: SentenceRef,
    discourses: Sequence[Discourse],
) -> VoterBallot:
    entries = tuple(
        DiscourseEntry(d, ConfidenceLevel3.HIGH, None)
        for d in sorted(discourses, key=lambda d: d.code)
    )
    return VoterBallot(voter_id, sentence, entries, ())


def instantiate_rule(
    rule: dict,
    labeling: Optional[Dict[str, Discourse]] = None,
    voter_order: Sequence[int] = (0, 1, 2),
) -> List[VoterBallot]:
    """Concrete ballots for one abstract rule vector."""
    labeling = labeling or DEFAULT_LABELING
    ref = SentenceRef("rule", 0)
    ballots = []
    for position, source in enumerate(voter_order):
        labels = rule["voters"][source]
        ballots.append(_ballot(f"voter{position + 1}", ref,
                               [labeling[l] for l in labels]))
    return ballots


def expected_outcome(
    rule: dict, labeling: Optional[Dict[str, Discourse]] = None
) -> FrozenSet[Tuple[str, str, float]]:
    labeling = labeling or DEFAULT_LABELING
    outcome = set()
    for label, confidence, weight in rule["outcome"]:
        code = "none" if label == "none" else labeling[label].code
        outcome.add((code, confidence, float(weight)))
    return frozenset(outcome)


def outcome_set(fused: Sequence[FusedDiscourse]) -> FrozenSet[Tuple[str, str, float]]:
    return frozenset((f.code, f.confidence.value, f.weight) for f in fused)


def check_rule(
    rule: dict,
    labeling: Optional[Dict[str, Discourse]] = None,
    voter_order: Sequence[int] = (0, 1, 2),
) -> bool:
    ballots = instantiate_rule(rule, labeling, voter_order)
    return outcome_set(fuse_discourses(ballots)) == expected_outcome(rule, labeling)


def canonical_shape(vote_sets: Sequence[FrozenSet[str]]) -> tuple:
    """Order- and label-independent fingerprint of a ballot triple."""
    labels = sorted({label for votes in vote_sets for label in votes})
    best = None
    for perm in permutations(range(len(labels))):
        mapping = dict(zip(labels, perm))
        rep = tuple(sorted(
            tuple(sorted(mapping[label] for label in votes))
            for votes in vote_sets
        ))
        if best is None or rep < best:
            best = rep
    return best


def match_rule_ids(ballots: Sequence[VoterBallot]) -> List[int]:
    """Ids of the reference rules matching these ballots' shape."""
    shape = canonical_shape([
        frozenset(d.code for d in b.discourses) for b in ballots
    ])
    matches = []
    for rule in load_fusion_rules():
        rule_shape = canonical_shape([frozenset(v) for v in rule["voters"]])
        if rule_shape == shape:
            matches.append(rule["id"])
    return matches


def check_all_rules() -> dict:
    failures = []
    rules = load_fusion_rules()
    for rule in rules:
        if not check_rule(rule):
            failures.append(rule["id"])
    return {"total": len(rules), "passed": len(rules) - len(failures),
            "failures": failures}


def reference_ballots(entry: dict, dialogue_id: str) -> List[VoterBallot]:
    ref = SentenceRef(dialogue_id, entry["sentence"])
    ballots = []
    for voter_id, rows in entry["voters"].items():
        entries = []
        for code, confidence, weight in rows:
            entries.append(DiscourseEntry(
                Discourse.from_code(code),
                ConfidenceLevel3.from_label(confidence),
                None if weight is None else float(weight),
            ))
        entries.sort(key=lambda e: e.discourse.code)
        ballots.append(VoterBallot(voter_id, ref, tuple(entries), ()))
    return ballots


def check_reference_dialogue() -> dict:
    data = load_reference_dialogue()
    failures = []
    for entry in data["ballots"]:
        ballots = reference_ballots(entry, data["dialogue_id"])
        fused = fuse_discourses(ballots)
        expected = frozenset(
            (code, confidence, float(weight))
            for code, confidence, weight in entry["expected"]["outcome"]
        )
        ok = outcome_set(fused) == expected
        if ok and entry["expected"]["rule"] not in match_rule_ids(ballots):
            ok = False
        if not ok:
            failures.append(entry["sentence"])
    total = len(data["ballots"])
    return {"total": total, "passed": total - len(failures), "failures": failures}


# The four-sentence worked example: a single discourse-emotion pair with
# these (discourse confidence, emotion confidence, discourse weight) rows.
NUMERIC_EXAMPLE_ROWS = (
    (0.2, 0.4, 1.0),
    (0.3, 0.2, 0.8),
    (0.3, 0.3, 0.7),
    (0.2, 0.2, 0.4),
)


def numeric_example_views() -> List[SentenceView]:
    views = []
    for index, (conf_d, conf_e, weight) in enumerate(NUMERIC_EXAMPLE_ROWS):
        views.append(SentenceView(
            sentence=SentenceRef("numeric-example", index),
            discourse_conf={Discourse.MASTER: conf_d},
            discourse_weight={Discourse.MASTER: weight},
            emotion_conf={"joy": conf_e},
        ))
    return views


def check_numeric_example() -> dict:
    views = numeric_example_views()
    discourses = frozenset({Discourse.MASTER})
    emotions = frozenset({"joy"})
    config = RelateConfig(tau=0.0)

    prob = conditional_probability(discourses, emotions, views, config)
    level = weight_level(discourses, emotions, views, "product", config)
    level_sum = weight_level(discourses, emotions, views, "sum", config)
    table = relation_table(views, config)
    entry = table.lookup(emotions, discourses)

    expected_level = math.prod(w for _, _, w in NUMERIC_EXAMPLE_ROWS)
    checks = {
        "prob": prob == 1.0,
        "weight_level": abs(level - 0.224) <= NUMERIC_TOLERANCE,
        "weight_level_sum": abs(level_sum - 2.9) <= NUMERIC_TOLERANCE,
        "relation": entry is not None
        and abs(entry.relation - 0.224) <= NUMERIC_TOLERANCE,
        "ri": entry is not None and entry.ri == 1.0,
    }
    return {
        "ok": all(checks.values()),
        "checks": checks,
        "values": {
            "prob": prob,
            "weight_level": level,
            "weight_level_sum": level_sum,
            "relation": None if entry is None else entry.relation,
            "ri": None if entry is None else entry.ri,
            "expected_weight_level": expected_level,
        },
    }


def run_all() -> dict:
    rules = check_all_rules()
    dialogue = check_reference_dialogue()
    numeric = check_numeric_example()
    return {
        "rules": rules,
        "dialogue": dialogue,
        "numeric_example": numeric,
        "ok": not rules["failures"] and not dialogue["failures"] and numeric["ok"],
    }
