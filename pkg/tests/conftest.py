import random

import pytest

from demrel import (
    CommonUserRecord,
    ConfidenceLabel4,
    ConfidenceLevel3,
    DISCOURSES,
    DiscourseEntry,
    EMOTIONS,
    EmotionEntry,
    FusedDiscourse,
    SentenceRef,
    VoterBallot,
)

# A small emotion pool keeps the brute-force oracle's subset enumeration
# cheap while still exercising sets of every allowed size.
EMOTION_POOL = ("anguish", "anxiety", "curiosity", "joy", "neutral", "sadness")


def make_ballot(voter_id, ref, discourses, emotions=()):
    """Ballot with arbitrary per-voter confidences (fusion ignores them)."""
    d_entries = tuple(
        DiscourseEntry(d, ConfidenceLevel3.HIGH, None)
        for d in sorted(discourses, key=lambda d: d.code)
    )
    e_entries = tuple(
        EmotionEntry(name, label)
        for name, label in sorted(emotions, key=lambda item: item[0])
    )
    return VoterBallot(voter_id, ref, d_entries, e_entries)


def random_vote_sets(rng, allow_empty=True):
    """Three random discourse subsets, at most four discourses each."""
    votes = []
    for _ in range(3):
        low = 0 if allow_empty else 1
        size = rng.randint(low, 4)
        votes.append(frozenset(rng.sample(DISCOURSES, size)))
    return votes


def random_emotion_ballots(rng, ref=SentenceRef("dlg", 0)):
    labels = list(ConfidenceLabel4)
    ballots = []
    for v in range(3):
        mentioned = rng.sample(EMOTIONS, rng.randint(0, 6))
        entries = [(name, rng.choice(labels)) for name in mentioned]
        ballots.append(make_ballot(f"voter{v + 1}", ref, (), entries))
    return ballots


def random_records(rng, max_sentences=10):
    """Random fused records over the small emotion pool.

    Includes sub-threshold emotion scores, occasional zero weights, and
    discarded sentences so downstream filtering gets exercised.
    """
    records = []
    n = rng.randint(1, max_sentences)
    for idx in range(n):
        scores = {e: 0.0 for e in EMOTIONS}
        for name in rng.sample(EMOTION_POOL, rng.randint(1, 4)):
            scores[name] = rng.randint(1, 9) / 9
        if rng.random() < 0.1:
            records.append(CommonUserRecord(
                sentence=SentenceRef("synthetic", idx),
                discourses=(),
                emotion_scores=scores,
            ))
            continue
        size = rng.randint(1, 3)
        chosen = rng.sample(DISCOURSES, size)
        fused = tuple(
            FusedDiscourse(
                d,
                rng.choice(list(ConfidenceLevel3)),
                rng.choice([0.0, 0.2, 0.4, 0.6, 0.8, 1.0]),
            )
            for d in chosen
        )
        records.append(CommonUserRecord(
            sentence=SentenceRef("synthetic", idx),
            discourses=fused,
            emotion_scores=scores,
        ))
    return records


@pytest.fixture
def rng():
    return random.Random(20240601)
