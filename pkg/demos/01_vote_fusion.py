"""Walkthrough: fusing three annotators' ballots into the common user.

Runs the bundled reference dialogue sentence by sentence and shows how
unanimity, majorities, and stray single mentions shape the fused
(discourse, confidence, weight) outcomes.
"""
from demrel import fuse_discourses, fuse_emotions
from demrel.conformance import (
    load_reference_dialogue,
    match_rule_ids,
    reference_ballots,
)

data = load_reference_dialogue()
print(f"dialogue: {data['dialogue_id']}\n")

for entry in data["ballots"]:
    index = entry["sentence"]
    print(f'sentence {index}: "{data["sentences"][index]}"')
    ballots = reference_ballots(entry, data["dialogue_id"])
    for ballot in ballots:
        parts = [
            f"{e.discourse.label} ({e.confidence.value}, w={e.weight})"
            for e in ballot.discourse_entries
        ] or ["(none)"]
        print(f"  {ballot.voter_id}: " + "; ".join(parts))
    fused = fuse_discourses(ballots)
    rules = match_rule_ids(ballots)
    outcome = "; ".join(
        f"{f.code} ({f.confidence.value}, w={f.weight})" for f in fused
    )
    print(f"  common user [rule {rules[0]}]: {outcome}\n")

# Emotion scores average the numeric DN/PN/PY/DY labels over the three
# voters, divided by the top label value. Unmentioned emotions count as DN.
ballots = reference_ballots(data["ballots"][0], data["dialogue_id"])
scores = fuse_emotions(ballots)
print("emotion scores for sentence 0 (all zero: the reference ballots")
print("carry discourse annotations only):",
      {k: v for k, v in scores.items() if v > 0} or "{}")
