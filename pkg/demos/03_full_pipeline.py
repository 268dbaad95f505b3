"""Walkthrough: the file-based pipeline, end to end.

Builds a tiny annotated corpus on disk, then runs the same four stages the
command line exposes (ingest, aggregate, relate, report) and prints the
artifacts. Everything is deterministic: running this twice produces
byte-identical files.
"""
import json
import tempfile
from pathlib import Path

from demrel.cli import main
from demrel.conformance import load_reference_dialogue

base = Path(tempfile.mkdtemp(prefix="demrel-demo-"))
data = load_reference_dialogue()

# One dialogue per line, utterances separated by the __eou__ token.
dialogues = base / "dialogues.txt"
dialogues.write_text(" __eou__ ".join(data["sentences"]) + " __eou__\n")
ids = base / "ids.txt"
ids.write_text(data["dialogue_id"] + "\n")

# Ballots: one JSON record per (voter, sentence).
lines = []
for entry in data["ballots"]:
    for voter, rows in entry["voters"].items():
        lines.append(json.dumps({
            "voter": voter,
            "dialogue": data["dialogue_id"],
            "sentence": entry["sentence"],
            "discourses": [{"d": c, "conf": conf, "w": w}
                           for c, conf, w in rows],
            "emotions": [{"e": "curiosity", "conf": "PY"}],
        }))
ballots = base / "ballots.jsonl"
ballots.write_text("\n".join(lines) + "\n")

for argv in (
    ["ingest", "--dialogues", str(dialogues), "--ids", str(ids),
     "--out", str(base / "corpus.json")],
    ["aggregate", "--corpus", str(base / "corpus.json"),
     "--ballots", str(ballots), "--out", str(base / "fused.json")],
    ["relate", "--fused", str(base / "fused.json"),
     "--out", str(base / "relations.json")],
    ["report", "--relations", str(base / "relations.json"),
     "--prob-table", str(base / "probs.csv"),
     "--heatmap", str(base / "heat.json"), "--top", "5"],
):
    print("$ demrel " + " ".join(argv))
    assert main(argv) == 0
    print()

print("--- probs.csv " + "-" * 40)
print((base / "probs.csv").read_text())
print("--- heat.csv " + "-" * 41)
print((base / "heat.csv").read_text())
print(f"(artifacts left in {base})")
