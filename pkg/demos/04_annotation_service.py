"""Walkthrough: the annotation service, exercised in process.

Starts the HTTP app against a temporary store, submits ballots as three
different voters, and shows progress tracking, last-write-wins edits, and
the JSONL export that feeds straight back into the pipeline.

To run it for real annotators instead:

    DEMREL_TOKENS="ada=tok-a,ben=tok-b,cyn=tok-c" \
        demrel serve --corpus corpus.json --store store.jsonl --port 8000
"""
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from demrel.ingest import Corpus, Dialogue
from demrel.service import AnnotationStore, create_app

corpus = Corpus(source="demo", format="dailydialog")
corpus.dialogues["demo-1"] = Dialogue(
    "demo-1", ("Can you believe it ?", "Tell me everything .")
)

store = AnnotationStore(Path(tempfile.mkdtemp(prefix="demrel-store-"))
                        / "store.jsonl")
tokens = {"tok-a": "ada", "tok-b": "ben", "tok-c": "cyn"}
client = TestClient(create_app(corpus, store, tokens))


def as_voter(token):
    return {"Authorization": f"Bearer {token}"}


ballot = {
    "discourses": [{"d": "H", "conf": "High", "w": 0.9}],
    "emotions": [{"e": "curiosity", "conf": "DY"}],
}

for token in tokens:
    for index in range(2):
        response = client.post(
            f"/api/dialogues/demo-1/sentences/{index}/ballot",
            headers=as_voter(token), json=ballot)
        assert response.status_code == 200

print("progress after three voters annotated both sentences:")
print(client.get("/api/progress", headers=as_voter("tok-a")).json())

# Editing: a later submission for the same sentence supersedes the first.
revised = {"discourses": [{"d": "M", "conf": "Mid", "w": 0.5}], "emotions": []}
client.post("/api/dialogues/demo-1/sentences/0/ballot",
            headers=as_voter("tok-a"), json=revised)

print("\nexport (the effective view; ada's first sentence shows the edit):")
print(client.get("/api/export", headers=as_voter("tok-a")).text)

print("validation lives on one code path; a fifth discourse is refused:")
too_many = {"discourses": [{"d": c, "conf": "High", "w": 1.0}
                           for c in "MUAHC"], "emotions": []}
response = client.post("/api/dialogues/demo-1/sentences/0/ballot",
                       headers=as_voter("tok-a"), json=too_many)
print(f"  HTTP {response.status_code}: {response.json()['detail']['message']}")
