import json

import pytest
from fastapi.testclient import TestClient

from demrel import EMOTIONS, fuse_corpus, parse_ballots
from demrel.ingest import Corpus, Dialogue
from demrel.service import AnnotationStore, create_app, parse_token_map

TOKENS = {"tok-ada": "ada", "tok-ben": "ben", "tok-cyn": "cyn"}

BALLOT = {
    "discourses": [{"d": "H", "conf": "High", "w": 0.9}],
    "emotions": [{"e": "annoyance", "conf": "PY"}],
}


@pytest.fixture
def corpus():
    corpus = Corpus(source="mem", format="dailydialog")
    corpus.dialogues["dlg-1"] = Dialogue("dlg-1", ("First .", "Second ?"))
    corpus.dialogues["dlg-2"] = Dialogue("dlg-2", ("Lone sentence .",))
    return corpus


@pytest.fixture
def store(tmp_path):
    return AnnotationStore(tmp_path / "store.jsonl")


@pytest.fixture
def client(corpus, store):
    return TestClient(create_app(corpus, store, TOKENS))


def auth(token="tok-ada"):
    return {"Authorization": f"Bearer {token}"}


class TestAuth:
    def test_missing_token(self, client):
        assert client.get("/api/dialogues").status_code == 401

    def test_unknown_token(self, client):
        response = client.get("/api/dialogues", headers=auth("tok-nope"))
        assert response.status_code == 401

    def test_manifest_is_public(self, client):
        response = client.get("/api/manifest")
        assert response.status_code == 200
        assert response.json()["emotions"] == list(EMOTIONS)


class TestDialogues:
    def test_listing(self, client):
        payload = client.get("/api/dialogues", headers=auth()).json()
        ids = [d["id"] for d in payload["dialogues"]]
        assert ids == ["dlg-1", "dlg-2"]
        assert payload["dialogues"][0]["sentences"] == 2

    def test_detail_includes_own_ballot(self, client):
        client.post("/api/dialogues/dlg-1/sentences/0/ballot",
                    headers=auth(), json=BALLOT)
        detail = client.get("/api/dialogues/dlg-1", headers=auth()).json()
        assert detail["sentences"][0]["annotated_by_me"] is True
        assert detail["sentences"][0]["my_ballot"]["discourses"][0]["d"] == "H"
        assert detail["sentences"][1]["my_ballot"] is None
        other = client.get("/api/dialogues/dlg-1", headers=auth("tok-ben")).json()
        assert other["sentences"][0]["annotated_by_me"] is False
        assert other["sentences"][0]["ballots"] == 1

    def test_unknown_dialogue(self, client):
        assert client.get("/api/dialogues/nope",
                          headers=auth()).status_code == 404


class TestSubmitBallot:
    def test_round_trip_to_export(self, client):
        response = client.post("/api/dialogues/dlg-1/sentences/0/ballot",
                               headers=auth(), json=BALLOT)
        assert response.status_code == 200
        stored = response.json()["ballot"]
        export = client.get("/api/export", headers=auth()).text
        assert json.dumps(stored, ensure_ascii=False) in export.splitlines()

    def test_five_discourses_rejected(self, client):
        payload = {"discourses": [
            {"d": code, "conf": "High", "w": 1.0}
            for code in ("M", "U", "A", "H", "C")
        ], "emotions": []}
        response = client.post("/api/dialogues/dlg-1/sentences/0/ballot",
                               headers=auth(), json=payload)
        assert response.status_code == 422
        assert "max 4 discourses" in response.json()["detail"]["message"]

    def test_validation_names_field(self, client):
        payload = {"discourses": [{"d": "H", "conf": "High", "w": 2.0}],
                   "emotions": []}
        response = client.post("/api/dialogues/dlg-1/sentences/0/ballot",
                               headers=auth(), json=payload)
        assert response.status_code == 422
        assert response.json()["detail"]["field"] == "discourses[0]"

    def test_empty_discourses_allowed(self, client):
        response = client.post("/api/dialogues/dlg-1/sentences/0/ballot",
                               headers=auth(),
                               json={"discourses": [], "emotions": []})
        assert response.status_code == 200

    def test_last_write_wins(self, client):
        first = dict(BALLOT, discourses=[{"d": "M", "conf": "Low", "w": 0.1}])
        client.post("/api/dialogues/dlg-1/sentences/0/ballot",
                    headers=auth(), json=first)
        client.post("/api/dialogues/dlg-1/sentences/0/ballot",
                    headers=auth(), json=BALLOT)
        export = client.get("/api/export", headers=auth()).text
        records = [json.loads(line) for line in export.splitlines()]
        mine = [r for r in records if r["voter"] == "ada"]
        assert len(mine) == 1
        assert mine[0]["discourses"][0]["d"] == "H"

    def test_identical_resubmission_is_noop(self, client, store):
        for _ in range(2):
            response = client.post("/api/dialogues/dlg-1/sentences/0/ballot",
                                   headers=auth(), json=BALLOT)
        assert response.json()["appended"] is False
        assert len(store.path.read_text().splitlines()) == 1

    def test_voter_mismatch_rejected(self, client):
        payload = dict(BALLOT, voter="imposter")
        response = client.post("/api/dialogues/dlg-1/sentences/0/ballot",
                               headers=auth(), json=payload)
        assert response.status_code == 422
        assert response.json()["detail"]["field"] == "voter"

    def test_index_out_of_range(self, client):
        response = client.post("/api/dialogues/dlg-2/sentences/5/ballot",
                               headers=auth(), json=BALLOT)
        assert response.status_code == 404


class TestProgressAndExport:
    def _annotate_everything(self, client):
        for token in TOKENS:
            for dialogue, count in (("dlg-1", 2), ("dlg-2", 1)):
                for idx in range(count):
                    client.post(
                        f"/api/dialogues/{dialogue}/sentences/{idx}/ballot",
                        headers=auth(token), json=BALLOT)

    def test_progress_counts(self, client):
        client.post("/api/dialogues/dlg-1/sentences/0/ballot",
                    headers=auth(), json=BALLOT)
        progress = client.get("/api/progress", headers=auth()).json()
        assert progress["voters"] == {"ada": 1, "ben": 0, "cyn": 0}
        assert progress["sentences_complete"] == 0
        self._annotate_everything(client)
        progress = client.get("/api/progress", headers=auth()).json()
        assert progress["voters"] == {"ada": 3, "ben": 3, "cyn": 3}
        assert progress["sentences_complete"] == 3
        assert progress["dialogues"]["dlg-1"] == {"sentences": 2, "complete": 2}

    def test_export_is_byte_stable(self, client):
        self._annotate_everything(client)
        first = client.get("/api/export", headers=auth()).text
        second = client.get("/api/export", headers=auth()).text
        assert first == second

    def test_export_feeds_the_pipeline(self, client, corpus):
        self._annotate_everything(client)
        export = client.get("/api/export", headers=auth()).text
        ballots = parse_ballots(export.splitlines(), source="export")
        records = fuse_corpus(corpus, ballots)
        assert len(records) == 3
        assert all(not r.discarded for r in records)


class TestStoreReload:
    def test_restart_preserves_effective_view(self, corpus, tmp_path):
        path = tmp_path / "store.jsonl"
        store = AnnotationStore(path)
        client = TestClient(create_app(corpus, store, TOKENS))
        first = dict(BALLOT, discourses=[{"d": "M", "conf": "Low", "w": 0.1}])
        client.post("/api/dialogues/dlg-1/sentences/0/ballot",
                    headers=auth(), json=first)
        client.post("/api/dialogues/dlg-1/sentences/0/ballot",
                    headers=auth(), json=BALLOT)
        export_before = client.get("/api/export", headers=auth()).text

        reloaded = AnnotationStore(path)
        client2 = TestClient(create_app(corpus, reloaded, TOKENS))
        export_after = client2.get("/api/export", headers=auth()).text
        assert export_after == export_before
        # The log keeps both writes; the effective view keeps the last.
        assert len(path.read_text().splitlines()) == 2
        assert len(export_after.splitlines()) == 1


class TestTokenMap:
    def test_parse(self):
        tokens = parse_token_map("ada=tok-a, ben=tok-b")
        assert tokens == {"tok-a": "ada", "tok-b": "ben"}

    def test_rejects_malformed(self):
        from demrel import ValidationError

        with pytest.raises(ValidationError):
            parse_token_map("just-a-token")
        with pytest.raises(ValidationError):
            parse_token_map("")
        with pytest.raises(ValidationError):
            parse_token_map("a=t,b=t")
