"""HTTP service backing the live annotation workflow.

Serves dialogues, accepts ballots, tracks progress, and exports the ballot
log in the same JSONL format the pipeline ingests. Ballots are validated
by the exact code path used for file ingestion and persisted to an
append-only log; the effective view is last-write-wins per
(voter, sentence).
"""
from __future__ import annotations

import os
import re
import threading
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from fastapi import Depends, FastAPI, HTTPException, Request
from fastapi.responses import PlainTextResponse
from fastapi.staticfiles import StaticFiles

from .ingest import (
    Corpus,
    ValidationError,
    VoterBallot,
    ballot_from_dict,
    ballot_line,
    ballot_to_dict,
    parse_ballots,
)
from .vocab import SentenceRef, manifest

TOKEN_ENV_VAR = "DEMREL_TOKENS"

_FIELD_PATTERN = re.compile(
    r"(discourses\[\d+\]|emotions\[\d+\]|'(?:voter|dialogue|sentence)')"
)


class AnnotationStore:
    """Append-only JSONL ballot log with a last-write-wins index.

    The log is never rewritten; reloading replays it in order. Identical
    re-submissions are no-ops so repeated saves do not grow the file.
    """

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._effective: Dict[Tuple[str, str, int], VoterBallot] = {}
        self._reload()

    def _reload(self) -> None:
        self._effective.clear()
        if not self.path.exists():
            return
        with self.path.open("r", encoding="utf-8") as handle:
            for ballot in parse_ballots(handle, source=str(self.path)):
                self._effective[self._key(ballot)] = ballot

    @staticmethod
    def _key(ballot: VoterBallot) -> Tuple[str, str, int]:
        return (ballot.voter_id, ballot.sentence.dialogue_id,
                ballot.sentence.sentence_index)

    def get(self, voter_id: str, ref: SentenceRef) -> Optional[VoterBallot]:
        return self._effective.get((voter_id, ref.dialogue_id, ref.sentence_index))

    def put(self, ballot: VoterBallot) -> bool:
        """Persist a ballot; returns False when it matched the stored one."""
        with self._lock:
            key = self._key(ballot)
            if self._effective.get(key) == ballot:
                return False
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8") as handle:
                handle.write(ballot_line(ballot) + "\n")
                handle.flush()
                os.fsync(handle.fileno())
            self._effective[key] = ballot
            return True

    def effective_ballots(self) -> List[VoterBallot]:
        """Last-write-wins view, sorted for byte-stable export."""
        return [
            self._effective[key]
            for key in sorted(self._effective, key=lambda k: (k[1], k[2], k[0]))
        ]

    def export_text(self) -> str:
        lines = [ballot_line(b) for b in self.effective_ballots()]
        return "\n".join(lines) + ("\n" if lines else "")

    def counts(self) -> Dict[Tuple[str, int], int]:
        """Ballots per sentence, across voters."""
        per_sentence: Dict[Tuple[str, int], int] = {}
        for _, dialogue_id, index in self._effective:
            per_sentence[(dialogue_id, index)] = (
                per_sentence.get((dialogue_id, index), 0) + 1
            )
        return per_sentence

    def voter_counts(self) -> Dict[str, int]:
        """Annotated sentences per voter."""
        per_voter: Dict[str, int] = {}
        for voter_id, _, _ in self._effective:
            per_voter[voter_id] = per_voter.get(voter_id, 0) + 1
        return per_voter


def parse_token_map(pairs: str) -> Dict[str, str]:
    """Parse ``voter=token`` pairs (comma-separated) into token -> voter."""
    tokens: Dict[str, str] = {}
    for pair in pairs.split(","):
        pair = pair.strip()
        if not pair:
            continue
        if "=" not in pair:
            raise ValidationError(f"token map entry must be voter=token: {pair!r}")
        voter, token = pair.split("=", 1)
        voter, token = voter.strip(), token.strip()
        if not voter or not token:
            raise ValidationError(f"empty voter or token in entry: {pair!r}")
        if token in tokens:
            raise ValidationError("duplicate token in token map")
        tokens[token] = voter
    if not tokens:
        raise ValidationError("token map is empty")
    return tokens


def token_map_from_env() -> Dict[str, str]:
    pairs = os.environ.get(TOKEN_ENV_VAR, "")
    if not pairs:
        raise ValidationError(
            f"no voter tokens configured; set {TOKEN_ENV_VAR} or pass --tokens"
        )
    return parse_token_map(pairs)


def _error_detail(exc: ValidationError) -> dict:
    message = str(exc)
    match = _FIELD_PATTERN.search(message)
    return {"field": match.group(0).strip("'") if match else None,
            "message": message}


def create_app(
    corpus: Corpus,
    store: AnnotationStore,
    tokens: Dict[str, str],
    ui_dir: Optional[Union[str, Path]] = None,
) -> FastAPI:
    app = FastAPI(title="discourse-emotion annotation service")

    def current_voter(request: Request) -> str:
        header = request.headers.get("authorization", "")
        if not header.lower().startswith("bearer "):
            raise HTTPException(status_code=401, detail="missing bearer token")
        voter = tokens.get(header[7:].strip())
        if voter is None:
            raise HTTPException(status_code=401, detail="unknown token")
        return voter

    def known_voters() -> List[str]:
        return sorted(set(tokens.values()))

    @app.get("/api/manifest")
    def get_manifest() -> dict:
        return manifest()

    @app.get("/api/dialogues")
    def list_dialogues(voter: str = Depends(current_voter)) -> dict:
        per_sentence = store.counts()
        items = []
        for dialogue_id in sorted(corpus.dialogues):
            dialogue = corpus.dialogues[dialogue_id]
            total = len(dialogue.sentences)
            annotated = sum(
                1 for idx in range(total)
                if store.get(voter, SentenceRef(dialogue_id, idx)) is not None
            )
            complete = sum(
                1 for idx in range(total)
                if per_sentence.get((dialogue_id, idx), 0) >= 3
            )
            items.append({
                "id": dialogue_id,
                "sentences": total,
                "annotated_by_me": annotated,
                "complete": complete,
            })
        return {"dialogues": items}

    @app.get("/api/dialogues/{dialogue_id}")
    def dialogue_detail(
        dialogue_id: str, voter: str = Depends(current_voter)
    ) -> dict:
        dialogue = corpus.dialogues.get(dialogue_id)
        if dialogue is None:
            raise HTTPException(status_code=404, detail="unknown dialogue")
        per_sentence = store.counts()
        sentences = []
        for idx, text in enumerate(dialogue.sentences):
            own = store.get(voter, SentenceRef(dialogue_id, idx))
            sentences.append({
                "index": idx,
                "text": text,
                "annotated_by_me": own is not None,
                "ballots": per_sentence.get((dialogue_id, idx), 0),
                "my_ballot": None if own is None else ballot_to_dict(own),
            })
        return {"id": dialogue_id, "sentences": sentences}

    @app.post("/api/dialogues/{dialogue_id}/sentences/{index}/ballot")
    def submit_ballot(
        dialogue_id: str,
        index: int,
        payload: dict,
        voter: str = Depends(current_voter),
    ) -> dict:
        dialogue = corpus.dialogues.get(dialogue_id)
        if dialogue is None:
            raise HTTPException(status_code=404, detail="unknown dialogue")
        if not 0 <= index < len(dialogue.sentences):
            raise HTTPException(status_code=404, detail="sentence index out of range")
        record = dict(payload)
        for key, value in (("voter", voter), ("dialogue", dialogue_id),
                           ("sentence", index)):
            if key in record and record[key] != value:
                raise HTTPException(
                    status_code=422,
                    detail={"field": key,
                            "message": f"payload {key!r} does not match request"},
                )
            record[key] = value
        try:
            ballot = ballot_from_dict(record, where="ballot")
        except ValidationError as exc:
            raise HTTPException(status_code=422, detail=_error_detail(exc))
        appended = store.put(ballot)
        return {"stored": True, "appended": appended,
                "ballot": ballot_to_dict(ballot)}

    @app.get("/api/progress")
    def progress(voter: str = Depends(current_voter)) -> dict:
        per_sentence = store.counts()
        total_sentences = corpus.sentence_count()
        per_voter = {v: 0 for v in known_voters()}
        per_voter.update(store.voter_counts())
        dialogues = {}
        for dialogue_id in sorted(corpus.dialogues):
            total = len(corpus.dialogues[dialogue_id].sentences)
            complete = sum(
                1 for idx in range(total)
                if per_sentence.get((dialogue_id, idx), 0) >= 3
            )
            dialogues[dialogue_id] = {"sentences": total, "complete": complete}
        return {
            "voters": dict(sorted(per_voter.items())),
            "dialogues": dialogues,
            "sentences_total": total_sentences,
            "sentences_complete": sum(
                1 for count in per_sentence.values() if count >= 3
            ),
        }

    @app.get("/api/export")
    def export(voter: str = Depends(current_voter)) -> PlainTextResponse:
        return PlainTextResponse(store.export_text(),
                                 media_type="application/x-ndjson")

    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
