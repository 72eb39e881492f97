"""Two-annotator evaluation campaigns: assignment, journal, HTTP service.

A campaign is a directory holding an immutable campaign.json (items,
evaluators, assignment) plus an append-only journal.jsonl of judgments.
Restarting the service replays the journal, so the whole state is the
directory; a torn trailing line from a crash is ignored on replay.
"""

from __future__ import annotations

import json
import mimetypes
import os
import re
import threading
import time
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Sequence
from urllib.parse import parse_qs, urlparse

from .corpus import parse_tags
from .errors import (
    AlreadyJudged,
    MalformedTag,
    NotAssigned,
    ToolkitError,
    TooFewEvaluators,
    UnknownEvaluator,
)
from .metrics import Judgment, agreement, human_ser


@dataclass(frozen=True)
class EvalItem:
    item_id: str
    audio_path: str | None
    transcript: str


def assign_items(
    items: Sequence[str], evaluators: Sequence[str], seed: int
) -> dict[str, tuple[str, str]]:
    """Seeded round-robin handing every item to two distinct evaluators.

    Loads stay balanced within one item because consecutive slots walk
    the shuffled evaluator list cyclically.
    """
    if len(evaluators) < 2:
        raise TooFewEvaluators("need at least two evaluators")
    if len(set(evaluators)) != len(evaluators):
        raise ValueError("duplicate evaluator ids")
    import random

    order = list(evaluators)
    random.Random(seed).shuffle(order)
    n = len(order)
    assignment = {}
    for i, item in enumerate(items):
        a = order[(2 * i) % n]
        b = order[(2 * i + 1) % n]
        assignment[item] = (a, b)
    return assignment


class Campaign:
    """In-memory campaign state backed by a directory."""

    def __init__(
        self,
        directory: Path,
        items: list[EvalItem],
        evaluators: list[str],
        assignment: dict[str, tuple[str, str]],
    ):
        self.directory = directory
        self.items = items
        self.by_id = {it.item_id: it for it in items}
        self.evaluators = evaluators
        self.assignment = assignment
        self.judgments: dict[tuple[str, str], Judgment] = {}
        self._lock = threading.Lock()
        # per-evaluator worklists in campaign item order
        self._worklists: dict[str, list[str]] = {e: [] for e in evaluators}
        for it in items:
            for e in assignment[it.item_id]:
                self._worklists[e].append(it.item_id)

    # -- construction ------------------------------------------------------

    @classmethod
    def create(
        cls,
        directory: str | Path,
        items: Sequence[EvalItem],
        evaluators: Sequence[str],
        seed: int,
    ) -> "Campaign":
        if not items:
            raise ValueError("campaign needs at least one item")
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        assignment = assign_items([it.item_id for it in items], evaluators, seed)
        payload = {
            "seed": seed,
            "evaluators": list(evaluators),
            "items": [
                {"item_id": it.item_id, "audio_path": it.audio_path, "transcript": it.transcript}
                for it in items
            ],
            "assignment": {k: list(v) for k, v in assignment.items()},
        }
        # the campaign file is persisted before any judgment can arrive
        (directory / "campaign.json").write_text(
            json.dumps(payload, ensure_ascii=False, indent=2), encoding="utf-8"
        )
        (directory / "journal.jsonl").touch()
        return cls.load(directory)

    @classmethod
    def load(cls, directory: str | Path) -> "Campaign":
        directory = Path(directory)
        payload = json.loads((directory / "campaign.json").read_text(encoding="utf-8"))
        items = [
            EvalItem(rec["item_id"], rec.get("audio_path"), rec["transcript"])
            for rec in payload["items"]
        ]
        assignment = {k: tuple(v) for k, v in payload["assignment"].items()}
        campaign = cls(directory, items, payload["evaluators"], assignment)
        campaign._replay()
        return campaign

    def _replay(self) -> None:
        journal = self.directory / "journal.jsonl"
        if not journal.exists():
            return
        lines = journal.read_text(encoding="utf-8").split("\n")
        for idx, line in enumerate(lines):
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError:
                if idx == len(lines) - 1:
                    break  # torn trailing write from a crash
                raise
            j = Judgment(rec["item_id"], rec["evaluator_id"], rec["accept"], rec["timestamp"])
            self.judgments[(j.item_id, j.evaluator_id)] = j

    # -- operations ---------------------------------------------------------

    def next_item(self, evaluator_id: str) -> EvalItem | None:
        """First assigned, not-yet-judged item in stable order; None when done."""
        if evaluator_id not in self._worklists:
            raise UnknownEvaluator(evaluator_id)
        for item_id in self._worklists[evaluator_id]:
            if (item_id, evaluator_id) not in self.judgments:
                return self.by_id[item_id]
        return None

    def submit(self, judgment: Judgment) -> None:
        """Durably append one verdict; identical resubmission is a no-op."""
        pair = (judgment.item_id, judgment.evaluator_id)
        if judgment.evaluator_id not in self._worklists:
            raise UnknownEvaluator(judgment.evaluator_id)
        assigned = self.assignment.get(judgment.item_id)
        if assigned is None or judgment.evaluator_id not in assigned:
            raise NotAssigned(f"{pair} is not in the assignment")
        with self._lock:
            existing = self.judgments.get(pair)
            if existing is not None:
                if existing.accept == judgment.accept:
                    return  # idempotent
                raise AlreadyJudged(f"{pair} already judged with the opposite verdict")
            record = {
                "item_id": judgment.item_id,
                "evaluator_id": judgment.evaluator_id,
                "accept": judgment.accept,
                "timestamp": judgment.timestamp,
            }
            with open(self.directory / "journal.jsonl", "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record, ensure_ascii=False) + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            self.judgments[pair] = judgment

    def progress(self, evaluator_id: str) -> dict:
        if evaluator_id not in self._worklists:
            raise UnknownEvaluator(evaluator_id)
        worklist = self._worklists[evaluator_id]
        judged = sum(1 for item in worklist if (item, evaluator_id) in self.judgments)
        return {"judged": judged, "assigned": len(worklist)}

    def report(self) -> dict:
        completed = []
        pending = []
        for it in self.items:
            a, b = self.assignment[it.item_id]
            if (it.item_id, a) in self.judgments and (it.item_id, b) in self.judgments:
                completed.append(it.item_id)
            else:
                pending.append(it.item_id)
        judgments = list(self.judgments.values())
        result = {
            "total_items": len(self.items),
            "completed_items": len(completed),
            "pending_items": len(pending),
            "human_ser": None,
            "agreement": None,
            "per_evaluator": {e: self.progress(e) for e in self.evaluators},
        }
        if completed:
            result["human_ser"] = human_ser(judgments, completed)
            result["agreement"] = agreement(judgments, completed)
        return result

    def report_json(self) -> str:
        """Canonical bytes: replaying the journal reproduces this exactly."""
        return json.dumps(self.report(), ensure_ascii=False, sort_keys=True) + "\n"


# --------------------------------------------------------------------------
# HTTP service
# --------------------------------------------------------------------------

_RANGE_RE = re.compile(r"bytes=(\d*)-(\d*)")


def _make_handler(campaign: Campaign):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):  # tests stay quiet
            pass

        def _send_json(self, payload, status=200):
            body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json; charset=utf-8")
            self.send_header("Content-Length", str(len(body)))
            self._cors()
            self.end_headers()
            self.wfile.write(body)

        def _cors(self):
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")

        def do_OPTIONS(self):
            self.send_response(204)
            self._cors()
            self.send_header("Content-Length", "0")
            self.end_headers()

        def do_GET(self):
            url = urlparse(self.path)
            query = parse_qs(url.query)
            try:
                if url.path == "/api/next":
                    evaluator = query.get("evaluator", [""])[0]
                    item = campaign.next_item(evaluator)
                    if item is None:
                        self._send_json({"done": True})
                    else:
                        self._send_json(self._item_payload(item))
                elif url.path.startswith("/api/audio/"):
                    self._serve_audio(url.path[len("/api/audio/"):])
                elif url.path == "/api/report":
                    self._send_json(campaign.report())
                elif url.path == "/api/progress":
                    evaluator = query.get("evaluator", [""])[0]
                    self._send_json(campaign.progress(evaluator))
                else:
                    self._send_json({"error": "not found"}, status=404)
            except UnknownEvaluator as exc:
                self._send_json({"error": f"UnknownEvaluator: {exc}"}, status=404)

        def do_POST(self):
            url = urlparse(self.path)
            if url.path != "/api/judgment":
                self._send_json({"error": "not found"}, status=404)
                return
            try:
                length = int(self.headers.get("Content-Length", "0"))
                rec = json.loads(self.rfile.read(length).decode("utf-8"))
                judgment = Judgment(
                    item_id=rec["item_id"],
                    evaluator_id=rec["evaluator_id"],
                    accept=bool(rec["accept"]),
                    timestamp=time.time(),
                )
            except (ValueError, KeyError) as exc:
                self._send_json({"error": f"bad request: {exc}"}, status=400)
                return
            try:
                campaign.submit(judgment)
                self._send_json({"ok": True})
            except (NotAssigned, UnknownEvaluator) as exc:
                self._send_json({"error": str(exc)}, status=404)
            except AlreadyJudged as exc:
                self._send_json({"error": f"AlreadyJudged: {exc}"}, status=409)

        def _item_payload(self, item: EvalItem) -> dict:
            try:
                spans = [
                    {"lang": s.lang, "text": s.text} for s in parse_tags(item.transcript)
                ]
            except MalformedTag:
                spans = [{"lang": "tn", "text": item.transcript}]
            return {
                "item_id": item.item_id,
                "transcript": item.transcript,
                "spans": spans,
                "audio": f"/api/audio/{item.item_id}",
            }

        def _serve_audio(self, item_id: str):
            item = campaign.by_id.get(item_id)
            if item is None or not item.audio_path or not Path(item.audio_path).exists():
                self._send_json({"error": "no audio"}, status=404)
                return
            data = Path(item.audio_path).read_bytes()
            ctype = mimetypes.guess_type(item.audio_path)[0] or "application/octet-stream"
            range_header = self.headers.get("Range")
            start, end = 0, len(data) - 1
            status = 200
            if range_header:
                m = _RANGE_RE.fullmatch(range_header.strip())
                if not m or (not m.group(1) and not m.group(2)):
                    self._send_json({"error": "bad range"}, status=416)
                    return
                if m.group(1):
                    start = int(m.group(1))
                    if m.group(2):
                        end = min(int(m.group(2)), len(data) - 1)
                else:  # suffix range: last N bytes
                    start = max(0, len(data) - int(m.group(2)))
                if start > end or start >= len(data):
                    self._send_json({"error": "range not satisfiable"}, status=416)
                    return
                status = 206
            chunk = data[start:end + 1]
            self.send_response(status)
            self.send_header("Content-Type", ctype)
            self.send_header("Accept-Ranges", "bytes")
            if status == 206:
                self.send_header("Content-Range", f"bytes {start}-{end}/{len(data)}")
            self.send_header("Content-Length", str(len(chunk)))
            self._cors()
            self.end_headers()
            self.wfile.write(chunk)

    return Handler


def serve(campaign: Campaign, port: int = 8723, host: str = "127.0.0.1") -> ThreadingHTTPServer:
    """Bind the campaign to an HTTP server; call serve_forever() to run."""
    return ThreadingHTTPServer((host, port), _make_handler(campaign))


def items_from_manifest_and_hyps(
    utterances, hyps: dict[str, str]
) -> list[EvalItem]:
    """Campaign items pairing manifest audio with hypothesis transcripts."""
    missing = [u.id for u in utterances if u.id not in hyps]
    if missing:
        raise ToolkitError(f"no hypothesis for items: {missing[:5]}")
    return [EvalItem(u.id, u.audio_path, hyps[u.id]) for u in utterances]
