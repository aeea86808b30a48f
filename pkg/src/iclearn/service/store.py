"""On-disk layout of annotation sessions.

One directory per session under a single store root:

    <root>/<session_id>/session.json     immutable creation record
    <root>/<session_id>/labels.jsonl     append-only log of accepted labels
    <root>/<session_id>/history.jsonl    append-only per-round records
    <root>/<session_id>/checkpoint.json  full resumable loop state
"""

from __future__ import annotations

import json
import os

from ..engine.checkpoint import atomic_write_json

SESSION_FILE = "session.json"
LABELS_FILE = "labels.jsonl"
HISTORY_FILE = "history.jsonl"
CHECKPOINT_FILE = "checkpoint.json"


def session_dir(root: str, session_id: str) -> str:
    return os.path.join(root, session_id)


def create_session_dir(root: str, session_id: str, meta: dict) -> str:
    directory = session_dir(root, session_id)
    os.makedirs(directory, exist_ok=False)
    atomic_write_json(os.path.join(directory, SESSION_FILE), meta)
    return directory


def read_session_meta(root: str, session_id: str) -> dict:
    with open(os.path.join(session_dir(root, session_id), SESSION_FILE)) as f:
        return json.load(f)


def append_jsonl(path: str, record: dict) -> None:
    with open(path, "a") as f:
        f.write(json.dumps(record) + "\n")
        f.flush()
        os.fsync(f.fileno())


def read_jsonl(path: str) -> list[dict]:
    if not os.path.exists(path):
        return []
    records = []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records


def list_session_ids(root: str) -> list[str]:
    if not os.path.isdir(root):
        return []
    return sorted(
        name
        for name in os.listdir(root)
        if os.path.isfile(os.path.join(root, name, SESSION_FILE))
    )
