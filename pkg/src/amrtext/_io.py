"""Small file helpers: JSONL reading and all-or-nothing writes."""

from __future__ import annotations

import contextlib
import json
import os
import tempfile
from typing import Iterable, Iterator


@contextlib.contextmanager
def atomic_writer(path, encoding="utf-8"):
    """Write to a temporary file next to ``path`` and rename it into place on success."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding=encoding, newline="\n") as f:
            yield f
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(OSError):
            os.unlink(tmp)
        raise


def write_text(path, text: str):
    with atomic_writer(path) as f:
        f.write(text)


def dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False)


def write_jsonl(path, rows: Iterable[dict]) -> int:
    n = 0
    with atomic_writer(path) as f:
        for row in rows:
            f.write(dumps(row) + "\n")
            n += 1
    return n


def read_jsonl(path) -> Iterator[dict]:
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                yield json.loads(line)
            except json.JSONDecodeError as e:
                raise ValueError(f"{path}:{lineno}: invalid JSON ({e.msg})") from None


def read_sidecar(path, key="id", value="text") -> dict:
    """Read a ``{id, text}`` (or ``{id, score}``) JSONL file into a dict."""
    out = {}
    for row in read_jsonl(path):
        if key not in row or value not in row:
            raise ValueError(f"{path}: every line needs {key!r} and {value!r} fields")
        out[str(row[key])] = row[value]
    return out
