"""Deterministic CSV/JSON writers and content hashing for run artifacts.

Numbers are serialized with 17 significant digits (round-trip safe for IEEE
doubles); CSV is comma-separated with a header row, LF endings, UTF-8; JSON
has stable key ordering.  Identical inputs therefore produce bit-identical
files, which the manifest certifies by SHA-256.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

__all__ = ["fmt", "write_csv", "read_csv", "write_json", "read_json",
           "sha256_file"]


def fmt(x) -> str:
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def write_csv(path, header, rows) -> str:
    path = Path(path)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    data = ("\n".join(lines) + "\n").encode("utf-8")
    path.write_bytes(data)
    return hashlib.sha256(data).hexdigest()


def read_csv(path):
    path = Path(path)
    lines = path.read_text(encoding="utf-8").strip().split("\n")
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


def write_json(path, obj) -> str:
    path = Path(path)
    data = (json.dumps(obj, indent=2, sort_keys=True) + "\n").encode("utf-8")
    path.write_bytes(data)
    return hashlib.sha256(data).hexdigest()


def read_json(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
