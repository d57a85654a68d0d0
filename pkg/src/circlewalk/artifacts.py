"""Artifact persistence: CSV with a JSON header line, sidecars, and an on-disk cache."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1
CACHE_ENV = "CIRCLEWALK_CACHE"


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(format(float(obj), ".17g"))
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2, allow_nan=True)


def render_csv(meta: dict, header, rows) -> str:
    buf = io.StringIO()
    buf.write("# " + json.dumps(_jsonable({"schema": SCHEMA_VERSION, **meta}),
                                sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def read_csv(text: str) -> tuple[dict, list[str], list[list[str]]]:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# "):
        raise ValueError("missing JSON header line")
    meta = json.loads(lines[0][2:])
    rows = list(csv.reader(lines[1:]))
    return meta, rows[0], rows[1:]


def sha256(data: bytes | str) -> str:
    if isinstance(data, str):
        data = data.encode()
    return hashlib.sha256(data).hexdigest()


def atomic_write(path: str | os.PathLike, data: bytes | str) -> None:
    """Write to a temporary file in the target directory, then rename over the target."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(data, str):
        data = data.encode()
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_artifact(path, meta: dict, header, rows) -> str:
    """CSV plus a JSON sidecar holding the metadata and the CSV checksum."""
    text = render_csv(meta, header, rows)
    atomic_write(path, text)
    side = {"schema": SCHEMA_VERSION, **meta, "sha256": sha256(text)}
    atomic_write(str(path) + ".json", dumps(side) + "\n")
    return text


class Cache:
    """Content-addressed store of numpy arrays keyed by a JSON-able description."""

    def __init__(self, root: str | os.PathLike | None = None):
        root = root or os.environ.get(CACHE_ENV) or Path.home() / ".cache" / "circlewalk"
        self.root = Path(root)
        self.hits = 0
        self.misses = 0

    @staticmethod
    def key(desc: dict) -> str:
        return sha256(json.dumps(_jsonable({"schema": SCHEMA_VERSION, **desc}), sort_keys=True))

    def _paths(self, key: str) -> tuple[Path, Path]:
        return self.root / f"{key}.npz", self.root / f"{key}.sha256"

    def load(self, desc: dict) -> dict[str, np.ndarray] | None:
        data_p, sum_p = self._paths(self.key(desc))
        try:
            blob = data_p.read_bytes()
            expect = sum_p.read_text().strip()
        except OSError:
            self.misses += 1
            return None
        if sha256(blob) != expect:
            self.misses += 1
            return None
        with np.load(io.BytesIO(blob), allow_pickle=False) as z:
            out = {name: z[name] for name in z.files}
        self.hits += 1
        return out

    def store(self, desc: dict, arrays: dict[str, np.ndarray]) -> None:
        buf = io.BytesIO()
        np.savez(buf, **arrays)
        blob = buf.getvalue()
        data_p, sum_p = self._paths(self.key(desc))
        atomic_write(data_p, blob)
        atomic_write(sum_p, sha256(blob) + "\n")

    def get_or_compute(self, desc: dict, compute) -> dict[str, np.ndarray]:
        got = self.load(desc)
        if got is not None:
            return got
        arrays = compute()
        self.store(desc, arrays)
        return arrays
