"""Append-only JSON-lines cache of exact point counts.

Records are keyed by ``(polynomial hash, q, p, r)``. A hit returns the record
parsed from the stored line, and re-serializing it reproduces that line byte
for byte.
"""

from __future__ import annotations

import os
import random
import threading
from pathlib import Path
from typing import Callable

from .counting import CountRecord

CACHE_FILE = "counts.jsonl"
ENV_VAR = "TUTTELAB_CACHE_DIR"


class CacheAuditError(AssertionError):
    pass


def default_cache_dir() -> Path | None:
    value = os.environ.get(ENV_VAR)
    return Path(value) if value else None


class CountCache:
    def __init__(self, directory: str | os.PathLike, audit_rate: float = 0.0, audit_seed: int = 0):
        self.dir = Path(directory)
        self.dir.mkdir(parents=True, exist_ok=True)
        if not os.access(self.dir, os.W_OK):
            raise PermissionError(f"cache directory {self.dir} is not writable")
        self.path = self.dir / CACHE_FILE
        self.audit_rate = audit_rate
        self._rng = random.Random(audit_seed)
        self._lines: dict[tuple, str] = {}
        self._lock = threading.Lock()
        self.hits = self.misses = self.audits = 0
        if self.path.exists():
            for line in self.path.read_text().splitlines():
                if line.strip():
                    rec = CountRecord.from_json(line)
                    self._lines.setdefault(self.key(rec), line)

    @staticmethod
    def key(rec: CountRecord) -> tuple:
        return (rec.poly_hash, rec.spin, rec.field["p"], rec.field["r"])

    def __len__(self) -> int:
        return len(self._lines)

    def get(self, poly_hash: str, spin: int | None, p: int, r: int) -> CountRecord | None:
        line = self._lines.get((poly_hash, spin, p, r))
        if line is None:
            return None
        rec = CountRecord.from_json(line)
        if rec.to_json() != line:
            raise CacheAuditError("cached line does not re-serialize identically")
        return rec

    def put(self, rec: CountRecord) -> None:
        key = self.key(rec)
        line = rec.to_json()
        with self._lock:
            if key in self._lines:
                return
            with self.path.open("a") as fh:
                fh.write(line + "\n")
            self._lines[key] = line

    def fetch(self, poly_hash: str, spin: int | None, p: int, r: int,
              compute: Callable[[], CountRecord]) -> tuple[CountRecord, bool]:
        """Return ``(record, hit)``; audited hits are recomputed and compared."""
        rec = self.get(poly_hash, spin, p, r)
        if rec is None:
            self.misses += 1
            rec = compute()
            self.put(rec)
            return rec, False
        self.hits += 1
        if self.audit_rate and self._rng.random() < self.audit_rate:
            self.audits += 1
            fresh = compute()
            if fresh.count != rec.count:
                raise CacheAuditError(f"cache says {rec.count}, recomputation gives {fresh.count}")
        return rec, True
