"""Published K4 tables shipped as data, and annotation of computed counts against them."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

from .graphs import Graph, build_family

TABLES_FILE = "reference_tables.json"


@lru_cache(maxsize=1)
def load_tables() -> dict:
    raw = resources.files("tuttelab").joinpath("data", TABLES_FILE).read_text()
    return json.loads(raw)


def exact_tables() -> dict[str, dict[tuple[int, int], int]]:
    """``{table name: {(q, p): count}}`` for the tables of exact counts."""
    out = {}
    for name, table in load_tables().items():
        if "count" in table["rows"][0]:
            out[name] = {(row["q"], row["p"]): row["count"] for row in table["rows"]}
    return out


def _graph_of(name: str) -> Graph:
    return build_family(load_tables()[name]["graph"])


def annotate(g: Graph, q: int, p: int, r: int, count: int) -> list[dict]:
    """One annotation per reference table holding an entry for ``(g, q, p)``."""
    if r != 1:
        return []
    notes = []
    for name, rows in exact_tables().items():
        if _graph_of(name) != g or (q, p) not in rows:
            continue
        ref = rows[(q, p)]
        status = "matches" if ref == count else "contradicts"
        notes.append({"table": name, "reference": ref, "computed": count, "status": status,
                      "text": f"{status} reference table {name}"})
    return notes


def table_conflicts() -> list[dict]:
    """Entries on which two exact tables disagree with each other."""
    tables = exact_tables()
    names = sorted(tables)
    out = []
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            if _graph_of(a) != _graph_of(b):
                continue
            for key in sorted(set(tables[a]) & set(tables[b])):
                if tables[a][key] != tables[b][key]:
                    out.append({"q": key[0], "p": key[1], a: tables[a][key], b: tables[b][key]})
    return out


def mc_rows(trials: int | None = None) -> list[dict]:
    rows = load_tables()["k4-monte-carlo-table"]["rows"]
    return [r for r in rows if trials is None or r["trials"] == trials]
