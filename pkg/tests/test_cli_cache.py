from __future__ import annotations

import io
import json

import pytest

from tuttelab.cache import CacheAuditError, CountCache
from tuttelab.cli import main
from tuttelab.counting import tutte_count
from tuttelab.fields import make_field
from tuttelab.graphs import complete, polygon
from tuttelab.references import annotate, table_conflicts


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_cache_hits_are_byte_identical(tmp_path):
    cache = CountCache(tmp_path)
    rec = tutte_count(polygon(3), 2, make_field(5))
    cache.put(rec)
    again = CountCache(tmp_path)
    hit = again.get(rec.poly_hash, 2, 5, 1)
    assert hit.to_json() == rec.to_json()
    assert (tmp_path / "counts.jsonl").read_text() == rec.to_json() + "\n"


def test_cache_audit_detects_corruption(tmp_path):
    rec = tutte_count(polygon(3), 2, make_field(5))
    bad = json.loads(rec.to_json())
    bad["count"] += 1
    (tmp_path / "counts.jsonl").write_text(json.dumps(bad, sort_keys=True, separators=(",", ":")) + "\n")
    cache = CountCache(tmp_path, audit_rate=1.0)
    with pytest.raises(CacheAuditError):
        cache.fetch(rec.poly_hash, 2, 5, 1, lambda: tutte_count(polygon(3), 2, make_field(5)))


def test_annotations():
    notes = annotate(complete(4), 2, 11, 1, 180333)
    assert {n["table"]: n["status"] for n in notes} == {"k4-ising-counts": "matches",
                                                        "k4-fibration-table": "contradicts"}
    assert annotate(polygon(4), 2, 11, 1, 5) == []
    assert table_conflicts() == [{"q": 2, "p": 11, "k4-fibration-table": 173799, "k4-ising-counts": 180333}]


def test_cli_poly():
    code, out = run("poly", "polygon:3", "kirchhoff")
    assert code == 0 and out.strip() == "t1 + t2 + t3"
    code, out = run("poly", "tree:2", "normalized")
    assert out.strip() == "t1*t2 + q*t1 + q*t2 + q^2"


def test_cli_count_and_cache(tmp_path):
    code, out = run("--cache-dir", str(tmp_path), "count", "k4", "--q", "2", "--p", "3")
    rep = json.loads(out)
    assert code == 0 and rep["results"]["count"] == 413 and not rep["results"]["cache_hit"]
    assert rep["annotations"][0]["text"] == "matches reference table k4-ising-counts"
    code, out = run("--cache-dir", str(tmp_path), "count", "k4", "--q", "2", "--p", "3")
    assert json.loads(out)["results"]["cache_hit"]
    code, out = run("count", "polygon:4", "--q", "2", "--p", "5", "--method", "class")
    assert json.loads(out)["results"]["count"] == 214
    code, out = run("count", "k4", "--q", "1", "--p", "11", "--method", "reduced")
    assert json.loads(out)["results"]["count"] == 771561


def test_cli_exit_codes():
    assert run("count", "k4", "--q", "2")[0] == 2
    assert run("count", "hexagon:2", "--q", "2", "--p", "3")[0] == 2
    assert run("count", "complete:6", "--q", "2", "--p", "23")[0] == 3


def test_cli_mc_csv():
    code, out = run("mc", "k4", "--p", "3", "5", "--trials", "2000")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0].startswith("p,monte_carlo,error,error_bound")
    assert len(lines) == 3


def test_cli_fit_fibration_class_period():
    code, out = run("fit", "--points", "3:413,5:4449,7:20901,11:180333,13:403025,17:1493449,19:2580541,23:6627909",
                    "--max-degree", "5")
    assert json.loads(out)["results"]["status"] == "NonPolynomial"
    code, out = run("fibration", "k4", "--p", "7")
    assert json.loads(out)["results"]["verdict"] == "fails"
    code, out = run("class", "polygon:4", "--order", "5")
    assert json.loads(out)["results"]["predicted_counts"]["5"] == 214
    code, out = run("period", "tree:1", "--observable", "t1", "--samples", "100")
    assert json.loads(out)["results"]["value"] == 1 / 3


def test_cli_verify_suites():
    code, out = run("verify", "reference-tables", "--max-p", "7")
    rep = json.loads(out)
    assert code == 0
    assert any("conflict" in n for n in rep["annotations"])
    code, _ = run("verify", "oracle", "--max-points", "1e4", "--cases", "10")
    assert code == 0
