"""``tuttelab`` command line.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import random
import sys
import time
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from pathlib import Path

from . import motives
from .cache import CountCache, default_cache_dir
from .corpus import corpus_graphs, random_system
from .counting import (
    BudgetExceeded,
    CountRecord,
    PolySystem,
    brute_count,
    chain_count,
    delcon_count_identity,
    potts_state_sum,
    reduced_count,
    tutte_count,
    zfrak_delcon_terms,
)
from .fields import FieldSpec, field_of_order, make_field
from .graphs import Graph, complete, load_graph, path, polygon
from .montecarlo import McConfig, fibration_mc_probe, mc_vs_exact
from .periods import normalized_period, period_estimate, polychain_grid
from .polynomials import (
    EdgeCapExceeded,
    cremona_identity_check,
    kirchhoff,
    normalized_tutte,
    observable,
    phi,
    second_polynomial,
    tutte,
    tutte_delcon,
    tutte_subset,
)
from .references import annotate, exact_tables, mc_rows, table_conflicts

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class VerificationFailed(Exception):
    def __init__(self, report: dict):
        super().__init__("verification failed")
        self.report = report


@dataclass
class RunConfig:
    command: str
    threads: int = 1
    cache_dir: Path | None = None
    output: str = "json"
    seed: int = 0
    audit_rate: float = 0.0
    argv: list = dc_field(default_factory=list)

    def __post_init__(self):
        if self.threads < 1:
            raise ValueError("thread count must be >= 1")


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "to_dict"):
        return _jsonable(x.to_dict())
    return x


def make_report(cfg: RunConfig, inputs: dict, results, annotations=None, timings=None) -> dict:
    return {
        "command": ["tuttelab", *cfg.argv],
        "inputs": _jsonable(inputs),
        "results": _jsonable(results),
        "annotations": _jsonable(annotations or []),
        "timings": timings or {},
    }


def _emit(report: dict, fmt: str, out) -> None:
    if fmt == "json":
        json.dump(report, out, indent=2, sort_keys=False)
        out.write("\n")
    elif fmt == "text":
        results = report["results"]
        if isinstance(results, dict) and "text" in results:
            out.write(results["text"] + "\n")
        else:
            out.write(json.dumps(results, indent=2) + "\n")
        for note in report["annotations"]:
            out.write(f"# {note.get('text', note)}\n")
    elif fmt == "csv":
        rows = report["results"] if isinstance(report["results"], list) else [report["results"]]
        if not rows:
            return
        writer = csv.DictWriter(out, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: v for k, v in row.items()})
    else:
        raise ValueError(f"unknown output format {fmt!r}")


# -- helpers -------------------------------------------------------------------


def _field(args) -> FieldSpec:
    return make_field(args.p, args.r)


def _open_cache(cfg: RunConfig) -> CountCache | None:
    directory = cfg.cache_dir or default_cache_dir()
    return CountCache(directory, audit_rate=cfg.audit_rate, audit_seed=cfg.seed) if directory else None


def exact_count(g: Graph, q: int, field: FieldSpec, method: str, cfg: RunConfig,
                cache: CountCache | None = None, normalized: bool = False) -> tuple[CountRecord, bool]:
    """Count through the cache when one is configured; returns ``(record, cache hit)``."""

    def compute() -> CountRecord:
        return tutte_count(g, q, field, method=method, normalized=normalized, threads=cfg.threads)

    if cache is None:
        return compute(), False
    z = normalized_tutte(g) if normalized else tutte(g)
    digest = PolySystem([z.specialize_q(q)]).digest()
    return cache.fetch(digest, q, field.p, field.r, compute)


def _class_for(g: Graph, qp: int) -> motives.ClassPoly | None:
    """Closed-form complement class for ``q`` reduced to ``qp``; None when every point is a zero."""
    m = g.edge_count
    if qp == 0:
        return None
    if qp == 1:
        return motives.class_q1(m)
    kind, _, arg = g.name.partition(":")
    if kind == "polygon":
        return motives.class_polygon(int(arg) - 1)
    if kind == "tree":
        return motives.class_tree(m)
    if kind == "polychain":
        params = dict(item.split("=") for item in arg.split(","))
        return motives.class_polychain(int(params["m"]), int(params["k"]), int(params["N"]))
    raise ValueError(f"no closed-form class known for {g.label()}")


def _chain_blocks(g: Graph) -> list[Graph]:
    kind, _, arg = g.name.partition(":")
    if kind == "tetrachain":
        return [complete(4)] * int(arg)
    if kind == "polychain":
        params = dict(item.split("=") for item in arg.split(","))
        m, k, n = int(params["m"]), int(params["k"]), int(params["N"])
        return [polygon(m + 1)] * n + [path(1)] * (k * (n - 1))
    raise ValueError(f"the chain method needs a tetrachain or polychain family, not {g.label()}")


# -- commands ------------------------------------------------------------------------


def cmd_poly(args, cfg: RunConfig) -> dict:
    g = load_graph(args.graph)
    builders = {
        "tutte": lambda: tutte(g),
        "kirchhoff": lambda: kirchhoff(g),
        "phi": lambda: phi(g),
        "normalized": lambda: normalized_tutte(g),
        "second": lambda: second_polynomial(g, observable(args.observable, g)),
    }
    poly = builders[args.which]()
    results = {"text": poly.to_text(), "terms": len(poly), "digest": poly.digest(),
               "polynomial": json.loads(poly.to_json())}
    return make_report(cfg, {"graph": g.to_dict(), "which": args.which, "observable": args.observable}, results)


def cmd_count(args, cfg: RunConfig) -> dict:
    g = load_graph(args.graph)
    field = _field(args)
    t0 = time.perf_counter()
    annotations = []
    if args.method == "class":
        cls = _class_for(g, args.q % field.p)
        count = field.order**g.edge_count if cls is None else motives.evaluate_class(cls, field.order, g.edge_count)
        results = {"count": count, "method": "class",
                   "class": cls.to_dict() if cls is not None else "all points"}
    elif args.method == "chain":
        cache = _open_cache(cfg)
        blocks = [(b, exact_count(b, args.q, field, "brute", cfg, cache)[0]) for b in _chain_blocks(g)]
        rec = chain_count(blocks, args.q, field)
        results = {"count": rec.count, "method": rec.method, "blocks": [json.loads(r.to_json()) for _, r in blocks]}
    else:
        cache = _open_cache(cfg)
        rec, hit = exact_count(g, args.q, field, args.method, cfg, cache, args.normalized)
        results = json.loads(rec.to_json())
        results["cache_hit"] = hit
    if not args.normalized:
        annotations = annotate(g, args.q, field.p, field.r, results["count"])
    inputs = {"graph": g.label(), "q": args.q, "p": args.p, "r": args.r, "method": args.method,
              "normalized": args.normalized}
    return make_report(cfg, inputs, results, annotations, {"seconds": time.perf_counter() - t0})


def cmd_mc(args, cfg: RunConfig) -> dict:
    g = load_graph(args.graph)
    mc_cfg = McConfig(args.trials, args.delta, args.seed)
    t0 = time.perf_counter()
    if args.per_q:
        results = [fibration_mc_probe(g, make_field(p, args.r), mc_cfg) for p in args.p]
        if args.format is None:
            cfg.output = "json"
        return make_report(cfg, vars_of(args), results, timings={"seconds": time.perf_counter() - t0})
    cache = _open_cache(cfg)
    rows = []
    z = tutte(g).specialize_q(args.q)
    for p in args.p:
        field = make_field(p, args.r)
        exact = None if args.no_exact else exact_count(g, args.q, field, "brute", cfg, cache)[0].count
        row = mc_vs_exact([z], field, mc_cfg, exact) if exact is not None else _mc_only(z, field, mc_cfg)
        rows.append({"p": p, "monte_carlo": row["monte_carlo"], "error": row.get("error"),
                     "error_bound": row["error_bound"], "exact": row.get("exact"), "trials": args.trials,
                     "seed": args.seed, "epsilon": row["epsilon"]})
    annotations = []
    if args.q == 2 and g == complete(4):
        for ref in mc_rows(args.trials):
            annotations.append({"table": "k4-monte-carlo-table", "p": ref["p"], "reference_estimate": ref["monte_carlo"],
                                "reference_error": ref["error"], "reference_error_bound": ref["error_bound"],
                                "text": "reference estimates are seed dependent; compare columns, not values"})
    return make_report(cfg, vars_of(args), rows, annotations, {"seconds": time.perf_counter() - t0})


def _mc_only(z, field: FieldSpec, mc_cfg: McConfig) -> dict:
    from .montecarlo import mc_count

    res = mc_count([z], field, mc_cfg)
    return {"monte_carlo": res.estimate, "error_bound": res.relative_bound, "epsilon": res.epsilon}


def vars_of(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("func",)}


def cmd_fit(args, cfg: RunConfig) -> dict:
    points = []
    if args.points:
        for item in args.points.split(","):
            x, _, y = item.partition(":")
            points.append((int(x), int(y)))
    if args.graph:
        g = load_graph(args.graph)
        cache = _open_cache(cfg)
        for p in args.primes:
            points.append((p, exact_count(g, args.q, make_field(p), args.method, cfg, cache)[0].count))
    if not points:
        raise ValueError("give --points or a graph with --primes")
    verdict = motives.fit_count_polynomial(points, args.max_degree, spin=args.q if args.graph else args.spin)
    return make_report(cfg, {"points": points, "max_degree": args.max_degree}, verdict.to_dict())


def cmd_fibration(args, cfg: RunConfig) -> dict:
    g = load_graph(args.graph)
    field = _field(args)
    t0 = time.perf_counter()
    report = motives.fibration_test(g, field, method=args.method)
    annotations = []
    for q, n in report["counts"].items():
        annotations.extend(annotate(g, q, field.p, field.r, n))
    return make_report(cfg, {"graph": g.label(), "p": args.p, "r": args.r}, report, annotations,
                       {"seconds": time.perf_counter() - t0})


def cmd_class(args, cfg: RunConfig) -> dict:
    g = load_graph(args.graph)
    # without a characteristic, q is taken as generic (its own residue)
    cls = _class_for(g, args.q % args.p if args.p else args.q)
    results = {"class": cls.to_dict() if cls else "all points", "edges": g.edge_count}
    if args.order:
        results["predicted_counts"] = {
            o: (o**g.edge_count if cls is None else motives.evaluate_class(cls, o, g.edge_count)) for o in args.order
        }
    return make_report(cfg, {"graph": g.label(), "q": args.q}, results)


def _parse_grid(text: str) -> list[tuple[int, int, int]]:
    out = []
    for item in text.split(";"):
        m, k, n = (int(v) for v in item.split(","))
        out.append((m, k, n))
    return out


def cmd_period(args, cfg: RunConfig) -> dict:
    t0 = time.perf_counter()
    if args.polychain_grid:
        rows = polychain_grid(_parse_grid(args.polychain_grid), args.q, args.observable, args.samples, args.seed)
        return make_report(cfg, vars_of(args), rows, timings={"seconds": time.perf_counter() - t0})
    if not args.graph:
        raise ValueError("give a graph or --polychain-grid")
    g = load_graph(args.graph)
    f = observable(args.observable, g)
    est = (period_estimate if args.raw else normalized_period)(g, args.q, f, args.samples, args.seed)
    results = est.to_dict()
    results["normalized"] = not args.raw
    return make_report(cfg, vars_of(args), results, timings={"seconds": time.perf_counter() - t0})


# -- verify ----------------------------------------------------------------------------


def _check(checks: list, name: str, ok: bool, **detail) -> None:
    checks.append({"check": name, "pass": bool(ok), **detail})


def verify_identities(cfg: RunConfig, primes=(3, 5, 7), spins=(2, 3)) -> list[dict]:
    checks: list[dict] = []
    for g in corpus_graphs():
        _check(checks, f"subset = deletion-contraction {g.label()}", tutte_subset(g) == tutte_delcon(g))
        _check(checks, f"Cremona identity {g.label()}", cremona_identity_check(g))
        rng = random.Random(cfg.seed)
        if g.vertex_count <= 6:
            for q in (1, 2, 3):
                t = [rng.randint(-3, 5) for _ in range(g.edge_count)]
                _check(checks, f"Fortuin-Kasteleyn {g.label()} q={q} t={t}",
                       potts_state_sum(g, q, t) == tutte(g).evaluate(q, t))
    for g in (polygon(3), polygon(4), complete(4)):
        for p in primes:
            field = make_field(p)
            for q in spins:
                for e in range(g.edge_count):
                    terms = zfrak_delcon_terms(g, e, q, field, threads=cfg.threads)
                    _check(checks, f"counting-function delcon {g.label()} e={e} q={q} p={p}",
                           terms["z_holds"] and terms["zvee_holds"])
                    ident = delcon_count_identity(g, e, q, field, threads=cfg.threads)
                    _check(checks, f"count delcon {g.label()} e={e} q={q} p={p}", ident["equal"],
                           lhs=ident["lhs"], rhs=ident["rhs"])
    return checks


def verify_tables(cfg: RunConfig, max_p: int = 13) -> tuple[list[dict], list[dict]]:
    checks: list[dict] = []
    notes: list[dict] = []
    k4 = complete(4)
    cache = _open_cache(cfg)
    ising = exact_tables()["k4-ising-counts"]
    for (q, p), ref in sorted(ising.items(), key=lambda kv: kv[0][1]):
        if p > max_p:
            continue
        rec, _ = exact_count(k4, q, make_field(p), "brute", cfg, cache)
        _check(checks, f"K4 q={q} p={p}", rec.count == ref, computed=rec.count, reference=ref)
        notes.extend(a for a in annotate(k4, q, p, 1, rec.count) if a["table"] == "k4-ising-counts")
    fib = exact_tables()["k4-fibration-table"]
    for (q, p), ref in sorted(fib.items()):
        rec, _ = exact_count(k4, q, make_field(p), "brute", cfg, cache)
        notes.extend(a for a in annotate(k4, q, p, 1, rec.count) if a["table"] == "k4-fibration-table")
        if q == 2:
            _check(checks, f"K4 q=2 p={p} agrees with the Ising table", rec.count == ising[(2, p)],
                   computed=rec.count)
    for conflict in table_conflicts():
        notes.append({"conflict": conflict,
                      "text": "the two exact reference tables disagree; brute force is the arbiter"})
    for p in (3, 5, 7):
        rep = motives.k4_decomposition_check(make_field(p))
        notes.append({"k4_decomposition": rep,
                      "text": "decomposition " + ("matches" if rep["match"] else "does not match") + f" at p={p}"})
    return checks, notes


def verify_oracle(cfg: RunConfig, max_points: int, cases: int) -> list[dict]:
    checks: list[dict] = []
    rng = random.Random(cfg.seed)
    orders = [2, 3, 4, 5, 7, 9, 11]
    for i in range(cases):
        order = rng.choice(orders)
        field = field_of_order(order)
        label, polys = random_system(rng, order, field.p, max_points)
        if order ** polys[0].arity > max_points:
            continue
        b = brute_count(polys, field, threads=cfg.threads).count
        r = reduced_count(polys, field).count
        _check(checks, f"oracle {i}: {label} over F_{order}", b == r, brute=b, reduced=r)
    return checks


def cmd_verify(args, cfg: RunConfig) -> dict:
    t0 = time.perf_counter()
    notes: list = []
    if args.suite == "identities":
        checks = verify_identities(cfg)
    elif args.suite == "reference-tables":
        checks, notes = verify_tables(cfg, args.max_p)
    else:
        checks = verify_oracle(cfg, int(float(args.max_points)), args.cases)
    passed = sum(c["pass"] for c in checks)
    report = make_report(cfg, {"suite": args.suite}, {"passed": passed, "failed": len(checks) - passed,
                                                      "checks": checks}, notes,
                         {"seconds": time.perf_counter() - t0})
    if passed != len(checks):
        raise VerificationFailed(report)
    return report


# -- parser ------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tuttelab", description=__doc__.splitlines()[0])
    ap.add_argument("--threads", type=int, default=None, help="worker threads (default: TUTTELAB_THREADS or 1)")
    ap.add_argument("--cache-dir", default=None, help="count cache directory (default: TUTTELAB_CACHE_DIR)")
    ap.add_argument("--format", choices=["json", "csv", "text"], default=None)
    ap.add_argument("--global-seed", type=int, default=0)
    ap.add_argument("--audit-rate", type=float, default=0.01, help="fraction of cache hits to recompute")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("poly", help="print a graph polynomial")
    p.add_argument("graph")
    p.add_argument("which", choices=["tutte", "kirchhoff", "phi", "normalized", "second"], nargs="?", default="tutte")
    p.add_argument("--observable", default="1")
    p.set_defaults(func=cmd_poly, default_format="text")

    p = sub.add_parser("count", help="exact point count of Z_{G,q}")
    p.add_argument("graph")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--method", choices=["brute", "reduced", "class", "chain"], default="brute")
    p.add_argument("--normalized", action="store_true")
    p.set_defaults(func=cmd_count, default_format="json")

    p = sub.add_parser("mc", help="Monte Carlo estimates against exact counts")
    p.add_argument("graph")
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--p", type=int, nargs="+", required=True)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--per-q", action="store_true", help="estimate every q in 2..p-1 from shared samples")
    p.add_argument("--no-exact", action="store_true")
    p.set_defaults(func=cmd_mc, default_format="csv")

    p = sub.add_parser("fit", help="polynomial-countability verdict")
    p.add_argument("graph", nargs="?")
    p.add_argument("--points", help="comma separated field-size:count pairs")
    p.add_argument("--primes", type=int, nargs="+", default=[3, 5, 7, 11, 13])
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--spin", type=int, default=None)
    p.add_argument("--method", choices=["brute", "reduced"], default="brute")
    p.add_argument("--max-degree", type=int, required=True)
    p.set_defaults(func=cmd_fit, default_format="json")

    p = sub.add_parser("fibration", help="exact counts for every q at one field")
    p.add_argument("graph")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--method", choices=["brute", "reduced"], default="brute")
    p.set_defaults(func=cmd_fibration, default_format="json")

    p = sub.add_parser("class", help="closed-form class of the complement")
    p.add_argument("graph")
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--p", type=int, default=None, help="characteristic used to reduce q")
    p.add_argument("--order", type=int, nargs="*", help="field sizes at which to evaluate the prediction")
    p.set_defaults(func=cmd_class, default_format="json")

    p = sub.add_parser("period", help="simplex integral of a thermodynamic average")
    p.add_argument("graph", nargs="?")
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--observable", default="1")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--raw", action="store_true", help="integral against the simplex measure (not divided by its volume)")
    p.add_argument("--polychain-grid", help='batch over polygon chains, e.g. "2,0,2;3,1,2"')
    p.set_defaults(func=cmd_period, default_format="json")

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=["identities", "reference-tables", "oracle"])
    p.add_argument("--max-points", default="1e6")
    p.add_argument("--cases", type=int, default=40)
    p.add_argument("--max-p", type=int, default=13)
    p.set_defaults(func=cmd_verify, default_format="json")
    return ap


def main(argv: list[str] | None = None, out=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    threads = args.threads or int(os.environ.get("TUTTELAB_THREADS", "1"))
    try:
        cfg = RunConfig(args.command, threads, Path(args.cache_dir) if args.cache_dir else None,
                        args.format or args.default_format, args.global_seed, args.audit_rate, argv)
        os.environ["TUTTELAB_THREADS"] = str(threads)
        report = args.func(args, cfg)
    except VerificationFailed as exc:
        _emit(exc.report, "json", out)
        return EXIT_VERIFY
    except BudgetExceeded as exc:
        print(f"tuttelab: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, EdgeCapExceeded, OSError, KeyError) as exc:
        print(f"tuttelab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(report, cfg.output, out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
