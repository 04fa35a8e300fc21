"""Document loading, check orchestration, and machine-readable reports.

Documents are versioned UTF-8 JSON: named lattices, locales, relations,
groupoids and actions, plus a list of check directives.  Reports are JSON
with sorted keys and one entry per check; timing data lives in a separate
top-level field so that the rest of the report is byte-stable.  Exit codes:
0 all checks pass, 1 some check failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from . import fixtures
from .errors import KernelError, ParseError, UnresolvedReference
from .galois import (
    DiscreteAction,
    FiniteGroupoid,
    GaloisCoend,
    default_site,
    equivalence_check,
    reconstruct,
)
from .lattice import (
    FiniteLocale,
    build_suplattice,
    is_frame,
    points,
)
from .present import tensor
from .relation import LRelation, check_axioms, check_diagram, classify, tabulate

SCHEMA_VERSION = 1


def _pairs_to_dict(pairs, what):
    try:
        return {k: v for k, v in (tuple(p) for p in pairs)}
    except (TypeError, ValueError):
        raise ParseError(f"{what} must be a list of [key, value] pairs")


class Document:
    """Parsed and validated declarations, ready to run checks against."""

    def __init__(self, raw: dict):
        self.raw = raw
        if not isinstance(raw, dict):
            raise ParseError("document must be a JSON object")
        if raw.get("version") != SCHEMA_VERSION:
            raise ParseError(f"unsupported document version {raw.get('version')!r}")
        self.lattices = {}
        self.locales = {}
        self.relations = {}
        self.groupoids = dict(fixtures.fixture_groupoids())
        self.actions = {}
        for spec in raw.get("lattices", []):
            name = spec["name"]
            self.lattices[name] = build_suplattice(
                [_hashable(e) for e in spec["elements"]],
                [tuple(map(_hashable, p)) for p in spec.get("covers", [])],
            )
        for name, loc in fixtures.standard_locales().items():
            self.locales.setdefault(name, loc)
        for spec in raw.get("locales", []):
            name = spec["name"]
            base = build_suplattice(
                [_hashable(e) for e in spec["elements"]],
                [tuple(map(_hashable, p)) for p in spec.get("covers", [])],
            )
            self.locales[name] = FiniteLocale.from_lattice(base)
        for spec in raw.get("groupoids", []):
            self.groupoids[spec["name"]] = FiniteGroupoid(
                objects=[_hashable(o) for o in spec["objects"]],
                arrows=[_hashable(a) for a in spec["arrows"]],
                source=_pairs_to_dict(spec["source"], "source"),
                target=_pairs_to_dict(spec["target"], "target"),
                unit=_pairs_to_dict(spec["unit"], "unit"),
                compose={(f, g): h for f, g, h in spec["compose"]},
                inverse=_pairs_to_dict(spec["inverse"], "inverse"),
            )
        for spec in raw.get("relations", []):
            hname = spec["values"]
            H = self.locales.get(hname)
            if H is None:
                raise UnresolvedReference(
                    f"relation {spec['name']!r} references unknown locale {hname!r}")
            table = {}
            for x, y, v in spec["table"]:
                table[(_hashable(x), _hashable(y))] = _hashable(v)
            self.relations[spec["name"]] = LRelation(
                H, [_hashable(e) for e in spec["source"]],
                [_hashable(e) for e in spec["target"]], table)
        for spec in raw.get("actions", []):
            gname = spec["groupoid"]
            if gname not in self.groupoids:
                raise UnresolvedReference(
                    f"action {spec['name']!r} references unknown groupoid {gname!r}")
            self.actions[spec["name"]] = DiscreteAction(
                self.groupoids[gname],
                [_hashable(e) for e in spec["carrier"]],
                _pairs_to_dict(spec["anchor"], "anchor"),
                {(g, x): y for g, x, y in spec["table"]},
                name=spec["name"],
            )
        self.checks = list(raw.get("checks", []))


def _hashable(v):
    if isinstance(v, list):
        return tuple(_hashable(x) for x in v)
    return v


def parse(text: str) -> Document:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}")
    return Document(raw)


# -- checks --------------------------------------------------------------------


def _witness_json(w):
    if isinstance(w, (frozenset, set)):
        return sorted((_witness_json(x) for x in w), key=repr)
    if isinstance(w, tuple):
        return [_witness_json(x) for x in w]
    if isinstance(w, dict):
        return {str(k): _witness_json(v) for k, v in sorted(w.items(), key=repr)}
    return w if isinstance(w, (str, int, float, bool, type(None))) else repr(w)


def run_check(doc: Document, item: dict, max_size: int, seed: int) -> dict:
    kind = item.get("check")
    cid = item.get("id") or f"{kind}:{item.get('relation') or item.get('lattice') or item.get('groupoid') or ''}"
    out = {"id": cid, "check": kind, "status": "pass", "detail": {}}

    def fail(detail, witness=None):
        out["status"] = "fail"
        out["detail"] = detail
        if witness is not None:
            out["witness"] = _witness_json(witness)
        return out

    try:
        if kind == "frame":
            L = doc.lattices.get(item["lattice"]) or doc.locales.get(item["lattice"])
            if L is None:
                raise UnresolvedReference(f"unknown lattice {item['lattice']!r}")
            ok, witness = is_frame(L)
            out["detail"] = {"check_id": "lattice.frame_law", "frame": ok}
            if not ok and item.get("expect", "frame") == "frame":
                return fail(out["detail"], witness)
        elif kind == "points":
            H = doc.locales[item["locale"]]
            out["detail"] = {"check_id": "lattice.points", "count": len(points(H))}
            want = item.get("expect_count")
            if want is not None and want != out["detail"]["count"]:
                return fail(out["detail"])
        elif kind == "axioms":
            r = doc.relations.get(item["relation"])
            if r is None:
                raise UnresolvedReference(f"unknown relation {item['relation']!r}")
            rep = check_axioms(r)
            out["detail"] = {
                "check_id": "relation.axioms",
                "everywhere_defined": rep.everywhere_defined,
                "univalued": rep.univalued,
                "surjective": rep.surjective,
                "injective": rep.injective,
                "classification": classify(r),
            }
            expect = item.get("expect")
            if expect is not None and expect != out["detail"]["classification"]:
                return fail(out["detail"], rep.witnesses)
        elif kind == "tabulate":
            r = doc.relations[item["relation"]]
            try:
                f = tabulate(r)
                out["detail"] = {"check_id": "relation.tabulate",
                                 "map": _witness_json(tuple(sorted(f.items(), key=repr)))}
            except KernelError as exc:
                return fail({"check_id": "relation.tabulate",
                             "error": str(exc)}, exc.witness)
        elif kind == "diagram":
            r = doc.relations[item["first"]]
            r2 = doc.relations[item["second"]]
            dkind = item["kind"]
            if dkind == "diamond":
                data = (set(map(tuple, item["R"])), set(map(tuple, item["S"])))
            else:
                data = (_pairs_to_dict(item["f"], "f"),
                        _pairs_to_dict(item["g"], "g"))
            ok, witness = check_diagram(dkind, data, r, r2)
            out["detail"] = {"check_id": f"relation.diagram.{dkind}", "holds": ok}
            if not ok and item.get("expect", True):
                return fail(out["detail"], witness)
        elif kind == "tensor":
            M = doc.locales[item["first"]]
            N = doc.locales[item["second"]]
            T = tensor(M, N)
            size = len(T.lattice())
            out["detail"] = {"check_id": "present.tensor", "size": size}
            if item.get("expect_size") not in (None, size):
                return fail(out["detail"])
        elif kind == "coend":
            G = doc.groupoids[item["groupoid"]]
            gc = GaloisCoend(default_site(G))
            size = len(gc.quotient.lattice())
            out["detail"] = {"check_id": "tannaka.coend", "size": size,
                             "expected": 2 ** len(G.arrows)}
            if size != 2 ** len(G.arrows):
                return fail(out["detail"])
        elif kind == "reconstruct":
            G = doc.groupoids[item["groupoid"]]
            rep = reconstruct(G)
            out["detail"] = {
                "check_id": "galois.reconstruct",
                "coend_size": rep.coend_size,
                "expected_size": rep.expected_size,
                "structure_maps_verified": ["c", "e", "m", "u", "a", "s", "t"],
            }
            if not rep.sizes_match:
                return fail(out["detail"])
        elif kind == "equivalence":
            G = doc.groupoids[item["groupoid"]]
            bound = int(item.get("max_size", max_size))
            rep = equivalence_check(G, bound, seed=seed)
            out["detail"] = {
                "check_id": "galois.equivalence",
                "objects": rep.object_count,
                "object_classes": rep.object_classes,
                "hom_pairs": rep.hom_pairs_checked,
                "candidates": rep.candidates_checked,
            }
        elif kind == "selftest":
            out["detail"] = _selftest(max_size, seed)
            if not out["detail"]["all_passed"]:
                out["status"] = "fail"
        else:
            raise ParseError(f"unknown check kind {kind!r}")
    except (KernelError, KeyError, AssertionError) as exc:
        witness = getattr(exc, "witness", None)
        return fail({"check_id": f"{kind}.error", "error": f"{type(exc).__name__}: {exc}"},
                    witness)
    return out


def _selftest(max_size: int, seed: int) -> dict:
    """Built-in fixture suite: one line of the acceptance surface per area."""
    results = {}
    two, ch3, p2 = fixtures.TWO(), fixtures.CH3(), fixtures.P2()
    results["frames"] = all(is_frame(L)[0] for L in (two, ch3, p2)) \
        and not is_frame(fixtures.M3())[0]
    results["points"] = [len(points(two)), len(points(p2)), len(points(ch3))] \
        == [1, 2, 2]
    from .lattice import power_locale

    t = tensor(power_locale((1, 2)), power_locale(("a", "b")))
    results["tensor_freeness"] = len(t.lattice()) == 16
    g = fixtures.z_mod(2)
    rep = reconstruct(g)
    results["reconstruct_z2"] = rep.sizes_match
    eq = equivalence_check(g, min(max_size, 3), seed=seed)
    results["equivalence_z2"] = eq.object_count > 0
    results["all_passed"] = all(bool(v) for v in results.values())
    return results


# -- orchestration ---------------------------------------------------------


def _run_item(args):
    raw, item, max_size, seed = args
    doc = Document(raw)
    return run_check(doc, item, max_size, seed)


def run(doc: Document, selection=None, max_size: int = 4, seed: int = 0,
        parallel: int = 1) -> tuple[dict, dict]:
    checks = doc.checks
    if selection:
        checks = [c for c in checks if c.get("check") in selection]
    t0 = time.perf_counter()
    timings = {}
    results = []
    if parallel > 1 and len(checks) > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            results = list(pool.map(
                _run_item, [(doc.raw, c, max_size, seed) for c in checks]))
        timings = {r["id"]: None for r in results}
    else:
        for c in checks:
            t1 = time.perf_counter()
            r = run_check(doc, c, max_size, seed)
            timings[r["id"]] = round(time.perf_counter() - t1, 6)
            results.append(r)
    passed = sum(1 for r in results if r["status"] == "pass")
    report = {
        "version": SCHEMA_VERSION,
        "results": results,
        "summary": {"pass": passed, "fail": len(results) - passed,
                    "total": len(results)},
        "structures": {
            "lattices": sorted(doc.lattices),
            "locales": sorted(doc.locales),
            "relations": sorted(doc.relations),
            "groupoids": sorted(doc.groupoids),
            "actions": sorted(doc.actions),
        },
    }
    return report, {"total": round(time.perf_counter() - t0, 6),
                    "per_check": timings}


def emit(report: dict, timings: dict, fmt: str = "text", path=None) -> str:
    if fmt == "json":
        payload = dict(report)
        payload["timings"] = timings
        text = json.dumps(payload, sort_keys=True, indent=2,
                          default=repr) + "\n"
    else:
        lines = []
        for r in report["results"]:
            mark = "PASS" if r["status"] == "pass" else "FAIL"
            lines.append(f"[{mark}] {r['id']}")
            if r["status"] != "pass":
                lines.append(f"       {json.dumps(r['detail'], sort_keys=True, default=repr)}")
                if "witness" in r:
                    lines.append(f"       witness: {json.dumps(r['witness'], default=repr)}")
        s = report["summary"]
        lines.append(f"{s['pass']}/{s['total']} checks passed")
        text = "\n".join(lines) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def _load_doc(path) -> Document:
    if path is None:
        return Document({"version": 1, "checks": []})
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="finloc",
        description="finite locale and groupoid verification kernel")
    ap.add_argument("command",
                    choices=["validate", "check", "coend", "reconstruct",
                             "equivalence", "selftest"])
    ap.add_argument("--input", help="JSON document path")
    ap.add_argument("--report", help="write the report to this path")
    ap.add_argument("--format", choices=["text", "json"], default="text")
    ap.add_argument("--check", action="append", dest="checks",
                    help="restrict `check` to these kinds")
    ap.add_argument("--groupoid", help="fixture or declared groupoid name")
    ap.add_argument("--max-size", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--parallel", type=int, default=1)
    ns = ap.parse_args(argv)
    try:
        doc = _load_doc(ns.input)
    except (OSError, ParseError, KernelError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    if ns.command == "validate":
        report, timings = run(doc, selection=())
        report["results"] = [{"id": "validate", "check": "validate",
                              "status": "pass", "detail": {}}]
        report["summary"] = {"pass": 1, "fail": 0, "total": 1}
    elif ns.command == "check":
        report, timings = run(doc, selection=ns.checks, max_size=ns.max_size,
                              seed=ns.seed, parallel=ns.parallel)
    elif ns.command in ("coend", "reconstruct", "equivalence"):
        if not ns.groupoid:
            print("input error: --groupoid is required", file=sys.stderr)
            return 2
        item = {"check": ns.command, "groupoid": ns.groupoid,
                "max_size": ns.max_size}
        doc.checks = [item]
        report, timings = run(doc, max_size=ns.max_size, seed=ns.seed)
    else:  # selftest
        doc.checks = [{"check": "selftest", "id": "selftest"}]
        report, timings = run(doc, max_size=ns.max_size, seed=ns.seed)
    text = emit(report, timings, ns.format, ns.report)
    if not ns.report:
        print(text, end="")
    return 0 if report["summary"]["fail"] == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
