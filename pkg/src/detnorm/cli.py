"""Command line: build, verify, scan, chern, restrict.

Exit status is 0 on success (including expected negative outcomes), 1 when
a check fails, 2 for bad input.  JSON output is deterministic; wall-clock
times go in a separate "timing" field.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Dict, List, Optional, Sequence

from . import __version__
from . import checks as ck
from .chern import exclude_cases, expected_chern
from .complexes import betti, build_D, hilbert_from_resolution, minimize, rank_exactness
from .cone import diagram_A, ext1_resolution, triple_cone, ulrich_certificate
from .detinput import DegreeError, DegreeMatrix, DetScheme, build_matrix, parse_grid
from .fixtures import Fixture, get_fixture
from .ring import DEFAULT_PRIME, CoeffField

VERIFY_CHECKS = ("diagram", "cone", "ulrich", "simplicity", "vanishing", "iso")
DEFAULT_CHECKS = ("diagram", "cone", "ulrich", "simplicity", "vanishing")


class UsageError(Exception):
    pass


# -- configuration ---------------------------------------------------------------------

def read_config(path: str) -> Dict[str, str]:
    """``key = value`` lines; '#' starts a comment.  Keys use underscores."""
    out: Dict[str, str] = {}
    with open(path) as fh:
        for k, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{k}: expected key = value")
            key, val = (x.strip() for x in line.split("=", 1))
            out[key.replace("-", "_")] = val
    return out


def _ints(text: str) -> List[int]:
    """'2,3' or '2..5' or '2..5,7'."""
    out: List[int] = []
    for part in str(text).replace(" ", "").split(","):
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("common options")
    g.add_argument("--config", help="key = value file; flags override it")
    g.add_argument("--prime", type=int, help=f"characteristic (default {DEFAULT_PRIME})")
    g.add_argument("--seed", type=int, help="seed for random entries and sampling (default 0)")
    g.add_argument("--bound", type=int, help="truncation bound for strand resolutions")
    g.add_argument("--jobs", type=int, help="worker processes (default 1)")
    g.add_argument("--fixtures-dir", help="directory with extra NAME.json fixtures")
    g.add_argument("--out", help="write JSON here instead of stdout")
    g.add_argument("--json", action="store_true", help="print JSON instead of text")

    src = argparse.ArgumentParser(add_help=False)
    s = src.add_argument_group("degree matrix (exactly one)")
    s.add_argument("--grid", help="entry degrees, rows separated by '/' or ';', e.g. '1 1 2 / 1 1 2'")
    s.add_argument("--grid-file", help="file with one row of entry degrees per line")
    s.add_argument("--fixture", help="named fixture")
    s.add_argument("--linear", help="t,c,n for a generic linear matrix")
    s.add_argument("-n", type=int, dest="n", help="projective dimension for --grid/--grid-file")

    p = argparse.ArgumentParser(prog="detnorm", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"detnorm {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("build", parents=[common, src], help="matrix, minors, D_i Betti tables, Hilbert data")
    v = sub.add_parser("verify", parents=[common, src], help="run the verification suites")
    v.add_argument("--checks", help=f"comma list from {','.join(VERIFY_CHECKS)}")
    v.add_argument("--window", help="degree window for strand checks, e.g. -2..3")
    sc = sub.add_parser("scan", parents=[common], help="resumable conjecture scan (JSON lines)")
    sc.add_argument("--t", dest="ts", help="values of t (default 2,3)")
    sc.add_argument("--c", dest="cs", help="values of c (default 2,3)")
    sc.add_argument("--a", dest="as_", help="values of a (default 0,1)")
    sc.add_argument("--seeds", help="seeds (default: --seed)")
    ch = sub.add_parser("chern", parents=[common], help="Chern classes of N(-H) and the four cases")
    ch.add_argument("--t", dest="ts", help="values of t (default 2..10)")
    sub.add_parser("restrict", parents=[common, src], help="restrict to a general hyperplane")
    return p


_DEFAULTS = {"prime": DEFAULT_PRIME, "seed": 0, "bound": None, "jobs": 1, "fixtures_dir": None,
             "out": None, "grid": None, "grid_file": None, "fixture": None, "linear": None,
             "n": None, "checks": None, "window": None, "ts": None, "cs": None, "as_": None,
             "seeds": None, "json": False}
_INT_KEYS = {"prime", "seed", "bound", "jobs", "n"}
_CONFIG_ALIASES = {"t": "ts", "c": "cs", "a": "as_", "fixtures": "fixtures_dir"}


def resolve_config(args: argparse.Namespace) -> Dict:
    """Defaults, then the config file, then explicit flags."""
    cfg = dict(_DEFAULTS)
    if getattr(args, "config", None):
        try:
            fromfile = read_config(args.config)
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
        for key, val in fromfile.items():
            key = _CONFIG_ALIASES.get(key, key)
            if key not in cfg:
                raise UsageError(f"unknown config key {key!r}")
            if key in _INT_KEYS:
                val = int(val)
            elif key == "json":
                val = val.lower() in ("1", "true", "yes")
            cfg[key] = val
    for key, val in vars(args).items():
        if key in cfg and val is not None and val is not False:
            cfg[key] = val
    cfg["command"] = args.command
    if cfg["prime"] < 3 or any(cfg["prime"] % q == 0 for q in range(2, int(cfg["prime"] ** 0.5) + 1)):
        raise UsageError(f"--prime {cfg['prime']} is not an odd prime")
    if cfg["bound"] is not None and cfg["bound"] < 1:
        raise UsageError("--bound must be at least 1")
    if cfg["jobs"] < 1:
        raise UsageError("--jobs must be at least 1")
    return cfg


def _grid_text(text: str) -> List[List[int]]:
    return parse_grid(text.replace("/", "\n").replace(";", "\n"))


def load_scheme(cfg: Dict) -> tuple:
    """(scheme, fixture or None, source description)."""
    sources = [k for k in ("grid", "grid_file", "fixture", "linear") if cfg.get(k)]
    if len(sources) != 1:
        raise UsageError("give exactly one of --grid, --grid-file, --fixture, --linear")
    field = CoeffField(cfg["prime"])
    seed = cfg["seed"]
    kind = sources[0]
    if kind == "fixture":
        try:
            fx = get_fixture(cfg["fixture"], cfg["fixtures_dir"])
        except (KeyError, ValueError, OSError) as exc:
            raise UsageError(str(exc).strip('"')) from exc
        return fx.scheme(seed, field), fx, {"fixture": fx.name}
    if kind == "linear":
        try:
            t, c, n = _ints(cfg["linear"])
        except ValueError as exc:
            raise UsageError("--linear needs t,c,n") from exc
        deg = DegreeMatrix.linear(t, c, n)
        return build_matrix(deg, seed=seed, field=field), None, {"linear": [t, c, n]}
    if cfg["n"] is None:
        raise UsageError("-n is required with --grid/--grid-file")
    if kind == "grid":
        grid = _grid_text(cfg["grid"])
    else:
        try:
            with open(cfg["grid_file"]) as fh:
                grid = parse_grid(fh.read())
        except OSError as exc:
            raise UsageError(f"cannot read grid file: {exc}") from exc
    deg = DegreeMatrix.from_grid(grid, cfg["n"])
    return build_matrix(deg, seed=seed, field=field), None, {"grid": deg.grid(), "n": cfg["n"]}


# -- commands ------------------------------------------------------------------------

def _params(cfg: Dict) -> Dict:
    return {"prime": cfg["prime"], "seed": cfg["seed"], "bound": cfg["bound"]}


def _scheme_json(s: DetScheme) -> Dict:
    d = s.describe()
    d["grid"] = s.degrees.grid()
    d["entries"] = [[str(e) for e in row] for row in s.matrix]
    return d


def cmd_build(cfg: Dict) -> tuple:
    s, fx, source = load_scheme(cfg)
    t0 = time.time()
    tables = {}
    for i in range(0, s.c + 1):
        tables[f"D_{i}"] = betti(minimize(build_D(i, s.phi)))
    nv = s.ring.nvars
    h = hilbert_from_resolution(minimize(build_D(0, s.phi, check=False)), nv, 10)
    minors = s.minor_ideal_gens
    rec = {"command": "build", "version": __version__, "source": source, "params": _params(cfg),
           "scheme": _scheme_json(s),
           "minors": {"count": len(minors), "degrees": sorted(f.degree for f in minors)},
           "betti": {k: b.to_json()["betti"] for k, b in tables.items()},
           "hilbert": {"numerator": {str(j): v for j, v in sorted(h.numerator.items())},
                       "values": {str(d): v for d, v in sorted(h.values.items()) if d >= 0},
                       "degree": h.degree(s.c), "codim": s.c},
           "timing": {"total": round(time.time() - t0, 3)}}
    ok = True
    if fx is not None:
        rec["expectations"] = _compare_expectations(fx, rec)
        ok = all(v["ok"] for v in rec["expectations"].values())
    text = [f"{s.t}x{s.t + s.c - 1} matrix, c = {s.c}, n = {s.n}, degree {rec['hilbert']['degree']}"]
    for k, b in tables.items():
        text.append(f"{k}:\n{b.render()}")
    return rec, "\n".join(text), ok


def _compare_expectations(fx: Fixture, rec: Dict) -> Dict:
    out = {}
    exp = fx.expect
    if "degree" in exp and "hilbert" in rec:
        got = rec["hilbert"]["degree"]
        out["degree"] = {"expected": exp["degree"], "got": got, "ok": got == exp["degree"]}
    if "betti" in exp and "betti" in rec:
        got = {str(i): {} for i, _, _ in rec["betti"]["D_0"] if i}
        for i, j, v in rec["betti"]["D_0"]:
            if i:
                got[str(i)][str(j)] = v
        out["betti"] = {"expected": exp["betti"], "got": got, "ok": got == exp["betti"]}
    sv = rec.get("checks", {}).get("simplicity")
    if sv:
        for key in ("gate", "simple", "n1", "n2"):
            if exp.get(key) is not None:
                out[key] = {"expected": exp[key], "got": sv[key], "ok": sv[key] == exp[key]}
    return out


def _window(cfg: Dict) -> Optional[List[int]]:
    return _ints(cfg["window"]) if cfg.get("window") else None


def cmd_verify(cfg: Dict) -> tuple:
    s, fx, source = load_scheme(cfg)
    wanted = _ints_or_names(cfg.get("checks"))
    results: Dict[str, Dict] = {}
    timing: Dict[str, float] = {}
    hard_fail = []
    text = []
    window = _window(cfg)
    seed = cfg["seed"]

    def run(name, fn):
        t0 = time.time()
        results[name] = fn()
        timing[name] = round(time.time() - t0, 3)

    if "diagram" in wanted:
        def diagram():
            out = {}
            for i in range(0, s.c + 1):
                dg = diagram_A(s, i, Q="closed", check=False)
                ids = {name: bool(v) for name, v in dg.identities.items()}
                out[str(i)] = {"identities": ids, "ok": all(ids.values())}
            return out
        run("diagram", diagram)
        for i, r in results["diagram"].items():
            if not r["ok"]:
                hard_fail.append(f"diagram i={i}")
        text.append("diagram identities: " + _pf(all(r["ok"] for r in results["diagram"].values())))
    if "cone" in wanted:
        def cone():
            out = {}
            for i in range(0, s.c + 1):
                cx = triple_cone(diagram_A(s, i, Q="closed", check=False).input, verify=False).complex
                try:
                    cx.check()
                    dd = True
                except Exception:
                    dd = False
                ex = rank_exactness(cx, points=10, seed=seed, jobs=1)
                out[str(i)] = {"d_squared_zero": dd, "rank_exact": ex.ok, "label": ex.label,
                               "ok": dd and ex.ok}
            return out
        run("cone", cone)
        for i, r in results["cone"].items():
            if not r["ok"]:
                hard_fail.append(f"cone i={i}")
        text.append("mapping cone d^2 = 0 and exactness: "
                    + _pf(all(r["ok"] for r in results["cone"].values())))
    if "ulrich" in wanted:
        deg = s.degrees
        if deg.is_linear and all(x == 1 for x in deg.a) and all(x == 0 for x in deg.b):
            run("ulrich", lambda: ulrich_certificate(s).to_json())
            ok = all(results["ulrich"]["items"].values())
            if not ok:
                hard_fail.append("ulrich")
            text.append("Ulrich certificate: " + _pf(ok))
        else:
            results["ulrich"] = {"verdict": "not applicable (entries not all linear)"}
            text.append("Ulrich certificate: not applicable")
    if "simplicity" in wanted:
        run("simplicity", lambda: ck.simplicity_check(s, bound=cfg["bound"]).to_json())
        sv = results["simplicity"]
        text.append(f"simplicity: gate {'holds' if sv['gate'] else 'fails'}, "
                    f"dim 0Hom(I/I^2, I/I^2) = {sv['endo_dim']}")
    if "vanishing" in wanted:
        run("vanishing", lambda: [v.to_json() for v in
                                  ck.vanishing_suite(s, window, seed, cfg["bound"])])
        for v in results["vanishing"]:
            if v["verdict"] == "FAIL":
                hard_fail.append(v["name"])
            text.append(f"{v['name']}: {v['verdict']}")
    if "iso" in wanted:
        run("iso", lambda: [c.to_json() for c in ck.isomorphism_suite(s, window, seed)])
        for v in results["iso"]:
            if v["verdict"] == "FAIL":
                hard_fail.append(v["name"])
            text.append(f"{v['name']} {v['params']}: {v['verdict']}")
    rec = {"command": "verify", "version": __version__, "source": source, "params": _params(cfg),
           "scheme": s.describe(), "checks": results, "failures": hard_fail, "timing": timing}
    if fx is not None:
        rec["expectations"] = _compare_expectations(fx, rec)
        for key, e in rec["expectations"].items():
            text.append(f"expected {key} = {e['expected']}: {'matches' if e['ok'] else 'MISMATCH'}")
            if not e["ok"]:
                hard_fail.append(f"expectation {key}")
    return rec, "\n".join(text), not hard_fail


def _pf(ok: bool) -> str:
    return "pass" if ok else "FAIL"


def _ints_or_names(text: Optional[str]) -> Sequence[str]:
    if not text:
        return DEFAULT_CHECKS
    names = [x.strip() for x in text.split(",") if x.strip()]
    bad = [x for x in names if x not in VERIFY_CHECKS]
    if bad:
        raise UsageError(f"unknown check(s) {', '.join(bad)}; choose from {', '.join(VERIFY_CHECKS)}")
    return names


def cmd_scan(cfg: Dict) -> tuple:
    out = cfg["out"] or "scan.jsonl"
    ts = _ints(cfg["ts"] or "2,3")
    cs = _ints(cfg["cs"] or "2,3")
    as_ = _ints(cfg["as_"] or "0,1")
    seeds = _ints(cfg["seeds"]) if cfg["seeds"] else [cfg["seed"]]
    t0 = time.time()
    try:
        written = ck.conjecture_scan(ts, cs, as_, seeds, out, cfg["prime"], cfg["bound"],
                                     jobs=cfg["jobs"])
        log = ck.read_log(out)
    except OSError as exc:
        raise UsageError(f"scan log: {exc}") from exc
    verdicts: Dict[str, int] = {}
    for rec in log.values():
        verdicts[rec["verdict"]] = verdicts.get(rec["verdict"], 0) + 1
    summary = {"command": "scan", "version": __version__, "log": out, "params": _params(cfg),
               "grid": {"t": ts, "c": cs, "a": as_, "seeds": seeds},
               "new_records": len(written), "total_records": len(log), "verdicts": verdicts,
               "timing": {"total": round(time.time() - t0, 3)}}
    text = [f"{len(written)} new record(s), {len(log)} in {out}"]
    text += [f"  {k}: {v}" for k, v in sorted(verdicts.items())]
    ok = not verdicts.get("inconsistent")
    return summary, "\n".join(text), ok, True


def cmd_chern(cfg: Dict) -> tuple:
    ts = _ints(cfg["ts"] or "2..10")
    if any(t < 2 for t in ts):
        raise UsageError("t must be at least 2")
    t0 = time.time()
    reports = []
    ok = True
    for t in ts:
        r = exclude_cases(t)
        e = expected_chern(t)
        agrees = r.actual.c1 == e.c1 and r.actual.c2 == e.c2
        ok = ok and agrees and r.all_excluded
        d = r.to_json()
        d["closed_form_agrees"] = agrees
        reports.append((d, r.render()))
    rec = {"command": "chern", "version": __version__, "reports": [d for d, _ in reports],
           "timing": {"total": round(time.time() - t0, 3)}}
    return rec, "\n".join(txt for _, txt in reports), ok


def cmd_restrict(cfg: Dict) -> tuple:
    s, fx, source = load_scheme(cfg)
    t0 = time.time()
    try:
        r = ck.hyperplane_restrict(s, cfg["seed"])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    s2 = r.scheme
    b1 = betti(minimize(build_D(0, s.phi, check=False)))
    b2 = betti(minimize(build_D(0, s2.phi, check=False)))
    h1 = hilbert_from_resolution(minimize(build_D(0, s.phi, check=False)), s.ring.nvars)
    h2 = hilbert_from_resolution(minimize(build_D(0, s2.phi, check=False)), s2.ring.nvars)
    ext = {}
    for i in range(0, s.c + 1):
        e1 = ext1_resolution(s, i, Q="closed", check=False).betti()
        e2 = ext1_resolution(s2, i, Q="closed", check=False).betti()
        ext[str(i)] = {"before": e1.to_json()["betti"], "after": e2.to_json()["betti"], "agree": e1 == e2}
    agree = b1 == b2 and all(e["agree"] for e in ext.values())
    gate = ck.depth_gate(s, 3, cfg["seed"])
    rec = {"command": "restrict", "version": __version__, "source": source, "params": _params(cfg),
           "before": {"scheme": _scheme_json(s), "betti": b1.to_json()["betti"], "degree": h1.degree(s.c)},
           "after": {"scheme": _scheme_json(s2), "betti": b2.to_json()["betti"], "degree": h2.degree(s2.c)},
           "ext1": ext, "gate": gate.to_json(),
           "substitution": [str(f) for f in r.images], "resamples": r.resamples,
           "betti_agree": agree, "timing": {"total": round(time.time() - t0, 3)}}
    text = [f"P^{s.n} -> P^{s2.n} (x{s.n} -> {r.images[-1]}), {r.resamples} resample(s)",
            f"I before:\n{b1.render()}\nI after:\n{b2.render()}"]
    for i, e in ext.items():
        text.append(f"Ext^1(M, S_{i}M) resolution: {'same' if e['agree'] else 'DIFFERENT'} Betti table")
    text.append(f"depth_J A >= 3: {'yes' if gate.passed else 'no'}; Betti tables "
                + ("agree" if agree else "differ"))
    # a difference is only a failure when the gate holds
    return rec, "\n".join(text), agree or not gate.passed


HANDLERS = {"build": cmd_build, "verify": cmd_verify, "scan": cmd_scan, "chern": cmd_chern,
            "restrict": cmd_restrict}


def dumps(rec: Dict) -> str:
    return json.dumps(rec, sort_keys=True, indent=1)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve_config(args)
        result = HANDLERS[cfg["command"]](cfg)
    except (UsageError, DegreeError) as exc:
        print(f"detnorm: error: {exc}", file=sys.stderr)
        return 2
    rec, text, ok = result[:3]
    log_written = len(result) > 3
    if cfg["out"] and not log_written:
        try:
            with open(cfg["out"], "w") as fh:
                fh.write(dumps(rec) + "\n")
        except OSError as exc:
            print(f"detnorm: error: {exc}", file=sys.stderr)
            return 2
        print(text)
    elif cfg["json"]:
        print(dumps(rec))
    else:
        print(text)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
