"""
Command-line front end.

Every command writes one JSON document (an array of documents when ``--q``
is a range such as ``5..11``), or CSV / plain text / DOT where that makes
sense.  Progress of long searches goes to standard error.  The exit status is
0 when every agreement flag in the output is true, 1 when one is false, 2 on
bad arguments and 3 when a search was interrupted.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from typing import Any, Callable

from . import closure_order as co
from . import product_maps as pm
from . import siegel as sg
from .dieudonne import standard_object_a2, eta, final_filtration
from .strata_index import (
    GammaUV, Signature, bruhat_leq_reps, count_by_dimension, count_formula_b2,
    enumerate_gamma, gaussian_binomial, stratum_record,
)
from .symmetric_group import bruhat_leq

FORMATS = ("json", "csv", "dot", "text")


class UsageError(Exception):
    pass


def parse_q(text: str) -> list[int]:
    """``"7"`` or ``"5..11"``."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            qs = list(range(int(lo), int(hi) + 1))
        else:
            qs = [int(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad q value {text!r}") from None
    if not qs or min(qs) < 2:
        raise argparse.ArgumentTypeError("q must be at least 2")
    return qs


def _lab(g: GammaUV) -> list[int]:
    return [g.u, g.v]


class _Progress:
    def __init__(self, enabled: bool):
        self.enabled = enabled
        self.last = 0.0

    def __call__(self, msg: str) -> None:
        now = time.monotonic()
        if self.enabled and now - self.last > 1.0:
            self.last = now
            print(msg, file=sys.stderr, flush=True)


# ----------------------------------------------------------------- commands

def cmd_strata(q: int, args) -> tuple[dict, bool]:
    gammas = enumerate_gamma(q)
    sig = Signature(q - 2, 2)
    max_d = 2 * (q - 2)
    counts = {d: count_by_dimension(sig, d) for d in range(max_d + 1)}
    gauss = gaussian_binomial(q, 2)
    agree = all(counts[d] == count_formula_b2(q, d) == gauss[d] for d in counts)
    doc = {
        "q": q,
        "strata": [stratum_record(g) for g in gammas],
        "counts": [{"dim": d, "n": n} for d, n in counts.items()],
        "total": sum(counts.values()),
        "agree": agree,
    }
    return doc, agree


def cmd_bruhat(q: int, args) -> tuple[dict, bool]:
    gammas = enumerate_gamma(q)
    reps = [g.to_rep() for g in gammas]
    perms = [g.permutation() for g in gammas]
    N = len(gammas)
    agree = all(bruhat_leq_reps(reps[i], reps[j]) == bruhat_leq(perms[i], perms[j])
                for i in range(N) for j in range(N))
    pairs = {(i, j) for i in range(N) for j in range(N) if i != j and bruhat_leq_reps(reps[i], reps[j])}
    covers = sorted(co._reduce(N, pairs))
    doc = {
        "q": q,
        "covers": [{"lower": _lab(gammas[a]), "upper": _lab(gammas[b]), "kind": "Bruhat"}
                   for a, b in covers],
        "agree": agree,
    }
    return doc, agree


def _checkpoint_io(path: str | None, q: int):
    if not path:
        return None, None
    target = path if "{q}" not in path else path.format(q=q)
    resume = None
    if os.path.exists(target):
        with open(target) as fh:
            resume = json.load(fh)
        print(f"resuming from {target}: {len(resume['done'])} sources done", file=sys.stderr)

    def save(state: dict) -> None:
        tmp = target + ".tmp"
        with open(tmp, "w") as fh:
            json.dump(state, fh)
        os.replace(tmp, target)

    return resume, save


def _closure_kwargs(q: int, args) -> dict:
    resume, save = _checkpoint_io(args.checkpoint, q)
    return {"resume": resume, "checkpoint": save}


def cmd_closure(q: int, args) -> tuple[dict, bool]:
    covers = co.closure_poset(q, args.strategy, args.threads, _Progress(not args.quiet),
                              **_closure_kwargs(q, args))
    nb = [c for c in covers if c.kind == "NonBruhat"]
    doc = {
        "q": q,
        "strategy": args.strategy,
        "covers": [{"lower": _lab(c.lower), "upper": _lab(c.upper), "kind": c.kind,
                    "witness": list(c.witness.images) if c.witness else None} for c in covers],
        "non_bruhat_count": len(nb),
    }
    doc["_covers"] = covers
    return doc, True


def cmd_conjecture(q: int, args) -> tuple[dict, bool]:
    rep = co.verify_conjecture(q, args.threads, args.strategy, _Progress(not args.quiet),
                               **_closure_kwargs(q, args))
    return rep.to_json(), rep.holds


def cmd_scan(q: int, args) -> tuple[dict, bool]:
    found = co.single_transposition_scan(q, q)[q]
    primary = {(r.lower, r.upper) for r in co.theorem_relations(q) if r.family == "primary"}
    key = lambda p: (p[0].sort_key(), p[1].sort_key())  # noqa: E731
    doc = {
        "q": q,
        "relations": [{"lower": _lab(a), "upper": _lab(b)} for a, b in sorted(found, key=key)],
        "extra": [{"lower": _lab(a), "upper": _lab(b)} for a, b in sorted(found - primary, key=key)],
        "missing": [{"lower": _lab(a), "upper": _lab(b)} for a, b in sorted(primary - found, key=key)],
        "agree": found == primary,
    }
    return doc, doc["agree"]


def cmd_forgetful(q: int, args) -> tuple[dict, bool]:
    rows = []
    ok = True
    for g in enumerate_gamma(q):
        w = sg.psi(q, g.u, g.v)
        module = standard_object_a2(q, g.u, g.v)
        chain = final_filtration(module)
        e = eta(module, chain)
        oracle = sg.psi_oracle(q, g.u, g.v)
        row = {
            "u": g.u, "v": g.v, "omega": list(w.images),
            "agree": w == oracle,
            "invariants": sg.is_siegel_perm(w),
            "eta_duality": all(e[j] + q == e[2 * q - j] + j for j in range(2 * q + 1)),
            "ss_contained": sg.ss_contained(w),
            "f_nilpotent": sg.f_nilpotent(w),
        }
        ok &= row["agree"] and row["invariants"] and row["eta_duality"]
        rows.append(row)
    return {"q": q, "rows": rows, "agree": ok}, ok


def cmd_minimal_eo(q: int, args) -> tuple[dict, bool]:
    rows = []
    for p in sg.enumerate_profiles(q, args.max_r):
        w = sg.minimal_omega(p)
        rows.append({"profile": list(p.n_list), "blocks": [list(b) for b in p.blocks()],
                     "omega": list(w.images), "f_nilpotent": sg.f_nilpotent(w)})
    return {"q": q, "profiles": rows}, True


def cmd_ss_report(q: int, args) -> tuple[dict, bool]:
    return {"q": q, "strata": sg.classification_report(q, args.max_r)}, True


def cmd_product(args) -> tuple[Any, bool]:
    kind = args.kind
    if kind == "1x1":
        _need(args, "m", "a", "n", "b")
        f = pm.phi_1x1(args.m, args.a, args.n, args.b)
        o = pm.phi_1x1_oracle(args.m, args.a, args.n, args.b)
        params = {"m": args.m, "a": args.a, "n": args.n, "b": args.b}
    elif kind == "2x0":
        _need(args, "m", "u", "v", "n")
        f = pm.phi_2x0(args.m, args.u, args.v, args.n)
        o = pm.phi_2x0_oracle(args.m, args.u, args.v, args.n)
        params = {"m": args.m, "u": args.u, "v": args.v, "n": args.n}
    elif kind == "certified":
        if not args.q:
            raise UsageError("--kind certified needs --q")
        docs = []
        ok = True
        for q in args.q:
            for g, chain in pm.certified_ss_intersections(q).items():
                ok &= pm.verify_certificate(g, chain)
                docs.append({"q": q, "stratum": {"u": g.u, "v": g.v}, "certificate": chain})
        return docs, ok
    else:
        raise UsageError(f"unknown product kind {kind!r}")
    doc = {"kind": kind, "params": params, "q": f.q,
           "formula": {"u": f.u, "v": f.v}, "oracle": {"u": o.u, "v": o.v}, "agree": f == o}
    return doc, doc["agree"]


def _need(args, *names: str) -> None:
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError("missing " + ", ".join("--" + n for n in missing))


PER_Q: dict[str, Callable] = {
    "strata": cmd_strata,
    "bruhat": cmd_bruhat,
    "closure": cmd_closure,
    "conjecture": cmd_conjecture,
    "scan": cmd_scan,
    "forgetful": cmd_forgetful,
    "minimal-eo": cmd_minimal_eo,
    "ss-report": cmd_ss_report,
}


# ---------------------------------------------------------------- rendering

def _clean(doc: Any) -> Any:
    if isinstance(doc, dict):
        return {k: _clean(v) for k, v in doc.items() if not k.startswith("_")}
    if isinstance(doc, list):
        return [_clean(x) for x in doc]
    return doc


def _table(command: str, doc: dict) -> tuple[list[str], list[list[Any]]]:
    """Flatten one document to CSV rows."""
    q = doc.get("q")
    if command == "strata":
        return ["q", "u", "v", "dim"], [[q, s["u"], s["v"], s["dim"]] for s in doc["strata"]]
    if command in ("bruhat", "closure"):
        return (["q", "lower_u", "lower_v", "upper_u", "upper_v", "kind"],
                [[q, *c["lower"], *c["upper"], c["kind"]] for c in doc["covers"]])
    if command == "conjecture":
        return (["q", "holds", "lower_u", "lower_v", "upper_u", "upper_v"],
                [[q, doc["holds"], *c["lower"], *c["upper"]] for c in doc["non_bruhat_covers"]]
                or [[q, doc["holds"], "", "", "", ""]])
    if command == "scan":
        return (["q", "lower_u", "lower_v", "upper_u", "upper_v", "agree"],
                [[q, *r["lower"], *r["upper"], doc["agree"]] for r in doc["relations"]])
    if command == "forgetful":
        return (["q", "u", "v", "omega", "agree", "invariants", "ss_contained", "f_nilpotent"],
                [[q, r["u"], r["v"], " ".join(map(str, r["omega"])), r["agree"], r["invariants"],
                  r["ss_contained"], r["f_nilpotent"]] for r in doc["rows"]])
    if command == "minimal-eo":
        return (["q", "profile", "omega", "f_nilpotent"],
                [[q, " ".join(map(str, r["profile"])), " ".join(map(str, r["omega"])),
                  r["f_nilpotent"]] for r in doc["profiles"]])
    if command == "ss-report":
        return (["q", "u", "v", "dim", "verdict", "provenance"],
                [[q, r["u"], r["v"], r["dim"], r["verdict"], "; ".join(r["provenance"])]
                 for r in doc["strata"]])
    if command == "product":
        if "certificate" in doc:
            return (["q", "u", "v", "certificate"],
                    [[q, doc["stratum"]["u"], doc["stratum"]["v"],
                      " -> ".join(s["map"] for s in doc["certificate"])]])
        return (["kind", "params", "q", "formula_u", "formula_v", "oracle_u", "oracle_v", "agree"],
                [[doc["kind"], json.dumps(doc["params"], sort_keys=True), q, doc["formula"]["u"],
                  doc["formula"]["v"], doc["oracle"]["u"], doc["oracle"]["v"], doc["agree"]]])
    raise UsageError(f"no CSV layout for {command}")


def render(command: str, docs: list[dict], fmt: str, single: bool) -> str:
    if fmt == "json":
        payload = _clean(docs[0] if single else docs)
        return json.dumps(payload, indent=2) + "\n"
    if fmt == "dot":
        if command == "closure":
            return "".join(co.poset_to_dot(d["q"], d["_covers"]) for d in docs)
        if command == "bruhat":
            out = []
            for d in docs:
                q = d["q"]
                covers = [co.CoverRelation(GammaUV(q, *c["lower"]), GammaUV(q, *c["upper"]), "Bruhat")
                          for c in d["covers"]]
                out.append(co.poset_to_dot(q, covers))
            return "".join(out)
        raise UsageError(f"DOT output is only available for closure and bruhat, not {command}")
    rows: list[list[Any]] = []
    header: list[str] = []
    for d in docs:
        header, r = _table(command, d)
        rows += r
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return buf.getvalue()
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)] if rows else [len(h) for h in header]
    lines = ["  ".join(str(x).ljust(wd) for x, wd in zip(line, widths)).rstrip()
             for line in [header] + rows]
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="eostrata", description=__doc__.strip().splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, q_required=True):
        sp.add_argument("--q", type=parse_q, required=q_required, help="q or a range a..b")
        sp.add_argument("--format", choices=FORMATS, default="json")
        sp.add_argument("--out", help="write here instead of standard output")
        sp.add_argument("--quiet", action="store_true", help="no progress on standard error")

    for name in ("strata", "bruhat", "forgetful"):
        common(sub.add_parser(name))
    for name in ("closure", "conjecture"):
        sp = sub.add_parser(name)
        common(sp)
        sp.add_argument("--threads", type=int, default=None)
        sp.add_argument("--strategy", choices=co.STRATEGIES, default="pruned")
        sp.add_argument("--checkpoint", help="JSON file for partial progress; '{q}' is replaced by q")
    sp = sub.add_parser("scan")
    common(sp, q_required=False)
    sp.add_argument("--max-q", type=int, help="scan every q from 3 to this value")
    for name in ("minimal-eo", "ss-report"):
        sp = sub.add_parser(name)
        common(sp)
        sp.add_argument("--max-r", type=int, default=None, help="limit profiles to this many blocks")
    sp = sub.add_parser("product")
    common(sp, q_required=False)
    sp.add_argument("--kind", choices=("1x1", "2x0", "certified"), required=True)
    for name in ("m", "a", "n", "b", "u", "v"):
        sp.add_argument(f"--{name}", type=int)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", None) is not None and args.threads < 1:
        parser.error("--threads must be at least 1")
    try:
        if args.command == "product":
            result, ok = cmd_product(args)
            docs = result if isinstance(result, list) else [result]
            single = not isinstance(result, list)
        else:
            if args.command == "scan":
                if args.max_q is not None:
                    qs = list(range(3, args.max_q + 1))
                elif args.q:
                    qs = args.q
                else:
                    raise UsageError("scan needs --max-q or --q")
                if min(qs) < 3:
                    raise UsageError("scan needs q >= 3")
            else:
                qs = args.q
            single = args.command != "scan" and len(qs) == 1
            docs = []
            ok = True
            for q in qs:
                doc, flag = PER_Q[args.command](q, args)
                docs.append(doc)
                ok &= flag
        text = render(args.command, docs, args.format, single)
    except UsageError as exc:
        print(f"eostrata: {exc}", file=sys.stderr)
        return 2
    except (ValueError, sg.ProfileError) as exc:
        print(f"eostrata: {exc}", file=sys.stderr)
        return 2
    except (KeyboardInterrupt, MemoryError) as exc:
        where = f"; partial progress is in {args.checkpoint}" if getattr(args, "checkpoint", None) else ""
        print(f"eostrata: search interrupted ({type(exc).__name__}){where}", file=sys.stderr)
        return 3
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
