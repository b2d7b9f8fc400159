"""
Command-line front end.

    ctphan pair verify --kind ct --type A2 --q 3
    ctphan group order --type SL3 --q 2
    ctphan amalgam check FILE
    ctphan amalgam normalize FILE
    ctphan amalgam iso A B
    ctphan amalgam classify --diagram FILE --kind ct

Exit codes: 0 ok / isomorphic, 1 distinct or invalid, 2 budget, 3 malformed input.
"""

from __future__ import annotations

import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import click

from .amalgam import (
    AmalgamSpec,
    SpecError,
    class_count,
    classify,
    iso_decide,
    noncollapse_precheck,
    normalize,
    orientation_check,
)
from .coeffsys import CoordinateError
from .diagram import Diagram, DiagramError, validate_3_spherical
from .ffield import FieldError
from .matgrp import SLOW_THRESHOLD, BudgetExceeded, classical_order, mat_to_json
from .rootdetect import classify_sylows, sign_correlation, tag_counts, torus_uniqueness
from .standard_pairs import build_pair, phan_tori, vertex_group

EXIT_OK, EXIT_FAIL, EXIT_BUDGET, EXIT_INPUT = 0, 1, 2, 3


class Malformed(Exception):
    pass


class Outcome(Exception):
    """Raised by commands to carry the report and exit code out of click."""

    def __init__(self, code, report, text):
        super().__init__(code)
        self.code, self.report, self.text = code, report, text


def _finish(ctx, command, status, payload, text, code=EXIT_OK):
    report = {"v": 1, "command": command, "status": status, "payload": payload}
    if ctx.obj["timing"]:
        report["timing"] = {"seconds": round(time.perf_counter() - ctx.obj["t0"], 6)}
    raise Outcome(code, report, text)


def _load(path):
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise Malformed(f"cannot read {path}: {exc}") from None
    if not isinstance(obj, dict) or obj.get("v") != 1:
        raise Malformed(f"{path}: top-level \"v\": 1 is required")
    return obj


def _gate(ctx, size):
    if size > SLOW_THRESHOLD and not ctx.obj["slow"]:
        raise BudgetExceeded(f"{size} elements exceeds {SLOW_THRESHOLD}; pass --slow", size)


@click.group()
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.option("--slow", is_flag=True, help="Allow enumerations above 10^6 elements.")
@click.option("--threads", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--timing", is_flag=True, help="Add wall-clock timing to the report.")
@click.pass_context
def main(ctx, as_json, slow, threads, timing):
    """Curtis-Tits and Phan amalgams over small finite fields."""
    ctx.obj = {"json": as_json, "slow": slow, "threads": threads, "timing": timing,
               "t0": time.perf_counter()}


# -- pair ---------------------------------------------------------------------


@main.group()
def pair():
    """Standard pairs."""


@pair.command("verify")
@click.option("--kind", type=click.Choice(["ct", "phan"]), required=True)
@click.option("--type", "ptype", type=click.Choice(["A2", "C2", "TA3"]), required=True)
@click.option("--q", type=int, required=True)
@click.pass_context
def pair_verify(ctx, kind, ptype, q):
    """Orders, Sylow verdicts (Curtis-Tits) or tori (Phan) of a standard pair."""
    P = build_pair(kind, ptype, q)
    _gate(ctx, P.expected_order())
    amb = P.ambient
    payload = {"kind": kind, "type": ptype, "q": q, "ambient_order": amb.order,
               "expected_order": P.expected_order(),
               "image_orders": [P.images[0].order, P.images[1].order]}
    lines = [f"{kind} {ptype}({q}): ambient {amb.order} (expected {P.expected_order()})"]
    ok = amb.order == P.expected_order()
    if kind == "ct":
        with ThreadPoolExecutor(ctx.obj["threads"]) as pool:
            tables = list(pool.map(lambda side: classify_sylows(P, side), (1, 2)))
        payload["sides"] = []
        for side, table in zip((1, 2), tables):
            payload["sides"].append({"side": side, "verdicts": [e.to_json(P.field) for e in table]})
            counts = tag_counts(table)
            lines.append(f"  side {side}: " + ", ".join(f"{k} x{v}" for k, v in sorted(counts.items())))
            ok &= sum(v for k, v in counts.items() if k.startswith("Parabolic")) == 2
        payload["sign_correlation"] = sign_correlation(P)
    else:
        tori = phan_tori(P)
        unique, detail = torus_uniqueness(P)
        payload["tori"] = {str(k): [mat_to_json(P.field, m) for m in T.elements] for k, T in tori.items()}
        payload["torus_uniqueness"] = {"holds": unique, "sides": {str(k): v for k, v in detail.items()}}
        lines.append(f"  tori of order {[T.order for T in tori.values()]}; uniqueness {unique}")
        for k, v in detail.items():
            lines.append(f"  side {k}: {v['normalized']} of {v['tori']} tori normalized")
    _finish(ctx, "pair verify", "ok" if ok else "mismatch", payload, "\n".join(lines),
            EXIT_OK if ok else EXIT_FAIL)


# -- group --------------------------------------------------------------------


@main.group()
def group():
    """Classical groups."""


_ENUMERATE = {
    "SL2": lambda q: vertex_group("ct", q),
    "SU2": lambda q: vertex_group("phan", q),
    "SL3": lambda q: build_pair("ct", "A2", q).ambient,
    "Sp4": lambda q: build_pair("ct", "C2", q).ambient,
    "SU3": lambda q: build_pair("phan", "A2", q).ambient,
    "SU4": lambda q: build_pair("ct", "TA3", q).ambient,
}


@group.command("order")
@click.option("--type", "gtype", type=click.Choice(sorted(_ENUMERATE)), required=True)
@click.option("--q", type=int, required=True)
@click.option("--enumerate", "enum", is_flag=True, help="Also enumerate the group by closure.")
@click.pass_context
def group_order(ctx, gtype, q, enum):
    """Order of SL2, SU2, SL3, Sp4, SU3 or SU4 over F_q."""
    n = classical_order(gtype, q)
    payload = {"type": gtype, "q": q, "order": n}
    text = str(n)
    ok = True
    if enum:
        _gate(ctx, n)
        m = _ENUMERATE[gtype](q).order
        payload["enumerated"] = m
        ok = m == n
        text += f" (enumerated {m})"
    _finish(ctx, "group order", "ok" if ok else "mismatch", payload, text,
            EXIT_OK if ok else EXIT_FAIL)


# -- amalgam ------------------------------------------------------------------


@main.group()
def amalgam():
    """Amalgams in coordinate form."""


def _spec(path):
    return AmalgamSpec.from_json(_load(path))


@amalgam.command("check")
@click.argument("path")
@click.pass_context
def amalgam_check(ctx, path):
    """Validate an amalgam and detect its weak system or system of tori."""
    spec = _spec(path)
    d = spec.diagram
    for a, b in d.edge_pairs():
        _gate(ctx, build_pair(spec.kind, d.edge(a, b).type,
                              spec.spaces[d.edge(a, b).tail].vq).expected_order())
    det = noncollapse_precheck(spec)
    payload = {"valid": True, "noncollapse": det.ok}
    if det.ok:
        payload["system"] = {str(v): [sorted(x) for x in s] if spec.kind == "ct" else sorted(s)
                             for v, s in det.system.items()}
    else:
        payload["witness"] = det.witness
    lines = [f"valid {spec.kind} amalgam; noncollapse precheck {'ok' if det.ok else 'FAILED'}"]
    if spec.kind == "ct":
        orientable, cycle_edge = orientation_check(spec)
        payload["orientable"] = orientable
        lines.append("orientable" if orientable else f"non-orientable (closing edge {list(cycle_edge)})")
    _finish(ctx, "amalgam check", "ok" if det.ok else "collapse", payload, "\n".join(lines),
            EXIT_OK if det.ok else EXIT_FAIL)


@amalgam.command("normalize")
@click.argument("path")
@click.pass_context
def amalgam_normalize(ctx, path):
    """Normal form, kappa invariant and isomorphism witness."""
    spec = _spec(path)
    nf, k, w = normalize(spec)
    payload = {"normal_form": nf.to_json(), "kappa": k.to_json(), "witness": w.to_json(),
               "tree": k.tree.to_json()}
    text = "kappa " + json.dumps(k.to_json()["edges"])
    _finish(ctx, "amalgam normalize", "ok", payload, text)


@amalgam.command("iso")
@click.argument("a")
@click.argument("b")
@click.pass_context
def amalgam_iso(ctx, a, b):
    """Decide isomorphism by comparing kappa invariants."""
    same, ka, kb = iso_decide(_spec(a), _spec(b))
    payload = {"isomorphic": same, "kappa": [ka.to_json(), kb.to_json()]}
    _finish(ctx, "amalgam iso", "isomorphic" if same else "distinct", payload,
            "isomorphic" if same else "distinct", EXIT_OK if same else EXIT_FAIL)


@amalgam.command("classify")
@click.option("--diagram", "path", required=True)
@click.option("--kind", type=click.Choice(["ct", "phan"]), required=True)
@click.pass_context
def amalgam_classify(ctx, path, kind):
    """All isomorphism classes over a diagram."""
    d = Diagram.from_json(_load(path))
    bad = validate_3_spherical(d)
    if bad is not None:
        payload = {"valid": False, "violation": bad.to_json()}
        _finish(ctx, "amalgam classify", "invalid", payload,
                f"not 3-spherical: {bad.reason} at {list(bad.where)}", EXIT_FAIL)
    classes = classify(d, kind)
    payload = {"count": class_count(d, kind), "classes": [c.to_json() for c in classes]}
    lines = [f"{len(classes)} classes"]
    lines += ["  " + json.dumps(c.to_json()["edges"]) for c in classes]
    _finish(ctx, "amalgam classify", "ok", payload, "\n".join(lines))


# -- entry point --------------------------------------------------------------


def run(argv=None, out=None):
    """Run the CLI and return (exit code, report or None)."""
    out = sys.stdout if out is None else out
    as_json = "--json" in (argv if argv is not None else sys.argv[1:])
    try:
        main.main(args=argv, prog_name="ctphan", standalone_mode=False)
        return EXIT_OK, None
    except Outcome as o:
        out.write((json.dumps(o.report, sort_keys=True) if as_json else o.text) + "\n")
        return o.code, o.report
    except BudgetExceeded as exc:
        return _error(out, as_json, EXIT_BUDGET, "budget", str(exc))
    except (Malformed, SpecError, DiagramError, CoordinateError, FieldError) as exc:
        return _error(out, as_json, EXIT_INPUT, "malformed", str(exc))
    except click.exceptions.Exit as exc:
        return exc.exit_code, None
    except click.ClickException as exc:
        return _error(out, as_json, EXIT_INPUT, "malformed", exc.format_message())


def _error(out, as_json, code, status, message):
    report = {"v": 1, "status": status, "error": message}
    if as_json:
        out.write(json.dumps(report, sort_keys=True) + "\n")
    else:
        sys.stderr.write(f"error: {message}\n")
    return code, report


def entry():
    code, _ = run()
    sys.exit(code)


if __name__ == "__main__":
    entry()
