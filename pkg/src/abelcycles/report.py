"""Text, CSV and JSON rendering of analysis results.

Every report carries the full numerics configuration.  CSV reports put it
in leading ``#`` comment lines ahead of the fixed header.
"""

from __future__ import annotations

import csv
import io
import json
import math

CENSUS_HEADER = ["x0", "dP", "stability", "multiplicity", "residual"]
SWEEP_HEADER = ["param", "x0", "stability", "multiplicity", "branch_id", "event"]


def _clean(obj):
    """JSON-safe copy: tuples become lists, non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        return _clean(obj.item())
    return obj


def to_json(body):
    return json.dumps(_clean(body), sort_keys=True, indent=2) + "\n"


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k in sorted(obj):
            yield from _flatten(obj[k], f"{prefix}{k}.")
    elif isinstance(obj, list) and obj and isinstance(obj[0], (dict, list)):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}{i}.")
    else:
        yield prefix[:-1], obj


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, list):
        return ", ".join(_fmt(x) for x in v)
    return str(v)


def to_text(body):
    body = _clean(body)
    lines = [f"command: {body['command']}"]
    for k, v in _flatten(body.get("equation", {}), "equation."):
        lines.append(f"{k}: {_fmt(v)}")
    if "error" in body:
        lines.append(f"error: {body['error']['type']}: {body['error']['message']}")
    for k, v in _flatten(body.get("result", {})):
        lines.append(f"{k}: {_fmt(v)}")
    for k, v in _flatten(body["numerics"], "numerics."):
        lines.append(f"{k}: {_fmt(v)}")
    lines.append(f"seed: {body['seed']}")
    return "\n".join(lines) + "\n"


def _csv(header, rows, body):
    buf = io.StringIO()
    buf.write(f"# command={body['command']}\n")
    buf.write(f"# equation={json.dumps(_clean(body.get('equation')), sort_keys=True)}\n")
    buf.write(f"# numerics={json.dumps(_clean(body['numerics']), sort_keys=True)}\n")
    buf.write(f"# seed={body['seed']}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def census_rows(census):
    return [(c.x0, c.dP, c.stability.value, c.multiplicity, c.residual) for c in census.cycles]


def sweep_rows(result):
    events = {}
    for e in result.events:
        for b in e.branches:
            events.setdefault(b, []).append(e)
    rows = []
    for br in result.branches:
        for k, (p, x) in enumerate(br.points):
            tag = ""
            for e in events.get(br.branch_id, []):
                edge = k == len(br.points) - 1 and p == e.bracket[0]
                edge = edge or (k == 0 and p == e.bracket[1])
                if edge:
                    tag = e.kind
            samp = dict(result.samples)[p]
            mult = next((c.multiplicity for c in samp.cycles if c.x0 == x), 1)
            rows.append((p, x, br.stability.value, mult, br.branch_id, tag))
    for e in result.events:
        if e.kind == "HopfLikeAtOrigin":
            rows.append((e.param, 0.0, "origin", "", -1, e.kind))
    rows.sort(key=lambda r: (r[0], r[4], r[1]))
    return rows


def to_csv(body, obj):
    if "error" in body:
        return _csv(["error", "message"], [(body["error"]["type"], body["error"]["message"])],
                    body)
    cmd = body["command"]
    if cmd == "cycles" and obj is not None:
        return _csv(CENSUS_HEADER, census_rows(obj.census), body)
    if cmd == "sharpness" and obj is not None:
        return _csv(CENSUS_HEADER, census_rows(obj.census), body)
    if cmd == "sweep" and obj is not None:
        return _csv(SWEEP_HEADER, sweep_rows(obj), body)
    return _csv(["key", "value"], list(_flatten(_clean(body["result"]))), body)


def render(body, fmt, obj=None):
    if fmt == "json":
        return to_json(body)
    if fmt == "csv":
        return to_csv(body, obj)
    return to_text(body)
