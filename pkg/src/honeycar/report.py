"""Serialization of sweep tables, decision reports and conformance notes."""
from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import fields, is_dataclass
from typing import Iterable, Sequence

from .model import HoneypotKind, PenaltyMode, SweepRow, Variant

SCHEMA_VERSION = 1
SWEEP_HEADER = ("variant", "mode", "kind", "m", "subset", "nu", "g", "c", "S", "U_D")

# Case-study claims as published, used only for side-by-side comparison.
PUBLISHED_CLAIMS = {
    "lih_a_best_m": 6,
    "hih_a_utility_sign": "negative for every m",
    "b_negative_value_from_m": 3,
    "b_best": ("hih", 2),
    "hih_over_lih_utility_gain_pct": 134.0,
    "hih_vs_lih_monitoring_saving_pct": 62.0,
}


def _num(value) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    return repr(float(value))


def sweep_csv(rows: Iterable[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for row in rows:
        b = row.breakdown
        writer.writerow([
            row.variant.value,
            row.penalty_mode.value if row.penalty_mode is not None else "",
            row.kind.value if row.kind is not None else "",
            row.m,
            ";".join(row.subset),
            _num(row.equilibrium.value),
            _num(b.gain if b else None),
            _num(b.monitoring if b else None),
            _num(b.reconfig_spend if b else None),
            _num(b.utility if b else None),
        ])
    return buf.getvalue()


def to_jsonable(obj):
    """Plain JSON types; NaN and infinities become ``None``."""
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, (str, int, bool)) or obj is None:
        return obj
    if is_dataclass(obj):
        out = {f.name: to_jsonable(getattr(obj, f.name)) for f in fields(obj)}
        support = getattr(obj, "support", None)
        if isinstance(support, tuple):
            out["support"] = list(support)
        return out
    if isinstance(obj, dict):
        return {(k.value if isinstance(k, enum.Enum) else str(k)): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalars
        return to_jsonable(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dump_report(command: str, parameters: dict, body: dict) -> str:
    doc = {"schema_version": SCHEMA_VERSION, "command": command, "parameters": parameters}
    doc.update(body)
    return json.dumps(to_jsonable(doc), indent=2, sort_keys=True, allow_nan=False) + "\n"


def flatten(doc, prefix="") -> list[tuple[str, str]]:
    """Key/value pairs for the CSV form of a structured report."""
    items = []
    if isinstance(doc, dict):
        for key in sorted(doc):
            items.extend(flatten(doc[key], f"{prefix}.{key}" if prefix else str(key)))
    elif isinstance(doc, list):
        for i, value in enumerate(doc):
            items.extend(flatten(value, f"{prefix}[{i}]"))
    else:
        items.append((prefix, "" if doc is None else (repr(doc) if isinstance(doc, float) else str(doc))))
    return items


def key_value_csv(doc: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("key", "value"))
    writer.writerows(flatten(to_jsonable(doc)))
    return buf.getvalue()


def _select(rows, variant, kind, mode=None):
    return [r for r in rows
            if r.variant is variant and r.kind is kind
            and (mode is None or r.penalty_mode is mode)]


def _best(rows):
    scored = [r for r in rows if r.breakdown is not None]
    if not scored:
        return None
    return max(scored, key=lambda r: (r.breakdown.utility, -r.m))


def conformance_note(rows: Sequence[SweepRow]) -> list[dict]:
    """Compare the sweep against the published case-study claims.

    Each entry records the claim, the published value, this run's value and
    whether they agree; ``agrees`` is ``None`` when the rows needed to judge
    the claim were not computed.
    """
    notes = []

    lih_a = _select(rows, Variant.A, HoneypotKind.LIH)
    best = _best(lih_a)
    notes.append({
        "claim": "HCG-a with LIH: the best utility is reached at m",
        "published": PUBLISHED_CLAIMS["lih_a_best_m"],
        "computed": best.m if best else None,
        "agrees": (best.m == PUBLISHED_CLAIMS["lih_a_best_m"]) if best else None,
    })
    positive = [r.m for r in lih_a if r.breakdown and r.breakdown.utility > 0]
    notes.append({
        "claim": "HCG-a with LIH: m values with positive utility",
        "published": [PUBLISHED_CLAIMS["lih_a_best_m"]],
        "computed": positive if lih_a else None,
        "agrees": (positive == [PUBLISHED_CLAIMS["lih_a_best_m"]]) if lih_a else None,
    })

    hih_a = [r for r in _select(rows, Variant.A, HoneypotKind.HIH) if r.breakdown]
    negative = [r.m for r in hih_a if r.breakdown.utility < 0]
    notes.append({
        "claim": "HCG-a with HIH: utility sign",
        "published": PUBLISHED_CLAIMS["hih_a_utility_sign"],
        "computed": (f"negative for m in {negative}" if negative else "positive for every m") if hih_a else None,
        "agrees": (len(negative) == len(hih_a)) if hih_a else None,
    })

    for mode in PenaltyMode:
        b_rows = [r for r in rows if r.variant is Variant.B and r.penalty_mode is mode]
        neg_m = sorted({r.m for r in b_rows if r.equilibrium.value < 0})
        expected = PUBLISHED_CLAIMS["b_negative_value_from_m"]
        notes.append({
            "claim": f"HCG-b ({mode.value} penalty): m values with negative game value",
            "published": f"m >= {expected}",
            "computed": neg_m if b_rows else None,
            "agrees": (bool(neg_m) and min(neg_m) == expected) if b_rows else None,
        })

        lih_b = _best(_select(rows, Variant.B, HoneypotKind.LIH, mode))
        hih_b = _best(_select(rows, Variant.B, HoneypotKind.HIH, mode))
        kind, m = PUBLISHED_CLAIMS["b_best"]
        overall = None
        if lih_b and hih_b:
            overall = hih_b if hih_b.breakdown.utility > lih_b.breakdown.utility else lih_b
        notes.append({
            "claim": f"HCG-b ({mode.value} penalty): best honeypot type and m",
            "published": f"{kind} m={m}",
            "computed": f"{overall.kind.value} m={overall.m}" if overall else None,
            "agrees": (overall.kind.value == kind and overall.m == m) if overall else None,
        })
        gain_pct = saving_pct = None
        if lih_b and hih_b and lih_b.breakdown.utility != 0 and lih_b.breakdown.monitoring != 0:
            gain_pct = 100.0 * (hih_b.breakdown.utility - lih_b.breakdown.utility) / abs(lih_b.breakdown.utility)
            saving_pct = 100.0 * (lih_b.breakdown.monitoring - hih_b.breakdown.monitoring) / lih_b.breakdown.monitoring
        notes.append({
            "claim": f"HCG-b ({mode.value} penalty): HIH utility improvement over LIH, percent",
            "published": PUBLISHED_CLAIMS["hih_over_lih_utility_gain_pct"],
            "computed": gain_pct,
            "agrees": (abs(gain_pct - PUBLISHED_CLAIMS["hih_over_lih_utility_gain_pct"]) < 5.0)
            if gain_pct is not None else None,
        })
        notes.append({
            "claim": f"HCG-b ({mode.value} penalty): HIH monitoring saving over LIH, percent",
            "published": PUBLISHED_CLAIMS["hih_vs_lih_monitoring_saving_pct"],
            "computed": saving_pct,
            "agrees": (abs(saving_pct - PUBLISHED_CLAIMS["hih_vs_lih_monitoring_saving_pct"]) < 5.0)
            if saving_pct is not None else None,
        })
    return notes


def conformance_text(notes: Sequence[dict]) -> str:
    lines = ["conformance with the published case study:"]
    for note in notes:
        verdict = {True: "agrees", False: "differs", None: "not assessed"}[note["agrees"]]
        computed = note["computed"]
        if isinstance(computed, float):
            computed = f"{computed:.1f}"
        lines.append(f"  [{verdict}] {note['claim']}: published {note['published']}, this run {computed}")
    return "\n".join(lines) + "\n"
