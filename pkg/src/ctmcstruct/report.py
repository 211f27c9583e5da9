"""Analysis reports as plain JSON-compatible dicts, plus a text rendering.

Report dicts only hold ints, bools, strings, lists, dicts and ``None`` so the
JSON form is exact.  The text form prints every leaf of the same dict, which
keeps the two formats in lockstep.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, List, Optional, Sequence

from .classify import (
    PIC, QIC, UNKNOWN, essential_check, extinction_finite, pq_resolution,
)
from .equivalence import check_equivalence_theorem, check_equivalence_window
from .network import JumpStructure, check_a2, conservation_vector, positive_dependence
from .onedim import classify_line
from .oracle import Window

REPORT_KEYS = ("input", "assumptions", "extinction", "essential", "windows", "lines", "equivalence")


def structure_digest(js: JumpStructure) -> str:
    return hashlib.sha256(js.to_json().encode()).hexdigest()


def input_echo(js: JumpStructure, path: Optional[str] = None, kind: Optional[str] = None,
               species: Optional[Sequence[str]] = None, warnings: Iterable[str] = ()) -> dict:
    return {
        "path": path,
        "kind": kind,
        "dim": js.dim,
        "species": None if species is None else list(species),
        "structure": js.to_document(),
        "digest": structure_digest(js),
        "warnings": list(warnings),
    }


def assumptions_section(js: JumpStructure) -> dict:
    a = check_a2(js).to_dict()
    nu = conservation_vector(js)
    a["positive_dependence"] = positive_dependence(js)
    a["conservation_vector"] = None if nu is None else list(nu)
    a["all_classes_finite"] = nu is not None
    return a


def _pts(seq) -> List[List[int]]:
    return [list(p) for p in seq]


def window_section(js: JumpStructure, w: Window, budget: Optional[int] = None) -> dict:
    res = pq_resolution(js, w, budget)
    classes = []
    for kind in (PIC, QIC):
        for members in res.classes_of(kind):
            cid = res.class_of[members[0]]
            c = res.verdict.classes[cid]
            classes.append({
                "id": cid,
                "tag": kind,
                "size_in_window": len(members),
                "size_in_box": c.size,
                "boundary_stable": not c.boundary_unstable,
                "members": _pts(members),
            })
    classes.sort(key=lambda d: d["id"])
    return {
        "window": w.to_dict(),
        "counts": res.counts(),
        "neutral": _pts(res.states_of("Neutral")),
        "trapping": _pts(res.states_of("Trapping")),
        "escaping": _pts(res.states_of("Escaping")),
        "classes": classes,
        "unknown": [
            {"state": list(x), "reason": res.reasons[x]} for x in res.states_of(UNKNOWN)
        ],
        "single_cycle_class": len(classes) == 1 and not res.states_of(UNKNOWN),
    }


def line_section(js: JumpStructure, c: Sequence[int]) -> dict:
    return classify_line(js, c).to_dict()


def _map(fn, items, threads: int):
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, items))
    return [fn(it) for it in items]


def empty_report(echo: dict) -> dict:
    rep = {k: None for k in REPORT_KEYS}
    rep["input"] = echo
    rep["windows"] = []
    rep["lines"] = []
    return rep


def analysis_report(
    js: JumpStructure,
    echo: dict,
    windows: Sequence[Window] = (),
    lines: Sequence[Sequence[int]] = (),
    budget: Optional[int] = None,
    threads: int = 1,
) -> dict:
    rep = empty_report(echo)
    rep["assumptions"] = assumptions_section(js)
    rep["extinction"] = extinction_finite(js).to_dict()
    rep["essential"] = essential_check(js, budget).to_dict()
    rep["windows"] = _map(lambda w: window_section(js, w, budget), list(windows), threads)
    rep["lines"] = _map(lambda c: line_section(js, c), list(lines), threads)
    return rep


def equivalence_section(js, jt, echo2: dict, w: Optional[Window], budget=None) -> dict:
    return {
        "second_input": echo2,
        "theorem": check_equivalence_theorem(js, jt).to_dict(),
        "window": None if w is None else check_equivalence_window(js, jt, w, budget).to_dict(),
    }


def dumps_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _is_point_list(v) -> bool:
    return isinstance(v, list) and v and all(
        isinstance(p, list) and all(isinstance(c, int) and not isinstance(c, bool) for c in p) for p in v
    )


def _scalar(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, list) and all(isinstance(c, int) and not isinstance(c, bool) for c in v):
        return "(" + ",".join(str(c) for c in v) + ")"
    return str(v)


def _render(key: str, v, indent: int, out: List[str]):
    pad = "  " * indent
    if isinstance(v, dict):
        out.append(f"{pad}{key}:")
        if not v:
            out[-1] += " {}"
        for k in sorted(v):
            _render(k, v[k], indent + 1, out)
    elif isinstance(v, list) and v and all(isinstance(e, dict) for e in v):
        out.append(f"{pad}{key}: [{len(v)}]")
        for n, e in enumerate(v):
            _render(f"[{n}]", e, indent + 1, out)
    elif _is_point_list(v):
        out.append(f"{pad}{key}: {' '.join(_scalar(p) for p in v)}")
    elif isinstance(v, list) and v and all(isinstance(c, int) and not isinstance(c, bool) for c in v):
        out.append(f"{pad}{key}: {_scalar(v)}")
    elif isinstance(v, list):
        out.append(f"{pad}{key}: " + ("[]" if not v else "[" + ", ".join(_scalar(e) for e in v) + "]"))
    else:
        out.append(f"{pad}{key}: {_scalar(v)}")


def render_text(report: dict) -> str:
    out: List[str] = []
    for k in sorted(report):
        _render(k, report[k], 0, out)
    return "\n".join(out) + "\n"
