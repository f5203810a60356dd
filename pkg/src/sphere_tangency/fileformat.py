"""Newline-delimited JSON collection files.

Line 1 is a header ``{"dimension": n, "mode": "signed"|"unsigned"}``; every
further line is ``{"id": k, "center": ["p/q", ...], "radius": "p/q"}``.
Writing then reading a collection gives it back exactly, and canonical
files round-trip byte for byte.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from pathlib import Path
from typing import List, Sequence

from .exact import MODES, Collection, GeometryError, Sphere

_RATIONAL = re.compile(r"-?\d+(?:/\d+)?")


class CollectionFormatError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def parse_rational(text, line: int = 0) -> Fraction:
    if not isinstance(text, str) or not _RATIONAL.fullmatch(text):
        raise CollectionFormatError(line, f"malformed rational {text!r}")
    num, _, den = text.partition("/")
    if den and int(den) == 0:
        raise CollectionFormatError(line, f"zero denominator in {text!r}")
    return Fraction(int(num), int(den) if den else 1)


def dumps_collection(collection: Collection) -> str:
    lines = [json.dumps({"dimension": collection.dimension, "mode": collection.mode})]
    for s in collection:
        lines.append(
            json.dumps(
                {"id": s.id, "center": [str(c) for c in s.center], "radius": str(s.radius)}
            )
        )
    return "\n".join(lines) + "\n"


def _load(text: str, line_no: int):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CollectionFormatError(line_no, f"invalid JSON: {exc.msg}") from None


def loads_collection(text: str) -> Collection:
    lines = [(i + 1, ln) for i, ln in enumerate(text.splitlines()) if ln.strip()]
    if not lines:
        raise CollectionFormatError(1, "missing header record")
    line_no, first = lines[0]
    header = _load(first, line_no)
    if not isinstance(header, dict) or set(header) != {"dimension", "mode"}:
        raise CollectionFormatError(line_no, "header must have exactly 'dimension' and 'mode'")
    dim, mode = header["dimension"], header["mode"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 2:
        raise CollectionFormatError(line_no, f"bad dimension {dim!r}")
    if mode not in MODES:
        raise CollectionFormatError(line_no, f"bad mode {mode!r}")
    spheres: List[Sphere] = []
    ids = set()
    for line_no, raw in lines[1:]:
        rec = _load(raw, line_no)
        if not isinstance(rec, dict) or set(rec) != {"id", "center", "radius"}:
            raise CollectionFormatError(line_no, "record must have exactly 'id', 'center', 'radius'")
        sid = rec["id"]
        if not isinstance(sid, int) or isinstance(sid, bool):
            raise CollectionFormatError(line_no, f"bad id {sid!r}")
        if sid in ids:
            raise CollectionFormatError(line_no, f"duplicate id {sid}")
        center = rec["center"]
        if not isinstance(center, list):
            raise CollectionFormatError(line_no, "center must be an array")
        if len(center) != dim:
            raise CollectionFormatError(
                line_no, f"center has dimension {len(center)}, header says {dim}"
            )
        c = [parse_rational(v, line_no) for v in center]
        r = parse_rational(rec["radius"], line_no)
        try:
            spheres.append(Sphere(c, r, sid))
        except GeometryError as exc:
            raise CollectionFormatError(line_no, str(exc)) from None
        ids.add(sid)
    return Collection(spheres, dim, mode)


def write_collection(collection: Collection, path) -> None:
    Path(path).write_text(dumps_collection(collection))


def parse_collection(path) -> Collection:
    return loads_collection(Path(path).read_text())


def lifted_point_strings(coords: Sequence[Fraction]) -> List[str]:
    return [str(v) for v in coords]
