"""File formats: pattern/system JSON, CSV tables and number formatting."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

from .carpet import LabeledSystem, Pattern, PatternError

__all__ = [
    "system_from_dict",
    "system_to_dict",
    "load_system",
    "dump_system",
    "format_csv_float",
    "round_json",
    "write_csv",
    "read_csv_columns",
]


def system_from_dict(doc: dict) -> LabeledSystem:
    """Build a system from the JSON document layout.

    Two layouts are accepted::

        {"n": 6, "m": 2, "root": "A",
         "patterns": {"A": {"cells": [[0, 0, "A"], ...]}, ...}}

        {"n": 6, "m": 2, "cells": [[0, 0], [1, 0], ...]}

    The second is a bare pattern, read as a one-label system whose cells all
    point back to that label.
    """
    try:
        n, m = int(doc["n"]), int(doc["m"])
    except (KeyError, TypeError, ValueError) as exc:
        raise PatternError(f"system document needs integer 'n' and 'm': {exc}",
                           "schema") from None
    if "patterns" in doc:
        patterns = doc["patterns"]
        if not isinstance(patterns, dict) or not patterns:
            raise PatternError("'patterns' must be a nonempty object", "schema")
        root = str(doc.get("root", next(iter(patterns))))
        rules = {}
        for label, body in patterns.items():
            cells = body["cells"] if isinstance(body, dict) else body
            triples = []
            for cell in cells:
                if len(cell) == 3:
                    triples.append((int(cell[0]), int(cell[1]), str(cell[2])))
                elif len(cell) == 2:
                    triples.append((int(cell[0]), int(cell[1]), str(label)))
                else:
                    raise PatternError(f"cell {cell!r} must be [column, row, childLabel]",
                                       "schema")
            rules[str(label)] = triples
        return LabeledSystem(n, m, root, rules)
    if "cells" in doc:
        label = str(doc.get("label", "P"))
        return LabeledSystem.from_pattern(Pattern(n, m, [tuple(c[:2]) for c in doc["cells"]]),
                                          label)
    raise PatternError("system document needs 'patterns' or 'cells'", "schema")


def system_to_dict(s: LabeledSystem) -> dict:
    return {
        "n": s.n,
        "m": s.m,
        "root": s.root,
        "patterns": {lab: {"cells": [[a, b, c] for a, b, c in s.cells(lab)]}
                     for lab in s.labels},
    }


def load_system(path) -> LabeledSystem:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise PatternError(f"{path}: invalid JSON ({exc})", "schema") from None
    return system_from_dict(doc)


def dump_system(s: LabeledSystem, path) -> None:
    Path(path).write_text(json.dumps(system_to_dict(s), indent=2) + "\n", encoding="utf-8")


def format_csv_float(x: float) -> str:
    return format(float(x), ".17g")


def round_json(obj, digits: int = 15):
    """Recursively round floats to ``digits`` significant digits for JSON output."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return None
        return float(format(obj, f".{digits}g"))
    if isinstance(obj, dict):
        return {k: round_json(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_json(v, digits) for v in obj]
    if hasattr(obj, "item"):  # numpy scalar
        return round_json(obj.item(), digits)
    return obj


def write_csv(header: Sequence[str], columns: Sequence[Iterable[float]], out=None) -> str:
    """Write columns as LF-terminated CSV with 17-significant-digit floats.

    ``out`` may be a path, a text stream or ``None`` (return the text only).
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in zip(*columns):
        writer.writerow([format_csv_float(v) for v in row])
    text = buf.getvalue()
    if out is None:
        return text
    if hasattr(out, "write"):
        out.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


def read_csv_columns(path) -> dict[str, list[float]]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        cols: dict[str, list[float]] = {h: [] for h in header}
        for row in reader:
            if not row:
                continue
            for h, v in zip(header, row):
                cols[h].append(float(v))
    return cols
