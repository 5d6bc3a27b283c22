import json

import pytest

from fbmdrift.carpet import PatternError
from fbmdrift.driftfn import ab_system
from fbmdrift.io import (dump_system, format_csv_float, load_system, read_csv_columns,
                         round_json, system_from_dict, system_to_dict, write_csv)

AB_DOC = {"n": 6, "m": 2, "root": "A", "patterns": {
    "A": {"cells": [[0, 0, "A"], [1, 0, "B"], [2, 0, "A"], [3, 0, "B"], [4, 0, "A"], [5, 1, "A"]]},
    "B": {"cells": [[0, 1, "B"], [1, 0, "B"], [2, 0, "A"], [3, 0, "B"], [4, 0, "A"], [5, 0, "B"]]},
}}


def test_schema_round_trip(tmp_path):
    s = system_from_dict(AB_DOC)
    assert s == ab_system()
    path = tmp_path / "ab.json"
    dump_system(s, path)
    assert load_system(path) == s
    assert system_to_dict(s) == AB_DOC


def test_bare_pattern():
    s = system_from_dict({"n": 6, "m": 2, "cells": [[a, 0] for a in range(6)]})
    assert s.labels == ("P",)
    assert all(c == "P" for _, _, c in s.cells("P"))


@pytest.mark.parametrize("doc", [{"m": 2, "cells": []}, {"n": 6, "m": 2},
                                 {"n": 6, "m": 2, "patterns": {"A": {"cells": [[0]]}}}])
def test_schema_errors(doc):
    with pytest.raises(PatternError):
        system_from_dict(doc)


def test_invalid_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{nope")
    with pytest.raises(PatternError):
        load_system(p)


def test_csv_format(tmp_path):
    text = write_csv(["t", "x"], [[0.0, 0.1], [0.0, 1 / 3]])
    assert text == "t,x\n0,0\n0.10000000000000001,0.33333333333333331\n"
    path = tmp_path / "a.csv"
    write_csv(["t", "x"], [[0.0, 0.5], [1.0, 2.0]], path)
    assert path.read_bytes() == b"t,x\n0,1\n0.5,2\n"
    assert read_csv_columns(path) == {"t": [0.0, 0.5], "x": [1.0, 2.0]}
    assert format_csv_float(1 / 3) == "0.33333333333333331"


def test_round_json():
    doc = round_json({"a": 1 / 3, "b": [2 / 3, None, True], "c": float("nan")})
    assert json.dumps(doc) == '{"a": 0.333333333333333, "b": [0.666666666666667, null, true], "c": null}'
