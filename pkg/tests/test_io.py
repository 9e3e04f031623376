import json
from fractions import Fraction

import pytest
from hypothesis import given
from strategies import submodular

from consist_submod.exceptions import DomainError
from consist_submod.functions import CoverageFunction, LiftedFunction, TableFunction
from consist_submod.hardness import build_gi_family
from consist_submod.io import (
    dump_instance,
    instance_from_dict,
    load_instance,
    read_instance,
    write_instance,
)


def test_table_roundtrip_exact():
    g = build_gi_family(3).tables[0]
    text = dump_instance(g, stream=[0, 1, 2, 3])
    data = json.loads(text)
    assert data["values"]["1010"] == "4/3"  # {a_2, r}
    f, stream = load_instance(text)
    assert f.exact and stream == [0, 1, 2, 3]
    assert all(f.value(m) == g.value(m) for m in range(16))


@given(submodular(max_n=6))
def test_float_roundtrip(f):
    g, _ = load_instance(dump_instance(f))
    assert list(g.table()) == pytest.approx(list(f.table()))


def test_coverage_and_lifted(tmp_path):
    cov = CoverageFunction(4, [[0, 1], [2], [3]])
    path = tmp_path / "c.json"
    write_instance(path, cov, meta={"note": "x"})
    f, _ = read_instance(path)
    assert f.sets == cov.sets
    lift = LiftedFunction(build_gi_family(2).tables[0], 2)
    f, _ = load_instance(dump_instance(lift))
    assert f([0, 4]) == Fraction(3, 2)


@pytest.mark.parametrize("data", [
    {"kind": "nope"},
    {"kind": "table", "n": 1, "values": {"0": 0}},
    {"kind": "table", "n": 1, "values": {"0": 0, "1": -1}},
    {"kind": "table", "n": 1, "values": {"0": 0, "2": 1}},
    {"kind": "table", "n": 1, "values": {"0": 0, "1": "x"}},
    {"kind": "table", "n": 1, "values": {"0": 0, "1": 1}, "stream": [0, 0]},
    {"kind": "coverage", "n": 3, "universe_size": 2, "sets": [[0], [1]]},
])
def test_rejects_bad_files(data):
    with pytest.raises(DomainError):
        instance_from_dict(data)


def test_table_metadata():
    f = TableFunction([0, 1, 1, 2])
    data = json.loads(dump_instance(f))
    assert data["kind"] == "table" and not data["exact"]
