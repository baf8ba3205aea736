import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qvf_eos import __version__
from qvf_eos.io import read_table, read_trace, render

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@settings(max_examples=50, deadline=None)
@given(values=st.lists(st.tuples(finite, st.one_of(finite, st.just(math.nan))), min_size=1, max_size=20),
       fmt=st.sampled_from(["csv", "json"]))
def test_round_trip_is_exact(tmp_path_factory, values, fmt):
    path = tmp_path_factory.mktemp("io") / f"t.{fmt}"
    path.write_text(render(["omega", "value"], values, fmt, {"command": "test"}))
    columns, data, _ = read_table(path)
    assert columns == ["omega", "value"]
    for i, (a, b) in enumerate(values):
        assert data["omega"][i] == a
        assert data["value"][i] == b or (math.isnan(b) and math.isnan(data["value"][i]))


def test_csv_layout():
    text = render(["omega", "value"], [(0.1, float("nan")), (0.2, 1 / 3)], "csv", {})
    assert text.splitlines() == ["omega,value", "0.1,nan", "0.2,0.3333333333333333"]


def test_json_layout():
    doc = json.loads(render(["omega", "value"], [(0.1, float("nan"))], "json", {"units": "reduced"}))
    assert doc["meta"] == {"units": "reduced", "version": __version__}
    assert doc["data"] == [{"omega": 0.1, "value": None}]


def test_unknown_format():
    with pytest.raises(ValueError):
        render(["a"], [(1.0,)], "xml", {})


def test_read_trace_takes_eps_r_from_meta(tmp_path):
    path = tmp_path / "trace.json"
    path.write_text(render(["omega", "value"], [(0.5, 0.7), (1.5, 1.2)], "json", {"eps_r": 2.5}))
    trace = read_trace(path)
    assert trace.eps_r == 2.5
    assert read_trace(path, eps_r=1.0).eps_r == 1.0
    np.testing.assert_array_equal(trace.ratio, [0.7, 1.2])


def test_read_trace_requires_columns(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x,y\n1,2\n")
    with pytest.raises(ValueError):
        read_trace(path)
