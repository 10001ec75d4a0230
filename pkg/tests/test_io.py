import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from marc_dualband.allocator import LgrId
from marc_dualband.config import ConfigError, load_config, resolve_seed
from marc_dualband.figures import FIG2_CONFIG
from marc_dualband.tables import ResultTable, format_cell, parse_cell, tables_from_json, tables_to_json

cells = st.one_of(
    st.floats(allow_nan=False),
    st.integers(-10**12, 10**12),
    st.booleans(),
    st.none(),
    st.sampled_from(["S5", "A_rdrd", "R2"]),
)


@given(st.lists(st.tuples(cells, cells, cells), max_size=6))
def test_csv_round_trip_is_byte_identical(rows):
    text = ResultTable(("a", "b", "c"), tuple(rows)).to_csv()
    assert ResultTable.from_csv(text).to_csv() == text


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_cells_are_exact(x):
    assert float(parse_cell(format_cell(x))) == x


def test_csv_layout():
    t = ResultTable(("P", "lgr", "rate"), ((0.1, LgrId.A_dr, 1 / 3), (np.float64(2.0), None, math.inf)))
    assert t.to_csv() == "P,lgr,rate\n0.10000000000000001,A_dr,0.33333333333333331\n2,,inf\n"


def test_json_round_trip():
    t = {"x": ResultTable(("a", "b"), ((1.5, "S5"), (-0.0, None)))}
    text = tables_to_json(t)
    assert tables_to_json(tables_from_json(text)) == text


def test_row_width_checked():
    with pytest.raises(ValueError):
        ResultTable(("a", "b"), ((1,),))


def test_config_from_yaml_and_json(tmp_path):
    y = tmp_path / "c.yaml"
    y.write_text("microwave: {pathloss_exp: 2}\nmmwave: {pathloss_exp: 4}\nalpha: 2\ngamma: 3\n")
    j = tmp_path / "c.json"
    j.write_text(json.dumps(FIG2_CONFIG))
    assert load_config(y).to_dual_band().gamma == 3.0
    assert load_config(j).to_dual_band().gain("1R") == 1.0


@pytest.mark.parametrize(
    "patch",
    [
        {"extra": 1},
        {"alpha": -1},
        {"microwave": {"pathloss_exp": 2, "powers": {"Phat1": 1}}},
        {"microwave": {"pathloss_exp": 2, "bogus": 1}},
        {"geometry": {"d_RD": 1.0}},
        {"geometry": {"distances": {"1R": 1}, "d_RD": 1, "d_SR": 1, "phi": 0}},
        {"gains": {"XY": 1.0}},
        {"qmc_samples": 0},
    ],
)
def test_config_rejects(patch):
    with pytest.raises(ConfigError):
        load_config({**FIG2_CONFIG, **patch})


def test_config_unreadable(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.yaml")
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(ConfigError):
        load_config(bad)
    lst = tmp_path / "list.yaml"
    lst.write_text("- 1\n")
    with pytest.raises(ConfigError):
        load_config(lst)


def test_seed_precedence(monkeypatch):
    cfg = load_config({**FIG2_CONFIG, "seed": 4})
    monkeypatch.delenv("MARC_SEED", raising=False)
    assert resolve_seed(None) == 0
    assert resolve_seed(None, cfg) == 4
    monkeypatch.setenv("MARC_SEED", "9")
    assert resolve_seed(None, cfg) == 9
    assert resolve_seed(2, cfg) == 2
    monkeypatch.setenv("MARC_SEED", "x")
    with pytest.raises(ConfigError):
        resolve_seed(None)
