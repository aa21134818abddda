import json
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from blowuplab import RunReport, make_grid
from blowuplab.cli_io import (
    Config,
    ConfigError,
    config_to_dict,
    dispatch,
    dumps_17,
    echo_config,
    parse_config,
    write_run_report,
)

MIN_CONFIG = '{"problem": {"m": 2, "p": 1.5, "sigma": 1, "N": 1}}'


class TestParseConfig:
    def test_defaults_filled(self):
        cfg = parse_config(MIN_CONFIG)
        assert cfg.grid == (10.0, 2000)
        assert cfg.tolerances["u_cap"] == 1e6
        assert cfg.initial_data.kind == "compact_bump"
        assert cfg.scenario is None

    def test_missing_problem(self):
        with pytest.raises(ConfigError, match="problem"):
            parse_config("{}")

    def test_unknown_top_level_key(self):
        with pytest.raises(ConfigError, match="frobnicate"):
            parse_config('{"problem": {"m": 2, "p": 1.5, "sigma": 1, "N": 1}, "frobnicate": 1}')

    def test_unknown_nested_key(self):
        with pytest.raises(ConfigError, match="problem"):
            parse_config('{"problem": {"m": 2, "p": 1.5, "sigma": 1, "N": 1, "q": 3}}')

    def test_syntax_error_reports_line(self):
        with pytest.raises(ConfigError, match="line 2"):
            parse_config('{"problem":\n !}')

    def test_negative_tolerance_named(self):
        doc = json.loads(MIN_CONFIG)
        doc["tolerances"] = {"eps_supp": -1.0}
        with pytest.raises(ConfigError, match="eps_supp"):
            parse_config(json.dumps(doc))

    def test_unknown_scenario(self):
        doc = json.loads(MIN_CONFIG)
        doc["scenario"] = "nonsense"
        with pytest.raises(ConfigError, match="nonsense"):
            parse_config(json.dumps(doc))

    def test_out_of_scope_problem(self):
        with pytest.raises(ConfigError, match="p"):
            parse_config('{"problem": {"m": 2, "p": 3, "sigma": 1, "N": 1}}')

    def test_echo_round_trip(self, tmp_path):
        doc = json.loads(MIN_CONFIG)
        doc["grid"] = {"r_max": 7.5, "cells": 123}
        doc["tolerances"] = {"f_floor": 1e-11}
        cfg = parse_config(json.dumps(doc))
        path = echo_config(cfg, tmp_path)
        assert parse_config(path.read_text()) == cfg


class TestSerialization:
    @given(st.floats(allow_nan=False, allow_infinity=False))
    def test_seventeen_digits_round_trip(self, x):
        assert json.loads(dumps_17(x)) == x

    def test_nested_document(self):
        doc = {"a": [1.5, 2], "b": {"c": None, "d": True}, "e": "txt"}
        assert json.loads(dumps_17(doc)) == doc


class TestRunReportSerialization:
    def _report(self, prob_2151, rows):
        rep = RunReport(problem=prob_2151, grid=make_grid(10.0, 100))
        for t, s, m, z in rows:
            rep.times.append(t)
            rep.sup_norm.append(s)
            rep.mass.append(m)
            rep.zeta.append(z)
        return rep

    def test_empty_report_header_only(self, tmp_path, prob_2151):
        paths = write_run_report(self._report(prob_2151, []), tmp_path)
        lines = Path(paths["csv"]).read_text().splitlines()
        assert lines == ["t,sup_norm,mass,zeta"]

    def test_three_rows_four_lines(self, tmp_path, prob_2151):
        rows = [(0.0, 1.0, 2.0, 0.5), (0.1, 1.5, 2.0, 0.6), (0.2, 2.5, 2.0, 0.7)]
        paths = write_run_report(self._report(prob_2151, rows), tmp_path)
        lines = Path(paths["csv"]).read_text().splitlines()
        assert len(lines) == 4
        assert [float(v) for v in lines[2].split(",")] == list(rows[1])

    def test_sidecar_round_trips(self, tmp_path, prob_2151):
        rep = self._report(prob_2151, [(0.0, 1.0, 2.0, 0.5)])
        rep.termination = "blowup_detected"
        rep.blowup_time_estimate = 1.0 / 3.0
        rep.blowup_time_ci = (0.33, 0.34)
        paths = write_run_report(rep, tmp_path)
        side = json.loads(Path(paths["json"]).read_text())
        assert side["termination"] == "blowup_detected"
        assert side["blowup_time_estimate"] == rep.blowup_time_estimate
        assert side["blowup_time_ci"] == [0.33, 0.34]
        assert side["problem"]["m"] == prob_2151.m
        assert side["grid"] == {"r_max": 10.0, "cells": 100}


class TestDispatch:
    def _write_config(self, tmp_path, extra=None):
        doc = json.loads(MIN_CONFIG)
        doc["grid"] = {"r_max": 6.0, "cells": 120}
        doc["t_end"] = 0.2
        doc["output_dir"] = str(tmp_path / "out")
        if extra:
            doc.update(extra)
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(doc))
        return path

    def test_no_subcommand_usage_error(self):
        assert dispatch([]) == 2

    def test_unknown_subcommand_usage_error(self):
        assert dispatch(["frobnicate", "--config", "x.json"]) == 2

    def test_missing_config_file(self, tmp_path):
        assert dispatch(["run", "--config", str(tmp_path / "nope.json")]) == 2

    def test_bad_override_value(self, tmp_path):
        cfg = self._write_config(tmp_path)
        rc = dispatch(["run", "--config", str(cfg), "--override", "tolerances.u_cap=-5"])
        assert rc == 2

    def test_run_writes_artifacts(self, tmp_path):
        cfg = self._write_config(tmp_path)
        assert dispatch(["run", "--config", str(cfg)]) == 0
        out = tmp_path / "out"
        assert (out / "run.csv").exists()
        assert (out / "run.json").exists()
        assert (out / "config_echo.json").exists()

    def test_out_flag_overrides_dir(self, tmp_path):
        cfg = self._write_config(tmp_path)
        alt = tmp_path / "alt"
        assert dispatch(["run", "--config", str(cfg), "--out", str(alt)]) == 0
        assert (alt / "run.csv").exists()

    def test_override_applied_in_echo(self, tmp_path):
        cfg = self._write_config(tmp_path)
        rc = dispatch(["run", "--config", str(cfg), "--override", "grid.cells=64"])
        assert rc == 0
        echo = json.loads((tmp_path / "out" / "config_echo.json").read_text())
        assert echo["grid"]["cells"] == 64

    def test_verify_requires_scenario(self, tmp_path):
        cfg = self._write_config(tmp_path)
        assert dispatch(["verify", "--config", str(cfg)]) == 2

    def test_sweep_requires_table(self, tmp_path):
        cfg = self._write_config(tmp_path, extra={"scenario": "comparison"})
        assert dispatch(["sweep", "--config", str(cfg)]) == 2
