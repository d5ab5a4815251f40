import json
from pathlib import Path

import pytest

from secondlaw.config import ConfigError, dump_config, parse_config, parse_design
from secondlaw.report import analyze, emit_report, to_json

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_text(name):
    return (FIXTURES / name).read_text(encoding="utf-8")


MINIMAL = {
    "version": "1",
    "ambient": {"T_a": 300.0},
    "timeline": {
        "tau": 1.0,
        "snapshots": [
            {"t": 0.0, "baths": [{"name": "hot", "T": 600.0, "Qdot": 10.0}, {"name": "cold", "T": 300.0, "Qdot": -10.0}]},
            {"t": 1.0},
        ],
    },
}


def mutate(**edits):
    doc = json.loads(json.dumps(MINIMAL))
    for path, value in edits.items():
        node = doc
        *head, last = path.split("/")
        for key in head:
            node = node[int(key)] if key.isdigit() else node[key]
        if isinstance(node, list):
            node[int(last)] = value
        else:
            node[last] = value
    return json.dumps(doc)


class TestParseConfig:
    def test_minimal(self):
        cfg = parse_config(json.dumps(MINIMAL))
        assert len(cfg.timeline.snapshots[0].baths) == 2
        assert cfg.constants.g == 9.80665
        assert not cfg.stationary

    def test_unknown_field(self):
        bath = {"name": "hot", "temprature": 600.0, "T": 600.0, "Qdot": 1.0}
        with pytest.raises(ConfigError) as exc:
            parse_config(mutate(**{"timeline/snapshots/0/baths/0": bath}))
        assert exc.value.code == "unknown_field"
        assert exc.value.path.endswith("baths[0]")
        assert "temprature" in exc.value.message

    def test_unknown_top_level(self):
        with pytest.raises(ConfigError) as exc:
            parse_config(mutate(extra=1))
        assert exc.value.code == "unknown_field"

    def test_zero_ambient(self):
        with pytest.raises(ConfigError) as exc:
            parse_config(mutate(**{"ambient/T_a": 0}))
        assert exc.value.code == "schema_violation"
        assert exc.value.path == "ambient.T_a"

    def test_syntax_error_location(self):
        with pytest.raises(ConfigError) as exc:
            parse_config('{\n  "version": "1",\n  "ambient": {"T_a": 300,}\n}')
        assert exc.value.code == "syntax_error"
        assert exc.value.line == 3 and exc.value.column > 1

    def test_wrong_version(self):
        with pytest.raises(ConfigError) as exc:
            parse_config(mutate(version="2"))
        assert exc.value.code == "schema_violation" and exc.value.path == "version"

    def test_timeline_invariants(self):
        with pytest.raises(ConfigError) as exc:
            parse_config(mutate(**{"timeline/tau": 2.0}))
        assert exc.value.code == "schema_violation"
        assert "timeline_bad_end" in exc.value.message

    def test_stationary_with_accumulation(self):
        doc = json.loads(mutate(flags={"stationary": True}))
        doc["timeline"]["snapshots"][1]["accumulation"] = {"dSdt": 0.5}
        with pytest.raises(ConfigError) as exc:
            parse_config(json.dumps(doc))
        assert "stationary_accumulation_nonzero" in exc.value.message

    def test_gravity_override(self):
        cfg = parse_config(mutate(constants_override={"g": 9.81}))
        assert cfg.constants.g == 9.81

    @pytest.mark.parametrize("name", ["conduction.json", "throttle.json", "negative.json", "empty.json"])
    def test_round_trip(self, name):
        cfg = parse_config(fixture_text(name))
        again = parse_config(dump_config(cfg))
        assert again == cfg
        assert dump_config(again) == dump_config(cfg)


class TestReport:
    def conduction_report(self):
        text = fixture_text("conduction.json")
        return analyze(parse_config(text), text)

    def test_conduction_table(self):
        table = emit_report(self.conduction_report(), "table")
        assert "S_g  16.667 J/K" in table
        assert "residual ≤ 1e-10: PASS" in table

    def test_json_is_byte_stable(self):
        a = emit_report(self.conduction_report(), "json")
        b = emit_report(self.conduction_report(), "json")
        assert a == b
        doc = json.loads(a)
        assert doc["lifetime"]["W_lambda"] == pytest.approx(5000.0)
        assert doc["lifetime"]["pass"] is True
        assert list(doc) == ["provenance", "snapshots", "lifetime", "warnings"]

    def test_seventeen_digits(self):
        assert to_json({"x": 1 / 3}) == '{\n  "x": 0.33333333333333331\n}\n'
        with pytest.raises(ValueError):
            to_json({"x": float("nan")})

    def test_empty_system(self):
        text = fixture_text("empty.json")
        report = analyze(parse_config(text), text)
        assert report.warnings == []
        doc = json.loads(emit_report(report, "json"))
        for row in doc["snapshots"]:
            assert row["Sdot_g"] == 0 and row["Wdot_lost"] == 0 and row["Wdot_max"] == 0

    def test_negative_generation_warning_in_both_formats(self):
        text = fixture_text("negative.json")
        report = analyze(parse_config(text), text)
        assert report.exit_code == 1
        assert "negative_entropy_generation" in emit_report(report, "table")
        codes = {w["code"] for w in json.loads(emit_report(report, "json"))["warnings"]}
        assert "negative_entropy_generation" in codes

    def test_declared_power_mismatch_warns(self):
        doc = json.loads(fixture_text("conduction.json"))
        for snap in doc["timeline"]["snapshots"]:
            snap["Wdot_effective_declared"] = 100.0
        text = json.dumps(doc)
        report = analyze(parse_config(text), text)
        assert [w.code for w in report.warnings] == ["gouy_stodola_residual"]
        assert "FAIL" in emit_report(report, "table")

    def test_bridge_column(self):
        text = fixture_text("throttle.json")
        rows = json.loads(emit_report(analyze(parse_config(text), text), "json"))["snapshots"]
        assert all(row["bridge_residual"] is None for row in rows)
        text = fixture_text("conduction.json")
        rows = json.loads(emit_report(analyze(parse_config(text), text), "json"))["snapshots"]
        assert all(row["bridge_residual"] == 0 for row in rows)

    def test_provenance_hash_tracks_input(self):
        text = fixture_text("conduction.json")
        a = analyze(parse_config(text), text)
        b = analyze(parse_config(text + " "), text + " ")
        assert a.config_sha256 != b.config_sha256


class TestDesign:
    def test_tradeoff(self):
        d = parse_design(fixture_text("tradeoff_design.json"))
        assert d.names == ["x"] and d.template == "tradeoff"

    def test_quadratic_multi(self):
        doc = {
            "version": "1",
            "template": "quadratic",
            "settings": {"center": [0.0, 1.0]},
            "bounds": [{"name": "a", "lower": -1, "upper": 1}, {"name": "b", "lower": -2, "upper": 2}],
        }
        d = parse_design(json.dumps(doc))
        assert d.names == ["a", "b"]

    def test_unknown_setting(self):
        doc = json.loads(fixture_text("tradeoff_design.json"))
        doc["settings"]["c"] = 1.0
        with pytest.raises(ConfigError) as exc:
            parse_design(json.dumps(doc))
        assert exc.value.code == "unknown_field"

    def test_bad_bounds(self):
        doc = json.loads(fixture_text("tradeoff_design.json"))
        doc["bounds"][0]["lower"] = 9.0
        with pytest.raises(ConfigError) as exc:
            parse_design(json.dumps(doc))
        assert exc.value.path == "bounds[0]"
