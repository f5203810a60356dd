import json

import pytest
import yaml
from pydantic import ValidationError

from sphere_tangency.cli import main
from sphere_tangency.config import ConfigError, RunConfig, load_config
from sphere_tangency.fileformat import parse_collection, write_collection
from sphere_tangency.generators import complementary_conics, hawaiian, zahl_grid
from sphere_tangency.pipeline import PipelineError, run_pipeline


def write_config(tmp_path, data, name="run.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(data))
    return path


def error_record(capsys):
    err = capsys.readouterr().err.strip().splitlines()
    return json.loads(err[-1])


class TestConfig:
    def test_example_loads(self, tmp_path):
        cfg = load_config(write_config(tmp_path, {
            "seed": 7,
            "generator": {"kind": "zahl_grid", "m": 3},
            "partition": {"source": "heuristic", "degree": 4},
            "audit": {"b": 10, "d": 1},
            "bound": {"epsilon": "1/10", "c1": 1, "c2": "3/2"},
            "stages": ["count", "audit", "bound"],
        }))
        assert cfg.generator.m == 3 and cfg.bound.c1 == "1" and cfg.bound.c2 == "3/2"

    @pytest.mark.parametrize(
        "data",
        [
            {"generator": {"kind": "zahl_grid"}, "colour": "red"},
            {"generator": {"kind": "zahl_grid", "size": 3}},
            {"generator": {"kind": "spirals"}},
            {},
            {"generator": {"kind": "hawaiian", "count": 3}, "input": "x.jsonl"},
            {"generator": {"kind": "hawaiian", "count": 3}, "stages": ["audit"]},
            {"generator": {"kind": "hawaiian", "count": 3}, "stages": ["plot"]},
            {"generator": {"kind": "hawaiian", "count": 3}, "bound": {"epsilon": 0.1}},
            {"generator": {"kind": "hawaiian", "count": 3}, "partition": {"degree": 3}},
            {"generator": {"kind": "hawaiian", "count": 3}, "rotation": {"policy": "explicit"}},
        ],
    )
    def test_rejected(self, data):
        with pytest.raises(ValidationError):
            RunConfig.model_validate(data)

    def test_not_a_mapping(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("- 1\n- 2\n")
        with pytest.raises(ConfigError):
            load_config(path)


class TestPipeline:
    def test_zahl_grid_count_and_bound(self):
        cfg = RunConfig.model_validate({"generator": {"kind": "zahl_grid", "m": 3}, "stages": ["count", "bound"]})
        res = run_pipeline(cfg)
        graph = res.artifacts["graph.csv"].splitlines()
        assert len(graph) == 1 + 270
        assert "bounds.csv" in res.artifacts and "plot_data.csv" in res.artifacts
        assert "condition (i) violated" in res.artifacts["bounds.txt"]
        manifest = json.loads(res.artifacts["manifest.json"])
        assert set(manifest["artifacts"]) == set(res.artifacts) - {"manifest.json"}

    def test_conics_audit(self):
        cfg = RunConfig.model_validate({
            "generator": {"kind": "complementary_conics", "count": 40},
            "audit": {"b": 10, "d": 1},
            "stages": ["audit"],
        })
        text = run_pipeline(cfg).artifacts["audit.txt"]
        assert text.splitlines()[0] == "verdict ViolationWitnessed(20)"

    def test_odd_conics_fails_without_artifacts(self, tmp_path, capsys):
        out = tmp_path / "out"
        path = write_config(tmp_path, {
            "generator": {"kind": "complementary_conics", "count": 41},
            "stages": ["count"],
            "output": str(out),
        })
        assert main(["pipeline", str(path)]) == 1
        assert not out.exists()
        rec = error_record(capsys)
        assert rec["stage"] == "generate" and rec["error"] == "input_error"

    def test_hawaiian_audit_reports_condition_i(self):
        cfg = RunConfig.model_validate({
            "generator": {"kind": "hawaiian", "count": 5},
            "audit": {"b": 2},
            "stages": ["count", "audit"],
        })
        with pytest.raises(PipelineError) as exc:
            run_pipeline(cfg)
        assert exc.value.kind == "condition_i_violated" and exc.value.exit_code == 1

    def test_all_stages(self, tmp_path):
        path = write_config(tmp_path, {
            "generator": {"kind": "zahl_grid", "m": 2},
            "audit": {"b": 16, "d": 1, "require_condition_i": False},
            "stages": ["count", "lift_check", "classify", "audit", "bound"],
            "output": str(tmp_path / "out"),
        })
        assert main(["pipeline", str(path)]) == 0
        names = {p.name for p in (tmp_path / "out").iterdir()}
        assert {"graph.csv", "lift_check.txt", "incidences.txt", "partition.txt", "chain.txt",
                "audit.txt", "bounds.csv", "manifest.json", "rotation.json"} <= names

    def test_input_file_and_partition_file(self, tmp_path):
        write_collection(zahl_grid(2), tmp_path / "grid.jsonl")
        (tmp_path / "p.txt").write_text("X1 - 1/3\n")
        cfg = RunConfig.model_validate({
            "input": "grid.jsonl",
            "partition": {"source": "file", "path": "p.txt"},
            "stages": ["classify"],
        })
        res = run_pipeline(cfg, tmp_path)
        assert res.artifacts["partition.txt"] == "1 * X1 + -1/3\n"
        assert res.artifacts["incidences.txt"].startswith("total 48\n")

    def test_thread_count_does_not_change_artifacts(self, tmp_path):
        data = {"generator": {"kind": "random", "count": 300, "coord_bound": 4}, "seed": 3,
                "stages": ["count", "bound"]}
        path = write_config(tmp_path, data)
        outs = []
        for t in (1, 4):
            out = tmp_path / f"out{t}"
            assert main(["pipeline", str(path), "-o", str(out), "--threads", str(t)]) == 0
            outs.append({p.name: p.read_bytes() for p in out.iterdir()})
        assert outs[0] == outs[1]

    def test_identity_rotation_on_hawaiian_fails_cleanly(self):
        cfg = RunConfig.model_validate({
            "generator": {"kind": "hawaiian", "count": 3},
            "rotation": {"policy": "identity"},
            "stages": ["lift_check"],
        })
        with pytest.raises(PipelineError) as exc:
            run_pipeline(cfg)
        assert exc.value.stage == "lift_check"


class TestCommands:
    def test_generate_and_count(self, tmp_path, capsys):
        coll = tmp_path / "c.jsonl"
        assert main(["generate", "zahl_grid", "--m", "2", "-o", str(coll)]) == 0
        assert parse_collection(coll) == zahl_grid(2)
        csv = tmp_path / "g.csv"
        assert main(["count", str(coll), "-o", str(csv)]) == 0
        assert len(csv.read_text().splitlines()) == 25
        assert "edges 24 ordered 48" in capsys.readouterr().err

    def test_count_methods_agree(self, tmp_path, capsys):
        coll = tmp_path / "c.jsonl"
        write_collection(complementary_conics(12), coll)
        main(["count", str(coll), "--method", "brute"])
        brute = capsys.readouterr().out
        main(["count", str(coll), "--threads", "3"])
        assert capsys.readouterr().out == brute

    def test_lift_check(self, tmp_path, capsys):
        coll = tmp_path / "c.jsonl"
        write_collection(hawaiian(4), coll)
        assert main(["lift-check", str(coll)]) == 0
        assert "lift_intersecting_ordered 12" in capsys.readouterr().out

    def test_classify(self, tmp_path, capsys):
        coll = tmp_path / "c.jsonl"
        write_collection(zahl_grid(2), coll)
        assert main(["classify", str(coll), "--poly", "X1*Y1"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("P 1 * X1 * Y1\ntotal 48\n")
        assert "R 1 * X1" in out

    def test_audit(self, tmp_path, capsys):
        coll = tmp_path / "c.jsonl"
        write_collection(complementary_conics(40), coll)
        assert main(["audit", str(coll), "--b", "10"]) == 0
        assert capsys.readouterr().out.startswith("verdict ViolationWitnessed(20)")

    def test_audit_condition_i(self, tmp_path, capsys):
        coll = tmp_path / "c.jsonl"
        write_collection(hawaiian(4), coll)
        assert main(["audit", str(coll), "--b", "2"]) == 1
        assert error_record(capsys)["error"] == "condition_i_violated"
        assert main(["audit", str(coll), "--b", "2", "--allow-triples"]) == 0

    def test_bound(self, capsys):
        assert main(["bound", "--n", "3", "--epsilon", "1/10", "--N", "1000"]) == 0
        lines = dict(l.split(" ", 1) for l in capsys.readouterr().out.splitlines())
        assert lines["D"] == "4"
        assert {"k", "term1", "term2", "term3", "bound"} <= set(lines)

    def test_report(self, tmp_path, capsys):
        paths = []
        for m in (2, 3):
            p = tmp_path / f"zahl{m}.jsonl"
            write_collection(zahl_grid(m), p)
            paths.append(str(p))
        plot = tmp_path / "plot.csv"
        assert main(["report", *paths, "--plot-data", str(plot)]) == 0
        assert "zahl3" in capsys.readouterr().out
        assert plot.read_text().count("\n") >= 3

    def test_report_mixed_dimensions(self, tmp_path, capsys):
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        write_collection(hawaiian(3, 3), a)
        write_collection(hawaiian(3, 4), b)
        assert main(["report", str(a), str(b)]) == 1
        assert error_record(capsys)["error"] == "input_error"

    def test_malformed_file(self, tmp_path, capsys):
        coll = tmp_path / "bad.jsonl"
        coll.write_text('{"dimension": 3, "mode": "signed"}\n{"id": 1, "center": ["0","0","0"], "radius": "1/0"}\n')
        assert main(["count", str(coll)]) == 1
        rec = error_record(capsys)
        assert "line 2" in rec["message"]

    def test_missing_file(self, tmp_path, capsys):
        assert main(["count", str(tmp_path / "nope.jsonl")]) == 1
        assert error_record(capsys)["error"] == "input_error"

    def test_invalid_config(self, tmp_path, capsys):
        path = write_config(tmp_path, {"generator": {"kind": "zahl_grid"}, "extra": 1})
        assert main(["pipeline", str(path)]) == 1
        assert error_record(capsys)["error"] == "invalid_config"

    def test_unexpected_exception_is_internal(self, monkeypatch, capsys):
        import sphere_tangency.cli as cli

        def boom(args):
            raise KeyError("x")

        monkeypatch.setattr(cli, "cmd_bound", boom)
        assert main(["bound"]) == 2
        rec = error_record(capsys)
        assert rec["error"] == "internal_error" and "KeyError" in rec["message"]
