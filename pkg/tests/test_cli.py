"""CLI surface: parsing, exit codes, reports, determinism, bench CSV."""

from __future__ import annotations

import json

import pytest

from kex import InvalidParameterError
from kex.cli import (
    EXIT_NO,
    EXIT_RESOURCE,
    EXIT_USAGE,
    EXIT_YES,
    ParseError,
    emit_instance,
    parse_instance,
    run_cli,
)

TRI_DOC = '{"n":3,"altruists":[],"arcs":[[0,1],[1,2],[2,0]],"l_p":0,"l_c":3,"t":3}'


@pytest.fixture
def tri_file(tmp_path):
    path = tmp_path / "tri.json"
    path.write_text(TRI_DOC)
    return str(path)


def _strip_wall(report: dict) -> dict:
    report = json.loads(json.dumps(report))
    report["stats"].pop("wall_time_ms")
    return report


class TestParsing:
    def test_minimal_document(self):
        inst = parse_instance('{"n":1,"altruists":[],"arcs":[],"l_p":0,"l_c":0,"t":0}')
        assert inst.n == 1 and inst.arcs == frozenset()

    def test_self_loop_forwarded_as_validation_error(self):
        with pytest.raises(InvalidParameterError, match="self_loop"):
            parse_instance('{"n":2,"altruists":[],"arcs":[[0,0]],"l_p":0,"l_c":0,"t":0}')

    def test_malformed_json_position(self):
        with pytest.raises(ParseError):
            parse_instance("{not json")

    def test_round_trip_idempotent(self):
        messy = '{"t":3,"arcs":[[2,0],[0,1],[1,2]],"l_c":3,"n":3,"altruists":[],"l_p":0}'
        once = emit_instance(parse_instance(messy))
        assert emit_instance(parse_instance(once)) == once


class TestSolveCommand:
    def test_maximize_triangle(self, tri_file, capsys):
        assert run_cli(["solve", tri_file, "--maximize"]) == EXIT_YES
        report = json.loads(capsys.readouterr().out)
        assert report["t_star"] == 3
        assert report["solution"]["cycles"] == [[0, 1, 2]]
        assert report["stats"]["mode"] == "deterministic"

    def test_decision_no(self, tri_file, capsys):
        assert run_cli(["solve", tri_file, "--target", "4"]) == EXIT_NO
        assert json.loads(capsys.readouterr().out)["answer"] == "no"

    def test_deterministic_reports_byte_stable(self, tri_file, capsys):
        assert run_cli(["solve", tri_file, "--maximize"]) == EXIT_YES
        first = _strip_wall(json.loads(capsys.readouterr().out))
        assert run_cli(["solve", tri_file, "--maximize"]) == EXIT_YES
        second = _strip_wall(json.loads(capsys.readouterr().out))
        assert first == second

    def test_randomized_same_seed_same_report(self, tri_file, capsys):
        argv = ["solve", tri_file, "--mode", "randomized", "--seed", "11"]
        assert run_cli(argv) == EXIT_YES
        first = _strip_wall(json.loads(capsys.readouterr().out))
        assert run_cli(argv) == EXIT_YES
        assert _strip_wall(json.loads(capsys.readouterr().out)) == first

    def test_solution_reverifies_offline(self, tri_file, tmp_path, capsys):
        run_cli(["solve", tri_file, "--maximize"])
        report = json.loads(capsys.readouterr().out)
        sol_path = tmp_path / "sol.json"
        sol_path.write_text(json.dumps(report["solution"]))
        assert run_cli(["verify", tri_file, str(sol_path)]) == EXIT_YES
        assert json.loads(capsys.readouterr().out)["covered"] == report["t_star"]

    def test_invalid_instance_exits_one(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"n":2,"altruists":[],"arcs":[[0,0]],"l_p":0,"l_c":0,"t":0}')
        assert run_cli(["solve", str(bad)]) == EXIT_NO

    def test_usage_error(self):
        assert run_cli(["solve"]) == EXIT_USAGE


class TestVerifyCommand:
    def test_reused_vertex_diagnosed(self, tri_file, tmp_path, capsys):
        sol = tmp_path / "sol.json"
        sol.write_text('{"chains":[],"cycles":[[0,1,2],[0,1,2]]}')
        assert run_cli(["verify", tri_file, str(sol)]) == EXIT_NO
        err = capsys.readouterr().err
        assert "vertex_reused" in err


class TestOracleCommand:
    def test_triangle(self, tri_file, capsys):
        assert run_cli(["oracle", tri_file]) == EXIT_YES
        assert json.loads(capsys.readouterr().out)["t_star"] == 3

    def test_size_cap_exit(self, tmp_path):
        doc = {"n": 30, "altruists": [], "arcs": [], "l_p": 0, "l_c": 0, "t": 0}
        path = tmp_path / "big.json"
        path.write_text(json.dumps(doc))
        assert run_cli(["oracle", str(path)]) == EXIT_RESOURCE
        assert run_cli(["oracle", str(path), "--size-cap", "30"]) == EXIT_YES


class TestGenCommands:
    def test_random_deterministic(self, capsys):
        argv = ["gen", "random", "--n", "6", "--altruists", "1", "--arc-prob", "0.5", "--seed", "3"]
        run_cli(argv)
        first = capsys.readouterr().out
        run_cli(argv)
        assert capsys.readouterr().out == first

    def test_plant_round_trip(self, tmp_path):
        inst = tmp_path / "p.json"
        sol = tmp_path / "s.json"
        assert (
            run_cli(
                [
                    "gen", "plant", "--patients", "5", "--chains", "2,1",
                    "--cycles", "2", "--noise", "3", "--seed", "7",
                    "-o", str(inst), "--solution-out", str(sol),
                ]
            )
            == EXIT_YES
        )
        assert run_cli(["verify", str(inst), str(sol)]) == EXIT_YES


class TestReduceCommand:
    def test_kpath_combined_output(self, capsys):
        assert run_cli(["reduce", "kpath", "--n", "3", "--arcs", "0-1,1-2", "--k", "3"]) == EXIT_YES
        doc = json.loads(capsys.readouterr().out)
        assert doc["instance"]["l_p"] == 3
        assert doc["sidecar"]["paper_params"] == {"l_p": 4, "t": 4}

    def test_binpack_files_with_sidecar(self, tmp_path, capsys):
        inst = tmp_path / "bp.json"
        run_cli(
            [
                "reduce", "binpack-paths", "--weights", "1,1", "--bins", "2",
                "--scale", "1", "-o", str(inst),
            ]
        )
        side = json.loads((tmp_path / "bp.json.sidecar.json").read_text())
        assert side["certificate_map"]["scale_factor"] == 1
        assert run_cli(["oracle", str(inst)]) == EXIT_YES
        assert json.loads(capsys.readouterr().out)["t_star"] == 4

    def test_threepart_pipeline(self, capsys):
        assert (
            run_cli(["reduce", "3part", "--items", "1,1,1", "--target", "3", "--shift-c", "7"])
            == EXIT_YES
        )
        doc = json.loads(capsys.readouterr().out)
        assert doc["sidecar"]["shift"]["c"] == 7
        assert doc["instance"]["t"] == 24


class TestDetectCommand:
    def test_cycle_found(self, tri_file, capsys):
        argv = [
            "detect", tri_file, "--patient-colors", "0:1,1:2,2:3",
            "--colors", "1,2,3", "--kind", "cycle",
        ]
        assert run_cli(argv) == EXIT_YES
        assert json.loads(capsys.readouterr().out)["cycle"] == [0, 1, 2]

    def test_absent_exits_one(self, tri_file, capsys):
        argv = [
            "detect", tri_file, "--patient-colors", "0:1,1:2,2:3",
            "--colors", "1,2", "--kind", "cycle",
        ]
        assert run_cli(argv) == EXIT_NO


class TestBench:
    def test_empty_directory_header_only(self, tmp_path, capsys):
        assert run_cli(["bench", str(tmp_path)]) == EXIT_YES
        out = capsys.readouterr().out.strip().splitlines()
        assert len(out) == 1
        assert out[0].startswith("instance,n,t,mode,")

    def test_reproducible_modulo_wall_time(self, tmp_path, capsys):
        for t, seed in ((4, 1), (6, 2)):
            run_cli(
                [
                    "gen", "plant", "--patients", str(t), "--cycles", f"{t-2},2",
                    "--noise", "4", "--seed", str(seed),
                    "-o", str(tmp_path / f"t{t}.json"),
                ]
            )
        capsys.readouterr()
        argv = ["bench", str(tmp_path), "--mode", "single", "--seed", "9"]
        run_cli(argv)
        first = capsys.readouterr().out
        run_cli(argv)
        second = capsys.readouterr().out

        def strip_wall(text: str) -> list[list[str]]:
            rows = [line.split(",") for line in text.strip().splitlines()]
            return [row[:6] + row[7:] for row in rows]

        assert strip_wall(first) == strip_wall(second)
        errors = [row[-1] for row in strip_wall(first)[1:]]
        assert errors == ["", ""]
