"""End-to-end command-line runs and exit-code contract."""

import csv
import io
import json

import pytest

from hyperlat import fuchsian
from hyperlat.cli import main

from conftest import cyclic_spec


@pytest.fixture(scope="module")
def quotient_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("quot") / "n1.json"
    fuchsian.save_quotient(cyclic_spec((8, 8), 1, ()), path)
    return path


@pytest.fixture(scope="module")
def quotient_file_n5(tmp_path_factory):
    path = tmp_path_factory.mktemp("quot") / "n5.json"
    fuchsian.save_quotient(cyclic_spec((8, 8), 5, (1, 2, 4, 3)), path)
    return path


def run_build(tmp_path, quotient_file, out_name="out"):
    out = tmp_path / out_name
    rc = main([
        "build", "--pattern", "8,3", "--bravais", "8,8",
        "--quotient", str(quotient_file), "--out", str(out),
    ])
    return rc, out


class TestUsage:
    def test_no_command(self):
        assert main([]) == 1

    def test_unknown_command(self):
        assert main(["frobnicate"]) == 1

    def test_missing_required_flag(self):
        assert main(["build", "--pattern", "8,3"]) == 1

    def test_version(self, capsys):
        assert main(["--version"]) == 0
        assert capsys.readouterr().out.strip() != ""


class TestBuild:
    def test_counts_line(self, tmp_path, quotient_file, capsys):
        rc, out = run_build(tmp_path, quotient_file)
        assert rc == 0
        assert capsys.readouterr().out.strip() == "V=16 E=24 F=6 h=2"
        for name in ["edges.txt", "coords.txt", "lattice.dot", "counts.json", "manifest.json"]:
            assert (out / name).exists()

    def test_counts_json(self, tmp_path, quotient_file):
        _, out = run_build(tmp_path, quotient_file)
        meta = json.loads((out / "counts.json").read_text())
        assert meta["predicted"] == {"V": 16, "E": 24, "F": 6, "h": 2, "n": 24, "k": 4}

    def test_bad_pattern_string(self, quotient_file, tmp_path, capsys):
        rc = main([
            "build", "--pattern", "8", "--bravais", "8,8",
            "--quotient", str(quotient_file), "--out", str(tmp_path / "x"),
        ])
        assert rc == 2
        assert "ParseError" in capsys.readouterr().err

    def test_malformed_quotient(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"bravais": {"p": 8, "q": 8, "genus": 2}, "index": 2, "generators": [[1, 2]]}')
        rc = main([
            "build", "--pattern", "8,3", "--bravais", "8,8",
            "--quotient", str(bad), "--out", str(tmp_path / "x"),
        ])
        assert rc == 2
        assert "ParseError" in capsys.readouterr().err

    def test_relator_violating_quotient(self, tmp_path, capsys):
        # a 3-cycle and a transposition do not commute, so the relator
        # (a commutator when the last two generators act trivially) is not
        # the identity permutation
        bad = tmp_path / "rel.json"
        bad.write_text(json.dumps({
            "bravais": {"p": 8, "q": 8, "genus": 2},
            "index": 3,
            "generators": [[2, 3, 1], [2, 1, 3], [1, 2, 3], [1, 2, 3]],
        }))
        rc = main([
            "build", "--pattern", "8,3", "--bravais", "8,8",
            "--quotient", str(bad), "--out", str(tmp_path / "x"),
        ])
        assert rc == 2
        assert "RelatorNotIdentity" in capsys.readouterr().err

    def test_signature_mismatch(self, tmp_path, quotient_file, capsys):
        rc = main([
            "build", "--pattern", "10,3", "--bravais", "10,5",
            "--quotient", str(quotient_file), "--out", str(tmp_path / "x"),
        ])
        assert rc == 2
        assert "SignatureMismatch" in capsys.readouterr().err


class TestAnalyze:
    def test_summary_line(self, tmp_path, quotient_file, capsys):
        _, out = run_build(tmp_path, quotient_file)
        capsys.readouterr()
        rc = main(["analyze", "--in", str(out)])
        assert rc == 0
        assert capsys.readouterr().out.strip() == "[[24,4,6,2]]"
        assert (out / "hcb.txt").exists()
        code_text = (out / "code.txt").read_text()
        assert code_text.splitlines()[0] == "n k dZ dX p q N h"

    def test_missing_dir(self, tmp_path, capsys):
        rc = main(["analyze", "--in", str(tmp_path / "nope")])
        assert rc == 2

    def test_tampered_edges_exit_3(self, tmp_path, quotient_file, capsys):
        _, out = run_build(tmp_path, quotient_file)
        edges = out / "edges.txt"
        lines = edges.read_text().splitlines()
        lines[0], lines[1] = lines[1], lines[0]
        edges.write_text("\n".join(lines) + "\n")
        rc = main(["analyze", "--in", str(out)])
        assert rc == 3
        assert "InvariantViolation" in capsys.readouterr().err


def write_sim_config(path, quotient_file, **over):
    data = {
        "pattern": [8, 3],
        "bravais": [8, 8],
        "quotients": [str(quotient_file)],
        "p_grid": [0.0, 0.05, 0.1],
        "trials": 20,
        "seed": 11,
    }
    data.update(over)
    path.write_text(json.dumps(data))
    return path


class TestSimulate:
    def test_runs_and_writes_csv(self, tmp_path, quotient_file, capsys):
        cfg = write_sim_config(tmp_path / "sim.json", quotient_file)
        rc = main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "res")])
        assert rc == 0
        text = (tmp_path / "res" / "results.csv").read_text()
        header = text.splitlines()[0]
        assert header == "pattern,N,n,k,p,trials,failures,logical_rate,ci_low,ci_high,seed"
        rows = list(csv.DictReader(io.StringIO(text)))
        assert len(rows) == 3
        assert rows[0]["pattern"] == "{8,3}"
        assert rows[0]["p"] == "0"
        assert rows[0]["failures"] == "0"  # p=0 never fails
        manifest = json.loads((tmp_path / "res" / "manifest.json").read_text())
        assert "threshold" in manifest

    def test_threads_bit_identical(self, tmp_path, quotient_file, quotient_file_n5):
        cfg = write_sim_config(
            tmp_path / "sim.json", quotient_file,
            quotients=[str(quotient_file), str(quotient_file_n5)], trials=30,
        )
        outs = []
        for threads in (1, 2):
            out = tmp_path / f"t{threads}"
            rc = main(["simulate", "--config", str(cfg), "--threads", str(threads),
                       "--out", str(out)])
            assert rc == 0
            outs.append((out / "results.csv").read_bytes())
        assert outs[0] == outs[1]

    def test_seed_precedence(self, tmp_path, quotient_file, monkeypatch):
        cfg = write_sim_config(tmp_path / "sim.json", quotient_file)

        def seed_of(out):
            return (out / "results.csv").read_text().strip().splitlines()[1].split(",")[-1]

        monkeypatch.setenv("HYPERLAT_SEED", "99")
        main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "env")])
        assert seed_of(tmp_path / "env") == "99"
        main(["simulate", "--config", str(cfg), "--seed", "123", "--out", str(tmp_path / "flag")])
        assert seed_of(tmp_path / "flag") == "123"
        monkeypatch.delenv("HYPERLAT_SEED")
        main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "cfgseed")])
        assert seed_of(tmp_path / "cfgseed") == "11"

    def test_bad_config_exit_2(self, tmp_path, quotient_file, capsys):
        cfg = write_sim_config(tmp_path / "sim.json", quotient_file, trials=0)
        rc = main(["simulate", "--config", str(cfg)])
        assert rc == 2
        assert "ConfigInvalid" in capsys.readouterr().err

    def test_unreadable_config_exit_2(self, tmp_path):
        cfg = tmp_path / "sim.json"
        cfg.write_text("{not json")
        assert main(["simulate", "--config", str(cfg)]) == 2

    def test_missing_quotient_exit_4(self, tmp_path, quotient_file, capsys):
        cfg = write_sim_config(tmp_path / "sim.json", quotient_file,
                               quotients=[str(tmp_path / "ghost.json")])
        rc = main(["simulate", "--config", str(cfg)])
        assert rc == 4
