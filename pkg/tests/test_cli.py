"""CLI surface: output schemas, exit codes, determinism."""
import json
import subprocess
import sys

import pytest

from modiagen.cli import main
from modiagen.diagram import Diagram

JSONL_FIELDS = {"n", "k", "sigma", "arcs", "attempts", "seed"}


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_gen_jsonl_schema(capsys):
    code, out, _ = run_cli(capsys, "gen", "--n", "4", "--k", "2",
                           "--sigma", "2", "--count", "3", "--seed", "7")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 3
    allowed = {(), ((1, 4), (2, 3))}
    for line in lines:
        record = json.loads(line)
        assert set(record) == JSONL_FIELDS
        assert record["n"] == 4 and record["k"] == 2 and record["sigma"] == 2
        assert isinstance(record["seed"], str)
        assert record["attempts"] >= 1
        arcs = tuple(tuple(a) for a in record["arcs"])
        assert arcs in allowed
        # every emitted record parses back into a valid diagram
        Diagram(record["n"], frozenset(map(tuple, record["arcs"])))


def test_gen_deterministic(capsys):
    outs = []
    for _ in range(2):
        code, out, _ = run_cli(capsys, "gen", "--n", "10", "--k", "3",
                               "--sigma", "2", "--count", "5", "--seed", "42")
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1]


def test_gen_seed_changes_output(capsys):
    _, a, _ = run_cli(capsys, "gen", "--n", "12", "--k", "3", "--sigma", "2",
                      "--count", "8", "--seed", "1")
    _, b, _ = run_cli(capsys, "gen", "--n", "12", "--k", "3", "--sigma", "2",
                      "--count", "8", "--seed", "2")
    assert a != b


def test_gen_n_zero(capsys):
    code, out, _ = run_cli(capsys, "gen", "--n", "0", "--count", "1")
    assert code == 0
    record = json.loads(out.strip())
    assert record["arcs"] == [] and record["n"] == 0


def test_gen_core_mode(capsys):
    code, out, _ = run_cli(capsys, "gen", "--n", "8", "--k", "3", "--core",
                           "--count", "10", "--seed", "3")
    assert code == 0
    from modiagen.diagram import classify
    for line in out.splitlines():
        record = json.loads(line)
        d = Diagram(record["n"], frozenset(map(tuple, record["arcs"])))
        assert classify(d, 3, 1).is_core


def test_gen_arcs_format(capsys):
    code, out, _ = run_cli(capsys, "gen", "--n", "4", "--k", "2", "--sigma",
                           "2", "--count", "4", "--seed", "7",
                           "--format", "arcs")
    assert code == 0
    for line in out.splitlines():
        assert line == "." or all("-" in part for part in line.split(","))


def test_gen_jobs_output_independent(capsys):
    base = run_cli(capsys, "gen", "--n", "10", "--k", "3", "--sigma", "2",
                   "--count", "6", "--seed", "9")[1]
    parallel = run_cli(capsys, "gen", "--n", "10", "--k", "3", "--sigma", "2",
                       "--count", "6", "--seed", "9", "--jobs", "3")[1]
    assert base == parallel


def test_gen_out_file(tmp_path, capsys):
    path = tmp_path / "samples.jsonl"
    code, out, _ = run_cli(capsys, "gen", "--n", "6", "--count", "2",
                           "--seed", "1", "--out", str(path))
    assert code == 0 and out == ""
    lines = path.read_text().splitlines()
    assert len(lines) == 2


def test_count_examples(capsys):
    code, out, _ = run_cli(capsys, "count", "--n", "4", "--k", "2",
                           "--sigma", "2")
    assert code == 0 and out.strip() == "2"
    code, out, _ = run_cli(capsys, "count", "--n", "4", "--k", "3", "--core")
    assert code == 0 and out.strip() == "9"
    code, out, _ = run_cli(capsys, "count", "--n", "2", "--k", "2", "--core")
    assert code == 0 and out.strip() == "2"


def test_count_oracle_crosscheck(capsys):
    code, out, _ = run_cli(capsys, "count", "--n", "8", "--k", "3",
                           "--sigma", "2", "--oracle")
    assert code == 0 and out.strip() == "25"


def test_stats_success_csv(capsys):
    code, out, _ = run_cli(capsys, "stats-success", "--n-min", "4",
                           "--n-max", "6", "--n-step", "2", "--k", "2",
                           "--sigma", "2", "--attempts", "400", "--seed", "5")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n,attempts,successes,rate"
    rows = [line.split(",") for line in lines[1:]]
    assert [r[0] for r in rows] == ["4", "6"]
    for r in rows:
        assert 0.0 <= float(r[3]) <= 1.0
    # no rejection is possible at n=4: both outcomes are valid
    assert float(rows[0][3]) == 1.0


def test_stats_uniformity_pass(tmp_path, capsys):
    # at (n=6, k=3, sigma=2) the conditioned distribution is exactly uniform
    code, out, _ = run_cli(capsys, "stats-uniformity", "--n", "6", "--k", "3",
                           "--sigma", "2", "--seed", "0")
    assert code == 0
    doc = json.loads(out)
    assert doc["distinct_diagrams"] == 8
    assert doc["samples"] == 200 * 8
    assert doc["all_observed"] is True
    assert doc["chi_square"]["passed"] is True
    assert set(doc["multiplicities"]) == {
        ".", "1-4,2-3", "1-5,2-4", "1-6,2-5", "2-5,3-4", "2-6,3-5",
        "3-6,4-5", "1-6,2-5,3-4"}
    assert sum(doc["multiplicities"].values()) == 1600


def test_stats_uniformity_inconclusive(capsys):
    code, out, _ = run_cli(capsys, "stats-uniformity", "--n", "6", "--k", "3",
                           "--sigma", "2", "--seed", "0", "--count", "30")
    assert code == 0
    doc = json.loads(out)
    assert doc["chi_square"]["inconclusive"] is True


def test_stats_uniformity_core_mode(capsys):
    code, out, _ = run_cli(capsys, "stats-uniformity", "--n", "4", "--k", "2",
                           "--core", "--seed", "0")
    assert code in (0, 5)
    doc = json.loads(out)
    assert doc["mode"] == "core" and doc["distinct_diagrams"] == 8


def test_selftest_small(capsys):
    code, out, _ = run_cli(capsys, "selftest", "--max-n", "5")
    assert code == 0
    assert "0 failures" in out


def test_selftest_detects_corrupt_cache(tmp_path, capsys):
    # seed the cache, then corrupt one stored digit
    code, _, _ = run_cli(capsys, "selftest", "--max-n", "2",
                         "--table-cache", str(tmp_path))
    assert code == 0
    victim = tmp_path / "core_n6_k2_v1.json"
    text = victim.read_text()
    broken = text.replace('"2"', '"4"', 1)
    assert broken != text
    victim.write_text(broken)
    code, out, _ = run_cli(capsys, "selftest", "--max-n", "2",
                           "--table-cache", str(tmp_path))
    assert code == 4


def test_gen_give_up_exit_code(capsys, tmp_path):
    # max-restarts 1 at a rejecting parameter point eventually gives up
    code = None
    for seed in range(40):
        code, out, err = run_cli(capsys, "gen", "--n", "8", "--k", "2",
                                 "--sigma", "2", "--count", "20",
                                 "--seed", str(seed), "--max-restarts", "1")
        if code == 3:
            break
    assert code == 3


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["gen"])  # missing required --n
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 2


def test_invalid_values_exit_2(capsys):
    code, _, err = run_cli(capsys, "gen", "--n", "4", "--k", "1",
                           "--count", "1")
    assert code == 2 and err


def test_uniformity_beyond_cap_exit_2(capsys):
    code, _, _ = run_cli(capsys, "stats-uniformity", "--n", "16", "--k", "3",
                         "--sigma", "2")
    assert code == 2


def test_cli_entrypoint_subprocess():
    # byte-for-byte determinism through the real process boundary
    cmd = [sys.executable, "-m", "modiagen.cli", "gen", "--n", "8", "--k", "3",
           "--sigma", "2", "--count", "4", "--seed", "11"]
    a = subprocess.run(cmd, capture_output=True, check=True)
    b = subprocess.run(cmd, capture_output=True, check=True)
    assert a.stdout == b.stdout and a.stdout


def test_table_cache_reused(tmp_path, capsys):
    argv = ("gen", "--n", "10", "--k", "3", "--sigma", "2", "--count", "2",
            "--seed", "4", "--table-cache", str(tmp_path))
    code, first, _ = run_cli(capsys, *argv)
    assert code == 0
    assert (tmp_path / "weighted_n10_k3_s2_v1.json").exists()
    code, second, _ = run_cli(capsys, *argv)
    assert code == 0 and first == second
