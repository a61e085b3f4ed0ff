import json

import pytest

from dnlkit import cli
from dnlkit.cli import EXIT_HYPOTHESIS, EXIT_INVALID, EXIT_OK, EXIT_USAGE, run, sha256
from dnlkit.suite import CSV_COLUMNS


@pytest.fixture
def out(tmp_path):
    return tmp_path / "out"


def report(path):
    return json.loads(path.read_text())


def call(out, *argv):
    return run(list(argv) + ["--out", str(out)])


def test_vcdim_empty(out, tmp_path):
    src = tmp_path / "empty.json"
    src.write_text("{}")
    assert call(out, "vcdim", "--input", str(src)) == EXIT_OK
    doc = report(out / "vcdim.json")
    assert doc["result"]["dimension"] == -1
    assert doc["manifest"]["inputs"][str(src)] == sha256(b"{}")


def test_manifest_digest(out):
    assert call(out, "generate", "--family", "petersen") == EXIT_OK
    doc = report(out / "generate.json")
    assert doc["manifest"]["result_digest"] == sha256(cli.dumps(doc["result"]))
    assert doc["manifest"]["subcommand"] == "generate" and doc["manifest"]["exit_code"] == 0


def test_generate_deterministic(out, tmp_path):
    other = tmp_path / "again"
    for d in (out, other):
        assert call(d, "generate", "--family", "tournament", "--param", "n=9", "--seed", "4") == EXIT_OK
    assert (out / "tournament.json").read_text() == (other / "tournament.json").read_text()


def test_petersen_hypothesis(out):
    call(out, "generate", "--family", "petersen")
    code = call(out, "color", "--input", str(out / "petersen.json"), "--eps", "0.05")
    assert code == EXIT_HYPOTHESIS
    assert report(out / "color.json")["result"]["hypothesis"] is False


def test_color_and_verify(out):
    assert call(out, "color", "--family", "haggkvist", "--eps", "0.01") == EXIT_OK
    call(out, "generate", "--family", "haggkvist")
    code = call(out, "verify", "--input", str(out / "haggkvist.json"),
                "--witness", str(out / "color.json"))
    assert code == EXIT_OK and report(out / "verify.json")["result"]["kind"] == "coloring"


def test_verify_rejects_bad_coloring(out, tmp_path):
    call(out, "generate", "--family", "petersen")
    wit = tmp_path / "bad.json"
    wit.write_text(json.dumps({"colors": [0] * 10}))
    code = call(out, "verify", "--input", str(out / "petersen.json"), "--witness", str(wit))
    assert code == EXIT_INVALID


def test_dominate_and_verify(out):
    call(out, "generate", "--family", "tournament", "--param", "n=11")
    src = str(out / "tournament.json")
    assert call(out, "dominate", "--input", src) == EXIT_OK
    assert report(out / "dominate.json")["result"]["valid"]
    assert call(out, "verify", "--input", src, "--witness", str(out / "dominate.json")) == EXIT_OK


def test_majority(out):
    call(out, "generate", "--family", "profile", "--param", "n=12", "--param", "m=5")
    src = str(out / "profile.json")
    assert call(out, "dominate", "--mode", "majority", "--eps", "0.1", "--input", src) == EXIT_OK
    assert call(out, "verify", "--input", src, "--eps", "0.1",
                "--witness", str(out / "dominate.json")) == EXIT_OK


def test_cluster_set_system(out):
    code = call(out, "cluster", "--family", "block_set_system", "--param", "n=120",
                "--eps", "0.2", "--eta", "0.2")
    assert code == EXIT_OK
    assert report(out / "cluster.json")["result"]["report"]["violations"] == 0


def test_report_path(out, tmp_path):
    target = tmp_path / "custom.json"
    assert call(out, "generate", "--family", "petersen",
                "--report", str(target)) == EXIT_OK
    assert target.exists()


def test_missing_subcommand(capsys):
    assert run([]) == EXIT_USAGE
    assert "subcommand" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["color", "--family", "petersen", "--eps", "x"],
    ["generate", "--family", "no-such-family"],
    ["vcdim", "--input", "/nonexistent.json"],
    ["generate", "--family", "petersen", "--param", "novalue"],
    ["dominate", "--family", "petersen"],
])
def test_usage_errors(out, argv):
    assert run(argv + ["--out", str(out)]) == EXIT_USAGE


def test_sweep_single(out):
    assert call(out, "sweep", "--criteria", "2") == EXIT_OK
    doc = report(out / "sweep.json")
    assert doc["result"]["passed"] == 1
    header = (out / "sweep-acceptance.csv").read_text().splitlines()[0]
    assert header == ",".join(CSV_COLUMNS)
