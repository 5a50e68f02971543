import json

import pytest
from click.testing import CliRunner

from planarpatterns.cli import main
from planarpatterns.maps import RootedMap, builtin_pattern


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args, ok=True):
        res = runner.invoke(main, [str(a) for a in args], catch_exceptions=False)
        if ok:
            assert res.exit_code == 0, res.output
        return res
    return invoke


def _json(res):
    return json.loads(res.output)


def test_counts_json(run):
    d = _json(run("counts", "--n-max", 5))
    assert [r["count"] for r in d["result"]] == [1, 2, 9, 54, 378, 2916]
    assert d["provenance"]["config"]["n_max"] == 5
    assert d["provenance"]["command"] == "counts"


def test_counts_csv_and_text(run):
    lines = run("counts", "--n-max", 3, "--format", "csv").output.splitlines()
    assert lines[0].startswith("# {") and lines[1] == "n,count" and lines[-1] == "3,54"
    assert "m_2 = 9" in run("counts", "--n-max", 2, "--format", "text").output
    val = _json(run("counts", "--n-max", 2, "--by-valency"))["result"]
    assert val[2]["by_valency"] == [0, 2, 2, 3, 2]


def test_series_dump(run):
    out = run("series", "-N", 2).output.splitlines()
    assert out[0].startswith("# ")
    assert "2 0 - 9/1" in out
    csv_out = run("series", "--term", "1,0,2", "-N", 2, "-K", 1, "--what", "counts").output
    assert "n,j,count" in csv_out


def test_occurrences(run, tmp_path):
    pat = builtin_pattern("double-glued-triangles")
    f = tmp_path / "host.map"
    f.write_text(pat.map.to_text())
    d = _json(run("occurrences", f, "double-glued-triangles"))
    assert d["result"]["count"] == 1
    assert len(d["result"]["occurrences"][0]["edges"]) == pat.map.edge_count
    f.write_text(RootedMap((1, 0), (1, 0), 0).to_text())
    assert _json(run("occurrences", f, "simple-2-gon"))["result"]["count"] == 0
    f.write_text("garbage")
    assert run("occurrences", f, "koala", ok=False).exit_code != 0


def test_intersections(run):
    d = _json(run("intersections", "koala"))["result"]
    assert d["type_count"] == 16 and d["face_class_count"] == 13


def test_constants(run):
    d = _json(run("constants", "double-glued-triangles", "--direct"))["result"]
    assert d["f1"][0]["rational"] == "7/15552"
    d = _json(run("constants", "--term", "2,3,4,0", "--precision-bits", 192))
    assert d["result"]["mu"]["rational"] == "737/34992000"
    assert d["provenance"]["config"]["precision_bits"] == 192
    assert run("constants", ok=False).exit_code == 2
    assert run("constants", "no-such-pattern", ok=False).exit_code == 2


def test_sample_is_seeded(run):
    a = run("sample", "-n", 12, "--count", 2, "--seed", 4).output
    b = run("sample", "-n", 12, "--count", 2, "--seed", 4).output
    assert a == b
    body = [l for l in a.splitlines() if not l.startswith("#")]
    first = RootedMap.from_text("\n".join(body[:3]))
    assert first.edge_count == 12


def test_stats(run, tmp_path, monkeypatch):
    monkeypatch.setenv("PLANARPATTERNS_THREADS", "1")
    csv_path = tmp_path / "counts.csv"
    d = _json(run("stats", "simple-2-gon", "-n", 10, "--trials", 50, "--seed", 3, "--csv", csv_path))
    assert d["result"]["trials"] == 50 and d["provenance"]["threads"] == 1
    assert d["provenance"]["config"]["seed"] == 3
    lines = csv_path.read_text().splitlines()
    assert lines[1] == "trial,n,count" and len(lines) == 52


def test_verify_exit_codes(run):
    res = run("verify", "tutte", "--quick")
    assert res.output.splitlines()[0].startswith("# {")
    assert "PASS" in res.output
    assert run("verify", "table1", ok=False).exit_code == 1      # the literal koala rows disagree
    assert run("verify", "nope", ok=False).exit_code == 2
    assert run("verify", ok=False).exit_code == 2
    d = _json(run("verify", "dgt", "--json"))
    assert d["result"][0]["ok"]


def test_version(run):
    assert "planarpatterns" in run("--version").output
