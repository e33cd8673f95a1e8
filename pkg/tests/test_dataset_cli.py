import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from hyperloc.cli import main
from hyperloc.dataset import Dataset, DatasetError, dumps, load, loads, loads_csv
from hyperloc.oracle import QueryTranscript

FIX = Path(__file__).parent / "fixtures"


def fx(name):
    return str(FIX / name)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


# dataset documents

def test_fixture_round_trips_are_byte_identical():
    for name in ("axes2d.json", "orthonormal3d.json", "three2d.json", "collinear2d.json", "random3d.json"):
        text = (FIX / name).read_text()
        assert dumps(loads(text)) == text
        assert loads(text).dumps() == text


def test_round_trip_preserves_floats_exactly():
    rng = np.random.default_rng(0)
    H = rng.standard_normal((7, 3)) * 10.0 ** rng.uniform(-200, 200, (7, 1))
    ds = Dataset(3, H, [rng.standard_normal(3)], {"b": 1, "a": "x"})
    again = loads(dumps(ds))
    assert np.array_equal(again.H, ds.H)
    assert again.points == ds.points and again.metadata == ds.metadata
    assert dumps(again) == dumps(ds)


def test_ragged_rows_report_line():
    with pytest.raises(DatasetError) as info:
        load(fx("ragged.json"))
    assert info.value.line == 5
    with pytest.raises(DatasetError) as info:
        load(fx("ragged.csv"), as_csv=True)
    assert info.value.line == 3


def test_invalid_documents():
    with pytest.raises(DatasetError):
        loads("{not json")
    with pytest.raises(DatasetError):
        loads('{"d": 2, "hyperplanes": [[0, 0]]}')
    with pytest.raises(DatasetError):
        loads('{"d": 2, "hyperplanes": [[1, "a"]]}')
    with pytest.raises(DatasetError):
        loads('{"d": 2, "hyperplanes": []}')
    with pytest.raises(DatasetError):
        loads('{"d": true, "hyperplanes": [[1]]}')
    with pytest.raises(DatasetError):
        loads_csv("# only a comment\n")
    with pytest.raises(DatasetError) as info:
        loads_csv("1,0\nx,1\n")
    assert info.value.line == 2
    with pytest.raises(DatasetError):
        Dataset(2, [(1.0, float("inf"))])


def test_csv_import():
    ds = load(fx("axes2d.csv"), as_csv=True)
    assert ds.d == 2 and ds.hyperplanes == [(1.0, 0.0), (0.0, 1.0)]


# locate

def test_locate_axes(capsys):
    code, out, _ = run(capsys, "locate", fx("axes2d.json"), "--x", "2,-3")
    assert code == 0
    assert out.splitlines()[0] == "+1 -1"
    code, out, _ = run(capsys, "locate", fx("axes2d.csv"), "--csv", "--x", "0 1", "--check")
    assert code == 0 and out.splitlines()[0] == "0 +1" and out.splitlines()[-1] == "OK"


def test_locate_check_on_random_fixture(capsys):
    code, out, _ = run(capsys, "locate", fx("random3d.json"), "--check")
    assert code == 0 and out.splitlines()[-1] == "OK"
    code, out, _ = run(capsys, "locate", fx("random3d.json"), "--check", "--deterministic", "--seed", "3")
    assert code == 0 and out.splitlines()[-1] == "OK"


def test_locate_point_and_transcript(capsys, tmp_path):
    path = tmp_path / "t.csv"
    code, out, _ = run(capsys, "locate", fx("random3d.json"), "--point", "5", "--transcript", path)
    assert code == 0
    rows = QueryTranscript.parse_csv(path.read_text())
    n = int(out.splitlines()[1].split()[1])
    assert len(rows) == n
    assert all(abs(abs(r["alpha"]) + abs(r["beta"]) - 1) <= 1e-12 for r in rows)
    code, _, err = run(capsys, "locate", fx("random3d.json"), "--transcript", path)
    assert code == 2 and "single point" in err


def test_locate_input_errors(capsys, tmp_path):
    code, _, err = run(capsys, "locate", fx("ragged.json"), "--x", "1,1")
    assert code == 2 and "line 5" in err
    assert run(capsys, "locate", fx("axes2d.json"), "--x", "1,2,3")[0] == 2
    assert run(capsys, "locate", fx("axes2d.json"), "--x", "a,b")[0] == 2
    assert run(capsys, "locate", fx("axes2d.json"), "--point", "9")[0] == 2
    assert run(capsys, "locate", fx("three2d.json"))[0] == 2
    assert run(capsys, "locate", str(tmp_path / "missing.json"), "--x", "1,1")[0] == 2
    bad = tmp_path / "cfg.json"
    bad.write_text(json.dumps({"k_sample": 1}))
    assert run(capsys, "locate", fx("axes2d.json"), "--x", "1,1", "--config", bad)[0] == 2
    bad.write_text(json.dumps({"bogus": 1}))
    assert run(capsys, "locate", fx("axes2d.json"), "--x", "1,1", "--config", bad)[0] == 2
    assert run(capsys, "locate", fx("axes2d.json"), "--x", "1,1", "--config", tmp_path / "nope")[0] == 2


def test_locate_with_config(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"k_sample": 5, "seed": 2}))
    code, out, _ = run(capsys, "locate", fx("random3d.json"), "--config", cfg, "--check")
    assert code == 0 and out.splitlines()[-1] == "OK"


# forster

def test_forster_commands(capsys):
    code, out, _ = run(capsys, "forster", fx("orthonormal3d.json"), "--matrix")
    assert code == 0
    head = out.splitlines()[0]
    assert float(head.split()[0].split("=")[1]) == pytest.approx(1.0, abs=1e-12)
    assert int(head.split()[1].split("=")[1]) <= 1
    assert len(out.splitlines()) == 4
    code, out, _ = run(capsys, "forster", fx("three2d.json"))
    assert code == 0 and float(out.split()[0].split("=")[1]) >= 0.99
    code, _, err = run(capsys, "forster", fx("collinear2d.json"))
    assert code == 4 and "best_achieved_c" in err
    assert run(capsys, "forster", fx("axes2d.csv"), "--csv", "--target-c", "0.5")[0] == 0


# build / verify

def test_build_then_verify(capsys, tmp_path):
    tree = tmp_path / "tree.json"
    code, _, err = run(capsys, "build", fx("axes2d.json"), "-o", tree)
    assert code == 0 and "depth=2" in err
    code, out, _ = run(capsys, "verify", "--tree", tree)
    assert code == 0 and out.strip() == "100/100 OK"
    code, out, _ = run(capsys, "verify", "--tree", tree, fx("axes2d.json"))
    assert code == 0 and out.strip() == "3/3 OK"
    code, out, _ = run(capsys, "verify", "--tree", tree, "--x", "0,0")
    assert code == 0 and out.strip() == "1/1 OK"


def test_build_almost_everywhere_is_fixed(capsys, tmp_path):
    tree = tmp_path / "tree.json"
    code, _, err = run(capsys, "build", fx("random3d.json"), "--almost-everywhere", "-o", tree)
    assert code == 0 and "fixed=True" in err
    code, out, _ = run(capsys, "verify", "--tree", tree, fx("random3d.json"))
    assert code == 0 and out.strip() == "7/7 OK"
    code, out, _ = run(capsys, "build", fx("axes2d.json"))
    assert code == 0 and json.loads(out)["format"] == "hyperloc-tree"


def test_build_size_guard_and_bad_tree(capsys, tmp_path):
    code, _, err = run(capsys, "build", fx("random3d.json"), "--max-nodes", "10")
    assert code == 5 and "size guard" in err
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    assert run(capsys, "verify", "--tree", bad)[0] == 2
    assert run(capsys, "verify", "--tree", tmp_path / "none.json")[0] == 2


def test_verify_detects_wrong_leaf(capsys, tmp_path):
    tree = tmp_path / "tree.json"
    run(capsys, "build", fx("axes2d.json"), "-o", tree)
    doc = json.loads(tree.read_text())
    for node in doc["nodes"]:
        if "leaf" in node and node["leaf"] == [1, 1]:
            node["leaf"] = [1, -1]
    tree.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "verify", "--tree", tree, "--x", "1,1")
    assert code == 3 and out.strip() == "0/1 MISMATCH"


# universal

def test_universal_commands(capsys):
    code, out, _ = run(capsys, "universal", fx("random3d.json"), "--subset", "all")
    assert code == 0 and out.strip() == "certified"
    code, out, _ = run(capsys, "universal", fx("axes2d.json"), "--subset", "all", "--exhaustive")
    assert code == 0 and out.splitlines()[-1] == "certified"
    code, _, err = run(capsys, "universal", fx("random3d.json"), "--subset", "all", "--exhaustive")
    assert code == 5 and "size guard" in err
    code, out, _ = run(capsys, "universal", fx("random3d.json"), "--subset", "0", "--exhaustive")
    assert code == 0 and out.splitlines()[-1] == "certified"  # one vector is the required ceil(40/300)
    code, out, _ = run(capsys, "universal", fx("random3d.json"), "--subset", "", "--exhaustive")
    assert code == 1 and out.splitlines()[-1] == "not certified"
    code, out, _ = run(capsys, "universal", fx("random3d.json"))
    assert code == 0 and out.startswith("S = ") and out.splitlines()[-1] == "certified"
    assert run(capsys, "universal", fx("random3d.json"), "--subset", "0,99")[0] == 2
    assert run(capsys, "universal", fx("random3d.json"), "--subset", "x")[0] == 2


# bench

def test_bench_smoke(capsys, tmp_path):
    out_csv = tmp_path / "b.csv"
    code, out, _ = run(capsys, "bench", "scaling", "--dims", "2", "--sizes", "64,256", "--trials", "3",
                       "--out", out_csv, "--seed", "1")
    assert code == 0 and "mean_queries" in out
    lines = out_csv.read_text().splitlines()
    assert lines[0] == "d,n,dist,seed,trial,labels,comparisons,generalized,rounds,fallbacks"
    assert len(lines) == 1 + 6
    code, out, _ = run(capsys, "bench", "inference", "--dims", "2", "--sizes", "100", "--trials", "5")
    assert code == 0 and "mean_fraction" in out
    code, out, _ = run(capsys, "bench", "subsample", "--dims", "2", "--sizes", "50", "--k", "10", "--trials", "5")
    assert code == 0 and "frequency" in out
    with pytest.raises(SystemExit):
        main(["bench", "scaling", "--dims", "two"])


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "hyperloc.cli", "locate", fx("axes2d.json"), "--x", "2,-3"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and res.stdout.splitlines()[0] == "+1 -1"
