import json

import pytest

from anonroute.cli import main
from anonroute.experiment import read_csv


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_run_figure_one_dot(tmp_path, capsys):
    dot = tmp_path / "out.dot"
    code, out, _ = run_cli(capsys, "run", "--n", "100", "--ratio", "0.1", "--f", "0.3",
                           "--nr", "6.76", "--seed", "7", "--dot", str(dot))
    assert code == 0
    report = json.loads(out)
    assert set(report) == {"connected_fraction", "power_ratio", "treeness", "c"}
    text = dot.read_text()
    assert text.startswith("digraph") and text.count("source=true") == 10


def test_run_single_sensor(capsys):
    code, out, _ = run_cli(capsys, "run", "--n", "1", "--ratio", "1", "--f", "0", "--nr", "1",
                           "--seed", "1")
    assert code == 0
    m = json.loads(out)
    assert m["connected_fraction"] == 1.0 and m["power_ratio"] == 1.0
    assert m["treeness"] == 1.0 and m["c"] == 2


def test_run_is_reproducible(capsys):
    args = ["run", "--n", "300", "--ratio", "0.05", "--f", "0.1", "--nr", "11", "--seed", "9"]
    assert run_cli(capsys, *args)[1] == run_cli(capsys, *args)[1]


def test_run_trace_file(tmp_path, capsys):
    trace = tmp_path / "t.jsonl"
    code, out, _ = run_cli(capsys, "run", "--n", "50", "--n-star", "5", "--f", "0.1", "--nr",
                           "10", "--seed", "3", "--trace", str(trace))
    assert code == 0
    kinds = [json.loads(ln)["kind"] for ln in trace.read_text().splitlines()]
    assert kinds[0] == "question" and "answer" in kinds


@pytest.mark.parametrize("argv", [
    ["run", "--n", "10", "--ratio", "0", "--f", "0.1", "--nr", "5", "--seed", "1"],
    ["run", "--n", "10", "--ratio", "2", "--f", "0.1", "--nr", "5", "--seed", "1"],
    ["run", "--n", "10", "--ratio", "0.5", "--n-star", "3", "--f", "0.1", "--nr", "5",
     "--seed", "1"],
    ["run", "--n", "10", "--ratio", "0.5", "--f", "0.1", "--nr", "5", "--seed", "1",
     "--bogus"],
    ["sweep"],
    ["nonsense"],
])
def test_invalid_invocations_exit_1(capsys, argv):
    assert run_cli(capsys, *argv)[0] == 1


def write_spec(tmp_path, **kw):
    spec = dict(n=120, ratios=[0.05, 0.5], f_values=[0.1, 0.3], n_r_values=[9, 13],
                trials=2, base_seed=5)
    spec.update(kw)
    path = tmp_path / "s.json"
    path.write_text(json.dumps(spec))
    return path


def test_sweep_jobs_do_not_change_bytes(tmp_path, capsys):
    spec = write_spec(tmp_path)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_cli(capsys, "sweep", "--spec", str(spec), "--jobs", "1", "--out", str(a))[0] == 0
    assert run_cli(capsys, "sweep", "--spec", str(spec), "--jobs", "4", "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert len(read_csv(a)) == 8


def test_sweep_only_filter_and_plots(tmp_path, capsys):
    spec = write_spec(tmp_path)
    out = tmp_path / "r.csv"
    code, stdout, _ = run_cli(capsys, "sweep", "--spec", str(spec), "--only", "f=0.1,nr=13",
                              "--out", str(out), "--plots", str(tmp_path / "plots"))
    assert code == 0
    summary = json.loads(stdout)
    assert summary["rows"] == 2 and summary["plots"] == 3


def test_sweep_paper_defaults_filtered(tmp_path, capsys):
    out = tmp_path / "r.csv"
    code, stdout, _ = run_cli(capsys, "sweep", "--paper-defaults", "--trials", "1", "--only",
                              "f=0.1,nr=13,ratio=0.5", "--out", str(out))
    assert code == 0 and json.loads(stdout)["rows"] == 1


def test_sweep_malformed_spec_exit_1(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run_cli(capsys, "sweep", "--spec", str(bad))[0] == 1
    assert run_cli(capsys, "sweep", "--spec", str(write_spec(tmp_path, trials=0)))[0] == 1


def test_sweep_io_failure_exit_2(tmp_path, capsys):
    assert run_cli(capsys, "sweep", "--spec", str(tmp_path / "missing.json"))[0] == 2
    spec = write_spec(tmp_path, ratios=[0.5], f_values=[0.1], n_r_values=[9], trials=1)
    out = tmp_path / "no" / "such" / "dir" / "r.csv"
    assert run_cli(capsys, "sweep", "--spec", str(spec), "--out", str(out))[0] == 2


def test_render(tmp_path, capsys):
    spec = write_spec(tmp_path)
    csv_path = tmp_path / "r.csv"
    run_cli(capsys, "sweep", "--spec", str(spec), "--out", str(csv_path))
    code, stdout, _ = run_cli(capsys, "render", "--results", str(csv_path), "--out",
                              str(tmp_path / "plots"))
    assert code == 0 and json.loads(stdout)["files"] == 6
    assert len(list((tmp_path / "plots").glob("*.dat"))) == 6


def test_render_single_nr(tmp_path, capsys):
    spec = write_spec(tmp_path, n_r_values=[11])
    csv_path = tmp_path / "r.csv"
    run_cli(capsys, "sweep", "--spec", str(spec), "--out", str(csv_path))
    code, stdout, _ = run_cli(capsys, "render", "--results", str(csv_path), "--out",
                              str(tmp_path / "p"))
    assert code == 0 and json.loads(stdout)["files"] == 3


@pytest.mark.parametrize("content", ["", "f,n_r\n1,2\n", None])
def test_render_bad_csv_exit_2(tmp_path, capsys, content):
    path = tmp_path / "r.csv"
    if content is not None:
        path.write_text(content)
    code = run_cli(capsys, "render", "--results", str(path), "--out", str(tmp_path / "p"))[0]
    assert code == 2
