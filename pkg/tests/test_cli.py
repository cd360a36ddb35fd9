import csv
import io
import json

import pytest

from fundmod.cli import main


def run(capsys, *args):
    code = main(list(args))
    return code, capsys.readouterr().out


def test_report_four_cycle(capsys):
    code, out = run(capsys, "report", "--diameter", "2", "--parity", "even", "--backend", "exact")
    assert code == 0
    assert json.loads(out)["dim_lambda"] == 10


@pytest.mark.parametrize("args", [
    ["report", "--diameter", "1", "--parity", "even"],
    ["report", "--diameter", "2", "--parity", "sideways"],
    ["report", "--parity", "even"],
    ["frobnicate", "--diameter", "2", "--parity", "even"],
    ["report", "--diameter", "40", "--parity", "odd", "--backend", "float"],
])
def test_usage_errors_exit_2(args, capsys):
    with pytest.raises(SystemExit) as exc:
        main(args)
    assert exc.value.code == 2


def test_transition_is_square_csv(capsys):
    code, out = run(capsys, "transition", "--diameter", "2", "--parity", "odd")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert len(rows) == 14 and all(len(r) == 14 for r in rows)
    assert rows[1][0] == "(0,0,0)"
    assert json.loads(rows[1][1]) == {"order": 5, "coeffs": ["1/5", "0/1", "0/1", "0/1"]}


@pytest.mark.parametrize("command", ["spectrum", "orbits", "bases", "verify"])
@pytest.mark.parametrize("backend", ["exact", "float"])
def test_json_commands(command, backend, capsys):
    code, out = run(capsys, command, "--diameter", "2", "--parity", "odd", "--backend", backend)
    assert code == 0
    doc = json.loads(out)
    assert doc["n"] == 5


def test_orbits_output(capsys):
    _, out = run(capsys, "orbits", "--diameter", "2", "--parity", "even")
    doc = json.loads(out)
    assert doc["count"] == 10
    reps = [o["representative"] for o in doc["orbits"]]
    assert reps == sorted(reps)


def test_outputs_are_byte_identical(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert main(["report", "--diameter", "2", "--parity", "odd", "--out", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert capsys.readouterr().out == ""
    assert sorted(x.name for x in tmp_path.iterdir()) == ["a.json", "b.json"]


def test_check_failure_exits_1_with_json(monkeypatch, capsys):
    import fundmod.cli as cli
    from fundmod.errors import ConsistencyError

    def broken(scheme, args):
        raise ConsistencyError("injected")
    monkeypatch.setitem(cli.HANDLERS, "bases", broken)
    code, out = run(capsys, "bases", "--diameter", "2", "--parity", "even")
    assert code == 1
    doc = json.loads(out)
    assert doc["ok"] is False and "injected" in doc["error"]


def test_failed_report_exits_1(monkeypatch, capsys, tmp_path):
    import fundmod.cli as cli
    monkeypatch.setattr(cli, "full_report", lambda *a, **k: {"ok": False, "failures": ["x"]})
    code, out = run(capsys, "report", "--diameter", "2", "--parity", "even",
                    "--out", str(tmp_path / "r.json"))
    assert code == 1 and json.loads(out)["ok"] is False


def test_help_mentions_orderings(capsys):
    with pytest.raises(SystemExit):
        main(["--help"])
    assert "lexicographic" in capsys.readouterr().out
