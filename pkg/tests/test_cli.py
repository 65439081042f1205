import json

from sidl.cli import main
from tests.conftest import GAMES


def test_check_ok(capsys):
    assert main(["--no-color", "check", f"{GAMES}/example1.sidl"]) == 0
    assert "OK" in capsys.readouterr().out


def test_check_invalid(tmp_path, capsys):
    bad = tmp_path / "bad.sidl"
    bad.write_text("fact(p, 1).\nchance(0, [0.6, 0.5]).\n"
                   "branching([w, w], 0).\noperation(w) :- false.\n"
                   "terminal :- false.\ninit(account(a, 0.0)).\n")
    assert main(["--no-color", "check", str(bad)]) == 1
    assert "DistributionSum" in capsys.readouterr().out


def test_check_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.sidl"
    bad.write_text("operation(x) :- state(0)")
    assert main(["--no-color", "check", str(bad)]) == 1
    assert "parse error" in capsys.readouterr().err


def test_run_pico(capsys):
    code = main(["--no-color", "run", f"{GAMES}/pico_turn.sidl",
                 "--policy", "alice=fixed:8", "--policy", "bob=fixed:13",
                 "--seed", "7", "--max-chronons", "5"])
    out = capsys.readouterr().out
    assert code == 0
    assert "bob 1.0" in out
    assert "alice 0.0" in out


def test_run_non_terminal_exit_code(capsys):
    code = main(["--no-color", "run", f"{GAMES}/pico_turn.sidl",
                 "--max-chronons", "2", "--policy", "alice=idle",
                 "--policy", "bob=idle"])
    assert code == 2


def test_run_record_and_replay(tmp_path, capsys):
    record = tmp_path / "out.sidlrec"
    assert main(["--no-color", "run", f"{GAMES}/example1.sidl",
                 "--policy", "alice=fixed:Wait,A", "--seed", "3",
                 "--record", str(record)]) == 0
    assert main(["--no-color", "replay", str(record)]) == 0
    assert "replay OK" in capsys.readouterr().out


def test_replay_tampered_exits_3(tmp_path, capsys):
    record = tmp_path / "out.sidlrec"
    main(["--no-color", "run", f"{GAMES}/example1.sidl",
          "--policy", "alice=fixed:Wait,A", "--seed", "3",
          "--record", str(record)])
    lines = record.read_text().splitlines()
    entry = json.loads(lines[-1])
    entry["accounts"]["alice"] += 5.0
    lines[-1] = json.dumps(entry, separators=(",", ":"))
    record.write_text("\n".join(lines) + "\n")
    assert main(["--no-color", "replay", str(record)]) == 3


def test_replay_malformed_exits_1(tmp_path):
    record = tmp_path / "empty.sidlrec"
    record.write_text("")
    assert main(["--no-color", "replay", str(record)]) == 1


def test_deterministic_stdout_and_record(tmp_path, capsys):
    args = ["--no-color", "run", f"{GAMES}/example1.sidl",
            "--policy", "alice=random", "--seed", "21"]
    r1 = tmp_path / "a.sidlrec"
    r2 = tmp_path / "b.sidlrec"
    main(args + ["--record", str(r1)])
    out1 = capsys.readouterr().out
    main(args + ["--record", str(r2)])
    out2 = capsys.readouterr().out
    assert out1.replace(str(r1), "") == out2.replace(str(r2), "")
    assert r1.read_bytes() == r2.read_bytes()
