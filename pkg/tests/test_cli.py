import csv
import io
import json

import pytest

from spindir.cli import format_fidelity, main
from spindir.fidelity import BESSEL_J0_FIRST_ZERO

TABLE = {
    "P": ["0.75", "0.8", "0.8333", "0.8571", "0.875", "0.8889"],
    "A": ["0.7887", "0.8444", "0.8848", "0.9069", "0.9235", "0.9342"],
    "O": ["0.7887", "0.8449", "0.8873", "0.9114", "0.9306", "0.9429"],
    "G": ["0.8", "0.8889", "0.9412", "0.9697", "0.9846", "0.9922"],
}


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


@pytest.mark.parametrize("x, text", [
    (0.8, "0.8"), (0.75, "0.75"), (0.88885, "0.8889"), (0.12344999, "0.1234"), (8 / 9, "0.8889"),
])
def test_format_fidelity(x, text):
    assert format_fidelity(x) == text


def test_table_text():
    code, out = run("table")
    assert code == 0
    lines = out.splitlines()
    for s, expected in TABLE.items():
        row = next(line for line in lines if line.startswith(s + " "))
        assert row.split()[1:7] == expected
    assert "1-xi^2/N^2" in out


def test_table_single_column():
    code, out = run("table", "--n-min", "2", "--n-max", "2", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    col = [format_fidelity(payload["results"]["fidelity"][s]["2"]) for s in "PAOG"]
    assert col == ["0.75", "0.7887", "0.7887", "0.8"]


def test_table_json_roundtrip():
    code, out = run("table", "--format", "json")
    payload = json.loads(out)
    assert payload["schema_version"] == 1
    assert payload["command"]["name"] == "table"
    for s, expected in TABLE.items():
        got = [format_fidelity(payload["results"]["fidelity"][s][str(n)]) for n in range(2, 8)]
        assert got == expected
    assert payload["results"]["xi"] == BESSEL_J0_FIRST_ZERO


def test_table_csv_matches_text():
    _, out = run("table", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 24
    for r in rows:
        assert format_fidelity(float(r["fidelity"])) == r["display"] == TABLE[r["strategy"]][int(r["n"]) - 2]
    assert out.endswith("\r\n")


def test_table_range_error(capsys):
    code, _ = run("table", "--n-min", "5", "--n-max", "3")
    assert code == 2
    err = capsys.readouterr().err
    assert err.startswith("spindir: error:") and err.count("\n") == 1


def test_fidelity_command():
    code, out = run("fidelity", "--strategy", "O", "--n", "5", "--format", "json")
    r = json.loads(out)["results"]
    assert code == 0
    assert format_fidelity(r["f_closed"]) == "0.9114"
    assert r["abs_diff"] < 1e-10
    _, out = run("fidelity", "--strategy", "P", "--n", "1", "--format", "json")
    assert json.loads(out)["results"]["f_closed"] == pytest.approx(2 / 3)
    _, out = run("fidelity", "--strategy", "G", "--n", "7", "--format", "csv")
    row = next(csv.DictReader(io.StringIO(out)))
    assert format_fidelity(float(row["f_closed"])) == "0.9922"


def test_fidelity_rejects_unsupported(capsys):
    assert run("fidelity", "--strategy", "A", "--n", "1")[0] == 2
    assert run("fidelity", "--strategy", "G", "--n", "63")[0] == 2
    with pytest.raises(SystemExit) as exc:
        run("fidelity", "--strategy", "X", "--n", "3")
    assert exc.value.code == 2


def test_simulate_antiparallel_three():
    code, out = run("simulate", "--strategy", "A", "--n", "3", "--samples", "1000000",
                    "--seed", "42", "--format", "json")
    r = json.loads(out)["results"]
    assert code == 0
    assert abs(r["f_estimate"] - 38 / 45) < 3 * r["stderr"]
    assert abs(r["f_estimate"] - 0.8444) < 3 * r["stderr"] + 5e-5


def test_simulate_deterministic_bytes():
    a = run("simulate", "--strategy", "P", "--n", "2", "--samples", "1000", "--seed", "1", "--format", "json")
    b = run("simulate", "--strategy", "P", "--n", "2", "--samples", "1000", "--seed", "1", "--format", "json")
    assert a == b
    for fmt in ("text", "csv"):
        assert run("simulate", "--strategy", "P", "--n", "2", "--samples", "1000", "--seed", "1",
                   "--format", fmt) == run("simulate", "--strategy", "P", "--n", "2", "--samples",
                                           "1000", "--seed", "1", "--format", fmt)


def test_simulate_worker_invariant():
    base = ["simulate", "--strategy", "O", "--n", "4", "--samples", "200000", "--seed", "8",
            "--format", "json"]
    one = json.loads(run(*base, "--workers", "1")[1])["results"]
    eight = json.loads(run(*base, "--workers", "8")[1])["results"]
    assert one["f_estimate"] == eight["f_estimate"]
    assert one["stderr"] == eight["stderr"]


def test_simulate_cap_and_force(capsys):
    code, _ = run("simulate", "--strategy", "P", "--n", "21", "--samples", "1000")
    assert code == 2
    assert "--force" in capsys.readouterr().err
    assert run("simulate", "--strategy", "G", "--n", "11", "--samples", "1000")[0] == 2
    code, out = run("simulate", "--strategy", "P", "--n", "21", "--samples", "1000", "--force",
                    "--format", "json")
    assert code == 0 and json.loads(out)["results"]["n_spins"] == 21
    assert run("simulate", "--strategy", "P", "--n", "2", "--samples", "10")[0] == 2


def test_scan_asymptotics_optimal_tail():
    code, out = run("scan-asymptotics", "--strategy", "O", "--n-max", "100", "--format", "json")
    series = json.loads(out)["results"]["series"]
    assert code == 0
    assert series[-1]["n"] == 100
    assert series[-1]["scaled_deficit"] == pytest.approx(5.450045755, abs=1e-8)


def test_scan_asymptotics_parallel_and_antiparallel():
    _, out = run("scan-asymptotics", "--strategy", "P", "--n-max", "50", "--format", "csv")
    last = list(csv.DictReader(io.StringIO(out)))[-1]
    assert float(last["scaled_deficit"]) == pytest.approx(50 / 52, abs=1e-14)
    _, out = run("scan-asymptotics", "--strategy", "A", "--n-max", "100", "--format", "json")
    assert json.loads(out)["results"]["series"][-1]["scaled_deficit"] == pytest.approx(0.5, rel=0.05)
    _, out = run("scan-asymptotics", "--strategy", "G", "--n-max", "62", "--format", "json")
    last = json.loads(out)["results"]["series"][-1]
    assert last["scaled_deficit"] == pytest.approx(1.0, abs=1e-15)


def test_scan_asymptotics_range_guard():
    assert run("scan-asymptotics", "--strategy", "O", "--n-max", "121")[0] == 2
    assert run("scan-asymptotics", "--strategy", "G", "--n-max", "63")[0] == 2


def test_formats_agree_for_scan():
    _, text = run("scan-asymptotics", "--strategy", "O", "--n-max", "10")
    _, js = run("scan-asymptotics", "--strategy", "O", "--n-max", "10", "--format", "json")
    series = json.loads(js)["results"]["series"]
    text_rows = [line.split() for line in text.splitlines()[2:]]
    for r, t in zip(series, text_rows):
        assert int(t[0]) == r["n"]
        assert float(t[1]) == pytest.approx(r["fidelity"], abs=1e-15)


def test_selfcheck_passes():
    code, out = run("selfcheck", "--format", "json")
    assert code == 0
    assert all(c["ok"] for c in json.loads(out)["results"])


def test_selfcheck_failure_exit_code(monkeypatch):
    import spindir.cli as cli
    monkeypatch.setattr(cli, "f_optimal", lambda n: 0.0)
    assert run("selfcheck", "--n-max", "4")[0] == 3
