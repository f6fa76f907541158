import csv
import io
import json
import math

import numpy as np
import pytest

from chshbound.cli import LAMBDA_COLUMNS, THETA_COLUMNS, main
from chshbound.states import SchmidtForm, lambda_state, maximally_mixed, save_state, schmidt_to_pure


@pytest.fixture
def write_state(tmp_path):
    def _write(state, name="state.json"):
        path = tmp_path / name
        save_state(state, path)
        return str(path)

    return _write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_state_info_bell(capsys, write_state):
    path = write_state(schmidt_to_pure(SchmidtForm(math.pi / 2)))
    code, out, _ = run(capsys, "state-info", "--input", path, "--format", "json")
    assert code == 0
    rec = json.loads(out)
    assert rec["kind"] == "pure"
    assert rec["entropy"] == pytest.approx(1.0, abs=1e-12)
    assert rec["concurrence"] == pytest.approx(1.0, abs=1e-12)
    assert rec["theta"] == pytest.approx(math.pi / 2, abs=1e-9)


def test_state_info_lambda_csv(capsys, write_state):
    code, out, _ = run(capsys, "state-info", "--input", write_state(lambda_state(2.7)))
    assert code == 0
    (row,) = rows_of(out)
    assert row["concurrence"] == "0.6"
    assert row["kind"] == "density"
    assert row["theta"] == ""


@pytest.mark.parametrize(
    "state, verdict",
    [
        (schmidt_to_pure(SchmidtForm(math.pi / 2)), "maximal"),
        (schmidt_to_pure(SchmidtForm(0.2)), "no-violation"),
        (lambda_state(4.0), "violation"),
    ],
)
def test_bound_verdicts(capsys, write_state, state, verdict):
    code, out, _ = run(capsys, "bound", "--input", write_state(state), "--format", "json", "--starts", "16")
    assert code == 0
    assert json.loads(out)["verdict"] == verdict


def test_bound_maximally_mixed(capsys, write_state):
    code, out, _ = run(capsys, "bound", "--input", write_state(maximally_mixed()), "--starts", "8")
    assert code == 0
    (row,) = rows_of(out)
    assert abs(float(row["value"])) < 1e-8
    assert row["method"] == "numeric"


def test_bound_numeric_flag_on_pure(capsys, write_state):
    path = write_state(schmidt_to_pure(SchmidtForm(math.pi / 2)))
    _, out, _ = run(capsys, "bound", "--input", path, "--numeric", "--starts", "8", "--format", "json")
    rec = json.loads(out)
    assert rec["method"] == "numeric"
    assert rec["value"] == pytest.approx(2 * math.sqrt(2), abs=1e-8)
    assert rec["a_beta"] is not None


def test_malformed_json_exits_2(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "pure", "data": [')
    code, out, err = run(capsys, "bound", "--input", str(bad))
    assert code == 2
    assert out == ""
    assert "invalid state: json" in err


def test_invalid_state_names_invariant(capsys, tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps({"kind": "density", "data": [[0.5, 0]] * 16}))
    code, _, err = run(capsys, "state-info", "--input", str(p))
    assert code == 2
    assert "trace" in err


def test_missing_input(capsys, tmp_path):
    code, _, err = run(capsys, "state-info", "--input", str(tmp_path / "nope.json"))
    assert code == 2
    assert "cannot read" in err


@pytest.mark.parametrize("flag", [["--starts", "-1"], ["--tol", "0"], ["--seed", "x"], ["--chi", ""]])
def test_bad_flags_exit_2(capsys, flag):
    with pytest.raises(SystemExit) as exc:
        main(["sweep-theta", *flag])
    assert exc.value.code == 2


def test_output_file_matches_stdout(capsys, write_state, tmp_path):
    path = write_state(lambda_state(1.5))
    _, out, _ = run(capsys, "state-info", "--input", path)
    target = tmp_path / "out.csv"
    run(capsys, "state-info", "--input", path, "--output", str(target))
    assert target.read_bytes() == out.encode()


def test_csv_round_trip(capsys, tmp_path):
    target = tmp_path / "theta.csv"
    args = ["sweep-theta", "--grid-step", str(math.pi / 4), "--chi", "0", "--starts", "8"]
    run(capsys, *args, "--output", str(target))
    rows = rows_of(target.read_text())
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(THETA_COLUMNS), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    assert buf.getvalue().encode() == target.read_bytes()


def test_sweep_theta_rows(capsys):
    code, out, _ = run(capsys, "sweep-theta", "--grid-step", str(math.pi / 4), "--chi", "0,3.14159", "--starts", "8")
    assert code == 0
    rows = rows_of(out)
    assert tuple(rows[0]) == THETA_COLUMNS
    assert len(rows) == 10
    for r in rows:
        assert float(r["bound_numeric"]) == pytest.approx(float(r["bound_analytic"]), abs=1e-5)
        assert r["classical_bound"] == "2"


def test_sweep_lambda_json(capsys):
    code, out, _ = run(capsys, "sweep-lambda", "--grid-step", "0.1", "--starts", "8", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert tuple(doc["rows"][0]) == LAMBDA_COLUMNS
    assert len(doc["rows"]) == 41
    assert doc["summary"]["onset"] == pytest.approx((9 * math.sqrt(2) - 7) / 2, abs=1e-6)
    assert doc["summary"]["turning_point"] == pytest.approx(3.5, abs=0.01)


def test_sweep_lambda_csv_summary_on_stderr(capsys):
    code, out, err = run(capsys, "sweep-lambda", "--grid-step", "0.25", "--starts", "8")
    assert code == 0
    assert out.splitlines()[0] == ",".join(LAMBDA_COLUMNS)
    assert err.startswith("summary: onset=")


def test_verify_small(capsys):
    code, out, _ = run(capsys, "verify", "--samples", "20", "--starts", "16")
    assert code == 0
    assert out.splitlines()[-1].endswith("suites passed")
    assert "FAIL" not in out


def test_state_info_numbers_are_finite(capsys, write_state):
    _, out, _ = run(capsys, "state-info", "--input", write_state(lambda_state(0.0)), "--format", "json")
    rec = json.loads(out)
    assert all(np.isfinite(v) for k, v in rec.items() if k not in ("kind", "theta"))
