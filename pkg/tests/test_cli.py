import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from weakvalues.cli import main, run_scenario
from weakvalues.errors import ParseError, ValidationError
from weakvalues.scenario import (BUILTIN, KINDS, builtin_config, list_builtin, parse_scenario,
                                 resolve, serialize)

AAV_Z = {"kind": "weakvalue", "pre_state": "up_x", "post_state": "up_y", "observable": "sigma_z"}


def body_rows(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def header(text):
    return [ln for ln in text.splitlines() if ln.startswith("#")]


# ---------------------------------------------------------------- parsing

def test_parse_minimal_weakvalue():
    cfg = parse_scenario(json.dumps(AAV_Z))
    assert cfg.kind == "weakvalue"
    assert resolve(cfg).dims == {"observable": 2, "pre_state": 2, "post_state": 2}
    assert cfg.samples == 10000 and cfg.seed == 0


def test_parse_missing_delta():
    doc = dict(AAV_Z, kind="postselect")
    with pytest.raises(ValidationError) as err:
        parse_scenario(json.dumps(doc))
    assert err.value.field == "delta"


def test_parse_non_square_matrix():
    doc = dict(AAV_Z, observable=[[1, 0, 0], [0, 1, 0]])
    with pytest.raises(ValidationError, match="square"):
        parse_scenario(json.dumps(doc))


def test_parse_rejects_unknown_key_and_bad_json():
    with pytest.raises(ValidationError) as err:
        parse_scenario(json.dumps(dict(AAV_Z, colour="blue")))
    assert err.value.field == "colour"
    with pytest.raises(ParseError) as perr:
        parse_scenario('{"kind": "weakvalue",\n  "pre_state": }')
    assert perr.value.line == 2


def test_parse_dimension_mismatch():
    with pytest.raises(ValidationError, match="dimensions"):
        parse_scenario(json.dumps(dict(AAV_Z, pre_state=[1, 0, 0])))


def test_explicit_complex_entries():
    doc = {"kind": "weakvalue", "pre_state": [[0.6, 0], 0.8], "post_state": [1, [0, 1]],
           "observable": [[0, [0, -1]], [[0, 1], 0]]}
    res = resolve(parse_scenario(json.dumps(doc)))
    np.testing.assert_array_equal(res.observable, [[0, -1j], [1j, 0]])
    np.testing.assert_array_equal(res.post, [1, 1j])


@pytest.mark.parametrize("name", sorted(BUILTIN))
def test_round_trip(name):
    cfg = builtin_config(name)
    again = parse_scenario(serialize(cfg))
    assert again == cfg
    assert serialize(again) == serialize(cfg)


# ---------------------------------------------------------------- running

def test_run_weakvalue_aav():
    text = run_scenario(parse_scenario(json.dumps(AAV_Z)))
    row = body_rows(text)[0]
    assert float(row["re"]) == pytest.approx(0.0, abs=1e-15)
    assert float(row["im"]) == pytest.approx(1.0, abs=1e-15)
    meta = header(text)
    assert meta[0] == "# kind: weakvalue" and meta[2] == "# seed: 0"
    assert json.loads(meta[3].split(": ", 1)[1])["observable"] == "sigma_z"


def test_run_kaon_toy():
    rows = body_rows(run_scenario(builtin_config("kaon-toy")))
    for row in rows:
        assert float(row["fidelity"]) == pytest.approx(1.00504, abs=1e-5)
        assert float(row["fidelity"]) == pytest.approx(float(row["expected"]), abs=1e-10)


def test_run_postselect_anomalous():
    row = body_rows(run_scenario(builtin_config("anomalous-theta")))[0]
    assert float(row["weak_prediction"]) == pytest.approx(1 / np.cos(1.5), rel=1e-12)
    assert abs(float(row["exact_mean"]) / float(row["weak_prediction"]) - 1) < 0.05


def test_run_nonhermitian_decay():
    rows = body_rows(run_scenario(builtin_config("decay-postselect")))
    p0 = 0.36 / (0.36 + 0.64 * np.exp(-1))
    by_shift = {round(float(r["shift"])): r for r in rows}
    assert float(by_shift[1]["probability"]) == pytest.approx(p0, abs=1e-12)
    assert abs(float(by_shift[1]["empirical_frequency"]) - p0) < 0.02


def test_csv_full_precision():
    text = run_scenario(builtin_config("kaon-toy"))
    value = body_rows(text)[0]["fidelity"]
    assert float(value) == 1 / np.sqrt(1 - 0.01)
    assert len(value.replace(".", "").lstrip("0")) >= 16


def test_serial_parallel_byte_identical():
    cfg = builtin_config("ideal-vs-weak")
    cfg.samples = 3000
    serial = run_scenario(cfg, workers=1)
    parallel = run_scenario(cfg, workers=4)
    assert serial == parallel
    assert run_scenario(cfg) == serial


def test_list_builtin():
    text = list_builtin()
    lines = text.splitlines()
    assert len(lines) == 7 == len(BUILTIN)
    assert "spin-protection" in text
    for line, (name, (_, doc)) in zip(lines, BUILTIN.items()):
        assert line.startswith(name) and f"[{doc['kind']}]" in line
    assert {doc["kind"] for _, doc in BUILTIN.values()} == set(KINDS) - {"weakvalue", "weak-ensemble"}


# ---------------------------------------------------------------- command line

def test_main_list(capsys):
    assert main(["scenario", "list"]) == 0
    assert "kaon-toy" in capsys.readouterr().out


def test_main_weakvalue_subcommand(capsys):
    assert main(["weakvalue", "--observable", "sigma_x"]) == 0
    row = body_rows(capsys.readouterr().out)[0]
    assert float(row["re"]) == pytest.approx(1.0) and float(row["im"]) == pytest.approx(0.0, abs=1e-15)


def test_main_degenerate_exit_code(capsys):
    assert main(["protective", "--system", "identity", "--pre", "up_x"]) == 3
    err = capsys.readouterr().err.strip()
    assert "DegenerateSpectrum" in err and "\n" not in err


def test_main_validation_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"kind": "postselect", "pre_state": "up_x", "post_state": "up_y",
                               "observable": "sigma_z"}))
    assert main(["scenario", "run", str(bad)]) == 2
    assert "delta" in capsys.readouterr().err
    bad.write_text("{not json")
    assert main(["scenario", "run", str(bad)]) == 2
    assert main(["scenario", "run", "no-such-builtin"]) == 2


def test_main_out_file_and_overrides(tmp_path):
    out = tmp_path / "run.csv"
    assert main(["scenario", "run", "ideal-vs-weak", "--samples", "50", "--seed", "9",
                 "--out", str(out)]) == 0
    text = out.read_text()
    assert "# seed: 9" in text
    assert len([r for r in body_rows(text) if r["sample_index"] != "summary"]) == 50


def test_main_weakness_guard_exit_code(capsys):
    assert main(["weak-ensemble", "--delta", "1"]) == 3
    assert "WeaknessViolated" in capsys.readouterr().err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "weakvalues", "kaon-toy", "--epsilon", "0.3"],
                          capture_output=True, text=True, check=True)
    row = body_rows(proc.stdout)[0]
    assert float(row["fidelity"]) == pytest.approx(1 / np.sqrt(1 - 0.09), abs=1e-10)
