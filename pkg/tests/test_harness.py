import json
import shutil
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import pytest

from ratproof.cli import main
from ratproof.errors import AuditFailed, ConfigInvalid
from ratproof.harness import Report, load_config, parse_config, run_experiment, validate_rip
from ratproof.harness import runner

DATA = Path(__file__).parent / "data"

NP_CONFIG = """
[protocol]
kind = "np"
{protocol_extra}

{inputs}

[analysis]
steps = {steps}
gap_gamma = 3
intervals = 6

[transform]
gamma = 3

[amplify]
gamma_prime = 3
n = 16
"""

NP_INPUTS = """
[[inputs]]
formulas = ["phi1.cnf"]
label = "member"

[[inputs]]
formulas = ["phi2.cnf"]
label = "nonmember"
"""


def write_config(tmp_path, steps='["gap"]', inputs=NP_INPUTS, protocol_extra="", text=None, name="exp"):
    for f in DATA.glob("*.cnf"):
        shutil.copy(f, tmp_path / f.name)
    path = tmp_path / f"{name}.toml"
    path.write_text(text or NP_CONFIG.format(steps=steps, inputs=inputs, protocol_extra=protocol_extra))
    return path


def strip_timestamp(text):
    data = json.loads(text)
    data.pop("timestamp")
    return json.dumps(data, sort_keys=True)


# --- configuration --------------------------------------------------------


def test_config_loads_and_resolves_paths(tmp_path):
    cfg = load_config(write_config(tmp_path))
    assert cfg.kind == "np" and len(cfg.inputs) == 2
    assert cfg.inputs[0].formulas[0] == (tmp_path / "phi1.cnf").resolve()
    assert cfg.inputs[0].name == "phi1"
    assert cfg.gap_gamma == 3 and cfg.caps.profiles == 2**20


@pytest.mark.parametrize(
    "data",
    [
        {"protocol": {"kind": "quantum"}},
        {"inputs": [{"formulas": ["phi1.cnf"]}]},  # no label
        {"inputs": [{"formulas": ["phi1.cnf"], "label": "maybe"}]},
        {"inputs": [{"formulas": ["nowhere.cnf"], "label": "member"}]},
        {"inputs": [{"formulas": ["phi1.cnf"], "bits": "1", "label": "member"}]},
        {"analysis": {"steps": ["gap", "dance"]}},
        {"analysis": {"steps": ["decide"]}},  # intervals missing
        {"caps": {"profiles": 0}},
        {"amplify": {"gamma_prime": "x/y"}},
        {"protocol": {"kind": "oracle", "gamma": 2}, "inputs": [{"formulas": ["phi1.cnf"], "label": "member"}]},
        {"surprise": {}},
    ],
)
def test_invalid_configs(data, tmp_path):
    write_config(tmp_path)
    with pytest.raises(ConfigInvalid):
        parse_config(data, tmp_path)


def test_malformed_toml_is_a_config_error(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text("[protocol\nkind = 1")
    with pytest.raises(ConfigInvalid):
        load_config(path)


# --- experiments ----------------------------------------------------------


def test_np_gap_experiment(tmp_path):
    report = run_experiment(load_config(write_config(tmp_path)))
    assert [row["utility_gap"] for row in report.gap_table] == [Fraction(1, 2)] * 2
    assert [row["answer_bit"] for row in report.gap_table] == [1, 0]
    assert report.gap_check["holds"]
    assert all(row["ok"] for row in report.audit)
    assert report.inputs[0]["strategy_class"] == "deterministic"


def test_all_steps(tmp_path):
    cfg = load_config(write_config(tmp_path, steps='["amplify", "gap", "transform", "decide"]'))
    assert cfg.steps == ("gap", "decide", "transform", "amplify")
    report = run_experiment(cfg)
    assert all(row["agree"] and row["homogeneous"] for row in report.decider)
    t = report.transform
    assert t["completeness"] == 1 and t["gap_condition"]["holds"]
    assert t["rounding_margin"] == Fraction(1, 6) and t["gamma_prime"] == 3
    assert t["provenance"]["zero_one_rounding"]["G"] == 8
    amp = report.amplification
    assert amp["completeness_ok"] and amp["soundness_ok"]


def test_audit_failure_stops_the_run(tmp_path, monkeypatch):
    real = runner._audit_row

    def failing(spec, x, cfg):
        row = real(spec, x, cfg)
        row.update(ok=False, violations=["forced"])
        return row

    monkeypatch.setattr(runner, "_audit_row", failing)
    with pytest.raises(AuditFailed):
        run_experiment(load_config(write_config(tmp_path)))


def test_report_round_trip(tmp_path):
    cfg = load_config(write_config(tmp_path, steps='["gap", "decide", "transform", "amplify"]'))
    report = run_experiment(cfg)
    assert Report.from_json(report.to_json()) == report


def test_rationals_carry_exact_and_decimal_forms(tmp_path):
    report = run_experiment(load_config(write_config(tmp_path)))
    data = json.loads(report.to_json())
    assert data["gap_table"][1]["optimum"] == {"exact": "1/2", "decimal": "0.5"}
    assert "tool" in data and data["version"]


def test_validate(tmp_path):
    assert validate_rip(load_config(write_config(tmp_path))).passed
    bad = validate_rip(load_config(write_config(tmp_path, protocol_extra='corruption = "swap-zero-one"')))
    assert not bad.passed and bad.offending == ["phi2"]
    empty = validate_rip(load_config(write_config(tmp_path, inputs="")))
    assert empty.passed and empty.vacuous


# --- command line ---------------------------------------------------------


def test_help_documents_exit_codes(capsys):
    with pytest.raises(SystemExit) as info:
        main(["run", "--help"])
    assert info.value.code == 0
    out = capsys.readouterr().out
    for line in ("0  success", "1  analysis failure", "2  configuration error", "3  enumeration cap exceeded"):
        assert line in out


def test_cli_writes_report_table_and_figures(tmp_path):
    cfg = write_config(tmp_path, steps='["gap", "transform", "amplify"]')
    out = tmp_path / "res" / "report.json"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    assert Report.from_json(out.read_text()).gap_table
    assert out.with_suffix(".csv").read_text().startswith("input,label,answer_bit")
    assert (tmp_path / "res" / "report_gap.png").stat().st_size > 0
    assert (tmp_path / "res" / "report_amplify.png").stat().st_size > 0


def test_cli_reports_are_deterministic(tmp_path):
    cfg = write_config(tmp_path, steps='["gap", "decide", "transform", "amplify"]')
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["run", "--config", str(cfg), "--out", str(a)]) == 0
    assert main(["run", "--config", str(cfg), "--out", str(b)]) == 0
    assert strip_timestamp(a.read_text()) == strip_timestamp(b.read_text())
    ta = [l for l in a.read_text().splitlines() if '"timestamp"' not in l]
    tb = [l for l in b.read_text().splitlines() if '"timestamp"' not in l]
    assert ta == tb


def test_cli_csv_to_stdout(tmp_path, capsys):
    cfg = write_config(tmp_path)
    assert main(["gap", "--config", str(cfg), "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[1] == "phi1,member,1,1,1/2,1/2,False,8,1"
    assert lines[2] == "phi2,nonmember,0,1/2,0,1/2,False,4,1"


def test_cli_exit_codes(tmp_path, capsys):
    cfg = write_config(tmp_path)
    assert main(["gap", "--config", str(tmp_path / "missing.toml")]) == 2
    missing = write_config(tmp_path, inputs=NP_INPUTS.replace("phi2.cnf", "gone.cnf"), name="missing")
    assert main(["gap", "--config", str(missing)]) == 2
    assert main(["gap", "--config", str(cfg), "--caps", "2"]) == 3
    assert main(["gap", "--config", str(cfg), "--caps", "0"]) == 2
    assert main(["decide", "--config", str(cfg)]) == 0
    assert main(["validate", "--config", str(cfg)]) == 0
    corrupt = write_config(tmp_path, protocol_extra='corruption = "swap-zero-one"', name="corrupt")
    assert main(["validate", "--config", str(corrupt)]) == 1
    assert "offending input: phi2" in capsys.readouterr().err


def test_cli_invalid_rip_exits_one(tmp_path, capsys):
    text = """
[protocol]
kind = "toy"
wrap = true
bind_first_message = false

[[inputs]]
bits = "110"
label = "member"
"""
    cfg = write_config(tmp_path, text=text)
    assert main(["gap", "--config", str(cfg)]) == 1
    assert "INVALID-RIP" in capsys.readouterr().err


def test_cli_amplify_with_given_parameters(tmp_path, capsys):
    text = """
[protocol]
kind = "certificate"

[amplify]
gamma_prime = 6
n = 16
c = "3/5"
s = "2/5"
"""
    cfg = write_config(tmp_path, text=text)
    assert main(["amplify", "--config", str(cfg)]) == 0
    report = Report.from_json(capsys.readouterr().out)
    assert report.amplification["rho"] == 15971
    assert report.amplification["tau"] == Fraction(15971 * 3 * 23, 5 * 24)


def test_cli_small_repetition_spot_check(tmp_path, capsys):
    text = NP_INPUTS + """
[protocol]
kind = "certificate"

[analysis]
steps = ["amplify"]

[amplify]
gamma_prime = 2
n = 4
c = "1"
s = "0"
rho = 16
"""
    cfg = write_config(tmp_path, text=text)
    assert main(["run", "--config", str(cfg), "--seed", "7"]) == 0
    rows = Report.from_json(capsys.readouterr().out).amplification["spot_check"]
    assert [r["executed"] for r in rows] == [1, 0]
    assert all(r["agree"] for r in rows)
    assert [r["sampled_accepts"] for r in rows] == [16, 0]


def test_console_script_entry_point(tmp_path):
    cfg = write_config(tmp_path)
    proc = subprocess.run(
        [sys.executable, "-m", "ratproof.cli", "gap", "--config", str(cfg), "--format", "csv"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and proc.stdout.startswith("input,")
