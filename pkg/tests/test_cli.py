import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from negwave.cli import RunConfig, emit, main, parse_angle, parse_config, run
from negwave.errors import ConfigError

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def invoke(args, capsys):
    code = main(args)
    out, err = capsys.readouterr()
    return code, out, err


class TestParseConfig:
    def test_defaults(self):
        cfg = parse_config(["--scenario", "hardy", "--command", "report"])
        assert cfg == RunConfig(scenario="hardy", command="report")
        assert (cfg.format, cfg.seed, cfg.paper_literal) == ("text", 0, False)

    def test_theta(self):
        cfg = parse_config(["--scenario", "rotated-pbs", "--theta", "0.6435", "--command", "report", "--format", "json"])
        assert cfg.theta == pytest.approx(math.atan2(0.6, 0.8), abs=1e-4)
        assert math.cos(cfg.theta) == pytest.approx(0.8, abs=1e-4)
        assert cfg.format == "json"

    def test_unknown_scenario(self):
        with pytest.raises(ConfigError) as exc:
            parse_config(["--scenario", "nosuch", "--command", "report"])
        assert exc.value.key == "scenario"

    @pytest.mark.parametrize(
        "text, value",
        [("0.5", 0.5), ("pi", math.pi), ("pi/8", math.pi / 8), ("3pi/8", 3 * math.pi / 8), ("-0.5*pi", -math.pi / 2)],
    )
    def test_angles(self, text, value):
        assert parse_angle(text) == pytest.approx(value)

    def test_bad_angle(self):
        with pytest.raises(ValueError):
            parse_angle("tau")

    def test_file_and_override(self):
        cfg = parse_config(["--config", str(CONFIGS / "rotated-pbs.ini"), "--format", "csv"])
        assert cfg.scenario == "rotated-pbs" and cfg.command == "report"
        assert cfg.format == "csv"
        assert cfg.theta == pytest.approx(math.atan2(0.6, 0.8), abs=1e-12)

    def test_file_lists(self):
        cfg = parse_config(["--config", str(CONFIGS / "hardy.ini")])
        assert cfg.settings == (("signal", "computational"), ("idler", "computational"))
        assert (cfg.n, cfg.seed) == (100000, 20240601)

    def test_unknown_key_reports_line(self, tmp_path):
        f = tmp_path / "bad.ini"
        f.write_text("[run]\nscenario = hardy\ncommand = report\ncolour = blue\n")
        with pytest.raises(ConfigError) as exc:
            parse_config(["--config", str(f)])
        assert exc.value.key == "colour" and exc.value.line == 4

    def test_bad_value_reports_line(self, tmp_path):
        f = tmp_path / "bad.ini"
        f.write_text("[run]\nscenario = hardy\ncommand = sample\nn = many\n")
        with pytest.raises(ConfigError) as exc:
            parse_config(["--config", str(f)])
        assert exc.value.key == "n" and exc.value.line == 4

    def test_all_examples_parse(self):
        for f in sorted(CONFIGS.glob("*.ini")):
            parse_config(["--config", str(f)])


class TestRun:
    def test_report_eq7(self):
        rep = run(parse_config(["--scenario", "sps-cascade", "--command", "report"]))
        erased = [r["ket"] for r in rep.rows if r["status"] == "erased"]
        assert erased == ["|photon-1:x, photon-2:y>", "|photon-1:y, photon-2:x>"]

    def test_literal_residual_field(self):
        rep = run(parse_config(["--scenario", "single-photon-bs", "--command", "report", "--paper-literal"]))
        (term,) = rep.fields["paper_literal_residual"]
        assert term["ket"] == "|idler:1, mode-r:1, mode-t:1>"
        assert abs(term["amp"]) == pytest.approx(math.sqrt(2), abs=1e-10)

    def test_chsh(self):
        rep = run(parse_config(["--scenario", "sps-cascade", "--command", "chsh", "--angles", "0", "pi/4", "pi/8", "3pi/8"]))
        assert rep.rows[0]["S"] == pytest.approx(2 * math.sqrt(2), abs=1e-9)

    def test_correlate_pairs(self):
        rep = run(parse_config(["--scenario", "sps-cascade", "--command", "correlate", "--angles", "0", "0", "0", "pi/4"]))
        assert [r["E"] for r in rep.rows] == pytest.approx([1, 0], abs=1e-12)

    def test_sample_metadata(self):
        rep = run(parse_config(["--scenario", "hardy", "--command", "sample", "--n", "100", "--seed", "3"]))
        assert rep.fields["seed"] == 3 and rep.fields["generator"] == "numpy.random.PCG64"
        assert sum(r["count"] for r in rep.rows) == 100


class TestEmit:
    def test_csv_columns(self):
        rep = run(parse_config(["--scenario", "hardy", "--command", "report"]))
        lines = [l for l in emit(rep, "csv").decode().splitlines() if not l.startswith("#")]
        assert lines[0] == "ket,indep_re,indep_im,negative_re,negative_im,psi_re,psi_im,status"
        assert len(lines) == 5

    def test_no_negative_zero_and_no_empty_rows(self):
        rep = run(parse_config(["--scenario", "hardy", "--command", "conditional", "--given", "signal=u"]))
        text = emit(rep, "csv").decode()
        assert "-0," not in text and "-0\n" not in text
        assert "idler:u" not in text
        assert len(rep.rows) == 1

    def test_json_schema(self):
        rep = run(parse_config(["--scenario", "sps-cascade", "--command", "decompose"]))
        doc = json.loads(emit(rep, "json"))
        assert doc["schema_version"] == 1
        assert doc["fields"]["alpha_re"] == 2 and doc["fields"]["beta_re"] == pytest.approx(math.sqrt(2), rel=1e-11)
        assert set(doc["rows"][0]) == {"ket", "psi_re", "psi_im", "indep_re", "indep_im", "negative_re", "negative_im"}

    def test_byte_identical(self):
        cfg = parse_config(["--scenario", "rotated-pbs", "--theta", "0.3", "--command", "decompose", "--format", "json"])
        assert emit(run(cfg), "json") == emit(run(cfg), "json")


class TestMain:
    def test_verify_roundtrip(self, tmp_path, capsys):
        out = tmp_path / "d.json"
        code, _, _ = invoke(["--scenario", "hardy", "--command", "decompose", "--format", "json", "--output", str(out)], capsys)
        assert code == 0
        code, stdout, _ = invoke(["--command", "verify", "--input", str(out), "--format", "json"], capsys)
        assert code == 0
        assert json.loads(stdout)["fields"]["ok"] is True

    def test_verify_detects_tampering(self, tmp_path, capsys):
        out = tmp_path / "d.json"
        invoke(["--scenario", "sps-cascade", "--command", "decompose", "--format", "json", "--output", str(out)], capsys)
        doc = json.loads(out.read_text())
        doc["rows"][1]["negative_re"] = 0.9
        out.write_text(json.dumps(doc))
        code, _, err = invoke(["--command", "verify", "--input", str(out)], capsys)
        assert code == 1 and "verification failed" in err

    @pytest.mark.parametrize(
        "args, code",
        [
            (["--scenario", "hardy", "--command", "report"], 0),
            (["--scenario", "sps-cascade", "--command", "chsh", "--angles", "0", "1", "2", "3"], 0),
            (["--scenario", "nosuch", "--command", "report"], 2),
            (["--scenario", "hardy"], 2),
            (["--scenario", "hardy", "--command", "dance"], 2),
            (["--scenario", "hardy", "--command", "report", "--format", "xml"], 2),
            (["--scenario", "hardy", "--command", "report", "--bogus"], 2),
            (["--scenario", "rotated-pbs", "--command", "report"], 2),
            (["--scenario", "hardy", "--theta", "0.3", "--command", "report"], 2),
            (["--scenario", "hardy", "--command", "report", "--paper-literal"], 2),
            (["--scenario", "hardy", "--command", "chsh", "--angles", "0", "1"], 2),
            (["--scenario", "hardy", "--command", "conditional"], 2),
            (["--scenario", "hardy", "--command", "sample", "--n", "0"], 2),
            (["--command", "verify"], 2),
            (["--config", "/nonexistent.ini"], 2),
            (["--scenario", "hardy", "--command", "conditional", "--given", "signal=w"], 1),
            (["--scenario", "single-photon-bs", "--command", "conditional", "--given", "idler=0"], 1),
            (["--scenario", "single-photon-bs", "--command", "chsh", "--angles", "0", "1", "2", "3"], 1),
            (["--scenario", "hardy", "--command", "sample", "--setting", "ghost=0.1"], 1),
            (["--scenario", "hardy", "--command", "report", "--output", "/nonexistent/dir/out.txt"], 1),
            (["--command", "verify", "--input", "/nonexistent.json"], 1),
        ],
    )
    def test_exit_codes(self, args, code, capsys):
        got, out, err = invoke(args, capsys)
        assert got == code, err
        if code:
            assert out == "" and err.strip()

    def test_subprocess_byte_identical(self):
        cmd = [sys.executable, "-m", "negwave", "--config", str(CONFIGS / "hardy.ini"), "--n", "2000"]
        a = subprocess.run(cmd, capture_output=True, check=True).stdout
        b = subprocess.run(cmd, capture_output=True, check=True).stdout
        assert a == b and a
