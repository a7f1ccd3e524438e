"""Command-line interface: pipelines, exit codes, and output formats."""

import json

import pytest

from lamalg.cli import EXIT_FAIL, EXIT_FUEL, EXIT_OK, EXIT_PARSE, main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestParse:
    def test_echoes_canonical_form(self, capsys):
        code, out, _ = run(capsys, "parse", "(x+y)  +  x")
        assert code == EXIT_OK and out.strip() == "x + x + y"

    def test_parse_error_exit_code(self, capsys):
        code, out, err = run(capsys, "parse", "x + + y")
        assert code == EXIT_PARSE and "parse error" in err

    def test_reads_from_file(self, capsys, tmp_path):
        src = tmp_path / "t.lam"
        src.write_text("2 . 3 . x")
        code, out, _ = run(capsys, "parse", str(src))
        assert code == EXIT_OK and out.strip() == "2 . 3 . x"


class TestNormalize:
    def test_weighted_sum(self, capsys):
        code, out, _ = run(capsys, "normalize", "0.9 . t + 1.1 . t")
        assert code == EXIT_OK and out.strip() == "2 . t"

    def test_trace_lists_rules(self, capsys):
        code, out, _ = run(capsys, "normalize", "--trace", "2 . 3 . x")
        assert code == EXIT_OK
        assert "scalar_scalar" in out and out.strip().endswith("6 . x")

    def test_json_payload(self, capsys):
        code, out, _ = run(capsys, "normalize", "--json", "(\\x:U. x) b")
        payload = json.loads(out)
        assert code == EXIT_OK
        assert payload["term"] == "b" and payload["exhausted"] is False
        assert payload["steps"] >= 1

    def test_fuel_exhaustion(self, capsys):
        diverging = "(\\x:B. b + x x) (\\x:B. b + x x)"
        code, out, _ = run(capsys, "normalize", "--fuel", "50", diverging)
        assert code == EXIT_FUEL and "fuel exhausted after 50 steps" in out


class TestTypecheck:
    def test_with_context(self, capsys):
        code, out, _ = run(capsys, "typecheck", "--ctx", "t:T", "0.9 . t + 1.1 . t")
        assert code == EXIT_OK and out.strip() == "T"

    def test_type_error(self, capsys):
        code, out, err = run(capsys, "typecheck", "--ctx", "x:U", "x x")
        assert code == EXIT_FAIL and "type error (not_an_arrow_sum)" in err


class TestPrecedes:
    def test_related_prints_witness(self, capsys):
        code, out, _ = run(capsys, "precedes", "T", "T + T")
        assert code == EXIT_OK and "<=" in out

    def test_unrelated(self, capsys):
        code, out, _ = run(capsys, "precedes", "T + T", "T")
        assert code == EXIT_FAIL and "NotRelated" in out


class TestSrCheck:
    def test_clean_term(self, capsys):
        code, out, _ = run(capsys, "sr-check", "--ctx", "t:T", "0.9 . t + 1.1 . t")
        assert code == EXIT_OK and "ok" in out and "FAIL" not in out

    def test_reports_untypeable_reduct(self, capsys):
        code, out, _ = run(
            capsys, "sr-check", "--ctx", "f:U -> T, g:V", "f (0.9 . g)"
        )
        assert code == EXIT_FAIL and "FAIL" in out and "untypeable" in out


class TestAbstractionPipelines:
    def test_abstract_floors_weights(self, capsys):
        code, out, _ = run(capsys, "abstract", "5/2 . y + 0.9 . x")
        assert code == EXIT_OK and out.strip() == "y + y + zero"

    def test_a_normalize(self, capsys):
        code, out, _ = run(capsys, "a-normalize", "(\\x:U. f x) (2 . b)")
        assert code == EXIT_OK and out.strip() == "f b + f b"

    def test_translate(self, capsys):
        code, out, _ = run(
            capsys, "translate", "--json", "--ctx", "b:U, f:U -> T", "f (2 . b)"
        )
        payload = json.loads(out)
        assert code == EXIT_OK and "shape" in payload and "term" in payload

    def test_fp_normalize(self, capsys):
        code, out, _ = run(
            capsys, "fp-normalize", "--ctx", "b:U, f:U -> T", "f (2 . b)"
        )
        assert code == EXIT_OK and out.strip() == "(f b, f b)"

    @pytest.mark.parametrize("level", ["additive", "fp"])
    def test_square_holds(self, capsys, level):
        code, out, _ = run(
            capsys,
            "square",
            "--level",
            level,
            "--ctx",
            "b1:U, b2:U, g:U -> W, h:U -> V",
            "((\\x:U. g x) + (\\y:U. h y)) (b1 + b2)",
        )
        assert code == EXIT_OK and "square holds" in out


class TestFuzz:
    def test_report_and_figures(self, capsys, tmp_path):
        report = tmp_path / "out" / "fuzz.ndjson"
        code, out, _ = run(
            capsys,
            "fuzz",
            "--seed", "5",
            "--samples", "25",
            "--report", str(report),
            "--figures", str(tmp_path / "figs"),
        )
        assert code == EXIT_OK
        assert "rules covered:" in out
        assert report.exists()
        assert len(list((tmp_path / "figs").glob("*.png"))) == 3
        for name in ("subject-reduction", "confluence", "oracle-agreement"):
            assert name in out
