"""File formats and the command-line driver."""

import json
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import pytest

from fvx import io as fio
from fvx import mutations as mu
from fvx import suites as su
from fvx.cli import main
from fvx.forms_core import FiveForm
from fvx.metric_dual import MetricConfig
from fvx.polyfield import parse_poly

DEMO = Path(__file__).resolve().parent.parent / "demo"


# -- rationals ---------------------------------------------------------------


def test_parse_rational_accepts_int_and_string():
    assert fio.parse_rational(7, "x") == Fraction(7)
    assert fio.parse_rational("-3/4", "x") == Fraction(-3, 4)


def test_parse_rational_rejects_bool_and_float():
    with pytest.raises(fio.FormatError, match="boolean"):
        fio.parse_rational(True, "x")
    with pytest.raises(fio.FormatError, match="expected a rational"):
        fio.parse_rational(0.5, "x")
    with pytest.raises(fio.FormatError, match="bad rational"):
        fio.parse_rational("3//4", "x")


def test_format_rational_prefers_plain_int():
    assert fio.format_rational(Fraction(4)) == 4
    assert fio.format_rational(Fraction(1, 3)) == "1/3"


# -- form files --------------------------------------------------------------


def test_form_roundtrip():
    data = {"rank": 2, "coeffs": {"01": "3/2 x0^2 x1 - x3", "15": "x0 x1"}}
    form = fio.form_from_dict(data)
    assert form.rank == 2
    assert form.coeff((0, 1)) == parse_poly("3/2 x0^2 x1 - x3", ("x0", "x1", "x2", "x3"))
    assert fio.form_to_dict(form) == data


def test_scalar_form_uses_empty_key():
    form = fio.form_from_dict({"rank": 0, "coeffs": {"": "5"}})
    assert form.coeff(()) == parse_poly("5", ("x0", "x1", "x2", "x3"))
    assert fio.form_to_dict(form) == {"rank": 0, "coeffs": {"": "5"}}


def test_form_zero_coefficients_are_dropped_on_write():
    form = fio.form_from_dict({"rank": 1, "coeffs": {"0": "0", "5": "1"}})
    assert fio.form_to_dict(form) == {"rank": 1, "coeffs": {"5": "1"}}


def test_form_key_validation():
    with pytest.raises(fio.FormatError, match="digit strings"):
        fio.form_from_dict({"rank": 1, "coeffs": {"a": "1"}})
    with pytest.raises(fio.FormatError, match="labels must come from 0,1,2,3,5"):
        fio.form_from_dict({"rank": 1, "coeffs": {"4": "1"}})
    with pytest.raises(fio.FormatError, match="strictly increasing"):
        fio.form_from_dict({"rank": 2, "coeffs": {"10": "1"}})
    with pytest.raises(fio.FormatError, match="has 2 labels but rank is 3"):
        fio.form_from_dict({"rank": 3, "coeffs": {"01": "1"}})


def test_form_rank_and_field_validation():
    with pytest.raises(fio.FormatError, match="rank must be an integer"):
        fio.form_from_dict({"rank": 6, "coeffs": {}})
    with pytest.raises(fio.FormatError, match="unknown fields"):
        fio.form_from_dict({"rank": 0, "coeffs": {}, "extra": 1})
    with pytest.raises(fio.FormatError, match="polynomial string"):
        fio.form_from_dict({"rank": 1, "coeffs": {"0": 7}})


def test_form_to_text_lists_components_in_order():
    form = fio.form_from_dict({"rank": 2, "coeffs": {"15": "x0", "01": "1"}})
    assert fio.form_to_text(form) == "rank 2\n01: 1\n15: x0"
    zero = FiveForm.zero(3)
    assert fio.form_to_text(zero) == "rank 3\n(zero)"


# -- surface files -----------------------------------------------------------


def test_surface_roundtrip():
    data = {"dim": 2, "map": ["l1", "l2", "l1 l2", "0"], "box": [[0, 1], ["-1/2", "1/2"]]}
    V = fio.surface_from_dict(data)
    assert V.dim == 2
    assert V.box[1] == (Fraction(-1, 2), Fraction(1, 2))
    back = fio.surface_to_dict(V)
    assert back["dim"] == 2
    assert fio.surface_from_dict(back) == V


def test_surface_validation():
    with pytest.raises(fio.FormatError, match="dim must be an integer"):
        fio.surface_from_dict({"dim": 5, "map": ["0"] * 4, "box": []})
    with pytest.raises(fio.FormatError, match="four coordinate polynomials"):
        fio.surface_from_dict({"dim": 1, "map": ["l1"], "box": [[0, 1]]})
    with pytest.raises(fio.FormatError, match="2 bound pairs"):
        fio.surface_from_dict({"dim": 2, "map": ["0"] * 4, "box": [[0, 1]]})
    with pytest.raises(fio.FormatError, match="pair"):
        fio.surface_from_dict({"dim": 1, "map": ["0"] * 4, "box": [[0, 1, 2]]})


# -- lagrangian and field files ------------------------------------------------


def test_lagrangian_roundtrip():
    data = {"N": 2, "density": "1/2 p0_5^2 - p0_5 p1_5"}
    L = fio.lagrangian_from_dict(data)
    assert L.n_fields == 2
    assert fio.lagrangian_from_dict(fio.lagrangian_to_dict(L)) == L
    with pytest.raises(fio.FormatError, match="positive integer"):
        fio.lagrangian_from_dict({"N": 0, "density": "0"})


def test_fields_roundtrip():
    phi = fio.fields_from_list(["x0 x1", "x2^2"])
    assert fio.fields_to_list(phi) == ["x0 x1", "x2^2"]
    with pytest.raises(fio.FormatError, match="expected a list"):
        fio.fields_from_list({"0": "x0"})


# -- metric files --------------------------------------------------------------


def test_metric_roundtrip_and_partial_keys():
    cfg = fio.metric_from_dict({"g": [1, 1, 1, -1], "xi": "-1/1", "sigma": "2", "eta": -1})
    assert cfg == MetricConfig(g=(1, 1, 1, -1), xi=Fraction(-1), sigma=Fraction(2), eta=-1)
    assert fio.metric_from_dict(fio.metric_to_dict(cfg)) == cfg
    # omitted keys fall back to the defaults
    assert fio.metric_from_dict({"xi": 1}).g == (1, -1, -1, -1)
    with pytest.raises(fio.FormatError, match="four signs"):
        fio.metric_from_dict({"g": [1, -1]})
    with pytest.raises(fio.FormatError, match="eta"):
        fio.metric_from_dict({"eta": 2})


# -- file loading ---------------------------------------------------------------


def test_load_json_reports_path_and_position(tmp_path):
    missing = tmp_path / "missing.form"
    with pytest.raises(fio.FormatError, match="missing.form"):
        fio.load_json(str(missing))
    bad = tmp_path / "bad.form"
    bad.write_text('{"rank": 1,,}')
    with pytest.raises(fio.FormatError, match=r"bad.form:1:12"):
        fio.load_json(str(bad))


def test_load_form_prefixes_path_on_content_errors(tmp_path):
    path = tmp_path / "x.form"
    path.write_text(json.dumps({"rank": 1, "coeffs": {"4": "1"}}))
    with pytest.raises(fio.FormatError, match="x.form.*labels must come from"):
        fio.load_form(str(path))


# -- suite configuration ---------------------------------------------------------


def test_suite_config_validation():
    with pytest.raises(ValueError, match="trials"):
        su.SuiteConfig(trials=0)
    with pytest.raises(ValueError, match="max degree"):
        su.SuiteConfig(max_degree=0)
    with pytest.raises(ValueError, match="no suites selected"):
        su.SuiteConfig(suites=())
    with pytest.raises(ValueError, match="unknown suite"):
        su.SuiteConfig(suites=("algebra", "nope"))


def test_identity_lookup():
    ident = su.identity("algebra", "wedge-unit")
    assert ident.name == "wedge-unit"
    with pytest.raises(KeyError, match="no identity"):
        su.identity("algebra", "nope")


def test_reports_are_deterministic_for_a_seed():
    cfg = su.SuiteConfig(seed=13, trials=2)
    first = su.emit_report(su.run_suite(cfg), "jsonl")
    second = su.emit_report(su.run_suite(cfg), "jsonl")
    assert first == second


def test_counterexamples_are_deterministic_for_a_seed():
    # Failing records embed the shrunk instance, so a repeated mutated run
    # must reproduce the same counterexample text byte for byte.
    cfg = su.SuiteConfig(seed=13, trials=2, suites=("calculus",))
    with mu.apply_mutation("d5-sign"):
        first = su.emit_report(su.run_suite(cfg), "jsonl")
    with mu.apply_mutation("d5-sign"):
        second = su.emit_report(su.run_suite(cfg), "jsonl")
    assert first == second
    assert any(json.loads(line)["counterexample"] for line in first.splitlines())


def test_jsonl_has_one_record_per_instance():
    cfg = su.SuiteConfig(seed=1, trials=3, suites=("algebra", "flux"))
    lines = su.emit_report(su.run_suite(cfg), "jsonl").splitlines()
    expected = 3 * (len(su.IDENTITIES["algebra"]) + len(su.IDENTITIES["flux"]))
    assert len(lines) == expected
    record = json.loads(lines[0])
    assert set(record) == {"suite", "identity", "instance", "pass", "counterexample"}


def test_emit_report_rejects_unknown_format():
    report = su.run_suite(su.SuiteConfig(trials=1, suites=("algebra",)))
    with pytest.raises(ValueError, match="format"):
        su.emit_report(report, "xml")


# -- mutation registry ------------------------------------------------------------


@pytest.mark.parametrize("mutation", mu.MUTATIONS, ids=lambda m: m.name)
def test_mutation_is_caught_by_its_witness(mutation):
    suite, name = mutation.caught_by
    cfg = su.SuiteConfig(seed=11, trials=3, suites=(suite,))
    with mu.apply_mutation(mutation.name):
        report = su.run_suite(cfg)
    failed = {(r.suite, r.identity) for r in report.failures}
    assert (suite, name) in failed


def test_mutation_restores_the_operator():
    from fvx import calculus

    original = calculus.bd
    with mu.apply_mutation("bd-sign"):
        assert calculus.bd is not original
    assert calculus.bd is original
    with pytest.raises(ValueError, match="unknown mutation"):
        with mu.apply_mutation("nope"):
            pass


def test_clean_run_passes_every_identity():
    report = su.run_suite(su.SuiteConfig(seed=2, trials=2))
    assert report.passed
    identities = {(r.suite, r.identity) for r in report.records}
    assert len(identities) == sum(len(v) for v in su.IDENTITIES.values())


# -- command line: check -----------------------------------------------------------


def test_check_exits_zero_and_prints_summary(capsys):
    assert main(["check", "--suite", "algebra", "--trials", "2", "--seed", "4"]) == 0
    out = capsys.readouterr().out
    assert "PASS algebra/wedge-unit (2 instances)" in out
    assert "5 identities, 10 instances, 0 failures" in out


def test_check_output_is_reproducible(capsys):
    args = ["check", "--suite", "calculus", "--trials", "2", "--seed", "9"]
    assert main(args) == 0
    first = capsys.readouterr().out
    assert main(args) == 0
    assert capsys.readouterr().out == first


def test_check_jsonl_to_file(tmp_path, capsys):
    out = tmp_path / "report.jsonl"
    rc = main(
        ["check", "--suite", "algebra", "--trials", "2", "--format", "jsonl", "--out", str(out)]
    )
    assert rc == 0
    assert capsys.readouterr().out == ""
    lines = out.read_text().splitlines()
    assert len(lines) == 2 * len(su.IDENTITIES["algebra"])
    assert all(json.loads(line)["pass"] for line in lines)


def test_check_mutate_exits_nonzero(capsys):
    rc = main(
        ["check", "--suite", "duality", "--trials", "3", "--seed", "11", "--mutate", "dual-sign"]
    )
    assert rc == 1
    assert "FAIL duality/wedge-dual-pairing" in capsys.readouterr().out


def test_check_rejects_bad_trials(capsys):
    assert main(["check", "--trials", "0"]) == 2
    assert "trials" in capsys.readouterr().err


def test_check_accepts_metric_config(capsys):
    rc = main(
        ["check", "--suite", "duality", "--trials", "2", "--config", str(DEMO / "lorentz.cfg")]
    )
    assert rc == 0


# -- command line: operators ---------------------------------------------------------


def test_bd_of_unit_prints_distinguished_direction(capsys):
    assert main(["bd", "--form", str(DEMO / "const1.form")]) == 0
    assert capsys.readouterr().out == "rank 1\n5: 1\n"


def test_d_rejects_label_five_components(capsys):
    assert main(["d", "--form", str(DEMO / "mixed.form")]) == 2
    assert "without label-5 components" in capsys.readouterr().err


def test_d_of_closed_form_is_zero(capsys):
    assert main(["d", "--form", str(DEMO / "radial.form")]) == 0
    assert "(zero)" in capsys.readouterr().out


def test_operator_writes_json_result(tmp_path, capsys):
    out = tmp_path / "result.form"
    assert main(["bdstar", "--form", str(DEMO / "mixed.form"), "--out", str(out)]) == 0
    capsys.readouterr()
    written = fio.load_form(str(out))
    assert written.rank == 3


def test_dual_respects_config(tmp_path, capsys):
    euclid = tmp_path / "euclid.cfg"
    euclid.write_text(json.dumps({"g": [1, 1, 1, 1], "xi": 1}))
    assert main(["dual", "--form", str(DEMO / "radial.form")]) == 0
    default_out = capsys.readouterr().out
    assert main(["dual", "--form", str(DEMO / "radial.form"), "--config", str(euclid)]) == 0
    assert capsys.readouterr().out != default_out


def test_dual_of_distinguished_direction_has_plain_block_only(capsys):
    assert main(["dual", "--form", str(DEMO / "j.form")]) == 0
    assert capsys.readouterr().out == "rank 4\n0123: -1\n"


def test_missing_file_exits_two(capsys):
    assert main(["bd", "--form", str(DEMO / "nope.form")]) == 2
    assert "nope.form" in capsys.readouterr().err


# -- command line: integrals -----------------------------------------------------------


def test_integrate_dispatches_on_rank(capsys):
    assert main(["integrate", "--form", str(DEMO / "mixed.form"), "--surface", str(DEMO / "square.surf")]) == 0
    assert capsys.readouterr().out == "1/4\n"


def test_integrate_rank_mismatch_exits_two(capsys):
    rc = main(["integrate", "--form", str(DEMO / "shear.form"), "--surface", str(DEMO / "cube4.surf")])
    assert rc == 2
    assert "rank" in capsys.readouterr().err


def test_stokes_reports_both_sides(capsys):
    rc = main(["stokes", "--form", str(DEMO / "shear.form"), "--surface", str(DEMO / "square.surf")])
    assert rc == 0
    out = capsys.readouterr().out
    assert "boundary: 1" in out
    assert "interior: 1" in out
    assert "EQUAL" in out


def test_stokes_explicit_variant_checks_rank(capsys):
    rc = main(
        [
            "stokes",
            "--form",
            str(DEMO / "shear.form"),
            "--surface",
            str(DEMO / "square.surf"),
            "--variant",
            "rank_eq_dim",
        ]
    )
    assert rc == 2
    assert "rank = dim" in capsys.readouterr().err


def test_flux_routes_agree(capsys):
    rc = main(["flux", "--form", str(DEMO / "mixed.form"), "--surface", str(DEMO / "square.surf")])
    assert rc == 0
    out = capsys.readouterr().out
    assert "boundary+interior: 1/4" in out
    assert "derivative route: 1/4" in out
    assert "EQUAL" in out


# -- command line: field equations -------------------------------------------------------


def test_el_accepts_solution(capsys):
    rc = main(
        [
            "el",
            "--lagrangian",
            str(DEMO / "free_scalar.lag"),
            "--fields",
            str(DEMO / "wave_solution.json"),
        ]
    )
    assert rc == 0
    out = capsys.readouterr().out
    assert "residual: 0" in out
    assert out.strip().endswith("solution")


def test_el_rejects_non_solution(capsys):
    rc = main(
        [
            "el",
            "--lagrangian",
            str(DEMO / "free_scalar.lag"),
            "--fields",
            str(DEMO / "not_solution.json"),
        ]
    )
    assert rc == 1
    out = capsys.readouterr().out
    assert "residual: 2" in out
    assert "probe flux: 2" in out
    assert "not a solution" in out


def test_el_takes_inline_box(capsys):
    rc = main(
        [
            "el",
            "--lagrangian",
            str(DEMO / "free_scalar.lag"),
            "--fields",
            str(DEMO / "not_solution.json"),
            "--box",
            "[[0, 2], [0, 2], [0, 2], [0, 2]]",
        ]
    )
    assert rc == 1
    assert "probe flux: 32" in capsys.readouterr().out


def test_el_box_validation(capsys):
    rc = main(
        [
            "el",
            "--lagrangian",
            str(DEMO / "free_scalar.lag"),
            "--fields",
            str(DEMO / "wave_solution.json"),
            "--box",
            "[[0, 1]]",
        ]
    )
    assert rc == 2
    assert "four" in capsys.readouterr().err


# -- module execution ----------------------------------------------------------------


def test_module_runs_as_script():
    result = subprocess.run(
        [sys.executable, "-m", "fvx.cli", "check", "--suite", "algebra", "--trials", "2"],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0
    assert "0 failures" in result.stdout
