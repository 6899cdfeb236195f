import json
import subprocess
import sys

import pytest

from lbm_isotropy.cli import main
from lbm_isotropy.config import serialize_scheme
from lbm_isotropy.lattices import load_builtin


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_list(capsys):
    code, out, _ = run(capsys, "list", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert len(data["condition_sets"]) == 20
    assert [s["name"] for s in data["schemes"]] == ["d2q9", "d2q13", "d3q19", "d3q27"]


def test_expand_order1_sound_speed(capsys):
    code, out, _ = run(capsys, "expand", "--scheme", "d2q9", "--set", "d2q9.order1", "--params", "alpha=2",
                       "--order", "1", "--format", "json")
    assert code == 0
    data = json.loads(out)
    ops = data["operators"]
    assert list(ops) == ["alpha_1"]
    jx_rho = next(r for r in ops["alpha_1"] if r["row"] == "jx" and r["col"] == "rho")
    assert jx_rho["terms"] == [{"monomial": "dx", "exact": "-1", "decimal": "-1"}]


def test_expand_order_cap_is_usage_error(capsys):
    code, _, err = run(capsys, "expand", "--scheme", "d2q9", "--order", "5")
    assert code == 2
    assert "capped" in err


def test_expand_custom_scheme_file(capsys, tmp_path):
    cfg = tmp_path / "custom.cfg"
    cfg.write_text(serialize_scheme(load_builtin("d2q9")))
    args = ["--set", "d2q9.order2", "--params", "alpha=-1,sigma3=1,sigma4=1/2,sigma5=1", "--format", "csv"]
    code_a, out_a, _ = run(capsys, "expand", "--scheme", str(cfg), *args)
    code_b, out_b, _ = run(capsys, "expand", "--scheme", "d2q9", *args)
    assert code_a == code_b == 0
    assert out_a == out_b
    assert out_a.splitlines()[0] == "operator,row,col,monomial,exact,decimal"


def test_verify_success(capsys):
    code, out, _ = run(capsys, "verify", "--scheme", "d3q19", "--set", "d3q19.order3a", "--samples", "4")
    assert code == 0
    assert out.rstrip().endswith("VERIFIED")


def test_verify_negative_control_fails(capsys):
    code, out, err = run(capsys, "verify", "--scheme", "d2q9", "--set", "d2q9.order2", "--override", "q_eq=0",
                         "--samples", "2", "--format", "json")
    assert code == 1
    data = json.loads(out)
    assert data["passed"] is False and data["isotropic"] is False
    assert data["first_failure"]["anisotropic_order"] == 2
    assert "anisotropic at order 2" in err and "alpha=" in err


def test_verify_single_point_d2q13(capsys):
    code, out, _ = run(capsys, "verify", "--scheme", "d2q13", "--set", "d2q13.order4",
                       "--params", "a=180,sigma4=1,sigma3=1,alpha=-20", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert {c["name"]: c["status"] for c in data["points"][0]["comparisons"]}["zeta4"] == "match"


def test_verify_errata_flag(capsys):
    args = ["verify", "--set", "d2q9.order4", "--params", "alpha=-1,sigma4=2/3", "--no-control"]
    code, _, err = run(capsys, *args)
    assert code == 1 and "eta (erratum)" in err
    code, _, _ = run(capsys, *args, "--accept-errata")
    assert code == 0


@pytest.mark.parametrize("argv,needle", [
    (["verify", "--set", "d2q13.order4", "--params", "a=200,sigma4=1,sigma3=1,alpha=-20"], "155 < a < 1391/7"),
    (["verify", "--scheme", "d2q9"], "--set"),
    (["verify", "--scheme", "d3q19", "--set", "d2q9.order2"], "belongs to d2q9"),
    (["coeffs", "--set", "d2q9.order3", "--params", "alpha=1/0"], "not an exact rational"),
    (["coeffs", "--set", "d2q9.order3", "--params", "alpha=1,alpha=2"], "twice"),
    (["coeffs", "--scheme", "d2q9", "--params", "alpha=1"], "--order"),
    (["coeffs", "--scheme", "d2q9", "--params", "nope=1", "--order", "1"], "nope"),
    (["expand", "--scheme", "no/such/file.cfg", "--order", "1"], "neither"),
    (["verify", "--set", "d2q9.order7"], "unknown condition set"),
])
def test_validation_errors_exit_2(capsys, argv, needle):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert needle in err


def test_bad_config_file_exit_2(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("[lattice]\nname = x\nd = 2\nq = 2\nconserved = 1\nvelocities = 0 0; 0 0\n")
    code, _, err = run(capsys, "expand", "--scheme", str(cfg), "--order", "1")
    assert code == 2 and "error:" in err


def test_argparse_usage_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["expand", "--order", "x"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_coeffs_table(capsys):
    code, out, _ = run(capsys, "coeffs", "--scheme", "d3q27", "--set", "d3q27.order3a",
                       "--params", "alpha=-1,sigma4=1/2,sigma5=1", "--format", "csv")
    assert code == 0
    names = [line.split(",")[0] for line in out.splitlines()[1:]]
    assert {"mu", "zeta_b", "xi", "chi"} <= set(names)


def test_coeffs_anisotropic_exit_1(capsys):
    code, _, err = run(capsys, "coeffs", "--scheme", "d2q9", "--order", "2",
                       "--params", "alpha=1,sigma3=1,sigma4=1,sigma5=1/2,sigma6=1,sigma7=1,sigma8=1")
    assert code == 1 and "anisotropic at order 2" in err


def test_dispersion_report(capsys):
    code, out, _ = run(capsys, "dispersion", "--scheme", "d2q9", "--set", "d2q9.order3", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["acoustic_exponent"] == pytest.approx(4.0, abs=0.3)
    assert data["modes"]["shear"]["exponent"] == pytest.approx(4.0, abs=0.3)


def test_figure1_csv(capsys):
    code, out, err = run(capsys, "figure1", "--grid", "0.05:1.45:0.05")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].split(",")[::2] == ["psi", "sigma16/sigma5", "sigma4/sigma5", "12*sigma10*sigma5", "sigma26*sigma5"]
    assert len(lines) == 30
    assert "psi = 1.4979" in err


def test_figure1_pole_reported(capsys):
    code, _, err = run(capsys, "figure1", "--grid", "1,7/4")
    assert code == 2 and "outside" in err


@pytest.mark.parametrize("argv", [
    ["figure1", "--format", "json"],
    ["verify", "--set", "d2q9.order3", "--samples", "3", "--format", "json"],
    ["dispersion", "--set", "d2q9.order3", "--format", "csv", "--count", "5", "--directions", "3"],
])
def test_outputs_are_byte_identical(tmp_path, argv):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(argv + ["--output", str(a)]) == 0
    assert main(argv + ["--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "lbm_isotropy", "expand", "--scheme", "d2q9", "--order", "5"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
    assert "capped" in proc.stderr
