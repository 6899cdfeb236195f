import pytest

from lbm_isotropy.algebra import to_rational
from lbm_isotropy.conditions import (CONDITION_SETS, ERRATA, ConditionError, apply_conditions, condition_environment,
                                     evaluate_point, figure1_data, figure1_row, get_condition_set, negative_control,
                                     parse_grid, psi_family, reference_coefficients, sample_free_points,
                                     stability_check, verify_order, window_statuses)
from lbm_isotropy.lattices import load_builtin
from lbm_isotropy.scheme import ParamPoint

R = to_rational


def test_twenty_sets_registered():
    assert len(CONDITION_SETS) == 20
    for cs in CONDITION_SETS.values():
        assert cs.scheme in ("d2q9", "d2q13", "d3q19", "d3q27")
        assert 1 <= cs.order <= 4


def test_d2q9_order4_substitution():
    p = apply_conditions(get_condition_set("d2q9.order4"), {"alpha": -1, "sigma4": 1})
    assert p["sigma3"] == 1 and p["sigma8"] == 1
    assert p["sigma6"] == R("1/6") and p["sigma7"] == R("1/6")
    assert p["q_eq"] == -1
    assert p["eps2_eq"] == R("-1/2")


def test_d2q13_window_enforced():
    cs = get_condition_set("d2q13.order4")
    with pytest.raises(ConditionError, match="155 < a < 1391/7"):
        apply_conditions(cs, {"alpha": -20, "a": 200, "sigma3": 1, "sigma4": 1})
    with pytest.raises(ConditionError, match="155 < a < 1391/7"):
        evaluate_point(cs, {"alpha": -20, "a": 200, "sigma3": 1, "sigma4": 1})
    apply_conditions(cs, {"alpha": -20, "a": 180, "sigma3": 1, "sigma4": 1})


def test_d3q27_psi_one_is_window_boundary():
    cs = get_condition_set("d3q27.order4r")
    env = condition_environment(cs, {"alpha": -1, "sigma5": 1, "psi": 1})
    assert env["sigma4"] / env["sigma5"] == 1
    statuses = {label: status for label, status, _ in window_statuses(cs, env)}
    assert statuses["1 < sigma4/sigma5 < 9/4"] == "boundary"
    # the ratio window is reported, not enforced
    apply_conditions(cs, {"alpha": -1, "sigma5": 1, "psi": 1})


def test_psi_family_limits_and_values():
    small = psi_family(R("1/1000000"), -1, R(1), "printed")["sigma4"]
    assert abs(small - R("16/7")) < R("1/100000")
    assert psi_family(R(1), -1, R(1), "printed")["sigma26"] == R("4/9")


def test_free_parameter_errors():
    cs = get_condition_set("d2q9.order3")
    with pytest.raises(ConditionError, match="missing"):
        apply_conditions(cs, {"alpha": 1})
    with pytest.raises(ConditionError, match="unknown"):
        apply_conditions(cs, {"alpha": 1, "sigma3": 1, "sigma4": 1, "bogus": 2})
    with pytest.raises(ConditionError, match="unknown condition set"):
        get_condition_set("d2q9.order9")


def test_sampling_is_deterministic_and_admissible():
    for cs in CONDITION_SETS.values():
        a = sample_free_points(cs, 5)
        assert a == sample_free_points(cs, 5)
        assert len({tuple(sorted(p.items())) for p in a}) == 5
        for free in a:
            apply_conditions(cs, free)


def test_reference_examples():
    d2q9_2 = get_condition_set("d2q9.order2")
    ref = reference_coefficients(d2q9_2, {"alpha": 1, "sigma3": 1, "sigma4": 1, "sigma5": 1})
    assert ref["mu"] == R("1/3")
    res = evaluate_point(get_condition_set("d2q9.order4"), {"alpha": 2, "sigma4": R("2/3")})
    assert res.coefficients["eta"] == 0
    c = evaluate_point(get_condition_set("d2q13.order1"), {"alpha": -2})
    assert c.coefficients["c0^2"] == 1


def test_gamma_matches_acoustic_dissipation_formula():
    cs = get_condition_set("d2q9.order3")
    for free in sample_free_points(cs, 4):
        res = evaluate_point(cs, free)
        env = condition_environment(cs, free)
        expected = (2 * env["sigma4"] - env["alpha"] * env["sigma3"]) / 12
        assert res.coefficients["gamma"] == expected


def test_stability_examples():
    s = load_builtin("d2q9")
    ones = {f"sigma{k}": 1 for k in range(3, 9)}
    assert stability_check(s, ParamPoint(alpha=1, **ones)).ok
    rep = stability_check(s, ParamPoint(alpha=1, **{**ones, "sigma5": 0}))
    assert not rep.ok and "moment 5" in rep.failures[0]
    rep = stability_check(s, ParamPoint(alpha=1, **{**ones, "sigma5": 0}), allow_boundary=True)
    assert rep.ok and rep.warnings
    assert not stability_check(s, ParamPoint(alpha=1, **{**ones, "sigma4": R("-1/3")})).ok


def test_negative_control_d2q9_order2():
    cs = get_condition_set("d2q9.order2")
    rep = verify_order(cs, sample_free_points(cs, 1), overrides={"q_eq": 0})
    assert not rep.isotropic and not rep.verified
    assert rep.first_failure.first_anisotropic_order == 2
    assert "anisotropic residual" in rep.first_failure.failure_dump


def test_verify_small_sets():
    for name in ("d2q9.order3", "d3q19.order3a"):
        rep = verify_order(get_condition_set(name), sample_free_points(get_condition_set(name), 3))
        assert rep.verified, name
        assert rep.negative_control.residual_nonzero


def test_erratum_is_reported_not_hidden():
    cs = get_condition_set("d2q9.order4")
    rep = verify_order(cs, [{"alpha": -1, "sigma4": R("2/3")}], control=False)
    assert rep.isotropic
    assert not rep.formulas_exact and rep.errata_explained
    assert rep.mismatched_names() == {"eta": "erratum", "mu4": "erratum"}
    assert ("d2q9.order4", "eta") in ERRATA


def test_negative_control_breaks_each_set_once():
    cs = get_condition_set("d3q19.order3b")
    nc = negative_control(cs, sample_free_points(cs, 1)[0])
    assert nc.residual_nonzero and nc.order == 3


def test_figure1_rows_and_poles():
    row = figure1_row(1, variant="printed")
    assert row["sigma26*sigma5"] == R("4/9")
    with pytest.raises(ConditionError, match="outside"):
        figure1_row(2)
    grid = parse_grid("0.05:1.45:0.05")
    assert len(grid) == 29 and grid[0] == R("1/20") and grid[-1] == R("29/20")
    table = figure1_data(grid)
    assert len(table.rows) == 29
    assert [float(s.midpoint) for s in table.scan_sign_changes] == pytest.approx([1.4979012], abs=1e-6)
