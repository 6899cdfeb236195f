"""Acceptance criteria 1-9, one pass/fail line each.

Each ``criterion_N`` function returns ``(passed, detail)`` for the criterion
as stated; nothing is relaxed to make a line green.  Criteria 2-5 compare
against the formulas exactly as printed.  Some printed formulas disagree
with the exact expansion, so those tests are marked strict xfail (a later
pass turns them red) and a companion test pins down the weaker claim that
every disagreement is a documented erratum.

The lines are collected in ``RESULTS`` and echoed at the end of the pytest
run; ``python3 tests/test_acceptance.py`` prints them directly.
"""

from __future__ import annotations

import math
import sys
import time
from functools import lru_cache
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lbm_isotropy.algebra import HomPoly, to_rational  # noqa: E402
from lbm_isotropy.conditions import (CONDITION_SETS, ConditionError, apply_conditions, condition_environment,  # noqa: E402
                                     figure1_data, get_condition_set, parse_grid, verify_order)
from lbm_isotropy.dispersion import (anisotropy_order_fit, direction_fan, dispersion_sweep,  # noqa: E402
                                     k0_spectrum_error, log_magnitudes)
from lbm_isotropy.expansion import expand, expand_recurrence, gamma_table, kappa_table  # noqa: E402
from lbm_isotropy.isotropy import build_basis, is_rotation_invariant  # noqa: E402
from lbm_isotropy.lattices import BUILTIN_NAMES, load_builtin  # noqa: E402

from oracles import brute_gamma, brute_kappa, float_rotation_defect, generic_point  # noqa: E402

R = to_rational

# pinned thresholds
LADDER_SECONDS = 60.0
DISPERSION_SECONDS = 300.0
DISPERSION_WINDOW = (1e-3, 1e-1)
DISPERSION_MAGNITUDES = 9
DISPERSION_DIRECTIONS = 9
EXPONENT_SLACK = 0.3
GENERIC_DROP = 1.0
K0_RELATIVE = 1e-12
FIGURE1_ROOT_WINDOW = (R("1.45"), R("1.55"))

RESULTS: dict[int, str] = {}


def record(n: int, passed: bool, detail: str) -> None:
    RESULTS[n] = f"criterion {n}: {'PASS' if passed else 'FAIL'} - {detail}"


@lru_cache(maxsize=None)
def report(name: str):
    """Full deterministic plan (8 points per free parameter) for one set, computed once."""
    return verify_order(get_condition_set(name))


def _suite(names):
    reps = [report(n) for n in names]
    exact = all(r.formulas_exact for r in reps)
    explained = all(r.errata_explained for r in reps)
    points = sum(len(r.points) for r in reps)
    bad = {r.set_name: sorted(r.mismatched_names()) for r in reps if r.mismatched_names()}
    aniso = [r.set_name for r in reps if not r.isotropic]
    return reps, exact, explained, points, bad, aniso


def _suite_detail(points, bad, aniso, extra=""):
    parts = [f"{points} points"]
    if aniso:
        parts.append("anisotropic under printed relations: " + ", ".join(aniso))
    if bad:
        parts.append("printed formulas off: " + "; ".join(f"{k} {', '.join(v)}" for k, v in sorted(bad.items())))
    if extra:
        parts.append(extra)
    return "; ".join(parts)


# ---------------------------------------------------------------------------

def criterion_1():
    start = time.perf_counter()
    checked = 0
    for name in BUILTIN_NAMES:
        s = load_builtin(name)
        for salt in range(3):
            p = generic_point(name, salt)
            ladder, rec = expand(s, p, 4), expand_recurrence(s, p, 4)
            if ladder.alphas != rec.alphas or ladder.betas != rec.betas:
                return False, f"{name} salt {salt}: ladder and recurrence differ"
            gam = gamma_table(ladder.alphas, 4, 4)
            for (j, m), op in gam.items():
                if op != brute_gamma(ladder.alphas, j, m):
                    return False, f"{name}: Gamma^{j}_{m} differs from the series product"
            for (j, m), op in kappa_table(ladder.betas, gam, 3, 3).items():
                if op != brute_kappa(ladder.betas, ladder.alphas, j, m):
                    return False, f"{name}: K^{j}_{m} differs from the series product"
            checked += 1
    elapsed = time.perf_counter() - start
    return elapsed < LADDER_SECONDS, f"{checked} points, ladder = recurrence, Gamma/K = brute products, {elapsed:.1f}s (< {LADDER_SECONDS:.0f}s)"


def criterion_2():
    names = [f"d2q9.order{k}" for k in range(1, 5)]
    reps, exact, explained, points, bad, aniso = _suite(names)
    per_param = all(len(r.points) >= 8 * len(get_condition_set(r.set_name).free) for r in reps)
    return exact and per_param, _suite_detail(points, bad, aniso, f"errata explain every difference: {explained}")


def _window_enforced():
    cs = get_condition_set("d2q13.order4")
    base = {"alpha": -20, "sigma3": 1, "sigma4": 1}
    out = []
    for a, ok in ((R(155), False), (R(180), True), (R("1391/7"), False), (R(200), False)):
        try:
            apply_conditions(cs, {**base, "a": a})
            out.append(ok)
        except ConditionError:
            out.append(not ok)
    return all(out)


def criterion_3():
    names = ["d2q13.order1", "d2q13.order2", "d2q13.order3", "d2q13.order4"]
    reps, exact, explained, points, bad, aniso = _suite(names)
    window = _window_enforced()
    revised = report("d2q13.order4r").formulas_exact
    extra = f"window 155 < a < 1391/7 enforced: {window}; sigma8 = sigma9 = 1/(12 sigma4) set d2q13.order4r exact: {revised}"
    return exact and window, _suite_detail(points, bad, aniso, extra)


def criterion_4():
    names = ["d3q19.order1", "d3q19.order2", "d3q19.order3a", "d3q19.order3b", "d3q19.order4"]
    reps, exact, explained, points, bad, aniso = _suite(names)
    zb_ok = True
    cs = get_condition_set("d3q19.order4")
    for p in report("d3q19.order4").points:
        env = condition_environment(cs, p.free)
        lam, dx = p.point.lam, p.point.dx
        if p.coefficients is None or p.coefficients["zeta_b"] != lam * env["sigma4"] * dx * (5 - 3 * env["alpha"]) / 57:
            zb_ok = False
    extra = f"zeta_b = lambda sigma4 dx (5 - 3 alpha)/57 exact: {zb_ok}; errata explain every difference: {explained}"
    return exact and zb_ok, _suite_detail(points, bad, aniso, extra)


def _sign_changes(variant):
    table = figure1_data(parse_grid("0.05:1.45:0.05"), variant=variant)
    return table, [c.midpoint for c in table.scan_sign_changes]


def criterion_5():
    names = ["d3q27.order1", "d3q27.order2", "d3q27.order3a", "d3q27.order3b", "d3q27.order4"]
    reps, exact, explained, points, bad, aniso = _suite(names)
    lo, hi = FIGURE1_ROOT_WINDOW
    t_printed, printed = _sign_changes("printed")
    t_revised, revised = _sign_changes("revised")
    emitted = len(t_printed.rows) == 29 and len(t_revised.rows) == 29
    root_ok = any(lo < r < hi for r in printed)
    rev = report("d3q27.order4r")
    extra = (f"figure1 rows emitted: {emitted}; printed sigma16 root at psi = "
             + ", ".join(f"{float(r):.6f}" for r in printed)
             + f"; revised family root at psi = " + ", ".join(f"{float(r):.6f}" for r in revised)
             + f"; revised set d3q27.order4r exact and stable: {rev.formulas_exact and rev.stable}")
    return exact and emitted and root_ok, _suite_detail(points, bad, aniso, extra)


def criterion_6():
    missing = [n for n in CONDITION_SETS if not report(n).negative_control.residual_nonzero]
    return not missing, (f"{len(CONDITION_SETS)} sets, every documented perturbation leaves a nonzero residual"
                         if not missing else "zero residual for " + ", ".join(missing))


def criterion_7():
    elements = 0
    for dim in (2, 3):
        for ell in range(1, 5):
            for e in build_basis(dim, ell).elements:
                elements += 1
                if not is_rotation_invariant(e.operator) or float_rotation_defect(e.operator) > 1e-12:
                    return False, f"basis element {e.label} (d={dim}, order {ell}) is not invariant"
    decs, odd = 0, []
    for n in CONDITION_SETS:
        for p in report(n).points:
            if all(p.isotropic):
                decs += len(p.isotropic)
                if p.parity_odd:
                    odd.append((n, p.parity_odd))
    return not odd, f"{elements} basis elements invariant; {decs} decompositions, parity-odd coefficients nonzero in {len(odd)}"


def _min_exponent(scheme, point):
    mags = log_magnitudes(*DISPERSION_WINDOW, DISPERSION_MAGNITUDES)
    samples = dispersion_sweep(scheme, point, direction_fan(scheme.dim, DISPERSION_DIRECTIONS), mags)
    fit = anisotropy_order_fit(samples, DISPERSION_WINDOW)
    return min(f.exponent for f in fit.fits.values())


def criterion_8():
    start = time.perf_counter()
    lines, ok = [], True
    for set_name, scheme_name, order in (("d2q9.order3", "d2q9", 3), ("d3q27.order4r", "d3q27", 4)):
        s = load_builtin(scheme_name)
        rep = report(set_name)
        verified = [p for p in rep.points if all(p.isotropic) and p.stability.ok][:2]
        exps = [_min_exponent(s, p.point) for p in verified]
        generic = _min_exponent(s, generic_point(scheme_name))
        good = bool(exps) and min(exps) >= order + 1 - EXPONENT_SLACK and generic <= min(exps) - GENERIC_DROP
        ok &= good
        lines.append(f"{set_name} exponents {', '.join(f'{e:.2f}' for e in exps)} (>= {order + 1 - EXPONENT_SLACK}), "
                     f"generic {generic:.2f}")
    printed = get_condition_set("d3q27.order4")
    pp = apply_conditions(printed, report("d3q27.order4").points[0].free)
    lines.append(f"printed d3q27.order4 point {_min_exponent(load_builtin('d3q27'), pp):.2f}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < DISPERSION_SECONDS
    return ok, "; ".join(lines) + f"; {elapsed:.1f}s"


def criterion_9():
    worst = 0.0
    for name in BUILTIN_NAMES:
        s = load_builtin(name)
        points = [generic_point(name, salt) for salt in range(3)]
        points += [report(n).points[0].point for n, cs in CONDITION_SETS.items() if cs.scheme == name]
        for p in points:
            a1 = expand(s, p, 1).alpha(1)
            if not a1[0, 0].is_zero() or any(a1[0, 1 + i] != HomPoly.var(s.dim, i, -1) for i in range(s.dim)):
                return False, f"{name}: mass row of alpha_1 is not -div J at {p}"
            worst = max(worst, k0_spectrum_error(s, p))
    return worst < K0_RELATIVE, f"mass row -div J on all built-ins; worst k=0 spectrum error {worst:.1e} (< {K0_RELATIVE:g})"


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9}


def _run(n):
    ok, detail = CRITERIA[n]()
    record(n, ok, detail)
    return ok


# ---------------------------------------------------------------------------
# pytest entry points

def test_criterion_1_ladder():
    assert _run(1), RESULTS[1]


@pytest.mark.xfail(strict=True, reason="printed eta and mu4 of the fourth-order D2Q9 display differ from the expansion")
def test_criterion_2_d2q9_formulas():
    assert _run(2), RESULTS[2]


@pytest.mark.xfail(strict=True, reason="printed D2Q13 order-4 relations are not fourth-order isotropic; zeta and zeta4 displays differ")
def test_criterion_3_d2q13_formulas():
    assert _run(3), RESULTS[3]


@pytest.mark.xfail(strict=True, reason="printed D3Q19 second-order zeta and variant-B chi differ from the expansion")
def test_criterion_4_d3q19_formulas():
    assert _run(4), RESULTS[4]


@pytest.mark.xfail(strict=True, reason="printed D3Q27 psi family is not fourth-order isotropic and its sigma16 root is near 1.217")
def test_criterion_5_d3q27_formulas():
    assert _run(5), RESULTS[5]


def test_criterion_6_negative_controls():
    assert _run(6), RESULTS[6]


def test_criterion_7_isotropy_basis():
    assert _run(7), RESULTS[7]


def test_criterion_8_dispersion():
    assert _run(8), RESULTS[8]


def test_criterion_9_structure():
    assert _run(9), RESULTS[9]


# companion checks for criteria 2-5: every printed difference is a documented erratum,
# and the corrected fourth-order sets are exact

@pytest.mark.parametrize("name", [n for n in CONDITION_SETS if n not in ("d2q13.order4", "d3q27.order4")])
def test_printed_differences_are_documented_errata(name):
    rep = report(name)
    assert rep.isotropic and rep.errata_explained and rep.stable, rep.mismatched_names()


@pytest.mark.parametrize("name", ["d2q13.order4r", "d3q27.order4r"])
def test_corrected_fourth_order_sets_are_exact(name):
    assert report(name).verified


def test_corrected_figure1_root_in_window():
    _, roots = _sign_changes("revised")
    lo, hi = FIGURE1_ROOT_WINDOW
    assert len(roots) == 1 and lo < roots[0] < hi


def test_printed_d2q13_order4_isotropic_on_equal_rates():
    cs = get_condition_set("d2q13.order4")
    rep = verify_order(cs, [{"alpha": -20, "a": 180, "sigma3": R("2/3"), "sigma4": R("2/3")}], control=False)
    assert rep.isotropic and rep.mismatched_names() == {"zeta4": "erratum"}


if __name__ == "__main__":
    for n in CRITERIA:
        _run(n)
        print(RESULTS[n], flush=True)
    sys.exit(0 if all(" PASS " in RESULTS[n] for n in CRITERIA) else 1)
