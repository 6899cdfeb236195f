from fractions import Fraction

import pytest

from lbm_isotropy.algebra import HomPoly, to_rational
from lbm_isotropy.config import parse_scheme_config
from lbm_isotropy.expansion import (ExpansionError, derivative_blocks, expand, expand_recurrence, gamma_table,
                                    kappa_table)
from lbm_isotropy.lattices import BUILTIN_NAMES, load_builtin
from lbm_isotropy.scheme import ParamPoint, moment_matrix, relaxation_matrix

from oracles import D1Q3, brute_derivation_matrix, brute_gamma, brute_kappa, generic_point, hompoly_as_dict

R = to_rational


def test_order_cap():
    s = load_builtin("d2q9")
    with pytest.raises(ExpansionError, match="capped"):
        expand(s, generic_point("d2q9"), 5)


@pytest.mark.parametrize("name", ["d2q9", "d2q13"])
def test_ladder_equals_recurrence(name):
    s = load_builtin(name)
    p = generic_point(name)
    a, b = expand(s, p, 4), expand_recurrence(s, p, 4)
    assert a.alphas == b.alphas
    assert a.betas == b.betas


def test_recurrence_goes_beyond_four():
    s = parse_scheme_config(D1Q3)
    p = ParamPoint(alpha="1/5", sigma2="2/3")
    r = expand_recurrence(s, p, 5)
    assert r.alpha(5).degree == 5
    assert r.alpha(4) == expand(s, p, 4).alpha(4)


@pytest.mark.parametrize("name", ["d2q9", "d3q19"])
def test_gamma_and_kappa_tables_match_series_products(name):
    s = load_builtin(name)
    res = expand(s, generic_point(name, 1), 4)
    gam = gamma_table(res.alphas, 4, 4)
    for (j, m), op in gam.items():
        assert op == brute_gamma(res.alphas, j, m), (j, m)
    kap = kappa_table(res.betas, gam, 3, 3)
    for (j, m), op in kap.items():
        assert op == brute_kappa(res.betas, res.alphas, j, m), (j, m)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_derivation_matrix_against_multinomial_oracle(n):
    s = load_builtin("d2q9")
    p = generic_point("d2q9").with_(**{"lambda": R("3/2")})
    blocks = derivative_blocks(s, p, n)
    oracle = brute_derivation_matrix(moment_matrix(s, p).entries, s.velocities,
                                     relaxation_matrix(s, p, strict=False).entries, p.lam, n)
    nc = s.n_conserved
    for i in range(s.q):
        for j in range(s.q):
            blk = (blocks.A if j < nc else blocks.B) if i < nc else (blocks.C if j < nc else blocks.D)
            cell = blk[i if i < nc else i - nc, j if j < nc else j - nc]
            assert hompoly_as_dict(cell) == oracle[i][j], (i, j)


def test_d1q3_by_hand():
    # d_t j + 2/3 (1 + alpha) lambda^2 d_x rho = sigma lambda^2 (1 - 2 alpha)/3 dt d_xx j
    s = parse_scheme_config(D1Q3)
    alpha, sigma = R("1/5"), R("2/3")
    res = expand(s, ParamPoint(alpha=alpha, sigma2=sigma, **{"lambda": 2}), 2)
    a1, a2 = res.alpha(1), res.alpha(2)
    assert a1[0, 1] == HomPoly(1, 1, {(1,): -1})
    assert a1[1, 0] == HomPoly(1, 1, {(1,): -Fraction(2, 3) * (1 + alpha) * 4})
    assert a2[1, 1] == HomPoly(1, 2, {(2,): sigma * 4 * (1 - 2 * alpha) / 3})
    assert a2[0, 0].is_zero() and a2[0, 1].is_zero() and a2[1, 0].is_zero()


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_mass_row_is_minus_div_j(name):
    s = load_builtin(name)
    a1 = expand(s, generic_point(name), 1).alpha(1)
    d = s.dim
    assert a1[0, 0].is_zero()
    for axis in range(d):
        assert a1[0, 1 + axis] == HomPoly.var(d, axis, -1)


def test_truncation_does_not_change_lower_orders():
    s = load_builtin("d2q9")
    p = generic_point("d2q9", 2)
    full = expand(s, p, 4)
    for j in range(1, 4):
        assert expand(s, p, j).alphas == full.alphas[:j]


def test_beta_zero_is_equilibrium():
    s = load_builtin("d2q9")
    res = expand(s, generic_point("d2q9"), 2)
    e = res.beta(0)
    assert e.shape == (s.q - s.n_conserved, s.n_conserved)
    with pytest.raises(ExpansionError):
        res.beta(2)
