import pytest

from lbm_isotropy.algebra import to_rational
from lbm_isotropy.conditions import apply_conditions, get_condition_set, sample_free_points
from lbm_isotropy.expansion import expand
from lbm_isotropy.isotropy import UNITS, decompose_expansion, extract_physical
from lbm_isotropy.lattices import load_builtin

R = to_rational


def physical(set_name, free, **extra):
    cs = get_condition_set(set_name)
    s = load_builtin(cs.scheme)
    p = apply_conditions(cs, {**free, **extra})
    return extract_physical(decompose_expansion(expand(s, p, cs.order)), p).values


@pytest.mark.parametrize("set_name", ["d2q9.order4", "d3q27.order4r", "d2q13.order3"])
@pytest.mark.parametrize("t", [2, 3])
def test_lambda_scaling(set_name, t):
    free = sample_free_points(get_condition_set(set_name), 1)[0]
    base = physical(set_name, free)
    scaled = physical(set_name, free, **{"lambda": t})
    for name, value in base.items():
        p, q = UNITS[name]
        # dt is fixed, so dx = lambda dt scales with lambda as well
        assert scaled[name] == value * R(t) ** (p + q), name


@pytest.mark.parametrize("set_name", ["d2q9.order3", "d3q19.order4", "d2q13.order4r"])
def test_isotropy_holds_at_every_lower_order(set_name):
    cs = get_condition_set(set_name)
    s = load_builtin(cs.scheme)
    for free in sample_free_points(cs, 2):
        p = apply_conditions(cs, free)
        decs = decompose_expansion(expand(s, p, cs.order))
        assert all(d.isotropic for d in decs)
        for ell in range(1, cs.order):
            lower = decompose_expansion(expand(s, p, ell))
            assert [d.coefficients for d in lower] == [d.coefficients for d in decs[:ell]]


def test_dt_scaling_of_higher_orders():
    # alpha_j is independent of dt at fixed lambda; physical coefficients pick up dt^(j-1)
    free = {"alpha": -1, "sigma4": R("2/3")}
    a = physical("d2q9.order4", free)
    b = physical("d2q9.order4", free, dt=R("1/2"))
    order = {"c0^2": 1, "mu": 2, "zeta": 2, "gamma": 2, "xi": 3, "chi": 3, "eta": 4, "mu4": 4, "zeta4": 4}
    for name, j in order.items():
        assert b[name] == a[name] * R("1/2") ** (j - 1), name
