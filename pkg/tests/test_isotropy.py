import pytest

from lbm_isotropy.algebra import HomPoly, OpMatrix, to_rational
from lbm_isotropy.conditions import apply_conditions, get_condition_set
from lbm_isotropy.expansion import expand
from lbm_isotropy.isotropy import (IsotropyError, build_basis, decompose, decompose_expansion, extract_physical,
                                   invariant_dimension, is_parity_odd, is_rotation_invariant, rotate, rotation_2d,
                                   rotation_3d)
from lbm_isotropy.lattices import load_builtin

from oracles import float_rotation_defect

R = to_rational
CASES = [(d, ell) for d in (2, 3) for ell in range(1, 5)]


@pytest.mark.parametrize("dim,ell", CASES)
def test_basis_elements_are_invariant(dim, ell):
    for e in build_basis(dim, ell).elements:
        assert is_rotation_invariant(e.operator), e.label
        # independent float check with a rotation angle that is not rational
        assert float_rotation_defect(e.operator) < 1e-12, e.label


@pytest.mark.parametrize("dim,ell", CASES)
def test_basis_spans_invariant_space(dim, ell):
    assert len(build_basis(dim, ell)) == invariant_dimension(dim, ell)


def test_rational_rotations_are_orthogonal():
    for rot in (rotation_2d(3, 4), rotation_2d(5, 12), rotation_3d(1, 2, 3, 4)):
        n = len(rot)
        for i in range(n):
            for j in range(n):
                dot = sum(rot[i][k] * rot[j][k] for k in range(n))
                assert dot == (1 if i == j else 0)


def test_rotate_is_a_group_action():
    op = expand(load_builtin("d2q9"), apply_conditions(get_condition_set("d2q9.order1"), {"alpha": 1}), 2).alpha(2)
    r1, r2 = rotation_2d(3, 4), rotation_2d(5, 12)
    prod = [[sum(r1[i][k] * r2[k][j] for k in range(2)) for j in range(2)] for i in range(2)]
    assert rotate(rotate(op, r2), r1) == rotate(op, prod)


def test_anisotropic_operator_leaves_residual():
    x2 = HomPoly(2, 2, {(2, 0): 1})
    z = HomPoly.zero(2, 2)
    op = OpMatrix([[x2, z, z], [z, z, z], [z, z, z]])  # d_xx rho alone
    dec = decompose(op, build_basis(2, 2))
    assert not dec.isotropic
    assert dec.coefficient("lap rho") == R("1/2")


def test_decomposition_recovers_known_combination():
    basis = build_basis(3, 3)
    op = basis["div lap J"].scale(R("2/7")) - basis["grad lap rho"].scale(3)
    dec = decompose(op, basis)
    assert dec.isotropic
    assert dec.coefficient("div lap J") == R("2/7") and dec.coefficient("grad lap rho") == -3


def test_parity_labels():
    assert is_parity_odd("div Jperp") and is_parity_odd("curl lap J") and is_parity_odd("gradperp rho")
    assert not is_parity_odd("grad div J")


@pytest.mark.parametrize("set_name", ["d2q9.order4", "d3q19.order4"])
def test_parity_odd_coefficients_vanish(set_name):
    cs = get_condition_set(set_name)
    s = load_builtin(cs.scheme)
    p = apply_conditions(cs, {"alpha": -1, "sigma4": R("2/3")} if cs.scheme == "d2q9" else {"alpha": -1, "sigma5": R("3/4")})
    for dec in decompose_expansion(expand(s, p, 4)):
        assert dec.isotropic
        assert dec.parity_odd_coefficients == {}


def test_extract_refuses_anisotropic_orders():
    cs = get_condition_set("d2q9.order1")
    s = load_builtin("d2q9")
    p = apply_conditions(cs, {"alpha": 1})
    decs = decompose_expansion(expand(s, p, 2))
    assert decs[0].isotropic and not decs[1].isotropic
    with pytest.raises(IsotropyError, match="order 2"):
        extract_physical(decs, p)
    assert extract_physical(decs[:1], p)["c0^2"] == R("5/6")


def test_unsupported_basis():
    with pytest.raises(IsotropyError):
        build_basis(1, 2)
    with pytest.raises(IsotropyError):
        build_basis(2, 5)
