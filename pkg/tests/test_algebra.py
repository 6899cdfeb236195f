from fractions import Fraction

import pytest

from lbm_isotropy.algebra import (HomPoly, OpMatrix, RationalMatrix, SingularMatrixError, format_decimal,
                                  format_rational, rational_record, rmat_invert, to_rational)


def test_to_rational_accepts_exact_inputs():
    assert to_rational("1/3") == Fraction(1, 3)
    assert to_rational("0.05") == Fraction(1, 20)
    assert to_rational(Fraction(-7, 5)) == Fraction(-7, 5)
    assert to_rational(4) == 4


@pytest.mark.parametrize("bad", ["abc", "1/0", ""])
def test_to_rational_rejects_garbage(bad):
    with pytest.raises(ValueError):
        to_rational(bad)


def test_to_rational_rejects_bool():
    with pytest.raises(TypeError):
        to_rational(True)


def test_formatting_is_exact_and_correctly_rounded():
    assert format_rational(to_rational("6/4")) == "3/2"
    assert format_rational(to_rational(-5)) == "-5"
    assert format_decimal(to_rational("1/3")) == "0.33333333333333333"
    assert format_decimal(to_rational("2/3")) == "0.66666666666666667"
    assert rational_record(to_rational("-7/54")) == {"exact": "-7/54", "decimal": "-0.12962962962962963"}


def test_hompoly_arithmetic():
    x = HomPoly.var(2, 0)
    y = HomPoly.var(2, 1)
    p = (x + y) ** 2
    assert p.coeff((2, 0)) == 1 and p.coeff((1, 1)) == 2 and p.coeff((0, 2)) == 1
    assert (p - p).is_zero()
    assert p.evaluate([to_rational(1), to_rational(2)]) == 9
    with pytest.raises(Exception):
        _ = x + p  # degrees differ


def test_rational_inverse_roundtrip():
    m = RationalMatrix([[2, 1, 0], [1, 3, 1], [0, 1, 4]])
    inv = rmat_invert(m)
    assert m @ inv == RationalMatrix.identity(3)
    assert inv @ m == RationalMatrix.identity(3)


def test_singular_matrix_reports_stage():
    with pytest.raises(SingularMatrixError) as err:
        rmat_invert(RationalMatrix([[1, 2], [2, 4]]))
    assert err.value.stage == 1


def test_opmatrix_product_keeps_factor_order():
    x = HomPoly.var(2, 0)
    zero = HomPoly.zero(2, 1)
    a = OpMatrix([[zero, x], [zero, zero]])
    b = OpMatrix([[zero, zero], [x, zero]])
    assert (a @ b)[0, 0] == x * x
    assert (b @ a)[0, 0].is_zero()
