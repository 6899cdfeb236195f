import math

import numpy as np
import pytest

from lbm_isotropy.algebra import to_rational
from lbm_isotropy.conditions import apply_conditions, get_condition_set
from lbm_isotropy.dispersion import (DispersionError, amplification_matrix, anisotropy_order_fit, direction_fan,
                                     dispersion_sweep, k0_spectrum_error, log_magnitudes, samples_csv)
from lbm_isotropy.lattices import BUILTIN_NAMES, load_builtin
from lbm_isotropy.scheme import relaxation_rates

R = to_rational

POINTS = {
    "d2q9": ("d2q9.order4", {"alpha": -1, "sigma4": R("2/3")}),
    "d2q13": ("d2q13.order1", {"alpha": -2}),
    "d3q19": ("d3q19.order4", {"alpha": -1, "sigma5": R("3/4")}),
    "d3q27": ("d3q27.order4r", {"alpha": -1, "sigma5": 1, "psi": R("1/2")}),
}


def point_for(name):
    set_name, free = POINTS[name]
    return load_builtin(name), apply_conditions(get_condition_set(set_name), free)


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_k0_spectrum(name):
    s, p = point_for(name)
    assert k0_spectrum_error(s, p) < 1e-12
    eig = np.sort_complex(amplification_matrix(s, p, [0.0] * s.dim).eigenvalues())
    expected = np.sort_complex(np.array([1.0] * s.n_conserved + [1 - float(r) for r in relaxation_rates(s, p)], dtype=complex))
    assert np.allclose(eig, expected, atol=1e-12)


def test_direction_fan():
    fan = direction_fan(2, 5)
    assert len(fan) == 5
    assert fan[0] == pytest.approx((1.0, 0.0))
    assert fan[-1] == pytest.approx((math.sqrt(0.5), math.sqrt(0.5)))
    for d in direction_fan(3, 6):
        assert math.isclose(math.fsum(x * x for x in d), 1.0)


def test_lattice_symmetric_directions_agree():
    s, p = point_for("d2q9")
    a, b = dispersion_sweep(s, p, [(1.0, 0.0), (0.0, 1.0)], [1e-2])
    for label in a.modes:
        assert abs(a.scheme[a.modes.index(label)] - b.scheme[b.modes.index(label)]) < 1e-13


def test_acoustic_modes_match_sound_speed_and_damping():
    s = load_builtin("d2q9")
    p = apply_conditions(get_condition_set("d2q9.order2"), {"alpha": -1, "sigma3": 1, "sigma4": 1, "sigma5": 1})
    c0, gamma = math.sqrt(0.5), 0.25
    k = 1e-2
    (sample,) = dispersion_sweep(s, p, [(1.0, 0.0)], [k])
    for sign, label in ((1, "acoustic+"), (-1, "acoustic-")):
        expected = complex(-gamma * k * k, sign * c0 * k)
        got = sample.scheme[sample.modes.index(label)]
        assert abs(got - expected) / abs(expected) < 1e-3


def test_fit_input_checks():
    s, p = point_for("d2q9")
    few = dispersion_sweep(s, p, direction_fan(2, 3), log_magnitudes(1e-3, 1e-1, 3))
    with pytest.raises(DispersionError, match="5 magnitudes"):
        anisotropy_order_fit(few)
    one_dir = dispersion_sweep(s, p, direction_fan(2, 1), log_magnitudes(1e-3, 1e-1, 6))
    with pytest.raises(DispersionError, match="two directions"):
        anisotropy_order_fit(one_dir)
    with pytest.raises(DispersionError):
        dispersion_sweep(s, p, [(1.0, 0.0)], [4.0])


def test_exponent_rises_with_isotropy_order():
    s = load_builtin("d2q9")
    mags = log_magnitudes(1e-3, 1e-1, 7)
    fan = direction_fan(2, 5)
    order2 = apply_conditions(get_condition_set("d2q9.order2"), {"alpha": -1, "sigma3": 1, "sigma4": 1, "sigma5": 1})
    order3 = apply_conditions(get_condition_set("d2q9.order3"), {"alpha": -1, "sigma3": 1, "sigma4": 1})
    e2 = anisotropy_order_fit(dispersion_sweep(s, order2, fan, mags)).acoustic_exponent
    e3 = anisotropy_order_fit(dispersion_sweep(s, order3, fan, mags)).acoustic_exponent
    assert e2 == pytest.approx(3.0, abs=0.2)
    assert e3 == pytest.approx(4.0, abs=0.2)


def test_sweep_is_deterministic_and_csv_shaped():
    s, p = point_for("d2q9")
    mags = log_magnitudes(1e-3, 1e-2, 3)
    a = dispersion_sweep(s, p, direction_fan(2, 2), mags, order=2)
    b = dispersion_sweep(s, p, direction_fan(2, 2), mags, order=2, workers=2)
    assert samples_csv(a, 2) == samples_csv(b, 2)
    lines = samples_csv(a, 2).splitlines()
    assert lines[0] == "kx,ky,mode,re_log,im_log,pde_re,pde_im,mismatch"
    assert len(lines) == 1 + 2 * 3 * 3
