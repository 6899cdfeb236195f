import pytest

from lbm_isotropy.config import ConfigError, load_scheme_file, parse_scheme_config, serialize_scheme
from lbm_isotropy.lattices import BUILTIN_NAMES, load_builtin
from lbm_isotropy.scheme import ParameterError, ParamPoint, SchemeError, moment_matrix, relaxation_rates

from oracles import D1Q3


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_builtin_roundtrip(name):
    s = load_builtin(name)
    text = serialize_scheme(s)
    again = parse_scheme_config(text)
    assert again == s
    assert serialize_scheme(again) == text


@pytest.mark.parametrize("name,q,n", [("d2q9", 9, 3), ("d2q13", 13, 3), ("d3q19", 19, 4), ("d3q27", 27, 4)])
def test_builtin_shapes(name, q, n):
    s = load_builtin(name)
    assert s.q == q and s.n_conserved == n
    assert len(set(s.velocities)) == q


def test_parse_small_scheme(tmp_path):
    path = tmp_path / "d1q3.cfg"
    path.write_text(D1Q3)
    s = load_scheme_file(path)
    assert s.dim == 1 and s.q == 3 and s.n_conserved == 2
    p = ParamPoint(alpha="1/3", sigma2="1/2")
    assert relaxation_rates(s, p) == [1]
    # moment rows scale with lambda^degree
    m = moment_matrix(s, ParamPoint(alpha=0, s2=1, **{"lambda": 2}))
    assert m[2, 1] == 3 * 4 / 2 - 4


def test_duplicate_velocity_rejected():
    bad = D1Q3.replace("velocities = 0; 1; -1", "velocities = 0; 1; 1")
    with pytest.raises(SchemeError, match="duplicate velocity"):
        parse_scheme_config(bad)


def test_singular_moment_matrix_rejected():
    bad = D1Q3.replace("e = 2 : 3/2*vx^2 - lambda^2", "e = 2 : lambda^2")
    with pytest.raises(SchemeError, match="singular"):
        parse_scheme_config(bad)


def test_config_error_carries_position():
    bad = D1Q3.replace("j = 1 : vx", "j = 1 : vx^^2")
    with pytest.raises(ConfigError) as err:
        parse_scheme_config(bad)
    assert err.value.line == 13
    assert err.value.column is not None


def test_undeclared_parameter_rejected():
    bad = D1Q3.replace("e.rho = alpha", "e.rho = gamma")
    with pytest.raises(SchemeError, match="gamma"):
        parse_scheme_config(bad)


def test_missing_relaxation_rejected():
    bad = D1Q3.replace("e = s2\n", "")
    with pytest.raises(SchemeError):
        parse_scheme_config(bad)


def test_param_point_rules():
    with pytest.raises(ParameterError):
        ParamPoint(dx=1)
    with pytest.raises(ParameterError):
        ParamPoint(**{"lambda": 0})
    with pytest.raises(ParameterError):
        ParamPoint(s3=1, sigma3=1)
    p = ParamPoint(sigma4="1/2")
    assert p.rate(4) == 1
    assert p.with_(s4=2).rate(4) == 2


def test_unknown_parameter_rejected():
    s = load_builtin("d2q9")
    with pytest.raises(ParameterError, match="nope"):
        s.check_point(ParamPoint(nope=1))


def test_stability_window_enforced():
    s = load_builtin("d2q9")
    rates = {f"sigma{k}": 1 for k in range(3, 9)}
    relaxation_rates(s, ParamPoint(alpha=1, **rates))
    with pytest.raises(ParameterError, match="stability"):
        relaxation_rates(s, ParamPoint(alpha=1, **{**rates, "sigma5": -1}))
