"""Built-in DdQq schemes: D2Q9, D2Q13, D3Q19 and D3Q27.

Moment polynomials follow the usual MRT layout: orthogonal families built
by Gram-Schmidt over the velocity set.  A few rows carry a rational
normalisation so that every equilibrium value and
coefficient formula used by :mod:`lbm_isotropy.conditions` is reproduced
with the parameter values exactly as written there:

* D2Q9: eps2 is half the Gram-Schmidt polynomial.
* D2Q13: r is 1/12, eps2 1/2 and eps3 1/24 of the Gram-Schmidt polynomials;
  XX_e = (vx^2 - vy^2)(|v|^2 - 2 lambda^2), which is not orthogonal to XX.
* D3Q19: eps2 = -(19/18)(21|v|^4 - 53 lambda^2 |v|^2 + 24 lambda^4).
* D3Q27: r and eps2 are half the Gram-Schmidt polynomials.

Equilibria are linear, ``m_k^eq = e_k lambda^(deg k - deg c) W_c``, with one
named parameter per nonzero entry.  Only ``alpha`` is required; the other
equilibrium parameters default to zero.  Relaxation rates are ``s<k>`` (or
``sigma<k>`` in a :class:`~lbm_isotropy.scheme.ParamPoint`).
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product

from .algebra import to_rational
from .scheme import Moment, Scheme, SchemeError

# Polynomials in the velocity components: {exponent tuple: coefficient}.
Poly = dict


def _var(dim: int, axis: int) -> Poly:
    e = [0] * dim
    e[axis] = 1
    return {tuple(e): to_rational(1)}


def _const(dim: int, c) -> Poly:
    return {(0,) * dim: to_rational(c)}


def _add(*ps: Poly) -> Poly:
    out: Poly = {}
    for p in ps:
        for e, c in p.items():
            out[e] = out.get(e, 0) + c
    return {e: c for e, c in out.items() if c}


def _mul(*ps: Poly) -> Poly:
    out = ps[0]
    for p in ps[1:]:
        acc: Poly = {}
        for e1, c1 in out.items():
            for e2, c2 in p.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                acc[e] = acc.get(e, 0) + c1 * c2
        out = {e: c for e, c in acc.items() if c}
    return out


def _scale(p: Poly, f) -> Poly:
    f = to_rational(f)
    return {e: c * f for e, c in p.items()}


def _moment(name: str, p: Poly, degree: int | None = None) -> Moment:
    # homogenise with lambda as the last exponent
    deg = max(sum(e) for e in p) if degree is None else degree
    return Moment(name, deg, tuple((e + (deg - sum(e),), c) for e, c in p.items()))


class _Vars:
    def __init__(self, dim: int):
        self.dim = dim
        self.v = [_var(dim, a) for a in range(dim)]
        self.one = _const(dim, 1)
        self.r2 = _add(*[_mul(x, x) for x in self.v])

    def c(self, k) -> Poly:
        return _const(self.dim, k)

    def lin(self, *terms) -> Poly:
        """sum of coefficient * polynomial pairs."""
        return _add(*[_scale(p, k) for k, p in terms])


def _d2q9() -> Scheme:
    vel = [(0, 0), (1, 0), (0, 1), (-1, 0), (0, -1), (1, 1), (-1, 1), (-1, -1), (1, -1)]
    V = _Vars(2)
    x, y = V.v
    r2, r4 = V.r2, _mul(V.r2, V.r2)
    moments = [
        _moment("rho", V.one),
        _moment("jx", x),
        _moment("jy", y),
        _moment("eps", V.lin((3, r2), (-4, V.one))),
        _moment("XX", V.lin((1, _mul(x, x)), (-1, _mul(y, y)))),
        _moment("XY", _mul(x, y)),
        _moment("qx", _mul(V.lin((3, r2), (-5, V.one)), x)),
        _moment("qy", _mul(V.lin((3, r2), (-5, V.one)), y)),
        _moment("eps2", V.lin(("9/2", r4), ("-21/2", r2), (4, V.one))),
    ]
    eq = {(3, 0): "alpha", (4, 0): "xx_eq", (6, 1): "q_eq", (7, 2): "q_eq", (8, 0): "eps2_eq"}
    params = {"alpha": None, "xx_eq": 0, "q_eq": 0, "eps2_eq": 0}
    return Scheme("d2q9", 2, vel, moments, 3, eq, {k: f"s{k}" for k in range(3, 9)}, params,
                  description="two-dimensional, nine velocities")


def _d2q13() -> Scheme:
    vel = [(0, 0), (1, 0), (0, 1), (-1, 0), (0, -1), (1, 1), (-1, 1), (-1, -1), (1, -1),
           (2, 0), (0, 2), (-2, 0), (0, -2)]
    V = _Vars(2)
    x, y = V.v
    r2 = V.r2
    r4 = _mul(r2, r2)
    r6 = _mul(r4, r2)
    xx = V.lin((1, _mul(x, x)), (-1, _mul(y, y)))
    q = V.lin((1, r2), (-3, V.one))
    r = V.lin(("35/12", r4), ("-189/12", r2), ("202/12", V.one))
    moments = [
        _moment("rho", V.one),
        _moment("jx", x),
        _moment("jy", y),
        _moment("eps", V.lin((13, r2), (-28, V.one))),
        _moment("XX", xx),
        _moment("XY", _mul(x, y)),
        _moment("qx", _mul(q, x)),
        _moment("qy", _mul(q, y)),
        _moment("rx", _mul(r, x)),
        _moment("ry", _mul(r, y)),
        _moment("eps2", V.lin(("77/2", r4), ("-361/2", r2), (140, V.one))),
        _moment("eps3", V.lin(("137/24", r6), ("-819/24", r4), ("1162/24", r2), ("-288/24", V.one))),
        _moment("XXe", _mul(xx, V.lin((1, r2), (-2, V.one)))),
    ]
    eq = {(3, 0): "alpha", (4, 0): "xx_eq", (6, 1): "q_eq", (7, 2): "q_eq", (8, 1): "r_eq", (9, 2): "r_eq",
          (10, 0): "eps2_eq", (11, 0): "eps3_eq", (12, 0): "xxe_eq"}
    params = {"alpha": None, "xx_eq": 0, "q_eq": 0, "r_eq": 0, "eps2_eq": 0, "eps3_eq": 0, "xxe_eq": 0}
    return Scheme("d2q13", 2, vel, moments, 3, eq, {k: f"s{k}" for k in range(3, 13)}, params,
                  description="two-dimensional, thirteen velocities (D2Q9 plus (+-2,0), (0,+-2))")


def _d3q19() -> Scheme:
    vel = [(0, 0, 0), (1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
    vel += [v for v in product((-1, 0, 1), repeat=3) if sum(map(abs, v)) == 2]
    V = _Vars(3)
    x, y, z = V.v
    r2 = V.r2
    r4 = _mul(r2, r2)
    sq = [_mul(a, a) for a in V.v]
    xx = V.lin((3, sq[0]), (-1, r2))
    ww = V.lin((1, sq[1]), (-1, sq[2]))
    q = V.lin((5, r2), (-9, V.one))
    e2 = V.lin((3, r2), (-5, V.one))
    moments = [
        _moment("rho", V.one),
        _moment("jx", x), _moment("jy", y), _moment("jz", z),
        _moment("eps", V.lin((19, r2), (-30, V.one))),
        _moment("XX", xx), _moment("WW", ww),
        _moment("XY", _mul(x, y)), _moment("YZ", _mul(y, z)), _moment("ZX", _mul(z, x)),
        _moment("qx", _mul(q, x)), _moment("qy", _mul(q, y)), _moment("qz", _mul(q, z)),
        _moment("eps2", V.lin(("-133/6", r4), ("1007/18", r2), ("-76/3", V.one))),
        _moment("XXe", _mul(e2, xx)), _moment("WWe", _mul(e2, ww)),
        _moment("mx", _mul(V.lin((1, sq[1]), (-1, sq[2])), x)),
        _moment("my", _mul(V.lin((1, sq[2]), (-1, sq[0])), y)),
        _moment("mz", _mul(V.lin((1, sq[0]), (-1, sq[1])), z)),
    ]
    eq = {(4, 0): "alpha", (5, 0): "xx_eq", (10, 1): "q_eq", (11, 2): "q_eq", (12, 3): "q_eq",
          (13, 0): "eps2_eq", (14, 0): "xxe_eq", (15, 0): "wwe_eq"}
    params = {"alpha": None, "xx_eq": 0, "q_eq": 0, "eps2_eq": 0, "xxe_eq": 0, "wwe_eq": 0}
    return Scheme("d3q19", 3, vel, moments, 4, eq, {k: f"s{k}" for k in range(4, 19)}, params,
                  description="three-dimensional, nineteen velocities (rest, 6 faces, 12 edges)")


def _d3q27() -> Scheme:
    vel = sorted(product((-1, 0, 1), repeat=3), key=lambda v: (sum(map(abs, v)), [-c for c in v]))
    V = _Vars(3)
    x, y, z = V.v
    r2 = V.r2
    r4 = _mul(r2, r2)
    r6 = _mul(r4, r2)
    sq = [_mul(a, a) for a in V.v]
    xx = V.lin((2, sq[0]), (-1, sq[1]), (-1, sq[2]))
    ww = V.lin((1, sq[1]), (-1, sq[2]))
    q = V.lin((3, r2), (-7, V.one))
    r = V.lin(("9/2", r4), ("-39/2", r2), (19, V.one))
    e = V.lin((3, r2), (-5, V.one))
    f = V.lin((3, r2), (-8, V.one))
    moments = [
        _moment("rho", V.one),
        _moment("jx", x), _moment("jy", y), _moment("jz", z),
        _moment("eps", V.lin((1, r2), (-2, V.one))),
        _moment("XX", xx), _moment("WW", ww),
        _moment("XY", _mul(x, y)), _moment("YZ", _mul(y, z)), _moment("ZX", _mul(z, x)),
        _moment("qx", _mul(q, x)), _moment("qy", _mul(q, y)), _moment("qz", _mul(q, z)),
        _moment("rx", _mul(r, x)), _moment("ry", _mul(r, y)), _moment("rz", _mul(r, z)),
        _moment("eps2", V.lin(("3/2", r4), ("-11/2", r2), (4, V.one))),
        _moment("eps3", V.lin((9, r6), (-45, r4), (60, r2), (-16, V.one))),
        _moment("XXe", _mul(e, xx)), _moment("WWe", _mul(e, ww)),
        _moment("XYe", _mul(f, x, y)), _moment("YZe", _mul(f, y, z)), _moment("ZXe", _mul(f, z, x)),
        _moment("ax", _mul(V.lin((1, sq[1]), (-1, sq[2])), x)),
        _moment("ay", _mul(V.lin((1, sq[2]), (-1, sq[0])), y)),
        _moment("az", _mul(V.lin((1, sq[0]), (-1, sq[1])), z)),
        _moment("XYZ", _mul(x, y, z)),
    ]
    eq = {(4, 0): "alpha", (5, 0): "xx_eq", (10, 1): "q_eq", (11, 2): "q_eq", (12, 3): "q_eq",
          (13, 1): "r_eq", (14, 2): "r_eq", (15, 3): "r_eq", (16, 0): "eps2_eq", (17, 0): "eps3_eq"}
    params = {"alpha": None, "xx_eq": 0, "q_eq": 0, "r_eq": 0, "eps2_eq": 0, "eps3_eq": 0}
    return Scheme("d3q27", 3, vel, moments, 4, eq, {k: f"s{k}" for k in range(4, 27)}, params,
                  description="three-dimensional, twenty-seven velocities (full unit cube)")


_BUILDERS = {"d2q9": _d2q9, "d2q13": _d2q13, "d3q19": _d3q19, "d3q27": _d3q27}

BUILTIN_NAMES = tuple(_BUILDERS)


@lru_cache(maxsize=None)
def load_builtin(name: str) -> Scheme:
    """One of ``d2q9``, ``d2q13``, ``d3q19``, ``d3q27`` (case-insensitive)."""
    key = name.strip().lower()
    if key not in _BUILDERS:
        raise SchemeError(f"unknown built-in scheme {name!r}; expected one of {', '.join(BUILTIN_NAMES)}")
    return _BUILDERS[key]()
