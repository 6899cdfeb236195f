"""Isotropy condition sets for the built-in schemes and their verification.

A :class:`ConditionSet` turns a handful of free parameters into a complete
parameter point (equilibrium coefficients and every relaxation rate), carries
the closed-form coefficient formulas that are expected to hold under it, and
names one perturbation that must break isotropy at the set's order.

Formulas are transcribed literally (``source="printed"``) with their LaTeX
next to them.  Where exact comparison with the expansion engine shows a
printed formula to be wrong, a corrected formula is kept in the errata table
and comparisons report ``"erratum"`` instead of ``"mismatch"`` when the
corrected form agrees.  Two sets, ``d2q13.order4r`` and ``d3q27.order4r``,
replace printed relaxation relations that do not give fourth-order isotropy
with relations that do; their corrected formulas have ``source="corrected"``.

Dimensionless formula values are multiplied by ``lambda^p dx^q`` using
:data:`lbm_isotropy.isotropy.UNITS`.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import gcd
from typing import Callable, Mapping, Sequence

from ._tables import N4_TERMS, ZETA4_D2Q13_TERMS
from .algebra import Rational, format_rational, rational_record, to_rational
from .expansion import MAX_ORDER, expand
from .expr import ExpressionError
from .isotropy import UNITS, decompose_expansion, extract_physical
from .lattices import load_builtin
from .scheme import ParamPoint, ParameterError, Scheme, SchemeError

R = to_rational
HALF = R("1/2")

THREADS_ENV = "LBM_ISOTROPY_WORKERS"


class ConditionError(ValueError):
    """A free point does not fit a condition set (missing, unknown or out of window)."""


# ---------------------------------------------------------------------------
# building blocks

@dataclass(frozen=True)
class FreeParam:
    name: str
    samples: tuple[str, ...]
    default: str | None = None

    @property
    def required(self) -> bool:
        return self.default is None


@dataclass(frozen=True)
class Window:
    """``lower < value < upper`` (closed ends where flagged).

    Hard windows reject a point; advisory ones only report where it lies.
    """

    label: str
    value: Callable[[Mapping[str, Rational]], Rational]
    lower: Rational | None = None
    upper: Rational | None = None
    lower_closed: bool = False
    upper_closed: bool = False
    hard: bool = True

    def status(self, env: Mapping[str, Rational]) -> str:
        v = self.value(env)
        for bound, closed, below in ((self.lower, self.lower_closed, True), (self.upper, self.upper_closed, False)):
            if bound is None:
                continue
            bound = R(bound)
            if v == bound:
                if not closed:
                    return "boundary"
            elif (v < bound) == below:
                return "outside"
        return "inside"


@dataclass(frozen=True)
class Formula:
    """Closed-form value of one physical coefficient, without its lambda/dx factor."""

    name: str
    fn: Callable[[Mapping[str, Rational]], Rational]
    latex: str
    source: str = "printed"
    note: str = ""

    def __call__(self, env: Mapping[str, Rational], lam: Rational = R(1), dx: Rational = R(1)) -> Rational:
        p, q = UNITS[self.name]
        return R(self.fn(env)) * lam**p * dx**q


@dataclass(frozen=True)
class Perturbation:
    description: str
    fn: Callable[[dict], dict]


@dataclass(frozen=True)
class ConditionSet:
    name: str
    scheme: str
    order: int
    free: tuple[FreeParam, ...]
    substitute: Callable[[dict], dict]
    references: tuple[Formula, ...]
    perturbation: Perturbation
    windows: tuple[Window, ...] = ()
    revised: bool = False
    summary: str = ""

    @property
    def free_names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.free)

    @property
    def required(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.free if p.required)

    def reference(self, name: str) -> Formula | None:
        for f in self.references:
            if f.name == name:
                return f
        return None


# deterministic low-denominator sample sequences
SIGMA_SEQ = ("1/3", "1/2", "2/3", "1", "5/4", "1/4", "3/5", "4/3", "2/5", "3/4", "5/3", "1/5", "7/4",
             "2/7", "5/6", "3/2", "1/6", "6/5", "3/7", "7/5", "4/7", "9/8", "5/7")
ALPHA_SEQ = ("-1", "1/2", "-2", "2", "1/3", "-1/2", "3", "-3/2", "1", "-1/3", "3/2", "-5/2", "2/3", "-4",
             "5/2", "-3/4", "4", "-5/3", "7/3")
VALUE_SEQ = ("1", "-2", "1/2", "3", "-1/3", "5/2", "-4", "2/3", "7", "-3/2", "1/4", "-5", "4/3", "-2/5",
             "6", "3/5", "-7/2")
PSI_SEQ = ("1/2", "1/3", "2/3", "1/4", "3/4", "1/5", "6/5", "4/3", "2/5", "5/4", "7/5", "1/6", "5/6", "3/5",
           "7/6", "9/8", "4/5")
A_SEQ = ("170", "160", "180", "190", "165", "175", "185", "195", "157", "197", "162", "188", "168", "193")
ALPHA13_SEQ = ("-20", "-15", "-27", "-14", "-25", "-18", "-22", "-16", "-53/2", "-45/2", "-33/2", "-19",
               "-24", "-17")


def _sigma(k: int, required: bool = False) -> FreeParam:
    return FreeParam(f"sigma{k}", SIGMA_SEQ, None if required else SIGMA_SEQ[k % len(SIGMA_SEQ)])


def _value(name: str, default: str | None = "0", seq=VALUE_SEQ) -> FreeParam:
    return FreeParam(name, seq, default)


ALPHA = FreeParam("alpha", ALPHA_SEQ)


def _same(v: dict, value, *names: str) -> None:
    for n in names:
        v[n] = value


def _poly(terms, values: Sequence[Rational]) -> Rational:
    total = R(0)
    for c, exps in terms:
        t = R(c)
        for x, e in zip(values, exps):
            if e:
                t *= x**e
        total += t
    return total


def _F(name, latex, fn, source="printed", note=""):
    return Formula(name, fn, latex, source, note)


# ---------------------------------------------------------------------------
# D2Q9

def _d2q9_o1(v):
    v["xx_eq"] = R(0)
    return v


def _d2q9_o2(v):
    v = _d2q9_o1(v)
    s4, s5 = v["sigma4"], v["sigma5"]
    v["q_eq"] = (s4 - 4 * s5) / (s4 + 2 * s5)
    return v


def _d2q9_o3(v):
    v["sigma5"] = v["sigma4"]
    v["eps2_eq"] = -(3 * v["alpha"] + 4) / 2
    return _d2q9_o2(v)


def _d2q9_o4(v):
    s4 = v["sigma4"]
    _same(v, s4, "sigma3", "sigma8")
    _same(v, 1 / (6 * s4), "sigma6", "sigma7")
    return _d2q9_o3(v)


D2Q9_C0 = _F("c0^2", r"c_0^2 = {{\lambda^2}\over{6}} \, ( 4 + \alpha)", lambda v: (4 + v["alpha"]) / 6)
D2Q9_O2 = (
    _F("mu", r"\mu = {{ \sigma_4 \, \sigma_5 }\over { \sigma_4 + 2 \, \sigma_5}} \, \lambda \, \Delta x",
       lambda v: v["sigma4"] * v["sigma5"] / (v["sigma4"] + 2 * v["sigma5"])),
    _F("zeta", r"\zeta = \sigma_3 \, {{ ( 2 \, \sigma_4 - 2 \, \sigma_5 - \alpha \, \sigma_4 - 2 \, \alpha \, \sigma_5 ) }"
               r" \over { 6 \, ( \sigma_4 + 2 \, \sigma_5 ) }} \, \lambda \, \Delta x",
       lambda v: v["sigma3"] * (2 * v["sigma4"] - 2 * v["sigma5"] - v["alpha"] * v["sigma4"] - 2 * v["alpha"] * v["sigma5"])
       / (6 * (v["sigma4"] + 2 * v["sigma5"]))),
)
D2Q9_O3 = (
    _F("mu", r"\mu = {{ 1 }\over { 3 }} \, \sigma_4 \, \lambda \, \Delta x", lambda v: v["sigma4"] / 3),
    _F("zeta", r"\zeta = - {{1}\over{6}} \, \sigma_3 \, \alpha \, \lambda \, \Delta x", lambda v: -v["sigma3"] * v["alpha"] / 6),
    _F("xi", r"\xi \,=\, {{1}\over{72}} \, ( \alpha - 2 ) \, \Delta x^2", lambda v: (v["alpha"] - 2) / 72),
    _F("chi", r"\chi = {{1}\over{216}} \, ( \alpha + 4 ) \, \big( 2 + 6 \, \alpha \, \sigma_3^2 - \alpha - 12 \, \sigma_4^2 \big)"
              r" \, \lambda^2 \, \Delta x^2",
       lambda v: (v["alpha"] + 4) * (2 + 6 * v["alpha"] * v["sigma3"] ** 2 - v["alpha"] - 12 * v["sigma4"] ** 2) / 216),
    _F("gamma", r"\gamma \,=\, {{\lambda \, \Delta x}\over{12}} \, \big( 2 \sigma_4 - \alpha \, \sigma_3 \big)",
       lambda v: (2 * v["sigma4"] - v["alpha"] * v["sigma3"]) / 12),
)
D2Q9_O4 = (
    _F("mu", r"\mu = {{ 1 }\over { 3 }} \, \sigma_4 \, \lambda \, \Delta x", lambda v: v["sigma4"] / 3),
    _F("zeta", r"\zeta = - {{1}\over{6}} \, \sigma_4 \, \alpha \, \lambda \, \Delta x", lambda v: -v["sigma4"] * v["alpha"] / 6),
    _F("gamma", r"\gamma \,=\, {{\lambda \, \sigma_4 \, \Delta x}\over{12}} \, (2 - \alpha)", lambda v: v["sigma4"] * (2 - v["alpha"]) / 12),
    D2Q9_O3[2], D2Q9_O3[3],
    _F("eta", r"\eta \,= \, {{\lambda \, \Delta x^3}\over{432}} \, ( \alpha + 4) \, ( \alpha - 2 )",
       lambda v: (v["alpha"] + 4) * (v["alpha"] - 2) / 432),
    _F("mu4", r"\mu_4 \,=\, {{\lambda \, \Delta x^3}\over{108}} \, (12 \, \sigma_4^2 -1 )", lambda v: (12 * v["sigma4"] ** 2 - 1) / 108),
    _F("zeta4", r"\zeta_4 \,=\, {{\lambda \, \Delta x^3}\over{216}} \, \sigma_4 \, \Big( 12 - \alpha - 2 \, \alpha^2"
                r" + 12 \, \sigma_4^2 \, ( \alpha^2 - \alpha -4 ) \Big)",
       lambda v: v["sigma4"] * (12 - v["alpha"] - 2 * v["alpha"] ** 2 + 12 * v["sigma4"] ** 2 * (v["alpha"] ** 2 - v["alpha"] - 4)) / 216),
)

_D2Q9_EQ = (_value("q_eq"), _value("eps2_eq"))


def _d2q9_sets():
    rates = lambda *req: tuple(_sigma(k, k in req) for k in range(3, 9))
    o1 = ConditionSet("d2q9.order1", "d2q9", 1, (ALPHA,) + rates() + _D2Q9_EQ, _d2q9_o1, (D2Q9_C0,),
                      Perturbation("XX^eq = lambda^2 rho instead of 0", lambda v: {**v, "xx_eq": R(1)}),
                      summary="eps^eq = alpha lambda^2 rho, XX^eq = XY^eq = 0")
    o2 = ConditionSet("d2q9.order2", "d2q9", 2, (ALPHA,) + rates(3, 4, 5) + _D2Q9_EQ[1:], _d2q9_o2, (D2Q9_C0,) + D2Q9_O2,
                      Perturbation("q^eq coefficient shifted by +1", lambda v: {**v, "q_eq": v["q_eq"] + 1}),
                      summary="q^eq = (sigma4 - 4 sigma5)/(sigma4 + 2 sigma5) lambda^2 J")
    o3 = ConditionSet("d2q9.order3", "d2q9", 3, (ALPHA, _sigma(3, True), _sigma(4, True), _sigma(6), _sigma(7), _sigma(8)),
                      _d2q9_o3, (D2Q9_C0,) + D2Q9_O3,
                      Perturbation("eps2^eq coefficient shifted by +1", lambda v: {**v, "eps2_eq": v["eps2_eq"] + 1}),
                      summary="sigma5 = sigma4, eps2^eq = -(3 alpha + 4)/2 lambda^4 rho, hence q^eq = -lambda^2 J")
    o4 = ConditionSet("d2q9.order4", "d2q9", 4, (ALPHA, _sigma(4, True)), _d2q9_o4, (D2Q9_C0,) + D2Q9_O4,
                      Perturbation("sigma6 = sigma7 = 1/(5 sigma4) instead of 1/(6 sigma4)",
                                   lambda v: {**v, "sigma6": 1 / (5 * v["sigma4"]), "sigma7": 1 / (5 * v["sigma4"])}),
                      summary="order-3 set plus sigma3 = sigma4 = sigma8, sigma6 = sigma7 = 1/(6 sigma4)")
    return o1, o2, o3, o4


# ---------------------------------------------------------------------------
# D2Q13

PHI = FreeParam("phi", ("-7/5", "-1", "1/2", "-2", "1/3", "0", "-1/2", "2", "3/2", "-3", "1/4", "-5/3"))


def _d2q13_o1(v):
    v["xx_eq"] = R(0)
    return v


def _d2q13_o2(v):
    v = _d2q13_o1(v)
    s4, s5, phi = v["sigma4"], v["sigma5"], v["phi"]
    v["q_eq"] = phi
    v["r_eq"] = (20 * s5 - 85 * s4 - 49 * phi * s4 - 14 * phi * s5) / (12 * (s4 + s5))
    return v


def _d2q13_o3(v):
    al, phi = v["alpha"], v["phi"]
    v["sigma5"] = v["sigma4"]
    v["eps2_eq"] = -5 * al + R("77/26") * phi * al + R("1078/13") * phi
    v["eps3_eq"] = al / 48 - R("137/12") - R("135/208") * al * phi - R("945/52") * phi
    v["xxe_eq"] = R(0)
    return _d2q13_o2(v)


def _d2q13_cs2(v):
    return (28 + v["alpha"]) / 26


def _d2q13_sigma8_printed(v):
    a, s3, s4 = v["a"], v["sigma3"], v["sigma4"]
    return R("5/24") * (155 - a) / (a - 308) / s4 + R("1/24") * (7 * a - 1391) / (a - 308) / s3


def _d2q13_o4_common(v, sigma8):
    a, s3, s4 = v["a"], v["sigma3"], v["sigma4"]
    v["phi"] = R("-7/5")
    cs2 = v["cs2"] = _d2q13_cs2(v)
    _same(v, 1 / (12 * s4), "sigma6", "sigma7")
    _same(v, sigma8, "sigma8", "sigma9")
    v["sigma10"] = (R("3973/45") * (43 * a - 16610) / (89 * a - 20680) * (5 * cs2 - 4) / (1189 * cs2 - 828) * s3
                    + R("154/1395") * (7 * a - 1391) / (89 * a - 20680) * (725 * cs2 - 418) / (1189 * cs2 - 828) * a * s4)
    v["sigma11"] = a / 155 * s4
    return _d2q13_o3(v)


def _d2q13_o4(v):
    return _d2q13_o4_common(v, _d2q13_sigma8_printed(v))


def _d2q13_o4r(v):
    return _d2q13_o4_common(v, 1 / (12 * v["sigma4"]))


D2Q13_C0 = _F("c0^2", r"c_0^2 \,=\, {{\lambda^2}\over{26}} \, ( 28 + \alpha)", lambda v: (28 + v["alpha"]) / 26)
D2Q13_O2 = (
    _F("mu", r"\mu = {{\lambda \, \Delta x}\over{2}} \, {{ \sigma_4 \, \sigma_5 }\over { \sigma_4 + \sigma_5}} \, ( 3 + \varphi)",
       lambda v: v["sigma4"] * v["sigma5"] / (v["sigma4"] + v["sigma5"]) * (3 + v["phi"]) / 2),
    _F("zeta", r"\zeta = {{\lambda \, \Delta x}\over{26}} \, \sigma_3 \, ( 11 + 13 \, \varphi - \alpha )",
       lambda v: v["sigma3"] * (11 + 13 * v["phi"] - v["alpha"]) / 26),
)
D2Q13_O3 = (
    _F("mu", r"\mu = {{ 1 }\over { 4 }} \, \sigma_5 \, ( 3 + \varphi) \, \lambda \, \Delta x", lambda v: v["sigma5"] * (3 + v["phi"]) / 4),
    _F("zeta", r"\zeta = {{1}\over{26}} \, \sigma_4 \, ( 11 + 13 \, \varphi - \alpha ) \, \lambda \, \Delta x",
       lambda v: v["sigma4"] * (11 + 13 * v["phi"] - v["alpha"]) / 26),
    _F("xi", r"\xi \,=\, {{1}\over{624}} \, ( 2 \, \alpha - 39 \, \varphi - 61) \, \Delta x^2",
       lambda v: (2 * v["alpha"] - 39 * v["phi"] - 61) / 624),
    _F("chi", r"\chi = {{1}\over{8112}} (28 + \alpha ) \Big( 61 + 39 \varphi + 12 \alpha \sigma_3^2 - 2 \alpha"
              r" - 78 \varphi \sigma_4^2 - 156 \varphi \sigma_3^2 - 234 \sigma_4^2 - 132 \sigma_3^2 \Big) \lambda^2 \Delta x^2",
       lambda v: (28 + v["alpha"]) * (61 + 39 * v["phi"] + 12 * v["alpha"] * v["sigma3"] ** 2 - 2 * v["alpha"]
                                      - 78 * v["phi"] * v["sigma4"] ** 2 - 156 * v["phi"] * v["sigma3"] ** 2
                                      - 234 * v["sigma4"] ** 2 - 132 * v["sigma3"] ** 2) / 8112),
)


def _d2q13_zeta4_printed(v):
    a, al, s3, s4 = v["a"], v["alpha"], v["sigma3"], v["sigma4"]
    return s4 * _poly(ZETA4_D2Q13_TERMS, (al, a, s3, s4)) / (56581200 * s3 * (89 * a - 20680))


D2Q13_O4 = (
    _F("xi", r"\xi \,=\, {{5\, \alpha-16}\over{1560}} \, \Delta x^2", lambda v: (5 * v["alpha"] - 16) / 1560),
    _F("eta", r"\eta \,=\, {{\alpha + 28}\over{40560}} \, \big( 36 \sigma_3 + 5 \sigma_3 \, \alpha - 52 \sigma_4 \big) \, \lambda \, \Delta x^3",
       lambda v: (v["alpha"] + 28) * (36 * v["sigma3"] + 5 * v["sigma3"] * v["alpha"] - 52 * v["sigma4"]) / 40560),
    _F("mu", r"\mu = {{ 2 }\over { 5 }} \, \sigma_4 \, \lambda \, \Delta x", lambda v: 2 * v["sigma4"] / 5),
    _F("zeta", r"\zeta = - {{1}\over{130}} \, \sigma_3 \, ( 36 + 5 \, \alpha ) \, \lambda \, \Delta x",
       lambda v: -v["sigma3"] * (36 + 5 * v["alpha"]) / 130),
    _F("chi", r"\chi \,=\, {{1}\over{20280}} \, (28 + \alpha) \, \Big( 16 - 5 \, \alpha + 216 \, \sigma_3^2 - 312 \, \sigma_4^2"
              r" + 30 \, \alpha \, \sigma_3^2 \Big) \,\, \lambda^2 \, \Delta x^2",
       lambda v: (28 + v["alpha"]) * (16 - 5 * v["alpha"] + 216 * v["sigma3"] ** 2 - 312 * v["sigma4"] ** 2
                                      + 30 * v["alpha"] * v["sigma3"] ** 2) / 20280),
    _F("mu4", r"\mu_4 = {{ \sigma_4 \, \lambda \, \Delta x^3 }\over { 300\, \sigma_3 \, (a - 308) }} \, \Big( 4483 \sigma_4"
              r" - 5099 \, \sigma_3 - 23 \, a \, \sigma_4 + 25 \, a \, \sigma_3 - 14784 \, \sigma_3 \, \sigma_4^2"
              r" + 48 \, a \, \sigma_3 \, \sigma_4^2 \Big)",
       lambda v: v["sigma4"] / (300 * v["sigma3"] * (v["a"] - 308)) * (
           4483 * v["sigma4"] - 5099 * v["sigma3"] - 23 * v["a"] * v["sigma4"] + 25 * v["a"] * v["sigma3"]
           - 14784 * v["sigma3"] * v["sigma4"] ** 2 + 48 * v["a"] * v["sigma3"] * v["sigma4"] ** 2)),
    _F("zeta4", r"\zeta_4 = {{ \sigma_4 \, \lambda \, \Delta x^3 }\over { 56581200 \,\, \sigma_3 \, ( 89 a - 20680) }} \, \Big( \dots \Big)"
                " (34 terms, see _tables.ZETA4_D2Q13_TERMS)", _d2q13_zeta4_printed),
)

# exact fit of the engine's zeta_4 on the revised set, P / (15615600 sigma4);
# exponents over (alpha, sigma3, sigma4, sigma10)
ZETA4_D2Q13_REVISED_TERMS = (
    (46200, (2, 3, 1, 0)), (-7700, (2, 1, 1, 0)), (-77285, (1, 1, 0, 1)), (77285, (1, 0, 1, 1)),
    (1145760, (1, 3, 1, 0)), (-240240, (1, 2, 2, 0)), (77285, (1, 2, 0, 0)), (-240240, (1, 1, 3, 0)),
    (-288265, (1, 1, 1, 0)), (-240240, (1, 0, 4, 0)), (80080, (1, 0, 2, 0)), (-764660, (0, 1, 0, 1)),
    (764660, (0, 0, 1, 1)), (5854464, (0, 3, 1, 0)), (-1729728, (0, 2, 2, 0)), (556452, (0, 2, 0, 0)),
    (-1729728, (0, 1, 3, 0)), (-1468132, (0, 1, 1, 0)), (-6726720, (0, 0, 4, 0)), (2034032, (0, 0, 2, 0)),
)

D2Q13_O4R = tuple(f for f in D2Q13_O4 if f.name not in ("mu4", "zeta4")) + (
    _F("mu4", r"\mu_4 = {{\sigma_4 \, \lambda \, \Delta x^3}\over{150}} \, (1 + 24 \, \sigma_4^2)",
       lambda v: v["sigma4"] * (1 + 24 * v["sigma4"] ** 2) / 150, "corrected",
       "with sigma8 = sigma9 = 1/(12 sigma4); equals the printed mu4 when sigma3 = sigma4"),
    _F("zeta4", r"\zeta_4 = {{\lambda \, \Delta x^3}\over{15615600 \, \sigma_4}} \, P(\alpha, \sigma_3, \sigma_4, \sigma_{10})",
       lambda v: _poly(ZETA4_D2Q13_REVISED_TERMS, (v["alpha"], v["sigma3"], v["sigma4"], v["sigma10"])) / (15615600 * v["sigma4"]),
       "corrected", "exact fit over 60 monomials at 80 points; equals the printed zeta4 divided by sigma4 when sigma3 = sigma4"),
)

_D2Q13_WINDOWS = (
    Window("155 < a < 1391/7", lambda v: v["a"], R(155), R("1391/7")),
    Window("-28 < alpha <= -9432/725", lambda v: v["alpha"], R(-28), R("-9432/725"), upper_closed=True),
)


def _d2q13_sets():
    eq = (_value("q_eq"), _value("r_eq"), _value("eps2_eq"), _value("eps3_eq"), _value("xxe_eq"))
    rates = lambda *req: tuple(_sigma(k, k in req) for k in range(3, 13))
    o1 = ConditionSet("d2q13.order1", "d2q13", 1, (ALPHA,) + rates() + eq, _d2q13_o1, (D2Q13_C0,),
                      Perturbation("XX^eq = lambda^2 rho instead of 0", lambda v: {**v, "xx_eq": R(1)}),
                      summary="eps^eq = alpha lambda^2 rho, XX^eq = XY^eq = 0")
    o2 = ConditionSet("d2q13.order2", "d2q13", 2, (ALPHA, PHI) + rates(3, 4, 5) + eq[2:], _d2q13_o2, (D2Q13_C0,) + D2Q13_O2,
                      Perturbation("r^eq coefficient shifted by +1", lambda v: {**v, "r_eq": v["r_eq"] + 1}),
                      summary="q^eq = phi lambda^2 J, r^eq from sigma4, sigma5 and phi")
    o3 = ConditionSet("d2q13.order3", "d2q13", 3,
                      (ALPHA, PHI, _sigma(3, True), _sigma(4, True)) + tuple(_sigma(k) for k in range(6, 13)),
                      _d2q13_o3, (D2Q13_C0,) + D2Q13_O3,
                      Perturbation("eps2^eq coefficient shifted by +1", lambda v: {**v, "eps2_eq": v["eps2_eq"] + 1}),
                      summary="sigma5 = sigma4, eps2^eq, eps3^eq, XX_e^eq = 0, r^eq = -(65 + 63 phi)/24")
    free4 = (FreeParam("alpha", ALPHA13_SEQ), FreeParam("a", A_SEQ), _sigma(3, True), _sigma(4, True), _sigma(12))
    pert = Perturbation("sigma6 = sigma7 = 1/(10 sigma4) instead of 1/(12 sigma4)",
                        lambda v: {**v, "sigma6": 1 / (10 * v["sigma4"]), "sigma7": 1 / (10 * v["sigma4"])})
    o4 = ConditionSet("d2q13.order4", "d2q13", 4, free4, _d2q13_o4, (D2Q13_C0,) + D2Q13_O4, pert, _D2Q13_WINDOWS,
                      summary="q^eq = -7/5 lambda^2 J with the printed sigma6..sigma11 relations in a")
    o4r = ConditionSet("d2q13.order4r", "d2q13", 4, free4, _d2q13_o4r, (D2Q13_C0,) + D2Q13_O4R, pert, _D2Q13_WINDOWS,
                       revised=True, summary="d2q13.order4 with sigma8 = sigma9 = 1/(12 sigma4)")
    return o1, o2, o3, o4, o4r


# ---------------------------------------------------------------------------
# D3Q19

BETA = FreeParam("beta", VALUE_SEQ)


def _zero_second_order(v):
    _same(v, R(0), "xx_eq")
    return v


def _d3q19_o2(v):
    v = _zero_second_order(v)
    s5, s7 = v["sigma5"], v["sigma7"]
    v["q_eq"] = 2 * (3 * s5 - 4 * s7) / (s5 + 2 * s7)
    v["sigma6"] = s5
    _same(v, s7, "sigma8", "sigma9")
    return v


def _d3q19_o3_common(v):
    v["sigma7"] = v["sigma5"]
    _same(v, R(0), "xxe_eq", "wwe_eq")
    return _d3q19_o2(v)


def _d3q19_o3a(v):
    v["eps2_eq"] = (42 + 9 * v["alpha"]) / 9
    return _d3q19_o3_common(v)


def _d3q19_o3b(v):
    s5 = v["sigma5"]
    # beta is the coefficient in the other normalisation of eps2, see module notes
    v["eps2_eq"] = -R("19/9") * v["beta"]
    _same(v, 1 / (12 * s5), "sigma10", "sigma11", "sigma12")
    v["sigma16"] = 1 / (8 * s5)
    v["sigma17"] = 1 / (4 * s5)
    v["sigma18"] = 1 / (12 * s5)
    return _d3q19_o3_common(v)


def _d3q19_o4(v):
    s5 = v["sigma5"]
    v["sigma4"] = s5
    _same(v, 1 / (6 * s5), "sigma10", "sigma11", "sigma12", "sigma16", "sigma17", "sigma18")
    _same(v, s5, "sigma13", "sigma14", "sigma15")
    return _d3q19_o3a(v)


D3Q19_C0 = _F("c0^2", r"c_0^2 \,=\, {{\alpha + 30}\over{57}} \, \lambda^2", lambda v: (v["alpha"] + 30) / 57)
D3Q19_O2 = (
    _F("mu", r"\mu = {{ \sigma_5 \, \sigma_7 }\over { \sigma_5 + 2 \, \sigma_7}} \, \lambda \, \Delta x",
       lambda v: v["sigma5"] * v["sigma7"] / (v["sigma5"] + 2 * v["sigma7"])),
    _F("zeta", r"\zeta = {{\lambda \, \Delta x}\over{ 57 \, ( \sigma_5 + 2 \, \sigma_7 ) }} \, \big( 27 \, \sigma_4 \, \sigma_5"
               r" \,+\, 19 \, \sigma_5 \, \sigma_7 \, - \, 22 \, \sigma_4 \, \sigma_7 \,-\, \alpha \,\sigma_4 \, \sigma_5"
               r" \,- \, 2 \, \alpha \, \sigma_7 \, \sigma_4 \, \alpha \big)",
       lambda v: (27 * v["sigma4"] * v["sigma5"] + 19 * v["sigma5"] * v["sigma7"] - 22 * v["sigma4"] * v["sigma7"]
                  - v["alpha"] * v["sigma4"] * v["sigma5"] - 2 * v["alpha"] * v["sigma7"] * v["sigma4"] * v["alpha"])
       / (57 * (v["sigma5"] + 2 * v["sigma7"]))),
)
D3Q19_O3 = (
    _F("mu", r"\mu = {{ 1 }\over { 3 }} \, \sigma_5 \, \lambda \, \Delta x", lambda v: v["sigma5"] / 3),
    _F("zeta", r"\zeta = {{\lambda \, \Delta x }\over{171}} \, \big( 5 \, \sigma_4 \, + \, 19 \, \sigma_5 \,-\, 3 \, \alpha \, \sigma_4 \big)",
       lambda v: (5 * v["sigma4"] + 19 * v["sigma5"] - 3 * v["alpha"] * v["sigma4"]) / 171),
    _F("xi", r"\xi \,=\, {{\Delta x^2 }\over{684}} \, ( \alpha - 27 )", lambda v: (v["alpha"] - 27) / 684),
    _F("chi", r"\chi \,=\, {{ \lambda^2 \, \Delta x^2 }\over{19494}} \, \big( \alpha+30 \big) \, \big( 27 \,+\, 6 \, \alpha \, \sigma_4^2"
              r" \,-\, 10\, \sigma_4^2 \,-\, 152 \, \sigma_5^2 \, -\, \alpha \big)",
       lambda v: (v["alpha"] + 30) * (27 + 6 * v["alpha"] * v["sigma4"] ** 2 - 10 * v["sigma4"] ** 2
                                      - 152 * v["sigma5"] ** 2 - v["alpha"]) / 19494),
    _F("zeta_b", r"\zeta_b \,= \, {{\lambda \, \sigma_4 \, \Delta x }\over{57}} \, \big( 5 - 3 \, \alpha \big)",
       lambda v: v["sigma4"] * (5 - 3 * v["alpha"]) / 57),
)


def _d3q19_chi_b(v, a2=-1):
    al, s4, s5, b = v["alpha"], v["sigma4"], v["sigma5"], v["beta"]
    return (16212 * s5 + 126 * al**2 * s4**2 * s5 + 3570 * al * s4**2 * s5 - 6300 * s4**2 * s5 + a2 * s5 * al**2
            - 234 * al * s5 + 361 * b * s4 + 171 * al * s4 + 798 * s4 - 3192 * al * s5**3 - 95760 * s5**3
            - 361 * b * s5) / (409374 * s5)


D3Q19_CHI_B = _F("chi", r"\chi = {{\lambda^2 \Delta x^2}\over{409374 \sigma_5}} \Big( 16212 \sigma_5 + 126 \alpha^2 \sigma_4^2 \sigma_5"
                        r" + 3570 \alpha \sigma_4^2 \sigma_5 - 6300 \sigma_4^2 \sigma_5 - \sigma_5 \alpha^2 - 234 \alpha \sigma_5"
                        r" + 361 \beta \sigma_4 + 171 \alpha \sigma_4 + 798 \sigma_4 - 3192 \alpha \sigma_5^3 - 95760 \sigma_5^3"
                        r" - 361 \beta \sigma_5 \Big)", _d3q19_chi_b)
D3Q19_O4 = (
    D3Q19_O3[2],
    _F("eta", r"\eta \,=\, {{ (\alpha + 30) \, (\alpha - 27) }\over{38988 }} \, \sigma_5 \, \lambda \, \Delta x^3",
       lambda v: (v["alpha"] + 30) * (v["alpha"] - 27) * v["sigma5"] / 38988),
    _F("mu4", r"\mu_4 \,=\, {{ 12 \, \sigma_5^2 - 1 }\over{108}} \, \sigma_5 \, \lambda \, \Delta x^3",
       lambda v: (12 * v["sigma5"] ** 2 - 1) * v["sigma5"] / 108),
    _F("zeta4", r"\zeta_4 \,=\, {{\sigma_5 \, \lambda \, \Delta x^3}\over{38988 }} \, \Big( \, 2062 + 45 \, \alpha - 4 \, \alpha^2"
                r" - 5304 \, \sigma_5^2 - 612 \, \alpha \, \sigma_5^2 + 24 \, \alpha^2 \, \sigma_5^2 \, \Big)",
       lambda v: v["sigma5"] * (2062 + 45 * v["alpha"] - 4 * v["alpha"] ** 2 - 5304 * v["sigma5"] ** 2
                                - 612 * v["alpha"] * v["sigma5"] ** 2 + 24 * v["alpha"] ** 2 * v["sigma5"] ** 2) / 38988),
)


# the sigma16..18 (D3Q19) and sigma23..25 (D3Q27) relations of variant b do not
# enter any order-3 quantity, so the control perturbs the heat-flux rates
_Q_RATES_PERTURBATION = Perturbation(
    "sigma10 = sigma11 = sigma12 = 1/(10 sigma5) instead of 1/(12 sigma5)",
    lambda v: {**v, **{f"sigma{k}": 1 / (10 * v["sigma5"]) for k in (10, 11, 12)}})


def _d3q19_sets():
    eq = (_value("q_eq"), _value("eps2_eq"), _value("xxe_eq"), _value("wwe_eq"))
    o1 = ConditionSet("d3q19.order1", "d3q19", 1, (ALPHA,) + tuple(_sigma(k) for k in range(4, 19)) + eq, _zero_second_order,
                      (D3Q19_C0,), Perturbation("XX^eq = lambda^2 rho instead of 0", lambda v: {**v, "xx_eq": R(1)}),
                      summary="eps^eq = alpha lambda^2 rho, second-degree equilibria zero")
    o2_free = (ALPHA, _sigma(4, True), _sigma(5, True), _sigma(7, True)) + tuple(_sigma(k) for k in range(10, 19)) + eq[1:]
    o2 = ConditionSet("d3q19.order2", "d3q19", 2, o2_free, _d3q19_o2, (D3Q19_C0,) + D3Q19_O2,
                      Perturbation("q^eq coefficient shifted by +1", lambda v: {**v, "q_eq": v["q_eq"] + 1}),
                      summary="q^eq = 2(3 sigma5 - 4 sigma7)/(sigma5 + 2 sigma7) lambda^2 J, sigma5 = sigma6, sigma7 = sigma8 = sigma9")
    o3_free = (ALPHA, _sigma(4, True), _sigma(5, True)) + tuple(_sigma(k) for k in range(10, 19))
    o3a = ConditionSet("d3q19.order3a", "d3q19", 3, o3_free, _d3q19_o3a, (D3Q19_C0,) + D3Q19_O3,
                       Perturbation("eps2^eq coefficient shifted by +1", lambda v: {**v, "eps2_eq": v["eps2_eq"] + 1}),
                       summary="order-2 set with sigma7 = sigma5, eps2^eq = (42 + 9 alpha)/9, XX_e^eq = WW_e^eq = 0")
    o3b_free = (ALPHA, BETA, _sigma(4, True), _sigma(5, True), _sigma(13), _sigma(14), _sigma(15))
    o3b = ConditionSet("d3q19.order3b", "d3q19", 3, o3b_free, _d3q19_o3b,
                       (D3Q19_C0,) + tuple(f for f in D3Q19_O3 if f.name != "chi") + (D3Q19_CHI_B,),
                       _Q_RATES_PERTURBATION,
                       summary="eps2^eq = beta (free) with sigma10..12, sigma16..18 tied to 1/sigma5")
    o4 = ConditionSet("d3q19.order4", "d3q19", 4, (ALPHA, _sigma(5, True)), _d3q19_o4,
                      (D3Q19_C0,) + D3Q19_O3[:2] + D3Q19_O3[3:] + D3Q19_O4,
                      Perturbation("sigma10 = sigma11 = sigma12 = 1/(5 sigma5) instead of 1/(6 sigma5)",
                                   lambda v: {**v, **{f"sigma{k}": 1 / (5 * v["sigma5"]) for k in (10, 11, 12)}}),
                      summary="order-3a set with sigma4 = sigma5 and the sigma10..18 ladder")
    return o1, o2, o3a, o3b, o4


# ---------------------------------------------------------------------------
# D3Q27

PSI = FreeParam("psi", PSI_SEQ)


def _d3q27_o2(v):
    v = _zero_second_order(v)
    s5, s7 = v["sigma5"], v["sigma7"]
    v["q_eq"] = 2 * (s5 - 4 * s7) / (s5 + 2 * s7)
    v["sigma6"] = s5
    _same(v, s7, "sigma8", "sigma9")
    return v


def _d3q27_o3_common(v):
    v["sigma7"] = v["sigma5"]
    v = _d3q27_o2(v)
    v["q_eq"] = R(-2)
    return v


def _d3q27_o3a(v):
    v["eps2_eq"] = -(2 + 3 * v["alpha"])
    return _d3q27_o3_common(v)


def _d3q27_o3b(v):
    s5 = v["sigma5"]
    v["eps2_eq"] = v["beta"]
    _same(v, 1 / (12 * s5), "sigma10", "sigma11", "sigma12")
    v["sigma23"] = 1 / (12 * s5)
    v["sigma24"] = 1 / (4 * s5)
    v["sigma25"] = 1 / (8 * s5)
    return _d3q27_o3_common(v)


def _psi_factors(psi):
    return 3 * psi**3 - 22 * psi**2 + 23 * psi + 14, 3 * psi**2 - 11 * psi + 14


def psi_family(psi, alpha=None, sigma5=R(1), variant: str = "revised") -> dict[str, Rational]:
    """sigma4, sigma10, sigma16, sigma18, sigma23 and sigma26 of the D3Q27 fourth-order family."""
    psi, s5 = R(psi), R(sigma5)
    d1, d2 = _psi_factors(psi)
    out = {
        "sigma4": s5 * (3 * psi**3 - 4 * psi**2 - 13 * psi + 32) / d1,
        "sigma10": (3 * psi - 7) * (psi - 4) / (12 * s5 * d2),
        "sigma18": psi * s5,
        "sigma23": (3 * psi**2 - 7 * psi + 16) / (12 * s5 * d2),
    }
    if variant == "printed":
        out["sigma16"] = s5 * (6 * psi**5 - 24 * psi**4 + 100 * psi**3 - 267 * psi**2 + 506 * psi - 364) / ((4 * psi - 7) * d1)
        out["sigma26"] = (21 * psi**2 - 73 * psi + 100) / (18 * s5 * d2)
    elif variant == "revised":
        if alpha is None:
            raise ConditionError("the revised sigma16 depends on alpha")
        eps2 = -(2 + 3 * R(alpha))
        if not eps2:
            raise ConditionError("revised sigma16 has a pole at alpha = -2/3 (factor 2 + 3 alpha)")
        out["sigma16"] = out["sigma4"] + s5 * (psi - 4) * (psi - 1) * (6 * psi**3 - 17 * psi**2 + 28 * psi - 35) / (eps2 * (4 * psi - 7) * d1)
        out["sigma26"] = (21 * psi**2 - 73 * psi + 100) / (48 * s5 * d2)
    else:
        raise ConditionError(f"unknown variant {variant!r}")
    return out


def _d3q27_o4_with(variant):
    def sub(v):
        s5 = v["sigma5"]
        fam = psi_family(v["psi"], v["alpha"], s5, variant)
        v["r_eq"] = R(2)
        v["sigma4"] = fam["sigma4"]
        _same(v, fam["sigma10"], "sigma10", "sigma11", "sigma12")
        v["sigma16"] = fam["sigma16"]
        _same(v, fam["sigma18"], "sigma18", "sigma19")
        _same(v, fam["sigma23"], "sigma23", "sigma24", "sigma25")
        v["sigma26"] = fam["sigma26"]
        return _d3q27_o3a(v)
    return sub


D3Q27_C0 = _F("c0^2", r"c_0^2 \,=\, {{\alpha + 2}\over{3}} \, \lambda^2", lambda v: (v["alpha"] + 2) / 3)
D3Q27_MU2 = _F("mu", r"\mu \,=\, {{\sigma_5 \,\sigma_7}\over{\sigma_5 \,+ 2 \,\sigma_7}} \, \lambda \, \Delta x",
               lambda v: v["sigma5"] * v["sigma7"] / (v["sigma5"] + 2 * v["sigma7"]))
D3Q27_ZB2 = _F("zeta_b", r"\zeta_b \,=\, {{\lambda \, \sigma_4 \, \Delta x}\over{\sigma_5 \,+ 2 \,\sigma_7}} \, \big( \, \sigma_5"
                         r" - 2 \, \sigma_7 - \alpha \, \sigma_5 - 2 \, \alpha \, \sigma_5 \, \big)",
               lambda v: v["sigma4"] * (v["sigma5"] - 2 * v["sigma7"] - v["alpha"] * v["sigma5"] - 2 * v["alpha"] * v["sigma5"])
               / (v["sigma5"] + 2 * v["sigma7"]))
D3Q27_O3 = (
    _F("mu", r"\mu = {{ 1 }\over { 3 }} \, \sigma_5 \, \lambda \, \Delta x", lambda v: v["sigma5"] / 3),
    _F("zeta_b", r"\zeta_b = -{{1}\over{3}} \, \sigma_4 \, (1 + 3 \, \alpha) \, \lambda \, \Delta x",
       lambda v: -v["sigma4"] * (1 + 3 * v["alpha"]) / 3),
    _F("xi", r"\xi \,=\, {{1}\over{36}} \, ( \alpha - 1 ) \, \Delta x^2", lambda v: (v["alpha"] - 1) / 36),
)
D3Q27_CHI_A = _F("chi", r"\chi = {{1}\over{54}} \, ( \alpha + 2 ) \, \big( \, 1 + \alpha + 6 \,\alpha \,\sigma_4^2 -2 \, \sigma_4^2"
                        r" + 8 \,\sigma_5^2 \, \big) \, \lambda^2 \, \Delta x^2",
                 lambda v: (v["alpha"] + 2) * (1 + v["alpha"] + 6 * v["alpha"] * v["sigma4"] ** 2 - 2 * v["sigma4"] ** 2
                                               + 8 * v["sigma5"] ** 2) / 54)
D3Q27_CHI_B = _F("chi", r"\chi = {{1}\over{162 \, \sigma_5 }} \, \Big( \, 4 \, \sigma_5 + 2 \, \sigma_4 + 3 \, \alpha \, \sigma_4"
                        r" - 6 \, \alpha \, \sigma_5 - 3 \, \alpha^2 \, \sigma_5 + 18 \, \alpha^2 \, \sigma_4^2 \, \sigma_5"
                        r" + 42 \, \alpha\, \sigma_4^2 \, \sigma_5 + 12 \, \sigma_4^2 \, \sigma_5 - 24 \, \alpha \, \sigma_5^3"
                        r" - 48 \, \sigma_5^3 + \beta\, \sigma_4 - \beta \, \sigma_5\, \Big) \, \lambda^2 \, \Delta x^2",
                 lambda v: (4 * v["sigma5"] + 2 * v["sigma4"] + 3 * v["alpha"] * v["sigma4"] - 6 * v["alpha"] * v["sigma5"]
                            - 3 * v["alpha"] ** 2 * v["sigma5"] + 18 * v["alpha"] ** 2 * v["sigma4"] ** 2 * v["sigma5"]
                            + 42 * v["alpha"] * v["sigma4"] ** 2 * v["sigma5"] + 12 * v["sigma4"] ** 2 * v["sigma5"]
                            - 24 * v["alpha"] * v["sigma5"] ** 3 - 48 * v["sigma5"] ** 3 + v["beta"] * v["sigma4"]
                            - v["beta"] * v["sigma5"]) / (162 * v["sigma5"]))


def _n_eta(v):
    al, psi = v["alpha"], v["psi"]
    return (al + 2) * (32 * al - 8 - 13 * al * psi - 35 * psi - 4 * al * psi**2 + 28 * psi**2 + 3 * al * psi**3 - 3 * psi**3)


def _d3q27_mu4(v, sign=1):
    psi, s5, s6 = v["psi"], v["sigma5"], v["sigma6"]
    return s5 / 108 * (sign * 132 * psi * s5**2 - psi + 36 * psi**2 * s5**2 + 168 * s6**2 + 3 * psi**2 - 8) / (3 * psi**2 - 11 * psi + 14)


def _d3q27_zeta4(v):
    al, s5, psi = v["alpha"], v["sigma5"], v["psi"]
    d1, d2 = _psi_factors(psi)
    return s5 / 108 * _poly(N4_TERMS, (al, s5, psi)) / ((4 * psi - 7) * d2 * d1**3)


D3Q27_O4 = (
    _F("eta", r"\eta = {{\sigma_5\, \lambda \, \Delta x^3}\over{108}} {{ N_\eta }\over { 14 + 23\, \psi - 22 \, \psi^2 + 3 \, \psi^3 }},"
              r" N_\eta = (\alpha+2) ( 32 \alpha - 8 - 13 \alpha \psi - 35 \psi - 4 \alpha \psi^2 + 28 \psi^2 + 3 \alpha \psi^3 - 3 \psi^3 )",
       lambda v: v["sigma5"] * _n_eta(v) / (108 * _psi_factors(v["psi"])[0])),
    _F("mu4", r"\mu_4 = {{\sigma_5 \, \lambda \, \Delta x^3}\over{108}} {{ 132 \psi \sigma_5^2 - \psi + 36 \psi^2 \sigma_5^2"
              r" + 168 \sigma_6^2 + 3 \psi^2 - 8 }\over{ 3 \psi^2 - 11 \psi + 14 }}", _d3q27_mu4),
    _F("zeta4", r"\zeta_4 = {{1}\over{108}} {{\sigma_5 \lambda \Delta x^3}\over{ (4 \psi-7) (3 \psi^2-11 \psi + 14)"
                r" ( 14 + 23 \psi - 22 \psi^2 + 3 \psi^3)^3}} N_4 (78 terms, see _tables.N4_TERMS)", _d3q27_zeta4),
)

D3Q27_CHI_A_FIXED = _F("chi", r"\chi = {{1}\over{54}} ( \alpha + 2 ) ( 1 - \alpha + 6 \alpha \sigma_4^2 + 2 \sigma_4^2 - 8 \sigma_5^2 ) \lambda^2 \Delta x^2",
                       lambda v: (v["alpha"] + 2) * (1 - v["alpha"] + 6 * v["alpha"] * v["sigma4"] ** 2 + 2 * v["sigma4"] ** 2
                                                     - 8 * v["sigma5"] ** 2) / 54, "corrected",
                       "signs of alpha, 2 sigma4^2 and 8 sigma5^2 flipped; equals the variant-b chi at beta = -(2 + 3 alpha)")
D3Q27_MU4_FIXED = _F("mu4", r"\mu_4 = {{\sigma_5 \lambda \Delta x^3}\over{108}} {{ - 132 \psi \sigma_5^2 - \psi + 36 \psi^2 \sigma_5^2"
                            r" + 168 \sigma_6^2 + 3 \psi^2 - 8 }\over{ 3 \psi^2 - 11 \psi + 14 }}",
                     lambda v: _d3q27_mu4(v, -1), "corrected", "sign of the 132 psi sigma5^2 term flipped")

_PSI_WINDOWS = (
    Window("0 < psi < 3/2", lambda v: v["psi"], R(0), R("3/2")),
    Window("1 < sigma4/sigma5 < 9/4", lambda v: v["sigma4"] / v["sigma5"], R(1), R("9/4"), hard=False),
)


def _d3q27_sets():
    eq = (_value("q_eq"), _value("r_eq"), _value("eps2_eq"), _value("eps3_eq"))
    o1 = ConditionSet("d3q27.order1", "d3q27", 1, (ALPHA,) + tuple(_sigma(k) for k in range(4, 27)) + eq, _zero_second_order,
                      (D3Q27_C0,), Perturbation("XX^eq = lambda^2 rho instead of 0", lambda v: {**v, "xx_eq": R(1)}),
                      summary="eps^eq = alpha lambda^2 rho, second-degree equilibria zero")
    o2_free = (ALPHA, _sigma(4, True), _sigma(5, True), _sigma(7, True)) + tuple(_sigma(k) for k in range(10, 27)) + eq[1:]
    o2 = ConditionSet("d3q27.order2", "d3q27", 2, o2_free, _d3q27_o2, (D3Q27_C0, D3Q27_MU2, D3Q27_ZB2),
                      Perturbation("q^eq coefficient shifted by +1", lambda v: {**v, "q_eq": v["q_eq"] + 1}),
                      summary="q^eq = 2(sigma5 - 4 sigma7)/(sigma5 + 2 sigma7) lambda^2 J, sigma5 = sigma6, sigma7 = sigma8 = sigma9")
    o3_free = (ALPHA, _sigma(4, True), _sigma(5, True)) + tuple(_sigma(k) for k in range(10, 27)) + (_value("r_eq"), _value("eps3_eq"))
    o3a = ConditionSet("d3q27.order3a", "d3q27", 3, o3_free, _d3q27_o3a, (D3Q27_C0,) + D3Q27_O3 + (D3Q27_CHI_A,),
                       Perturbation("eps2^eq coefficient shifted by +1", lambda v: {**v, "eps2_eq": v["eps2_eq"] + 1}),
                       summary="q^eq = -2 lambda^2 J, eps2^eq = -(2 + 3 alpha) lambda^2 rho, sigma5 = sigma7")
    o3b_free = (ALPHA, BETA, _sigma(4, True), _sigma(5, True)) + tuple(_sigma(k) for k in range(13, 23)) + (_sigma(26), _value("r_eq"), _value("eps3_eq"))
    o3b = ConditionSet("d3q27.order3b", "d3q27", 3, o3b_free, _d3q27_o3b, (D3Q27_C0,) + D3Q27_O3 + (D3Q27_CHI_B,),
                       _Q_RATES_PERTURBATION,
                       summary="eps2^eq = beta (free) with sigma10..12 and sigma23..25 tied to 1/sigma5")
    o4_free = (ALPHA, _sigma(5, True), PSI) + tuple(_sigma(k) for k in (13, 14, 15, 17, 20, 21, 22)) + (_value("eps3_eq"),)
    pert = Perturbation("r^eq = 3 lambda^4 J instead of 2", lambda v: {**v, "r_eq": R(3)})
    o4 = ConditionSet("d3q27.order4", "d3q27", 4, o4_free, _d3q27_o4_with("printed"),
                      (D3Q27_C0,) + D3Q27_O3 + (D3Q27_CHI_A,) + D3Q27_O4, pert, _PSI_WINDOWS,
                      summary="order-3a set, r^eq = 2 lambda^4 J and the printed psi family")
    o4r_refs = (D3Q27_C0,) + D3Q27_O3 + (D3Q27_CHI_A_FIXED, D3Q27_O4[0], D3Q27_MU4_FIXED, D3Q27_O4[2])
    o4r = ConditionSet("d3q27.order4r", "d3q27", 4, o4_free, _d3q27_o4_with("revised"), o4r_refs, pert,
                       _PSI_WINDOWS + (Window("sigma16/sigma5 > 0", lambda v: v["sigma16"] / v["sigma5"], R(0)),),
                       revised=True,
                       summary="d3q27.order4 with sigma16 and sigma26 replaced by the isotropic solution")
    return o1, o2, o3a, o3b, o4, o4r


# ---------------------------------------------------------------------------
# errata: corrected counterparts of printed formulas, keyed by (set, coefficient)

def _times_sigma4(f):
    return lambda v: v["sigma4"] * f(v)


ERRATA: dict[tuple[str, str], Formula] = {
    ("d2q9.order4", "eta"): _F("eta", r"\eta = {{\sigma_4 \lambda \Delta x^3}\over{432}} ( \alpha + 4) ( \alpha - 2 )",
                               _times_sigma4(D2Q9_O4[5].fn), "corrected", "missing sigma4 factor; order-4 coefficients are odd in the sigmas"),
    ("d2q9.order4", "mu4"): _F("mu4", r"\mu_4 = {{\sigma_4 \lambda \Delta x^3}\over{108}} (12 \sigma_4^2 -1 )",
                               _times_sigma4(D2Q9_O4[6].fn), "corrected", "missing sigma4 factor; order-4 coefficients are odd in the sigmas"),
    ("d2q13.order3", "zeta"): _F("zeta", r"\zeta = {{1}\over{26}} \sigma_3 ( 11 + 13 \varphi - \alpha ) \lambda \Delta x",
                                 D2Q13_O2[1].fn, "corrected", "sigma3 (energy rate), not sigma4, as at order 2"),
    ("d2q13.order4", "zeta4"): _F("zeta4", r"\zeta_4 = {{\lambda \Delta x^3}\over{56581200 \sigma_3 (89 a - 20680)}} \Big( \dots \Big)",
                                  lambda v: _d2q13_zeta4_printed(v) / v["sigma4"], "corrected",
                                  "leading sigma4 factor dropped (parity); holds where the set is isotropic, sigma3 = sigma4"),
    ("d3q19.order2", "zeta"): _F("zeta", r"\zeta = {{\lambda \Delta x}\over{57 (\sigma_5 + 2 \sigma_7)}} ( 27 \sigma_4 \sigma_5"
                                         r" + 19 \sigma_5 \sigma_7 - 22 \sigma_4 \sigma_7 - \alpha \sigma_4 \sigma_5 - 2 \alpha \sigma_7 \sigma_4 )",
                                 lambda v: (27 * v["sigma4"] * v["sigma5"] + 19 * v["sigma5"] * v["sigma7"] - 22 * v["sigma4"] * v["sigma7"]
                                            - v["alpha"] * v["sigma4"] * v["sigma5"] - 2 * v["alpha"] * v["sigma7"] * v["sigma4"])
                                 / (57 * (v["sigma5"] + 2 * v["sigma7"])), "corrected", "repeated alpha factor removed"),
    ("d3q19.order3b", "chi"): _F("chi", r"\chi = \dots - 21 \sigma_5 \alpha^2 \dots", lambda v: _d3q19_chi_b(v, -21), "corrected",
                                 "alpha^2 sigma5 coefficient -21; reduces to the variant-a chi at beta = -(42 + 9 alpha)/19"),
    ("d3q27.order2", "zeta_b"): _F("zeta_b", r"\zeta_b = {{\lambda \sigma_4 \Delta x}\over{\sigma_5 + 2 \sigma_7}} ( \sigma_5 - 2 \sigma_7"
                                             r" - \alpha \sigma_5 - 2 \alpha \sigma_7 )",
                                   lambda v: v["sigma4"] * (v["sigma5"] - 2 * v["sigma7"] - v["alpha"] * v["sigma5"] - 2 * v["alpha"] * v["sigma7"])
                                   / (v["sigma5"] + 2 * v["sigma7"]), "corrected", "last term carries sigma7, not sigma5"),
    ("d3q27.order3a", "chi"): D3Q27_CHI_A_FIXED,
    ("d3q27.order4", "chi"): D3Q27_CHI_A_FIXED,
    ("d3q27.order4", "mu4"): D3Q27_MU4_FIXED,
}


CONDITION_SETS: dict[str, ConditionSet] = {}
for _cs in (*_d2q9_sets(), *_d2q13_sets(), *_d3q19_sets(), *_d3q27_sets()):
    CONDITION_SETS[_cs.name] = _cs


def get_condition_set(name: str) -> ConditionSet:
    try:
        return CONDITION_SETS[name.strip().lower()]
    except KeyError:
        raise ConditionError(f"unknown condition set {name!r}; known sets: {', '.join(CONDITION_SETS)}") from None


def condition_sets_for(scheme: str) -> list[ConditionSet]:
    return [cs for cs in CONDITION_SETS.values() if cs.scheme == scheme]


# ---------------------------------------------------------------------------
# applying a set

def _scheme_for(cs: ConditionSet, scheme: Scheme | None) -> Scheme:
    return load_builtin(cs.scheme) if scheme is None else scheme


def condition_environment(cs: ConditionSet, free: Mapping[str, object]) -> dict[str, Rational]:
    """Free values (defaults filled in) plus everything the set derives from them."""
    given = {str(k): R(v) for k, v in free.items()}
    passthrough = {k: given.pop(k) for k in ("lambda", "dt") if k in given}
    unknown = sorted(set(given) - set(cs.free_names))
    if unknown:
        raise ConditionError(f"{cs.name}: unknown free parameter(s) {unknown}; free parameters are {list(cs.free_names)}")
    missing = [n for n in cs.required if n not in given]
    if missing:
        raise ConditionError(f"{cs.name}: missing free parameter(s) {missing}")
    env = {p.name: given.get(p.name, R(p.default) if p.default is not None else None) for p in cs.free}
    try:
        env = cs.substitute(dict(env))
    except ZeroDivisionError:
        raise ConditionError(f"{cs.name}: a derived parameter has a vanishing denominator at {format_point(given)}") from None
    env.update(passthrough)
    return env


def window_statuses(cs: ConditionSet, env: Mapping[str, Rational]) -> list[tuple[str, str, bool]]:
    return [(w.label, w.status(env), w.hard) for w in cs.windows]


def _check_hard_windows(cs: ConditionSet, env: Mapping[str, Rational]) -> None:
    for label, status, hard in window_statuses(cs, env):
        if hard and status != "inside":
            raise ConditionError(f"{cs.name}: constraint {label} violated ({status})")


def apply_conditions(cs: ConditionSet, free: Mapping[str, object], *, scheme: Scheme | None = None,
                     overrides: Mapping[str, object] | None = None) -> ParamPoint:
    """Complete scheme parameter point for the free values.

    Raises :class:`ConditionError` when a hard window is violated or touched
    at an open end, or when a relaxation rate is left undetermined.
    """
    env = condition_environment(cs, free)
    _check_hard_windows(cs, env)
    return _point_from_env(cs, env, _scheme_for(cs, scheme), overrides)


def _point_from_env(cs, env, scheme, overrides=None) -> ParamPoint:
    env = dict(env)
    if overrides:
        for k, val in overrides.items():
            env[k] = R(val)
    allowed = scheme.allowed_names() | {"lambda", "dt"}
    vals = {k: v for k, v in env.items() if k in allowed and v is not None}
    missing = [f"sigma{k}" for k in scheme.slave_rows if f"sigma{k}" not in vals and f"s{k}" not in vals]
    if missing:
        raise ConditionError(f"{cs.name}: relaxation parameter(s) {missing} not determined")
    try:
        point = ParamPoint(vals)
        scheme.check_point(point)
    except ParameterError as exc:
        raise ConditionError(f"{cs.name}: {exc}") from None
    return point


def format_point(values: Mapping[str, object]) -> str:
    return ", ".join(f"{k}={format_rational(R(v))}" for k, v in sorted(values.items()))


# ---------------------------------------------------------------------------
# sampling

def _stride(n: int, j: int) -> int:
    # a step coprime with n, different per parameter
    for k in range(1 + 2 * j, 1 + 2 * j + 2 * n + 2):
        if gcd(k, n) == 1:
            return k % n or 1
    return 1


def sample_free_points(cs: ConditionSet, count: int | None = None, per_parameter: int = 8) -> list[dict[str, Rational]]:
    """Deterministic admissible free points, ``per_parameter`` per free parameter by default.

    Parameter j takes ``samples[(j + i * step_j) mod len]`` at draw i, with
    step_j coprime to the sequence length, so each coordinate runs through
    its whole sequence while coordinates stay decorrelated.  Draws that fail
    a hard window or hit a pole are skipped.
    """
    count = per_parameter * max(1, len(cs.free)) if count is None else count
    out: list[dict[str, Rational]] = []
    i = 0
    while len(out) < count and i < 50 * count:
        free = {p.name: R(p.samples[(j + i * _stride(len(p.samples), j)) % len(p.samples)]) for j, p in enumerate(cs.free)}
        i += 1
        try:
            env = condition_environment(cs, free)
        except ConditionError:
            continue
        if any(hard and status != "inside" for _, status, hard in window_statuses(cs, env)):
            continue
        if free in out:
            continue
        out.append(free)
    if len(out) < count:
        raise ConditionError(f"{cs.name}: only {len(out)} admissible sample points found")
    return out


# ---------------------------------------------------------------------------
# stability

@dataclass
class StabilityEntry:
    row: int
    moment: str
    sigma: Rational | None
    s: Rational | None
    status: str  # "ok", "boundary" (s = 2) or "fail"


@dataclass
class StabilityReport:
    entries: list[StabilityEntry]
    allow_boundary: bool = False

    @property
    def ok(self) -> bool:
        return all(e.status == "ok" or (e.status == "boundary" and self.allow_boundary) for e in self.entries)

    @property
    def warnings(self) -> list[str]:
        return [f"s{e.row} = 2 ({e.moment}) is on the stability boundary" for e in self.entries if e.status == "boundary"]

    @property
    def failures(self) -> list[str]:
        out = []
        for e in self.entries:
            if e.status == "fail" or (e.status == "boundary" and not self.allow_boundary):
                what = "undetermined" if e.s is None else f"sigma{e.row} = {format_rational(e.sigma) if e.sigma is not None else 'inf'}"
                out.append(f"moment {e.row} ({e.moment}): {what}")
        return out


def stability_check(scheme: Scheme, point: ParamPoint, *, allow_boundary: bool = False) -> StabilityReport:
    """sigma_k > 0 (0 < s_k < 2) for every relaxed moment; s_k = 2 passes only with ``allow_boundary``."""
    entries = []
    env = scheme.environment(point)
    for k, ex in scheme.relaxation:
        try:
            s = ex.evaluate(env)
        except ExpressionError:
            s = None
        name = scheme.moments[k].name
        if s is None or s == 0:
            entries.append(StabilityEntry(k, name, None, s, "fail"))
            continue
        sigma = 1 / s - HALF
        status = "ok" if 0 < s < 2 else ("boundary" if s == 2 else "fail")
        entries.append(StabilityEntry(k, name, sigma, s, status))
    return StabilityReport(entries, allow_boundary)


# ---------------------------------------------------------------------------
# verification

@dataclass
class Comparison:
    name: str
    engine: Rational
    expected: Rational
    source: str
    status: str  # "match", "erratum" or "mismatch"
    corrected: Rational | None = None
    note: str = ""


@dataclass
class PointResult:
    free: dict[str, Rational]
    point: ParamPoint
    isotropic: list[bool]
    coefficients: dict[str, Rational] | None
    extras: dict[str, Rational]
    comparisons: list[Comparison]
    stability: StabilityReport
    windows: list[tuple[str, str, bool]]
    failure_dump: str | None = None
    parity_odd: dict[str, Rational] = field(default_factory=dict)  # "label@order" -> nonzero coefficient

    @property
    def first_anisotropic_order(self) -> int | None:
        for j, ok in enumerate(self.isotropic, 1):
            if not ok:
                return j
        return None


@dataclass
class NegativeControl:
    description: str
    order: int
    residual_nonzero: bool
    free: dict[str, Rational]


@dataclass
class VerificationReport:
    set_name: str
    scheme: str
    order: int
    revised: bool
    points: list[PointResult]
    negative_control: NegativeControl | None = None
    overrides: dict[str, Rational] = field(default_factory=dict)

    @property
    def isotropic(self) -> bool:
        return all(all(p.isotropic) for p in self.points)

    @property
    def comparisons(self) -> list[Comparison]:
        return [c for p in self.points for c in p.comparisons]

    @property
    def formulas_exact(self) -> bool:
        return self.isotropic and all(c.status == "match" for c in self.comparisons)

    @property
    def errata_explained(self) -> bool:
        return self.isotropic and all(c.status in ("match", "erratum") for c in self.comparisons)

    @property
    def stable(self) -> bool:
        return all(p.stability.ok for p in self.points)

    @property
    def verified(self) -> bool:
        return self.isotropic and self.formulas_exact and self.stable

    def status_counts(self) -> dict[str, int]:
        out = {"match": 0, "erratum": 0, "mismatch": 0}
        for c in self.comparisons:
            out[c.status] += 1
        return out

    def mismatched_names(self) -> dict[str, str]:
        """Coefficient name -> worst status over all points."""
        rank = {"match": 0, "erratum": 1, "mismatch": 2}
        out: dict[str, str] = {}
        for c in self.comparisons:
            if rank[c.status] > rank.get(out.get(c.name, "match"), 0):
                out[c.name] = c.status
        return out

    @property
    def first_failure(self) -> PointResult | None:
        for p in self.points:
            if not all(p.isotropic) or not p.stability.ok or any(c.status != "match" for c in p.comparisons):
                return p
        return None


def _anisotropy(scheme: Scheme, point: ParamPoint, order: int):
    result = expand(scheme, point, order)
    decs = decompose_expansion(result)
    return result, decs


def evaluate_point(cs: ConditionSet, free: Mapping[str, object], *, scheme: Scheme | None = None,
                   overrides: Mapping[str, object] | None = None, allow_boundary: bool = False) -> PointResult:
    scheme = _scheme_for(cs, scheme)
    env = condition_environment(cs, free)
    _check_hard_windows(cs, env)
    point = _point_from_env(cs, env, scheme, overrides)
    if overrides:
        env.update({k: R(v) for k, v in overrides.items()})
    result, decs = _anisotropy(scheme, point, cs.order)
    iso = [d.isotropic for d in decs]
    odd = {f"{lab}@{d.order}": c for d in decs for lab, c in d.parity_odd_coefficients.items()}
    coeffs, extras, comps, dump = None, {}, [], None
    if all(iso):
        phys = extract_physical(decs, point)
        coeffs, extras = dict(phys.values), dict(phys.extras)
        lam, dx = point.lam, point.dx
        for f in cs.references:
            engine = coeffs.get(f.name)
            if engine is None:
                continue
            expected = f(env, lam, dx)
            status, corrected, note = "match", None, f.note
            if engine != expected:
                status = "mismatch"
                fix = ERRATA.get((cs.name, f.name))
                if fix is not None:
                    corrected, note = fix(env, lam, dx), fix.note
                    if corrected == engine:
                        status = "erratum"
            comps.append(Comparison(f.name, engine, expected, f.source, status, corrected, note))
    else:
        bad = next(d for d in decs if not d.isotropic)
        dump = f"order {bad.order} anisotropic residual:\n{bad.residual.pretty()}"
    return PointResult({k: R(v) for k, v in free.items()}, point, iso, coeffs, extras, comps,
                       stability_check(scheme, point, allow_boundary=allow_boundary),
                       window_statuses(cs, env), dump, odd)


def negative_control(cs: ConditionSet, free: Mapping[str, object], *, scheme: Scheme | None = None) -> NegativeControl:
    """Apply the set's perturbation and test for a nonzero residual at the set's order."""
    scheme = _scheme_for(cs, scheme)
    env = cs.perturbation.fn(condition_environment(cs, free))
    point = _point_from_env(cs, env, scheme)
    _, decs = _anisotropy(scheme, point, cs.order)
    return NegativeControl(cs.perturbation.description, cs.order, not decs[-1].isotropic, {k: R(v) for k, v in free.items()})


def _worker(args):
    name, free, overrides, allow_boundary = args
    return evaluate_point(get_condition_set(name), free, overrides=overrides, allow_boundary=allow_boundary)


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def verify_order(cs: ConditionSet, samples: Sequence[Mapping[str, object]] | None = None, *,
                 scheme: Scheme | None = None, overrides: Mapping[str, object] | None = None,
                 allow_boundary: bool = False, workers: int | None = None,
                 control: bool = True) -> VerificationReport:
    """Expand, decompose and compare against the set's formulas at every sample point.

    With no samples the deterministic plan of :func:`sample_free_points` is
    used.  Results do not depend on ``workers``.
    """
    if cs.order > MAX_ORDER:
        raise ConditionError(f"order {cs.order} exceeds the supported maximum {MAX_ORDER}")
    samples = list(samples) if samples is not None else sample_free_points(cs)
    overrides = {k: R(v) for k, v in (overrides or {}).items()}
    workers = default_workers() if workers is None else workers
    if workers > 1 and scheme is None and len(samples) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(_worker, [(cs.name, dict(s), overrides, allow_boundary) for s in samples]))
    else:
        points = [evaluate_point(cs, s, scheme=scheme, overrides=overrides, allow_boundary=allow_boundary) for s in samples]
    neg = negative_control(cs, samples[0], scheme=scheme) if control and samples else None
    return VerificationReport(cs.name, cs.scheme, cs.order, cs.revised, points, neg, overrides)


def reference_coefficients(cs: ConditionSet, free: Mapping[str, object], *, corrected: bool = False) -> dict[str, Rational]:
    """The set's closed-form coefficients at a free point, independent of the engine.

    With ``corrected`` the errata replace printed formulas where one exists.
    """
    env = condition_environment(cs, free)
    lam, dx = env.get("lambda", R(1)), env.get("lambda", R(1)) * env.get("dt", R(1))
    out = {}
    for f in cs.references:
        use = ERRATA.get((cs.name, f.name), f) if corrected else f
        out[f.name] = use(env, lam, dx)
    return out


# ---------------------------------------------------------------------------
# serialisation

def report_to_dict(report: VerificationReport) -> dict:
    def comp(c: Comparison):
        d = {"name": c.name, "status": c.status, "source": c.source, "engine": rational_record(c.engine),
             "formula": rational_record(c.expected)}
        if c.corrected is not None:
            d["corrected"] = rational_record(c.corrected)
        if c.note:
            d["note"] = c.note
        return d

    pts = []
    for p in report.points:
        pts.append({
            "free": {k: format_rational(v) for k, v in sorted(p.free.items())},
            "isotropic": p.isotropic,
            "coefficients": None if p.coefficients is None else {k: rational_record(v) for k, v in sorted(p.coefficients.items())},
            "extras": {k: rational_record(v) for k, v in sorted(p.extras.items())},
            "comparisons": [comp(c) for c in p.comparisons],
            "stable": p.stability.ok,
            "stability_failures": p.stability.failures,
            "stability_warnings": p.stability.warnings,
            "windows": [{"constraint": lab, "status": st, "hard": hard} for lab, st, hard in p.windows],
        })
    first = report.first_failure
    return {
        "set": report.set_name,
        "scheme": report.scheme,
        "order": report.order,
        "revised": report.revised,
        "overrides": {k: format_rational(v) for k, v in sorted(report.overrides.items())},
        "verified": report.verified,
        "isotropic": report.isotropic,
        "formulas_exact": report.formulas_exact,
        "errata_explained": report.errata_explained,
        "stable": report.stable,
        "status_counts": report.status_counts(),
        "negative_control": None if report.negative_control is None else {
            "perturbation": report.negative_control.description,
            "order": report.negative_control.order,
            "residual_nonzero": report.negative_control.residual_nonzero,
        },
        "first_failure": None if first is None else {
            "free": {k: format_rational(v) for k, v in sorted(first.free.items())},
            "point": first.point.as_strings(),
            "anisotropic_order": first.first_anisotropic_order,
            "dump": first.failure_dump,
        },
        "points": pts,
    }


# ---------------------------------------------------------------------------
# figure1: D3Q27 fourth-order relaxation parameters along psi

FIGURE1_COLUMNS = ("psi", "sigma16/sigma5", "sigma4/sigma5", "12*sigma10*sigma5", "sigma26*sigma5")


@dataclass
class SignChange:
    lower: Rational
    upper: Rational
    direction: str  # "+-" or "-+"

    @property
    def midpoint(self) -> Rational:
        return (self.lower + self.upper) / 2


@dataclass
class Figure1Table:
    variant: str
    alpha: Rational
    rows: list[dict[str, Rational]]
    sigma16_sign_changes: list[SignChange]
    scan_sign_changes: list[SignChange]


def figure1_row(psi, *, alpha=-1, variant: str = "revised") -> dict[str, Rational]:
    psi = R(psi)
    if not 0 < psi < R("3/2"):
        raise ConditionError(f"psi = {format_rational(psi)} is outside (0, 3/2)")
    d1, d2 = _psi_factors(psi)
    for label, value in (("3 psi^3 - 22 psi^2 + 23 psi + 14", d1), ("3 psi^2 - 11 psi + 14", d2), ("4 psi - 7", 4 * psi - 7)):
        if value == 0:
            raise ConditionError(f"psi = {format_rational(psi)} is a pole: factor {label} vanishes")
    fam = psi_family(psi, alpha, R(1), variant)
    return {"psi": psi, "sigma16/sigma5": fam["sigma16"], "sigma4/sigma5": fam["sigma4"],
            "12*sigma10*sigma5": 12 * fam["sigma10"], "sigma26*sigma5": fam["sigma26"]}


def _sigma16_over_sigma5(psi, alpha, variant):
    return psi_family(psi, alpha, R(1), variant)["sigma16"]


def locate_sign_change(lo, hi, *, alpha=-1, variant: str = "revised", width=R("1/1000000000")) -> SignChange:
    """Exact bisection on sigma16/sigma5 between two psi values of opposite sign."""
    lo, hi, width = R(lo), R(hi), R(width)
    flo = _sigma16_over_sigma5(lo, alpha, variant)
    fhi = _sigma16_over_sigma5(hi, alpha, variant)
    if flo == 0:
        return SignChange(lo, lo, "+-")
    if fhi == 0:
        return SignChange(hi, hi, "+-" if flo > 0 else "-+")
    if (flo > 0) == (fhi > 0):
        raise ConditionError("no sign change in the interval")
    direction = "+-" if flo > 0 else "-+"
    while hi - lo > width:
        mid = (lo + hi) / 2
        fm = _sigma16_over_sigma5(mid, alpha, variant)
        if fm == 0:
            return SignChange(mid, mid, direction)
        if (fm > 0) == (flo > 0):
            lo = mid
        else:
            hi = mid
    return SignChange(lo, hi, direction)


def figure1_data(psi_grid: Sequence[object], *, alpha=-1, variant: str = "revised", scan_step=R("1/100")) -> Figure1Table:
    """Rows of :data:`FIGURE1_COLUMNS` on the grid, plus sigma16 sign changes.

    Sign changes are located between consecutive grid points and, separately,
    on a fixed scan of (0, 3/2] (psi = 3/2 is not a pole) so a root beyond the
    last grid point is still found.
    """
    alpha = R(alpha)
    rows = [figure1_row(p, alpha=alpha, variant=variant) for p in psi_grid]
    changes = []
    for a, b in zip(rows, rows[1:]):
        fa, fb = a["sigma16/sigma5"], b["sigma16/sigma5"]
        if fa == 0 or (fa > 0) != (fb > 0):
            changes.append(locate_sign_change(a["psi"], b["psi"], alpha=alpha, variant=variant))
    scan = []
    step = R(scan_step)
    n = int(R("3/2") / step) + (0 if (R("3/2") / step).denominator == 1 else 1)
    prev_psi, prev = None, None
    for i in range(1, n + 1):
        psi = min(step * i, R("3/2"))
        val = _sigma16_over_sigma5(psi, alpha, variant)
        if prev is not None and (val == 0 or (prev > 0) != (val > 0)):
            scan.append(locate_sign_change(prev_psi, psi, alpha=alpha, variant=variant))
        prev_psi, prev = psi, val
    return Figure1Table(variant, alpha, rows, changes, scan)


def parse_grid(text: str) -> list[Rational]:
    """``start:stop:step`` (inclusive, exact decimal or p/q values) or a comma list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConditionError(f"grid must be start:stop:step, got {text!r}")
        start, stop, step = (R(p) for p in parts)
        if step <= 0:
            raise ConditionError("grid step must be positive")
        out, x = [], start
        while x <= stop:
            out.append(x)
            x += step
        return out
    return [R(p) for p in text.split(",") if p.strip()]


def figure1_csv(table: Figure1Table) -> str:
    from .algebra import format_decimal
    head = []
    for c in FIGURE1_COLUMNS:
        head += [c, f"{c} exact"]
    lines = [",".join(head)]
    for row in table.rows:
        cells = []
        for c in FIGURE1_COLUMNS:
            cells += [format_decimal(row[c]), format_rational(row[c])]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
