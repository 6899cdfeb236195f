"""DdQq lattice Boltzmann schemes with linear equilibria and diagonal relaxation."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

from .algebra import ONE, ZERO, Rational, RationalMatrix, SingularMatrixError, format_rational, rank, rmat_invert, to_rational
from .expr import Expr, ExpressionError, parse_expr

HALF = ONE / 2


class SchemeError(ValueError):
    """A scheme definition violates one of its invariants."""


class ParameterError(ValueError):
    """A parameter point is inadmissible for a scheme."""


@dataclass(frozen=True)
class Moment:
    """Polynomial p_k in the velocity components and lambda.

    ``terms`` maps exponent tuples (e_1, ..., e_d, e_lambda) to rational
    coefficients; every monomial has total degree ``degree`` so that
    p_k(lambda c) = lambda^degree p_k(c) with lambda = 1.
    """

    name: str
    degree: int
    terms: tuple[tuple[tuple[int, ...], Rational], ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(sorted(((tuple(e), to_rational(c)) for e, c in self.terms if c), reverse=True)))
        for exps, _ in self.terms:
            if sum(exps) != self.degree:
                raise SchemeError(f"moment {self.name!r}: monomial {exps} is not of degree {self.degree}")
            if any(e < 0 for e in exps):
                raise SchemeError(f"moment {self.name!r}: negative exponent in {exps}")
        if not self.terms:
            raise SchemeError(f"moment {self.name!r} is the zero polynomial")

    @property
    def dim(self) -> int:
        return len(self.terms[0][0]) - 1

    def at_unit_lambda(self, c: Sequence[int]) -> Rational:
        total = 0
        for exps, coeff in self.terms:
            term = coeff
            for x, e in zip(c, exps[:-1]):
                if e:
                    term *= x**e
            total += term
        return to_rational(total)

    def __str__(self) -> str:
        names = ["vx", "vy", "vz"][: self.dim] + ["lambda"]
        parts = []
        for exps, c in self.terms:
            mono = "*".join(n + (f"^{e}" if e > 1 else "") for n, e in zip(names, exps) if e)
            parts.append(format_rational(c) + (f"*{mono}" if mono else ""))
        return " + ".join(parts).replace("+ -", "- ")


class ParamPoint(Mapping[str, Rational]):
    """Exact assignment of scheme parameters.

    ``lambda`` and ``dt`` default to 1; ``dx`` is always lambda*dt.  A
    relaxation rate may be given either as ``s<k>`` or as the Henon
    parameter ``sigma<k>`` = 1/s_k - 1/2.
    """

    __slots__ = ("_values",)

    def __init__(self, values: Mapping[str, object] | None = None, **kwargs):
        vals = {}
        for k, v in {**(values or {}), **kwargs}.items():
            if k == "dx":
                raise ParameterError("dx is derived as lambda*dt and cannot be set")
            vals[str(k)] = to_rational(v)
        vals.setdefault("lambda", ONE)
        vals.setdefault("dt", ONE)
        if vals["lambda"] <= 0:
            raise ParameterError("lambda must be positive")
        if vals["dt"] <= 0:
            raise ParameterError("dt must be positive")
        for k, v in vals.items():
            if k.startswith("sigma") and k[5:].isdigit() and f"s{k[5:]}" in vals:
                s = vals[f"s{k[5:]}"]
                if not s or v != 1 / s - HALF:
                    raise ParameterError(f"inconsistent {k}={format_rational(v)} and s{k[5:]}={format_rational(s)}")
        self._values = dict(sorted(vals.items()))

    def __getitem__(self, key: str) -> Rational:
        if key == "dx":
            return self.dx
        return self._values[key]

    def __iter__(self) -> Iterator[str]:
        return iter(self._values)

    def __len__(self) -> int:
        return len(self._values)

    def __repr__(self) -> str:
        return "ParamPoint(" + ", ".join(f"{k}={format_rational(v)}" for k, v in self._values.items()) + ")"

    def __eq__(self, other) -> bool:
        if isinstance(other, ParamPoint):
            return self._values == other._values
        return NotImplemented

    def __hash__(self) -> int:
        return hash(tuple(self._values.items()))

    @property
    def lam(self) -> Rational:
        return self._values["lambda"]

    @property
    def dt(self) -> Rational:
        return self._values["dt"]

    @property
    def dx(self) -> Rational:
        return self._values["lambda"] * self._values["dt"]

    def with_(self, **updates) -> "ParamPoint":
        vals = dict(self._values)
        for k, v in updates.items():
            vals[k] = v
            # a new rate in one convention replaces the other one
            if k.startswith("sigma") and k[5:].isdigit():
                vals.pop("s" + k[5:], None)
            elif k.startswith("s") and k[1:].isdigit():
                vals.pop("sigma" + k[1:], None)
        return ParamPoint(vals)

    def without(self, *names: str) -> "ParamPoint":
        return ParamPoint({k: v for k, v in self._values.items() if k not in names})

    def rate(self, k: int) -> Rational | None:
        if f"s{k}" in self._values:
            return self._values[f"s{k}"]
        if f"sigma{k}" in self._values:
            return 1 / (self._values[f"sigma{k}"] + HALF)
        return None

    def as_strings(self) -> dict[str, str]:
        return {k: format_rational(v) for k, v in self._values.items()}


@dataclass(frozen=True)
class Scheme:
    """A validated DdQq scheme.

    ``equilibrium`` maps (moment row, conserved column) to a dimensionless
    coefficient expression; the matrix entry is that value times
    lambda^(deg(row) - deg(col)).  ``relaxation`` gives the rate s_k of each
    non-conserved row.  ``parameters`` lists the scheme's own parameter names
    with their default (None when required).
    """

    name: str
    dim: int
    velocities: tuple[tuple[int, ...], ...]
    moments: tuple[Moment, ...]
    n_conserved: int
    equilibrium: tuple[tuple[tuple[int, int], Expr], ...]
    relaxation: tuple[tuple[int, Expr], ...]
    parameters: tuple[tuple[str, Rational | None], ...] = ()
    description: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "velocities", tuple(tuple(int(x) for x in v) for v in self.velocities))
        object.__setattr__(self, "moments", tuple(self.moments))
        eq = tuple(sorted(((tuple(k), v if isinstance(v, Expr) else parse_expr(v)) for k, v in
                           (self.equilibrium.items() if isinstance(self.equilibrium, Mapping) else self.equilibrium)),
                          key=lambda kv: kv[0]))
        object.__setattr__(self, "equilibrium", eq)
        rel = tuple(sorted(((int(k), v if isinstance(v, Expr) else parse_expr(v)) for k, v in
                            (self.relaxation.items() if isinstance(self.relaxation, Mapping) else self.relaxation))))
        object.__setattr__(self, "relaxation", rel)
        params = tuple((str(k), None if v is None else to_rational(v)) for k, v in
                       (self.parameters.items() if isinstance(self.parameters, Mapping) else self.parameters))
        object.__setattr__(self, "parameters", params)
        self._validate()

    def _validate(self) -> None:
        d, q = self.dim, self.q
        if d not in (1, 2, 3):
            raise SchemeError(f"dimension must be 1, 2 or 3, got {d}")
        seen = {}
        for j, v in enumerate(self.velocities):
            if len(v) != d:
                raise SchemeError(f"velocity {j} {v} does not have {d} components")
            if v in seen:
                raise SchemeError(f"duplicate velocity {v} at indices {seen[v]} and {j}")
            seen[v] = j
        if len(self.moments) != q:
            raise SchemeError(f"{len(self.moments)} moments given for {q} velocities")
        for m in self.moments:
            if m.dim != d:
                raise SchemeError(f"moment {m.name!r} is written in {m.dim} velocity components, expected {d}")
        if not 1 <= self.n_conserved < q:
            raise SchemeError("number of conserved moments must be in [1, q)")
        try:
            rmat_invert(self.unit_moment_matrix)
        except SingularMatrixError as exc:
            r = rank(self.unit_moment_matrix.entries)
            raise SchemeError(f"moment matrix is singular (rank {r} < {q}; rank deficiency detected at column {exc.stage})") from None
        pnames = {n for n, _ in self.parameters}
        allowed = pnames | {"lambda", "dt", "dx"} | {f"s{k}" for k in self.slave_rows} | {f"sigma{k}" for k in self.slave_rows}
        for (row, col), ex in self.equilibrium:
            if not self.n_conserved <= row < q or not 0 <= col < self.n_conserved:
                raise SchemeError(f"equilibrium entry ({row}, {col}) outside the slave x conserved block")
            bad = ex.names - allowed
            if bad:
                raise SchemeError(f"equilibrium entry ({row}, {col}) uses undeclared parameter(s) {sorted(bad)}")
        rows = [r for r, _ in self.relaxation]
        if sorted(rows) != list(self.slave_rows):
            raise SchemeError(f"relaxation must give one rate per non-conserved row {list(self.slave_rows)}")
        for row, ex in self.relaxation:
            bad = ex.names - allowed
            if bad:
                raise SchemeError(f"relaxation rate of row {row} uses undeclared parameter(s) {sorted(bad)}")

    @property
    def q(self) -> int:
        return len(self.velocities)

    @property
    def slave_rows(self) -> range:
        return range(self.n_conserved, self.q)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(m.degree for m in self.moments)

    @cached_property
    def unit_moment_matrix(self) -> RationalMatrix:
        return RationalMatrix([[m.at_unit_lambda(c) for c in self.velocities] for m in self.moments])

    @cached_property
    def _unit_inverse(self) -> RationalMatrix:
        return rmat_invert(self.unit_moment_matrix)

    def moment_index(self, name: str) -> int:
        for i, m in enumerate(self.moments):
            if m.name == name:
                return i
        raise KeyError(name)

    @property
    def parameter_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.parameters)

    def allowed_names(self) -> set[str]:
        return set(self.parameter_names) | {"lambda", "dt"} | {f"s{k}" for k in self.slave_rows} | {
            f"sigma{k}" for k in self.slave_rows}

    def check_point(self, point: ParamPoint) -> None:
        unknown = set(point) - self.allowed_names()
        if unknown:
            raise ParameterError(f"unknown parameter(s) for {self.name}: {sorted(unknown)}")

    def environment(self, point: ParamPoint) -> dict[str, Rational]:
        """All names usable in expressions: parameters (with defaults), rates, lambda, dt, dx."""
        self.check_point(point)
        env: dict[str, Rational] = {}
        for n, default in self.parameters:
            if n in point:
                env[n] = point[n]
            elif default is not None:
                env[n] = default
        env["lambda"] = point.lam
        env["dt"] = point.dt
        env["dx"] = point.dx
        for k in self.slave_rows:
            s = point.rate(k)
            if s is not None:
                env[f"s{k}"] = s
                if s:
                    env[f"sigma{k}"] = 1 / s - HALF
        return env

    def __str__(self) -> str:
        return f"{self.name} (d={self.dim}, q={self.q}, N={self.n_conserved})"


def moment_matrix(scheme: Scheme, point: ParamPoint) -> RationalMatrix:
    """M_kj = p_k(v_j) with v_j = lambda c_j."""
    lam = point.lam
    unit = scheme.unit_moment_matrix
    return RationalMatrix([[v * lam**deg for v in row] for row, deg in zip(unit.entries, scheme.degrees)])


def inverse_moment_matrix(scheme: Scheme, point: ParamPoint) -> RationalMatrix:
    lam = point.lam
    inv = scheme._unit_inverse
    # M(lambda) = diag(lambda^deg) M(1)  =>  M(lambda)^-1 = M(1)^-1 diag(lambda^-deg)
    return RationalMatrix([[v / lam**deg for v, deg in zip(row, scheme.degrees)] for row in inv.entries])


def evaluate_equilibrium(scheme: Scheme, point: ParamPoint) -> RationalMatrix:
    """The (q-N) x N matrix E with Y_eq = E W."""
    env = scheme.environment(point)
    n = scheme.n_conserved
    rows = [[ZERO] * n for _ in scheme.slave_rows]
    lam = point.lam
    for (row, col), ex in scheme.equilibrium:
        try:
            value = ex.evaluate(env)
        except ExpressionError as exc:
            raise ParameterError(f"equilibrium entry ({row}, {col}) = {ex.text!r}: {exc}") from None
        rows[row - n][col] = value * lam ** (scheme.degrees[row] - scheme.degrees[col])
    return RationalMatrix(rows)


def relaxation_rates(scheme: Scheme, point: ParamPoint, *, strict: bool = True, allow_boundary: bool = False) -> list[Rational]:
    """Rates s_k for every non-conserved row, in row order.

    With ``strict`` the stability window 0 < s_k < 2 is enforced
    (0 < s_k <= 2 when ``allow_boundary``); otherwise only s_k != 0 is required.
    """
    env = scheme.environment(point)
    out = []
    for row, ex in scheme.relaxation:
        try:
            s = ex.evaluate(env)
        except ExpressionError as exc:
            raise ParameterError(f"relaxation rate of row {row} ({scheme.moments[row].name}) = {ex.text!r}: {exc}") from None
        if not s:
            raise ParameterError(f"relaxation rate of row {row} ({scheme.moments[row].name}) is zero")
        if strict:
            upper_ok = s < 2 or (allow_boundary and s == 2)
            if not (s > 0 and upper_ok):
                raise ParameterError(
                    f"relaxation rate s{row} = {format_rational(s)} of moment {scheme.moments[row].name!r} is outside the stability window (0, 2)")
        out.append(s)
    return out


def relaxation_matrix(scheme: Scheme, point: ParamPoint, *, strict: bool = True) -> RationalMatrix:
    """Full q x q relaxation matrix J0 acting on moments."""
    n, q = scheme.n_conserved, scheme.q
    s = relaxation_rates(scheme, point, strict=strict)
    e = evaluate_equilibrium(scheme, point)
    rows = []
    for i in range(q):
        row = [ZERO] * q
        if i < n:
            row[i] = ONE
        else:
            sk = s[i - n]
            for c in range(n):
                row[c] = sk * e.entries[i - n][c]
            row[i] = 1 - sk
        rows.append(row)
    return RationalMatrix(rows)


def moment_from_dict(name: str, degree: int, terms: Mapping | Iterable) -> Moment:
    items = terms.items() if isinstance(terms, Mapping) else terms
    return Moment(name, degree, tuple((tuple(e), to_rational(c)) for e, c in items))
