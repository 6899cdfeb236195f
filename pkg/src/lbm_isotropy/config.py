"""Text format for custom schemes.

A config file is UTF-8 text made of sections.  Blank lines and everything
after ``#`` are ignored.  Example (D1Q3)::

    [lattice]
    name = d1q3
    d = 1
    q = 3
    conserved = 2
    velocities = 0; 1; -1

    [parameters]
    alpha = required
    beta = 0

    [moments]
    rho = 0 : 1
    j = 1 : vx
    e = 2 : 3/2*vx^2 - lambda^2

    [equilibrium]
    e.rho = alpha

    [relaxation]
    e = s2

``[lattice]`` keys are ``name``, ``d``, ``q``, ``conserved`` (N, the first
N moments) and ``velocities`` (integer components separated by spaces or
commas, vectors separated by ``;``).  ``[parameters]`` declares every name
used in equilibrium or relaxation expressions besides ``lambda``, ``dt``,
``dx``, ``s<k>`` and ``sigma<k>``; the value is a default or ``required``.
Each ``[moments]`` line is ``name = degree : polynomial`` where the
polynomial is a sum of terms ``c*vx^a*vy^b*vz^c*lambda^e`` with integer or
``p/q`` coefficients; terms missing a ``lambda`` power are homogenised to
the declared degree.  ``[equilibrium]`` lines are ``moment.conserved =
expression`` (the dimensionless coefficient, scaled by
lambda^(deg moment - deg conserved)); unspecified entries are zero.
``[relaxation]`` gives one rate expression per non-conserved moment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .algebra import format_rational, to_rational
from .expr import ExpressionError, parse_expr
from .scheme import Moment, Scheme, SchemeError

SECTIONS = ("lattice", "parameters", "moments", "equilibrium", "relaxation")
_AXES = ("vx", "vy", "vz")


class ConfigError(SchemeError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line, self.column, self.message = line, column, message
        where = "" if line is None else f"line {line}" + ("" if column is None else f", column {column}") + ": "
        super().__init__(where + message)


@dataclass
class _Entry:
    key: str
    value: str
    line: int
    key_col: int
    value_col: int


def _split_sections(text: str) -> dict[str, list[_Entry]]:
    sections: dict[str, list[_Entry]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        indent = len(line) - len(line.lstrip()) + 1
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ConfigError("unterminated section header", lineno, indent)
            name = stripped[1:-1].strip().lower()
            if name not in SECTIONS:
                raise ConfigError(f"unknown section [{name}]; expected one of {', '.join(SECTIONS)}", lineno, indent)
            if name in sections:
                raise ConfigError(f"section [{name}] appears twice", lineno, indent)
            sections[name] = []
            current = name
            continue
        if current is None:
            raise ConfigError("content before the first section header", lineno, indent)
        if "=" not in line:
            raise ConfigError("expected 'key = value'", lineno, indent)
        eq = line.index("=")
        key = line[:eq].strip()
        value = line[eq + 1:]
        vcol = eq + 2 + len(value) - len(value.lstrip())
        if not key:
            raise ConfigError("empty key", lineno, indent)
        sections[current].append(_Entry(key, value.strip(), lineno, indent, vcol))
    return sections


def _int(entry: _Entry) -> int:
    if not re.fullmatch(r"[+-]?\d+", entry.value):
        raise ConfigError(f"{entry.key} must be an integer, got {entry.value!r}", entry.line, entry.value_col)
    return int(entry.value)


_TERM = re.compile(r"\s*([+-])?\s*([^+-]+)")


def parse_polynomial(text: str, dim: int, degree: int, *, line: int | None = None, column: int = 1) -> tuple:
    """Terms ``((e_1..e_d, e_lambda), coefficient)`` of a homogeneous polynomial."""
    names = _AXES[:dim] + ("lambda",)
    terms: dict[tuple, object] = {}
    pos = 0
    src = text
    if not src.strip():
        raise ConfigError("empty polynomial", line, column)
    first = True
    while pos < len(src):
        m = _TERM.match(src, pos)
        if not m or (not first and m.group(1) is None):
            raise ConfigError(f"cannot parse polynomial near {src[pos:]!r}", line, column + pos)
        sign = -1 if m.group(1) == "-" else 1
        body = m.group(2).strip()
        col = column + m.start(2)
        coeff = to_rational(1)
        exps = [0] * (dim + 1)
        for k, factor in enumerate(f.strip() for f in body.split("*")):
            if re.fullmatch(r"\d+(/\d+)?", factor):
                if k:
                    raise ConfigError(f"coefficient {factor!r} must come first in the term", line, col)
                try:
                    coeff = to_rational(factor)
                except ZeroDivisionError:
                    raise ConfigError(f"bad coefficient {factor!r}", line, col) from None
                continue
            fm = re.fullmatch(r"([A-Za-z]+)(?:\^(\d+))?", factor)
            if not fm or fm.group(1) not in names:
                raise ConfigError(f"unknown factor {factor!r}; allowed variables are {', '.join(names)}", line, col)
            exps[names.index(fm.group(1))] += int(fm.group(2) or 1)
        if sum(exps[:-1]) > degree:
            raise ConfigError(f"term {body!r} exceeds the declared degree {degree}", line, col)
        if exps[-1] == 0:
            exps[-1] = degree - sum(exps[:-1])
        if sum(exps) != degree:
            raise ConfigError(f"term {body!r} is not of degree {degree}", line, col)
        key = tuple(exps)
        terms[key] = terms.get(key, 0) + sign * coeff
        pos = m.end()
        first = False
    return tuple((e, c) for e, c in terms.items() if c)


def parse_scheme_config(text: str) -> Scheme:
    """Build a :class:`Scheme` from config text; see the module docstring for the grammar."""
    sections = _split_sections(text)
    for s in ("lattice", "moments", "relaxation"):
        if s not in sections:
            raise ConfigError(f"missing section [{s}]")
    lat = {}
    for e in sections["lattice"]:
        if e.key in lat:
            raise ConfigError(f"duplicate key {e.key!r}", e.line, e.key_col)
        lat[e.key] = e
    for req in ("name", "d", "conserved", "velocities"):
        if req not in lat:
            raise ConfigError(f"[lattice] is missing {req!r}")
    unknown = set(lat) - {"name", "d", "q", "conserved", "velocities", "description"}
    if unknown:
        e = lat[sorted(unknown)[0]]
        raise ConfigError(f"unknown [lattice] key {e.key!r}", e.line, e.key_col)
    dim = _int(lat["d"])
    vel_entry = lat["velocities"]
    velocities = []
    offset = 0
    for chunk in vel_entry.value.split(";"):
        col = vel_entry.value_col + offset
        offset += len(chunk) + 1
        parts = [p for p in re.split(r"[\s,()]+", chunk) if p]
        if not parts:
            continue
        if not all(re.fullmatch(r"[+-]?\d+", p) for p in parts):
            raise ConfigError(f"velocity {chunk.strip()!r} must have integer components", vel_entry.line, col)
        if len(parts) != dim:
            raise ConfigError(f"velocity {chunk.strip()!r} does not have {dim} components", vel_entry.line, col)
        v = tuple(int(p) for p in parts)
        if v in velocities:
            raise ConfigError(f"duplicate velocity {v}", vel_entry.line, col)
        velocities.append(v)
    if "q" in lat and _int(lat["q"]) != len(velocities):
        raise ConfigError(f"q = {lat['q'].value} but {len(velocities)} velocities are listed", lat["q"].line, lat["q"].value_col)

    params = []
    for e in sections.get("parameters", []):
        if not re.fullmatch(r"[A-Za-z_]\w*", e.key):
            raise ConfigError(f"bad parameter name {e.key!r}", e.line, e.key_col)
        if e.key in (p for p, _ in params):
            raise ConfigError(f"duplicate parameter {e.key!r}", e.line, e.key_col)
        if e.value.lower() == "required":
            params.append((e.key, None))
        else:
            try:
                params.append((e.key, to_rational(e.value)))
            except (ValueError, ZeroDivisionError, TypeError):
                raise ConfigError(f"default of {e.key!r} must be a rational p/q or 'required'", e.line, e.value_col) from None

    moments = []
    names: dict[str, int] = {}
    for e in sections["moments"]:
        if e.key in names:
            raise ConfigError(f"duplicate moment name {e.key!r}", e.line, e.key_col)
        if ":" not in e.value:
            raise ConfigError("expected 'degree : polynomial'", e.line, e.value_col)
        deg_text, poly_text = e.value.split(":", 1)
        if not re.fullmatch(r"\s*\d+\s*", deg_text):
            raise ConfigError(f"degree must be a non-negative integer, got {deg_text.strip()!r}", e.line, e.value_col)
        degree = int(deg_text)
        pcol = e.value_col + len(deg_text) + 1 + len(poly_text) - len(poly_text.lstrip())
        terms = parse_polynomial(poly_text.strip(), dim, degree, line=e.line, column=pcol)
        try:
            moments.append(Moment(e.key, degree, terms))
        except SchemeError as exc:
            raise ConfigError(str(exc), e.line, e.key_col) from None
        names[e.key] = len(moments) - 1
    n = _int(lat["conserved"])

    def row_of(e: _Entry, name: str, col: int) -> int:
        if name not in names:
            raise ConfigError(f"unknown moment {name!r}", e.line, col)
        return names[name]

    def expr_of(e: _Entry):
        try:
            return parse_expr(e.value)
        except ExpressionError as exc:
            raise ConfigError(str(exc), e.line, e.value_col) from None

    equilibrium = {}
    for e in sections.get("equilibrium", []):
        if e.key.count(".") != 1:
            raise ConfigError("equilibrium keys are 'moment.conserved'", e.line, e.key_col)
        a, b = e.key.split(".")
        r, c = row_of(e, a.strip(), e.key_col), row_of(e, b.strip(), e.key_col + len(a) + 1)
        if (r, c) in equilibrium:
            raise ConfigError(f"duplicate equilibrium entry {e.key!r}", e.line, e.key_col)
        equilibrium[(r, c)] = expr_of(e)
    relaxation = {}
    for e in sections["relaxation"]:
        r = row_of(e, e.key, e.key_col)
        if r in relaxation:
            raise ConfigError(f"duplicate relaxation rate for {e.key!r}", e.line, e.key_col)
        relaxation[r] = expr_of(e)
    description = lat["description"].value if "description" in lat else ""
    return Scheme(lat["name"].value, dim, tuple(velocities), tuple(moments), n, equilibrium, relaxation, tuple(params),
                  description=description)


def _format_term(exps, coeff, dim) -> str:
    names = _AXES[:dim] + ("lambda",)
    mono = "*".join(nm + (f"^{e}" if e > 1 else "") for nm, e in zip(names, exps) if e)
    c = abs(coeff)
    if not mono:
        return format_rational(c)
    return mono if c == 1 else f"{format_rational(c)}*{mono}"


def serialize_scheme(scheme: Scheme) -> str:
    """Config text that :func:`parse_scheme_config` turns back into an equal scheme."""
    d = scheme.dim
    out = ["[lattice]", f"name = {scheme.name}"]
    if scheme.description:
        out.append(f"description = {' '.join(scheme.description.split()).replace('#', '')}")
    out += [f"d = {d}", f"q = {scheme.q}", f"conserved = {scheme.n_conserved}",
            "velocities = " + "; ".join(" ".join(str(x) for x in v) for v in scheme.velocities), "", "[parameters]"]
    for name, default in scheme.parameters:
        out.append(f"{name} = {'required' if default is None else format_rational(default)}")
    out += ["", "[moments]"]
    for m in scheme.moments:
        poly = ""
        for i, (exps, c) in enumerate(m.terms):
            sign = "-" if c < 0 else "+"
            term = _format_term(exps, c, d)
            poly += (f"-{term}" if sign == "-" else term) if i == 0 else f" {sign} {term}"
        out.append(f"{m.name} = {m.degree} : {poly}")
    out += ["", "[equilibrium]"]
    for (r, c), ex in scheme.equilibrium:
        out.append(f"{scheme.moments[r].name}.{scheme.moments[c].name} = {ex.text}")
    out += ["", "[relaxation]"]
    for r, ex in scheme.relaxation:
        out.append(f"{scheme.moments[r].name} = {ex.text}")
    return "\n".join(out) + "\n"


def load_scheme_file(path) -> Scheme:
    with open(path, encoding="utf-8") as fh:
        return parse_scheme_config(fh.read())
