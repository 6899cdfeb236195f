"""Exact rational scalars, homogeneous polynomials in derivative symbols and
matrices of such polynomials.

All symbolic computation in the package runs over ``gmpy2.mpq`` which is
always stored in lowest terms with a positive denominator.  Derivative
symbols commute with each other, matrix factors do not.
"""

from __future__ import annotations

from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Iterable, Iterator, Mapping, Sequence

from gmpy2 import mpq

Rational = type(mpq(0))

ZERO = mpq(0)
ONE = mpq(1)

SYMBOLS = ("x", "y", "z")


class AlgebraError(ValueError):
    """Raised on shape, degree or dimension mismatches."""


class SingularMatrixError(AlgebraError):
    def __init__(self, stage: int, size: int):
        super().__init__(f"matrix of size {size} is singular: no pivot in column {stage} (rank deficiency at elimination stage {stage})")
        self.stage = stage
        self.size = size


def to_rational(value) -> Rational:
    """Convert ints, Fractions, mpq and ``"p/q"`` strings to an exact rational."""
    if isinstance(value, Rational):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        text = value.strip()
        try:
            frac = Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not an exact rational: {value!r}") from exc
        return mpq(frac.numerator, frac.denominator)
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return mpq(int(value.numerator), int(value.denominator))
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def format_rational(value: Rational) -> str:
    value = to_rational(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_decimal(value: Rational, digits: int = 17) -> str:
    """Correctly rounded decimal with ``digits`` significant digits (no float round trip)."""
    value = to_rational(value)
    with localcontext() as ctx:
        ctx.prec = digits
        ctx.rounding = ROUND_HALF_EVEN
        d = Decimal(int(value.numerator)) / Decimal(int(value.denominator))
    return format(d, f".{digits}g")


def rational_record(value: Rational) -> dict[str, str]:
    """JSON-friendly pair: exact ``p/q`` plus a 17-digit decimal."""
    return {"exact": format_rational(value), "decimal": format_decimal(value)}


def monomials(dim: int, degree: int) -> list[tuple[int, ...]]:
    """Exponent tuples of total ``degree`` in ``dim`` variables, in descending lexicographic order."""
    out = []
    for combo in combinations_with_replacement(range(dim), degree):
        exps = [0] * dim
        for i in combo:
            exps[i] += 1
        out.append(tuple(exps))
    return sorted(out, reverse=True)


def _add_exps(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(x + y for x, y in zip(a, b))


class HomPoly:
    """Homogeneous polynomial in the derivative symbols d_x, d_y[, d_z].

    Zero coefficients are never stored.  Instances are immutable.
    """

    __slots__ = ("dim", "degree", "_terms", "_hash")

    def __init__(self, dim: int, degree: int, terms: Mapping[tuple[int, ...], object] | None = None):
        if dim not in (1, 2, 3):
            raise AlgebraError(f"dimension must be 1, 2 or 3, got {dim}")
        if degree < 0:
            raise AlgebraError("degree must be non-negative")
        clean: dict[tuple[int, ...], Rational] = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != dim or any(e < 0 for e in exps):
                raise AlgebraError(f"bad exponent {exps} for dimension {dim}")
            if sum(exps) != degree:
                raise AlgebraError(f"exponent {exps} does not have total degree {degree}")
            c = to_rational(coeff)
            if c:
                clean[exps] = clean.get(exps, ZERO) + c
        self.dim = dim
        self.degree = degree
        self._terms = {k: v for k, v in clean.items() if v}
        self._hash = None

    @classmethod
    def _raw(cls, dim: int, degree: int, terms: dict) -> "HomPoly":
        # trusted constructor: terms already clean
        obj = cls.__new__(cls)
        obj.dim = dim
        obj.degree = degree
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, dim: int, degree: int) -> "HomPoly":
        return cls._raw(dim, degree, {})

    @classmethod
    def constant(cls, dim: int, value=1) -> "HomPoly":
        value = to_rational(value)
        return cls._raw(dim, 0, {(0,) * dim: value} if value else {})

    @classmethod
    def var(cls, dim: int, axis: int, coeff=1) -> "HomPoly":
        exps = [0] * dim
        exps[axis] = 1
        c = to_rational(coeff)
        return cls._raw(dim, 1, {tuple(exps): c} if c else {})

    @classmethod
    def linear(cls, coeffs: Sequence) -> "HomPoly":
        """Linear form sum_i coeffs[i] * d_i."""
        dim = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            c = to_rational(c)
            if c:
                exps = [0] * dim
                exps[i] = 1
                terms[tuple(exps)] = c
        return cls._raw(dim, 1, terms)

    @property
    def terms(self) -> dict[tuple[int, ...], Rational]:
        return dict(self._terms)

    def items(self) -> list[tuple[tuple[int, ...], Rational]]:
        """Terms sorted by descending exponent tuple (deterministic)."""
        return sorted(self._terms.items(), reverse=True)

    def coeff(self, exps: tuple[int, ...]) -> Rational:
        return self._terms.get(tuple(exps), ZERO)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def _check(self, other: "HomPoly") -> None:
        if self.dim != other.dim:
            raise AlgebraError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: "HomPoly") -> "HomPoly":
        if not isinstance(other, HomPoly):
            return NotImplemented
        self._check(other)
        if not other._terms:
            return self
        if not self._terms:
            return other
        if self.degree != other.degree:
            raise AlgebraError(f"degree mismatch in sum: {self.degree} vs {other.degree}")
        out = dict(self._terms)
        for k, v in other._terms.items():
            s = out.get(k, ZERO) + v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return HomPoly._raw(self.dim, self.degree, out)

    def __neg__(self) -> "HomPoly":
        return HomPoly._raw(self.dim, self.degree, {k: -v for k, v in self._terms.items()})

    def __sub__(self, other: "HomPoly") -> "HomPoly":
        if not isinstance(other, HomPoly):
            return NotImplemented
        return self + (-other)

    def scale(self, factor) -> "HomPoly":
        factor = to_rational(factor)
        if not factor:
            return HomPoly.zero(self.dim, self.degree)
        return HomPoly._raw(self.dim, self.degree, {k: v * factor for k, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, HomPoly):
            return hp_mul(self, other)
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n: int) -> "HomPoly":
        if n < 0:
            raise AlgebraError("negative power")
        result = HomPoly.constant(self.dim, 1)
        base = self
        while n:
            if n & 1:
                result = hp_mul(result, base)
            n >>= 1
            if n:
                base = hp_mul(base, base)
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, HomPoly):
            return NotImplemented
        if self.dim != other.dim:
            return False
        if not self._terms and not other._terms:
            return True
        return self.degree == other.degree and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.dim, self.degree if self._terms else -1, tuple(self.items())))
        return self._hash

    def substitute_linear(self, rot: Sequence[Sequence]) -> "HomPoly":
        """Replace each symbol d_i by sum_j rot[i][j] d_j."""
        rows = [HomPoly.linear(r) for r in rot]
        if len(rows) != self.dim or any(r.dim != self.dim for r in rows):
            raise AlgebraError("substitution matrix must be dim x dim")
        out = HomPoly.zero(self.dim, self.degree)
        for exps, c in self._terms.items():
            term = HomPoly.constant(self.dim, c)
            for i, e in enumerate(exps):
                if e:
                    term = hp_mul(term, rows[i] ** e)
            out = out + term
        return out

    def evaluate(self, point: Sequence):
        """Evaluate with d_i replaced by point[i]; floats/complex give a float result."""
        inexact = any(isinstance(x, (float, complex)) for x in point)
        total = 0
        for exps, c in self._terms.items():
            term = float(c) if inexact else c
            for x, e in zip(point, exps):
                if e:
                    term = term * x**e
            total = total + term
        return total

    def __repr__(self) -> str:
        return f"HomPoly({self.dim}, {self.degree}, {self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for exps, c in self.items():
            sym = "*".join(
                f"d{SYMBOLS[i]}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(exps) if e
            )
            cs = format_rational(c)
            if not sym:
                parts.append(cs)
            elif c == 1:
                parts.append(sym)
            elif c == -1:
                parts.append("-" + sym)
            else:
                parts.append(f"{cs}*{sym}")
        return " + ".join(parts).replace("+ -", "- ")


def hp_mul(a: HomPoly, b: HomPoly) -> HomPoly:
    """Exact product of two homogeneous polynomials; degrees add."""
    if a.dim != b.dim:
        raise AlgebraError(f"dimension mismatch: {a.dim} vs {b.dim}")
    out: dict[tuple[int, ...], Rational] = {}
    bt = b._terms
    for ea, ca in a._terms.items():
        for eb, cb in bt.items():
            k = _add_exps(ea, eb)
            out[k] = out.get(k, ZERO) + ca * cb
    return HomPoly._raw(a.dim, a.degree + b.degree, {k: v for k, v in out.items() if v})


class OpMatrix:
    """rows x cols matrix of HomPoly entries of one common degree and dimension."""

    __slots__ = ("rows", "cols", "dim", "degree", "_entries")

    def __init__(self, entries: Sequence[Sequence[HomPoly]], dim: int | None = None, degree: int | None = None):
        grid = tuple(tuple(row) for row in entries)
        if not grid or not grid[0]:
            raise AlgebraError("OpMatrix needs at least one row and one column")
        ncols = len(grid[0])
        if any(len(r) != ncols for r in grid):
            raise AlgebraError("ragged OpMatrix rows")
        dims = {e.dim for r in grid for e in r}
        if dim is None:
            if len(dims) != 1:
                raise AlgebraError(f"mixed dimensions {sorted(dims)}")
            dim = dims.pop()
        elif dims - {dim}:
            raise AlgebraError(f"entry dimension differs from {dim}")
        degs = {e.degree for r in grid for e in r if not e.is_zero()}
        if degree is None:
            if len(degs) > 1:
                raise AlgebraError(f"non-uniform degree {sorted(degs)}")
            degree = degs.pop() if degs else grid[0][0].degree
        elif degs - {degree}:
            raise AlgebraError(f"entry degree differs from {degree}")
        self.rows = len(grid)
        self.cols = ncols
        self.dim = dim
        self.degree = degree
        # zero entries are normalised to the declared degree
        self._entries = tuple(
            tuple(e if not e.is_zero() or e.degree == degree else HomPoly.zero(dim, degree) for e in r)
            for r in grid
        )

    @classmethod
    def _raw(cls, rows, cols, dim, degree, entries) -> "OpMatrix":
        obj = cls.__new__(cls)
        obj.rows, obj.cols, obj.dim, obj.degree = rows, cols, dim, degree
        obj._entries = entries
        return obj

    @classmethod
    def zeros(cls, rows: int, cols: int, dim: int, degree: int) -> "OpMatrix":
        z = HomPoly.zero(dim, degree)
        return cls._raw(rows, cols, dim, degree, tuple(tuple(z for _ in range(cols)) for _ in range(rows)))

    @classmethod
    def identity(cls, n: int, dim: int) -> "OpMatrix":
        one = HomPoly.constant(dim, 1)
        z = HomPoly.zero(dim, 0)
        return cls._raw(n, n, dim, 0, tuple(tuple(one if i == j else z for j in range(n)) for i in range(n)))

    @classmethod
    def from_rational(cls, mat: "RationalMatrix", dim: int) -> "OpMatrix":
        return cls._raw(
            mat.rows, mat.cols, dim, 0,
            tuple(tuple(HomPoly.constant(dim, v) for v in row) for row in mat.entries),
        )

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, idx: tuple[int, int]) -> HomPoly:
        i, j = idx
        return self._entries[i][j]

    def row(self, i: int) -> tuple[HomPoly, ...]:
        return self._entries[i]

    def entries(self) -> tuple[tuple[HomPoly, ...], ...]:
        return self._entries

    def is_zero(self) -> bool:
        return all(e.is_zero() for r in self._entries for e in r)

    def block(self, rows: Iterable[int], cols: Iterable[int]) -> "OpMatrix":
        rows, cols = list(rows), list(cols)
        return OpMatrix._raw(
            len(rows), len(cols), self.dim, self.degree,
            tuple(tuple(self._entries[i][j] for j in cols) for i in rows),
        )

    def _same_shape(self, other: "OpMatrix") -> None:
        if self.shape != other.shape:
            raise AlgebraError(f"shape mismatch {self.shape} vs {other.shape}")
        if self.dim != other.dim:
            raise AlgebraError("dimension mismatch")

    def __add__(self, other: "OpMatrix") -> "OpMatrix":
        if not isinstance(other, OpMatrix):
            return NotImplemented
        self._same_shape(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.degree != other.degree:
            raise AlgebraError(f"degree mismatch {self.degree} vs {other.degree}")
        return OpMatrix._raw(
            self.rows, self.cols, self.dim, self.degree,
            tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(self._entries, other._entries)),
        )

    def __neg__(self) -> "OpMatrix":
        return OpMatrix._raw(self.rows, self.cols, self.dim, self.degree,
                             tuple(tuple(-e for e in r) for r in self._entries))

    def __sub__(self, other: "OpMatrix") -> "OpMatrix":
        if not isinstance(other, OpMatrix):
            return NotImplemented
        return self + (-other)

    def scale(self, factor) -> "OpMatrix":
        factor = to_rational(factor)
        return OpMatrix._raw(self.rows, self.cols, self.dim, self.degree,
                             tuple(tuple(e.scale(factor) for e in r) for r in self._entries))

    def scale_rows(self, factors: Sequence) -> "OpMatrix":
        """Multiply row i by factors[i] (diagonal left product)."""
        if len(factors) != self.rows:
            raise AlgebraError("need one factor per row")
        return OpMatrix._raw(self.rows, self.cols, self.dim, self.degree,
                             tuple(tuple(e.scale(f) for e in r) for f, r in zip(factors, self._entries)))

    def __mul__(self, other):
        if isinstance(other, OpMatrix):
            return opmat_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __matmul__(self, other: "OpMatrix") -> "OpMatrix":
        return opmat_mul(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, OpMatrix):
            return NotImplemented
        if self.shape != other.shape or self.dim != other.dim:
            return False
        return self._entries == other._entries

    def __hash__(self) -> int:
        return hash((self.shape, self.dim, self._entries))

    def substitute_linear(self, rot) -> "OpMatrix":
        return OpMatrix._raw(self.rows, self.cols, self.dim, self.degree,
                             tuple(tuple(e.substitute_linear(rot) for e in r) for r in self._entries))

    def transform(self, left: Sequence[Sequence], right: Sequence[Sequence]) -> "OpMatrix":
        """Return left . self . right with rational matrices on both sides."""
        lm = [[to_rational(v) for v in r] for r in left]
        rm = [[to_rational(v) for v in r] for r in right]
        tmp = []
        for i in range(len(lm)):
            row = []
            for j in range(self.cols):
                acc = HomPoly.zero(self.dim, self.degree)
                for k in range(self.rows):
                    if lm[i][k]:
                        acc = acc + self._entries[k][j].scale(lm[i][k])
                row.append(acc)
            tmp.append(row)
        out = []
        for i in range(len(tmp)):
            row = []
            for j in range(len(rm[0])):
                acc = HomPoly.zero(self.dim, self.degree)
                for k in range(self.cols):
                    if rm[k][j]:
                        acc = acc + tmp[i][k].scale(rm[k][j])
                row.append(acc)
            out.append(row)
        return OpMatrix(out, dim=self.dim, degree=self.degree)

    def __iter__(self) -> Iterator[tuple[HomPoly, ...]]:
        return iter(self._entries)

    def __repr__(self) -> str:
        return f"OpMatrix({self.rows}x{self.cols}, degree={self.degree}, dim={self.dim})"

    def pretty(self) -> str:
        return "\n".join("[ " + " | ".join(str(e) for e in r) + " ]" for r in self._entries)


def opmat_mul(a: OpMatrix, b: OpMatrix) -> OpMatrix:
    """Matrix product with HomPoly entries; degrees add, factor order is kept."""
    if a.cols != b.rows:
        raise AlgebraError(f"shape mismatch in product: {a.shape} x {b.shape}")
    if a.dim != b.dim:
        raise AlgebraError("dimension mismatch in product")
    dim = a.dim
    degree = a.degree + b.degree
    # sparse accumulation on raw term dicts
    b_rows = [[(j, e._terms) for j, e in enumerate(r) if e._terms] for r in b._entries]
    out_rows = []
    for ra in a._entries:
        acc: list[dict] = [dict() for _ in range(b.cols)]
        for k, ea in enumerate(ra):
            ta = ea._terms
            if not ta:
                continue
            for j, tb in b_rows[k]:
                target = acc[j]
                for xa, ca in ta.items():
                    for xb, cb in tb.items():
                        key = _add_exps(xa, xb)
                        target[key] = target.get(key, ZERO) + ca * cb
        out_rows.append(tuple(HomPoly._raw(dim, degree, {k: v for k, v in t.items() if v}) for t in acc))
    return OpMatrix._raw(a.rows, b.cols, dim, degree, tuple(out_rows))


class RationalMatrix:
    """Dense exact rational matrix."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence]):
        grid = tuple(tuple(to_rational(v) for v in row) for row in entries)
        if not grid or not grid[0]:
            raise AlgebraError("empty matrix")
        if any(len(r) != len(grid[0]) for r in grid):
            raise AlgebraError("ragged matrix")
        self.rows = len(grid)
        self.cols = len(grid[0])
        self.entries = grid

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls([[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RationalMatrix":
        return cls([[ZERO] * cols for _ in range(rows)])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, idx: tuple[int, int]) -> Rational:
        return self.entries[idx[0]][idx[1]]

    def row(self, i: int) -> tuple[Rational, ...]:
        return self.entries[i]

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(list(zip(*self.entries)))

    def block(self, rows: Iterable[int], cols: Iterable[int]) -> "RationalMatrix":
        cols = list(cols)
        return RationalMatrix([[self.entries[i][j] for j in cols] for i in rows])

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.rows:
            raise AlgebraError(f"shape mismatch in product: {self.shape} x {other.shape}")
        ot = list(zip(*other.entries))
        return RationalMatrix([[sum((a * b for a, b in zip(r, c) if a and b), ZERO) for c in ot] for r in self.entries])

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.shape != other.shape:
            raise AlgebraError("shape mismatch")
        return RationalMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.shape != other.shape:
            raise AlgebraError("shape mismatch")
        return RationalMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self) -> int:
        return hash(self.entries)

    def is_zero(self) -> bool:
        return not any(v for r in self.entries for v in r)

    def to_float(self):
        import numpy as np

        return np.array([[float(v) for v in r] for r in self.entries])

    def __repr__(self) -> str:
        return "RationalMatrix(" + repr([[format_rational(v) for v in r] for r in self.entries]) + ")"


def rmat_invert(m: RationalMatrix) -> RationalMatrix:
    """Exact inverse by Gauss-Jordan elimination with first-nonzero pivoting."""
    if m.rows != m.cols:
        raise AlgebraError(f"cannot invert non-square matrix {m.shape}")
    n = m.rows
    a = [list(r) + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(m.entries)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise SingularMatrixError(col, n)
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        prow = [v / p for v in a[col]]
        a[col] = prow
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], prow)]
    return RationalMatrix([row[n:] for row in a])


def rank(rows: Sequence[Sequence]) -> int:
    """Exact rank of a rational matrix given as a list of rows."""
    a = [[to_rational(v) for v in r] for r in rows]
    if not a:
        return 0
    ncols = len(a[0])
    rk = 0
    for col in range(ncols):
        piv = next((r for r in range(rk, len(a)) if a[r][col]), None)
        if piv is None:
            continue
        a[rk], a[piv] = a[piv], a[rk]
        p = a[rk][col]
        for r in range(rk + 1, len(a)):
            if a[r][col]:
                f = a[r][col] / p
                a[r] = [x - f * y for x, y in zip(a[r], a[rk])]
        rk += 1
    return rk


def solve_least_structure(columns: Sequence[Sequence], target: Sequence) -> tuple[list[Rational], list[Rational]]:
    """Project ``target`` onto the span of linearly independent ``columns``.

    Returns (coefficients, residual) where residual = target - sum c_i col_i.
    When the target is in the span the residual is exactly zero.  The
    coefficients are the exact solution of the normal equations, so the
    residual is orthogonal (in the standard inner product) to every column.
    """
    k = len(columns)
    t = [to_rational(v) for v in target]
    if k == 0:
        return [], t
    cols = [[to_rational(v) for v in c] for c in columns]
    gram = [[sum((x * y for x, y in zip(ci, cj)), ZERO) for cj in cols] for ci in cols]
    rhs = [sum((x * y for x, y in zip(ci, t)), ZERO) for ci in cols]
    inv = rmat_invert(RationalMatrix(gram))
    coeffs = [sum((inv.entries[i][j] * rhs[j] for j in range(k)), ZERO) for i in range(k)]
    resid = list(t)
    for c, col in zip(coeffs, cols):
        if c:
            resid = [r - c * v for r, v in zip(resid, col)]
    return coeffs, resid
