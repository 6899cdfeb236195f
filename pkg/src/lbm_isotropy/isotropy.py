"""Rotation-invariant operator bases and decomposition of equivalent PDE operators.

An operator acting on (rho, J) is an (d+1) x (d+1) matrix of homogeneous
polynomials in the derivative symbols.  It is invariant by rotation when
B(R xi) = T B(xi) T^t for T = diag(1, R).  The bases below are the acoustic
families: scalar/vector couplings built from Laplacians, gradient,
divergence and, in 2D, the rotated gradient and rotated momentum, in 3D
the curl.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .algebra import ONE, ZERO, HomPoly, OpMatrix, Rational, format_rational, monomials, rank, solve_least_structure, to_rational
from .expansion import ExpansionResult
from .scheme import ParamPoint


class IsotropyError(ValueError):
    pass


@dataclass(frozen=True)
class BasisElement:
    label: str
    operator: OpMatrix
    row_kind: str  # "mass" or "momentum"


@dataclass(frozen=True)
class IsotropicBasis:
    dim: int
    order: int
    elements: tuple[BasisElement, ...]

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(e.label for e in self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __getitem__(self, label: str) -> OpMatrix:
        for e in self.elements:
            if e.label == label:
                return e.operator
        raise KeyError(label)


@dataclass(frozen=True)
class IsotropicDecomposition:
    order: int
    coefficients: dict[str, Rational]
    residual: OpMatrix

    @property
    def isotropic(self) -> bool:
        return self.residual.is_zero()

    def coefficient(self, label: str) -> Rational:
        return self.coefficients.get(label, ZERO)

    @property
    def parity_odd_coefficients(self) -> dict[str, Rational]:
        """Nonzero coefficients on reflection-odd elements (perp and curl families)."""
        return {lab: c for lab, c in self.coefficients.items() if c and is_parity_odd(lab)}


def is_parity_odd(label: str) -> bool:
    """Elements that change sign under a reflection; a lattice closed under reflections never produces them."""
    return "perp" in label or label.startswith("curl")


def _lap_power(dim: int, k: int) -> HomPoly:
    lap = sum((HomPoly.var(dim, i) ** 2 for i in range(1, dim)), HomPoly.var(dim, 0) ** 2)
    return lap**k


def _lap_label(k: int) -> str:
    return "" if k == 0 else ("lap " if k == 1 else f"lap^{k} ")


def _op(dim: int, degree: int, cells: dict[tuple[int, int], HomPoly]) -> OpMatrix:
    n = dim + 1
    z = HomPoly.zero(dim, degree)
    return OpMatrix([[cells.get((i, j), z) for j in range(n)] for i in range(n)], dim=dim, degree=degree)


def _candidates(dim: int, ell: int) -> list[BasisElement]:
    d = [HomPoly.var(dim, i) for i in range(dim)]
    out: list[BasisElement] = []
    comps = range(1, dim + 1)
    if ell % 2 == 0:
        k = ell // 2
        L = _lap_power(dim, k)
        out.append(BasisElement(f"{_lap_label(k)}rho".strip(), _op(dim, ell, {(0, 0): L}), "mass"))
        out.append(BasisElement(f"{_lap_label(k)}J".strip(), _op(dim, ell, {(i, i): L for i in comps}), "momentum"))
        if k >= 1:
            Lm = _lap_power(dim, k - 1)
            cells = {(i + 1, j + 1): d[i] * d[j] * Lm for i in range(dim) for j in range(dim)}
            out.append(BasisElement(f"grad div {_lap_label(k - 1)}J".replace("  ", " ").strip(), _op(dim, ell, cells), "momentum"))
        if dim == 2:
            out.append(BasisElement(f"{_lap_label(k)}Jperp".strip(), _op(dim, ell, {(1, 2): L, (2, 1): -L}), "momentum"))
            if k >= 1:
                Lm = _lap_power(dim, k - 1)
                # div Jperp = d_x J_y - d_y J_x
                cells = {}
                for i in range(2):
                    cells[(i + 1, 1)] = -(d[i] * d[1] * Lm)
                    cells[(i + 1, 2)] = d[i] * d[0] * Lm
                out.append(BasisElement(f"grad div {_lap_label(k - 1)}Jperp".replace("  ", " ").strip(), _op(dim, ell, cells), "momentum"))
    else:
        k = (ell - 1) // 2
        L = _lap_power(dim, k)
        out.append(BasisElement(f"div {_lap_label(k)}J".replace("  ", " ").strip(),
                                _op(dim, ell, {(0, j + 1): d[j] * L for j in range(dim)}), "mass"))
        if dim == 2:
            out.append(BasisElement(f"div {_lap_label(k)}Jperp".replace("  ", " ").strip(),
                                    _op(dim, ell, {(0, 1): -(d[1] * L), (0, 2): d[0] * L}), "mass"))
        out.append(BasisElement(f"grad {_lap_label(k)}rho".replace("  ", " ").strip(),
                                _op(dim, ell, {(i + 1, 0): d[i] * L for i in range(dim)}), "momentum"))
        if dim == 2:
            out.append(BasisElement(f"gradperp {_lap_label(k)}rho".replace("  ", " ").strip(),
                                    _op(dim, ell, {(1, 0): d[1] * L, (2, 0): -(d[0] * L)}), "momentum"))
        if dim == 3:
            # (curl J)_i = eps_ijk d_j J_k
            cells = {
                (1, 3): d[1] * L, (1, 2): -(d[2] * L),
                (2, 1): d[2] * L, (2, 3): -(d[0] * L),
                (3, 2): d[0] * L, (3, 1): -(d[1] * L),
            }
            out.append(BasisElement(f"curl {_lap_label(k)}J".replace("  ", " ").strip(), _op(dim, ell, cells), "momentum"))
    return out


def flatten(op: OpMatrix) -> list[Rational]:
    monos = monomials(op.dim, op.degree)
    return [cell.coeff(m) for row in op.entries() for cell in row for m in monos]


def unflatten(vec, dim: int, degree: int) -> OpMatrix:
    monos = monomials(dim, degree)
    n = dim + 1
    it = iter(vec)
    rows = []
    for _ in range(n):
        row = []
        for _ in range(n):
            row.append(HomPoly(dim, degree, {m: next(it) for m in monos}))
        rows.append(row)
    return OpMatrix(rows, dim=dim, degree=degree)


@lru_cache(maxsize=None)
def build_basis(dim: int, ell: int) -> IsotropicBasis:
    """Rotation-invariant operators of degree ``ell`` on (rho, J) in ``dim`` dimensions."""
    if dim not in (2, 3):
        raise IsotropyError(f"unsupported dimension {dim}")
    if not 1 <= ell <= 4:
        raise IsotropyError(f"unsupported order {ell} (1..4)")
    elems = _candidates(dim, ell)
    vecs = [flatten(e.operator) for e in elems]
    if rank(vecs) != len(vecs):
        raise IsotropyError(f"basis for d={dim}, order {ell} is linearly dependent")
    return IsotropicBasis(dim, ell, tuple(elems))


def rotation_2d(a: int = 3, b: int = 4) -> list[list[Rational]]:
    """Rational rotation from the Pythagorean pair (a, b): cos = a/c, sin = b/c."""
    c2 = a * a + b * b
    c = int(round(c2**0.5))
    if c * c != c2:
        raise IsotropyError(f"({a}, {b}) is not a Pythagorean pair")
    cs, sn = to_rational(a) / c, to_rational(b) / c
    return [[cs, -sn], [sn, cs]]


def rotation_3d(a: int, b: int, c: int, d: int) -> list[list[Rational]]:
    """Rational rotation from the integer quaternion (a, b, c, d)."""
    n = to_rational(a * a + b * b + c * c + d * d)
    if not n:
        raise IsotropyError("zero quaternion")
    m = [
        [a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c)],
        [2 * (b * c + a * d), a * a - b * b + c * c - d * d, 2 * (c * d - a * b)],
        [2 * (b * d - a * c), 2 * (c * d + a * b), a * a - b * b - c * c + d * d],
    ]
    return [[to_rational(v) / n for v in row] for row in m]


def sample_rotations(dim: int) -> list[list[list[Rational]]]:
    """Fixed rational rotations generating a dense subgroup of SO(dim)."""
    if dim == 2:
        return [rotation_2d(3, 4)]
    return [rotation_3d(1, 2, 3, 4), rotation_3d(2, 1, 0, 1)]


def _block_diag(rot) -> list[list[Rational]]:
    n = len(rot) + 1
    t = [[ZERO] * n for _ in range(n)]
    t[0][0] = ONE
    for i, row in enumerate(rot):
        for j, v in enumerate(row):
            t[i + 1][j + 1] = v
    return t


def rotate(op: OpMatrix, rot) -> OpMatrix:
    """Operator conjugated by a rotation: xi -> R^t xi, then T . B . T^t.

    B is invariant exactly when rotate(B, R) == B.
    """
    rt = [list(r) for r in zip(*rot)]
    t = _block_diag(rot)
    tt = [list(r) for r in zip(*t)]
    return op.substitute_linear(rt).transform(t, tt)


def is_rotation_invariant(op: OpMatrix, rotations=None) -> bool:
    rotations = sample_rotations(op.dim) if rotations is None else rotations
    return all(rotate(op, r) == op for r in rotations)


def invariant_dimension(dim: int, ell: int, rotations=None) -> int:
    """Dimension of the space of degree-``ell`` operators fixed by the test rotations."""
    rotations = sample_rotations(dim) if rotations is None else rotations
    monos = monomials(dim, ell)
    n = dim + 1
    size = n * n * len(monos)
    images = []
    for idx in range(size):
        vec = [ZERO] * size
        vec[idx] = ONE
        unit = unflatten(vec, dim, ell)
        col = []
        for r in rotations:
            col.extend(a - b for a, b in zip(flatten(rotate(unit, r)), vec))
        images.append(col)
    return size - rank(images)


def decompose(op: OpMatrix, basis: IsotropicBasis) -> IsotropicDecomposition:
    """Exact projection of ``op`` onto the invariant basis plus remainder."""
    if op.dim != basis.dim or op.rows != basis.dim + 1 or op.cols != basis.dim + 1:
        raise IsotropyError(f"operator shape {op.shape} (d={op.dim}) does not match basis d={basis.dim}")
    if op.degree != basis.order and not op.is_zero():
        raise IsotropyError(f"operator degree {op.degree} differs from basis order {basis.order}")
    target = flatten(op) if op.degree == basis.order else [ZERO] * len(flatten(basis.elements[0].operator))
    cols = [flatten(e.operator) for e in basis.elements]
    coeffs, resid = solve_least_structure(cols, target)
    residual = unflatten(resid, basis.dim, basis.order)
    recon = [sum((c * v[i] for c, v in zip(coeffs, cols)), ZERO) + resid[i] for i in range(len(target))]
    if recon != target:
        raise AssertionError("reconstruction identity violated")
    return IsotropicDecomposition(basis.order, {lab: c for lab, c in zip(basis.labels, coeffs)}, residual)


@dataclass
class PhysicalCoefficients:
    """Named equivalent-PDE coefficients, in the sign convention

        d_t rho + div J + xi lap div J + eta lap^2 rho = 0
        d_t J + c0^2 grad rho - mu lap J - zeta grad div J + chi grad lap rho
              + mu4 lap^2 J + zeta4 grad div lap J = 0

    ``extras`` holds every other nonzero basis coefficient (label@order),
    scaled by dt^(order-1); the mass flux coefficient should be exactly -1.
    """

    dim: int
    order: int
    values: dict[str, Rational] = field(default_factory=dict)
    extras: dict[str, Rational] = field(default_factory=dict)

    def __getitem__(self, name: str) -> Rational:
        return self.values[name]

    def get(self, name: str, default=None):
        return self.values.get(name, default)

    def as_strings(self) -> dict[str, str]:
        return {k: format_rational(v) for k, v in self.values.items()}


# label per (order, physical name) and the sign relating it to the RHS operator
PHYSICAL_LABELS = {
    1: {"c0^2": ("grad rho", -1)},
    2: {"mu": ("lap J", 1), "zeta": ("grad div J", 1)},
    3: {"xi": ("div lap J", -1), "chi": ("grad lap rho", -1)},
    4: {"eta": ("lap^2 rho", -1), "mu4": ("lap^2 J", -1), "zeta4": ("grad div lap J", -1)},
}

# units of each coefficient as (power of lambda, power of dx)
UNITS = {
    "c0^2": (2, 0), "mu": (1, 1), "zeta": (1, 1), "gamma": (1, 1), "zeta_b": (1, 1),
    "xi": (0, 2), "chi": (2, 2), "eta": (1, 3), "mu4": (1, 3), "zeta4": (1, 3),
}


def decompose_expansion(result: ExpansionResult, order: int | None = None) -> list[IsotropicDecomposition]:
    order = result.order if order is None else order
    dim = result.alphas[0].dim
    return [decompose(result.alpha(j), build_basis(dim, j)) for j in range(1, order + 1)]


def extract_physical(decs: list[IsotropicDecomposition], point: ParamPoint) -> PhysicalCoefficients:
    """Physical constants from isotropic decompositions of alpha_1 .. alpha_L."""
    if not decs:
        raise IsotropyError("no decompositions given")
    for dec in decs:
        if not dec.isotropic:
            raise IsotropyError(f"order {dec.order} is not rotation invariant (nonzero anisotropic residual)")
    dim = decs[0].residual.dim
    dt = point.dt
    out = PhysicalCoefficients(dim, len(decs))
    for dec in decs:
        ell = dec.order
        scale = dt ** (ell - 1)
        used = set()
        for name, (label, sign) in PHYSICAL_LABELS.get(ell, {}).items():
            out.values[name] = sign * scale * dec.coefficient(label)
            used.add(label)
        for label, c in sorted(dec.coefficients.items()):
            if label in used:
                continue
            if ell == 1 and label == "div J":
                if c != -1:
                    out.extras[f"{label}@1"] = c
                continue
            if c:
                out.extras[f"{label}@{ell}"] = scale * c
    v = out.values
    if "mu" in v and "zeta" in v:
        v["gamma"] = (v["mu"] + v["zeta"]) / 2
        if dim == 3:
            v["zeta_b"] = 3 * v["zeta"] - v["mu"]
    return out
