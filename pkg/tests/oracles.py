"""Independent reference computations used by the tests.

Nothing here calls the expansion ladder or the isotropy projection; the
oracles rebuild the same quantities by slower, more literal routes.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

from lbm_isotropy.algebra import HomPoly, OpMatrix, to_rational
from lbm_isotropy.lattices import load_builtin
from lbm_isotropy.scheme import ParamPoint


# hand-checkable one-dimensional scheme
D1Q3 = """\
[lattice]
name = d1q3
d = 1
q = 3
conserved = 2
velocities = 0; 1; -1

[parameters]
alpha = required

[moments]
rho = 0 : 1
j = 1 : vx
e = 2 : 3/2*vx^2 - lambda^2

[equilibrium]
e.rho = alpha

[relaxation]
e = s2
"""


def generic_point(name: str, salt: int = 0) -> ParamPoint:
    """Unconditioned point: every parameter and rate set to a distinct rational."""
    s = load_builtin(name)
    vals = {}
    for i, n in enumerate(s.parameter_names):
        vals[n] = to_rational(f"{(-1) ** (i + salt) * (i + 2 + salt)}/{i + 3}")
    for k in s.slave_rows:
        vals[f"sigma{k}"] = to_rational(f"{(k * 7 + salt) % 11 + 1}/{(k * 3 + salt) % 5 + 2}")
    return ParamPoint(vals)


def compositions(total: int, parts: int):
    """Ordered tuples of ``parts`` positive integers summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(1, total - parts + 2):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def _chain(ops: list[OpMatrix]) -> OpMatrix:
    out = ops[0]
    for op in ops[1:]:
        out = out @ op
    return out


def brute_gamma(alphas, j: int, m: int) -> OpMatrix:
    """Coefficient of dt^(m-j) in (sum_l dt^(l-1) alpha_l)^j by full expansion of the product."""
    n, dim = alphas[0].rows, alphas[0].dim
    if j == 0:
        return OpMatrix.identity(n, dim) if m == 0 else OpMatrix.zeros(n, n, dim, m)
    acc = OpMatrix.zeros(n, n, dim, m)
    for comp in compositions(m, j):
        if max(comp) > len(alphas):
            continue
        acc = acc + _chain([alphas[i - 1] for i in comp])
    return acc


def brute_kappa(betas, alphas, j: int, m: int) -> OpMatrix:
    """Coefficient of dt^(m-j) in (sum_a dt^a beta_a) (sum_l dt^(l-1) alpha_l)^j."""
    E = betas[0]
    acc = OpMatrix.zeros(E.rows, E.cols, E.dim, m)
    for a in range(0, m - j + 1):
        acc = acc + betas[a] @ brute_gamma(alphas, j, m - a)
    return acc


def _frac(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def invert(rows) -> list[list[Fraction]]:
    """Gauss-Jordan inverse over Fraction."""
    n = len(rows)
    a = [[_frac(v) for v in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(rows)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [v / p for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def advection_terms(velocity, lam, n: int) -> dict[tuple[int, ...], Fraction]:
    """(-lam v . grad)^n / n! written out with the multinomial theorem."""
    d = len(velocity)
    lam = _frac(lam)
    out = {}
    for exps in itertools.product(range(n + 1), repeat=d):
        if sum(exps) != n:
            continue
        c = Fraction((-1) ** n) * lam**n
        for v, e in zip(velocity, exps):
            c *= Fraction(v) ** e / math.factorial(e)
        if c:
            out[exps] = c
    return out


def brute_derivation_matrix(moment_rows, velocities, j0_rows, lam, n: int):
    """q x q table of {exponent: Fraction} for M diag((-lam v.grad)^n/n!) M^-1 J0."""
    q = len(velocities)
    m = [[_frac(v) for v in row] for row in moment_rows]
    minv = invert(moment_rows)
    j0 = [[_frac(v) for v in row] for row in j0_rows]
    g = [[sum(minv[a][b] * j0[b][c] for b in range(q)) for c in range(q)] for a in range(q)]
    adv = [advection_terms(v, lam, n) for v in velocities]
    out = [[{} for _ in range(q)] for _ in range(q)]
    for k in range(q):
        for p in range(q):
            cell = out[k][p]
            for j in range(q):
                f = m[k][j] * g[j][p]
                if not f:
                    continue
                for e, c in adv[j].items():
                    cell[e] = cell.get(e, Fraction(0)) + f * c
            out[k][p] = {e: c for e, c in cell.items() if c}
    return out


def hompoly_as_dict(p: HomPoly) -> dict[tuple[int, ...], Fraction]:
    return {e: _frac(c) for e, c in p.items()}


def symbol(op: OpMatrix, xi) -> np.ndarray:
    """Float matrix of the operator's polynomial entries at the vector xi."""
    out = np.zeros(op.shape)
    for i in range(op.rows):
        for j in range(op.cols):
            total = 0.0
            for exps, c in op[i, j].items():
                term = float(c)
                for x, e in zip(xi, exps):
                    term *= x**e
                total += term
            out[i, j] = total
    return out


def rotation_matrix(dim: int, angle: float, axis=(1.0, 2.0, 2.0)) -> np.ndarray:
    """Float rotation by an irrational-looking angle (axis-angle in 3D)."""
    c, s = math.cos(angle), math.sin(angle)
    if dim == 2:
        return np.array([[c, -s], [s, c]])
    u = np.asarray(axis, dtype=float)
    u /= np.linalg.norm(u)
    k = np.array([[0, -u[2], u[1]], [u[2], 0, -u[0]], [-u[1], u[0], 0]])
    return np.eye(3) + s * k + (1 - c) * (k @ k)


def float_rotation_defect(op: OpMatrix, angle: float = 0.7137, trials: int = 4) -> float:
    """max |T B(xi) T^t - B(R xi)| over a few xi; zero for invariant operators."""
    dim = op.dim
    rot = rotation_matrix(dim, angle)
    t = np.eye(dim + 1)
    t[1:, 1:] = rot
    rng = np.random.default_rng(12345)
    worst = 0.0
    for _ in range(trials):
        xi = rng.standard_normal(dim)
        lhs = t @ symbol(op, xi) @ t.T
        rhs = symbol(op, rot @ xi)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst
