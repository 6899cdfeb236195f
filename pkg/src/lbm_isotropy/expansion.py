"""Taylor expansion of a linear MRT scheme into its equivalent PDE system.

The equivalent system is  d_t W = (alpha_1 + dt alpha_2 + dt^2 alpha_3 + ...) W
and the non-conserved moments follow  Y = (E + dt beta_1 + dt^2 beta_2 + ...) W.
Both are obtained from the order-n derivation matrices

    [[A_n, B_n], [C_n, D_n]] = 1/n! sum_j M_kj (M^-1)_jl (-v_j . grad)^n (J0)_lp

by identifying powers of dt.  :func:`expand` follows the explicit fourth
order ladder; :func:`expand_recurrence` runs the generic induction and
works for any truncation order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial

from .algebra import ZERO, AlgebraError, HomPoly, OpMatrix, RationalMatrix, to_rational
from .scheme import ParamPoint, Scheme, evaluate_equilibrium, inverse_moment_matrix, moment_matrix, relaxation_matrix, relaxation_rates

MAX_ORDER = 4


class ExpansionError(ValueError):
    pass


@dataclass(frozen=True)
class DerivativeBlocks:
    order: int
    A: OpMatrix
    B: OpMatrix
    C: OpMatrix
    D: OpMatrix


@dataclass(frozen=True)
class ExpansionResult:
    """alphas[j-1] is alpha_j (N x N, degree j); betas[j] is beta_j ((q-N) x N, degree j), betas[0] = E."""

    scheme_name: str
    point: ParamPoint
    order: int
    alphas: tuple[OpMatrix, ...]
    betas: tuple[OpMatrix, ...]

    def alpha(self, j: int) -> OpMatrix:
        if not 1 <= j <= self.order:
            raise ExpansionError(f"alpha_{j} outside truncation order {self.order}")
        return self.alphas[j - 1]

    def beta(self, j: int) -> OpMatrix:
        if not 0 <= j < len(self.betas):
            raise ExpansionError(f"beta_{j} not computed at truncation order {self.order}")
        return self.betas[j]


def _advection_powers(scheme: Scheme, point: ParamPoint, n: int) -> list[HomPoly]:
    # (-sum_a v_j^a d_a)^n, once per velocity
    lam = point.lam
    return [HomPoly.linear([-lam * c for c in v]) ** n for v in scheme.velocities]


@lru_cache(maxsize=512)
def _full_derivation_matrix(scheme: Scheme, point: ParamPoint, n: int, strict: bool) -> OpMatrix:
    q, d = scheme.q, scheme.dim
    m = moment_matrix(scheme, point).entries
    g = (inverse_moment_matrix(scheme, point) @ relaxation_matrix(scheme, point, strict=strict)).entries
    powers = _advection_powers(scheme, point, n)
    inv_fact = to_rational(1) / factorial(n)
    acc = [[{} for _ in range(q)] for _ in range(q)]
    for j in range(q):
        pt = powers[j]._terms
        if not pt:
            continue
        gj = [(p, g[j][p] * inv_fact) for p in range(q) if g[j][p]]
        for k in range(q):
            mkj = m[k][j]
            if not mkj:
                continue
            row = acc[k]
            for p, gv in gj:
                f = mkj * gv
                target = row[p]
                for e, c in pt.items():
                    target[e] = target.get(e, ZERO) + f * c
    entries = tuple(tuple(HomPoly._raw(d, n, {e: c for e, c in cell.items() if c}) for cell in row) for row in acc)
    return OpMatrix._raw(q, q, d, n, entries)


def derivative_blocks(scheme: Scheme, point: ParamPoint, n: int, *, strict: bool = False) -> DerivativeBlocks:
    """Blocks A_n, B_n, C_n, D_n of the order-n derivation matrix."""
    if n < 0:
        raise ExpansionError("derivation order must be non-negative")
    full = _full_derivation_matrix(scheme, point, n, strict)
    nc, q = scheme.n_conserved, scheme.q
    w, y = range(nc), range(nc, q)
    return DerivativeBlocks(n, full.block(w, w), full.block(w, y), full.block(y, w), full.block(y, y))


def _index_series(series: dict[int, OpMatrix], i: int, shape, dim) -> OpMatrix:
    if i in series:
        return series[i]
    return OpMatrix.zeros(shape[0], shape[1], dim, i)


def gamma_table(alphas: list[OpMatrix] | tuple[OpMatrix, ...], max_j: int, max_order: int) -> dict[tuple[int, int], OpMatrix]:
    """Gamma[(j, m)] = coefficient of dt^(m-j) in (sum_l dt^(l-1) alpha_l)^j, for j <= max_j and m <= max_order.

    Entries that need an alpha beyond those given are left out.  Products are accumulated as (series)^(j-1) * (series) so factor order is kept.
    """
    if not alphas:
        raise ExpansionError("need at least alpha_1")
    n = alphas[0].rows
    dim = alphas[0].dim
    table: dict[tuple[int, int], OpMatrix] = {(0, 0): OpMatrix.identity(n, dim)}
    for m in range(1, max_order + 1):
        table[(0, m)] = OpMatrix.zeros(n, n, dim, m)
    for j in range(1, max_j + 1):
        for m in range(j, max_order + 1):
            if m - j + 1 > len(alphas):
                # needs an alpha that is not known yet
                continue
            acc = OpMatrix.zeros(n, n, dim, m)
            # Gamma^j_m = sum_i Gamma^{j-1}_{m-i} alpha_i
            for i in range(1, m - (j - 1) + 1):
                left = table[(j - 1, m - i)]
                if left.is_zero():
                    continue
                acc = acc + left @ alphas[i - 1]
            table[(j, m)] = acc
    return table


def kappa_table(betas: list[OpMatrix] | tuple[OpMatrix, ...], gammas: dict[tuple[int, int], OpMatrix],
                max_j: int, max_order: int) -> dict[tuple[int, int], OpMatrix]:
    """K[(j, m)] = sum_{a + l = m - j} beta_a Gamma^j_{j+l}, with betas[0] = E."""
    E = betas[0]
    out: dict[tuple[int, int], OpMatrix] = {}
    for j in range(1, max_j + 1):
        for m in range(j, max_order + 1):
            p = m - j
            acc = OpMatrix.zeros(E.rows, E.cols, E.dim, m)
            for a in range(0, p + 1):
                if a >= len(betas):
                    raise ExpansionError(f"K^{j}_{m} needs beta_{a} beyond truncation")
                if (j, j + p - a) not in gammas:
                    raise ExpansionError(f"K^{j}_{m} needs Gamma^{j}_{j + p - a} beyond truncation")
                g = gammas[(j, j + p - a)]
                if g.is_zero() or betas[a].is_zero():
                    continue
                acc = acc + betas[a] @ g
            out[(j, m)] = acc
    return out


def _setup(scheme: Scheme, point: ParamPoint, order: int, strict: bool):
    if order < 1:
        raise ExpansionError("truncation order must be at least 1")
    rates = relaxation_rates(scheme, point, strict=strict)
    E = OpMatrix.from_rational(evaluate_equilibrium(scheme, point), scheme.dim)
    blocks = {n: derivative_blocks(scheme, point, n, strict=strict) for n in range(1, order + 1)}
    inv_s = [1 / s for s in rates]
    return E, blocks, inv_s


def expand(scheme: Scheme, point: ParamPoint, order: int = MAX_ORDER, *, strict: bool = False) -> ExpansionResult:
    """Equivalent PDE operators up to ``order`` (<= 4) from the explicit ladder."""
    if order > MAX_ORDER:
        raise ExpansionError(f"truncation order is capped at {MAX_ORDER} (got {order}); use expand_recurrence")
    E, b, inv_s = _setup(scheme, point, order, strict)
    half, sixth, twentyfourth = to_rational(1) / 2, to_rational(1) / 6, to_rational(1) / 24
    A = {n: b[n].A for n in b}
    B = {n: b[n].B for n in b}
    C = {n: b[n].C for n in b}
    D = {n: b[n].D for n in b}

    a1 = A[1] + B[1] @ E
    alphas, betas = [a1], [E]
    if order == 1:
        return ExpansionResult(scheme.name, point, 1, tuple(alphas), tuple(betas))
    g22 = a1 @ a1
    b1 = (C[1] + D[1] @ E - E @ a1).scale_rows(inv_s)
    a2 = A[2] + B[2] @ E + B[1] @ b1 - g22.scale(half)
    alphas.append(a2)
    betas.append(b1)
    if order == 2:
        return ExpansionResult(scheme.name, point, 2, tuple(alphas), tuple(betas))
    k12 = E @ a2 + b1 @ a1
    k22 = E @ g22
    b2 = (C[2] + D[2] @ E + D[1] @ b1 - k12 - k22.scale(half)).scale_rows(inv_s)
    g23 = a1 @ a2 + a2 @ a1
    g33 = g22 @ a1
    a3 = A[3] + B[1] @ b2 + B[2] @ b1 + B[3] @ E - g23.scale(half) - g33.scale(sixth)
    alphas.append(a3)
    betas.append(b2)
    if order == 3:
        return ExpansionResult(scheme.name, point, 3, tuple(alphas), tuple(betas))
    k13 = E @ a3 + b1 @ a2 + b2 @ a1
    k23 = E @ g23 + b1 @ g22
    k33 = E @ g33
    b3 = (C[3] + D[1] @ b2 + D[2] @ b1 + D[3] @ E - k13 - k23.scale(half) - k33.scale(sixth)).scale_rows(inv_s)
    g24 = a1 @ a3 + a2 @ a2 + a3 @ a1
    g34 = g22 @ a2 + a1 @ a2 @ a1 + a2 @ g22
    g44 = g33 @ a1
    a4 = (A[4] + B[1] @ b3 + B[2] @ b2 + B[3] @ b1 + B[4] @ E
          - g24.scale(half) - g34.scale(sixth) - g44.scale(twentyfourth))
    alphas.append(a4)
    betas.append(b3)
    return ExpansionResult(scheme.name, point, 4, tuple(alphas), tuple(betas))


def expand_recurrence(scheme: Scheme, point: ParamPoint, order: int, *, strict: bool = False) -> ExpansionResult:
    """Same operators through the generic induction on the Gamma and K tables."""
    E, b, inv_s = _setup(scheme, point, order, strict)
    alphas: list[OpMatrix] = [b[1].A + b[1].B @ E]
    betas: list[OpMatrix] = [E]
    for k in range(0, order):
        # beta_{k+1} from S beta_{k+1} = C_{k+1} + sum_j D_j beta_{k+1-j} - sum_j K^j_{k+1}/j!
        if k + 1 >= order:
            break
        gam = gamma_table(alphas, k + 1, k + 1)
        kap = kappa_table(betas, gam, k + 1, k + 1)
        rhs = b[k + 1].C
        for j in range(1, k + 2):
            rhs = rhs + b[j].D @ betas[k + 1 - j]
        for j in range(1, k + 2):
            rhs = rhs - kap[(j, k + 1)].scale(to_rational(1) / factorial(j))
        betas.append(rhs.scale_rows(inv_s))
        # alpha_{k+2} = A_{k+2} + sum_j B_j beta_{k+2-j} - sum_{j>=2} Gamma^j_{k+2}/j!
        m = k + 2
        gam = gamma_table(alphas, m, m)
        new = b[m].A
        for j in range(1, m + 1):
            new = new + b[j].B @ betas[m - j]
        for j in range(2, m + 1):
            new = new - gam[(j, m)].scale(to_rational(1) / factorial(j))
        alphas.append(new)
    return ExpansionResult(scheme.name, point, order, tuple(alphas), tuple(betas))


def truncated_operator(result: ExpansionResult, order: int | None = None) -> list[OpMatrix]:
    """dt^(j-1) alpha_j for j = 1..order, each scaled by the point's dt."""
    order = result.order if order is None else order
    dt = result.point.dt
    return [result.alpha(j).scale(dt ** (j - 1)) for j in range(1, order + 1)]
