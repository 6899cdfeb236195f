"""Fourier-symbol (von Neumann) analysis in double precision.

One step of the scheme acting on a plane wave ``exp(i k.x)`` is

    L(k) = T(k) M^-1 J0 M,   T(k) = diag(exp(-i k.v_j dt)),

with M the moment matrix and J0 the relaxation matrix.  The N eigenvalues
of L(k) that tend to 1 as k -> 0 are the hydrodynamic modes; ``log(l)/dt``
is compared with the eigenvalues of the equivalent-PDE symbol
``sum_j dt^(j-1) alpha_j(i k)`` and the spread of each mode across a fan of
directions gives a numerical anisotropy exponent.

Wavevectors are physical (units 1/length); magnitudes passed to the sweep
are ``|k| dx``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import permutations
from typing import Sequence

import numpy as np

from .algebra import OpMatrix
from .expansion import MAX_ORDER, expand
from .scheme import ParamPoint, Scheme, inverse_moment_matrix, moment_matrix, relaxation_matrix, relaxation_rates

THREADS_ENV = "LBM_ISOTROPY_WORKERS"
DEFAULT_WINDOW = (1e-3, 1e-1)


class DispersionError(ValueError):
    pass


def _to_float(mat) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in mat.entries], dtype=float)


@dataclass(frozen=True)
class _Operators:
    """Float copies of the moment-space pieces for repeated use."""

    core: np.ndarray  # M^-1 J0 M
    m: np.ndarray
    minv: np.ndarray
    j0: np.ndarray
    velocities: np.ndarray
    dt: float
    dx: float
    n: int


def _operators(scheme: Scheme, point: ParamPoint) -> _Operators:
    m = _to_float(moment_matrix(scheme, point))
    minv = _to_float(inverse_moment_matrix(scheme, point))
    j0 = _to_float(relaxation_matrix(scheme, point, strict=False))
    lam = float(point.lam)
    return _Operators(minv @ j0 @ m, m, minv, j0, lam * np.array(scheme.velocities, dtype=float), float(point.dt),
                      float(point.dx), scheme.n_conserved)


@dataclass
class AmplificationMatrix:
    k: tuple[float, ...]
    matrix: np.ndarray

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(self.matrix)


def _amplification(ops: _Operators, k: np.ndarray) -> np.ndarray:
    phase = np.exp(-1j * (ops.velocities @ k) * ops.dt)
    return phase[:, None] * ops.core


def amplification_matrix(scheme: Scheme, point: ParamPoint, k: Sequence[float]) -> AmplificationMatrix:
    k = np.asarray(k, dtype=float)
    if k.shape != (scheme.dim,):
        raise DispersionError(f"wavevector must have {scheme.dim} components")
    return AmplificationMatrix(tuple(float(x) for x in k), _amplification(_operators(scheme, point), k))


def k0_spectrum_error(scheme: Scheme, point: ParamPoint) -> float:
    """Largest relative distance between the spectrum of L(0) and {1 (x N)} U {1 - s_k}."""
    got = np.sort_complex(amplification_matrix(scheme, point, [0.0] * scheme.dim).eigenvalues())
    want = [1.0] * scheme.n_conserved + [1.0 - float(s) for s in relaxation_rates(scheme, point, strict=False)]
    want = np.sort_complex(np.array(want, dtype=complex))
    return float(np.max(np.abs(got - want) / np.maximum(1.0, np.abs(want))))


def pde_symbol(alphas: Sequence[OpMatrix], k: Sequence[float], dt: float) -> np.ndarray:
    """sum_j dt^(j-1) alpha_j with each derivative d_a replaced by i k_a."""
    ik = [1j * float(x) for x in k]
    n = alphas[0].shape[0]
    out = np.zeros((n, n), dtype=complex)
    for j, a in enumerate(alphas, 1):
        f = dt ** (j - 1)
        for r in range(n):
            for c in range(n):
                p = a[r, c]
                if p:
                    out[r, c] += f * complex(p.evaluate(ik))
    return out


# ---------------------------------------------------------------------------
# sweep

def direction_fan(dim: int, count: int) -> list[tuple[float, ...]]:
    """``count`` unit directions.

    2D: angles spread over [0, pi/4] (one symmetry sector of the square
    lattices).  3D: points on the sector 0 <= phi <= pi/4, polar angle from
    the z axis to the (1,1,1) diagonal, on a small product grid.
    """
    if count < 1:
        raise DispersionError("need at least one direction")
    if dim == 1:
        return [(1.0,)]
    if dim == 2:
        if count == 1:
            return [(1.0, 0.0)]
        return [(math.cos(t), math.sin(t)) for t in (math.pi / 4 * i / (count - 1) for i in range(count))]
    m = max(2, int(math.ceil(math.sqrt(count))))
    theta_max = math.acos(1 / math.sqrt(3))
    dirs = []
    for i in range(m):
        theta = theta_max * i / (m - 1)
        for j in range(m):
            phi = math.pi / 4 * j / (m - 1)
            v = (math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta))
            if not any(np.allclose(v, w) for w in dirs):
                dirs.append(v)
    return dirs[:count] if len(dirs) >= count else dirs


@dataclass
class DispersionSample:
    direction: int
    k: tuple[float, ...]
    magnitude: float  # |k| dx
    modes: tuple[str, ...]
    scheme: np.ndarray  # log(eigenvalue)/dt per mode
    pde: np.ndarray | None  # PDE symbol eigenvalue per mode
    ambiguous: bool = False

    @property
    def mismatch(self) -> np.ndarray | None:
        return None if self.pde is None else np.abs(self.scheme - self.pde)


def _clog1p(z: np.ndarray) -> np.ndarray:
    # log(1 + z) without losing the small-z digits
    x, y = z.real, z.imag
    return 0.5 * np.log1p(2 * x + x * x + y * y) + 1j * np.arctan2(y, 1 + x)


def _shifted_moment_operator(ops: _Operators, k: np.ndarray) -> np.ndarray:
    """L_m - I in moment space, with the O(|k|) parts formed without cancellation.

    L_m = M T M^-1 J0, so L_m - I = M (T - I) M^-1 J0 + (J0 - I) and
    T - I = exp(-i theta) - 1 = -2 sin^2(theta/2) - i sin(theta).
    """
    theta = (ops.velocities @ k) * ops.dt
    tm1 = -2.0 * np.sin(theta / 2) ** 2 - 1j * np.sin(theta)
    d = (ops.m * tm1[None, :]) @ ops.minv
    return d @ ops.j0 + (ops.j0 - np.eye(len(ops.j0)))


def hydrodynamic_modes(ops: _Operators, k: np.ndarray, *, tol: float = 1e-15, max_iter: int = 200):
    """mu = l - 1 for the N hydrodynamic eigenvalues l of L(k), and eigenvectors.

    mu solves mu in spec(G(mu)) with the Schur complement
    G(mu) = A_WW + A_WY (mu - A_YY)^-1 A_YW of A = L_m - I.  Every block
    except A_YW is O(|k|), so the rounding error on mu is O(eps |k|)
    rather than O(eps).  Modes whose starting values coincide to 1e-3
    (degenerate shear pairs) are iterated as one cluster.
    """
    a = _shifted_moment_operator(ops, k)
    n = ops.n
    aww, awy, ayw, ayy = a[:n, :n], a[:n, n:], a[n:, :n], a[n:, n:]
    eye = np.eye(len(ayy))

    def g(mu):
        return aww + awy @ np.linalg.solve(mu * eye - ayy, ayw)

    mu0 = np.linalg.eigvals(g(0.0))
    scale = max(float(np.max(np.abs(mu0))), 1e-300)
    clusters: list[list[int]] = []
    for i in np.argsort(mu0.imag):
        for c in clusters:
            if abs(mu0[c[0]] - mu0[i]) <= 1e-3 * scale:
                c.append(int(i))
                break
        else:
            clusters.append([int(i)])
    mus = np.array(mu0, dtype=complex)
    vecs = np.zeros((n, n), dtype=complex)
    converged = True
    for c in clusters:
        centre = mus[c].mean()
        for _ in range(max_iter):
            vals, vv = np.linalg.eig(g(centre))
            pick = np.argsort(np.abs(vals - centre))[: len(c)]
            pick = pick[np.argsort(vals[pick].real)]
            new = vals[pick].mean()
            done = abs(new - centre) <= tol * max(abs(new), scale)
            centre = new
            if done:
                break
        else:
            converged = False
        for slot, j in zip(c, pick):
            mus[slot] = vals[j]
            vecs[:, slot] = vv[:, j]
    return mus, vecs, converged


def _label(s: np.ndarray, dim: int) -> list[str]:
    # acoustic pair = largest / smallest imaginary part, the rest are shear modes
    order = np.argsort(s.imag)
    labels = [""] * len(s)
    if len(s) >= 2:
        labels[order[-1]] = "acoustic+"
        labels[order[0]] = "acoustic-"
        rest = sorted(order[1:-1], key=lambda i: -s[i].real)
    else:
        rest = list(order)
    for j, i in enumerate(rest, 1):
        labels[i] = "shear" if len(rest) == 1 else f"shear{j}"
    return labels


def _match(prev_vecs: np.ndarray, vecs: np.ndarray, prev_vals, vals):
    """Permutation p with new mode p[i] continuing old mode i, by eigenvector overlap."""
    a = prev_vecs / np.linalg.norm(prev_vecs, axis=0)
    b = vecs / np.linalg.norm(vecs, axis=0)
    overlap = np.abs(a.conj().T @ b)
    n = len(vals)
    best, best_key = None, None
    for perm in permutations(range(n)):
        score = sum(overlap[i, perm[i]] for i in range(n))
        dist = sum(abs(prev_vals[i] - vals[perm[i]]) for i in range(n))
        key = (round(score, 9), -dist)
        if best_key is None or key > best_key:
            best, best_key = perm, key
    ambiguous = min(overlap[i, best[i]] for i in range(n)) < 0.9
    return best, ambiguous


def _ray(args):
    scheme, point, direction, d_index, magnitudes, order = args
    ops = _operators(scheme, point)
    alphas = expand(scheme, point, order).alphas if order else None
    n = scheme.n_conserved
    out = []
    prev = None
    labels = None
    for mag in magnitudes:
        k = np.asarray(direction) * (mag / ops.dx)
        mus, vecs, converged = hydrodynamic_modes(ops, k)
        ambiguous = not converged
        if prev is None:
            labels = _label(_clog1p(mus) / ops.dt, scheme.dim)
        else:
            perm, amb = _match(prev[1], vecs, prev[0], mus)
            ambiguous = ambiguous or amb
            mus, vecs = mus[list(perm)], vecs[:, list(perm)]
        prev = (mus, vecs)
        s = _clog1p(mus) / ops.dt
        pde = None
        if alphas is not None:
            pv = np.linalg.eigvals(pde_symbol(alphas, k, ops.dt))
            best = min(permutations(range(n)), key=lambda p: sum(abs(s[i] - pv[p[i]]) for i in range(n)))
            pde = pv[list(best)]
        out.append(DispersionSample(d_index, tuple(float(x) for x in k), float(mag), tuple(labels), s, pde, ambiguous))
    return out


def _workers(workers):
    if workers is not None:
        return workers
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def dispersion_sweep(scheme: Scheme, point: ParamPoint, directions: Sequence[Sequence[float]], magnitudes: Sequence[float],
                     *, order: int | None = None, workers: int | None = None) -> list[DispersionSample]:
    """Hydrodynamic modes along each direction for increasing |k| dx.

    Modes are named at the smallest magnitude and followed outward by
    eigenvector overlap.  With ``order`` the PDE symbol truncated at that
    order is evaluated too.  Output is ordered by direction then magnitude
    whatever ``workers`` is.
    """
    mags = sorted(float(m) for m in magnitudes)
    if not mags or mags[0] <= 0:
        raise DispersionError("magnitudes must be positive")
    lam = float(point.lam)
    if mags[-1] >= math.pi:
        raise DispersionError("|k| dx must stay below pi")
    del lam
    if order is not None and not 1 <= order <= MAX_ORDER:
        raise DispersionError(f"order must be in 1..{MAX_ORDER}")
    jobs = [(scheme, point, tuple(d), i, mags, order) for i, d in enumerate(directions)]
    w = _workers(workers)
    if w > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=w) as pool:
            rays = list(pool.map(_ray, jobs))
    else:
        rays = [_ray(j) for j in jobs]
    return [s for ray in rays for s in ray]


def log_magnitudes(lo: float, hi: float, count: int) -> list[float]:
    if count < 2 or lo <= 0 or hi <= lo:
        raise DispersionError("need count >= 2 and 0 < lo < hi")
    return [float(x) for x in np.logspace(math.log10(lo), math.log10(hi), count)]


# ---------------------------------------------------------------------------
# fits

@dataclass
class ModeFit:
    mode: str
    magnitudes: list[float]
    spread: list[float]
    exponent: float
    prefactor: float


@dataclass
class AnisotropyReport:
    fits: dict[str, ModeFit]
    window: tuple[float, float]
    directions: int
    ambiguous_samples: int = 0

    def exponent(self, mode: str) -> float:
        return self.fits[mode].exponent

    @property
    def acoustic_exponent(self) -> float:
        return min(self.fits[m].exponent for m in ("acoustic+", "acoustic-") if m in self.fits)


def _slope(xs, ys):
    lx, ly = np.log(np.asarray(xs)), np.log(np.asarray(ys))
    a, b = np.polyfit(lx, ly, 1)
    return float(a), float(math.exp(b))


def _groups(samples: Sequence[DispersionSample]):
    by_mag: dict[float, list[DispersionSample]] = {}
    for s in samples:
        by_mag.setdefault(s.magnitude, []).append(s)
    return by_mag


def anisotropy_order_fit(samples: Sequence[DispersionSample], window: tuple[float, float] = DEFAULT_WINDOW) -> AnisotropyReport:
    """Least-squares slope of log(angular spread) against log(|k| dx) per mode.

    The spread of a mode at one magnitude is the largest distance of its
    log-eigenvalue from the direction average.  Shear modes sharing a label
    prefix are compared after sorting by real part.
    """
    lo, hi = window
    by_mag = {m: g for m, g in _groups(samples).items() if lo * (1 - 1e-12) <= m <= hi * (1 + 1e-12)}
    if len(by_mag) < 5:
        raise DispersionError(f"need at least 5 magnitudes inside the window, got {len(by_mag)}")
    mags = sorted(by_mag)
    if math.log10(mags[-1] / mags[0]) < 1.5:
        raise DispersionError("magnitudes must span at least 1.5 decades")
    ndir = len({s.direction for s in samples})
    if ndir < 2:
        raise DispersionError("need at least two directions")
    labels = samples[0].modes
    fits = {}
    for j, label in enumerate(labels):
        spreads = []
        for m in mags:
            vals = []
            for s in by_mag[m]:
                if label.startswith("shear"):
                    shear = sorted((v for v, lab in zip(s.scheme, s.modes) if lab.startswith("shear")), key=lambda z: z.real)
                    vals.append(shear[int(label[5:] or 1) - 1])
                else:
                    vals.append(s.scheme[s.modes.index(label)])
            vals = np.array(vals)
            spreads.append(float(np.max(np.abs(vals - vals.mean()))))
        ok = [(m, sp) for m, sp in zip(mags, spreads) if sp > 0]
        if len(ok) < 2:
            exponent, pref = math.inf, 0.0
        else:
            exponent, pref = _slope(*zip(*ok))
        fits[label] = ModeFit(label, mags, spreads, exponent, pref)
    amb = sum(1 for s in samples if s.ambiguous)
    return AnisotropyReport(fits, (lo, hi), ndir, amb)


@dataclass
class MismatchReport:
    exponents: dict[str, float]
    prefactors: dict[str, float]
    window: tuple[float, float]


def pde_mismatch_fit(samples: Sequence[DispersionSample], window: tuple[float, float] = DEFAULT_WINDOW) -> MismatchReport:
    """Slope of the worst-direction |scheme - PDE| per mode over the window."""
    lo, hi = window
    by_mag = {m: g for m, g in _groups(samples).items() if lo * (1 - 1e-12) <= m <= hi * (1 + 1e-12)}
    mags = sorted(by_mag)
    if len(mags) < 5:
        raise DispersionError("need at least 5 magnitudes inside the window")
    if any(s.pde is None for s in samples):
        raise DispersionError("samples carry no PDE symbol; sweep with an order")
    exps, prefs = {}, {}
    for j, label in enumerate(samples[0].modes):
        worst = [max(float(s.mismatch[s.modes.index(label)]) for s in by_mag[m]) for m in mags]
        ok = [(m, w) for m, w in zip(mags, worst) if w > 0]
        exps[label], prefs[label] = _slope(*zip(*ok)) if len(ok) >= 2 else (math.inf, 0.0)
    return MismatchReport(exps, prefs, (lo, hi))


# ---------------------------------------------------------------------------
# output

def samples_csv(samples: Sequence[DispersionSample], dim: int) -> str:
    head = ["kx", "ky", "kz"][:dim] + ["mode", "re_log", "im_log", "pde_re", "pde_im", "mismatch"]
    lines = [",".join(head)]
    for s in samples:
        for j, label in enumerate(s.modes):
            pde = s.pde[j] if s.pde is not None else None
            cells = [repr(float(x)) for x in s.k] + [label, repr(float(s.scheme[j].real)), repr(float(s.scheme[j].imag))]
            cells += ["", "", ""] if pde is None else [repr(float(pde.real)), repr(float(pde.imag)), repr(float(abs(s.scheme[j] - pde)))]
            lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def report_dict(report: AnisotropyReport, mismatch: MismatchReport | None = None) -> dict:
    out = {
        "window": list(report.window),
        "directions": report.directions,
        "ambiguous_samples": report.ambiguous_samples,
        "modes": {m: {"exponent": f.exponent, "prefactor": f.prefactor,
                      "magnitudes": f.magnitudes, "spread": f.spread} for m, f in sorted(report.fits.items())},
    }
    if mismatch is not None:
        out["pde_mismatch"] = {m: {"exponent": mismatch.exponents[m], "prefactor": mismatch.prefactors[m]}
                               for m in sorted(mismatch.exponents)}
    return out
