"""Largest CHSH value reachable with local vertical measurements.

The measurement settings stay fixed at the canonical vertical choice and the
state is moved instead: the bound of a state rho is

    max over U = U_a (x) U_b of |Tr(U^dagger W U rho)|
        = max |2 sqrt2 (<eta3|U rho U^dagger|eta3> - <eta1|U rho U^dagger|eta1>)|

where eta1 and eta3 are the -2sqrt2 and +2sqrt2 eigenvectors of W. Pure
states have the closed form sqrt2 (sin(theta) + 1) in their Schmidt angle;
everything else goes through a multi-start Nelder-Mead search over the six
Euler angles (beta, gamma, delta) of both qubits.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.optimize import bisect
from scipy.stats import qmc

from .bell import canonical_W, canonical_eigensystem
from .entanglement import concurrence, horodecki_max, von_neumann_entropy
from .linalg import SQRT2, TSIRELSON, expectation, kron, projector
from .states import (
    DensityMatrix,
    InvalidState,
    PureState,
    SchmidtForm,
    as_density,
    lambda_state,
    schmidt_angle,
    schmidt_to_pure,
)

CLASSICAL_BOUND = 2.0
FOUR_PI = 4.0 * math.pi
TWO_PI = 2.0 * math.pi
# torus periods of (beta, gamma, delta) used to place the starting points
_PERIODS = np.array([FOUR_PI, TWO_PI, FOUR_PI, FOUR_PI, TWO_PI, FOUR_PI])


class NoOnsetInRange(ValueError):
    pass


@dataclass(frozen=True)
class EulerParams:
    """U = e^{-i alpha} Rz(beta) Ry(gamma) Rz(delta)."""

    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.alpha, self.beta, self.gamma, self.delta)):
            raise ValueError("Euler angles must be finite")

    def wrapped(self) -> "EulerParams":
        """Same angles reduced to beta, delta in [0, 4pi) and gamma in [0, 2pi).

        Reducing gamma by 2pi flips the sign of U; that global phase is
        irrelevant wherever U is used by conjugation.
        """
        return EulerParams(
            self.alpha % TWO_PI, self.beta % FOUR_PI, self.gamma % TWO_PI, self.delta % FOUR_PI
        )


@dataclass(frozen=True)
class ProductUnitary:
    a_params: EulerParams = field(default_factory=EulerParams)
    b_params: EulerParams = field(default_factory=EulerParams)

    @classmethod
    def from_vector(cls, x: Sequence[float]) -> "ProductUnitary":
        """From (beta, gamma, delta, beta', gamma', delta') with both alphas 0."""
        b, g, d, b2, g2, d2 = (float(v) for v in x)
        return cls(EulerParams(0.0, b, g, d), EulerParams(0.0, b2, g2, d2))

    def matrix(self) -> np.ndarray:
        return product_unitary(self)


@dataclass(frozen=True)
class OptimizerConfig:
    num_starts: int = 64
    max_iters: int = 2000
    f_tol: float = 1e-10
    x_tol: float = 1e-9
    seed: int = 0
    initial_step: float = 0.6
    # pure inputs use the closed form unless this is off
    analytic_pure: bool = True

    def __post_init__(self):
        if self.num_starts < 1 or self.max_iters < 1:
            raise ValueError("num_starts and max_iters must be positive")
        if not (self.f_tol > 0 and self.x_tol > 0 and self.initial_step > 0):
            raise ValueError("tolerances and initial_step must be positive")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


@dataclass(frozen=True)
class BoundResult:
    value: float
    best_params: ProductUnitary | None
    starts_converged: int
    evaluations: int
    method: str = "numeric"


def single_qubit_unitary(p: EulerParams) -> np.ndarray:
    c = math.cos(p.gamma / 2)
    s = math.sin(p.gamma / 2)
    e = np.exp
    return np.exp(-1j * p.alpha) * np.array(
        [
            [e(1j * (-p.beta / 2 - p.delta / 2)) * c, -e(1j * (-p.beta / 2 + p.delta / 2)) * s],
            [e(1j * (p.beta / 2 - p.delta / 2)) * s, e(1j * (p.beta / 2 + p.delta / 2)) * c],
        ]
    )


def product_unitary(u: ProductUnitary) -> np.ndarray:
    return kron(single_qubit_unitary(u.a_params), single_qubit_unitary(u.b_params))


def objective(u: ProductUnitary, rho: DensityMatrix | PureState) -> float:
    """|2 sqrt2 [Tr(U^dag P3 U rho) - Tr(U^dag P1 U rho)]| with P_k = |eta_k><eta_k|."""
    rho = as_density(rho)
    U = product_unitary(u)
    Ud = U.conj().T
    eig = canonical_eigensystem()
    p3 = expectation(Ud @ projector(eig.eta3) @ U, rho.matrix).real
    p1 = expectation(Ud @ projector(eig.eta1) @ U, rho.matrix).real
    return abs(2.0 * SQRT2 * (p3 - p1))


def direct_objective(u: ProductUnitary, rho: DensityMatrix | PureState) -> float:
    """|Tr((U^dag W U) rho)| evaluated from W itself."""
    U = product_unitary(u)
    return abs(expectation(U.conj().T @ canonical_W() @ U, as_density(rho).matrix).real)


def pure_bound_analytic(theta: float) -> float:
    if not (0.0 <= theta <= math.pi):
        raise ValueError(f"theta={theta!r} outside [0, pi]")
    return SQRT2 * (math.sin(theta) + 1.0)


# --- batched evaluation -----------------------------------------------------


def _half_angle_unitary(beta, gamma, delta):
    """Entries (u00, u01, u10, u11) of U(0, beta, gamma, delta) for arrays of angles."""
    c = np.cos(0.5 * gamma)
    s = np.sin(0.5 * gamma)
    pp = np.exp(-0.5j * (beta + delta))
    pm = np.exp(-0.5j * (beta - delta))
    return pp * c, -pm * s, pm.conj() * s, pp.conj() * c


def _quad(rho, v):
    """Re(v^dagger rho v) per row, for rho stored component-major as (4, 4, N)."""
    total = (
        rho[0, 0].real * (v[0].real ** 2 + v[0].imag ** 2)
        + rho[1, 1].real * (v[1].real ** 2 + v[1].imag ** 2)
        + rho[2, 2].real * (v[2].real ** 2 + v[2].imag ** 2)
        + rho[3, 3].real * (v[3].real ** 2 + v[3].imag ** 2)
    )
    off = (
        rho[0, 1] * v[0].conj() * v[1]
        + rho[0, 2] * v[0].conj() * v[2]
        + rho[0, 3] * v[0].conj() * v[3]
        + rho[1, 2] * v[1].conj() * v[2]
        + rho[1, 3] * v[1].conj() * v[3]
        + rho[2, 3] * v[2].conj() * v[3]
    )
    # rho[i, j] conj(v_i) v_j over i > j is the complex conjugate of the i < j sum
    return total + 2.0 * off.real


def batch_signed_objective(x: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Signed 2sqrt2 (q3 - q1) for parameter rows x (N, 6).

    ``rho`` holds one Hermitian state per row, component-major with shape
    (4, 4, N) (see ``component_major``). U^dagger eta is computed as the 2x2
    product ua^dagger E conj(ub), where E is eta reshaped to a matrix:
    eta1 -> I/sqrt2, eta3 -> [[0, -1], [1, 0]]/sqrt2.
    """
    a00, a01, a10, a11 = _half_angle_unitary(x[:, 0], x[:, 1], x[:, 2])
    b00, b01, b10, b11 = _half_angle_unitary(x[:, 3], x[:, 4], x[:, 5])
    # ua^dagger
    d00, d01, d10, d11 = a00.conj(), a10.conj(), a01.conj(), a11.conj()
    # conj(ub)
    c00, c01, c10, c11 = b00.conj(), b01.conj(), b10.conj(), b11.conj()
    q1 = _quad(
        rho,
        (d00 * c00 + d01 * c10, d00 * c01 + d01 * c11, d10 * c00 + d11 * c10, d10 * c01 + d11 * c11),
    )
    # [[0, -1], [1, 0]] conj(ub) = [[-c10, -c11], [c00, c01]]
    q3 = _quad(
        rho,
        (-d00 * c10 + d01 * c00, -d00 * c11 + d01 * c01, -d10 * c10 + d11 * c00, -d10 * c11 + d11 * c01),
    )
    # the 1/sqrt2 normalisation of eta enters squared
    return SQRT2 * (q3 - q1)


def component_major(rho_rows: np.ndarray) -> np.ndarray:
    """(N, 4, 4) -> contiguous (4, 4, N)."""
    return np.ascontiguousarray(np.moveaxis(np.asarray(rho_rows, dtype=complex), 0, -1))


def starting_points(cfg: OptimizerConfig) -> np.ndarray:
    """Scrambled Sobol points on the 6-torus; start i depends only on (seed, i)."""
    m = max(0, math.ceil(math.log2(cfg.num_starts)))
    sampler = qmc.Sobol(d=6, scramble=True, seed=cfg.seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        pts = sampler.random_base2(m)
    return pts[: cfg.num_starts] * _PERIODS


def _nelder_mead_batch(x0: np.ndarray, rho_rows: np.ndarray, cfg: OptimizerConfig):
    """Minimise -|objective| independently for every row, all rows in lockstep.

    Standard coefficients (reflect 1, expand 2, contract 1/2, shrink 1/2). A
    row stops when its vertex values spread less than f_tol or its vertices
    spread less than x_tol, or after max_iters iterations. Finished rows are
    dropped from the working arrays so later iterations only touch live rows.
    """
    nrow, n = x0.shape
    out_x = np.empty((nrow, n))
    out_f = np.empty(nrow)
    converged = np.zeros(nrow, dtype=bool)
    evals = np.zeros(nrow, dtype=np.int64)

    def f(pts, rho):
        return -np.abs(batch_signed_objective(pts, rho))

    ids = np.arange(nrow)
    rho = component_major(rho_rows)
    sim = np.repeat(x0[:, None, :], n + 1, axis=1)
    for k in range(n):
        sim[:, k + 1, k] += cfg.initial_step
    fs = f(sim.reshape(-1, n), np.repeat(rho, n + 1, axis=2)).reshape(nrow, n + 1)
    ev = np.full(nrow, n + 1, dtype=np.int64)
    rows = np.arange(nrow)

    def retire(mask, conv):
        ib = np.argmin(fs[mask], axis=1)
        out_x[ids[mask]] = sim[mask][np.arange(ib.size), ib]
        out_f[ids[mask]] = fs[mask][np.arange(ib.size), ib]
        converged[ids[mask]] = conv
        evals[ids[mask]] = ev[mask]

    for _ in range(cfg.max_iters):
        m = ids.size
        if m == 0:
            break
        rows = np.arange(m)
        iw = np.argmax(fs, axis=1)
        ib = np.argmin(fs, axis=1)
        f_worst = fs[rows, iw]
        f_best = fs[rows, ib]
        x_best = sim[rows, ib]
        done = (f_worst - f_best < cfg.f_tol) | (
            np.max(np.abs(sim - x_best[:, None, :]), axis=(1, 2)) < cfg.x_tol
        )
        if np.any(done):
            retire(done, True)
            keep = ~done
            ids, rho, sim, fs, ev = ids[keep], rho[:, :, keep], sim[keep], fs[keep], ev[keep]
            iw, f_worst, f_best = iw[keep], f_worst[keep], f_best[keep]
            m = ids.size
            if m == 0:
                break
            rows = np.arange(m)

        f_second = np.partition(fs, n - 1, axis=1)[:, n - 1]
        worst = sim[rows, iw]
        centroid = (sim.sum(axis=1) - worst) / n
        xr = 2.0 * centroid - worst
        fr = f(xr, rho)
        ev += 1

        new_x = xr.copy()
        new_f = fr.copy()
        shrink = np.zeros(m, dtype=bool)

        expand = fr < f_best
        if np.any(expand):
            xe = 3.0 * centroid[expand] - 2.0 * worst[expand]
            fe = f(xe, rho[:, :, expand])
            ev[expand] += 1
            use_e = fe < fr[expand]
            new_x[expand] = np.where(use_e[:, None], xe, xr[expand])
            new_f[expand] = np.where(use_e, fe, fr[expand])

        outside = (fr >= f_second) & (fr < f_worst)
        contract = fr >= f_second
        if np.any(contract):
            cen = centroid[contract]
            out_c = outside[contract]
            target = np.where(out_c[:, None], xr[contract], worst[contract])
            xc = cen + 0.5 * (target - cen)
            fc = f(xc, rho[:, :, contract])
            ev[contract] += 1
            ok = np.where(out_c, fc <= fr[contract], fc < f_worst[contract])
            cidx = np.nonzero(contract)[0]
            new_x[cidx[ok]] = xc[ok]
            new_f[cidx[ok]] = fc[ok]
            shrink[cidx[~ok]] = True

        stay = ~shrink
        sim[rows[stay], iw[stay]] = new_x[stay]
        fs[rows[stay], iw[stay]] = new_f[stay]

        if np.any(shrink):
            sr = np.nonzero(shrink)[0]
            ibs = np.argmin(fs[sr], axis=1)
            best = sim[sr, ibs][:, None, :]
            shrunk = best + 0.5 * (sim[sr] - best)
            fsh = f(shrunk.reshape(-1, n), np.repeat(rho[:, :, sr], n + 1, axis=2)).reshape(
                sr.size, n + 1
            )
            # the best vertex is a fixed point of the shrink; keep its exact value
            fsh[np.arange(sr.size), ibs] = fs[sr, ibs]
            sim[sr] = shrunk
            fs[sr] = fsh
            ev[sr] += n

    if ids.size:
        retire(np.ones(ids.size, dtype=bool), False)
    return out_x, -out_f, converged, evals


def _check_states(rhos) -> list[DensityMatrix]:
    out = []
    for r in rhos:
        if isinstance(r, (DensityMatrix, PureState)):
            out.append(as_density(r))
        else:
            out.append(DensityMatrix(r))
    return out


def _analytic_result(rho: DensityMatrix) -> BoundResult:
    theta = schmidt_angle(rho.dominant_vector()).theta
    return BoundResult(pure_bound_analytic(theta), None, 0, 0, method="analytic")


def maximize_bounds(rhos: Sequence, cfg: OptimizerConfig | None = None) -> list[BoundResult]:
    """``maximize_bound`` over many states; every (state, start) pair runs in one batch.

    Results are identical to calling ``maximize_bound`` on each state alone.
    """
    cfg = cfg or OptimizerConfig()
    states = _check_states(rhos)
    results: list[BoundResult | None] = [None] * len(states)
    numeric = []
    for k, st in enumerate(states):
        if cfg.analytic_pure and st.is_pure():
            results[k] = _analytic_result(st)
        else:
            numeric.append(k)
    if numeric:
        starts = starting_points(cfg)
        S = starts.shape[0]
        x0 = np.tile(starts, (len(numeric), 1))
        rho_rows = np.repeat(np.stack([states[k].matrix for k in numeric]), S, axis=0)
        xbest, vals, conv, evals = _nelder_mead_batch(x0, rho_rows, cfg)
        vals = vals.reshape(len(numeric), S)
        xbest = xbest.reshape(len(numeric), S, 6)
        conv = conv.reshape(len(numeric), S)
        evals = evals.reshape(len(numeric), S)
        for j, k in enumerate(numeric):
            i = int(np.argmax(vals[j]))
            params = ProductUnitary.from_vector(xbest[j, i])
            params = ProductUnitary(params.a_params.wrapped(), params.b_params.wrapped())
            results[k] = BoundResult(
                value=float(vals[j, i]),
                best_params=params,
                starts_converged=int(conv[j].sum()),
                evaluations=int(evals[j].sum()),
            )
    return results  # type: ignore[return-value]


def maximize_bound(rho, cfg: OptimizerConfig | None = None) -> BoundResult:
    """Bound of |<U^dag W U>_rho| over local unitaries for a single state.

    Pure states (Tr rho^2 > 1 - 1e-9) are answered by ``pure_bound_analytic``
    unless ``cfg.analytic_pure`` is False.
    """
    return maximize_bounds([rho], cfg)[0]


def numeric_config(cfg: OptimizerConfig | None) -> OptimizerConfig:
    return replace(cfg or OptimizerConfig(), analytic_pure=False)


# --- sweeps -----------------------------------------------------------------


@dataclass(frozen=True)
class ThetaRow:
    theta: float
    chi: float
    bound_analytic: float
    bound_numeric: float
    entropy: float


@dataclass(frozen=True)
class LambdaRow:
    lam: float
    bound: float
    concurrence: float
    horodecki_max: float


def theta_grid(step: float = math.pi / 200, hi: float = math.pi) -> list[float]:
    n = int(round(hi / step))
    return [min(hi, k * step) for k in range(n + 1)]


def lambda_grid(step: float = 0.01, lo: float = 0.0, hi: float = 4.0) -> list[float]:
    n = int(round((hi - lo) / step))
    return [min(hi, lo + k * step) for k in range(n + 1)]


def sweep_theta(
    grid: Sequence[float], cfg: OptimizerConfig | None = None, chis: Sequence[float] = (0.0,)
) -> list[ThetaRow]:
    """One row per (theta, chi); the numeric column always runs the optimizer."""
    pairs = [(th, chi) for th in grid for chi in chis]
    states = [schmidt_to_pure(SchmidtForm(th, chi)) for th, chi in pairs]
    results = maximize_bounds(states, numeric_config(cfg))
    return [
        ThetaRow(th, chi, pure_bound_analytic(th), res.value, von_neumann_entropy(st))
        for (th, chi), st, res in zip(pairs, states, results)
    ]


def sweep_lambda(grid: Sequence[float], cfg: OptimizerConfig | None = None) -> list[LambdaRow]:
    states = [lambda_state(lam) for lam in grid]
    results = maximize_bounds(states, cfg)
    return [
        LambdaRow(lam, res.value, concurrence(st), horodecki_max(st))
        for lam, st, res in zip(grid, states, results)
    ]


def lambda_bound(lam: float, cfg: OptimizerConfig | None = None) -> float:
    return maximize_bound(lambda_state(lam), cfg).value


def find_onset(
    lo: float = 0.0,
    hi: float = 4.0,
    cfg: OptimizerConfig | None = None,
    step: float = 0.01,
    rows: Sequence[LambdaRow] | None = None,
    xtol: float = 1e-9,
) -> float:
    """Smallest lambda where the bound crosses the classical value 2.

    The bracket comes from a grid of the given step (or precomputed ``rows``),
    then bisection on bound(lambda) - 2 narrows it.
    """
    if rows is None:
        rows = sweep_lambda(lambda_grid(step, lo, hi), cfg)
    for left, right in zip(rows, rows[1:]):
        if left.bound <= CLASSICAL_BOUND < right.bound:
            return bisect(
                lambda lam: lambda_bound(lam, cfg) - CLASSICAL_BOUND, left.lam, right.lam, xtol=xtol
            )
    if rows and rows[0].bound > CLASSICAL_BOUND:
        return rows[0].lam
    raise NoOnsetInRange(f"bound never exceeds {CLASSICAL_BOUND} on [{lo}, {hi}]")


def _max_second_difference(lams: Sequence[float], bounds: Sequence[float]) -> float:
    b = np.asarray(bounds)
    d2 = np.abs(b[2:] - 2.0 * b[1:-1] + b[:-2])
    return lams[1 + int(np.argmax(d2))]


def find_turning_point(
    lo: float = 0.0,
    hi: float = 4.0,
    cfg: OptimizerConfig | None = None,
    step: float = 0.01,
    rows: Sequence[LambdaRow] | None = None,
    levels: int = 2,
) -> float:
    """lambda where the bound curve bends hardest.

    Picks the grid point with the largest |second difference| of the bound and
    re-grids +-2 steps around it ten times finer, ``levels`` times.
    """
    if rows is None:
        rows = sweep_lambda(lambda_grid(step, lo, hi), cfg)
    if len(rows) < 3:
        raise ValueError("need at least three grid points")
    best = _max_second_difference([r.lam for r in rows], [r.bound for r in rows])
    h = step
    for _ in range(levels):
        a = max(lo, best - 2 * h)
        b = min(hi, best + 2 * h)
        h /= 10.0
        fine = lambda_grid(h, a, b)
        if len(fine) < 3:
            break
        vals = [r.value for r in maximize_bounds([lambda_state(x) for x in fine], cfg)]
        best = _max_second_difference(fine, vals)
    return best


def find_theta_threshold(cfg: OptimizerConfig | None = None, numeric: bool = True, xtol: float = 1e-10) -> float:
    """Schmidt angle in (0, pi/2) where the pure-state bound reaches 2."""

    def g(theta: float) -> float:
        if not numeric:
            return pure_bound_analytic(theta) - CLASSICAL_BOUND
        rho = schmidt_to_pure(SchmidtForm(theta))
        return maximize_bound(rho, numeric_config(cfg)).value - CLASSICAL_BOUND

    return bisect(g, 0.0, math.pi / 2, xtol=xtol)


def verdict(value: float) -> str:
    if value >= TSIRELSON - 1e-4:
        return "maximal"
    if value > CLASSICAL_BOUND:
        return "violation"
    return "no-violation"
