"""Randomised property suites run by ``chshbound verify``.

Each suite draws its own generator from ``(seed, suite index)`` so suites can
be run alone or reordered without changing what they sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import bell, entanglement, linalg, optimizer, states

TSIRELSON = linalg.TSIRELSON


@dataclass
class SuiteResult:
    name: str
    passed: int
    total: int
    worst: float = 0.0
    worst_label: str = "max_err"
    counterexample: dict | None = None
    notes: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.passed == self.total


def _record(res: SuiteResult, err: float, ok: bool, example: Callable[[], dict]) -> None:
    res.worst = max(res.worst, err)
    if ok:
        res.passed += 1
    elif res.counterexample is None:
        res.counterexample = example()


def _c(m) -> list:
    return [[[z.real, z.imag] for z in row] for row in np.asarray(m, dtype=complex).tolist()]


def random_hermitian(rng, n: int = 4) -> np.ndarray:
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return g + g.conj().T


def random_product_unitary(rng) -> optimizer.ProductUnitary:
    a = rng.uniform(0, 4 * math.pi, 4)
    b = rng.uniform(0, 4 * math.pi, 4)
    return optimizer.ProductUnitary(optimizer.EulerParams(*a), optimizer.EulerParams(*b))


def _setting_dict(s: bell.MeasurementSetting) -> dict:
    return {k: list(getattr(s, k).as_array()) for k in ("a", "a_prime", "b", "b_prime")}


def _params_dict(u: optimizer.ProductUnitary) -> dict:
    return {"a": list(vars(u.a_params).values()), "b": list(vars(u.b_params).values())}


# --- core linear algebra ----------------------------------------------------


def eig_reconstruction(rng, n: int) -> SuiteResult:
    res = SuiteResult("eig-reconstruction", 0, n)
    for _ in range(n):
        h = random_hermitian(rng)
        vals, vecs = linalg.jacobi_eigh(h)
        rec = np.max(np.abs((vecs * vals) @ vecs.conj().T - h))
        orth = np.max(np.abs(vecs.conj().T @ vecs - np.eye(4)))
        resid = np.max(np.abs(h @ vecs - vecs * vals))
        ok = rec <= 1e-8 and orth <= linalg.EIG_RESIDUAL_TOL and resid <= linalg.EIG_RESIDUAL_TOL
        _record(res, max(rec, orth, resid), ok, lambda: {"matrix": _c(h)})
    return res


def trace_cyclicity(rng, n: int) -> SuiteResult:
    res = SuiteResult("trace-cyclicity", 0, n)
    for _ in range(n):
        a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        b = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        err = abs(linalg.trace(a @ b) - linalg.trace(b @ a))
        _record(res, err, err <= 1e-10, lambda: {"a": _c(a), "b": _c(b)})
    return res


def kron_mixed_product(rng, n: int) -> SuiteResult:
    res = SuiteResult("kron-mixed-product", 0, n)
    for _ in range(n):
        a, b, c, d = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)) for _ in range(4))
        err = float(np.max(np.abs(linalg.kron(a, b) @ linalg.kron(c, d) - linalg.kron(a @ c, b @ d))))
        _record(res, err, err <= 1e-10, lambda: {"a": _c(a), "b": _c(b), "c": _c(c), "d": _c(d)})
    return res


# --- states / bell ----------------------------------------------------------


def spectral_identity(rng, n: int) -> SuiteResult:
    """Projector form of the objective against |Tr(U^dag W U rho)|."""
    res = SuiteResult("spectral-identity", 0, n)
    for _ in range(n):
        u = random_product_unitary(rng)
        rho = states.random_density(rng)
        err = abs(optimizer.objective(u, rho) - optimizer.direct_objective(u, rho))
        _record(res, err, err <= 1e-10, lambda: {"rho": _c(rho.matrix), "params": _params_dict(u)})
    return res


def tsirelson(rng, n: int) -> SuiteResult:
    res = SuiteResult("tsirelson", 0, n, worst_label="max_rhs")
    for _ in range(n):
        s = bell.random_setting(rng)
        rho = states.random_density(rng)
        w = abs(bell.chsh_value(s, rho))
        rhs = bell.tsirelson_rhs(s, rho)
        ok = w <= rhs + 1e-12 and rhs <= TSIRELSON + 1e-9
        _record(res, rhs, ok, lambda: {"setting": _setting_dict(s), "rho": _c(rho.matrix)})
    return res


def separable_chsh(rng, n: int) -> SuiteResult:
    res = SuiteResult("separable-chsh", 0, n, worst_label="max_abs_chsh")
    for _ in range(n):
        s = bell.random_setting(rng)
        rho = states.random_separable(rng)
        w = abs(bell.chsh_value(s, rho))
        _record(res, w, w <= 2.0 + 1e-8, lambda: {"setting": _setting_dict(s), "rho": _c(rho.matrix)})
    return res


def tsirelson_tightness(rng, n: int) -> SuiteResult:
    res = SuiteResult("tsirelson-tightness", 0, n)
    for _ in range(n):
        s = bell.random_setting(rng)
        psi, value = bell.max_violating_state(s)
        attained = abs(bell.chsh_value(s, psi))
        rhs = bell.tsirelson_rhs(s, psi)
        err = max(abs(rhs - value), abs(attained - value))
        ok = err <= 1e-6 and value <= TSIRELSON + 1e-9
        _record(res, err, ok, lambda: {"setting": _setting_dict(s), "value": value})
    return res


def state_invariants(rng, n: int) -> SuiteResult:
    """lambda-family validity, global-phase invariance of theta, product states at theta = 0."""
    grid = np.linspace(0.0, 4.0, 400)
    phases = min(n, 100)
    res = SuiteResult("state-invariants", 0, len(grid) + phases + n)
    for lam in grid:
        try:
            states.lambda_state(float(lam))
            _record(res, 0.0, True, dict)
        except states.InvalidState as exc:
            _record(res, 0.0, False, lambda: {"lambda": float(lam), "error": str(exc)})
    for _ in range(phases):
        p = states.random_pure(rng)
        phase = np.exp(1j * rng.uniform(0, 2 * math.pi))
        t0 = states.schmidt_angle(p).theta
        t1 = states.schmidt_angle(states.PureState(p.amplitudes * phase)).theta
        err = abs(t0 - t1)
        _record(res, err, err <= 1e-9, lambda: {"psi": _c([p.amplitudes])[0], "phase": [phase.real, phase.imag]})
    for _ in range(n):
        p = states.random_product_state(rng)
        th = states.schmidt_angle(p).theta
        _record(res, th, th <= 1e-6, lambda: {"psi": _c([p.amplitudes])[0]})
    return res


# --- entanglement -----------------------------------------------------------


def pure_entanglement(rng, n: int) -> SuiteResult:
    res = SuiteResult("pure-entanglement", 0, n)
    for _ in range(n):
        p = states.random_pure(rng)
        th = states.schmidt_angle(p).theta
        e1 = abs(entanglement.concurrence(p) - math.sin(th))
        e2 = abs(entanglement.von_neumann_entropy(p) - entanglement.binary_entropy(math.cos(th / 2) ** 2))
        err = max(e1, e2)
        _record(res, err, err <= 1e-8, lambda: {"psi": _c([p.amplitudes])[0]})
    return res


def lu_invariance(rng, n: int) -> SuiteResult:
    res = SuiteResult("lu-invariance", 0, n)
    for _ in range(n):
        rho = states.random_density(rng)
        u = random_product_unitary(rng)
        moved = rho.conjugated(optimizer.product_unitary(u))
        err = max(
            abs(entanglement.concurrence(rho) - entanglement.concurrence(moved)),
            abs(entanglement.von_neumann_entropy(rho) - entanglement.von_neumann_entropy(moved)),
            abs(entanglement.horodecki_M(rho) - entanglement.horodecki_M(moved)),
        )
        _record(res, err, err <= 1e-8, lambda: {"rho": _c(rho.matrix), "params": _params_dict(u)})
    return res


def density_ranges(rng, n: int) -> SuiteResult:
    res = SuiteResult("density-ranges", 0, n, worst_label="max_horodecki")
    for _ in range(n):
        rho = states.random_density(rng)
        c = entanglement.concurrence(rho)
        hm = entanglement.horodecki_max(rho)
        ok = 0.0 <= c <= 1.0 and hm <= TSIRELSON + 1e-9
        _record(res, hm, ok, lambda: {"rho": _c(rho.matrix)})
    return res


# --- optimizer --------------------------------------------------------------


def correlation_svd_bound(rho) -> float:
    """sqrt2 (s1 + s2) from the two largest singular values of the correlation matrix.

    With W = -sqrt2 (sz sz + sx sx) a local unitary rotates the two measured
    axes of each side into an arbitrary orthonormal pair, so the maximum of
    |<U^dag W U>| is sqrt2 times the largest trace of a 2x2 block of R_a^T T R_b.
    Independent of the optimizer; used only as a check.
    """
    s = np.linalg.svd(entanglement.correlation_matrix(rho), compute_uv=False)
    return math.sqrt(2.0) * float(s[0] + s[1])


def dominance_chain(rng, n: int, cfg: optimizer.OptimizerConfig) -> SuiteResult:
    res = SuiteResult("dominance-chain", 0, n, worst_label="max_oracle_gap")
    rhos = [states.random_density(rng) for _ in range(n)]
    results = optimizer.maximize_bounds(rhos, cfg)
    for rho, r in zip(rhos, results):
        hm = entanglement.horodecki_max(rho)
        gap = abs(r.value - correlation_svd_bound(rho))
        ok = 0.0 <= r.value <= hm + 1e-6 and hm <= TSIRELSON + 1e-6 and gap <= 1e-6
        _record(res, gap, ok, lambda: {"rho": _c(rho.matrix), "bound": r.value, "horodecki_max": hm})
    return res


def alpha_invariance(rng, n: int) -> SuiteResult:
    res = SuiteResult("alpha-invariance", 0, n)
    for _ in range(n):
        u = random_product_unitary(rng)
        rho = states.random_density(rng)
        shifted = optimizer.ProductUnitary(
            optimizer.EulerParams(rng.uniform(-10, 10), *list(vars(u.a_params).values())[1:]),
            optimizer.EulerParams(rng.uniform(-10, 10), *list(vars(u.b_params).values())[1:]),
        )
        err = abs(optimizer.objective(u, rho) - optimizer.objective(shifted, rho))
        _record(res, err, err <= 1e-10, lambda: {"rho": _c(rho.matrix), "params": _params_dict(u)})
    return res


def analytic_agreement(rng, n_theta: int, cfg: optimizer.OptimizerConfig) -> SuiteResult:
    """Numeric bound of Schmidt states against sqrt2 (sin(theta) + 1), 5 chi values each."""
    thetas = np.linspace(0.0, math.pi, n_theta)
    chis = (0.0, 1.0, 2.0, math.pi, 5.0)
    rows = optimizer.sweep_theta(thetas, cfg, chis)
    res = SuiteResult("analytic-agreement", 0, len(rows))
    for row in rows:
        err = abs(row.bound_numeric - row.bound_analytic)
        _record(res, err, err <= 1e-4, lambda: {"theta": row.theta, "chi": row.chi, "numeric": row.bound_numeric})
    return res


def bound_lu_invariance(rng, n: int, cfg: optimizer.OptimizerConfig) -> SuiteResult:
    res = SuiteResult("bound-lu-invariance", 0, n)
    rhos = [states.random_density(rng) for _ in range(n)]
    moved = [r.conjugated(optimizer.product_unitary(random_product_unitary(rng))) for r in rhos]
    a = optimizer.maximize_bounds(rhos, cfg)
    b = optimizer.maximize_bounds(moved, cfg)
    for rho, x, y in zip(rhos, a, b):
        err = abs(x.value - y.value)
        _record(res, err, err <= 2e-4, lambda: {"rho": _c(rho.matrix), "bound": x.value, "moved": y.value})
    return res


def run_all(seed: int = 0, samples: int = 1000, cfg: optimizer.OptimizerConfig | None = None) -> list[SuiteResult]:
    cfg = cfg or optimizer.OptimizerConfig(seed=seed)
    few = max(1, min(samples, 50))
    suites: list[Callable[[np.random.Generator], SuiteResult]] = [
        lambda g: eig_reconstruction(g, samples),
        lambda g: trace_cyclicity(g, samples),
        lambda g: kron_mixed_product(g, samples),
        lambda g: spectral_identity(g, samples),
        lambda g: tsirelson(g, samples),
        lambda g: separable_chsh(g, samples),
        lambda g: tsirelson_tightness(g, samples),
        lambda g: state_invariants(g, samples),
        lambda g: pure_entanglement(g, samples),
        lambda g: lu_invariance(g, samples),
        lambda g: density_ranges(g, samples),
        lambda g: alpha_invariance(g, samples),
        lambda g: dominance_chain(g, samples, cfg),
        lambda g: analytic_agreement(g, few, cfg),
        lambda g: bound_lu_invariance(g, min(samples, 20), cfg),
    ]
    return [suite(np.random.default_rng([seed, k])) for k, suite in enumerate(suites)]
