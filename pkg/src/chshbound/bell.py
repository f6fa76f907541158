"""CHSH Bell operator, its canonical vertical form, and the Tsirelson bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import (
    PAULIS,
    SQRT2,
    dagger,
    expectation,
    frozen,
    herm_eig,
    kron,
)
from .states import DensityMatrix, PureState, as_density

UNIT_TOL = 1e-10
VERTICAL_TOL = 1e-10


class NotUnitVector(ValueError):
    pass


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    def __post_init__(self):
        n = math.sqrt(self.x**2 + self.y**2 + self.z**2)
        if not math.isfinite(n) or abs(n - 1.0) > UNIT_TOL:
            raise NotUnitVector(f"|({self.x}, {self.y}, {self.z})| = {n!r}")

    @classmethod
    def normalized(cls, x: float, y: float, z: float) -> "BlochVector":
        n = math.sqrt(x * x + y * y + z * z)
        return cls(x / n, y / n, z / n)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def dot(self, other: "BlochVector") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z


@dataclass(frozen=True)
class MeasurementSetting:
    a: BlochVector
    a_prime: BlochVector
    b: BlochVector
    b_prime: BlochVector

    def is_vertical(self, tol: float = VERTICAL_TOL) -> bool:
        return abs(self.a.dot(self.a_prime)) <= tol and abs(self.b.dot(self.b_prime)) <= tol


@dataclass(frozen=True)
class BellEigensystem:
    eigenvalues: tuple[float, float, float, float]
    eta1: np.ndarray
    eta2: np.ndarray
    eta3: np.ndarray
    eta4: np.ndarray

    @property
    def vectors(self) -> tuple[np.ndarray, ...]:
        return (self.eta1, self.eta2, self.eta3, self.eta4)


def observable(v: BlochVector) -> np.ndarray:
    """Spin observable v . sigma."""
    if not isinstance(v, BlochVector):
        v = BlochVector(*v)
    sx, sy, sz = PAULIS
    return v.x * sx + v.y * sy + v.z * sz


def canonical_settings() -> MeasurementSetting:
    """A = sz, A' = sx, B = -(sz + sx)/sqrt2, B' = (sx - sz)/sqrt2.

    With this B' the operator reproduces the fixed matrix of ``canonical_W``
    (W = -sqrt2 (sz sz + sx sx)).
    """
    r = 1.0 / SQRT2
    return MeasurementSetting(
        a=BlochVector(0.0, 0.0, 1.0),
        a_prime=BlochVector(1.0, 0.0, 0.0),
        b=BlochVector(-r, 0.0, -r),
        b_prime=BlochVector(r, 0.0, -r),
    )


def bell_operator(s: MeasurementSetting) -> np.ndarray:
    """W = A (B + B') + A' (B - B')."""
    A, Ap = observable(s.a), observable(s.a_prime)
    B, Bp = observable(s.b), observable(s.b_prime)
    return kron(A, B + Bp) + kron(Ap, B - Bp)


_R2 = SQRT2
_CANONICAL_W = frozen(
    [
        [-_R2, 0, 0, -_R2],
        [0, _R2, -_R2, 0],
        [0, -_R2, _R2, 0],
        [-_R2, 0, 0, -_R2],
    ]
)


def canonical_W() -> np.ndarray:
    return _CANONICAL_W


_ETA = tuple(
    frozen(np.array(v, dtype=complex) / SQRT2)
    for v in ([1, 0, 0, 1], [-1, 0, 0, 1], [0, -1, 1, 0], [0, 1, 1, 0])
)


def canonical_eigensystem() -> BellEigensystem:
    """Closed-form eigenpairs of ``canonical_W``: -2sqrt2, 0, 2sqrt2, 0 for eta1..eta4."""
    t = 2 * SQRT2
    return BellEigensystem((-t, 0.0, t, 0.0), *_ETA)


def chsh_value(s: MeasurementSetting, rho: DensityMatrix | PureState) -> float:
    rho = as_density(rho)
    return expectation(bell_operator(s), rho.matrix).real


def commutator_term(s: MeasurementSetting) -> np.ndarray:
    """[A, A'] (x) [B, B']."""
    A, Ap = observable(s.a), observable(s.a_prime)
    B, Bp = observable(s.b), observable(s.b_prime)
    return kron(A @ Ap - Ap @ A, B @ Bp - Bp @ B)


def tsirelson_rhs(s: MeasurementSetting, rho: DensityMatrix | PureState) -> float:
    """sqrt(4 + |<[A,A'] (x) [B,B']>|); lies in [2, 2 sqrt2]."""
    rho = as_density(rho)
    return math.sqrt(4.0 + abs(expectation(commutator_term(s), rho.matrix)))


def _fix_phase(v: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    for z in v:
        if abs(z) > tol:
            return v * (abs(z) / z)
    return v


def max_violating_state(s: MeasurementSetting) -> tuple[PureState, float]:
    """Eigenvector of W with the largest |eigenvalue| and that |eigenvalue|.

    When +w and -w tie, the positive eigenvalue wins. The returned vector has
    its first non-negligible component real and positive.
    """
    pairs = herm_eig(bell_operator(s))
    best_val, best_vec = pairs[-1]
    lowest_val, lowest_vec = pairs[0]
    if abs(lowest_val) > abs(best_val) + 1e-12:
        best_val, best_vec = lowest_val, lowest_vec
    return PureState.normalized(_fix_phase(best_vec)), abs(best_val)


def random_setting(seed) -> MeasurementSetting:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    vecs = []
    for _ in range(4):
        x = rng.standard_normal(3)
        vecs.append(BlochVector.normalized(*x))
    return MeasurementSetting(*vecs)


def random_vertical_setting(seed) -> MeasurementSetting:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    out = []
    for _ in range(2):
        u = rng.standard_normal(3)
        u /= np.linalg.norm(u)
        w = rng.standard_normal(3)
        w -= w.dot(u) * u
        w /= np.linalg.norm(w)
        out += [BlochVector(*u), BlochVector(*w)]
    return MeasurementSetting(*out)


def conjugate_operator(w, u) -> np.ndarray:
    """``u^dagger w u``."""
    return dagger(u) @ np.asarray(w, dtype=complex) @ np.asarray(u, dtype=complex)
