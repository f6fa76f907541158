"""Two-qubit pure and mixed states.

Basis order is |00>, |01>, |10>, |11> with qubit a as the first tensor factor.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .linalg import (
    HERMITICITY_TOL,
    as_matrix,
    eigvalsh,
    frozen,
    hermiticity_error,
    jacobi_eigh,
    kron,
    projector,
)

NORM_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_FLOOR = -1e-10
PURITY_TOL = 1e-9


class InvalidState(ValueError):
    """A state failed validation; ``invariant`` names the check that failed."""

    def __init__(self, invariant: str, detail: str):
        super().__init__(f"{invariant}: {detail}")
        self.invariant = invariant


class LambdaOutOfRange(InvalidState):
    def __init__(self, lam: float):
        super().__init__("lambda-range", f"lambda={lam!r} outside [0, 4]")


@dataclass(frozen=True)
class PureState:
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex)
        if a.shape != (4,):
            raise InvalidState("shape", f"pure state needs 4 amplitudes, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InvalidState("finite", "amplitudes contain NaN or Inf")
        norm2 = float(np.sum(np.abs(a) ** 2))
        if abs(norm2 - 1.0) > NORM_TOL:
            raise InvalidState("normalization", f"|psi|^2 = {norm2!r}, expected 1")
        object.__setattr__(self, "amplitudes", frozen(a))

    @classmethod
    def normalized(cls, amplitudes) -> "PureState":
        a = np.asarray(amplitudes, dtype=complex)
        return cls(a / np.linalg.norm(a))

    def as_matrix(self) -> np.ndarray:
        """The 2x2 amplitude grid psi[i, j] for |i>_a |j>_b."""
        return self.amplitudes.reshape(2, 2)


@dataclass(frozen=True)
class SchmidtForm:
    theta: float
    chi: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.theta <= math.pi):
            raise InvalidState("theta-range", f"theta={self.theta!r} outside [0, pi]")
        if not math.isfinite(self.chi):
            raise InvalidState("finite", "chi is not finite")
        object.__setattr__(self, "chi", self.chi % (2 * math.pi))


@dataclass(frozen=True)
class DensityMatrix:
    matrix: np.ndarray

    def __post_init__(self):
        try:
            m = as_matrix(self.matrix, 4)
        except ValueError as exc:
            raise InvalidState("shape", str(exc)) from None
        herr = hermiticity_error(m)
        if herr > HERMITICITY_TOL:
            raise InvalidState("hermitian", f"max |rho - rho^dagger| = {herr:.3e}")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidState("trace", f"Tr(rho) = {tr!r}, expected 1")
        lowest = float(eigvalsh(m)[0])
        if lowest < PSD_FLOOR:
            raise InvalidState("positive-semidefinite", f"smallest eigenvalue {lowest:.3e}")
        object.__setattr__(self, "matrix", frozen(m))

    @property
    def purity(self) -> float:
        return float(np.real(np.sum(self.matrix * self.matrix.T)))

    def is_pure(self) -> bool:
        return self.purity > 1.0 - PURITY_TOL

    def dominant_vector(self) -> PureState:
        """Eigenvector of the largest eigenvalue; the state itself when rho is pure."""
        _, vectors = jacobi_eigh(self.matrix)
        return PureState.normalized(vectors[:, -1])

    def conjugated(self, u) -> "DensityMatrix":
        """``u @ rho @ u^dagger``."""
        u = np.asarray(u, dtype=complex)
        return DensityMatrix(u @ self.matrix @ u.conj().T)


@dataclass(frozen=True)
class LambdaFamily:
    lam: float

    def __post_init__(self):
        if not (0.0 <= self.lam <= 4.0):
            raise LambdaOutOfRange(self.lam)


def schmidt_to_pure(s: SchmidtForm) -> PureState:
    """cos(theta/2)|01> + e^{i chi} sin(theta/2)|10>."""
    return PureState(
        np.array(
            [0.0, math.cos(s.theta / 2), np.exp(1j * s.chi) * math.sin(s.theta / 2), 0.0],
            dtype=complex,
        )
    )


def schmidt_angle(p: PureState) -> SchmidtForm:
    """Canonical Schmidt angle theta in [0, pi/2] (chi is always 0 on output).

    sin(theta) = 2|det psi| and cos(theta) = difference of the squared Schmidt
    coefficients, so atan2 stays well conditioned at both ends of the range.
    """
    psi = p.as_matrix()
    det = psi[0, 0] * psi[1, 1] - psi[0, 1] * psi[1, 0]
    probs = eigvalsh(psi.conj().T @ psi)
    theta = math.atan2(2.0 * abs(det), max(float(probs[1] - probs[0]), 0.0))
    return SchmidtForm(min(theta, math.pi / 2), 0.0)


def lambda_state(f: LambdaFamily | float) -> DensityMatrix:
    if not isinstance(f, LambdaFamily):
        f = LambdaFamily(float(f))
    lam = f.lam
    m = np.array(
        [[1, 0, 0, 0], [0, 4, lam, 0], [0, lam, 4, 0], [0, 0, 0, 0]], dtype=complex
    ) / 9.0
    return DensityMatrix(m)


def pure_to_density(p: PureState) -> DensityMatrix:
    return DensityMatrix(projector(p.amplitudes))


def maximally_mixed() -> DensityMatrix:
    return DensityMatrix(np.eye(4, dtype=complex) / 4)


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_pure(seed) -> PureState:
    """Haar-random pure state from 8 standard normal components."""
    x = _rng(seed).standard_normal(8)
    return PureState.normalized(x[:4] + 1j * x[4:])


def random_density(seed) -> DensityMatrix:
    """``G G^dagger / Tr(G G^dagger)`` with G a complex Ginibre 4x4 matrix."""
    rng = _rng(seed)
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    m = g @ g.conj().T
    m = 0.5 * (m + m.conj().T)
    return DensityMatrix(m / np.trace(m).real)


def random_qubit(seed) -> np.ndarray:
    x = _rng(seed).standard_normal(4)
    v = x[:2] + 1j * x[2:]
    return v / np.linalg.norm(v)


def random_product_state(seed) -> PureState:
    rng = _rng(seed)
    return PureState.normalized(kron(random_qubit(rng)[:, None], random_qubit(rng)[:, None])[:, 0])


def random_separable(seed, max_terms: int = 4) -> DensityMatrix:
    """Convex mixture of 1..max_terms random product states with Dirichlet weights."""
    rng = _rng(seed)
    k = int(rng.integers(1, max_terms + 1))
    weights = rng.dirichlet(np.ones(k))
    m = np.zeros((4, 4), dtype=complex)
    for w in weights:
        m += w * projector(random_product_state(rng).amplitudes)
    return DensityMatrix(0.5 * (m + m.conj().T))


# --- JSON state files -------------------------------------------------------


def _parse_complex(entry, where: str) -> complex:
    if isinstance(entry, (int, float)) and not isinstance(entry, bool):
        return complex(float(entry), 0.0)
    if (
        isinstance(entry, (list, tuple))
        and len(entry) == 2
        and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in entry)
    ):
        return complex(float(entry[0]), float(entry[1]))
    raise InvalidState("format", f"{where}: expected [re, im], got {entry!r}")


def state_from_dict(doc) -> PureState | DensityMatrix:
    """Build a state from ``{"kind": "pure"|"density", "data": [...]}``.

    Complex entries are ``[re, im]`` pairs. Density data may be a flat
    row-major list of 16 entries or a 4x4 nested list.
    """
    if not isinstance(doc, dict):
        raise InvalidState("format", "state document must be a JSON object")
    kind = doc.get("kind")
    data = doc.get("data")
    if kind not in ("pure", "density"):
        raise InvalidState("format", f'"kind" must be "pure" or "density", got {kind!r}')
    if not isinstance(data, list):
        raise InvalidState("format", '"data" must be a list')
    if kind == "pure":
        if len(data) != 4:
            raise InvalidState("shape", f"pure state needs 4 amplitudes, got {len(data)}")
        return PureState(np.array([_parse_complex(x, f"data[{i}]") for i, x in enumerate(data)]))
    if len(data) == 4 and all(isinstance(row, list) and len(row) == 4 for row in data):
        flat = [x for row in data for x in row]
    else:
        flat = data
    if len(flat) != 16:
        raise InvalidState("shape", f"density matrix needs 16 entries, got {len(flat)}")
    vals = [_parse_complex(x, f"data[{i}]") for i, x in enumerate(flat)]
    return DensityMatrix(np.array(vals, dtype=complex).reshape(4, 4))


def state_to_dict(state: PureState | DensityMatrix) -> dict:
    if isinstance(state, PureState):
        return {"kind": "pure", "data": [[z.real, z.imag] for z in state.amplitudes.tolist()]}
    flat = state.matrix.reshape(-1).tolist()
    return {"kind": "density", "data": [[z.real, z.imag] for z in flat]}


def load_state(path) -> PureState | DensityMatrix:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidState("json", f"{path}: {exc}") from None
    return state_from_dict(doc)


def save_state(state: PureState | DensityMatrix, path) -> None:
    Path(path).write_text(json.dumps(state_to_dict(state)) + "\n")


def as_density(state: PureState | DensityMatrix) -> DensityMatrix:
    return pure_to_density(state) if isinstance(state, PureState) else state
