"""Entanglement quantifiers for two-qubit states."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import PAULIS, SIGMA_Y, eigvalsh, jacobi_eigh, kron
from .states import DensityMatrix, PureState, as_density

_YY = kron(SIGMA_Y, SIGMA_Y)


@dataclass(frozen=True)
class EntanglementReport:
    entropy: float
    concurrence: float
    horodecki_M: float
    horodecki_max: float
    purity: float


def partial_trace_b(rho: DensityMatrix | PureState) -> np.ndarray:
    """Reduced state of qubit a."""
    m = as_density(rho).matrix.reshape(2, 2, 2, 2)
    return np.einsum("ijkj->ik", m)


def von_neumann_entropy(rho: DensityMatrix | PureState) -> float:
    """Entropy (bits) of the reduced state of qubit a."""
    probs = eigvalsh(partial_trace_b(rho))
    h = 0.0
    for p in probs:
        if p > 0.0:
            h -= p * math.log2(p)
    return min(max(h, 0.0), 1.0)


def binary_entropy(p: float) -> float:
    return -sum(x * math.log2(x) for x in (p, 1.0 - p) if x > 0.0)


def concurrence(rho: DensityMatrix | PureState) -> float:
    """Wootters concurrence max(0, r1 - r2 - r3 - r4).

    r_i are the square roots of the eigenvalues of rho (sy sy) rho* (sy sy).
    With rho = X X^dagger they equal the singular values of
    tau = X^T (sy sy) X, which are read off as the non-negative eigenvalues of
    the Hermitian dilation [[0, tau], [tau^dagger, 0]]. Taking square roots of
    rounding-level eigenvalues would cost ~1e-8 on rank-deficient states.
    """
    m = as_density(rho).matrix
    x = decomposition_factor(m)
    tau = x.T @ _YY @ x
    dilation = np.zeros((8, 8), dtype=complex)
    dilation[:4, 4:] = tau
    dilation[4:, :4] = tau.conj().T
    r = eigvalsh(dilation)[4:][::-1]
    r = np.clip(r, 0.0, None)
    return float(min(max(r[0] - r[1] - r[2] - r[3], 0.0), 1.0))


def decomposition_factor(m) -> np.ndarray:
    """X with X X^dagger = m, columns are eigenvectors scaled by sqrt(eigenvalue)."""
    values, vectors = jacobi_eigh(m)
    return vectors * np.sqrt(np.clip(values, 0.0, None))


def correlation_matrix(rho: DensityMatrix | PureState) -> np.ndarray:
    """T[i, j] = Tr(rho sigma_i (x) sigma_j), Pauli order (x, y, z)."""
    m = as_density(rho).matrix
    t = np.empty((3, 3))
    for i, si in enumerate(PAULIS):
        for j, sj in enumerate(PAULIS):
            t[i, j] = np.real(np.sum(kron(si, sj) * m.T))
    return t


def horodecki_M(rho: DensityMatrix | PureState) -> float:
    """Sum of the two largest eigenvalues of T^T T."""
    t = correlation_matrix(rho)
    ev = eigvalsh(t.T @ t)
    return float(max(ev[1], 0.0) + max(ev[2], 0.0))


def horodecki_max(rho: DensityMatrix | PureState) -> float:
    """Largest CHSH value over all (not only vertical) settings: 2 sqrt(M)."""
    return 2.0 * math.sqrt(horodecki_M(rho))


def entanglement_report(rho: DensityMatrix | PureState) -> EntanglementReport:
    d = as_density(rho)
    m = horodecki_M(d)
    return EntanglementReport(
        entropy=von_neumann_entropy(d),
        concurrence=concurrence(d),
        horodecki_M=m,
        horodecki_max=2.0 * math.sqrt(m),
        purity=d.purity,
    )
