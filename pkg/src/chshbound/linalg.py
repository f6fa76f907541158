"""Small complex linear algebra for two-qubit work (dimensions 2 and 4).

Matrices and vectors are plain ``numpy`` complex arrays. The Hermitian
eigensolver is a cyclic Jacobi iteration, which is exact enough and fast
enough at these sizes that nothing heavier is needed.
"""

from __future__ import annotations

import math

import numpy as np

HERMITICITY_TOL = 1e-10
EIG_RESIDUAL_TOL = 1e-9
JACOBI_OFFDIAG_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100

SQRT2 = math.sqrt(2.0)
TSIRELSON = 2.0 * SQRT2

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)

for _m in (I2, I4, SIGMA_X, SIGMA_Y, SIGMA_Z):
    _m.setflags(write=False)


class NotHermitian(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


def as_matrix(m, dim: int | None = None) -> np.ndarray:
    """Coerce to a finite, square complex matrix, optionally of a fixed size."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    if dim is not None and a.shape[0] != dim:
        raise DimensionMismatch(f"expected {dim}x{dim}, got {a.shape[0]}x{a.shape[1]}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def kron(a, b) -> np.ndarray:
    """Kronecker product; ``kron(a, b)[2i+k, 2j+l] == a[i, j] * b[k, l]`` for 2x2 factors."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return np.kron(a, b)


def dagger(m) -> np.ndarray:
    return np.asarray(m, dtype=complex).conj().T


def mat_mul(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape[-1] != b.shape[0]:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def mat_apply(m, v) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1 or m.shape[-1] != v.shape[0]:
        raise DimensionMismatch(f"cannot apply {m.shape} to vector of shape {v.shape}")
    return m @ v


def trace(m) -> complex:
    m = as_matrix(m)
    return complex(np.trace(m))


def expectation(m, rho) -> complex:
    """``Tr(m @ rho)``."""
    m = as_matrix(m)
    rho = as_matrix(rho)
    if m.shape != rho.shape:
        raise DimensionMismatch(f"operator {m.shape} and state {rho.shape} differ in size")
    # Tr(AB) = sum_ij A_ij B_ji
    return complex(np.sum(m * rho.T))


def hermiticity_error(m) -> float:
    m = np.asarray(m, dtype=complex)
    return float(np.max(np.abs(m - m.conj().T)))


def _offdiag_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(np.abs(off) ** 2)))


def jacobi_eigh(m) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic complex Jacobi diagonalisation of a Hermitian matrix.

    Returns ``(values, vectors)`` with eigenvalues ascending and eigenvectors
    in the columns of ``vectors``. Each rotation first removes the phase of
    the pivot ``a[p, q]`` and then applies the real symmetric Jacobi rotation
    that zeroes it.
    """
    a = as_matrix(m)
    err = hermiticity_error(a)
    if err > HERMITICITY_TOL:
        raise NotHermitian(f"max |m - m^dagger| = {err:.3e} exceeds {HERMITICITY_TOL:g}")
    n = a.shape[0]
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.sqrt(np.sum(np.abs(a) ** 2))))

    for _ in range(JACOBI_MAX_SWEEPS):
        if _offdiag_norm(a) < JACOBI_OFFDIAG_TOL * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                phase = apq / mag
                app = a[p, p].real
                aqq = a[q, q].real
                theta = 0.5 * math.atan2(2.0 * mag, aqq - app)
                c = math.cos(theta)
                s = math.sin(theta)
                # G = diag(1, conj(phase)) @ [[c, s], [-s, c]] on the (p, q) plane
                g_pp = c
                g_pq = s
                g_qp = -s * phase.conjugate()
                g_qq = c * phase.conjugate()
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = col_p * g_pp + col_q * g_qp
                a[:, q] = col_p * g_pq + col_q * g_qq
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = np.conj(g_pp) * row_p + np.conj(g_qp) * row_q
                a[q, :] = np.conj(g_pq) * row_p + np.conj(g_qq) * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = vp * g_pp + vq * g_qp
                v[:, q] = vp * g_pq + vq * g_qq
    else:
        raise RuntimeError("Jacobi iteration did not converge")

    values = np.real(np.diag(a)).copy()
    order = np.argsort(values, kind="stable")
    return values[order], v[:, order]


def herm_eig(m) -> list[tuple[float, np.ndarray]]:
    """Eigenpairs of a Hermitian matrix as ``[(value, vector), ...]``, ascending."""
    values, vectors = jacobi_eigh(m)
    return [(float(values[k]), vectors[:, k].copy()) for k in range(len(values))]


def eigvalsh(m) -> np.ndarray:
    return jacobi_eigh(m)[0]


def psd_sqrt(m) -> np.ndarray:
    """Square root of a positive semidefinite matrix; rounding negatives are floored at 0."""
    values, vectors = jacobi_eigh(m)
    roots = np.sqrt(np.clip(values, 0.0, None))
    return (vectors * roots) @ vectors.conj().T


def projector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())
