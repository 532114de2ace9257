"""Dense complex linear algebra and reproducible randomness.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  The eigensolver
is a cyclic Jacobi method written out here rather than delegated to LAPACK:
it converges unconditionally on Hermitian input, and its stopping rule is
part of the contract (off-diagonal Frobenius norm below ``1e-13`` of the
input norm).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numba import njit

from .exceptions import ConvergenceError, ValidationError

HERMITIAN_RTOL = 1e-12
JACOBI_RTOL = 1e-13
JACOBI_MAX_SWEEPS = 100

_MASK64 = (1 << 64) - 1


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Return ``m`` as a 2-D complex128 array, or raise ValidationError."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise ValidationError(f"{name}: expected a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name}: entries must be finite")
    return a


def hermitian_defect(m: np.ndarray) -> float:
    """``max|M - M^dagger|`` relative to ``max|M|`` (0 for the zero matrix)."""
    scale = float(np.max(np.abs(m))) if m.size else 0.0
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(m - m.conj().T))) / scale


def check_hermitian(m, name: str = "matrix") -> np.ndarray:
    """Validate squareness and Hermiticity; return the symmetrized matrix."""
    a = as_matrix(m, name)
    if a.shape[0] != a.shape[1]:
        raise ValidationError(f"{name}: square check failed, shape {a.shape}")
    defect = hermitian_defect(a)
    if defect > HERMITIAN_RTOL:
        raise ValidationError(
            f"{name}: Hermitian check failed, relative defect {defect:.3e} > {HERMITIAN_RTOL:g}"
        )
    return 0.5 * (a + a.conj().T)


@dataclass(frozen=True)
class Spectrum:
    """Eigen-decomposition ``M = U diag(eigenvalues) U^dagger``.

    ``eigenvalues`` are ascending; ``eigenvectors`` holds orthonormal columns.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T


@njit(cache=True)
def _jacobi_sweeps(a, v, target, max_sweeps):  # pragma: no cover - compiled
    # Cyclic-by-row Jacobi on a Hermitian matrix, in place.  Returns the number
    # of sweeps, or -1 if max_sweeps is exhausted.
    n = a.shape[0]
    sweeps = 0
    while True:
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off += a[i, j].real ** 2 + a[i, j].imag ** 2
        if math.sqrt(off) <= target:
            return sweeps
        if sweeps >= max_sweeps:
            return -1
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = a[p, q]
                absb = abs(b)
                if absb == 0.0:
                    continue
                ph = b / absb
                tau = (a[q, q].real - a[p, p].real) / (2.0 * absb)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.hypot(1.0, tau))
                else:
                    t = -1.0 / (-tau + math.hypot(1.0, tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # G on (p, q) is [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
                sq = -s * ph.conjugate()
                cq = c * ph.conjugate()
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = akp * c + akq * sq
                    a[k, q] = akp * s + akq * cq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk + sq.conjugate() * aqk
                    a[q, k] = s * apk + cq.conjugate() * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = vkp * c + vkq * sq
                    v[k, q] = vkp * s + vkq * cq
        sweeps += 1


def hermitian_eigen(m, max_sweeps: int = JACOBI_MAX_SWEEPS) -> Spectrum:
    """Eigen-decompose a Hermitian matrix by cyclic Jacobi rotations.

    Pivots ``(p, q)`` are visited row by row; each complex Givens rotation
    zeroes one off-diagonal pair.  Iteration stops when the off-diagonal
    Frobenius norm is at most ``1e-13 * ||m||_F``.

    Raises
    ------
    ValidationError
        If ``m`` is not square or not Hermitian to 1e-12 relative.
    ConvergenceError
        If ``max_sweeps`` sweeps do not reach the tolerance.
    """
    a = np.ascontiguousarray(check_hermitian(m))
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    target = JACOBI_RTOL * float(np.linalg.norm(a))
    sweeps = _jacobi_sweeps(a, v, target, max_sweeps)
    if sweeps < 0:
        off = a.copy()
        np.fill_diagonal(off, 0.0)
        raise ConvergenceError(
            f"Jacobi eigensolver did not converge in {max_sweeps} sweeps "
            f"(off-diagonal norm {np.linalg.norm(off):.3e}, target {target:.3e})"
        )
    w = a.diagonal().real.copy()
    order = np.argsort(w, kind="stable")
    return Spectrum(eigenvalues=w[order], eigenvectors=v[:, order], sweeps=sweeps)


def kron(a, b) -> np.ndarray:
    """Kronecker product, ``(a (x) b)[i*rb + k, j*cb + l] = a[i, j] * b[k, l]``."""
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    ra, ca = a.shape
    rb, cb = b.shape
    return (a[:, None, :, None] * b[None, :, None, :]).reshape(ra * rb, ca * cb)


def partial_trace(m, dims: Sequence[int], keep: int | Sequence[int]) -> np.ndarray:
    """Trace out every tensor factor except ``keep``.

    ``dims`` lists the factor dimensions in Kronecker order; their product
    must equal the matrix dimension.  ``keep`` is one factor index or an
    increasing sequence of them.
    """
    a = as_matrix(m)
    dims = [int(d) for d in dims]
    if not dims or any(d < 1 for d in dims):
        raise ValidationError(f"partial_trace: invalid factor dims {dims}")
    total = math.prod(dims)
    if a.shape != (total, total):
        raise ValidationError(
            f"partial_trace: dimension check failed, dims {dims} (product {total}) "
            f"vs matrix shape {a.shape}"
        )
    kept = [keep] if isinstance(keep, (int, np.integer)) else list(keep)
    k = len(dims)
    if not kept or any(not 0 <= i < k for i in kept) or sorted(set(kept)) != kept:
        raise ValidationError(f"partial_trace: keep {keep!r} invalid for {k} factors")
    if 2 * k > 52:
        raise ValidationError("partial_trace: too many factors")
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    rows = list(letters[:k])
    cols = list(letters[k : 2 * k])
    for i in range(k):
        if i not in kept:
            cols[i] = rows[i]
    out = "".join(rows[i] for i in kept) + "".join(cols[i] for i in kept)
    d = math.prod(dims[i] for i in kept)
    return np.einsum("".join(rows) + "".join(cols) + "->" + out, a.reshape(dims + dims)).reshape(d, d)


def _dft_rows(v: np.ndarray, sign: int, chunk: int = 512) -> np.ndarray:
    n = v.shape[0]
    j = np.arange(n)
    out = np.empty(n, dtype=np.complex128)
    for start in range(0, n, chunk):
        k = np.arange(start, min(start + chunk, n))
        # (j*k) mod n keeps the twiddle argument small and exact
        phase = (np.outer(k, j) % n) * (sign * 2.0 * np.pi / n)
        out[k] = np.exp(1j * phase) @ v
    return out / math.sqrt(n)


def dft(v, sign: int = -1) -> np.ndarray:
    """Unitary discrete Fourier transform, ``X_k = N^-1/2 sum_j v_j exp(sign 2 pi i jk/N)``.

    Naive O(N^2) evaluation.  ``sign=-1`` is the forward direction and
    ``sign=+1`` its inverse.
    """
    if sign not in (-1, 1):
        raise ValidationError(f"dft: sign must be +1 or -1, got {sign}")
    x = np.asarray(v, dtype=np.complex128).ravel()
    if x.size == 0:
        raise ValidationError("dft: input must be nonempty")
    return _dft_rows(x, sign)


class Rng:
    """SplitMix64 generator.

    The algorithm is fixed so that a seed printed in a fuzz report reproduces
    the failing input on any platform.
    """

    GOLDEN = 0x9E3779B97F4A7C15

    def __init__(self, seed: int = 0):
        self.seed = int(seed) & _MASK64
        self.state = self.seed

    def __repr__(self):
        return f"Rng(seed={self.seed}, state={self.state})"

    def next_u64(self) -> int:
        self.state = (self.state + self.GOLDEN) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniforms(self, n: int) -> np.ndarray:
        return np.array([self.uniform() for _ in range(n)], dtype=float)

    def integer(self, n: int) -> int:
        """Integer in ``range(n)``."""
        if n < 1:
            raise ValidationError(f"integer: n must be positive, got {n}")
        return int(self.uniform() * n)

    def normals(self, n: int) -> np.ndarray:
        out = np.empty(n, dtype=float)
        for i in range(0, n, 2):
            z0, z1 = gauss_pair(self)
            out[i] = z0
            if i + 1 < n:
                out[i + 1] = z1
        return out

    def spawn(self) -> "Rng":
        """Independent child generator seeded from this stream."""
        return Rng(self.next_u64())


def trial_seed(seed: int, trial: int) -> int:
    """Seed for trial ``trial`` of a fuzz run started from ``seed``.

    Each trial is reproducible on its own, without replaying earlier trials.
    """
    r = Rng((int(seed) ^ ((int(trial) + 1) * 0xD1B54A32D192ED03)) & _MASK64)
    return r.next_u64()


def gauss_pair(rng: Rng) -> tuple[float, float]:
    """Two independent standard normals by the Box-Muller transform."""
    u1 = 1.0 - rng.uniform()  # (0, 1], keeps log finite
    u2 = rng.uniform()
    r = math.sqrt(-2.0 * math.log(u1))
    theta = 2.0 * math.pi * u2
    return r * math.cos(theta), r * math.sin(theta)


def complex_gaussian(rows: int, cols: int, rng: Rng) -> np.ndarray:
    """Matrix of i.i.d. standard complex normals (unit variance per entry)."""
    z = rng.normals(2 * rows * cols).reshape(2, rows, cols)
    return (z[0] + 1j * z[1]) / math.sqrt(2.0)
