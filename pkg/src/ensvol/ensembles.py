"""Classical, quantum, Gaussian and signal ensembles.

Every ensemble is immutable and carries its subsystem ("factor") structure
explicitly, together with an optional space label per factor used to look up
the volume constant K.  Operations return new ensembles.

Phase-space coordinates of a Gaussian ensemble are ordered mode by mode,
``(x_1, p_1, x_2, p_2, ...)``, so that the product of two Gaussians has a
block-diagonal covariance and concatenated mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .exceptions import UnsupportedOperationError, ValidationError
from .numerics import (
    Rng,
    Spectrum,
    as_matrix,
    check_hermitian,
    complex_gaussian,
    hermitian_eigen,
    kron,
    partial_trace,
)

CLIP_PROB = 1e-14
NORM_TOL = 1e-10
EIG_TOL = 1e-10
UNITARY_TOL = 1e-10
SYMPLECTIC_TOL = 1e-10


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def _spaces(spaces, nfactors: int, where: str) -> tuple:
    if spaces is None:
        return (None,) * nfactors
    spaces = tuple(spaces)
    if len(spaces) != nfactors:
        raise ValidationError(f"{where}: {len(spaces)} space labels for {nfactors} factors")
    return spaces


def _keep_list(keep, nfactors: int, where: str) -> list[int]:
    kept = [keep] if isinstance(keep, (int, np.integer)) else list(keep)
    if not kept or any(not 0 <= int(i) < nfactors for i in kept) or sorted(set(kept)) != kept:
        raise ValidationError(f"{where}: subsystem index {keep!r} invalid for {nfactors} factors")
    return [int(i) for i in kept]


@dataclass(frozen=True, eq=False)
class ClassicalDistribution:
    """Probability tensor over a product of finite discrete axes.

    Each axis is one factor.  Entries in ``[-1e-14, 0)`` are treated as
    roundoff, clipped to zero and the tensor renormalized; anything more
    negative is rejected.
    """

    probabilities: np.ndarray
    spaces: tuple = None
    kind = "classical"

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if p.ndim == 0 or p.size == 0:
            raise ValidationError("classical: probability tensor must have at least one axis and one entry")
        if not np.all(np.isfinite(p)):
            raise ValidationError("classical: probabilities must be finite")
        if p.min() < -CLIP_PROB:
            raise ValidationError(f"classical: nonnegativity check failed, min entry {p.min():.3e}")
        total = p.sum()
        if abs(total - 1.0) > NORM_TOL:
            raise ValidationError(f"classical: normalization check failed, sum {float(total)!r} (must be 1 within 1e-10)")
        if p.min() < 0.0:
            p = np.clip(p, 0.0, None)
            p = p / p.sum()
        object.__setattr__(self, "probabilities", _frozen(p))
        object.__setattr__(self, "spaces", _spaces(self.spaces, p.ndim, "classical"))

    @property
    def axes(self) -> tuple:
        return self.probabilities.shape

    @property
    def nfactors(self) -> int:
        return self.probabilities.ndim

    @property
    def shape_key(self) -> tuple:
        return ("classical", self.axes)

    def weights(self) -> np.ndarray:
        """Flat probability vector (the 'spectrum' of a classical ensemble)."""
        return self.probabilities.ravel()

    @classmethod
    def uniform(cls, *axes: int, spaces=None) -> "ClassicalDistribution":
        n = math.prod(axes)
        return cls(np.full(axes, 1.0 / n), spaces)

    @classmethod
    def point(cls, index, axes, spaces=None) -> "ClassicalDistribution":
        p = np.zeros(axes)
        p[index] = 1.0
        return cls(p, spaces)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian, positive semidefinite, unit-trace matrix with factor structure."""

    matrix: np.ndarray
    factor_dims: tuple = None
    spaces: tuple = None
    _spectrum: Spectrum = field(init=False, repr=False, default=None)
    kind = "quantum"

    def __post_init__(self):
        m = check_hermitian(self.matrix, "quantum")
        dims = (m.shape[0],) if self.factor_dims is None else tuple(int(d) for d in self.factor_dims)
        if any(d < 1 for d in dims) or math.prod(dims) != m.shape[0]:
            raise ValidationError(f"quantum: factor dims {dims} do not multiply to dimension {m.shape[0]}")
        tr = np.trace(m).real
        if abs(tr - 1.0) > NORM_TOL:
            raise ValidationError(f"quantum: unit-trace check failed, trace {tr!r}")
        spec = hermitian_eigen(m)
        if spec.eigenvalues[0] < -EIG_TOL:
            raise ValidationError(
                f"quantum: positivity check failed, smallest eigenvalue {spec.eigenvalues[0]:.3e}"
            )
        object.__setattr__(self, "matrix", _frozen(m))
        object.__setattr__(self, "factor_dims", dims)
        object.__setattr__(self, "spaces", _spaces(self.spaces, len(dims), "quantum"))
        object.__setattr__(self, "_spectrum", spec)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def nfactors(self) -> int:
        return len(self.factor_dims)

    @property
    def shape_key(self) -> tuple:
        return ("quantum", self.factor_dims)

    @property
    def spectrum(self) -> Spectrum:
        return self._spectrum

    def weights(self) -> np.ndarray:
        """Eigenvalues, with roundoff negatives in ``[-1e-10, 0)`` clipped to zero."""
        return np.clip(self._spectrum.eigenvalues, 0.0, None)

    @classmethod
    def pure(cls, vector, factor_dims=None, spaces=None) -> "DensityOperator":
        v = np.asarray(vector, dtype=np.complex128).ravel()
        nrm = np.linalg.norm(v)
        if nrm == 0.0:
            raise ValidationError("quantum: zero state vector")
        v = v / nrm
        return cls(np.outer(v, v.conj()), factor_dims, spaces)

    @classmethod
    def maximally_mixed(cls, dim: int, factor_dims=None, spaces=None) -> "DensityOperator":
        return cls(np.eye(dim) / dim, factor_dims, spaces)

    @classmethod
    def basis(cls, index: int, dim: int, factor_dims=None, spaces=None) -> "DensityOperator":
        v = np.zeros(dim)
        v[index] = 1.0
        return cls.pure(v, factor_dims, spaces)


@dataclass(frozen=True, eq=False)
class GaussianEnsemble:
    """Gaussian density on a 2n-dimensional phase space ``(x_1, p_1, ...)``."""

    mean: np.ndarray
    covariance: np.ndarray
    factor_dofs: tuple = None
    spaces: tuple = None
    kind = "gaussian"

    def __post_init__(self):
        cov = np.asarray(self.covariance, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2 or cov.shape[0] == 0:
            raise ValidationError(f"gaussian: covariance must be 2n x 2n, got shape {cov.shape}")
        if not np.all(np.isfinite(cov)):
            raise ValidationError("gaussian: covariance entries must be finite")
        scale = np.abs(cov).max()
        if np.abs(cov - cov.T).max() > 1e-12 * scale:
            raise ValidationError("gaussian: covariance symmetry check failed")
        cov = 0.5 * (cov + cov.T)
        w = hermitian_eigen(cov).eigenvalues
        if w[0] <= 0.0:
            raise ValidationError(
                f"gaussian: positive-definiteness check failed, smallest eigenvalue {w[0]:.3e}"
            )
        dof = cov.shape[0] // 2
        mean = np.zeros(2 * dof) if self.mean is None else np.asarray(self.mean, dtype=float).ravel()
        if mean.shape != (2 * dof,) or not np.all(np.isfinite(mean)):
            raise ValidationError(f"gaussian: mean must hold {2 * dof} finite reals")
        dofs = (dof,) if self.factor_dofs is None else tuple(int(d) for d in self.factor_dofs)
        if any(d < 1 for d in dofs) or sum(dofs) != dof:
            raise ValidationError(f"gaussian: factor dofs {dofs} do not sum to {dof}")
        object.__setattr__(self, "mean", _frozen(mean))
        object.__setattr__(self, "covariance", _frozen(cov))
        object.__setattr__(self, "factor_dofs", dofs)
        object.__setattr__(self, "spaces", _spaces(self.spaces, len(dofs), "gaussian"))
        object.__setattr__(self, "_cov_eigenvalues", _frozen(w))

    @property
    def dof(self) -> int:
        return self.covariance.shape[0] // 2

    @property
    def nfactors(self) -> int:
        return len(self.factor_dofs)

    @property
    def shape_key(self) -> tuple:
        return ("gaussian", self.factor_dofs)

    @property
    def covariance_eigenvalues(self) -> np.ndarray:
        return self._cov_eigenvalues

    @classmethod
    def isotropic(cls, variance: float = 1.0, dof: int = 1, spaces=None) -> "GaussianEnsemble":
        return cls(np.zeros(2 * dof), variance * np.eye(2 * dof), spaces=spaces)


Ensemble = Union[ClassicalDistribution, DensityOperator, GaussianEnsemble]


@dataclass(frozen=True, eq=False)
class SignalEnsemble:
    """A channel alphabet: states of one kind and shape, with prior probabilities."""

    states: tuple
    priors: np.ndarray

    def __post_init__(self):
        states = tuple(self.states)
        if not states:
            raise ValidationError("signal: state list must be nonempty")
        key = states[0].shape_key
        for i, s in enumerate(states):
            if not isinstance(s, (ClassicalDistribution, DensityOperator, GaussianEnsemble)):
                raise ValidationError(f"signal: state {i} is not an ensemble")
            if s.shape_key != key:
                raise ValidationError(f"signal: state {i} has kind/shape {s.shape_key}, expected {key}")
        priors = check_priors(self.priors, "signal")
        if priors.size != len(states):
            raise ValidationError(f"signal: {priors.size} priors for {len(states)} states")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "priors", _frozen(priors))

    @property
    def kind(self) -> str:
        return self.states[0].kind

    def __len__(self):
        return len(self.states)


def check_priors(priors, where: str = "priors") -> np.ndarray:
    p = np.asarray(priors, dtype=float).ravel()
    if p.size == 0 or not np.all(np.isfinite(p)):
        raise ValidationError(f"{where}: priors must be a nonempty list of finite reals")
    if p.min() < -CLIP_PROB:
        raise ValidationError(f"{where}: prior nonnegativity check failed, min {p.min():.3e}")
    if abs(p.sum() - 1.0) > NORM_TOL:
        raise ValidationError(f"{where}: prior normalization check failed, sum {float(p.sum())!r} (must be 1 within 1e-10)")
    if p.min() < 0.0:
        p = np.clip(p, 0.0, None)
        p = p / p.sum()
    return p


def _same_kind(e1, e2, where: str):
    if type(e1) is not type(e2):
        raise ValidationError(f"{where}: kind mismatch ({e1.kind} vs {e2.kind})")


# -- composition and reduction ----------------------------------------------


def product(e1: Ensemble, e2: Ensemble) -> Ensemble:
    """Uncorrelated joint ensemble; factor lists are concatenated."""
    _same_kind(e1, e2, "product")
    spaces = e1.spaces + e2.spaces
    if isinstance(e1, ClassicalDistribution):
        return ClassicalDistribution(np.multiply.outer(e1.probabilities, e2.probabilities), spaces)
    if isinstance(e1, DensityOperator):
        return DensityOperator(kron(e1.matrix, e2.matrix), e1.factor_dims + e2.factor_dims, spaces)
    n1, n2 = 2 * e1.dof, 2 * e2.dof
    cov = np.zeros((n1 + n2, n1 + n2))
    cov[:n1, :n1] = e1.covariance
    cov[n1:, n1:] = e2.covariance
    return GaussianEnsemble(
        np.concatenate([e1.mean, e2.mean]), cov, e1.factor_dofs + e2.factor_dofs, spaces
    )


def product_all(ensembles: Sequence[Ensemble]) -> Ensemble:
    out = ensembles[0]
    for e in ensembles[1:]:
        out = product(out, e)
    return out


def reduce(e: Ensemble, keep: int | Sequence[int]) -> Ensemble:
    """Marginal / reduced ensemble on the kept factor(s).

    Requires at least two registered factors.
    """
    if e.nfactors < 2:
        raise ValidationError(f"reduce: ensemble has {e.nfactors} factor(s), need at least 2")
    kept = _keep_list(keep, e.nfactors, "reduce")
    spaces = tuple(e.spaces[i] for i in kept)
    if isinstance(e, ClassicalDistribution):
        drop = tuple(i for i in range(e.nfactors) if i not in kept)
        p = e.probabilities.sum(axis=drop)
        return ClassicalDistribution(p / p.sum(), spaces)
    if isinstance(e, DensityOperator):
        m = partial_trace(e.matrix, e.factor_dims, kept)
        return DensityOperator(m, tuple(e.factor_dims[i] for i in kept), spaces)
    starts = np.cumsum((0,) + e.factor_dofs)
    idx = np.concatenate([np.arange(2 * starts[i], 2 * starts[i + 1]) for i in kept])
    return GaussianEnsemble(
        e.mean[idx], e.covariance[np.ix_(idx, idx)], tuple(e.factor_dofs[i] for i in kept), spaces
    )


def regroup(e: Ensemble, groups: Sequence[Sequence[int]], spaces=None) -> Ensemble:
    """Merge consecutive factors into coarser factors, e.g. ``[[0, 1], [2]]``.

    Only the bookkeeping changes; the underlying tensor or matrix is the same.
    Space labels of merged factors are dropped unless ``spaces`` is given.
    """
    flat = [i for g in groups for i in g]
    if flat != list(range(e.nfactors)) or any(len(g) == 0 for g in groups):
        raise ValidationError(f"regroup: groups {groups} must partition factors in order")
    if spaces is None:
        spaces = tuple(e.spaces[g[0]] if len(g) == 1 else None for g in groups)
    if isinstance(e, ClassicalDistribution):
        shape = tuple(math.prod(e.axes[i] for i in g) for g in groups)
        return ClassicalDistribution(e.probabilities.reshape(shape), spaces)
    if isinstance(e, DensityOperator):
        dims = tuple(math.prod(e.factor_dims[i] for i in g) for g in groups)
        return DensityOperator(e.matrix, dims, spaces)
    dofs = tuple(sum(e.factor_dofs[i] for i in g) for g in groups)
    return GaussianEnsemble(e.mean, e.covariance, dofs, spaces)


def mix(components: SignalEnsemble) -> Ensemble:
    """Prior-weighted mixture ``sum_i p_i rho_i``.  Gaussian mixtures are rejected."""
    first = components.states[0]
    if isinstance(first, GaussianEnsemble):
        raise UnsupportedOperationError("mix: a mixture of Gaussians is not Gaussian")
    p = components.priors
    if isinstance(first, ClassicalDistribution):
        t = sum(w * s.probabilities for w, s in zip(p, components.states))
        return ClassicalDistribution(t / t.sum(), first.spaces)
    m = sum(w * s.matrix for w, s in zip(p, components.states))
    m = m / np.trace(m).real
    return DensityOperator(m, first.factor_dims, first.spaces)


def mixture(states: Sequence[Ensemble], priors) -> Ensemble:
    return mix(SignalEnsemble(tuple(states), priors))


def overlap(e1: Ensemble, e2: Ensemble) -> float:
    """``Tr[rho' rho'']``: zero exactly for non-overlapping ensembles."""
    _same_kind(e1, e2, "overlap")
    if e1.shape_key != e2.shape_key:
        raise ValidationError(f"overlap: dimension mismatch {e1.shape_key} vs {e2.shape_key}")
    if isinstance(e1, ClassicalDistribution):
        return float(np.sum(e1.probabilities * e2.probabilities))
    if isinstance(e1, DensityOperator):
        # Tr[AB] = sum_ij A_ij B_ji
        return float(np.sum(e1.matrix * e2.matrix.T).real)
    raise UnsupportedOperationError("overlap: not defined for Gaussian ensembles")


# -- transformations ---------------------------------------------------------


def check_unitary(u, tol: float = UNITARY_TOL) -> np.ndarray:
    u = as_matrix(u, "unitary")
    if u.shape[0] != u.shape[1]:
        raise ValidationError(f"unitary check failed: shape {u.shape} is not square")
    err = np.abs(u.conj().T @ u - np.eye(u.shape[0])).max()
    if err > tol:
        raise ValidationError(f"unitary check failed: max|U^dagger U - I| = {err:.3e} > {tol:g}")
    return u


def apply_unitary(rho: DensityOperator, u) -> DensityOperator:
    """``u rho u^dagger``; the factor bookkeeping is kept."""
    u = check_unitary(u)
    if u.shape[0] != rho.dim:
        raise ValidationError(f"apply_unitary: unitary of size {u.shape[0]} on dimension {rho.dim}")
    m = u @ rho.matrix @ u.conj().T
    return DensityOperator(0.5 * (m + m.conj().T), rho.factor_dims, rho.spaces)


def check_permutation(perm, n: int) -> np.ndarray:
    perm = np.asarray(perm)
    if perm.shape != (n,) or not np.issubdtype(perm.dtype, np.integer):
        raise ValidationError(f"permutation check failed: need {n} integer indices")
    if not np.array_equal(np.sort(perm), np.arange(n)):
        raise ValidationError("permutation check failed: not a bijection on outcomes")
    return perm


def apply_permutation(c: ClassicalDistribution, perm) -> ClassicalDistribution:
    """Relabel flattened outcomes: outcome ``k`` moves to position ``perm[k]``."""
    flat = c.weights()
    perm = check_permutation(perm, flat.size)
    out = np.empty_like(flat)
    out[perm] = flat
    return ClassicalDistribution(out.reshape(c.axes), c.spaces)


def symplectic_form(dof: int) -> np.ndarray:
    """``J = diag([[0, 1], [-1, 0]], ...)`` in ``(x_1, p_1, ...)`` ordering."""
    return np.kron(np.eye(dof), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def check_symplectic(m, dof: int, tol: float = SYMPLECTIC_TOL) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.shape != (2 * dof, 2 * dof):
        raise ValidationError(f"symplectic check failed: expected {2 * dof}x{2 * dof}, got {m.shape}")
    j = symplectic_form(dof)
    err = np.abs(m @ j @ m.T - j).max()
    if err > tol * max(1.0, np.abs(m).max() ** 2):
        raise ValidationError(f"symplectic check failed: max|M J M^T - J| = {err:.3e}")
    return m


def apply_symplectic(g: GaussianEnsemble, m) -> GaussianEnsemble:
    """Linear canonical map ``z -> M z``: covariance ``M S M^T``, mean ``M mu``."""
    m = check_symplectic(m, g.dof)
    cov = m @ g.covariance @ m.T
    return GaussianEnsemble(m @ g.mean, 0.5 * (cov + cov.T), g.factor_dofs, g.spaces)


def transform(e: Ensemble, t) -> Ensemble:
    """Apply the canonical transformation appropriate to ``e``'s kind."""
    if isinstance(e, DensityOperator):
        return apply_unitary(e, t)
    if isinstance(e, ClassicalDistribution):
        return apply_permutation(e, t)
    return apply_symplectic(e, t)


# -- random generators -------------------------------------------------------


def random_density(dim: int, rank: int | None, rng: Rng, factor_dims=None, spaces=None) -> DensityOperator:
    """Ginibre ensemble: ``G G^dagger / Tr(G G^dagger)`` with ``G`` of size dim x rank."""
    rank = dim if rank is None else rank
    if not 1 <= rank <= dim:
        raise ValidationError(f"random_density: rank {rank} outside [1, {dim}]")
    g = complex_gaussian(dim, rank, rng)
    m = g @ g.conj().T
    return DensityOperator(m / np.trace(m).real, factor_dims, spaces)


def _gram_schmidt(z: np.ndarray) -> np.ndarray:
    n = z.shape[1]
    q = np.array(z, dtype=np.complex128)
    for j in range(n):
        for _ in range(2):  # re-orthogonalize once for accuracy
            for i in range(j):
                q[:, j] -= (q[:, i].conj() @ q[:, j]) * q[:, i]
        q[:, j] /= np.linalg.norm(q[:, j])
    return q


def random_unitary(dim: int, rng: Rng) -> np.ndarray:
    """Haar-distributed unitary by Gram-Schmidt on a complex Gaussian matrix.

    Gram-Schmidt yields the QR factor with positive diagonal ``R``, which is
    the phase convention that makes the distribution Haar.
    """
    if dim < 1:
        raise ValidationError(f"random_unitary: dim must be >= 1, got {dim}")
    return _gram_schmidt(complex_gaussian(dim, dim, rng))


def random_classical(axes: Sequence[int], rng: Rng, sparsity: float = 0.0) -> ClassicalDistribution:
    """Uniform draw from the probability simplex over ``prod(axes)`` outcomes.

    With ``sparsity > 0`` each outcome is independently zeroed with that
    probability (at least one outcome is kept).
    """
    n = math.prod(axes)
    w = -np.log(1.0 - rng.uniforms(n))
    if sparsity > 0.0:
        mask = rng.uniforms(n) >= sparsity
        if not mask.any():
            mask[rng.integer(n)] = True
        w = w * mask
    return ClassicalDistribution((w / w.sum()).reshape(tuple(axes)))


def random_permutation(n: int, rng: Rng) -> np.ndarray:
    perm = np.arange(n)
    for i in range(n - 1, 0, -1):
        j = rng.integer(i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    return perm


def random_covariance(dof: int, rng: Rng, spread: float = 1.0) -> np.ndarray:
    """Random positive-definite ``2n x 2n`` covariance ``A A^T + eps I``."""
    a = rng.normals(4 * dof * dof).reshape(2 * dof, 2 * dof) * spread
    return a @ a.T + 0.1 * spread**2 * np.eye(2 * dof)
