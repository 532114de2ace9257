"""Entropy functionals and the ensemble volume ``V = K * exp(S)``."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, NamedTuple

import numpy as np

from .ensembles import ClassicalDistribution, DensityOperator, Ensemble, GaussianEnsemble
from .exceptions import UnsupportedOperationError, ValidationError

LOG2E = math.log2(math.e)


class EntropyValue(float):
    """An entropy in nats that also knows its value in bits."""

    @property
    def nats(self) -> float:
        return float(self)

    @property
    def bits(self) -> float:
        return float(self) * LOG2E

    def value(self, unit: str = "nats") -> float:
        if unit == "nats":
            return self.nats
        if unit == "bits":
            return self.bits
        raise ValidationError(f"unknown entropy unit {unit!r} (use nats or bits)")

    def __repr__(self):
        return f"EntropyValue({float(self)!r} nats)"


@dataclass(frozen=True)
class VolumeContext:
    """Volume constants ``K`` per elementary space, plus Planck's constant.

    The constant of a composite space is always the product of its factors'
    constants; it is never stored.  Unlabelled factors, and labels not in
    ``k_constants``, use ``default_k``; with ``default_k=None`` an unknown
    label is an error.
    """

    k_constants: Mapping[str, float] = field(default_factory=dict)
    hbar: float = 1.0
    default_k: float | None = 1.0

    def __post_init__(self):
        ks = dict(self.k_constants)
        for label, k in ks.items():
            if not (k > 0 and math.isfinite(k)):
                raise ValidationError(f"VolumeContext: K for {label!r} must be a positive real, got {k!r}")
        if not (self.hbar > 0 and math.isfinite(self.hbar)):
            raise ValidationError(f"VolumeContext: hbar must be a positive real, got {self.hbar!r}")
        if self.default_k is not None and not self.default_k > 0:
            raise ValidationError(f"VolumeContext: default K must be positive, got {self.default_k!r}")
        object.__setattr__(self, "k_constants", MappingProxyType(ks))

    @property
    def h(self) -> float:
        return 2.0 * math.pi * self.hbar

    def k(self, label: str | None) -> float:
        if label is not None and label in self.k_constants:
            return self.k_constants[label]
        if self.default_k is None:
            raise ValidationError(f"VolumeContext: no K registered for space {label!r} and no default")
        return self.default_k

    def log_k_for(self, e: Ensemble) -> float:
        """``ln K`` of the ensemble's space, summed over its factors."""
        return sum(math.log(self.k(label)) for label in e.spaces)

    def k_for(self, e: Ensemble) -> float:
        return math.exp(self.log_k_for(e))

    def with_constant(self, label: str, k: float) -> "VolumeContext":
        ks = dict(self.k_constants)
        ks[label] = k
        return VolumeContext(ks, self.hbar, self.default_k)

    def with_correspondence(self, quantum_label: str, classical_label: str, dof: int = 1) -> "VolumeContext":
        """Register ``K_quantum = h**dof * K_classical`` (pure-state volume of a
        quantum space whose classical limit has ``dof`` degrees of freedom)."""
        return self.with_constant(quantum_label, self.h**dof * self.k(classical_label))


DEFAULT_CONTEXT = VolumeContext()


# -- entropies ---------------------------------------------------------------


def _plogp(w: np.ndarray) -> float:
    w = w[w > 0.0]
    return float(-np.sum(w * np.log(w))) + 0.0  # no negative zero


def shannon_entropy(c: ClassicalDistribution) -> EntropyValue:
    """``-sum p ln p`` with ``0 ln 0 = 0``."""
    return EntropyValue(_plogp(c.weights()))


def von_neumann_entropy(rho: DensityOperator) -> EntropyValue:
    """``-Tr rho ln rho`` from the Jacobi spectrum."""
    return EntropyValue(_plogp(rho.weights()))


def gaussian_entropy(g: GaussianEnsemble) -> EntropyValue:
    """Differential entropy ``n ln(2 pi e) + 1/2 ln det S`` of a Gaussian."""
    logdet = float(np.sum(np.log(g.covariance_eigenvalues)))
    return EntropyValue(g.dof * math.log(2.0 * math.pi * math.e) + 0.5 * logdet)


def entropy(e: Ensemble) -> EntropyValue:
    if isinstance(e, ClassicalDistribution):
        return shannon_entropy(e)
    if isinstance(e, DensityOperator):
        return von_neumann_entropy(e)
    if isinstance(e, GaussianEnsemble):
        return gaussian_entropy(e)
    raise UnsupportedOperationError(f"entropy: unsupported ensemble type {type(e).__name__}")


def check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not math.isfinite(alpha) or alpha <= 0.0 or alpha == 1.0:
        raise ValidationError(f"Renyi order alpha must be finite, > 0 and != 1, got {alpha!r}")
    return alpha


def _discrete_weights(e: Ensemble, where: str) -> np.ndarray:
    if isinstance(e, (ClassicalDistribution, DensityOperator)):
        w = e.weights()
        return w[w > 0.0]
    raise UnsupportedOperationError(f"{where}: only discrete classical or quantum ensembles")


def renyi_entropy(e: Ensemble, alpha: float) -> EntropyValue:
    """``ln(sum lambda^alpha) / (1 - alpha)`` over the spectrum or probabilities."""
    alpha = check_alpha(alpha)
    w = _discrete_weights(e, "renyi_entropy")
    return EntropyValue(math.log(float(np.sum(w**alpha))) / (1.0 - alpha))


# -- volumes -----------------------------------------------------------------


def log_volume(e: Ensemble, ctx: VolumeContext = DEFAULT_CONTEXT) -> float:
    return ctx.log_k_for(e) + float(entropy(e))


def volume(e: Ensemble, ctx: VolumeContext = DEFAULT_CONTEXT) -> float:
    """Ensemble volume ``K(Gamma) * exp(S)``; ``K`` is multiplicative over factors."""
    return math.exp(log_volume(e, ctx))


def renyi_volume(e: Ensemble, alpha: float, ctx: VolumeContext = DEFAULT_CONTEXT) -> float:
    """``K * (sum lambda^alpha) ** (1 / (1 - alpha))``."""
    return math.exp(ctx.log_k_for(e) + float(renyi_entropy(e, alpha)))


class ThermodynamicReading(NamedTuple):
    entropy: float
    microstate_count: float


def thermodynamic_entropy(
    e: Ensemble, ctx: VolumeContext = DEFAULT_CONTEXT, k_boltzmann: float = 1.0
) -> ThermodynamicReading:
    """``k ln(V/K)`` together with ``V/K``, the number of pure-state
    ("microstate") volumes that fit inside the ensemble volume."""
    if not k_boltzmann > 0:
        raise ValidationError(f"k_boltzmann must be positive, got {k_boltzmann!r}")
    log_ratio = log_volume(e, ctx) - ctx.log_k_for(e)
    return ThermodynamicReading(k_boltzmann * log_ratio, math.exp(log_ratio))
