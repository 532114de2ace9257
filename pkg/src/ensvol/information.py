"""Communication-channel quantities built on ensemble volumes.

A channel alphabet is a :class:`~ensvol.ensembles.SignalEnsemble`.  Block
codes transmit length-``L`` sequences of signals; the volume chain

    V(block ensemble) <= prod_l V(average slot state) <= V(mixture) ** L

and the typical-block volume ``prod_i V(rho_i) ** (p_i L)`` bound the
information per signal by the Holevo quantity.  Multiplicative chains are
evaluated in log space.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .ensembles import (
    Ensemble,
    SignalEnsemble,
    check_priors,
    mix,
    mixture,
    product_all,
    reduce,
    regroup,
)
from .exceptions import NumericalError, ValidationError
from .numerics import Rng
from .volume import (
    DEFAULT_CONTEXT,
    LOG2E,
    EntropyValue,
    VolumeContext,
    entropy,
    log_volume,
)

CHAIN_TOL = 1e-9
FREQ_TOL = 1e-9
MAX_TYPE_CLASS = 100_000


@dataclass
class BoundReport:
    """``lhs <= rhs`` (or ``lhs >= rhs``) with a signed slack in ``units``.

    The slack is positive when the relation holds.  ``lhs`` may be None when
    the left side is an operational quantity the caller measures (e.g.
    information actually gained).
    """

    name: str
    rhs: float
    lhs: float | None = None
    units: str = "nats"
    tolerance: float = CHAIN_TOL
    details: dict = field(default_factory=dict)
    warning: str | None = None
    direction: str = "<="

    @property
    def slack(self) -> float | None:
        if self.lhs is None:
            return None
        return self.rhs - self.lhs if self.direction == "<=" else self.lhs - self.rhs

    @property
    def passed(self) -> bool:
        return self.lhs is None or self.slack >= -self.tolerance

    def to_dict(self) -> dict:
        return {
            "name": self.name, "relation": self.direction, "lhs": self.lhs, "rhs": self.rhs, "slack": self.slack,
            "units": self.units, "tolerance": self.tolerance, "passed": self.passed,
            "warning": self.warning, "details": self.details,
        }


def _entropy_of_priors(p: np.ndarray) -> float:
    p = p[p > 0.0]
    return float(-np.sum(p * np.log(p)))


def holevo_chi(s: SignalEnsemble) -> EntropyValue:
    """``S(sum p_i rho_i) - sum p_i S(rho_i)`` in nats."""
    avg = sum(p * float(entropy(r)) for p, r in zip(s.priors, s.states))
    return EntropyValue(float(entropy(mix(s))) - avg)


def single_measurement_bound(rho: Ensemble, v0: float, ctx: VolumeContext = DEFAULT_CONTEXT) -> BoundReport:
    """Bits obtainable from one measurement: ``log2(V(rho) / v0)``.

    ``v0`` is the minimum signal volume; for a quantum channel the pure-state
    volume ``K`` is always admissible.  A volume below ``v0`` leaves room for
    no distinguishable signal, so the bound is clamped to zero and flagged.
    """
    if not v0 > 0:
        raise ValidationError(f"single_measurement_bound: v0 must be positive, got {v0!r}")
    log_ratio = log_volume(rho, ctx) - math.log(v0)
    warning = None
    if log_ratio < 0.0:
        warning = "V(rho) < v0: no room for even one signal volume; capacity reported as 0"
        log_ratio = 0.0
    return BoundReport("single_measurement", rhs=log_ratio * LOG2E, units="bits", warning=warning,
                       details={"log_volume_ratio_nats": log_ratio})


# -- block codes -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BlockCode:
    """Length-``L`` block signals over a base alphabet with block priors.

    Each signal ``i`` must keep its relative frequency ``p_i`` per
    transmitted signal: ``sum_b prior_b * count_i(b) / L == p_i``.
    """

    base: SignalEnsemble
    length: int
    blocks: tuple
    block_priors: np.ndarray

    def __post_init__(self):
        L = int(self.length)
        if L < 1:
            raise ValidationError(f"BlockCode: length must be >= 1, got {self.length}")
        blocks = tuple(tuple(int(i) for i in b) for b in self.blocks)
        if not blocks:
            raise ValidationError("BlockCode: need at least one block")
        n = len(self.base)
        for b in blocks:
            if len(b) != L:
                raise ValidationError(f"BlockCode: block {b} does not have length {L}")
            if any(not 0 <= i < n for i in b):
                raise ValidationError(f"BlockCode: block {b} has a signal index outside [0, {n})")
        priors = check_priors(self.block_priors, "BlockCode")
        if priors.size != len(blocks):
            raise ValidationError(f"BlockCode: {priors.size} priors for {len(blocks)} blocks")
        object.__setattr__(self, "length", L)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "block_priors", priors)
        freq = self.frequencies()
        err = float(np.abs(freq - self.base.priors).max())
        if err > FREQ_TOL:
            raise ValidationError(
                f"BlockCode: relative-frequency constraint failed, max deviation {err:.3e} "
                f"(frequencies {freq.tolist()} vs priors {self.base.priors.tolist()})"
            )

    def frequencies(self) -> np.ndarray:
        """Per-signal relative frequency ``sum_b prior_b count_i(b) / L``."""
        freq = np.zeros(len(self.base))
        for b, w in zip(self.blocks, self.block_priors):
            for i in b:
                freq[i] += w
        return freq / self.length

    def slot_weights(self) -> np.ndarray:
        """``w[l, i]``: probability that slot ``l`` carries signal ``i``."""
        w = np.zeros((self.length, len(self.base)))
        for b, p in zip(self.blocks, self.block_priors):
            for slot, i in enumerate(b):
                w[slot, i] += p
        return w


def block_ensemble(code: BlockCode) -> Ensemble:
    """Mixture of the L-fold products, one registered factor per slot."""
    base = code.base
    nf = base.states[0].nfactors
    groups = [list(range(l * nf, (l + 1) * nf)) for l in range(code.length)]
    states = []
    for b in code.blocks:
        joint = product_all([base.states[i] for i in b])
        states.append(regroup(joint, groups) if nf > 1 else joint)
    return mixture(states, code.block_priors)


def slot_averages(code: BlockCode) -> list[Ensemble]:
    """Average state transmitted in each slot."""
    return [mixture(code.base.states, w) for w in code.slot_weights()]


def log_typical_volume(s: SignalEnsemble, L: int, ctx: VolumeContext = DEFAULT_CONTEXT) -> float:
    """``L * sum_i p_i ln V(rho_i)``."""
    if L < 1:
        raise ValidationError(f"typical_volume: L must be >= 1, got {L}")
    return L * sum(p * log_volume(r, ctx) for p, r in zip(s.priors, s.states))


def typical_volume(s: SignalEnsemble, L: int, ctx: VolumeContext = DEFAULT_CONTEXT) -> float:
    """Volume ``prod_i V(rho_i) ** (p_i L)`` of a typical block signal."""
    lv = log_typical_volume(s, L, ctx)
    if lv > 709.0:
        raise NumericalError(f"typical_volume overflows (log volume {lv:.1f}); use log_typical_volume")
    return math.exp(lv)


class TypicalCount(NamedTuple):
    log_count: float
    count: float


def typical_count(priors, L: int) -> TypicalCount:
    """Estimated number of typical blocks, ``exp(L H(p))``, with its log."""
    p = check_priors(priors)
    if L < 1:
        raise ValidationError(f"typical_count: L must be >= 1, got {L}")
    lc = L * _entropy_of_priors(p)
    return TypicalCount(lc, math.exp(lc) if lc <= 709.0 else math.inf)


@dataclass
class BlockBounds:
    """The volume chain for one block code, all logs in nats."""

    log_block_volume: float
    log_slot_product: float
    log_mixture_power: float
    mean_slot_entropy: float
    mixture_entropy: float
    finite_rate_bits: float
    chi_bits: float

    @property
    def projection_slack(self) -> float:
        return self.log_slot_product - self.log_block_volume

    @property
    def concavity_slack(self) -> float:
        return self.log_mixture_power - self.log_slot_product

    @property
    def entropy_concavity_slack(self) -> float:
        return self.mixture_entropy - self.mean_slot_entropy

    @property
    def passed(self) -> bool:
        return min(self.projection_slack, self.concavity_slack, self.entropy_concavity_slack) >= -CHAIN_TOL

    def reports(self) -> list[BoundReport]:
        return [
            BoundReport("block_vs_slot_product", lhs=self.log_block_volume, rhs=self.log_slot_product,
                        units="log-volume nats"),
            BoundReport("slot_product_vs_mixture_power", lhs=self.log_slot_product, rhs=self.log_mixture_power,
                        units="log-volume nats"),
            BoundReport("slot_entropy_concavity", lhs=self.mean_slot_entropy, rhs=self.mixture_entropy),
            BoundReport("finite_block_rate", lhs=self.finite_rate_bits, rhs=self.chi_bits, units="bits"),
        ]

    def to_dict(self) -> dict:
        return {
            "log_block_volume": self.log_block_volume,
            "log_slot_product": self.log_slot_product,
            "log_mixture_power": self.log_mixture_power,
            "projection_slack": self.projection_slack,
            "concavity_slack": self.concavity_slack,
            "entropy_concavity_slack": self.entropy_concavity_slack,
            "finite_rate_bits": self.finite_rate_bits,
            "chi_bits": self.chi_bits,
            "passed": self.passed,
        }


def block_volume_bounds(code: BlockCode, ctx: VolumeContext = DEFAULT_CONTEXT) -> BlockBounds:
    """Evaluate ``V(rho^(L)) <= prod_l V(avg_l) <= V(rho)^L`` in log space.

    Also reports the entropy concavity step and the finite-``L`` rate
    ``L^-1 log2(V(rho^(L)) / V_typical)``, whose gap to ``chi`` shows how far
    the block length is from the asymptotic bound.
    """
    L = code.length
    lb = log_volume(block_ensemble(code), ctx)
    slots = slot_averages(code)
    lp = sum(log_volume(s, ctx) for s in slots)
    rho = mix(code.base)
    lm = L * log_volume(rho, ctx)
    mean_s = sum(float(entropy(s)) for s in slots) / L
    rate = float((lb - log_typical_volume(code.base, L, ctx)) / L * LOG2E)
    return BlockBounds(lb, lp, lm, mean_s, float(entropy(rho)), rate, holevo_chi(code.base).bits)


def type_class_code(base: SignalEnsemble, L: int) -> BlockCode:
    """All blocks whose composition is exactly ``p_i L``, equally likely.

    Requires every ``p_i L`` to be an integer (to 1e-9).
    """
    counts = base.priors * L
    rounded = np.rint(counts).astype(int)
    if np.abs(counts - rounded).max() > FREQ_TOL:
        raise ValidationError(f"type_class_code: p*L = {counts.tolist()} is not integral")
    size = math.factorial(L) // math.prod(math.factorial(int(c)) for c in rounded)
    if size > MAX_TYPE_CLASS:
        raise ValidationError(f"type_class_code: type class has {size} blocks (limit {MAX_TYPE_CLASS})")
    symbols = [i for i, c in enumerate(rounded) for _ in range(c)]
    blocks = sorted(set(itertools.permutations(symbols)))
    return BlockCode(base, L, tuple(blocks), np.full(len(blocks), 1.0 / len(blocks)))


def random_block_code(base: SignalEnsemble, L: int, rng: Rng, n_blocks: int = 4) -> BlockCode:
    """Random block code that meets the frequency constraint exactly.

    ``n_blocks`` random sequences get random weights; their frequency
    deficit is then filled by constant blocks ``(i, i, ..., i)``, each of
    which has composition ``e_i``.  Any target frequency is a convex
    combination of those, so no rejection step is needed.
    """
    n = len(base)
    p = base.priors
    seqs = [tuple(rng.integer(n) for _ in range(L)) for _ in range(n_blocks)]
    w0 = -np.log(1.0 - rng.uniforms(n_blocks))
    w0 = w0 / w0.sum()
    f = np.zeros(n)
    for s, w in zip(seqs, w0):
        for i in s:
            f[i] += w / L
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(f > 0.0, p / f, np.inf)
    theta = (0.2 + 0.75 * rng.uniform()) * min(1.0, float(ratios.min()))
    r = np.clip(p - theta * f, 0.0, None)  # frequency left for the constant blocks
    weights: dict[tuple, float] = {}
    for s, w in zip(seqs, w0):
        weights[s] = weights.get(s, 0.0) + theta * w
    for i in range(n):
        if r[i] > 0.0:
            s = (i,) * L
            weights[s] = weights.get(s, 0.0) + r[i]
    blocks = sorted(weights)
    priors = np.array([weights[b] for b in blocks])
    return BlockCode(base, L, tuple(blocks), priors / priors.sum())


def information_rate_bound(s: SignalEnsemble) -> BoundReport:
    """Asymptotic information per signal, ``chi * log2(e)`` bits."""
    chi = holevo_chi(s)
    return BoundReport("information_rate", rhs=chi.bits, units="bits",
                       details={"chi_nats": chi.nats, "chi_bits": chi.bits})


def lanford_robinson(s: SignalEnsemble) -> BoundReport:
    """``chi <= H(priors)``, i.e. no more than the number of typical blocks allows."""
    return BoundReport("lanford_robinson", lhs=float(holevo_chi(s)), rhs=_entropy_of_priors(s.priors))


def slot_reductions(code: BlockCode) -> list[Ensemble]:
    """Reduced states of the block ensemble, one per slot (equal to :func:`slot_averages`)."""
    rho_l = block_ensemble(code)
    if code.length == 1:
        return [rho_l]
    return [reduce(rho_l, l) for l in range(code.length)]


def prior_entropy(priors: Sequence[float]) -> float:
    return _entropy_of_priors(check_priors(priors))
