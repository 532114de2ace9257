"""Executable checks of the four volume axioms, plus seeded fuzzers.

Each check produces an :class:`AxiomReport` whose ``worst_violation`` is a
signed slack, positive when the axiom is violated, so near-equality cases
stay visible.  A trial passes when ``violation <= tolerance``.  Witnesses are
stored as JSON documents; :func:`replay` re-evaluates a witness and must
reproduce the reported violation.

Axiom ids: ``"i"`` invariance, ``"ii"`` Cartesian product, ``"iii"``
projection, ``"iv"`` uniformity, ``"renyi"`` projection for Renyi volumes.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import documents as docs
from .ensembles import (
    ClassicalDistribution,
    DensityOperator,
    Ensemble,
    GaussianEnsemble,
    apply_symplectic,
    mixture,
    overlap,
    product,
    random_classical,
    random_covariance,
    random_density,
    random_permutation,
    random_unitary,
    reduce,
    symplectic_form,
    transform,
)
from .exceptions import ValidationError
from .numerics import Rng, trial_seed
from .volume import DEFAULT_CONTEXT, VolumeContext, check_alpha, renyi_volume, volume

REL_TOL = 1e-9
ABS_TOL = 1e-9
OVERLAP_TOL = 1e-10
PINNED_RENYI_WITNESS = ((0.8, 0.1), (0.1, 0.0))


@dataclass
class AxiomReport:
    axiom: str
    trials: int = 0
    worst_violation: float = -math.inf
    tolerance: float = 0.0
    passed: bool = True
    failures: int = 0
    seed: int | None = None
    lhs: float | None = None
    rhs: float | None = None
    witness: dict | None = None
    details: dict = field(default_factory=dict)

    @property
    def margin(self) -> float:
        return self.worst_violation - self.tolerance

    def to_dict(self) -> dict:
        d = asdict(self)
        if not math.isfinite(d["worst_violation"]):
            d["worst_violation"] = None
        return d


def _single(axiom, violation, tolerance, lhs, rhs, witness, passed=None, **details) -> AxiomReport:
    ok = violation <= tolerance if passed is None else passed
    return AxiomReport(
        axiom=axiom,
        trials=1,
        worst_violation=float(violation),
        tolerance=float(tolerance),
        passed=bool(ok),
        failures=0 if ok else 1,
        lhs=float(lhs),
        rhs=float(rhs),
        witness=witness,
        details=details,
    )


def _transform_doc(e: Ensemble, t) -> dict:
    if isinstance(e, DensityOperator):
        return {"unitary": docs.complex_to_json(t)}
    if isinstance(e, ClassicalDistribution):
        return {"permutation": [int(i) for i in t]}
    return {"symplectic": np.asarray(t, dtype=float).tolist()}


def _transform_from_doc(d: dict):
    if "unitary" in d:
        return docs.complex_from_json(d["unitary"], "unitary")
    if "permutation" in d:
        return np.asarray(d["permutation"], dtype=int)
    return np.asarray(d["symplectic"], dtype=float)


# -- single checks -----------------------------------------------------------


def check_invariance(e: Ensemble, t, ctx: VolumeContext = DEFAULT_CONTEXT) -> AxiomReport:
    """Axiom (i): ``V(T e) = V(e)`` for a unitary / permutation / symplectic ``T``."""
    v0 = volume(e, ctx)
    v1 = volume(transform(e, t), ctx)
    witness = {"axiom": "i", "e": docs.to_document(e), "transform": _transform_doc(e, t),
               "ctx": docs.context_to_json(ctx)}
    return _single("i", abs(v1 - v0), REL_TOL * v0, v1, v0, witness)


def check_cartesian(e1: Ensemble, e2: Ensemble, ctx: VolumeContext = DEFAULT_CONTEXT) -> AxiomReport:
    """Axiom (ii): ``V(e1 x e2) = V(e1) V(e2)``."""
    joint = volume(product(e1, e2), ctx)
    rhs = volume(e1, ctx) * volume(e2, ctx)
    witness = {"axiom": "ii", "e1": docs.to_document(e1), "e2": docs.to_document(e2),
               "ctx": docs.context_to_json(ctx)}
    return _single("ii", abs(joint - rhs), REL_TOL * rhs, joint, rhs, witness, difference=joint - rhs)


def check_projection(e12: Ensemble, ctx: VolumeContext = DEFAULT_CONTEXT) -> AxiomReport:
    """Axiom (iii): ``V(e12) <= V(e1) V(e2)`` for the two marginals."""
    if e12.nfactors != 2:
        raise ValidationError(
            f"check_projection: need exactly 2 registered factors, got {e12.nfactors} (use regroup)"
        )
    lhs = volume(e12, ctx)
    rhs = volume(reduce(e12, 0), ctx) * volume(reduce(e12, 1), ctx)
    witness = {"axiom": "iii", "e": docs.to_document(e12), "ctx": docs.context_to_json(ctx)}
    return _single("iii", lhs - rhs, ABS_TOL, lhs, rhs, witness)


def default_grid(points: int = 101) -> np.ndarray:
    return np.linspace(0.0, 1.0, points)


def uniformity_profile(e1: Ensemble, e2: Ensemble, lambdas, ctx: VolumeContext = DEFAULT_CONTEXT) -> np.ndarray:
    return np.array([volume(mixture((e1, e2), (lam, 1.0 - lam)), ctx) for lam in lambdas])


def check_uniformity(
    e1: Ensemble, e2: Ensemble, lambdas: Sequence[float] | None = None, ctx: VolumeContext = DEFAULT_CONTEXT
) -> AxiomReport:
    """Axiom (iv): mixtures of two non-overlapping, equal-volume ensembles
    never exceed ``2V``, with the maximum at the equal mixture.

    Raises ValidationError if the inputs overlap or differ in volume.
    """
    ov = overlap(e1, e2)
    if ov > OVERLAP_TOL:
        raise ValidationError(f"check_uniformity: non-overlap precondition failed, overlap {ov:.3e}")
    v1, v2 = volume(e1, ctx), volume(e2, ctx)
    if abs(v1 - v2) > REL_TOL * v1:
        raise ValidationError(f"check_uniformity: equal-volume precondition failed, {v1!r} vs {v2!r}")
    lam = np.sort(np.asarray(default_grid() if lambdas is None else lambdas, dtype=float))
    if lam.size == 0 or lam[0] < 0.0 or lam[-1] > 1.0:
        raise ValidationError("check_uniformity: lambdas must be a nonempty grid in [0, 1]")
    vols = uniformity_profile(e1, e2, lam, ctx)
    k = int(np.argmax(vols))
    resolution = float(np.max(np.diff(lam))) if lam.size > 1 else 1.0
    at_half = abs(lam[k] - 0.5) <= resolution + 1e-15
    vmax = float(vols[k])
    bound = 2.0 * v1
    ok = at_half and vmax - bound <= ABS_TOL
    witness = {"axiom": "iv", "e1": docs.to_document(e1), "e2": docs.to_document(e2),
               "lambdas": lam.tolist(), "ctx": docs.context_to_json(ctx)}
    return _single(
        "iv", vmax - bound, ABS_TOL, vmax, bound, witness, passed=ok,
        argmax_lambda=float(lam[k]), lambdas=lam.tolist(), volumes=vols.tolist(),
    )


def renyi_projection_gap(joint: Ensemble, alpha: float, ctx: VolumeContext = DEFAULT_CONTEXT) -> tuple:
    """``(V_a(joint), V_a(m1) V_a(m2))`` for a two-factor ensemble."""
    lhs = renyi_volume(joint, alpha, ctx)
    rhs = renyi_volume(reduce(joint, 0), alpha, ctx) * renyi_volume(reduce(joint, 1), alpha, ctx)
    return lhs, rhs


def check_renyi_projection(joint: Ensemble, alpha: float, ctx: VolumeContext = DEFAULT_CONTEXT) -> AxiomReport:
    """Projection inequality for the Renyi volume of order ``alpha``.

    ``passed`` means the inequality holds (no counterexample).
    """
    alpha = check_alpha(alpha)
    lhs, rhs = renyi_projection_gap(joint, alpha, ctx)
    witness = {"axiom": "renyi", "alpha": alpha, "e": docs.to_document(joint), "ctx": docs.context_to_json(ctx)}
    return _single("renyi", lhs - rhs, 0.0, lhs, rhs, witness, alpha=alpha)


def replay(witness: dict) -> float:
    """Recompute the violation recorded in a report's witness."""
    ctx = docs.context_from_json(witness.get("ctx"))
    axiom = witness["axiom"]
    if axiom == "i":
        e = docs.from_document(witness["e"])
        return check_invariance(e, _transform_from_doc(witness["transform"]), ctx).worst_violation
    if axiom == "ii":
        return check_cartesian(docs.from_document(witness["e1"]), docs.from_document(witness["e2"]), ctx).worst_violation
    if axiom == "iii":
        return check_projection(docs.from_document(witness["e"]), ctx).worst_violation
    if axiom == "iv":
        e1, e2 = docs.from_document(witness["e1"]), docs.from_document(witness["e2"])
        return check_uniformity(e1, e2, witness["lambdas"], ctx).worst_violation
    if axiom == "renyi":
        return check_renyi_projection(docs.from_document(witness["e"]), witness["alpha"], ctx).worst_violation
    raise ValidationError(f"replay: unknown axiom {axiom!r}")


# -- fuzzing -----------------------------------------------------------------


def merge_reports(reports: Sequence[AxiomReport], seed: int | None = None) -> AxiomReport:
    """Fold single-trial reports; the worst is the one closest to (or furthest
    past) its tolerance."""
    if not reports:
        return AxiomReport(axiom="", trials=0, seed=seed)
    worst = max(reports, key=lambda r: r.margin)
    out = AxiomReport(
        axiom=worst.axiom,
        trials=sum(r.trials for r in reports),
        worst_violation=worst.worst_violation,
        tolerance=worst.tolerance,
        passed=all(r.passed for r in reports),
        failures=sum(r.failures for r in reports),
        seed=seed,
        lhs=worst.lhs,
        rhs=worst.rhs,
        witness=worst.witness,
        details={k: v for k, v in worst.details.items() if k not in ("lambdas", "volumes")},
    )
    return out


def random_symplectic(dof: int, rng: Rng) -> np.ndarray:
    """Product of random single-mode rotations, squeezes and shears and
    two-mode mixing rotations; every factor is exactly symplectic."""
    m = np.eye(2 * dof)
    for _ in range(2):
        for i in range(dof):
            th = 2.0 * math.pi * rng.uniform()
            r = math.exp(rng.uniform() - 0.5)
            sh = rng.uniform() - 0.5
            blk = (
                np.array([[math.cos(th), math.sin(th)], [-math.sin(th), math.cos(th)]])
                @ np.diag([r, 1.0 / r])
                @ np.array([[1.0, sh], [0.0, 1.0]])
            )
            step = np.eye(2 * dof)
            step[2 * i : 2 * i + 2, 2 * i : 2 * i + 2] = blk
            m = step @ m
        for i in range(dof):
            for j in range(i + 1, dof):
                th = 2.0 * math.pi * rng.uniform()
                c, s = math.cos(th), math.sin(th)
                step = np.eye(2 * dof)
                for a, b in ((2 * i, 2 * j), (2 * i + 1, 2 * j + 1)):
                    step[a, a] = c
                    step[a, b] = s
                    step[b, a] = -s
                    step[b, b] = c
                m = step @ m
    return m


def _dims(rng: Rng, lo: int, hi: int) -> int:
    return lo + rng.integer(hi - lo + 1)


def _random_joint(kind: str, rng: Rng, dims: tuple[int, int]) -> Ensemble:
    lo, hi = dims
    d1, d2 = _dims(rng, lo, hi), _dims(rng, lo, hi)
    if kind == "quantum":
        rank = 1 + rng.integer(d1 * d2)
        return random_density(d1 * d2, rank, rng, factor_dims=(d1, d2))
    if kind == "classical":
        sparsity = (0.0, 0.3, 0.6)[rng.integer(3)]
        return random_classical((d1, d2), rng, sparsity)
    g = GaussianEnsemble(rng.normals(2 * (d1 + d2)), random_covariance(d1 + d2, rng), (d1, d2))
    return g


def _random_single(kind: str, rng: Rng, dims: tuple[int, int]) -> Ensemble:
    lo, hi = dims
    d = _dims(rng, lo, hi)
    if kind == "quantum":
        return random_density(d, 1 + rng.integer(d), rng)
    if kind == "classical":
        return random_classical((d,), rng, (0.0, 0.3)[rng.integer(2)])
    return GaussianEnsemble(rng.normals(2 * d), random_covariance(d, rng))


def _random_transform(e: Ensemble, rng: Rng):
    if isinstance(e, DensityOperator):
        return random_unitary(e.dim, rng)
    if isinstance(e, ClassicalDistribution):
        return random_permutation(e.weights().size, rng)
    return random_symplectic(e.dof, rng)


def random_orthogonal_pair(dim: int, rng: Rng) -> tuple[DensityOperator, DensityOperator]:
    """Two density operators with orthogonal supports and equal spectra."""
    if dim < 2:
        raise ValidationError("random_orthogonal_pair: need dim >= 2")
    k = dim // 2
    r = 1 + rng.integer(k)
    w = -np.log(1.0 - rng.uniforms(r))
    w = w / w.sum()
    d1 = np.zeros(dim)
    d2 = np.zeros(dim)
    d1[:r] = w
    d2[k : k + r] = w[random_permutation(r, rng)]
    u = random_unitary(dim, rng)
    return (
        DensityOperator(u @ np.diag(d1) @ u.conj().T),
        DensityOperator(u @ np.diag(d2) @ u.conj().T),
    )


def _fuzz(axiom: str, trial: Callable[[Rng], AxiomReport], trials: int, seed: int) -> AxiomReport:
    reports = []
    for t in range(trials):
        ts = trial_seed(seed, t)
        rep = trial(Rng(ts))
        rep.details["trial"] = t
        rep.details["trial_seed"] = ts
        reports.append(rep)
    out = merge_reports(reports, seed)
    out.axiom = axiom
    return out


def fuzz_invariance(trials: int, seed: int, kind: str = "quantum", dims=(2, 4),
                    ctx: VolumeContext = DEFAULT_CONTEXT) -> AxiomReport:
    def trial(rng):
        e = _random_joint(kind, rng, dims)
        return check_invariance(e, _random_transform(e, rng), ctx)
    return _fuzz("i", trial, trials, seed)


def fuzz_cartesian(trials: int, seed: int, kind: str = "quantum", dims=(2, 4),
                   ctx: VolumeContext = DEFAULT_CONTEXT) -> AxiomReport:
    def trial(rng):
        return check_cartesian(_random_single(kind, rng, dims), _random_single(kind, rng, dims), ctx)
    return _fuzz("ii", trial, trials, seed)


def fuzz_projection(trials: int, seed: int, kind: str = "quantum", dims=(2, 4),
                    ctx: VolumeContext = DEFAULT_CONTEXT) -> AxiomReport:
    def trial(rng):
        return check_projection(_random_joint(kind, rng, dims), ctx)
    return _fuzz("iii", trial, trials, seed)


def fuzz_uniformity(trials: int, seed: int, dims=(2, 8), points: int = 101,
                    ctx: VolumeContext = DEFAULT_CONTEXT) -> AxiomReport:
    grid = default_grid(points)

    def trial(rng):
        e1, e2 = random_orthogonal_pair(_dims(rng, *dims), rng)
        return check_uniformity(e1, e2, grid, ctx)
    return _fuzz("iv", trial, trials, seed)


def fuzz(axiom: str, trials: int, seed: int, kind: str = "quantum", dims=None,
         ctx: VolumeContext = DEFAULT_CONTEXT) -> AxiomReport:
    """Dispatch to the fuzzer for ``axiom`` (``i``, ``ii``, ``iii`` or ``iv``)."""
    if axiom == "iv":
        return fuzz_uniformity(trials, seed, dims or (2, 8), ctx=ctx)
    table = {"i": fuzz_invariance, "ii": fuzz_cartesian, "iii": fuzz_projection}
    if axiom not in table:
        raise ValidationError(f"fuzz: unknown axiom {axiom!r}")
    if kind not in ("quantum", "classical", "gaussian"):
        raise ValidationError(f"fuzz: unknown ensemble kind {kind!r}")
    default = {"quantum": (2, 4), "classical": (2, 6), "gaussian": (1, 2)}[kind]
    return table[axiom](trials, seed, kind, dims or default, ctx)


def renyi_projection_violation_search(
    alpha: float, dims=(2, 2), trials: int = 100_000, seed: int = 0, kind: str = "classical",
    ctx: VolumeContext = DEFAULT_CONTEXT,
) -> AxiomReport:
    """Random search for joints with ``V_a(joint) > V_a(m1) V_a(m2)``.

    Reports the largest gap found; ``passed`` is True when a strictly
    positive gap (a counterexample) was found.  The classical search is
    batched: one SplitMix64 stream seeded with ``seed`` draws every joint.
    """
    alpha = check_alpha(alpha)
    d1, d2 = dims
    if kind == "classical":
        best, best_lhs, best_rhs, best_joint, count = _renyi_search_classical(alpha, d1, d2, trials, seed)
    elif kind == "quantum":
        best, best_lhs, best_rhs, best_joint, count = -math.inf, None, None, None, 0
        for t in range(trials):
            rng = Rng(trial_seed(seed, t))
            joint = random_density(d1 * d2, 1 + rng.integer(d1 * d2), rng, factor_dims=(d1, d2))
            lhs, rhs = renyi_projection_gap(joint, alpha)
            if lhs - rhs > 0.0:
                count += 1
            if lhs - rhs > best:
                best, best_lhs, best_rhs, best_joint = lhs - rhs, lhs, rhs, joint
    else:
        raise ValidationError(f"renyi search: unknown kind {kind!r}")

    if best_joint is None:
        return AxiomReport(axiom="renyi", trials=0, seed=seed, passed=False,
                           details={"alpha": alpha, "violations_found": 0, "kind": kind})
    # Re-evaluate the winner through the scalar path so the witness replays exactly.
    rep = check_renyi_projection(best_joint, alpha, ctx)
    found = rep.worst_violation > 0.0
    return AxiomReport(
        axiom="renyi", trials=trials, worst_violation=rep.worst_violation, tolerance=0.0,
        passed=found, failures=0, seed=seed, lhs=rep.lhs, rhs=rep.rhs, witness=rep.witness,
        details={"alpha": alpha, "violations_found": int(count), "kind": kind, "found": found},
    )


def _renyi_search_classical(alpha, d1, d2, trials, seed):
    rng = Rng(seed)
    n = d1 * d2
    best = (-math.inf, None, None, None)
    count = 0
    batch = 4096
    for start in range(0, trials, batch):
        m = min(batch, trials - start)
        w = -np.log(1.0 - rng.uniforms(m * n)).reshape(m, n)
        # a third of the draws get random zeros, which is where counterexamples live
        keep = rng.uniforms(m * n).reshape(m, n) >= np.repeat(
            np.array([0.0, 0.3, 0.6])[np.arange(m) % 3][:, None], n, axis=1)
        keep[~keep.any(axis=1), 0] = True
        w = w * keep
        p = (w / w.sum(axis=1, keepdims=True)).reshape(m, d1, d2)
        lhs = _renyi_vol_batch(p.reshape(m, n), alpha)
        rhs = _renyi_vol_batch(p.sum(axis=2), alpha) * _renyi_vol_batch(p.sum(axis=1), alpha)
        gap = lhs - rhs
        count += int(np.sum(gap > 0.0))
        k = int(np.argmax(gap))
        if gap[k] > best[0]:
            best = (float(gap[k]), float(lhs[k]), float(rhs[k]), ClassicalDistribution(p[k]))
    return best + (count,)


def _renyi_vol_batch(p: np.ndarray, alpha: float) -> np.ndarray:
    with np.errstate(divide="ignore"):
        s = np.sum(np.where(p > 0.0, p, 0.0) ** alpha, axis=1)
    return s ** (1.0 / (1.0 - alpha))
