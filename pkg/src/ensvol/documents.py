"""JSON documents for ensembles, matrices and volume contexts.

Complex numbers are written as ``[re, im]`` pairs.  Floats go through
Python's shortest round-trip ``repr``, so a document read back yields
bit-identical arrays.  The schema lives in ``ensvol/data/ensemble.schema.json``.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import numpy as np

from .ensembles import (
    ClassicalDistribution,
    DensityOperator,
    GaussianEnsemble,
    SignalEnsemble,
)
from .exceptions import ValidationError
from .semiclassical import GridWavefunction
from .volume import VolumeContext

KINDS = ("classical", "quantum", "gaussian", "signal", "wavefunction")


def complex_to_json(a) -> list:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [complex_to_json(x) for x in a]


def complex_from_json(x, name: str = "matrix", ndim: int | None = None) -> np.ndarray:
    """Inverse of :func:`complex_to_json`; ``ndim`` is the expected complex rank."""
    try:
        arr = np.asarray(x, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{name}: complex entries must be [re, im] number pairs") from exc
    if arr.ndim == 0 or arr.shape[-1] != 2 or (ndim is not None and arr.ndim != ndim + 1):
        raise ValidationError(f"{name}: complex entries must be [re, im] number pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def _real_array(x, name: str) -> np.ndarray:
    try:
        return np.asarray(x, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{name}: expected a (nested) list of numbers") from exc


def _spaces_out(e) -> dict:
    if all(s is None for s in e.spaces):
        return {}
    return {"spaces": list(e.spaces)}


def to_document(e) -> dict:
    """Serialize an ensemble (or signal ensemble) to a JSON-ready dict."""
    if isinstance(e, ClassicalDistribution):
        return {"kind": "classical", "axes": list(e.axes), "probabilities": e.probabilities.tolist(), **_spaces_out(e)}
    if isinstance(e, DensityOperator):
        return {
            "kind": "quantum",
            "factor_dims": list(e.factor_dims),
            "matrix": complex_to_json(e.matrix),
            **_spaces_out(e),
        }
    if isinstance(e, GaussianEnsemble):
        return {
            "kind": "gaussian",
            "dof": e.dof,
            "factor_dofs": list(e.factor_dofs),
            "mean": e.mean.tolist(),
            "covariance": e.covariance.tolist(),
            **_spaces_out(e),
        }
    if isinstance(e, SignalEnsemble):
        return {"kind": "signal", "states": [to_document(s) for s in e.states], "priors": e.priors.tolist()}
    if isinstance(e, GridWavefunction):
        return {"kind": "wavefunction", "samples": complex_to_json(e.samples), "spacing": e.spacing,
                "hbar": e.hbar, "x0": e.x0}
    raise ValidationError(f"cannot serialize object of type {type(e).__name__}")


def from_document(doc: dict):
    """Build an ensemble from a document; validation matches the constructors."""
    if not isinstance(doc, dict):
        raise ValidationError("document: top level must be a JSON object")
    kind = doc.get("kind")
    spaces = doc.get("spaces")
    if kind == "classical":
        if "probabilities" not in doc:
            raise ValidationError("classical document: missing 'probabilities'")
        p = _real_array(doc["probabilities"], "probabilities")
        if "axes" in doc and tuple(doc["axes"]) != p.shape:
            raise ValidationError(f"classical document: axes {doc['axes']} disagree with tensor shape {p.shape}")
        return ClassicalDistribution(p, spaces)
    if kind == "quantum":
        dims = doc.get("factor_dims")
        if "matrix" in doc:
            return DensityOperator(complex_from_json(doc["matrix"], "matrix", 2), dims, spaces)
        if "vector" in doc:
            return DensityOperator.pure(complex_from_json(doc["vector"], "vector", 1), dims, spaces)
        raise ValidationError("quantum document: needs 'matrix' or 'vector'")
    if kind == "gaussian":
        if "covariance" not in doc:
            raise ValidationError("gaussian document: missing 'covariance'")
        cov = _real_array(doc["covariance"], "covariance")
        mean = _real_array(doc["mean"], "mean") if "mean" in doc else None
        g = GaussianEnsemble(mean, cov, doc.get("factor_dofs"), spaces)
        if "dof" in doc and int(doc["dof"]) != g.dof:
            raise ValidationError(f"gaussian document: dof {doc['dof']} disagrees with covariance size")
        return g
    if kind == "signal":
        states = doc.get("states")
        if not isinstance(states, list):
            raise ValidationError("signal document: 'states' must be a list of documents")
        return SignalEnsemble(tuple(from_document(s) for s in states), doc.get("priors", []))
    if kind == "wavefunction":
        for key in ("samples", "spacing"):
            if key not in doc:
                raise ValidationError(f"wavefunction document: missing {key!r}")
        return GridWavefunction(complex_from_json(doc["samples"], "samples", 1), float(doc["spacing"]),
                                float(doc.get("hbar", 1.0)), float(doc.get("x0", 0.0)))
    raise ValidationError(f"document: unknown kind {kind!r} (expected one of {', '.join(KINDS)})")


def context_to_json(ctx: VolumeContext) -> dict:
    return {"k_constants": dict(ctx.k_constants), "hbar": ctx.hbar, "default_k": ctx.default_k}


def context_from_json(d: dict | None) -> VolumeContext:
    if not d:
        return VolumeContext()
    return VolumeContext(d.get("k_constants", {}), d.get("hbar", 1.0), d.get("default_k", 1.0))


def load(path) -> object:
    """Read and validate an ensemble document from ``path``."""
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from exc
    return from_document(doc)


def _plain(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"Object of type {type(o).__name__} is not JSON serializable")


def dumps(obj) -> str:
    """Deterministic JSON text: sorted keys, no timestamps."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False, default=_plain)


def schema() -> dict:
    return json.loads(resources.files("ensvol.data").joinpath("ensemble.schema.json").read_text())
