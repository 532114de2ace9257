"""``ensvol`` command-line interface.

Every command prints one JSON run report on stdout.  Exit codes: 0 ok,
1 an inequality/axiom check failed, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from . import axioms, documents, information, semiclassical
from .ensembles import GaussianEnsemble, SignalEnsemble, mix
from .exceptions import NumericalError, UnsupportedOperationError, ValidationError
from .numerics import Rng
from .volume import (
    VolumeContext,
    entropy,
    log_volume,
    renyi_entropy,
    renyi_volume,
    thermodynamic_entropy,
)

EXIT_OK, EXIT_CHECK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


class _Failure(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _default_seed() -> int:
    raw = os.environ.get("ENSVOL_SEED")
    if raw is None:
        return 0
    try:
        return int(raw, 0)
    except ValueError:
        raise _Failure(EXIT_INPUT, f"ENSVOL_SEED must be an integer, got {raw!r}")


def _context(args) -> VolumeContext:
    ks = {}
    for item in getattr(args, "k", None) or []:
        label, sep, value = item.partition("=")
        if not sep:
            raise _Failure(EXIT_INPUT, f"--k expects label=value, got {item!r}")
        try:
            ks[label] = float(value)
        except ValueError:
            raise _Failure(EXIT_INPUT, f"--k value for {label!r} is not a number: {value!r}")
    default = None if getattr(args, "strict_k", False) else 1.0
    return VolumeContext(ks, getattr(args, "hbar", 1.0), default)


def _load(path, kinds=None):
    obj = documents.load(path)
    if kinds is not None:
        kind = "signal" if isinstance(obj, SignalEnsemble) else getattr(obj, "kind", "wavefunction")
        if kind not in kinds:
            raise ValidationError(f"{path}: expected a {' or '.join(kinds)} document, got {kind}")
    return obj


def _json_matrix(text: str, name: str) -> np.ndarray:
    try:
        return np.asarray(json.loads(text), dtype=float)
    except (json.JSONDecodeError, TypeError, ValueError):
        raise ValidationError(f"{name}: expected a JSON matrix such as [[0,1],[-1,0]]")


# -- commands ----------------------------------------------------------------


def cmd_entropy(args):
    e = _load(args.input)
    if args.alpha is not None:
        s = renyi_entropy(e, args.alpha)
    else:
        s = entropy(e)
    unit = "bits" if args.bits else "nats"
    return {"entropy": s.value(unit), "units": unit, "alpha": args.alpha, "kind": e.kind}, {}


def cmd_volume(args):
    e = _load(args.input, ("classical", "quantum", "gaussian"))
    ctx = _context(args)
    lv = log_volume(e, ctx)
    res = {
        "kind": e.kind,
        "volume": math.exp(lv),
        "log_volume": lv,
        "K": ctx.k_for(e),
        "entropy_nats": float(entropy(e)),
    }
    if args.alpha is not None:
        res["renyi_volume"] = renyi_volume(e, args.alpha, ctx)
        res["alpha"] = args.alpha
    th = thermodynamic_entropy(e, ctx, args.kb)
    res["thermodynamic_entropy"] = th.entropy
    res["microstate_count"] = th.microstate_count
    return res, {}


def cmd_chi(args):
    s = _load(args.input, ("signal",))
    chi = information.holevo_chi(s)
    lr = information.lanford_robinson(s)
    rate = information.information_rate_bound(s)
    res = {
        "chi_nats": chi.nats,
        "chi_bits": chi.bits,
        "prior_entropy_nats": lr.rhs,
        "lanford_robinson": lr.to_dict(),
        "information_rate": rate.to_dict(),
    }
    return res, {"lanford_robinson": lr.passed, "chi_nonnegative": chi.nats >= -1e-10}


def cmd_bounds(args):
    s = _load(args.input, ("signal",))
    ctx = _context(args)
    seed = args.seed
    rho = mix(s)
    v0 = args.v0 if args.v0 is not None else ctx.k_for(rho)
    res = {
        "single_measurement": information.single_measurement_bound(rho, v0, ctx).to_dict(),
        "information_rate": information.information_rate_bound(s).to_dict(),
        "lanford_robinson": information.lanford_robinson(s).to_dict(),
    }
    checks = {"lanford_robinson": information.lanford_robinson(s).passed}
    L = args.block_length
    lt = information.log_typical_volume(s, L, ctx)
    tc = information.typical_count(s.priors, L)
    res["typical"] = {"L": L, "log_volume": lt, "log_count": tc.log_count}
    codes = []
    try:
        codes.append(("type_class", information.type_class_code(s, L)))
    except ValidationError:
        pass
    rng = Rng(seed)
    for i in range(args.codes):
        codes.append((f"random_{i}", information.random_block_code(s, L, rng)))
    blocks = []
    for name, code in codes:
        b = information.block_volume_bounds(code, ctx)
        blocks.append({"code": name, "blocks": [list(x) for x in code.blocks],
                       "block_priors": code.block_priors.tolist(), **b.to_dict()})
    res["block_bounds"] = blocks
    checks["block_chain"] = all(b["passed"] for b in blocks)
    return res, checks


def cmd_gaussian(args):
    g = _load(args.input, ("gaussian",))
    ctx = _context(args)
    split = semiclassical.position_momentum_split(g)
    res = {
        "dof": g.dof,
        "entropy_nats": float(entropy(g)),
        "volume": math.exp(log_volume(g, ctx)),
        "ellipsoid_volume": semiclassical.ellipsoid_volume(g),
        "position_momentum_split": split.to_dict(),
    }
    checks = {"position_momentum_split": split.passed}
    if args.steps:
        n2 = 2 * g.dof
        a = _json_matrix(args.drift, "--drift") if args.drift else np.zeros((n2, n2))
        d = _json_matrix(args.diffusion, "--diffusion") if args.diffusion else np.zeros((n2, n2))
        traj = semiclassical.ou_evolve(g, semiclassical.OuProcess(a, d), args.dt, args.steps)
        vs = semiclassical.volume_trajectory(traj, ctx)
        res["trajectory"] = {
            "times": vs.times.tolist(),
            "volumes": vs.volumes.tolist(),
            "monotone_checked": vs.monotone_checked,
            "monotone": vs.monotone,
            "final_covariance": traj.states[-1].covariance.tolist(),
        }
        if vs.monotone_checked:
            checks["volume_increasing"] = bool(vs.monotone)
    return res, checks


def cmd_uncertainty(args):
    if args.input:
        w = _load(args.input, ("wavefunction",))
    elif args.two_peak is not None:
        w = semiclassical.two_peak_packet(args.sigma, args.two_peak, args.grid, args.hbar)
    else:
        w = semiclassical.gaussian_packet(args.sigma, args.grid, args.hbar)
    ent = semiclassical.entropic_uncertainty_check(w)
    heis = semiclassical.heisenberg_from_entropy(w)
    res = {"grid": w.n, "hbar": w.hbar, "entropic": ent.to_dict(), "heisenberg": heis.to_dict()}
    return res, {"entropic": ent.passed, "heisenberg": heis.passed}


def cmd_correspondence(args):
    ratios = args.ratio_at or ([10.0, 100.0, 1e3, 1e4] if args.sweep else [1e4])
    pts = []
    for r in ratios:
        osc = semiclassical.ThermalOscillator(omega=args.omega, kT=r * args.hbar * args.omega,
                                              hbar=args.hbar, dof=args.dof)
        pts.append({"kT_over_hbar_omega": r, "ratio": semiclassical.correspondence_ratio(osc)})
    limit = (2.0 * math.pi * args.hbar) ** args.dof
    res = {"points": pts, "limit_h_pow_n": limit}
    vals = [p["ratio"] for p in pts]
    checks = {"bounded_by_limit": all(v <= limit * (1 + 1e-3) for v in vals)}
    if len(vals) > 1 and list(ratios) == sorted(ratios):
        checks["monotone"] = all(b >= a for a, b in zip(vals, vals[1:]))
    return res, checks


def _parse_dims(text):
    if text is None:
        return None
    for sep in (":", "x", ","):
        if sep in text:
            a, b = text.split(sep, 1)
            try:
                return int(a), int(b)
            except ValueError:
                break
    raise ValidationError(f"--dims expects 'lo:hi' or 'AxB', got {text!r}")


def cmd_fuzz(args):
    seed = args.seed
    if args.axiom == "renyi":
        dims = _parse_dims(args.dims) or (2, 2)
        kind = args.kind or "classical"
        if args.trials == 0:
            rep = axioms.AxiomReport(axiom="renyi", trials=0, seed=seed, passed=True)
            return {"report": rep.to_dict()}, {}
        rep = axioms.renyi_projection_violation_search(args.alpha, dims, args.trials, seed, kind)
        return {"report": rep.to_dict()}, {"violation_found": rep.passed}
    rep = axioms.fuzz(args.axiom, args.trials, seed, args.kind or "quantum", _parse_dims(args.dims))
    if args.trials == 0:
        rep.axiom = args.axiom
    return {"report": rep.to_dict()}, {"axiom_" + args.axiom: rep.passed}


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ensvol", description="Ensemble volumes, entropies and information bounds.")
    p.add_argument("--version", action="version", version=f"ensvol {__version__}")
    p.add_argument("-o", "--output", help="write the report here instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)

    def ctx_flags(sp):
        sp.add_argument("--k", action="append", metavar="LABEL=VALUE", help="volume constant for a space label")
        sp.add_argument("--hbar", type=float, default=1.0)
        sp.add_argument("--strict-k", action="store_true", help="unregistered space labels are an error")

    sp = sub.add_parser("entropy", help="Shannon / von Neumann / Gaussian / Renyi entropy")
    sp.add_argument("input")
    sp.add_argument("--bits", action="store_true")
    sp.add_argument("--alpha", type=float)
    sp.set_defaults(func=cmd_entropy)

    sp = sub.add_parser("volume", help="ensemble volume K exp(S)")
    sp.add_argument("input")
    sp.add_argument("--alpha", type=float, help="also report the Renyi volume of this order")
    sp.add_argument("--kb", type=float, default=1.0, help="Boltzmann constant for thermodynamic entropy")
    ctx_flags(sp)
    sp.set_defaults(func=cmd_volume)

    sp = sub.add_parser("chi", help="Holevo quantity and Lanford-Robinson check")
    sp.add_argument("input")
    sp.set_defaults(func=cmd_chi)

    sp = sub.add_parser("bounds", help="single-measurement, typical-set and block-code bounds")
    sp.add_argument("input")
    sp.add_argument("--block-length", "-L", type=int, default=2)
    sp.add_argument("--codes", type=int, default=3, help="number of random frequency-constrained codes")
    sp.add_argument("--v0", type=float, help="minimum signal volume (default: pure-state K)")
    sp.add_argument("--seed", type=int)
    ctx_flags(sp)
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("gaussian", help="Gaussian volume and Ornstein-Uhlenbeck trajectories")
    sp.add_argument("input")
    sp.add_argument("--drift", help="JSON matrix A")
    sp.add_argument("--diffusion", help="JSON matrix D")
    sp.add_argument("--dt", type=float, default=0.01)
    sp.add_argument("--steps", type=int, default=0)
    ctx_flags(sp)
    sp.set_defaults(func=cmd_gaussian)

    sp = sub.add_parser("uncertainty", help="position/momentum entropies of a grid wavefunction")
    sp.add_argument("input", nargs="?", help="wavefunction document (default: generated packet)")
    sp.add_argument("--sigma", type=float, default=1.0)
    sp.add_argument("--grid", type=int, default=1024)
    sp.add_argument("--hbar", type=float, default=1.0)
    sp.add_argument("--two-peak", type=float, metavar="SEPARATION")
    sp.set_defaults(func=cmd_uncertainty)

    sp = sub.add_parser("correspondence", help="classical/quantum thermal volume ratio")
    sp.add_argument("--ratio-at", type=float, action="append", metavar="KT_OVER_HBAR_OMEGA")
    sp.add_argument("--sweep", action="store_true")
    sp.add_argument("--hbar", type=float, default=1.0)
    sp.add_argument("--omega", type=float, default=1.0)
    sp.add_argument("--dof", type=int, default=1)
    sp.set_defaults(func=cmd_correspondence)

    sp = sub.add_parser("fuzz", help="seeded axiom fuzzing")
    sp.add_argument("--axiom", required=True, choices=["i", "ii", "iii", "iv", "renyi"])
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--kind", choices=["quantum", "classical", "gaussian"])
    sp.add_argument("--dims", help="factor dimension range lo:hi (renyi: AxB)")
    sp.add_argument("--alpha", type=float, default=2.0)
    sp.set_defaults(func=cmd_fuzz)
    return p


def _resolve_seed(args):
    if hasattr(args, "seed"):
        if args.seed is None:
            args.seed = _default_seed()
        return args.seed
    return None


def run(argv=None) -> tuple[int, dict | None, str | None]:
    """Run the CLI; returns ``(exit_code, report, error_message)``."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        seed = _resolve_seed(args)
        if args.command == "fuzz" and args.trials < 0:
            raise ValidationError("--trials must be >= 0")
        results, checks = args.func(args)
    except _Failure as exc:
        return exc.code, None, str(exc)
    except (ValidationError, UnsupportedOperationError, OSError) as exc:
        return EXIT_INPUT, None, f"invalid input: {exc}"
    except NumericalError as exc:
        return EXIT_NUMERIC, None, f"numerical failure: {exc}"
    passed = all(checks.values())
    report = {
        "tool": "ensvol",
        "version": __version__,
        "command": argv,
        "seed": seed,
        "results": results,
        "checks": checks,
        "passed": passed,
    }
    return (EXIT_OK if passed else EXIT_CHECK), report, None


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    code, report, error = run(argv)
    if error is not None:
        print(f"ensvol: error: {error}", file=sys.stderr)
        return code
    text = documents.dumps(report) + "\n"
    out = build_parser().parse_args(argv).output
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if code == EXIT_CHECK:
        failed = [k for k, v in report["checks"].items() if not v]
        print(f"ensvol: check failed: {', '.join(failed)}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
