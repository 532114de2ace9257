"""Gaussian diffusion volumes and semiclassical uncertainty relations.

Phase-space vectors are ordered ``(x_1, p_1, ..., x_n, p_n)`` as in
:mod:`ensvol.ensembles`.  The covariance of an Ornstein-Uhlenbeck process
``dz = A z dt + dW`` (noise covariance ``D dt``) obeys

    dS/dt = A S + S A^T + D,    dmu/dt = A mu,

which is integrated here with classical fixed-step RK4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ensembles import GaussianEnsemble
from .exceptions import NumericalError, ValidationError
from .information import BoundReport
from .numerics import dft, hermitian_eigen
from .volume import DEFAULT_CONTEXT, EntropyValue, VolumeContext, gaussian_entropy, log_volume

NORM_TOL = 1e-8
LEAKAGE = 1e-6
UNCERTAINTY_TOL = 1e-3


# -- Ornstein-Uhlenbeck evolution -------------------------------------------


@dataclass(frozen=True, eq=False)
class OuProcess:
    drift: np.ndarray
    diffusion: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.drift, dtype=float)
        d = np.asarray(self.diffusion, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] % 2:
            raise ValidationError(f"OuProcess: drift must be 2n x 2n, got {a.shape}")
        if d.shape != a.shape:
            raise ValidationError(f"OuProcess: diffusion shape {d.shape} does not match drift {a.shape}")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(d))):
            raise ValidationError("OuProcess: entries must be finite")
        if np.abs(d - d.T).max() > 1e-12 * max(1.0, np.abs(d).max()):
            raise ValidationError("OuProcess: diffusion symmetry check failed")
        d = 0.5 * (d + d.T)
        w = hermitian_eigen(d).eigenvalues
        if w[0] < -1e-12:
            raise ValidationError(f"OuProcess: diffusion must be positive semidefinite, min eigenvalue {w[0]:.3e}")
        object.__setattr__(self, "drift", a)
        object.__setattr__(self, "diffusion", d)
        object.__setattr__(self, "_min_diffusion", float(w[0]))

    @property
    def dim(self) -> int:
        return self.drift.shape[0]

    @property
    def diffusion_positive_definite(self) -> bool:
        return self._min_diffusion > 0.0

    @property
    def volume_nondecreasing(self) -> bool:
        """True when ``d ln det S / dt = 2 tr A + tr(S^-1 D)`` is positive for
        every state: ``tr A >= 0`` (free or Hamiltonian drift) and ``D > 0``."""
        return self.diffusion_positive_definite and np.trace(self.drift) >= 0.0


@dataclass
class Trajectory:
    times: np.ndarray
    states: list
    process: OuProcess

    def __len__(self):
        return len(self.states)


def _ou_rhs(a, d, cov, mean):
    return a @ cov + cov @ a.T + d, a @ mean


def ou_evolve(g: GaussianEnsemble, p: OuProcess, dt: float, steps: int) -> Trajectory:
    """Integrate the moment equations with RK4; returns ``steps + 1`` points.

    Raises NumericalError naming the step at which the covariance stops
    being positive definite (usually ``dt`` is too large).
    """
    if p.dim != 2 * g.dof:
        raise ValidationError(f"ou_evolve: process dimension {p.dim} vs ensemble dimension {2 * g.dof}")
    if not dt > 0 or steps < 0:
        raise ValidationError(f"ou_evolve: need dt > 0 and steps >= 0, got dt={dt}, steps={steps}")
    a, d = p.drift, p.diffusion
    cov, mean = g.covariance.copy(), g.mean.copy()
    states = [g]
    for k in range(1, steps + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            k1c, k1m = _ou_rhs(a, d, cov, mean)
            k2c, k2m = _ou_rhs(a, d, cov + 0.5 * dt * k1c, mean + 0.5 * dt * k1m)
            k3c, k3m = _ou_rhs(a, d, cov + 0.5 * dt * k2c, mean + 0.5 * dt * k2m)
            k4c, k4m = _ou_rhs(a, d, cov + dt * k3c, mean + dt * k3m)
            cov = cov + dt / 6.0 * (k1c + 2.0 * k2c + 2.0 * k3c + k4c)
            mean = mean + dt / 6.0 * (k1m + 2.0 * k2m + 2.0 * k3m + k4m)
        if not (np.isfinite(cov).all() and np.isfinite(mean).all() and np.abs(cov).max() < 1e150):
            raise NumericalError(f"ou_evolve: step {k} (t={k * dt:g}) diverged; reduce dt")
        cov = 0.5 * (cov + cov.T)
        try:
            states.append(GaussianEnsemble(mean, cov, g.factor_dofs, g.spaces))
        except ValidationError as exc:
            raise NumericalError(f"ou_evolve: step {k} (t={k * dt:g}) lost positive definiteness: {exc}") from exc
    return Trajectory(np.arange(steps + 1) * dt, states, p)


@dataclass
class VolumeSeries:
    times: np.ndarray
    volumes: np.ndarray
    log_volumes: np.ndarray
    monotone_checked: bool
    monotone: bool | None

    def pairs(self) -> list[tuple[float, float]]:
        return list(zip(self.times.tolist(), self.volumes.tolist()))


def volume_trajectory(traj: Trajectory, ctx: VolumeContext = DEFAULT_CONTEXT) -> VolumeSeries:
    """Volumes ``K (2 pi e)^n sqrt(det S)`` along a trajectory.

    When the process must increase the volume (``D > 0`` and ``tr A >= 0``)
    every step is checked for strict increase, allowing 1e-12 relative
    roundoff.  Otherwise the series is only reported.
    """
    logs = np.array([log_volume(s, ctx) for s in traj.states])
    checked = traj.process.volume_nondecreasing
    monotone = None
    if checked:
        monotone = bool(np.all(np.diff(logs) > -1e-12)) and bool(np.all(np.diff(np.exp(logs)) > 0.0)) \
            if len(logs) > 1 else True
    return VolumeSeries(traj.times, np.exp(logs), logs, checked, monotone)


def ellipsoid_constant(dof: int) -> float:
    """``K`` that makes the volume equal the distribution-ellipsoid volume.

    The ellipsoid ``z^T S^-1 z <= 1`` in ``2n`` dimensions has volume
    ``pi^n / n! * sqrt(det S)``, so ``K = 1 / (n! (2e)^n)``.
    """
    return 1.0 / (math.factorial(dof) * (2.0 * math.e) ** dof)


def ellipsoid_volume(g: GaussianEnsemble) -> float:
    return math.pi**g.dof / math.factorial(g.dof) * math.sqrt(float(np.prod(g.covariance_eigenvalues)))


def position_momentum_split(g: GaussianEnsemble) -> BoundReport:
    """``exp(S_X) exp(S_P) >= exp(S)`` for the position and momentum marginals.

    For a Gaussian this is Fischer's inequality ``det S <= det S_XX det S_PP``
    (Hadamard's ``det S <= S_xx S_pp`` when n = 1).  Reported in log form:
    ``lhs = S_X + S_P``, ``rhs = S``.
    """
    n = g.dof
    xi = np.arange(0, 2 * n, 2)
    pi_ = xi + 1
    cov = g.covariance
    sxx = cov[np.ix_(xi, xi)]
    spp = cov[np.ix_(pi_, pi_)]
    c = 0.5 * n * math.log(2.0 * math.pi * math.e)
    s_x = c + 0.5 * float(np.sum(np.log(hermitian_eigen(sxx).eigenvalues)))
    s_p = c + 0.5 * float(np.sum(np.log(hermitian_eigen(spp).eigenvalues)))
    s = float(gaussian_entropy(g))
    det = float(np.prod(g.covariance_eigenvalues))
    prod = float(np.prod(hermitian_eigen(sxx).eigenvalues) * np.prod(hermitian_eigen(spp).eigenvalues))
    return BoundReport(
        "position_momentum_split", lhs=s_x + s_p, rhs=s, direction=">=", tolerance=1e-12,
        details={"S_X": s_x, "S_P": s_p, "det": det, "marginal_det_product": prod},
    )


def hadamard_holds(cov, rtol: float = 1e-12) -> bool:
    """``det S <= S_xx S_pp`` for a 2x2 block, to ``rtol`` relative."""
    cov = np.asarray(cov, dtype=float)
    det = cov[0, 0] * cov[1, 1] - cov[0, 1] * cov[1, 0]
    bound = cov[0, 0] * cov[1, 1]
    return det <= bound * (1.0 + rtol)


# -- quantum / classical correspondence -------------------------------------


@dataclass(frozen=True)
class ThermalOscillator:
    omega: float
    kT: float
    mass: float = 1.0
    hbar: float = 1.0
    dof: int = 1

    def __post_init__(self):
        for name in ("omega", "kT", "mass", "hbar"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValidationError(f"ThermalOscillator: {name} must be a positive real, got {v!r}")
        if self.dof < 1:
            raise ValidationError(f"ThermalOscillator: dof must be >= 1, got {self.dof}")

    def classical_entropy(self) -> float:
        """Per degree of freedom; ``dx dp = kT / omega`` for the classical Gibbs state."""
        return math.log(2.0 * math.pi * math.e * self.kT / self.omega)

    def mean_occupation(self) -> float:
        return 1.0 / math.expm1(self.hbar * self.omega / self.kT)

    def quantum_entropy(self) -> float:
        """Bose entropy ``(n+1) ln(n+1) - n ln n`` per degree of freedom."""
        nbar = self.mean_occupation()
        return math.log1p(nbar) + nbar * math.log1p(1.0 / nbar)


def correspondence_ratio(osc: ThermalOscillator) -> float:
    """``exp(S_C) / exp(S_Q)`` for isotropic thermal oscillators.

    Tends to ``h**dof = (2 pi hbar)**dof`` at high temperature, which fixes
    the pure-state volume of the quantum space relative to the classical one.
    """
    return math.exp(osc.dof * (osc.classical_entropy() - osc.quantum_entropy()))


def correspondence_sweep(ratios, hbar: float = 1.0, omega: float = 1.0) -> list[tuple[float, float]]:
    """``(kT / hbar omega, ratio)`` pairs."""
    return [
        (float(r), correspondence_ratio(ThermalOscillator(omega=omega, kT=r * hbar * omega, hbar=hbar)))
        for r in ratios
    ]


# -- grid wavefunctions ------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GridWavefunction:
    """Amplitudes ``psi(x0 + j * spacing)`` with ``sum |psi|^2 spacing = 1``."""

    samples: np.ndarray
    spacing: float
    hbar: float = 1.0
    x0: float = 0.0

    def __post_init__(self):
        psi = np.asarray(self.samples, dtype=np.complex128).ravel()
        if psi.size < 2 or not np.all(np.isfinite(psi)):
            raise ValidationError("wavefunction: need at least two finite samples")
        if not (self.spacing > 0 and self.hbar > 0):
            raise ValidationError("wavefunction: spacing and hbar must be positive")
        norm = float(np.sum(np.abs(psi) ** 2) * self.spacing)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValidationError(f"wavefunction: normalization check failed, sum|psi|^2 dx = {float(norm)!r}")
        psi.setflags(write=False)
        object.__setattr__(self, "samples", psi)

    @property
    def n(self) -> int:
        return self.samples.size

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.spacing * np.arange(self.n)

    @property
    def momentum_spacing(self) -> float:
        return 2.0 * math.pi * self.hbar / (self.n * self.spacing)

    @classmethod
    def from_function(cls, f, x: np.ndarray, hbar: float = 1.0) -> "GridWavefunction":
        dx = float(x[1] - x[0])
        psi = np.asarray(f(x), dtype=np.complex128)
        psi = psi / math.sqrt(float(np.sum(np.abs(psi) ** 2)) * dx)
        return cls(psi, dx, hbar, float(x[0]))


def _grid(half_width: float, n: int, center: float = 0.0) -> np.ndarray:
    # symmetric grid, last point excluded so the DFT sees a periodic lattice
    return center - half_width + (2.0 * half_width / n) * np.arange(n)


def gaussian_packet(sigma: float, n: int = 1024, hbar: float = 1.0, center: float = 0.0,
                    k0: float = 0.0, half_width: float | None = None) -> GridWavefunction:
    """Minimum-uncertainty packet with position spread ``sigma`` (``|psi|^2``
    has standard deviation ``sigma``) and mean momentum ``hbar * k0``."""
    if not sigma > 0:
        raise ValidationError(f"gaussian_packet: sigma must be positive, got {sigma!r}")
    hw = 10.0 * sigma if half_width is None else half_width
    x = _grid(hw, n, center)
    return GridWavefunction.from_function(
        lambda x: np.exp(-((x - center) ** 2) / (4.0 * sigma**2) + 1j * k0 * x), x, hbar)


def two_peak_packet(sigma: float, separation: float, n: int = 1024, hbar: float = 1.0) -> GridWavefunction:
    """Equal superposition of two packets centred at ``+-separation / 2``."""
    hw = separation / 2.0 + 10.0 * sigma
    x = _grid(hw, n)

    def f(x):
        return (np.exp(-((x - separation / 2) ** 2) / (4 * sigma**2))
                + np.exp(-((x + separation / 2) ** 2) / (4 * sigma**2)))
    return GridWavefunction.from_function(f, x, hbar)


def check_leakage(w: GridWavefunction, tol: float = LEAKAGE) -> None:
    amp = np.abs(w.samples)
    edge = max(amp[0], amp[-1])
    if edge >= tol * amp.max():
        raise ValidationError(
            f"wavefunction: boundary-leakage check failed, edge amplitude {edge:.3e} "
            f">= {tol:g} x max {amp.max():.3e}; widen the grid"
        )


@dataclass
class Marginals:
    x: np.ndarray
    px: np.ndarray
    p: np.ndarray
    pp: np.ndarray
    dx: float
    dp: float


def marginals(w: GridWavefunction) -> Marginals:
    """Position and momentum densities on centred grids.

    ``phi(p_k) = dx / sqrt(2 pi hbar) sum_j psi_j exp(-i p_k x_j / hbar)``
    evaluated with the unitary DFT, ``p_k = 2 pi hbar k / (N dx)`` with
    ``k`` running over ``-N/2 .. N/2 - 1``.
    """
    check_leakage(w)
    n, dx = w.n, w.spacing
    phi = dft(w.samples, -1)
    pp = np.abs(phi) ** 2 * (dx * dx * n / (2.0 * math.pi * w.hbar))
    k = np.arange(n)
    k = np.where(k < (n + 1) // 2, k, k - n)
    order = np.argsort(k, kind="stable")
    dp = w.momentum_spacing
    pp = pp[order]
    amp = np.sqrt(pp)
    if max(amp[0], amp[-1]) >= LEAKAGE * amp.max():
        raise ValidationError("wavefunction: momentum-grid leakage check failed; refine the spacing")
    return Marginals(w.x, np.abs(w.samples) ** 2, k[order] * dp, pp, dx, dp)


def _differential_entropy(density: np.ndarray, step: float) -> float:
    d = density[density > 0.0]
    return float(-np.sum(d * np.log(d)) * step)


def position_momentum_entropies(w: GridWavefunction) -> tuple[EntropyValue, EntropyValue]:
    """Differential entropies of ``|psi(x)|^2`` and ``|phi(p)|^2`` (Riemann sums)."""
    m = marginals(w)
    return EntropyValue(_differential_entropy(m.px, m.dx)), EntropyValue(_differential_entropy(m.pp, m.dp))


def _spread(grid: np.ndarray, density: np.ndarray, step: float) -> float:
    mean = float(np.sum(grid * density) * step)
    return math.sqrt(float(np.sum((grid - mean) ** 2 * density) * step))


def entropic_uncertainty_check(w: GridWavefunction) -> BoundReport:
    """``S_X + S_P >~ ln(2 pi hbar)`` for one degree of freedom.

    The relation is semiclassical, so only slack below ``-1e-3`` counts as a
    failure.
    """
    s_x, s_p = position_momentum_entropies(w)
    return BoundReport(
        "entropic_uncertainty", lhs=s_x + s_p, rhs=math.log(2.0 * math.pi * w.hbar), direction=">=",
        tolerance=UNCERTAINTY_TOL, details={"S_X": float(s_x), "S_P": float(s_p)},
    )


def heisenberg_from_entropy(w: GridWavefunction) -> BoundReport:
    """``dx dp >~ hbar / e``, with the entropy-implied lower bound alongside.

    A Gaussian maximizes entropy at fixed variance, so
    ``dx >= exp(S_X) / sqrt(2 pi e)`` and likewise for ``dp``; hence
    ``dx dp >= exp(S_X + S_P) / (2 pi e)``, which is ``>~ hbar / e`` when
    the entropic relation holds.
    """
    m = marginals(w)
    s_x = _differential_entropy(m.px, m.dx)
    s_p = _differential_entropy(m.pp, m.dp)
    dx = _spread(m.x, m.px, m.dx)
    dp = _spread(m.p, m.pp, m.dp)
    entropy_bound = math.exp(s_x + s_p) / (2.0 * math.pi * math.e)
    return BoundReport(
        "heisenberg", lhs=dx * dp, rhs=w.hbar / math.e, direction=">=", tolerance=UNCERTAINTY_TOL,
        units="action",
        details={"delta_x": dx, "delta_p": dp, "entropy_bound": entropy_bound,
                 "moment_vs_entropy_slack": dx * dp - entropy_bound},
    )
