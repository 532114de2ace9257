import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ensvol.ensembles import GaussianEnsemble, random_covariance
from ensvol.exceptions import NumericalError, ValidationError
from ensvol.numerics import Rng
from ensvol.semiclassical import (
    GridWavefunction,
    OuProcess,
    ThermalOscillator,
    check_leakage,
    correspondence_ratio,
    correspondence_sweep,
    ellipsoid_constant,
    ellipsoid_volume,
    entropic_uncertainty_check,
    gaussian_packet,
    hadamard_holds,
    heisenberg_from_entropy,
    marginals,
    ou_evolve,
    position_momentum_entropies,
    position_momentum_split,
    two_peak_packet,
    volume_trajectory,
)
from ensvol.volume import volume

ROTATION = np.array([[0.0, 1.0], [-1.0, 0.0]])


# -- Ornstein-Uhlenbeck ----------------------------------------------------------


def test_pure_diffusion_closed_form():
    g = GaussianEnsemble.isotropic(1.0)
    traj = ou_evolve(g, OuProcess(np.zeros((2, 2)), np.eye(2)), 0.01, 100)
    np.testing.assert_allclose(traj.states[-1].covariance, 2 * np.eye(2), atol=1e-8)
    vs = volume_trajectory(traj)
    assert abs(vs.volumes[-1] / vs.volumes[0] - 2.0) < 1e-6
    assert vs.monotone_checked and vs.monotone
    assert np.all(np.diff(vs.volumes) > 0)


@given(st.floats(0.1, 3.0), st.integers(0, 2**32))
def test_linear_diffusion_matches_sigma0_plus_dt(t, seed):
    rng = Rng(seed)
    s0, d = random_covariance(1, rng), random_covariance(1, rng)
    steps = 50
    traj = ou_evolve(GaussianEnsemble(None, s0), OuProcess(np.zeros((2, 2)), d), t / steps, steps)
    np.testing.assert_allclose(traj.states[-1].covariance, s0 + d * t, atol=1e-10)


def test_rotation_preserves_determinant():
    g = GaussianEnsemble(None, np.diag([2.0, 0.5]))
    traj = ou_evolve(g, OuProcess(1.5 * ROTATION, np.zeros((2, 2))), 0.01, 200)
    dets = [np.linalg.det(s.covariance) for s in traj.states]
    assert max(abs(d - 1.0) for d in dets) < 1e-8


def test_rotation_matches_exact_flow():
    s0 = np.diag([2.0, 0.5])
    t = 1.0
    traj = ou_evolve(GaussianEnsemble(None, s0), OuProcess(ROTATION, np.zeros((2, 2))), 0.01, 100)
    # dS/dt = A S + S A^T  =>  S(t) = e^{At} S0 e^{A^T t}; e^{At} is a rotation
    r = np.array([[math.cos(t), math.sin(t)], [-math.sin(t), math.cos(t)]])
    np.testing.assert_allclose(traj.states[-1].covariance, r @ s0 @ r.T, atol=1e-8)


def test_monotonicity_only_asserted_when_implied():
    g = GaussianEnsemble.isotropic(1.0)
    vs = volume_trajectory(ou_evolve(g, OuProcess(-np.eye(2), 0.1 * np.eye(2)), 0.01, 10))
    assert not vs.monotone_checked


def test_ou_validation():
    with pytest.raises(ValidationError):
        OuProcess(np.zeros((2, 2)), -np.eye(2))
    with pytest.raises(ValidationError):
        ou_evolve(GaussianEnsemble.isotropic(), OuProcess(np.zeros((4, 4)), np.eye(4)), 0.1, 1)
    with pytest.raises(ValidationError):
        ou_evolve(GaussianEnsemble.isotropic(), OuProcess(np.zeros((2, 2)), np.eye(2)), -0.1, 1)


def test_ou_blowup_is_numerical_error():
    with pytest.raises(NumericalError, match="step"):
        ou_evolve(GaussianEnsemble.isotropic(), OuProcess(-50 * np.eye(2), np.zeros((2, 2))), 1.0, 50)


# -- ellipsoid / Hadamard ------------------------------------------------------------


def test_ellipsoid_constant_values():
    assert math.isclose(ellipsoid_constant(1), 1 / (2 * math.e))
    assert math.isclose(ellipsoid_constant(2), 1 / (2 * (2 * math.e) ** 2))


def test_ellipsoid_volume_tracks_entropy():
    # ellipsoid pi^n sqrt(det S) / n! equals K_ell e^S
    rng = Rng(5)
    for dof in (1, 2, 3):
        g = GaussianEnsemble(None, random_covariance(dof, rng))
        direct = math.pi ** dof * math.sqrt(np.linalg.det(g.covariance)) / math.factorial(dof)
        assert math.isclose(ellipsoid_volume(g), direct, rel_tol=1e-10)
        assert math.isclose(ellipsoid_volume(g), ellipsoid_constant(dof) * volume(g), rel_tol=1e-10)


def test_position_momentum_split():
    g = GaussianEnsemble(None, [[2.0, 0.9], [0.9, 1.0]])
    r = position_momentum_split(g)
    assert r.passed and r.slack > 0
    uncorrelated = position_momentum_split(GaussianEnsemble(None, np.diag([2.0, 3.0])))
    assert abs(uncorrelated.slack) < 1e-12


@given(st.integers(1, 3), st.integers(0, 2**32))
def test_hadamard_inequality(dof, seed):
    cov = random_covariance(dof, Rng(seed))
    assert hadamard_holds(cov)


# -- correspondence ------------------------------------------------------------------


@pytest.mark.parametrize("hbar", [1, 2])
@pytest.mark.parametrize("r", [10, 100, 1000, 10000])
def test_correspondence_anchor(anchors, hbar, r):
    osc = ThermalOscillator(omega=1.0, kT=r * hbar, hbar=hbar)
    assert math.isclose(correspondence_ratio(osc), anchors[f"correspondence_hbar{hbar}_r{r}"], rel_tol=1e-9)


def test_correspondence_monotone():
    vals = [v for _, v in correspondence_sweep([10, 100, 1000, 10000])]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert abs(vals[-1] / (2 * math.pi) - 1) < 1e-3


def test_oscillator_validation():
    with pytest.raises(ValidationError):
        ThermalOscillator(omega=-1.0, kT=1.0)


def test_low_temperature_quantum_entropy_vanishes():
    assert ThermalOscillator(omega=1.0, kT=0.01).quantum_entropy() < 1e-30


# -- wavefunctions ---------------------------------------------------------------------


def test_gaussian_packet_entropies(anchors):
    w = gaussian_packet(1.0, 1024)
    sx, sp = position_momentum_entropies(w)
    assert abs(sx - anchors["position_entropy_sigma1"]) < 1e-3
    assert abs(sx + sp - anchors["uncertainty_sum"]) < 1e-3


@pytest.mark.parametrize("sigma", [0.5, 1.0, 10.0])
def test_uncertainty_slack_scale_invariant(anchors, sigma):
    r = entropic_uncertainty_check(gaussian_packet(sigma, 1024))
    assert r.passed
    assert abs(r.slack - anchors["uncertainty_slack"]) < 1e-3


def test_uncertainty_with_hbar():
    r = entropic_uncertainty_check(gaussian_packet(1.0, 1024, hbar=2.0))
    assert math.isclose(r.rhs, math.log(4 * math.pi))
    assert abs(r.slack - math.log(math.e / 2)) < 1e-3


def test_two_peak_slack_exceeds_gaussian():
    r = entropic_uncertainty_check(two_peak_packet(1.0, 12.0, 1024))
    assert r.slack > 0.3


def test_heisenberg(anchors):
    r = heisenberg_from_entropy(gaussian_packet(1.0, 1024))
    assert abs(r.lhs - 0.5) < 1e-3
    assert math.isclose(r.rhs, anchors["inverse_e"], rel_tol=1e-12)
    assert abs(r.details["entropy_bound"] - 0.5) < 1e-3


def test_marginals_normalized():
    m = marginals(gaussian_packet(1.3, 512, center=0.5, k0=1.0))
    assert abs(m.px.sum() * m.dx - 1) < 1e-10
    assert abs(m.pp.sum() * m.dp - 1) < 1e-8


def test_leakage_detected():
    x = np.linspace(-3, 3, 256, endpoint=False)
    w = GridWavefunction.from_function(lambda y: np.exp(-y**2 / 4), x)
    with pytest.raises(ValidationError, match="leakage"):
        check_leakage(w)


def test_wavefunction_normalization_checked():
    with pytest.raises(ValidationError, match="normalization"):
        GridWavefunction(np.ones(8), 1.0)
