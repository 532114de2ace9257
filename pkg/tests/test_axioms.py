import math

import numpy as np
import pytest

from ensvol import axioms
from ensvol.axioms import (
    PINNED_RENYI_WITNESS,
    check_cartesian,
    check_invariance,
    check_projection,
    check_renyi_projection,
    check_uniformity,
    fuzz,
    random_orthogonal_pair,
    random_symplectic,
    renyi_projection_violation_search,
    replay,
)
from ensvol.ensembles import (
    ClassicalDistribution,
    DensityOperator,
    GaussianEnsemble,
    check_symplectic,
    random_density,
)
from ensvol.exceptions import ValidationError
from ensvol.numerics import Rng

S2 = 1 / math.sqrt(2)
HADAMARD = np.array([[1, 1], [1, -1]]) * S2
PINNED = ClassicalDistribution(PINNED_RENYI_WITNESS)


def test_invariance_hadamard():
    rho = random_density(2, None, Rng(1))
    r = check_invariance(rho, HADAMARD)
    assert r.passed and r.worst_violation <= 1e-10


def test_invariance_gaussian_symplectic():
    g = GaussianEnsemble(None, np.diag([2.0, 0.5, 1.0, 3.0]), (1, 1))
    r = check_invariance(g, random_symplectic(2, Rng(3)))
    assert r.passed


def test_cartesian_random_pair():
    rng = Rng(2)
    r = check_cartesian(random_density(2, None, rng), random_density(3, None, rng))
    assert r.passed and r.worst_violation <= 1e-9 * r.rhs


def test_projection_bell_state():
    bell = DensityOperator.pure([S2, 0, 0, S2], factor_dims=(2, 2))
    r = check_projection(bell)
    assert r.passed
    assert math.isclose(r.lhs, 1.0, abs_tol=1e-12)
    assert math.isclose(r.rhs, 4.0, rel_tol=1e-12)
    assert math.isclose(r.worst_violation, -3.0, rel_tol=1e-12)


def test_projection_classical_joint(anchors):
    r = check_projection(PINNED)
    assert r.passed
    assert math.isclose(r.lhs, anchors["joint_volume"], rel_tol=1e-12)
    assert math.isclose(r.rhs, anchors["marginal_volume_product"], rel_tol=1e-12)
    assert math.isclose(r.worst_violation, anchors["joint_projection_slack"], abs_tol=1e-12)


def test_projection_needs_two_factors():
    with pytest.raises(ValidationError, match="regroup"):
        check_projection(random_density(8, None, Rng(1), factor_dims=(2, 2, 2)))


def test_uniformity_orthogonal_pair(anchors):
    e1, e2 = DensityOperator.basis(0, 2), DensityOperator.basis(1, 2)
    r = check_uniformity(e1, e2)
    assert r.passed
    assert r.details["argmax_lambda"] == 0.5
    assert math.isclose(r.lhs, 2.0, abs_tol=1e-12)
    v = dict(zip(r.details["lambdas"], r.details["volumes"]))
    assert math.isclose(v[0.3], anchors["uniformity_volume_0.3"], rel_tol=1e-12)


def test_uniformity_preconditions():
    e0 = DensityOperator.basis(0, 2)
    with pytest.raises(ValidationError, match="overlap"):
        check_uniformity(e0, DensityOperator.pure([S2, S2]))
    c1 = ClassicalDistribution([0.5, 0.5, 0, 0])
    c2 = ClassicalDistribution([0, 0, 1.0, 0])
    with pytest.raises(ValidationError, match="equal-volume"):
        check_uniformity(c1, c2)


def test_renyi_pinned_witness(anchors):
    r = check_renyi_projection(PINNED, 2)
    assert not r.passed
    assert math.isclose(r.lhs, anchors["renyi2_joint_volume"], rel_tol=1e-12)
    assert math.isclose(r.rhs, anchors["renyi2_marginal_product"], rel_tol=1e-12)
    assert math.isclose(r.worst_violation, anchors["renyi2_violation"], abs_tol=1e-12)


def test_renyi_product_has_no_violation():
    c = ClassicalDistribution(np.outer([0.7, 0.3], [0.2, 0.8]))
    assert check_renyi_projection(c, 2).worst_violation <= 1e-12


@pytest.mark.parametrize("axiom", ["i", "ii", "iii"])
@pytest.mark.parametrize("kind", ["quantum", "classical", "gaussian"])
def test_fuzz_passes(axiom, kind):
    r = fuzz(axiom, 60, seed=11, kind=kind)
    assert r.passed, r.to_dict()
    assert r.trials == 60 and r.failures == 0


def test_fuzz_uniformity():
    r = fuzz("iv", 20, seed=3)
    assert r.passed


def test_fuzz_is_deterministic():
    a = fuzz("i", 30, seed=5).to_dict()
    b = fuzz("i", 30, seed=5).to_dict()
    assert a == b


def test_fuzz_zero_trials():
    r = fuzz("ii", 0, seed=1)
    assert r.passed and r.trials == 0


def test_fuzz_unknown_axiom():
    with pytest.raises(ValidationError):
        fuzz("v", 10, seed=1)


@pytest.mark.parametrize("axiom", ["i", "ii", "iii"])
def test_witness_replays_exactly(axiom):
    r = fuzz(axiom, 20, seed=9)
    assert replay(r.witness) == r.worst_violation


def test_renyi_search_finds_violation():
    r = renyi_projection_violation_search(2.0, trials=20_000, seed=7)
    assert r.passed
    assert r.worst_violation > 0
    assert math.isclose(replay(r.witness), r.worst_violation, rel_tol=1e-12)


def test_renyi_search_deterministic():
    a = renyi_projection_violation_search(2.0, trials=5000, seed=1).to_dict()
    b = renyi_projection_violation_search(2.0, trials=5000, seed=1).to_dict()
    assert a == b


def test_random_symplectic_is_symplectic():
    for seed in range(20):
        check_symplectic(random_symplectic(3, Rng(seed)), 3)


def test_random_orthogonal_pair():
    e1, e2 = random_orthogonal_pair(4, Rng(0))
    assert abs(np.trace(e1.matrix @ e2.matrix)) < 1e-12


def test_report_serializes():
    d = fuzz("ii", 5, seed=2).to_dict()
    assert {"axiom", "trials", "worst_violation", "passed", "witness", "seed"} <= d.keys()
    assert axioms.AxiomReport(axiom="x").to_dict()["worst_violation"] is None
