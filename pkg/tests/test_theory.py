import json

import numpy as np
import pytest

from ontic import models
from ontic.points import OnticBatch, OnticPoint
from ontic.qstate import OrthoBasis, ProjState, basis_containing, fidelity, haar_basis, haar_state, orthogonal_state
from ontic.theory import (
    born_sweep,
    check_max_nontrivial,
    check_nontrivial_pair,
    estimate_outcome_probs,
    normalization_sweep,
    verify_born,
    verify_normalization,
    wilson_se,
)


@pytest.fixture(scope="module")
def pair():
    rng = np.random.default_rng(404)
    while True:
        a, b = haar_state(3, rng), haar_state(3, rng)
        if fidelity(a, b) > 0.3:
            return models.PairTheory(a, b)


def test_estimates_sum_to_one(pair, rng):
    for t, psi in ((pair, pair.a), (models.ks2d(), haar_state(2, rng)), (models.psi_ontic(4), haar_state(4, rng))):
        for n in (1000, 4321, 70_000):
            est = estimate_outcome_probs(t, psi, haar_basis(t.d, rng), n, rng)
            assert abs(est.sum() - 1.0) <= 1e-12


def test_estimate_input_errors(pair, rng):
    with pytest.raises(ValueError):
        estimate_outcome_probs(pair, haar_state(2, rng), haar_basis(3, rng), 1000, rng)
    with pytest.raises(ValueError):
        estimate_outcome_probs(pair, pair.a, haar_basis(3, rng), 999, rng)


def test_psi_ontic_is_exact(rng):
    t = models.psi_ontic(3)
    for _ in range(5):
        rep = verify_born(t, haar_state(3, rng), haar_basis(3, rng), 5000, rng=rng)
        assert rep.passed and rep.max_abs_z <= 1e-6


def test_eigenstate_gives_certain_outcome(pair, rng):
    net = models.net_theory(3, 2, 8)
    for t in (pair, models.ks2d(), models.convex_combine([(0.5, pair), (0.5, models.psi_ontic(3))]), net):
        basis = haar_basis(t.d, rng)
        est = estimate_outcome_probs(t, basis[0], basis, 20_000, rng)
        assert abs(est[0] - 1.0) <= 1e-12


def test_ks_born(rng):
    t = models.ks2d()
    for _ in range(5):
        rep = verify_born(t, haar_state(2, rng), haar_basis(2, rng), 200_000, rng=rng)
        assert rep.passed


def test_pair_born_at_anchor(pair):
    sweep = born_sweep(pair, 200, 20_000, seed=17, psi_source=lambda rng: pair.a)
    assert sweep.failures == 0


def test_negative_control_fails():
    rng = np.random.default_rng(3)
    t = models.broken_uniform(3)
    psi = ProjState.basis_vector(3, 0)
    rep = verify_born(t, psi, OrthoBasis.standard(3), 10_000, rng=rng)
    assert not rep.passed
    assert not born_sweep(t, 10, 10_000, seed=3).passed


def test_worker_count_does_not_change_results(pair):
    psi, basis = pair.a, haar_basis(3, np.random.default_rng(1))
    one = estimate_outcome_probs(pair, psi, basis, 300_000, 99, workers=1)
    three = estimate_outcome_probs(pair, psi, basis, 300_000, 99, workers=3)
    assert one.tobytes() == three.tobytes()


def test_normalization_pair_is_exact(pair, rng):
    basis = haar_basis(3, rng)
    pts = pair.random_points(500, rng)
    assert verify_normalization(pair, basis, pts)
    assert verify_normalization(pair, basis, pair.special_points(basis, rng))


def test_normalization_ks_tie():
    basis = haar_basis(2, np.random.default_rng(2))
    ties = OnticBatch(models.ks_tie_states(basis, [0.0, 1.0, 2.5]))
    assert verify_normalization(models.ks2d(), basis, ties)
    assert not verify_normalization(models.ks2d(tie_break=False), basis, ties)


def test_normalization_rejects_invalid_points(pair, rng):
    basis = haar_basis(3, rng)
    with pytest.raises(ValueError):
        verify_normalization(pair, basis, [OnticPoint(pair.a)])
    with pytest.raises(ValueError):
        verify_normalization(pair, basis, OnticBatch(np.eye(2, dtype=complex), np.zeros(2)))
    convex = models.convex_combine([(0.5, pair), (0.5, pair)])
    with pytest.raises(ValueError):
        verify_normalization(convex, basis, OnticBatch(np.eye(3, dtype=complex), np.zeros(3), np.full((3, 1), 2)))


def test_normalization_sweep_all_theories(pair):
    theories = [models.psi_ontic(3), models.ks2d(), pair, models.convex_combine([(0.3, pair), (0.7, models.psi_ontic(3))])]
    for t in theories:
        rep = normalization_sweep(t, 500, seed=5, special_bases=20)
        assert rep.passed and rep.points >= 500, rep.to_json()
    assert not normalization_sweep(models.ks2d(tie_break=False), 200, seed=5).passed


def test_check_nontrivial_pair(pair, rng):
    psi = haar_state(3, rng)
    with pytest.raises(ValueError):
        check_nontrivial_pair(pair, psi, ProjState.from_vector(1j * psi.amplitudes))
    assert check_nontrivial_pair(models.psi_ontic(3), psi, haar_state(3, rng)) == 0.0
    assert check_nontrivial_pair(pair, pair.a, orthogonal_state(pair.a, rng)) == 0.0
    assert abs(check_nontrivial_pair(pair, pair.a, pair.b) - pair.epsilon) <= 1e-15


def test_check_max_nontrivial():
    rep = check_max_nontrivial(models.ks2d(), 100, 11)
    assert rep.passed and rep.min_overlap > 0
    bad = check_max_nontrivial(models.psi_ontic(3), 10, 11)
    assert not bad.passed and len(bad.overlaps) == 1
    assert json.loads(json.dumps(bad.to_json()))["checked"] == 1


def test_report_serialization(pair):
    sweep = born_sweep(pair, 3, 5000, seed=2)
    body = json.loads(json.dumps(sweep.to_json()))
    rep = body["reports"][0]
    assert set(rep) == {"theory", "d", "psi", "basis", "n", "seed", "z_max", "outcomes", "pass"}
    assert set(rep["outcomes"][0]) == {"est", "target", "se", "z"}
    rows = sweep.csv_rows()
    assert len(rows) == 9 and rows[0]["sweep"] == 0 and rows[-1]["outcome"] == 2
    assert all(0.0 <= o["est"] <= 1.0 for o in rep["outcomes"])


def test_wilson_se():
    assert wilson_se(0.0, 10_000, 4.0) > 0
    assert wilson_se(1.0, 10_000, 4.0) == pytest.approx(wilson_se(0.0, 10_000, 4.0))
    assert wilson_se(0.5, 10**8, 4.0) == pytest.approx(0.5 / 10**4, rel=1e-6)


def test_orthogonal_pairs_have_zero_overlap(pair, rng):
    for t in (models.psi_ontic(3), pair, models.ks2d()):
        for _ in range(5):
            psi = t.sample_covered_pair(rng)[0]
            assert t.overlap(psi, orthogonal_state(psi, rng)) == 0.0
    basis = basis_containing(pair.a, rng)
    assert all(pair.overlap(basis[0], basis[k]) == 0.0 for k in (1, 2))
