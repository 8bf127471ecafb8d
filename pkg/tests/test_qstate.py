import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from oracles import exact_inner
from ontic.qstate import (
    DimensionError,
    OrthoBasis,
    ProjState,
    RankDeficientError,
    UnitaryOp,
    basis_containing,
    chordal_distance,
    epsilon_net,
    fidelity,
    fs_distance,
    gauge_fix,
    gram_schmidt,
    haar_basis,
    haar_state,
    haar_states,
    haar_unitary,
    inner,
    orthogonal_state,
    perturb_to_nonorthogonal,
    stabilizer_coset_unitary,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=2, max_value=8)


def test_projstate_invariants(rng):
    for d in (2, 5, 16):
        s = haar_state(d, rng)
        v = s.amplitudes
        assert abs(np.vdot(v, v).real - 1) <= 1e-12
        k = np.flatnonzero(np.abs(v) > 1e-12)[0]
        assert v[k].imag == 0 and v[k].real >= 0


def test_projstate_rejects_bad_input():
    with pytest.raises(ValueError):
        ProjState(np.array([1.0, 1.0], dtype=complex))  # not normalized
    with pytest.raises(ValueError):
        ProjState(np.array([1j, 0.0]))  # not gauge fixed
    with pytest.raises(DimensionError):
        ProjState.from_vector([1.0])
    with pytest.raises(DimensionError):
        ProjState.from_vector(np.ones(17))


def test_gauge_fix_skips_tiny_leading_entries():
    v = gauge_fix(np.array([1e-14, 1j, 0]))
    assert v[1].real > 0 and v[1].imag == 0


def test_inner_basics(rng):
    psi = haar_state(4, rng)
    assert abs(abs(inner(psi, psi)) - 1) <= 1e-15
    e1, e2 = ProjState.basis_vector(3, 0), ProjState.basis_vector(3, 1)
    assert inner(e1, e2) == 0
    with pytest.raises(DimensionError):
        inner(e1, ProjState.basis_vector(2, 0))


def test_inner_matches_exact_summation(rng):
    for d in (2, 7, 16):
        a, b = haar_state(d, rng), haar_state(d, rng)
        assert abs(inner(a, b) - exact_inner(a.amplitudes, b.amplitudes)) <= 1e-14


def test_fs_distance_examples(rng):
    psi = haar_state(3, rng)
    assert fs_distance(psi, psi) == 0.0
    assert fs_distance(ProjState.basis_vector(3, 0), ProjState.basis_vector(3, 2)) == 1.0
    half = ProjState.from_vector([1, 1])
    assert abs(fs_distance(half, ProjState.basis_vector(2, 0)) - 0.5) <= 1e-15


def test_fs_distance_is_a_metric_sample(rng):
    for _ in range(200):
        a, b = haar_state(3, rng), haar_state(3, rng)
        c = ProjState.from_vector(a.amplitudes + 0.3 * b.amplitudes) if rng.random() < 0.5 else haar_state(3, rng)
        assert fs_distance(a, c) <= fs_distance(a, b) + fs_distance(b, c) + 1e-12
        assert fs_distance(a, b) == fs_distance(b, a)
        assert chordal_distance(a, b) == chordal_distance(b, a)


def test_chordal_matches_closed_form(rng):
    for _ in range(100):
        a, b = haar_state(3, rng), haar_state(3, rng)
        assert chordal_distance(a, b) == pytest.approx(math.sqrt(2 - 2 * fidelity(a, b)), abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=seeds, d=dims)
def test_gauge_independence(seed, d):
    rng = np.random.default_rng(seed)
    z = haar_states(d, 2, rng)
    a, b = ProjState(z[0]), ProjState(z[1])
    basis = haar_basis(d, rng)
    for theta in rng.random(100) * 2 * np.pi:
        a2 = ProjState.from_vector(np.exp(1j * theta) * z[0])
        assert abs(fs_distance(a2, b) - fs_distance(a, b)) <= 1e-12
        assert abs(abs(inner(a2, b)) - abs(inner(a, b))) <= 1e-12
        assert np.abs(basis.born(a2) - basis.born(a)).max() <= 1e-12


def test_haar_state_moment():
    rng = np.random.default_rng(2024)
    d = 3
    lam = haar_states(d, 1_000_000, rng)
    ref = np.array([1, 0, 0], dtype=complex)
    assert abs(np.mean(np.abs(lam @ ref) ** 2) - 1 / d) <= 0.003


def test_haar_determinism():
    a = haar_state(5, np.random.default_rng(9)).amplitudes
    b = haar_state(5, np.random.default_rng(9)).amplitudes
    assert a.tobytes() == b.tobytes()
    m1 = haar_basis(4, np.random.default_rng(3)).matrix
    m2 = haar_basis(4, np.random.default_rng(3)).matrix
    assert m1.tobytes() == m2.tobytes()


def test_haar_basis_orthonormal_and_first_column_haar(rng):
    ref = np.array([1, 0, 0], dtype=complex)
    cols, states = [], []
    for _ in range(4000):
        m = haar_basis(3, rng).matrix
        off = np.abs(m.conj().T @ m - np.eye(3))
        assert off.max() <= 1e-10
        cols.append(abs(np.vdot(ref, m[:, 0])) ** 2)
    states = np.abs(haar_states(3, 4000, rng) @ ref) ** 2
    assert stats.ks_2samp(cols, states).pvalue > 0.001


def test_haar_unitary_is_unitary(rng):
    u = haar_unitary(6, rng)
    UnitaryOp(u)  # validates
    with pytest.raises(ValueError):
        UnitaryOp(2 * u)


def test_gram_schmidt_examples(rng):
    out = gram_schmidt([[1, 0, 0], [1, 1, 0]])
    assert out[0] == ProjState.basis_vector(3, 0)
    assert out[1] == ProjState.basis_vector(3, 1)
    m = haar_basis(4, rng)
    again = gram_schmidt([s.amplitudes for s in m])
    assert all(x == y for x, y in zip(again, m))


def test_gram_schmidt_random_triple(rng):
    for _ in range(50):
        vecs = rng.standard_normal((3, 5)) + 1j * rng.standard_normal((3, 5))
        q = np.array([s.amplitudes for s in gram_schmidt(vecs)])
        assert np.abs(q.conj() @ q.T - np.eye(3)).max() <= 1e-12


def test_gram_schmidt_rank_deficient():
    with pytest.raises(RankDeficientError):
        gram_schmidt([[1, 0, 0], [2, 0, 0]])
    with pytest.raises(RankDeficientError):
        gram_schmidt([[0, 0, 0]])


def test_epsilon_net_n1(rng):
    net = epsilon_net(3, 1, rng)
    assert len(net) == 1


def test_epsilon_net_d2_n2_audit():
    rng = np.random.default_rng(77)
    net = epsilon_net(2, 2, rng)
    probes = haar_states(2, 10_000, np.random.default_rng(78))
    m = np.array([s.amplitudes for s in net])
    dist = 2 / np.pi * np.arccos(np.clip(np.abs(probes @ m.conj().T).max(axis=1), 0, 1))
    assert dist.max() <= 0.5
    ov = np.abs(m.conj() @ m.T)
    assert ov.min() > 0


def test_epsilon_net_d3_n3_pairwise_nonorthogonal():
    net = epsilon_net(3, 3, np.random.default_rng(5))
    m = np.array([s.amplitudes for s in net])
    assert np.abs(m.conj() @ m.T).min() >= 1e-8


def test_perturb_examples(rng):
    states = [haar_state(3, rng) for _ in range(4)]
    assert perturb_to_nonorthogonal(states, 1e-3, rng) == states
    e1, e2 = ProjState.basis_vector(2, 0), ProjState.basis_vector(2, 1)
    out = perturb_to_nonorthogonal([e1, e2], 1e-3, rng)
    assert fidelity(out[0], out[1]) >= 1e-8
    for x, y in zip(out, [e1, e2]):
        assert fs_distance(x, y) <= 1e-3
    assert perturb_to_nonorthogonal([e1], 1e-3, rng) == [e1]
    with pytest.raises(ValueError):
        perturb_to_nonorthogonal([e1, e2], 0.02, rng)


def test_stabilizer_coset_constraint(rng):
    for d in (2, 3, 5):
        psi, lam = haar_state(d, rng), haar_state(d, rng)
        m = stabilizer_coset_unitary(psi, lam, rng)
        v = m.dagger.matrix @ psi.amplitudes
        assert abs(abs(np.vdot(lam.amplitudes, v)) - 1) <= 1e-10
        same = stabilizer_coset_unitary(psi, psi, rng)
        assert abs(abs(np.vdot(psi.amplitudes, same.matrix @ psi.amplitudes)) - 1) <= 1e-10


def test_stabilizer_coset_uniform_on_complement():
    rng = np.random.default_rng(31)
    d = 4
    psi, lam = haar_state(d, rng), haar_state(d, rng)
    chi = orthogonal_state(psi, rng)
    ref = orthogonal_state(lam, rng)
    vals = []
    for _ in range(20_000):
        m = stabilizer_coset_unitary(psi, lam, rng).dagger.matrix
        vals.append(abs(np.vdot(ref.amplitudes, m @ chi.amplitudes)) ** 2)
    vals = np.array(vals)
    # uniform on the unit sphere of C^{d-1}: E|x|^2 = 1/(d-1), E|x|^4 = 2/((d-1) d)
    n = vals.size
    assert abs(vals.mean() - 1 / (d - 1)) <= 4 * vals.std() / math.sqrt(n)
    assert abs((vals**2).mean() - 2 / ((d - 1) * d)) <= 4 * (vals**2).std() / math.sqrt(n)


def test_basis_containing(rng):
    psi = haar_state(5, rng)
    b = basis_containing(psi, rng)
    assert b.index_of(psi) == 0


def test_json_round_trip(rng):
    s = haar_state(6, rng)
    back = ProjState.from_json(s.to_json())
    assert np.abs(back.amplitudes - s.amplitudes).max() <= 1e-15
    b = haar_basis(3, rng)
    again = OrthoBasis.from_json(b.to_json())
    assert np.abs(again.matrix - b.matrix).max() <= 1e-15


def test_orthobasis_rejects_non_orthogonal():
    with pytest.raises(ValueError):
        OrthoBasis((ProjState.basis_vector(2, 0), ProjState.from_vector([1, 1])))
