import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from graphs import K2, cycle_graph, random_graph, star_graph
from qwalk import (
    Graph,
    InputError,
    ResonanceWarning,
    RestartPolicy,
    StartPolicy,
    WalkConfig,
    amplitude_encode,
    asymmetric_anomaly_score,
    build_generator,
    ctqw_anomaly_score,
    estimate_mixing_time,
    estimate_sampling_time,
    evolve_chunked,
    hermitian_adjacency,
    limiting_distribution,
    measure_frequencies,
)
from qwalk.ctqw import running_averages, uniform_state, walk_trajectory
from qwalk.graph import ADJACENCY
from qwalk.spectral import UnitaryOperator, hamiltonian_step


def exact(gamma=0.3, steps=10, walks=4, **kw):
    return WalkConfig(gamma=gamma, steps=steps, walks=walks, shots=0, **kw)


def brute_average(B, gamma, t):
    """(1/t) sum_{i=1..t} |exp(-i gamma B)^i psi0|^2 by plain repeated multiplication."""
    u = expm(-1j * gamma * B)
    psi = np.full(B.shape[0], 1 / np.sqrt(B.shape[0]), dtype=complex)
    acc = np.zeros(B.shape[0])
    for _ in range(t):
        psi = u @ psi
        acc += np.abs(psi) ** 2
    return acc / t


# ------------------------------------------------------ measure / encode


def test_measure_examples():
    np.testing.assert_array_equal(measure_frequencies(np.array([1, 0]), 500, 1), [1, 0])
    s = np.array([1, 1]) / np.sqrt(2)
    np.testing.assert_allclose(measure_frequencies(s, 0), [0.5, 0.5], atol=1e-15)
    p = measure_frequencies(s, 30000, 3)
    assert 0.5 * np.abs(p - 0.5).sum() <= 0.02
    np.testing.assert_array_equal(p, measure_frequencies(s, 30000, 3))


def test_measure_rejects_negative_shots():
    with pytest.raises(InputError):
        measure_frequencies(np.array([1, 0]), -1)


def test_encode_examples():
    np.testing.assert_array_equal(amplitude_encode([1, 0]), [1, 0])
    np.testing.assert_allclose(amplitude_encode([0.5, 0.5]), [1 / np.sqrt(2)] * 2, atol=1e-15)
    np.testing.assert_allclose(amplitude_encode([0.25, 0.75]), [0.5, np.sqrt(3) / 2], atol=1e-15)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0, 10), min_size=2, max_size=10).filter(lambda v: sum(v) > 1e-3))
def test_encode_then_measure_round_trip(v):
    p = np.array(v) / sum(v)
    np.testing.assert_allclose(measure_frequencies(amplitude_encode(p), 0), p, atol=1e-12)


# ----------------------------------------------------------------- chunking


def test_seven_steps_in_chunks_of_three():
    b = random_graph(6, 1).weights
    U = hamiltonian_step(b, 0.4)
    psi0 = uniform_state(6)
    direct = psi0.copy()
    u = expm(-0.4j * b)
    for _ in range(7):
        direct = u @ direct
    out = evolve_chunked(U, psi0, 7, exact(walks=3))
    assert np.linalg.norm(out - direct) <= 1e-10


def test_single_chunk_policies_agree():
    U = hamiltonian_step(random_graph(5, 2).weights, 0.3)
    psi0 = uniform_state(5)
    a = evolve_chunked(U, psi0, 4, exact(walks=6, restart=RestartPolicy.EXACT))
    b = evolve_chunked(U, psi0, 4, exact(walks=6, restart=RestartPolicy.REENCODE))
    np.testing.assert_allclose(np.abs(a) ** 2, np.abs(b) ** 2, atol=1e-12)


@pytest.mark.parametrize("restart", list(RestartPolicy))
def test_identity_returns_start(restart):
    psi0 = amplitude_encode([0.1, 0.2, 0.3, 0.4])
    out = evolve_chunked(UnitaryOperator.identity(4), psi0, 9, exact(walks=2, restart=restart))
    np.testing.assert_allclose(out, psi0, atol=1e-14)


def test_reencode_discards_phases():
    U = hamiltonian_step(random_graph(4, 3).weights, 0.5)
    out = evolve_chunked(U, uniform_state(4), 5, exact(walks=2, restart=RestartPolicy.REENCODE))
    assert np.all(out.imag == 0) and np.all(out.real >= 0)


# ----------------------------------------------------------------- scoring


def test_k2_scores():
    for gamma, t in [(0.3, 7), (1.1, 40)]:
        r = ctqw_anomaly_score(build_generator(K2, ADJACENCY), exact(gamma=gamma, steps=t))
        np.testing.assert_allclose(r.averaged_probs, [0.5, 0.5], atol=1e-14)
        np.testing.assert_allclose(r.scores, [2, 2], atol=1e-13)


def test_edgeless_scores():
    r = ctqw_anomaly_score(build_generator(Graph(np.zeros((2, 2))), ADJACENCY), exact())
    np.testing.assert_array_equal(r.averaged_probs, [0.5, 0.5])
    np.testing.assert_array_equal(r.scores, [2, 2])


def test_star_time_average_oracle():
    g = star_graph(3)
    r = ctqw_anomaly_score(build_generator(g, ADJACENCY), exact(gamma=0.3, steps=200, walks=4))
    np.testing.assert_allclose(r.averaged_probs, brute_average(g.weights, 0.3, 200), atol=1e-10)
    assert np.ptp(r.scores[1:]) <= 1e-10


@pytest.mark.parametrize("walks", [1, 3, 40])
def test_fresh_exact_reproduces_time_average(walks):
    g = random_graph(7, 5)
    r = ctqw_anomaly_score(build_generator(g, "laplacian"), exact(gamma=0.2, steps=40, walks=walks))
    from qwalk import laplacian

    np.testing.assert_allclose(
        r.averaged_probs, brute_average(laplacian(g).entries, 0.2, 40), atol=1e-10
    )


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(list(RestartPolicy)), st.sampled_from(list(StartPolicy)))
def test_score_invariants(seed, restart, start):
    g = random_graph(6, seed)
    cfg = WalkConfig(gamma=0.25, steps=9, walks=2, shots=200, seed=seed, restart=restart, start=start)
    r = ctqw_anomaly_score(build_generator(g, "mea"), cfg)
    np.testing.assert_allclose(r.per_step_probs.sum(axis=1), 1, atol=1e-12)
    assert abs(r.averaged_probs.sum() - 1) <= 1e-12
    finite = np.isfinite(r.scores)
    np.testing.assert_allclose(r.scores[finite] * r.averaged_probs[finite], 1, atol=1e-12)
    assert np.all(r.averaged_probs[~finite] == 0)


def test_carry_forward_differs_from_fresh():
    B = build_generator(random_graph(6, 8), ADJACENCY)
    fresh = ctqw_anomaly_score(B, exact(steps=6))
    carry = ctqw_anomaly_score(B, exact(steps=6, start=StartPolicy.CARRY))
    np.testing.assert_allclose(fresh.per_step_probs[0], carry.per_step_probs[0], atol=1e-14)
    assert not np.allclose(fresh.averaged_probs, carry.averaged_probs)


def test_carry_forward_oracle():
    g = random_graph(5, 9)
    cfg = exact(gamma=0.35, steps=5, walks=2, start=StartPolicy.CARRY)
    rows = ctqw_anomaly_score(build_generator(g, ADJACENCY), cfg).per_step_probs
    u = expm(-0.35j * g.weights)
    psi = uniform_state(5)
    for i in range(1, 6):
        out = np.linalg.matrix_power(u, i) @ psi
        p = np.abs(out) ** 2
        np.testing.assert_allclose(rows[i - 1], p, atol=1e-12)
        psi = np.sqrt(p).astype(complex)


def test_workers_match_serial():
    B = build_generator(random_graph(8, 4), ADJACENCY)
    cfg = WalkConfig(gamma=0.2, steps=12, walks=3, shots=500, seed=7, restart=RestartPolicy.REENCODE)
    a = ctqw_anomaly_score(B, cfg)
    b = ctqw_anomaly_score(B, cfg, workers=3)
    np.testing.assert_array_equal(a.per_step_probs, b.per_step_probs)


def test_seeded_runs_repeat():
    B = build_generator(random_graph(8, 4), ADJACENCY)
    cfg = WalkConfig.sampled(seed=5, steps=6)
    assert ctqw_anomaly_score(B, cfg).to_json() == ctqw_anomaly_score(B, cfg).to_json()
    other = ctqw_anomaly_score(B, WalkConfig.sampled(seed=6, steps=6))
    assert other.to_json() != ctqw_anomaly_score(B, cfg).to_json()


def test_scoring_needs_two_nodes():
    with pytest.raises(InputError):
        ctqw_anomaly_score(build_generator(Graph(np.zeros((1, 1))), ADJACENCY), exact())


@pytest.mark.parametrize("shots_levels", [(1000, 10000, 100000)])
def test_shot_noise_shrinks(shots_levels):
    psi = amplitude_encode(np.random.default_rng(0).dirichlet(np.ones(16)))
    p = np.abs(psi) ** 2
    means = []
    for shots in shots_levels:
        tv = [0.5 * np.abs(measure_frequencies(psi, shots, s) - p).sum() for s in range(50)]
        means.append(np.mean(tv))
    assert means[0] > means[1] > means[2]


# ---------------------------------------------------------- directed input


def test_directed_two_cycle_matches_k2():
    two_cycle = Graph(K2.weights.copy(), directed=True)
    cfg = exact(gamma=0.4, steps=8)
    a = asymmetric_anomaly_score(two_cycle, 1j, cfg)
    b = ctqw_anomaly_score(build_generator(K2, ADJACENCY), cfg)
    np.testing.assert_array_equal(a.averaged_probs, b.averaged_probs)


def test_one_way_edge_closed_form():
    one_way = Graph(np.array([[0, 1.0], [0, 0]]), directed=True)
    B = hermitian_adjacency(one_way, 1j)
    np.testing.assert_array_equal(B.entries, [[0, 1j], [-1j, 0]])
    np.testing.assert_allclose(np.linalg.eigvalsh(B.entries), [-1, 1], atol=1e-15)
    # B = -sigma_y, so exp(-i k g B) is a rotation by k*g and the uniform start
    # is not stationary (unlike K2): p_0 = (1 + sin(2 k g)) / 2
    k = np.arange(1, 9)
    rows = walk_trajectory(B, exact(gamma=0.4, steps=8)).rows
    np.testing.assert_allclose(rows[:, 0], (1 + np.sin(0.8 * k)) / 2, atol=1e-12)
    # from a basis start both generators give (cos^2, sin^2)
    for gen in (B.entries, K2.weights):
        psi = np.linalg.matrix_power(hamiltonian_step(gen, 0.4).entries, 3) @ np.array([1, 0])
        np.testing.assert_allclose(np.abs(psi) ** 2, [np.cos(1.2) ** 2, np.sin(1.2) ** 2], atol=1e-12)


# ------------------------------------------------------ limiting behaviour


def test_limiting_of_eigenvector_is_its_square():
    g = random_graph(6, 2)
    U = hamiltonian_step(g.weights, 0.3)
    v = U.spectrum.eigenvectors[:, 2]
    np.testing.assert_allclose(limiting_distribution(U, v), np.abs(v) ** 2, atol=1e-12)


def test_limiting_k2_basis_start():
    U = hamiltonian_step(K2.weights, 1.0)
    np.testing.assert_allclose(limiting_distribution(U, np.array([1, 0])), [0.5, 0.5], atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.floats(0.05, 1.0))
def test_limiting_is_normalized(seed, gamma):
    g = random_graph(7, seed)
    U = hamiltonian_step(g.weights, gamma)
    psi = np.random.default_rng(seed).normal(size=7) + 0j
    assert abs(limiting_distribution(U, psi).sum() - 1) <= 1e-10


def test_limiting_uses_schur_without_spectrum():
    U = hamiltonian_step(random_graph(6, 1).weights, 0.3)
    bare = UnitaryOperator(U.entries)
    psi = uniform_state(6)
    np.testing.assert_allclose(limiting_distribution(bare, psi), limiting_distribution(U, psi), atol=1e-9)


def test_resonance_warning():
    # K2 eigenvalues -1, 1 with gamma = pi: both phases equal -pi, one merged projector
    U = hamiltonian_step(K2.weights, np.pi)
    with pytest.warns(ResonanceWarning):
        pi = limiting_distribution(U, np.array([1, 0]))
    np.testing.assert_allclose(pi, [1, 0], atol=1e-12)


def test_no_resonance_warning_for_generic_gamma():
    U = hamiltonian_step(cycle_graph(5).weights, 0.3)
    with warnings.catch_warnings():
        warnings.simplefilter("error", ResonanceWarning)
        limiting_distribution(U, uniform_state(5))


def test_mixing_time_examples():
    assert estimate_mixing_time(UnitaryOperator.identity(3), 0.05, 10) == 1
    U = hamiltonian_step(K2.weights, 1.0)
    assert estimate_mixing_time(U, 2.0, 10) == 1
    t = estimate_mixing_time(U, 0.05, 500)
    assert t is not None
    avg = running_averages(U, t)[t - 1]
    assert np.all(0.5 * np.abs(avg - 0.5).sum(axis=0) <= 0.05)


def test_mixing_time_unreached():
    U = hamiltonian_step(K2.weights, 1.0)
    assert estimate_mixing_time(U, 1e-6, 20) is None


def test_sampling_time_examples():
    assert estimate_sampling_time(UnitaryOperator.identity(3), 0.1, [], 5).time == 1
    U = hamiltonian_step(K2.weights, 1.0)
    st_ = estimate_sampling_time(U, 0.1, [], 400)
    assert st_.time is not None and st_.skipped == []
    avgs = running_averages(U, 400)
    for t in range(st_.time, 401):
        assert np.all(np.abs(avgs[t - 1] - 0.5) < 0.1 * 0.5)
    assert estimate_sampling_time(U, 0.01, [[0, 1]], 50).time == 1


def test_sampling_time_skips_zero_mass():
    st_ = estimate_sampling_time(UnitaryOperator.identity(2), 0.1, [[1]], 5)
    assert st_.time == 1 and st_.skipped == [(0, (1,))]
