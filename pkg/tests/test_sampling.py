import numpy as np
import pytest

from agents.sampling import (
    choose_next,
    daemon_weights,
    initial_counts,
    make_rng,
    nucleus_support,
    sample_argmax,
    sample_categorical,
    sample_daemon,
    sample_nucleus,
    sample_top_k,
    top_k_support,
)
from models.data_models import NextStepDistribution, SamplerPolicy
from utils.validators import parse_policy


N_DRAWS = 100_000


def dist(*probs):
    return NextStepDistribution(np.array(probs, dtype=float))


def empirical(draw, size, n=N_DRAWS, seed=123):
    rng = make_rng(seed)
    freq = np.bincount([draw(rng) for _ in range(n)], minlength=size)
    return freq / n


def test_distribution_validation():
    with pytest.raises(ValueError):
        dist(0.5, 0.4)
    with pytest.raises(ValueError):
        dist(1.2, -0.2)
    d = dist(0.25, 0.75)
    with pytest.raises(ValueError):
        d.probs[0] = 1.0


def test_argmax_examples():
    assert sample_argmax(dist(0.7, 0.3)) == 0
    assert sample_argmax(dist(0.3, 0.7)) == 1
    assert sample_argmax(dist(0.5, 0.5)) == 0
    assert sample_argmax(dist(0.0, 0.0, 1.0)) == 2


def test_categorical_one_hot_and_determinism():
    rng = make_rng(1)
    assert all(sample_categorical(dist(0.0, 1.0, 0.0), rng) == 1 for _ in range(200))
    d = dist(0.2, 0.3, 0.5)
    a = [sample_categorical(d, r) for r in [make_rng(9)] for _ in range(50)]
    b = [sample_categorical(d, r) for r in [make_rng(9)] for _ in range(50)]
    assert a == b


def test_categorical_matches_distribution():
    d = dist(0.5, 0.5)
    freq = empirical(lambda rng: sample_categorical(d, rng), 2)
    assert abs(freq[0] - 0.5) < 0.01
    d = dist(0.1, 0.2, 0.3, 0.4)
    freq = empirical(lambda rng: sample_categorical(d, rng), 4)
    assert np.abs(freq - d.probs).sum() < 0.01


def test_top_k_support_and_reductions():
    probs = np.array([0.6, 0.3, 0.1])
    assert list(top_k_support(probs, 2)) == [0, 1]
    assert list(top_k_support(probs, 10)) == [0, 1, 2]
    d = dist(0.2, 0.5, 0.3)
    rng = make_rng(3)
    assert all(sample_top_k(d, 1, rng) == sample_argmax(d) for _ in range(100))
    r1, r2 = make_rng(4), make_rng(4)
    assert [sample_top_k(d, 3, r1) for _ in range(100)] == [sample_categorical(d, r2) for _ in range(100)]


def test_top_k_renormalizes():
    d = dist(0.6, 0.3, 0.1)
    freq = empirical(lambda rng: sample_top_k(d, 2, rng), 3)
    assert freq[2] == 0.0
    assert np.abs(freq - np.array([2 / 3, 1 / 3, 0.0])).sum() < 0.01


def test_nucleus_support_examples():
    probs = np.array([0.6, 0.3, 0.1])
    assert list(nucleus_support(probs, 0.6)) == [0]
    assert list(nucleus_support(probs, 0.7)) == [0, 1]
    assert list(nucleus_support(probs, 1.0)) == [0, 1, 2]
    with pytest.raises(ValueError):
        nucleus_support(probs, 0.0)


def test_nucleus_sampling():
    d = dist(0.6, 0.3, 0.1)
    rng = make_rng(5)
    assert all(sample_nucleus(d, 0.6, rng) == 0 for _ in range(200))
    freq = empirical(lambda rng: sample_nucleus(d, 0.7, rng), 3)
    assert freq[2] == 0.0
    assert np.abs(freq - np.array([2 / 3, 1 / 3, 0.0])).sum() < 0.01
    r1, r2 = make_rng(6), make_rng(6)
    assert [sample_nucleus(d, 1.0, r1) for _ in range(100)] == [sample_categorical(d, r2) for _ in range(100)]


def test_daemon_weights_example():
    weights = daemon_weights(dist(0.8, 0.2), np.array([3, 0]))
    assert weights == pytest.approx([0.5, 0.5])
    assert sample_daemon(dist(0.8, 0.2), np.array([3, 0]), "argmax", make_rng(0)) == 0


def test_daemon_weights_properties():
    rng = np.random.default_rng(21)
    for _ in range(1000):
        probs = rng.dirichlet(np.ones(5))
        counts = rng.integers(0, 6, size=5)
        d = NextStepDistribution(probs / probs.sum())
        w = daemon_weights(d, counts)
        assert w.sum() == pytest.approx(1.0)
        assert (w >= 0).all()
        # equal counts give back the base distribution
        assert daemon_weights(d, np.full(5, int(counts[0]))) == pytest.approx(d.probs)
        # one more occurrence strictly lowers an activity's weight relative to the others
        bumped = counts.copy()
        bumped[0] += 1
        w2 = daemon_weights(d, bumped)
        assert w2[0] < w[0]
        # at equal counts the more probable activity keeps the higher weight
        same = np.full(5, 2)
        ws = daemon_weights(d, same)
        assert np.argmax(ws) == np.argmax(d.probs)


def test_daemon_with_zero_counts_reduces_to_base_samplers():
    d = dist(0.1, 0.6, 0.3)
    zero = np.zeros(3, dtype=np.int64)
    r1, r2 = make_rng(8), make_rng(8)
    assert [sample_daemon(d, zero, "sample", r1) for _ in range(300)] == [sample_categorical(d, r2) for _ in range(300)]
    assert sample_daemon(d, zero, "argmax", make_rng(0)) == sample_argmax(d)
    with pytest.raises(ValueError):
        sample_daemon(d, zero, "greedy", make_rng(0))


def test_daemon_sampling_matches_weights():
    d = dist(0.5, 0.3, 0.2)
    counts = np.array([2, 1, 0])
    expected = daemon_weights(d, counts)
    freq = empirical(lambda rng: sample_daemon(d, counts, "sample", rng), 3)
    assert np.abs(freq - expected).sum() < 0.01


def test_initial_counts():
    assert list(initial_counts([0, 2, 0], 4)) == [2, 0, 1, 0]
    assert list(initial_counts([], 3)) == [0, 0, 0]


def test_choose_next_dispatch():
    d = dist(0.6, 0.3, 0.1)
    counts = np.array([5, 0, 0])
    assert choose_next(SamplerPolicy(kind="argmax"), d, counts, make_rng(0)) == 0
    assert choose_next(parse_policy("daemon-argmax"), d, counts, make_rng(0)) == 1
    assert choose_next(parse_policy("topk:1"), d, counts, make_rng(0)) == 0
    with pytest.raises(ValueError):
        choose_next(SamplerPolicy(kind="beam"), d, counts, make_rng(0))


def test_four_symbol_sampler_frequencies():
    d = dist(0.4, 0.3, 0.2, 0.1)
    counts = np.array([3, 1, 0, 0])
    cases = [
        (lambda rng: sample_categorical(d, rng), d.probs),
        (lambda rng: sample_top_k(d, 2, rng), np.array([4 / 7, 3 / 7, 0.0, 0.0])),
        (lambda rng: sample_nucleus(d, 0.7, rng), np.array([4 / 7, 3 / 7, 0.0, 0.0])),
        (lambda rng: sample_daemon(d, counts, "sample", rng), daemon_weights(d, counts)),
    ]
    for seed, (draw, target) in enumerate(cases):
        freq = empirical(draw, 4, seed=seed)
        assert np.abs(freq - target).sum() < 0.01
        assert (freq[target == 0] == 0).all()


def test_no_sampler_emits_a_zero_probability_activity():
    rng = np.random.default_rng(21)
    policies = [parse_policy(text) for text in ("argmax", "random", "topk:1", "topk:3", "topk:9", "nucleus:0.5", "nucleus:1.0", "daemon", "daemon-argmax")]
    for trial in range(300):
        size = int(rng.integers(2, 9))
        probs = rng.dirichlet(np.ones(size))
        probs[rng.random(size) < 0.5] = 0.0
        if not probs.any():
            probs[int(rng.integers(size))] = 1.0
        d = NextStepDistribution(probs / probs.sum())
        counts = rng.integers(0, 4, size=size)
        draws = make_rng(trial)
        for policy in policies:
            for _ in range(20):
                choice = choose_next(policy, d, counts, draws)
                assert d.probs[choice] > 0, (policy.name, d.probs, choice)
