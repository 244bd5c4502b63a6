from datetime import timedelta

import numpy as np
import pytest

from agents.generation import default_limits, generate_suffix, pair_seed, remaining_time
from agents.sampling import make_rng
from factories import START, make_log
from models.data_models import Event, GeneratedSuffix, GenerationLimits, NextStepDistribution, SamplerPolicy, Vocabulary
from models.ngram import Predictor, train_ngram
from utils.validators import parse_policy


ARGMAX = SamplerPolicy(kind="argmax")


class FixedPredictor(Predictor):
    """Always returns the same distribution and a constant duration."""

    def __init__(self, vocabulary, probs, delta=60.0):
        self.vocabulary = vocabulary
        self.dist = NextStepDistribution(np.array(probs, dtype=float))
        self.delta = delta
        self.calls = 0

    def predict_next(self, prefix):
        self.calls += 1
        return self.dist

    def predict_delta(self, prefix, next_activity):
        return self.delta


VOCAB = Vocabulary(("X", "Y"))
PREFIX = (Event("c1", 0, START),)


def test_immediate_end_of_case():
    model = FixedPredictor(VOCAB, [0.0, 0.0, 1.0])
    out = generate_suffix(model, ARGMAX, PREFIX, GenerationLimits(10), make_rng(0))
    assert out.activities == ()
    assert out.terminated_by_eoc is True
    assert out.steps_taken == 1
    assert remaining_time(out, START) == 0.0


def test_step_cap():
    model = FixedPredictor(VOCAB, [1.0, 0.0, 0.0])
    out = generate_suffix(model, ARGMAX, PREFIX, GenerationLimits(5), make_rng(0))
    assert out.activities == (0, 0, 0, 0, 0)
    assert out.terminated_by_eoc is False
    assert out.steps_taken == 5
    assert model.calls == 5
    assert out.end_times[-1] - START == timedelta(seconds=300)


def test_toy_log_argmax_follows_training_paths():
    log = make_log(["A", "B", "C"], ["A", "B", "C"], step_seconds=1800)
    model = train_ngram(log, order=2)
    prefix = log.traces[0].events[:1]
    out = generate_suffix(model, ARGMAX, prefix, default_limits(log), make_rng(0))
    assert out.activities == (1, 2)
    assert out.terminated_by_eoc
    assert [t - START for t in out.end_times] == [timedelta(seconds=1800), timedelta(seconds=3600)]
    assert remaining_time(out, prefix[-1].end_time) == pytest.approx(3600.0)


def test_remaining_time_definition():
    suffix = GeneratedSuffix((0,), (START + timedelta(seconds=7200),), True, 2)
    assert remaining_time(suffix, START) == 7200.0
    assert remaining_time(GeneratedSuffix((), (), True, 1), START) == 0.0


def test_daemon_counts_start_from_prefix_and_include_eoc():
    model = FixedPredictor(VOCAB, [0.5, 0.3, 0.2])
    prefix = (Event("c1", 0, START), Event("c1", 0, START), Event("c1", 1, START))
    seen = []

    def observer(step, counts, dist, choice):
        seen.append((step, counts, choice))

    out = generate_suffix(model, parse_policy("daemon"), prefix, GenerationLimits(6), make_rng(3), observer)
    assert list(seen[0][1]) == [2, 1, 0]
    for (_, before, choice), (_, after, _) in zip(seen, seen[1:]):
        expected = before.copy()
        expected[choice] += 1
        assert np.array_equal(after, expected)
    assert len(seen) == out.steps_taken
    if out.terminated_by_eoc:
        assert seen[-1][2] == VOCAB.eoc_index


def test_same_seed_same_suffix():
    model = FixedPredictor(VOCAB, [0.45, 0.45, 0.1])
    policy = parse_policy("random")
    a = generate_suffix(model, policy, PREFIX, GenerationLimits(20), make_rng(11))
    b = generate_suffix(model, policy, PREFIX, GenerationLimits(20), make_rng(11))
    assert a == b


def test_empty_prefix_rejected():
    model = FixedPredictor(VOCAB, [1.0, 0.0, 0.0])
    with pytest.raises(ValueError):
        generate_suffix(model, ARGMAX, (), GenerationLimits(3), make_rng(0))


def test_pair_seed_is_stable_and_distinct():
    assert pair_seed(42, "c1", 1) == pair_seed(42, "c1", 1)
    seeds = {pair_seed(42, case, k) for case in ("c1", "c2", "c11") for k in (1, 2, 11)}
    assert len(seeds) == 9
    assert pair_seed(42, "c1", 1) != pair_seed(43, "c1", 1)
    assert 0 <= pair_seed(0, "", 0) < 2 ** 64


def test_default_limits():
    log = make_log(["A", "B", "C"], ["A"])
    assert default_limits(log).max_steps == 6
    assert default_limits(log, factor=3).max_steps == 9
    with pytest.raises(ValueError):
        default_limits(log, factor=0)
