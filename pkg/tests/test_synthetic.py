from pathlib import Path

import numpy as np
import pytest
from scipy.stats import chisquare

from agents.sampling import make_rng
from tools.synthetic import SynthSpecError, generate_synthetic_log, load_spec, loop_passes, spec_from_mapping


SPECS = Path(__file__).resolve().parent.parent / "specs"


def loop_spec(**overrides):
    values = {
        "BASE_PATH": "start,work,check,finish",
        "LOOP_START": "1",
        "LOOP_END": "2",
        "LOOP_PROBABILITY": "0.5",
        "MAX_LOOP_ITERATIONS": "3",
        "DURATION_DEFAULT": "6.0,0.4",
        "N_CASES": "200",
        "CASE_SPACING_SECONDS": "600",
    }
    values.update(overrides)
    return spec_from_mapping(values)


def labels(log, trace):
    return [log.vocabulary.label(a) for a in trace.activities]


def test_no_loop_gives_base_path():
    spec = loop_spec(LOOP_PROBABILITY="0.0")
    log = generate_synthetic_log(spec, make_rng(1))
    assert len(log) == 200
    assert all(labels(log, t) == ["start", "work", "check", "finish"] for t in log.traces)


def test_loop_passes_follow_truncated_geometric():
    spec = loop_spec(N_CASES="10000")
    log = generate_synthetic_log(spec, make_rng(2024))
    passes = np.array([loop_passes(spec, t, log.vocabulary) for t in log.traces])
    observed = np.bincount(passes, minlength=4)
    assert observed.size == 4
    q = 0.5
    expected = np.array([(1 - q), (1 - q) * q, (1 - q) * q ** 2, q ** 3]) * len(passes)
    _, p_value = chisquare(observed, expected)
    assert p_value > 0.001


def test_loop_body_repeats_in_place():
    spec = loop_spec(LOOP_PROBABILITY="0.9", MAX_LOOP_ITERATIONS="2")
    log = generate_synthetic_log(spec, make_rng(5))
    for trace in log.traces:
        path = labels(log, trace)
        n = loop_passes(spec, trace, log.vocabulary)
        assert path == ["start"] + ["work", "check"] * (n + 1) + ["finish"]


def test_zero_deviation_is_deterministic():
    spec = loop_spec(LOOP_PROBABILITY="0.0", DURATION_DEFAULT="7.0,0.0", N_CASES="5")
    a = generate_synthetic_log(spec, make_rng(1))
    b = generate_synthetic_log(spec, make_rng(99))
    assert [[e.end_time for e in t.events] for t in a.traces] == [[e.end_time for e in t.events] for t in b.traces]
    gap = (a.traces[0].events[1].end_time - a.traces[0].events[0].end_time).total_seconds()
    assert gap == round(np.exp(7.0))
    starts = [t.events[0].end_time for t in a.traces]
    assert all((later - earlier).total_seconds() == 600 for earlier, later in zip(starts, starts[1:]))


def test_branch_substitutes_label():
    spec = loop_spec(LOOP_PROBABILITY="0.0", BRANCH_INDEX="2", BRANCH_LABEL="escalate", BRANCH_PROBABILITY="1.0")
    log = generate_synthetic_log(spec, make_rng(3))
    assert all(labels(log, t) == ["start", "work", "escalate", "finish"] for t in log.traces)
    assert "check" not in log.vocabulary


def test_same_seed_same_log():
    spec = loop_spec()
    a = generate_synthetic_log(spec, make_rng(8))
    b = generate_synthetic_log(spec, make_rng(8))
    assert a == b


@pytest.mark.parametrize("overrides", [
    {"LOOP_PROBABILITY": "1.0"},
    {"LOOP_PROBABILITY": "-0.1"},
    {"LOOP_START": "3", "LOOP_END": "1"},
    {"LOOP_END": "9"},
    {"N_CASES": "0"},
    {"N_CASES": ""},
    {"BASE_PATH": ""},
    {"BASE_PATH": "a,a"},
    {"BRANCH_INDEX": "1", "BRANCH_LABEL": "work"},
    {"DURATION_DEFAULT": "6.0"},
    {"DURATION_DEFAULT": "6.0,-1"},
    {"START": "yesterday"},
])
def test_invalid_specs(overrides):
    with pytest.raises(SynthSpecError):
        loop_spec(**overrides)


def test_bundled_specs_load(tmp_path):
    heavy = load_spec(SPECS / "loop_heavy.env")
    assert heavy.loop_probability == pytest.approx(0.7)
    assert heavy.base_path[heavy.loop_start:heavy.loop_end + 1] == ("check", "assess", "rework", "validate")
    assert heavy.n_cases == 1000
    deterministic = load_spec(SPECS / "deterministic.env")
    assert deterministic.loop_probability == 0.0
    with pytest.raises(FileNotFoundError):
        load_spec(tmp_path / "missing.env")
