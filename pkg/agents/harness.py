"""Experiment protocol: split, tune, retrain, then score every sampler on the same pairs."""
import time
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from agents.generation import default_limits, generate_suffix, pair_seed, remaining_time
from agents.sampling import make_rng
from agents.search import random_search
from config import ExperimentConfig
from models.data_models import (
    EvaluationReport,
    EventLog,
    GenerationLimits,
    MetricSummary,
    PolicyEvaluation,
    PrefixSuffixPair,
    SamplerPolicy,
)
from models.ngram import NgramModel, Predictor, train_ngram
from tools.eventlog import log_prefix_pairs, temporal_split
from tools.executor import PairExecutor
from utils.logging import EventLogger, NullLogger
from utils.metrics import mae, merge_profiles, ras, repetition_profile, sdl


METRICS = ("mean_sdl", "mean_ras", "mae_hours")
# higher is better for the similarities, lower for the error
_ASCENDING = {"mean_sdl": False, "mean_ras": False, "mae_hours": True}


class RankTableError(ValueError):
    pass


def _activities(events) -> Tuple[int, ...]:
    return tuple(e.activity for e in events)


async def evaluate_policy(
    model: Predictor,
    policy: SamplerPolicy,
    pairs: Sequence[PrefixSuffixPair],
    limits: GenerationLimits,
    seed: int,
    executor: PairExecutor,
) -> PolicyEvaluation:
    if not pairs:
        raise ValueError("no prefix/suffix pairs to evaluate")

    def score(pair: PrefixSuffixPair):
        rng = make_rng(pair_seed(seed, pair.case_id, pair.k))
        generated = generate_suffix(model, policy, pair.prefix, limits, rng)
        truth = _activities(pair.true_suffix)
        predicted_hours = remaining_time(generated, pair.prefix_end_time) / 3600.0
        actual_hours = pair.actual_remaining_seconds / 3600.0
        return (
            sdl(truth, generated.activities),
            ras(truth, generated.activities),
            (actual_hours, predicted_hours),
            repetition_profile(generated.activities),
        )

    scored = await executor.map("generate_batch", score, list(pairs), extra={"policy": policy.name})
    sdl_values = [s[0] for s in scored]
    ras_values = [s[1] for s in scored]
    hours = [s[2] for s in scored]
    return PolicyEvaluation(
        policy=policy.name,
        manifest=[(p.case_id, p.k) for p in pairs],
        sdl=sdl_values,
        ras=ras_values,
        abs_errors_hours=[abs(a - p) for a, p in hours],
        repetition_profile=merge_profiles(s[3] for s in scored),
        summary=MetricSummary(
            mean_sdl=float(np.mean(sdl_values)),
            mean_ras=float(np.mean(ras_values)),
            mae_hours=mae(hours),
            n_pairs=len(scored),
        ),
    )


async def run_experiment(
    log: EventLog,
    policies: Sequence[SamplerPolicy],
    config: ExperimentConfig = ExperimentConfig(),
    logger: Optional[EventLogger] = None,
    model: Optional[NgramModel] = None,
) -> EvaluationReport:
    """Split, tune, retrain on the full training part, then score each policy.

    A pre-trained `model` skips both the search and the retraining.
    """
    if not policies:
        raise ValueError("at least one sampler policy is required")
    logger = logger or NullLogger()
    started = time.perf_counter()
    executor = PairExecutor(workers=config.workers, logger=logger)

    with logger.timed("split", "harness") as t:
        train, test = temporal_split(log, config.train_fraction)
        t.result("ok", extra={"train": len(train), "test": len(test)})

    search = None
    if model is not None:
        order, alpha = model.order, model.alpha
    elif config.fixed is None:
        with logger.timed("search", "harness") as t:
            search = await random_search(
                train,
                config.space,
                iterations=config.hpo_iterations,
                seed=config.seed,
                fit_fraction=config.fit_fraction,
                max_steps_factor=config.max_steps_factor,
                executor=executor,
                logger=logger,
            )
            t.result("ok", extra={"trials": len(search.trials)})
        order, alpha = search.order, search.alpha
    else:
        order, alpha = config.fixed

    if model is None:
        with logger.timed("train", "harness") as t:
            model = train_ngram(train, order, alpha)
            t.result("ok", extra={"order": order, "alpha": alpha, "contexts": len(model.transitions)})

    pairs = log_prefix_pairs(test)
    if not pairs:
        raise ValueError("test split has no trace with two or more events")
    limits = default_limits(train, config.max_steps_factor)

    evaluations: List[PolicyEvaluation] = []
    for policy in policies:
        with logger.timed("evaluate_policy", "harness") as t:
            evaluation = await evaluate_policy(model, policy, pairs, limits, config.seed, executor)
            s = evaluation.summary
            t.result("ok", extra={"policy": policy.name, "sdl": s.mean_sdl, "ras": s.mean_ras, "mae_hours": s.mae_hours})
        evaluations.append(evaluation)

    return EvaluationReport(
        dataset=config.dataset,
        order=order,
        alpha=alpha,
        seed=config.seed,
        max_steps=limits.max_steps,
        evaluations=evaluations,
        truth_profile=merge_profiles(repetition_profile(_activities(p.true_suffix)) for p in pairs),
        search=search,
        wall_clock_seconds=time.perf_counter() - started,
    )


def competition_ranks(values: Sequence[float], ascending: bool = False) -> List[int]:
    """Rank on values rounded to two decimals; tied values share the best rank of their block."""
    rounded = pd.Series(values, dtype=float).round(2)
    return [int(r) for r in rounded.rank(method="min", ascending=ascending)]


def rank_table(reports: Sequence[Tuple[str, EvaluationReport]]) -> Dict[str, pd.DataFrame]:
    """Per metric, a dataset x policy frame of competition ranks."""
    if not reports:
        raise RankTableError("rank table needs at least one report")
    policies = reports[0][1].policies
    for name, report in reports:
        if sorted(report.policies) != sorted(policies):
            raise RankTableError(f"report {name!r} has policies {report.policies}, expected {policies}")

    tables: Dict[str, pd.DataFrame] = {}
    for metric in METRICS:
        rows = {}
        for name, report in reports:
            values = [getattr(report.summary(p), metric) for p in policies]
            rows[name] = competition_ranks(values, ascending=_ASCENDING[metric])
        tables[metric] = pd.DataFrame.from_dict(rows, orient="index", columns=policies)
    return tables


def winners(ranks: pd.DataFrame) -> Dict[str, List[str]]:
    """Rank-1 policies per dataset."""
    return {dataset: [p for p in ranks.columns if row[p] == 1] for dataset, row in ranks.iterrows()}
