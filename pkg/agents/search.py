from typing import Dict, List, Optional, Sequence, Tuple

from agents.generation import default_limits, generate_suffix, pair_seed, remaining_time
from agents.sampling import make_rng
from models.data_models import EventLog, GenerationLimits, PrefixSuffixPair, SamplerPolicy, SearchResult, SearchSpace, SearchTrial
from models.ngram import Predictor, train_ngram
from tools.eventlog import SplitError, log_prefix_pairs, temporal_split
from tools.executor import PairExecutor
from utils.logging import EventLogger, NullLogger
from utils.metrics import mae


ARGMAX = SamplerPolicy(kind="argmax")


async def validation_mae(
    model: Predictor,
    pairs: Sequence[PrefixSuffixPair],
    limits: GenerationLimits,
    seed: int,
    executor: PairExecutor,
) -> float:
    """Remaining-time MAE in hours of argmax-decoded suffixes."""

    def absolute_pair(pair: PrefixSuffixPair) -> Tuple[float, float]:
        rng = make_rng(pair_seed(seed, pair.case_id, pair.k))
        generated = generate_suffix(model, ARGMAX, pair.prefix, limits, rng)
        predicted = remaining_time(generated, pair.prefix_end_time)
        return pair.actual_remaining_seconds / 3600.0, predicted / 3600.0

    results = await executor.map("search_validate", absolute_pair, list(pairs))
    return mae(results)


async def random_search(
    train: EventLog,
    space: SearchSpace = SearchSpace(),
    iterations: int = 50,
    seed: int = 42,
    fit_fraction: float = 0.8,
    max_steps_factor: int = 2,
    executor: Optional[PairExecutor] = None,
    logger: Optional[EventLogger] = None,
) -> SearchResult:
    """Uniform draws (with replacement) of (order, alpha); keep the lowest validation MAE.

    Training data is split temporally into fit/validation. A configuration
    drawn twice is scored once; every draw is still recorded as a trial.
    Ties keep the first configuration found.
    """
    if iterations < 1:
        raise ValueError(f"random search needs at least one iteration, got {iterations}")
    logger = logger or NullLogger()
    executor = executor or PairExecutor(logger=logger)
    fit, validation = temporal_split(train, fit_fraction)
    pairs = log_prefix_pairs(validation)
    if not pairs:
        raise SplitError("validation split has no trace with two or more events")
    limits = default_limits(fit, max_steps_factor)

    rng = make_rng(seed)
    scored: Dict[Tuple[int, float], float] = {}
    trials: List[SearchTrial] = []
    best: Optional[SearchTrial] = None
    for i in range(iterations):
        order = int(space.orders[int(rng.integers(len(space.orders)))])
        alpha = float(space.alphas[int(rng.integers(len(space.alphas)))])
        key = (order, alpha)
        if key not in scored:
            model = train_ngram(fit, order, alpha)
            scored[key] = await validation_mae(model, pairs, limits, seed, executor)
        trial = SearchTrial(order=order, alpha=alpha, validation_mae=scored[key])
        trials.append(trial)
        logger.trace("search_trial", "random_search", extra={"trial": i + 1, "order": order, "alpha": alpha, "mae_hours": trial.validation_mae})
        if best is None or trial.validation_mae < best.validation_mae:
            best = trial

    logger.log("search_best", "random_search", "ok", extra={"order": best.order, "alpha": best.alpha, "mae_hours": best.validation_mae, "distinct": len(scored)})
    return SearchResult(order=best.order, alpha=best.alpha, validation_mae=best.validation_mae, trials=tuple(trials))
