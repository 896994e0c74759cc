"""Monte Carlo harness for root-finding success rates.

A trial samples a growth tree, shuffles its labels, scores the shape, and
checks whether the true first vertex landed in the K lowest-scoring
vertices.  Trial i always uses the stream (seed, i), so results are
bit-identical whether trials run serially or across worker processes, and
two configs sharing a seed see the same trees — which makes success rates
exactly monotone in K and lets different estimators be compared pairwise
on identical inputs.
"""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import BadSizeError, TooLargeError
from .estimators import ESTIMATOR_TAGS, score_tree, select_smallest
from .generators import ModelSpec, parse_model
from .rng import DEFAULT_SEED, RngStream
from .trees import forget_labels

__all__ = [
    "ExperimentConfig",
    "ExperimentResult",
    "run_trials",
    "sweep",
    "parse_sweep_grid",
    "root_leaf_frequency",
    "wilson_interval",
    "results_csv",
    "CSV_COLUMNS",
    "DEFAULT_MAX_EXACT_N",
]

# zeta/xi re-derive automorphism factors per candidate root (quadratic);
# refuse big cells unless the caller raises the cap explicitly
DEFAULT_MAX_EXACT_N = 2000

_Z95 = 1.959963984540054

CSV_COLUMNS = (
    "model",
    "estimator",
    "n",
    "k",
    "trials",
    "successes",
    "rate",
    "lo95",
    "hi95",
    "seconds",
)


@dataclass(frozen=True)
class ExperimentConfig:
    """One Monte Carlo cell: which model/estimator/size/set-size/seed."""

    model: ModelSpec
    estimator: str
    n: int
    k: int
    trials: int
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.estimator not in ESTIMATOR_TAGS:
            raise ValueError(f"unknown estimator {self.estimator!r}")
        if self.n < 2:
            raise BadSizeError(f"need n >= 2, got n={self.n}")
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")


@dataclass(frozen=True)
class ExperimentResult:
    """Success tally with a Wilson 95% interval.

    ``outcomes[i]`` is trial i's success flag; ``seconds`` is wall time.
    Equality compares the statistical fields only — wall time is
    environment noise, and outcomes are summarized by the tally.
    """

    successes: int
    trials: int
    rate: float
    lo95: float
    hi95: float
    seconds: float = field(compare=False)
    outcomes: np.ndarray = field(compare=False, repr=False)


def wilson_interval(successes: int, trials: int, z: float = _Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("trials must be positive")
    if not (0 <= successes <= trials):
        raise ValueError("successes must lie in 0..trials")
    p = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + z2 / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def _result_from_outcomes(outcomes: np.ndarray, seconds: float) -> ExperimentResult:
    successes = int(np.count_nonzero(outcomes))
    trials = int(outcomes.shape[0])
    lo, hi = wilson_interval(successes, trials)
    return ExperimentResult(
        successes=successes,
        trials=trials,
        rate=successes / trials,
        lo95=lo,
        hi95=hi,
        seconds=seconds,
        outcomes=outcomes,
    )


def _success_trial(config: ExperimentConfig, trial: int) -> bool:
    gen = RngStream(config.seed, trial).generator()
    tree = config.model.sample(config.n, gen)
    shape, true_root = forget_labels(tree, gen)
    scores = score_tree(shape, config.estimator)
    picked = select_smallest(scores, config.k)
    return true_root in picked


def _success_range(args) -> tuple[int, list[bool]]:
    config, start, stop = args
    return start, [_success_trial(config, t) for t in range(start, stop)]


def _leaf_trial(model: ModelSpec, n: int, seed: int, trial: int) -> bool:
    tree = model.sample(n, RngStream(seed, trial))
    return int(np.count_nonzero(tree.parent[2:] == 1)) == 1


def _leaf_range(args) -> tuple[int, list[bool]]:
    model, n, seed, start, stop = args
    return start, [_leaf_trial(model, n, seed, t) for t in range(start, stop)]


def _run_parallel(worker, tasks, trials: int, jobs: int) -> np.ndarray:
    """Scatter (start, stop) chunks over processes; stitch by start index."""
    outcomes = np.zeros(trials, dtype=bool)
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for start, flags in pool.map(worker, tasks):
            outcomes[start : start + len(flags)] = flags
    return outcomes


def _chunks(trials: int, jobs: int) -> list[tuple[int, int]]:
    size = max(1, math.ceil(trials / (jobs * 4)))
    return [(s, min(s + size, trials)) for s in range(0, trials, size)]


def run_trials(
    config: ExperimentConfig,
    jobs: int = 1,
    max_exact_n: int = DEFAULT_MAX_EXACT_N,
) -> ExperimentResult:
    """Run one cell; identical results for every ``jobs`` value."""
    if config.estimator in ("zeta", "xi") and config.n > max_exact_n:
        raise TooLargeError(
            f"estimator {config.estimator!r} is quadratic; n={config.n} exceeds the "
            f"default cap {max_exact_n} (raise max_exact_n / --max-exact-n to override)"
        )
    t0 = time.perf_counter()
    if jobs <= 1:
        outcomes = np.fromiter(
            (_success_trial(config, t) for t in range(config.trials)),
            dtype=bool,
            count=config.trials,
        )
    else:
        tasks = [(config, start, stop) for start, stop in _chunks(config.trials, jobs)]
        outcomes = _run_parallel(_success_range, tasks, config.trials, jobs)
    return _result_from_outcomes(outcomes, time.perf_counter() - t0)


def root_leaf_frequency(
    model: ModelSpec,
    n: int,
    trials: int,
    seed: int = DEFAULT_SEED,
    jobs: int = 1,
) -> ExperimentResult:
    """Frequency with which the first vertex ends up with degree 1."""
    if n < 3:
        raise BadSizeError(f"need n >= 3, got n={n}")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    t0 = time.perf_counter()
    if jobs <= 1:
        outcomes = np.fromiter(
            (_leaf_trial(model, n, seed, t) for t in range(trials)),
            dtype=bool,
            count=trials,
        )
    else:
        tasks = [(model, n, seed, start, stop) for start, stop in _chunks(trials, jobs)]
        outcomes = _run_parallel(_leaf_range, tasks, trials, jobs)
    return _result_from_outcomes(outcomes, time.perf_counter() - t0)


def sweep(
    configs: list[ExperimentConfig],
    jobs: int = 1,
    max_exact_n: int = DEFAULT_MAX_EXACT_N,
) -> list[tuple[ExperimentConfig, ExperimentResult]]:
    """Run a list of cells in order (parallelism lives inside each cell)."""
    if not configs:
        raise ValueError("empty sweep grid")
    return [(c, run_trials(c, jobs=jobs, max_exact_n=max_exact_n)) for c in configs]


def parse_sweep_grid(text: str) -> list[ExperimentConfig]:
    """Parse a key=value grid file into the cartesian product of cells.

    Keys: model, estimator, n, k (comma-separated lists allowed) and
    trials, seed (single values; seed optional).  Model tokens are
    ua/uniform, pa/preferential, or alpha:<value>.  '#' starts a comment.
    Cells are produced in model -> estimator -> n -> k nesting order.
    """
    entries: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip().lower()
        if key in entries:
            raise ValueError(f"duplicate key {key!r}")
        entries[key] = value.strip()
    required = {"model", "estimator", "n", "k", "trials"}
    missing = required - entries.keys()
    if missing:
        raise ValueError(f"sweep grid is missing keys: {sorted(missing)}")
    unknown = entries.keys() - (required | {"seed"})
    if unknown:
        raise ValueError(f"unknown sweep keys: {sorted(unknown)}")

    models = [parse_model(tok) for tok in entries["model"].split(",")]
    estimators = [e.strip() for e in entries["estimator"].split(",")]
    ns = [int(v) for v in entries["n"].split(",")]
    ks = [int(v) for v in entries["k"].split(",")]
    trials = int(entries["trials"])
    seed = int(entries.get("seed", DEFAULT_SEED))
    return [
        ExperimentConfig(model=m, estimator=e, n=n, k=k, trials=trials, seed=seed)
        for m in models
        for e in estimators
        for n in ns
        for k in ks
    ]


def results_csv(rows: list[tuple[ExperimentConfig, ExperimentResult]]) -> str:
    """Render (config, result) pairs as the standard CSV table."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for config, res in rows:
        writer.writerow(
            [
                config.model.label,
                config.estimator,
                config.n,
                config.k,
                res.trials,
                res.successes,
                repr(res.rate),
                repr(res.lo95),
                repr(res.hi95),
                f"{res.seconds:.3f}",
            ]
        )
    return buf.getvalue()
