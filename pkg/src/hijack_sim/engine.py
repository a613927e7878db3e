"""Paired trials, Monte Carlo conditions, and the parameter-grid sweep.

One replicate draws a catalog, seeds both arms identically, injects the
attack into one arm, and runs the same arrival budget in each. With common
random numbers (the default) both arms consume identical orientation,
choice, and rating-noise streams, so they diverge only where the attack
shifts a choice probability across the same uniform draw; a no-op attack
therefore produces an exactly-zero outcome. Conditions and replicates are
embarrassingly parallel, and every emitted number is a pure function of
(spec, master_seed).
"""

from __future__ import annotations

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .attacks import DEFAULT_BROAD_SEVERITY, apply_attack, build_attack_plan
from .dynamics import draw_arrival_arrays, run_arrival_arrays
from .errors import ConfigError
from .metrics import PairedOutcome, paired_outcome
from .model import AttackKind, ItemCatalog, RatingLedger, SimConfig, draw_qualities
from .rng import Stream, arrival_streams, check_master_seed, substream

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepSpec:
    """Axes and shared parameters of one sweep; defaults are the main grid."""

    m_seed_values: tuple[int, ...] = (0, 2, 5, 10)
    beta_values: tuple[float, ...] = (1.5, 2.5, 4.0)
    q_values: tuple[float, ...] = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5)
    attacks: tuple[AttackKind, ...] = (AttackKind.SPARSE,)
    K: int = 50
    n_arrivals: int = 500
    sigma_rating: float = 1.0
    sigma_quality: float = 0.8
    replicates: int = 1000
    master_seed: int = 0
    crn: bool = True
    round_ratings: bool = False
    exclude_unrated_from_rmse: bool = False
    broad_severity: float = DEFAULT_BROAD_SEVERITY
    broad_fraction: float = 1.0
    block_catalogs: bool = False

    def validate(self) -> None:
        for name, axis in (
            ("m_seed", self.m_seed_values),
            ("beta", self.beta_values),
            ("q", self.q_values),
            ("attack", self.attacks),
        ):
            if len(axis) == 0:
                raise ConfigError(f"{name}: axis must be non-empty")
        if self.replicates < 1:
            raise ConfigError(f"replicates: must be at least 1, got {self.replicates}")
        check_master_seed(self.master_seed)
        for config in expand_grid(self):
            config.validate()


@dataclass(frozen=True)
class ConditionSummary:
    """Monte Carlo mean and standard error of each outcome at one grid point."""

    config: SimConfig
    replicates: int
    mean_delta_rmse: float
    se_delta_rmse: float
    mean_best_demotion: float
    se_best_demotion: float
    mean_worst_promotion: float
    se_worst_promotion: float


def mean_and_se(values) -> tuple[float, float]:
    """Sample mean and standard error sqrt(s^2 / n); SE is defined as 0 for n = 1."""
    arr = np.asarray(values, dtype=np.float64)
    n = arr.shape[0]
    if n == 0:
        raise ValueError("mean_and_se needs at least one value")
    mean = float(arr.mean())
    se = float(arr.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return mean, se


def expand_grid(spec: SweepSpec) -> list[SimConfig]:
    """Cartesian product in deterministic order: m_seed, then beta, then q, then attack."""
    for name, axis in (
        ("m_seed", spec.m_seed_values),
        ("beta", spec.beta_values),
        ("q", spec.q_values),
        ("attack", spec.attacks),
    ):
        if len(axis) == 0:
            raise ConfigError(f"{name}: axis must be non-empty")
    return [
        SimConfig(
            K=spec.K,
            m_seed=m,
            beta=b,
            q=q,
            attack=a,
            n_arrivals=spec.n_arrivals,
            sigma_rating=spec.sigma_rating,
            sigma_quality=spec.sigma_quality,
            crn=spec.crn,
            round_ratings=spec.round_ratings,
            exclude_unrated_from_rmse=spec.exclude_unrated_from_rmse,
            broad_severity=spec.broad_severity,
            broad_fraction=spec.broad_fraction,
        )
        for m, b, q, a in itertools.product(
            spec.m_seed_values, spec.beta_values, spec.q_values, spec.attacks
        )
    ]


def run_trial_pair(
    config: SimConfig,
    master_seed: int,
    replicate: int,
    condition: int = 0,
    quality_condition: int | None = None,
    catalog: ItemCatalog | None = None,
) -> PairedOutcome:
    """One seeded attack-vs-no-attack comparison.

    ``condition`` separates the streams of different grid points;
    ``quality_condition`` pins the catalog stream elsewhere (catalog
    blocking across conditions). Passing ``catalog`` skips the quality
    draw entirely, which analytic fixtures rely on.
    """
    config.validate()
    check_master_seed(master_seed)
    qcond = condition if quality_condition is None else quality_condition
    if catalog is None:
        catalog = draw_qualities(
            config, substream(master_seed, Stream.QUALITY, replicate, condition=qcond)
        )
    elif len(catalog) != config.K:
        raise ConfigError(f"K: catalog has {len(catalog)} items, config says {config.K}")
    scale = config.scale

    unattacked = RatingLedger(config.K, scale)
    if config.m_seed > 0 and config.K > 0:
        seed_rng = substream(master_seed, Stream.SEED_REVIEWS, replicate, condition=condition)
        noise = seed_rng.normal(0.0, config.sigma_rating, (config.m_seed, config.K))
        seeded = np.clip(catalog.qualities[None, :] + noise, scale.min_rating, scale.max_rating)
        if config.round_ratings:
            seeded = np.rint(seeded)
        unattacked.counts += config.m_seed
        unattacked.sums += seeded.sum(axis=0)

    attacked = unattacked.copy()
    plan = build_attack_plan(
        config.attack, catalog, scale,
        severity=config.broad_severity, fraction=config.broad_fraction,
    )
    apply_attack(attacked, plan)

    if config.n_arrivals > 0:
        if config.crn:
            streams = arrival_streams(master_seed, replicate, condition=condition, arm=0)
            arrays = draw_arrival_arrays(streams, config)
            run_arrival_arrays(catalog, unattacked, config.beta, *arrays, config.round_ratings)
            run_arrival_arrays(catalog, attacked, config.beta, *arrays, config.round_ratings)
        else:
            for arm, ledger in ((0, unattacked), (1, attacked)):
                streams = arrival_streams(master_seed, replicate, condition=condition, arm=arm)
                arrays = draw_arrival_arrays(streams, config)
                run_arrival_arrays(catalog, ledger, config.beta, *arrays, config.round_ratings)

    return paired_outcome(
        attacked, unattacked, catalog, exclude_unrated=config.exclude_unrated_from_rmse
    )


def run_condition(
    config: SimConfig,
    replicates: int,
    master_seed: int,
    condition: int = 0,
    quality_condition: int | None = None,
    catalog: ItemCatalog | None = None,
) -> ConditionSummary:
    """Monte Carlo over replicates 0..R-1 at one grid point."""
    if replicates < 1:
        raise ConfigError(f"replicates: must be at least 1, got {replicates}")
    delta = np.empty(replicates)
    demotion = np.empty(replicates)
    promotion = np.empty(replicates)
    for r in range(replicates):
        out = run_trial_pair(
            config, master_seed, r,
            condition=condition, quality_condition=quality_condition, catalog=catalog,
        )
        delta[r] = out.delta_rmse
        demotion[r] = out.best_item_demotion
        promotion[r] = out.worst_item_promotion
    md, sd = mean_and_se(delta)
    mb, sb = mean_and_se(demotion)
    mw, sw = mean_and_se(promotion)
    return ConditionSummary(
        config=config,
        replicates=replicates,
        mean_delta_rmse=md,
        se_delta_rmse=sd,
        mean_best_demotion=mb,
        se_best_demotion=sb,
        mean_worst_promotion=mw,
        se_worst_promotion=sw,
    )


def _condition_task(task) -> ConditionSummary:
    index, config, replicates, master_seed, quality_condition = task
    return run_condition(
        config, replicates, master_seed,
        condition=index, quality_condition=quality_condition,
    )


def run_conditions(
    configs: list[SimConfig],
    replicates: int,
    master_seed: int,
    workers: int = 1,
    block_catalogs: bool = False,
) -> list[ConditionSummary]:
    """Run a list of conditions, optionally across worker processes.

    Condition i always uses stream condition index i, so the output is
    byte-identical whatever the worker count. ``block_catalogs`` reuses
    condition 0's quality stream everywhere, giving every condition the
    same catalog at equal replicate index.
    """
    quality_condition = 0 if block_catalogs else None
    tasks = [
        (i, config, replicates, master_seed, quality_condition)
        for i, config in enumerate(configs)
    ]
    summaries: list[ConditionSummary] = []
    if workers <= 1:
        results = map(_condition_task, tasks)
        for summary in _log_progress(results, len(tasks)):
            summaries.append(summary)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for summary in _log_progress(pool.map(_condition_task, tasks), len(tasks)):
                summaries.append(summary)
    return summaries


def _log_progress(results, total: int):
    for i, summary in enumerate(results):
        cfg = summary.config
        log.info(
            "condition %d/%d m_seed=%d beta=%g q=%g attack=%s: "
            "delta_rmse=%.4f best_demotion=%.2f worst_promotion=%.2f",
            i + 1, total, cfg.m_seed, cfg.beta, cfg.q, cfg.attack.value,
            summary.mean_delta_rmse, summary.mean_best_demotion,
            summary.mean_worst_promotion,
        )
        yield summary


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[ConditionSummary]:
    """One summary per grid point, in grid order."""
    spec.validate()
    configs = expand_grid(spec)
    return run_conditions(
        configs, spec.replicates, spec.master_seed,
        workers=workers, block_catalogs=spec.block_catalogs,
    )
