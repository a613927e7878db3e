"""Outcome measures for one attack-vs-no-attack trial pair.

Three complementary views of the damage: the change in RMSE of displayed
averages against true quality (aggregate error), how far the true best item
fell in the final ranking, and how far the true worst item rose. Rank
shifts are paired between the two arms, so a no-op attack scores exactly
zero on everything.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ItemCatalog, RatingLedger


@dataclass(frozen=True)
class Ranking:
    """rank_of[i] is item i's rank: 1 = highest displayed average, K = lowest."""

    rank_of: np.ndarray

    def __len__(self) -> int:
        return int(self.rank_of.shape[0])


@dataclass(frozen=True)
class PairedOutcome:
    delta_rmse: float
    best_item_demotion: int
    worst_item_promotion: int
    rmse_attack: float
    rmse_no_attack: float


def rmse(ledger: RatingLedger, catalog: ItemCatalog, exclude_unrated: bool = False) -> float:
    """Root mean squared error of displayed averages against true quality.

    Unrated items enter at the midpoint fallback unless ``exclude_unrated``
    drops them from the average.
    """
    if len(ledger) != len(catalog):
        raise ValueError(f"ledger has {len(ledger)} items but catalog has {len(catalog)}")
    if len(catalog) == 0:
        raise ValueError("rmse is undefined for an empty catalog")
    err = ledger.displayed_averages() - catalog.qualities
    if exclude_unrated:
        rated = ledger.counts > 0
        if not rated.any():
            raise ValueError("no rated items to average over")
        err = err[rated]
    return float(np.sqrt(np.mean(err * err)))


def final_ranking(ledger: RatingLedger) -> Ranking:
    """Items sorted by displayed average, descending; ties break to the lower index."""
    displays = ledger.displayed_averages()
    n = displays.shape[0]
    order = np.lexsort((np.arange(n), -displays))
    rank_of = np.empty(n, dtype=np.int64)
    rank_of[order] = np.arange(1, n + 1)
    return Ranking(rank_of)


def paired_outcome(
    attacked: RatingLedger,
    unattacked: RatingLedger,
    catalog: ItemCatalog,
    exclude_unrated: bool = False,
) -> PairedOutcome:
    """Compare the two arms of one trial.

    Positive demotion means the true best item sits strictly lower in the
    attacked arm's ranking; positive promotion means the true worst item
    sits strictly higher. The best/worst targets use the same tie rules as
    the sparse attack, so metric targets coincide with attack targets.
    """
    if len(attacked) != len(unattacked):
        raise ValueError(
            f"arm lengths differ: {len(attacked)} attacked vs {len(unattacked)} unattacked"
        )
    rmse_attack = rmse(attacked, catalog, exclude_unrated)
    rmse_no_attack = rmse(unattacked, catalog, exclude_unrated)
    rank_attacked = final_ranking(attacked).rank_of
    rank_unattacked = final_ranking(unattacked).rank_of
    best = catalog.best_item()
    worst = catalog.worst_item()
    return PairedOutcome(
        delta_rmse=rmse_attack - rmse_no_attack,
        best_item_demotion=int(rank_attacked[best] - rank_unattacked[best]),
        worst_item_promotion=int(rank_unattacked[worst] - rank_attacked[worst]),
        rmse_attack=rmse_attack,
        rmse_no_attack=rmse_no_attack,
    )
