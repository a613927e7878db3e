"""The single malicious reviewer's injection strategies.

A sparse attack spends two ratings where they bite hardest: the scale
maximum on the true worst item and the scale minimum on the true best item.
A broad attack rates every item against its quality, but diffusely: each
rating sits ``severity`` stars on the wrong side of the scale midpoint, so
low-quality items are pushed up and high-quality items down while the
displayed-average differentials that exposure feeds on get flattened rather
than sharpened. Injections land after seeding and before the first arrival.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .model import AttackKind, ItemCatalog, RatingLedger, RatingScale

DEFAULT_BROAD_SEVERITY = 0.5


@dataclass(frozen=True)
class AttackPlan:
    """Concrete (item, rating) injections; empty for AttackKind.NONE."""

    injections: tuple[tuple[int, float], ...]

    def __len__(self) -> int:
        return len(self.injections)


EMPTY_PLAN = AttackPlan(())


def build_sparse_attack(catalog: ItemCatalog, scale: RatingScale) -> AttackPlan:
    """Two targeted injections: max the worst item, min the best item.

    The worst item is the lowest-index minimum quality and the best the
    highest-index maximum, so the targets differ even when all qualities tie.
    """
    if len(catalog) < 2:
        raise ConfigError(f"K: must be at least 2 for a sparse attack, got {len(catalog)}")
    return AttackPlan((
        (catalog.worst_item(), scale.max_rating),
        (catalog.best_item(), scale.min_rating),
    ))


def build_broad_attack(
    catalog: ItemCatalog,
    scale: RatingScale,
    severity: float = DEFAULT_BROAD_SEVERITY,
    fraction: float = 1.0,
) -> AttackPlan:
    """One anti-quality injection per attacked item.

    Items at or above the midpoint are rated ``midpoint - severity``;
    items below it get ``midpoint + severity``. ``severity`` is capped at
    half the scale range, where the rule degenerates to rating at the exact
    bounds (a far more damaging variant kept for comparison runs; see the
    package docs for why the diffuse default is the interesting one).
    ``fraction`` < 1 attacks only the round(fraction * K) items whose
    quality sits furthest from the midpoint, ties to the lowest index.
    """
    half_range = 0.5 * (scale.max_rating - scale.min_rating)
    if not 0.0 <= severity <= half_range:
        raise ConfigError(f"broad_severity: {severity!r} is outside [0, {half_range:g}]")
    if not 0.0 <= fraction <= 1.0:
        raise ConfigError(f"broad_fraction: {fraction!r} is outside [0, 1]")
    n = len(catalog)
    if n == 0:
        return EMPTY_PLAN
    n_attacked = int(round(fraction * n))
    if n_attacked == 0:
        return EMPTY_PLAN
    mid = scale.midpoint
    deviation = np.abs(catalog.qualities - mid)
    order = np.lexsort((np.arange(n), -deviation))
    targets = np.sort(order[:n_attacked])
    down, up = mid - severity, mid + severity
    return AttackPlan(tuple(
        (int(i), down if catalog.qualities[i] >= mid else up) for i in targets
    ))


def build_attack_plan(
    kind: AttackKind,
    catalog: ItemCatalog,
    scale: RatingScale,
    severity: float = DEFAULT_BROAD_SEVERITY,
    fraction: float = 1.0,
) -> AttackPlan:
    if kind is AttackKind.NONE:
        return EMPTY_PLAN
    if kind is AttackKind.SPARSE:
        return build_sparse_attack(catalog, scale)
    return build_broad_attack(catalog, scale, severity=severity, fraction=fraction)


def apply_attack(ledger: RatingLedger, plan: AttackPlan) -> RatingLedger:
    """Record every injection on the ledger (additive; callers apply once)."""
    for item, rating in plan.injections:
        ledger.record_rating(item, rating)
    return ledger
