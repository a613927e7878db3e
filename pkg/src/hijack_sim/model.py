"""Core state of a simulated review platform.

A platform holds K items with latent qualities, a public ledger of rating
counts and sums (whose per-item means are the displayed averages), and a
generator for honest ratings: noisy signals of true quality clipped to the
rating scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ConfigError


class AttackKind(Enum):
    """Which manipulation the single malicious reviewer performs."""

    NONE = "none"
    SPARSE = "sparse"
    BROAD = "broad"


@dataclass(frozen=True)
class RatingScale:
    """The star scale: ratings and displayed averages live in [min, max]."""

    min_rating: float = 1.0
    max_rating: float = 5.0

    def __post_init__(self):
        if not self.min_rating < self.max_rating:
            raise ConfigError(
                f"scale: min_rating {self.min_rating} must be below "
                f"max_rating {self.max_rating}"
            )

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.min_rating + self.max_rating)

    def clip(self, value: float) -> float:
        return min(max(value, self.min_rating), self.max_rating)


@dataclass(frozen=True)
class SimConfig:
    """Every free parameter of one simulated condition.

    ``m_seed`` honest reviews per item are generated before the attack; the
    attack (if any) is injected next; ``n_arrivals`` users then arrive
    sequentially, each choosing one item through the softmax exposure rule
    (strength ``beta``, sign flipped for the contrarian fraction ``q``) and
    rating it honestly.
    """

    K: int = 50
    m_seed: int = 0
    beta: float = 2.5
    q: float = 0.0
    attack: AttackKind = AttackKind.NONE
    n_arrivals: int = 500
    sigma_rating: float = 1.0
    sigma_quality: float = 0.8
    scale: RatingScale = field(default_factory=RatingScale)
    crn: bool = True
    round_ratings: bool = False
    exclude_unrated_from_rmse: bool = False
    broad_severity: float = 0.5
    broad_fraction: float = 1.0

    def validate(self) -> None:
        if not isinstance(self.K, int) or self.K < 0:
            raise ConfigError(f"K: must be a non-negative integer, got {self.K!r}")
        if not isinstance(self.m_seed, int) or self.m_seed < 0:
            raise ConfigError(f"m_seed: must be a non-negative integer, got {self.m_seed!r}")
        if not isinstance(self.n_arrivals, int) or self.n_arrivals < 0:
            raise ConfigError(f"n_arrivals: must be a non-negative integer, got {self.n_arrivals!r}")
        if self.beta < 0:
            raise ConfigError(f"beta: must be non-negative, got {self.beta!r}")
        if not 0.0 <= self.q <= 1.0:
            raise ConfigError(f"q: {self.q!r} is outside [0, 1]")
        if self.sigma_rating < 0:
            raise ConfigError(f"sigma_rating: must be non-negative, got {self.sigma_rating!r}")
        if self.sigma_quality < 0:
            raise ConfigError(f"sigma_quality: must be non-negative, got {self.sigma_quality!r}")
        if self.attack is AttackKind.SPARSE and self.K < 2:
            raise ConfigError(f"K: must be at least 2 for a sparse attack, got {self.K}")
        half_range = 0.5 * (self.scale.max_rating - self.scale.min_rating)
        if not 0.0 <= self.broad_severity <= half_range:
            raise ConfigError(
                f"broad_severity: {self.broad_severity!r} is outside [0, {half_range:g}]"
            )
        if not 0.0 <= self.broad_fraction <= 1.0:
            raise ConfigError(f"broad_fraction: {self.broad_fraction!r} is outside [0, 1]")


@dataclass(frozen=True)
class ItemCatalog:
    """The true latent qualities, one per item, for a single trial."""

    qualities: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "qualities", np.asarray(self.qualities, dtype=np.float64))

    def __len__(self) -> int:
        return int(self.qualities.shape[0])

    def worst_item(self) -> int:
        """Index of the minimum quality; ties break to the lowest index."""
        return int(np.argmin(self.qualities))

    def best_item(self) -> int:
        """Index of the maximum quality; ties break to the highest index.

        The opposite tie rule from :meth:`worst_item`, so the two targets
        differ even on an all-equal catalog.
        """
        n = len(self)
        return n - 1 - int(np.argmax(self.qualities[::-1]))


class RatingLedger:
    """Per-item rating counts and sums: the platform's public state.

    The displayed average of an item is ``sum / count`` once it has at least
    one rating, and the scale midpoint before that (so exposure stays defined
    for never-rated items).
    """

    def __init__(self, n_items: int, scale: RatingScale | None = None):
        if n_items < 0:
            raise ConfigError(f"n_items: must be non-negative, got {n_items}")
        self.scale = scale if scale is not None else RatingScale()
        self.counts = np.zeros(n_items, dtype=np.int64)
        self.sums = np.zeros(n_items, dtype=np.float64)

    def __len__(self) -> int:
        return int(self.counts.shape[0])

    def _check_item(self, item: int) -> None:
        if not 0 <= item < len(self):
            raise IndexError(f"item {item} out of range for ledger of {len(self)} items")

    def total_count(self) -> int:
        return int(self.counts.sum())

    def record_rating(self, item: int, rating: float) -> RatingLedger:
        """Add one rating. The rating must already lie on the scale; callers clip."""
        self._check_item(item)
        if not self.scale.min_rating <= rating <= self.scale.max_rating:
            raise ValueError(
                f"rating {rating!r} outside "
                f"[{self.scale.min_rating}, {self.scale.max_rating}]"
            )
        self.counts[item] += 1
        self.sums[item] += rating
        return self

    def displayed_average(self, item: int) -> float:
        self._check_item(item)
        if self.counts[item] > 0:
            return float(self.sums[item] / self.counts[item])
        return self.scale.midpoint

    def displayed_averages(self) -> np.ndarray:
        """Vector of displayed averages, with the midpoint fallback for unrated items."""
        out = np.full(len(self), self.scale.midpoint, dtype=np.float64)
        rated = self.counts > 0
        out[rated] = self.sums[rated] / self.counts[rated]
        return out

    def copy(self) -> RatingLedger:
        dup = RatingLedger(len(self), self.scale)
        dup.counts[:] = self.counts
        dup.sums[:] = self.sums
        return dup


def draw_qualities(config: SimConfig, rng: np.random.Generator) -> ItemCatalog:
    """Draw the K latent qualities for one trial.

    Qualities come from a normal centered on the scale midpoint with
    s.d. ``sigma_quality``, truncated to the scale by rejection (not
    clipping, which would pile probability mass onto the bounds).
    """
    if config.sigma_quality < 0:
        raise ConfigError(f"sigma_quality: must be non-negative, got {config.sigma_quality!r}")
    lo, hi = config.scale.min_rating, config.scale.max_rating
    mid = config.scale.midpoint
    out = np.empty(config.K, dtype=np.float64)
    pending = np.arange(config.K)
    while pending.size:
        draws = rng.normal(mid, config.sigma_quality, pending.size)
        ok = (draws >= lo) & (draws <= hi)
        out[pending[ok]] = draws[ok]
        pending = pending[~ok]
    return ItemCatalog(out)


def honest_rating(quality: float, config: SimConfig, rng: np.random.Generator) -> float:
    """One honest rating: quality plus normal noise, clipped to the scale.

    Ratings are continuous by default; ``round_ratings`` snaps them to whole
    stars.
    """
    value = config.scale.clip(quality + rng.normal(0.0, config.sigma_rating))
    if config.round_ratings:
        value = float(np.rint(value))
    return float(value)
