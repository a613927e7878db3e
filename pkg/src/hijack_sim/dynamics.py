"""Popularity-biased exposure and the sequential arrival loop.

Arriving users pick an item through a softmax over the currently displayed
averages. Conformists weight high averages up (sign +1); contrarians flip
the sign of the popularity response and head for low averages instead.
After choosing, every user rates honestly.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from numba import njit

from .errors import ConfigError
from .model import ItemCatalog, RatingLedger, SimConfig
from .rng import TrialStreams


class Orientation(Enum):
    CONFORMIST = "conformist"
    CONTRARIAN = "contrarian"


@dataclass(frozen=True)
class ArrivalEvent:
    """One arriving user: who they were, what they chose, what they rated."""

    orientation: Orientation
    chosen_item: int
    rating: float


def choice_probabilities(
    displays: np.ndarray, beta: float, orientation: Orientation
) -> np.ndarray:
    """Softmax choice distribution over displayed averages.

    p_i is proportional to exp(s * beta * display_i) with s = +1 for a
    conformist and -1 for a contrarian. The maximum exponent is subtracted
    before exponentiating, so the result stays finite and normalized for
    beta up to at least 1e3 at the scale bounds.
    """
    d = np.asarray(displays, dtype=np.float64)
    if d.size == 0:
        raise ValueError("displays must be non-empty")
    if np.isnan(d).any():
        raise ValueError("displays contain NaN")
    sign = 1.0 if orientation is Orientation.CONFORMIST else -1.0
    z = sign * beta * d
    z -= z.max()
    p = np.exp(z)
    p /= p.sum()
    return p


def draw_orientation(q: float, rng: np.random.Generator) -> Orientation:
    """Contrarian with probability q, conformist otherwise (i.i.d. per arrival)."""
    if not 0.0 <= q <= 1.0:
        raise ConfigError(f"q: {q!r} is outside [0, 1]")
    return Orientation.CONTRARIAN if rng.random() < q else Orientation.CONFORMIST


def sample_item(probs: np.ndarray, rng: np.random.Generator) -> int:
    """Draw one index from a categorical distribution by inverse CDF.

    A single uniform is consumed per call, so two distributions fed the
    same stream state map the same draw through their respective CDFs
    (the coupling that common random numbers rely on).
    """
    p = np.asarray(probs, dtype=np.float64)
    if p.size == 0:
        raise ValueError("probs must be non-empty")
    if (p < 0).any():
        raise ValueError("probs contain negative entries")
    total = p.sum()
    if not abs(total - 1.0) <= 1e-9:
        raise ValueError(f"probs sum to {total!r}, not 1")
    cdf = np.cumsum(p)
    idx = int(np.searchsorted(cdf, rng.random(), side="right"))
    return min(idx, p.size - 1)


@njit(cache=True)
def _arrival_kernel(qualities, counts, sums, sign, choice_u, noise,
                    beta, lo, hi, mid, round_ratings,
                    chosen, ratings, displays, w):
    """Sequential arrival loop over pre-drawn randomness.

    Mutates counts/sums in place and fills the caller-allocated chosen,
    ratings, displays, and w buffers (the kernel allocates nothing).
    Choice is inverse-CDF on the unnormalized softmax weights, matching
    sample_item's "smallest index with cdf > u" convention.
    """
    n_items = qualities.shape[0]
    n = choice_u.shape[0]
    for i in range(n_items):
        displays[i] = sums[i] / counts[i] if counts[i] > 0 else mid
    for t in range(n):
        s = sign[t]
        zmax = -np.inf
        for i in range(n_items):
            z = s * beta * displays[i]
            w[i] = z
            if z > zmax:
                zmax = z
        total = 0.0
        for i in range(n_items):
            w[i] = np.exp(w[i] - zmax)
            total += w[i]
        target = choice_u[t] * total
        acc = 0.0
        pick = n_items - 1
        for i in range(n_items):
            acc += w[i]
            if acc > target:
                pick = i
                break
        r = qualities[pick] + noise[t]
        if r < lo:
            r = lo
        elif r > hi:
            r = hi
        if round_ratings:
            r = np.rint(r)
        counts[pick] += 1
        sums[pick] += r
        displays[pick] = sums[pick] / counts[pick]
        chosen[t] = pick
        ratings[t] = r


def draw_arrival_arrays(
    streams: TrialStreams, config: SimConfig
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pre-draw the per-arrival randomness: orientation signs, choice uniforms, rating noise."""
    n = config.n_arrivals
    sign = np.where(streams.orientation.random(n) < config.q, -1.0, 1.0)
    choice_u = streams.choice.random(n)
    noise = streams.rating_noise.normal(0.0, config.sigma_rating, n)
    return sign, choice_u, noise


def run_arrival_arrays(
    catalog: ItemCatalog,
    ledger: RatingLedger,
    beta: float,
    sign: np.ndarray,
    choice_u: np.ndarray,
    noise: np.ndarray,
    round_ratings: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """Run the arrival loop on explicit randomness arrays, mutating the ledger."""
    if len(ledger) != len(catalog):
        raise ValueError(
            f"ledger has {len(ledger)} items but catalog has {len(catalog)}"
        )
    if sign.shape[0] > 0 and len(catalog) == 0:
        raise ValueError("cannot run arrivals over an empty catalog")
    scale = ledger.scale
    n = choice_u.shape[0]
    chosen = np.empty(n, dtype=np.int64)
    ratings = np.empty(n, dtype=np.float64)
    displays = np.empty(len(catalog), dtype=np.float64)
    weights = np.empty(len(catalog), dtype=np.float64)
    _arrival_kernel(
        catalog.qualities, ledger.counts, ledger.sums,
        np.ascontiguousarray(sign, dtype=np.float64),
        np.ascontiguousarray(choice_u, dtype=np.float64),
        np.ascontiguousarray(noise, dtype=np.float64),
        float(beta), scale.min_rating, scale.max_rating, scale.midpoint,
        bool(round_ratings),
        chosen, ratings, displays, weights,
    )
    return chosen, ratings


def run_arrivals(
    catalog: ItemCatalog,
    ledger: RatingLedger,
    config: SimConfig,
    streams: TrialStreams,
    collect_log: bool = True,
) -> tuple[RatingLedger, list[ArrivalEvent]]:
    """Run config.n_arrivals sequential users against the ledger.

    Each arrival draws an orientation, computes choice probabilities from
    the current displays, samples an item, rates it honestly, and records
    the rating. The total count grows by exactly n_arrivals. The loop is
    inherently sequential within a trial; concurrency happens across trials,
    each owning its ledger and streams.
    """
    if not 0.0 <= config.q <= 1.0:
        raise ConfigError(f"q: {config.q!r} is outside [0, 1]")
    if config.n_arrivals == 0:
        return ledger, []
    sign, choice_u, noise = draw_arrival_arrays(streams, config)
    chosen, ratings = run_arrival_arrays(
        catalog, ledger, config.beta, sign, choice_u, noise, config.round_ratings
    )
    events: list[ArrivalEvent] = []
    if collect_log:
        for s, i, r in zip(sign, chosen, ratings):
            orientation = Orientation.CONTRARIAN if s < 0 else Orientation.CONFORMIST
            events.append(ArrivalEvent(orientation, int(i), float(r)))
    return ledger, events
