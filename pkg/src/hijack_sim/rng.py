"""Reproducible random substreams for paired, parallel-safe trials.

Every random draw in a trial comes from a generator keyed by the tuple
(master_seed, condition, stream, replicate, arm), mixed through
``numpy.random.SeedSequence``. Distinct tuples give statistically
independent streams; identical tuples give identical sequences, which is
what makes replicates order-independent, sweeps parallelizable, and the
two arms of a trial pair couplable through common random numbers (both
arms read the same arm-0 streams).

Bit-level reproducibility is promised within this implementation only.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .errors import ConfigError

MAX_SEED = 2**64 - 1


class Stream(IntEnum):
    """The five independent randomness sources of one trial."""

    QUALITY = 0
    SEED_REVIEWS = 1
    ORIENTATION = 2
    CHOICE = 3
    RATING_NOISE = 4


def check_master_seed(master_seed: int) -> int:
    if not isinstance(master_seed, int) or isinstance(master_seed, bool):
        raise ConfigError(f"master_seed: must be an integer, got {master_seed!r}")
    if not 0 <= master_seed <= MAX_SEED:
        raise ConfigError(f"master_seed: {master_seed} is outside [0, 2^64)")
    return master_seed


def substream(
    master_seed: int,
    stream: Stream,
    replicate: int,
    condition: int = 0,
    arm: int = 0,
) -> np.random.Generator:
    """Generator for one (seed, condition, stream, replicate, arm) tuple."""
    check_master_seed(master_seed)
    seq = np.random.SeedSequence(
        master_seed, spawn_key=(condition, int(stream), replicate, arm)
    )
    return np.random.default_rng(seq)


@dataclass(frozen=True)
class TrialStreams:
    """The three streams consumed by the sequential arrival stage."""

    orientation: np.random.Generator
    choice: np.random.Generator
    rating_noise: np.random.Generator


def arrival_streams(
    master_seed: int,
    replicate: int,
    condition: int = 0,
    arm: int = 0,
) -> TrialStreams:
    return TrialStreams(
        orientation=substream(master_seed, Stream.ORIENTATION, replicate, condition, arm),
        choice=substream(master_seed, Stream.CHOICE, replicate, condition, arm),
        rating_noise=substream(master_seed, Stream.RATING_NOISE, replicate, condition, arm),
    )
