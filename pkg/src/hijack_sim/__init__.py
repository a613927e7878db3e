"""Monte Carlo simulator of popularity-biased review systems under attack.

Items carry latent qualities; users arrive sequentially and pick what to
rate through a softmax over displayed averages (conformists toward
popularity, contrarians away from it). A single malicious reviewer injects
sparse or broad rating distortions, and paired seeded trials measure the
damage as the change in aggregate error plus rank shifts of the true best
and worst items.
"""

from .attacks import (
    EMPTY_PLAN,
    AttackPlan,
    apply_attack,
    build_attack_plan,
    build_broad_attack,
    build_sparse_attack,
)
from .dynamics import (
    ArrivalEvent,
    Orientation,
    choice_probabilities,
    draw_orientation,
    run_arrivals,
    sample_item,
)
from .engine import (
    ConditionSummary,
    SweepSpec,
    expand_grid,
    mean_and_se,
    run_condition,
    run_conditions,
    run_sweep,
    run_trial_pair,
)
from .errors import ConfigError
from .metrics import PairedOutcome, Ranking, final_ranking, paired_outcome, rmse
from .model import (
    AttackKind,
    ItemCatalog,
    RatingLedger,
    RatingScale,
    SimConfig,
    draw_qualities,
    honest_rating,
)
from .results import (
    ResultRow,
    emit_curves,
    format_results,
    parse_config,
    read_results,
    rows_from_summaries,
    spec_to_json,
    write_results,
)
from .rng import Stream, TrialStreams, arrival_streams, substream

__version__ = "0.1.0"

__all__ = [
    "ArrivalEvent",
    "AttackKind",
    "AttackPlan",
    "ConditionSummary",
    "ConfigError",
    "EMPTY_PLAN",
    "ItemCatalog",
    "Orientation",
    "PairedOutcome",
    "Ranking",
    "RatingLedger",
    "RatingScale",
    "ResultRow",
    "SimConfig",
    "Stream",
    "SweepSpec",
    "TrialStreams",
    "apply_attack",
    "arrival_streams",
    "build_attack_plan",
    "build_broad_attack",
    "build_sparse_attack",
    "choice_probabilities",
    "draw_orientation",
    "draw_qualities",
    "emit_curves",
    "expand_grid",
    "final_ranking",
    "format_results",
    "honest_rating",
    "mean_and_se",
    "paired_outcome",
    "parse_config",
    "read_results",
    "rmse",
    "rows_from_summaries",
    "run_arrivals",
    "run_condition",
    "run_conditions",
    "run_sweep",
    "run_trial_pair",
    "sample_item",
    "spec_to_json",
    "substream",
    "write_results",
]
