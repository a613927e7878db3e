"""Config parsing, results serialization, and figure-data emission.

Results land in a single CSV, one row per grid point. Curve files reshape
that table for plotting: one file per m_seed panel, q down the rows, one
mean/SE column pair per beta. Numbers are serialized at 6 significant
digits everywhere, so identical runs produce byte-identical files.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, fields
from pathlib import Path

from .engine import ConditionSummary, SweepSpec
from .errors import ConfigError
from .model import AttackKind

RESULTS_COLUMNS = (
    "m_seed", "beta", "q", "attack", "replicates",
    "mean_delta_rmse", "se_delta_rmse",
    "mean_best_demotion", "se_best_demotion",
    "mean_worst_promotion", "se_worst_promotion",
)

OUTCOME_FIELDS = {
    "delta_rmse": ("mean_delta_rmse", "se_delta_rmse"),
    "best_demotion": ("mean_best_demotion", "se_best_demotion"),
    "worst_promotion": ("mean_worst_promotion", "se_worst_promotion"),
}

CONFIG_KEYS = (
    "K", "m_seed", "beta", "q", "attack", "n_arrivals",
    "sigma_rating", "sigma_quality", "replicates", "master_seed",
    "crn", "round_ratings", "exclude_unrated_from_rmse",
)


@dataclass(frozen=True)
class ResultRow:
    m_seed: int
    beta: float
    q: float
    attack: str
    replicates: int
    mean_delta_rmse: float
    se_delta_rmse: float
    mean_best_demotion: float
    se_best_demotion: float
    mean_worst_promotion: float
    se_worst_promotion: float


def _fmt(value: float) -> str:
    return f"{value:.6g}"


def rows_from_summaries(summaries: list[ConditionSummary]) -> list[ResultRow]:
    return [
        ResultRow(
            m_seed=s.config.m_seed,
            beta=s.config.beta,
            q=s.config.q,
            attack=s.config.attack.value,
            replicates=s.replicates,
            mean_delta_rmse=s.mean_delta_rmse,
            se_delta_rmse=s.se_delta_rmse,
            mean_best_demotion=s.mean_best_demotion,
            se_best_demotion=s.se_best_demotion,
            mean_worst_promotion=s.mean_worst_promotion,
            se_worst_promotion=s.se_worst_promotion,
        )
        for s in summaries
    ]


def format_results(rows: list[ResultRow]) -> str:
    lines = [",".join(RESULTS_COLUMNS)]
    for r in rows:
        lines.append(",".join((
            str(r.m_seed), _fmt(r.beta), _fmt(r.q), r.attack, str(r.replicates),
            _fmt(r.mean_delta_rmse), _fmt(r.se_delta_rmse),
            _fmt(r.mean_best_demotion), _fmt(r.se_best_demotion),
            _fmt(r.mean_worst_promotion), _fmt(r.se_worst_promotion),
        )))
    return "\n".join(lines) + "\n"


def _check_finite(rows: list[ResultRow]) -> None:
    for index, row in enumerate(rows):
        for field in fields(ResultRow):
            value = getattr(row, field.name)
            if isinstance(value, float) and not math.isfinite(value):
                raise ConfigError(
                    f"row {index}: {field.name} is {value!r}, not finite"
                )


def write_results(rows: list[ResultRow], path: Path | str) -> Path:
    if not rows:
        raise ConfigError("no result rows to write")
    _check_finite(rows)
    path = Path(path)
    try:
        path.write_text(format_results(rows), encoding="utf-8")
    except OSError as err:
        raise OSError(f"cannot write results to {path}: {err}") from err
    return path


def read_results(path: Path | str) -> list[ResultRow]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise ConfigError(f"cannot read results file {path}: {err}") from err
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines or tuple(lines[0].split(",")) != RESULTS_COLUMNS:
        raise ConfigError(f"{path}: missing or malformed results header")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != len(RESULTS_COLUMNS):
            raise ConfigError(f"{path}:{lineno}: expected {len(RESULTS_COLUMNS)} fields")
        try:
            rows.append(ResultRow(
                m_seed=int(parts[0]), beta=float(parts[1]), q=float(parts[2]),
                attack=parts[3], replicates=int(parts[4]),
                mean_delta_rmse=float(parts[5]), se_delta_rmse=float(parts[6]),
                mean_best_demotion=float(parts[7]), se_best_demotion=float(parts[8]),
                mean_worst_promotion=float(parts[9]), se_worst_promotion=float(parts[10]),
            ))
        except ValueError as err:
            raise ConfigError(f"{path}:{lineno}: {err}") from err
    return rows


def emit_curves(rows: list[ResultRow], outcome: str, out_dir: Path | str) -> list[Path]:
    """Write one curve file per m_seed panel for the requested outcome.

    Requires a complete (m_seed x beta x q) grid for a single attack kind;
    a missing cell is reported by name.
    """
    if outcome not in OUTCOME_FIELDS:
        raise ConfigError(
            f"outcome: {outcome!r} is not one of {sorted(OUTCOME_FIELDS)}"
        )
    if not rows:
        raise ConfigError("no result rows to reshape")
    kinds = sorted({r.attack for r in rows})
    if len(kinds) > 1:
        raise ConfigError(
            f"results mix attack kinds {kinds}; emit curves from a single-kind run"
        )
    mean_field, se_field = OUTCOME_FIELDS[outcome]
    cells: dict[tuple[int, float, float], ResultRow] = {}
    for r in rows:
        key = (r.m_seed, r.beta, r.q)
        if key in cells:
            raise ConfigError(
                f"duplicate result for m_seed={key[0]}, beta={key[1]:g}, q={key[2]:g}"
            )
        cells[key] = r
    m_values = sorted({r.m_seed for r in rows})
    beta_values = sorted({r.beta for r in rows})
    q_values = sorted({r.q for r in rows})
    for m, b, qv in itertools.product(m_values, beta_values, q_values):
        if (m, b, qv) not in cells:
            raise ConfigError(f"missing result for m_seed={m}, beta={b:g}, q={qv:g}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    header = "q," + ",".join(
        f"mean_beta{b:g},se_beta{b:g}" for b in beta_values
    )
    paths = []
    for m in m_values:
        lines = [header]
        for qv in q_values:
            fields = [_fmt(qv)]
            for b in beta_values:
                row = cells[(m, b, qv)]
                fields.append(_fmt(getattr(row, mean_field)))
                fields.append(_fmt(getattr(row, se_field)))
            lines.append(",".join(fields))
        path = out_dir / f"{outcome}_mseed{m}.csv"
        try:
            path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        except OSError as err:
            raise OSError(f"cannot write curve file {path}: {err}") from err
        paths.append(path)
    return paths


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigError(message)


def _as_list(value) -> list:
    return value if isinstance(value, list) else [value]


def _check_int(value, path: str, minimum: int = 0) -> int:
    _require(
        isinstance(value, int) and not isinstance(value, bool) and value >= minimum,
        f"{path}: must be an integer >= {minimum}, got {value!r}",
    )
    return value


def _check_real(value, path: str, minimum: float | None = None,
                maximum: float | None = None) -> float:
    _require(
        isinstance(value, (int, float)) and not isinstance(value, bool),
        f"{path}: must be a number, got {value!r}",
    )
    value = float(value)
    if minimum is not None and maximum is not None:
        _require(
            minimum <= value <= maximum,
            f"{path}: {value:g} is outside [{minimum:g}, {maximum:g}]",
        )
    elif minimum is not None:
        _require(value >= minimum, f"{path}: must be >= {minimum:g}, got {value:g}")
    return value


def _check_bool(value, path: str) -> bool:
    _require(isinstance(value, bool), f"{path}: must be true or false, got {value!r}")
    return value


def parse_config(text: str) -> SweepSpec:
    """Parse and validate the JSON config schema into a SweepSpec.

    Unknown keys are rejected by name; every reported violation carries its
    field path. An empty object yields the default grid.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(f"config is not valid JSON: {err}") from err
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(data) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")

    defaults = SweepSpec()
    m_seed = tuple(
        _check_int(v, f"m_seed[{i}]")
        for i, v in enumerate(_as_list(data.get("m_seed", list(defaults.m_seed_values))))
    )
    beta = tuple(
        _check_real(v, f"beta[{i}]", minimum=0.0)
        for i, v in enumerate(_as_list(data.get("beta", list(defaults.beta_values))))
    )
    q = tuple(
        _check_real(v, f"q[{i}]", minimum=0.0, maximum=1.0)
        for i, v in enumerate(_as_list(data.get("q", list(defaults.q_values))))
    )
    attack_names = _as_list(data.get("attack", [k.value for k in defaults.attacks]))
    attacks = []
    for i, name in enumerate(attack_names):
        _require(
            isinstance(name, str) and name in {k.value for k in AttackKind},
            f"attack[{i}]: {name!r} is not one of 'none', 'sparse', 'broad'",
        )
        attacks.append(AttackKind(name))

    spec = SweepSpec(
        m_seed_values=m_seed,
        beta_values=beta,
        q_values=q,
        attacks=tuple(attacks),
        K=_check_int(data.get("K", defaults.K), "K"),
        n_arrivals=_check_int(data.get("n_arrivals", defaults.n_arrivals), "n_arrivals"),
        sigma_rating=_check_real(
            data.get("sigma_rating", defaults.sigma_rating), "sigma_rating", minimum=0.0
        ),
        sigma_quality=_check_real(
            data.get("sigma_quality", defaults.sigma_quality), "sigma_quality", minimum=0.0
        ),
        replicates=_check_int(data.get("replicates", defaults.replicates), "replicates", minimum=1),
        master_seed=_check_int(data.get("master_seed", defaults.master_seed), "master_seed"),
        crn=_check_bool(data.get("crn", defaults.crn), "crn"),
        round_ratings=_check_bool(data.get("round_ratings", defaults.round_ratings), "round_ratings"),
        exclude_unrated_from_rmse=_check_bool(
            data.get("exclude_unrated_from_rmse", defaults.exclude_unrated_from_rmse),
            "exclude_unrated_from_rmse",
        ),
    )
    if AttackKind.SPARSE in spec.attacks and spec.K < 2:
        raise ConfigError(f"K: must be at least 2 for a sparse attack, got {spec.K}")
    spec.validate()
    return spec


def spec_to_json(spec: SweepSpec) -> str:
    """Serialize the file-schema view of a spec; parse(spec_to_json(s)) == s."""
    return json.dumps(
        {
            "K": spec.K,
            "m_seed": list(spec.m_seed_values),
            "beta": list(spec.beta_values),
            "q": list(spec.q_values),
            "attack": [k.value for k in spec.attacks],
            "n_arrivals": spec.n_arrivals,
            "sigma_rating": spec.sigma_rating,
            "sigma_quality": spec.sigma_quality,
            "replicates": spec.replicates,
            "master_seed": spec.master_seed,
            "crn": spec.crn,
            "round_ratings": spec.round_ratings,
            "exclude_unrated_from_rmse": spec.exclude_unrated_from_rmse,
        },
        indent=2,
    )
