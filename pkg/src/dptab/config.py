"""Run configuration: a single reviewable JSON file.

Privacy parameters are never read from environment variables; budgets carry
decimal literals and are parsed exactly (0.0069 stays 69/10000). Relative
input paths resolve against the config file's directory.
"""

import json
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from pathlib import Path
from typing import Optional, Tuple

from dptab.domain import GeoLevel, IterationLevel, PopulationGroupLevel, Thresholds
from dptab.errors import ConfigError

REGIONS = ("US", "PR")

DEFAULT_THRESHOLDS = Thresholds(theta1=50, theta2=200, theta3=500, psi1=50)
"""Placeholder thresholds. Non-normative: production values are not public."""

_BUDGET_SLACK = Decimal("1e-12")


@dataclass(frozen=True)
class InputPaths:
    households: Path
    t01001: Path
    geo_spec: Path
    iteration_spec: Path
    inclusion: Optional[Path] = None


@dataclass(frozen=True)
class RunConfig:
    """Everything one tabulation pass needs. US and PR run separately."""

    region: str
    master_seed: int
    race_multiplicity: int
    total_budget: Decimal
    levels: Tuple[PopulationGroupLevel, ...]
    inputs: InputPaths
    race_code_universe: Optional[Tuple[Tuple[int, int], ...]] = None
    ethnicity_code_universe: Optional[Tuple[Tuple[int, int], ...]] = None


def parse_code_ranges(text: str, context: str = "") -> Tuple[Tuple[int, int], ...]:
    """Parses "1000-1009|1170|2000-2099" into inclusive (lo, hi) pairs."""
    ranges = []
    for part in str(text).split("|"):
        part = part.strip()
        if not part:
            continue
        lo, sep, hi = part.partition("-")
        try:
            low = int(lo)
            high = int(hi) if sep else low
        except ValueError as exc:
            raise ConfigError(
                f"bad code range {part!r}", field=context
            ) from exc
        if low > high:
            raise ConfigError(f"bad code range {part!r}", field=context)
        ranges.append((low, high))
    if not ranges:
        raise ConfigError("empty code range list", field=context)
    return tuple(ranges)


def _require(mapping: dict, key: str, path: str):
    if key not in mapping:
        raise ConfigError(f"missing required key {key!r}", file=path)
    return mapping[key]


def _parse_level(raw: dict, index: int, path: str) -> PopulationGroupLevel:
    where = f"levels[{index - 1}]"
    try:
        geo_level = GeoLevel(_require(raw, "geo_level", path))
    except ValueError:
        raise ConfigError(
            f"unknown geo_level {raw.get('geo_level')!r}", file=path, field=where
        ) from None
    try:
        iter_level = IterationLevel(_require(raw, "iter_level", path))
    except ValueError:
        raise ConfigError(
            f"unknown iter_level {raw.get('iter_level')!r}", file=path, field=where
        ) from None
    try:
        rho_ht = Fraction(Decimal(str(_require(raw, "rho_ht", path))))
        rho_t = Fraction(Decimal(str(_require(raw, "rho_t", path))))
    except (InvalidOperation, ValueError) as exc:
        raise ConfigError(f"bad budget value: {exc}", file=path, field=where) from None
    try:
        thresholds = Thresholds(
            theta1=int(raw.get("theta1", DEFAULT_THRESHOLDS.theta1)),
            theta2=int(raw.get("theta2", DEFAULT_THRESHOLDS.theta2)),
            theta3=int(raw.get("theta3", DEFAULT_THRESHOLDS.theta3)),
            psi1=int(raw.get("psi1", DEFAULT_THRESHOLDS.psi1)),
        )
        return PopulationGroupLevel(
            index=index,
            geo_level=geo_level,
            iter_level=iter_level,
            rho_ht=rho_ht,
            rho_t=rho_t,
            thresholds=thresholds,
        )
    except ValueError as exc:
        raise ConfigError(str(exc), file=path, field=where) from None


def load_run_config(path) -> RunConfig:
    """Loads and structurally validates a run configuration.

    Raises:
        ConfigError: On malformed JSON, unknown enum values, unordered
            thresholds, a forbidden level, nonpositive budgets, or per-level
            budgets that do not sum to the declared total (within an
            absolute slack of 1e-12).
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(), parse_float=Decimal)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot parse config: {exc}", file=str(path)) from None

    region = _require(raw, "region", str(path))
    if region not in REGIONS:
        raise ConfigError(
            f"region must be one of {REGIONS}, got {region!r}",
            file=str(path),
            field="region",
        )
    seed = _require(raw, "master_seed", str(path))
    if not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ConfigError(
            "master_seed must be an unsigned 64-bit integer",
            file=str(path),
            field="master_seed",
        )
    multiplicity = _require(raw, "race_multiplicity", str(path))
    if not isinstance(multiplicity, int) or not 1 <= multiplicity <= 8:
        raise ConfigError(
            "race_multiplicity must be an integer between 1 and 8",
            file=str(path),
            field="race_multiplicity",
        )
    try:
        total_budget = Decimal(str(_require(raw, "total_budget", str(path))))
    except InvalidOperation:
        raise ConfigError(
            "total_budget must be a number", file=str(path), field="total_budget"
        ) from None
    if total_budget <= 0:
        raise ConfigError(
            "total_budget must be positive", file=str(path), field="total_budget"
        )

    raw_levels = _require(raw, "levels", str(path))
    if not isinstance(raw_levels, list) or not raw_levels:
        raise ConfigError(
            "levels must be a non-empty list", file=str(path), field="levels"
        )
    levels = tuple(
        _parse_level(entry, i + 1, str(path)) for i, entry in enumerate(raw_levels)
    )
    seen = set()
    for level in levels:
        key = (level.geo_level, level.iter_level)
        if key in seen:
            raise ConfigError(
                f"duplicate level ({level.geo_level.value}, {level.iter_level.value})",
                file=str(path),
                field="levels",
            )
        seen.add(key)

    level_sum = sum(
        Fraction(level.rho_ht) + Fraction(level.rho_t) for level in levels
    )
    if abs(level_sum - Fraction(total_budget)) > Fraction(_BUDGET_SLACK):
        raise ConfigError(
            f"per-level budgets sum to {float(level_sum):.6g}, declared total "
            f"is {float(total_budget):.6g}",
            file=str(path),
            field="total_budget",
        )

    raw_inputs = _require(raw, "inputs", str(path))
    base = path.parent

    def _input_path(key: str, required: bool = True) -> Optional[Path]:
        value = raw_inputs.get(key)
        if value is None:
            if required:
                raise ConfigError(
                    f"missing input path {key!r}", file=str(path), field="inputs"
                )
            return None
        return base / value

    race_universe = raw.get("race_code_universe")
    ethnicity_universe = raw.get("ethnicity_code_universe")
    return RunConfig(
        region=region,
        master_seed=seed,
        race_multiplicity=multiplicity,
        total_budget=total_budget,
        levels=levels,
        inputs=InputPaths(
            households=_input_path("households"),
            t01001=_input_path("t01001"),
            geo_spec=_input_path("geo_spec"),
            iteration_spec=_input_path("iteration_spec"),
            inclusion=_input_path("inclusion", required=False),
        ),
        race_code_universe=(
            parse_code_ranges(race_universe, "race_code_universe")
            if race_universe
            else None
        ),
        ethnicity_code_universe=(
            parse_code_ranges(ethnicity_universe, "ethnicity_code_universe")
            if ethnicity_universe
            else None
        ),
    )
