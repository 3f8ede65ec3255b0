"""Analytic conversion between margins of error and privacy-loss budgets.

The computational backend of the interactive tuning workflow: per-level
budget tables, totals under both neighbor models, and what-if evaluation.
Pure computation over request values; no microdata is ever involved.
"""

import math
from dataclasses import dataclass, field
from statistics import NormalDist
from typing import List, Optional, Tuple

from dptab.domain import GeoLevel, IterationLevel
from dptab.itermap import stability as _stability_formula

Z_95 = NormalDist().inv_cdf(0.975)
"""Standard normal critical value at 95% confidence (1.959964...)."""

DEFAULT_CONFIDENCE = 0.95

# Relative guard applied before flooring: the conversion chain carries a few
# ulps of float error, which must not flip an exact-integer boundary (e.g. a
# round trip whose real value is exactly the input margin).
_FLOOR_GUARD = 1e-12


class PlanError(ValueError):
    """Invalid plan request, with field-level messages."""

    def __init__(self, errors: List[dict]):
        self.errors = errors
        super().__init__("; ".join(f"{e['field']}: {e['message']}" for e in errors))


def z_for_confidence(confidence: float) -> float:
    """Two-sided standard normal critical value for a confidence level."""
    if not 0 < confidence < 1:
        raise ValueError("confidence must be in (0, 1)")
    return NormalDist().inv_cdf((1 + confidence) / 2)


def _guarded_floor(x: float) -> int:
    return math.floor(x * (1 + _FLOOR_GUARD))


def moe_from_rho(rho: float, s: int, z: float = Z_95) -> int:
    """Margin of error of a single count released at level budget `rho`.

    floor(z * sqrt(s / (2*rho))): the per-component noise scale is
    sigma_sq = s/(2*rho) because the level budget is split across a
    stability of s.
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    if s < 1:
        raise ValueError("stability must be at least 1")
    return _guarded_floor(z * math.sqrt(s / (2.0 * rho)))


def rho_from_moe(moe: int, s: int, z: float = Z_95) -> float:
    """Level budget achieving a 95% margin of error of at most `moe`.

    s * z^2 / (2 * floor(moe)^2); applying `moe_from_rho` to the result
    never exceeds the input margin.
    """
    if moe < 1:
        raise ValueError("margin of error must be at least 1")
    if s < 1:
        raise ValueError("stability must be at least 1")
    m = math.floor(moe)
    return s * z * z / (2.0 * m * m)


@dataclass(frozen=True)
class CellTarget:
    """Exactly one of a margin-of-error target or a direct budget."""

    moe: Optional[int] = None
    rho: Optional[float] = None

    def __post_init__(self):
        if (self.moe is None) == (self.rho is None):
            raise ValueError("specify exactly one of moe or rho")


@dataclass(frozen=True)
class PlanLevel:
    """One requested population group level with per-table-class targets."""

    geo_level: GeoLevel
    iter_level: IterationLevel
    household_type: CellTarget
    tenure: CellTarget


@dataclass(frozen=True)
class PlanRequest:
    """A what-if request: levels, race multiplicity, and confidence."""

    levels: Tuple[PlanLevel, ...]
    race_multiplicity: int = 8
    confidence: float = DEFAULT_CONFIDENCE


@dataclass(frozen=True)
class PlanCell:
    """One (level, table class) result with provenance of each number."""

    rho_unbounded: float
    rho_bounded: float
    moe: int
    provenance: dict


@dataclass(frozen=True)
class PlanLevelResult:
    geo_level: GeoLevel
    iter_level: IterationLevel
    household_type: PlanCell
    tenure: PlanCell


@dataclass(frozen=True)
class PlanResult:
    """Filled budget table plus totals under both neighbor models."""

    levels: Tuple[PlanLevelResult, ...]
    stability: int
    z: float
    total_unbounded: float = field(default=0.0)
    total_bounded: float = field(default=0.0)


def _evaluate_cell(target: CellTarget, s: int, z: float) -> PlanCell:
    if target.moe is not None:
        rho = rho_from_moe(target.moe, s, z)
        return PlanCell(
            rho_unbounded=rho,
            rho_bounded=2.0 * rho,
            moe=int(target.moe),
            provenance={
                "formula": "rho = s*z^2 / (2*floor(moe)^2)",
                "inputs": {"moe": int(target.moe), "s": s, "z": z},
            },
        )
    rho = float(target.rho)
    return PlanCell(
        rho_unbounded=rho,
        rho_bounded=2.0 * rho,
        moe=moe_from_rho(rho, s, z),
        provenance={
            "formula": "moe = floor(z*sqrt(s/(2*rho)))",
            "inputs": {"rho": rho, "s": s, "z": z},
        },
    )


def _validate_request(request: PlanRequest) -> List[dict]:
    errors = []
    if not 1 <= request.race_multiplicity <= 8:
        errors.append(
            {
                "field": "race_multiplicity",
                "message": "race multiplicity must be between 1 and 8",
            }
        )
    if not 0 < request.confidence < 1:
        errors.append(
            {"field": "confidence", "message": "confidence must be in (0, 1)"}
        )
    for i, level in enumerate(request.levels):
        if (
            level.geo_level is GeoLevel.AIANNH
            and level.iter_level is IterationLevel.REGIONAL
        ):
            errors.append(
                {
                    "field": f"levels[{i}]",
                    "message": "the (AIANNH, Regional) level is never tabulated",
                }
            )
        for name, target in (
            ("household_type", level.household_type),
            ("tenure", level.tenure),
        ):
            if target.moe is not None and target.moe < 1:
                errors.append(
                    {
                        "field": f"levels[{i}].{name}.moe",
                        "message": "margin of error must be at least 1",
                    }
                )
            if target.rho is not None and target.rho <= 0:
                errors.append(
                    {
                        "field": f"levels[{i}].{name}.rho",
                        "message": "rho must be positive",
                    }
                )
    return errors


def plan_request_from_dict(raw: dict) -> PlanRequest:
    """Builds a request from its JSON form, with field-level errors."""
    errors: List[dict] = []
    levels = []
    raw_levels = raw.get("levels", [])
    if not isinstance(raw_levels, list):
        raise PlanError([{"field": "levels", "message": "levels must be a list"}])

    def _target(entry: dict, where: str) -> CellTarget:
        moe = entry.get("moe")
        rho = entry.get("rho")
        if (moe is None) == (rho is None):
            errors.append(
                {"field": where, "message": "specify exactly one of moe or rho"}
            )
            return CellTarget(moe=1)
        if moe is not None:
            return CellTarget(moe=int(moe))
        return CellTarget(rho=float(rho))

    for i, entry in enumerate(raw_levels):
        try:
            geo_level = GeoLevel(entry.get("geo_level"))
        except ValueError:
            errors.append(
                {
                    "field": f"levels[{i}].geo_level",
                    "message": f"unknown geo_level {entry.get('geo_level')!r}",
                }
            )
            continue
        try:
            iter_level = IterationLevel(entry.get("iter_level"))
        except ValueError:
            errors.append(
                {
                    "field": f"levels[{i}].iter_level",
                    "message": f"unknown iter_level {entry.get('iter_level')!r}",
                }
            )
            continue
        levels.append(
            PlanLevel(
                geo_level=geo_level,
                iter_level=iter_level,
                household_type=_target(
                    entry.get("household_type", {}), f"levels[{i}].household_type"
                ),
                tenure=_target(entry.get("tenure", {}), f"levels[{i}].tenure"),
            )
        )
    if errors:
        raise PlanError(errors)
    return PlanRequest(
        levels=tuple(levels),
        race_multiplicity=int(raw.get("race_multiplicity", 8)),
        confidence=float(raw.get("confidence", DEFAULT_CONFIDENCE)),
    )


def plan_result_to_dict(result: PlanResult) -> dict:
    """JSON form of a result; every displayed number traces to a field here."""
    return {
        "stability": result.stability,
        "z": result.z,
        "levels": [
            {
                "geo_level": level.geo_level.value,
                "iter_level": level.iter_level.value,
                "household_type": {
                    "rho_unbounded": level.household_type.rho_unbounded,
                    "rho_bounded": level.household_type.rho_bounded,
                    "moe": level.household_type.moe,
                    "provenance": level.household_type.provenance,
                },
                "tenure": {
                    "rho_unbounded": level.tenure.rho_unbounded,
                    "rho_bounded": level.tenure.rho_bounded,
                    "moe": level.tenure.moe,
                    "provenance": level.tenure.provenance,
                },
            }
            for level in result.levels
        ],
        "total_unbounded": result.total_unbounded,
        "total_bounded": result.total_bounded,
    }


def evaluate_plan(request: PlanRequest) -> PlanResult:
    """Fills every (level, table class) cell and composes the totals.

    Raises:
        PlanError: With one entry per offending field when the request is
            invalid.
    """
    errors = _validate_request(request)
    if errors:
        raise PlanError(errors)
    s = _stability_formula(None, request.race_multiplicity)
    z = z_for_confidence(request.confidence)
    level_results = []
    total = 0.0
    for level in request.levels:
        ht = _evaluate_cell(level.household_type, s, z)
        t = _evaluate_cell(level.tenure, s, z)
        total += ht.rho_unbounded + t.rho_unbounded
        level_results.append(
            PlanLevelResult(
                geo_level=level.geo_level,
                iter_level=level.iter_level,
                household_type=ht,
                tenure=t,
            )
        )
    return PlanResult(
        levels=tuple(level_results),
        stability=s,
        z=z,
        total_unbounded=total,
        total_bounded=2.0 * total,
    )
