"""Cross-file input validation and assembly of the validated bundle.

Fails fast with a typed error naming file, line, and field. Validation
failures involving private data are surfaced only to the operator (stderr
and exit code); the pipeline never starts and nothing is released.
"""

from dataclasses import dataclass
from typing import Dict, FrozenSet, Tuple

from dptab import io
from dptab.config import RunConfig
from dptab.domain import (
    GeoLevel,
    HouseholdRecord,
    PopulationGroup,
    PopulationGroupLevel,
    RaceEth,
    T01001Counts,
)
from dptab.errors import ReferentialError, UniverseError
from dptab.itermap import IterationSpec

PR_STATE_CODE = "72"


@dataclass(frozen=True)
class ValidatedInputs:
    """Everything the engine consumes, schema-checked and cross-validated.

    `geo_entities` already excludes geographic areas with zero housing
    units; that removal happens before the pipeline begins.
    """

    records: Tuple[HouseholdRecord, ...]
    t01001: T01001Counts
    geo_entities: Dict[GeoLevel, FrozenSet[str]]
    iteration_spec: IterationSpec
    levels: Tuple[PopulationGroupLevel, ...]


def _in_ranges(code: int, ranges) -> bool:
    return any(lo <= code <= hi for lo, hi in ranges)


def _check_region(geo: io.GeoSpecData, region: str, path: str) -> None:
    for block_id, geocode in geo.blocks.items():
        is_pr = geocode.state == PR_STATE_CODE
        if region == "PR" and not is_pr:
            raise ReferentialError(
                f"block {block_id!r} has state {geocode.state!r}; a PR pass "
                f"accepts only state {PR_STATE_CODE!r}",
                file=path,
                field="state",
            )
        if region == "US" and is_pr:
            raise ReferentialError(
                f"block {block_id!r} belongs to Puerto Rico; tabulate it in a "
                "separate PR pass",
                file=path,
                field="state",
            )


def validate_inputs(config: RunConfig) -> ValidatedInputs:
    """Reads, validates, and joins all inputs declared by `config`.

    Checks schema conformance, code-universe membership (race code count
    and code ranges), threshold and budget consistency (already enforced at
    config load), and referential integrity between the households,
    total-population, geography, and iteration files.

    Raises:
        SchemaError, UniverseError, ReferentialError, ConfigError.
    """
    geo = io.read_geo_spec(config.inputs.geo_spec)
    _check_region(geo, config.region, str(config.inputs.geo_spec))
    iteration_spec = io.read_iteration_spec(
        config.inputs.iteration_spec, config.inputs.inclusion
    )

    race_universe = config.race_code_universe
    if race_universe is None:
        # Default: the union of configured race group code ranges.
        race_universe = tuple(
            r
            for it in iteration_spec.iterations
            if it.kind.value.startswith("race")
            for r in it.member_codes
        )
    ethnicity_universe = config.ethnicity_code_universe

    nation_id = config.region
    entities_declared = geo.entity_sets(nation_id, require_housing=False)
    entities_with_housing = geo.entity_sets(nation_id, require_housing=True)

    households_path = str(config.inputs.households)
    records = []
    for row in io.read_households(config.inputs.households):
        geocode = geo.blocks.get(row.block_id)
        if geocode is None:
            raise ReferentialError(
                f"unknown block {row.block_id!r}",
                file=households_path,
                line=row.line,
                field="block_id",
            )
        if geo.housing_units.get(row.block_id, 1) <= 0:
            raise ReferentialError(
                f"block {row.block_id!r} is declared to have no housing units",
                file=households_path,
                line=row.line,
                field="block_id",
            )
        if len(row.race_codes) > config.race_multiplicity:
            raise UniverseError(
                f"{len(row.race_codes)} race codes exceed the race "
                f"multiplicity of {config.race_multiplicity}",
                file=households_path,
                line=row.line,
                field="race_codes",
            )
        for code in sorted(row.race_codes):
            if not _in_ranges(code, race_universe):
                raise UniverseError(
                    f"race code {code} is outside the declared universe",
                    file=households_path,
                    line=row.line,
                    field="race_codes",
                )
        if ethnicity_universe is not None and not _in_ranges(
            row.ethnicity_code, ethnicity_universe
        ):
            raise UniverseError(
                f"ethnicity code {row.ethnicity_code} is outside the declared "
                "universe",
                file=households_path,
                line=row.line,
                field="ethnicity_code",
            )
        records.append(
            HouseholdRecord(
                geo=geocode,
                race_eth=RaceEth(
                    race_codes=row.race_codes, ethnicity_code=row.ethnicity_code
                ),
                household_type=row.household_type,
                tenure=row.tenure,
            )
        )

    t01001_path = str(config.inputs.t01001)
    counts = {}
    known_iterations = {it.code: it for it in iteration_spec.iterations}
    for row in io.read_t01001(config.inputs.t01001):
        if row.geo_id not in entities_declared.get(row.geo_level, frozenset()):
            raise ReferentialError(
                f"{row.geo_level.value} entity {row.geo_id!r} does not exist "
                "in the geography spec",
                file=t01001_path,
                line=row.line,
                field="geo_id",
            )
        if row.iteration_code not in known_iterations:
            raise ReferentialError(
                f"unknown iteration {row.iteration_code!r}",
                file=t01001_path,
                line=row.line,
                field="iteration_code",
            )
        group = PopulationGroup(row.geo_level, row.geo_id, row.iteration_code)
        if group in counts:
            raise ReferentialError(
                f"duplicate total-population row for {row.geo_id!r}/"
                f"{row.iteration_code!r}",
                file=t01001_path,
                line=row.line,
            )
        counts[group] = row.count

    return ValidatedInputs(
        records=tuple(records),
        t01001=T01001Counts(counts),
        geo_entities=entities_with_housing,
        iteration_spec=iteration_spec,
        levels=config.levels,
    )
