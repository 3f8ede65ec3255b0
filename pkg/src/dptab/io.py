"""Delimited-text input readers and output writers.

Input files are comma-separated with declared headers; multi-valued race
codes are pipe-separated within their field. Readers raise SchemaError with
file/line/field context; cross-file consistency lives in
`dptab.validation`.
"""

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, FrozenSet, List, Optional, Tuple

from dptab.config import parse_code_ranges
from dptab.domain import (
    CharacteristicIteration,
    GeoCode,
    GeoLevel,
    HouseholdType,
    IterationKind,
    IterationLevel,
    Tenure,
)
from dptab.errors import ConfigError, SchemaError, UniverseError
from dptab.itermap import IterationSpec

HOUSEHOLD_COLUMNS = ("block_id", "race_codes", "ethnicity_code", "household_type", "tenure")
T01001_COLUMNS = ("geo_level", "geo_id", "iteration_code", "count")
GEO_COLUMNS = ("block_id", "state", "county", "tract", "place", "aiannh")
ITERATION_COLUMNS = ("iteration_code", "level", "kind", "code_ranges")
INCLUSION_COLUMNS = ("geo_level", "iteration_code")
OUTPUT_COLUMNS = ("region", "level", "geo_id", "iteration_code", "table_variant", "cell_label", "value")

NOISELESS_WATERMARK = "# UNSAFE NOISELESS OUTPUT: counts are exact and carry no privacy protection"

_HOUSEHOLD_TYPES = {
    "married_couple": HouseholdType.MARRIED_COUPLE,
    "other_family_male": HouseholdType.OTHER_FAMILY_MALE,
    "other_family_female": HouseholdType.OTHER_FAMILY_FEMALE,
    "nonfamily_alone": HouseholdType.NONFAMILY_ALONE,
    "nonfamily_not_alone": HouseholdType.NONFAMILY_NOT_ALONE,
}

_TENURES = {
    "owned_mortgage": Tenure.OWNED_MORTGAGE,
    "owned_free": Tenure.OWNED_FREE,
    "renter": Tenure.RENTER,
}

_KINDS = {
    "race_alone": IterationKind.RACE_ALONE,
    "race_aoic": IterationKind.RACE_AOIC,
    "ethnicity": IterationKind.ETHNICITY,
}


@dataclass(frozen=True)
class HouseholdRow:
    """One parsed microdata row, before geographic resolution."""

    line: int
    block_id: str
    race_codes: FrozenSet[int]
    ethnicity_code: int
    household_type: HouseholdType
    tenure: Tenure


@dataclass(frozen=True)
class T01001Row:
    line: int
    geo_level: GeoLevel
    geo_id: str
    iteration_code: str
    count: int


@dataclass(frozen=True)
class GeoSpecData:
    """Public geography: block identifiers and their housing-unit counts."""

    blocks: Dict[str, GeoCode]
    housing_units: Dict[str, int]

    def entity_sets(
        self, nation_id: str, require_housing: bool = True
    ) -> Dict[GeoLevel, FrozenSet[str]]:
        """Entity universe per level, optionally dropping zero-housing blocks."""
        sets: Dict[GeoLevel, set] = {level: set() for level in GeoLevel}
        any_block = False
        for block_id, geo in self.blocks.items():
            if require_housing and self.housing_units.get(block_id, 1) <= 0:
                continue
            any_block = True
            sets[GeoLevel.STATE].add(geo.state)
            sets[GeoLevel.COUNTY].add(geo.county)
            sets[GeoLevel.TRACT].add(geo.tract)
            if geo.place is not None:
                sets[GeoLevel.PLACE].add(geo.place)
            if geo.aiannh is not None:
                sets[GeoLevel.AIANNH].add(geo.aiannh)
        if any_block:
            sets[GeoLevel.NATION].add(nation_id)
        return {level: frozenset(values) for level, values in sets.items()}


def _open_rows(path: Path, columns: Tuple[str, ...], optional: Tuple[str, ...] = ()):
    try:
        handle = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"cannot open file: {exc}", file=str(path)) from None
    with handle:
        reader = csv.DictReader(handle)
        header = tuple(reader.fieldnames or ())
        expected = columns + tuple(c for c in optional if c in header)
        if header != expected:
            raise SchemaError(
                f"header must be {','.join(expected)}, got {','.join(header)}",
                file=str(path),
                line=1,
            )
        for line, row in enumerate(reader, start=2):
            if None in row.values() or None in row:
                raise SchemaError(
                    f"expected {len(expected)} fields", file=str(path), line=line
                )
            yield line, row


def _int_field(value: str, path: Path, line: int, field: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise SchemaError(
            f"expected an integer, got {value!r}", file=str(path), line=line, field=field
        ) from None


def read_households(path: Path) -> List[HouseholdRow]:
    rows = []
    for line, row in _open_rows(path, HOUSEHOLD_COLUMNS):
        codes = [
            _int_field(code, path, line, "race_codes")
            for code in row["race_codes"].split("|")
            if code.strip() != ""
        ]
        if not codes:
            raise SchemaError(
                "at least one race code is required",
                file=str(path),
                line=line,
                field="race_codes",
            )
        household_type = _HOUSEHOLD_TYPES.get(row["household_type"])
        if household_type is None:
            raise SchemaError(
                f"unknown household_type {row['household_type']!r}",
                file=str(path),
                line=line,
                field="household_type",
            )
        tenure = _TENURES.get(row["tenure"])
        if tenure is None:
            raise SchemaError(
                f"unknown tenure {row['tenure']!r}",
                file=str(path),
                line=line,
                field="tenure",
            )
        rows.append(
            HouseholdRow(
                line=line,
                block_id=row["block_id"],
                race_codes=frozenset(codes),
                ethnicity_code=_int_field(
                    row["ethnicity_code"], path, line, "ethnicity_code"
                ),
                household_type=household_type,
                tenure=tenure,
            )
        )
    return rows


def read_geo_spec(path: Path) -> GeoSpecData:
    blocks: Dict[str, GeoCode] = {}
    housing: Dict[str, int] = {}
    for line, row in _open_rows(path, GEO_COLUMNS, optional=("housing_units",)):
        block_id = row["block_id"]
        if block_id in blocks:
            raise SchemaError(
                f"duplicate block {block_id!r}", file=str(path), line=line, field="block_id"
            )
        for field in ("state", "county", "tract"):
            if not row[field]:
                raise SchemaError(
                    f"{field} is required", file=str(path), line=line, field=field
                )
        blocks[block_id] = GeoCode(
            block_id=block_id,
            state=row["state"],
            county=row["county"],
            tract=row["tract"],
            place=row["place"] or None,
            aiannh=row["aiannh"] or None,
        )
        housing[block_id] = (
            _int_field(row["housing_units"], path, line, "housing_units")
            if "housing_units" in row
            else 1
        )
    return GeoSpecData(blocks=blocks, housing_units=housing)


def read_iteration_spec(
    path: Path, inclusion_path: Optional[Path] = None
) -> IterationSpec:
    iterations = []
    for line, row in _open_rows(path, ITERATION_COLUMNS):
        try:
            level = IterationLevel(row["level"])
        except ValueError:
            raise SchemaError(
                f"unknown level {row['level']!r}", file=str(path), line=line, field="level"
            ) from None
        kind = _KINDS.get(row["kind"])
        if kind is None:
            raise SchemaError(
                f"unknown kind {row['kind']!r}", file=str(path), line=line, field="kind"
            )
        try:
            ranges = parse_code_ranges(row["code_ranges"], "code_ranges")
        except ConfigError as exc:
            raise SchemaError(str(exc), file=str(path), line=line, field="code_ranges") from None
        try:
            iterations.append(
                CharacteristicIteration(
                    code=row["iteration_code"],
                    kind=kind,
                    level=level,
                    member_codes=ranges,
                )
            )
        except ValueError as exc:
            raise SchemaError(str(exc), file=str(path), line=line) from None

    inclusion = None
    if inclusion_path is not None:
        inclusion_map: Dict[GeoLevel, set] = {}
        known = {it.code for it in iterations}
        for line, row in _open_rows(inclusion_path, INCLUSION_COLUMNS):
            try:
                geo_level = GeoLevel(row["geo_level"])
            except ValueError:
                raise SchemaError(
                    f"unknown geo_level {row['geo_level']!r}",
                    file=str(inclusion_path),
                    line=line,
                    field="geo_level",
                ) from None
            if row["iteration_code"] not in known:
                raise UniverseError(
                    f"inclusion references unknown iteration {row['iteration_code']!r}",
                    file=str(inclusion_path),
                    line=line,
                    field="iteration_code",
                )
            inclusion_map.setdefault(geo_level, set()).add(row["iteration_code"])
        inclusion = {level: frozenset(codes) for level, codes in inclusion_map.items()}

    try:
        return IterationSpec(iterations=tuple(iterations), inclusion=inclusion)
    except ValueError as exc:
        raise UniverseError(str(exc), file=str(path)) from None


def read_t01001(path: Path) -> List[T01001Row]:
    rows = []
    for line, row in _open_rows(path, T01001_COLUMNS):
        try:
            geo_level = GeoLevel(row["geo_level"])
        except ValueError:
            raise SchemaError(
                f"unknown geo_level {row['geo_level']!r}",
                file=str(path),
                line=line,
                field="geo_level",
            ) from None
        rows.append(
            T01001Row(
                line=line,
                geo_level=geo_level,
                geo_id=row["geo_id"],
                iteration_code=row["iteration_code"],
                count=_int_field(row["count"], path, line, "count"),
            )
        )
    return rows


def write_tabulations(path: Path, result) -> None:
    """Writes released rows as CSV; noiseless output carries a watermark line."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        if result.noiseless:
            handle.write(NOISELESS_WATERMARK + "\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(OUTPUT_COLUMNS)
        for row in result.rows:
            writer.writerow(
                (
                    row.region,
                    row.level,
                    row.entity_id,
                    row.iteration_code,
                    row.variant.value,
                    row.cell_label,
                    row.value,
                )
            )


def write_accounting(path: Path, result, master_seed: int) -> None:
    """Writes the machine-readable accounting report alongside the outputs."""
    report = dict(result.accounting)
    report["noiseless"] = result.noiseless
    report["master_seed"] = master_seed
    path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")


def read_tabulations(path: Path) -> List[dict]:
    """Re-parses an output file (skipping any watermark) for checks and tools."""
    with open(path, newline="", encoding="utf-8") as handle:
        first = handle.readline()
        if not first.startswith("#"):
            handle.seek(0)
        reader = csv.DictReader(handle)
        return [dict(row) for row in reader]
