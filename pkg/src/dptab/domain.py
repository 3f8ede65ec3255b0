"""Census-domain value types shared by every other module.

All types here are immutable values and may be shared freely across
concurrent tasks.
"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Mapping, Optional, Tuple


class GeoLevel(Enum):
    """Geographic summary levels for which statistics are produced."""

    NATION = "Nation"
    STATE = "State"
    COUNTY = "County"
    TRACT = "Tract"
    PLACE = "Place"
    AIANNH = "AIANNH"


class IterationLevel(Enum):
    """Characteristic iteration levels (no major level is tabulated)."""

    DETAILED = "Detailed"
    REGIONAL = "Regional"


class IterationKind(Enum):
    """How membership in a characteristic iteration is decided.

    Race iterations carry an "alone" or "alone or in any combination"
    designator; ethnicity iterations carry neither.
    """

    RACE_ALONE = "race_alone"
    RACE_AOIC = "race_aoic"
    ETHNICITY = "ethnicity"


class HouseholdType(Enum):
    """The five household type categories of the householder."""

    MARRIED_COUPLE = "married_couple"
    OTHER_FAMILY_MALE = "other_family_male"
    OTHER_FAMILY_FEMALE = "other_family_female"
    NONFAMILY_ALONE = "nonfamily_alone"
    NONFAMILY_NOT_ALONE = "nonfamily_not_alone"


class Tenure(Enum):
    """The three tenure categories of the householder."""

    OWNED_MORTGAGE = "owned_mortgage"
    OWNED_FREE = "owned_free"
    RENTER = "renter"


class TableClass(Enum):
    """Generic table classes: household type (HT) and tenure (T)."""

    HT = "HT"
    T = "T"


class TableVariant(Enum):
    """The six adaptive table shells."""

    T03001 = "T03001"
    T03002 = "T03002"
    T03003 = "T03003"
    T03004 = "T03004"
    T04001 = "T04001"
    T04002 = "T04002"


HT_VARIANTS = (
    TableVariant.T03001,
    TableVariant.T03002,
    TableVariant.T03003,
    TableVariant.T03004,
)
"""Household type variants, coarsest to finest."""

T_VARIANTS = (TableVariant.T04001, TableVariant.T04002)
"""Tenure variants, coarsest to finest."""

DEFAULT_RACE_MULTIPLICITY = 8
"""Maximum number of race codes a householder may be associated with."""

# Canonical basis cell labels per variant, in stacking order. Outputs and
# tests reference labels, never positions.
BASIS_CELLS: Mapping[TableVariant, Tuple[str, ...]] = {
    TableVariant.T03001: ("Total",),
    TableVariant.T03002: ("Family Household", "Nonfamily Household"),
    TableVariant.T03003: (
        "Married Couple Family",
        "Other Family",
        "Householder Living Alone",
        "Householder Not Living Alone",
    ),
    TableVariant.T03004: (
        "Married Couple Family",
        "Male householder, no spouse present",
        "Female householder, no spouse present",
        "Householder Living Alone",
        "Householder Not Living Alone",
    ),
    TableVariant.T04001: ("Total",),
    TableVariant.T04002: (
        "Owned with a mortgage or a loan",
        "Owned free and clear",
        "Renter Occupied",
    ),
}

# Complete table shells: ordered (label, indices of the basis cells that sum
# into the row). Basis rows reference a single index; aggregate rows are the
# merge of their children's basis cells.
SHELL_ROWS: Mapping[TableVariant, Tuple[Tuple[str, Tuple[int, ...]], ...]] = {
    TableVariant.T03001: (("Total", (0,)),),
    TableVariant.T03002: (
        ("Total", (0, 1)),
        ("Family Household", (0,)),
        ("Nonfamily Household", (1,)),
    ),
    TableVariant.T03003: (
        ("Total", (0, 1, 2, 3)),
        ("Family Household", (0, 1)),
        ("Married Couple Family", (0,)),
        ("Other Family", (1,)),
        ("Nonfamily Household", (2, 3)),
        ("Householder Living Alone", (2,)),
        ("Householder Not Living Alone", (3,)),
    ),
    TableVariant.T03004: (
        ("Total", (0, 1, 2, 3, 4)),
        ("Family Household", (0, 1, 2)),
        ("Married Couple Family", (0,)),
        ("Other Family", (1, 2)),
        ("Male householder, no spouse present", (1,)),
        ("Female householder, no spouse present", (2,)),
        ("Nonfamily Household", (3, 4)),
        ("Householder Living Alone", (3,)),
        ("Householder Not Living Alone", (4,)),
    ),
    TableVariant.T04001: (("Total", (0,)),),
    TableVariant.T04002: (
        ("Total", (0, 1, 2)),
        ("Owned with a mortgage or a loan", (0,)),
        ("Owned free and clear", (1,)),
        ("Renter Occupied", (2,)),
    ),
}

# HouseholdType -> basis cell index, per HT variant. "Other Family" in
# T03003 is the merge of the two T03004 "no spouse present" categories.
_HT_CELL_INDEX: Mapping[TableVariant, Mapping[HouseholdType, int]] = {
    TableVariant.T03001: {h: 0 for h in HouseholdType},
    TableVariant.T03002: {
        HouseholdType.MARRIED_COUPLE: 0,
        HouseholdType.OTHER_FAMILY_MALE: 0,
        HouseholdType.OTHER_FAMILY_FEMALE: 0,
        HouseholdType.NONFAMILY_ALONE: 1,
        HouseholdType.NONFAMILY_NOT_ALONE: 1,
    },
    TableVariant.T03003: {
        HouseholdType.MARRIED_COUPLE: 0,
        HouseholdType.OTHER_FAMILY_MALE: 1,
        HouseholdType.OTHER_FAMILY_FEMALE: 1,
        HouseholdType.NONFAMILY_ALONE: 2,
        HouseholdType.NONFAMILY_NOT_ALONE: 3,
    },
    TableVariant.T03004: {
        HouseholdType.MARRIED_COUPLE: 0,
        HouseholdType.OTHER_FAMILY_MALE: 1,
        HouseholdType.OTHER_FAMILY_FEMALE: 2,
        HouseholdType.NONFAMILY_ALONE: 3,
        HouseholdType.NONFAMILY_NOT_ALONE: 4,
    },
}

_TENURE_CELL_INDEX: Mapping[TableVariant, Mapping[Tenure, int]] = {
    TableVariant.T04001: {t: 0 for t in Tenure},
    TableVariant.T04002: {
        Tenure.OWNED_MORTGAGE: 0,
        Tenure.OWNED_FREE: 1,
        Tenure.RENTER: 2,
    },
}


def basis_size(variant: TableVariant) -> int:
    """Returns the number of basis cells of `variant`."""
    return len(BASIS_CELLS[variant])


def variant_class(variant: TableVariant) -> TableClass:
    """Returns the table class (HT or T) of `variant`."""
    return TableClass.HT if variant in HT_VARIANTS else TableClass.T


def ht_basis_cell(household_type: HouseholdType, variant: TableVariant) -> str:
    """Maps a household type to its unique basis cell label of an HT variant.

    The mapping is total and surjective onto the variant's basis.

    Raises:
        ValueError: If `variant` is not a household type variant.
    """
    if variant not in _HT_CELL_INDEX:
        raise ValueError(f"{variant.value} is not a household type variant")
    return BASIS_CELLS[variant][_HT_CELL_INDEX[variant][household_type]]


def tenure_basis_cell(tenure: Tenure, variant: TableVariant) -> str:
    """Maps a tenure category to its unique basis cell label of a T variant.

    Raises:
        ValueError: If `variant` is not a tenure variant.
    """
    if variant not in _TENURE_CELL_INDEX:
        raise ValueError(f"{variant.value} is not a tenure variant")
    return BASIS_CELLS[variant][_TENURE_CELL_INDEX[variant][tenure]]


def ht_basis_index(household_type: HouseholdType, variant: TableVariant) -> int:
    """Basis cell index of `household_type` under an HT variant."""
    if variant not in _HT_CELL_INDEX:
        raise ValueError(f"{variant.value} is not a household type variant")
    return _HT_CELL_INDEX[variant][household_type]


def tenure_basis_index(tenure: Tenure, variant: TableVariant) -> int:
    """Basis cell index of `tenure` under a T variant."""
    if variant not in _TENURE_CELL_INDEX:
        raise ValueError(f"{variant.value} is not a tenure variant")
    return _TENURE_CELL_INDEX[variant][tenure]


@dataclass(frozen=True)
class GeoCode:
    """Pre-resolved geographic identifiers of one census block.

    State, county and tract are always present; place and AIANNH area are
    independently optional because a block may lie outside all places and/or
    all AIANNH areas.
    """

    block_id: str
    state: str
    county: str
    tract: str
    place: Optional[str] = None
    aiannh: Optional[str] = None

    def entity_id(self, level: GeoLevel, nation_id: str = "US") -> Optional[str]:
        """The block's unique entity at `level`, or None if it has none."""
        if level is GeoLevel.NATION:
            return nation_id
        if level is GeoLevel.STATE:
            return self.state
        if level is GeoLevel.COUNTY:
            return self.county
        if level is GeoLevel.TRACT:
            return self.tract
        if level is GeoLevel.PLACE:
            return self.place
        return self.aiannh


@dataclass(frozen=True)
class RaceEth:
    """Race codes (one to eight, distinct) and a single ethnicity code."""

    race_codes: frozenset
    ethnicity_code: int

    def __post_init__(self):
        object.__setattr__(self, "race_codes", frozenset(self.race_codes))
        if not self.race_codes:
            raise ValueError("a household carries at least one race code")


@dataclass(frozen=True)
class HouseholdRecord:
    """One microdata row; vacant units never appear in the input."""

    geo: GeoCode
    race_eth: RaceEth
    household_type: HouseholdType
    tenure: Tenure


@dataclass(frozen=True)
class CharacteristicIteration:
    """A race group with an alone/aoic designator, or an ethnicity group.

    `member_codes` is a tuple of inclusive, non-overlapping (lo, hi) code
    ranges defining the underlying group.
    """

    code: str
    kind: IterationKind
    level: IterationLevel
    member_codes: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        ranges = sorted(self.member_codes)
        for (lo, hi) in ranges:
            if lo > hi:
                raise ValueError(f"iteration {self.code}: bad range {lo}-{hi}")
        for (_, hi), (lo, _) in zip(ranges, ranges[1:]):
            if lo <= hi:
                raise ValueError(f"iteration {self.code}: overlapping code ranges")
        object.__setattr__(self, "member_codes", tuple(ranges))

    def contains(self, code: int) -> bool:
        return any(lo <= code <= hi for lo, hi in self.member_codes)

    def contains_all(self, codes) -> bool:
        return all(self.contains(c) for c in codes)

    def contains_any(self, codes) -> bool:
        return any(self.contains(c) for c in codes)


@dataclass(frozen=True, order=True)
class PopulationGroup:
    """A (geographic entity, characteristic iteration) pair."""

    geo_level: GeoLevel = field(compare=False)
    entity_id: str
    iteration_code: str

    def sort_key(self) -> Tuple[str, str]:
        return (self.entity_id, self.iteration_code)


@dataclass(frozen=True)
class Thresholds:
    """Population thresholds gating table variant selection."""

    theta1: int
    theta2: int
    theta3: int
    psi1: int

    def __post_init__(self):
        if not self.theta1 <= self.theta2 <= self.theta3:
            raise ValueError(
                "household type thresholds must satisfy "
                f"theta1 <= theta2 <= theta3, got ({self.theta1}, {self.theta2}, "
                f"{self.theta3})"
            )


@dataclass(frozen=True)
class PopulationGroupLevel:
    """One population group level and its per-table-class budgets.

    `rho_ht` and `rho_t` are the level's privacy-loss budgets as exact
    rationals (parsed from decimal literals); both must be positive. The
    (AIANNH, Regional) combination is never configured.
    """

    index: int
    geo_level: GeoLevel
    iter_level: IterationLevel
    rho_ht: Fraction
    rho_t: Fraction
    thresholds: Thresholds

    def __post_init__(self):
        if self.rho_ht <= 0 or self.rho_t <= 0:
            raise ValueError(f"level {self.index}: budgets must be positive")
        if self.geo_level is GeoLevel.AIANNH and self.iter_level is IterationLevel.REGIONAL:
            raise ValueError("the (AIANNH, Regional) level is never tabulated")

    @property
    def name(self) -> str:
        return f"{self.geo_level.value}/{self.iter_level.value}"


class T01001Counts:
    """Fixed public total-population counts per population group.

    Counts are exogenous inputs (they may be small or zero) and are never
    recomputed from microdata.
    """

    def __init__(self, counts: Mapping[PopulationGroup, int]):
        self._counts = dict(counts)

    def __contains__(self, group: PopulationGroup) -> bool:
        return group in self._counts

    def __len__(self) -> int:
        return len(self._counts)

    def get(self, group: PopulationGroup) -> int:
        return self._counts[group]

    def groups(self):
        return self._counts.keys()

    def items(self):
        return self._counts.items()
