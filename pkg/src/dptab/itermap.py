"""Mapping household records to the population groups they belong to.

The flatmap from a record to groups at one population group level, plus its
data-independent stability (the maximum number of groups one record can
contribute to). All functions here are pure over an immutable spec and safe
for arbitrary parallel invocation.
"""

from dataclasses import dataclass
from typing import Dict, FrozenSet, Mapping, Optional, Tuple

from dptab.domain import (
    CharacteristicIteration,
    GeoLevel,
    HouseholdRecord,
    IterationKind,
    IterationLevel,
    PopulationGroup,
    PopulationGroupLevel,
    RaceEth,
)


@dataclass(frozen=True)
class IterationSpec:
    """The universe of characteristic iterations and per-geo-level inclusion.

    `inclusion` maps a geographic level to the set of iteration codes
    tabulated there; a missing entry means all iterations are included at
    that level.
    """

    iterations: Tuple[CharacteristicIteration, ...]
    inclusion: Optional[Mapping[GeoLevel, FrozenSet[str]]] = None

    def __post_init__(self):
        if self.inclusion is None:
            object.__setattr__(self, "inclusion", {})
        codes = [it.code for it in self.iterations]
        if len(codes) != len(set(codes)):
            raise ValueError("duplicate iteration codes in spec")
        self._check_group_structure()

    def _check_group_structure(self):
        # Detailed race groups must be pairwise disjoint in code space, and
        # each must nest inside exactly one regional race group.
        detailed = self._race_groups(IterationLevel.DETAILED)
        regional = self._race_groups(IterationLevel.REGIONAL)
        for i, (code_a, a) in enumerate(detailed):
            for code_b, b in detailed[i + 1 :]:
                if a & b:
                    raise ValueError(
                        f"detailed race groups {code_a} and {code_b} overlap"
                    )
        for code_d, d in detailed:
            parents = [code_r for code_r, r in regional if d <= r]
            partial = [code_r for code_r, r in regional if d & r]
            if regional and (len(parents) != 1 or partial != parents):
                raise ValueError(
                    f"detailed race group {code_d} must be contained in exactly "
                    f"one regional race group (contained in {parents}, "
                    f"overlapping {partial})"
                )
        for level in IterationLevel:
            self._check_ethnicity_disjoint(level)

    def _race_groups(self, level: IterationLevel):
        # Alone and aoic rows over the same code set describe one group.
        groups: Dict[FrozenSet[int], str] = {}
        for it in self.iterations:
            if it.level is level and it.kind is not IterationKind.ETHNICITY:
                codes = frozenset(
                    c for lo, hi in it.member_codes for c in range(lo, hi + 1)
                )
                groups.setdefault(codes, it.code)
        return [(code, codes) for codes, code in groups.items()]

    def _check_ethnicity_disjoint(self, level: IterationLevel):
        seen: Dict[int, str] = {}
        for it in self.iterations:
            if it.level is level and it.kind is IterationKind.ETHNICITY:
                for lo, hi in it.member_codes:
                    for c in range(lo, hi + 1):
                        if c in seen and seen[c] != it.code:
                            raise ValueError(
                                f"ethnicity code {c} belongs to both {seen[c]} "
                                f"and {it.code} at the {level.value} level"
                            )
                        seen[c] = it.code

    def at_level(self, level: IterationLevel) -> Tuple[CharacteristicIteration, ...]:
        return tuple(it for it in self.iterations if it.level is level)

    def included_at(self, geo_level: GeoLevel, code: str) -> bool:
        included = self.inclusion.get(geo_level)
        return included is None or code in included

    def get(self, code: str) -> Optional[CharacteristicIteration]:
        for it in self.iterations:
            if it.code == code:
                return it
        return None


def iterations_for(
    race_eth: RaceEth,
    iter_level: IterationLevel,
    spec: IterationSpec,
) -> FrozenSet[CharacteristicIteration]:
    """All characteristic iterations at `iter_level` the householder belongs to.

    A race group is matched alone or in any combination iff any race code
    falls in the group, and alone iff all race codes fall in the group. The
    at-most-one ethnicity group containing the ethnicity code is matched
    with no designator. Codes contained in no configured group contribute
    nothing.
    """
    out = []
    for it in spec.at_level(iter_level):
        if it.kind is IterationKind.RACE_AOIC:
            if it.contains_any(race_eth.race_codes):
                out.append(it)
        elif it.kind is IterationKind.RACE_ALONE:
            if it.contains_all(race_eth.race_codes):
                out.append(it)
        else:
            if it.contains(race_eth.ethnicity_code):
                out.append(it)
    return frozenset(out)


def map_record_to_groups(
    record: HouseholdRecord,
    level: PopulationGroupLevel,
    spec: IterationSpec,
    nation_id: str = "US",
) -> FrozenSet[PopulationGroup]:
    """The set of population groups at `level` the record belongs to.

    Empty when the record has no geographic entity at the level (e.g. a
    block outside all AIANNH areas). Iterations not included at the level's
    geographic level are filtered out.
    """
    entity = record.geo.entity_id(level.geo_level, nation_id)
    if entity is None:
        return frozenset()
    return frozenset(
        PopulationGroup(level.geo_level, entity, it.code)
        for it in iterations_for(record.race_eth, level.iter_level, spec)
        if spec.included_at(level.geo_level, it.code)
    )


def stability(
    level: Optional[PopulationGroupLevel], race_multiplicity: int
) -> int:
    """Data-independent bound on how many groups one record can map to.

    Defined over all hypothetically possible records rather than any
    collected data: a householder with the maximum number of race codes can
    match one alone-or-in-any-combination group per code, plus one ethnicity
    group. The bound is the same for every level; `level` is accepted for
    call-site symmetry.
    """
    if race_multiplicity < 1:
        raise ValueError("race multiplicity must be at least 1")
    return race_multiplicity + 1
