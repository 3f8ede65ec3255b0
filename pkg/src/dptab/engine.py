"""The tabulation pipeline: adaptive variant selection, vectorization, release.

For each population group level: flatmap records to their groups, count the
selected table bases per group, stack the per-group vectors in canonical
order, charge the budget ledger, and release the stacked vectors through
the discrete Gaussian mechanism with per-cell keyed noise streams.

The set of released rows (the group universe) is derived exclusively from
public inputs: total-population counts, the geography spec, the iteration
spec, and configured thresholds. Microdata can never make a group appear or
disappear.
"""

from concurrent.futures import Executor
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from dptab import postprocess
from dptab.accountant import BudgetLedger
from dptab.domain import (
    BASIS_CELLS,
    GeoLevel,
    HouseholdRecord,
    PopulationGroup,
    PopulationGroupLevel,
    T01001Counts,
    TableClass,
    TableVariant,
    Thresholds,
    ht_basis_index,
    tenure_basis_index,
)
from dptab.itermap import IterationSpec, iterations_for, stability
from dptab.mechanisms import NoiseStreams, NoisyVector, vector_discrete_gaussian
from dptab.postprocess import TableShell, build_shell

# Upper bound on cells per noise task when sampling in parallel.
_PARALLEL_CHUNK = 64


def select_ht_variant(count: int, thresholds: Thresholds) -> TableVariant:
    """Household type variant for a group with total-population `count`.

    All comparisons are strict: a count equal to a threshold selects the
    coarser variant.
    """
    if count > thresholds.theta3:
        return TableVariant.T03004
    if count > thresholds.theta2:
        return TableVariant.T03003
    if count > thresholds.theta1:
        return TableVariant.T03002
    return TableVariant.T03001


def select_t_variant(count: int, thresholds: Thresholds) -> TableVariant:
    """Tenure variant for a group with total-population `count`."""
    if count > thresholds.psi1:
        return TableVariant.T04002
    return TableVariant.T04001


def vectorize_population_group(
    records: Sequence[HouseholdRecord],
    group: PopulationGroup,
    count: int,
    thresholds: Thresholds,
) -> Tuple[List[int], List[int]]:
    """Exact basis vectors (household type, tenure) for one population group.

    `records` must already be filtered to the group; an empty set yields
    zero vectors. Both vectors sum to the number of records.
    """
    ht_variant = select_ht_variant(count, thresholds)
    t_variant = select_t_variant(count, thresholds)
    v_ht = [0] * len(BASIS_CELLS[ht_variant])
    v_t = [0] * len(BASIS_CELLS[t_variant])
    for record in records:
        v_ht[ht_basis_index(record.household_type, ht_variant)] += 1
        v_t[tenure_basis_index(record.tenure, t_variant)] += 1
    return v_ht, v_t


@dataclass(frozen=True)
class UniverseEntry:
    """One group to tabulate: its count and pre-selected table variants."""

    group: PopulationGroup
    count: int
    ht_variant: TableVariant
    t_variant: TableVariant


@dataclass(frozen=True)
class GroupUniverse:
    """Per level index, the canonical ordered list of groups to tabulate."""

    by_level: Mapping[int, Tuple[UniverseEntry, ...]]

    def entries(self, level_index: int) -> Tuple[UniverseEntry, ...]:
        return self.by_level[level_index]

    def row_keys(self) -> List[tuple]:
        """All (level, group, variant) identifiers, for disclosure checks."""
        keys = []
        for index in sorted(self.by_level):
            for entry in self.by_level[index]:
                keys.append(
                    (
                        index,
                        entry.group.entity_id,
                        entry.group.iteration_code,
                        entry.ht_variant.value,
                        entry.t_variant.value,
                    )
                )
        return keys


def build_group_universe(
    levels: Sequence[PopulationGroupLevel],
    geo_entities: Mapping[GeoLevel, frozenset],
    iteration_spec: IterationSpec,
    t01001: T01001Counts,
) -> GroupUniverse:
    """Declares every group to tabulate, from public inputs only.

    Candidate groups are the cross product of the level's geographic
    entities with its included iterations; groups without total-population
    counts are then suppressed entirely.
    """
    by_level: Dict[int, Tuple[UniverseEntry, ...]] = {}
    for level in levels:
        entities = sorted(geo_entities.get(level.geo_level, frozenset()))
        iteration_codes = sorted(
            it.code
            for it in iteration_spec.at_level(level.iter_level)
            if iteration_spec.included_at(level.geo_level, it.code)
        )
        candidates = [
            PopulationGroup(level.geo_level, entity, code)
            for entity in entities
            for code in iteration_codes
        ]
        retained = postprocess.apply_t01001_suppression(candidates, t01001)
        entries = []
        for group in retained:
            count = t01001.get(group)
            entries.append(
                UniverseEntry(
                    group=group,
                    count=count,
                    ht_variant=select_ht_variant(count, level.thresholds),
                    t_variant=select_t_variant(count, level.thresholds),
                )
            )
        by_level[level.index] = tuple(entries)
    return GroupUniverse(by_level=by_level)


def _group_records(
    records: Sequence[HouseholdRecord],
    level: PopulationGroupLevel,
    iteration_spec: IterationSpec,
    nation_id: str,
) -> Dict[PopulationGroup, List[HouseholdRecord]]:
    # Flatmap each record to its groups, memoizing the iteration lookup per
    # distinct RaceEth value.
    iteration_cache: Dict[object, tuple] = {}
    grouped: Dict[PopulationGroup, List[HouseholdRecord]] = {}
    for record in records:
        entity = record.geo.entity_id(level.geo_level, nation_id)
        if entity is None:
            continue
        cached = iteration_cache.get(record.race_eth)
        if cached is None:
            cached = tuple(
                it.code
                for it in iterations_for(record.race_eth, level.iter_level, iteration_spec)
                if iteration_spec.included_at(level.geo_level, it.code)
            )
            iteration_cache[record.race_eth] = cached
        for code in cached:
            grouped.setdefault(
                PopulationGroup(level.geo_level, entity, code), []
            ).append(record)
    return grouped


def _release(
    base: List[int],
    labels: List[tuple],
    stream_keys: List[tuple],
    rho_mechanism,
    streams: NoiseStreams,
    noiseless: bool,
    executor: Optional[Executor],
) -> NoisyVector:
    # The caller has already charged the ledger for this release.
    if noiseless:
        values = list(base)
    elif executor is None:
        cell_streams = [streams.stream(*key) for key in stream_keys]
        values = vector_discrete_gaussian(base, rho_mechanism, cell_streams)
    else:
        chunks = [
            range(i, min(i + _PARALLEL_CHUNK, len(base)))
            for i in range(0, len(base), _PARALLEL_CHUNK)
        ]

        def noisy_chunk(idx):
            return vector_discrete_gaussian(
                [base[i] for i in idx],
                rho_mechanism,
                [streams.stream(*stream_keys[i]) for i in idx],
            )

        values = [v for chunk in executor.map(noisy_chunk, chunks) for v in chunk]
    return NoisyVector(values=tuple(values), labels=tuple(labels))


def run_level(
    records: Sequence[HouseholdRecord],
    level: PopulationGroupLevel,
    universe: GroupUniverse,
    ledger: BudgetLedger,
    streams: NoiseStreams,
    iteration_spec: IterationSpec,
    race_multiplicity: int,
    nation_id: str = "US",
    noiseless: bool = False,
    executor: Optional[Executor] = None,
) -> Dict[TableClass, NoisyVector]:
    """Tabulates and releases one population group level.

    Charges the ledger for both table classes before any noise is drawn; a
    budget failure aborts the whole level. Groups appear in canonical
    (entity, iteration) order with cells in basis order, so output bytes do
    not depend on the execution schedule.
    """
    s = stability(level, race_multiplicity)
    ledger.charge(level.index, TableClass.HT, s, float(level.rho_ht))
    ledger.charge(level.index, TableClass.T, s, float(level.rho_t))

    grouped = _group_records(records, level, iteration_spec, nation_id)
    stacked: Dict[TableClass, Tuple[List[int], List[tuple], List[tuple]]] = {
        TableClass.HT: ([], [], []),
        TableClass.T: ([], [], []),
    }
    for entry in universe.entries(level.index):
        group_records = grouped.get(entry.group, ())
        v_ht, v_t = vectorize_population_group(
            group_records, entry.group, entry.count, level.thresholds
        )
        for table_class, variant, vector in (
            (TableClass.HT, entry.ht_variant, v_ht),
            (TableClass.T, entry.t_variant, v_t),
        ):
            base, labels, keys = stacked[table_class]
            for cell_index, cell_label in enumerate(BASIS_CELLS[variant]):
                base.append(vector[cell_index])
                labels.append((entry.group, variant, cell_label))
                keys.append(
                    (
                        level.index,
                        table_class.value,
                        entry.group.entity_id,
                        entry.group.iteration_code,
                        cell_label,
                    )
                )

    releases = {}
    for table_class, rho in ((TableClass.HT, level.rho_ht), (TableClass.T, level.rho_t)):
        base, labels, keys = stacked[table_class]
        releases[table_class] = _release(
            base, labels, keys, rho / s, streams, noiseless, executor
        )
    return releases


@dataclass(frozen=True)
class OutputRow:
    """One released statistic."""

    region: str
    level: str
    entity_id: str
    iteration_code: str
    variant: TableVariant
    cell_label: str
    value: int


@dataclass(frozen=True)
class PipelineResult:
    """Everything a run produces: shell rows, accounting, and the universe."""

    rows: Tuple[OutputRow, ...]
    accounting: dict
    universe: GroupUniverse
    noiseless: bool

    def row_keys(self) -> List[tuple]:
        return [
            (r.region, r.level, r.entity_id, r.iteration_code, r.variant.value, r.cell_label)
            for r in self.rows
        ]


def run_pipeline(
    records: Sequence[HouseholdRecord],
    levels: Sequence[PopulationGroupLevel],
    geo_entities: Mapping[GeoLevel, frozenset],
    iteration_spec: IterationSpec,
    t01001: T01001Counts,
    ledger: BudgetLedger,
    seed: int,
    region: str = "US",
    race_multiplicity: int = 8,
    noiseless: bool = False,
    executor: Optional[Executor] = None,
) -> PipelineResult:
    """Runs every configured level and assembles full table shells.

    Deterministic for a fixed seed: noise streams are keyed by (level,
    table class, group, cell), and output rows are canonically ordered.
    Raises before producing any output if a level's charge would exceed the
    declared budget.
    """
    universe = build_group_universe(levels, geo_entities, iteration_spec, t01001)
    streams = NoiseStreams(seed)
    rows: List[OutputRow] = []
    for level in sorted(levels, key=lambda l: l.index):
        releases = run_level(
            records,
            level,
            universe,
            ledger,
            streams,
            iteration_spec,
            race_multiplicity,
            nation_id=region,
            noiseless=noiseless,
            executor=executor,
        )
        # Per table class, slice each group's basis back out of the stacked
        # release; the stacking order is the universe's canonical order.
        shells: Dict[int, Dict[TableClass, TableShell]] = {}
        for table_class in (TableClass.HT, TableClass.T):
            released = releases[table_class]
            offset = 0
            for position, entry in enumerate(universe.entries(level.index)):
                variant = (
                    entry.ht_variant if table_class is TableClass.HT else entry.t_variant
                )
                width = len(BASIS_CELLS[variant])
                basis = released.values[offset : offset + width]
                offset += width
                shells.setdefault(position, {})[table_class] = build_shell(
                    variant, basis
                )
            if offset != len(released.values):
                raise AssertionError("released vector length mismatch")
        for position, entry in enumerate(universe.entries(level.index)):
            for table_class in (TableClass.HT, TableClass.T):
                shell = shells[position][table_class]
                for cell_label, value in shell.rows:
                    rows.append(
                        OutputRow(
                            region=region,
                            level=level.name,
                            entity_id=entry.group.entity_id,
                            iteration_code=entry.group.iteration_code,
                            variant=shell.variant,
                            cell_label=cell_label,
                            value=value,
                        )
                    )
    return PipelineResult(
        rows=tuple(rows),
        accounting=ledger.report(),
        universe=universe,
        noiseless=noiseless,
    )
