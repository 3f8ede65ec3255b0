"""Acceptance suite: one test per release criterion, at its stated tolerance.

Run with `pytest tests/test_acceptance.py -s` to see one PASS line per
criterion; a failing criterion fails its test.
"""

import itertools
import json
import math
import random
from fractions import Fraction

import pytest
from click.testing import CliRunner

from dptab.accountant import BudgetLedger, NeighborModel
from dptab.cli import main as cli_main
from dptab.domain import BASIS_CELLS, TableClass
from dptab.engine import build_group_universe, run_level, run_pipeline
from dptab.mechanisms import (
    DiscreteGaussian,
    NoiseStreams,
    as_fraction,
    renyi_divergence,
    vector_discrete_gaussian,
)
from dptab.planner import CellTarget, PlanLevel, PlanRequest, evaluate_plan, moe_from_rho
from dptab.config import load_run_config
from dptab.validation import validate_inputs

from naive_reference import naive_tabulate
from stat_utils import chisquare_vs_pmf, truncated_shift_pmfs
from synthdata import (
    build_iteration_spec,
    entity_frozensets,
    iteration_rows,
    levels_from_entries,
    make_blocks,
    make_records,
    make_t01001,
    paper_level_entries,
    raw_iterations,
    records_to_objects,
    standard_fixture,
    t01001_to_counts,
)

TABLE_ROWS = [(1.92, 3), (0.14, 11), (0.0069, 50)]
TABLE_RHO_LITERALS = ["1.92", "0.14", "0.0069"]


def _pass(name):
    print(f"\nPASS {name}")


def test_budget_table_reproduction():
    for rho, moe in TABLE_ROWS:
        assert moe_from_rho(rho, s=9) == moe
    # bounded columns are exactly double the unbounded columns
    request = PlanRequest(
        levels=tuple(
            PlanLevel(
                geo_level=level.geo_level,
                iter_level=level.iter_level,
                household_type=CellTarget(rho=float(level.rho_ht)),
                tenure=CellTarget(rho=float(level.rho_t)),
            )
            for level in levels_from_entries(paper_level_entries())
        )
    )
    result = evaluate_plan(request)
    moes = []
    for level in result.levels:
        for cell in (level.household_type, level.tenure):
            assert cell.rho_bounded == 2.0 * cell.rho_unbounded
        moes.append(level.household_type.moe)
    assert moes == [3, 3, 11, 11, 11, 11, 50, 50, 50, 50, 50]
    assert result.total_bounded == 2.0 * result.total_unbounded
    _pass("budget-table reproduction: rho {1.92, 0.14, 0.0069} -> MOE {3, 11, 50}, bounded = 2x")


def test_total_loss_reproduction(tmp_path):
    config_path = standard_fixture(tmp_path, n_records=10_000, seed=20)
    config = load_run_config(config_path)
    bundle = validate_inputs(config)
    assert len(bundle.records) == 10_000
    ledger = BudgetLedger(float(config.total_budget), NeighborModel.UNBOUNDED)
    result = run_pipeline(
        records=bundle.records,
        levels=bundle.levels,
        geo_entities=bundle.geo_entities,
        iteration_spec=bundle.iteration_spec,
        t01001=bundle.t01001,
        ledger=ledger,
        seed=config.master_seed,
        region=config.region,
        race_multiplicity=config.race_multiplicity,
    )
    assert result.accounting["total_loss_unbounded"] == pytest.approx(8.869, abs=1e-9)
    assert result.accounting["total_loss_bounded"] == pytest.approx(17.738, abs=1e-9)
    assert len(result.rows) > 0
    _pass(
        "total-loss reproduction: 11-level run on 10^4 records -> "
        "8.869 unbounded / 17.738 bounded"
    )


def test_empirical_moe_coverage():
    n = 100_000
    streams = NoiseStreams(314159)
    for literal, (rho, moe) in zip(TABLE_RHO_LITERALS, TABLE_ROWS):
        mechanism_rho = as_fraction(literal) / 9
        noise = vector_discrete_gaussian(
            [0] * n, mechanism_rho, streams.stream("moe-coverage", literal)
        )
        covered = sum(1 for v in noise if abs(v) <= moe) / n
        assert covered >= 0.950 - 0.007, (rho, moe, covered)
    _pass("empirical MOE coverage: |noise| <= MOE in >= 94.3% of 10^5 draws per row")


def test_sampler_fidelity():
    n = 1_000_000
    for sigma_sq in (Fraction(1, 4), Fraction(1), Fraction(75, 32)):
        dist = DiscreteGaussian(sigma_sq)
        stream = NoiseStreams(271828).stream("gof", str(sigma_sq))
        draws = [dist.sample(stream) for _ in range(n)]
        result = chisquare_vs_pmf(draws, dist)
        assert result.pvalue > 0.001, (sigma_sq, result)
        mean = sum(draws) / n
        var = sum((x - mean) ** 2 for x in draws) / n
        m4 = sum((x - mean) ** 4 for x in draws) / n
        stderr_var = math.sqrt(max(m4 - var**2, 0.0) / n)
        assert var <= float(sigma_sq) + 3 * stderr_var, (sigma_sq, var)
    _pass(
        "sampler fidelity: chi-square p > 0.001 and variance <= sigma^2 "
        "at sigma^2 in {0.25, 1, 2.34375} (10^6 draws each)"
    )


def test_zcdp_certificate():
    for literal in TABLE_RHO_LITERALS:
        rho = as_fraction(literal)
        dist = DiscreteGaussian.from_rho(rho)
        radius = int(40 * math.sqrt(float(dist.sigma_sq))) + 1
        p, q = truncated_shift_pmfs(dist, radius)
        for alpha in (1.5, 2.0, 4.0, 8.0, 16.0):
            divergence = renyi_divergence(p, q, alpha)
            assert divergence <= float(rho) * alpha + 1e-9, (literal, alpha, divergence)
    _pass(
        "zCDP certificate: D_alpha(N_Z(1/(2 rho)) || shift) <= rho*alpha + 1e-9 "
        "for alpha in {1.5, 2, 4, 8, 16}, rho in {0.0069, 0.14, 1.92}"
    )


# --- sensitivity oracle ------------------------------------------------------

MICRO_MULTIPLICITY = 3  # stability s = 4

MICRO_POOL = [
    # (block, race codes, ethnicity, household type, tenure)
    ("B0001", (1105,), 2015, "married_couple", "renter"),
    ("B0001", (1200, 1210, 1300), 2015, "other_family_male", "owned_free"),
    ("B0002", (1105, 1110), 2900, "nonfamily_alone", "owned_mortgage"),
    ("B0003", (1305,), 2023, "nonfamily_not_alone", "renter"),
    ("B0003", (1105, 1200, 1400), 2900, "other_family_female", "renter"),
    ("B0005", (1410,), 2015, "married_couple", "owned_free"),
    ("B0005", (1200, 1205, 1210), 2023, "nonfamily_alone", "renter"),
    ("B0007", (1110,), 2900, "married_couple", "owned_mortgage"),
]


def _micro_world():
    blocks = make_blocks()
    levels = levels_from_entries(
        [
            {
                "geo_level": "State",
                "iter_level": "Detailed",
                "rho_ht": 0.5,
                "rho_t": 0.5,
                "theta1": 1,
                "theta2": 2,
                "theta3": 3,
                "psi1": 2,
            },
            {
                "geo_level": "Nation",
                "iter_level": "Regional",
                "rho_ht": 0.5,
                "rho_t": 0.5,
                "theta1": 1,
                "theta2": 2,
                "theta3": 3,
                "psi1": 2,
            },
        ]
    )
    spec = build_iteration_spec()
    rng = random.Random(5)
    entities = entity_frozensets(blocks)
    # full coverage with counts spanning every variant band
    counts = {}
    from dptab.domain import PopulationGroup, T01001Counts

    for level in levels:
        for entity in entities[level.geo_level]:
            for it in spec.at_level(level.iter_level):
                counts[PopulationGroup(level.geo_level, entity, it.code)] = rng.choice(
                    [0, 1, 2, 3, 4, 10]
                )
    t01001 = T01001Counts(counts)
    universe = build_group_universe(levels, entities, spec, t01001)
    records = records_to_objects(
        [
            {
                "block_id": block,
                "race_codes": "|".join(str(c) for c in codes),
                "ethnicity_code": str(eth),
                "household_type": ht,
                "tenure": tenure,
            }
            for block, codes, eth, ht, tenure in MICRO_POOL
        ],
        blocks,
    )
    return records, levels, spec, universe


def test_sensitivity_oracle():
    pool, levels, spec, universe = _micro_world()
    s = MICRO_MULTIPLICITY + 1
    cache = {}

    def stacked(dataset_key):
        if dataset_key not in cache:
            dataset = [pool[i] for i in dataset_key]
            per_level = []
            for level in levels:
                released = run_level(
                    dataset,
                    level,
                    universe,
                    BudgetLedger(100.0, NeighborModel.UNBOUNDED),
                    NoiseStreams(0),
                    spec,
                    race_multiplicity=MICRO_MULTIPLICITY,
                    noiseless=True,
                )
                per_level.append(
                    (released[TableClass.HT].values, released[TableClass.T].values)
                )
            cache[dataset_key] = per_level
        return cache[dataset_key]

    def l2(a, b):
        return math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)))

    indices = range(len(pool))
    base_keys = [
        tuple(sorted(combo))
        for size in range(0, 4)
        for combo in itertools.combinations_with_replacement(indices, size)
    ]
    unbounded_pairs = bounded_pairs = 0
    for key in base_keys:
        base = stacked(key)
        for extra in indices:
            neighbor = stacked(tuple(sorted(key + (extra,))))
            for (ht_a, t_a), (ht_b, t_b) in zip(base, neighbor):
                assert l2(ht_a, ht_b) <= math.sqrt(s) + 1e-12
                assert l2(t_a, t_b) <= math.sqrt(s) + 1e-12
            unbounded_pairs += 1
        if key:
            for position in set(key):
                removed = list(key)
                removed.remove(position)
                for replacement in indices:
                    neighbor = stacked(tuple(sorted(removed + [replacement])))
                    for (ht_a, t_a), (ht_b, t_b) in zip(base, neighbor):
                        assert l2(ht_a, ht_b) <= math.sqrt(2 * s) + 1e-12
                        assert l2(t_a, t_b) <= math.sqrt(2 * s) + 1e-12
                    bounded_pairs += 1
    assert unbounded_pairs > 1000 and bounded_pairs > 1000
    _pass(
        "sensitivity oracle: "
        f"{unbounded_pairs} unbounded pairs within sqrt({s}), "
        f"{bounded_pairs} bounded pairs within sqrt({2 * s})"
    )


def test_oracle_equivalence():
    spec = build_iteration_spec()
    iterations = raw_iterations()
    instances = 0
    for trial in range(100):
        rng = random.Random(1000 + trial)
        blocks = make_blocks(
            n_states=rng.randint(1, 2),
            counties_per_state=rng.randint(1, 2),
            tracts_per_county=rng.randint(1, 2),
        )
        n_records = 1000 if trial < 2 else rng.randint(20, 300)
        record_rows = make_records(rng, blocks, n_records)
        t01001_rows = make_t01001(rng, blocks, coverage=rng.uniform(0.3, 1.0))
        entries = [
            e
            for e in paper_level_entries(
                theta=sorted(rng.sample(range(0, 600), 3)), psi=rng.randint(0, 300)
            )
            if rng.random() < 0.8
        ] or paper_level_entries()[:1]
        levels = levels_from_entries(entries)

        result = run_pipeline(
            records=records_to_objects(record_rows, blocks),
            levels=levels,
            geo_entities=entity_frozensets(blocks),
            iteration_spec=spec,
            t01001=t01001_to_counts(t01001_rows),
            ledger=BudgetLedger(1000.0, NeighborModel.UNBOUNDED),
            seed=trial,
            noiseless=True,
        )
        got = {
            (r.region, r.level, r.entity_id, r.iteration_code, r.variant.value, r.cell_label): r.value
            for r in result.rows
        }

        expected = naive_tabulate(
            records=[
                {
                    "block_id": row["block_id"],
                    "race_codes": [int(c) for c in row["race_codes"].split("|")],
                    "ethnicity_code": int(row["ethnicity_code"]),
                    "household_type": row["household_type"],
                    "tenure": row["tenure"],
                }
                for row in record_rows
            ],
            blocks={b["block_id"]: b for b in blocks},
            iterations=iterations,
            t01001={
                (r["geo_level"], r["geo_id"], r["iteration_code"]): int(r["count"])
                for r in t01001_rows
            },
            levels=[
                {
                    "geo_level": e["geo_level"],
                    "iter_level": e["iter_level"],
                    "theta1": e["theta1"],
                    "theta2": e["theta2"],
                    "theta3": e["theta3"],
                    "psi1": e["psi1"],
                }
                for e in entries
            ],
            inclusion=None,
            region="US",
        )
        assert got == expected, f"instance {trial} diverged"

        by_group = {}
        for row in result.rows:
            key = (row.level, row.entity_id, row.iteration_code, row.variant)
            by_group.setdefault(key, {})[row.cell_label] = row.value
        for (_, _, _, variant), cells in by_group.items():
            assert cells["Total"] == sum(cells[c] for c in BASIS_CELLS[variant])
        instances += 1
    assert instances == 100
    _pass("oracle equivalence: noiseless pipeline == naive tabulator on 100 fuzzed instances")


def test_universe_non_disclosure():
    spec = build_iteration_spec()
    blocks = make_blocks()
    rng = random.Random(77)
    t01001_rows = make_t01001(rng, blocks, coverage=0.7)
    levels = levels_from_entries(paper_level_entries())
    t01001 = t01001_to_counts(t01001_rows)

    def run_with(record_rows, seed=5):
        return run_pipeline(
            records=records_to_objects(record_rows, blocks),
            levels=levels,
            geo_entities=entity_frozensets(blocks),
            iteration_spec=spec,
            t01001=t01001,
            ledger=BudgetLedger(10.0, NeighborModel.UNBOUNDED),
            seed=seed,
        )

    empty = run_with([])
    variant_a = run_with(make_records(random.Random(1), blocks, 150))
    variant_b = run_with(make_records(random.Random(2), blocks, 40))
    assert empty.row_keys() == variant_a.row_keys() == variant_b.row_keys()

    # suppression of groups absent from the count input is total, even when
    # microdata would populate them
    present = {
        (row["geo_level"], row["geo_id"], row["iteration_code"]) for row in t01001_rows
    }
    released_groups = {
        (r.level.split("/")[0], r.entity_id, r.iteration_code) for r in variant_a.rows
    }
    for group in released_groups:
        assert group in present
    _pass(
        "universe non-disclosure: identical output row sets across microdata "
        "variations; missing-count groups fully suppressed"
    )


def test_determinism(tmp_path):
    config = standard_fixture(tmp_path / "inputs", n_records=400, seed=9)
    runner = CliRunner()
    outputs = {}
    for name, extra in (
        ("serial-1", []),
        ("serial-2", []),
        ("parallel", ["--workers", "4"]),
    ):
        out = tmp_path / name
        result = runner.invoke(
            cli_main,
            ["run", "--config", str(config), "--output-dir", str(out), *extra],
            catch_exceptions=False,
        )
        assert result.exit_code == 0
        outputs[name] = (
            (out / "tabulations.csv").read_bytes(),
            (out / "accounting.json").read_bytes(),
        )
    assert outputs["serial-1"] == outputs["serial-2"] == outputs["parallel"]
    _pass("determinism: byte-identical outputs across repeat, serial, and parallel runs")
