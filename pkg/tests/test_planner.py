"""Planner tests: budget-table reproduction, conversions, what-if evaluation.

Frozen values were computed before the build from the stated formulas with
z = Phi^(-1)(0.975) = 1.9599639845400536 (stdlib NormalDist):

    rho_from_moe(3, 9)  = 1.9207294103470618
    rho_from_moe(11, 9) = 0.14286417101755006
    rho_from_moe(50, 9) = 0.006914625877249422
    paper 11-level MOE plan total (unbounded) = 8.894977268301144
"""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dptab.domain import GeoLevel, IterationLevel
from dptab.planner import (
    CellTarget,
    PlanError,
    PlanLevel,
    PlanRequest,
    Z_95,
    evaluate_plan,
    moe_from_rho,
    plan_request_from_dict,
    plan_result_to_dict,
    rho_from_moe,
    z_for_confidence,
)

PAPER_TABLE = [(1.92, 3), (0.14, 11), (0.0069, 50)]

PLAN_TOTAL_ORACLE = 8.894977268301144

PAPER_MOE_TARGETS = [3, 3, 11, 11, 11, 11, 50, 50, 50, 50, 50]

PAPER_LEVEL_PAIRS = [
    (GeoLevel.NATION, IterationLevel.DETAILED),
    (GeoLevel.STATE, IterationLevel.DETAILED),
    (GeoLevel.COUNTY, IterationLevel.DETAILED),
    (GeoLevel.TRACT, IterationLevel.DETAILED),
    (GeoLevel.PLACE, IterationLevel.DETAILED),
    (GeoLevel.AIANNH, IterationLevel.DETAILED),
    (GeoLevel.NATION, IterationLevel.REGIONAL),
    (GeoLevel.STATE, IterationLevel.REGIONAL),
    (GeoLevel.COUNTY, IterationLevel.REGIONAL),
    (GeoLevel.TRACT, IterationLevel.REGIONAL),
    (GeoLevel.PLACE, IterationLevel.REGIONAL),
]


def moe_plan(targets=PAPER_MOE_TARGETS, multiplicity=8, confidence=0.95):
    levels = tuple(
        PlanLevel(
            geo_level=geo,
            iter_level=itl,
            household_type=CellTarget(moe=moe),
            tenure=CellTarget(moe=moe),
        )
        for (geo, itl), moe in zip(PAPER_LEVEL_PAIRS, targets)
    )
    return PlanRequest(levels=levels, race_multiplicity=multiplicity, confidence=confidence)


@pytest.mark.parametrize("rho,expected_moe", PAPER_TABLE)
def test_moe_from_rho_reproduces_table(rho, expected_moe):
    assert moe_from_rho(rho, s=9) == expected_moe


def test_rho_from_moe_frozen_values():
    assert rho_from_moe(3, 9) == pytest.approx(1.9207294103470618, rel=1e-15)
    assert rho_from_moe(11, 9) == pytest.approx(0.14286417101755006, rel=1e-15)
    assert rho_from_moe(50, 9) == pytest.approx(0.006914625877249422, rel=1e-15)
    # matches the published 3-figure roundings
    assert rho_from_moe(3, 9) == pytest.approx(1.92, abs=5e-3)
    assert rho_from_moe(11, 9) == pytest.approx(0.14, abs=5e-3)
    assert rho_from_moe(50, 9) == pytest.approx(0.0069, abs=5e-5)


def test_base_mechanism_constant():
    # stability 1, margin 1: the bare z^2/2 constant
    assert rho_from_moe(1, 1) == pytest.approx(1.9207294103470618, rel=1e-15)


def test_round_trip_is_exact_on_table_rows():
    for moe in (3, 11, 50):
        assert moe_from_rho(rho_from_moe(moe, 9), 9) == moe


@settings(max_examples=200, deadline=None)
@given(moe=st.integers(min_value=1, max_value=10_000), s=st.integers(min_value=1, max_value=9))
def test_round_trip_never_exceeds_input(moe, s):
    assert moe_from_rho(rho_from_moe(moe, s), s) <= moe


def test_input_validation():
    with pytest.raises(ValueError):
        moe_from_rho(0, 9)
    with pytest.raises(ValueError):
        rho_from_moe(0, 9)
    with pytest.raises(ValueError):
        rho_from_moe(3, 0)
    with pytest.raises(ValueError):
        z_for_confidence(1.0)


@settings(max_examples=100, deadline=None)
@given(
    rho=st.floats(min_value=1e-4, max_value=10, allow_nan=False),
    s=st.integers(min_value=1, max_value=9),
)
def test_moe_monotonicity(rho, s):
    # non-increasing in rho, non-decreasing in s
    assert moe_from_rho(rho, s) >= moe_from_rho(rho * 2, s)
    if s < 9:
        assert moe_from_rho(rho, s) <= moe_from_rho(rho, s + 1)


def test_z_for_confidence_default():
    assert z_for_confidence(0.95) == pytest.approx(1.959964, abs=5e-7)
    assert Z_95 == z_for_confidence(0.95)


def test_evaluate_plan_paper_targets():
    result = evaluate_plan(moe_plan())
    assert result.stability == 9
    assert result.total_unbounded == pytest.approx(PLAN_TOTAL_ORACLE, rel=1e-12)
    assert result.total_bounded == pytest.approx(2 * PLAN_TOTAL_ORACLE, rel=1e-12)
    # consistent with the published table, which rounds each rho down
    assert result.total_unbounded == pytest.approx(8.869, rel=5e-3)
    for level, target in zip(result.levels, PAPER_MOE_TARGETS):
        for cell in (level.household_type, level.tenure):
            assert cell.moe == target
            assert cell.rho_bounded == 2 * cell.rho_unbounded


def test_evaluate_plan_bounded_always_double():
    result = evaluate_plan(moe_plan(targets=[5] * 11, multiplicity=4))
    assert result.total_bounded == 2 * result.total_unbounded


def test_empty_plan_has_zero_totals():
    result = evaluate_plan(PlanRequest(levels=()))
    assert result.total_unbounded == 0.0
    assert result.total_bounded == 0.0


def test_reduced_multiplicity_shrinks_moe_by_a_third():
    # holding rho fixed, stability 9 -> 4 scales the error by sqrt(4/9) = 2/3
    for rho, moe9 in PAPER_TABLE:
        unfloored9 = Z_95 * math.sqrt(9 / (2 * rho))
        unfloored4 = Z_95 * math.sqrt(4 / (2 * rho))
        assert unfloored4 / unfloored9 == pytest.approx(2 / 3, rel=1e-12)
    assert moe_from_rho(1.92, 4) == 2
    assert moe_from_rho(0.14, 4) == 7
    assert moe_from_rho(0.0069, 4) == 33


def test_plan_with_rho_targets_echoes_moe():
    request = PlanRequest(
        levels=(
            PlanLevel(
                geo_level=GeoLevel.NATION,
                iter_level=IterationLevel.DETAILED,
                household_type=CellTarget(rho=1.92),
                tenure=CellTarget(rho=1.92),
            ),
        )
    )
    result = evaluate_plan(request)
    assert result.levels[0].household_type.moe == 3
    assert result.total_unbounded == pytest.approx(3.84)


def test_cell_target_exactly_one_of():
    with pytest.raises(ValueError):
        CellTarget()
    with pytest.raises(ValueError):
        CellTarget(moe=3, rho=1.92)


def test_plan_validation_errors_name_fields():
    request = PlanRequest(
        levels=(
            PlanLevel(
                geo_level=GeoLevel.AIANNH,
                iter_level=IterationLevel.REGIONAL,
                household_type=CellTarget(moe=0),
                tenure=CellTarget(rho=-1),
            ),
        ),
        race_multiplicity=12,
        confidence=1.5,
    )
    with pytest.raises(PlanError) as excinfo:
        evaluate_plan(request)
    fields = {e["field"] for e in excinfo.value.errors}
    assert "race_multiplicity" in fields
    assert "confidence" in fields
    assert "levels[0]" in fields
    assert "levels[0].household_type.moe" in fields
    assert "levels[0].tenure.rho" in fields


def test_request_dict_round_trip():
    raw = {
        "race_multiplicity": 8,
        "confidence": 0.95,
        "levels": [
            {
                "geo_level": "Nation",
                "iter_level": "Detailed",
                "household_type": {"moe": 3},
                "tenure": {"rho": 1.92},
            }
        ],
    }
    result = evaluate_plan(plan_request_from_dict(raw))
    payload = plan_result_to_dict(result)
    assert payload["levels"][0]["household_type"]["rho_unbounded"] == pytest.approx(
        1.9207294103470618
    )
    assert payload["levels"][0]["tenure"]["moe"] == 3
    assert payload["levels"][0]["household_type"]["provenance"]["formula"].startswith(
        "rho ="
    )
    assert payload["levels"][0]["tenure"]["provenance"]["formula"].startswith("moe =")


def test_request_dict_bad_values():
    with pytest.raises(PlanError) as excinfo:
        plan_request_from_dict(
            {"levels": [{"geo_level": "Galaxy", "iter_level": "Detailed"}]}
        )
    assert excinfo.value.errors[0]["field"] == "levels[0].geo_level"
    with pytest.raises(PlanError):
        plan_request_from_dict(
            {
                "levels": [
                    {
                        "geo_level": "Nation",
                        "iter_level": "Detailed",
                        "household_type": {"moe": 3, "rho": 1.0},
                        "tenure": {"moe": 3},
                    }
                ]
            }
        )
