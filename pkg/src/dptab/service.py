"""JSON planning service backing the interactive tuning UI.

Stateless between requests, versioned under /v1, and incapable of touching
microdata: this module only imports the planner and variant selection
logic, never the pipeline or file readers.
"""

from typing import List, Optional

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from dptab import planner
from dptab.config import DEFAULT_THRESHOLDS
from dptab.domain import BASIS_CELLS, GeoLevel, IterationLevel, Thresholds
from dptab.engine import select_ht_variant, select_t_variant

API_PREFIX = "/v1"


class CellTargetBody(BaseModel):
    moe: Optional[int] = None
    rho: Optional[float] = None


class PlanLevelBody(BaseModel):
    geo_level: str
    iter_level: str
    household_type: CellTargetBody = Field(default_factory=CellTargetBody)
    tenure: CellTargetBody = Field(default_factory=CellTargetBody)


class PlanRequestBody(BaseModel):
    levels: List[PlanLevelBody] = Field(default_factory=list)
    race_multiplicity: int = 8
    confidence: float = planner.DEFAULT_CONFIDENCE


class VariantPreviewBody(BaseModel):
    count: int
    theta1: int = DEFAULT_THRESHOLDS.theta1
    theta2: int = DEFAULT_THRESHOLDS.theta2
    theta3: int = DEFAULT_THRESHOLDS.theta3
    psi1: int = DEFAULT_THRESHOLDS.psi1


def create_app() -> FastAPI:
    app = FastAPI(title="dptab planning service", version="1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.post(f"{API_PREFIX}/plan")
    def plan(body: PlanRequestBody):
        try:
            request = planner.plan_request_from_dict(body.model_dump())
            result = planner.evaluate_plan(request)
        except planner.PlanError as error:
            return JSONResponse(status_code=422, content={"errors": error.errors})
        return planner.plan_result_to_dict(result)

    @app.post(f"{API_PREFIX}/variant-preview")
    def variant_preview(body: VariantPreviewBody):
        try:
            thresholds = Thresholds(
                theta1=body.theta1,
                theta2=body.theta2,
                theta3=body.theta3,
                psi1=body.psi1,
            )
        except ValueError as error:
            return JSONResponse(
                status_code=422,
                content={"errors": [{"field": "thresholds", "message": str(error)}]},
            )
        ht = select_ht_variant(body.count, thresholds)
        t = select_t_variant(body.count, thresholds)
        return {
            "ht_variant": ht.value,
            "t_variant": t.value,
            "ht_basis": list(BASIS_CELLS[ht]),
            "t_basis": list(BASIS_CELLS[t]),
        }

    @app.get(f"{API_PREFIX}/metadata")
    def metadata():
        return {
            "geo_levels": [level.value for level in GeoLevel],
            "iter_levels": [level.value for level in IterationLevel],
            "forbidden_levels": [
                {"geo_level": GeoLevel.AIANNH.value, "iter_level": IterationLevel.REGIONAL.value}
            ],
            "default_confidence": planner.DEFAULT_CONFIDENCE,
            "default_z": planner.Z_95,
            "race_multiplicity": {"min": 1, "max": 8, "default": 8},
            "default_thresholds": {
                "theta1": DEFAULT_THRESHOLDS.theta1,
                "theta2": DEFAULT_THRESHOLDS.theta2,
                "theta3": DEFAULT_THRESHOLDS.theta3,
                "psi1": DEFAULT_THRESHOLDS.psi1,
            },
        }

    return app
