"""
pathlift HTTP service - factorization over FastAPI.

    uvicorn pathlift.api:app --port 8000
"""
import logging
from typing import Any, Dict, List, Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from . import __version__
from .cli import InputSpec, factor_document
from .config import SolveConfig
from .errors import InputError, PathLiftError, TauUnderflow

log = logging.getLogger(__name__)

app = FastAPI(
    title="pathlift",
    description="Certified epsilon-factorization of complex polynomials",
    version=__version__,
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_methods=["GET", "POST"],
    allow_headers=["*"],
)


class FactorRequest(InputSpec):
    root_precision: Optional[float] = Field(None, gt=0)
    oracle_compare: bool = False
    include_stats: bool = False
    verify: bool = False


class ComplexValue(BaseModel):
    re: float
    im: float


class FactorResponse(BaseModel):
    degree: int
    epsilon: float
    leading_coefficient: ComplexValue
    K: float
    tau: float
    roots: List[ComplexValue]
    residual: float
    evaluations: int
    stages: List[Dict[str, Any]]
    stage_stats: Optional[List[Dict[str, Any]]] = None
    verified_residual: Optional[float] = None
    oracle_distance: Optional[float] = None
    oracle_backward_error: Optional[float] = None


@app.get("/health")
def health():
    return {"status": "healthy", "version": __version__}


@app.post("/factor", response_model=FactorResponse)
def factor(req: FactorRequest):
    # CPU bound; a plain def runs in the threadpool
    try:
        cfg = SolveConfig.from_env()
        doc = factor_document(
            req,
            epsilon=req.epsilon if req.epsilon is not None else cfg.epsilon,
            root_precision=req.root_precision,
            verify=req.verify,
            oracle_compare=req.oracle_compare,
            include_stats=req.include_stats,
            cfg=cfg,
        )
    except (InputError, ValueError) as e:
        raise HTTPException(status_code=400, detail=str(e))
    except TauUnderflow as e:
        raise HTTPException(status_code=422, detail=str(e))
    except PathLiftError as e:
        log.error("factor failed: %s: %s", type(e).__name__, e)
        raise HTTPException(status_code=500, detail=f"{type(e).__name__}: {e}")
    return doc
