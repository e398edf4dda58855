"""HTTP service exposing the analysis commands.

FastAPI wrapper over the runner layer. Analysis verdicts ride inside the
response body as `verdict` (ok | refuted); malformed inputs return 422.
"""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import runners as rn

app = FastAPI(title="homcirc",
              description="Nonlinear circuit analysis with implicit "
                          "device characteristics")


class NetlistRequest(BaseModel):
    netlist: str


class CharPolyRequest(BaseModel):
    netlist: str
    symbolic: bool = True
    operating_point: Optional[str] = None
    dehomogenize: Optional[str] = Field(
        default=None, description="branch=current|voltage pairs, comma separated")
    tol: float = 1e-8


class CheckSolutionRequest(BaseModel):
    netlist: str
    operating_point: str
    tol: float = 1e-8


class BifurcationRequest(BaseModel):
    netlist: str
    branch: str
    param: str = "mu"


class AssociatesRequest(BaseModel):
    f1: str
    f2: str
    domain: tuple[float, float, float, float] = (-1.0, 1.0, -1.0, 1.0)
    grid: int = 32
    tol: float = 1e-8


class Report(BaseModel):
    verdict: str
    result: dict


def _respond(call, *args, **kwargs) -> Report:
    try:
        code, doc = call(*args, **kwargs)
    except rn.RunnerError as err:
        raise HTTPException(status_code=422, detail=str(err)) from err
    return Report(verdict="ok" if code == rn.OK else "refuted", result=doc)


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/parse", response_model=Report)
def parse(req: NetlistRequest) -> Report:
    return _respond(rn.run_parse, req.netlist)


@app.post("/trees", response_model=Report)
def trees(req: NetlistRequest) -> Report:
    return _respond(rn.run_trees, req.netlist)


@app.post("/kirchhoff", response_model=Report)
def kirchhoff(req: NetlistRequest) -> Report:
    return _respond(rn.run_kirchhoff, req.netlist)


@app.post("/charpoly", response_model=Report)
def charpoly(req: CharPolyRequest) -> Report:
    return _respond(rn.run_charpoly, req.netlist,
                    symbolic=req.symbolic and req.operating_point is None,
                    op_text=req.operating_point,
                    dehom=req.dehomogenize, tol=req.tol)


@app.post("/check-solution", response_model=Report)
def check_solution(req: CheckSolutionRequest) -> Report:
    return _respond(rn.run_check_solution, req.netlist,
                    req.operating_point, tol=req.tol)


@app.post("/check-bifurcation", response_model=Report)
def check_bifurcation(req: BifurcationRequest) -> Report:
    return _respond(rn.run_check_bifurcation, req.netlist,
                    req.branch, mu=req.param)


@app.post("/associates", response_model=Report)
def associates(req: AssociatesRequest) -> Report:
    return _respond(rn.run_associates, req.f1, req.f2, req.domain,
                    grid=req.grid, tol=req.tol)
