"""Pydantic request/response models for the verification service."""

from __future__ import annotations

from typing import Any, Optional

from pydantic import BaseModel, Field


class FormulaRequest(BaseModel):
    formula: str


class NormalizeResponse(BaseModel):
    input: str
    well_named: str
    cover_form: str
    alternation_depth: int
    ast: dict


class ModelCheckRequest(BaseModel):
    formula: str
    model: dict
    world: str


class ModelCheckResponse(BaseModel):
    holds: bool
    denotation: list[str]
    game_positions: int


class SatRequest(BaseModel):
    formula: str
    node_budget: int = Field(default=100_000, gt=0)
    state_budget: int = Field(default=2 ** 18, gt=0)


class SatResponse(BaseModel):
    verdict: str
    formula: str
    model: Optional[dict] = None
    world: Optional[str] = None
    refutation: Optional[dict] = None
    tableau_nodes: int
    tableau_dot: str
    refutation_dot: Optional[str] = None


class ValidResponse(BaseModel):
    valid: bool
    formula: str
    countermodel: Optional[dict] = None
    counterworld: Optional[str] = None


class AnfRequest(BaseModel):
    formula: str


class AnfResponse(BaseModel):
    input: str
    anf: str
    is_anf: bool
    bisimulation_valid: bool
    relation: list[list[int]]
    correspondence: list[dict]
    base_tableau: dict
    rebuilt_tableau: dict
    rebuilt_dot: str


class TableauRequest(BaseModel):
    formula: str
    policy: str = "default"


class TableauResponse(BaseModel):
    formula: str
    nodes: int
    tableau: dict
    dot: str


class RelationRequest(BaseModel):
    left: str
    right: str
    node_cap: int = Field(default=12, gt=0)


class RelationResponse(BaseModel):
    holds: bool
    kind: str
    pairs: Optional[list[list[int]]] = None
    reason: str = ""
    left_tableau: Optional[dict] = None
    right_tableau: Optional[dict] = None


class ClaimGRequest(BaseModel):
    formula: str
    variable: str = "x"


class ClaimGResponse(BaseModel):
    alpha_hat: str
    phi_hat: str
    valid: bool
    pairs: list[list[int]]
    links: list[dict]
    left_tableau: dict
    right_tableau: dict


class RefuteRequest(BaseModel):
    formula: str


class RefuteResponse(BaseModel):
    verdict: str
    formula: str
    refutation: Optional[dict] = None
    valid: Optional[bool] = None
    thin: Optional[bool] = None
    dot: Optional[str] = None


class ThinCheckRequest(BaseModel):
    refutation: dict


class ThinCheckResponse(BaseModel):
    valid: bool
    condition: str = ""
    thin: Optional[bool] = None
    report: Optional[dict] = None


class ProofCheckRequest(BaseModel):
    proof: Optional[dict] = None
    text: Optional[str] = None


class ProofCheckResponse(BaseModel):
    ok: bool
    reason: str = ""
    conclusion: str = ""


class ErrorResponse(BaseModel):
    detail: str
    kind: str = "error"
