"""Request and response models for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class TermModel(BaseModel):
    kind: str
    value: str


class GraphUpload(BaseModel):
    content: str = Field(description="Canonical .nt3 text")


class GraphInfo(BaseModel):
    name: str
    statements: int


class GraphContent(BaseModel):
    name: str
    content: str


class IngestXmlRequest(BaseModel):
    xml: str
    id_attr: str = "id"
    ref_attr: str = "ref"


class SkippedElement(BaseModel):
    path: str
    reason: str


class IngestReportModel(BaseModel):
    entities: int
    attribute_statements: int
    relation_statements: int
    skipped: list[SkippedElement]


class IngestResponse(BaseModel):
    graph: GraphInfo
    report: IngestReportModel


class ComparisonInput(BaseModel):
    label: str
    graph: str = Field(description="Name of a stored graph")


class ComparisonRequest(BaseModel):
    inputs: list[ComparisonInput]


class ComparisonInfo(BaseModel):
    name: str
    labels: list[str]
    entries: int


class ComparisonContent(BaseModel):
    name: str
    content: str


class QueryRequest(BaseModel):
    query: str


class BindingsResponse(BaseModel):
    columns: list[str]
    rows: list[list[TermModel]]


class AnalyzeRequest(BaseModel):
    base: str
    left: str
    right: str
    row: int | None = None


class ReportRow(BaseModel):
    number: int
    description: str
    entities: int | None = None
    attributes: int | None = None
    relations: int | None = None


class ReportResponse(BaseModel):
    rows: list[ReportRow]
    diagnostics: list[str]


class RowElementsResponse(BaseModel):
    row: int
    description: str
    columns: list[str]
    elements: list[list[str]]


class TextDiffRequest(BaseModel):
    a: str
    b: str
    mode: str = "word"


class DiffHunkModel(BaseModel):
    op: str
    tokens: list[str]
    a_start: int
    b_start: int


class TextDiffResponse(BaseModel):
    rendered: str
    hunks: list[DiffHunkModel]


class BranchRatesModel(BaseModel):
    attribute_edit_rate: float = 0.0
    delete_rate: float = 0.0
    add_rate: float = 0.0
    move_rate: float = 0.0
    relation_add_rate: float = 0.0
    relation_delete_rate: float = 0.0


class FixtureSpecModel(BaseModel):
    seed: int
    entity_count: int = 200
    attrs_per_entity: float = 2.4
    relation_count: int = 300
    conflict_rate: float = 0.02
    left: BranchRatesModel = BranchRatesModel()
    right: BranchRatesModel = BranchRatesModel()


class FixtureRequest(BaseModel):
    prefix: str = Field(description="Graphs are stored as <prefix>-base etc.")
    spec: FixtureSpecModel | None = None


class FixtureResponse(BaseModel):
    graphs: list[GraphInfo]
    ledger: dict


class MessageResponse(BaseModel):
    detail: str
