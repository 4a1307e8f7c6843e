"""HTTP service wrapping the core package.

Graphs and comparisons live in an in-memory store, so a client can load
models once and then run any number of queries and analyses against
them. All objects are immutable after construction; a lock guards the
store mappings themselves.
"""

from __future__ import annotations

import threading

from fastapi import FastAPI, HTTPException

from .. import catalog, compare, fixtures, ingest, query, textdiff, triples
from . import schemas


class ModelStore:
    def __init__(self):
        self._lock = threading.Lock()
        self.graphs: dict[str, triples.ModelGraph] = {}
        self.comparisons: dict[str, compare.ComparisonModel] = {}

    def put_graph(self, name: str, graph: triples.ModelGraph) -> None:
        with self._lock:
            self.graphs[name] = graph

    def get_graph(self, name: str) -> triples.ModelGraph:
        with self._lock:
            graph = self.graphs.get(name)
        if graph is None:
            raise HTTPException(status_code=404, detail=f"no graph named {name!r}")
        return graph

    def delete_graph(self, name: str) -> None:
        with self._lock:
            if name not in self.graphs:
                raise HTTPException(status_code=404,
                                    detail=f"no graph named {name!r}")
            del self.graphs[name]

    def put_comparison(self, name: str, model: compare.ComparisonModel) -> None:
        with self._lock:
            self.comparisons[name] = model

    def get_comparison(self, name: str) -> compare.ComparisonModel:
        with self._lock:
            model = self.comparisons.get(name)
        if model is None:
            raise HTTPException(status_code=404,
                                detail=f"no comparison named {name!r}")
        return model


def create_app() -> FastAPI:
    app = FastAPI(
        title="triplediff",
        description="Triple-based model differencing and change analysis",
        version="0.1.0",
    )
    store = ModelStore()
    app.state.store = store

    @app.get("/health", response_model=schemas.MessageResponse)
    def health():
        return schemas.MessageResponse(detail="ok")

    @app.get("/graphs", response_model=list[schemas.GraphInfo])
    def list_graphs():
        with store._lock:
            items = sorted(store.graphs.items())
        return [schemas.GraphInfo(name=name, statements=len(g)) for name, g in items]

    @app.put("/graphs/{name}", response_model=schemas.GraphInfo)
    def put_graph(name: str, body: schemas.GraphUpload):
        try:
            graph = triples.parse_graph(body.content, label=name)
        except triples.ParseError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        store.put_graph(name, graph)
        return schemas.GraphInfo(name=name, statements=len(graph))

    @app.get("/graphs/{name}", response_model=schemas.GraphContent)
    def get_graph(name: str):
        graph = store.get_graph(name)
        return schemas.GraphContent(name=name, content=triples.serialize_graph(graph))

    @app.delete("/graphs/{name}", response_model=schemas.MessageResponse)
    def delete_graph(name: str):
        store.delete_graph(name)
        return schemas.MessageResponse(detail=f"deleted {name!r}")

    @app.post("/graphs/{name}/ingest-xml", response_model=schemas.IngestResponse)
    def ingest_xml(name: str, body: schemas.IngestXmlRequest):
        try:
            graph, report = ingest.ingest_xml(
                body.xml, id_attr=body.id_attr, ref_attr=body.ref_attr)
        except ingest.XmlSyntaxError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        except ingest.IngestError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        store.put_graph(name, graph)
        data = report.to_json_dict()
        return schemas.IngestResponse(
            graph=schemas.GraphInfo(name=name, statements=len(graph)),
            report=schemas.IngestReportModel(**data),
        )

    @app.get("/comparisons", response_model=list[schemas.ComparisonInfo])
    def list_comparisons():
        with store._lock:
            items = sorted(store.comparisons.items())
        return [
            schemas.ComparisonInfo(name=name, labels=list(c.labels), entries=len(c))
            for name, c in items
        ]

    @app.put("/comparisons/{name}", response_model=schemas.ComparisonInfo)
    def put_comparison(name: str, body: schemas.ComparisonRequest):
        inputs = []
        for item in body.inputs:
            inputs.append((item.label, store.get_graph(item.graph)))
        try:
            model = compare.build_comparison(inputs)
        except compare.ComparisonError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        store.put_comparison(name, model)
        return schemas.ComparisonInfo(
            name=name, labels=list(model.labels), entries=len(model))

    @app.get("/comparisons/{name}", response_model=schemas.ComparisonContent)
    def get_comparison(name: str):
        model = store.get_comparison(name)
        return schemas.ComparisonContent(
            name=name, content=compare.serialize_comparison(model))

    @app.get("/comparisons/{name}/reified", response_model=schemas.GraphContent)
    def get_reified(name: str):
        model = store.get_comparison(name)
        graph = compare.export_reified(model)
        return schemas.GraphContent(name=name,
                                    content=triples.serialize_graph(graph))

    @app.post("/comparisons/{name}/query", response_model=schemas.BindingsResponse)
    def run_query(name: str, body: schemas.QueryRequest):
        model = store.get_comparison(name)
        try:
            parsed = query.parse_query(body.query)
        except (query.QuerySyntaxError, query.QuerySemanticError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        try:
            table = query.evaluate(model, parsed)
        except compare.UnknownLabelError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return schemas.BindingsResponse(**table.to_json_dict())

    @app.post("/comparisons/{name}/analyze")
    def analyze(name: str, body: schemas.AnalyzeRequest):
        model = store.get_comparison(name)
        try:
            roles = catalog.RoleBinding(base=body.base, left=body.left,
                                        right=body.right)
            roles.validate(model)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        try:
            if body.row is None:
                report = catalog.run_catalog(model, roles)
                data = report.to_json_dict()
                return schemas.ReportResponse(
                    rows=[schemas.ReportRow(**r) for r in data["rows"]],
                    diagnostics=data["diagnostics"],
                )
            if not 1 <= body.row <= 21:
                raise HTTPException(status_code=422,
                                    detail=f"row must be 1..21, got {body.row}")
            columns, elements = catalog.row_elements(model, roles, body.row)
            return schemas.RowElementsResponse(
                row=body.row,
                description=catalog.ROW_DESCRIPTIONS[body.row],
                columns=list(columns),
                elements=[list(e) for e in elements],
            )
        except catalog.IntegrityError as exc:
            raise HTTPException(status_code=422, detail=str(exc))

    @app.post("/textdiff", response_model=schemas.TextDiffResponse)
    def text_diff(body: schemas.TextDiffRequest):
        if body.mode not in ("line", "word"):
            raise HTTPException(status_code=422,
                                detail=f"mode must be line or word, got {body.mode!r}")
        tokens_a = textdiff.tokenize(body.a, body.mode)
        tokens_b = textdiff.tokenize(body.b, body.mode)
        hunks = textdiff.diff_tokens(tokens_a, tokens_b)
        if body.mode == "word":
            rendered = textdiff.render_word_diff(body.a, body.b)
        else:
            rendered = textdiff.render_unified(hunks)
        return schemas.TextDiffResponse(
            rendered=rendered,
            hunks=[
                schemas.DiffHunkModel(op=h.op, tokens=list(h.tokens),
                                      a_start=h.a_start, b_start=h.b_start)
                for h in hunks
            ],
        )

    @app.post("/fixtures", response_model=schemas.FixtureResponse)
    def make_fixture(body: schemas.FixtureRequest):
        spec_model = body.spec or schemas.FixtureSpecModel(
            **fixtures.PAPER_SCALE.to_json_dict())
        spec = fixtures.FixtureSpec.from_json_dict(spec_model.model_dump())
        try:
            spec.validate()
            base, left, right, ledger = fixtures.generate_fixture(spec)
        except fixtures.FixtureError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        named = [
            (f"{body.prefix}-base", base),
            (f"{body.prefix}-left", left),
            (f"{body.prefix}-right", right),
        ]
        for name, graph in named:
            store.put_graph(name, graph)
        return schemas.FixtureResponse(
            graphs=[schemas.GraphInfo(name=name, statements=len(g))
                    for name, g in named],
            ledger=ledger.to_json_dict(),
        )

    return app


app = create_app()
