"""Personability analysis: can an examiner's requests be served by
specializing a given representation?

An examiner model is an independent set of interaction requests.  A
selection names choice values; a restructuring asks for a different question
order.  Each request classifies as realizable by partial evaluation, only by
complete evaluation (rebuilding the whole space), or not at all.  The
fraction realized by partial evaluation is the representation's
personability for that model.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import (
    AmbiguousTokenError,
    InconsistentAssignmentError,
    ParseError,
    SitefoldError,
    UnknownVariableError,
)
from .ir import (
    Assignment,
    Call,
    Cond,
    InteractionProgram,
    Node,
    Seq,
    Switch,
    Terminal,
    Var,
    close_assignment,
    guard_vars,
)
from .specialize import optimize_residual, partial_evaluate

SELECTION = "selection"
RESTRUCTURE = "restructure"

PARTIAL_EVAL = "partial"
COMPLETE_EVAL = "complete"
UNREALIZABLE = "unrealizable"

WELL_FACTORED = "well-factored"
OVER_FACTORED = "over-factored"
UNDER_FACTORED = "under-factored"
MIXED = "mixed"


@dataclass(frozen=True)
class ExaminerRequest:
    kind: str
    tokens: tuple[str, ...] = ()
    level: Optional[int] = None
    category: Optional[str] = None
    out_of_model: bool = False
    note: Optional[str] = None

    def __post_init__(self) -> None:
        if self.kind == SELECTION:
            if not self.tokens:
                raise ParseError("selection request needs at least one token")
        elif self.kind == RESTRUCTURE:
            if self.level is None or self.level < 1:
                raise ParseError("restructure request needs a level index >= 1")
            if not self.category:
                raise ParseError("restructure request needs a category")
        else:
            raise ParseError(f"unknown request kind {self.kind!r}")

    def describe(self) -> str:
        if self.kind == SELECTION:
            return "select " + ", ".join(self.tokens)
        return f"level {self.level} should ask about {self.category}"


@dataclass(frozen=True)
class ExaminerModel:
    requests: tuple[ExaminerRequest, ...]

    def __post_init__(self) -> None:
        if not self.requests:
            raise ParseError("examiner model must contain at least one request")


def load_examiner_model(data: bytes | str) -> ExaminerModel:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    if isinstance(doc, dict):
        doc = doc.get("requests", [])
    requests = []
    for raw in doc:
        requests.append(
            ExaminerRequest(
                kind=raw.get("kind", SELECTION),
                tokens=tuple(raw.get("tokens", ())),
                level=raw.get("level"),
                category=raw.get("category"),
                out_of_model=bool(raw.get("out_of_model", False)),
                note=raw.get("note"),
            )
        )
    return ExaminerModel(tuple(requests))


def examiner_model_to_json(model: ExaminerModel) -> list[dict]:
    out = []
    for request in model.requests:
        doc: dict = {"kind": request.kind}
        if request.kind == SELECTION:
            doc["tokens"] = list(request.tokens)
        else:
            doc["level"] = request.level
            doc["category"] = request.category
        if request.out_of_model:
            doc["out_of_model"] = True
        if request.note:
            doc["note"] = request.note
        out.append(doc)
    return out


# --------------------------------------------------------------------------
# Resolution


@dataclass(frozen=True)
class Resolution:
    """Outcome of matching request tokens against a program."""

    bindings: Optional[Assignment]
    matched: frozenset[Var] = frozenset()
    via_table: bool = False
    unmatched: tuple[str, ...] = ()

    @property
    def resolved(self) -> bool:
        return self.bindings is not None or self.via_table


def _table_values(program: InteractionProgram) -> set[str]:
    """String values appearing in the program's terminal records.

    A generator-style representation keeps its choice structure as data (a
    structure table); tokens can only be connected to it by rebuilding the
    space, which is what classifies such requests as complete evaluations.
    """
    values: set[str] = set()

    def walk(node: Node) -> None:
        if isinstance(node, Terminal):
            for record in node.content.record_dicts:
                for value in record.values():
                    if value is not None:
                        values.add(str(value))
        elif isinstance(node, Seq):
            for child in node.children:
                walk(child)
        elif isinstance(node, Cond):
            for entry in node.chain:
                walk(entry.body)
            if node.fallback is not None:
                walk(node.fallback)
        elif isinstance(node, Switch):
            for case in node.cases:
                walk(case.body)

    walk(program.root)
    return values


def resolve_request(
    request: ExaminerRequest, program: InteractionProgram
) -> Resolution:
    """Match a request's tokens to program variables.

    Selections match directly against the vocabulary (qualified tokens pin
    the category).  Tokens that only appear inside terminal records resolve
    through the structure table: realizing them means fixing every program
    parameter, so the matched set becomes the whole vocabulary.  A
    restructuring request resolves through its "level<k>=<category>"
    variable when the program declares one.
    """
    vocabulary = program.vocabulary
    if request.kind == RESTRUCTURE:
        token = f"level{request.level}={request.category}"
        var = vocabulary.match_token(token)
        if var is None:
            return Resolution(bindings=None, unmatched=(token,))
        return Resolution(bindings=Assignment.of({var: True}), matched=frozenset({var}))

    values: dict[Var, bool] = {}
    leftovers: list[str] = []
    for token in request.tokens:
        var = vocabulary.match_token(token)
        if var is None:
            leftovers.append(token)
        else:
            values[var] = True
    if not leftovers:
        return Resolution(
            bindings=Assignment.of(values), matched=frozenset(values)
        )
    table = _table_values(program)

    def in_table(token: str) -> bool:
        if token in table:
            return True
        if "=" in token:
            return token.partition("=")[2] in table
        return False

    if all(in_table(t) for t in leftovers):
        return Resolution(
            bindings=None,
            matched=frozenset(vocabulary.variables),
            via_table=True,
        )
    return Resolution(
        bindings=None,
        unmatched=tuple(t for t in leftovers if not in_table(t)),
    )


# --------------------------------------------------------------------------
# Classification


def _has_content(node: Node) -> bool:
    if isinstance(node, (Terminal, Call)):
        return True
    if isinstance(node, Seq):
        return any(_has_content(c) for c in node.children)
    if isinstance(node, Cond):
        if any(_has_content(e.body) for e in node.chain):
            return True
        return node.fallback is not None and _has_content(node.fallback)
    if isinstance(node, Switch):
        return any(_has_content(c.body) for c in node.cases)
    return False


def _level_categories(node: Node, depth: int) -> set[Optional[str]]:
    """Categories of the choice constructs found at a given choice depth."""
    out: set[Optional[str]] = set()

    def walk(n: Node, level: int) -> None:
        if isinstance(n, Seq):
            for child in n.children:
                walk(child, level)
        elif isinstance(n, Cond):
            if level == depth:
                for entry in n.chain:
                    out.update(g.category for g in entry.guards)
            else:
                for entry in n.chain:
                    walk(entry.body, level + 1)
                if n.fallback is not None:
                    walk(n.fallback, level + 1)
        elif isinstance(n, Switch):
            if level == depth:
                out.add(n.category)
            else:
                for case in n.cases:
                    walk(case.body, level + 1)

    walk(node, 1)
    return out


def classify_request(request: ExaminerRequest, program: InteractionProgram) -> str:
    """Classify one request; total (errors become unrealizable)."""
    try:
        resolution = resolve_request(request, program)
    except AmbiguousTokenError:
        return UNREALIZABLE
    if not resolution.resolved:
        return UNREALIZABLE
    if resolution.matched == program.vocabulary.variables and program.vocabulary.variables:
        return COMPLETE_EVAL
    try:
        residual = optimize_residual(partial_evaluate(program, resolution.bindings))
    except (InconsistentAssignmentError, UnknownVariableError):
        return UNREALIZABLE
    if not _has_content(residual.root):
        return UNREALIZABLE
    if request.kind == SELECTION:
        leftover = guard_vars(residual.root, residual.function_table) & set(
            resolution.matched
        )
        if leftover:
            return UNREALIZABLE
        return PARTIAL_EVAL
    # Restructuring: satisfied when the level parameter is now decided, or
    # the residual's choice group at that level already asks the category.
    wanted = Var(request.category, f"level{request.level}")
    if residual.decided.get(wanted) is True:
        return PARTIAL_EVAL
    cats = _level_categories(residual.root, request.level)
    if cats == {request.category}:
        return PARTIAL_EVAL
    return UNREALIZABLE


@dataclass(frozen=True)
class PersonabilityReport:
    classes: tuple[tuple[ExaminerRequest, str], ...]
    personability: Fraction
    verdict: str
    counts: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "requests": [
                {
                    "request": request.describe(),
                    "kind": request.kind,
                    "class": cls,
                    **({"out_of_model": True} if request.out_of_model else {}),
                }
                for request, cls in self.classes
            ],
            "personability": {
                "numerator": self.counts.get(PARTIAL_EVAL, 0),
                "denominator": len(self.classes),
                "fraction": float(self.personability),
            },
            "counts": self.counts,
            "verdict": self.verdict,
        }

    def summary_line(self) -> str:
        partial = self.counts.get(PARTIAL_EVAL, 0)
        return f"personability {partial}/{len(self.classes)}"

    def format_table(self) -> str:
        width = max(len(r.describe()) for r, _ in self.classes)
        lines = [f"{'request'.ljust(width)}  class"]
        lines.append(f"{'-' * width}  {'-' * 12}")
        for request, cls in self.classes:
            flag = "  [out of model]" if request.out_of_model else ""
            lines.append(f"{request.describe().ljust(width)}  {cls}{flag}")
        lines.append("")
        lines.append(self.summary_line())
        lines.append(f"verdict: {self.verdict}")
        return "\n".join(lines)


def evaluate_model(
    model: ExaminerModel, program: InteractionProgram
) -> PersonabilityReport:
    """Classify every request and summarize factoring quality."""
    classes = tuple(
        (request, classify_request(request, program)) for request in model.requests
    )
    counts: dict[str, int] = {PARTIAL_EVAL: 0, COMPLETE_EVAL: 0, UNREALIZABLE: 0}
    for _, cls in classes:
        counts[cls] += 1
    total = len(classes)
    if counts[PARTIAL_EVAL] == total:
        verdict = WELL_FACTORED
    elif counts[COMPLETE_EVAL] == total:
        verdict = OVER_FACTORED
    elif counts[UNREALIZABLE] == total:
        verdict = UNDER_FACTORED
    else:
        verdict = MIXED
    return PersonabilityReport(
        classes=classes,
        personability=Fraction(counts[PARTIAL_EVAL], total),
        verdict=verdict,
        counts=counts,
    )
