"""Session-based HTTP service for mixed-initiative browsing.

A session holds a base program and a history of steps; its current residual
is always what replaying the history against the base produces.  In-turn
navigation (following a displayed choice) and out-of-turn free-text input
both funnel into the same incremental specialization, so they interleave
freely.  Undo is replay: reset truncates the history and rebuilds.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .errors import (
    AmbiguousTokenError,
    InconsistentAssignmentError,
    SitefoldError,
)
from .ir import (
    Assignment,
    InteractionProgram,
    Var,
    canonical_serialize,
    close_assignment,
    program_to_json,
    programs_equal,
)
from .render import CombiningFunction, render, tree_to_json
from .specialize import partial_evaluate
from . import __version__


@dataclass
class Step:
    """One mutation: either free-text tokens or a followed choice label."""

    kind: str  # "input" | "follow"
    tokens: tuple[str, ...] = ()
    label: Optional[str] = None
    direct: tuple[str, ...] = ()  # variable keys the user named explicitly
    added: tuple[tuple[str, bool], ...] = ()  # closed bindings of this step


@dataclass
class Session:
    id: str
    base: InteractionProgram
    residual: InteractionProgram
    history: list[Step] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)


class TokenInput(BaseModel):
    tokens: list[str]


class FollowInput(BaseModel):
    label: str


class ResetInput(BaseModel):
    to_step: int


def _resolve_tokens(
    program: InteractionProgram, tokens: list[str]
) -> tuple[Assignment, list[str]]:
    """Map tokens to bindings over the residual's vocabulary."""
    values: dict[Var, bool] = {}
    direct: list[str] = []
    for token in tokens:
        var = program.vocabulary.match_token(token)
        if var is None:
            raise LookupError(token)
        values[var] = True
        direct.append(var.key)
    return Assignment.of(values), direct


def _follow_bindings(
    program: InteractionProgram, label: str
) -> Optional[tuple[Assignment, list[str]]]:
    tree = render(program)
    for choice in tree.root.choices:
        if choice.label == label and choice.bindings:
            values = {var: val for var, val in choice.bindings}
            return Assignment.of(values), [v.key for v in values]
    return None


def create_app(
    program: InteractionProgram,
    *,
    cors_origin: Optional[str] = None,
    check_replay: bool = False,
) -> FastAPI:
    app = FastAPI(title="sitefold service", version=__version__)
    if cors_origin:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=[cors_origin] if cors_origin != "*" else ["*"],
            allow_methods=["*"],
            allow_headers=["*"],
        )
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()

    def error(status: int, payload: dict) -> JSONResponse:
        return JSONResponse(status_code=status, content=payload)

    def get_session(session_id: str) -> Optional[Session]:
        with registry_lock:
            return sessions.get(session_id)

    def replay(base: InteractionProgram, history: list[Step]) -> InteractionProgram:
        current = base
        for step in history:
            if step.kind == "input":
                bindings, _ = _resolve_tokens(current, list(step.tokens))
            else:
                found = _follow_bindings(current, step.label or "")
                if found is None:
                    raise SitefoldError(f"cannot replay follow {step.label!r}")
                bindings, _ = found
            current = partial_evaluate(current, bindings)
        return current

    def page_payload(session: Session) -> dict:
        tree = render(session.residual)
        decided_steps: dict[str, tuple[int, bool]] = {}
        for index, step in enumerate(session.history):
            for key, _value in step.added:
                if key not in decided_steps:
                    decided_steps[key] = (index, key not in step.direct)
        breadcrumb = []
        for var, value in session.residual.decided:
            step_index, inferred = decided_steps.get(var.key, (None, True))
            breadcrumb.append(
                {
                    "variable": var.key,
                    "value": value,
                    "step": step_index,
                    "inferred": inferred,
                }
            )
        bound = {v for v, _ in session.residual.decided}
        residual_vars = sorted(
            v.key for v in session.residual.vocabulary.variables if v not in bound
        )
        return {
            "session": session.id,
            "steps": len(session.history),
            "choices": [
                {"label": c.label, "widget": c.widget}
                for c in tree.root.choices
            ],
            "content": [
                {
                    **({"text": c.text} if c.text is not None else {}),
                    **({"link": c.link} if c.link is not None else {}),
                    **(
                        {"records": c.record_dicts}
                        if c.records is not None
                        else {}
                    ),
                }
                for c in tree.root.content
            ],
            "summary": [
                {
                    **({"text": c.text} if c.text is not None else {}),
                    **({"link": c.link} if c.link is not None else {}),
                }
                for c in tree.root.summary
            ],
            "breadcrumb": breadcrumb,
            "residual_variables": residual_vars,
            "tree": tree_to_json(tree),
        }

    def apply_step(session: Session, step: Step, bindings: Assignment):
        closed = close_assignment(bindings, session.residual.vocabulary)
        session.residual = partial_evaluate(session.residual, bindings)
        step.added = tuple((v.key, val) for v, val in closed)
        session.history.append(step)
        if check_replay:
            replayed = replay(session.base, session.history)
            if not programs_equal(replayed, session.residual):
                raise SitefoldError("session replay diverged from residual")

    @app.post("/sessions")
    def create_session() -> dict:
        session = Session(
            id=uuid.uuid4().hex[:12], base=program, residual=program
        )
        with registry_lock:
            sessions[session.id] = session
        return {"id": session.id}

    @app.get("/sessions/{session_id}/page")
    def get_page(session_id: str):
        session = get_session(session_id)
        if session is None:
            return error(404, {"error": "unknown_session", "session": session_id})
        with session.lock:
            return page_payload(session)

    @app.post("/sessions/{session_id}/input")
    def post_input(session_id: str, body: TokenInput):
        session = get_session(session_id)
        if session is None:
            return error(404, {"error": "unknown_session", "session": session_id})
        with session.lock:
            try:
                bindings, direct = _resolve_tokens(session.residual, body.tokens)
            except AmbiguousTokenError as exc:
                return error(
                    409,
                    {
                        "error": "ambiguous",
                        "token": exc.token,
                        "candidates": exc.candidates,
                    },
                )
            except LookupError as exc:
                return error(
                    422, {"error": "unknown_token", "token": str(exc.args[0])}
                )
            try:
                apply_step(
                    session,
                    Step(kind="input", tokens=tuple(body.tokens), direct=tuple(direct)),
                    bindings,
                )
            except InconsistentAssignmentError as exc:
                return error(
                    409, {"error": "conflict", "conflicts": exc.conflicts}
                )
            return page_payload(session)

    @app.post("/sessions/{session_id}/follow")
    def post_follow(session_id: str, body: FollowInput):
        session = get_session(session_id)
        if session is None:
            return error(404, {"error": "unknown_session", "session": session_id})
        with session.lock:
            found = _follow_bindings(session.residual, body.label)
            if found is None:
                return error(
                    422, {"error": "unknown_choice", "label": body.label}
                )
            bindings, direct = found
            try:
                apply_step(
                    session,
                    Step(kind="follow", label=body.label, direct=tuple(direct)),
                    bindings,
                )
            except InconsistentAssignmentError as exc:
                return error(
                    409, {"error": "conflict", "conflicts": exc.conflicts}
                )
            return page_payload(session)

    @app.post("/sessions/{session_id}/reset")
    def post_reset(session_id: str, body: ResetInput):
        session = get_session(session_id)
        if session is None:
            return error(404, {"error": "unknown_session", "session": session_id})
        with session.lock:
            if body.to_step < 0 or body.to_step > len(session.history):
                return error(
                    422,
                    {
                        "error": "invalid_step",
                        "steps": len(session.history),
                        "to_step": body.to_step,
                    },
                )
            kept = session.history[: body.to_step]
            session.residual = replay(session.base, kept)
            session.history = kept
            return page_payload(session)

    @app.get("/sessions/{session_id}/program")
    def get_program(session_id: str):
        session = get_session(session_id)
        if session is None:
            return error(404, {"error": "unknown_session", "session": session_id})
        with session.lock:
            return {
                "program": program_to_json(session.residual),
                "canonical": canonical_serialize(session.residual).decode("utf-8"),
            }

    return app
