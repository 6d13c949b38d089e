"""Re-render a (residual) interaction program as a browsable page tree.

A page gathers everything reachable without crossing a choice: terminal
content plus the choice constructs at that level.  Following a choice is the
same as binding its guard variables true; the chain's else position appears
as an "(otherwise)" choice that binds every chain guard false.  Pages whose
subtree can never show content are dropped so the personalized site has no
dead ends.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import SitefoldError
from .ir import (
    Assignment,
    Call,
    Cond,
    ContentPayload,
    FORMFIELD,
    InteractionProgram,
    LINK,
    LISTBOX,
    Node,
    Seq,
    Switch,
    Terminal,
    Var,
)
from .specialize import OTHERWISE_STEP, external_call_content, optimize_residual

ACCUMULATE = "accumulate"
MOST_RECENT = "recent"


@dataclass(frozen=True)
class CombiningFunction:
    """How content along an interaction path combines into a page summary."""

    mode: str = ACCUMULATE
    k: int = 1

    def __post_init__(self) -> None:
        if self.mode not in (ACCUMULATE, MOST_RECENT):
            raise SitefoldError(f"unknown combining mode {self.mode!r}")
        if self.mode == MOST_RECENT and self.k < 1:
            raise SitefoldError("most-recent combining needs k >= 1")

    @classmethod
    def parse(cls, text: str) -> "CombiningFunction":
        if text == ACCUMULATE:
            return cls(ACCUMULATE)
        if text.startswith(f"{MOST_RECENT}:"):
            return cls(MOST_RECENT, int(text.split(":", 1)[1]))
        if text == MOST_RECENT:
            return cls(MOST_RECENT, 1)
        raise SitefoldError(f"unknown combining function {text!r}")


@dataclass(frozen=True)
class Choice:
    label: str
    widget: str
    bindings: tuple[tuple[Var, bool], ...]
    target: Optional["Page"]


@dataclass(frozen=True)
class Page:
    path_labels: tuple[str, ...]
    content: tuple[ContentPayload, ...]
    summary: tuple[ContentPayload, ...]
    choices: tuple[Choice, ...] = ()


@dataclass(frozen=True)
class PageTree:
    root: Page
    breadcrumb: Assignment


def render(
    program: InteractionProgram,
    combine: CombiningFunction = CombiningFunction(),
    *,
    single_page: bool = False,
) -> PageTree:
    """Optimize, then map each structural level of the residual to a page."""
    program = optimize_residual(program)
    hints = program.hint_table
    table = program.function_table

    def level(
        node: Node, construct_path: tuple[str, ...]
    ) -> tuple[list[ContentPayload], list[tuple[str, str, tuple, Node, tuple[str, ...]]]]:
        """Split a level into its own content and its outgoing choices."""
        content: list[ContentPayload] = []
        choices: list[tuple[str, str, tuple, Node, tuple[str, ...]]] = []
        if isinstance(node, Terminal):
            content.append(node.content)
        elif isinstance(node, Call):
            fn = table[node.function]
            if fn.body is None:
                content.append(external_call_content(node.function))
            else:
                label = node.function + "(" + ", ".join(p.key for p in fn.params) + ")"
                choices.append((label, FORMFIELD, (), None, construct_path))
        elif isinstance(node, Seq):
            for i, child in enumerate(node.children):
                sub_content, sub_choices = level(child, construct_path + (f"#{i}",))
                content.extend(sub_content)
                choices.extend(sub_choices)
        elif isinstance(node, Cond):
            default = hints.get("/".join(construct_path), LINK)
            for entry in node.chain:
                bindings = tuple((g, True) for g in entry.guards)
                choices.append(
                    (
                        entry.label,
                        default,
                        bindings,
                        entry.body,
                        construct_path + (entry.label,),
                    )
                )
            if node.fallback is not None:
                bindings = tuple(
                    (g, False) for e in node.chain for g in e.guards
                )
                choices.append(
                    (
                        OTHERWISE_STEP,
                        LINK,
                        bindings,
                        node.fallback,
                        construct_path + (OTHERWISE_STEP,),
                    )
                )
        elif isinstance(node, Switch):
            default = hints.get("/".join(construct_path), LISTBOX)
            for case in node.cases:
                choices.append(
                    (
                        case.guard.key,
                        default,
                        ((case.guard, True),),
                        case.body,
                        construct_path + (case.guard.key,),
                    )
                )
        return content, choices

    def summarize(steps: list[list[ContentPayload]]) -> tuple[ContentPayload, ...]:
        if combine.mode == ACCUMULATE:
            picked = steps
        else:
            picked = steps[-combine.k :]
        return tuple(c for step in picked for c in step)

    def page_for(
        node: Node,
        labels: tuple[str, ...],
        construct_path: tuple[str, ...],
        steps: list[list[ContentPayload]],
    ) -> Optional[Page]:
        content, raw_choices = level(node, construct_path)
        here = steps + [content]
        choices: list[Choice] = []
        for label, widget, bindings, body, body_path in raw_choices:
            if body is None:
                choices.append(Choice(label, widget, bindings, None))
                continue
            target = page_for(body, labels + (label,), body_path, here)
            if target is None:
                continue  # dead end: nothing to show below this choice
            # A hop showing nothing but a single onward choice folds into
            # this choice: one link, all bindings combined.
            while (
                target is not None
                and not target.content
                and len(target.choices) == 1
                and target.choices[0].target is not None
            ):
                inner = target.choices[0]
                label = f"{label} {inner.label}"
                bindings = bindings + inner.bindings
                widget = LINK
                target = inner.target
            choices.append(Choice(label, widget, bindings, target))
        if not content and not choices and labels:
            return None
        return Page(
            path_labels=labels,
            content=tuple(content),
            summary=summarize(here),
            choices=tuple(choices),
        )

    if single_page:
        return PageTree(root=_single_page(program, table), breadcrumb=program.decided)
    root = page_for(program.root, (), (), [])
    if root is None:
        root = Page(path_labels=(), content=(), summary=(), choices=())
    return PageTree(root=root, breadcrumb=program.decided)


def _single_page(program: InteractionProgram, table) -> Page:
    """Cascade every interaction into one page: each complete guard path
    becomes a direct link to its leaf content."""
    entries: list[tuple[tuple[str, ...], list[ContentPayload]]] = []

    def walk(node: Node, labels: tuple[str, ...], bucket: list[ContentPayload]) -> None:
        if isinstance(node, Terminal):
            bucket.append(node.content)
        elif isinstance(node, Call):
            fn = table[node.function]
            if fn.body is None:
                bucket.append(external_call_content(node.function))
        elif isinstance(node, Seq):
            for child in node.children:
                walk(child, labels, bucket)
        elif isinstance(node, Cond):
            for entry in node.chain:
                sub: list[ContentPayload] = []
                walk(entry.body, labels + (entry.label,), sub)
                entries.append((labels + (entry.label,), sub))
            if node.fallback is not None:
                sub = []
                walk(node.fallback, labels + (OTHERWISE_STEP,), sub)
                entries.append((labels + (OTHERWISE_STEP,), sub))
        elif isinstance(node, Switch):
            for case in node.cases:
                sub = []
                walk(case.body, labels + (case.guard.key,), sub)
                entries.append((labels + (case.guard.key,), sub))

    top: list[ContentPayload] = []
    walk(program.root, (), top)
    choices = []
    for labels, bucket in entries:
        if not bucket:
            continue
        label = " ".join(labels)
        target = Page(
            path_labels=labels,
            content=tuple(bucket),
            summary=tuple(top + bucket),
            choices=(),
        )
        choices.append(Choice(label, LINK, (), target))
    return Page(path_labels=(), content=tuple(top), summary=tuple(top), choices=tuple(choices))


# --------------------------------------------------------------------------
# Serialization of page trees


def _payload_json(payload: ContentPayload) -> dict:
    doc: dict = {}
    if payload.text is not None:
        doc["text"] = payload.text
    if payload.records is not None:
        doc["records"] = [dict(r) for r in payload.records]
    if payload.link is not None:
        doc["link"] = payload.link
    return doc


def page_to_json(page: Page) -> dict:
    return {
        "path": list(page.path_labels),
        "content": [_payload_json(c) for c in page.content],
        "summary": [_payload_json(c) for c in page.summary],
        "choices": [
            {
                "label": c.label,
                "widget": c.widget,
                "bindings": [
                    {"variable": v.key, "value": val} for v, val in c.bindings
                ],
                "target": None if c.target is None else page_to_json(c.target),
            }
            for c in page.choices
        ],
    }


def tree_to_json(tree: PageTree) -> dict:
    return {
        "breadcrumb": [
            {"variable": v.key, "value": val} for v, val in tree.breadcrumb
        ],
        "root": page_to_json(tree.root),
    }


def tree_dump(tree: PageTree) -> bytes:
    text = json.dumps(tree_to_json(tree), sort_keys=True, ensure_ascii=False, indent=1)
    return (text + "\n").encode("utf-8")


# --------------------------------------------------------------------------
# Emission as hypertext files


def _slug(text: str) -> str:
    out = re.sub(r"[^a-z0-9]+", "-", text.lower()).strip("-")
    return out or "page"


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")
    )


def emit_site(tree: PageTree, out: Path | str) -> list[Path]:
    """Write one hypertext document per page plus a machine-readable dump.

    Filenames derive from path labels, so re-emitting an unchanged tree
    produces byte-identical files.
    """
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    names: dict[int, str] = {}
    used: set[str] = set()

    def assign(page: Page) -> None:
        base = "index" if not page.path_labels else _slug("-".join(page.path_labels))
        name = base
        n = 1
        while name in used:
            n += 1
            name = f"{base}-{n}"
        used.add(name)
        names[id(page)] = f"{name}.html"
        for choice in page.choices:
            if choice.target is not None:
                assign(choice.target)

    assign(tree.root)
    breadcrumb = " &gt; ".join(
        f"{_escape(v.key)}={'on' if val else 'off'}" for v, val in tree.breadcrumb
    )
    written: list[Path] = []

    def emit(page: Page) -> None:
        title = " / ".join(page.path_labels) or "Start"
        lines = [
            "<!doctype html>",
            "<html><head><meta charset=\"utf-8\">",
            f"<title>{_escape(title)}</title></head>",
            "<body>",
            f"<nav class=\"breadcrumb\">{breadcrumb or 'no bindings yet'}</nav>",
            f"<h1>{_escape(title)}</h1>",
        ]
        if page.content:
            lines.append("<section class=\"content\">")
            for item in page.content:
                if item.text is not None:
                    lines.append(f"<p>{_escape(item.text)}</p>")
                if item.link is not None:
                    href = _escape(item.link)
                    lines.append(f"<p><a href=\"{href}\">{href}</a></p>")
                for record in item.record_dicts:
                    cells = ", ".join(
                        f"{_escape(k)}: {_escape(str(v))}"
                        for k, v in record.items()
                        if v is not None
                    )
                    lines.append(f"<p class=\"record\">{cells}</p>")
            lines.append("</section>")
        if page.choices:
            lines.append("<ul class=\"choices\">")
            for choice in page.choices:
                anchor = _escape(f"choice:{choice.label}")
                label = _escape(choice.label)
                if choice.target is None:
                    lines.append(
                        f"<li id=\"{anchor}\" class=\"{choice.widget}\">{label}</li>"
                    )
                else:
                    href = names[id(choice.target)]
                    lines.append(
                        f"<li class=\"{choice.widget}\">"
                        f"<a id=\"{anchor}\" href=\"{href}\">{label}</a></li>"
                    )
            lines.append("</ul>")
        lines.append("</body></html>")
        path = out_dir / names[id(page)]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        written.append(path)
        for choice in page.choices:
            if choice.target is not None:
                emit(choice.target)

    emit(tree.root)
    dump = out_dir / "tree.json"
    dump.write_bytes(tree_dump(tree))
    written.append(dump)
    return written
