"""Site schemas: labeled graphs of pages, and their path into programs.

A schema is what a crawl or a site-management export yields: nodes with
optional terminal content and record lists, edges labeled with choice
variables.  This module validates schemas, compiles them into interaction
programs by depth-first walk, expands within-page record structure into
navigable facet levels, compacts redundant structure, models clickable maps,
and cascades programs across sites through a cross-reference map.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional, Sequence

from .errors import (
    CrossReferenceError,
    ParseError,
    RegionError,
    SchemaError,
    UnknownVariableError,
)
from .ir import (
    Assignment,
    Cond,
    CondEntry,
    ContentPayload,
    InteractionProgram,
    LISTBOX,
    Node,
    Seq,
    Switch,
    SwitchCase,
    Terminal,
    Var,
    Vocabulary,
    WIDGET_HINTS,
    called_functions,
    close_assignment,
    guard_vars,
    normalize,
)
from .specialize import partial_evaluate

RecordMap = tuple[tuple[str, Optional[str]], ...]


def _freeze_record(record: Mapping[str, Optional[str]]) -> RecordMap:
    return tuple(sorted(record.items()))


@dataclass(frozen=True)
class SchemaNode:
    id: str
    terminal: Optional[ContentPayload] = None
    records: Optional[tuple[RecordMap, ...]] = None
    designation: Optional[str] = None

    @property
    def record_dicts(self) -> list[dict[str, Optional[str]]]:
        return [dict(r) for r in (self.records or ())]


@dataclass(frozen=True)
class SchemaEdge:
    src: str
    dst: str
    label: Var
    widget: Optional[str] = None


@dataclass(frozen=True)
class SiteSchema:
    """Directed labeled acyclic graph with a root; edge order is file order."""

    root: str
    nodes: tuple[SchemaNode, ...]
    edges: tuple[SchemaEdge, ...]
    dichotomies: tuple[frozenset[Var], ...] = ()
    taxonomy: tuple[tuple[Var, frozenset[Var]], ...] = ()

    @property
    def node_map(self) -> dict[str, SchemaNode]:
        return {n.id: n for n in self.nodes}

    def out_edges(self, node_id: str) -> list[SchemaEdge]:
        return [e for e in self.edges if e.src == node_id]

    def in_edges(self, node_id: str) -> list[SchemaEdge]:
        return [e for e in self.edges if e.dst == node_id]

    def leaves(self) -> list[SchemaNode]:
        with_out = {e.src for e in self.edges}
        return [n for n in self.nodes if n.id not in with_out]

    def validate(self) -> None:
        ids = [n.id for n in self.nodes]
        id_set = set(ids)
        if len(ids) != len(id_set):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise SchemaError(f"duplicate node ids: {', '.join(dupes)}")
        if self.root not in id_set:
            raise SchemaError(f"root {self.root!r} is not a node")
        adjacency: dict[str, list[SchemaEdge]] = {i: [] for i in ids}
        for edge in self.edges:
            if edge.src not in id_set or edge.dst not in id_set:
                raise SchemaError(
                    f"dangling edge {edge.src!r} -> {edge.dst!r} ({edge.label.key})"
                )
            adjacency[edge.src].append(edge)
            if edge.widget is not None and edge.widget not in WIDGET_HINTS:
                raise SchemaError(f"unknown widget {edge.widget!r}")
        for node_id, out in adjacency.items():
            labels = [e.label.key for e in out]
            if len(labels) != len(set(labels)):
                raise SchemaError(f"duplicate sibling label out of {node_id!r}")
        # Cycle check (iterative DFS with colors) and reachability.
        state: dict[str, int] = {}
        stack = [(self.root, iter(adjacency[self.root]))]
        state[self.root] = 1
        while stack:
            node_id, edges_iter = stack[-1]
            advanced = False
            for edge in edges_iter:
                dst = edge.dst
                mark = state.get(dst)
                if mark == 1:
                    raise SchemaError(f"cycle through {dst!r}")
                if mark is None:
                    state[dst] = 1
                    stack.append((dst, iter(adjacency[dst])))
                    advanced = True
                    break
            if not advanced:
                state[node_id] = 2
                stack.pop()
        unreachable = sorted(id_set - set(state))
        if unreachable:
            raise SchemaError(f"unreachable nodes: {', '.join(unreachable)}")

    def label_vocabulary(self) -> Vocabulary:
        return Vocabulary.build(
            {e.label for e in self.edges}, self.dichotomies, dict(self.taxonomy)
        )


# --------------------------------------------------------------------------
# File format


def _payload_from_json(doc: object) -> ContentPayload:
    if not isinstance(doc, dict):
        raise ParseError("terminal must be an object")
    return ContentPayload.of(
        text=doc.get("text"), records=doc.get("records"), link=doc.get("link")
    )


def _payload_to_json(payload: ContentPayload) -> dict:
    doc: dict = {}
    if payload.text is not None:
        doc["text"] = payload.text
    if payload.records is not None:
        doc["records"] = [dict(r) for r in payload.records]
    if payload.link is not None:
        doc["link"] = payload.link
    return doc


def schema_from_json(doc: object) -> SiteSchema:
    if not isinstance(doc, dict):
        raise ParseError("schema document must be an object")
    nodes = []
    for raw in doc.get("nodes", []):
        if not isinstance(raw, dict) or "id" not in raw:
            raise ParseError("schema node must be an object with an 'id'")
        terminal = raw.get("terminal")
        records = raw.get("records")
        nodes.append(
            SchemaNode(
                id=raw["id"],
                terminal=None if terminal is None else _payload_from_json(terminal),
                records=None
                if records is None
                else tuple(_freeze_record(r) for r in records),
                designation=raw.get("designation"),
            )
        )
    edges = []
    for raw in doc.get("edges", []):
        if not isinstance(raw, dict):
            raise ParseError("schema edge must be an object")
        label = Var(name=raw["label"], category=raw.get("category"))
        edges.append(
            SchemaEdge(
                src=raw["from"], dst=raw["to"], label=label, widget=raw.get("widget")
            )
        )
    label_vars = {e.label for e in edges}
    temp = Vocabulary.build(label_vars)

    def resolve(key: str) -> Var:
        var = temp.match_token(key)
        if var is None:
            raise SchemaError(f"declaration references unknown label {key!r}")
        return var

    dichotomies = [
        frozenset(resolve(k) for k in group) for group in doc.get("dichotomies", [])
    ]
    taxonomy: dict[Var, set[Var]] = {}
    for entry in doc.get("taxonomy", []):
        parent = resolve(entry["parent"])
        taxonomy.setdefault(parent, set()).update(
            resolve(c) for c in entry["children"]
        )
    schema = SiteSchema(
        root=doc.get("root", ""),
        nodes=tuple(nodes),
        edges=tuple(edges),
        dichotomies=tuple(dichotomies),
        taxonomy=tuple((p, frozenset(c)) for p, c in sorted(taxonomy.items())),
    )
    schema.validate()
    return schema


def load_schema(data: bytes | str) -> SiteSchema:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    if not data.strip():
        raise ParseError("empty schema text", line=1, column=1)
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    return schema_from_json(doc)


def schema_to_json(schema: SiteSchema) -> dict:
    return {
        "root": schema.root,
        "nodes": [
            {
                "id": n.id,
                **(
                    {"terminal": _payload_to_json(n.terminal)}
                    if n.terminal is not None
                    else {}
                ),
                **(
                    {"records": [dict(r) for r in n.records]}
                    if n.records is not None
                    else {}
                ),
                **(
                    {"designation": n.designation}
                    if n.designation is not None
                    else {}
                ),
            }
            for n in schema.nodes
        ],
        "edges": [
            {
                "from": e.src,
                "to": e.dst,
                "label": e.label.name,
                **({"category": e.label.category} if e.label.category else {}),
                **({"widget": e.widget} if e.widget else {}),
            }
            for e in schema.edges
        ],
        "dichotomies": sorted(sorted(v.key for v in g) for g in schema.dichotomies),
        "taxonomy": [
            {"parent": p.key, "children": sorted(c.key for c in children)}
            for p, children in schema.taxonomy
        ],
    }


def dump_schema(schema: SiteSchema) -> bytes:
    text = json.dumps(
        schema_to_json(schema), sort_keys=True, ensure_ascii=False, indent=1
    )
    return (text + "\n").encode("utf-8")


# --------------------------------------------------------------------------
# Compilation into an interaction program


def build_program(schema: SiteSchema) -> InteractionProgram:
    """Depth-first translation of a schema into an interaction program.

    Each node's outgoing edges become a conditional chain, or a switch when
    every edge shares one category and a listbox widget.  Shared subgraphs
    are unfolded into a tree (the walk duplicates them per incoming path).
    """
    node_map = schema.node_map
    out_map: dict[str, list[SchemaEdge]] = {n.id: [] for n in schema.nodes}
    for edge in schema.edges:
        out_map[edge.src].append(edge)
    hints: dict[str, str] = {}

    def build(node_id: str, path: tuple[str, ...]) -> Node:
        node = node_map[node_id]
        parts: list[Node] = []
        if node.terminal is not None:
            parts.append(Terminal(node.terminal))
        if node.records is not None:
            parts.append(Terminal(ContentPayload.of(records=node.record_dicts)))
        out = out_map[node_id]
        if out:
            multi = len(parts) > 0
            construct_path = path + (f"#{len(parts)}",) if multi else path
            categories = {e.label.category for e in out}
            widgets = {e.widget for e in out}
            if (
                len(out) > 1
                and categories != {None}
                and len(categories) == 1
                and widgets == {LISTBOX}
            ):
                category = out[0].label.category
                cases = tuple(
                    SwitchCase(
                        e.label, build(e.dst, construct_path + (e.label.key,))
                    )
                    for e in out
                )
                hints["/".join(construct_path)] = LISTBOX
                parts.append(Switch(category, cases))
            else:
                chain = tuple(
                    CondEntry(
                        (e.label,), build(e.dst, construct_path + (e.label.key,))
                    )
                    for e in out
                )
                widget = out[0].widget
                if widget is not None and widgets == {widget} and widget != LISTBOX:
                    hints["/".join(construct_path)] = widget
                parts.append(Cond(chain, fallback=None))
        if len(parts) == 1:
            return parts[0]
        return Seq(tuple(parts))

    root = build(schema.root, ())
    return InteractionProgram.build(
        root=root,
        vocabulary=schema.label_vocabulary(),
        functions={},
        widget_hints=hints,
    )


# --------------------------------------------------------------------------
# Within-page expansion


def expand_node(schema: SiteSchema, node_id: str, by: Sequence[str]) -> SiteSchema:
    """Replace a node's records with a facet subtree branching on ``by``.

    One level of internal nodes per field, branching on the distinct values
    in lexicographic order; a record with a null value skips that level.  At
    the final level a value claimed by exactly one record becomes that
    record's leaf directly, so a one-item choice does not add a hop.  A
    record whose ``id`` names an existing child of the node re-homes that
    child; otherwise a fresh leaf is created carrying the record's remaining
    fields.
    """
    node_map = schema.node_map
    if node_id not in node_map:
        raise SchemaError(f"unknown node {node_id!r}")
    node = node_map[node_id]
    records = node.record_dicts
    if not records:
        raise SchemaError(f"node {node_id!r} has no records to expand")
    if not by:
        raise SchemaError("expansion needs at least one field")
    for field_name in by:
        for record in records:
            if field_name not in record:
                raise SchemaError(
                    f"unknown field {field_name!r} in records of {node_id!r}"
                )

    existing_children = {e.dst for e in schema.out_edges(node_id)}
    linked: dict[int, str] = {}
    for i, record in enumerate(records):
        rid = record.get("id")
        if rid is not None:
            if rid not in existing_children:
                raise SchemaError(
                    f"record id {rid!r} is not a child of {node_id!r}"
                )
            linked[i] = rid

    taken_ids = set(node_map)
    new_nodes: list[SchemaNode] = []
    new_edges: list[SchemaEdge] = []
    new_vars: dict[str, set[Var]] = {f: set() for f in by}

    def leaf_for(index: int, record: dict) -> str:
        if index in linked:
            return linked[index]
        fresh = f"{node_id}/item-{index}"
        if fresh in taken_ids:
            raise SchemaError(f"expansion id collision at {fresh!r}")
        taken_ids.add(fresh)
        remaining = {
            k: v
            for k, v in record.items()
            if k not in by and k not in ("id", "label")
        }
        payload = ContentPayload.of(records=[remaining] if remaining else None,
                                    text=None if remaining else record.get("label", fresh))
        new_nodes.append(SchemaNode(id=fresh, terminal=payload))
        return fresh

    def leaf_label(record: dict, fallback_index: int) -> Var:
        label = record.get("label") or record.get("name") or record.get("id")
        if label is None:
            label = f"item-{fallback_index}"
        return Var(str(label))

    def attach(parent: str, indexed: list[int], fields: Sequence[str]) -> None:
        if not fields:
            for i in indexed:
                record = records[i]
                new_edges.append(
                    SchemaEdge(parent, leaf_for(i, record), leaf_label(record, i))
                )
            return
        field_name, rest = fields[0], fields[1:]
        nulls = [i for i in indexed if records[i][field_name] is None]
        valued: dict[str, list[int]] = {}
        for i in indexed:
            value = records[i][field_name]
            if value is not None:
                valued.setdefault(str(value), []).append(i)
        for value in sorted(valued):
            group = valued[value]
            label = Var(value, field_name)
            new_vars[field_name].add(label)
            if not rest and len(group) == 1:
                # Final level, single record: the value node is the leaf.
                new_edges.append(
                    SchemaEdge(parent, leaf_for(group[0], records[group[0]]), label)
                )
                continue
            branch_id = f"{parent}/{field_name}={value}"
            if branch_id in taken_ids:
                raise SchemaError(f"expansion id collision at {branch_id!r}")
            taken_ids.add(branch_id)
            new_nodes.append(SchemaNode(id=branch_id))
            new_edges.append(SchemaEdge(parent, branch_id, label))
            attach(branch_id, group, rest)
        if nulls:
            attach(parent, nulls, rest)

    attach(node_id, list(range(len(records))), list(by))

    # Remove the node's direct edges to re-homed children; keep the rest.
    rehomed = set(linked.values())
    kept_edges = [
        e
        for e in schema.edges
        if not (e.src == node_id and e.dst in rehomed)
    ]
    replaced = [
        replace(n, records=None) if n.id == node_id else n for n in schema.nodes
    ]

    # Facet values of one field are mutually exclusive: extend or create the
    # dichotomy group carrying that category.
    dichotomies = list(schema.dichotomies)
    for field_name in by:
        added = new_vars[field_name]
        if not added:
            continue
        merged = False
        for gi, group in enumerate(dichotomies):
            if any(v.category == field_name for v in group):
                dichotomies[gi] = group | added
                merged = True
                break
        if not merged and len(added) >= 1:
            existing_same = {
                e.label for e in kept_edges if e.label.category == field_name
            }
            group_vars = added | existing_same
            if len(group_vars) >= 2:
                dichotomies.append(frozenset(group_vars))

    expanded = SiteSchema(
        root=schema.root,
        nodes=tuple(replaced) + tuple(new_nodes),
        edges=tuple(kept_edges) + tuple(new_edges),
        dichotomies=tuple(dichotomies),
        taxonomy=schema.taxonomy,
    )
    expanded.validate()
    return expanded


# --------------------------------------------------------------------------
# Compaction


@dataclass
class CompactionReport:
    """What each stage did: merge groups (kept id first) and deletions."""

    merges: list[tuple[str, list[str], str]] = field(default_factory=list)
    deletions: list[tuple[str, str]] = field(default_factory=list)

    def merged_into(self, node_id: str) -> Optional[str]:
        for _, removed, kept in self.merges:
            if node_id in removed:
                return kept
        return None

    def to_json(self) -> dict:
        return {
            "merges": [
                {"stage": stage, "removed": removed, "kept": kept}
                for stage, removed, kept in self.merges
            ],
            "deletions": [
                {"stage": stage, "node": node} for stage, node in self.deletions
            ],
        }


def _content_signature(node: SchemaNode) -> tuple:
    return (node.terminal, node.records)


def _merge_nodes(
    schema: SiteSchema, groups: list[list[str]], stage: str, report: CompactionReport
) -> SiteSchema:
    """Merge each group into one representative; rewrites and dedupes edges.

    Merged content is concatenated so no accompanying text is lost.
    """
    node_map = schema.node_map
    target: dict[str, str] = {}
    for group in groups:
        ordered = sorted(group, key=lambda i: (i != schema.root, i))
        kept = ordered[0]
        removed = ordered[1:]
        for r in removed:
            target[r] = kept
        report.merges.append((stage, removed, kept))

    def resolve(node_id: str) -> str:
        while node_id in target:
            node_id = target[node_id]
        return node_id

    def combined(ids: list[str]) -> SchemaNode:
        members = [node_map[i] for i in ids]
        texts = [m.terminal.text for m in members if m.terminal and m.terminal.text]
        links = [m.terminal.link for m in members if m.terminal and m.terminal.link]
        recs: list[dict] = []
        for m in members:
            if m.terminal and m.terminal.records:
                recs.extend(dict(r) for r in m.terminal.records)
        # Preserve every member's text; identical payloads collapse naturally.
        uniq_texts = list(dict.fromkeys(texts))
        terminal = None
        if uniq_texts or links or recs:
            terminal = ContentPayload.of(
                text="\n".join(uniq_texts) if uniq_texts else None,
                records=recs or None,
                link=links[0] if links else None,
            )
        records = None
        rec_rows: list[dict] = []
        for m in members:
            if m.records:
                rec_rows.extend(dict(r) for r in m.records)
        if rec_rows:
            records = tuple(_freeze_record(r) for r in rec_rows)
        return SchemaNode(
            id=ids[0],
            terminal=terminal,
            records=records,
            designation=members[0].designation,
        )

    kept_nodes: list[SchemaNode] = []
    for node in schema.nodes:
        if node.id in target:
            continue
        group_ids = [node.id] + sorted(r for r, k in target.items() if resolve(r) == node.id)
        if len(group_ids) > 1:
            kept_nodes.append(combined(group_ids))
        else:
            kept_nodes.append(node)
    seen_edges: set[tuple[str, str, str]] = set()
    kept_edges: list[SchemaEdge] = []
    for edge in schema.edges:
        src, dst = resolve(edge.src), resolve(edge.dst)
        key = (src, edge.label.key, dst)
        if key in seen_edges:
            continue
        seen_edges.add(key)
        kept_edges.append(SchemaEdge(src, dst, edge.label, edge.widget))
    merged = SiteSchema(
        root=resolve(schema.root),
        nodes=tuple(kept_nodes),
        edges=tuple(kept_edges),
        dichotomies=schema.dichotomies,
        taxonomy=schema.taxonomy,
    )
    merged.validate()
    return merged


def _stage_collapse(schema: SiteSchema, report: CompactionReport) -> SiteSchema:
    """Merge duplicate crawls: same designation, content, and labeled children.

    Iterates bottom-up until stable, so identical subtrees fold together.
    """
    while True:
        signature: dict[tuple, list[str]] = {}
        for node in schema.nodes:
            out = tuple(
                sorted((e.label.key, e.dst) for e in schema.out_edges(node.id))
            )
            key = (node.designation, _content_signature(node), out)
            signature.setdefault(key, []).append(node.id)
        groups = [ids for ids in signature.values() if len(ids) > 1]
        if not groups:
            return schema
        schema = _merge_nodes(schema, groups, "collapse", report)


def _stage_typing(schema: SiteSchema, report: CompactionReport) -> SiteSchema:
    """Partition refinement: merge nodes exhibiting the same schema.

    Leaves start partitioned by content (terminal information must survive
    exactly); internal nodes start in one class and split by their labeled
    out-edge signatures until a fixpoint: the coarsest partition in which
    same-class nodes reach same-class targets under every label.
    """
    leaf_ids = {n.id for n in schema.leaves()}
    classes: dict[str, int] = {}
    leaf_kinds: dict[tuple, int] = {}
    next_class = 1
    for node in schema.nodes:
        if node.id in leaf_ids:
            key = _content_signature(node)
            if key not in leaf_kinds:
                leaf_kinds[key] = next_class
                next_class += 1
            classes[node.id] = leaf_kinds[key]
        else:
            classes[node.id] = 0
    while True:
        signatures: dict[str, tuple] = {}
        for node in schema.nodes:
            sig = tuple(
                sorted((e.label.key, classes[e.dst]) for e in schema.out_edges(node.id))
            )
            signatures[node.id] = (classes[node.id], sig)
        remap: dict[tuple, int] = {}
        new_classes: dict[str, int] = {}
        counter = 0
        for node in schema.nodes:
            sig = signatures[node.id]
            if sig not in remap:
                remap[sig] = counter
                counter += 1
            new_classes[node.id] = remap[sig]
        if new_classes == classes:
            break
        classes = new_classes
    by_class: dict[int, list[str]] = {}
    for node in schema.nodes:
        by_class.setdefault(classes[node.id], []).append(node.id)
    groups = [ids for ids in by_class.values() if len(ids) > 1]
    if not groups:
        return schema
    return _merge_nodes(schema, groups, "typing", report)


def _stage_roles(schema: SiteSchema, report: CompactionReport) -> SiteSchema:
    """Delete nodes whose every parent-child connection is supplied by others.

    Conservative: the node must carry no unique content, and for each pair of
    in-neighbour and out-neighbour some other intermediate node must connect
    them directly.
    """
    changed = True
    while changed:
        changed = False
        node_map = schema.node_map
        for node in sorted(schema.nodes, key=lambda n: n.id):
            if node.id == schema.root:
                continue
            ins = schema.in_edges(node.id)
            outs = schema.out_edges(node.id)
            if not ins or not outs:
                continue
            content = _content_signature(node)
            if content != (None, None):
                duplicated = any(
                    other.id != node.id and _content_signature(other) == content
                    for other in schema.nodes
                )
                if not duplicated:
                    continue
            covered = True
            for in_edge in ins:
                for out_edge in outs:
                    alternates = [
                        mid.dst
                        for mid in schema.out_edges(in_edge.src)
                        if mid.dst != node.id
                        and any(
                            e.dst == out_edge.dst
                            for e in schema.out_edges(mid.dst)
                        )
                    ]
                    if not alternates:
                        covered = False
                        break
                if not covered:
                    break
            if not covered:
                continue
            report.deletions.append(("roles", node.id))
            schema = SiteSchema(
                root=schema.root,
                nodes=tuple(n for n in schema.nodes if n.id != node.id),
                edges=tuple(
                    e
                    for e in schema.edges
                    if e.src != node.id and e.dst != node.id
                ),
                dichotomies=schema.dichotomies,
                taxonomy=schema.taxonomy,
            )
            schema.validate()
            changed = True
            break
    return schema


STAGES = ("collapse", "typing", "roles")


def compact(
    schema: SiteSchema, stages: Sequence[str] = ("collapse", "typing")
) -> tuple[SiteSchema, CompactionReport]:
    """Run the requested compaction stages in order.

    ``collapse`` and ``typing`` preserve the labeled root-to-leaf path set
    exactly.  ``roles`` preserves parent-child connectivity but drops the
    redundant intermediate's labels, so it is opt-in.
    """
    report = CompactionReport()
    for stage in stages:
        if stage == "collapse":
            schema = _stage_collapse(schema, report)
        elif stage == "typing":
            schema = _stage_typing(schema, report)
        elif stage == "roles":
            schema = _stage_roles(schema, report)
        else:
            raise SchemaError(f"unknown compaction stage {stage!r}")
    return schema, report


def labeled_paths(schema: SiteSchema) -> set[tuple[tuple[str, ...], tuple]]:
    """All root-to-leaf label sequences with the leaf's content signature."""
    node_map = schema.node_map
    out: set[tuple[tuple[str, ...], tuple]] = set()

    def walk(node_id: str, prefix: tuple[str, ...]) -> None:
        edges = schema.out_edges(node_id)
        if not edges:
            out.add((prefix, _content_signature(node_map[node_id])))
            return
        for edge in edges:
            walk(edge.dst, prefix + (edge.label.key,))

    walk(schema.root, ())
    return out


# --------------------------------------------------------------------------
# Clickable maps


@dataclass(frozen=True)
class RegionTable:
    """Label -> union of axis-aligned rectangles [a,b] x [c,d]."""

    entries: tuple[tuple[Var, tuple[tuple[float, float, float, float], ...]], ...]

    def labels(self) -> list[Var]:
        return [label for label, _ in self.entries]


def load_region_table(data: bytes | str | Mapping) -> RegionTable:
    if isinstance(data, (bytes, str)):
        if isinstance(data, bytes):
            data = data.decode("utf-8")
        try:
            doc = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    else:
        doc = data
    labels = doc.get("labels")
    if not isinstance(labels, dict) or not labels:
        raise RegionError("region table must map labels to rectangle lists")
    entries = []
    for name in sorted(labels):
        rects = []
        for rect in labels[name]:
            a, b, c, d = (float(x) for x in rect)
            if not (a < b and c < d):
                raise RegionError(
                    f"rectangle {rect!r} of {name!r} must satisfy a<b and c<d"
                )
            rects.append((a, b, c, d))
        entries.append((Var(name, "region"), tuple(rects)))
    # Reject interior overlaps between different labels; shared boundaries
    # are tolerated at load and surface as ambiguity errors on lookup.
    for i, (name_a, rects_a) in enumerate(entries):
        for name_b, rects_b in entries[i + 1 :]:
            for (a1, b1, c1, d1) in rects_a:
                for (a2, b2, c2, d2) in rects_b:
                    if a1 < b2 and a2 < b1 and c1 < d2 and c2 < d1:
                        raise RegionError(
                            f"regions {name_a.key!r} and {name_b.key!r} overlap"
                        )
    return RegionTable(entries=tuple(entries))


def point_to_label(table: RegionTable, x: float, y: float) -> Var:
    hits = [
        label
        for label, rects in table.entries
        if any(a <= x <= b and c <= y <= d for a, b, c, d in rects)
    ]
    if not hits:
        raise RegionError(f"point ({x}, {y}) is outside every labeled region")
    if len(hits) > 1:
        raise RegionError(
            f"point ({x}, {y}) is on a boundary shared by "
            + " and ".join(h.key for h in hits)
        )
    return hits[0]


def regions_to_program(
    table: RegionTable, bodies: Mapping[str, Node]
) -> InteractionProgram:
    """A map becomes a switch over its labels; picking one label excludes
    the others, so the labels form one dichotomy group."""
    labels = table.labels()
    missing = [l.name for l in labels if l.name not in bodies]
    if missing:
        raise RegionError(f"no body supplied for labels: {', '.join(missing)}")
    cases = tuple(SwitchCase(label, bodies[label.name]) for label in labels)
    root = Switch("region", cases)
    vocab_vars = set(labels)
    for label in labels:
        vocab_vars.update(guard_vars(bodies[label.name]))
    return InteractionProgram.build(
        root=root,
        vocabulary=Vocabulary.build(vocab_vars, [frozenset(labels)]),
        widget_hints={"": LISTBOX},
    )


# --------------------------------------------------------------------------
# Cross-site cascade


def cascade(
    upstream: InteractionProgram,
    xref: Mapping[str, str],
    downstream: InteractionProgram,
) -> InteractionProgram:
    """Splice a downstream program after every upstream terminal.

    Each terminal's text is an output token; the cross-reference map turns it
    into a downstream binding, and that specialized downstream copy runs
    after the terminal.  Vocabularies must be disjoint.
    """
    up_keys = {v.key for v in upstream.vocabulary.variables}
    down_keys = {v.key for v in downstream.vocabulary.variables}
    overlap = up_keys & down_keys
    if overlap:
        raise CrossReferenceError(
            f"vocabularies overlap on: {', '.join(sorted(overlap))}"
        )
    fn_overlap = set(upstream.function_table) & set(downstream.function_table)
    if fn_overlap:
        raise CrossReferenceError(
            f"function names overlap: {', '.join(sorted(fn_overlap))}"
        )
    down_has_choices = bool(downstream.vocabulary.variables)

    def splice(node: Node) -> Node:
        if isinstance(node, Terminal):
            if not down_has_choices:
                return Seq((node, downstream.root))
            token = node.content.text
            if token is None or token not in xref:
                raise CrossReferenceError(
                    f"no cross-reference for upstream output {token!r}"
                )
            var = downstream.vocabulary.match_token(xref[token])
            if var is None:
                raise CrossReferenceError(
                    f"cross-reference target {xref[token]!r} is not a "
                    "downstream variable"
                )
            specialized = partial_evaluate(downstream, Assignment.of({var: True}))
            return Seq((node, specialized.root))
        if isinstance(node, Seq):
            return Seq(tuple(splice(c) for c in node.children))
        if isinstance(node, Cond):
            return Cond(
                tuple(CondEntry(e.guards, splice(e.body)) for e in node.chain),
                fallback=None if node.fallback is None else splice(node.fallback),
            )
        if isinstance(node, Switch):
            return Switch(
                node.category,
                tuple(SwitchCase(c.guard, splice(c.body)) for c in node.cases),
            )
        return node

    root = splice(upstream.root)
    vocabulary = Vocabulary.build(
        upstream.vocabulary.variables | downstream.vocabulary.variables,
        list(upstream.vocabulary.dichotomies) + list(downstream.vocabulary.dichotomies),
        {
            **{p: set(c) for p, c in upstream.vocabulary.taxonomy},
            **{p: set(c) for p, c in downstream.vocabulary.taxonomy},
        },
    )
    functions = dict(upstream.function_table)
    functions.update(downstream.function_table)
    return InteractionProgram.build(
        root=root,
        vocabulary=vocabulary,
        functions=functions,
        widget_hints=dict(upstream.widget_hints),
        decided=upstream.decided,
    )


def erase_cascade_extension(
    program: InteractionProgram, downstream_vocabulary: Vocabulary
) -> InteractionProgram:
    """Strip the spliced downstream copies back out of a composite.

    Used to check that cascading preserved upstream behavior: erasing the
    downstream vocabulary from a composite residual recovers the plain
    upstream residual (modulo sequence flattening).
    """
    down = set(downstream_vocabulary.variables)

    def erase(node: Node) -> Optional[Node]:
        if isinstance(node, Terminal):
            return node
        if isinstance(node, (Cond, Switch)):
            guards = guard_vars(node)
            if guards and guards <= down:
                return None
            if isinstance(node, Cond):
                return Cond(
                    tuple(
                        CondEntry(e.guards, erase(e.body) or Seq(()))
                        for e in node.chain
                    ),
                    fallback=None
                    if node.fallback is None
                    else (erase(node.fallback) or Seq(())),
                )
            return Switch(
                node.category,
                tuple(
                    SwitchCase(c.guard, erase(c.body) or Seq(())) for c in node.cases
                ),
            )
        if isinstance(node, Seq):
            kept = [erase(c) for c in node.children]
            return Seq(tuple(c for c in kept if c is not None))
        return node

    root = normalize(erase(program.root) or Seq(()))
    keep = {v for v in program.vocabulary.variables if v not in down}
    table = program.function_table
    kept_functions = {
        name: table[name] for name in sorted(called_functions(root, table))
    }
    return InteractionProgram.build(
        root=root,
        vocabulary=program.vocabulary.restricted_to(keep),
        functions=kept_functions,
        widget_hints={},
        decided=program.decided.restrict(keep),
    )


# --------------------------------------------------------------------------
# External binding sources


def apply_binding_source(
    source: Mapping[str, bool] | bytes | str, program: InteractionProgram
) -> Assignment:
    """Turn an opaque provider's name->bool table into a closed assignment."""
    if isinstance(source, (bytes, str)):
        if isinstance(source, bytes):
            source = source.decode("utf-8")
        try:
            source = json.loads(source)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    if not isinstance(source, Mapping):
        raise ParseError("binding source must map variable names to booleans")
    values: dict[Var, bool] = {}
    for name, value in source.items():
        var = program.vocabulary.match_token(name)
        if var is None:
            raise UnknownVariableError(f"binding source names unknown variable {name!r}")
        values[var] = bool(value)
    return close_assignment(Assignment.of(values), program.vocabulary)
