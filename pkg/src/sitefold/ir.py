"""Interaction-program IR.

An information space is modeled as a tree of conditionals, switches, calls,
and terminal content.  Choice labels are program variables; a user's partial
input is an assignment of true/false values to some of them.  This module owns
the value types, assignment closure rules, and the canonical JSON form that
every other module reads and writes.

All values are immutable; "mutation" means building a new value.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

from .errors import (
    AmbiguousTokenError,
    DuplicateVariableError,
    InconsistentAssignmentError,
    ParseError,
    UndeclaredGuardError,
    UnknownVariableError,
)

# Widget hints understood by the renderer.
LINK = "link"
TEXTBOX = "textbox"
LISTBOX = "listbox"
FORMFIELD = "formfield"
WIDGET_HINTS = (LINK, TEXTBOX, LISTBOX, FORMFIELD)

BLACK_BOX = "black"
WHITE_BOX = "white"


def _check_token(text: str, what: str) -> None:
    if not text:
        raise ParseError(f"{what} must be non-empty")
    if "=" in text:
        raise ParseError(f"{what} {text!r} must not contain '='")
    if "/" in text:
        raise ParseError(f"{what} {text!r} must not contain '/'")
    if text.startswith("#"):
        raise ParseError(f"{what} {text!r} must not start with '#'")


@dataclass(frozen=True, order=True)
class Var:
    """A program variable: a choice label, optionally qualified by a category.

    ``Var("2001", "Year")`` renders and parses as ``"Year=2001"``; an
    unqualified variable is just its name.
    """

    name: str
    category: Optional[str] = None

    def __post_init__(self) -> None:
        _check_token(self.name, "variable name")
        if self.category is not None:
            _check_token(self.category, "variable category")

    @property
    def key(self) -> str:
        if self.category is None:
            return self.name
        return f"{self.category}={self.name}"

    @classmethod
    def parse(cls, text: str) -> "Var":
        if "=" in text:
            category, _, name = text.partition("=")
            return cls(name=name, category=category)
        return cls(name=text)

    def __str__(self) -> str:
        return self.key


@dataclass(frozen=True)
class Vocabulary:
    """Declared variables plus their mutual-exclusion groups and taxonomy.

    ``dichotomies`` are disjoint groups with strict either/or semantics: when
    one member is set true, closure sets every sibling false.  ``taxonomy``
    maps a parent variable to its children; enabling expansion turns a child's
    true binding into the parent's as well.
    """

    variables: frozenset[Var]
    dichotomies: tuple[frozenset[Var], ...] = ()
    taxonomy: tuple[tuple[Var, frozenset[Var]], ...] = ()

    def __post_init__(self) -> None:
        by_key: dict[str, Var] = {}
        for v in self.variables:
            if v.key in by_key:
                raise DuplicateVariableError(f"variable {v.key!r} declared twice")
            by_key[v.key] = v
        seen: set[Var] = set()
        for group in self.dichotomies:
            for v in group:
                if v not in self.variables:
                    raise UndeclaredGuardError(f"dichotomy member {v.key!r} not declared")
                if v in seen:
                    raise DuplicateVariableError(
                        f"variable {v.key!r} appears in more than one dichotomy group"
                    )
                seen.add(v)
        for parent, children in self.taxonomy:
            if parent not in self.variables:
                raise UndeclaredGuardError(f"taxonomy parent {parent.key!r} not declared")
            for child in children:
                if child not in self.variables:
                    raise UndeclaredGuardError(f"taxonomy child {child.key!r} not declared")
        # Reject taxonomy cycles: no variable may be its own ancestor.
        for v in self.variables:
            if v in self.ancestors(v):
                raise ParseError(f"taxonomy cycle through {v.key!r}")

    @classmethod
    def build(
        cls,
        variables: Iterable[Var],
        dichotomies: Iterable[Iterable[Var]] = (),
        taxonomy: Mapping[Var, Iterable[Var]] | None = None,
    ) -> "Vocabulary":
        tax = tuple(
            sorted(
                (parent, frozenset(children))
                for parent, children in (taxonomy or {}).items()
            )
        )
        return cls(
            variables=frozenset(variables),
            dichotomies=tuple(frozenset(g) for g in dichotomies),
            taxonomy=tax,
        )

    def group_of(self, var: Var) -> Optional[frozenset[Var]]:
        for group in self.dichotomies:
            if var in group:
                return group
        return None

    def parents_of(self, var: Var) -> set[Var]:
        return {parent for parent, children in self.taxonomy if var in children}

    def ancestors(self, var: Var) -> set[Var]:
        out: set[Var] = set()
        frontier = list(self.parents_of(var))
        while frontier:
            p = frontier.pop()
            if p in out:
                continue
            out.add(p)
            frontier.extend(self.parents_of(p))
        return out

    def restricted_to(self, keep: set[Var]) -> "Vocabulary":
        """Vocabulary over ``keep``: groups lose absent members, singleton
        groups are dropped, taxonomy keeps only edges with both ends present."""
        groups = []
        for group in self.dichotomies:
            g = group & keep
            if len(g) >= 2:
                groups.append(frozenset(g))
        tax = []
        for parent, children in self.taxonomy:
            if parent in keep:
                kids = children & keep
                if kids:
                    tax.append((parent, frozenset(kids)))
        return Vocabulary(
            variables=frozenset(keep),
            dichotomies=tuple(groups),
            taxonomy=tuple(sorted(tax)),
        )

    def match_token(self, token: str, *, allow_unqualified: bool = True) -> Optional[Var]:
        """Resolve an input token to a declared variable.

        A qualified token ("Year=2001") must match category and name exactly.
        A bare token matches by name when that is unambiguous; several
        same-named variables under different categories raise
        :class:`AmbiguousTokenError`.  Returns ``None`` when nothing matches.
        """
        if "=" in token:
            category, _, name = token.partition("=")
            candidate = Var(name=name, category=category) if name and category else None
            if candidate is not None and candidate in self.variables:
                return candidate
            # Fall through: the whole token might itself be a bare name.
        exact = [v for v in self.variables if v.key == token]
        if exact:
            return exact[0]
        if not allow_unqualified:
            return None
        named = sorted(v for v in self.variables if v.name == token)
        if len(named) == 1:
            return named[0]
        if len(named) > 1:
            raise AmbiguousTokenError(token, [v.key for v in named])
        return None


@dataclass(frozen=True)
class Assignment:
    """A consistent set of true/false bindings, ordered for canonical output."""

    bindings: tuple[tuple[Var, bool], ...] = ()

    def __post_init__(self) -> None:
        seen: dict[Var, bool] = {}
        for var, value in self.bindings:
            if var in seen and seen[var] != value:
                raise InconsistentAssignmentError(
                    f"variable {var.key!r} bound both true and false", [var.key]
                )
            seen[var] = value
        object.__setattr__(self, "bindings", tuple(sorted(seen.items())))

    @classmethod
    def of(cls, mapping: Mapping[Var, bool] | Iterable[tuple[Var, bool]]) -> "Assignment":
        items = mapping.items() if isinstance(mapping, Mapping) else mapping
        return cls(tuple(items))

    @property
    def as_dict(self) -> dict[Var, bool]:
        return dict(self.bindings)

    def get(self, var: Var) -> Optional[bool]:
        for v, value in self.bindings:
            if v == var:
                return value
        return None

    def union(self, other: "Assignment") -> "Assignment":
        mine = self.as_dict
        for var, value in other.bindings:
            if var in mine and mine[var] != value:
                raise InconsistentAssignmentError(
                    f"conflicting bindings for {var.key!r}", [var.key]
                )
            mine[var] = value
        return Assignment.of(mine)

    def restrict(self, keep: set[Var]) -> "Assignment":
        return Assignment.of({v: b for v, b in self.bindings if v in keep})

    def __len__(self) -> int:
        return len(self.bindings)

    def __iter__(self) -> Iterator[tuple[Var, bool]]:
        return iter(self.bindings)

    def __bool__(self) -> bool:
        return bool(self.bindings)


EMPTY_ASSIGNMENT = Assignment()


def close_assignment(
    assignment: Assignment,
    vocabulary: Vocabulary,
    *,
    strict_dichotomy: bool = True,
    taxonomy_expand: bool = False,
) -> Assignment:
    """Close an assignment under the enabled binding rules.

    Strict dichotomy: a true binding forces false on every group sibling.
    Taxonomy expansion: a true binding also turns on all taxonomy ancestors.
    The result is a superset of the input; deriving both values for one
    variable raises :class:`InconsistentAssignmentError`.
    """
    for var, _ in assignment:
        if var not in vocabulary.variables:
            raise UnknownVariableError(f"unknown variable {var.key!r}")
    values: dict[Var, bool] = {}
    conflicts: list[str] = []

    def put(var: Var, value: bool) -> bool:
        """Record a binding; returns True when it is new."""
        if var in values:
            if values[var] != value:
                conflicts.append(var.key)
                raise InconsistentAssignmentError(
                    f"closure derives both values for {var.key!r}", conflicts
                )
            return False
        values[var] = value
        return True

    frontier = [(var, value) for var, value in assignment]
    for var, value in frontier:
        put(var, value)
    while frontier:
        var, value = frontier.pop()
        if not value:
            continue
        if strict_dichotomy:
            group = vocabulary.group_of(var)
            if group:
                for sibling in group:
                    if sibling != var and put(sibling, False):
                        frontier.append((sibling, False))
        if taxonomy_expand:
            for parent in vocabulary.parents_of(var):
                if put(parent, True):
                    frontier.append((parent, True))
    return Assignment.of(values)


# --------------------------------------------------------------------------
# Program nodes


@dataclass(frozen=True)
class ContentPayload:
    """Terminal information: free text, flat records, and/or a link."""

    text: Optional[str] = None
    records: Optional[tuple[tuple[tuple[str, Optional[str]], ...], ...]] = None
    link: Optional[str] = None

    def __post_init__(self) -> None:
        if self.text is None and self.records is None and self.link is None:
            raise ParseError("terminal content must carry text, records, or a link")

    @classmethod
    def of(
        cls,
        text: Optional[str] = None,
        records: Optional[Sequence[Mapping[str, Optional[str]]]] = None,
        link: Optional[str] = None,
    ) -> "ContentPayload":
        frozen = None
        if records is not None:
            frozen = tuple(tuple(sorted(r.items())) for r in records)
        return cls(text=text, records=frozen, link=link)

    @property
    def record_dicts(self) -> list[dict[str, Optional[str]]]:
        if self.records is None:
            return []
        return [dict(r) for r in self.records]


@dataclass(frozen=True)
class Terminal:
    content: ContentPayload


@dataclass(frozen=True)
class Seq:
    children: tuple["Node", ...]


@dataclass(frozen=True)
class CondEntry:
    """One arm of an if/else-if chain.

    ``guards`` usually holds one variable; a collapsed single-choice chain
    carries the whole guard path and fires only when every component is true.
    """

    guards: tuple[Var, ...]
    body: "Node"

    def __post_init__(self) -> None:
        if not self.guards:
            raise ParseError("conditional entry must carry at least one guard")

    @property
    def label(self) -> str:
        return " ".join(v.key for v in self.guards)


@dataclass(frozen=True)
class Cond:
    chain: tuple[CondEntry, ...]
    fallback: Optional["Node"] = None

    def __post_init__(self) -> None:
        if not self.chain:
            raise ParseError("conditional must have at least one entry")


@dataclass(frozen=True)
class SwitchCase:
    guard: Var
    body: "Node"


@dataclass(frozen=True)
class Switch:
    category: str
    cases: tuple[SwitchCase, ...]

    def __post_init__(self) -> None:
        if not self.cases:
            raise ParseError("switch must have at least one case")


@dataclass(frozen=True)
class Call:
    function: str
    boxing: str = BLACK_BOX

    def __post_init__(self) -> None:
        if self.boxing not in (BLACK_BOX, WHITE_BOX):
            raise ParseError(f"unknown boxing {self.boxing!r}")


Node = Union[Terminal, Seq, Cond, Switch, Call]


def normalize(node: Node) -> Node:
    """Flatten nested sequences and unwrap singleton ones.

    Empty sequences are preserved: they mark branches emptied during
    specialization and are removed later by residual optimization.
    """
    if isinstance(node, Seq):
        flat: list[Node] = []
        for child in node.children:
            child = normalize(child)
            if isinstance(child, Seq):
                flat.extend(child.children)
            else:
                flat.append(child)
        if len(flat) == 1:
            return flat[0]
        return Seq(tuple(flat))
    if isinstance(node, Cond):
        return Cond(
            chain=tuple(CondEntry(e.guards, normalize(e.body)) for e in node.chain),
            fallback=None if node.fallback is None else normalize(node.fallback),
        )
    if isinstance(node, Switch):
        return Switch(
            category=node.category,
            cases=tuple(SwitchCase(c.guard, normalize(c.body)) for c in node.cases),
        )
    return node


@dataclass(frozen=True)
class FunctionDef:
    """A named sub-program; ``body is None`` marks an external function."""

    params: tuple[Var, ...] = ()
    body: Optional[Node] = None


@dataclass(frozen=True)
class InteractionProgram:
    """A complete interaction program: tree, vocabulary, functions, hints.

    ``decided`` is the breadcrumb: bindings already folded into this program
    by earlier specialization steps.
    """

    root: Node
    vocabulary: Vocabulary
    functions: tuple[tuple[str, FunctionDef], ...] = ()
    widget_hints: tuple[tuple[str, str], ...] = ()
    decided: Assignment = EMPTY_ASSIGNMENT

    @classmethod
    def build(
        cls,
        root: Node,
        vocabulary: Vocabulary,
        functions: Mapping[str, FunctionDef] | None = None,
        widget_hints: Mapping[str, str] | None = None,
        decided: Assignment = EMPTY_ASSIGNMENT,
    ) -> "InteractionProgram":
        program = cls(
            root=normalize(root),
            vocabulary=vocabulary,
            functions=tuple(sorted((functions or {}).items())),
            widget_hints=tuple(sorted((widget_hints or {}).items())),
            decided=decided,
        )
        program.validate()
        return program

    @property
    def function_table(self) -> dict[str, FunctionDef]:
        return dict(self.functions)

    @property
    def hint_table(self) -> dict[str, str]:
        return dict(self.widget_hints)

    def validate(self) -> None:
        table = self.function_table
        declared = self.vocabulary.variables

        def check(node: Node, inside: Optional[str]) -> None:
            if isinstance(node, Terminal):
                return
            if isinstance(node, Seq):
                for child in node.children:
                    check(child, inside)
                return
            if isinstance(node, Cond):
                for entry in node.chain:
                    for guard in entry.guards:
                        if guard not in declared:
                            raise UndeclaredGuardError(
                                f"guard {guard.key!r} is not declared in the vocabulary"
                            )
                    check(entry.body, inside)
                if len(node.chain) >= 2:
                    heads = [e.guards[0] for e in node.chain]
                    if any(len(e.guards) != 1 for e in node.chain):
                        raise ParseError(
                            "multi-guard entries are only valid in single-entry chains"
                        )
                    groups = {self.vocabulary.group_of(h) for h in heads}
                    groups.discard(None)
                    if len(groups) > 1:
                        raise ParseError(
                            "chain guards span more than one dichotomy group"
                        )
                if node.fallback is not None:
                    check(node.fallback, inside)
                return
            if isinstance(node, Switch):
                grouped = set()
                for case in node.cases:
                    if case.guard not in declared:
                        raise UndeclaredGuardError(
                            f"guard {case.guard.key!r} is not declared in the vocabulary"
                        )
                    if case.guard.category != node.category:
                        raise ParseError(
                            f"switch over {node.category!r} has case "
                            f"{case.guard.key!r} outside that category"
                        )
                    g = self.vocabulary.group_of(case.guard)
                    if g is not None:
                        grouped.add(g)
                    check(case.body, inside)
                if len(grouped) > 1:
                    raise ParseError("switch cases span more than one dichotomy group")
                return
            if isinstance(node, Call):
                if node.function not in table:
                    raise UndeclaredGuardError(
                        f"call to unknown function {node.function!r}"
                    )
                fn = table[node.function]
                if node.boxing == WHITE_BOX and fn.body is None:
                    raise ParseError(
                        f"white-box call to external function {node.function!r}"
                    )
                return
            raise ParseError(f"unknown node {node!r}")

        check(self.root, None)
        # Function bodies: guards must be covered by declared params, calls
        # must not recurse (bounded interaction sequences only).
        for name, fn in self.functions:
            for param in fn.params:
                if param not in declared:
                    raise UndeclaredGuardError(
                        f"function {name!r} parameter {param.key!r} not declared"
                    )
            if fn.body is not None:
                check(fn.body, name)
                free = guard_vars(fn.body, table)
                extra = free - set(fn.params)
                if extra:
                    raise ParseError(
                        f"function {name!r} guards {sorted(v.key for v in extra)} "
                        "missing from its parameter list"
                    )
        _check_call_graph(table)
        for var, _ in self.decided:
            if var not in declared:
                raise UndeclaredGuardError(
                    f"decided binding {var.key!r} is not declared in the vocabulary"
                )
        for path, hint in self.widget_hints:
            if hint not in WIDGET_HINTS:
                raise ParseError(f"unknown widget hint {hint!r} at {path!r}")


def _check_call_graph(table: Mapping[str, FunctionDef]) -> None:
    def callees(name: str) -> set[str]:
        fn = table[name]
        out: set[str] = set()
        if fn.body is None:
            return out

        def walk(node: Node) -> None:
            if isinstance(node, Call):
                out.add(node.function)
            elif isinstance(node, Seq):
                for c in node.children:
                    walk(c)
            elif isinstance(node, Cond):
                for e in node.chain:
                    walk(e.body)
                if node.fallback is not None:
                    walk(node.fallback)
            elif isinstance(node, Switch):
                for c in node.cases:
                    walk(c.body)

        walk(fn.body)
        return out

    state: dict[str, int] = {}

    def visit(name: str) -> None:
        if state.get(name) == 1:
            raise ParseError(f"recursive function {name!r}")
        if state.get(name) == 2:
            return
        state[name] = 1
        for callee in callees(name):
            if callee in table:
                visit(callee)
        state[name] = 2

    for name in table:
        visit(name)


def guard_vars(node: Node, functions: Mapping[str, FunctionDef] | None = None) -> set[Var]:
    """All variables occurring as guards in a tree.

    When a function table is supplied, a call contributes its function's
    declared parameters (which cover the body's guards by validation).
    """
    out: set[Var] = set()

    def walk(node: Node) -> None:
        if isinstance(node, Seq):
            for c in node.children:
                walk(c)
        elif isinstance(node, Cond):
            for e in node.chain:
                out.update(e.guards)
                walk(e.body)
            if node.fallback is not None:
                walk(node.fallback)
        elif isinstance(node, Switch):
            for c in node.cases:
                out.add(c.guard)
                walk(c.body)
        elif isinstance(node, Call) and functions is not None:
            fn = functions.get(node.function)
            if fn is not None:
                out.update(fn.params)

    walk(node)
    return out


def called_functions(node: Node, table: Mapping[str, FunctionDef]) -> set[str]:
    """Names of functions reachable from a tree, following nested bodies."""
    out: set[str] = set()

    def walk(node: Node) -> None:
        if isinstance(node, Seq):
            for c in node.children:
                walk(c)
        elif isinstance(node, Cond):
            for e in node.chain:
                walk(e.body)
            if node.fallback is not None:
                walk(node.fallback)
        elif isinstance(node, Switch):
            for c in node.cases:
                walk(c.body)
        elif isinstance(node, Call):
            if node.function not in out:
                out.add(node.function)
                fn = table.get(node.function)
                if fn is not None and fn.body is not None:
                    walk(fn.body)

    walk(node)
    return out


# --------------------------------------------------------------------------
# Canonical JSON form


def _content_to_json(content: ContentPayload) -> dict:
    doc: dict = {}
    if content.text is not None:
        doc["text"] = content.text
    if content.records is not None:
        doc["records"] = [dict(r) for r in content.records]
    if content.link is not None:
        doc["link"] = content.link
    return doc


def _content_from_json(doc: object) -> ContentPayload:
    if not isinstance(doc, dict):
        raise ParseError("terminal content must be an object")
    records = doc.get("records")
    if records is not None:
        if not isinstance(records, list) or not all(isinstance(r, dict) for r in records):
            raise ParseError("records must be a list of objects")
    return ContentPayload.of(
        text=doc.get("text"), records=records, link=doc.get("link")
    )


def _node_to_json(node: Node) -> dict:
    if isinstance(node, Terminal):
        return {"kind": "terminal", "content": _content_to_json(node.content)}
    if isinstance(node, Seq):
        return {"kind": "seq", "children": [_node_to_json(c) for c in node.children]}
    if isinstance(node, Cond):
        doc: dict = {
            "kind": "cond",
            "chain": [
                {"guards": [g.key for g in e.guards], "body": _node_to_json(e.body)}
                for e in node.chain
            ],
        }
        if node.fallback is not None:
            doc["fallback"] = _node_to_json(node.fallback)
        return doc
    if isinstance(node, Switch):
        return {
            "kind": "switch",
            "category": node.category,
            "cases": [
                {"guard": c.guard.key, "body": _node_to_json(c.body)}
                for c in node.cases
            ],
        }
    if isinstance(node, Call):
        return {"kind": "call", "function": node.function, "boxing": node.boxing}
    raise ParseError(f"unknown node {node!r}")


def _node_from_json(doc: object) -> Node:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ParseError("program node must be an object with a 'kind'")
    kind = doc["kind"]
    if kind == "terminal":
        return Terminal(_content_from_json(doc.get("content", {})))
    if kind == "seq":
        children = doc.get("children", [])
        if not isinstance(children, list):
            raise ParseError("seq children must be a list")
        return Seq(tuple(_node_from_json(c) for c in children))
    if kind == "cond":
        chain = doc.get("chain", [])
        if not isinstance(chain, list):
            raise ParseError("cond chain must be a list")
        entries = []
        for e in chain:
            if not isinstance(e, dict):
                raise ParseError("cond entry must be an object")
            guards = e.get("guards")
            if not isinstance(guards, list) or not guards:
                raise ParseError("cond entry must list its guards")
            entries.append(
                CondEntry(
                    guards=tuple(Var.parse(g) for g in guards),
                    body=_node_from_json(e.get("body", {})),
                )
            )
        fallback = doc.get("fallback")
        return Cond(
            chain=tuple(entries),
            fallback=None if fallback is None else _node_from_json(fallback),
        )
    if kind == "switch":
        cases = doc.get("cases", [])
        if not isinstance(cases, list):
            raise ParseError("switch cases must be a list")
        return Switch(
            category=doc.get("category", ""),
            cases=tuple(
                SwitchCase(Var.parse(c["guard"]), _node_from_json(c.get("body", {})))
                for c in cases
            ),
        )
    if kind == "call":
        return Call(function=doc.get("function", ""), boxing=doc.get("boxing", BLACK_BOX))
    raise ParseError(f"unknown node kind {kind!r}")


def _vocabulary_to_json(v: Vocabulary) -> dict:
    return {
        "variables": [
            {"name": x.name, **({"category": x.category} if x.category else {})}
            for x in sorted(v.variables)
        ],
        "dichotomies": sorted(sorted(x.key for x in g) for g in v.dichotomies),
        "taxonomy": [
            {"parent": parent.key, "children": sorted(c.key for c in children)}
            for parent, children in sorted(v.taxonomy)
        ],
    }


def _vocabulary_from_json(doc: object) -> Vocabulary:
    if not isinstance(doc, dict):
        raise ParseError("vocabulary must be an object")
    variables = []
    for entry in doc.get("variables", []):
        if isinstance(entry, str):
            variables.append(Var.parse(entry))
        elif isinstance(entry, dict):
            variables.append(Var(name=entry["name"], category=entry.get("category")))
        else:
            raise ParseError("variable entries must be strings or objects")
    vocab_vars = frozenset(variables)
    if len(vocab_vars) != len(variables):
        raise DuplicateVariableError("duplicate variable declaration")

    def resolve(key: str) -> Var:
        var = Var.parse(key)
        if var in vocab_vars:
            return var
        named = [v for v in vocab_vars if v.name == key]
        if len(named) == 1:
            return named[0]
        raise UndeclaredGuardError(f"vocabulary reference {key!r} does not resolve")

    dichotomies = [
        frozenset(resolve(k) for k in group) for group in doc.get("dichotomies", [])
    ]
    taxonomy: dict[Var, set[Var]] = {}
    for edge in doc.get("taxonomy", []):
        parent = resolve(edge["parent"])
        taxonomy.setdefault(parent, set()).update(resolve(c) for c in edge["children"])
    return Vocabulary.build(vocab_vars, dichotomies, taxonomy)


def program_to_json(program: InteractionProgram) -> dict:
    return {
        "root": _node_to_json(program.root),
        "vocabulary": _vocabulary_to_json(program.vocabulary),
        "functions": {
            name: {
                "params": [p.key for p in fn.params],
                "body": None if fn.body is None else _node_to_json(fn.body),
            }
            for name, fn in program.functions
        },
        "widget_hints": dict(program.widget_hints),
        "decided": [
            {"variable": var.key, "value": value} for var, value in program.decided
        ],
    }


def canonical_serialize(program: InteractionProgram) -> bytes:
    """Serialize to the canonical byte form: equal programs, equal bytes."""
    doc = program_to_json(program)
    text = json.dumps(doc, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    return (text + "\n").encode("utf-8")


def program_from_json(doc: object) -> InteractionProgram:
    if not isinstance(doc, dict):
        raise ParseError("program document must be an object")
    vocabulary = _vocabulary_from_json(doc.get("vocabulary", {}))
    functions = {}
    raw_functions = doc.get("functions", {})
    if not isinstance(raw_functions, dict):
        raise ParseError("functions must be an object")
    for name, raw in raw_functions.items():
        body = raw.get("body")
        functions[name] = FunctionDef(
            params=tuple(Var.parse(p) for p in raw.get("params", [])),
            body=None if body is None else _node_from_json(body),
        )
    decided = Assignment.of(
        {
            Var.parse(entry["variable"]): bool(entry["value"])
            for entry in doc.get("decided", [])
        }
    )
    hints = doc.get("widget_hints", {})
    if not isinstance(hints, dict):
        raise ParseError("widget_hints must be an object")
    return InteractionProgram.build(
        root=_node_from_json(doc.get("root", {})),
        vocabulary=vocabulary,
        functions=functions,
        widget_hints=hints,
        decided=decided,
    )


def canonical_parse(data: bytes | str) -> InteractionProgram:
    """Parse the canonical text form, validating every IR invariant."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    if not data.strip():
        raise ParseError("empty program text", line=1, column=1)
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    return program_from_json(doc)


def programs_equal(a: InteractionProgram, b: InteractionProgram) -> bool:
    return canonical_serialize(a) == canonical_serialize(b)
