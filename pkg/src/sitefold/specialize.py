"""Online partial evaluation of interaction programs.

``partial_evaluate`` folds a closed assignment into a program: branches
guarded by false variables disappear, branches guarded by true variables are
promoted one level up, unbound guards survive into the residual program.  The
residual is itself a valid program, so specialization steps compose in any
order.  ``total_evaluate`` is the brute-force reference semantics used by the
tests, and ``optimize_residual`` performs the presentation-stage cleanups
(dead branch removal, single-choice chain collapse, switch downgrade).
"""

from __future__ import annotations

from typing import Mapping, Optional

from .errors import IncompleteAssignmentError
from .ir import (
    Assignment,
    Call,
    Cond,
    CondEntry,
    ContentPayload,
    FunctionDef,
    InteractionProgram,
    LINK,
    LISTBOX,
    Node,
    Seq,
    Switch,
    SwitchCase,
    Terminal,
    Vocabulary,
    WHITE_BOX,
    called_functions,
    close_assignment,
    guard_vars,
)

# Path step used when a promoted body lands in a chain's else position.
OTHERWISE_STEP = "(otherwise)"

# (old position, new position) pairs describing where constructs moved.
PathEntries = list[tuple[tuple[str, ...], tuple[str, ...]]]


def _prefixed(entries: PathEntries, old: Optional[str], new: Optional[str]) -> PathEntries:
    old_prefix = () if old is None else (old,)
    new_prefix = () if new is None else (new,)
    return [(old_prefix + o, new_prefix + n) for o, n in entries]


def _shift(entries: PathEntries, old: str, new: str) -> PathEntries:
    """Record the body position itself plus everything below it."""
    return [((old,), (new,))] + _prefixed(entries, old, new)


def _promoted(entries: PathEntries, old: str) -> PathEntries:
    """A body replaced its own construct: its position moves up one step."""
    out = _prefixed(entries, old, None)
    out.append(((old,), ()))
    return out


def external_call_content(name: str) -> ContentPayload:
    """Deterministic stand-in emitted when an opaque external call runs."""
    return ContentPayload.of(text=f"[external:{name}]")


def _run(node: Node, values: Mapping, table: Mapping[str, FunctionDef]) -> list[ContentPayload]:
    """Reference interpreter: ordered terminal content under total values."""
    out: list[ContentPayload] = []

    def walk(n: Node) -> None:
        if isinstance(n, Terminal):
            out.append(n.content)
        elif isinstance(n, Seq):
            for child in n.children:
                walk(child)
        elif isinstance(n, Cond):
            for entry in n.chain:
                if all(values[g] for g in entry.guards):
                    walk(entry.body)
                    return
            if n.fallback is not None:
                walk(n.fallback)
        elif isinstance(n, Switch):
            for case in n.cases:
                if values[case.guard]:
                    walk(case.body)
                    return
        elif isinstance(n, Call):
            fn = table[n.function]
            if fn.body is None:
                out.append(external_call_content(n.function))
            else:
                walk(fn.body)

    walk(node)
    return out


def total_evaluate(
    program: InteractionProgram, assignment: Assignment
) -> list[ContentPayload]:
    """Run the program to completion under a total assignment.

    Every variable that still occurs as a guard must be bound; extra bindings
    are ignored.  Returns the ordered terminal content reached.
    """
    table = program.function_table
    needed = guard_vars(program.root, table)
    values = assignment.as_dict
    missing = sorted(v.key for v in needed if v not in values)
    if missing:
        raise IncompleteAssignmentError(
            f"assignment leaves guards unbound: {', '.join(missing)}"
        )
    return _run(program.root, values, table)


# --------------------------------------------------------------------------
# Partial evaluation


def _specialize_node(
    node: Node, values: dict, table: Mapping[str, FunctionDef]
) -> tuple[Node, PathEntries]:
    """Specialize one node; returns the residual and the construct moves.

    The residual mirrors the input structure one-to-one apart from
    promotions, so empty branches stay observable until optimization.
    """
    if isinstance(node, Terminal):
        return node, []
    if isinstance(node, Seq):
        children = []
        entries: PathEntries = []
        for i, child in enumerate(node.children):
            new_child, sub = _specialize_node(child, values, table)
            step = f"#{i}"
            children.append(new_child)
            entries.extend(_shift(sub, step, step))
        return Seq(tuple(children)), entries
    if isinstance(node, Cond):
        kept: list[CondEntry] = []
        entries = []
        for entry in node.chain:
            states = [values.get(g) for g in entry.guards]
            if any(v is False for v in states):
                continue
            body, sub = _specialize_node(entry.body, values, table)
            if all(v is True for v in states):
                if kept:
                    # Earlier guards are still open, so the decided branch
                    # can only fire once they are all false: it is the else.
                    entries.extend(_shift(sub, entry.label, OTHERWISE_STEP))
                    return Cond(tuple(kept), fallback=body), entries
                entries.extend(_promoted(sub, entry.label))
                return body, entries
            unbound = tuple(g for g, v in zip(entry.guards, states) if v is None)
            new_entry = CondEntry(guards=unbound, body=body)
            entries.extend(_shift(sub, entry.label, new_entry.label))
            kept.append(new_entry)
        if node.fallback is not None:
            fallback, sub = _specialize_node(node.fallback, values, table)
            if kept:
                entries.extend(_shift(sub, OTHERWISE_STEP, OTHERWISE_STEP))
                return Cond(tuple(kept), fallback=fallback), entries
            entries.extend(_promoted(sub, OTHERWISE_STEP))
            return fallback, entries
        if not kept:
            return Seq(()), entries
        return Cond(tuple(kept), fallback=None), entries
    if isinstance(node, Switch):
        kept_cases: list[SwitchCase] = []
        entries = []
        for case in node.cases:
            state = values.get(case.guard)
            if state is False:
                continue
            body, sub = _specialize_node(case.body, values, table)
            if state is True:
                if kept_cases:
                    chain = tuple(
                        CondEntry(guards=(c.guard,), body=c.body) for c in kept_cases
                    )
                    entries.extend(_shift(sub, case.guard.key, OTHERWISE_STEP))
                    return Cond(chain, fallback=body), entries
                entries.extend(_promoted(sub, case.guard.key))
                return body, entries
            entries.extend(_shift(sub, case.guard.key, case.guard.key))
            kept_cases.append(SwitchCase(case.guard, body))
        if not kept_cases:
            return Seq(()), entries
        return Switch(node.category, tuple(kept_cases)), entries
    if isinstance(node, Call):
        fn = table[node.function]
        touched = any(values.get(p) is not None for p in fn.params)
        if node.boxing == WHITE_BOX:
            # White boxes are transparent: once any parameter is known the
            # body is inlined and specialized.  An untouched call stays put.
            if not touched:
                return node, []
            body, _ = _specialize_node(fn.body, values, table)
            return body, []
        # Black boxes stay opaque: keep the call verbatim, except that a call
        # whose every parameter is bound is replaced by its full evaluation.
        if fn.params and all(values.get(p) is not None for p in fn.params):
            if fn.body is None:
                return node, []
            contents = _run(fn.body, values, table)
            return Seq(tuple(Terminal(c) for c in contents)), []
        return node, []
    raise TypeError(f"unknown node {node!r}")


def _kept_variables(
    root: Node,
    table: Mapping[str, FunctionDef],
    vocabulary: Vocabulary,
    decided: Assignment,
) -> set:
    """Vocabulary survivors: remaining guards, their group mates (so later
    closures still see the exclusions), decided variables, and taxonomy
    ancestors of everything kept."""
    keep = set(guard_vars(root, table))
    for member in list(keep):
        group = vocabulary.group_of(member)
        if group:
            keep.update(group)
    keep.update(v for v, _ in decided)
    for var in list(keep):
        keep.update(vocabulary.ancestors(var))
    return keep


def _rebuild_hints(hints: Mapping[str, str], entries: PathEntries) -> dict[str, str]:
    mapping: dict[tuple[str, ...], tuple[str, ...]] = {(): ()}
    for old, new in entries:
        mapping[old] = new
    out: dict[str, str] = {}
    for path, hint in hints.items():
        key = tuple(path.split("/")) if path else ()
        if key in mapping:
            out["/".join(mapping[key])] = hint
    return out


def partial_evaluate(
    program: InteractionProgram,
    assignment: Assignment,
    *,
    taxonomy_expand: bool = False,
) -> InteractionProgram:
    """Specialize a program against an assignment.

    The assignment is closed first (strict dichotomy semantics, optional
    taxonomy expansion); unknown variables and conflicts with already-decided
    bindings raise.  The output is the raw residual; run
    :func:`optimize_residual` before presenting it.
    """
    closed = close_assignment(
        assignment, program.vocabulary, taxonomy_expand=taxonomy_expand
    )
    merged = program.decided.union(closed)
    values = merged.as_dict
    table = program.function_table
    root, entries = _specialize_node(program.root, values, table)

    kept_functions = called_functions(root, table)
    functions = {name: table[name] for name in sorted(kept_functions)}
    keep = _kept_variables(root, functions, program.vocabulary, merged)
    return InteractionProgram.build(
        root=root,
        vocabulary=program.vocabulary.restricted_to(keep),
        functions=functions,
        widget_hints=_rebuild_hints(program.hint_table, entries),
        decided=merged.restrict(keep),
    )


def incremental_pe(
    program: InteractionProgram,
    assignment: Assignment,
    *,
    taxonomy_expand: bool = False,
) -> InteractionProgram:
    """Alias for specializing a residual one more step.

    Residuals carry their decided bindings, so composing steps in any
    consistent order reaches the same program as a single combined step.
    """
    return partial_evaluate(program, assignment, taxonomy_expand=taxonomy_expand)


# --------------------------------------------------------------------------
# Residual optimization


def node_count(node: Node) -> int:
    if isinstance(node, (Terminal, Call)):
        return 1
    if isinstance(node, Seq):
        return 1 + sum(node_count(c) for c in node.children)
    if isinstance(node, Cond):
        n = 1 + sum(node_count(e.body) for e in node.chain)
        if node.fallback is not None:
            n += node_count(node.fallback)
        return n
    if isinstance(node, Switch):
        return 1 + sum(node_count(c.body) for c in node.cases)
    raise TypeError(f"unknown node {node!r}")


def _one_declared_group(heads, vocabulary: Vocabulary) -> bool:
    groups = {vocabulary.group_of(h) for h in heads}
    return None not in groups and len(groups) == 1


def _collapse_chain(node: Node, entries: PathEntries) -> tuple[Node, PathEntries]:
    """Fold nested single-choice conditionals into one multi-guard entry."""
    while (
        isinstance(node, Cond)
        and len(node.chain) == 1
        and node.fallback is None
        and isinstance(node.chain[0].body, Cond)
        and len(node.chain[0].body.chain) == 1
        and node.chain[0].body.fallback is None
    ):
        outer = node.chain[0]
        inner = outer.body.chain[0]
        merged = CondEntry(guards=outer.guards + inner.guards, body=inner.body)
        remapped: PathEntries = []
        for old, new in entries:
            if new and new[0] == outer.label:
                if len(new) == 1:
                    continue  # the inner construct's own slot disappears
                if new[1] == inner.label:
                    remapped.append((old, (merged.label,) + new[2:]))
                else:
                    remapped.append((old, (merged.label,) + new[1:]))
            else:
                remapped.append((old, new))
        entries = remapped
        node = Cond((merged,), fallback=None)
    return node, entries


def _optimize_node(
    node: Node, vocabulary: Vocabulary
) -> tuple[Optional[Node], PathEntries]:
    """Bottom-up cleanup; returns None for a subtree with nothing to show.

    Empty arms are dropped only where declared dichotomies (or the arm being
    last) make the drop unobservable under group-consistent assignments.
    """
    if isinstance(node, (Terminal, Call)):
        return node, []
    if isinstance(node, Seq):
        # Each pending item: (maps_own_position, old step, node, sub-entries).
        pending: list[tuple[bool, str, Node, PathEntries]] = []
        for i, child in enumerate(node.children):
            new_child, sub = _optimize_node(child, vocabulary)
            if new_child is None:
                continue
            if isinstance(new_child, Seq):
                # Splice nested sequence children into this one.  The nested
                # construct itself vanishes, so only inner positions map.
                for j, grand in enumerate(new_child.children):
                    inner = [
                        (old, new[1:]) for old, new in sub if new and new[0] == f"#{j}"
                    ]
                    pending.append((False, f"#{i}", grand, inner))
                continue
            pending.append((True, f"#{i}", new_child, sub))
        if not pending:
            return None, []
        if len(pending) == 1:
            own, old_step, only, sub = pending[0]
            entries = _prefixed(sub, old_step, None)
            if own:
                entries.append(((old_step,), ()))
            return only, entries
        entries: PathEntries = []
        children = []
        for j, (own, old_step, child, sub) in enumerate(pending):
            children.append(child)
            if own:
                entries.append(((old_step,), (f"#{j}",)))
            entries.extend(_prefixed(sub, old_step, f"#{j}"))
        return Seq(tuple(children)), entries
    if isinstance(node, Cond):
        optimized = [
            (entry, *_optimize_node(entry.body, vocabulary)) for entry in node.chain
        ]
        fallback: Optional[Node] = None
        fb_entries: PathEntries = []
        if node.fallback is not None:
            fallback, fb_entries = _optimize_node(node.fallback, vocabulary)
        exclusive = all(len(e.guards) == 1 for e in node.chain) and _one_declared_group(
            [e.guards[0] for e in node.chain], vocabulary
        )
        survivors: list[tuple[CondEntry, PathEntries]] = []
        for idx, (entry, body, sub) in enumerate(optimized):
            if body is not None:
                survivors.append((CondEntry(entry.guards, body), sub))
                continue
            later_live = any(b is not None for _, b, _ in optimized[idx + 1 :])
            droppable = fallback is None and (not later_live or exclusive)
            if droppable:
                continue
            survivors.append((CondEntry(entry.guards, Seq(())), sub))
        if not survivors:
            if fallback is not None:
                return fallback, _promoted(fb_entries, OTHERWISE_STEP)
            return None, []
        entries = []
        for entry, sub in survivors:
            entries.extend(_shift(sub, entry.label, entry.label))
        if fallback is not None:
            entries.extend(_shift(fb_entries, OTHERWISE_STEP, OTHERWISE_STEP))
        result: Node = Cond(tuple(e for e, _ in survivors), fallback=fallback)
        return _collapse_chain(result, entries)
    if isinstance(node, Switch):
        processed = [
            (case, *_optimize_node(case.body, vocabulary)) for case in node.cases
        ]
        exclusive = _one_declared_group([c.guard for c in node.cases], vocabulary)
        kept: list[tuple[SwitchCase, PathEntries]] = []
        for idx, (case, body, sub) in enumerate(processed):
            if body is not None:
                kept.append((SwitchCase(case.guard, body), sub))
                continue
            later_live = any(b is not None for _, b, _ in processed[idx + 1 :])
            if not later_live or exclusive:
                continue
            kept.append((SwitchCase(case.guard, Seq(())), sub))
        if not kept:
            return None, []
        entries = []
        for case, sub in kept:
            entries.extend(_shift(sub, case.guard.key, case.guard.key))
        if len(kept) == 1:
            # A one-option listbox is just a link: rewrite to a conditional.
            case, _ = kept[0]
            single: Node = Cond((CondEntry((case.guard,), case.body),), fallback=None)
            return _collapse_chain(single, entries)
        return Switch(node.category, tuple(c for c, _ in kept)), entries
    raise TypeError(f"unknown node {node!r}")


def _downgrade_hints(hints: dict[str, str], root: Node) -> dict[str, str]:
    """Listbox hints pointing at constructs that are no longer switches
    downgrade to links."""
    switch_paths: set[str] = set()

    def walk(node: Node, path: tuple[str, ...]) -> None:
        if isinstance(node, Seq):
            for i, child in enumerate(node.children):
                walk(child, path + (f"#{i}",))
        elif isinstance(node, Cond):
            for entry in node.chain:
                walk(entry.body, path + (entry.label,))
            if node.fallback is not None:
                walk(node.fallback, path + (OTHERWISE_STEP,))
        elif isinstance(node, Switch):
            switch_paths.add("/".join(path))
            for case in node.cases:
                walk(case.body, path + (case.guard.key,))

    walk(root, ())
    return {
        path: (LINK if hint == LISTBOX and path not in switch_paths else hint)
        for path, hint in hints.items()
    }


def optimize_residual(program: InteractionProgram) -> InteractionProgram:
    """Clean a residual for presentation without changing its meaning.

    Removes branches that can never show content, collapses single-choice
    chains into one node carrying the joined guard path, and rewrites a
    one-case switch as a conditional (downgrading its widget hint).  The
    result evaluates identically on every group-consistent completion and
    never has more nodes than the input.  Idempotent.
    """
    root, entries = _optimize_node(program.root, program.vocabulary)
    if root is None:
        root = Seq(())
    table = program.function_table
    kept_functions = called_functions(root, table)
    functions = {name: table[name] for name in sorted(kept_functions)}
    keep = _kept_variables(root, functions, program.vocabulary, program.decided)
    hints = _rebuild_hints(program.hint_table, entries)
    return InteractionProgram.build(
        root=root,
        vocabulary=program.vocabulary.restricted_to(keep),
        functions=functions,
        widget_hints=_downgrade_hints(hints, root),
        decided=program.decided.restrict(keep),
    )
