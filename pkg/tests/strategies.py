"""Random program generation shared by property tests and the oracle suite.

Programs come out valid by construction: chain guards stay inside one
dichotomy group, switch cases share their category, function bodies only
guard on declared parameters, and the vocabulary is trimmed to what the tree
can still reach.
"""

from __future__ import annotations

import random
from itertools import product

from sitefold.ir import (
    Assignment,
    BLACK_BOX,
    Call,
    Cond,
    CondEntry,
    ContentPayload,
    FunctionDef,
    InteractionProgram,
    Seq,
    Switch,
    SwitchCase,
    Terminal,
    Var,
    Vocabulary,
    WHITE_BOX,
    called_functions,
)
from sitefold.specialize import _kept_variables


def make_program(
    seed: int,
    *,
    max_vars: int = 10,
    max_depth: int = 5,
    allow_calls: bool = True,
) -> InteractionProgram:
    rng = random.Random(seed)
    nvars = rng.randint(2, max_vars)
    variables = [Var(f"v{i}") for i in range(nvars)]

    # Carve disjoint dichotomy groups of size 2-3 out of the variable pool.
    pool = variables[:]
    rng.shuffle(pool)
    groups: list[list[Var]] = []
    while len(pool) >= 2 and rng.random() < 0.8:
        size = min(len(pool), rng.choice([2, 2, 3]))
        groups.append([pool.pop() for _ in range(size)])
    free = pool

    # Some groups become categorized so switches have material to work on.
    categorized: list[tuple[str, list[Var]]] = []
    final_groups: list[list[Var]] = []
    renamed: dict[Var, Var] = {}
    for gi, group in enumerate(groups):
        if rng.random() < 0.5:
            category = f"c{gi}"
            new_group = [Var(v.name, category) for v in group]
            for old, new in zip(group, new_group):
                renamed[old] = new
            categorized.append((category, new_group))
            final_groups.append(new_group)
        else:
            final_groups.append(group)
    variables = [renamed.get(v, v) for v in variables]
    free = [renamed.get(v, v) for v in free]

    counter = [0]
    functions: dict[str, FunctionDef] = {}

    def terminal() -> Terminal:
        counter[0] += 1
        return Terminal(ContentPayload.of(text=f"t{counter[0]}"))

    def gen(depth: int, guard_pool: list[Var], calls_ok: bool) -> "object":
        if depth >= max_depth or rng.random() < 0.25:
            return terminal()
        roll = rng.random()
        if roll < 0.20:
            return Seq(
                tuple(
                    gen(depth + 1, guard_pool, calls_ok)
                    for _ in range(rng.randint(1, 3))
                )
            )
        if roll < 0.35 and categorized:
            choices = [
                (category, [m for m in members if m in guard_pool])
                for category, members in categorized
            ]
            choices = [(c, usable) for c, usable in choices if usable]
            if choices:
                category, usable = rng.choice(choices)
                cases = rng.sample(usable, rng.randint(1, len(usable)))
                return Switch(
                    category,
                    tuple(
                        SwitchCase(g, gen(depth + 1, guard_pool, calls_ok))
                        for g in cases
                    ),
                )
        if roll < 0.42 and calls_ok and functions:
            name = rng.choice(sorted(functions))
            if functions[name].body is not None and rng.random() < 0.5:
                boxing = WHITE_BOX
            else:
                boxing = BLACK_BOX
            return Call(name, boxing)
        # Conditional chain: one dichotomy group, or a single ungrouped var.
        chain_groups = [
            [v for v in g if v in guard_pool]
            for g in final_groups
            if any(v in guard_pool for v in g)
        ]
        free_usable = [v for v in free if v in guard_pool]
        if chain_groups and (rng.random() < 0.75 or not free_usable):
            usable = rng.choice(chain_groups)
            heads = rng.sample(usable, rng.randint(1, len(usable)))
        elif free_usable:
            heads = [rng.choice(free_usable)]
        else:
            return terminal()
        fallback = gen(depth + 1, guard_pool, calls_ok) if rng.random() < 0.3 else None
        return Cond(
            tuple(
                CondEntry((g,), gen(depth + 1, guard_pool, calls_ok)) for g in heads
            ),
            fallback=fallback,
        )

    if allow_calls and rng.random() < 0.4 and len(variables) >= 3:
        for fi in range(rng.randint(1, 2)):
            params = rng.sample(variables, rng.randint(1, min(3, len(variables))))
            if rng.random() < 0.25:
                body = None  # external
            else:
                body = gen(max_depth - 1, params, False)
            functions[f"f{fi}"] = FunctionDef(params=tuple(params), body=body)

    root = gen(0, variables, True)
    vocab = Vocabulary.build(variables, final_groups)
    called = called_functions(root, functions)
    kept_fns = {name: functions[name] for name in sorted(called)}
    kept = _kept_variables(root, kept_fns, vocab, Assignment())
    return InteractionProgram.build(
        root=root,
        vocabulary=vocab.restricted_to(kept),
        functions=kept_fns,
        widget_hints={},
    )


def random_partial_assignment(rng: random.Random, program: InteractionProgram) -> Assignment:
    """A consistent partial assignment: at most one true per group."""
    vocab = program.vocabulary
    values: dict[Var, bool] = {}
    for group in vocab.dichotomies:
        roll = rng.random()
        members = sorted(group)
        if roll < 0.3:
            values[rng.choice(members)] = True
        elif roll < 0.5:
            for m in members:
                if rng.random() < 0.4:
                    values[m] = False
    grouped = {v for g in vocab.dichotomies for v in g}
    for var in sorted(vocab.variables - grouped):
        roll = rng.random()
        if roll < 0.2:
            values[var] = True
        elif roll < 0.4:
            values[var] = False
    return Assignment.of(values)


def consistent_completions(program: InteractionProgram, base: Assignment, cap: int = 5000):
    """All closed total assignments extending ``base``; None when over cap."""
    vocab = program.vocabulary
    fixed = base.as_dict
    grouped_vars = {v for g in vocab.dichotomies for v in g}
    blocks: list[list[dict[Var, bool]]] = []
    for group in vocab.dichotomies:
        members = sorted(group)
        options: list[dict[Var, bool]] = []
        candidates = [None] + members  # None: every member false
        for chosen in candidates:
            option = {m: (m == chosen) for m in members}
            if all(fixed.get(m) is None or fixed[m] == val for m, val in option.items()):
                options.append(option)
        if not options:
            return []
        blocks.append(options)
    for var in sorted(vocab.variables - grouped_vars):
        if var in fixed:
            blocks.append([{var: fixed[var]}])
        else:
            blocks.append([{var: False}, {var: True}])
    total = 1
    for b in blocks:
        total *= len(b)
        if total > cap:
            return None
    out = []
    for combo in product(*blocks):
        merged: dict[Var, bool] = dict(fixed)
        for option in combo:
            merged.update(option)
        out.append(Assignment.of(merged))
    return out
