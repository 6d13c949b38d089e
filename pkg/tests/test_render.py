"""Page-tree rendering and site emission."""

import random
import re
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from sitefold.ir import (
    Assignment,
    Cond,
    CondEntry,
    ContentPayload,
    InteractionProgram,
    Seq,
    Terminal,
    Var,
    Vocabulary,
    canonical_parse,
)
from sitefold.render import (
    ACCUMULATE,
    CombiningFunction,
    MOST_RECENT,
    Page,
    emit_site,
    render,
    tree_dump,
)
from sitefold.specialize import partial_evaluate, total_evaluate

from strategies import make_program, random_partial_assignment


def _auto(fixtures_dir):
    return canonical_parse((fixtures_dir / "automobile.ir.json").read_bytes())


def _chain_program():
    vars_ = [Var("Blue"), Var("2001"), Var("Honda")]
    return InteractionProgram.build(
        root=Cond(
            (
                CondEntry(
                    (vars_[0],),
                    Cond(
                        (
                            CondEntry(
                                (vars_[1],),
                                Cond(
                                    (
                                        CondEntry(
                                            (vars_[2],),
                                            Terminal(ContentPayload.of(text="the car")),
                                        ),
                                    )
                                ),
                            ),
                        )
                    ),
                ),
            )
        ),
        vocabulary=Vocabulary.build(vars_),
    )


def test_residual_renders_two_level_tree(fixtures_dir):
    program = _auto(fixtures_dir)
    residual = partial_evaluate(
        program, Assignment.of({Var("2001"): True})
    )
    tree = render(residual)
    assert sorted(c.label for c in tree.root.choices) == ["Blue", "Red"]
    blue = next(c for c in tree.root.choices if c.label == "Blue")
    assert sorted(c.label for c in blue.target.choices) == ["Honda", "Toyota"]
    leaf = blue.target.choices[0].target
    assert leaf.choices == ()
    assert any("2001" in (c.text or "") for c in leaf.content)


def test_single_terminal_renders_one_page():
    program = InteractionProgram.build(
        root=Terminal(ContentPayload.of(text="just this")),
        vocabulary=Vocabulary.build([]),
    )
    tree = render(program)
    assert tree.root.choices == ()
    assert [c.text for c in tree.root.content] == ["just this"]


def test_collapsed_chain_renders_direct_link():
    tree = render(_chain_program())
    assert len(tree.root.choices) == 1
    choice = tree.root.choices[0]
    assert choice.label == "Blue 2001 Honda"
    assert [c.text for c in choice.target.content] == ["the car"]


def test_combining_modes():
    # Three steps deep with content at every step.
    leaf = Terminal(ContentPayload.of(text="c3"))
    inner = Seq((Terminal(ContentPayload.of(text="c2")),
                 Cond((CondEntry((Var("b"),), leaf),))))
    root = Seq((Terminal(ContentPayload.of(text="c1")),
                Cond((CondEntry((Var("a"),), inner),))))
    program = InteractionProgram.build(
        root=root, vocabulary=Vocabulary.build([Var("a"), Var("b")])
    )
    accumulated = render(program, CombiningFunction(ACCUMULATE))
    deep = accumulated.root.choices[0].target.choices[0].target
    assert [c.text for c in deep.summary] == ["c1", "c2", "c3"]
    recent = render(program, CombiningFunction(MOST_RECENT, 1))
    deep = recent.root.choices[0].target.choices[0].target
    assert [c.text for c in deep.summary] == ["c3"]


def test_fully_bound_summary_matches_total_evaluation(fixtures_dir):
    program = _auto(fixtures_dir)
    values = {v: False for v in program.vocabulary.variables}
    for name in ("Red", "2000", "Toyota"):
        values[program.vocabulary.match_token(name)] = True
    sigma = Assignment.of(values)
    residual = partial_evaluate(program, sigma)
    tree = render(residual)
    assert tree.root.choices == ()
    assert list(tree.root.summary) == total_evaluate(residual, Assignment())


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 30_000), st.integers(0, 2))
def test_no_dead_end_pages(seed, salt):
    program = make_program(seed)
    rng = random.Random(seed + salt)
    residual = partial_evaluate(program, random_partial_assignment(rng, program))
    tree = render(residual)

    def check(page: Page, is_root: bool) -> None:
        if not is_root:
            assert page.choices or page.content
        for choice in page.choices:
            if choice.target is not None:
                check(choice.target, False)

    check(tree.root, True)


def test_no_intermediate_single_choice_pages(fixtures_dir):
    # After optimization, no page funnels through one choice with nothing
    # else on it.
    program = _chain_program()
    tree = render(program)

    def check(page: Page) -> None:
        for choice in page.choices:
            if choice.target is None:
                continue
            inner = choice.target
            if inner.choices and len(inner.choices) == 1:
                assert inner.content, f"bare single-choice page {inner.path_labels}"
            check(inner)

    check(tree.root)


def test_render_deterministic(fixtures_dir):
    program = _auto(fixtures_dir)
    assert tree_dump(render(program)) == tree_dump(render(program))


def test_single_page_mode(fixtures_dir):
    program = _auto(fixtures_dir)
    residual = partial_evaluate(program, Assignment.of({Var("2001"): True}))
    tree = render(residual, single_page=True)
    labels = [c.label for c in tree.root.choices]
    assert "Blue Honda" in labels and "Red Toyota" in labels
    assert all(c.target.content for c in tree.root.choices)


# -- emission -----------------------------------------------------------------

def test_emit_two_page_tree(tmp_path):
    program = InteractionProgram.build(
        root=Cond(
            (CondEntry((Var("go"),), Terminal(ContentPayload.of(text="inner"))),)
        ),
        vocabulary=Vocabulary.build([Var("go")]),
    )
    written = emit_site(render(program), tmp_path)
    html = [p for p in written if p.suffix == ".html"]
    assert len(html) == 2
    index = (tmp_path / "index.html").read_text()
    assert 'href="go.html"' in index
    assert 'id="choice:go"' in index


def test_emit_is_deterministic(tmp_path, fixtures_dir):
    program = _auto(fixtures_dir)
    tree = render(program)
    first = {p.name: p.read_bytes() for p in emit_site(tree, tmp_path / "a")}
    second = {p.name: p.read_bytes() for p in emit_site(tree, tmp_path / "b")}
    assert {n: v for n, v in first.items()} == {n: v for n, v in second.items()}


def test_emitted_site_is_navigable(tmp_path, fixtures_dir):
    program = _auto(fixtures_dir)
    residual = partial_evaluate(program, Assignment.of({Var("2001"): True}))
    emit_site(render(residual), tmp_path)
    seen = set()
    frontier = ["index.html"]
    while frontier:
        name = frontier.pop()
        if name in seen:
            continue
        seen.add(name)
        page = (tmp_path / name).read_text()
        for target in re.findall(r'href="([^"]+\.html)"', page):
            assert (tmp_path / target).exists(), f"broken link {target} in {name}"
            frontier.append(target)
    # Blue -> Honda -> leaf must be reachable.
    assert "blue.html" in seen and "blue-honda.html" in seen
