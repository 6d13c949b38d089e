"""Request resolution, classification, and personability reports."""

import pytest

from sitefold.analysis import (
    COMPLETE_EVAL,
    ExaminerModel,
    ExaminerRequest,
    MIXED,
    PARTIAL_EVAL,
    RESTRUCTURE,
    SELECTION,
    UNREALIZABLE,
    WELL_FACTORED,
    classify_request,
    evaluate_model,
    load_examiner_model,
    resolve_request,
)
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
    canonical_serialize,
)


def _auto(fixtures_dir):
    return canonical_parse((fixtures_dir / "automobile.ir.json").read_bytes())


def _selection(*tokens):
    return ExaminerRequest(kind=SELECTION, tokens=tokens)


# -- resolution ---------------------------------------------------------------

def test_resolve_bare_token(fixtures_dir):
    program = _auto(fixtures_dir)
    res = resolve_request(_selection("2001"), program)
    assert res.resolved
    assert res.bindings.as_dict == {Var("2001"): True}


def test_resolve_qualified_token_on_categorized_modeling():
    year_vars = [Var(y, "Year") for y in ("2000", "2001")]
    program = InteractionProgram.build(
        root=Cond(
            tuple(
                CondEntry((v,), Terminal(ContentPayload.of(text=v.name)))
                for v in year_vars
            )
        ),
        vocabulary=Vocabulary.build(year_vars, [year_vars]),
    )
    qualified = resolve_request(_selection("Year=2001"), program)
    bare = resolve_request(_selection("2001"), program)
    assert qualified.bindings == bare.bindings
    assert qualified.bindings.as_dict == {Var("2001", "Year"): True}


def test_resolve_missing_level_variable(fixtures_dir):
    program = _auto(fixtures_dir)
    request = ExaminerRequest(kind=RESTRUCTURE, level=2, category="year")
    res = resolve_request(request, program)
    assert not res.resolved
    assert res.unmatched == ("level2=year",)


def test_resolve_unmatched_token_reported(fixtures_dir):
    program = _auto(fixtures_dir)
    res = resolve_request(_selection("Occupancy"), program)
    assert not res.resolved
    assert res.unmatched == ("Occupancy",)


# -- classification ------------------------------------------------------------

def test_selection_on_interaction_factoring_is_partial(fixtures_dir):
    program = _auto(fixtures_dir)
    assert classify_request(_selection("2001"), program) == PARTIAL_EVAL


def test_selection_via_structure_table_is_complete(fixtures_dir):
    generator = canonical_parse(
        (fixtures_dir / "congress-generator.ir.json").read_bytes()
    )
    cls = classify_request(_selection("Virginia", "Senate"), generator)
    assert cls == COMPLETE_EVAL


def test_restructure_on_interaction_factoring_unrealizable(fixtures_dir):
    program = canonical_parse((fixtures_dir / "congress.ir.json").read_bytes())
    request = ExaminerRequest(kind=RESTRUCTURE, level=2, category="party")
    assert classify_request(request, program) == UNREALIZABLE


def test_restructure_on_generator_factoring_partial(fixtures_dir):
    generator = canonical_parse(
        (fixtures_dir / "congress-generator.ir.json").read_bytes()
    )
    request = ExaminerRequest(kind=RESTRUCTURE, level=2, category="party")
    assert classify_request(request, generator) == PARTIAL_EVAL


def test_inconsistent_selection_unrealizable(fixtures_dir):
    program = _auto(fixtures_dir)
    assert classify_request(_selection("Blue", "Red"), program) == UNREALIZABLE


def test_empty_residual_unrealizable():
    # Everything lives under Red; selecting Blue excludes it all, leaving a
    # residual with nothing to show.
    colors = [Var("Blue"), Var("Red")]
    program = InteractionProgram.build(
        root=Cond(
            (CondEntry((colors[1],), Terminal(ContentPayload.of(text="red stock"))),)
        ),
        vocabulary=Vocabulary.build(colors, [colors]),
    )
    assert classify_request(_selection("Blue"), program) == UNREALIZABLE


def test_selection_keeping_only_intermediate_content_is_partial(fixtures_dir):
    # No Independent senators exist, but the specialized space still shows
    # the delegation pages, so the realization itself succeeds.
    program = canonical_parse((fixtures_dir / "congress.ir.json").read_bytes())
    cls = classify_request(_selection("Senate", "Independent"), program)
    assert cls == PARTIAL_EVAL


# -- reports --------------------------------------------------------------------

def test_trivial_model_is_well_factored(fixtures_dir):
    program = _auto(fixtures_dir)
    model = ExaminerModel((_selection("Blue"),))
    report = evaluate_model(model, program)
    assert report.verdict == WELL_FACTORED
    assert report.summary_line() == "personability 1/1"


def test_votesmart_report(fixtures_dir):
    program = canonical_parse((fixtures_dir / "congress.ir.json").read_bytes())
    model = load_examiner_model((fixtures_dir / "examiner-votesmart.json").read_bytes())
    report = evaluate_model(model, program)
    assert report.summary_line() == "personability 25/32"
    assert report.verdict == MIXED
    out_of_model = [r for r, _ in report.classes if r.out_of_model]
    assert len(out_of_model) == 1
    assert dict(report.classes)[out_of_model[0]] == UNREALIZABLE


def test_classification_stable_under_canonicalization(fixtures_dir):
    program = canonical_parse((fixtures_dir / "congress.ir.json").read_bytes())
    again = canonical_parse(canonical_serialize(program))
    model = load_examiner_model((fixtures_dir / "examiner-votesmart.json").read_bytes())
    first = [cls for _, cls in evaluate_model(model, program).classes]
    second = [cls for _, cls in evaluate_model(model, again).classes]
    assert first == second


def test_relabeling_invariance(fixtures_dir):
    program = _auto(fixtures_dir)
    mapping = {
        "Blue": "Azure", "Red": "Crimson", "2000": "y2000", "2001": "y2001",
        "Honda": "Hx", "Toyota": "Tx",
    }
    text = canonical_serialize(program).decode()
    for old, new in mapping.items():
        text = text.replace(f'"{old}"', f'"{new}"')
        text = text.replace(f'"text":"{old} ', f'"text":"{new} ')
    renamed = canonical_parse(text)
    for tokens in (("Blue",), ("Blue", "Honda"), ("2001",)):
        original_cls = classify_request(_selection(*tokens), program)
        renamed_cls = classify_request(
            _selection(*[mapping[t] for t in tokens]), renamed
        )
        assert original_cls == renamed_cls


def test_partial_survives_disjoint_branch_addition(fixtures_dir):
    program = _auto(fixtures_dir)
    request = _selection("2001")
    assert classify_request(request, program) == PARTIAL_EVAL
    extra = Var("Financing")
    extended = InteractionProgram.build(
        root=Seq(
            (
                program.root,
                Cond(
                    (
                        CondEntry(
                            (extra,), Terminal(ContentPayload.of(text="loan options"))
                        ),
                    )
                ),
            )
        ),
        vocabulary=Vocabulary.build(
            set(program.vocabulary.variables) | {extra},
            program.vocabulary.dichotomies,
        ),
        functions=program.function_table,
        widget_hints={},
    )
    assert classify_request(request, extended) == PARTIAL_EVAL


def test_personability_bounds(fixtures_dir):
    program = canonical_parse((fixtures_dir / "congress.ir.json").read_bytes())
    model = load_examiner_model((fixtures_dir / "examiner-votesmart.json").read_bytes())
    report = evaluate_model(model, program)
    assert 0 <= float(report.personability) <= 1
    assert sum(report.counts.values()) == len(report.classes)


def test_report_table_output(fixtures_dir):
    program = _auto(fixtures_dir)
    model = ExaminerModel((_selection("Blue"), _selection("Occupancy")))
    report = evaluate_model(model, program)
    table = report.format_table()
    assert "personability 1/2" in table
    assert "verdict: mixed" in table
