"""Core IR: canonical form, token matching, assignment closure."""

import pytest
from hypothesis import given, settings, strategies as st

from sitefold.errors import (
    AmbiguousTokenError,
    DuplicateVariableError,
    InconsistentAssignmentError,
    ParseError,
    UndeclaredGuardError,
    UnknownVariableError,
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
    close_assignment,
    programs_equal,
)

from strategies import make_program


def _vocab(*names, groups=(), taxonomy=None):
    return Vocabulary.build([Var(n) for n in names],
                            [[Var(n) for n in g] for g in groups],
                            {Var(p): {Var(c) for c in cs} for p, cs in (taxonomy or {}).items()})


# -- canonical form ---------------------------------------------------------

def test_round_trip_identity_on_fixture(fixtures_dir):
    data = (fixtures_dir / "automobile.ir.json").read_bytes()
    program = canonical_parse(data)
    assert canonical_serialize(program) == data


def test_determinism_across_insertion_orders():
    vocab_a = Vocabulary.build([Var("a"), Var("b")], [[Var("a"), Var("b")]])
    vocab_b = Vocabulary.build([Var("b"), Var("a")], [[Var("b"), Var("a")]])
    body = Terminal(ContentPayload.of(text="x"))
    p1 = InteractionProgram.build(
        root=Cond((CondEntry((Var("a"),), body), CondEntry((Var("b"),), body))),
        vocabulary=vocab_a,
        widget_hints={"a": "link", "b": "link"},
    )
    p2 = InteractionProgram.build(
        root=Cond((CondEntry((Var("a"),), body), CondEntry((Var("b"),), body))),
        vocabulary=vocab_b,
        widget_hints={"b": "link", "a": "link"},
    )
    assert canonical_serialize(p1) == canonical_serialize(p2)


def test_automobile_fixture_guard_levels(fixtures_dir):
    program = canonical_parse((fixtures_dir / "automobile.ir.json").read_bytes())
    assert len(program.vocabulary.variables) == 6
    # Level one: colors; level two: years; level three: models.
    root = program.root
    colors = root.children[1] if isinstance(root, Seq) else root
    assert {e.guards[0].name for e in colors.chain} == {"Blue", "Red"}
    years = colors.chain[0].body
    assert {e.guards[0].name for e in years.chain} == {"2000", "2001"}
    models = years.chain[0].body
    assert {e.guards[0].name for e in models.chain} == {"Honda", "Toyota"}


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_round_trip_random_programs(seed):
    program = make_program(seed)
    data = canonical_serialize(program)
    again = canonical_parse(data)
    assert canonical_serialize(again) == data
    assert programs_equal(program, again)


def test_parse_rejects_undeclared_guard():
    text = """
    {"root": {"kind": "cond", "chain": [{"guards": ["Green"],
               "body": {"kind": "terminal", "content": {"text": "x"}}}]},
     "vocabulary": {"variables": [{"name": "Blue"}]}}
    """
    with pytest.raises(UndeclaredGuardError):
        canonical_parse(text)


def test_parse_rejects_duplicate_variable():
    text = """
    {"root": {"kind": "terminal", "content": {"text": "x"}},
     "vocabulary": {"variables": [{"name": "Blue"}, {"name": "Blue"}]}}
    """
    with pytest.raises(DuplicateVariableError):
        canonical_parse(text)


def test_parse_empty_input_is_syntax_error():
    with pytest.raises(ParseError):
        canonical_parse(b"")


def test_parse_reports_line_and_column():
    with pytest.raises(ParseError) as err:
        canonical_parse(b'{"root": }')
    assert err.value.line == 1
    assert err.value.column is not None


# -- token matching ---------------------------------------------------------

def test_match_qualified_and_bare_tokens():
    vocab = Vocabulary.build([Var("2001", "Year"), Var("Blue")])
    assert vocab.match_token("Year=2001") == Var("2001", "Year")
    assert vocab.match_token("2001") == Var("2001", "Year")
    assert vocab.match_token("Blue") == Var("Blue")
    assert vocab.match_token("Green") is None


def test_match_ambiguous_bare_token():
    vocab = Vocabulary.build([Var("2001", "Year"), Var("2001", "Mileage")])
    with pytest.raises(AmbiguousTokenError):
        vocab.match_token("2001")
    assert vocab.match_token("Year=2001") == Var("2001", "Year")


def test_unqualified_matching_can_be_disabled():
    vocab = Vocabulary.build([Var("2001", "Year")])
    assert vocab.match_token("2001", allow_unqualified=False) is None


# -- closure ----------------------------------------------------------------

def test_close_strict_dichotomy():
    vocab = _vocab("2000", "2001", groups=[("2000", "2001")])
    closed = close_assignment(Assignment.of({Var("2001"): True}), vocab)
    assert closed.as_dict == {Var("2001"): True, Var("2000"): False}


def test_close_taxonomy_expansion():
    vocab = _vocab("Honda", "JapaneseAutomakers",
                   taxonomy={"JapaneseAutomakers": ("Honda",)})
    closed = close_assignment(
        Assignment.of({Var("Honda"): True}), vocab, taxonomy_expand=True
    )
    assert closed.as_dict == {
        Var("Honda"): True,
        Var("JapaneseAutomakers"): True,
    }
    # Off by default.
    plain = close_assignment(Assignment.of({Var("Honda"): True}), vocab)
    assert plain.as_dict == {Var("Honda"): True}


def test_close_empty_assignment():
    vocab = _vocab("a", "b", groups=[("a", "b")])
    assert close_assignment(Assignment(), vocab) == Assignment()


def test_close_conflicting_trues_in_group():
    vocab = _vocab("Blue", "Red", groups=[("Blue", "Red")])
    with pytest.raises(InconsistentAssignmentError):
        close_assignment(
            Assignment.of({Var("Blue"): True, Var("Red"): True}), vocab
        )


def test_close_rejects_unknown_variable():
    vocab = _vocab("a")
    with pytest.raises(UnknownVariableError):
        close_assignment(Assignment.of({Var("zz"): True}), vocab)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.data())
def test_close_idempotent_and_monotone(seed, data):
    program = make_program(seed)
    vocab = program.vocabulary
    grouped = sorted(v for g in vocab.dichotomies for v in g)
    values = {}
    for group in vocab.dichotomies:
        members = sorted(group)
        pick = data.draw(st.sampled_from([None] + members))
        if pick is not None:
            values[pick] = True
    sigma = Assignment.of(values)
    closed = close_assignment(sigma, vocab)
    assert set(sigma.as_dict.items()) <= set(closed.as_dict.items())
    assert close_assignment(closed, vocab) == closed


def test_assignment_union_conflict():
    a = Assignment.of({Var("x"): True})
    b = Assignment.of({Var("x"): False})
    with pytest.raises(InconsistentAssignmentError):
        a.union(b)


def test_variable_token_validation():
    with pytest.raises(ParseError):
        Var("")
    with pytest.raises(ParseError):
        Var("a=b")
    with pytest.raises(ParseError):
        Var("a/b")


def test_taxonomy_cycle_rejected():
    with pytest.raises(ParseError):
        Vocabulary.build(
            [Var("a"), Var("b")],
            taxonomy={Var("a"): {Var("b")}, Var("b"): {Var("a")}},
        )
