"""Bundled fixture generation.

Everything the tests and the CLI walkthrough rely on is generated here,
deterministically, with the composition spelled out in data so the counts
can be audited without running anything.

Congressional roster composition
--------------------------------
The synthetic roster models the 2001 congress shape:

* 55 regions: 50 states plus five delegate regions (District of Columbia,
  Puerto Rico, Guam, U.S. Virgin Islands, American Samoa).
* 100 senators: two per state.  14 states have a split delegation (one
  Democrat, one Republican); the other 36 send a same-party pair.
* 440 House members: 435 seats apportioned across the states (1 in South
  Dakota up to 52 in California) plus one delegate per delegate region.
  13 states send a single-party House group (including every one-seat
  state; Vermont's lone member is an Independent); the remaining 37 send
  both major parties.

Site-shape arithmetic (what expansion must produce):

* original tree: 1 root + 55 region pages + 540 member pages = 596 nodes
* expanded facet levels: branch nodes 50 + 55 = 105; party nodes
  (36 + 2 * 14) + (13 + 2 * 37 + 5) = 64 + 92 = 156
* expanded total: 1 + 55 + 105 + 156 internal = 317, plus the same 540
  leaves = 857 nodes on 5 levels.
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from .analysis import ExaminerModel, ExaminerRequest, RESTRUCTURE, SELECTION, examiner_model_to_json
from .ir import (
    Assignment,
    Cond,
    CondEntry,
    ContentPayload,
    InteractionProgram,
    Seq,
    Switch,
    SwitchCase,
    Terminal,
    Var,
    Vocabulary,
    canonical_serialize,
)
from .schema import SiteSchema, SchemaEdge, SchemaNode, dump_schema, expand_node

# ---------------------------------------------------------------------------
# Automobile lot (the running example)

COLORS = ("Blue", "Red")
YEARS = ("2001", "2000")
MODELS = ("Honda", "Toyota")


def automobile_schema() -> SiteSchema:
    """Three-level browsing hierarchy: color, then year, then model."""
    nodes = [SchemaNode(id="lot", terminal=ContentPayload.of(text="Vehicle listings"))]
    edges = []
    for color in COLORS:
        cid = f"lot/{color}"
        nodes.append(SchemaNode(id=cid))
        edges.append(SchemaEdge("lot", cid, Var(color)))
        for year in YEARS:
            yid = f"{cid}/{year}"
            nodes.append(SchemaNode(id=yid))
            edges.append(SchemaEdge(cid, yid, Var(year)))
            for model in MODELS:
                mid = f"{yid}/{model}"
                nodes.append(
                    SchemaNode(
                        id=mid,
                        terminal=ContentPayload.of(
                            text=f"{color} {year} {model} inventory",
                            link=f"https://lot.example/{color}-{year}-{model}".lower(),
                        ),
                    )
                )
                edges.append(SchemaEdge(yid, mid, Var(model)))
    schema = SiteSchema(
        root="lot",
        nodes=tuple(nodes),
        edges=tuple(edges),
        dichotomies=(
            frozenset(Var(c) for c in COLORS),
            frozenset(Var(y) for y in YEARS),
            frozenset(Var(m) for m in MODELS),
        ),
    )
    schema.validate()
    return schema


def automobile_program() -> InteractionProgram:
    from .schema import build_program

    return build_program(automobile_schema())


def _auto_leaf(color: str, year: str, model: str) -> Terminal:
    return Terminal(
        ContentPayload.of(
            text=f"{color} {year} {model} inventory",
            link=f"https://lot.example/{color}-{year}-{model}".lower(),
        )
    )


def automobile_expected_residual() -> InteractionProgram:
    """Hand-built residual for the year-2001 specialization.

    Constructed directly (not by running the evaluator) so the replication
    test has an independent expectation: the year level is gone, the model
    level is promoted, and the year bindings sit in the breadcrumb.
    """
    root_terminal = Terminal(ContentPayload.of(text="Vehicle listings"))

    def models_for(color: str) -> Cond:
        return Cond(
            tuple(
                CondEntry((Var(m),), _auto_leaf(color, "2001", m)) for m in MODELS
            )
        )

    root = Seq(
        (
            root_terminal,
            Cond(tuple(CondEntry((Var(c),), models_for(c)) for c in COLORS)),
        )
    )
    vocabulary = Vocabulary.build(
        [Var(v) for v in COLORS + YEARS + MODELS],
        [
            frozenset(Var(c) for c in COLORS),
            frozenset(Var(y) for y in YEARS),
            frozenset(Var(m) for m in MODELS),
        ],
    )
    return InteractionProgram.build(
        root=root,
        vocabulary=vocabulary,
        decided=Assignment.of({Var("2001"): True, Var("2000"): False}),
    )


def honda_binding_source() -> dict:
    """A file-backed stand-in for a recommender that likes one make."""
    return {"Honda": True}


# ---------------------------------------------------------------------------
# Congressional roster

# House seats per state under the 1990 apportionment (435 total).
STATE_SEATS = {
    "Alabama": 7, "Alaska": 1, "Arizona": 6, "Arkansas": 4, "California": 52,
    "Colorado": 6, "Connecticut": 6, "Delaware": 1, "Florida": 23,
    "Georgia": 11, "Hawaii": 2, "Idaho": 2, "Illinois": 20, "Indiana": 10,
    "Iowa": 5, "Kansas": 4, "Kentucky": 6, "Louisiana": 7, "Maine": 2,
    "Maryland": 8, "Massachusetts": 10, "Michigan": 16, "Minnesota": 8,
    "Mississippi": 5, "Missouri": 9, "Montana": 1, "Nebraska": 3,
    "Nevada": 2, "New Hampshire": 2, "New Jersey": 13, "New Mexico": 3,
    "New York": 31, "North Carolina": 12, "North Dakota": 1, "Ohio": 19,
    "Oklahoma": 6, "Oregon": 5, "Pennsylvania": 21, "Rhode Island": 2,
    "South Carolina": 6, "South Dakota": 1, "Tennessee": 9, "Texas": 30,
    "Utah": 3, "Vermont": 1, "Virginia": 11, "Washington": 9,
    "West Virginia": 3, "Wisconsin": 9, "Wyoming": 1,
}

DELEGATE_REGIONS = (
    "District of Columbia",
    "Puerto Rico",
    "Guam",
    "U.S. Virgin Islands",
    "American Samoa",
)

# 14 states with a split Senate delegation (one Democrat, one Republican).
SPLIT_SENATE = {
    "Arizona", "California", "Florida", "Georgia", "Illinois", "Indiana",
    "Iowa", "Louisiana", "Montana", "Nevada", "Oregon", "Pennsylvania",
    "Wisconsin", "Wyoming",
}

# 13 states whose whole House group shares one party; every one-seat state
# appears here, and Vermont's single member is an Independent.
SINGLE_PARTY_HOUSE = {
    "Alaska": "Republican",
    "Delaware": "Democrat",
    "Hawaii": "Democrat",
    "Idaho": "Republican",
    "Montana": "Republican",
    "Nebraska": "Republican",
    "New Hampshire": "Republican",
    "North Dakota": "Democrat",
    "Rhode Island": "Democrat",
    "South Dakota": "Democrat",
    "Utah": "Republican",
    "Vermont": "Independent",
    "Wyoming": "Republican",
}

DELEGATE_PARTY = {
    "District of Columbia": "Democrat",
    "Puerto Rico": "Democrat",
    "Guam": "Democrat",
    "U.S. Virgin Islands": "Democrat",
    "American Samoa": "Republican",
}

FIRST_NAMES = (
    "Avery", "Bailey", "Cameron", "Dana", "Ellis", "Frankie", "Gray",
    "Harper", "Indra", "Jordan", "Kendall", "Lane", "Marion", "Noor",
    "Oakley", "Parker", "Quinn", "Reese", "Sage", "Tatum", "Umber",
    "Vesper", "Winter", "Xen", "Yael", "Zion", "Arden", "Blair",
    "Corin", "Devon",
)

SURNAMES = (
    "Acosta", "Bennett", "Calloway", "Dorsey", "Eastman", "Fontaine",
    "Garrett", "Holloway", "Ibarra", "Jennings", "Kirkwood", "Lockhart",
    "Mercer", "Navarro", "Okafor", "Prescott", "Quintero", "Rutledge",
)


def _region_code(region: str) -> str:
    return "".join(w[0] for w in region.replace(".", "").split()).lower() + (
        region.split()[-1][:2].lower() if len(region.split()) == 1 else ""
    )


def congress_roster() -> list[dict]:
    """One entry per region with its member records.

    Every member record carries: id (node id), label/name, branch, party,
    district (null for senators), url.  540 members in all, each with a
    globally unique synthetic name.
    """
    regions = sorted(STATE_SEATS) + list(DELEGATE_REGIONS)
    names = [f"{f} {s}" for s in SURNAMES for f in FIRST_NAMES]
    assert len(names) == 540 and len(set(names)) == 540
    next_name = iter(names)
    roster = []
    for index, region in enumerate(regions):
        code = f"r{index:02d}"
        members = []
        if region in STATE_SEATS:
            if region in SPLIT_SENATE:
                senate_parties = ["Democrat", "Republican"]
            else:
                senate_parties = (
                    ["Democrat", "Democrat"] if index % 2 == 0 else ["Republican", "Republican"]
                )
            for k, party in enumerate(senate_parties, start=1):
                name = next(next_name)
                members.append(
                    {
                        "id": f"{code}-sen-{k}",
                        "label": name,
                        "name": name,
                        "branch": "Senate",
                        "party": party,
                        "district": None,
                    }
                )
            seats = STATE_SEATS[region]
            single = SINGLE_PARTY_HOUSE.get(region)
            for d in range(1, seats + 1):
                name = next(next_name)
                party = single if single else ("Democrat" if d % 2 == 1 else "Republican")
                members.append(
                    {
                        "id": f"{code}-rep-{d}",
                        "label": name,
                        "name": name,
                        "branch": "House",
                        "party": party,
                        "district": f"District {d}",
                    }
                )
        else:
            name = next(next_name)
            members.append(
                {
                    "id": f"{code}-rep-1",
                    "label": name,
                    "name": name,
                    "branch": "House",
                    "party": DELEGATE_PARTY[region],
                    "district": "District 1",
                }
            )
        roster.append({"region": region, "code": code, "members": members})

    # Audit the documented arithmetic before anything downstream trusts it.
    total_members = sum(len(r["members"]) for r in roster)
    assert total_members == 540, total_members
    branch_nodes = sum(
        len({m["branch"] for m in r["members"]}) for r in roster
    )
    assert branch_nodes == 105, branch_nodes
    party_nodes = sum(
        len({(m["branch"], m["party"]) for m in r["members"]}) for r in roster
    )
    assert party_nodes == 156, party_nodes
    assert 1 + len(roster) + branch_nodes + party_nodes == 317
    return roster


def congress_schema() -> SiteSchema:
    """The original three-level site: 1 root + 55 regions + 540 members."""
    roster = congress_roster()
    nodes = [
        SchemaNode(
            id="congress",
            terminal=ContentPayload.of(text="Congressional directory"),
        )
    ]
    edges = []
    state_labels = []
    for entry in roster:
        region, code = entry["region"], entry["code"]
        records = []
        for m in entry["members"]:
            records.append(
                {
                    "id": m["id"],
                    "label": m["label"],
                    "branch": m["branch"],
                    "party": m["party"],
                    "district": m["district"],
                }
            )
        nodes.append(
            SchemaNode(
                id=code,
                terminal=ContentPayload.of(text=f"{region} delegation"),
                records=tuple(tuple(sorted(r.items())) for r in records),
            )
        )
        label = Var(region, "state")
        state_labels.append(label)
        edges.append(SchemaEdge("congress", code, label, widget="listbox"))
        for m in entry["members"]:
            slug = m["name"].lower().replace(" ", "-")
            nodes.append(
                SchemaNode(
                    id=m["id"],
                    terminal=ContentPayload.of(
                        text=(
                            f"{m['name']}, {m['party']} "
                            f"({m['branch']}, {region})"
                        ),
                        link=f"https://officials.example/{code}/{slug}",
                    ),
                )
            )
            edges.append(SchemaEdge(code, m["id"], Var(m["name"])))
    schema = SiteSchema(
        root="congress",
        nodes=tuple(nodes),
        edges=tuple(edges),
        dichotomies=(frozenset(state_labels),),
    )
    schema.validate()
    assert len(schema.nodes) == 596, len(schema.nodes)
    return schema


EXPAND_FIELDS = ("branch", "party", "district")


def expanded_congress_schema(schema: SiteSchema | None = None) -> SiteSchema:
    """Within-page structure abstracted into branch/party/district levels."""
    schema = schema or congress_schema()
    for node in list(schema.nodes):
        if node.records:
            schema = expand_node(schema, node.id, EXPAND_FIELDS)
    return schema


def congress_program() -> InteractionProgram:
    from .schema import build_program

    return build_program(expanded_congress_schema())


def congress_generator_program() -> InteractionProgram:
    """The same space factored as data plus a site generator.

    The choice structure lives in a structure table (edge records); the only
    program parameters are which question category each level should ask.
    """
    categories = ("state", "branch", "party", "district")
    level_vars = {
        (k, cat): Var(cat, f"level{k}")
        for k in range(1, 5)
        for cat in categories
    }
    expanded = expanded_congress_schema()
    table_rows = [
        {"from": e.src, "to": e.dst, "variable": e.label.name}
        for e in expanded.edges
    ]
    structure_table = Terminal(
        ContentPayload.of(
            text="structure table: walked by the site generator",
            records=table_rows,
        )
    )

    def level_switch(k: int, remaining: tuple[str, ...]) -> "Switch":
        cases = []
        for cat in remaining:
            rest = tuple(c for c in remaining if c != cat)
            if rest:
                body = level_switch(k + 1, rest)
            else:
                order_note = f"site generated; final question level {k} asks {cat}"
                body = Terminal(ContentPayload.of(text=order_note))
            cases.append(SwitchCase(level_vars[(k, cat)], body))
        return Switch(f"level{k}", tuple(cases))

    root = Seq((structure_table, level_switch(1, categories)))
    vocabulary = Vocabulary.build(
        level_vars.values(),
        [
            frozenset(level_vars[(k, cat)] for cat in categories)
            for k in range(1, 5)
        ],
    )
    return InteractionProgram.build(root=root, vocabulary=vocabulary)


def votesmart_examiner_model() -> ExaminerModel:
    """32 requests: 25 selections realizable on the interaction factoring,
    6 restructurings (question-order changes), and one request outside the
    modeled vocabulary entirely."""
    selections = [
        ["Virginia"],
        ["California", "Senate"],
        ["Democrat"],
        ["House", "Republican"],
        ["District 9"],
        ["Texas", "House", "Democrat"],
        ["Senate"],
        ["New York", "House"],
        ["party=Republican"],
        ["Wyoming", "Senate"],
        ["Florida", "District 23"],
        ["state=Ohio", "branch=House"],
        ["Pennsylvania", "Democrat"],
        ["Guam"],
        ["Vermont", "Independent"],
        ["Michigan", "House", "District 16"],
        ["Illinois", "Senate", "Republican"],
        ["Montana", "House"],
        ["District 1"],
        ["Washington", "Republican"],
        ["Massachusetts", "House", "Democrat"],
        ["Senate", "Democrat"],
        ["Puerto Rico", "House"],
        ["Colorado", "District 6"],
        ["Maryland", "House", "Republican"],
    ]
    restructures = [
        (1, "party"),
        (1, "branch"),
        (2, "district"),
        (1, "district"),
        (2, "party"),
        (3, "branch"),
    ]
    requests: list[ExaminerRequest] = []
    for tokens in selections:
        requests.append(ExaminerRequest(kind=SELECTION, tokens=tuple(tokens)))
    for level, category in restructures:
        requests.append(
            ExaminerRequest(kind=RESTRUCTURE, level=level, category=category)
        )
    requests.append(
        ExaminerRequest(
            kind=SELECTION,
            tokens=("Los Angeles",),
            out_of_model=True,
            note="cities are not part of the modeled vocabulary",
        )
    )
    assert len(requests) == 32
    return ExaminerModel(tuple(requests))


# ---------------------------------------------------------------------------
# Mathematical software catalog (feature-complete selection space)

PDE_LEVELS = (
    ("class", ("Elliptic", "Hyperbolic", "Parabolic")),
    ("operator", ("General", "Helmholtz", "Laplace", "Self-Adjoint")),
    ("boundary", ("Dirichlet", "Mixed", "Neumann")),
    ("package", ("ELLPACK", "IMSL", "NAG")),
)


def pde_schema() -> SiteSchema:
    """Full cross product of solver features, so any mixed selection of
    feature values is reachable."""
    nodes = [
        SchemaNode(
            id="pde",
            terminal=ContentPayload.of(text="Solver feature index"),
        )
    ]
    edges = []

    def grow(node_id: str, depth: int, chosen: tuple[str, ...]) -> None:
        if depth == len(PDE_LEVELS):
            return
        field_name, values = PDE_LEVELS[depth]
        for value in values:
            child = f"{node_id}/{value}"
            terminal = None
            if depth == len(PDE_LEVELS) - 1:
                module = "-".join(chosen + (value,)).lower()
                terminal = ContentPayload.of(
                    text=f"module {module}",
                    link=f"https://repository.example/{module}",
                )
            nodes.append(SchemaNode(id=child, terminal=terminal))
            edges.append(
                SchemaEdge(node_id, child, Var(value, field_name), widget="listbox")
            )
            grow(child, depth + 1, chosen + (value,))

    grow("pde", 0, ())
    groups = [
        frozenset(Var(v, field_name) for v in values)
        for field_name, values in PDE_LEVELS
    ]
    schema = SiteSchema(
        root="pde", nodes=tuple(nodes), edges=tuple(edges), dichotomies=tuple(groups)
    )
    schema.validate()
    return schema


def pde_program() -> InteractionProgram:
    from .schema import build_program

    return build_program(pde_schema())


def pde_examiner_model() -> ExaminerModel:
    """35 feature selections; the space is a full cross product, so every
    combination of distinct-category values is realizable."""
    singles = [
        [v] for _, values in PDE_LEVELS for v in values
    ]  # 13 requests
    pairs = [
        ["Elliptic", "Laplace"],
        ["Elliptic", "Dirichlet"],
        ["Parabolic", "Neumann"],
        ["Hyperbolic", "General"],
        ["Laplace", "ELLPACK"],
        ["Helmholtz", "NAG"],
        ["Dirichlet", "IMSL"],
        ["Neumann", "ELLPACK"],
        ["Elliptic", "NAG"],
        ["Parabolic", "General"],
        ["Self-Adjoint", "Dirichlet"],
        ["Mixed", "IMSL"],
        ["Hyperbolic", "package=NAG"],
        ["operator=Laplace", "boundary=Dirichlet"],
        ["Parabolic", "Self-Adjoint"],
    ]  # 15 requests
    triples = [
        ["Elliptic", "Self-Adjoint", "Dirichlet"],
        ["Elliptic", "Laplace", "ELLPACK"],
        ["Parabolic", "General", "Neumann"],
        ["Hyperbolic", "Helmholtz", "Mixed"],
        ["Elliptic", "Helmholtz", "NAG"],
        ["Parabolic", "Laplace", "IMSL"],
        ["class=Elliptic", "boundary=Mixed", "package=ELLPACK"],
    ]  # 7 requests
    requests = [
        ExaminerRequest(kind=SELECTION, tokens=tuple(tokens))
        for tokens in singles + pairs + triples
    ]
    assert len(requests) == 35
    return ExaminerModel(tuple(requests))


# ---------------------------------------------------------------------------
# Compaction walkthrough graph

def compaction_crawl_schema() -> SiteSchema:
    """A crawl tree exercising all three compaction stages.

    Two crawls of page p3 (nodes p3, p4) collapse as duplicates; p1 and p2
    merge under typing because both sit behind an e-labeled edge from an
    S2-type page and link via i to the same module page; p6 only repeats the
    s5-to-m2/m3 connections already embodied in p5 and p7, so the roles
    stage deletes it.
    """
    text = ContentPayload.of
    nodes = [
        SchemaNode("r", terminal=text(text="crawl start")),
        SchemaNode("s2a", designation="S2a", terminal=text(text="section two, spring crawl")),
        SchemaNode("s2b", designation="S2b", terminal=text(text="section two, fall crawl")),
        SchemaNode("s5", designation="S5", terminal=text(text="section five")),
        SchemaNode("p1", designation="P1", terminal=text(text="product list one")),
        SchemaNode("p2", designation="P2", terminal=text(text="product list two")),
        SchemaNode("p3", designation="P3", terminal=text(text="product list three")),
        SchemaNode("p4", designation="P3", terminal=text(text="product list three")),
        SchemaNode("p5", designation="P5", terminal=text(text="picks five")),
        SchemaNode("p6", designation="P6"),
        SchemaNode("p7", designation="P7", terminal=text(text="picks seven")),
    ]
    for mid, label in (
        ("m1a", "module one"), ("m1b", "module one"),
        ("m1c", "module one"), ("m1d", "module one"),
        ("m2a", "module two"), ("m2b", "module two"),
        ("m3a", "module three"), ("m3b", "module three"),
    ):
        nodes.append(
            SchemaNode(mid, designation=mid[:2].upper(), terminal=text(text=label))
        )
    edges = [
        SchemaEdge("r", "s2a", Var("g")),
        SchemaEdge("r", "s2b", Var("h")),
        SchemaEdge("r", "s5", Var("k")),
        SchemaEdge("s2a", "p1", Var("e")),
        SchemaEdge("s2a", "p3", Var("f")),
        SchemaEdge("s2b", "p2", Var("e")),
        SchemaEdge("s2b", "p4", Var("f")),
        SchemaEdge("p1", "m1a", Var("i")),
        SchemaEdge("p2", "m1b", Var("i")),
        SchemaEdge("p3", "m1c", Var("j")),
        SchemaEdge("p4", "m1d", Var("j")),
        SchemaEdge("s5", "p5", Var("p")),
        SchemaEdge("s5", "p6", Var("q")),
        SchemaEdge("s5", "p7", Var("t")),
        SchemaEdge("p5", "m2a", Var("i")),
        SchemaEdge("p6", "m2b", Var("i")),
        SchemaEdge("p6", "m3a", Var("j")),
        SchemaEdge("p7", "m3b", Var("i")),
    ]
    schema = SiteSchema(root="r", nodes=tuple(nodes), edges=tuple(edges))
    schema.validate()
    return schema


# ---------------------------------------------------------------------------
# Information integration (brokerage feeding a quote index)

BROKERAGE_PICKS = {
    "Growth": "Microsoft",
    "Income": "General Electric",
    "Balanced": "Coca-Cola",
}

TICKERS = {"Microsoft": "MSFT", "General Electric": "GE", "Coca-Cola": "KO"}


def brokerage_program() -> InteractionProgram:
    cases = tuple(
        SwitchCase(
            Var(profile, "profile"),
            Terminal(ContentPayload.of(text=company)),
        )
        for profile, company in sorted(BROKERAGE_PICKS.items())
    )
    root = Switch("profile", cases)
    vocabulary = Vocabulary.build(
        [Var(p, "profile") for p in BROKERAGE_PICKS],
        [frozenset(Var(p, "profile") for p in BROKERAGE_PICKS)],
    )
    return InteractionProgram.build(
        root=root, vocabulary=vocabulary, widget_hints={"": "listbox"}
    )


def quotes_program() -> InteractionProgram:
    views = ("Chart", "Profile")
    cases = []
    for company, ticker in sorted(TICKERS.items()):
        view_cases = tuple(
            SwitchCase(
                Var(view, "view"),
                Terminal(
                    ContentPayload.of(
                        text=f"{ticker} {view.lower()} data",
                        link=f"https://quotes.example/{ticker}/{view.lower()}",
                    )
                ),
            )
            for view in views
        )
        cases.append(SwitchCase(Var(ticker, "ticker"), Switch("view", view_cases)))
    root = Switch("ticker", tuple(cases))
    tick_vars = [Var(t, "ticker") for t in sorted(TICKERS.values())]
    view_vars = [Var(v, "view") for v in views]
    vocabulary = Vocabulary.build(
        tick_vars + view_vars,
        [frozenset(tick_vars), frozenset(view_vars)],
    )
    return InteractionProgram.build(
        root=root, vocabulary=vocabulary, widget_hints={"": "listbox"}
    )


def brokerage_xref() -> dict[str, str]:
    return {company: f"ticker={ticker}" for company, ticker in TICKERS.items()}


# ---------------------------------------------------------------------------
# Writing everything out


def write_all(out_dir: Path | str) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    def put_bytes(name: str, data: bytes) -> None:
        path = out / name
        path.write_bytes(data)
        written.append(path)

    def put_json(name: str, doc) -> None:
        text = json.dumps(doc, sort_keys=True, ensure_ascii=False, indent=1)
        put_bytes(name, (text + "\n").encode("utf-8"))

    put_bytes("automobile.schema.json", dump_schema(automobile_schema()))
    put_bytes("automobile.ir.json", canonical_serialize(automobile_program()))
    put_bytes(
        "automobile.expected-2001.ir.json",
        canonical_serialize(automobile_expected_residual()),
    )
    put_json("automobile.recommendation.json", honda_binding_source())

    put_bytes("congress.schema.json", dump_schema(congress_schema()))
    put_bytes("congress.expanded.schema.json", dump_schema(expanded_congress_schema()))
    put_bytes("congress.ir.json", canonical_serialize(congress_program()))
    put_bytes(
        "congress-generator.ir.json",
        canonical_serialize(congress_generator_program()),
    )
    put_json(
        "examiner-votesmart.json",
        examiner_model_to_json(votesmart_examiner_model()),
    )

    put_bytes("pde.schema.json", dump_schema(pde_schema()))
    put_bytes("pde.ir.json", canonical_serialize(pde_program()))
    put_json("examiner-pde.json", examiner_model_to_json(pde_examiner_model()))

    put_bytes("compaction-crawl.schema.json", dump_schema(compaction_crawl_schema()))

    put_bytes("brokerage.ir.json", canonical_serialize(brokerage_program()))
    put_bytes("quotes.ir.json", canonical_serialize(quotes_program()))
    put_json("brokerage-xref.json", brokerage_xref())
    return written


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Regenerate bundled fixtures.")
    parser.add_argument(
        "--out", default="fixtures", help="output directory (default: fixtures)"
    )
    args = parser.parse_args(argv)
    written = write_all(args.out)
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
