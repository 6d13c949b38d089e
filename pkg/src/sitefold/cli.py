"""Command-line driver.

Verbs mirror the pipeline: build a program from a schema, compact or expand
schemas, specialize programs, render them as a site, score them against an
examiner model, cascade two programs, or serve one over HTTP.

Exit status: 0 success, 1 usage error, 2 domain error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .analysis import evaluate_model, load_examiner_model
from .errors import SitefoldError
from .ir import Assignment, Var, canonical_parse, canonical_serialize
from .render import CombiningFunction, emit_site, render
from .schema import (
    apply_binding_source,
    build_program,
    cascade,
    compact,
    dump_schema,
    expand_node,
    load_schema,
)
from .specialize import partial_evaluate

USAGE_EXIT = 1
DOMAIN_EXIT = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse default exits with 2
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)


def _read(path: str) -> bytes:
    return Path(path).read_bytes()


def _write(path: str, data: bytes) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_bytes(data)


def _cmd_build(args) -> int:
    schema = load_schema(_read(args.schema))
    program = build_program(schema)
    _write(args.output, canonical_serialize(program))
    print(f"wrote {args.output}")
    return 0


def _cmd_compact(args) -> int:
    schema = load_schema(_read(args.schema))
    stages = [s.strip() for s in args.stages.split(",") if s.strip()]
    compacted, report = compact(schema, stages)
    _write(args.output, dump_schema(compacted))
    if args.report:
        _write(
            args.report,
            (json.dumps(report.to_json(), indent=1, sort_keys=True) + "\n").encode(),
        )
    print(
        f"wrote {args.output} "
        f"({len(schema.nodes)} -> {len(compacted.nodes)} nodes, "
        f"{len(report.merges)} merges, {len(report.deletions)} deletions)"
    )
    return 0


def _cmd_expand(args) -> int:
    schema = load_schema(_read(args.schema))
    fields = [f.strip() for f in args.by.split(",") if f.strip()]
    for node_id in args.node:
        schema = expand_node(schema, node_id, fields)
    _write(args.output, dump_schema(schema))
    print(f"wrote {args.output} ({len(schema.nodes)} nodes)")
    return 0


def _cmd_pe(args) -> int:
    program = canonical_parse(_read(args.program))
    values: dict[Var, bool] = {}
    for token in args.set or []:
        var = program.vocabulary.match_token(token)
        if var is None:
            raise SitefoldError(f"unknown token {token!r}")
        values[var] = True
    residual = partial_evaluate(
        program, Assignment.of(values), taxonomy_expand=args.taxonomy_expand
    )
    _write(args.output, canonical_serialize(residual))
    print(f"wrote {args.output}")
    return 0


def _cmd_render(args) -> int:
    program = canonical_parse(_read(args.program))
    combine = CombiningFunction.parse(args.combine)
    tree = render(program, combine, single_page=args.single_page)
    written = emit_site(tree, args.output)
    print(f"wrote {len(written)} files under {args.output}")
    return 0


def _cmd_analyze(args) -> int:
    program = canonical_parse(_read(args.program))
    model = load_examiner_model(_read(args.examiner))
    report = evaluate_model(model, program)
    if args.json:
        print(json.dumps(report.to_json(), indent=1, sort_keys=True))
    else:
        print(report.format_table())
    return 0


def _cmd_cascade(args) -> int:
    upstream = canonical_parse(_read(args.upstream))
    downstream = canonical_parse(_read(args.downstream))
    xref = json.loads(_read(args.xref).decode("utf-8"))
    composite = cascade(upstream, xref, downstream)
    _write(args.output, canonical_serialize(composite))
    print(f"wrote {args.output}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    program = canonical_parse(_read(args.program))
    app = create_app(program, cors_origin=args.cors, check_replay=args.check_replay)
    port = int(os.environ.get("SITEFOLD_PORT", args.port))
    uvicorn.run(app, host=args.host, port=port, log_level="warning")
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sitefold", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="compile a site schema into a program")
    p.add_argument("schema")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=_cmd_build)

    p = sub.add_parser("compact", help="compact a site schema")
    p.add_argument("schema")
    p.add_argument("--stages", default="collapse,typing")
    p.add_argument("--report")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=_cmd_compact)

    p = sub.add_parser("expand", help="expand node records into facet levels")
    p.add_argument("schema")
    p.add_argument("--node", action="append", required=True)
    p.add_argument("--by", required=True, help="comma-separated field list")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=_cmd_expand)

    p = sub.add_parser("pe", help="specialize a program against tokens")
    p.add_argument("program")
    p.add_argument("--set", action="append", metavar="TOKEN")
    p.add_argument("--taxonomy-expand", action="store_true")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=_cmd_pe)

    p = sub.add_parser("render", help="emit a program as a browsable site")
    p.add_argument("program")
    p.add_argument("--combine", default="accumulate", help="accumulate | recent:k")
    p.add_argument("--single-page", action="store_true")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=_cmd_render)

    p = sub.add_parser("analyze", help="score a program against an examiner model")
    p.add_argument("program")
    p.add_argument("--examiner", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=_cmd_analyze)

    p = sub.add_parser("cascade", help="splice a downstream program after terminals")
    p.add_argument("upstream")
    p.add_argument("downstream")
    p.add_argument("--xref", required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=_cmd_cascade)

    p = sub.add_parser("serve", help="serve a program over HTTP")
    p.add_argument("program")
    p.add_argument("--port", type=int, default=8350)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--cors", metavar="ORIGIN")
    p.add_argument("--check-replay", action="store_true")
    p.set_defaults(fn=_cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except SitefoldError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DOMAIN_EXIT
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DOMAIN_EXIT


if __name__ == "__main__":
    raise SystemExit(main())
