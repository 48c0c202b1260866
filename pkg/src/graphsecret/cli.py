"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 invalid input, 3 internal
consistency violation.  Errors are reported on stderr as one line,
``graphsecret: <kind>: <reason>``.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from graphsecret.access import (
    DEFAULT_ENUMERATION_BOUND,
    analyze,
    check_bound_lemmas,
    decide,
    qq_access,
    require_vertices,
    threshold_report,
)
from graphsecret.errors import ConsistencyViolation, InvalidInput, SizeBoundExceeded
from graphsecret.gf2 import SolutionCapExceeded
from graphsecret.graph import FAMILIES, Protocol, conjugate_graph, generate, members, vertex_set
from graphsecret.io import (
    dumps,
    load_pattern,
    load_protocol,
    pattern_from_dict,
    protocol_to_dict,
    read_json,
)
from graphsecret.mbqc.gflow import find_flow, find_gflow, verify_gflow
from graphsecret.mbqc.pointless import theorem4_check
from graphsecret.oracle import privacy_check
from graphsecret.verify import mutate_full_set_witness, run_suite

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_CONSISTENCY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with status 2
        raise UsageError(message)


def _ids(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(tok) for tok in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated vertex ids, got {text!r}") from None


def _text_sets(sets: list[list[int]]) -> str:
    return " ".join("{" + ",".join(map(str, s)) + "}" for s in sets) or "(none)"


# ---------------------------------------------------------------------------
# verbs; each returns (json document, text lines)


def cmd_analyze(args):
    p = load_protocol(args.file)
    report = analyze(p, args.max_n).to_json_dict()
    lines = [
        f"acc_minimal ({len(report['acc_minimal'])}): {_text_sets(report['acc_minimal'])}",
        f"blk_minimal ({len(report['blk_minimal'])}): {_text_sets(report['blk_minimal'])}",
        f"k_access={report['k_access']} k_privacy={report['k_privacy']} threshold={report['is_threshold']}",
    ]
    lines += [f"lemma {c['lemma']}: applicable={c['applicable']} holds={c['holds']}" for c in report["lemma_checks"]]
    return report, lines


def cmd_decide(args):
    p = load_protocol(args.file)
    s = require_vertices(p.graph, args.set)
    if args.mode == "cc":
        verdict = decide(p, s)
        doc = {"set": members(s), "mode": "cc", "verdict": verdict.status, "witness": members(verdict.witness)}
    else:
        answer = qq_access(p, s)
        base = decide(p, s)
        conj = Protocol(conjugate_graph(p.graph, p.encoding), p.encoding)
        doc = {
            "set": members(s),
            "mode": "qq",
            "verdict": answer,
            "witness": members(base.witness),
            "conjugate_verdict": decide(conj, s).status,
            "conjugate_witness": members(decide(conj, s).witness),
        }
    return doc, [f"{doc['verdict']} witness={_text_sets([doc['witness']])}"]


def cmd_oracle(args):
    p = load_protocol(args.file)
    s = require_vertices(p.graph, args.set)
    verdict = privacy_check(p, s)
    return {"set": members(s), "verdict": verdict}, [verdict]


def cmd_conjugate(args):
    p = load_protocol(args.file)
    doc = protocol_to_dict(Protocol(conjugate_graph(p.graph, p.encoding), p.encoding))
    return doc, [f"n={doc['n']} edges={doc['edges']} encoding={doc['encoding']}"]


def cmd_thresholds(args):
    p = load_protocol(args.file)
    report = threshold_report(p, args.max_n)
    doc = {
        "n": report.n,
        "k_access": report.k_access,
        "k_privacy": report.k_privacy,
        "is_threshold": report.is_threshold,
        "k": report.k,
        "lemma_checks": [c.as_dict() for c in check_bound_lemmas(p, report)],
    }
    kind = f"({report.k},{report.n}) threshold" if report.is_threshold else "not a threshold"
    return doc, [f"{kind}: k_access={report.k_access} k_privacy={report.k_privacy}"]


def _open_graph(path):
    doc = read_json(path)
    if not isinstance(doc, dict):
        raise InvalidInput("open graph document must be a JSON object")
    full = {"angles": {}, "x_corrections": {}, "z_corrections": {}, **doc}
    if "angles" not in doc:
        # only the graph and the I/O sets matter here; give every measured qubit angle 0
        outputs = set(doc.get("outputs", []))
        n = doc.get("n", 0)
        if isinstance(n, int):
            full["angles"] = {str(v): 0.0 for v in range(n) if v not in outputs}
    pat = pattern_from_dict(full)
    return pat.graph, vertex_set(pat.inputs), vertex_set(pat.outputs)


def cmd_gflow(args):
    graph, inputs, outputs = _open_graph(args.file)
    flow = find_flow(graph, inputs, outputs)
    gf = find_gflow(graph, inputs, outputs)
    if gf is not None and not verify_gflow(graph, inputs, outputs, gf):
        raise ConsistencyViolation("constructed gflow fails verification")
    doc = {
        "gflow_exists": gf is not None,
        "causal_flow_exists": flow is not None,
        "gflow": gf.to_json_dict() if gf is not None else None,
    }
    return doc, [f"gflow={doc['gflow_exists']} causal_flow={doc['causal_flow_exists']}"]


def cmd_pointless(args):
    pat = load_pattern(args.file)
    u = args.qubit
    if not 0 <= u < pat.n:
        raise InvalidInput(f"qubit {u} does not exist")
    s = None if args.set is None else require_vertices(pat.graph, args.set)
    result = theorem4_check(pat, u, s)
    doc = {
        "qubit": u,
        "pointless": result.semantic,
        "residual_flow": result.residual_flow,
        "condition_a": None if result.condition_a is None else members(result.condition_a),
        "condition_b": result.condition_b,
        "conditions_predict": result.predicted,
    }
    return doc, [f"qubit {u}: pointless={result.semantic} conditions={result.predicted}"]


def cmd_gen(args):
    g = generate(args.family, args.n)
    encoding = g.vertices if args.encoding is None else require_vertices(g, args.encoding)
    doc = protocol_to_dict(Protocol(g, encoding))
    return doc, [f"n={doc['n']} edges={doc['edges']} encoding={doc['encoding']}"]


def cmd_verify_suite(args):
    if args.max_n < 1:
        raise InvalidInput("--max-n must be at least 1")
    if args.max_n > 8:
        raise SizeBoundExceeded("--max-n above 8 is outside the quantum cross-check range")
    hook = mutate_full_set_witness if args.inject_fault else None
    doc = run_suite(args.max_n, args.seed, hook).to_json_dict()
    lines = [f"{key}: {value}" for key, value in doc.items()]
    return doc, lines


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="graphsecret", description="Graph-state secret sharing analysis.")
    parser.add_argument("--text", action="store_true", help="human-readable output instead of JSON")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def add(name, func, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--text", action="store_true", default=argparse.SUPPRESS)
        sp.set_defaults(func=func)
        return sp

    sp = add("analyze", cmd_analyze, "minimal access/blocking sets and threshold report")
    sp.add_argument("file")
    sp.add_argument("--max-n", type=int, default=DEFAULT_ENUMERATION_BOUND)

    sp = add("decide", cmd_decide, "decide one player set")
    sp.add_argument("file")
    sp.add_argument("--set", type=_ids, required=True, help="comma-separated vertex ids")
    sp.add_argument("--mode", choices=("cc", "qq"), default="cc")

    sp = add("oracle", cmd_oracle, "density-matrix verdict for one player set")
    sp.add_argument("file")
    sp.add_argument("--set", type=_ids, required=True)

    sp = add("conjugate", cmd_conjugate, "complement the graph over the encoding set")
    sp.add_argument("file")

    sp = add("thresholds", cmd_thresholds, "threshold classification with bound lemmas")
    sp.add_argument("file")
    sp.add_argument("--max-n", type=int, default=DEFAULT_ENUMERATION_BOUND)

    sp = add("gflow", cmd_gflow, "find a gflow and a causal flow of an open graph or pattern")
    sp.add_argument("file")

    sp = add("pointless", cmd_pointless, "semantic and structural pointlessness of one qubit")
    sp.add_argument("file")
    sp.add_argument("--qubit", type=int, required=True)
    sp.add_argument("--set", type=_ids, default=None, help="compensating set for the phase condition")

    sp = add("gen", cmd_gen, "emit a protocol document for a named graph family")
    sp.add_argument("family", choices=sorted(FAMILIES))
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--encoding", type=_ids, default=None, help="default: every vertex")

    sp = add("verify-suite", cmd_verify_suite, "exhaustive consistency sweep over small protocols")
    sp.add_argument("--max-n", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--inject-fault", action="store_true", help="corrupt one witness to exercise the failure path")
    return parser


def _fail(kind: str, message: str, code: int) -> int:
    print(f"graphsecret: {kind}: {' '.join(str(message).split())}", file=sys.stderr)
    return code


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        return _fail("usage", exc, EXIT_USAGE)
    try:
        doc, lines = args.func(args)
    except ConsistencyViolation as exc:
        return _fail("consistency", exc, EXIT_CONSISTENCY)
    except (InvalidInput, SizeBoundExceeded, SolutionCapExceeded) as exc:
        return _fail("invalid-input", exc, EXIT_INVALID)
    if args.text:
        sys.stdout.write("".join(line + "\n" for line in lines))
    else:
        sys.stdout.write(dumps(doc))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
