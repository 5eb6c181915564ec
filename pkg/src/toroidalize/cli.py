"""Command-line front end: run, verify, oracle.

``run`` loads a scenario, drives the blowup sequence to an empty locus,
lifts every leaf through the base-point blowup, classifies the results,
and writes a canonical JSON trace.  ``verify`` re-validates a recorded
trace independently.  ``oracle`` explores every permissible blowup order
by brute force and reports the depth range.

Exit codes: 0 success, 2 schema/input error, 3 step or depth budget
exceeded, 4 classification failure, 5 verification failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .descent import classify_scenario, reseed
from .forms import FormError, NoTemplateMatchError, NotPrincipalError
from .oracle import BoundExceededError, SearchBound, exhaustive_search
from .principalize import (
    Scenario,
    StepBudgetExceededError,
    default_budget,
    make_scenario,
    run,
)
from .scenario_io import (
    RoundPlan,
    SchemaError,
    canonical_dumps,
    load_scenario,
    load_trace,
    round_to_doc,
    trace_doc,
    write_trace,
)
from .verify import VerificationError, verify_trace

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_BUDGET = 3
EXIT_CLASSIFY = 4
EXIT_VERIFY = 5


class PipelineError(RuntimeError):
    def __init__(self, code: int, report: dict) -> None:
        super().__init__(report.get("message", "pipeline error"))
        self.code = code
        self.report = report


def run_pipeline(
    scenario: Scenario,
    plans: list[RoundPlan],
    scenario_doc: dict,
    max_steps: int | None = None,
) -> dict:
    """Principalize, lift and classify every round; return the trace document."""
    rounds = []
    current = scenario
    for round_index, plan in enumerate(plans):
        budget = max_steps if max_steps is not None else default_budget(current)
        try:
            final, _ = run(current, max(budget, 1))
        except StepBudgetExceededError as exc:
            raise PipelineError(
                EXIT_BUDGET,
                {
                    "message": str(exc),
                    "round": round_index,
                    "steps": exc.steps,
                },
            ) from exc
        try:
            leaves = classify_scenario(final, plan.extra_branch_charts, plan.overrides_dict())
        except (NoTemplateMatchError, NotPrincipalError, FormError) as exc:
            raise PipelineError(
                EXIT_CLASSIFY,
                {"message": str(exc), "round": round_index},
            ) from exc
        rounds.append(round_to_doc(round_index, current, final, leaves))
        if round_index + 1 < len(plans):
            next_plan = plans[round_index + 1]
            presentations = reseed(leaves, final, next_plan.charts)
            try:
                current = make_scenario(current.n, next_plan.charts, presentations)
            except FormError as exc:
                raise PipelineError(
                    EXIT_SCHEMA,
                    {"message": f"reseeding round {round_index + 1}: {exc}", "round": round_index + 1},
                ) from exc
    return trace_doc(scenario_doc, rounds)


def render_text(trace: dict) -> str:
    """Step-by-step human-readable account of a trace."""
    lines = []
    for round_doc in trace["rounds"]:
        lines.append(f"== round {round_doc['round']} ==")
        for item in round_doc["initial"]:
            p = item["presentation"]
            tag = "principal" if item["principal"] else "active"
            lines.append(f"  p{item['id']} [{tag}] chart {p['chart']}: {_render_presentation(p)}")
        for step in round_doc["steps"]:
            sig = step["signature"]
            cols = " ".join(f"({a},{b})" for a, b in sig["columns"]) or "-"
            lines.append(
                f"  step {step['index']}: chart {step['chart']} {step['phase']} "
                f"center[{sig['class']} {cols}] value {step['value']} "
                f"(1pt {step['before']['one_point_max']}->{step['after']['one_point_max']}, "
                f"2pt {step['before']['two_point_max']}->{step['after']['two_point_max']})"
            )
            for desc in step["descendants"]:
                status = "principal" if desc["principal"] else "active"
                lines.append(
                    f"    p{desc['parent']} --{desc['point']}--> p{desc['id']} [{status}] "
                    f"{_render_presentation(desc['presentation'])}"
                )
        for leaf in round_doc["classification"]:
            lines.append(
                f"  leaf p{leaf['id']} chart {leaf['chart']}: {leaf['outcome']} "
                f"(image chart {leaf['surface_chart']}, divisor branches {leaf['e_branches']})"
            )
    s = trace["summary"]
    lines.append(f"done: {s['rounds']} round(s), {s['steps']} step(s), {s['leaves']} leaf/leaves")
    return "\n".join(lines) + "\n"


def _render_presentation(p: dict) -> str:
    form = p["form"]
    if form == "power_unit":
        return f"{form} base={p['base']} powers=({p['power_u']},{p['power_v']})"
    if form.startswith("transverse"):
        return form
    return f"{form} u={p['u']} v={p['v']}"


def _emit(doc: dict) -> None:
    sys.stdout.write(canonical_dumps(doc))


def _fail(code: int, kind: str, report: dict) -> int:
    _emit({"status": "error", "kind": kind, "exit": code, "detail": report})
    return code


def cmd_run(args: argparse.Namespace) -> int:
    try:
        scenario, plans, doc = load_scenario(args.scenario)
    except SchemaError as exc:
        return _fail(EXIT_SCHEMA, "schema", {"path": exc.path, "message": exc.reason})
    try:
        trace = run_pipeline(scenario, plans, doc, args.max_steps)
    except PipelineError as exc:
        kinds = {EXIT_BUDGET: "budget", EXIT_CLASSIFY: "classification", EXIT_SCHEMA: "schema"}
        return _fail(exc.code, kinds.get(exc.code, "error"), exc.report)
    out = Path(args.trace_out) if args.trace_out else Path(args.scenario).with_suffix(".trace.json")
    write_trace(trace, out)
    if args.format == "text":
        sys.stdout.write(render_text(trace))
    else:
        outcomes: dict[str, int] = {}
        for round_doc in trace["rounds"]:
            for leaf in round_doc["classification"]:
                outcomes[leaf["outcome"]] = outcomes.get(leaf["outcome"], 0) + 1
        _emit(
            {
                "status": "ok",
                "trace": str(out),
                "summary": trace["summary"],
                "outcomes": outcomes,
            }
        )
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    try:
        trace = load_trace(args.trace)
    except SchemaError as exc:
        return _fail(EXIT_SCHEMA, "schema", {"path": exc.path, "message": exc.reason})
    try:
        verify_trace(trace)
    except VerificationError as exc:
        return _fail(
            EXIT_VERIFY,
            "verification",
            {
                "invariant": exc.invariant,
                "round": exc.round_index,
                "step": exc.step_index,
                "message": str(exc),
            },
        )
    _emit({"status": "ok", "summary": trace["summary"]})
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    try:
        scenario, _, _ = load_scenario(args.scenario)
    except SchemaError as exc:
        return _fail(EXIT_SCHEMA, "schema", {"path": exc.path, "message": exc.reason})
    bound = SearchBound(max_entry=args.max_entry, max_k=args.max_k, max_depth=args.depth)
    presentations = [e.presentation for e in scenario.entries]
    try:
        result = exhaustive_search(presentations, bound)
    except BoundExceededError as exc:
        return _fail(
            EXIT_BUDGET,
            "depth",
            {"message": str(exc), "path": [str(step) for step in exc.path]},
        )
    except ValueError as exc:
        return _fail(EXIT_SCHEMA, "bounds", {"message": str(exc)})
    _emit(
        {
            "status": "ok",
            "all_terminate": result.all_terminate,
            "min_depth": result.min_depth,
            "max_depth": result.max_depth,
            "states_explored": result.states_explored,
        }
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toroidalize",
        description="Exact blowup sequences for monomial morphisms to a surface, with verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="principalize a scenario, lift, classify, emit a trace")
    p_run.add_argument("scenario", help="scenario JSON file")
    p_run.add_argument("-o", "--trace-out", help="trace output path (default: <scenario>.trace.json)")
    p_run.add_argument("--max-steps", type=int, default=None, help="per-round step budget")
    p_run.add_argument("--format", choices=["json", "text"], default="json")
    p_run.set_defaults(func=cmd_run)

    p_verify = sub.add_parser("verify", help="re-validate a recorded trace")
    p_verify.add_argument("trace", help="trace JSON file")
    p_verify.set_defaults(func=cmd_verify)

    p_oracle = sub.add_parser("oracle", help="exhaustive search over all blowup orders")
    p_oracle.add_argument("scenario", help="scenario JSON file")
    p_oracle.add_argument("--depth", type=int, default=64, help="path length bound")
    p_oracle.add_argument("--max-entry", type=int, default=64, help="largest admissible exponent")
    p_oracle.add_argument("--max-k", type=int, default=16, help="largest admissible column count")
    p_oracle.set_defaults(func=cmd_oracle)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
