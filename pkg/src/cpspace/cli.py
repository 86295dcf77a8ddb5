"""Command-line front end over instance files.

Exit codes: 0 success, 1 usage error, 2 invalid or unreadable instance,
3 when a disagreement-under-hypotheses verdict appears (that verdict
contradicts a proved property of the library, so it signals a defect and
breaks the build).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .agreement import (
    AgreementChecker,
    AgreementReport,
    GeneratorConfig,
    SearchReport,
    Verdict,
    search_counterexamples,
)
from .assumptions import (
    LocalConsistencyReport,
    OneClosedReport,
    ReflectionReport,
    assumption_report,
    local_consistency_map,
    shared_event_disagreements,
)
from .augmentation import extend
from .cps import CPS, ValidationReport
from .dimensional import level_table, represent
from .epistemic import RecursionTrace, common_certainty, common_knowledge
from .errors import (
    ConfigError,
    CpspaceError,
    InstanceError,
    InvalidCPS,
    NotOneClosed,
    StructureError,
    TooLarge,
    UsageError,
)
from .foundations import Event, StateSpace
from .instances import (
    Instance,
    Query,
    format_rational,
    instance_to_obj,
    parse_instance,
    parse_rational,
    serialize_instance,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_DISAGREEMENT = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad options; the exit-code contract
    # reserves 2 for invalid instances, so route usage problems through
    # UsageError instead
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument(
        "--format",
        choices=("text", "json"),
        default=argparse.SUPPRESS,
        help="report format (default: text)",
    )
    parser = _Parser(prog="cpspace", parents=[common])
    parser.add_argument("--version", action="version", version=f"cpspace {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, help_text: str, instance: bool = True):
        p = sub.add_parser(name, help=help_text, parents=[common])
        if instance:
            p.add_argument("file", help="instance file (JSON)")
        return p

    command("validate", "check the instance against every validity condition")

    p = command("atoms", "per-state conditioning atoms of one agent")
    p.add_argument("--agent", required=True)

    p = command("certainty", "the certainty event of one agent for an event")
    p.add_argument("--agent", required=True)
    p.add_argument("--event", required=True, help="comma-separated state labels")

    for name, help_text in (
        ("common-certainty", "run the mutual-certainty recursion"),
        ("common-knowledge", "run the mutual-knowledge recursion"),
    ):
        p = command(name, help_text)
        p.add_argument("--event", help="comma-separated state labels")
        p.add_argument("--qa", help="value posited for the first agent")
        p.add_argument("--qb", help="value posited for the second agent")

    command("assumptions", "closure, reflection, and consistency reports")

    p = command("augment", "extend one agent to its certainty closure")
    p.add_argument("--agent", required=True)
    p.add_argument("-o", "--output", help="write the new instance here (default: stdout)")

    p = command("represent", "dimensionally ordered levels of one agent")
    p.add_argument("--agent", required=True)

    for name, help_text in (
        ("agree", "classify a common-certainty run against the hypotheses"),
        ("agree-knowledge", "classify a common-knowledge run"),
    ):
        p = command(name, help_text)
        p.add_argument("--event", help="comma-separated state labels")
        p.add_argument("--qa")
        p.add_argument("--qb")
        p.add_argument("--omega", help="state label to evaluate at")

    p = command("search", "randomized counterexample search", instance=False)
    p.add_argument("--states", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--drop", choices=("reflection", "one_closed", "consistency"))
    return parser


# ---------------------------------------------------------------------------
# report objects


def _labels(space: StateSpace, event: Event) -> list[str]:
    return list(space.labels(event))


def _violations_obj(space: StateSpace, report: ValidationReport) -> list[dict]:
    out = []
    for v in report.violations:
        entry = {"kind": v.kind, "member": _labels(space, v.member), "detail": v.detail}
        if v.inner is not None:
            entry["inner"] = _labels(space, v.inner)
        if v.event is not None:
            entry["event"] = _labels(space, v.event)
        out.append(entry)
    return out


def _one_closed_obj(space: StateSpace, report: OneClosedReport) -> dict:
    obj: dict = {"holds": report.holds}
    if report.witness is not None:
        obj["witness"] = _labels(space, report.witness)
    return obj


def _reflection_obj(space: StateSpace, report: ReflectionReport) -> dict:
    obj: dict = {"holds": report.holds, "checker": report.checker}
    if report.witness is not None:
        event, state = report.witness
        obj["witness"] = {"event": _labels(space, event), "state": space.names[state]}
    return obj


def _consistency_obj(space: StateSpace, report: LocalConsistencyReport) -> dict:
    obj: dict = {"holds": report.holds, "meet_atom": _labels(space, report.meet_atom)}
    if report.witness_state is not None:
        obj["witness_state"] = space.names[report.witness_state]
    return obj


def _measure_obj(space: StateSpace, measure) -> dict:
    return {
        space.names[state]: format_rational(weight)
        for state, weight in measure.items()
    }


def _trace_obj(space: StateSpace, trace: RecursionTrace) -> dict:
    return {
        "levels": [
            {"A": _labels(space, a), "B": _labels(space, b)} for a, b in trace.levels
        ],
        "stabilized_at": trace.stabilized_at,
        "limit": _labels(space, trace.limit),
    }


def _agreement_obj(space: StateSpace, report: AgreementReport) -> dict:
    hyp = report.hypotheses
    hyp_obj: dict = {
        "consistency_at_omega": _consistency_obj(space, hyp.consistency),
        "shared_disagreements": [
            {
                "member": _labels(space, d.member),
                "state": space.names[d.state],
                "measure_a": _measure_obj(space, d.measure_a),
                "measure_b": _measure_obj(space, d.measure_b),
            }
            for d in hyp.shared_disagreements
        ],
    }
    if hyp.one_closed_a is not None and hyp.one_closed_b is not None:
        hyp_obj["one_closed_a"] = _one_closed_obj(space, hyp.one_closed_a)
        hyp_obj["one_closed_b"] = _one_closed_obj(space, hyp.one_closed_b)
    if hyp.reflection_a is not None and hyp.reflection_b is not None:
        hyp_obj["reflection_a"] = _reflection_obj(space, hyp.reflection_a)
        hyp_obj["reflection_b"] = _reflection_obj(space, hyp.reflection_b)
    return {
        "mode": report.mode,
        "event": _labels(space, report.event),
        "omega": space.names[report.omega],
        "qA": format_rational(report.q_a),
        "qB": format_rational(report.q_b),
        "omega_in_limit": report.omega_in_limit,
        "verdict": report.verdict.value,
        "failed_hypotheses": list(report.failed_hypotheses),
        "hypotheses": hyp_obj,
        "trace": _trace_obj(space, report.trace),
    }


def _search_obj(report: SearchReport) -> dict:
    findings = []
    for f in report.findings:
        space = f.cps_a.space
        witness = Instance(
            space,
            (("A", f.cps_a), ("B", f.cps_b)),
            Query(f.event, f.q_a, f.q_b, f.omega),
            comment=(
                f"search witness: seed={report.config.seed} trial={f.trial} "
                f"drop={report.config.drop} tool=cpspace {__version__}"
            ),
        )
        findings.append(
            {
                "trial": f.trial,
                "kind": f.kind,
                "event": _labels(space, f.event),
                "omega": space.names[f.omega],
                "qA": format_rational(f.q_a),
                "qB": format_rational(f.q_b),
                "failed_hypotheses": list(f.failed_hypotheses),
                "instance": instance_to_obj(witness),
            }
        )
    return {
        "states": report.config.state_count,
        "seed": report.config.seed,
        "trials": report.trials_run,
        "drop": report.config.drop,
        "tuples_checked": report.tuples_checked,
        "findings": findings,
        "disagreements_under_hypotheses": len(report.bug_findings),
    }


# ---------------------------------------------------------------------------
# command implementations


def _load(path: str) -> Instance:
    with open(path, encoding="utf-8") as handle:
        return parse_instance(handle.read())


def _fmt_set(space: StateSpace, event: Event) -> str:
    return space.format_event(event)


def _query_values(ns, instance: Instance, need_omega: bool):
    query = instance.query
    event = None
    if getattr(ns, "event", None) is not None:
        labels = [x for x in ns.event.split(",") if x]
        event = instance.space.event(labels)
    elif query is not None:
        event = query.event
    q_a = parse_rational(ns.qa) if getattr(ns, "qa", None) is not None else (
        query.q_a if query else None
    )
    q_b = parse_rational(ns.qb) if getattr(ns, "qb", None) is not None else (
        query.q_b if query else None
    )
    if event is None or q_a is None or q_b is None:
        raise UsageError(
            "this command needs an event and both values; give --event/--qa/--qb "
            "or a query block in the instance"
        )
    omega = None
    if need_omega:
        if getattr(ns, "omega", None) is not None:
            omega = instance.space.index(ns.omega)
        elif query is not None and query.omega is not None:
            omega = query.omega
        else:
            raise UsageError("this command needs --omega or a query with omega")
    return event, q_a, q_b, omega


def _cmd_validate(ns) -> tuple[int, dict, list[str]]:
    instance = _load(ns.file)
    space = instance.space
    agents_obj = {}
    lines = []
    ok = True
    for name, cps in instance.agents:
        try:
            report = cps.validate()
        except StructureError as exc:
            ok = False
            agents_obj[name] = {"ok": False, "structure": str(exc)}
            lines.append(f"agent {name}: structure error: {exc}")
            continue
        agents_obj[name] = {
            "ok": report.ok,
            "violations": _violations_obj(space, report),
        }
        if report.ok:
            lines.append(f"agent {name}: valid")
        else:
            ok = False
            lines.append(f"agent {name}: {len(report.violations)} violation(s)")
            for v in report.violations:
                where = _fmt_set(space, v.member)
                if v.inner is not None:
                    where += f" via {_fmt_set(space, v.inner)}"
                if v.event is not None:
                    where += f" at {_fmt_set(space, v.event)}"
                lines.append(f"  {v.kind} on {where}: {v.detail}")
    return (
        EXIT_OK if ok else EXIT_INVALID,
        {"command": "validate", "ok": ok, "agents": agents_obj},
        lines,
    )


def _cmd_atoms(ns) -> tuple[int, dict, list[str]]:
    instance = _load(ns.file)
    cps = instance.agent(ns.agent)
    space = instance.space
    atoms = {
        space.names[i]: cps.family.atom_of(i) for i in range(space.size)
    }
    obj = {
        "command": "atoms",
        "agent": ns.agent,
        "atoms": {name: _labels(space, atom) for name, atom in atoms.items()},
    }
    lines = [f"{name} -> {_fmt_set(space, atom)}" for name, atom in atoms.items()]
    return EXIT_OK, obj, lines


def _cmd_certainty(ns) -> tuple[int, dict, list[str]]:
    instance = _load(ns.file)
    cps = instance.agent(ns.agent)
    space = instance.space
    event = space.event([x for x in ns.event.split(",") if x])
    result = cps.certainty_event(event)
    obj = {
        "command": "certainty",
        "agent": ns.agent,
        "event": _labels(space, event),
        "certainty": _labels(space, result),
    }
    lines = [f"certainty of {_fmt_set(space, event)}: {_fmt_set(space, result)}"]
    return EXIT_OK, obj, lines


def _trace_lines(space: StateSpace, trace: RecursionTrace) -> list[str]:
    lines = []
    for n, (a, b) in enumerate(trace.levels):
        lines.append(f"level {n}: A = {_fmt_set(space, a)}, B = {_fmt_set(space, b)}")
    lines.append(
        f"stabilized at level {trace.stabilized_at}; "
        f"limit = {_fmt_set(space, trace.limit)}"
    )
    return lines


def _cmd_recursion(ns, knowledge: bool) -> tuple[int, dict, list[str]]:
    instance = _load(ns.file)
    cps_a, cps_b = instance.pair()
    event, q_a, q_b, _ = _query_values(ns, instance, need_omega=False)
    run = common_knowledge if knowledge else common_certainty
    trace = run(cps_a, cps_b, event, q_a, q_b)
    obj = {
        "command": "common-knowledge" if knowledge else "common-certainty",
        "event": _labels(instance.space, event),
        "qA": format_rational(q_a),
        "qB": format_rational(q_b),
        **_trace_obj(instance.space, trace),
    }
    return EXIT_OK, obj, _trace_lines(instance.space, trace)


def _cmd_assumptions(ns) -> tuple[int, dict, list[str]]:
    instance = _load(ns.file)
    space = instance.space
    agents_obj = {}
    lines = []
    for name, cps in instance.agents:
        report = assumption_report(cps)
        agents_obj[name] = {
            "one_closed": _one_closed_obj(space, report.one_closed),
            "reflection": _reflection_obj(space, report.reflection),
        }
        closed = "yes" if report.one_closed.holds else "no"
        if report.one_closed.witness is not None:
            closed += f" (witness {_fmt_set(space, report.one_closed.witness)})"
        lines.append(f"agent {name}: certainty-closed: {closed}")
        lines.append(
            f"agent {name}: reflection: "
            f"{'yes' if report.reflection.holds else 'no'} "
            f"({report.reflection.checker} checker)"
        )
    obj = {"command": "assumptions", "agents": agents_obj}
    if len(instance.agents) == 2:
        cps_a, cps_b = instance.pair()
        consistency = local_consistency_map(cps_a, cps_b)
        shared = shared_event_disagreements(cps_a, cps_b)
        obj["local_consistency"] = {
            space.names[state]: _consistency_obj(space, report)
            for state, report in consistency.items()
        }
        obj["shared_disagreements"] = [
            {
                "member": _labels(space, d.member),
                "state": space.names[d.state],
                "measure_a": _measure_obj(space, d.measure_a),
                "measure_b": _measure_obj(space, d.measure_b),
            }
            for d in shared
        ]
        for state, report in consistency.items():
            verdict = "yes" if report.holds else "no"
            lines.append(
                f"local consistency at {space.names[state]} "
                f"(meet atom {_fmt_set(space, report.meet_atom)}): {verdict}"
            )
        for d in shared:
            lines.append(
                f"shared event {_fmt_set(space, d.member)} measured differently; "
                f"first difference at {space.names[d.state]}"
            )
    return EXIT_OK, obj, lines


def _cmd_augment(ns) -> tuple[int, dict, list[str]]:
    instance = _load(ns.file)
    result = extend(instance.agent(ns.agent))
    comment = f"augmented agent {ns.agent} with cpspace {__version__}"
    if instance.comment:
        comment = f"{instance.comment}; {comment}"
    augmented = Instance(
        instance.space,
        instance.with_agent(ns.agent, result.extended_cps).agents,
        instance.query,
        comment,
    )
    text = serialize_instance(augmented)
    if ns.output:
        with open(ns.output, "w", encoding="utf-8") as handle:
            handle.write(text)
        lines = [
            f"wrote {ns.output}: agent {ns.agent} extended to "
            f"{len(result.augmented_family)} conditioning events"
        ]
    else:
        lines = [text.rstrip("\n")]
    return EXIT_OK, instance_to_obj(augmented), lines


def _cmd_represent(ns) -> tuple[int, dict, list[str]]:
    instance = _load(ns.file)
    cps = instance.agent(ns.agent)
    space = instance.space
    dof = represent(cps)
    rows = level_table(dof)
    obj = {
        "command": "represent",
        "agent": ns.agent,
        "levels": [
            {space.names[i]: value for i, value in enumerate(row)} for row in rows
        ],
    }
    lines = [f"levels for agent {ns.agent} (bottom first):"]
    for n, row in enumerate(rows):
        cells = ", ".join(f"{space.names[i]}: {value}" for i, value in enumerate(row))
        lines.append(f"level {n}: {cells}")
    return EXIT_OK, obj, lines


def _cmd_agree(ns, knowledge: bool) -> tuple[int, dict, list[str]]:
    instance = _load(ns.file)
    cps_a, cps_b = instance.pair()
    event, q_a, q_b, omega = _query_values(ns, instance, need_omega=True)
    checker = AgreementChecker(cps_a, cps_b, knowledge=knowledge)
    report = checker.check(event, omega, q_a, q_b)
    space = instance.space
    obj = {
        "command": "agree-knowledge" if knowledge else "agree",
        **_agreement_obj(space, report),
    }
    lines = _trace_lines(space, report.trace)
    lines.append(
        f"omega {space.names[omega]} in limit: "
        f"{'yes' if report.omega_in_limit else 'no'}"
    )
    if report.failed_hypotheses:
        lines.append("failed hypotheses: " + ", ".join(report.failed_hypotheses))
    for d in report.hypotheses.shared_disagreements:
        lines.append(
            f"shared event {_fmt_set(space, d.member)} measured differently; "
            f"first difference at {space.names[d.state]}"
        )
    lines.append(f"verdict: {report.verdict.value}")
    code = (
        EXIT_DISAGREEMENT
        if report.verdict is Verdict.DISAGREEMENT_UNDER_HYPOTHESES
        else EXIT_OK
    )
    return code, obj, lines


def _cmd_search(ns) -> tuple[int, dict, list[str]]:
    config = GeneratorConfig(
        state_count=ns.states, seed=ns.seed, trials=ns.trials, drop=ns.drop
    )
    report = search_counterexamples(config)
    obj = {"command": "search", **_search_obj(report)}
    lines = [
        f"trials: {report.trials_run}, tuples checked: {report.tuples_checked}",
        f"findings: {len(report.findings)} "
        f"(disagreements under hypotheses: {len(report.bug_findings)})",
    ]
    for f in report.findings[:10]:
        space = f.cps_a.space
        lines.append(
            f"trial {f.trial}: {f.kind} at {space.names[f.omega]} on "
            f"{_fmt_set(space, f.event)} with qA={f.q_a}, qB={f.q_b}"
        )
    if len(report.findings) > 10:
        lines.append(f"... {len(report.findings) - 10} more finding(s)")
    code = EXIT_DISAGREEMENT if report.bug_findings else EXIT_OK
    return code, obj, lines


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
        fmt = getattr(ns, "format", "text")
        if ns.command == "validate":
            code, obj, lines = _cmd_validate(ns)
        elif ns.command == "atoms":
            code, obj, lines = _cmd_atoms(ns)
        elif ns.command == "certainty":
            code, obj, lines = _cmd_certainty(ns)
        elif ns.command == "common-certainty":
            code, obj, lines = _cmd_recursion(ns, knowledge=False)
        elif ns.command == "common-knowledge":
            code, obj, lines = _cmd_recursion(ns, knowledge=True)
        elif ns.command == "assumptions":
            code, obj, lines = _cmd_assumptions(ns)
        elif ns.command == "augment":
            code, obj, lines = _cmd_augment(ns)
        elif ns.command == "represent":
            code, obj, lines = _cmd_represent(ns)
        elif ns.command == "agree":
            code, obj, lines = _cmd_agree(ns, knowledge=False)
        elif ns.command == "agree-knowledge":
            code, obj, lines = _cmd_agree(ns, knowledge=True)
        else:
            code, obj, lines = _cmd_search(ns)
    except (UsageError, ConfigError, TooLarge, NotOneClosed, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InstanceError, StructureError, InvalidCPS, OSError) as exc:
        print(f"invalid instance: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except CpspaceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if fmt == "json":
        print(json.dumps(obj, indent=2))
    else:
        for line in lines:
            print(line)
    return code


if __name__ == "__main__":
    sys.exit(main())
