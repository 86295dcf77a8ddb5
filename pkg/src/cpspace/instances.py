"""The JSON instance-file format: parsing, referential checks, canonical text.

One document carries the state list, each agent's conditioning family and
measures, and an optional query (an event, two posited values, and a state).
Rationals travel as strings of the form ``n`` or ``n/d``, never as floats;
output is always reduced and canonically ordered, so serializing a parsed
canonical document reproduces it byte for byte.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace
from fractions import Fraction

from .cps import CPS, ProbMeasure
from .errors import (
    DuplicateMemberError,
    ParseError,
    UnknownLabelError,
    UsageError,
)
from .foundations import Event, SetFamily, StateSpace

_RATIONAL = re.compile(r"^[+-]?\d+(?:/\d+)?$")


def parse_rational(text: object) -> Fraction:
    """Parse ``n`` or ``n/d`` with a positive denominator; reject floats."""
    if not isinstance(text, str) or not _RATIONAL.match(text):
        raise ParseError(f"not a rational string: {text!r} (write 'n' or 'n/d')")
    if "/" in text and int(text.split("/", 1)[1]) == 0:
        raise ParseError(f"zero denominator in {text!r}")
    return Fraction(text)


def format_rational(value: Fraction) -> str:
    return str(value)


@dataclass(frozen=True)
class Query:
    event: Event
    q_a: Fraction
    q_b: Fraction
    omega: int | None


@dataclass(frozen=True)
class Instance:
    """A parsed instance: the space, the agents' spaces, an optional query."""

    space: StateSpace
    agents: tuple[tuple[str, CPS], ...]
    query: Query | None = None
    comment: str | None = None

    def agent_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.agents)

    def agent(self, name: str) -> CPS:
        for agent_name, cps in self.agents:
            if agent_name == name:
                return cps
        raise UsageError(
            f"no agent named {name!r}; instance has {', '.join(self.agent_names())}"
        )

    def pair(self) -> tuple[CPS, CPS]:
        """The two agents in name order; errors unless there are exactly two."""
        if len(self.agents) != 2:
            raise UsageError(
                f"this command needs exactly two agents, found {len(self.agents)}"
            )
        (_, first), (_, second) = self.agents
        return first, second

    def with_agent(self, name: str, cps: CPS) -> Instance:
        self.agent(name)  # raise early when absent
        agents = tuple(
            (n, cps if n == name else existing) for n, existing in self.agents
        )
        return replace(self, agents=agents)


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ParseError(message)


def _resolve_event(space: StateSpace, labels: object, where: str) -> Event:
    _require(
        isinstance(labels, list) and all(isinstance(x, str) for x in labels),
        f"{where}: expected a list of state labels",
    )
    mask = 0
    for label in labels:
        try:
            index = space.index(label)
        except ValueError:
            raise UnknownLabelError(f"{where}: unknown state label {label!r}") from None
        bit = 1 << index
        if mask & bit:
            raise DuplicateMemberError(f"{where}: state {label!r} listed twice")
        mask |= bit
    return Event(mask, space.size)


def _parse_agent(space: StateSpace, name: str, doc: object) -> CPS:
    where = f"agents.{name}"
    _require(isinstance(doc, dict), f"{where}: expected an object")
    extra = set(doc) - {"family", "measures"}
    _require(not extra, f"{where}: unknown keys {sorted(extra)}")
    family_doc = doc.get("family")
    measures_doc = doc.get("measures")
    _require(isinstance(family_doc, list), f"{where}.family: expected a list")
    _require(isinstance(measures_doc, list), f"{where}.measures: expected a list")

    members: list[Event] = []
    for k, entry in enumerate(family_doc):
        event = _resolve_event(space, entry, f"{where}.family[{k}]")
        _require(bool(event), f"{where}.family[{k}]: family members must be nonempty")
        if event in members:
            raise DuplicateMemberError(
                f"{where}.family[{k}]: duplicate family member "
                f"{space.format_event(event)}"
            )
        members.append(event)
    family = SetFamily(space, members)

    measures: dict[Event, ProbMeasure] = {}
    for k, entry in enumerate(measures_doc):
        mwhere = f"{where}.measures[{k}]"
        _require(isinstance(entry, dict), f"{mwhere}: expected an object")
        extra = set(entry) - {"given", "p"}
        _require(not extra, f"{mwhere}: unknown keys {sorted(extra)}")
        given = _resolve_event(space, entry.get("given"), f"{mwhere}.given")
        _require(
            given in family.members,
            f"{mwhere}: given event {space.format_event(given)} is not a family member",
        )
        if given in measures:
            raise DuplicateMemberError(
                f"{mwhere}: second measure for {space.format_event(given)}"
            )
        p_doc = entry.get("p")
        _require(isinstance(p_doc, dict), f"{mwhere}.p: expected an object")
        weights: dict[int, Fraction] = {}
        for label, value in p_doc.items():
            try:
                index = space.index(label)
            except ValueError:
                raise UnknownLabelError(
                    f"{mwhere}.p: unknown state label {label!r}"
                ) from None
            weight = parse_rational(value)
            _require(weight >= 0, f"{mwhere}.p.{label}: negative weight {weight}")
            weights[index] = weight
        measures[given] = ProbMeasure(weights, space.size)
    for member in family.sorted_members():
        _require(
            member in measures,
            f"{where}: no measure for family member {space.format_event(member)}",
        )
    return CPS(family, measures)


def _parse_query(space: StateSpace, doc: object) -> Query:
    _require(isinstance(doc, dict), "query: expected an object")
    extra = set(doc) - {"event", "qA", "qB", "omega"}
    _require(not extra, f"query: unknown keys {sorted(extra)}")
    event = _resolve_event(space, doc.get("event"), "query.event")
    q_a = parse_rational(doc.get("qA"))
    q_b = parse_rational(doc.get("qB"))
    omega = None
    if "omega" in doc:
        label = doc["omega"]
        _require(isinstance(label, str), "query.omega: expected a state label")
        try:
            omega = space.index(label)
        except ValueError:
            raise UnknownLabelError(f"query.omega: unknown state label {label!r}") from None
    return Query(event, q_a, q_b, omega)


def parse_instance(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    _require(isinstance(doc, dict), "top level: expected an object")
    extra = set(doc) - {"states", "agents", "query", "comment"}
    _require(not extra, f"top level: unknown keys {sorted(extra)}")

    states = doc.get("states")
    _require(
        isinstance(states, list) and all(isinstance(s, str) for s in states),
        "states: expected a list of labels",
    )
    try:
        space = StateSpace(states)
    except ValueError as exc:
        raise ParseError(f"states: {exc}") from None

    agents_doc = doc.get("agents")
    _require(
        isinstance(agents_doc, dict) and agents_doc,
        "agents: expected a nonempty object",
    )
    agents = tuple(
        (name, _parse_agent(space, name, agents_doc[name]))
        for name in sorted(agents_doc)
    )

    query = _parse_query(space, doc["query"]) if "query" in doc else None
    comment = None
    if "comment" in doc:
        _require(isinstance(doc["comment"], str), "comment: expected a string")
        comment = doc["comment"]
    return Instance(space, agents, query, comment)


def instance_to_obj(instance: Instance) -> dict:
    space = instance.space
    agents: dict[str, dict] = {}
    for name, cps in sorted(instance.agents):
        members = cps.family.sorted_members()
        agents[name] = {
            "family": [list(space.labels(event)) for event in members],
            "measures": [
                {
                    "given": list(space.labels(event)),
                    "p": {
                        space.names[state]: format_rational(weight)
                        for state, weight in cps.measures[event].items()
                    },
                }
                for event in members
            ],
        }
    obj: dict = {"states": list(space.names), "agents": agents}
    if instance.query is not None:
        query: dict = {
            "event": list(space.labels(instance.query.event)),
            "qA": format_rational(instance.query.q_a),
            "qB": format_rational(instance.query.q_b),
        }
        if instance.query.omega is not None:
            query["omega"] = space.names[instance.query.omega]
        obj["query"] = query
    if instance.comment is not None:
        obj["comment"] = instance.comment
    return obj


def serialize_instance(instance: Instance) -> str:
    return json.dumps(instance_to_obj(instance), indent=2) + "\n"
