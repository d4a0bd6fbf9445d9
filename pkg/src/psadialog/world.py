"""Simulated shuttle world: topology, doors, environment readings, effectors.

The world is a value: effectors return updated copies, so the evaluator can
thread a simulated state vector while the session owns the authoritative one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from importlib import resources


class WorldError(Exception):
    """Base for world lookups that fail."""


class ConfigError(WorldError):
    pass


class UnknownLocation(WorldError):
    pass


class UnknownDoor(WorldError):
    pass


class UnknownParameter(WorldError):
    pass


OPEN = "open"
CLOSED = "closed"

# Effector actions the world itself understands (procedures live upstream).
EFFECTOR_ACTIONS = ("go_to", "measure", "change_status", "stop", "resume_to")


@dataclass(frozen=True)
class LocationDef:
    name: str
    display: str
    deck: str
    sorts: tuple[str, ...]


@dataclass(frozen=True)
class DoorDef:
    name: str
    display: str
    initial: str
    attached_to: str | None = None


@dataclass(frozen=True)
class ParameterDef:
    name: str
    display: str
    unit: str
    default: float


@dataclass(frozen=True)
class AtLocation:
    name: str

    def to_json(self):
        return self.name


@dataclass(frozen=True)
class InTransit:
    frm: str
    to: str
    fraction: float

    def __post_init__(self):
        if not 0.0 < self.fraction < 1.0:
            raise ValueError("transit fraction must lie strictly between 0 and 1")

    def to_json(self):
        return {"from": self.frm, "to": self.to, "fraction": self.fraction}


Position = AtLocation | InTransit


def position_from_json(obj) -> Position:
    if isinstance(obj, str):
        return AtLocation(obj)
    return InTransit(obj["from"], obj["to"], obj["fraction"])


# ---------------------------------------------------------------------------
# Events


@dataclass(frozen=True)
class Event:
    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class MoveStarted(Event):
    frm: Position
    to: str
    seconds: float

    def to_json(self):
        return {"kind": "move_started", "from": self.frm.to_json(),
                "to": self.to, "seconds": self.seconds}


@dataclass(frozen=True)
class MoveCompleted(Event):
    at: str

    def to_json(self):
        return {"kind": "move_completed", "at": self.at}


@dataclass(frozen=True)
class Measurement(Event):
    parameter: str
    location: str
    value: float
    unit: str

    def to_json(self):
        return {"kind": "measurement", "parameter": self.parameter,
                "location": self.location, "value": self.value, "unit": self.unit}


@dataclass(frozen=True)
class DoorChanged(Event):
    door: str
    status: str

    def to_json(self):
        return {"kind": "door_changed", "door": self.door, "status": self.status}


@dataclass(frozen=True)
class Halted(Event):
    position: Position

    def to_json(self):
        return {"kind": "halted", "position": self.position.to_json()}


@dataclass(frozen=True)
class Say(Event):
    text: str

    def to_json(self):
        return {"kind": "say", "text": self.text}


def event_from_json(obj: dict) -> Event:
    kind = obj["kind"]
    if kind == "move_started":
        return MoveStarted(position_from_json(obj["from"]), obj["to"], obj["seconds"])
    if kind == "move_completed":
        return MoveCompleted(obj["at"])
    if kind == "measurement":
        return Measurement(obj["parameter"], obj["location"], obj["value"], obj["unit"])
    if kind == "door_changed":
        return DoorChanged(obj["door"], obj["status"])
    if kind == "halted":
        return Halted(position_from_json(obj["position"]))
    if kind == "say":
        return Say(obj["text"])
    raise ValueError(f"unknown event kind {kind!r}")


# ---------------------------------------------------------------------------
# Configuration


@dataclass(frozen=True)
class WorldConfig:
    locations: tuple[LocationDef, ...]
    doors: tuple[DoorDef, ...]
    parameters: tuple[ParameterDef, ...]
    distances: dict[tuple[str, str], float]
    action_durations: dict[str, float]
    confirm_threshold_seconds: float
    start_location: str
    env_overrides: dict[tuple[str, str], float] = field(default_factory=dict)

    # -- lookup helpers -----------------------------------------------------

    def location_names(self) -> list[str]:
        return [loc.name for loc in self.locations]

    def is_location(self, name: str) -> bool:
        return any(loc.name == name for loc in self.locations)

    def is_door(self, name: str) -> bool:
        return any(d.name == name for d in self.doors)

    def door_names(self) -> list[str]:
        return [d.name for d in self.doors]

    def parameter_names(self) -> list[str]:
        return [p.name for p in self.parameters]

    def parameter(self, name: str) -> ParameterDef:
        for p in self.parameters:
            if p.name == name:
                return p
        raise UnknownParameter(name)

    def entities(self) -> dict[str, tuple[str, ...]]:
        """All referable entities mapped to their sort sets, in config order."""
        out: dict[str, tuple[str, ...]] = {}
        for loc in self.locations:
            out[loc.name] = loc.sorts
        for door in self.doors:
            if door.name not in out:
                out[door.name] = ("door",)
        return out

    def sorts_of(self, entity: str) -> tuple[str, ...]:
        ents = self.entities()
        if entity not in ents:
            raise WorldError(f"unknown entity {entity!r}")
        return ents[entity]

    def sort_members(self, sort: str) -> list[str]:
        return [name for name, sorts in self.entities().items() if sort in sorts]

    def display(self, entity: str) -> str:
        for loc in self.locations:
            if loc.name == entity:
                return loc.display
        for door in self.doors:
            if door.name == entity:
                return door.display
        return entity.replace("_", " ")

    def distance(self, a: str, b: str) -> float:
        if not self.is_location(a):
            raise UnknownLocation(a)
        if not self.is_location(b):
            raise UnknownLocation(b)
        if a == b:
            return 0.0
        return self.distances[(a, b)]

    def duration(self, action: str) -> float:
        return self.action_durations.get(action, 0.0)

    def env_value(self, location: str, parameter: str) -> float:
        if not self.is_location(location):
            raise UnknownLocation(location)
        p = self.parameter(parameter)
        return self.env_overrides.get((location, parameter), p.default)

    # -- construction -------------------------------------------------------

    @classmethod
    def from_json_obj(cls, obj: dict) -> WorldConfig:
        locations = tuple(
            LocationDef(l["name"], l.get("display", l["name"].replace("_", " ")),
                        l.get("deck", l["name"]), tuple(l.get("sorts", ["location"])))
            for l in obj["locations"]
        )
        doors = tuple(
            DoorDef(d["name"], d.get("display", d["name"].replace("_", " ")),
                    d.get("initial", OPEN), d.get("attached_to"))
            for d in obj["doors"]
        )
        parameters = tuple(
            ParameterDef(p["name"], p.get("display", p["name"]), p["unit"], p["default"])
            for p in obj["parameters"]
        )
        distances: dict[tuple[str, str], float] = {}
        for a, b, secs in obj["distances"]:
            distances[(a, b)] = float(secs)
            distances[(b, a)] = float(secs)
        overrides = {
            (loc, param): float(value)
            for loc, params in obj.get("environment_overrides", {}).items()
            for param, value in params.items()
        }
        config = cls(
            locations=locations,
            doors=doors,
            parameters=parameters,
            distances=distances,
            action_durations={k: float(v) for k, v in obj["action_durations"].items()},
            confirm_threshold_seconds=float(obj.get("confirm_threshold_seconds", 10)),
            start_location=obj["start_location"],
            env_overrides=overrides,
        )
        config.validate()
        return config

    @classmethod
    def load(cls, path: str) -> WorldConfig:
        with open(path, encoding="utf-8") as fh:
            return cls.from_json_obj(json.load(fh))

    @classmethod
    def default(cls) -> WorldConfig:
        text = resources.files("psadialog.data").joinpath("default_config.json").read_text("utf-8")
        return cls.from_json_obj(json.loads(text))

    def validate(self) -> None:
        names = self.location_names()
        if len(set(names)) != len(names):
            raise ConfigError("duplicate location names")
        if self.start_location not in names:
            raise ConfigError(f"start_location {self.start_location!r} is not a location")
        for a in names:
            for b in names:
                if a == b:
                    if self.distances.get((a, b), 0.0) != 0.0:
                        raise ConfigError(f"nonzero self-distance at {a}")
                    continue
                if (a, b) not in self.distances:
                    raise ConfigError(f"missing distance {a} <-> {b}")
                d = self.distances[(a, b)]
                if d < 0:
                    raise ConfigError(f"negative distance {a} <-> {b}")
                if d != self.distances[(b, a)]:
                    raise ConfigError(f"asymmetric distance {a} <-> {b}")
        for a in names:
            for b in names:
                for c in names:
                    if self.distance(a, b) > self.distance(a, c) + self.distance(c, b) + 1e-9:
                        raise ConfigError(
                            f"triangle inequality violated: d({a},{b}) > d({a},{c}) + d({c},{b})")
        for door in self.doors:
            if not self.is_location(door.name) and (
                    door.attached_to is None or not self.is_location(door.attached_to)):
                raise ConfigError(f"door {door.name} is neither a location nor attached to one")
            if door.initial not in (OPEN, CLOSED):
                raise ConfigError(f"door {door.name} has bad initial status {door.initial!r}")
        for sort in ("location", "deck", "door"):
            if not self.sort_members(sort):
                raise ConfigError(f"sort {sort!r} has no members")
        if not self.parameters:
            raise ConfigError("no environment parameters configured")


# ---------------------------------------------------------------------------
# State


@dataclass(frozen=True)
class WorldState:
    position: Position
    doors: tuple[tuple[str, str], ...]          # (door, status), config order
    env: tuple[tuple[str, str, float], ...]     # (location, parameter, value)
    last_stop: str

    @classmethod
    def initial(cls, config: WorldConfig) -> WorldState:
        doors = tuple((d.name, d.initial) for d in config.doors)
        env = tuple(
            (loc.name, p.name, config.env_value(loc.name, p.name))
            for loc in config.locations for p in config.parameters
        )
        return cls(AtLocation(config.start_location), doors, env, config.start_location)

    def door_status(self, door: str) -> str:
        for name, status in self.doors:
            if name == door:
                return status
        raise UnknownDoor(door)

    def env_value(self, location: str, parameter: str) -> float:
        for loc, param, value in self.env:
            if loc == location and param == parameter:
                return value
        raise UnknownParameter(f"{parameter} at {location}")

    def with_door(self, door: str, status: str) -> WorldState:
        self.door_status(door)
        doors = tuple((n, status if n == door else s) for n, s in self.doors)
        return replace(self, doors=doors)

    def at(self, location: str) -> WorldState:
        return replace(self, position=AtLocation(location), last_stop=location)

    def in_transit(self, frm: str, to: str, fraction: float) -> WorldState:
        return replace(self, position=InTransit(frm, to, fraction))


def travel_cost(config: WorldConfig, state: WorldState, dest: str) -> float:
    """Seconds to reach dest from the current position.

    Transit positions interpolate along the interrupted edge and route through
    whichever endpoint gives the cheaper total.
    """
    if not config.is_location(dest):
        raise UnknownLocation(dest)
    pos = state.position
    if isinstance(pos, AtLocation):
        return config.distance(pos.name, dest)
    edge = config.distance(pos.frm, pos.to)
    via_from = pos.fraction * edge + config.distance(pos.frm, dest)
    via_to = (1.0 - pos.fraction) * edge + config.distance(pos.to, dest)
    return min(via_from, via_to)


def apply_effector(config: WorldConfig, state: WorldState, action: str,
                   args: list) -> tuple[WorldState, list[Event], float]:
    """Apply one primitive action, returning (new state, events, seconds)."""
    if action in ("go_to", "resume_to"):
        (dest,) = args
        cost = travel_cost(config, state, dest)
        return state.at(dest), [MoveCompleted(dest)], cost
    if action == "measure":
        (parameter,) = args
        pos = state.position
        if not isinstance(pos, AtLocation):
            raise UnknownLocation("cannot measure while in transit")
        value = state.env_value(pos.name, parameter)
        unit = config.parameter(parameter).unit
        event = Measurement(parameter, pos.name, value, unit)
        return state, [event], config.duration("measure")
    if action == "change_status":
        entity, attribute, value = args
        if attribute != "open_closed":
            raise WorldError(f"unknown attribute {attribute!r}")
        if value not in (OPEN, CLOSED):
            raise WorldError(f"bad door status {value!r}")
        new = state.with_door(entity, value)
        return new, [DoorChanged(entity, value)], config.duration("change_status")
    if action == "stop":
        return state, [Halted(state.position)], config.duration("stop")
    raise WorldError(f"unknown effector action {action!r}")


# ---------------------------------------------------------------------------
# Snapshots


@dataclass(frozen=True)
class WorldSnapshot:
    position: Position
    doors: tuple[tuple[str, str], ...]
    env: tuple[tuple[str, str, float], ...]
    last_stop: str

    def to_json_obj(self) -> dict:
        env: dict[str, dict[str, float]] = {}
        for loc, param, value in self.env:
            env.setdefault(loc, {})[param] = value
        return {
            "position": self.position.to_json(),
            "doors": dict(self.doors),
            "env": env,
            "last_stop": self.last_stop,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> WorldSnapshot:
        env = tuple(
            (loc, param, value)
            for loc, params in obj["env"].items()
            for param, value in params.items()
        )
        return cls(position_from_json(obj["position"]),
                   tuple(obj["doors"].items()), env, obj["last_stop"])


def snapshot(state: WorldState) -> WorldSnapshot:
    return WorldSnapshot(state.position, state.doors, state.env, state.last_stop)
