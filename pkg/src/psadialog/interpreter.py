"""One script interpreter, two execution types.

Evaluate mode threads a simulated copy of the world and records meta-outputs
(presupposition failures, the final cost estimate).  Execute mode drives the
effectors and emits events; presupposition markers become null actions there.
The same node rules serve both modes, so a plan runs exactly as it simulated.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from . import meta, world as w
from .script import (Foreach, IfThenElse, Noop, PresuppFailure, Primitive, Seq,
                     Status, Var, prim, substitute)


class ExecutionMode(enum.Enum):
    EVALUATE = "evaluate"
    EXECUTE = "execute"


class DuplicateProcedure(Exception):
    pass


class BadProcedure(Exception):
    pass


@dataclass(frozen=True)
class Procedure:
    name: str
    params: tuple[str, ...]
    body: object

    def inline(self, args: tuple) -> object:
        if len(args) != len(self.params):
            raise BadProcedure(f"{self.name} expects {len(self.params)} args")
        node = self.body
        for param, arg in zip(self.params, args):
            node = substitute(node, param, arg)
        return node


def _references(node, name: str) -> bool:
    if isinstance(node, Seq):
        return any(_references(c, name) for c in node.children)
    if isinstance(node, Foreach):
        return _references(node.body, name)
    if isinstance(node, IfThenElse):
        return _references(node.then, name) or _references(node.els, name)
    if isinstance(node, Primitive):
        return node.action == name
    return False


def _free_vars(node) -> set[str]:
    if isinstance(node, Seq):
        return set().union(*(_free_vars(c) for c in node.children)) if node.children else set()
    if isinstance(node, Foreach):
        inner = _free_vars(node.body) - {node.var}
        inner |= {i.name for i in node.items if isinstance(i, Var)}
        return inner
    if isinstance(node, IfThenElse):
        out = _free_vars(node.then) | _free_vars(node.els)
        if isinstance(node.cond.entity, Var):
            out.add(node.cond.entity.name)
        return out
    if isinstance(node, Primitive):
        return {a.name for a in node.args if isinstance(a, Var)}
    if isinstance(node, PresuppFailure):
        return {node.entity.name} if isinstance(node.entity, Var) else set()
    return set()


class ProcedureLibrary:
    def __init__(self):
        self._procedures: dict[str, Procedure] = {}

    def register(self, procedure: Procedure) -> str:
        if procedure.name in self._procedures or procedure.name in w.EFFECTOR_ACTIONS:
            raise DuplicateProcedure(procedure.name)
        if _references(procedure.body, procedure.name):
            raise BadProcedure(f"{procedure.name} may not call itself")
        extra = _free_vars(procedure.body) - set(procedure.params)
        if extra:
            raise BadProcedure(f"{procedure.name} uses undeclared vars {sorted(extra)}")
        self._procedures[procedure.name] = procedure
        return procedure.name

    def get(self, name: str) -> Procedure | None:
        return self._procedures.get(name)

    def knows(self, name: str) -> bool:
        return name in self._procedures or name in w.EFFECTOR_ACTIONS


def default_library() -> ProcedureLibrary:
    lib = ProcedureLibrary()
    d = Var("d")
    lib.register(Procedure(
        "open_door", ("d",),
        IfThenElse(Status(d, "open_closed", w.OPEN),
                   PresuppFailure("already_open", d),
                   prim("change_status", d, "open_closed", w.OPEN))))
    lib.register(Procedure(
        "close_door", ("d",),
        IfThenElse(Status(d, "open_closed", w.CLOSED),
                   PresuppFailure("already_closed", d),
                   prim("change_status", d, "open_closed", w.CLOSED))))
    return lib


@dataclass
class InterpResult:
    final_state: w.WorldState
    meta_outputs: list[meta.MetaOutput]
    events: list[w.Event]
    cost_seconds: float

    @property
    def failed(self) -> bool:
        return meta.has_errors(self.meta_outputs)


class Cursor:
    """Stepwise interpreter state: one primitive action per step.

    With ``split_moves`` (used by the interactive execution controller),
    a travel action occupies two steps with an in-transit state between
    them, leaving a window where an interrupt can stop the robot mid-move.
    """

    def __init__(self, script, state: w.WorldState, mode: ExecutionMode,
                 config: w.WorldConfig, library: ProcedureLibrary | None = None,
                 sink=None, split_moves: bool = False):
        self.config = config
        self.library = library or default_library()
        self.mode = mode
        self.state = state
        self.sink = sink
        self.split_moves = split_moves and mode is ExecutionMode.EXECUTE
        self.metas: list[meta.MetaOutput] = []
        self.events: list[w.Event] = []
        self.cost = 0.0
        self.halted = False
        self._stack = [script]
        self._pending_move: tuple[str, float] | None = None

    # -- outcome ------------------------------------------------------------

    @property
    def done(self) -> bool:
        return not self._stack and self._pending_move is None

    def result(self) -> InterpResult:
        metas = list(self.metas)
        if self.mode is ExecutionMode.EVALUATE:
            metas.append(meta.cost_estimate(self.cost))
        return InterpResult(self.state, metas, list(self.events), self.cost)

    # -- stepping -----------------------------------------------------------

    def step(self) -> bool:
        """Advance by one primitive action; False when nothing remains."""
        if self.halted:
            return False
        if self._pending_move is not None:
            dest, cost = self._pending_move
            self._pending_move = None
            self.state = self.state.at(dest)
            self.cost += cost
            self._emit(w.MoveCompleted(dest))
            return True
        inlined = 0
        while self._stack:
            node = self._stack.pop()
            if isinstance(node, Noop):
                continue
            if isinstance(node, Seq):
                self._stack.extend(reversed(node.children))
                continue
            if isinstance(node, Foreach):
                bodies = [substitute(node.body, node.var, item) for item in node.items]
                self._stack.extend(reversed(bodies))
                continue
            if isinstance(node, IfThenElse):
                taken = self._branch(node)
                if taken is None:
                    return False
                self._stack.append(taken)
                continue
            if isinstance(node, PresuppFailure):
                if isinstance(node.entity, Var):
                    self._abort(f"unbound variable ${node.entity.name}")
                    return False
                if self.mode is ExecutionMode.EVALUATE:
                    self.metas.append(
                        meta.presupposition_failure(node.reason, node.entity))
                continue  # null action in execute mode
            if isinstance(node, Primitive):
                procedure = self.library.get(node.action)
                if procedure is not None:
                    inlined += 1
                    if inlined > 1000:
                        self._abort("runaway procedure expansion")
                        return False
                    try:
                        self._stack.append(procedure.inline(node.args))
                    except BadProcedure as exc:
                        self._abort(str(exc))
                        return False
                    continue
                return self._primitive(node)
            self._abort(f"not a script node: {node!r}")
            return False
        return False

    def run(self) -> InterpResult:
        while self.step():
            pass
        return self.result()

    def halt(self) -> None:
        """Interrupt: freeze position (mid-move if one is in flight)."""
        self._stack.clear()
        self._pending_move = None
        self.halted = True
        self._emit(w.Halted(self.state.position))

    # -- internals ----------------------------------------------------------

    def _branch(self, node: IfThenElse):
        cond = node.cond
        if isinstance(cond.entity, Var):
            self._abort(f"unbound variable ${cond.entity.name}")
            return None
        try:
            if cond.attribute == "open_closed":
                holds = self.state.door_status(cond.entity) == cond.value
            else:
                self._abort(f"unknown attribute {cond.attribute!r}")
                return None
        except w.WorldError as exc:
            self._abort(str(exc))
            return None
        return node.then if holds else node.els

    def _primitive(self, node: Primitive) -> bool:
        for arg in node.args:
            if isinstance(arg, Var):
                self._abort(f"unbound variable ${arg.name}")
                return False
        if node.action not in w.EFFECTOR_ACTIONS:
            self._abort(f"unknown action {node.action!r}")
            return False
        if (self.split_moves and node.action in ("go_to", "resume_to")
                and isinstance(self.state.position, w.AtLocation)
                and node.args and self.state.position.name != node.args[0]):
            return self._begin_move(node.args[0])
        try:
            state, events, seconds = w.apply_effector(
                self.config, self.state, node.action, list(node.args))
        except w.WorldError as exc:
            self._abort(str(exc))
            return False
        self.state = state
        self.cost += seconds
        if self.mode is ExecutionMode.EXECUTE:
            for event in events:
                self._emit(event)
        return True

    def _begin_move(self, dest: str) -> bool:
        try:
            cost = w.travel_cost(self.config, self.state, dest)
        except w.WorldError as exc:
            self._abort(str(exc))
            return False
        frm = self.state.position
        self._emit(w.MoveStarted(frm, dest, cost))
        self.state = self.state.in_transit(frm.name, dest, 0.5)
        self._pending_move = (dest, cost)
        return True

    def _abort(self, reason: str) -> None:
        self._stack.clear()
        self._pending_move = None
        self.metas.append(meta.invalid_command(reason))

    def _emit(self, event: w.Event) -> None:
        self.events.append(event)
        if self.sink is not None:
            self.sink(event)


def interpret(script, state: w.WorldState, mode: ExecutionMode,
              config: w.WorldConfig, library: ProcedureLibrary | None = None,
              sink=None) -> InterpResult:
    """Run a script to completion in the given execution type.

    Evaluate leaves the caller's state untouched and reports what would
    happen; Execute applies effectors and streams events to the sink.
    """
    return Cursor(script, state, mode, config, library, sink).run()
