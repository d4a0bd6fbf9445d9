"""The executable script language: an imperative tree of primitive actions.

Nodes are immutable; loops are unrolled by substitution, so no runtime
environment is needed.  The textual form is one s-expression per script,
used for logs and the pipeline inspector.
"""

from __future__ import annotations

from dataclasses import dataclass

RESERVED = {"seq", "foreach", "if", "presupp_failure", "noop", "status"}


@dataclass(frozen=True)
class Var:
    name: str

    def __repr__(self):
        return f"${self.name}"


Value = "str | int | float | Var"


@dataclass(frozen=True)
class Status:
    """Condition: entity attribute has the given value."""
    entity: object
    attribute: str
    value: str


class ScriptNode:
    pass


@dataclass(frozen=True)
class Seq(ScriptNode):
    children: tuple


@dataclass(frozen=True)
class Foreach(ScriptNode):
    var: str
    items: tuple
    body: ScriptNode


@dataclass(frozen=True)
class IfThenElse(ScriptNode):
    cond: Status
    then: ScriptNode
    els: ScriptNode


@dataclass(frozen=True)
class Primitive(ScriptNode):
    action: str
    args: tuple


@dataclass(frozen=True)
class PresuppFailure(ScriptNode):
    reason: str
    entity: object


@dataclass(frozen=True)
class Noop(ScriptNode):
    pass


def seq(*children) -> Seq:
    return Seq(tuple(children))


def prim(action: str, *args) -> Primitive:
    return Primitive(action, tuple(args))


def substitute(node, var: str, value):
    """Replace every Var(var) in the tree by value."""
    def sub_val(v):
        return value if isinstance(v, Var) and v.name == var else v

    if isinstance(node, Seq):
        return Seq(tuple(substitute(c, var, value) for c in node.children))
    if isinstance(node, Foreach):
        if node.var == var:  # inner binder shadows
            return node
        return Foreach(node.var, tuple(sub_val(i) for i in node.items),
                       substitute(node.body, var, value))
    if isinstance(node, IfThenElse):
        cond = Status(sub_val(node.cond.entity), node.cond.attribute, node.cond.value)
        return IfThenElse(cond, substitute(node.then, var, value),
                          substitute(node.els, var, value))
    if isinstance(node, Primitive):
        return Primitive(node.action, tuple(sub_val(a) for a in node.args))
    if isinstance(node, PresuppFailure):
        return PresuppFailure(node.reason, sub_val(node.entity))
    return node


def expand_foreach(node: Foreach) -> Seq:
    """Unroll a loop into the sequence of its substituted bodies."""
    return Seq(tuple(substitute(node.body, node.var, item) for item in node.items))


def count_actions(node) -> int:
    """Number of primitive effector actions a run will attempt (branches count
    their larger side)."""
    if isinstance(node, Seq):
        return sum(count_actions(c) for c in node.children)
    if isinstance(node, Foreach):
        return len(node.items) * count_actions(node.body)
    if isinstance(node, IfThenElse):
        return max(count_actions(node.then), count_actions(node.els))
    if isinstance(node, Primitive):
        return 1
    return 0


# ---------------------------------------------------------------------------
# Textual form


def _atom_str(value) -> str:
    if isinstance(value, Var):
        return f"${value.name}"
    return str(value)


def to_sexpr(node) -> str:
    if isinstance(node, Seq):
        return "(seq " + " ".join(to_sexpr(c) for c in node.children) + ")" \
            if node.children else "(seq)"
    if isinstance(node, Foreach):
        items = " ".join(_atom_str(i) for i in node.items)
        return f"(foreach {node.var} ({items}) {to_sexpr(node.body)})"
    if isinstance(node, IfThenElse):
        cond = (f"(status {_atom_str(node.cond.entity)} "
                f"{node.cond.attribute} {node.cond.value})")
        return f"(if {cond} {to_sexpr(node.then)} {to_sexpr(node.els)})"
    if isinstance(node, Primitive):
        if not node.args:
            return f"({node.action})"
        return f"({node.action} " + " ".join(_atom_str(a) for a in node.args) + ")"
    if isinstance(node, PresuppFailure):
        return f"(presupp_failure ({node.reason} {_atom_str(node.entity)}))"
    if isinstance(node, Noop):
        return "(noop)"
    raise TypeError(f"not a script node: {node!r}")


def _tokenize_sexpr(text: str) -> list[str]:
    return text.replace("(", " ( ").replace(")", " ) ").split()


def _parse_atom(token: str):
    if token.startswith("$"):
        return Var(token[1:])
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        pass
    return token


def parse_sexpr(text: str):
    tokens = _tokenize_sexpr(text)
    pos = 0

    def read():
        nonlocal pos
        if pos >= len(tokens):
            raise ValueError("unexpected end of script text")
        tok = tokens[pos]
        pos += 1
        if tok != "(":
            raise ValueError(f"expected '(' at token {tok!r}")
        if pos >= len(tokens):
            raise ValueError("unexpected end of script text")
        head = tokens[pos]
        pos += 1
        if head == "seq":
            children = []
            while tokens[pos] != ")":
                children.append(read())
            pos += 1
            return Seq(tuple(children))
        if head == "foreach":
            var = tokens[pos]
            pos += 1
            if tokens[pos] != "(":
                raise ValueError("foreach expects an item list")
            pos += 1
            items = []
            while tokens[pos] != ")":
                items.append(_parse_atom(tokens[pos]))
                pos += 1
            pos += 1
            body = read()
            expect_close()
            return Foreach(var, tuple(items), body)
        if head == "if":
            cond = read_status()
            then = read()
            els = read()
            expect_close()
            return IfThenElse(cond, then, els)
        if head == "presupp_failure":
            if tokens[pos] != "(":
                raise ValueError("presupp_failure expects a reason form")
            pos += 1
            reason = tokens[pos]
            entity = _parse_atom(tokens[pos + 1])
            pos += 2
            if tokens[pos] != ")":
                raise ValueError("malformed presupp_failure reason")
            pos += 1
            expect_close()
            return PresuppFailure(reason, entity)
        if head == "noop":
            expect_close()
            return Noop()
        # anything else is a primitive action
        args = []
        while tokens[pos] != ")":
            args.append(_parse_atom(tokens[pos]))
            pos += 1
        pos += 1
        return Primitive(head, tuple(args))

    def read_status() -> Status:
        nonlocal pos
        if tokens[pos] != "(" or tokens[pos + 1] != "status":
            raise ValueError("if expects a (status ...) condition")
        pos += 2
        entity = _parse_atom(tokens[pos])
        attribute = tokens[pos + 1]
        value = tokens[pos + 2]
        pos += 3
        if tokens[pos] != ")":
            raise ValueError("malformed status condition")
        pos += 1
        return Status(entity, attribute, value)

    def expect_close():
        nonlocal pos
        if pos >= len(tokens) or tokens[pos] != ")":
            raise ValueError("expected ')'")
        pos += 1

    node = read()
    if pos != len(tokens):
        raise ValueError("trailing tokens after script")
    return node
