"""JSON-shaped encoding of ASTs: every node is ``{"tag": ..., ...children}``."""

from __future__ import annotations

from fractions import Fraction
from typing import Any

from .ast import (
    Add, And, App, Bool, Branch, Definition, Div, Exists, Forall, Implies,
    Member, Mul, Neg, Not, Num, Or, Pow, Rel, Sort, Sub, Var,
)

_BINARY = {"Add": Add, "Sub": Sub, "Mul": Mul, "Div": Div, "Pow": Pow,
           "And": And, "Or": Or, "Implies": Implies}


def to_json(node) -> dict[str, Any]:
    tag = type(node).__name__
    if isinstance(node, Num):
        return {"tag": tag, "value": str(node.value)}
    if isinstance(node, Var):
        return {"tag": tag, "name": node.name}
    if isinstance(node, App):
        return {"tag": tag, "func": node.func, "args": [to_json(a) for a in node.args]}
    if isinstance(node, Neg):
        return {"tag": tag, "children": [to_json(node.arg)]}
    if isinstance(node, Pow):
        return {"tag": tag, "children": [to_json(node.base), to_json(node.exp)]}
    if isinstance(node, (Add, Sub, Mul, Div, And, Or, Implies)):
        return {"tag": tag, "children": [to_json(node.left), to_json(node.right)]}
    if isinstance(node, Rel):
        return {"tag": tag, "op": node.op, "children": [to_json(node.left), to_json(node.right)]}
    if isinstance(node, Member):
        return {"tag": tag, "sort": node.sort.value, "children": [to_json(node.term)]}
    if isinstance(node, Bool):
        return {"tag": tag, "value": node.value}
    if isinstance(node, Not):
        return {"tag": tag, "children": [to_json(node.arg)]}
    if isinstance(node, (Forall, Exists)):
        return {"tag": tag, "var": node.var, "sort": node.sort.value,
                "children": [to_json(node.body)]}
    if isinstance(node, Definition):
        return {
            "tag": tag, "name": node.name, "params": list(node.params),
            "arg_sorts": [s.value for s in node.arg_sorts],
            "result_sort": node.result_sort.value,
            "branches": [{"body": to_json(b.body), "guard": to_json(b.guard)}
                         for b in node.branches],
        }
    raise TypeError(f"cannot serialize {node!r}")


def from_json(data: dict[str, Any]):
    tag = data["tag"]
    kids = [from_json(c) for c in data.get("children", [])]
    if tag == "Num":
        return Num(Fraction(data["value"]))
    if tag == "Var":
        return Var(data["name"])
    if tag == "App":
        return App(data["func"], tuple(from_json(a) for a in data["args"]))
    if tag == "Neg":
        return Neg(kids[0])
    if tag in _BINARY:
        return _BINARY[tag](*kids)
    if tag == "Rel":
        return Rel(data["op"], *kids)
    if tag == "Member":
        return Member(kids[0], Sort(data["sort"]))
    if tag == "Bool":
        return Bool(bool(data["value"]))
    if tag == "Not":
        return Not(kids[0])
    if tag in ("Forall", "Exists"):
        cls = Forall if tag == "Forall" else Exists
        return cls(data["var"], Sort(data["sort"]), kids[0])
    if tag == "Definition":
        return Definition(
            data["name"], tuple(data["params"]),
            tuple(Sort(s) for s in data["arg_sorts"]), Sort(data["result_sort"]),
            tuple(Branch(from_json(b["body"]), from_json(b["guard"])) for b in data["branches"]),
        )
    raise ValueError(f"unknown node tag {tag!r}")
