"""Solution graphs: the premise DAG of a context and the judgments it induces."""

from __future__ import annotations

from dataclasses import dataclass

from .context import Context, Statement, StatementKind, errors_only, validate_context
from .errors import StructureError
from .lang import Definition, functions_used, to_json


@dataclass(frozen=True)
class SolutionGraph:
    """Nodes are statement ids; an edge ``(p, c)`` means ``c`` cites ``p``."""

    nodes: tuple[int, ...]
    edges: frozenset[tuple[int, int]]
    kinds: tuple[StatementKind, ...]

    def in_neighbors(self, node: int) -> list[int]:
        return sorted(p for p, c in self.edges if c == node)

    def in_degree(self, node: int) -> int:
        return sum(1 for _, c in self.edges if c == node)

    def ancestors(self, node: int) -> set[int]:
        parents: dict[int, list[int]] = {}
        for p, c in self.edges:
            parents.setdefault(c, []).append(p)
        seen: set[int] = set()
        todo = list(parents.get(node, ()))
        while todo:
            p = todo.pop()
            if p not in seen:
                seen.add(p)
                todo.extend(parents.get(p, ()))
        return seen

    @property
    def conclusion_ids(self) -> list[int]:
        return [n for n in self.nodes if self.kinds[n] is StatementKind.CONCLUSION]


@dataclass(frozen=True)
class Judgment:
    """``premises |- conclusion``; ``definitions`` are ambient, not counted as premises."""

    conclusion: Statement
    premises: tuple[Statement, ...]
    definitions: tuple[Statement, ...] = ()

    @classmethod
    def from_formulas(cls, premises, conclusion, definitions=()) -> "Judgment":
        """A free-standing judgment, numbering premises before the conclusion."""
        stmts = [Statement(i, StatementKind.FACT, p) for i, p in enumerate(premises)]
        defs = [Statement(len(stmts) + i, StatementKind.DEFINITION, d)
                for i, d in enumerate(definitions)]
        cid = len(stmts) + len(defs)
        return cls(Statement(cid, StatementKind.CONCLUSION, conclusion,
                             tuple(range(len(stmts)))), tuple(stmts), tuple(defs))

    @property
    def id(self) -> int:
        return self.conclusion.id

    @property
    def premise_ids(self) -> list[int]:
        return [p.id for p in self.premises]

    def all_definitions(self) -> list[Definition]:
        found = [s.body for s in self.premises if isinstance(s.body, Definition)]
        return found + [s.body for s in self.definitions]

    def premise_formulas(self) -> list:
        return [s.body for s in self.premises if not isinstance(s.body, Definition)]

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "premises": self.premise_ids,
            "definitions": [s.id for s in self.definitions],
            "premise_formulas": [to_json(s.body) for s in self.premises],
            "conclusion": to_json(self.conclusion.body),
        }


@dataclass(frozen=True)
class CostMetrics:
    n: int
    M: int
    C1: int
    C2: int

    @property
    def within_bound(self) -> bool:
        return self.C2 <= self.n * self.M

    def to_json(self) -> dict:
        return {"n": self.n, "M": self.M, "C1": self.C1, "C2": self.C2}


def build_graph(ctx: Context) -> SolutionGraph:
    problems = errors_only(validate_context(ctx))
    if problems:
        first = problems[0]
        raise StructureError(f"cannot build a graph: {first}", first.statement_id, first.rule)
    edges = frozenset((p, s.id) for s in ctx.statements for p in s.premises)
    return SolutionGraph(tuple(s.id for s in ctx.statements), edges,
                         tuple(s.kind for s in ctx.statements))


def _ambient_definitions(ctx: Context, seeds: list[Statement],
                         exclude: set[int]) -> tuple[Statement, ...]:
    table = ctx.definitions()
    names = set()
    for s in seeds:
        names |= {name for name, _ in functions_used(s.body)}
    found: dict[int, Statement] = {}
    todo = sorted(names)
    while todo:
        name = todo.pop()
        d = table.get(name)
        if d is None or d.id in found:
            continue
        found[d.id] = d
        todo.extend(name for name, _ in functions_used(d.body))
    return tuple(found[i] for i in sorted(found) if i not in exclude)


def extract_judgments(g: SolutionGraph, ctx: Context) -> list[Judgment]:
    """One judgment per conclusion, premises in id order, definitions attached."""
    out = []
    for cid in g.conclusion_ids:
        conclusion = ctx.statements[cid]
        premises = tuple(ctx.statements[p] for p in g.in_neighbors(cid))
        ambient = _ambient_definitions(ctx, [conclusion, *premises], {p.id for p in premises})
        out.append(Judgment(conclusion, premises, ambient))
    return out


def foundational_premises(g: SolutionGraph, node: int) -> set[int]:
    """Non-conclusion ancestors of ``node``: the base of its strengthened judgment."""
    return {a for a in g.ancestors(node) if g.kinds[a] is not StatementKind.CONCLUSION}


def dense_cost(n: int) -> int:
    """Premise statements fed when conclusion ``i`` is checked against all ``i`` earlier ones."""
    return n * (n + 1) // 2


def cost_metrics(g: SolutionGraph) -> CostMetrics:
    """C2 sums direct premises; C1 feeds each conclusion every earlier statement.

    For one given statement followed by ``n`` conclusions, C1 is ``dense_cost(n)``.
    """
    conclusions = g.conclusion_ids
    degrees = [g.in_degree(c) for c in conclusions]
    position = {node: i for i, node in enumerate(g.nodes)}
    dense = sum(position[c] for c in conclusions)
    return CostMetrics(len(conclusions), max(degrees, default=0), dense, sum(degrees))


@dataclass(frozen=True)
class Corollary:
    """A strengthened judgment ``foundation |- conclusion`` obtained by chaining."""

    conclusion: int
    foundation: tuple[int, ...]
    chain: tuple[int, ...]          # intermediate conclusions it depends on

    def to_json(self) -> dict:
        return {"conclusion": self.conclusion, "foundation": list(self.foundation),
                "chain": list(self.chain)}


def corollaries(g: SolutionGraph) -> list[Corollary]:
    out = []
    for c in g.conclusion_ids:
        base = foundational_premises(g, c)
        if base != set(g.in_neighbors(c)):
            chain = sorted(a for a in g.ancestors(c) if g.kinds[a] is StatementKind.CONCLUSION)
            out.append(Corollary(c, tuple(sorted(base)), tuple(chain)))
    return out


def to_dot(g: SolutionGraph) -> str:
    if not g.nodes:
        return "digraph {}\n"
    lines = ["digraph {"]
    for n in g.nodes:
        lines.append(f'  n{n} [label="{n}:{g.kinds[n].value}"];')
    for p, c in sorted(g.edges):
        lines.append(f"  n{p} -> n{c};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def judgments_to_json(judgments: list[Judgment]) -> list[dict]:
    return [j.to_json() for j in judgments]
