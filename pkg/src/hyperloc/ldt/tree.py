"""Materialized linear decision trees: build, evaluate, fix up, serialize."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from ..cone import Cell
from ..exact import int_direction
from ..inference import infer_many
from ..oracle import GenComparisonQuery, PointOracle, make_query
from .common import prepare
from .config import LocateConfig
from .deterministic import DeterministicLocator, _Context

FORMAT = "hyperloc-tree"
VERSION = 1


class SizeGuardExceeded(RuntimeError):
    pass


class NonRedundantViolation(ValueError):
    pass


class UnrealizableBranch(RuntimeError):
    pass


class FixupFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class Node:
    """Internal node (``query`` and ``children`` indexed by answer + 1) or leaf (``leaf``)."""

    query: GenComparisonQuery | None = None
    children: tuple | None = None
    leaf: tuple | None = None

    @property
    def is_leaf(self) -> bool:
        return self.leaf is not None


@dataclass
class DecisionTree:
    d: int
    rows: tuple  # hyperplanes as tuples of floats
    nodes: list
    fixed: bool = False
    _relabel: dict = field(default_factory=dict, repr=False, compare=False)

    def depth(self) -> int:
        best = 0
        stack = [(0, 0)]
        while stack:
            nid, dep = stack.pop()
            node = self.nodes[nid]
            if node.is_leaf:
                best = max(best, dep)
                continue
            stack.extend((c, dep + 1) for c in node.children if c is not None)
        return best

    def leaves(self) -> int:
        return sum(1 for n in self.nodes if n.is_leaf)

    def queries(self) -> set:
        """Distinct query directions used anywhere in the tree."""
        return {n.query.direction for n in self.nodes if not n.is_leaf}

    def evaluate(self, x) -> tuple:
        return self.evaluate_oracle(PointOracle(x))[0]

    def evaluate_oracle(self, oracle):
        """Walk the tree; returns (signs, number of queries asked)."""
        nid = 0
        path = []
        followed = False
        while not self.nodes[nid].is_leaf:
            node = self.nodes[nid]
            a = oracle.answer(node.query.direction)
            path.append((node.query.direction, a))
            nxt = node.children[a + 1]
            if nxt is None:
                if a != 0 or not self.fixed:
                    raise UnrealizableBranch(f"no branch for answer {a} at node {nid}")
                nxt = node.children[2] if node.children[2] is not None else next(
                    c for c in node.children if c is not None)
                followed = True
            nid = nxt
        if not followed:
            return self.nodes[nid].leaf, len(path)
        return self._relabel_leaf(tuple(path)), len(path)

    def _relabel_leaf(self, path: tuple) -> tuple:
        hit = self._relabel.get(path)
        if hit is not None:
            return hit
        cell = Cell.from_conditions(self.d, path)
        if cell is None:
            raise NonRedundantViolation("path conditions are infeasible")
        signs = infer_many(cell, self.rows)
        if any(s is None for s in signs):
            raise FixupFailure("path conditions leave a sign undetermined")
        out = tuple(signs)
        self._relabel[path] = out
        return out

    def to_json(self) -> str:
        return dumps_tree(self)

    @classmethod
    def from_json(cls, text: str) -> "DecisionTree":
        return loads_tree(text)


def depth_bound(n: int, d: int, cfg: LocateConfig | None = None) -> int:
    """Worst-case depth of a built tree on n deduplicated vectors.

    Every query resolves or sorts a vector of the current sample, and a
    binary insertion into at most s groups costs ceil(log2(s + 1)) queries.
    """
    cfg = cfg or LocateConfig()
    return n * (1 + math.ceil(math.log2(cfg.s(d) + 1)))


def build_tree(H, cfg: LocateConfig | None = None, zero_branches: bool = True,
               max_nodes: int | None = None) -> DecisionTree:
    """Materialize the deterministic algorithm as a ternary tree.

    Only answers realizable on the current path's cell get a child. With
    ``zero_branches=False`` the 0 answer is dropped wherever another answer
    is possible, giving a tree that is correct off the hyperplanes only (see
    :func:`ldt_fix`).
    """
    prep = prepare(H)
    cfg = (cfg or LocateConfig()).validate(prep.d)
    guard = max_nodes if max_nodes is not None else cfg.size_guard
    ctx = _Context(prep, cfg)
    nodes: list = [None]
    stack = [(0, DeterministicLocator(ctx), Cell.full(prep.d))]
    while stack:
        nid, run, cell = stack.pop()
        q = run.next_query()
        if q is None:
            nodes[nid] = Node(leaf=run.result())
            continue
        possible = cell.signs(q.direction)
        if not zero_branches and possible != frozenset((0,)):
            possible = possible - {0}
        children = [None, None, None]
        for a in (-1, 0, 1):
            if a not in possible:
                continue
            if len(nodes) >= guard:
                raise SizeGuardExceeded(f"tree exceeds {guard} nodes")
            children[a + 1] = len(nodes)
            nodes.append(None)
            child = run.copy()
            child.answer(a)
            stack.append((children[a + 1], child, cell.add(q.direction, a)))
        nodes[nid] = Node(query=q, children=tuple(children))
    return DecisionTree(prep.d, prep.rows, nodes)


def ldt_fix(tree: DecisionTree) -> DecisionTree:
    """Make a tree that is correct off the hyperplanes correct everywhere.

    A 0 answer at a node without a 0-child continues into the '+' subtree
    (or the only child present), and the leaf reached is relabeled from the
    answers actually seen. Depth and queries are unchanged. Raises
    NonRedundantViolation if some node cannot be reached by any point.
    """
    missing = False
    stack = [(0, Cell.full(tree.d))]
    while stack:
        nid, cell = stack.pop()
        node = tree.nodes[nid]
        if node.is_leaf:
            continue
        possible = cell.signs(node.query.direction)
        for a, c in zip((-1, 0, 1), node.children):
            if c is None:
                if a in possible:
                    missing = True
                continue
            if a not in possible:
                raise NonRedundantViolation(f"node {c} is unreachable")
            stack.append((c, cell.add(node.query.direction, a)))
    if not missing or tree.fixed:
        return tree
    return DecisionTree(tree.d, tree.rows, list(tree.nodes), fixed=True)


def _num(x) -> str:
    return format(float(x), ".17g")


def _idx(i) -> str:
    return "null" if i is None else str(i)


def dumps_tree(tree: DecisionTree) -> str:
    out = ["{", f'  "format": "{FORMAT}",', f'  "version": {VERSION},', f'  "d": {tree.d},',
           f'  "fixed": {"true" if tree.fixed else "false"},', '  "hyperplanes": [']
    rows = ["    [" + ", ".join(_num(v) for v in r) + "]" for r in tree.rows]
    out.append(",\n".join(rows))
    out.append("  ],")
    out.append('  "nodes": [')
    lines = []
    for node in tree.nodes:
        if node.is_leaf:
            lines.append('    {"leaf": [' + ", ".join(str(s) for s in node.leaf) + "]}")
        else:
            q = node.query
            ch = ", ".join(_idx(c) for c in node.children)
            lines.append(f'    {{"i": {_idx(q.i)}, "j": {_idx(q.j)}, "a": {_num(q.a)}, "b": {_num(q.b)}, '
                         f'"alpha": {_num(q.alpha)}, "beta": {_num(q.beta)}, "children": [{ch}]}}')
    out.append(",\n".join(lines))
    out.append("  ]")
    out.append("}")
    return "\n".join(out) + "\n"


def loads_tree(text: str) -> DecisionTree:
    doc = json.loads(text)
    if doc.get("format") != FORMAT:
        raise ValueError(f"not a {FORMAT} document")
    if doc.get("version") != VERSION:
        raise ValueError(f"unsupported tree format version {doc.get('version')!r}")
    d = int(doc["d"])
    rows = tuple(tuple(float(v) for v in r) for r in doc["hyperplanes"])
    if any(len(r) != d for r in rows):
        raise ValueError("hyperplane dimension does not match d")
    nodes = []
    for k, rec in enumerate(doc["nodes"]):
        if "leaf" in rec:
            leaf = tuple(int(s) for s in rec["leaf"])
            if len(leaf) != len(rows):
                raise ValueError(f"node {k}: leaf has wrong length")
            nodes.append(Node(leaf=leaf))
            continue
        q = make_query(rows, rec["i"], rec["j"], float(rec["a"]), float(rec["b"]))
        if abs(q.alpha - float(rec["alpha"])) > 1e-12 or abs(q.beta - float(rec["beta"])) > 1e-12:
            raise ValueError(f"node {k}: stored alpha/beta disagree with a/b")
        children = tuple(None if c is None else int(c) for c in rec["children"])
        if len(children) != 3 or all(c is None for c in children):
            raise ValueError(f"node {k}: malformed children")
        for c in children:
            if c is not None and not 0 < c < len(doc["nodes"]):
                raise ValueError(f"node {k}: child index {c} out of range")
        nodes.append(Node(query=q, children=children))
    return DecisionTree(d, rows, nodes, fixed=bool(doc.get("fixed", False)))
