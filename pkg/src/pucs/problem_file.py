"""Reading and writing problem files.

A problem file is YAML::

    dimension: 2
    sets:
      - name: C1
        pieces:
          - {shape: ball, center: [0, 1], radius: 1}
          - {shape: box, lower: [3, 0], upper: [4, 1]}
      - name: C2
        pieces:
          - {shape: halfspace, normal: [0, 1], offset: 0}   # <normal, x> <= offset
          - {shape: hyperplane, normal: [1, 1], offset: 5}  # <normal, x> == offset
    initial_points:        # optional start points for orbits (1-based r)
      - {r: 1, coords: [0.5, 1]}

Errors carry the 1-based line of the offending node.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import yaml

from .convex import Ball, Box, Halfspace, Hyperplane
from .errors import InstanceError, ProblemParseError, ValidationError
from .solver import Problem
from .ucs import UcsSet, check_disjoint

log = logging.getLogger(__name__)

SHAPES = {
    "ball": (Ball, ("center", "radius")),
    "box": (Box, ("lower", "upper")),
    "halfspace": (Halfspace, ("normal", "offset")),
    "hyperplane": (Hyperplane, ("normal", "offset")),
}
_VECTOR_KEYS = {"center", "lower", "upper", "normal"}


@dataclass
class ProblemFile:
    problem: Problem
    initial_points: dict = field(default_factory=dict)  # r -> coords tuple
    warnings: list = field(default_factory=list)


class _Reader:
    def __init__(self, text: str):
        self.loader = yaml.SafeLoader(text)

    def root(self):
        try:
            node = self.loader.get_single_node()
        except yaml.MarkedYAMLError as exc:
            mark = exc.problem_mark or exc.context_mark
            line = mark.line + 1 if mark else None
            raise ProblemParseError(f"syntax error: {exc.problem or exc}", line) from exc
        except yaml.YAMLError as exc:
            raise ProblemParseError(f"syntax error: {exc}") from exc
        if node is None:
            raise ProblemParseError("empty problem file", 1)
        return node

    @staticmethod
    def line(node) -> int:
        return node.start_mark.line + 1

    def mapping(self, node, path: str) -> dict:
        if not isinstance(node, yaml.MappingNode):
            raise ProblemParseError("expected a mapping", self.line(node), path)
        out = {}
        for k, v in node.value:
            key = self.scalar(k, path)
            if key in out:
                raise ProblemParseError(f"duplicate key {key!r}", self.line(k), path)
            out[key] = v
        return out

    def sequence(self, node, path: str) -> list:
        if not isinstance(node, yaml.SequenceNode):
            raise ProblemParseError("expected a list", self.line(node), path)
        return list(node.value)

    def scalar(self, node, path: str):
        if not isinstance(node, yaml.ScalarNode):
            raise ProblemParseError("expected a scalar", self.line(node), path)
        return self.loader.construct_object(node, deep=True)

    def number(self, node, path: str) -> float:
        v = self.scalar(node, path)
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ProblemParseError(f"expected a number, got {v!r}", self.line(node), path)
        v = float(v)
        if not math.isfinite(v):
            raise ProblemParseError("non-finite number", self.line(node), path)
        return v

    def integer(self, node, path: str) -> int:
        v = self.scalar(node, path)
        if isinstance(v, bool) or not isinstance(v, int):
            raise ProblemParseError(f"expected an integer, got {v!r}", self.line(node), path)
        return v

    def vector(self, node, path: str, dim: int) -> tuple:
        items = self.sequence(node, path)
        vec = tuple(self.number(x, f"{path}[{n}]") for n, x in enumerate(items))
        if len(vec) != dim:
            raise ProblemParseError(
                f"dimension mismatch: expected {dim} coordinates, got {len(vec)}", self.line(node), path
            )
        return vec


def _require(reader, fields: dict, key: str, node, path: str):
    if key not in fields:
        raise ProblemParseError(f"missing key {key!r}", reader.line(node), path)
    return fields[key]


def _reject_unknown(reader, fields: dict, allowed, node, path: str):
    extra = sorted(set(fields) - set(allowed))
    if extra:
        raise ProblemParseError(f"unknown key(s) {', '.join(map(repr, extra))}", reader.line(node), path)


def _piece(reader, node, path: str, dim: int):
    fields = reader.mapping(node, path)
    shape = reader.scalar(_require(reader, fields, "shape", node, path), f"{path}.shape")
    if shape not in SHAPES:
        raise ProblemParseError(
            f"unknown shape {shape!r} (expected one of {', '.join(SHAPES)})", reader.line(node), path
        )
    cls, keys = SHAPES[shape]
    _reject_unknown(reader, fields, ("shape",) + keys, node, path)
    args = []
    for key in keys:
        vnode = _require(reader, fields, key, node, path)
        if key in _VECTOR_KEYS:
            args.append(reader.vector(vnode, f"{path}.{key}", dim))
        else:
            args.append(reader.number(vnode, f"{path}.{key}"))
    try:
        return cls(*args)
    except (ValidationError, InstanceError) as exc:
        raise ProblemParseError(str(exc), reader.line(node), path) from exc


def load_problem_file(text: str, audit: bool = True) -> ProblemFile:
    """Parse problem-file text; disjointness findings become warnings."""
    reader = _Reader(text)
    root = reader.root()
    top = reader.mapping(root, "")
    _reject_unknown(reader, top, ("dimension", "sets", "initial_points"), root, "")
    dnode = _require(reader, top, "dimension", root, "")
    dim = reader.integer(dnode, "dimension")
    if dim < 1:
        raise ProblemParseError("dimension must be positive", reader.line(dnode), "dimension")
    snode = _require(reader, top, "sets", root, "")
    sets = []
    for i, set_node in enumerate(reader.sequence(snode, "sets"), start=1):
        path = f"sets[{i}]"
        fields = reader.mapping(set_node, path)
        _reject_unknown(reader, fields, ("name", "pieces"), set_node, path)
        name = str(reader.scalar(fields["name"], f"{path}.name")) if "name" in fields else f"C{i}"
        pnode = _require(reader, fields, "pieces", set_node, path)
        pieces = [
            _piece(reader, n, f"{path}.pieces[{j}]", dim)
            for j, n in enumerate(reader.sequence(pnode, f"{path}.pieces"), start=1)
        ]
        if not pieces:
            raise ProblemParseError("a set needs at least one piece", reader.line(pnode), f"{path}.pieces")
        sets.append(UcsSet(name, tuple(pieces)))
    if not sets:
        raise ProblemParseError("at least one set is required", reader.line(snode), "sets")
    problem = Problem(dim, tuple(sets))

    initial = {}
    if "initial_points" in top:
        inode = top["initial_points"]
        for n, item in enumerate(reader.sequence(inode, "initial_points"), start=1):
            path = f"initial_points[{n}]"
            fields = reader.mapping(item, path)
            _reject_unknown(reader, fields, ("r", "coords"), item, path)
            r = reader.integer(_require(reader, fields, "r", item, path), f"{path}.r")
            if not 1 <= r <= len(sets[0]):
                raise ProblemParseError(f"r={r} is not a piece of the first set", reader.line(item), path)
            if r in initial:
                raise ProblemParseError(f"duplicate initial point for r={r}", reader.line(item), path)
            initial[r] = reader.vector(_require(reader, fields, "coords", item, path), f"{path}.coords", dim)

    warnings = []
    if audit:
        for i, s in enumerate(sets, start=1):
            for v in check_disjoint(s):
                kind = "numerical gap" if v.approximate else "gap"
                msg = (
                    f"set {i} ({s.name}): pieces {v.pair[0]} and {v.pair[1]} are not disjoint "
                    f"({kind} {v.gap:g})"
                )
                log.info(msg)
                warnings.append(msg)
    return ProblemFile(problem, initial, warnings)


def parse_problem(text: str) -> Problem:
    return load_problem_file(text).problem


def fmt_float(v: float) -> str:
    """17 significant digits, always spelled as a float (YAML would read ``1e+20`` as text)."""
    s = format(float(v), ".17g")
    mant, _, exp = s.partition("e")
    if "." not in mant and "n" not in mant:
        mant += ".0"
    return mant + ("e" + exp if exp else "")


def _quoted(text: str) -> str:
    return yaml.safe_dump(text, default_style='"', width=math.inf, allow_unicode=True).strip()


def _vec(values) -> str:
    return "[" + ", ".join(fmt_float(v) for v in values) + "]"


def serialize_problem(problem: Problem, initial_points: dict | None = None) -> str:
    lines = [f"dimension: {problem.dimension}", "sets:"]
    for s in problem.sets:
        lines.append(f"  - name: {_quoted(s.name)}")
        lines.append("    pieces:")
        for p in s.pieces:
            _, keys = SHAPES[p.shape]
            parts = [f"shape: {p.shape}"]
            for key in keys:
                val = getattr(p, key)
                parts.append(f"{key}: {_vec(val) if key in _VECTOR_KEYS else fmt_float(val)}")
            lines.append("      - {" + ", ".join(parts) + "}")
    if initial_points:
        lines.append("initial_points:")
        for r in sorted(initial_points):
            lines.append(f"  - {{r: {r}, coords: {_vec(np.asarray(initial_points[r]))}}}")
    return "\n".join(lines) + "\n"
