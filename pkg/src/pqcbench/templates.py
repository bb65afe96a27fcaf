"""Circuit templates: declarative gate programs generic in qubit count.

A template is a unit layer of gate patterns (plus an optional one-off
prologue) whose qubit indices are integer expressions over the width ``n``
and loop variables.  Instantiating at a concrete ``(n, L)`` repeats the unit
layer L times, handing every ``param`` token a fresh parameter slot.

Templates are defined in a small text format, one template per file::

    id: c02
    connectivity: nearest-neighbor
    qubits: 2+
    layer:
      for i in 0..n: RX i param
      for i in 0..n: RZ i param
      for i in 0..n-1: CNOT n-1-i, n-2-i

Header lines are ``id:``, ``connectivity:``, optional ``qubits:`` (``1`` for
an exact width, ``2+`` for a minimum; default ``2+``), and optional
``sampler:`` (``parameters`` or ``haar``).  After an optional ``prologue:``
section, the ``layer:`` section holds gate lines of the form::

    [for VAR in START..STOP:]* KIND expr[, expr] [param | FLOAT]*

Loop bounds are half-open (``0..n`` ranges over qubits ``0 .. n-1``).  Index
expressions use integer arithmetic (``+ - * /`` with floor division, ``mod``,
``gcd(a, b)``, parentheses) over loop variables and ``n``.  Angle positions
take ``param`` (a fresh parameter slot) or a float literal (fixed radians).
Lines starting with ``#`` are comments.

The built-in catalog ships as such files under ``pqcbench/catalog`` so the
gate-level content of every template is reviewable as plain text.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass
from importlib import resources
from typing import Iterator, Sequence

from . import sim
from .sim import GATE_ANGLE_COUNT, GATE_ARITY, GateOp, Slot, StateVector

CONNECTIVITY_CLASSES = (
    "none",
    "nearest-neighbor",
    "ring",
    "circuit-block",
    "all-to-all",
)

#: The 19 benchmark templates, in catalog order.
BENCHMARK_IDS = tuple(f"c{k:02d}" for k in range(1, 20))
SINGLE_QUBIT_IDS = ("idle", "single-A", "single-B", "haar-1q")
COMPARISON_IDS = ("nn-cmp", "cb-cmp", "aa-cmp")
CATALOG_ORDER = BENCHMARK_IDS + SINGLE_QUBIT_IDS + COMPARISON_IDS


class TemplateError(ValueError):
    """Problem in a template definition (syntax or semantics)."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", col {col}" if col is not None else "") + ")"
        super().__init__(message + loc)
        self.line = line
        self.col = col


# -- index expressions --------------------------------------------------------

# AST nodes: ("int", v) | ("var", name) | ("neg", e) | ("bin", op, l, r)
#            | ("gcd", l, r)

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<float>\d+\.\d+)|(?P<int>\d+)|(?P<dots>\.\.)|(?P<name>[A-Za-z_]\w*)"
    r"|(?P<sym>[+\-*/(),:]))"
)

_KEYWORDS = {"for", "in", "param", "mod", "gcd"}


def _tokenize(text: str, line_no: int) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise TemplateError(
                f"unexpected character {text[pos:].lstrip()[0]!r}", line_no, pos + 1
            )
        pos = m.end()
        for kind in ("float", "int", "dots", "name", "sym"):
            val = m.group(kind)
            if val is not None:
                tokens.append((kind, val, m.start(kind) + 1))
                break
    return tokens


class _LineParser:
    def __init__(self, tokens: list[tuple[str, str, int]], line_no: int):
        self.tokens = tokens
        self.pos = 0
        self.line_no = line_no

    def peek(self) -> tuple[str, str, int] | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> tuple[str, str, int]:
        tok = self.peek()
        if tok is None:
            raise TemplateError("unexpected end of line", self.line_no)
        self.pos += 1
        return tok

    def expect(self, kind: str, value: str | None = None) -> tuple[str, str, int]:
        tok = self.next()
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = value if value is not None else kind
            raise TemplateError(f"expected {want!r}, got {tok[1]!r}", self.line_no, tok[2])
        return tok

    # expression grammar: add -> mul (('+'|'-') mul)* ; mul -> unary (('*'|'/'|'mod') unary)*
    def parse_expr(self):
        node = self._parse_mul()
        while (tok := self.peek()) is not None and tok[1] in ("+", "-"):
            self.next()
            node = ("bin", tok[1], node, self._parse_mul())
        return node

    def _parse_mul(self):
        node = self._parse_unary()
        while (tok := self.peek()) is not None and (
            tok[1] in ("*", "/") or (tok[0] == "name" and tok[1] == "mod")
        ):
            self.next()
            op = "mod" if tok[1] == "mod" else tok[1]
            node = ("bin", op, node, self._parse_unary())
        return node

    def _parse_unary(self):
        tok = self.peek()
        if tok is not None and tok[1] == "-":
            self.next()
            return ("neg", self._parse_unary())
        return self._parse_atom()

    def _parse_atom(self):
        tok = self.next()
        if tok[0] == "int":
            return ("int", int(tok[1]))
        if tok[0] == "name":
            if tok[1] == "gcd":
                self.expect("sym", "(")
                left = self.parse_expr()
                self.expect("sym", ",")
                right = self.parse_expr()
                self.expect("sym", ")")
                return ("gcd", left, right)
            if tok[1] in _KEYWORDS:
                raise TemplateError(
                    f"keyword {tok[1]!r} not allowed in expression", self.line_no, tok[2]
                )
            return ("var", tok[1])
        if tok[1] == "(":
            node = self.parse_expr()
            self.expect("sym", ")")
            return node
        raise TemplateError(f"unexpected token {tok[1]!r}", self.line_no, tok[2])


def eval_expr(node, env: dict[str, int]) -> int:
    kind = node[0]
    if kind == "int":
        return node[1]
    if kind == "var":
        if node[1] not in env:
            raise TemplateError(f"unknown symbol {node[1]!r} in index expression")
        return env[node[1]]
    if kind == "neg":
        return -eval_expr(node[1], env)
    if kind == "gcd":
        return math.gcd(eval_expr(node[1], env), eval_expr(node[2], env))
    _, op, left, right = node
    a, b = eval_expr(left, env), eval_expr(right, env)
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        if b == 0:
            raise TemplateError("division by zero in index expression")
        return a // b
    if op == "mod":
        if b == 0:
            raise TemplateError("mod by zero in index expression")
        return a % b
    raise TemplateError(f"unknown operator {op!r}")


def _expr_text(node) -> str:
    kind = node[0]
    if kind == "int":
        return str(node[1])
    if kind == "var":
        return node[1]
    if kind == "neg":
        return f"-{_expr_text(node[1])}"
    if kind == "gcd":
        return f"gcd({_expr_text(node[1])}, {_expr_text(node[2])})"
    _, op, left, right = node
    op_txt = " mod " if op == "mod" else op
    return f"({_expr_text(left)}{op_txt}{_expr_text(right)})"


def _expr_names(node, out: set[str]) -> None:
    kind = node[0]
    if kind == "var":
        out.add(node[1])
    elif kind == "neg":
        _expr_names(node[1], out)
    elif kind in ("bin",):
        _expr_names(node[2], out)
        _expr_names(node[3], out)
    elif kind == "gcd":
        _expr_names(node[1], out)
        _expr_names(node[2], out)


# -- template structure -------------------------------------------------------


@dataclass(frozen=True)
class GatePattern:
    """One gate line: optional nested loops around a parameterized gate."""

    loops: tuple[tuple[str, object, object], ...]  # (var, start ast, stop ast)
    kind: str
    qubit_exprs: tuple[object, ...]
    angle_sources: tuple[object, ...]  # "param" or float


@dataclass(frozen=True)
class CircuitTemplate:
    """Declarative unit-layer gate program, generic in qubit count."""

    id: str
    connectivity: str
    prologue: tuple[GatePattern, ...]
    layer: tuple[GatePattern, ...]
    exact_qubits: int | None = None
    min_qubits: int = 2
    sampler: str = "parameters"

    def supports_width(self, n: int) -> bool:
        if self.exact_qubits is not None:
            return n == self.exact_qubits
        return n >= self.min_qubits

    def params_per_layer(self, n: int) -> int:
        return sum(
            sum(1 for a in g.angles if isinstance(a, Slot))
            for g in _expand_patterns(self.layer, n, _SlotCounter())
        )


@dataclass(frozen=True)
class BoundCircuit:
    """A template instantiated at a concrete width and layer count."""

    template_id: str
    n: int
    layers: int
    gates: tuple[GateOp, ...]
    param_count: int
    connectivity: str
    sampler: str
    prologue_len: int
    unit_layer_len: int


@dataclass(frozen=True)
class CostMetrics:
    """Parameter count, two-qubit gate count, and wire-parallel depth."""

    num_params: int
    num_two_qubit: int
    depth: int


class _SlotCounter:
    def __init__(self) -> None:
        self.next_slot = 0

    def take(self) -> Slot:
        slot = Slot(self.next_slot)
        self.next_slot += 1
        return slot


# -- parsing ------------------------------------------------------------------


def parse_template_file(text: str) -> CircuitTemplate:
    """Parse one template definition document."""
    headers: dict[str, str] = {}
    sections: dict[str, list[GatePattern]] = {"prologue": [], "layer": []}
    current: str | None = None
    saw_layer = False

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        if stripped in ("prologue:", "layer:"):
            current = stripped[:-1]
            saw_layer = saw_layer or current == "layer"
            continue
        m = re.match(r"^([A-Za-z_][\w-]*):\s*(.*)$", stripped)
        if current is None:
            if m is None or m.group(1) in GATE_ARITY:
                raise TemplateError("expected 'key: value' header", line_no)
            headers[m.group(1)] = m.group(2).strip()
            continue
        sections[current].append(_parse_gate_line(stripped, line_no))

    if "id" not in headers or not headers["id"]:
        raise TemplateError("missing 'id:' header")
    if not saw_layer:
        raise TemplateError("missing 'layer:' section")
    connectivity = headers.get("connectivity", "none")
    if connectivity not in CONNECTIVITY_CLASSES:
        raise TemplateError(
            f"unknown connectivity {connectivity!r}; expected one of {CONNECTIVITY_CLASSES}"
        )
    sampler = headers.get("sampler", "parameters")
    if sampler not in ("parameters", "haar"):
        raise TemplateError(f"unknown sampler {sampler!r}")

    exact, minimum = None, 2
    if "qubits" in headers:
        m = re.fullmatch(r"(\d+)(\+?)", headers["qubits"])
        if m is None:
            raise TemplateError(f"bad qubits constraint {headers['qubits']!r}")
        if m.group(2):
            minimum = int(m.group(1))
        else:
            exact = int(m.group(1))

    template = CircuitTemplate(
        id=headers["id"],
        connectivity=connectivity,
        prologue=tuple(sections["prologue"]),
        layer=tuple(sections["layer"]),
        exact_qubits=exact,
        min_qubits=minimum,
        sampler=sampler,
    )
    _check_symbols(template)
    return template


def _parse_gate_line(text: str, line_no: int) -> GatePattern:
    parser = _LineParser(_tokenize(text, line_no), line_no)
    loops = []
    while (tok := parser.peek()) is not None and tok[0] == "name" and tok[1] == "for":
        parser.next()
        var = parser.expect("name")[1]
        if var in _KEYWORDS or var == "n":
            raise TemplateError(f"bad loop variable {var!r}", line_no)
        parser.expect("name", "in")
        start = parser.parse_expr()
        parser.expect("dots")
        stop = parser.parse_expr()
        parser.expect("sym", ":")
        loops.append((var, start, stop))

    kind_tok = parser.next()
    kind = kind_tok[1]
    if kind_tok[0] != "name" or kind not in GATE_ARITY:
        raise TemplateError(f"unknown gate kind {kind!r}", line_no, kind_tok[2])

    qubit_exprs = [parser.parse_expr()]
    for _ in range(GATE_ARITY[kind] - 1):
        parser.expect("sym", ",")
        qubit_exprs.append(parser.parse_expr())

    angles: list[object] = []
    while (tok := parser.peek()) is not None:
        if tok[0] == "name" and tok[1] == "param":
            parser.next()
            angles.append("param")
        elif tok[0] == "float":
            parser.next()
            angles.append(float(tok[1]))
        elif tok[1] == "-":
            parser.next()
            neg = parser.expect("float")
            angles.append(-float(neg[1]))
        else:
            raise TemplateError(f"unexpected token {tok[1]!r}", line_no, tok[2])
    if len(angles) != GATE_ANGLE_COUNT[kind]:
        raise TemplateError(
            f"{kind} takes {GATE_ANGLE_COUNT[kind]} angle source(s), got {len(angles)}",
            line_no,
        )
    return GatePattern(tuple(loops), kind, tuple(qubit_exprs), tuple(angles))


def _check_symbols(template: CircuitTemplate) -> None:
    for pattern in template.prologue + template.layer:
        bound = {"n"}
        for var, start, stop in pattern.loops:
            names: set[str] = set()
            _expr_names(start, names)
            _expr_names(stop, names)
            unknown = names - bound
            if unknown:
                raise TemplateError(
                    f"unknown symbol {sorted(unknown)[0]!r} in loop bounds of template "
                    f"{template.id!r}"
                )
            bound.add(var)
        names = set()
        for expr in pattern.qubit_exprs:
            _expr_names(expr, names)
        unknown = names - bound
        if unknown:
            raise TemplateError(
                f"unknown symbol {sorted(unknown)[0]!r} in index expression of template "
                f"{template.id!r}"
            )


def serialize_template(template: CircuitTemplate) -> str:
    """Render a template back to its file format (parse round-trips)."""
    lines = [f"id: {template.id}", f"connectivity: {template.connectivity}"]
    if template.exact_qubits is not None:
        lines.append(f"qubits: {template.exact_qubits}")
    else:
        lines.append(f"qubits: {template.min_qubits}+")
    if template.sampler != "parameters":
        lines.append(f"sampler: {template.sampler}")

    def pattern_line(g: GatePattern) -> str:
        parts = []
        for var, start, stop in g.loops:
            parts.append(f"for {var} in {_expr_text(start)}..{_expr_text(stop)}:")
        parts.append(g.kind)
        parts.append(", ".join(_expr_text(e) for e in g.qubit_exprs))
        for a in g.angle_sources:
            parts.append("param" if a == "param" else repr(float(a)))
        return "  " + " ".join(parts)

    if template.prologue:
        lines.append("prologue:")
        lines.extend(pattern_line(g) for g in template.prologue)
    lines.append("layer:")
    lines.extend(pattern_line(g) for g in template.layer)
    return "\n".join(lines) + "\n"


# -- instantiation ------------------------------------------------------------


def _expand_patterns(
    patterns: Sequence[GatePattern], n: int, slots: _SlotCounter
) -> Iterator[GateOp]:
    env = {"n": n}
    for pattern in patterns:
        yield from _expand_one(pattern, 0, dict(env), n, slots)


def _expand_one(
    pattern: GatePattern, loop_idx: int, env: dict[str, int], n: int, slots: _SlotCounter
) -> Iterator[GateOp]:
    if loop_idx < len(pattern.loops):
        var, start, stop = pattern.loops[loop_idx]
        lo, hi = eval_expr(start, env), eval_expr(stop, env)
        for value in range(lo, hi):
            env[var] = value
            yield from _expand_one(pattern, loop_idx + 1, env, n, slots)
        env.pop(var, None)
        return
    qubits = tuple(eval_expr(e, env) for e in pattern.qubit_exprs)
    for q, expr in zip(qubits, pattern.qubit_exprs):
        if not (0 <= q < n):
            raise TemplateError(
                f"index expression {_expr_text(expr)} = {q} out of range for n={n}"
            )
    angles = tuple(
        slots.take() if a == "param" else float(a) for a in pattern.angle_sources
    )
    yield GateOp(pattern.kind, qubits, angles)


def instantiate(template: CircuitTemplate, n: int, layers: int) -> BoundCircuit:
    """Expand a template at width ``n`` with ``layers`` repeated unit layers.

    Every repetition receives fresh parameter slots, numbered sequentially in
    program order (prologue first).
    """
    if not (1 <= n <= sim.MAX_QUBITS):
        raise ValueError(f"qubit count must be in [1, {sim.MAX_QUBITS}], got {n}")
    if not template.supports_width(n):
        want = (
            f"exactly {template.exact_qubits}"
            if template.exact_qubits is not None
            else f">= {template.min_qubits}"
        )
        raise ValueError(f"template {template.id!r} requires n {want}, got {n}")
    if layers < 1:
        raise ValueError(f"layer count must be >= 1, got {layers}")

    slots = _SlotCounter()
    prologue = tuple(_expand_patterns(template.prologue, n, slots))
    gates = list(prologue)
    unit_len = None
    for _ in range(layers):
        layer_gates = tuple(_expand_patterns(template.layer, n, slots))
        if unit_len is None:
            unit_len = len(layer_gates)
        gates.extend(layer_gates)
    return BoundCircuit(
        template_id=template.id,
        n=n,
        layers=layers,
        gates=tuple(gates),
        param_count=slots.next_slot,
        connectivity=template.connectivity,
        sampler=template.sampler,
        prologue_len=len(prologue),
        unit_layer_len=unit_len or 0,
    )


def bind(circuit: BoundCircuit, theta: Sequence[float]) -> StateVector:
    """Run the gate sequence on |0...0> with parameter slots filled from theta."""
    theta = list(theta)
    if len(theta) != circuit.param_count:
        raise ValueError(
            f"expected {circuit.param_count} parameters, got {len(theta)}"
        )
    state = sim.new_zero_state(circuit.n)
    for gate in circuit.gates:
        state = sim.apply_gate(state, gate, theta)
    return state


def cost_metrics(template: CircuitTemplate, n: int, layers: int) -> CostMetrics:
    """Cost triple computed by scanning the instantiated gate sequence.

    Depth uses greedy wire-scheduling: each gate starts at the earliest layer
    where all of its wires are free, in sequence order.  Repeated unit layers
    (and the prologue) stack as blocks, with a barrier at every block
    boundary, so a layer cannot borrow idle wires from the tail of the
    previous one.
    """
    circuit = instantiate(template, n, layers)
    blocks = [circuit.gates[: circuit.prologue_len]]
    offset = circuit.prologue_len
    for _ in range(layers):
        blocks.append(circuit.gates[offset : offset + circuit.unit_layer_len])
        offset += circuit.unit_layer_len

    depth = 0
    two_qubit = 0
    for block in blocks:
        wire_free = [depth] * n
        for gate in block:
            if len(gate.qubits) == 2:
                two_qubit += 1
            start = max(wire_free[q] for q in gate.qubits)
            for q in gate.qubits:
                wire_free[q] = start + 1
            depth = max(depth, start + 1)
    return CostMetrics(circuit.param_count, two_qubit, depth)


# -- catalog ------------------------------------------------------------------


def _catalog_dir_files(template_dir: str | os.PathLike | None) -> list[tuple[str, str]]:
    if template_dir is not None:
        names = sorted(f for f in os.listdir(template_dir) if f.endswith(".pqct"))
        out = []
        for name in names:
            with open(os.path.join(template_dir, name), encoding="utf-8") as fh:
                out.append((name, fh.read()))
        return out
    pkg = resources.files(__package__) / "catalog"
    return sorted(
        (entry.name, entry.read_text(encoding="utf-8"))
        for entry in pkg.iterdir()
        if entry.name.endswith(".pqct")
    )


def catalog(template_dir: str | os.PathLike | None = None) -> list[CircuitTemplate]:
    """All built-in templates (or the contents of ``template_dir``).

    Built-ins come back in catalog order: the 19 benchmark circuits, the four
    single-qubit demonstration circuits, then the three two-qubit-gate
    configuration comparison circuits.
    """
    templates = []
    seen = set()
    for name, text in _catalog_dir_files(template_dir):
        try:
            template = parse_template_file(text)
        except TemplateError as exc:
            raise TemplateError(f"{name}: {exc}") from exc
        if template.id in seen:
            raise TemplateError(f"duplicate template id {template.id!r} in {name}")
        seen.add(template.id)
        templates.append(template)
    order = {tid: i for i, tid in enumerate(CATALOG_ORDER)}
    templates.sort(key=lambda t: (order.get(t.id, len(order)), t.id))
    return templates


def get_template(
    template_id: str, template_dir: str | os.PathLike | None = None
) -> CircuitTemplate:
    for template in catalog(template_dir):
        if template.id == template_id:
            return template
    raise KeyError(f"no template with id {template_id!r}")
