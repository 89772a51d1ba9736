"""Line-oriented text format (``.lop``) for linear-optical networks.

Grammar, one statement per line, ``#`` starts a comment::

    modes <name>+
    bs <label> <portA> <portB> <eta> flip=first|second
    mm <label> <portA> <portB> <xi>
    stage <label> cnot <6 modes> [eta=<v>] [etap=<v>]
    stage <label> cnot_mismatch <9 modes> [eta=<v>] [etap=<v>] [xi=<v>]
    matrix <label> <N*N real entries, row-major>
    input photon <mode>+
    detector <label> <mode>+

Parameters accept decimal literals and the exact tokens ``1/3``, ``1/2`` and
``2/3``.  ``input photon`` lines accumulate: ``input photon cV`` followed by
``input photon tH`` puts one photon in each.  ``matrix`` is an escape hatch
for raw transforms and is not checked for unitarity here.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .circuits import GATE_MODES, MISMATCH_MODES, CircuitLayout, GateParams, build_cnot, build_cnot_mismatch
from .network import FlipPort, ModeTransform, beamsplitter_matrix, compose, embed_modes, embed_two_mode, mode_match_matrix

EXACT_TOKENS = {"1/3": 1.0 / 3.0, "1/2": 1.0 / 2.0, "2/3": 2.0 / 3.0}
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_DECIMAL = re.compile(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?\Z")

STAGE_KINDS = {
    "cnot": (len(GATE_MODES), ("eta", "etap")),
    "cnot_mismatch": (len(GATE_MODES) + len(MISMATCH_MODES), ("eta", "etap", "xi")),
}


class DslError(Exception):
    """Problem in circuit text; ``line`` and ``column`` are 1-based."""

    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.message = message


class DslSyntaxError(DslError):
    pass


class UndeclaredModeError(DslError):
    pass


class DuplicateModeError(DslError):
    pass


class ParameterRangeError(DslError):
    pass


@dataclass(frozen=True)
class BeamsplitterElement:
    label: str
    port_a: str
    port_b: str
    eta: float
    flip: FlipPort = FlipPort.SECOND
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ModeMatchElement:
    label: str
    port_a: str
    port_b: str
    xi: float
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class StageElement:
    label: str
    kind: str
    modes: tuple[str, ...]
    params: tuple[tuple[str, float], ...] = ()
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class MatrixElement:
    label: str
    entries: tuple[float, ...]
    line: int = field(default=0, compare=False)


Element = Union[BeamsplitterElement, ModeMatchElement, StageElement, MatrixElement]


@dataclass(frozen=True)
class DetectorSpec:
    label: str
    modes: tuple[str, ...]


@dataclass(frozen=True)
class CircuitDescription:
    modes: tuple[str, ...] = ()
    elements: tuple[Element, ...] = ()
    input_photons: tuple[str, ...] | None = None
    detectors: tuple[DetectorSpec, ...] = ()


class _Line:
    """Tokens of one source line together with their 1-based columns."""

    def __init__(self, number: int, text: str):
        self.number = number
        self.tokens = [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", text)]

    def error(self, cls, index: int, message: str):
        column = self.tokens[index][1] if index < len(self.tokens) else self._end()
        return cls(self.number, column, message)

    def _end(self) -> int:
        if not self.tokens:
            return 1
        tok, col = self.tokens[-1]
        return col + len(tok)


def parse_number(token: str) -> float:
    """Decimal literal or one of the exact fraction tokens; ValueError otherwise."""
    if token in EXACT_TOKENS:
        return EXACT_TOKENS[token]
    if not _DECIMAL.match(token):
        raise ValueError(f"not a number: {token!r}")
    return float(token)


class _Parser:
    def __init__(self):
        self.modes: list[str] = []
        self.elements: list[Element] = []
        self.input_photons: list[str] | None = None
        self.detectors: list[DetectorSpec] = []
        self.labels: set[str] = set()

    def mode(self, line: _Line, i: int) -> str:
        name = line.tokens[i][0]
        if name not in self.modes:
            raise line.error(UndeclaredModeError, i, f"undeclared mode {name!r}")
        return name

    def number(self, line: _Line, i: int, what: str, bounded: bool = True) -> float:
        token = line.tokens[i][0]
        try:
            value = parse_number(token)
        except ValueError:
            raise line.error(DslSyntaxError, i, f"{what} {token!r} is not a number") from None
        if not math.isfinite(value):
            raise line.error(ParameterRangeError, i, f"{what} must be finite")
        if bounded and not 0.0 <= value <= 1.0:
            raise line.error(ParameterRangeError, i, f"{what} {token} out of range [0, 1]")
        return value

    def label(self, line: _Line, i: int) -> str:
        name = line.tokens[i][0]
        if not _NAME.match(name):
            raise line.error(DslSyntaxError, i, f"invalid label {name!r}")
        if name in self.labels:
            raise line.error(DslSyntaxError, i, f"label {name!r} used twice")
        self.labels.add(name)
        return name

    def arity(self, line: _Line, expected: int, usage: str) -> None:
        if len(line.tokens) != expected:
            index = min(len(line.tokens), expected)
            raise line.error(DslSyntaxError, index, f"expected: {usage}")

    def distinct_ports(self, line: _Line, a: str, b: str) -> None:
        if a == b:
            raise line.error(DslSyntaxError, 3, f"identical ports: {a} {b}")

    def statement(self, line: _Line) -> None:
        keyword = line.tokens[0][0]
        handler = getattr(self, f"_{keyword}", None)
        if handler is None:
            raise line.error(DslSyntaxError, 0, f"unknown statement {keyword!r}")
        handler(line)

    def _modes(self, line: _Line) -> None:
        if len(line.tokens) < 2:
            raise line.error(DslSyntaxError, 1, "expected: modes <name>+")
        for i in range(1, len(line.tokens)):
            name = line.tokens[i][0]
            if not _NAME.match(name):
                raise line.error(DslSyntaxError, i, f"invalid mode name {name!r}")
            if name in self.modes:
                raise line.error(DuplicateModeError, i, f"mode {name!r} declared twice")
            self.modes.append(name)

    def _bs(self, line: _Line) -> None:
        usage = "bs <label> <portA> <portB> <eta> flip=first|second"
        self.arity(line, 6, usage)
        label = self.label(line, 1)
        a, b = self.mode(line, 2), self.mode(line, 3)
        self.distinct_ports(line, a, b)
        eta = self.number(line, 4, "reflectivity")
        flip = line.tokens[5][0]
        if flip not in ("flip=first", "flip=second"):
            raise line.error(DslSyntaxError, 5, f"expected flip=first or flip=second, got {flip!r}")
        self.elements.append(
            BeamsplitterElement(label, a, b, eta, FlipPort(flip.split("=")[1]), line.number)
        )

    def _mm(self, line: _Line) -> None:
        self.arity(line, 5, "mm <label> <portA> <portB> <xi>")
        label = self.label(line, 1)
        a, b = self.mode(line, 2), self.mode(line, 3)
        self.distinct_ports(line, a, b)
        xi = self.number(line, 4, "mode-match parameter")
        self.elements.append(ModeMatchElement(label, a, b, xi, line.number))

    def _stage(self, line: _Line) -> None:
        if len(line.tokens) < 3:
            raise line.error(DslSyntaxError, len(line.tokens), "expected: stage <label> <kind> <mode>+")
        label = self.label(line, 1)
        kind = line.tokens[2][0]
        if kind not in STAGE_KINDS:
            raise line.error(DslSyntaxError, 2, f"unknown stage kind {kind!r}")
        width, allowed = STAGE_KINDS[kind]
        modes, params = [], {}
        for i in range(3, len(line.tokens)):
            token = line.tokens[i][0]
            if "=" in token:
                key, _, value = token.partition("=")
                if key not in allowed:
                    raise line.error(DslSyntaxError, i, f"{kind} stage takes no parameter {key!r}")
                if key in params:
                    raise line.error(DslSyntaxError, i, f"parameter {key!r} given twice")
                line.tokens[i] = (value, line.tokens[i][1] + len(key) + 1)
                params[key] = self.number(line, i, key)
            else:
                if params:
                    raise line.error(DslSyntaxError, i, "modes must precede parameters")
                modes.append(self.mode(line, i))
        if len(modes) != width:
            raise line.error(DslSyntaxError, 3, f"{kind} stage needs {width} modes, got {len(modes)}")
        if len(set(modes)) != width:
            raise line.error(DslSyntaxError, 3, f"{kind} stage lists a mode twice")
        ordered = tuple((k, params[k]) for k in allowed if k in params)
        self.elements.append(StageElement(label, kind, tuple(modes), ordered, line.number))

    def _matrix(self, line: _Line) -> None:
        n = len(self.modes)
        if len(line.tokens) != 2 + n * n:
            raise line.error(
                DslSyntaxError, min(len(line.tokens), 2),
                f"matrix needs {n * n} entries for {n} declared modes, got {len(line.tokens) - 2}",
            )
        label = self.label(line, 1)
        entries = tuple(self.number(line, i, "matrix entry", bounded=False) for i in range(2, len(line.tokens)))
        self.elements.append(MatrixElement(label, entries, line.number))

    def _input(self, line: _Line) -> None:
        if len(line.tokens) < 3 or line.tokens[1][0] != "photon":
            raise line.error(DslSyntaxError, 1, "expected: input photon <mode>+")
        photons = [self.mode(line, i) for i in range(2, len(line.tokens))]
        self.input_photons = (self.input_photons or []) + photons

    def _detector(self, line: _Line) -> None:
        if len(line.tokens) < 3:
            raise line.error(DslSyntaxError, len(line.tokens), "expected: detector <label> <mode>+")
        label = self.label(line, 1)
        modes = [self.mode(line, i) for i in range(2, len(line.tokens))]
        if len(set(modes)) != len(modes):
            raise line.error(DslSyntaxError, 2, f"detector {label!r} lists a mode twice")
        self.detectors.append(DetectorSpec(label, tuple(modes)))


def parse_circuit(text: str) -> CircuitDescription:
    parser = _Parser()
    for number, raw in enumerate(text.splitlines(), start=1):
        line = _Line(number, raw.split("#", 1)[0])
        if line.tokens:
            parser.statement(line)
    return CircuitDescription(
        modes=tuple(parser.modes),
        elements=tuple(parser.elements),
        input_photons=None if parser.input_photons is None else tuple(parser.input_photons),
        detectors=tuple(parser.detectors),
    )


def format_number(value: float) -> str:
    return format(value, ".17g")


def _serialize_element(el: Element) -> str:
    if isinstance(el, BeamsplitterElement):
        return f"bs {el.label} {el.port_a} {el.port_b} {format_number(el.eta)} flip={el.flip.value}"
    if isinstance(el, ModeMatchElement):
        return f"mm {el.label} {el.port_a} {el.port_b} {format_number(el.xi)}"
    if isinstance(el, StageElement):
        params = " ".join(f"{k}={format_number(v)}" for k, v in el.params)
        return " ".join(filter(None, ["stage", el.label, el.kind, " ".join(el.modes), params]))
    return " ".join(["matrix", el.label] + [format_number(v) for v in el.entries])


def serialize(desc: CircuitDescription) -> str:
    lines = []
    if desc.modes:
        lines.append("modes " + " ".join(desc.modes))
    lines.extend(_serialize_element(el) for el in desc.elements)
    if desc.input_photons is not None:
        lines.append("input photon " + " ".join(desc.input_photons))
    for det in desc.detectors:
        lines.append(f"detector {det.label} " + " ".join(det.modes))
    return "".join(line + "\n" for line in lines)


def layout_of(desc: CircuitDescription) -> CircuitLayout:
    # a free-form circuit has no separate output names
    return CircuitLayout(desc.modes, desc.modes, kind="custom")


def _lower_element(el: Element, n: int, index: dict[str, int]) -> ModeTransform:
    if isinstance(el, BeamsplitterElement):
        return embed_two_mode(n, index[el.port_a], index[el.port_b], beamsplitter_matrix(el.eta, el.flip))
    if isinstance(el, ModeMatchElement):
        return embed_two_mode(n, index[el.port_a], index[el.port_b], mode_match_matrix(el.xi))
    if isinstance(el, StageElement):
        params = dict(el.params)
        gate = GateParams(params.get("eta", 1 / 3), params.get("etap", 1 / 2), params.get("xi", 1.0))
        builder = build_cnot if el.kind == "cnot" else build_cnot_mismatch
        block, _ = builder(gate)
        return embed_modes(n, [index[m] for m in el.modes], block.matrix)
    return ModeTransform(np.array(el.entries, dtype=float).reshape(n, n))


def lower(desc: CircuitDescription) -> tuple[ModeTransform, CircuitLayout]:
    """Compose the elements in listed order into one transform."""
    n = len(desc.modes)
    index = {name: i for i, name in enumerate(desc.modes)}
    stages = [ModeTransform.identity(n)]
    stages.extend(_lower_element(el, n, index) for el in desc.elements)
    return compose(*stages), layout_of(desc)
