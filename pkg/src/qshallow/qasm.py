"""OpenQASM 2.0 reader and writer for the supported gate subset.

Supported statements: the `OPENQASM 2.0;` header, an optional
`include "qelib1.inc";`, `qreg`/`creg` declarations, the gates h x y z rx ry
rz cx cz, `measure q -> c;`, `barrier ...;`, and `if(c==1) <gate> ...;` on
one-bit classical registers.  All quantum registers are flattened into one
global qubit index space in declaration order, classical registers likewise.

On emission every classical bit becomes its own one-bit register named m<k>,
so single-bit `if` comparisons stay expressible.  A parity condition over k
bits is lowered to k consecutive single-bit-conditioned copies of the gate
(exact for the self-inverse gates the rewrite passes emit, since
X^m1 · X^m2 = X^(m1 xor m2)).
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .ir import (
    Circuit,
    Condition,
    Gate,
    Instruction,
    ROTATION_GATES,
    validate,
)


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int


class ParseError(Exception):
    """Raised for any malformed/unsupported input; kind is one of
    'syntax', 'unsupported-construct' or 'semantic'."""

    def __init__(self, message: str, span: SourceSpan, kind: str = "syntax"):
        super().__init__(f"line {span.line}, column {span.column}: {message}")
        self.message = message
        self.span = span
        self.kind = kind


_TOKEN_RE = re.compile(
    r"""
      (?P<WS>\s+)
    | (?P<COMMENT>//[^\n]*)
    | (?P<REAL>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+)
    | (?P<INT>\d+)
    | (?P<ID>[A-Za-z_][A-Za-z0-9_]*)
    | (?P<STRING>"[^"\n]*")
    | (?P<ARROW>->)
    | (?P<EQ>==)
    | (?P<PUNCT>[;,\[\]()*/+{}-])
    """,
    re.VERBOSE,
)

_GATE_BY_NAME = {
    "h": Gate.H, "x": Gate.X, "y": Gate.Y, "z": Gate.Z,
    "rx": Gate.RX, "ry": Gate.RY, "rz": Gate.RZ,
    "cx": Gate.CX, "cz": Gate.CZ,
}


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    span: SourceSpan


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line = 1
    line_start = 0
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            span = SourceSpan(line, pos - line_start + 1)
            raise ParseError(f"unexpected character {text[pos]!r}", span)
        kind = m.lastgroup
        value = m.group()
        if kind not in ("WS", "COMMENT"):
            tokens.append(_Token(kind, value, SourceSpan(line, m.start() - line_start + 1)))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = m.start() + value.rindex("\n") + 1
        pos = m.end()
    tokens.append(_Token("EOF", "", SourceSpan(line, max(1, len(text) - line_start + 1))))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.qregs: dict[str, tuple[int, int]] = {}  # name -> (offset, size)
        self.cregs: dict[str, tuple[int, int]] = {}
        self.num_qubits = 0
        self.num_clbits = 0
        self.instructions: list[Instruction] = []
        self.written_clbits: set[int] = set()

    # -- token helpers ------------------------------------------------------

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, text: str | None = None) -> _Token:
        tok = self.advance()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text if text is not None else kind.lower()
            raise ParseError(f"expected {want!r}, found {tok.text!r}", tok.span)
        return tok

    def error(self, message: str, span: SourceSpan, kind: str) -> ParseError:
        return ParseError(message, span, kind)

    # -- grammar ------------------------------------------------------------

    def parse(self) -> Circuit:
        head = self.expect("ID", "OPENQASM")
        version = self.expect("REAL")
        if version.text != "2.0":
            raise self.error(
                f"unsupported OPENQASM version {version.text}", version.span,
                "unsupported-construct",
            )
        self.expect("PUNCT", ";")
        while self.peek().kind != "EOF":
            self.statement()
        circuit = Circuit(self.num_qubits, self.num_clbits, tuple(self.instructions))
        leftover = validate(circuit)
        if leftover:  # defense in depth; statement checks should catch these first
            raise self.error(leftover[0], head.span, "semantic")
        return circuit

    def statement(self) -> None:
        tok = self.peek()
        if tok.kind != "ID":
            raise self.error(f"expected a statement, found {tok.text!r}", tok.span, "syntax")
        if tok.text == "include":
            self.include()
        elif tok.text in ("qreg", "creg"):
            self.register_decl()
        elif tok.text == "measure":
            self.instructions.append(self.measure_stmt())
        elif tok.text == "barrier":
            self.barrier_stmt()
        elif tok.text == "if":
            self.if_stmt()
        else:
            self.gate_stmt(condition=None)

    def include(self) -> None:
        self.advance()
        target = self.expect("STRING")
        if target.text != '"qelib1.inc"':
            raise self.error(
                f"unsupported include {target.text}", target.span, "unsupported-construct"
            )
        self.expect("PUNCT", ";")

    def register_decl(self) -> None:
        kw = self.advance()
        name = self.expect("ID")
        self.expect("PUNCT", "[")
        size_tok = self.expect("INT")
        self.expect("PUNCT", "]")
        self.expect("PUNCT", ";")
        size = int(size_tok.text)
        if size < 1:
            raise self.error("register size must be positive", size_tok.span, "semantic")
        if name.text in self.qregs or name.text in self.cregs:
            raise self.error(f"register {name.text!r} redeclared", name.span, "semantic")
        if kw.text == "qreg":
            self.qregs[name.text] = (self.num_qubits, size)
            self.num_qubits += size
        else:
            self.cregs[name.text] = (self.num_clbits, size)
            self.num_clbits += size

    def _argument(self, table: dict[str, tuple[int, int]], what: str) -> list[int]:
        """One `reg[i]` or bare `reg` argument, flattened to global indices."""
        name = self.expect("ID")
        if name.text not in table:
            raise self.error(f"undeclared {what} register {name.text!r}", name.span, "semantic")
        offset, size = table[name.text]
        if self.peek().kind == "PUNCT" and self.peek().text == "[":
            self.advance()
            idx_tok = self.expect("INT")
            self.expect("PUNCT", "]")
            idx = int(idx_tok.text)
            if idx >= size:
                raise self.error(
                    f"index {idx} out of range for {name.text}[{size}]",
                    idx_tok.span, "semantic",
                )
            return [offset + idx]
        return [offset + i for i in range(size)]

    def measure_stmt(self) -> Instruction:
        kw = self.advance()
        src = self._argument(self.qregs, "quantum")
        self.expect("ARROW")
        dst = self._argument(self.cregs, "classical")
        self.expect("PUNCT", ";")
        if len(src) != 1 or len(dst) != 1:
            raise self.error(
                "broadcast measurement is not supported; measure one qubit at a time",
                kw.span, "unsupported-construct",
            )
        if dst[0] in self.written_clbits:
            raise self.error(
                f"classical bit {dst[0]} written more than once", kw.span, "semantic"
            )
        self.written_clbits.add(dst[0])
        return Instruction(Gate.MEASURE, (src[0],), clbit=dst[0])

    def barrier_stmt(self) -> None:
        kw = self.advance()
        qubits: list[int] = []
        while True:
            qubits.extend(self._argument(self.qregs, "quantum"))
            if self.peek().text == ",":
                self.advance()
                continue
            break
        self.expect("PUNCT", ";")
        if len(set(qubits)) != len(qubits):
            raise self.error("duplicate operand", kw.span, "semantic")
        self.instructions.append(Instruction(Gate.BARRIER, tuple(qubits)))

    def if_stmt(self) -> None:
        kw = self.advance()
        self.expect("PUNCT", "(")
        creg = self.expect("ID")
        if creg.text not in self.cregs:
            raise self.error(
                f"undeclared classical register {creg.text!r}", creg.span, "semantic"
            )
        self.expect("EQ")
        value_tok = self.expect("INT")
        self.expect("PUNCT", ")")
        offset, size = self.cregs[creg.text]
        if size != 1 or value_tok.text != "1":
            raise self.error(
                "only `if(c==1)` on one-bit classical registers is supported",
                kw.span, "unsupported-construct",
            )
        head = self.peek()
        if head.kind == "ID" and head.text in ("measure", "barrier", "if"):
            raise self.error(
                f"conditioned {head.text} is not supported", head.span,
                "unsupported-construct",
            )
        self.gate_stmt(condition=Condition((offset,)))

    def gate_stmt(self, condition: Condition | None) -> None:
        name = self.advance()
        gate = _GATE_BY_NAME.get(name.text)
        if gate is None:
            raise self.error(
                f"gate {name.text!r} is outside the supported subset",
                name.span, "unsupported-construct",
            )
        angle: float | None = None
        if self.peek().text == "(":
            if gate not in ROTATION_GATES:
                raise self.error(
                    f"gate {name.text!r} takes no parameter", name.span, "semantic"
                )
            self.advance()
            angle = self._angle_expr()
            self.expect("PUNCT", ")")
        elif gate in ROTATION_GATES:
            raise self.error(f"gate {name.text!r} needs an angle", name.span, "semantic")

        args: list[list[int]] = []
        while True:
            args.append(self._argument(self.qregs, "quantum"))
            if self.peek().text == ",":
                self.advance()
                continue
            break
        self.expect("PUNCT", ";")

        arity = 2 if gate in (Gate.CX, Gate.CZ) else 1
        if len(args) != arity:
            raise self.error(
                f"gate {name.text!r} expects {arity} argument(s), got {len(args)}",
                name.span, "semantic",
            )
        if arity == 2:
            if len(args[0]) != 1 or len(args[1]) != 1:
                raise self.error(
                    "register broadcast is not supported for two-qubit gates",
                    name.span, "unsupported-construct",
                )
            operands = (args[0][0], args[1][0])
            if operands[0] == operands[1]:
                raise self.error("duplicate operand", name.span, "semantic")
            self.instructions.append(
                Instruction(gate, operands, condition=condition)
            )
        else:
            for q in args[0]:  # bare register broadcasts a single-qubit gate
                self.instructions.append(
                    Instruction(gate, (q,), angle=angle, condition=condition)
                )

    def _angle_expr(self) -> float:
        """Angle literal: real, integer, pi, int*pi, pi/int, int*pi/int, signed."""
        sign = 1.0
        if self.peek().text in ("-", "+"):
            sign = -1.0 if self.advance().text == "-" else 1.0
        tok = self.advance()
        if tok.kind == "REAL":
            return sign * float(tok.text)
        if tok.kind == "INT":
            value = float(tok.text)
            if self.peek().text == "*":
                self.advance()
                self.expect("ID", "pi")
                value *= math.pi
                if self.peek().text == "/":
                    self.advance()
                    value /= int(self.expect("INT").text)
            return sign * value
        if tok.kind == "ID" and tok.text == "pi":
            value = math.pi
            if self.peek().text == "/":
                self.advance()
                value /= int(self.expect("INT").text)
            return sign * value
        raise self.error(f"malformed angle near {tok.text!r}", tok.span, "syntax")


def parse(text: str) -> Circuit:
    """Parse OpenQASM 2.0 source into a Circuit; raises ParseError otherwise."""
    return _Parser(text).parse()


def _format_angle(angle: float) -> str:
    return f"{angle:.17g}"


def _gate_text(ins: Instruction) -> str:
    name = ins.gate.value
    operands = ",".join(f"q[{q}]" for q in ins.qubits)
    if ins.gate in ROTATION_GATES:
        return f"{name}({_format_angle(ins.angle)}) {operands};"
    return f"{name} {operands};"


def emit(c: Circuit) -> str:
    """Deterministic QASM text; re-parsing reproduces every condition-free
    instruction exactly.  Parity conditions are lowered per the module note."""
    errors = validate(c)
    if errors:
        raise ValueError("invalid circuit: " + "; ".join(errors))
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";']
    if c.num_qubits > 0:
        lines.append(f"qreg q[{c.num_qubits}];")
    for k in range(c.num_clbits):
        lines.append(f"creg m{k}[1];")
    for ins in c.instructions:
        if ins.gate is Gate.MEASURE:
            lines.append(f"measure q[{ins.qubits[0]}] -> m{ins.clbit}[0];")
        elif ins.gate is Gate.BARRIER:
            operands = ",".join(f"q[{q}]" for q in ins.qubits)
            lines.append(f"barrier {operands};")
        elif ins.condition is not None:
            if ins.gate in ROTATION_GATES and len(ins.condition.bits) > 1:
                raise ValueError(
                    "multi-bit parity conditions on rotations cannot be lowered "
                    "to single-bit conditionals"
                )
            for b in ins.condition.bits:
                lines.append(f"if(m{b}==1) {_gate_text(ins)}")
        else:
            lines.append(_gate_text(ins))
    return "\n".join(lines) + "\n"
