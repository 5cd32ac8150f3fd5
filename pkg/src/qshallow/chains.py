"""Detection and decomposition of CX and CZ entangling chains.

A chain is a run of two-qubit gates linked by their operands: for CX the next
gate's control is the previous gate's target; for CZ consecutive gates share
one endpoint.  Linkage is what matters, not qubit numbering, so ascending and
descending index patterns are the same structure and share one decomposition.

The scanner tolerates interleaved gates that can be displaced out of the chain
window: an operation may move before the chain if it commutes with every chain
gate (and every deferred operation) it would cross leftwards, or after the
chain if it commutes with everything it crosses rightwards.  Every move is
justified by the explicit commutation table below, which is checked against
the brute-force oracle; an operation that can move neither way ends the chain.

Decompositions:

* `decompose_forward` / `decompose_reverse` - recursive halving of a CX chain:
  one layer of pairwise CXs, a recursive chain over the even-position qubits,
  and a closing layer.  Depth O(log n), gate count at most doubled.  Runs of
  fewer than five qubits are left as plain chains (no depth win there).
* `decompose_cz` - all CZs commute, so any chain packs into two layers.
* `decompose_cz_to_cx` - CZ chain lowered to H/CX with one shared Hadamard
  layer on each side; inner H pairs cancel by construction, depth 4.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .ir import (
    Circuit,
    DIAGONAL_GATES,
    Gate,
    Instruction,
    cx,
    cz,
    h,
    validate,
)


class ChainKind(Enum):
    FORWARD_CX = "forward_cx"
    REVERSE_CX = "reverse_cx"
    CZ = "cz"


class Disposition(Enum):
    EXTEND = "extend"
    MOVE_BEFORE = "move_before"
    MOVE_AFTER = "move_after"
    BREAK_CHAIN = "break_chain"


@dataclass(frozen=True)
class ChainCandidate:
    kind: ChainKind
    gate_indices: tuple[int, ...]
    qubit_seq: tuple[int, ...]
    start_index: int
    moved_before: tuple[int, ...]
    moved_after: tuple[int, ...]
    processed: bool = False

    @property
    def end_index(self) -> int:
        return self.gate_indices[-1]


# -- commutation ------------------------------------------------------------

_AXIS = {
    Gate.X: "x", Gate.RX: "x",
    Gate.Y: "y", Gate.RY: "y",
    Gate.Z: "z", Gate.RZ: "z",
    Gate.H: "h",
}


def _reads(ins: Instruction) -> frozenset[int]:
    return frozenset(ins.condition.bits) if ins.condition is not None else frozenset()


def _writes(ins: Instruction) -> frozenset[int]:
    return frozenset((ins.clbit,)) if ins.clbit is not None else frozenset()


def commutes(a: Instruction, b: Instruction) -> bool:
    """Structural commutation test, exact for generic rotation angles.

    Barriers never commute with anything sharing a qubit (they are ordering
    points); measurements and conditioned gates commute only when they share
    no qubit and no classical read/write pair.
    """
    if _writes(a) & _reads(b) or _writes(b) & _reads(a) or _writes(a) & _writes(b):
        return False
    qa, qb = set(a.qubits), set(b.qubits)
    if not qa & qb:
        return True
    for ins in (a, b):
        if ins.gate in (Gate.BARRIER, Gate.MEASURE) or ins.condition is not None:
            return False
    ga, gb = a.gate, b.gate
    if ga in DIAGONAL_GATES and gb in DIAGONAL_GATES:
        return True
    if ga in _AXIS and gb in _AXIS:  # same qubit, single-qubit gates
        return _AXIS[ga] == _AXIS[gb]
    # Exactly one of them is single-qubit, the other CX/CZ.
    if ga in _AXIS or gb in _AXIS:
        single, multi = (a, b) if ga in _AXIS else (b, a)
        axis = _AXIS[single.gate]
        q = single.qubits[0]
        if multi.gate is Gate.CZ:
            return axis == "z"
        return axis == "x" if q == multi.qubits[1] else axis == "z"
    # Both two-qubit.
    if ga is Gate.CX and gb is Gate.CX:
        if a.qubits == b.qubits:
            return True
        (ca, ta), (cb, tb) = a.qubits, b.qubits
        if ca == cb and ta != tb:
            return True
        if ta == tb and ca != cb:
            return True
        return False
    # CX against CZ: the CZ is diagonal, so only the CX target matters.
    cx_ins, cz_ins = (a, b) if ga is Gate.CX else (b, a)
    return cx_ins.qubits[1] not in cz_ins.qubits


# -- chain growth -----------------------------------------------------------


def _is_diagonal_on(ins: Instruction, q: int) -> bool:
    return ins.gate in DIAGONAL_GATES and ins.condition is None and q in ins.qubits


class _Growth:
    """State for growing one chain from a seed, classifying interleaved ops.

    Commutation checks are looked up per qubit: an op only has to be tested
    against the chain gates and deferred ops that share one of its qubits
    (disjoint pairs commute trivially), which keeps a scan linear even when a
    long chain is followed by full-width rotation layers.  Ops carrying
    classical state fall back to a full scan; they are rare.
    """

    def __init__(self, instructions: list[Instruction], processed: list[bool], seed: int):
        self.instructions = instructions
        self.processed = processed
        self.seed = seed
        first = instructions[seed]
        self.is_cz = first.gate is Gate.CZ
        self.gate_positions = [seed]
        self.gates = [first]
        self.seq: list[int] = list(first.qubits)
        self.seq_set: set[int] = set(first.qubits)
        self.seq_oriented = self.is_cz is False  # CZ orientation settles on gate 2
        self.before: list[int] = []
        self.pending_after: list[tuple[int, Instruction]] = []
        self.gates_by_qubit: dict[int, list[Instruction]] = {
            q: [first] for q in first.qubits
        }
        self.pending_by_qubit: dict[int, list[Instruction]] = {}

    @property
    def head(self) -> int:
        return self.seq[-1]

    def _has_classical(self, op: Instruction) -> bool:
        return op.clbit is not None or op.condition is not None

    def _commutes_with_chain(self, op: Instruction) -> bool:
        if self._has_classical(op):
            return all(commutes(op, g) for g in self.gates)
        for q in op.qubits:
            for g in self.gates_by_qubit.get(q, ()):
                if not commutes(op, g):
                    return False
        return True

    def _commutes_with_pending(self, op: Instruction) -> bool:
        if self._has_classical(op):
            return all(commutes(op, p) for _, p in self.pending_after)
        for q in op.qubits:
            for p in self.pending_by_qubit.get(q, ()):
                if not commutes(op, p):
                    return False
        return True

    def _defer(self, pos: int, op: Instruction) -> None:
        self.pending_after.append((pos, op))
        for q in op.qubits:
            self.pending_by_qubit.setdefault(q, []).append(op)

    def _try_extend(self, pos: int, op: Instruction) -> str:
        """Returns 'extended', 'skip' (not a continuation) or 'stop'."""
        if op.condition is not None or self.processed[pos]:
            return "skip"
        if self.is_cz:
            if op.gate is not Gate.CZ:
                return "skip"
            u, v = op.qubits
            if not self.seq_oriented:
                shared = {u, v} & self.seq_set
                if len(shared) != 1:
                    return "skip"
                e = shared.pop()
                new = v if u == e else u
                if e == self.seq[0]:
                    self.seq.reverse()
                self.seq_oriented = True
            else:
                if self.head not in (u, v):
                    return "skip"
                new = v if u == self.head else u
            if new in self.seq_set:
                return "stop"  # closing a cycle ends the chain
        else:
            if op.gate is not Gate.CX:
                return "skip"
            ctrl, tgt = op.qubits
            if ctrl != self.head:
                return "skip"
            if tgt in self.seq_set:
                return "stop"  # target hits an earlier chain qubit: cycle
            new = tgt
        # Deferred operations will cross this new gate on their way out.
        if not self._commutes_with_pending(op):
            return "stop"
        self.gates.append(op)
        self.gate_positions.append(pos)
        self.seq.append(new)
        self.seq_set.add(new)
        for q in op.qubits:
            self.gates_by_qubit.setdefault(q, []).append(op)
        return "extended"

    def classify(self, pos: int, op: Instruction) -> bool:
        """Classify a non-chain op at `pos`; False means the chain ends here."""
        if op.gate is Gate.BARRIER:
            return False  # never detect across barriers
        if self.head in op.qubits and not _is_diagonal_on(op, self.head):
            # No continuation through the head can commute with this op, so
            # deferring it would just stall the scan; move it out or stop.
            if self._commutes_with_chain(op) and self._commutes_with_pending(op):
                self.before.append(pos)
                return True
            return False
        if any(q in self.seq_set for q in op.qubits):
            self._defer(pos, op)
            return True
        if self._commutes_with_chain(op) and self._commutes_with_pending(op):
            self.before.append(pos)
            return True
        self._defer(pos, op)
        return True

    def finish(self, min_gates: int) -> ChainCandidate | None:
        if len(self.gates) < min_gates:
            return None
        last = self.gate_positions[-1]
        moved_before = tuple(i for i in self.before if i < last)
        moved_after = tuple(i for i, _ in self.pending_after if i < last)
        if self.is_cz:
            kind = ChainKind.CZ
        elif all(a > b for a, b in zip(self.seq, self.seq[1:])):
            kind = ChainKind.REVERSE_CX
        else:
            kind = ChainKind.FORWARD_CX
        return ChainCandidate(
            kind=kind,
            gate_indices=tuple(self.gate_positions),
            qubit_seq=tuple(self.seq),
            start_index=self.seed,
            moved_before=moved_before,
            moved_after=moved_after,
        )


def classify_interleaved(op: Instruction, chain: ChainCandidate, c: Circuit) -> Disposition:
    """Disposition of an instruction lying between the gates of a chain.

    Extension continues the chain; otherwise the op moves before the chain if
    it commutes with every chain gate at an earlier position, after it if it
    commutes with every chain gate at a later position, and breaks the chain
    if neither.  Ops overlapping the chain qubits prefer to move after
    (they sit behind the frontier); disjoint ops move before.
    """
    positions = list(chain.gate_indices)
    start, last = chain.start_index, chain.gate_indices[-1]
    pos = next(
        (
            i
            for i in range(start + 1, last)
            if i not in chain.gate_indices and c.instructions[i] == op
        ),
        None,
    )
    if pos is None:
        raise ValueError("instruction does not lie between the chain gates")
    if op.condition is None and op.gate in (Gate.CX, Gate.CZ):
        matches_kind = (op.gate is Gate.CZ) == (chain.kind is ChainKind.CZ)
        if matches_kind:
            head = chain.qubit_seq[-1]
            if chain.kind is ChainKind.CZ:
                linked = head in op.qubits
                new = op.qubits[1] if op.qubits[0] == head else op.qubits[0]
            else:
                linked = op.qubits[0] == head
                new = op.qubits[1]
            if linked:
                return Disposition.BREAK_CHAIN if new in chain.qubit_seq else Disposition.EXTEND
    if op.gate is Gate.BARRIER:
        return Disposition.BREAK_CHAIN
    gates = [c.instructions[i] for i in positions]
    can_before = all(commutes(op, g) for g, i in zip(gates, positions) if i < pos)
    can_after = all(commutes(op, g) for g, i in zip(gates, positions) if i > pos)
    if set(op.qubits) & set(chain.qubit_seq):
        if can_after:
            return Disposition.MOVE_AFTER
        if can_before:
            return Disposition.MOVE_BEFORE
    else:
        if can_before:
            return Disposition.MOVE_BEFORE
        if can_after:
            return Disposition.MOVE_AFTER
    return Disposition.BREAK_CHAIN


class ChainScanner:
    """Resumable single-pass scanner over a circuit's instruction list.

    `next()` yields the next chain candidate of at least `min_gates` gates.
    The caller then either `accept(replacement)` - splice the displaced ops
    and the replacement into the window, mark the replacement as processed so
    it never re-seeds, and rescan from the chain's start so that intertwined
    chains displaced around it are rediscovered - or `skip()`, which retires
    the candidate's gates as seeds and continues forward.
    """

    def __init__(self, circuit: Circuit, min_gates: int = 2):
        if min_gates < 2:
            raise ValueError("min_gates must be at least 2")
        errors = validate(circuit)
        if errors:
            raise ValueError("invalid circuit: " + "; ".join(errors))
        self.num_qubits = circuit.num_qubits
        self.num_clbits = circuit.num_clbits
        self.instructions: list[Instruction] = list(circuit.instructions)
        self.min_gates = min_gates
        self._processed = [False] * len(self.instructions)
        self._no_seed = [False] * len(self.instructions)
        self._pos = 0
        self._pending: ChainCandidate | None = None

    @property
    def circuit(self) -> Circuit:
        return Circuit(self.num_qubits, self.num_clbits, tuple(self.instructions))

    def next(self) -> ChainCandidate | None:
        if self._pending is not None:
            raise RuntimeError("previous candidate not resolved; call accept() or skip()")
        n = len(self.instructions)
        while self._pos < n:
            i = self._pos
            ins = self.instructions[i]
            if (
                ins.gate in (Gate.CX, Gate.CZ)
                and ins.condition is None
                and not self._processed[i]
                and not self._no_seed[i]
            ):
                candidate = self._grow(i)
                if candidate is not None:
                    self._pending = candidate
                    return candidate
            self._pos += 1
        return None

    def _grow(self, seed: int) -> ChainCandidate | None:
        g = _Growth(self.instructions, self._processed, seed)
        for j in range(seed + 1, len(self.instructions)):
            op = self.instructions[j]
            result = g._try_extend(j, op)
            if result == "extended":
                continue
            if result == "stop":
                break
            if not g.classify(j, op):
                break
        return g.finish(self.min_gates)

    def accept(self, replacement: Sequence[Instruction]) -> Circuit:
        """Splice [moved_before, replacement, moved_after] over the window."""
        cand = self._pending
        if cand is None:
            raise RuntimeError("no candidate to accept")
        self._pending = None
        start = cand.start_index
        window = {*cand.gate_indices, *cand.moved_before, *cand.moved_after}
        new_ins: list[Instruction] = []
        new_proc: list[bool] = []
        new_seed: list[bool] = []

        def keep(idx: int) -> None:
            new_ins.append(self.instructions[idx])
            new_proc.append(self._processed[idx])
            new_seed.append(self._no_seed[idx])

        for idx in range(start):
            keep(idx)
        for idx in cand.moved_before:
            keep(idx)
        for rep in replacement:
            new_ins.append(rep)
            new_proc.append(True)
            new_seed.append(False)
        for idx in cand.moved_after:
            keep(idx)
        for idx in range(start, len(self.instructions)):
            if idx not in window:
                keep(idx)
        self.instructions = new_ins
        self._processed = new_proc
        self._no_seed = new_seed
        self._pos = start
        return self.circuit

    def skip(self) -> None:
        """Retire the pending candidate: its gates never seed again."""
        cand = self._pending
        if cand is None:
            raise RuntimeError("no candidate to skip")
        self._pending = None
        for idx in cand.gate_indices:
            self._no_seed[idx] = True
        self._pos = cand.start_index + 1

    def window_instructions(
        self, cand: ChainCandidate
    ) -> tuple[list[Instruction], list[Instruction], list[Instruction]]:
        """(current window content, displaced-before ops, displaced-after ops)."""
        current = self.instructions[cand.start_index : cand.end_index + 1]
        displaced_before = [self.instructions[i] for i in cand.moved_before]
        displaced_after = [self.instructions[i] for i in cand.moved_after]
        return current, displaced_before, displaced_after

    def tail_instructions(self, cand: ChainCandidate, scope: int) -> list[Instruction]:
        stop = min(len(self.instructions), cand.end_index + 1 + scope)
        return self.instructions[cand.end_index + 1 : stop]


def find_chains(c: Circuit, min_gates: int = 2) -> list[ChainCandidate]:
    """Detection only: scan the whole circuit without transforming anything."""
    scanner = ChainScanner(c, min_gates)
    found = []
    while (cand := scanner.next()) is not None:
        found.append(cand)
        scanner.skip()
    return found


# -- decompositions ---------------------------------------------------------


def decompose_forward(qubit_seq: Sequence[int]) -> list[Instruction]:
    """Recursive halving of a linked CX chain over `qubit_seq`.

    Pairs at odd positions fire first, the chain over even-position qubits is
    decomposed recursively, and pairs at even positions close it off.  The
    result computes the same prefix-parity map as the plain chain.
    """
    seq = list(qubit_seq)
    n = len(seq)
    if n < 2:
        raise ValueError("need at least 2 qubits")
    if n < 5:
        return [cx(seq[i], seq[i + 1]) for i in range(n - 1)]
    out = [cx(seq[i], seq[i + 1]) for i in range(1, n - 1, 2)]
    out += decompose_forward(seq[0::2])
    out += [cx(seq[i], seq[i + 1]) for i in range(0, n - 1, 2)]
    return out


def decompose_reverse(qubit_seq: Sequence[int]) -> list[Instruction]:
    """Reverse chains are forward chains under relabeling, so the same
    construction applies to the descending qubit sequence directly."""
    return decompose_forward(qubit_seq)


def decompose_cz(qubit_seq: Sequence[int]) -> list[Instruction]:
    """Two-layer packing of a CZ chain: even-position pairs, then odd."""
    seq = list(qubit_seq)
    if len(seq) < 3:
        raise ValueError("need at least 3 qubits")
    out = [cz(seq[i], seq[i + 1]) for i in range(0, len(seq) - 1, 2)]
    out += [cz(seq[i], seq[i + 1]) for i in range(1, len(seq) - 1, 2)]
    return out


def decompose_cz_to_cx(qubit_seq: Sequence[int]) -> list[Instruction]:
    """CZ chain lowered to CX for hardware without native CZ.

    Odd-position qubits are chosen as CX targets throughout, so each needs
    only one opening and one closing Hadamard; the per-gate inner H pairs
    cancel.  Depth 4 for any chain length.
    """
    seq = list(qubit_seq)
    n = len(seq)
    if n < 3:
        raise ValueError("need at least 3 qubits")
    odd = [seq[i] for i in range(1, n, 2)]
    out = [h(q) for q in odd]
    for i in range(0, n - 1, 2):
        out.append(cx(seq[i], seq[i + 1]))  # even control, odd target
    for i in range(1, n - 1, 2):
        out.append(cx(seq[i + 1], seq[i]))
    out += [h(q) for q in odd]
    return out
