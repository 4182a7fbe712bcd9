"""Gate-level Boolean circuits: construction invariants, evaluation, JSON round-trip.

A circuit is a flat list of gates with dense ascending ids.  Every gate may
only reference strictly smaller ids, so the list order is already a
topological order and acyclicity never has to be recomputed.  The on-disk
format is a single JSON object whose ``gates`` array is written in id order,
which lets the compiler produce it as a forward-only stream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

import numpy as np

KIND_INPUT = "input"
KIND_OUTPUT = "output"
KIND_AND = "and"
KIND_OR = "or"
KIND_NOT = "not"
KIND_CONST0 = "const0"
KIND_CONST1 = "const1"

KINDS = (KIND_INPUT, KIND_OUTPUT, KIND_AND, KIND_OR, KIND_NOT, KIND_CONST0, KIND_CONST1)
KIND_CODES = {k: i for i, k in enumerate(KINDS)}

ARITY = {
    KIND_INPUT: 0,
    KIND_OUTPUT: 1,
    KIND_AND: 2,
    KIND_OR: 2,
    KIND_NOT: 1,
    KIND_CONST0: 0,
    KIND_CONST1: 0,
}


class CircuitError(Exception):
    """Malformed circuit structure or stream; carries the offending gate id."""

    def __init__(self, message: str, gate_id: int | None = None):
        super().__init__(message if gate_id is None else f"gate {gate_id}: {message}")
        self.gate_id = gate_id


class InputWidthError(ValueError):
    """Evaluation input width does not match the circuit's input count."""


@dataclass(frozen=True)
class Gate:
    id: int
    kind: str
    args: tuple[int, ...] = ()


@dataclass(frozen=True)
class BitWord:
    """Fixed-width bit vector, least-significant bit first."""

    bits: tuple[int, ...]

    @property
    def width(self) -> int:
        return len(self.bits)

    @classmethod
    def from_int(cls, value: int, width: int) -> "BitWord":
        if value < 0 or value >> width:
            raise ValueError(f"value {value} does not fit in {width} bits")
        return cls(tuple((value >> i) & 1 for i in range(width)))

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitWord":
        bs = tuple(int(b) for b in bits)
        if any(b not in (0, 1) for b in bs):
            raise ValueError("bits must be 0 or 1")
        return cls(bs)

    def to_int(self) -> int:
        return sum(b << i for i, b in enumerate(self.bits))

    def __len__(self) -> int:
        return len(self.bits)

    def __iter__(self):
        return iter(self.bits)


def gate_to_json(gate: Gate) -> str:
    if gate.args:
        return '{"id":%d,"kind":"%s","args":[%s]}' % (
            gate.id,
            gate.kind,
            ",".join(str(a) for a in gate.args),
        )
    return '{"id":%d,"kind":"%s"}' % (gate.id, gate.kind)


class Circuit:
    """Immutable after construction; safe to share across evaluation workers."""

    def __init__(
        self,
        input_count: int,
        output_count: int,
        gates: Sequence[Gate],
        output_order: Sequence[int],
        meta: dict | None = None,
        validate: bool = True,
    ):
        self.input_count = input_count
        self.output_count = output_count
        self.gates = list(gates)
        self.output_order = list(output_order)
        self.meta = dict(meta) if meta else {}
        self._packed = None
        if validate:
            self.validate()

    def __len__(self) -> int:
        return len(self.gates)

    def validate(self) -> None:
        n_inputs = 0
        output_ids = set()
        for pos, g in enumerate(self.gates):
            if g.id != pos:
                raise CircuitError(f"expected id {pos}, found {g.id}", g.id)
            if g.kind not in ARITY:
                raise CircuitError(f"unknown kind {g.kind!r}", g.id)
            if len(g.args) != ARITY[g.kind]:
                raise CircuitError(
                    f"kind {g.kind!r} takes {ARITY[g.kind]} args, got {len(g.args)}", g.id
                )
            for a in g.args:
                if not 0 <= a < g.id:
                    raise CircuitError(f"forward or self reference to {a}", g.id)
                if self.gates[a].kind == KIND_OUTPUT:
                    raise CircuitError(f"argument {a} is an output gate", g.id)
            if g.kind == KIND_INPUT:
                n_inputs += 1
            elif g.kind == KIND_OUTPUT:
                output_ids.add(g.id)
        if n_inputs != self.input_count:
            raise CircuitError(
                f"declared {self.input_count} inputs, found {n_inputs} input gates"
            )
        if len(output_ids) != self.output_count:
            raise CircuitError(
                f"declared {self.output_count} outputs, found {len(output_ids)} output gates"
            )
        if sorted(self.output_order) != sorted(output_ids):
            raise CircuitError("output_order does not list the output gates exactly once")

    def evaluate(self, word: BitWord | Sequence[int]) -> BitWord:
        """Single-input reference evaluation under standard gate semantics."""
        bits = list(word.bits) if isinstance(word, BitWord) else [int(b) for b in word]
        if len(bits) != self.input_count:
            raise InputWidthError(
                f"input width {len(bits)} != circuit input count {self.input_count}"
            )
        values = [0] * len(self.gates)
        next_input = 0
        for g in self.gates:
            if g.kind == KIND_INPUT:
                values[g.id] = bits[next_input]
                next_input += 1
            elif g.kind == KIND_AND:
                values[g.id] = values[g.args[0]] & values[g.args[1]]
            elif g.kind == KIND_OR:
                values[g.id] = values[g.args[0]] | values[g.args[1]]
            elif g.kind == KIND_NOT:
                values[g.id] = values[g.args[0]] ^ 1
            elif g.kind == KIND_CONST0:
                values[g.id] = 0
            elif g.kind == KIND_CONST1:
                values[g.id] = 1
            else:  # output
                values[g.id] = values[g.args[0]]
        return BitWord(tuple(values[i] for i in self.output_order))

    def packed(self) -> dict:
        """Flat numpy view used by the batch evaluation kernels (cached)."""
        if self._packed is None:
            n = len(self.gates)
            kinds = np.empty(n, dtype=np.int8)
            arg0 = np.zeros(n, dtype=np.int64)
            arg1 = np.zeros(n, dtype=np.int64)
            slot = 0
            for g in self.gates:
                kinds[g.id] = KIND_CODES[g.kind]
                if g.kind == KIND_INPUT:
                    arg0[g.id] = slot  # input slot index, not a gate reference
                    slot += 1
                else:
                    if len(g.args) >= 1:
                        arg0[g.id] = g.args[0]
                    if len(g.args) == 2:
                        arg1[g.id] = g.args[1]
            self._packed = {
                "kinds": kinds,
                "arg0": arg0,
                "arg1": arg1,
                "output_ids": np.asarray(self.output_order, dtype=np.int64),
            }
        return self._packed


def serialize(circuit: Circuit, fp: IO[str] | None = None) -> str | None:
    """Write the JSON form; gates appear in id order so output is streamable."""
    own = fp is None
    import io

    out = io.StringIO() if own else fp
    out.write('{"inputs":%d,"outputs":%d' % (circuit.input_count, circuit.output_count))
    if circuit.meta:
        out.write(',"meta":%s' % json.dumps(circuit.meta, sort_keys=True, separators=(",", ":")))
    out.write(',"gates":[')
    for i, g in enumerate(circuit.gates):
        if i:
            out.write(",")
        out.write(gate_to_json(g))
    out.write('],"output_order":[%s]}\n' % ",".join(str(i) for i in circuit.output_order))
    if own:
        return out.getvalue()
    return None


def deserialize(source: str | IO[str]) -> Circuit:
    """Parse and re-validate a circuit stream.

    Validation repeats every structural invariant (dense ids, arities,
    backward-only references) so a hand-edited or corrupted file is rejected
    with the offending gate id.
    """
    text = source if isinstance(source, str) else source.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CircuitError(f"not valid JSON: {exc}") from exc
    for key in ("inputs", "outputs", "gates", "output_order"):
        if key not in doc:
            raise CircuitError(f"missing key {key!r}")
    gates = []
    for pos, item in enumerate(doc["gates"]):
        gid = item.get("id", pos)
        kind = item.get("kind")
        if kind not in ARITY:
            raise CircuitError(f"unknown kind {kind!r}", gid)
        args = tuple(item.get("args", ()))
        gates.append(Gate(gid, kind, args))
    return Circuit(
        input_count=doc["inputs"],
        output_count=doc["outputs"],
        gates=gates,
        output_order=list(doc["output_order"]),
        meta=doc.get("meta"),
    )
