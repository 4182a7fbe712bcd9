"""Streaming gate emission and the arithmetic combinator library.

The emitter appends gates to a sink and never revisits them.  Its only state
besides the sink is the next free id, a tiny constant cache and the metering
counter, so the auxiliary memory of an emission pass does not depend on how
many gates were already written.  All buses are little-endian lists of gate
ids of one fixed width; arithmetic wraps modulo 2**width.  Callers guarantee
that wrapped lanes are never routed to an output.

Combinator gate counts are linear in the bus width for constant operands
(comparison, add/sub of a constant, long division by a constant), which keeps
the whole compiled circuit polynomial in the formula size.
"""

from __future__ import annotations

import sys
from typing import IO, Sequence

from .circuits import (
    ARITY,
    KIND_AND,
    KIND_CONST0,
    KIND_CONST1,
    KIND_INPUT,
    KIND_NOT,
    KIND_OR,
    KIND_OUTPUT,
    Circuit,
    Gate,
    gate_to_json,
)

Bus = list  # list[int] of gate ids, least-significant wire first


class ConstructionError(Exception):
    """Raised when a combinator is asked for something it cannot build."""


def deep_size(obj, _seen=None) -> int:
    """Recursive sys.getsizeof over plain containers; used for workspace metering."""
    if _seen is None:
        _seen = set()
    oid = id(obj)
    if oid in _seen:
        return 0
    _seen.add(oid)
    size = sys.getsizeof(obj)
    if isinstance(obj, dict):
        for k, v in obj.items():
            size += deep_size(k, _seen) + deep_size(v, _seen)
    elif isinstance(obj, (list, tuple, set, frozenset)):
        for item in obj:
            size += deep_size(item, _seen)
    return size


class ListSink:
    """Collects gates in memory; `to_circuit` finalizes them."""

    def __init__(self):
        self.gates: list[Gate] = []

    def append(self, gate: Gate) -> None:
        self.gates.append(gate)


class CountingSink:
    """Discards gates, keeping only counts; used by `stats`."""

    def __init__(self):
        self.gate_count = 0
        self.wire_count = 0

    def append(self, gate: Gate) -> None:
        self.gate_count += 1
        self.wire_count += len(gate.args)


class JsonStreamSink:
    """Writes the circuit JSON incrementally; the file never has to be reopened.

    The header is written on construction, gates as they arrive, and the
    output order on `finish`.  Byte-for-byte identical to `circuits.serialize`
    of the collected circuit.
    """

    def __init__(self, fp: IO[str], input_count: int, output_count: int, meta: dict | None = None):
        import json

        self.fp = fp
        self.gate_count = 0
        self.wire_count = 0
        fp.write('{"inputs":%d,"outputs":%d' % (input_count, output_count))
        if meta:
            fp.write(',"meta":%s' % json.dumps(meta, sort_keys=True, separators=(",", ":")))
        fp.write(',"gates":[')

    def append(self, gate: Gate) -> None:
        if self.gate_count:
            self.fp.write(",")
        self.fp.write(gate_to_json(gate))
        self.gate_count += 1
        self.wire_count += len(gate.args)

    def finish(self, output_order: Sequence[int]) -> None:
        self.fp.write('],"output_order":[%s]}\n' % ",".join(str(i) for i in output_order))


class Emitter:
    """Single-writer append-only gate stream with workspace metering.

    `peak_workspace` tracks the deep size in bytes of whatever auxiliary
    state the running pass reports through `meter`; the sink and the
    read-only instance are deliberately excluded.
    """

    def __init__(self, sink):
        self.sink = sink
        self.next_id = 0
        self.peak_workspace = 0
        self.input_ids: list[int] = []
        self.output_ids: list[int] = []
        self._const_cache: dict[int, int] = {}

    def gate(self, kind: str, *args: int) -> int:
        if len(args) != ARITY[kind]:
            raise ConstructionError(f"{kind} takes {ARITY[kind]} args, got {len(args)}")
        for a in args:
            if not 0 <= a < self.next_id:
                raise ConstructionError(f"argument {a} not yet emitted (next id {self.next_id})")
        gid = self.next_id
        self.next_id += 1
        self.sink.append(Gate(gid, kind, tuple(args)))
        return gid

    def input(self) -> int:
        gid = self.gate(KIND_INPUT)
        self.input_ids.append(gid)
        return gid

    def output(self, arg: int) -> int:
        gid = self.gate(KIND_OUTPUT, arg)
        self.output_ids.append(gid)
        return gid

    def const(self, bit: int) -> int:
        bit = int(bit)
        if bit not in self._const_cache:
            self._const_cache[bit] = self.gate(KIND_CONST1 if bit else KIND_CONST0)
        return self._const_cache[bit]

    def not_(self, a: int) -> int:
        return self.gate(KIND_NOT, a)

    def and_(self, a: int, b: int) -> int:
        return self.gate(KIND_AND, a, b)

    def or_(self, a: int, b: int) -> int:
        return self.gate(KIND_OR, a, b)

    def xor(self, a: int, b: int) -> int:
        # lowered: (a & !b) | (!a & b)
        return self.or_(self.and_(a, self.not_(b)), self.and_(self.not_(a), b))

    def xnor(self, a: int, b: int) -> int:
        return self.or_(self.and_(a, b), self.and_(self.not_(a), self.not_(b)))

    def and_many(self, wires: Sequence[int]) -> int:
        if not wires:
            return self.const(1)
        acc = wires[0]
        for w in wires[1:]:
            acc = self.and_(acc, w)
        return acc

    def or_many(self, wires: Sequence[int]) -> int:
        if not wires:
            return self.const(0)
        acc = wires[0]
        for w in wires[1:]:
            acc = self.or_(acc, w)
        return acc

    def meter(self, *objects) -> None:
        size = deep_size(list(objects))
        size += deep_size(self.input_ids) + deep_size(self.output_ids)
        size += sys.getsizeof(self.next_id) + sys.getsizeof(self.peak_workspace)
        if size > self.peak_workspace:
            self.peak_workspace = size

    def finish(self, meta: dict | None = None) -> Circuit | None:
        """Build a Circuit when collecting in memory, else close the stream."""
        if isinstance(self.sink, ListSink):
            return Circuit(
                input_count=len(self.input_ids),
                output_count=len(self.output_ids),
                gates=self.sink.gates,
                output_order=list(self.output_ids),
                meta=meta,
            )
        if isinstance(self.sink, JsonStreamSink):
            self.sink.finish(self.output_ids)
        return None


# --- bus helpers ------------------------------------------------------------


def const_word(e: Emitter, value: int, width: int) -> Bus:
    if value < 0 or value >> width:
        raise ConstructionError(f"constant {value} does not fit in {width} bits")
    return [e.const((value >> i) & 1) for i in range(width)]


def pad_bus(e: Emitter, bus: Bus, width: int) -> Bus:
    if len(bus) > width:
        raise ConstructionError("cannot narrow a bus by padding")
    return list(bus) + [e.const(0)] * (width - len(bus))


# --- comparison -------------------------------------------------------------


def emit_comparator_const(e: Emitter, bus: Bus, threshold: int) -> int:
    """One wire that is 1 iff the bus value is strictly below the constant.

    Walks from the most significant bit keeping an "equal so far" chain:
    the value is below the constant exactly when the first differing bit is
    a 1 in the constant.  O(len(bus)) gates.
    """
    if not 0 <= threshold < (1 << len(bus)):
        raise ConstructionError(
            f"threshold {threshold} out of range for a {len(bus)}-bit bus"
        )
    lt = e.const(0)
    eq = e.const(1)
    for j in range(len(bus) - 1, -1, -1):
        kbit = (threshold >> j) & 1
        if kbit:
            lt = e.or_(lt, e.and_(eq, e.not_(bus[j])))
            eq = e.and_(eq, bus[j])
        else:
            eq = e.and_(eq, e.not_(bus[j]))
    return lt


def emit_ge_const(e: Emitter, bus: Bus, threshold: int) -> int:
    return e.not_(emit_comparator_const(e, bus, threshold))


def emit_eq_const(e: Emitter, bus: Bus, value: int) -> int:
    if not 0 <= value < (1 << len(bus)):
        raise ConstructionError(f"constant {value} out of range for a {len(bus)}-bit bus")
    wires = [bus[j] if (value >> j) & 1 else e.not_(bus[j]) for j in range(len(bus))]
    return e.and_many(wires)


def emit_lt_bus(e: Emitter, a: Bus, b: Bus) -> int:
    """a < b for two equal-width buses (unsigned)."""
    if len(a) != len(b):
        raise ConstructionError("comparator requires equal bus widths")
    lt = e.const(0)
    eq = e.const(1)
    for j in range(len(a) - 1, -1, -1):
        lt = e.or_(lt, e.and_many([eq, e.not_(a[j]), b[j]]))
        eq = e.and_(eq, e.xnor(a[j], b[j]))
    return lt


def emit_eq_bus(e: Emitter, a: Bus, b: Bus) -> int:
    if len(a) != len(b):
        raise ConstructionError("equality requires equal bus widths")
    return e.and_many([e.xnor(x, y) for x, y in zip(a, b)])


# --- arithmetic -------------------------------------------------------------


def emit_affine(e: Emitter, bus: Bus, add: int, wrap_width: int | None = None) -> Bus:
    """(value + add) mod 2**width via a ripple chain against a constant.

    Negative constants are folded into two's complement first, so subtraction
    is the same chain.  Under-/overflow wraps by design; see module docstring.
    """
    width = wrap_width if wrap_width is not None else len(bus)
    if width != len(bus):
        raise ConstructionError("wrap width must equal the bus width")
    if abs(add) >= (1 << width):
        raise ConstructionError(f"constant {add} does not fit in {width} bits")
    k = add % (1 << width)
    out: Bus = []
    carry = e.const(0)
    for j in range(width):
        if (k >> j) & 1:
            out.append(e.xnor(bus[j], carry))
            carry = e.or_(bus[j], carry)
        else:
            out.append(e.xor(bus[j], carry))
            carry = e.and_(bus[j], carry)
    return out


def emit_add_bus(e: Emitter, a: Bus, b: Bus) -> Bus:
    """(a + b) mod 2**width, full ripple adder."""
    if len(a) != len(b):
        raise ConstructionError("adder requires equal bus widths")
    out: Bus = []
    carry = e.const(0)
    for x, y in zip(a, b):
        s = e.xor(x, y)
        out.append(e.xor(s, carry))
        carry = e.or_(e.and_(x, y), e.and_(s, carry))
    return out


def emit_sub_bus(e: Emitter, a: Bus, b: Bus) -> Bus:
    """(a - b) mod 2**width: ripple add of a and ~b with carry-in 1."""
    if len(a) != len(b):
        raise ConstructionError("subtractor requires equal bus widths")
    out: Bus = []
    carry = e.const(1)
    for x, y in zip(a, b):
        ny = e.not_(y)
        s = e.xor(x, ny)
        out.append(e.xor(s, carry))
        carry = e.or_(e.and_(x, ny), e.and_(s, carry))
    return out


def emit_mul_const(e: Emitter, bus: Bus, factor: int) -> Bus:
    """value * factor mod 2**width by shift-and-add over the factor's set bits."""
    if factor < 0:
        raise ConstructionError("negative factors are not supported")
    width = len(bus)
    acc = const_word(e, 0, width)
    shift = 0
    f = factor
    while f and shift < width:
        if f & 1:
            shifted = [e.const(0)] * shift + list(bus[: width - shift])
            acc = emit_add_bus(e, acc, shifted)
        f >>= 1
        shift += 1
    return acc


def emit_div_const(e: Emitter, bus: Bus, divisor: int) -> tuple[Bus, Bus]:
    """Schoolbook long division by a constant, most-significant bit first.

    The running remainder lives in a fixed-width register (enough bits for
    2*divisor - 1); each step shifts in one dividend bit, compares against
    the divisor and conditionally subtracts.  O(len(bus)) gates for a fixed
    divisor.  Returns (quotient, remainder); the remainder bus keeps its
    natural register width.
    """
    if divisor < 1:
        raise ConstructionError("division by zero")
    width = len(bus)
    reg_width = max(1, (2 * divisor - 1).bit_length())
    rem: Bus = const_word(e, 0, reg_width)
    q_msb_first: list[int] = []
    for j in range(width - 1, -1, -1):
        shifted = [bus[j]] + rem[:-1]  # rem := 2*rem + bit (top bit cannot be lost)
        ge = emit_ge_const(e, shifted, divisor)
        reduced = emit_affine(e, shifted, -divisor)
        rem = emit_mux(e, ge, reduced, shifted)
        q_msb_first.append(ge)
        e.meter(rem, q_msb_first)
    quotient = list(reversed(q_msb_first))
    return quotient, rem


# --- routing ----------------------------------------------------------------


def emit_mux(e: Emitter, select_bit: int, bus_a: Bus, bus_b: Bus) -> Bus:
    """Per-bit (sel & a) | (!sel & b); sel=1 selects bus_a."""
    if len(bus_a) != len(bus_b):
        raise ConstructionError("mux requires equal bus widths")
    nsel = e.not_(select_bit)
    return [e.or_(e.and_(select_bit, a), e.and_(nsel, b)) for a, b in zip(bus_a, bus_b)]


def emit_onehot_merge(e: Emitter, lanes: Sequence[tuple[int, Bus]]) -> Bus:
    """OR together (cond & bus) lanes whose conditions are mutually exclusive."""
    if not lanes:
        raise ConstructionError("merge of zero lanes")
    width = len(lanes[0][1])
    out: Bus = []
    for j in range(width):
        out.append(e.or_many([e.and_(cond, bus[j]) for cond, bus in lanes]))
    return out


def emit_max(e: Emitter, a: Bus, b: Bus) -> Bus:
    """max(a, b) via one comparator and one mux."""
    a_below = emit_lt_bus(e, a, b)
    return emit_mux(e, a_below, b, a)
