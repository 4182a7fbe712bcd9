"""Deterministic successor circuit: copy indexing, label translation, gadget
lookup, and the twelve-way routing that picks the out-neighbor.

Pipeline architecture: the label translators are parameterized by gadget
TYPE, not only by copy index, so the same affine map serves both the copy
the configuration lives in and the next copy over (used when the successor
of a secondary port is defined one copy later).  Seven pipelines feed the
router: (head, i), (branch, i), (pad, i), (tail, i), (branch, i+1),
(pad, i+1), (tail, i+1).

Unrouted lanes may carry wrapped-around garbage; the router's mutually
exclusive conditions guarantee garbage never reaches an output, and the two
spare bus bits keep wrapped values clear of every valid label.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuits import Circuit
from .emit import (
    Bus,
    ConstructionError,
    CountingSink,
    Emitter,
    JsonStreamSink,
    ListSink,
    const_word,
    emit_add_bus,
    emit_affine,
    emit_comparator_const,
    emit_div_const,
    emit_eq_const,
    emit_ge_const,
    emit_mul_const,
    emit_mux,
    emit_onehot_merge,
    emit_sub_bus,
    pad_bus,
)
from .oracle import MODE_DET, ReductionInstance
from .satfront import compile_formula
from .sizing import Layout

HEAD_KIND = "head"
BRANCH_KIND = "branch"
PAD_KIND = "pad"
TAIL_KIND = "tail"

KIND_TO_GADGET = {HEAD_KIND: 2, BRANCH_KIND: 0, PAD_KIND: 4, TAIL_KIND: 3}


def bus_width(layout: Layout) -> int:
    """Internal bus width: two bits beyond what labels and copy indices need."""
    top = max(layout.total, layout.copies)
    return max(1, (top - 1).bit_length()) + 2


def input_width(layout: Layout) -> int:
    return max(1, (layout.total - 1).bit_length())


def _wrap(value: int, width: int) -> int:
    return value % (1 << width)


@dataclass(frozen=True)
class EmissionStats:
    gates: int
    wires: int
    peak_workspace_bytes: int


def emit_copy_index(e: Emitter, layout: Layout, c: Bus) -> tuple[Bus, int]:
    """Smallest copy index holding configuration c, plus the secondary flag.

    Interval tests against the band boundaries pick the case; the two middle
    bands divide the offset by their slice stride.  The secondary flag is up
    exactly when c misses every interior stretch.
    """
    fam = layout.family
    width = len(c)
    two_s = 1 << layout.s

    below_head_end = emit_comparator_const(e, c, layout.head_end)
    in_shared = emit_ge_const(e, c, layout.shared_start)
    is_first = e.or_(below_head_end, in_shared)

    off1 = emit_affine(e, c, _wrap(-layout.head_end, width))
    q1, r1 = emit_div_const(e, off1, fam.branch_stride)
    idx_branch = emit_affine(e, q1, 1)
    in_branch = e.and_(
        emit_ge_const(e, c, layout.head_end), emit_comparator_const(e, c, layout.branch_end)
    )

    off2 = emit_affine(e, c, _wrap(-layout.branch_end, width))
    q2, r2 = emit_div_const(e, off2, fam.pad_stride)
    idx_pad = emit_affine(e, q2, two_s + 1)
    in_pad = e.and_(
        emit_ge_const(e, c, layout.branch_end), emit_comparator_const(e, c, layout.tail_start)
    )

    in_tail = e.and_(
        emit_ge_const(e, c, layout.tail_start), emit_comparator_const(e, c, layout.shared_start)
    )

    i_bus = emit_onehot_merge(
        e,
        [
            (is_first, const_word(e, 0, width)),
            (in_branch, idx_branch),
            (in_pad, idx_pad),
            (in_tail, const_word(e, layout.last_copy, width)),
        ],
    )

    p_head = e.and_(below_head_end, emit_ge_const(e, c, fam.head_core))
    p_branch = e.and_(in_branch, emit_ge_const(e, r1, fam.branch_core))
    p_pad = e.and_(in_pad, emit_ge_const(e, r2, fam.pad_core))
    p = e.or_many([in_shared, p_head, p_branch, p_pad])
    e.meter(c, i_bus, r1, r2)
    return i_bus, p


def emit_local_label(
    e: Emitter, layout: Layout, kind: str, idx: Bus, c: Bus
) -> Bus:
    """Label of configuration c inside a copy of the given gadget type.

    Shared ports translate independently of the copy index; every other label
    is an affine shift of c by the copy's slice start minus the primary-port
    block, computed modulo the bus width.
    """
    fam = layout.family
    width = len(c)
    two_s = 1 << layout.s
    gadget_size = fam.graphs[KIND_TO_GADGET[kind]].size

    in_shared = emit_ge_const(e, c, layout.shared_start)
    shared_lane = emit_affine(e, c, _wrap(gadget_size - layout.total, width))

    if kind == HEAD_KIND:
        plain = list(c)
    elif kind == TAIL_KIND:
        plain = emit_affine(e, c, _wrap(fam.k2 - layout.tail_start, width))
    elif kind == BRANCH_KIND:
        scaled = emit_mul_const(e, idx, fam.branch_stride)
        base = emit_sub_bus(e, c, scaled)
        plain = emit_affine(e, base, _wrap(fam.branch_stride - fam.head_core, width))
    else:  # pad
        scaled = emit_mul_const(e, idx, fam.pad_stride)
        base = emit_sub_bus(e, c, scaled)
        shift = -fam.head_core - two_s * fam.branch_stride + (two_s + 1) * fam.pad_stride
        plain = emit_affine(e, base, _wrap(shift, width))
    return emit_mux(e, in_shared, shared_lane, plain)


def emit_global_label(
    e: Emitter, layout: Layout, kind: str, idx: Bus, v: Bus
) -> Bus:
    """Inverse of `emit_local_label` for every routed lane."""
    fam = layout.family
    width = len(v)
    two_s = 1 << layout.s
    gadget_size = fam.graphs[KIND_TO_GADGET[kind]].size

    is_shared = emit_ge_const(e, v, gadget_size - fam.k3)
    shared_lane = emit_affine(e, v, _wrap(layout.total - gadget_size, width))

    if kind == HEAD_KIND:
        plain = list(v)
    elif kind == TAIL_KIND:
        plain = emit_affine(e, v, _wrap(layout.tail_start - fam.k2, width))
    elif kind == BRANCH_KIND:
        scaled = emit_mul_const(e, idx, fam.branch_stride)
        base = emit_affine(e, v, _wrap(fam.head_core - fam.branch_stride, width))
        plain = emit_add_bus(e, base, scaled)
    else:
        scaled = emit_mul_const(e, idx, fam.pad_stride)
        shift = fam.head_core + two_s * fam.branch_stride - (two_s + 1) * fam.pad_stride
        base = emit_affine(e, v, _wrap(shift, width))
        plain = emit_add_bus(e, base, scaled)
    return emit_mux(e, is_shared, shared_lane, plain)


def emit_gadget_successor(e: Emitter, layout: Layout, gadget: int, v: Bus) -> tuple[Bus, int]:
    """Constant lookup network for a fixed gadget's successor function.

    Output is the successor label when defined; the dead flag is up (and the
    label wires all zero) for vertices with no out-arc.  Labels outside the
    gadget never reach a routed output, so they are left unconstrained except
    that no equality fires, which also yields zeros.
    """
    graph = layout.family.graph(gadget)
    width = len(v)
    table: dict[int, int] = {}
    for u, w in graph.sorted_arcs():
        if u in table:
            raise ConstructionError(
                f"G{gadget} vertex {u} has out-degree above one in deterministic mode"
            )
        table[u] = w
    eq = {u: emit_eq_const(e, v, u) for u in range(graph.size)}
    out: Bus = []
    for j in range(width):
        hits = [eq[u] for u, w in sorted(table.items()) if (w >> j) & 1]
        out.append(e.or_many(hits))
    dead = e.or_many([eq[u] for u in range(graph.size) if u not in table])
    return out, dead


def emit_branch_gadget(
    e: Emitter, inst: ReductionInstance, idx: Bus, v: Bus
) -> tuple[Bus, int]:
    """Successor lookup through whichever branch gadget copy `idx` is.

    The copy index is decremented inline and its low bits feed one embedded
    copy of the formula; a satisfied row selects the self-loop-carrying
    branch (gadget 0), an unsatisfied row the other (gadget 1).
    """
    layout = inst.layout
    s = inst.sizes.s
    dec = emit_affine(e, idx, -1)
    sat = compile_formula(e, inst.formula, dec[:s])
    out0, dead0 = emit_gadget_successor(e, layout, 0, v)
    out1, dead1 = emit_gadget_successor(e, layout, 1, v)
    out = emit_mux(e, sat, out0, out1)
    dead = emit_mux(e, sat, [dead0], [dead1])[0]
    e.meter(dec, out0, out1, out)
    return out, dead


def emit_route_select(
    e: Emitter,
    layout: Layout,
    i: Bus,
    p: int,
    c: Bus,
    candidates: dict[str, Bus],
    dead_head: int,
    dead_branch: int,
    dead_pad: int,
    dead_pad_next: int,
) -> Bus:
    """Twelve-way case routing of the out-neighbor.

    Keys of `candidates`: head_i, branch_i, pad_i, tail_i, branch_next,
    pad_next, tail_next.  When the padding run is empty the rule that would
    hand over to a padding copy hands over to the closer instead, and the
    padding-to-closer rule is dropped to avoid firing twice.
    """
    two_s = 1 << layout.s
    has_pad = layout.L > 0

    at_first = emit_eq_const(e, i, 0)
    below_head_end = emit_comparator_const(e, c, layout.head_end)
    in_shared = emit_ge_const(e, c, layout.shared_start)
    in_branch_band = e.and_(
        emit_ge_const(e, i, 1), emit_comparator_const(e, i, two_s + 1)
    )
    at_branch_last = emit_eq_const(e, i, two_s)
    in_pad_band = e.and_(
        emit_ge_const(e, i, two_s + 1), emit_comparator_const(e, i, two_s + layout.L + 1)
    )
    at_pad_last = emit_eq_const(e, i, two_s + layout.L) if has_pad else None
    at_tail = emit_eq_const(e, i, layout.last_copy)
    not_p = e.not_(p)

    def stay(dead: int) -> int:
        # the copy's own successor applies unless c is a dead secondary port
        return e.or_(not_p, e.not_(dead))

    lanes: list[tuple[int, Bus]] = []
    # opener band
    lanes.append((e.and_many([at_first, below_head_end, stay(dead_head)]), candidates["head_i"]))
    lanes.append(
        (e.and_many([at_first, below_head_end, p, dead_head]), candidates["branch_next"])
    )
    # branch band
    lanes.append((e.and_(in_branch_band, stay(dead_branch)), candidates["branch_i"]))
    lanes.append(
        (
            e.and_many([in_branch_band, e.not_(at_branch_last), p, dead_branch]),
            candidates["branch_next"],
        )
    )
    handover = candidates["pad_next"] if has_pad else candidates["tail_next"]
    lanes.append((e.and_many([at_branch_last, p, dead_branch]), handover))
    # padding band
    lanes.append((e.and_(in_pad_band, stay(dead_pad)), candidates["pad_i"]))
    if has_pad:
        lanes.append(
            (
                e.and_many([in_pad_band, e.not_(at_pad_last), p, dead_pad]),
                candidates["pad_next"],
            )
        )
        lanes.append((e.and_many([at_pad_last, p, dead_pad]), candidates["tail_next"]))
    # closer copy
    lanes.append((at_tail, candidates["tail_i"]))
    # shared ports
    lanes.append((e.and_many([at_first, in_shared, e.not_(dead_head)]), candidates["head_i"]))
    lanes.append(
        (
            e.and_many([at_first, in_shared, dead_head, e.not_(dead_pad_next)]),
            candidates["pad_next"],
        )
    )
    lanes.append(
        (e.and_many([at_first, in_shared, dead_head, dead_pad_next]), candidates["tail_next"])
    )
    return emit_onehot_merge(e, lanes)


def _emit_det(e: Emitter, inst: ReductionInstance) -> None:
    layout = inst.layout
    width = bus_width(layout)
    n_in = input_width(layout)

    c = pad_bus(e, [e.input() for _ in range(n_in)], width)
    e.meter(c)
    i_bus, p = emit_copy_index(e, layout, c)
    i_next = emit_affine(e, i_bus, 1)

    candidates: dict[str, Bus] = {}

    v_head = emit_local_label(e, layout, HEAD_KIND, i_bus, c)
    out_head, dead_head = emit_gadget_successor(e, layout, 2, v_head)
    candidates["head_i"] = emit_global_label(e, layout, HEAD_KIND, i_bus, out_head)
    e.meter(c, i_bus, v_head, out_head)

    v_branch = emit_local_label(e, layout, BRANCH_KIND, i_bus, c)
    out_branch, dead_branch = emit_branch_gadget(e, inst, i_bus, v_branch)
    candidates["branch_i"] = emit_global_label(e, layout, BRANCH_KIND, i_bus, out_branch)

    v_pad = emit_local_label(e, layout, PAD_KIND, i_bus, c)
    out_pad, dead_pad = emit_gadget_successor(e, layout, 4, v_pad)
    candidates["pad_i"] = emit_global_label(e, layout, PAD_KIND, i_bus, out_pad)

    v_tail = emit_local_label(e, layout, TAIL_KIND, i_bus, c)
    out_tail, _ = emit_gadget_successor(e, layout, 3, v_tail)
    candidates["tail_i"] = emit_global_label(e, layout, TAIL_KIND, i_bus, out_tail)

    v_branch_n = emit_local_label(e, layout, BRANCH_KIND, i_next, c)
    out_branch_n, _ = emit_branch_gadget(e, inst, i_next, v_branch_n)
    candidates["branch_next"] = emit_global_label(e, layout, BRANCH_KIND, i_next, out_branch_n)

    v_pad_n = emit_local_label(e, layout, PAD_KIND, i_next, c)
    out_pad_n, dead_pad_next = emit_gadget_successor(e, layout, 4, v_pad_n)
    candidates["pad_next"] = emit_global_label(e, layout, PAD_KIND, i_next, out_pad_n)

    v_tail_n = emit_local_label(e, layout, TAIL_KIND, i_next, c)
    out_tail_n, _ = emit_gadget_successor(e, layout, 3, v_tail_n)
    candidates["tail_next"] = emit_global_label(e, layout, TAIL_KIND, i_next, out_tail_n)
    e.meter(c, i_bus, i_next, candidates)

    routed = emit_route_select(
        e, layout, i_bus, p, c, candidates, dead_head, dead_branch, dead_pad, dead_pad_next
    )
    e.meter(c, i_bus, routed)
    for j in range(n_in):
        e.output(routed[j])


def instance_meta(inst: ReductionInstance) -> dict:
    sizes = inst.sizes
    return {
        "T": sizes.total,
        "N": sizes.N,
        "s": sizes.s,
        "L": sizes.L,
        "mode": inst.mode,
        "sizing": sizes.mode,
        "gamma_digest": inst.family.digest(),
    }


def compile_det(inst: ReductionInstance) -> Circuit:
    """Build the successor circuit in memory."""
    if inst.mode != MODE_DET:
        raise ConstructionError("instance is not in deterministic mode")
    e = Emitter(ListSink())
    _emit_det(e, inst)
    return e.finish(meta=instance_meta(inst))


def stream_det(inst: ReductionInstance, fp) -> EmissionStats:
    """Stream the successor circuit straight to a file object."""
    if inst.mode != MODE_DET:
        raise ConstructionError("instance is not in deterministic mode")
    layout = inst.layout
    sink = JsonStreamSink(
        fp, input_width(layout), input_width(layout), meta=instance_meta(inst)
    )
    e = Emitter(sink)
    _emit_det(e, inst)
    e.finish()
    return EmissionStats(sink.gate_count, sink.wire_count, e.peak_workspace)


def count_det(inst: ReductionInstance) -> EmissionStats:
    """Emit to a counting sink only; used for scaling measurements."""
    if inst.mode != MODE_DET:
        raise ConstructionError("instance is not in deterministic mode")
    sink = CountingSink()
    e = Emitter(sink)
    _emit_det(e, inst)
    return EmissionStats(sink.gate_count, sink.wire_count, e.peak_workspace)
