"""Adjacency circuit for arbitrary gadget families: two configurations in,
one arc bit out.

Copy indexing and label translation are shared with the deterministic
compiler; the adjacency side adds a max over the two copy indices, per-gadget
arc lookup networks evaluated at (m, m+1), and a ten-way case analysis that
ORs together the gadgets that could contain the queried pair.  The cases are
resolved first-match, which is what makes the boundary-band overlaps (and the
empty-padding instances) unambiguous.
"""

from __future__ import annotations

from .circuits import Circuit
from .emit import (
    Bus,
    ConstructionError,
    CountingSink,
    Emitter,
    JsonStreamSink,
    ListSink,
    emit_affine,
    emit_comparator_const,
    emit_eq_bus,
    emit_eq_const,
    emit_ge_const,
    emit_lt_bus,
    emit_max,
    emit_mux,
    emit_sub_bus,
    pad_bus,
)
from .detcompile import (
    BRANCH_KIND,
    HEAD_KIND,
    KIND_TO_GADGET,
    PAD_KIND,
    TAIL_KIND,
    EmissionStats,
    bus_width,
    emit_copy_index,
    emit_local_label,
    input_width,
    instance_meta,
)
from .oracle import MODE_NONDET, ReductionInstance
from .satfront import compile_formula
from .sizing import Layout


def emit_gadget_adjacency(e: Emitter, layout: Layout, gadget: int, v: Bus, v2: Bus) -> int:
    """One wire: 1 iff (v, v2) is an arc of the fixed gadget."""
    graph = layout.family.graph(gadget)
    eq_from: dict[int, int] = {}
    eq_to: dict[int, int] = {}
    hits = []
    for u, w in graph.sorted_arcs():
        if u not in eq_from:
            eq_from[u] = emit_eq_const(e, v, u)
        if w not in eq_to:
            eq_to[w] = emit_eq_const(e, v2, w)
        hits.append(e.and_(eq_from[u], eq_to[w]))
    return e.or_many(hits)


def emit_branch_adjacency(
    e: Emitter, inst: ReductionInstance, idx: Bus, v: Bus, v2: Bus
) -> int:
    """Arc bit through whichever branch gadget copy `idx` is.

    When idx is 0 (both endpoints shared, searched "everywhere") the
    assignment wires are clamped to zero; the two branches agree on
    port-to-port arcs by validation, so the clamped answer is arc-exact.
    """
    s = inst.sizes.s
    dec = emit_affine(e, idx, -1)
    at_zero = emit_eq_const(e, idx, 0)
    live = e.not_(at_zero)
    assignment = [e.and_(bit, live) for bit in dec[:s]]
    sat = compile_formula(e, inst.formula, assignment)
    b0 = emit_gadget_adjacency(e, inst.layout, 0, v, v2)
    b1 = emit_gadget_adjacency(e, inst.layout, 1, v, v2)
    return e.or_(e.and_(sat, b0), e.and_(e.not_(sat), b1))


def emit_arc_select(
    e: Emitter,
    layout: Layout,
    i: Bus,
    i2: Bus,
    p: int,
    p2: int,
    c: Bus,
    c2: Bus,
    bits: dict[str, int],
) -> int:
    """Ten-way case analysis producing the final arc bit.

    Keys of `bits`: head_m, branch_m, pad_m, tail_m, branch_next, pad_next,
    tail_next (adjacency at the larger copy index m and at m+1).  Cases are
    combined first-match; every case ORs the adjacency bits of the copies
    that can host the pair, with the m+1 term gated on both endpoints being
    secondary ports.
    """
    two_s = 1 << layout.s
    last = layout.last_copy

    in_shared = emit_ge_const(e, c, layout.shared_start)
    in_shared2 = emit_ge_const(e, c2, layout.shared_start)
    not_shared_both = e.and_(e.not_(in_shared), e.not_(in_shared2))

    i_lt = emit_lt_bus(e, i, i2)
    low = emit_mux(e, i_lt, i, i2)
    m = emit_max(e, i, i2)
    diff = emit_sub_bus(e, m, low)
    far = emit_ge_const(e, diff, 2)
    adjacent = emit_eq_const(e, diff, 1)
    same = emit_eq_bus(e, i, i2)

    def band_strict_branch(x: Bus) -> int:  # 0 < x < 2**s
        return e.and_(emit_ge_const(e, x, 1), emit_comparator_const(e, x, two_s))

    def band_strict_pad(x: Bus) -> int:  # 2**s < x < 2**s + L
        return e.and_(
            emit_ge_const(e, x, two_s + 1),
            emit_comparator_const(e, x, two_s + layout.L),
        )

    pp = e.and_(p, p2)

    def with_next(base: str, nxt: str) -> int:
        return e.or_(bits[base], e.and_(bits[nxt], pp))

    cases: list[tuple[int, int]] = []
    # 1: distant copies, no shared endpoint -> no arc
    cases.append((e.and_(far, not_shared_both), e.const(0)))
    # 2: both endpoints shared -> any gadget may host the arc
    all_bits = e.or_many(
        [
            bits["head_m"],
            bits["branch_m"],
            bits["pad_m"],
            bits["branch_next"],
            bits["pad_next"],
            bits["tail_next"],
        ]
    )
    cases.append((e.and_(in_shared, in_shared2), all_bits))
    # 3: branch band proper
    c3 = e.or_many(
        [
            e.and_(same, band_strict_branch(i)),
            e.and_(in_shared, band_strict_branch(i2)),
            e.and_(in_shared2, band_strict_branch(i)),
        ]
    )
    cases.append((c3, with_next("branch_m", "branch_next")))
    # 4: padding band proper
    c4 = e.or_many(
        [
            e.and_(same, band_strict_pad(i)),
            e.and_(in_shared, band_strict_pad(i2)),
            e.and_(in_shared2, band_strict_pad(i)),
        ]
    )
    cases.append((c4, with_next("pad_m", "pad_next")))
    # 5: last branch copy hands over to the padding run, or straight to the
    # closer when the padding run is empty
    at_bl = emit_eq_const(e, i, two_s)
    at_bl2 = emit_eq_const(e, i2, two_s)
    c5 = e.or_many(
        [
            e.and_(same, at_bl),
            e.and_(in_shared, at_bl2),
            e.and_(in_shared2, at_bl),
        ]
    )
    hand_over = "pad_next" if layout.L > 0 else "tail_next"
    cases.append((c5, with_next("branch_m", hand_over)))
    # 6: opener copy
    at0 = emit_eq_const(e, i, 0)
    at02 = emit_eq_const(e, i2, 0)
    c6 = e.or_many(
        [
            e.and_many([same, at0, not_shared_both]),
            e.and_(in_shared, at02),
            e.and_(in_shared2, at0),
        ]
    )
    cases.append((c6, with_next("head_m", "branch_next")))
    # 7: last padding copy hands over to the closer
    at_pl = emit_eq_const(e, i, two_s + layout.L)
    at_pl2 = emit_eq_const(e, i2, two_s + layout.L)
    c7 = e.or_many(
        [
            e.and_many([same, at_pl, not_shared_both]),
            e.and_(in_shared, at_pl2),
            e.and_(in_shared2, at_pl),
        ]
    )
    cases.append((c7, with_next("pad_m", "tail_next")))
    # 8: adjacent copies inside the branch band
    in_band_m_branch = e.and_(emit_ge_const(e, m, 1), emit_comparator_const(e, m, two_s + 1))
    cases.append((e.and_(adjacent, in_band_m_branch), bits["branch_m"]))
    # 9: adjacent copies inside the padding band
    in_band_m_pad = e.and_(
        emit_ge_const(e, m, two_s + 1), emit_comparator_const(e, m, two_s + layout.L + 1)
    )
    cases.append((e.and_(adjacent, in_band_m_pad), bits["pad_m"]))
    # 10: the closer copy; also reached from the copy before it and from the
    # shared ports, so the plain same-copy test alone would miss real arcs
    at_last_m = emit_eq_const(e, m, last)
    c10 = e.or_many(
        [
            e.and_(same, emit_eq_const(e, i, last)),
            e.and_(adjacent, at_last_m),
            e.and_(in_shared, emit_eq_const(e, i2, last)),
            e.and_(in_shared2, emit_eq_const(e, i, last)),
        ]
    )
    cases.append((c10, bits["tail_m"]))

    # first-match resolution
    taken_any = e.const(0)
    out = e.const(0)
    for cond, payload in cases:
        fire = e.and_(cond, e.not_(taken_any))
        out = e.or_(out, e.and_(fire, payload))
        taken_any = e.or_(taken_any, cond)
    return out


def _emit_nondet(e: Emitter, inst: ReductionInstance) -> None:
    layout = inst.layout
    width = bus_width(layout)
    n_in = input_width(layout)

    c = pad_bus(e, [e.input() for _ in range(n_in)], width)
    c2 = pad_bus(e, [e.input() for _ in range(n_in)], width)
    e.meter(c, c2)

    i_bus, p = emit_copy_index(e, layout, c)
    i2_bus, p2 = emit_copy_index(e, layout, c2)
    m = emit_max(e, i_bus, i2_bus)
    m_next = emit_affine(e, m, 1)
    e.meter(c, c2, i_bus, i2_bus, m)

    bits: dict[str, int] = {}
    for key, kind, idx in (
        ("head_m", HEAD_KIND, m),
        ("branch_m", BRANCH_KIND, m),
        ("pad_m", PAD_KIND, m),
        ("tail_m", TAIL_KIND, m),
        ("branch_next", BRANCH_KIND, m_next),
        ("pad_next", PAD_KIND, m_next),
        ("tail_next", TAIL_KIND, m_next),
    ):
        v = emit_local_label(e, layout, kind, idx, c)
        v2 = emit_local_label(e, layout, kind, idx, c2)
        if kind == BRANCH_KIND:
            bits[key] = emit_branch_adjacency(e, inst, idx, v, v2)
        else:
            bits[key] = emit_gadget_adjacency(e, layout, KIND_TO_GADGET[kind], v, v2)
        e.meter(c, c2, i_bus, i2_bus, m, v, v2)

    arc = emit_arc_select(e, layout, i_bus, i2_bus, p, p2, c, c2, bits)
    e.output(arc)


def compile_nondet(inst: ReductionInstance) -> Circuit:
    """Build the adjacency circuit in memory."""
    if inst.mode != MODE_NONDET:
        raise ConstructionError("instance is not in non-deterministic mode")
    e = Emitter(ListSink())
    _emit_nondet(e, inst)
    return e.finish(meta=instance_meta(inst))


def stream_nondet(inst: ReductionInstance, fp) -> EmissionStats:
    if inst.mode != MODE_NONDET:
        raise ConstructionError("instance is not in non-deterministic mode")
    layout = inst.layout
    sink = JsonStreamSink(fp, 2 * input_width(layout), 1, meta=instance_meta(inst))
    e = Emitter(sink)
    _emit_nondet(e, inst)
    e.finish()
    return EmissionStats(sink.gate_count, sink.wire_count, e.peak_workspace)


def count_nondet(inst: ReductionInstance) -> EmissionStats:
    if inst.mode != MODE_NONDET:
        raise ConstructionError("instance is not in non-deterministic mode")
    sink = CountingSink()
    e = Emitter(sink)
    _emit_nondet(e, inst)
    return EmissionStats(sink.gate_count, sink.wire_count, e.peak_workspace)
