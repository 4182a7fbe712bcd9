"""Pure-Python batch evaluator, the fallback when the extension is missing.

Same contract as the compiled kernel; plain per-row interpretation over the
flattened gate arrays.
"""

from __future__ import annotations


def run_batch(kinds, arg0, arg1, output_ids, inputs, out) -> None:
    ks = kinds.tolist()
    a0 = arg0.tolist()
    a1 = arg1.tolist()
    outs = output_ids.tolist()
    n_gates = len(ks)
    vals = [0] * n_gates
    for r in range(inputs.shape[0]):
        row = inputs[r].tolist()
        for g in range(n_gates):
            k = ks[g]
            if k == 2:
                vals[g] = vals[a0[g]] & vals[a1[g]]
            elif k == 3:
                vals[g] = vals[a0[g]] | vals[a1[g]]
            elif k == 4:
                vals[g] = vals[a0[g]] ^ 1
            elif k == 0:
                vals[g] = row[a0[g]]
            elif k == 1:
                vals[g] = vals[a0[g]]
            elif k == 5:
                vals[g] = 0
            else:
                vals[g] = 1
        for j, gid in enumerate(outs):
            out[r, j] = vals[gid]
