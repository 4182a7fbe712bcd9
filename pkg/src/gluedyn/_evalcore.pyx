# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled batch evaluator: one pass over the gate list per input row.

Kind codes match circuits.KIND_CODES: input=0, output=1, and=2, or=3,
not=4, const0=5, const1=6.  Input gates carry their input-slot index in
arg0.  The whole loop runs without the GIL so callers may fan rows out
over threads.
"""

import numpy as np


def run_batch(
    signed char[::1] kinds,
    long long[::1] arg0,
    long long[::1] arg1,
    long long[::1] output_ids,
    unsigned char[:, ::1] inputs,
    unsigned char[:, ::1] out,
):
    cdef Py_ssize_t n_gates = kinds.shape[0]
    cdef Py_ssize_t rows = inputs.shape[0]
    cdef Py_ssize_t n_out = output_ids.shape[0]
    cdef unsigned char[::1] vals = np.zeros(max(n_gates, 1), dtype=np.uint8)
    cdef Py_ssize_t r, g, j
    cdef signed char k
    with nogil:
        for r in range(rows):
            for g in range(n_gates):
                k = kinds[g]
                if k == 2:
                    vals[g] = vals[arg0[g]] & vals[arg1[g]]
                elif k == 3:
                    vals[g] = vals[arg0[g]] | vals[arg1[g]]
                elif k == 4:
                    vals[g] = vals[arg0[g]] ^ 1
                elif k == 0:
                    vals[g] = inputs[r, arg0[g]]
                elif k == 1:
                    vals[g] = vals[arg0[g]]
                elif k == 5:
                    vals[g] = 0
                else:
                    vals[g] = 1
            for j in range(n_out):
                out[r, j] = vals[output_ids[j]]
