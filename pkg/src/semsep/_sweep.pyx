# cython: language_level=3
"""Compiled pairwise sweep for bitwise lattice operators.

Same contract as _sweep_py.sweep_pairs; values are arbitrary-precision
Python ints (packed semantic tuples), so the win over the pure version
is the C-level loop and dispatch, not the arithmetic itself.
"""

KERNEL = "compiled"


def sweep_pairs(list left, list right, Py_ssize_t n_left, Py_ssize_t n_right,
                Py_ssize_t old_left, Py_ssize_t old_right,
                int mode, bint same, set seen):
    cdef Py_ssize_t i, j
    cdef list out_vals = []
    cdef list out_pairs = []
    cdef object a, b, v
    for i in range(n_left):
        a = left[i]
        j = i if same else 0
        while j < n_right:
            if i < old_left and j < old_right:
                j += 1
                continue
            b = right[j]
            v = (a & b) if mode == 0 else (a | b)
            if v not in seen:
                seen.add(v)
                out_vals.append(v)
                out_pairs.append((i, j))
            j += 1
    return out_vals, out_pairs
