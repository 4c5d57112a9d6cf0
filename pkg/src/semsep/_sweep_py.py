"""Pure-Python pairwise sweep for bitwise lattice operators.

Same contract as the compiled module in _sweep.pyx; the engine picks
whichever imports.
"""

KERNEL = "python"


def sweep_pairs(left, right, n_left, n_right, old_left, old_right,
                mode, same, seen):
    """Apply AND (mode 0) or OR (mode 1) to pairs of packed values.

    Visits ordered pairs (i, j) over left[:n_left] x right[:n_right] in
    lexicographic order, skipping pairs where both i < old_left and
    j < old_right (both arguments predate the previous round).  When
    same is true the two lists are one list and the operator is
    commutative, so only i <= j is visited; first discovery order is
    unchanged.  Returns (new_values, producing_pairs) and grows seen.
    """
    out_vals = []
    out_pairs = []
    for i in range(n_left):
        a = left[i]
        j = i if same else 0
        while j < n_right:
            if i < old_left and j < old_right:
                j += 1
                continue
            v = (a & right[j]) if mode == 0 else (a | right[j])
            if v not in seen:
                seen.add(v)
                out_vals.append(v)
                out_pairs.append((i, j))
            j += 1
    return out_vals, out_pairs
