"""Pure-Python kernels for conjunction closure and quantifier projection.

Masks are Python ints.  A mask over ``v`` variables and an ``n``-element
universe has ``n**v`` bits; the assignment ``(e0, ..., e_{v-1})`` is bit
``e0 + n*e1 + n**2*e2 + ...``, so the last variable is the most significant
digit and is projected away first.
"""

from __future__ import annotations

BACKEND = "python"


def closure(masks_a, masks_b, atom_class, trans, start, max_atoms):
    """Close atoms under conjunction up to ``max_atoms`` conjuncts.

    ``atom_class[j]`` is the vertex class of atom ``j`` and
    ``trans[p][c]`` the partition reached by adding class ``c`` to partition
    ``p``; ``start`` is the empty partition.  States are deduplicated on
    ``(mask_a, mask_b, partition)``.  Returns parallel lists
    ``(masks_a, masks_b, parts, reps)`` where ``reps[i]`` is the tuple of
    atom ids of the first conjunction found for state ``i``.
    """
    seen = {}
    out_a, out_b, out_p, reps = [], [], [], []
    frontier = []
    atoms = list(zip(masks_a, masks_b, atom_class))
    for j, (ma, mb, c) in enumerate(atoms):
        key = (ma, mb, trans[start][c])
        if key not in seen:
            seen[key] = len(out_a)
            out_a.append(ma)
            out_b.append(mb)
            out_p.append(key[2])
            reps.append((j,))
            frontier.append(len(out_a) - 1)
    for _ in range(max_atoms - 1):
        nxt = []
        for s in frontier:
            sa, sb, sp, rep = out_a[s], out_b[s], out_p[s], reps[s]
            if not sa and not sb:
                continue
            row = trans[sp]
            for j, (ma, mb, c) in enumerate(atoms):
                key = (sa & ma, sb & mb, row[c])
                if key not in seen:
                    seen[key] = len(out_a)
                    out_a.append(key[0])
                    out_b.append(key[1])
                    out_p.append(key[2])
                    reps.append(rep + (j,))
                    nxt.append(len(out_a) - 1)
        frontier = nxt
    return out_a, out_b, out_p, reps


def project(mask: int, n: int, v: int, prefix) -> int:
    """Eliminate variables ``v-1, ..., 2`` with the quantifiers ``prefix``.

    ``prefix[i]`` is ``True`` for an existential over variable ``i + 2``.
    """
    for level in range(v - 1, 1, -1):
        block = n ** level
        low = (1 << block) - 1
        if prefix[level - 2]:
            acc = 0
            for e in range(n):
                acc |= (mask >> (e * block)) & low
        else:
            acc = low
            for e in range(n):
                acc &= mask >> (e * block)
        mask = acc
    return mask


def project_states(masks_a, masks_b, selected, n_a, n_b, v, prefixes):
    """Project every selected state under every prefix.

    Returns a list of ``(prefix_id, state, ext_a, ext_b)`` in prefix-major
    order.
    """
    out = []
    for pid, prefix in enumerate(prefixes):
        for s in selected:
            out.append((pid, s, project(masks_a[s], n_a, v, prefix),
                        project(masks_b[s], n_b, v, prefix)))
    return out
