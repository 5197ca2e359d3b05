"""Brute-force reference computations, independent of the code under test."""

import itertools

from sockdiv.core import Bijection, Relabeling, apply_relabeling_shoe


def stable_matchings(inst):
    """Every stable edge matching under slot preferences, as {a: shoe}.

    a prefers lower shoe index, b prefers lower slot; a partial matching is
    stable when no edge (a,i)->(b,j) is preferred by both of its ends.
    """
    A = sorted(inst.A)
    n = inst.n
    found = []
    for choice in itertools.product(range(n + 1), repeat=len(A)):
        held = {}
        ok = True
        for a, i in zip(A, choice):
            if i:
                b, j = inst.h((a, i))
                if b in held:
                    ok = False
                    break
                held[b] = j
        if not ok:
            continue
        mine = dict(zip(A, choice))
        blocked = False
        for (a, i), (b, j) in inst.h.forward.items():
            a_wants = mine[a] == 0 or i < mine[a]
            b_wants = b not in held or j < held[b]
            if a_wants and b_wants:
                blocked = True
                break
        if not blocked:
            found.append({a: i for a, i in mine.items() if i})
    return found


def proposer_optimal(inst):
    """The stable matching giving every a its best stable shoe."""
    stables = stable_matchings(inst)
    best = {}
    for m in stables:
        for a in inst.A:
            i = m.get(a, inst.n + 1)
            best[a] = min(best.get(a, inst.n + 1), i)
    matched = {a: i for a, i in best.items() if i <= inst.n}
    assert matched in stables
    return matched


def relabeling_automorphisms(inst):
    A, B = sorted(inst.A), sorted(inst.B)
    out = []
    for pa in itertools.permutations(A):
        for pb in itertools.permutations(B):
            r = Relabeling(Bijection(dict(zip(A, pa))), Bijection(dict(zip(B, pb))))
            if apply_relabeling_shoe(inst, r) == inst:
                out.append(r)
    return out


def perfect_matchings(inst):
    edges = {(a, b) for (a, _), (b, _) in inst.h.forward.items()}
    A, B = sorted(inst.A), sorted(inst.B)
    for image in itertools.permutations(B):
        if all((a, b) in edges for a, b in zip(A, image)):
            yield dict(zip(A, image))
