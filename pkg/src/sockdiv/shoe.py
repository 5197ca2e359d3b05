"""Shoe division: from a bijection ``A x n -> B x n`` build a bijection ``A -> B``.

The divider is a slot-priority proposal procedure.  Every ``a`` proposes along
its shoes in increasing shoe index; the proposal along ``(a, i)`` with
``h(a, i) = (b, j)`` reaches ``b`` with priority ``j`` (lower is stronger).
Each ``b`` holds its strongest offer and rejects the others.  Preferences are
read off ``h`` alone, so the outcome never depends on label names or on the
storage order of the input.

Deferred acceptance of this kind ends in a stable matching, which on some
instances is not perfect (the smallest ones have ``|A| = 3, n = 2``).  Those
instances are finished by :func:`_orbit_completion`, which is equally
label-free: it works on the quotient of each connected component by its
automorphism group, where any perfect matching lifts to an invariant one.
Pass ``complete=False`` to get the bare proposal outcome, which raises
:class:`IncompleteMatching` on such instances.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

from .core import Bijection, ShoeInstance, sorted_elements
from .errors import ArityMismatch, DomainMismatch, IncompleteMatching


class ProposalEvent(NamedTuple):
    round: int
    proposer: object
    shoe: int
    target: object
    slot: int
    outcome: str  # "held", "rejected" or "displaced"


@dataclass(frozen=True)
class DivisionResult:
    matching: Bijection
    rounds: int
    trace: tuple = field(default=(), compare=False)
    completed: tuple = field(default=(), compare=False)  # matched by orbit completion

    @property
    def method(self) -> str:
        return "proposal+completion" if self.completed else "proposal"


def shoe_divide(inst: ShoeInstance, *, trace: bool = False, complete: bool = True) -> DivisionResult:
    """Divide ``inst`` by its arity.

    With ``complete=False`` an ``a`` that exhausts its shoes unmatched raises
    :class:`IncompleteMatching`.  Otherwise such instances go through orbit
    completion and the elements it matched are listed in ``completed``.
    """
    n = inst.n
    h = inst.h
    next_shoe = {a: 1 for a in inst.A}
    held = {}  # b -> (slot, a, shoe)
    free = set(inst.A)
    stranded = []
    events = []
    rounds = 0

    while free:
        rounds += 1
        offers = {}
        # proposal order within a round cannot change the outcome; sorting
        # only makes the trace reproducible
        for a in sorted_elements(free):
            i = next_shoe[a]
            if i > n:
                stranded.append(a)
                continue
            next_shoe[a] = i + 1
            b, j = h((a, i))
            offers.setdefault(b, []).append((j, a, i))
        free = set()
        for b in sorted_elements(offers):
            contenders = sorted(offers[b], key=lambda t: t[0])
            best = contenders[0]
            incumbent = held.get(b)
            if incumbent is not None and incumbent[0] < best[0]:
                losers = contenders
            else:
                losers = contenders[1:]
                if incumbent is not None:
                    losers.append(incumbent)
                held[b] = best
            for j, a, i in losers:
                free.add(a)
                if trace:
                    kind = "displaced" if (j, a, i) == incumbent else "rejected"
                    events.append(ProposalEvent(rounds, a, i, b, j, kind))
            if trace and held[b] == best and best != incumbent:
                events.append(ProposalEvent(rounds, best[1], best[2], b, best[0], "held"))
        free.difference_update(stranded)

    proposed = {a: i for _, a, i in held.values()}
    completed = ()
    if stranded:
        if not complete:
            unmatched = sorted_elements(stranded)
            raise IncompleteMatching(
                f"proposal procedure left {len(unmatched)} element(s) unmatched: {unmatched!r}",
                unmatched=unmatched,
                instance=inst,
            )
        final = _orbit_completion(inst, proposed)
        completed = tuple(sorted_elements(a for a in inst.A if proposed.get(a) != final[a]))
        if trace:
            for a in completed:
                b, j = h((a, final[a]))
                events.append(ProposalEvent(rounds + 1, a, final[a], b, j, "completed"))
        proposed = final
    try:
        matching = Bijection(
            {a: h((a, i))[0] for a, i in proposed.items()}, domain=inst.A, codomain=inst.B
        )
    except Exception as exc:  # pragma: no cover - guards the completion contract
        raise IncompleteMatching(f"division did not produce a bijection: {exc}", instance=inst)
    return DivisionResult(matching, rounds, tuple(events), completed)


def _components(inst: ShoeInstance) -> list:
    """Connected components of the dart multigraph, as lists of A-elements."""
    parent = {("A", a): ("A", a) for a in inst.A}
    parent.update({("B", b): ("B", b) for b in inst.B})

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for (a, _), (b, _) in inst.h.forward.items():
        ra, rb = find(("A", a)), find(("B", b))
        if ra != rb:
            parent[ra] = rb
    groups = {}
    for a in inst.A:
        groups.setdefault(find(("A", a)), []).append(a)
    return list(groups.values())


def _traverse(inst: ShoeInstance, start):
    """Breadth-first walk from ``start`` following darts in slot order.

    Returns ``(code, order)``.  ``code`` mentions only visit positions and
    slots, so two starts give equal codes exactly when some automorphism of
    the component carries one to the other.
    """
    h, n = inst.h, inst.n
    index = {("A", start): 0}
    order = [("A", start)]
    code = []
    q = 0
    while q < len(order):
        side, v = order[q]
        q += 1
        for slot in range(1, n + 1):
            if side == "A":
                w, t = h((v, slot))
                nb = ("B", w)
            else:
                w, t = h.preimage((v, slot))
                nb = ("A", w)
            if nb not in index:
                index[nb] = len(order)
                order.append(nb)
            code.append((index[nb], t))
    return tuple(code), order


def _orbit_completion(inst: ShoeInstance, proposed: dict) -> dict:
    """Extend the proposal matching to a perfect, automorphism-invariant one.

    ``proposed`` maps matched ``a`` to the shoe it is matched through and is
    invariant under every automorphism.  Returns a shoe for every ``a``.
    """
    h, n = inst.h, inst.n
    result = {}
    for comp in _components(inst):
        walks = [_traverse(inst, a) for a in comp]
        best = min(code for code, _ in walks)
        images = [order for code, order in walks if code == best]
        # orbit of the k-th visited vertex = k-th vertex of every minimal walk
        size = len(images[0])
        orbit_of = {}
        for k in range(size):
            for order in images:
                orbit_of.setdefault(order[k], k)
        # orbits are named by the first canonical position of their members
        a_orbits = {}
        for v, k in orbit_of.items():
            if v[0] == "A":
                a_orbits.setdefault(k, []).append(v[1])
        qedge = {}
        for k, members in a_orbits.items():
            rep = members[0]
            qedge[k] = [orbit_of[("B", h((rep, i))[0])] for i in range(1, n + 1)]

        match_b = {}
        for k, members in a_orbits.items():
            shoes = {proposed.get(a) for a in members}
            if len(shoes) == 1 and None not in shoes:
                i = shoes.pop()
                match_b[qedge[k][i - 1]] = (k, i)

        def augment(k, seen):
            for i in range(1, n + 1):
                bo = qedge[k][i - 1]
                if bo in seen:
                    continue
                seen.add(bo)
                if bo not in match_b or augment(match_b[bo][0], seen):
                    match_b[bo] = (k, i)
                    return True
            return False

        matched = {k for k, _ in match_b.values()}
        for k in sorted(a_orbits):
            if k not in matched and not augment(k, set()):
                raise IncompleteMatching(
                    "orbit quotient has no perfect matching", unmatched=a_orbits[k], instance=inst
                )
        for k, i in match_b.values():
            for a in a_orbits[k]:
                result[a] = i
    return result


def verify_division(inst: ShoeInstance, m: Bijection) -> bool:
    """True iff ``m`` is a bijection ``A -> B`` using only edges induced by ``h``."""
    if m.domain != inst.A or m.codomain != inst.B:
        raise DomainMismatch("matching must map A onto B")
    edges = {(a, b) for (a, _), (b, _) in inst.h.forward.items()}
    return all((a, m(a)) in edges for a in inst.A)


@dataclass(frozen=True)
class Cycle:
    """Alternating closed walk ``a0 b0 a1 b1 ...`` through the darts of ``h``."""

    vertices: tuple
    edges: tuple  # ((a, i), (b, j)) in traversal order

    def __len__(self):
        return len(self.edges)


def divide_by_two_cycle_decomposition(inst: ShoeInstance) -> list:
    """Split the 2-regular multigraph of an ``n = 2`` instance into cycles.

    Each edge ``(a, i) -> (b, j)`` appears in exactly one cycle.  A double edge
    between ``a`` and ``b`` is a cycle of length 2.  Starting points follow
    label order, which affects presentation only.
    """
    if inst.n != 2:
        raise ArityMismatch(f"cycle decomposition needs n = 2, got n = {inst.n}")
    h = inst.h
    unused = set(h.domain)
    cycles = []
    for start in sorted_elements(h.domain):
        if start not in unused:
            continue
        vertices, edges = [], []
        dart = start
        while dart in unused:
            unused.discard(dart)
            a, i = dart
            b, j = h(dart)
            vertices += [a, b]
            edges.append((dart, (b, j)))
            # leave b through its other slot, then a' through its other shoe
            a2, i2 = h.preimage((b, 3 - j))
            unused.discard((a2, i2))
            edges.append(((a2, i2), (b, 3 - j)))
            dart = (a2, 3 - i2)
        cycles.append(Cycle(tuple(vertices), tuple(edges)))
    return cycles
