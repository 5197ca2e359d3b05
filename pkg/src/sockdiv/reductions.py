"""Constructive reductions between sock division, choice and repeated addition.

Oracles are plain callables taking a :class:`SockInstance` and returning a
:class:`Bijection` from ``left.base`` to ``right.base``.  They are injected,
so the same pipeline runs with a label-peeking oracle or with the equivariant
searcher.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Callable, Iterable, Mapping, Optional

from .core import (
    Bijection,
    ChoiceAssignment,
    IndexedPair,
    ShoeInstance,
    SockBundle,
    SockInstance,
    element_key,
    product_with_slots,
    sorted_elements,
    trivial_bundle,
)
from .errors import DomainMismatch, FiberSizeError, FibersOverlap, OracleViolation, ValidationError
from .shoe import shoe_divide

SockDividerOracle = Callable[[SockInstance], Bijection]


@dataclass(frozen=True, eq=False)
class PairFamily:
    """Finitely many disjoint fibers of size ``n`` indexed by an ordered list.

    The index order plays the role of the natural numbers: it is the one
    piece of order the choice pipeline is allowed to use.
    """

    order: tuple
    pairs: Mapping
    n: int = 2

    def __post_init__(self):
        order = tuple(self.order)
        if len(set(order)) != len(order):
            raise ValidationError("index order lists an index twice", field="order")
        if set(order) != set(self.pairs):
            raise ValidationError("index order must list exactly the family's indices", field="order")
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1:
            raise FiberSizeError(f"fiber size must be a positive integer, got {self.n!r}", field="n")
        pairs, owner = {}, {}
        for i in order:
            items = list(self.pairs[i])
            fiber = frozenset(items)
            if len(fiber) != len(items) or len(fiber) != self.n:
                raise FiberSizeError(f"fiber {i!r} has size {len(fiber)}, expected {self.n}", field="pairs")
            for x in fiber:
                if x in owner:
                    raise FibersOverlap(f"{x!r} lies in fibers {owner[x]!r} and {i!r}", field="pairs")
                owner[x] = i
            pairs[i] = fiber
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "pairs", MappingProxyType(pairs))

    @property
    def socks(self) -> frozenset:
        return frozenset(x for fiber in self.pairs.values() for x in fiber)

    def __eq__(self, other):
        if not isinstance(other, PairFamily):
            return NotImplemented
        return (self.order, self.n, dict(self.pairs)) == (other.order, other.n, dict(other.pairs))

    def __hash__(self):
        return hash((self.order, self.n, frozenset(self.pairs.items())))


@dataclass(frozen=True, eq=False)
class LinearOrder:
    carrier: frozenset
    rank: Mapping

    def __post_init__(self):
        rank = dict(self.rank)
        object.__setattr__(self, "carrier", frozenset(self.carrier))
        if set(rank) != self.carrier or sorted(rank.values()) != list(range(len(rank))):
            raise ValidationError("rank must be a bijection onto 0..|carrier|-1")
        object.__setattr__(self, "rank", MappingProxyType(rank))

    @classmethod
    def from_sequence(cls, seq: Iterable) -> "LinearOrder":
        seq = list(seq)
        if len(set(seq)) != len(seq):
            raise ValidationError("linear order lists an element twice")
        return cls(frozenset(seq), {x: k for k, x in enumerate(seq)})

    def sequence(self) -> list:
        return sorted(self.carrier, key=self.rank.__getitem__)

    def __eq__(self, other):
        if not isinstance(other, LinearOrder):
            return NotImplemented
        return dict(self.rank) == dict(other.rank)

    def __hash__(self):
        return hash(frozenset(self.rank.items()))


def consult(oracle: SockDividerOracle, inst: SockInstance) -> Bijection:
    """Call ``oracle`` and check its contract (bijection of the bases, pure)."""
    g = oracle(inst)
    if not isinstance(g, Bijection) or g.domain != inst.left.base or g.codomain != inst.right.base:
        raise OracleViolation("oracle did not return a bijection between the base sets")
    if oracle(inst) != g:
        raise OracleViolation("oracle answered the same instance differently on a second call")
    return g


def rows_bundle(f: PairFamily, n: Optional[int] = None) -> SockBundle:
    """Bundle over the individual socks; the fiber at ``x`` is ``{(x,1), ..., (x,n)}``."""
    n = f.n if n is None else n
    if n != f.n:
        raise FiberSizeError(f"family fibers have size {f.n}, asked for {n} copies")
    return trivial_bundle(f.socks, n)


def columns_bundle(f: PairFamily, n: Optional[int] = None) -> SockBundle:
    """Bundle over ``indices x {1..n}``; the fiber at ``(i, s)`` is ``A_i x {s}``."""
    n = f.n if n is None else n
    if n != f.n:
        raise FiberSizeError(f"family fibers have size {f.n}, asked for {n} copies")
    return SockBundle(
        {
            IndexedPair(i, s): [IndexedPair(x, s) for x in fiber]
            for i, fiber in f.pairs.items()
            for s in range(1, n + 1)
        },
        n,
    )


def grid_instance(f: PairFamily) -> SockInstance:
    """Rows on the left, columns on the right, glued by the identity."""
    rows, cols = rows_bundle(f), columns_bundle(f)
    return SockInstance(rows, cols, Bijection.identity(rows.total_space))


def choice_from_sock_divider(f: PairFamily, oracle: SockDividerOracle) -> ChoiceAssignment:
    """Pick one sock per fiber using a sock divider.

    The oracle turns the grid into a map from socks to ``(index, slot)``
    pairs; each fiber keeps the sock whose image comes first in the
    (index order, slot) lexicographic order.
    """
    inst = grid_instance(f)
    g = consult(oracle, inst)
    rank = {i: k for k, i in enumerate(f.order)}

    def position(x):
        i, s = g(x)
        return rank[i], s

    choice = ChoiceAssignment({i: min(fiber, key=position) for i, fiber in f.pairs.items()})
    choice.check(f.pairs)
    return choice


def doubled_instance(X: SockBundle) -> SockInstance:
    """``U_a X_a x n`` seen two ways: fibers ``{(x,i) : i <= n}`` over each
    sock (left) and fibers ``{(x,i) : x in X_a}`` over each ``(a,i)`` (right)."""
    n = X.arity
    by_sock = trivial_bundle(X.total_space, n)
    by_slot = SockBundle(
        {
            IndexedPair(a, i): [IndexedPair(x, i) for x in fiber]
            for a, fiber in X.fibers.items()
            for i in range(1, n + 1)
        },
        n,
    )
    return SockInstance(by_sock, by_slot, Bijection.identity(by_sock.total_space))


def mra_from_sock_divider(X: SockBundle, oracle: SockDividerOracle) -> Bijection:
    """Bijection ``U_a X_a -> A x n`` obtained from a sock divider.

    The result need not carry ``X_a`` onto ``{a} x n``.
    """
    g = consult(oracle, doubled_instance(X))
    expected = product_with_slots(X.base, X.arity)
    if g.domain != X.total_space or g.codomain != expected:
        raise OracleViolation("oracle output does not connect the socks with A x n")
    return g


def refinement_colors(inst: SockInstance) -> dict:
    """Canonical colour refinement over fibers and ``u``.

    Vertices are tagged ``("A", a)``, ``("B", b)``, ``("L", x)``, ``("R", y)``.
    Colours are integers assigned from sorted label-free signatures, so any
    relabeling of the instance permutes vertices without changing colours.
    """
    adj = {}
    for side, base_tag, bundle in (("L", "A", inst.left), ("R", "B", inst.right)):
        for a, fiber in bundle.fibers.items():
            adj[(base_tag, a)] = [("fiber", (side, x)) for x in fiber]
            for x in fiber:
                adj[(side, x)] = [("fiber", (base_tag, a))]
    for x, y in inst.u.forward.items():
        adj[("L", x)].append(("u", ("R", y)))
        adj[("R", y)].append(("u", ("L", x)))

    start = {"A": 0, "B": 1, "L": 2, "R": 3}
    color = {v: start[v[0]] for v in adj}
    classes = len(set(color.values()))
    while True:
        sig = {
            v: (color[v], tuple(sorted((kind, color[w]) for kind, w in nbrs)))
            for v, nbrs in adj.items()
        }
        palette = {s: k for k, s in enumerate(sorted(set(sig.values())))}
        color = {v: palette[s] for v, s in sig.items()}
        if len(palette) == classes:
            return color
        classes = len(palette)


def _ordered_trivialization(bundle: SockBundle, side: str, color: dict) -> Bijection:
    mapping = {}
    for a, fiber in bundle.fibers.items():
        ranked = sorted(fiber, key=lambda x: (color[(side, x)], element_key(x)))
        for k, x in enumerate(ranked, start=1):
            mapping[x] = IndexedPair(a, k)
    return Bijection(mapping)


def mra_trivializations(inst: SockInstance) -> tuple:
    """Bijections ``U X_a -> A x n`` and ``U Y_b -> B x n`` for the backward direction.

    Each fiber is ordered by refinement colour; socks sharing a colour fall
    back to label order, the only place this module breaks a symmetry.
    """
    color = refinement_colors(inst)
    return (
        _ordered_trivialization(inst.left, "L", color),
        _ordered_trivialization(inst.right, "R", color),
    )


def shoe_instance_from_sock(inst: SockInstance) -> ShoeInstance:
    left, right = mra_trivializations(inst)
    h = right.compose(inst.u).compose(left.inverse())
    return ShoeInstance(inst.left.base, inst.right.base, inst.n, h)


def sock_divide_from_mra(inst: SockInstance) -> Bijection:
    """Sock division from repeated addition: trivialize both sides, then shoe-divide."""
    return shoe_divide(shoe_instance_from_sock(inst)).matching


def trivialize_with_order(X: SockBundle, order: LinearOrder, f: Bijection) -> Bijection:
    """Turn any bijection ``U X_a -> A x n`` into a bundle isomorphism with ``A x n``.

    ``A x n`` is ordered by (order on A, slot); each fiber ``X_a`` is sorted by
    the position of its ``f``-images and its k-th element goes to ``(a, k)``.
    """
    if order.carrier != X.base:
        raise DomainMismatch("linear order must cover exactly the base space")
    if f.domain != X.total_space or f.codomain != product_with_slots(X.base, X.arity):
        raise DomainMismatch("f must map the total space onto A x n")

    def position(x):
        a, s = f(x)
        return order.rank[a], s

    mapping = {}
    for a, fiber in X.fibers.items():
        for k, x in enumerate(sorted(fiber, key=position), start=1):
            mapping[x] = IndexedPair(a, k)
    return Bijection(mapping)


def strong_divisibility_witness(A: Iterable, n: int):
    """``(B, pairing)`` with ``pairing: A -> B x n`` a bijection, or None if n does not divide |A|."""
    items = sorted_elements(A)
    if n < 1:
        raise ValidationError("n must be positive")
    if len(items) % n:
        return None
    B = frozenset(f"b{k}" for k in range(len(items) // n))
    pairing = {x: IndexedPair(f"b{k // n}", k % n + 1) for k, x in enumerate(items)}
    return B, Bijection(pairing, codomain=product_with_slots(B, n))


def weak_divisibility_witness(A: Iterable, n: int) -> Optional[SockBundle]:
    """A sock bundle of arity ``n`` whose total space is exactly ``A``, or None."""
    items = sorted_elements(A)
    if n < 1:
        raise ValidationError("n must be positive")
    if len(items) % n:
        return None
    return SockBundle({f"b{k}": items[k * n:(k + 1) * n] for k in range(len(items) // n)}, n)
