"""Immutable finite-set data model: bijections, shoe instances, sock bundles.

Elements are opaque hashable labels (strings, or tuples built from Cartesian
products).  Every constructor validates eagerly, so a value that exists is a
valid one.  Label ordering (:func:`element_key`) is a storage and display
detail only; operations that claim equivariance never consult it.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from types import MappingProxyType
from typing import Hashable, Iterable, Mapping, NamedTuple

from .errors import (
    ArityMismatch,
    DomainMismatch,
    FiberSizeError,
    FibersOverlap,
    NotABijection,
    SizeMismatch,
    ValidationError,
)

Element = Hashable


def element_key(e):
    """Total sort key over labels of mixed type (str, int, nested tuples)."""
    if isinstance(e, bool):
        return (1, int(e))
    if isinstance(e, int):
        return (1, e)
    if isinstance(e, str):
        return (0, e)
    if isinstance(e, tuple):
        return (2, tuple(element_key(x) for x in e))
    return (3, repr(e))


def sorted_elements(items: Iterable) -> list:
    return sorted(items, key=element_key)


class IndexedPair(NamedTuple):
    """An element ``(base, slot)`` of ``A x {1..n}``."""

    base: Element
    slot: int


def product_with_slots(A: Iterable, n: int) -> frozenset:
    return frozenset(IndexedPair(a, i) for a in A for i in range(1, n + 1))


class Bijection:
    """A finite invertible map.

    >>> f = Bijection({"a": "b", "c": "d"})
    >>> f("a"), f.inverse()("d")
    ('b', 'c')
    """

    __slots__ = ("_forward", "_inverse", "domain", "codomain")

    def __init__(self, forward: Mapping, *, domain=None, codomain=None):
        fwd = dict(forward)
        dom = frozenset(fwd) if domain is None else frozenset(domain)
        if dom != frozenset(fwd):
            missing = sorted_elements(dom - frozenset(fwd))
            extra = sorted_elements(frozenset(fwd) - dom)
            raise NotABijection(f"map is not total on its domain (missing {missing}, extra {extra})")
        inv = {}
        for x, y in fwd.items():
            if y in inv:
                raise NotABijection(f"{inv[y]!r} and {x!r} both map to {y!r}")
            inv[y] = x
        cod = frozenset(inv) if codomain is None else frozenset(codomain)
        if cod != frozenset(inv):
            missing = sorted_elements(cod - frozenset(inv))
            extra = sorted_elements(frozenset(inv) - cod)
            raise NotABijection(f"map is not onto its codomain (missed {missing}, outside {extra})")
        self._forward = MappingProxyType(fwd)
        self._inverse = MappingProxyType(inv)
        self.domain = dom
        self.codomain = cod

    @classmethod
    def from_pairs(cls, pairs: Iterable, *, domain=None, codomain=None) -> "Bijection":
        fwd = {}
        for x, y in pairs:
            if x in fwd:
                raise NotABijection(f"{x!r} is mapped twice")
            fwd[x] = y
        return cls(fwd, domain=domain, codomain=codomain)

    @classmethod
    def identity(cls, carrier: Iterable) -> "Bijection":
        return cls({x: x for x in carrier})

    @property
    def forward(self) -> Mapping:
        return self._forward

    def __call__(self, x):
        return self._forward[x]

    def __getitem__(self, x):
        return self._forward[x]

    def __len__(self):
        return len(self._forward)

    def preimage(self, y):
        return self._inverse[y]

    def inverse(self) -> "Bijection":
        return Bijection(self._inverse)

    def compose(self, other: "Bijection") -> "Bijection":
        """Return ``self o other`` (apply ``other`` first)."""
        if other.codomain != self.domain:
            raise DomainMismatch("composition of bijections with mismatched domain/codomain")
        return Bijection({x: self._forward[y] for x, y in other._forward.items()})

    def is_permutation(self) -> bool:
        return self.domain == self.codomain

    def items(self) -> list:
        """Pairs sorted by domain label (display order only)."""
        return [(x, self._forward[x]) for x in sorted_elements(self._forward)]

    def __eq__(self, other):
        if not isinstance(other, Bijection):
            return NotImplemented
        return self.codomain == other.codomain and dict(self._forward) == dict(other._forward)

    def __hash__(self):
        return hash((frozenset(self._forward.items()), self.codomain))

    def __repr__(self):
        body = ", ".join(f"{x!r}: {y!r}" for x, y in self.items())
        return f"Bijection({{{body}}})"


@dataclass(frozen=True)
class ShoeInstance:
    """Sets ``A``, ``B``, arity ``n`` and a bijection ``h: A x n -> B x n``."""

    A: frozenset
    B: frozenset
    n: int
    h: Bijection

    def __post_init__(self):
        object.__setattr__(self, "A", frozenset(self.A))
        object.__setattr__(self, "B", frozenset(self.B))
        if not isinstance(self.n, int) or self.n < 1:
            raise ArityMismatch(f"arity must be a positive integer, got {self.n!r}", field="n")
        if len(self.A) != len(self.B):
            raise SizeMismatch(f"|A| = {len(self.A)} but |B| = {len(self.B)}")
        if self.h.domain != product_with_slots(self.A, self.n):
            raise NotABijection("h is not defined exactly on A x {1..n}", field="h")
        if self.h.codomain != product_with_slots(self.B, self.n):
            raise NotABijection("h does not map onto B x {1..n}", field="h")

    def edges(self) -> list:
        """``(a, i, b, j)`` for every dart pair ``h(a, i) = (b, j)``."""
        return [(a, i, b, j) for (a, i), (b, j) in self.h.forward.items()]


def validate_shoe_instance(A, B, n, h) -> ShoeInstance:
    """Build a :class:`ShoeInstance` from raw data.

    ``h`` is an iterable of ``((a, i), (b, j))`` pairs.  Raises
    ``SizeMismatch``, ``ArityMismatch`` or ``NotABijection``.
    """
    A_list, B_list = list(A), list(B)
    for name, items in (("A", A_list), ("B", B_list)):
        if len(set(items)) != len(items):
            raise ValidationError(f"duplicate label in {name}", field=name)
    A, B = frozenset(A_list), frozenset(B_list)
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ArityMismatch(f"arity must be a positive integer, got {n!r}", field="n")
    if len(A) != len(B):
        raise SizeMismatch(f"|A| = {len(A)} but |B| = {len(B)}: |A x n| = |B x n| forces equality")
    pairs = []
    for k, (src, dst) in enumerate(h):
        (a, i), (b, j) = src, dst
        for base, slot, carrier, side in ((a, i, A, "A"), (b, j, B, "B")):
            if isinstance(slot, bool) or not isinstance(slot, int) or not 1 <= slot <= n:
                raise ArityMismatch(f"slot {slot!r} outside 1..{n}", field=f"h[{k}]")
            if base not in carrier:
                raise NotABijection(f"{base!r} is not an element of {side}", field=f"h[{k}]")
        pairs.append((IndexedPair(a, i), IndexedPair(b, j)))
    try:
        bij = Bijection.from_pairs(
            pairs, domain=product_with_slots(A, n), codomain=product_with_slots(B, n)
        )
    except NotABijection as exc:
        raise exc.located(field="h")
    return ShoeInstance(A, B, n, bij)


@dataclass(frozen=True, eq=False)
class SockBundle:
    """Disjoint fibers of equal size ``arity`` indexed by a base set."""

    fibers: Mapping
    arity: int

    def __post_init__(self):
        if isinstance(self.arity, bool) or not isinstance(self.arity, int) or self.arity < 1:
            raise ArityMismatch(f"arity must be a positive integer, got {self.arity!r}")
        fibers = {}
        owner = {}
        for a, fiber in self.fibers.items():
            fiber_list = list(fiber)
            fs = frozenset(fiber_list)
            if len(fs) != len(fiber_list) or len(fs) != self.arity:
                raise FiberSizeError(
                    f"fiber over {a!r} has {len(fs)} distinct elements, expected {self.arity}"
                )
            for x in fs:
                if x in owner:
                    raise FibersOverlap(f"{x!r} lies in the fibers over {owner[x]!r} and {a!r}")
                owner[x] = a
            fibers[a] = fs
        object.__setattr__(self, "fibers", MappingProxyType(fibers))

    @cached_property
    def base(self) -> frozenset:
        return frozenset(self.fibers)

    @cached_property
    def projection(self) -> Mapping:
        return MappingProxyType({x: a for a, fiber in self.fibers.items() for x in fiber})

    @cached_property
    def total_space(self) -> frozenset:
        return frozenset(self.projection)

    def __eq__(self, other):
        if not isinstance(other, SockBundle):
            return NotImplemented
        return self.arity == other.arity and dict(self.fibers) == dict(other.fibers)

    def __hash__(self):
        return hash((self.arity, frozenset(self.fibers.items())))


def trivial_bundle(A: Iterable, n: int) -> SockBundle:
    """The bundle ``A x n`` with fiber ``{(a,1), ..., (a,n)}`` over each ``a``."""
    return SockBundle({a: [IndexedPair(a, i) for i in range(1, n + 1)] for a in A}, n)


@dataclass(frozen=True)
class SockInstance:
    """Two sock bundles of equal arity and a bijection ``u`` of their total spaces."""

    left: SockBundle
    right: SockBundle
    u: Bijection

    def __post_init__(self):
        if self.left.arity != self.right.arity:
            raise FiberSizeError(
                f"left fibers have size {self.left.arity}, right fibers {self.right.arity}"
            )
        if self.u.domain != self.left.total_space or self.u.codomain != self.right.total_space:
            raise NotABijection("u must map the left total space onto the right total space", field="u")

    @property
    def n(self) -> int:
        return self.left.arity

    def is_fiber_respecting(self) -> bool:
        return self.induced_base_map() is not None

    def induced_base_map(self):
        """The base bijection induced by ``u`` if ``u`` maps fibers onto fibers, else None."""
        pi = self.right.projection
        mapping = {}
        for a, fiber in self.left.fibers.items():
            images = {pi[self.u(x)] for x in fiber}
            if len(images) != 1:
                return None
            mapping[a] = images.pop()
        try:
            return Bijection(mapping, codomain=self.right.base)
        except NotABijection:
            return None


def validate_sock_instance(left: Mapping, right: Mapping, u, n=None) -> SockInstance:
    """Build a :class:`SockInstance` from fiber maps and a list of ``(x, y)`` pairs."""
    if n is None:
        sizes = {len(f) for f in list(left.values()) + list(right.values())}
        if len(sizes) > 1:
            raise FiberSizeError(f"fibers of different sizes {sorted(sizes)}")
        n = sizes.pop() if sizes else 1
    try:
        lb = SockBundle(left, n)
    except ValidationError as exc:
        raise exc.located(field="left")
    try:
        rb = SockBundle(right, n)
    except ValidationError as exc:
        raise exc.located(field="right")
    try:
        bij = Bijection.from_pairs(u, domain=lb.total_space, codomain=rb.total_space)
    except NotABijection as exc:
        raise exc.located(field="u")
    return SockInstance(lb, rb, bij)


@dataclass(frozen=True)
class Relabeling:
    """A pair of permutations acting on the two base sets of an instance."""

    onA: Bijection
    onB: Bijection

    def __post_init__(self):
        if not self.onA.is_permutation() or not self.onB.is_permutation():
            raise DomainMismatch("relabeling components must permute a single set")

    @classmethod
    def identity(cls, A, B) -> "Relabeling":
        return cls(Bijection.identity(A), Bijection.identity(B))

    def then(self, other: "Relabeling") -> "Relabeling":
        """Apply ``self`` first, then ``other``."""
        return Relabeling(other.onA.compose(self.onA), other.onB.compose(self.onB))

    def conjugate(self, g: Bijection) -> Bijection:
        """``onB o g o onA^-1`` for a base map ``g: A -> B``."""
        return Bijection({self.onA(a): self.onB(b) for a, b in g.forward.items()})


def apply_relabeling_shoe(inst: ShoeInstance, r: Relabeling) -> ShoeInstance:
    """Conjugate ``h`` by ``r``; slots are left untouched."""
    if r.onA.domain != inst.A or r.onB.domain != inst.B:
        raise DomainMismatch("relabeling does not permute the instance's base sets")
    h = {
        IndexedPair(r.onA(a), i): IndexedPair(r.onB(b), j)
        for (a, i), (b, j) in inst.h.forward.items()
    }
    return ShoeInstance(inst.A, inst.B, inst.n, Bijection(h))


def apply_relabeling_sock(inst: SockInstance, r: Relabeling) -> SockInstance:
    """Move each fiber to the relabeled base point; socks and ``u`` are unchanged."""
    if r.onA.domain != inst.left.base or r.onB.domain != inst.right.base:
        raise DomainMismatch("relabeling does not permute the instance's base sets")
    left = SockBundle({r.onA(a): f for a, f in inst.left.fibers.items()}, inst.n)
    right = SockBundle({r.onB(b): f for b, f in inst.right.fibers.items()}, inst.n)
    return SockInstance(left, right, inst.u)


def is_bundle_isomorphism(f: Bijection, X: SockBundle, Y: SockBundle) -> bool:
    """True iff ``f`` carries every fiber ``X_a`` onto ``Y_a``."""
    if X.base != Y.base:
        raise DomainMismatch("bundles have different base spaces")
    if f.domain != X.total_space or f.codomain != Y.total_space:
        raise DomainMismatch("f does not map X's total space onto Y's total space")
    return all(frozenset(f(x) for x in X.fibers[a]) == Y.fibers[a] for a in X.base)


@dataclass(frozen=True)
class ChoiceAssignment:
    """One chosen element from each indexed fiber."""

    selection: Mapping

    def __post_init__(self):
        object.__setattr__(self, "selection", MappingProxyType(dict(self.selection)))

    def check(self, fibers: Mapping) -> None:
        if frozenset(self.selection) != frozenset(fibers):
            raise DomainMismatch("selection is not indexed by the family's indices")
        for i, x in self.selection.items():
            if x not in fibers[i]:
                raise ValidationError(f"selection({i!r}) = {x!r} is not in its fiber")

    def __eq__(self, other):
        if not isinstance(other, ChoiceAssignment):
            return NotImplemented
        return dict(self.selection) == dict(other.selection)

    def __hash__(self):
        return hash(frozenset(self.selection.items()))
