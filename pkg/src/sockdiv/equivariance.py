"""Symmetry machinery: automorphisms, equivariance checks, exhaustive enumeration.

A construction counts as choice-free here when it commutes with every
relabeling of its input and is therefore fixed by every automorphism.  The
searcher below looks for such a base bijection on a sock instance and, when
none exists, returns a replayable certificate.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional, Union

from .core import (
    Bijection,
    IndexedPair,
    Relabeling,
    ShoeInstance,
    SockBundle,
    SockInstance,
    apply_relabeling_shoe,
    apply_relabeling_sock,
    sorted_elements,
)
from .errors import BudgetExceeded, NoEquivariantDivider, SizeBoundExceeded
from .reductions import PairFamily

DEFAULT_BUDGET = 1_000_000
DEFAULT_SIZE_BOUND = 10
DEFAULT_BASE_BOUND = 6


@dataclass(frozen=True)
class AutomorphismPair:
    onLeft: Bijection
    onRight: Bijection
    inducedOnA: Bijection
    inducedOnB: Bijection

    def is_identity(self) -> bool:
        return _is_identity(self.onLeft) and _is_identity(self.onRight)

    def then(self, other: "AutomorphismPair") -> "AutomorphismPair":
        """Apply ``self`` first, then ``other``."""
        return AutomorphismPair(
            other.onLeft.compose(self.onLeft),
            other.onRight.compose(self.onRight),
            other.inducedOnA.compose(self.inducedOnA),
            other.inducedOnB.compose(self.inducedOnB),
        )

    def inverse(self) -> "AutomorphismPair":
        return AutomorphismPair(
            self.onLeft.inverse(),
            self.onRight.inverse(),
            self.inducedOnA.inverse(),
            self.inducedOnB.inverse(),
        )

    def fixes(self, g: Bijection) -> bool:
        """True iff ``inducedOnB o g o inducedOnA^-1 == g``."""
        return all(self.inducedOnB(g(a)) == g(self.inducedOnA(a)) for a in g.domain)


def _induced(perm: Bijection, bundle: SockBundle) -> Optional[Bijection]:
    pi = bundle.projection
    mapping = {}
    for a, fiber in bundle.fibers.items():
        images = {pi[perm(x)] for x in fiber}
        if len(images) != 1:
            return None
        mapping[a] = images.pop()
    return Bijection(mapping)


def replay_automorphism(inst: SockInstance, pair: AutomorphismPair) -> bool:
    """Check that ``pair`` respects fibers, induces its stated base maps and fixes ``u``."""
    if pair.onLeft.domain != inst.left.total_space or not pair.onLeft.is_permutation():
        return False
    if pair.onRight.domain != inst.right.total_space or not pair.onRight.is_permutation():
        return False
    if _induced(pair.onLeft, inst.left) != pair.inducedOnA:
        return False
    if _induced(pair.onRight, inst.right) != pair.inducedOnB:
        return False
    return all(pair.onRight(inst.u(x)) == inst.u(pair.onLeft(x)) for x in inst.left.total_space)


def automorphisms_of_sock_instance(inst: SockInstance, bound: int = DEFAULT_SIZE_BOUND) -> list:
    """All fiber-compatible pairs ``(onLeft, onRight)`` with ``onRight o u = u o onLeft``.

    ``onRight`` is forced by ``onLeft``, so the search runs over base
    permutations and fiberwise bijections on the left, pruning as soon as
    the forced right-hand map splits a right fiber.  The identity comes first.
    """
    if len(inst.left.total_space) > bound or len(inst.right.total_space) > bound:
        raise SizeBoundExceeded(
            f"total spaces of size {len(inst.left.total_space)} exceed the bound {bound}"
        )
    left, right, u = inst.left, inst.right, inst.u
    pi_r = right.projection
    bases = sorted_elements(left.base)
    fibers = {a: sorted_elements(left.fibers[a]) for a in bases}
    found = []

    def extend(k, on_left, on_a, on_b, on_b_inv):
        if k == len(bases):
            on_right = {u(x): u(y) for x, y in on_left.items()}
            found.append(
                AutomorphismPair(Bijection(on_left), Bijection(on_right), Bijection(on_a), Bijection(on_b))
            )
            return
        a = bases[k]
        for target in bases:
            if target in on_a.values():
                continue
            for image in itertools.permutations(fibers[target]):
                on_b2, on_b2_inv = dict(on_b), dict(on_b_inv)
                ok = True
                for x, y in zip(fibers[a], image):
                    rb, rb2 = pi_r[u(x)], pi_r[u(y)]
                    if on_b2.setdefault(rb, rb2) != rb2 or on_b2_inv.setdefault(rb2, rb) != rb:
                        ok = False
                        break
                if ok:
                    extend(
                        k + 1,
                        {**on_left, **dict(zip(fibers[a], image))},
                        {**on_a, a: target},
                        on_b2,
                        on_b2_inv,
                    )

    extend(0, {}, {}, {}, {})
    found.sort(key=lambda p: not p.is_identity())
    return found


def shoe_automorphisms(inst: ShoeInstance) -> list:
    """Relabelings ``r`` with ``apply_relabeling_shoe(inst, r) == inst``.

    The image of ``A`` forces the image of ``B`` through ``h``, so only
    ``|A|!`` candidates are examined.
    """
    A = sorted_elements(inst.A)
    h = inst.h
    result = []
    for image in itertools.permutations(A):
        on_a = dict(zip(A, image))
        on_b = {}
        ok = True
        for (a, i), (b, j) in h.forward.items():
            b2, j2 = h((on_a[a], i))
            if j2 != j or on_b.setdefault(b, b2) != b2:
                ok = False
                break
        if ok and len(set(on_b.values())) == len(on_b):
            result.append(Relabeling(Bijection(on_a), Bijection(on_b, codomain=inst.B)))
    return result


def _is_identity(perm: Bijection) -> bool:
    return all(x == y for x, y in perm.forward.items())


def _cycle_type(perm: Bijection) -> tuple:
    seen, lengths = set(), []
    for x in perm.domain:
        if x in seen:
            continue
        n = 0
        while x not in seen:
            seen.add(x)
            x = perm(x)
            n += 1
        lengths.append(n)
    return tuple(sorted(lengths))


def candidate_bijections(A: Iterable, B: Iterable) -> Iterator[Bijection]:
    """All bijections ``A -> B``: sorted ``A`` zipped with permutations of sorted ``B``."""
    A, B = sorted_elements(A), sorted_elements(B)
    if len(A) != len(B):
        return
    for image in itertools.permutations(B):
        yield Bijection(dict(zip(A, image)), codomain=B)


@dataclass(frozen=True)
class NonexistenceCertificate:
    """Automorphisms whose induced base actions no bijection ``A -> B`` can commute with.

    Usually a single witness suffices (its two induced permutations have
    different cycle types); ``witnesses`` holds more only when no single
    automorphism excludes every candidate.
    """

    witnesses: tuple

    @property
    def witness(self) -> AutomorphismPair:
        return self.witnesses[0]

    @property
    def reason(self) -> tuple:
        return self.witness.inducedOnA, self.witness.inducedOnB

    def excludes(self, g: Bijection) -> bool:
        return any(not w.fixes(g) for w in self.witnesses)

    def replay(self, inst: SockInstance) -> bool:
        """Re-check every witness against ``inst`` and every candidate bijection."""
        if not all(replay_automorphism(inst, w) for w in self.witnesses):
            return False
        return all(self.excludes(g) for g in candidate_bijections(inst.left.base, inst.right.base))


def is_invariant(g: Bijection, automorphisms: Iterable[AutomorphismPair]) -> bool:
    return all(p.fixes(g) for p in automorphisms)


def search_equivariant_sock_divider(
    inst: SockInstance,
    *,
    base_bound: int = DEFAULT_BASE_BOUND,
    size_bound: int = DEFAULT_SIZE_BOUND,
) -> Union[Bijection, NonexistenceCertificate]:
    """First automorphism-invariant bijection of the bases, or a certificate that none exists."""
    if len(inst.left.base) > base_bound:
        raise SizeBoundExceeded(f"base of size {len(inst.left.base)} exceeds the bound {base_bound}")
    autos = automorphisms_of_sock_instance(inst, size_bound)
    for g in candidate_bijections(inst.left.base, inst.right.base):
        if is_invariant(g, autos):
            return g
    # prefer witnesses that fix one base pointwise (B first): for those the
    # obstruction is visible at a glance, g o sigma = g is impossible
    single = [p for p in autos if _cycle_type(p.inducedOnA) != _cycle_type(p.inducedOnB)]
    if single:
        single.sort(key=lambda p: (not _is_identity(p.inducedOnB), not _is_identity(p.inducedOnA)))
        return NonexistenceCertificate((single[0],))
    # no single witness: cover the candidates greedily
    remaining = list(candidate_bijections(inst.left.base, inst.right.base))
    chosen = []
    while remaining:
        best = max(autos, key=lambda p: sum(not p.fixes(g) for g in remaining))
        chosen.append(best)
        remaining = [g for g in remaining if best.fixes(g)]
    return NonexistenceCertificate(tuple(chosen))


def cheating_sock_divider() -> Callable[[SockInstance], Bijection]:
    """Oracle that sorts both bases by label and pairs them positionally.

    Always succeeds and is deliberately not equivariant: it reads labels,
    which is exactly what a choice-free construction may not do.
    """

    def divide(inst: SockInstance) -> Bijection:
        A, B = sorted_elements(inst.left.base), sorted_elements(inst.right.base)
        return Bijection(dict(zip(A, B)), codomain=inst.right.base)

    return divide


def equivariant_sock_divider(**bounds) -> Callable[[SockInstance], Bijection]:
    """Oracle backed by :func:`search_equivariant_sock_divider`.

    Raises :class:`NoEquivariantDivider` carrying the certificate when the
    instance admits no invariant bijection.
    """

    def divide(inst: SockInstance) -> Bijection:
        found = search_equivariant_sock_divider(inst, **bounds)
        if isinstance(found, NonexistenceCertificate):
            raise NoEquivariantDivider(found)
        return found

    return divide


# -- equivariance reports ---------------------------------------------------


@dataclass(frozen=True)
class Violation:
    instance: object
    relabeling: Relabeling
    expected: Bijection
    got: Bijection


@dataclass
class EquivarianceReport:
    checked: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def all_relabelings(inst) -> Iterator[Relabeling]:
    if isinstance(inst, ShoeInstance):
        A, B = inst.A, inst.B
    else:
        A, B = inst.left.base, inst.right.base
    A, B = sorted_elements(A), sorted_elements(B)
    for pa in itertools.permutations(A):
        on_a = Bijection(dict(zip(A, pa)))
        for pb in itertools.permutations(B):
            yield Relabeling(on_a, Bijection(dict(zip(B, pb))))


def _as_bijection(result) -> Bijection:
    return result.matching if hasattr(result, "matching") else result


def apply_relabeling(inst, r: Relabeling):
    if isinstance(inst, ShoeInstance):
        return apply_relabeling_shoe(inst, r)
    return apply_relabeling_sock(inst, r)


def check_divider_equivariance(divider, instances: Iterable, relabelings=None) -> EquivarianceReport:
    """Compare ``divider(r . inst)`` with ``r . divider(inst)``.

    ``relabelings`` is None (every pair of base permutations), an iterable of
    :class:`Relabeling`, or a callable mapping an instance to such an iterable.
    """
    report = EquivarianceReport()
    for inst in instances:
        base = _as_bijection(divider(inst))
        if relabelings is None:
            rs = all_relabelings(inst)
        elif callable(relabelings):
            rs = relabelings(inst)
        else:
            rs = relabelings
        for r in rs:
            expected = r.conjugate(base)
            got = _as_bijection(divider(apply_relabeling(inst, r)))
            report.checked += 1
            if got != expected:
                report.violations.append(Violation(inst, r, expected, got))
    return report


# -- exhaustive enumeration -------------------------------------------------


def _labels(prefix: str, k: int) -> list:
    return [f"{prefix}{i}" for i in range(1, k + 1)]


def _check_budget(count: int, budget: int) -> None:
    if count > budget:
        raise BudgetExceeded(f"{count} instances exceed the budget of {budget}")


def enumerate_shoe_instances(sizeA: int, n: int, budget: int = DEFAULT_BUDGET) -> Iterator[ShoeInstance]:
    """Every ``h`` over ``A = {a1..}``, ``B = {b1..}``, exactly once; ``(sizeA*n)!`` of them."""
    _check_budget(math.factorial(sizeA * n), budget)
    A, B = _labels("a", sizeA), _labels("b", sizeA)
    dom = [IndexedPair(a, i) for a in A for i in range(1, n + 1)]
    cod = [IndexedPair(b, j) for b in B for j in range(1, n + 1)]
    domain, codomain = frozenset(dom), frozenset(cod)
    A, B = frozenset(A), frozenset(B)

    def stream():
        for image in itertools.permutations(cod):
            yield ShoeInstance(A, B, n, Bijection(dict(zip(dom, image)), domain=domain, codomain=codomain))

    return stream()


def canonical_bundle(prefix_base: str, prefix_sock: str, sizeA: int, n: int) -> SockBundle:
    return SockBundle(
        {
            f"{prefix_base}{i}": [f"{prefix_sock}{(i - 1) * n + s}" for s in range(1, n + 1)]
            for i in range(1, sizeA + 1)
        },
        n,
    )


def enumerate_sock_instances(sizeA: int, n: int, budget: int = DEFAULT_BUDGET) -> Iterator[SockInstance]:
    """Every ``u`` between canonical bundles ``a_i -> {x..}`` and ``b_i -> {y..}``."""
    _check_budget(math.factorial(sizeA * n), budget)
    left = canonical_bundle("a", "x", sizeA, n)
    right = canonical_bundle("b", "y", sizeA, n)
    xs = sorted_elements(left.total_space)
    ys = sorted_elements(right.total_space)

    def stream():
        for image in itertools.permutations(ys):
            yield SockInstance(left, right, Bijection(dict(zip(xs, image))))

    return stream()


def _ordered_partitions(items: list, k: int, n: int) -> Iterator[tuple]:
    """Ways to deal ``items`` into ``k`` labelled blocks of size ``n``."""
    if k == 0:
        yield ()
        return
    for block in itertools.combinations(items, n):
        rest = [x for x in items if x not in block]
        for tail in _ordered_partitions(rest, k - 1, n):
            yield (block,) + tail


def enumerate_sock_bundles(sizeA: int, n: int, budget: int = DEFAULT_BUDGET) -> Iterator[SockBundle]:
    """Every bundle over ``{a1..}`` partitioning the socks ``{s1..}`` into fibers of size ``n``."""
    count = math.factorial(sizeA * n) // math.factorial(n) ** sizeA
    _check_budget(count, budget)
    A, socks = _labels("a", sizeA), _labels("s", sizeA * n)

    def stream():
        for blocks in _ordered_partitions(socks, sizeA, n):
            yield SockBundle(dict(zip(A, blocks)), n)

    return stream()


def enumerate_pair_families(k: int, n: int = 2, budget: int = DEFAULT_BUDGET) -> Iterator[PairFamily]:
    """Every family on indices ``i0 < i1 < ...`` dealing socks ``{s1..}`` into fibers of size ``n``."""
    count = math.factorial(k * n) // math.factorial(n) ** k
    _check_budget(count, budget)
    order = tuple(f"i{t}" for t in range(k))
    socks = _labels("s", k * n)

    def stream():
        for blocks in _ordered_partitions(socks, k, n):
            yield PairFamily(order, dict(zip(order, blocks)), n)

    return stream()
