import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sockdiv.core import (
    Bijection,
    IndexedPair,
    Relabeling,
    SockBundle,
    apply_relabeling_shoe,
    is_bundle_isomorphism,
    trivial_bundle,
    validate_shoe_instance,
    validate_sock_instance,
)
from sockdiv.equivariance import enumerate_shoe_instances
from sockdiv.errors import (
    ArityMismatch,
    DomainMismatch,
    FiberSizeError,
    FibersOverlap,
    NotABijection,
    SizeMismatch,
)

EXAMPLE2 = [
    (("a1", 1), ("b1", 1)),
    (("a1", 2), ("b2", 1)),
    (("a2", 1), ("b1", 2)),
    (("a2", 2), ("b2", 2)),
]


def example2():
    return validate_shoe_instance(["a1", "a2"], ["b1", "b2"], 2, EXAMPLE2)


def test_smallest_shoe_instance():
    inst = validate_shoe_instance(["a"], ["b"], 1, [(("a", 1), ("b", 1))])
    assert inst.h(("a", 1)) == ("b", 1)


def test_size_mismatch():
    with pytest.raises(SizeMismatch):
        validate_shoe_instance(["a1", "a2"], ["b"], 2, [])


def test_not_a_bijection():
    with pytest.raises(NotABijection):
        validate_shoe_instance(["a"], ["b"], 2, [(("a", 1), ("b", 1)), (("a", 2), ("b", 1))])


def test_slot_out_of_range():
    with pytest.raises(ArityMismatch):
        validate_shoe_instance(["a"], ["b"], 1, [(("a", 2), ("b", 1))])


def test_missing_dart_is_not_a_bijection():
    with pytest.raises(NotABijection):
        validate_shoe_instance(["a"], ["b"], 2, [(("a", 1), ("b", 1))])


def test_valid_sock_instance():
    inst = validate_sock_instance({"a": ["p", "q"]}, {"b": ["t", "v"]}, [("p", "t"), ("q", "v")])
    assert inst.n == 2
    assert inst.left.projection["q"] == "a"


def test_overlapping_fibers():
    with pytest.raises(FibersOverlap):
        validate_sock_instance({"a1": ["p", "q"], "a2": ["q", "r"]}, {}, [])


def test_fiber_sizes_disagree():
    with pytest.raises(FiberSizeError):
        validate_sock_instance({"a": ["p", "q"]}, {"b": ["t", "v", "w"]}, [])


def test_sock_u_must_be_total():
    with pytest.raises(NotABijection):
        validate_sock_instance({"a": ["p", "q"]}, {"b": ["t", "v"]}, [("p", "t")])


def test_identity_relabeling_is_fixed_point():
    inst = example2()
    assert apply_relabeling_shoe(inst, Relabeling.identity(inst.A, inst.B)) == inst


def test_swap_relabeling_exchanges_rows():
    # conjugation by a1<->a2 worked out by hand: h'(swap(a), i) = h(a, i)
    inst = example2()
    r = Relabeling(Bijection({"a1": "a2", "a2": "a1"}), Bijection.identity(inst.B))
    out = apply_relabeling_shoe(inst, r)
    assert dict(out.h.forward) == {
        ("a2", 1): ("b1", 1),
        ("a2", 2): ("b2", 1),
        ("a1", 1): ("b1", 2),
        ("a1", 2): ("b2", 2),
    }


def test_relabeling_wrong_set():
    inst = example2()
    r = Relabeling(Bijection({"z1": "z2", "z2": "z1"}), Bijection.identity(inst.B))
    with pytest.raises(DomainMismatch):
        apply_relabeling_shoe(inst, r)


def _relabelings(A, B):
    A, B = sorted(A), sorted(B)
    for pa in itertools.permutations(A):
        for pb in itertools.permutations(B):
            yield Relabeling(Bijection(dict(zip(A, pa))), Bijection(dict(zip(B, pb))))


def test_relabeling_is_a_group_action():
    for inst in itertools.islice(enumerate_shoe_instances(2, 2), 0, 24, 5):
        rs = list(_relabelings(inst.A, inst.B))
        for r in rs:
            for s in rs:
                lhs = apply_relabeling_shoe(apply_relabeling_shoe(inst, r), s)
                assert lhs == apply_relabeling_shoe(inst, r.then(s))


def test_h_inverse_roundtrip_exhaustive():
    for inst in enumerate_shoe_instances(2, 2):
        inv = inst.h.inverse()
        assert all(inv(inst.h(x)) == x for x in inst.h.domain)
        assert inst.h.compose(inv) == Bijection.identity(inst.h.codomain)


def test_bundle_isomorphism_identity():
    X = SockBundle({"a": ["p", "q"], "b": ["r", "s"]}, 2)
    assert is_bundle_isomorphism(Bijection.identity(X.total_space), X, X)


def test_bundle_isomorphism_crossing_fibers():
    X = SockBundle({"a": ["p", "q"], "b": ["r", "s"]}, 2)
    f = Bijection({"p": "r", "r": "p", "q": "s", "s": "q"})
    assert not is_bundle_isomorphism(f, X, X)


def test_bundle_isomorphism_fiberwise_permutation():
    X = SockBundle({"a": ["p", "q"], "b": ["r", "s"]}, 2)
    f = Bijection({"p": "q", "q": "p", "r": "s", "s": "r"})
    assert is_bundle_isomorphism(f, X, X)


def test_bundle_isomorphism_base_mismatch():
    X = SockBundle({"a": ["p"]}, 1)
    Y = SockBundle({"b": ["p"]}, 1)
    with pytest.raises(DomainMismatch):
        is_bundle_isomorphism(Bijection.identity({"p"}), X, Y)


@given(st.permutations(["p", "q", "r", "s", "t", "v"]))
def test_isomorphism_implies_fiberwise_bijection(image):
    X = SockBundle({"a": ["p", "q"], "b": ["r", "s"], "c": ["t", "v"]}, 2)
    f = Bijection(dict(zip(["p", "q", "r", "s", "t", "v"], image)))
    if is_bundle_isomorphism(f, X, X):
        for a, fiber in X.fibers.items():
            assert {f(x) for x in fiber} == X.fibers[a]
    else:
        assert any({f(x) for x in fiber} != X.fibers[a] for a, fiber in X.fibers.items())


def test_trivial_bundle_examples():
    assert dict(trivial_bundle(["a"], 2).fibers) == {"a": frozenset({("a", 1), ("a", 2)})}
    assert trivial_bundle([], 3).total_space == frozenset()
    assert dict(trivial_bundle(["a1", "a2"], 1).fibers) == {
        "a1": frozenset({IndexedPair("a1", 1)}),
        "a2": frozenset({IndexedPair("a2", 1)}),
    }


def test_empty_instance_is_legal():
    inst = validate_shoe_instance([], [], 2, [])
    assert len(inst.h) == 0
