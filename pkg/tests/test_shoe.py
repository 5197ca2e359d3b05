import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import perfect_matchings, proposer_optimal, relabeling_automorphisms
from sockdiv.core import Bijection, Relabeling, apply_relabeling_shoe, validate_shoe_instance
from sockdiv.equivariance import enumerate_shoe_instances, shoe_automorphisms
from sockdiv.errors import ArityMismatch, DomainMismatch, IncompleteMatching
from sockdiv.shoe import divide_by_two_cycle_decomposition, shoe_divide, verify_division

EXAMPLE2 = [
    (("a1", 1), ("b1", 1)),
    (("a1", 2), ("b2", 1)),
    (("a2", 1), ("b1", 2)),
    (("a2", 2), ("b2", 2)),
]
EXAMPLE3 = [
    (("a1", 1), ("b1", 2)),
    (("a2", 1), ("b1", 1)),
    (("a1", 2), ("b2", 1)),
    (("a2", 2), ("b2", 2)),
]
# a 6-cycle on which slot-priority proposals stall: a2 is turned away by b1
# (slot 2 loses to a1's slot 1) and by b3 (slot 2 loses to a3's slot 1)
STALL = [
    (("a1", 1), ("b1", 1)),
    (("a1", 2), ("b2", 1)),
    (("a2", 1), ("b1", 2)),
    (("a2", 2), ("b3", 2)),
    (("a3", 1), ("b3", 1)),
    (("a3", 2), ("b2", 2)),
]


def shoe(pairs, n=2):
    A = sorted({a for (a, _), _ in pairs})
    B = sorted({b for _, (b, _) in pairs})
    return validate_shoe_instance(A, B, n, pairs)


def test_n1_reads_matching_off_h():
    inst = shoe([(("a", 1), ("y", 1)), (("c", 1), ("x", 1))], n=1)
    assert dict(shoe_divide(inst).matching.forward) == {"a": "y", "c": "x"}


def test_example2_hand_run():
    res = shoe_divide(shoe(EXAMPLE2), trace=True)
    assert dict(res.matching.forward) == {"a1": "b1", "a2": "b2"}
    assert res.rounds == 2
    assert (1, "a2", 1, "b1", 2, "rejected") in res.trace
    assert res.method == "proposal"


def test_example3_hand_run():
    res = shoe_divide(shoe(EXAMPLE3))
    assert dict(res.matching.forward) == {"a2": "b1", "a1": "b2"}


def test_examples_agree_with_brute_force_stable_matching():
    for pairs in (EXAMPLE2, EXAMPLE3):
        inst = shoe(pairs)
        expected = {a: inst.h((a, i))[0] for a, i in proposer_optimal(inst).items()}
        assert dict(shoe_divide(inst).matching.forward) == expected


def test_stalling_instance_strict_mode_raises():
    inst = shoe(STALL)
    with pytest.raises(IncompleteMatching) as err:
        shoe_divide(inst, complete=False)
    assert err.value.unmatched == ("a2",)


def test_stalling_instance_is_completed():
    inst = shoe(STALL)
    res = shoe_divide(inst, trace=True)
    assert verify_division(inst, res.matching)
    assert res.completed
    assert any(ev.outcome == "completed" for ev in res.trace)
    # the 6-cycle has exactly two perfect matchings and a trivial automorphism group
    assert dict(res.matching.forward) in list(perfect_matchings(inst))


@pytest.mark.parametrize("size,n", [(1, 1), (2, 1), (3, 1), (2, 2), (1, 3), (2, 3), (3, 2)])
def test_proposal_outcome_matches_brute_force(size, n):
    for inst in enumerate_shoe_instances(size, n):
        res = shoe_divide(inst)
        assert verify_division(inst, res.matching)
        assert res.rounds <= size * n
        if not res.completed:
            optimal = proposer_optimal(inst)
            assert dict(res.matching.forward) == {a: inst.h((a, i))[0] for a, i in optimal.items()}


def test_completion_only_where_proposals_stall():
    stalled = 0
    for inst in enumerate_shoe_instances(3, 2):
        try:
            shoe_divide(inst, complete=False)
        except IncompleteMatching:
            stalled += 1
            assert shoe_divide(inst).completed
        else:
            assert not shoe_divide(inst).completed
    assert stalled == 72


def test_automorphism_invariance_against_brute_force_group():
    for inst in enumerate_shoe_instances(3, 2):
        m = shoe_divide(inst).matching
        group = relabeling_automorphisms(inst)
        assert len(group) == len(shoe_automorphisms(inst))
        for r in group:
            assert r.conjugate(m) == m


def test_verify_division():
    inst = shoe(EXAMPLE2)
    assert verify_division(inst, shoe_divide(inst).matching)
    assert verify_division(inst, Bijection({"a1": "b2", "a2": "b1"}))
    inst = shoe([(("a1", 1), ("b1", 1)), (("a2", 1), ("b2", 1))], n=1)
    assert not verify_division(inst, Bijection({"a1": "b2", "a2": "b1"}))
    with pytest.raises(DomainMismatch):
        verify_division(inst, Bijection({"a1": "b1"}))


def test_cycle_decomposition_example2():
    (cycle,) = divide_by_two_cycle_decomposition(shoe(EXAMPLE2))
    assert cycle.vertices == ("a1", "b1", "a2", "b2")
    assert len(cycle) == 4


def test_cycle_decomposition_double_edge():
    (cycle,) = divide_by_two_cycle_decomposition(shoe([(("a", 1), ("b", 1)), (("a", 2), ("b", 2))]))
    assert cycle.vertices == ("a", "b")
    assert len(cycle) == 2


def test_cycle_decomposition_disjoint_union():
    inst = shoe([(("a", 1), ("b", 1)), (("a", 2), ("b", 2)), (("c", 1), ("d", 1)), (("c", 2), ("d", 2))])
    assert len(divide_by_two_cycle_decomposition(inst)) == 2


def test_cycle_decomposition_needs_n2():
    with pytest.raises(ArityMismatch):
        divide_by_two_cycle_decomposition(shoe([(("a", 1), ("b", 1))], n=1))


def test_cycles_partition_darts():
    for inst in enumerate_shoe_instances(3, 2):
        cycles = divide_by_two_cycle_decomposition(inst)
        darts = [e for c in cycles for e in c.edges]
        assert sorted(darts) == sorted(inst.h.forward.items())
        assert all(len(c) % 2 == 0 and len(c) >= 2 for c in cycles)


ALL_32 = list(enumerate_shoe_instances(3, 2))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(ALL_32), st.randoms(use_true_random=False))
def test_storage_order_does_not_matter(inst, rnd):
    pairs = list(inst.h.forward.items())
    A, B = list(inst.A), list(inst.B)
    rnd.shuffle(pairs)
    rnd.shuffle(A)
    rnd.shuffle(B)
    again = validate_shoe_instance(A, B, inst.n, pairs)
    assert shoe_divide(again).matching == shoe_divide(inst).matching


def test_equivariance_on_2x2_all_relabelings():
    for inst in enumerate_shoe_instances(2, 2):
        m = shoe_divide(inst).matching
        for pa in itertools.permutations(sorted(inst.A)):
            for pb in itertools.permutations(sorted(inst.B)):
                r = Relabeling(Bijection(dict(zip(sorted(inst.A), pa))), Bijection(dict(zip(sorted(inst.B), pb))))
                assert shoe_divide(apply_relabeling_shoe(inst, r)).matching == r.conjugate(m)


def test_larger_random_instances_divide():
    rng = random.Random(7)
    A = [f"a{i}" for i in range(12)]
    B = [f"b{i}" for i in range(12)]
    for n in (2, 3, 4):
        dom = [(a, i) for a in A for i in range(1, n + 1)]
        cod = [(b, j) for b in B for j in range(1, n + 1)]
        for _ in range(50):
            rng.shuffle(cod)
            inst = validate_shoe_instance(A, B, n, zip(dom, cod))
            res = shoe_divide(inst)
            assert verify_division(inst, res.matching)
            assert res.rounds <= len(A) * n


def test_empty_instance_divides_to_empty():
    inst = validate_shoe_instance([], [], 3, [])
    res = shoe_divide(inst)
    assert len(res.matching) == 0 and res.rounds == 0
