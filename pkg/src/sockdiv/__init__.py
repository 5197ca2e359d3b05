"""Finite-scale workbench for shoe division, sock division and their reductions."""

from .core import (
    Bijection,
    ChoiceAssignment,
    IndexedPair,
    Relabeling,
    ShoeInstance,
    SockBundle,
    SockInstance,
    apply_relabeling_shoe,
    apply_relabeling_sock,
    is_bundle_isomorphism,
    trivial_bundle,
    validate_shoe_instance,
    validate_sock_instance,
)
from .equivariance import (
    AutomorphismPair,
    NonexistenceCertificate,
    automorphisms_of_sock_instance,
    cheating_sock_divider,
    check_divider_equivariance,
    enumerate_shoe_instances,
    enumerate_sock_instances,
    equivariant_sock_divider,
    search_equivariant_sock_divider,
)
from .fileio import emit_instance, parse_instance
from .reductions import (
    LinearOrder,
    PairFamily,
    choice_from_sock_divider,
    columns_bundle,
    mra_from_sock_divider,
    rows_bundle,
    sock_divide_from_mra,
    strong_divisibility_witness,
    trivialize_with_order,
    weak_divisibility_witness,
)
from .shoe import DivisionResult, divide_by_two_cycle_decomposition, shoe_divide, verify_division

__version__ = "0.1.0"
