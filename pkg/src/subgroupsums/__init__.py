"""Fourier coefficients, additive energies and exponential sums of multiplicative subgroups."""

from .errors import CapacityError, ConsistencyError, DivisibilityError, DomainError, InvarianceError
from .primefield import (
    InvariantSet,
    Modulus,
    SubgroupDescriptor,
    cosets,
    heilbronn_subgroup,
    invariant_set,
    random_invariant_set,
    subgroup_of_order,
)
from .reports import ASSERT, REPORT, BoundReport

__version__ = "0.1.0"

__all__ = [
    "ASSERT",
    "REPORT",
    "BoundReport",
    "CapacityError",
    "ConsistencyError",
    "DivisibilityError",
    "DomainError",
    "InvarianceError",
    "InvariantSet",
    "Modulus",
    "SubgroupDescriptor",
    "cosets",
    "heilbronn_subgroup",
    "invariant_set",
    "random_invariant_set",
    "subgroup_of_order",
]
