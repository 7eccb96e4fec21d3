"""Safe memory reclamation for concurrent data structures.

The package centers on a stamp-ordered scheme: threads entering critical
regions receive strictly increasing stamps from a lock-free pool, retired
nodes are stamped with the pool's dispenser value, and a node is freed as
soon as its stamp is at most the oldest active region's stamp.  Four
baseline schemes (hazard pointers and three region-flavored reclaimers)
sit behind the same guard interface, and three lock-free structures plus
a benchmark harness exercise all of them.
"""

from stampit.interface import (
    AtomicInt,
    AtomicRef,
    ConcurrentReference,
    CounterTotals,
    Guard,
    GuardContractError,
    MarkedReference,
    NULL_REF,
    PerfCounters,
    Reclaimer,
    RegionGuard,
)
from stampit.canary import ALIVE, POISONED, CanaryNode, CanaryViolation, check_alive, poison
from stampit.pool import Block, StampPool, block_state
from stampit.schemes import (
    SCHEME_NAMES,
    EpochScheme,
    HazardPointerScheme,
    QuiescentStateScheme,
    StampItScheme,
    make_scheme,
)
from stampit.structures import (
    STRUCTURE_NAMES,
    FifoBoundedHashMap,
    LockFreeSortedList,
    MichaelScottQueue,
)

__version__ = "0.1.0"

__all__ = [
    "AtomicInt",
    "AtomicRef",
    "ConcurrentReference",
    "CounterTotals",
    "Guard",
    "GuardContractError",
    "MarkedReference",
    "NULL_REF",
    "PerfCounters",
    "Reclaimer",
    "RegionGuard",
    "ALIVE",
    "POISONED",
    "CanaryNode",
    "CanaryViolation",
    "check_alive",
    "poison",
    "Block",
    "StampPool",
    "block_state",
    "SCHEME_NAMES",
    "EpochScheme",
    "HazardPointerScheme",
    "QuiescentStateScheme",
    "StampItScheme",
    "make_scheme",
    "STRUCTURE_NAMES",
    "FifoBoundedHashMap",
    "LockFreeSortedList",
    "MichaelScottQueue",
    "__version__",
]
