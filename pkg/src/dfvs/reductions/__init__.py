"""Data reductions: rules, fixpoint engine and solution reconstruction."""

from .engine import reduce, reduce_in_place, reduce_with_all_cycles
from .rules import (
    Rule,
    RuleViolation,
    check_unconfined,
    EXCLUSION_RULES,
    apply_exclusion,
    exclude,
    exclusion_applies,
    is_straight,
    try_3empty,
    try_4path,
    try_allcycles,
    try_dome,
    try_exclusion_rules,
    try_loop,
    try_manyfold,
    try_pie,
    try_subset,
    try_unconfined,
)
from .trace import (
    EventKind,
    ReconstructionError,
    ReductionEvent,
    ReductionTrace,
    reconstruct,
    reconstruct_3empty,
    reconstruct_4path,
    reconstruct_manyfold,
)

__all__ = [
    "EventKind",
    "ReconstructionError",
    "ReductionEvent",
    "ReductionTrace",
    "Rule",
    "RuleViolation",
    "check_unconfined",
    "EXCLUSION_RULES",
    "apply_exclusion",
    "exclude",
    "exclusion_applies",
    "is_straight",
    "reconstruct",
    "reconstruct_3empty",
    "reconstruct_4path",
    "reconstruct_manyfold",
    "reduce",
    "reduce_in_place",
    "reduce_with_all_cycles",
    "try_3empty",
    "try_4path",
    "try_allcycles",
    "try_dome",
    "try_exclusion_rules",
    "try_loop",
    "try_manyfold",
    "try_pie",
    "try_subset",
    "try_unconfined",
]
