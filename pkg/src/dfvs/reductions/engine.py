"""Fixpoint driver for the reduction rules."""

from __future__ import annotations

from ..cycles import CycleSet, enumerate_all_uncovered
from ..digraph import DiGraph, SccLabeling
from . import rules as R
from .rules import Rule
from .trace import ReductionTrace


def _step(g: DiGraph, scc: SccLabeling, trace: ReductionTrace, rules: Rule) -> bool:
    """Run the first rule (in priority order) that fires; True if any did."""
    if rules & Rule.LOOP and R.try_loop(g, trace):
        return True
    if rules & (Rule.IN01 | Rule.OUT01):
        if R.try_exclusion_rules(g, trace, rules, stage=0):
            return True
        if R.try_exclusion_rules(g, trace, rules, stage=1):
            return True
    if rules & Rule.SUBSET and R.try_subset(g, trace):
        return True
    if rules & Rule.PIE and R.try_pie(g, scc, trace):
        return True
    if rules & Rule.DOME and R.try_dome(g, trace):
        return True
    if rules & (Rule.INDICLIQUE | Rule.OUTDICLIQUE | Rule.CORE):
        if R.try_exclusion_rules(g, trace, rules, stage=2):
            return True
    if rules & (Rule.DICLIQUE2 | Rule.DICLIQUE3):
        if R.try_exclusion_rules(g, trace, rules, stage=3):
            return True
    if rules & Rule.UNCONFINED and R.try_unconfined(g, trace):
        return True
    if rules & (Rule.MANYFOLD | Rule.FOURPATH):
        # both folds rely on exact SCC labels with PIE exhausted
        while R.try_pie(g, scc.refresh(exact=True), trace):
            pass
        if rules & Rule.MANYFOLD and R.try_manyfold(g, scc, trace):
            return True
        if rules & Rule.FOURPATH and R.try_4path(g, scc, trace):
            return True
    if rules & Rule.THREEEMPTY and R.try_3empty(g, trace):
        return True
    return False


def reduce(
    g: DiGraph, rules: Rule = Rule.DEFAULT, trace: ReductionTrace | None = None
) -> tuple[DiGraph, ReductionTrace]:
    """Reduce a copy of ``g`` until no enabled rule applies."""
    kernel = g.copy()
    trace = trace if trace is not None else ReductionTrace()
    reduce_in_place(kernel, rules, trace)
    return kernel, trace


def reduce_in_place(g: DiGraph, rules: Rule, trace: ReductionTrace) -> int:
    scc = SccLabeling(g)
    rounds = 0
    while _step(g, scc, trace, rules):
        rounds += 1
    return rounds


_SAFE = Rule.LOOP | Rule.SUBSET | Rule.UNCONFINED | Rule.PIE | Rule.DOME


def _prune(cycles: list[list[int]], g: DiGraph) -> list[list[int]]:
    """Keep the cycles that still exist in ``g``."""
    out = []
    for c in cycles:
        k = len(c)
        if all(x in g.succ and c[(i + 1) % k] in g.succ[x] for i, x in enumerate(c)):
            out.append(c)
    return out


def _safe_phase(g: DiGraph, cycles: CycleSet, trace: ReductionTrace, rules: Rule) -> CycleSet:
    """Rules that never create arcs, so the uncovered-cycle family only shrinks.

    Vertex removal drops exactly the cycles through the vertex, and the arc
    deletions used here (PIE, DOME, ALLCYCLES) are all shown to destroy no
    uncovered cycle, so pruning keeps the set complete.  IN0/OUT0 remove
    vertices that lie on no cycle at all.
    """
    scc = SccLabeling(g)
    safe = rules & _SAFE
    zero = rules & (Rule.IN01 | Rule.OUT01)
    while True:
        fired = 0
        if safe & Rule.LOOP:
            fired += R.try_loop(g, trace)
        if zero:
            fired += R.try_exclusion_rules(g, trace, zero, stage=0)
        if safe & Rule.SUBSET:
            fired += R.try_subset(g, trace)
        if safe & Rule.UNCONFINED:
            fired += R.try_unconfined(g, trace)
        if safe & Rule.PIE:
            fired += R.try_pie(g, scc, trace)
        if safe & Rule.DOME:
            fired += R.try_dome(g, trace)
        cycles = CycleSet(_prune(cycles.cycles, g), True, cycles.steps)
        if rules & Rule.ALLCYCLES:
            fired += R.try_allcycles(g, cycles, trace)
        if not fired:
            return cycles


def reduce_with_all_cycles(
    g: DiGraph,
    cycles: CycleSet,
    rules: Rule = Rule.DEFAULT,
    trace: ReductionTrace | None = None,
    node_budget: int | None = None,
) -> tuple[DiGraph, CycleSet, ReductionTrace]:
    """Interleave ALLCYCLES with the fixpoint while the cycle set stays complete.

    Arc-creating rules (exclusions, folds) run in a plain ``reduce`` pass
    afterwards; if that pass changes the graph the cycles are re-enumerated
    and the loop repeats, otherwise the returned set is exact for the kernel.
    """
    if not cycles.complete:
        raise R.RuleViolation("reduce_with_all_cycles needs a complete cycle set")
    kernel = g.copy()
    trace = trace if trace is not None else ReductionTrace()
    kw = {} if node_budget is None else {"node_budget": node_budget}
    while True:
        cycles = _safe_phase(kernel, cycles, trace, rules)
        before = kernel.mutations
        reduce_in_place(kernel, rules & ~Rule.ALLCYCLES, trace)
        if kernel.mutations == before:
            return kernel, cycles, trace
        cycles = enumerate_all_uncovered(kernel, **kw)
        if not cycles.complete:
            return kernel, cycles, trace
