"""Short-cycle and uncovered-cycle enumeration.

A cycle is uncovered exactly when its vertex set induces nothing but the
cycle itself (a chord always closes a cycle on a strict subset).  The search
below therefore only ever grows chordless paths, which is what keeps it
cheap: covered cycles are never generated in the first place.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .digraph import DiGraph

DEFAULT_NODE_BUDGET = 10**7


@dataclass
class CycleSet:
    cycles: list[list[int]] = field(default_factory=list)
    complete: bool = False
    steps: int = 0

    def vertex_sets(self) -> set[frozenset[int]]:
        return {frozenset(c) for c in self.cycles}

    def __len__(self) -> int:
        return len(self.cycles)


class _Budget(Exception):
    pass


def _chordless_search(g: DiGraph, max_len: int, max_count: float, budget: float):
    """Enumerate chordless cycles of length <= max_len, smallest vertex first.

    Returns ``(cycles, cutoff, capped, exhausted, steps)`` where ``cutoff``
    means some chordless path could have been extended past ``max_len``.
    """
    succ = g.succ
    nbrs = {v: g.succ[v] | g.pred[v] for v in g.succ}
    cycles: list[list[int]] = []
    cutoff = False
    steps = 0

    def eligible(path, w):
        # path = p0..pk with pk -> w; w must not create a chord
        s = path[0]
        if w <= s or w in succ[w]:
            return False
        nw = nbrs[w]
        k = len(path) - 1
        if k >= 1:
            if w in path or w in succ[s] or path[k] in succ[w]:
                return False
            for i in range(1, k):
                if path[i] in nw:
                    return False
        return True

    def extendable(path):
        # necessary condition for a chordless cycle through ``path``: some walk
        # from its end back to path[0] avoiding every vertex that would chord
        s = path[0]
        blocked = set(path) | succ[s]
        for p in path[1:-1]:
            blocked |= nbrs[p]
        seen = {path[-1]}
        stack = [path[-1]]
        while stack:
            x = stack.pop()
            for y in succ[x]:
                if y <= s or y in blocked or y in seen:
                    continue
                if s in succ[y]:
                    return True
                seen.add(y)
                stack.append(y)
        return False

    try:
        for s in sorted(succ):
            if s in succ[s]:
                cycles.append([s])
                if len(cycles) >= max_count:
                    return cycles, cutoff, True, False, steps
                continue
            if max_len < 2:
                if any(w > s for w in succ[s]):
                    cutoff = True
                continue
            path = [s]
            stack = [iter(sorted(succ[s]))]
            while stack:
                for w in stack[-1]:
                    if not eligible(path, w):
                        continue
                    steps += 1
                    if steps > budget:
                        raise _Budget
                    if s in succ[w]:
                        cycles.append(path + [w])
                        if len(cycles) >= max_count:
                            return cycles, cutoff, True, False, steps
                        continue
                    if len(path) + 1 >= max_len:
                        if not cutoff:
                            path.append(w)
                            cutoff = extendable(path)
                            path.pop()
                        continue
                    path.append(w)
                    stack.append(iter(sorted(succ[w])))
                    break
                else:
                    stack.pop()
                    path.pop()
    except _Budget:
        return cycles, cutoff, False, True, steps
    return cycles, cutoff, False, False, steps


def find_short_cycles(g: DiGraph, max_len: int = 4, max_count: int = 25000) -> CycleSet:
    """Uncovered cycles with at most ``max_len`` vertices, at most ``max_count`` of them.

    ``complete`` is set only if no branch of the bounded search was cut by
    either limit, i.e. every uncovered cycle of ``g`` was returned.
    """
    if max_len < 1 or max_count < 1:
        raise ValueError("max_len and max_count must be positive")
    cycles, cutoff, capped, _, steps = _chordless_search(g, max_len, max_count, float("inf"))
    cycles = filter_covered(cycles)
    return CycleSet(cycles, complete=not (cutoff or capped), steps=steps)


def enumerate_all_uncovered(
    g: DiGraph, node_budget: int = DEFAULT_NODE_BUDGET, start_len: int = 4
) -> CycleSet:
    """Grow the length bound one step at a time until the search finishes uncut.

    Gives up (``complete=False``) when a round yields more new cycles than
    the round before, or when ``node_budget`` search steps are spent.
    """
    if node_budget < 1:
        raise ValueError("node_budget must be positive")
    bound = max(1, start_len)
    spent = 0
    prev_new = None
    known = 0
    cycles: list[list[int]] = []
    while True:
        cycles, cutoff, _, exhausted, steps = _chordless_search(
            g, bound, float("inf"), node_budget - spent
        )
        spent += steps
        if exhausted:
            return CycleSet(filter_covered(cycles), complete=False, steps=spent)
        if not cutoff:
            return CycleSet(filter_covered(cycles), complete=True, steps=spent)
        new = len(cycles) - known
        if prev_new is not None and new > prev_new:
            return CycleSet(filter_covered(cycles), complete=False, steps=spent)
        prev_new, known = new, len(cycles)
        bound += 1


def filter_covered(cycles: list[list[int]]) -> list[list[int]]:
    """Drop duplicates (by vertex set) and every cycle strictly containing another."""
    seen: dict[frozenset[int], list[int]] = {}
    for c in cycles:
        key = frozenset(c)
        if key not in seen:
            seen[key] = c
    by_min: dict[int, list[frozenset[int]]] = {}
    for key in seen:
        by_min.setdefault(min(key), []).append(key)
    out = []
    for key, c in seen.items():
        covered = False
        for v in key:
            for other in by_min.get(v, ()):
                if len(other) < len(key) and other <= key:
                    covered = True
                    break
            if covered:
                break
        if not covered:
            out.append(c)
    return out


def is_cycle_of(g: DiGraph, cycle: list[int]) -> bool:
    """True if consecutive vertices (wrapping around) are joined by arcs of ``g``."""
    if not cycle or len(set(cycle)) != len(cycle):
        return False
    return all(
        v in g.succ and g.has_arc(v, cycle[(i + 1) % len(cycle)]) for i, v in enumerate(cycle)
    )


def shortest_cycle_within(g: DiGraph, vertices) -> list[int] | None:
    """A shortest cycle of ``g[vertices]``; shortest cycles never have chords."""
    keep = set(vertices)
    best: list[int] | None = None
    for s in sorted(keep):
        if s in g.succ[s]:
            return [s]
        parent = {s: None}
        queue = deque([s])
        found = None
        while queue and found is None:
            u = queue.popleft()
            for w in sorted(g.succ[u]):
                if w not in keep:
                    continue
                if w == s:
                    found = u
                    break
                if w not in parent:
                    parent[w] = u
                    queue.append(w)
        if found is None:
            continue
        cyc = []
        u = found
        while u is not None:
            cyc.append(u)
            u = parent[u]
        cyc.reverse()
        if best is None or len(cyc) < len(best):
            best = cyc
            if len(best) == 2:
                break
    return best
