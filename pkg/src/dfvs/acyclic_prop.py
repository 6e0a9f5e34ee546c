"""Cycle propagation: keep the excluded vertices acyclic during SAT search.

Variable ``v`` false means vertex ``v`` stays in the graph.  The set of such
vertices must induce a DAG; :class:`IncrementalDag` maintains a topological
"order" on it (longest-path depth from a source) and notices the moment an
insertion would close a cycle.
"""

from __future__ import annotations

import heapq
from collections.abc import Iterable, Sequence

from .cycles import shortest_cycle_within
from .digraph import DiGraph


class IncrementalDag:
    """Order-maintenance over the present subset of a fixed digraph.

    ``order[v]`` is 0 for a vertex without present predecessors and one
    more than the largest predecessor order otherwise.
    """

    def __init__(self, g: DiGraph):
        self.g = g
        self.present: set[int] = set()
        self.order: dict[int, int] = {}
        # dict used as an ordered set
        self.pending_insert: dict[int, None] = {}
        self.pending_remove: set[int] = set()
        self.steps = 0
        self.order_changes = 0

    # -- batching ---------------------------------------------------------

    def on_assign(self, lits: Iterable[int]) -> None:
        for lit in lits:
            v = abs(lit)
            if lit < 0:
                self.pending_remove.discard(v)
                if v not in self.present:
                    self.pending_insert[v] = None
            else:
                self.pending_insert.pop(v, None)
                if v in self.present:
                    self.pending_remove.add(v)

    def on_backtrack(self, variables: Iterable[int]) -> None:
        for v in variables:
            self.pending_insert.pop(v, None)
            if v in self.present:
                self.pending_remove.add(v)

    def insert(self, v: int) -> None:
        self.on_assign([-v])

    def remove(self, v: int) -> None:
        self.on_backtrack([v])

    # -- structure --------------------------------------------------------

    def _required(self, v: int) -> int:
        present, order = self.present, self.order
        best = -1
        for p in self.g.pred[v]:
            if p in present and p != v and order[p] > best:
                best = order[p]
        return best + 1

    def _apply_removals(self) -> None:
        if not self.pending_remove:
            return
        present, order, succ = self.present, self.order, self.g.succ
        heap: list[tuple[int, int]] = []
        for v in self.pending_remove:
            present.discard(v)
            del order[v]
            for s in succ[v]:
                if s in present:
                    heap.append((order[s], s))
        self.pending_remove.clear()
        heapq.heapify(heap)
        # lower orders settle first, so each vertex is finalized once
        done: set[int] = set()
        while heap:
            o, v = heapq.heappop(heap)
            if v in done or v not in present or order[v] != o:
                continue
            done.add(v)
            self.steps += 1
            new = self._required(v)
            if new < o:
                order[v] = new
                self.order_changes += 1
                for s in succ[v]:
                    if s in present and s not in done:
                        heapq.heappush(heap, (order[s], s))

    def _insert_one(self, x: int) -> list[int] | None:
        """Insert ``x``; on a cycle undo everything and return it."""
        succ = self.g.succ
        if x in succ[x]:
            return [x]
        present, order = self.present, self.order
        present.add(x)
        order[x] = self._required(x)
        undo: list[tuple[int, int]] = []
        # iterative DFS; the stack holds the path x -> ... -> current
        path = [x]
        iters = [iter(sorted(succ[x]))]
        while iters:
            u = path[-1]
            for s in iters[-1]:
                if s not in present:
                    continue
                self.steps += 1
                if s == x:
                    for w, o in reversed(undo):
                        order[w] = o
                    present.discard(x)
                    del order[x]
                    return list(path)
                if order[u] + 1 > order[s]:
                    undo.append((s, order[s]))
                    order[s] = order[u] + 1
                    self.order_changes += 1
                    path.append(s)
                    iters.append(iter(sorted(succ[s])))
                    break
            else:
                path.pop()
                iters.pop()
        return None

    def flush_and_check(self) -> list[int] | None:
        """Apply pending work; return a cycle if an insertion would close one.

        The offending vertex stays pending, so it is retried on the next
        flush once the caller has undone part of the assignment.
        """
        self._apply_removals()
        while self.pending_insert:
            x = next(iter(self.pending_insert))
            cyc = self._insert_one(x)
            if cyc is not None:
                return cyc
            del self.pending_insert[x]
        return None

    # -- checking helpers -------------------------------------------------

    def expected_orders(self) -> dict[int, int]:
        """Orders recomputed from scratch (assumes ``present`` is acyclic)."""
        memo: dict[int, int] = {}
        pred = self.g.pred
        for root in self.present:
            if root in memo:
                continue
            stack = [root]
            while stack:
                v = stack[-1]
                todo = [p for p in pred[v] if p in self.present and p not in memo and p != v]
                if todo:
                    stack.extend(todo)
                    continue
                stack.pop()
                if v not in memo:
                    memo[v] = 1 + max(
                        (memo[p] for p in pred[v] if p in self.present and p != v), default=-1
                    )
        return memo

    def check_invariants(self) -> None:
        assert set(self.order) == self.present
        assert self.order == self.expected_orders()


class CyclePropagator:
    """Adapter between the SAT core's hook and :class:`IncrementalDag`.

    Variables are vertex ids; variables outside the graph (for example the
    cardinality encoding's auxiliaries) are ignored.
    """

    def __init__(self, g: DiGraph, shorten: bool = True):
        self.g = g
        self.dag = IncrementalDag(g)
        self.shorten = shorten
        self.injected: list[list[int]] = []

    def propagate(self, new_lits: Sequence[int]) -> list[int] | None:
        g = self.g.succ
        self.dag.on_assign([lit for lit in new_lits if abs(lit) in g])
        cyc = self.dag.flush_and_check()
        if cyc is None:
            return None
        if self.shorten and len(cyc) > 2:
            cyc = shortest_cycle_within(self.g, cyc) or cyc
        self.injected.append(cyc)
        return list(cyc)

    def backtrack(self, variables: Sequence[int]) -> None:
        g = self.g.succ
        self.dag.on_backtrack([v for v in variables if v in g])


def as_propagator(dag_or_graph: IncrementalDag | DiGraph, shorten: bool = True) -> CyclePropagator:
    g = dag_or_graph.g if isinstance(dag_or_graph, IncrementalDag) else dag_or_graph
    prop = CyclePropagator(g, shorten=shorten)
    if isinstance(dag_or_graph, IncrementalDag):
        prop.dag = dag_or_graph
    return prop
