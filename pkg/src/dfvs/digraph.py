"""Mutable directed graph plus the handful of linear-time algorithms every
other module leans on (SCCs, acyclicity, bi-edge projection)."""

from __future__ import annotations

from collections.abc import Iterable


class GraphError(ValueError):
    pass


class DiGraph:
    """Directed graph over integer vertex ids.

    ``succ[v]`` and ``pred[v]`` are kept as exact mirrors of each other.
    Vertex ids are never reused; ``new_vertex`` hands out ids above every id
    seen so far.
    """

    __slots__ = ("succ", "pred", "arc_count", "arcs_added", "mutations", "_next_id")

    def __init__(self, vertices: Iterable[int] = (), arcs: Iterable[tuple[int, int]] = ()):
        self.succ: dict[int, set[int]] = {}
        self.pred: dict[int, set[int]] = {}
        self.arc_count = 0
        # bumped on every arc insertion; SCC caches key off this
        self.arcs_added = 0
        self.mutations = 0
        self._next_id = 0
        for v in vertices:
            self.add_vertex(v)
        for u, v in arcs:
            if u not in self.succ:
                self.add_vertex(u)
            if v not in self.succ:
                self.add_vertex(v)
            self.add_arc(u, v)

    # -- construction -----------------------------------------------------

    def add_vertex(self, v: int) -> None:
        if v in self.succ:
            raise GraphError(f"vertex {v} already present")
        self.succ[v] = set()
        self.pred[v] = set()
        self._next_id = max(self._next_id, v + 1)
        self.mutations += 1

    def new_vertex(self) -> int:
        v = self._next_id
        self.add_vertex(v)
        return v

    def add_arc(self, u: int, v: int) -> bool:
        """Insert ``(u, v)``; returns False if it was already present."""
        if u not in self.succ or v not in self.succ:
            raise GraphError(f"arc ({u}, {v}) references an unknown vertex")
        su = self.succ[u]
        if v in su:
            return False
        su.add(v)
        self.pred[v].add(u)
        self.arc_count += 1
        self.arcs_added += 1
        self.mutations += 1
        return True

    def remove_arc(self, u: int, v: int) -> bool:
        """Delete ``(u, v)``; returns False (graph untouched) if absent."""
        su = self.succ.get(u)
        if su is None or v not in su:
            return False
        su.discard(v)
        self.pred[v].discard(u)
        self.arc_count -= 1
        self.mutations += 1
        return True

    def remove_vertex(self, v: int) -> bool:
        if v not in self.succ:
            return False
        out = self.succ.pop(v)
        inc = self.pred.pop(v)
        for w in out:
            if w != v:
                self.pred[w].discard(v)
        for u in inc:
            if u != v:
                self.succ[u].discard(v)
        # a self-loop sits in both sets but is a single arc
        self.arc_count -= len(out) + len(inc) - (1 if v in out else 0)
        self.mutations += 1
        return True

    def copy(self) -> DiGraph:
        g = DiGraph.__new__(DiGraph)
        g.succ = {v: set(s) for v, s in self.succ.items()}
        g.pred = {v: set(s) for v, s in self.pred.items()}
        g.arc_count = self.arc_count
        g.arcs_added = self.arcs_added
        g.mutations = self.mutations
        g._next_id = self._next_id
        return g

    # -- queries ----------------------------------------------------------

    def __contains__(self, v: object) -> bool:
        return v in self.succ

    def __len__(self) -> int:
        return len(self.succ)

    def __iter__(self):
        return iter(self.succ)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiGraph):
            return NotImplemented
        return self.succ == other.succ

    def __repr__(self) -> str:
        return f"DiGraph(n={len(self)}, m={self.arc_count})"

    @property
    def vertices(self) -> list[int]:
        return sorted(self.succ)

    def arcs(self) -> list[tuple[int, int]]:
        return [(u, v) for u in sorted(self.succ) for v in sorted(self.succ[u])]

    def has_arc(self, u: int, v: int) -> bool:
        s = self.succ.get(u)
        return s is not None and v in s

    def is_bi(self, u: int, v: int) -> bool:
        return self.has_arc(u, v) and self.has_arc(v, u)

    def bi_neighbors(self, v: int) -> set[int]:
        return self.succ[v] & self.pred[v]

    def neighbors(self, v: int) -> set[int]:
        return self.succ[v] | self.pred[v]

    def has_loop(self, v: int) -> bool:
        return v in self.succ[v]

    def is_diclique(self, vs: Iterable[int]) -> bool:
        """Every pair of distinct members joined by a bi-edge."""
        vs = list(vs)
        for i, u in enumerate(vs):
            su, pu = self.succ[u], self.pred[u]
            for w in vs[i + 1 :]:
                if w not in su or w not in pu:
                    return False
        return True

    def induced(self, keep: Iterable[int]) -> DiGraph:
        keep = set(keep)
        g = DiGraph(sorted(keep))
        for u in keep:
            for v in self.succ[u]:
                if v in keep:
                    g.add_arc(u, v)
        return g

    def check(self) -> None:
        """Assert the succ/pred mirror invariant (used by tests)."""
        count = 0
        for u, s in self.succ.items():
            for v in s:
                assert v in self.pred and u in self.pred[v], (u, v)
            count += len(s)
        for v, p in self.pred.items():
            for u in p:
                assert v in self.succ[u], (u, v)
        assert count == self.arc_count, (count, self.arc_count)


def bi_projection(g: DiGraph) -> list[tuple[int, int]]:
    """Undirected edges ``(u, v)`` with ``u < v`` for every bi-edge of ``g``."""
    edges = []
    for u in sorted(g.succ):
        for v in sorted(g.succ[u]):
            if u < v and u in g.succ[v]:
                edges.append((u, v))
    return edges


def strongly_connected_components(vertices: Iterable[int], succ) -> dict[int, int]:
    """Iterative Tarjan. ``succ(v)`` yields out-neighbours; returns v -> component id."""
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    label: dict[int, int] = {}
    counter = 0
    comp = 0
    for root in vertices:
        if root in index:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        work = [(root, iter(succ(root)))]
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ(w))))
                    advanced = True
                    break
                if w in on_stack and index[w] < low[v]:
                    low[v] = index[w]
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                if low[v] < low[parent]:
                    low[parent] = low[v]
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    label[w] = comp
                    if w == v:
                        break
                comp += 1
    return label


class SccLabeling:
    """SCCs of ``g`` with every bi-edge removed, cached against graph edits.

    Arc removals only ever split components, so a cached "different label"
    answer stays sound after deletions; only arc insertions mark the cache
    dirty.  ``exact`` additionally tracks whether anything at all changed.
    """

    def __init__(self, g: DiGraph):
        self.g = g
        self.label: dict[int, int] = {}
        self._stamp_added = -1
        self._stamp_mut = -1
        self.recomputations = 0

    @property
    def dirty(self) -> bool:
        return self._stamp_added != self.g.arcs_added

    @property
    def exact(self) -> bool:
        return self._stamp_mut == self.g.mutations

    def recompute(self) -> None:
        g = self.g

        def succ(v):
            pv = g.pred[v]
            return [w for w in g.succ[v] if w not in pv]

        self.label = strongly_connected_components(sorted(g.succ), succ)
        self._stamp_added = g.arcs_added
        self._stamp_mut = g.mutations
        self.recomputations += 1

    def refresh(self, exact: bool = False) -> SccLabeling:
        if self.dirty or (exact and not self.exact):
            self.recompute()
        return self

    def same(self, u: int, v: int) -> bool:
        return self.label[u] == self.label[v]


def scc_par(g: DiGraph) -> SccLabeling:
    """Fresh labelling of the strongly connected components of ``g`` minus its bi-edges."""
    lab = SccLabeling(g)
    lab.recompute()
    return lab


def find_cycle(g: DiGraph, restrict: Iterable[int] | None = None) -> list[int] | None:
    """A directed cycle (vertex list, no repeated closing vertex) or None."""
    if restrict is None:
        allowed = g.succ.keys()
    else:
        allowed = {v for v in restrict if v in g.succ}
    WHITE, GREY, BLACK = 0, 1, 2
    color = dict.fromkeys(allowed, WHITE)
    for root in sorted(allowed):
        if color[root] != WHITE:
            continue
        color[root] = GREY
        path = [root]
        work = [iter(sorted(g.succ[root]))]
        while work:
            v = path[-1]
            for w in work[-1]:
                c = color.get(w)
                if c is None:
                    continue
                if c == GREY:
                    return path[path.index(w):]
                if c == WHITE:
                    color[w] = GREY
                    path.append(w)
                    work.append(iter(sorted(g.succ[w])))
                    break
            else:
                color[v] = BLACK
                path.pop()
                work.pop()
    return None


def is_acyclic(g: DiGraph, restrict: Iterable[int] | None = None) -> tuple[bool, list[int] | None]:
    """``(True, None)`` if the (restricted) graph is a DAG, else ``(False, walk)``.

    The witness walk is closed: its first and last entries coincide.
    """
    cyc = find_cycle(g, restrict)
    if cyc is None:
        return True, None
    return False, cyc + [cyc[0]]
