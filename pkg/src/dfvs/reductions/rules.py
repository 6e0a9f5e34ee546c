"""Individual data-reduction rules.

Each ``try_*`` function sweeps the graph once, applies its rule wherever it
is applicable at the moment of inspection, logs every application into the
trace and returns how many applications happened.  Folding rules (MANYFOLD,
4PATH, 3EMPTY) stop after one application because they add arcs, which
invalidates the SCC labelling the next candidate would be checked against.
"""

from __future__ import annotations

from enum import IntFlag

from ..cycles import CycleSet
from ..digraph import DiGraph, SccLabeling
from .trace import (
    EventKind,
    FourPathPayload,
    ManyFoldPayload,
    ReductionTrace,
    ThreeEmptyPayload,
)


class Rule(IntFlag):
    LOOP = 1 << 0
    IN01 = 1 << 1
    OUT01 = 1 << 2
    SUBSET = 1 << 3
    PIE = 1 << 4
    DOME = 1 << 5
    INDICLIQUE = 1 << 6
    OUTDICLIQUE = 1 << 7
    CORE = 1 << 8
    DICLIQUE2 = 1 << 9
    DICLIQUE3 = 1 << 10
    UNCONFINED = 1 << 11
    MANYFOLD = 1 << 12
    FOURPATH = 1 << 13
    ALLCYCLES = 1 << 14
    THREEEMPTY = 1 << 15

    NONE = 0
    SIMPLE = LOOP | IN01 | OUT01
    DEFAULT = (1 << 15) - 1
    ALL = (1 << 16) - 1


class RuleViolation(ValueError):
    pass


# -- exclusion --------------------------------------------------------------


def exclude(g: DiGraph, v: int) -> list[tuple[int, int]]:
    """Bypass ``v``: delete it and join each predecessor to each successor.

    Returns the arcs that were newly created.  A predecessor that is also a
    successor ends up with a self-loop, which callers must consume.
    """
    if g.has_loop(v):
        raise RuleViolation(f"cannot exclude {v}: it carries a self-loop")
    preds = sorted(g.pred[v])
    succs = sorted(g.succ[v])
    g.remove_vertex(v)
    added = []
    for p in preds:
        for s in succs:
            if g.add_arc(p, s):
                added.append((p, s))
    return added


def _exclude_logged(g: DiGraph, v: int, rule: str, trace: ReductionTrace) -> None:
    n0, m0 = len(g), g.arc_count
    added = exclude(g, v)
    trace.excluded(v, rule, added)
    trace.count(rule, n0 - len(g), m0 - g.arc_count)
    for p, s in added:
        if p == s and p in g:
            _commit(g, p, "LOOP", trace)


def _commit(g: DiGraph, v: int, rule: str, trace: ReductionTrace) -> None:
    n0, m0 = len(g), g.arc_count
    g.remove_vertex(v)
    trace.commit(v, rule)
    trace.count(rule, n0 - len(g), m0 - g.arc_count)


def try_loop(g: DiGraph, trace: ReductionTrace) -> int:
    loops = [v for v in sorted(g.succ) if v in g.succ[v]]
    for v in loops:
        _commit(g, v, "LOOP", trace)
    return len(loops)


def _complement_components(g: DiGraph, vs: list[int]):
    """Adjacency of the 'not joined by a bi-edge' relation on ``vs``."""
    return {x: [y for y in vs if y != x and not (g.has_arc(x, y) and g.has_arc(y, x))] for x in vs}


def diclique2_partition(g: DiGraph, v: int) -> tuple[set[int], set[int]] | None:
    """Split N(v) into dicliques N1, N2 with every bi-neighbour of v in N1.

    Two-clique partitions are 2-colourings of the complement, so this is
    exact rather than a search.
    """
    nbrs = sorted(g.neighbors(v) - {v})
    bis = g.bi_neighbors(v) - {v}
    comp = _complement_components(g, nbrs)
    colour: dict[int, int] = {}
    n1: set[int] = set()
    n2: set[int] = set()
    for root in nbrs:
        if root in colour:
            continue
        colour[root] = 0
        members = [root]
        stack = [root]
        while stack:
            x = stack.pop()
            for y in comp[x]:
                if y not in colour:
                    colour[y] = 1 - colour[x]
                    members.append(y)
                    stack.append(y)
                elif colour[y] == colour[x]:
                    return None
        bi_colours = {colour[x] for x in members if x in bis}
        if len(bi_colours) > 1:
            return None
        side = bi_colours.pop() if bi_colours else 0
        for x in members:
            (n1 if colour[x] == side else n2).add(x)
    return n1, n2


def diclique3_partition(g: DiGraph, v: int, node_limit: int = 5000) -> list[set[int]] | None:
    """Split N(v) into at most three dicliques by bounded backtracking."""
    nbrs = sorted(g.neighbors(v) - {v})
    comp = _complement_components(g, nbrs)
    order = sorted(nbrs, key=lambda x: (-len(comp[x]), x))
    colour: dict[int, int] = {}
    budget = [node_limit]

    def place(i):
        if i == len(order):
            return True
        budget[0] -= 1
        if budget[0] < 0:
            return False
        x = order[i]
        taken = {colour[y] for y in comp[x] if y in colour}
        used = max(colour.values(), default=-1)
        for c in range(min(3, used + 2)):
            if c not in taken:
                colour[x] = c
                if place(i + 1):
                    return True
                del colour[x]
        return False

    if not place(0):
        return None
    parts: list[set[int]] = [set(), set(), set()]
    for x, c in colour.items():
        parts[c].add(x)
    return parts


def _in0(g, v):
    return not g.pred[v]


def _out0(g, v):
    return not g.succ[v]


def _in1(g, v):
    return len(g.pred[v]) == 1


def _out1(g, v):
    return len(g.succ[v]) == 1


def _indiclique(g, v):
    return g.is_diclique(g.pred[v])


def _outdiclique(g, v):
    return g.is_diclique(g.succ[v])


def _core(g, v):
    return g.pred[v] == g.succ[v] and g.is_diclique(g.pred[v])


def _diclique2(g, v):
    return diclique2_partition(g, v) is not None


def _diclique3(g, v):
    return not (g.pred[v] & g.succ[v]) and diclique3_partition(g, v) is not None


# name -> (enabling flag, priority stage, predicate)
EXCLUSION_RULES = {
    "IN0": (Rule.IN01, 0, _in0),
    "OUT0": (Rule.OUT01, 0, _out0),
    "IN1": (Rule.IN01, 1, _in1),
    "OUT1": (Rule.OUT01, 1, _out1),
    "INDICLIQUE": (Rule.INDICLIQUE, 2, _indiclique),
    "OUTDICLIQUE": (Rule.OUTDICLIQUE, 2, _outdiclique),
    "CORE": (Rule.CORE, 2, _core),
    "DICLIQUE-2": (Rule.DICLIQUE2, 3, _diclique2),
    "DICLIQUE-3": (Rule.DICLIQUE3, 3, _diclique3),
}


def exclusion_applies(g: DiGraph, v: int, name: str) -> bool:
    """Does the named exclusion rule apply to ``v`` (which must be loop-free)?"""
    return not g.has_loop(v) and EXCLUSION_RULES[name][2](g, v)


def apply_exclusion(g: DiGraph, v: int, name: str, trace: ReductionTrace) -> None:
    if not exclusion_applies(g, v, name):
        raise RuleViolation(f"{name} does not apply to {v}")
    _exclude_logged(g, v, name, trace)


def try_exclusion_rules(
    g: DiGraph, trace: ReductionTrace, rules: Rule = Rule.DEFAULT, stage: int = 0
) -> int:
    """One sweep of the exclusion rules of a priority stage.

    Stages: 0 = IN0/OUT0, 1 = IN1/OUT1, 2 = IN/OUTDICLIQUE and CORE,
    3 = DICLIQUE-2/3.  Vertices carrying a self-loop are never excluded.
    """
    active = [
        (name, pred) for name, (flag, st, pred) in EXCLUSION_RULES.items() if st == stage and rules & flag
    ]
    fired = 0
    for v in sorted(g.succ):
        if v not in g or g.has_loop(v):
            continue
        for name, pred in active:
            if pred(g, v):
                _exclude_logged(g, v, name, trace)
                fired += 1
                break
    return fired


# -- arc deletions ----------------------------------------------------------


def _delete_arc(g: DiGraph, u: int, v: int, rule: str, trace: ReductionTrace) -> None:
    g.remove_arc(u, v)
    trace.arc_deleted(u, v, rule)
    trace.count(rule, 0, 1)


def try_pie(g: DiGraph, scc: SccLabeling, trace: ReductionTrace) -> int:
    """Delete non-bi arcs joining different bi-edge-free SCCs."""
    scc.refresh()
    lab = scc.label
    doomed = [
        (u, v)
        for u in sorted(g.succ)
        for v in sorted(g.succ[u])
        if u != v and u not in g.succ[v] and lab[u] != lab[v]
    ]
    for u, v in doomed:
        _delete_arc(g, u, v, "PIE", trace)
    return len(doomed)


def dome_applies(g: DiGraph, v: int, u: int) -> bool:
    """DOME test for the non-bi arc ``(v, u)``."""
    pv, sv = g.pred[v], g.succ[v]
    pu, su = g.pred[u], g.succ[u]
    if all(p in pu for p in pv if p not in sv):
        return True
    return all(q in sv for q in su if q not in pu)


def try_dome(g: DiGraph, trace: ReductionTrace) -> int:
    fired = 0
    for v in sorted(g.succ):
        for u in sorted(g.succ[v]):
            if u == v or v in g.succ[u] or u not in g.succ[v]:
                continue
            if dome_applies(g, v, u):
                _delete_arc(g, v, u, "DOME", trace)
                fired += 1
    return fired


def try_allcycles(g: DiGraph, all_cycles: CycleSet, trace: ReductionTrace) -> int:
    """Delete every arc that lies on no uncovered cycle."""
    if not all_cycles.complete:
        raise RuleViolation("ALLCYCLES needs the complete set of uncovered cycles")
    used = set()
    for cyc in all_cycles.cycles:
        k = len(cyc)
        for i, x in enumerate(cyc):
            used.add((x, cyc[(i + 1) % k]))
    doomed = [(u, v) for u in sorted(g.succ) for v in sorted(g.succ[u]) if (u, v) not in used]
    for u, v in doomed:
        _delete_arc(g, u, v, "ALLCYCLES", trace)
    return len(doomed)


# -- forced vertices --------------------------------------------------------


def subset_applies(g: DiGraph, v: int, u: int) -> bool:
    """SUBSET for the bi-edge v<->u: u may be taken into the solution."""
    pu, su = g.pred[u], g.succ[u]
    return all(p == u or p in pu for p in g.pred[v]) and all(s == u or s in su for s in g.succ[v])


def try_subset(g: DiGraph, trace: ReductionTrace) -> int:
    fired = 0
    for v in sorted(g.succ):
        if v not in g:
            continue
        for u in sorted(g.bi_neighbors(v)):
            if u == v or u not in g or v not in g:
                continue
            if g.is_bi(u, v) and subset_applies(g, v, u):
                _commit(g, u, "SUBSET", trace)
                fired += 1
    return fired


def _closes_cycle(g: DiGraph, inside: set[int], u: int) -> bool:
    """Is ``g[inside | {u}]`` cyclic, given ``g[inside]`` is not?"""
    if u in g.succ[u]:
        return True
    targets = g.pred[u] & inside
    if not targets:
        return False
    start = g.succ[u] & inside
    seen = set(start)
    stack = list(start)
    while stack:
        x = stack.pop()
        if x in targets:
            return True
        for y in g.succ[x]:
            if y in inside and y not in seen:
                seen.add(y)
                stack.append(y)
    return False


def check_unconfined(g: DiGraph, v: int) -> bool:
    """Decide whether some minimum DFVS contains ``v`` by the confinement argument.

    A grows from {v} with vertices that cannot be in a minimum solution if v
    is not; a directed child with no neighbours outside N_c(A) and A proves
    that v can be taken.
    """
    return unconfined_search(g, v)[0]


def unconfined_search(g: DiGraph, v: int) -> tuple[bool, int]:
    """``check_unconfined`` plus the number of times A was grown."""
    if g.has_loop(v):
        return True, 0
    inside = {v}
    grown = 0
    while True:
        frontier = set()
        for a in inside:
            frontier |= g.succ[a] | g.pred[a]
        frontier -= inside
        closing = {u for u in frontier if _closes_cycle(g, inside, u)}
        best = None
        best_rest: set[int] = set()
        for u in sorted(closing):
            links = len(g.succ[u] & inside) + len(g.pred[u] & inside)
            if links != 2:
                continue
            rest = (g.succ[u] | g.pred[u]) - closing - inside - {u}
            if best is None or len(rest) < len(best_rest):
                best, best_rest = u, rest
        if best is None:
            return False, grown
        if not best_rest:
            return True, grown
        if len(best_rest) == 1:
            # the lone outside neighbour joins A (not the child itself)
            inside.add(next(iter(best_rest)))
            grown += 1
            continue
        return False, grown


def try_unconfined(g: DiGraph, trace: ReductionTrace) -> int:
    fired = 0
    for v in sorted(g.succ):
        if v in g and check_unconfined(g, v):
            _commit(g, v, "UNCONFINED", trace)
            fired += 1
    return fired


# -- folding ----------------------------------------------------------------


def is_straight(g: DiGraph, d: int, c: int) -> bool:
    if not g.has_arc(d, c):
        raise RuleViolation(f"({d}, {c}) is not an arc")
    if g.has_arc(c, d):
        return False
    pd = g.pred[d]
    if all(x == c or x in pd for x in g.succ[d]):
        return True
    sc = g.succ[c]
    return all(x == d or x in sc for x in g.pred[c])


def manyfold_partition(g: DiGraph, scc: SccLabeling, v: int) -> ManyFoldPayload | None:
    """Find (C1, C2) for MANYFOLD at ``v`` using the SCC/straightness tests.

    C1 vertices have exactly one partner with a missing arc and both sides
    are dicliques, so the 'missing arc' graph on N(v) must be a disjoint
    union of stars (centre in C2) and isolated vertices (in C2).
    """
    if g.succ[v] != g.pred[v] or v in g.succ[v]:
        return None
    nbrs = sorted(g.succ[v])
    if len(nbrs) < 2:
        return None
    comp = _complement_components(g, nbrs)
    c1: list[int] = []
    c2: list[int] = []
    match: dict[int, int] = {}
    seen: set[int] = set()
    for root in nbrs:
        if root in seen:
            continue
        members = {root}
        stack = [root]
        while stack:
            x = stack.pop()
            for y in comp[x]:
                if y not in members:
                    members.add(y)
                    stack.append(y)
        seen |= members
        if len(members) == 1:
            c2.append(root)
            continue
        if len(members) == 2:
            x, y = sorted(members)
            c1.append(x)
            c2.append(y)
            match[x] = y
            continue
        centres = [x for x in members if len(comp[x]) == len(members) - 1]
        if len(centres) != 1 or any(len(comp[x]) != 1 for x in members if x != centres[0]):
            return None
        centre = centres[0]
        c2.append(centre)
        for x in sorted(members - {centre}):
            c1.append(x)
            match[x] = centre
    if not c1 or len(c1) < len(c2):
        return None
    lab = scc.label
    for x, y in match.items():
        fwd, bwd = g.has_arc(x, y), g.has_arc(y, x)
        if not fwd and not bwd:
            if lab[x] == lab[y]:
                return None
        elif not fwd:
            if not is_straight(g, y, x):
                return None
        elif not is_straight(g, x, y):
            return None
    return ManyFoldPayload(v, tuple(sorted(c1)), tuple(sorted(c2)), match)


def apply_manyfold(g: DiGraph, p: ManyFoldPayload) -> None:
    succ2 = {c: set(g.succ[c]) for c in p.c2}
    pred2 = {c: set(g.pred[c]) for c in p.c2}
    g.remove_vertex(p.center)
    for c in p.c2:
        g.remove_vertex(c)
    for c1 in p.c1:
        c2 = p.match[c1]
        for s in sorted(succ2[c2]):
            if s in g and s != c1:
                g.add_arc(c1, s)
        for q in sorted(pred2[c2]):
            if q in g and q != c1:
                g.add_arc(q, c1)


def try_manyfold(g: DiGraph, scc: SccLabeling, trace: ReductionTrace) -> int:
    """Apply MANYFOLD once.  The caller guarantees PIE is exhausted."""
    scc.refresh(exact=True)
    for v in sorted(g.succ):
        p = manyfold_partition(g, scc, v)
        if p is None:
            continue
        n0, m0 = len(g), g.arc_count
        apply_manyfold(g, p)
        trace.folded(EventKind.MANYFOLD, "MANYFOLD", p, offset=len(p.c2))
        trace.count("MANYFOLD", n0 - len(g), m0 - g.arc_count)
        return 1
    return 0


def four_path_match(g: DiGraph, scc: SccLabeling, v: int) -> FourPathPayload | None:
    if g.succ[v] != g.pred[v] or len(g.succ[v]) != 4 or v in g.succ[v]:
        return None
    nbrs = g.succ[v]
    inner = {x: g.succ[x] & nbrs for x in nbrs}
    if sum(len(s) for s in inner.values()) != 6:
        return None
    if any(g.pred[x] & nbrs != inner[x] for x in nbrs):
        return None
    ends = sorted(x for x in nbrs if len(inner[x]) == 1)
    if len(ends) != 2:
        return None
    a = ends[0]
    (b,) = inner[a]
    rest = inner[b] - {a}
    if len(rest) != 1:
        return None
    (c,) = rest
    rest = inner[c] - {b}
    if len(rest) != 1:
        return None
    (d,) = rest
    if d != ends[1]:
        return None
    lab = scc.label
    if lab[a] == lab[c] or lab[a] == lab[d] or lab[d] == lab[b]:
        return None
    return FourPathPayload(v, a, b, c, d)


def apply_4path(g: DiGraph, p: FourPathPayload) -> None:
    a, b, c, d = p.a, p.b, p.c, p.d
    sa, pa = g.succ[a] - {p.center}, g.pred[a] - {p.center}
    sd, pd = g.succ[d] - {p.center}, g.pred[d] - {p.center}
    g.remove_vertex(p.center)
    for x, y in ((a, c), (a, d), (b, d)):
        g.add_arc(x, y)
        g.add_arc(y, x)
    for x in (a, b):
        for s in sorted(sd):
            if s != x:
                g.add_arc(x, s)
        for q in sorted(pd):
            if q != x:
                g.add_arc(q, x)
    for x in (c, d):
        for s in sorted(sa):
            if s != x:
                g.add_arc(x, s)
        for q in sorted(pa):
            if q != x:
                g.add_arc(q, x)


def try_4path(g: DiGraph, scc: SccLabeling, trace: ReductionTrace) -> int:
    scc.refresh(exact=True)
    for v in sorted(g.succ):
        p = four_path_match(g, scc, v)
        if p is None:
            continue
        n0, m0 = len(g), g.arc_count
        apply_4path(g, p)
        trace.folded(EventKind.FOUR_PATH, "4PATH", p, offset=0)
        trace.count("4PATH", n0 - len(g), m0 - g.arc_count)
        return 1
    return 0


def _all_bi(g: DiGraph, v: int) -> bool:
    return g.succ[v] == g.pred[v] and v not in g.succ[v]


def three_empty_match(g: DiGraph, v: int) -> ThreeEmptyPayload | None:
    if not _all_bi(g, v) or len(g.succ[v]) != 3:
        return None
    a, b, c = sorted(g.succ[v])
    trio = {a, b, c}
    for x in trio:
        if not _all_bi(g, x) or g.succ[x] & trio:
            return None
    return ThreeEmptyPayload(v, a, b, c)


def apply_3empty(g: DiGraph, p: ThreeEmptyPayload) -> None:
    a, b, c = p.a, p.b, p.c
    nb = {x: set(g.succ[x]) - {p.center} for x in (a, b, c)}
    g.remove_vertex(p.center)
    pairs = [(a, b), (b, c)]
    pairs += [(a, y) for y in nb[b]] + [(b, y) for y in nb[c]] + [(c, y) for y in nb[a]]
    for x, y in pairs:
        if x != y:
            g.add_arc(x, y)
            g.add_arc(y, x)


def try_3empty(g: DiGraph, trace: ReductionTrace) -> int:
    """Degree-three rule on all-bi-edge neighbourhoods; the DFVS size is unchanged."""
    for v in sorted(g.succ):
        p = three_empty_match(g, v)
        if p is None:
            continue
        n0, m0 = len(g), g.arc_count
        apply_3empty(g, p)
        trace.folded(EventKind.THREE_EMPTY, "3EMPTY", p, offset=0)
        trace.count("3EMPTY", n0 - len(g), m0 - g.arc_count)
        return 1
    return 0
