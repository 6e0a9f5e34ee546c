"""Reduction log and the replay that lifts kernel solutions back to the input."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class ReconstructionError(RuntimeError):
    """A kernel solution violates a fold's invariant (it was not minimum)."""


class EventKind(Enum):
    LOOP = "loop"
    EXCLUDE = "exclude"
    ARC_DELETE = "arc_delete"
    COMMIT_VERTEX = "commit_vertex"
    MANYFOLD = "manyfold"
    FOUR_PATH = "four_path"
    THREE_EMPTY = "three_empty"


@dataclass(frozen=True)
class ManyFoldPayload:
    center: int
    c1: tuple[int, ...]
    c2: tuple[int, ...]
    # c1 vertex -> its unique partner in c2 with a missing arc
    match: dict[int, int]


@dataclass(frozen=True)
class FourPathPayload:
    center: int
    a: int
    b: int
    c: int
    d: int


@dataclass(frozen=True)
class ThreeEmptyPayload:
    center: int
    a: int
    b: int
    c: int


@dataclass
class ReductionEvent:
    kind: EventKind
    rule: str
    vertices: tuple[int, ...] = ()
    arcs: tuple[tuple[int, int], ...] = ()
    payload: ManyFoldPayload | FourPathPayload | ThreeEmptyPayload | None = None


@dataclass
class RuleStats:
    fired: int = 0
    vertices_removed: int = 0
    arcs_removed: int = 0

    def as_dict(self) -> dict[str, int]:
        return {
            "fired": self.fired,
            "vertices_removed": self.vertices_removed,
            "arcs_removed": self.arcs_removed,
        }


@dataclass
class ReductionTrace:
    events: list[ReductionEvent] = field(default_factory=list)
    forced: set[int] = field(default_factory=set)
    offset: int = 0
    stats: dict[str, RuleStats] = field(default_factory=dict)

    def commit(self, v: int, rule: str) -> None:
        kind = EventKind.LOOP if rule == "LOOP" else EventKind.COMMIT_VERTEX
        self.events.append(ReductionEvent(kind, rule, vertices=(v,)))
        self.forced.add(v)

    def excluded(self, v: int, rule: str, added: list[tuple[int, int]]) -> None:
        self.events.append(ReductionEvent(EventKind.EXCLUDE, rule, vertices=(v,), arcs=tuple(added)))

    def arc_deleted(self, u: int, v: int, rule: str) -> None:
        self.events.append(ReductionEvent(EventKind.ARC_DELETE, rule, arcs=((u, v),)))

    def folded(self, kind: EventKind, rule: str, payload, offset: int) -> None:
        self.events.append(ReductionEvent(kind, rule, payload=payload))
        self.offset += offset

    def count(self, rule: str, dn: int, dm: int, fired: int = 1) -> None:
        st = self.stats.setdefault(rule, RuleStats())
        st.fired += fired
        st.vertices_removed += dn
        st.arcs_removed += dm

    def stats_dict(self) -> dict[str, dict[str, int]]:
        return {k: v.as_dict() for k, v in sorted(self.stats.items())}


def reconstruct_manyfold(p: ManyFoldPayload, solution: set[int]) -> set[int]:
    outside = [c for c in p.c1 if c not in solution]
    if not outside:
        return solution | set(p.c2)
    if len(outside) > 1:
        raise ReconstructionError(
            f"manyfold at {p.center}: {len(outside)} vertices of C1 outside the solution"
        )
    partner = p.match[outside[0]]
    return solution | (set(p.c2) - {partner}) | {p.center}


def reconstruct_4path(p: FourPathPayload, solution: set[int]) -> set[int]:
    missing = [x for x in (p.a, p.b, p.c, p.d) if x not in solution]
    if not missing:
        return set(solution)
    if len(missing) > 1:
        raise ReconstructionError(f"4path at {p.center}: {len(missing)} path vertices missing")
    drop = p.a if missing[0] in (p.c, p.d) else p.d
    return (solution - {drop}) | {p.center}


def reconstruct_3empty(p: ThreeEmptyPayload, solution: set[int]) -> set[int]:
    missing = frozenset(x for x in (p.a, p.b, p.c) if x not in solution)
    if not missing:
        return set(solution)
    drop = {
        frozenset({p.c}): p.a,
        frozenset({p.a}): p.b,
        frozenset({p.b}): p.c,
        frozenset({p.a, p.c}): p.b,
    }.get(missing)
    if drop is None:
        raise ReconstructionError(f"3empty at {p.center}: kernel solution misses {sorted(missing)}")
    return (solution - {drop}) | {p.center}


def reconstruct(trace: ReductionTrace, kernel_solution) -> set[int]:
    """Replay ``trace`` newest-first over a minimum solution of the kernel."""
    sol = set(kernel_solution)
    for ev in reversed(trace.events):
        k = ev.kind
        if k is EventKind.LOOP or k is EventKind.COMMIT_VERTEX:
            sol.update(ev.vertices)
        elif k is EventKind.MANYFOLD:
            sol = reconstruct_manyfold(ev.payload, sol)
        elif k is EventKind.FOUR_PATH:
            sol = reconstruct_4path(ev.payload, sol)
        elif k is EventKind.THREE_EMPTY:
            sol = reconstruct_3empty(ev.payload, sol)
    return sol
