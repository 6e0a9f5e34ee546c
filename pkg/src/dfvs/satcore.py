"""A compact CDCL SAT solver with a hook for lazily generated clauses.

Literals are DIMACS-style signed integers.  The search loop is the usual
one (unit propagation, conflict analysis, backjump) with one extra step:
whenever propagation reaches a fixpoint, the attached propagator sees the
literals assigned since it was last called and may hand back a clause,
which is added as a permanent constraint before anything is decided.
"""

from __future__ import annotations

import heapq
import random
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from typing import Protocol


class Propagator(Protocol):
    def propagate(self, new_lits: Sequence[int]) -> Sequence[int] | None: ...

    def backtrack(self, variables: Sequence[int]) -> None: ...


class _Clause:
    __slots__ = ("lits", "learnt", "activity", "deleted")

    def __init__(self, lits: list[int], learnt: bool):
        self.lits = lits
        self.learnt = learnt
        self.activity = 0.0
        self.deleted = False

    def __repr__(self) -> str:
        return f"_Clause({self.lits}{', learnt' if self.learnt else ''})"


@dataclass
class SolveResult:
    sat: bool
    model: list[bool] | None = None  # index 0 unused
    core: list[int] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.sat

    def true_vars(self) -> list[int]:
        return [v for v in range(1, len(self.model)) if self.model[v]] if self.model else []


@dataclass
class SatStats:
    decisions: int = 0
    propagations: int = 0
    conflicts: int = 0
    restarts: int = 0
    learnt: int = 0
    injected: int = 0
    reductions: int = 0


def normalize_clause(lits: Iterable[int]) -> list[int] | None:
    """Deduplicate; ``None`` for a tautology."""
    out: list[int] = []
    seen: set[int] = set()
    for lit in lits:
        if lit == 0:
            raise ValueError("literal 0 is not allowed")
        if -lit in seen:
            return None
        if lit not in seen:
            seen.add(lit)
            out.append(lit)
    return out


class SatSolver:
    RESTART_FIRST = 100
    RESTART_GROWTH = 1.5
    VAR_DECAY = 0.95
    CLAUSE_DECAY = 0.999

    def __init__(self, n_vars: int = 0, seed: int = 0, log_learnts: bool = False):
        self.ok = True
        self.stats = SatStats()
        self._rng = random.Random(seed)
        self._val: list[int] = [0]
        self._level: list[int] = [0]
        self._reason: list[_Clause | None] = [None]
        self._activity: list[float] = [0.0]
        self._phase: list[bool] = [False]
        self._pref: list[bool | None] = [None]
        self._seen: list[bool] = [False]
        self._watches: list[list[_Clause]] = [[], []]
        self._heap: list[tuple[float, int]] = []
        self._var_inc = 1.0
        self._cla_inc = 1.0
        self.trail: list[int] = []
        self._trail_lim: list[int] = []
        self._qhead = 0
        self._notified = 0
        self.clauses: list[_Clause] = []
        self.learnts: list[_Clause] = []
        self._max_learnts = 2000.0
        self._pending_conflict: _Clause | None = None
        self.propagator: Propagator | None = None
        self.learnt_log: list[tuple[int, ...]] | None = [] if log_learnts else None
        self.ensure_vars(n_vars)

    # -- variables --------------------------------------------------------

    @property
    def n_vars(self) -> int:
        return len(self._val) - 1

    def new_var(self) -> int:
        v = len(self._val)
        self._val.append(0)
        self._level.append(0)
        self._reason.append(None)
        # tiny seeded jitter so the seed decides ties among fresh variables
        self._activity.append(self._rng.random() * 1e-6)
        self._phase.append(False)
        self._pref.append(None)
        self._seen.append(False)
        self._watches.append([])
        self._watches.append([])
        heapq.heappush(self._heap, (-self._activity[v], v))
        return v

    def ensure_vars(self, n: int) -> None:
        while self.n_vars < n:
            self.new_var()

    def set_phase_preference(self, var: int, value: bool | None) -> None:
        """Decide ``var`` as ``value`` whenever the heuristic picks it (None clears)."""
        self.ensure_vars(var)
        self._pref[var] = value

    def attach_propagator(self, prop: Propagator | None) -> None:
        self.propagator = prop
        self._notified = 0

    # -- assignment helpers -----------------------------------------------

    @staticmethod
    def _idx(lit: int) -> int:
        return 2 * lit if lit > 0 else -2 * lit + 1

    def value(self, lit: int) -> bool | None:
        v = self._val[abs(lit)]
        if v == 0:
            return None
        return (v > 0) == (lit > 0)

    def level_of(self, var: int) -> int:
        return self._level[var]

    @property
    def decision_level(self) -> int:
        return len(self._trail_lim)

    def _enqueue(self, lit: int, reason: _Clause | None) -> None:
        v = abs(lit)
        self._val[v] = 1 if lit > 0 else -1
        self._level[v] = len(self._trail_lim)
        self._reason[v] = reason
        self.trail.append(lit)

    def new_decision_level(self) -> None:
        self._trail_lim.append(len(self.trail))

    def assume(self, lit: int) -> None:
        """Open a decision level and assign ``lit`` (no propagation)."""
        self.ensure_vars(abs(lit))
        if self.value(lit) is not None:
            raise ValueError(f"literal {lit} already assigned")
        self.new_decision_level()
        self._enqueue(lit, None)

    def cancel_until(self, level: int) -> None:
        if len(self._trail_lim) <= level:
            return
        start = self._trail_lim[level]
        undone = []
        for i in range(len(self.trail) - 1, start - 1, -1):
            lit = self.trail[i]
            v = abs(lit)
            self._phase[v] = lit > 0
            self._val[v] = 0
            self._reason[v] = None
            heapq.heappush(self._heap, (-self._activity[v], v))
            undone.append(v)
        del self.trail[start:]
        del self._trail_lim[level:]
        self._qhead = min(self._qhead, start)
        self._pending_conflict = None
        if self.propagator is not None and undone:
            self.propagator.backtrack(undone)
        self._notified = min(self._notified, start)

    # -- clauses ----------------------------------------------------------

    def _watch(self, c: _Clause) -> None:
        self._watches[self._idx(c.lits[0])].append(c)
        self._watches[self._idx(c.lits[1])].append(c)

    def add_clause(self, lits: Iterable[int]) -> bool:
        """Add a problem clause.  Returns False once the instance is known UNSAT.

        Outside of search this backtracks to level 0 first, so level-0
        simplification is always sound.
        """
        norm = normalize_clause(lits)
        if norm is None or not self.ok:
            return self.ok
        for lit in norm:
            self.ensure_vars(abs(lit))
        self.cancel_until(0)
        live = []
        for lit in norm:
            val = self.value(lit)
            if val is True:
                return True
            if val is None:
                live.append(lit)
        if not live:
            self.ok = False
            return False
        if len(live) == 1:
            self._enqueue(live[0], None)
            if self._bcp() is not None:
                self.ok = False
            return self.ok
        c = _Clause(live, learnt=False)
        self.clauses.append(c)
        self._watch(c)
        return True

    def _inject(self, lits: Sequence[int]) -> None:
        """Add a clause mid-search and restore the watch invariant."""
        self.stats.injected += 1
        norm = normalize_clause(lits)
        if norm is None:
            return
        for lit in norm:
            self.ensure_vars(abs(lit))
        if not norm:
            self.ok = False
            return

        def rank(lit):
            val = self.value(lit)
            if val is None:
                return (1, 0)
            if val:
                return (2, -self._level[abs(lit)])
            return (0, self._level[abs(lit)])

        norm.sort(key=rank, reverse=True)
        first = norm[0]
        if len(norm) == 1:
            if self.value(first) is False and self._level[abs(first)] == 0:
                self.ok = False
                return
            self.cancel_until(0)
            if self.value(first) is None:
                self._enqueue(first, None)
            return
        c = _Clause(norm, learnt=False)
        self.clauses.append(c)
        v0, v1 = self.value(norm[0]), self.value(norm[1])
        if v0 is not False:
            self._watch(c)
            if v0 is None and v1 is False:
                # unit under the current trail
                self._enqueue(norm[0], c)
            return
        l0, l1 = self._level[abs(norm[0])], self._level[abs(norm[1])]
        if l0 == 0:
            self.ok = False
            return
        self._watch(c)
        if l1 < l0:
            self.cancel_until(l1)
            self._enqueue(norm[0], c)
        else:
            self.cancel_until(l0)
            self._pending_conflict = c

    def _bcp(self) -> _Clause | None:
        val = self._val
        watches = self._watches
        trail = self.trail
        while self._qhead < len(trail):
            p = trail[self._qhead]
            self._qhead += 1
            self.stats.propagations += 1
            false_lit = -p
            wi = 2 * false_lit if false_lit > 0 else -2 * false_lit + 1
            ws = watches[wi]
            kept: list[_Clause] = []
            i = 0
            n = len(ws)
            while i < n:
                c = ws[i]
                i += 1
                if c.deleted:
                    continue
                lits = c.lits
                if lits[0] == false_lit:
                    lits[0], lits[1] = lits[1], false_lit
                first = lits[0]
                fv = val[first] if first > 0 else -val[-first]
                if fv == 1:
                    kept.append(c)
                    continue
                for k in range(2, len(lits)):
                    lk = lits[k]
                    if (val[lk] if lk > 0 else -val[-lk]) != -1:
                        lits[1], lits[k] = lk, false_lit
                        watches[2 * lk if lk > 0 else -2 * lk + 1].append(c)
                        break
                else:
                    kept.append(c)
                    if fv == -1:
                        kept.extend(ws[i:])
                        watches[wi] = kept
                        self._qhead = len(trail)
                        return c
                    self._enqueue(first, c)
            watches[wi] = kept
        return None

    def propagate(self) -> list[int] | None:
        """Unit propagation to fixpoint; the falsified clause on conflict."""
        c = self._bcp()
        return None if c is None else list(c.lits)

    # -- conflict analysis ------------------------------------------------

    def _bump_var(self, v: int) -> None:
        self._activity[v] += self._var_inc
        if self._activity[v] > 1e100:
            for i in range(1, len(self._activity)):
                self._activity[i] *= 1e-100
            self._var_inc *= 1e-100
            self._heap = [(-self._activity[u], u) for u in range(1, len(self._val)) if self._val[u] == 0]
            heapq.heapify(self._heap)
        elif self._val[v] == 0:
            heapq.heappush(self._heap, (-self._activity[v], v))

    def _bump_clause(self, c: _Clause) -> None:
        c.activity += self._cla_inc
        if c.activity > 1e20:
            for lc in self.learnts:
                lc.activity *= 1e-20
            self._cla_inc *= 1e-20

    def _analyze(self, confl: _Clause) -> tuple[list[int], int]:
        seen = self._seen
        level = self._level
        cur = len(self._trail_lim)
        learnt = [0]
        counter = 0
        p = 0
        idx = len(self.trail) - 1
        touched = []
        c: _Clause | None = confl
        while True:
            assert c is not None
            if c.learnt:
                self._bump_clause(c)
            for q in c.lits:
                v = abs(q)
                if v == abs(p) or seen[v] or level[v] == 0:
                    continue
                seen[v] = True
                touched.append(v)
                self._bump_var(v)
                if level[v] >= cur:
                    counter += 1
                else:
                    learnt.append(q)
            while not seen[abs(self.trail[idx])]:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            c = self._reason[abs(p)]
            counter -= 1
            if counter == 0:
                break
        learnt[0] = -p
        # drop literals whose reason is subsumed by the rest of the clause
        in_clause = {abs(q) for q in learnt}
        kept = [learnt[0]]
        for q in learnt[1:]:
            r = self._reason[abs(q)]
            if r is None or any(abs(x) not in in_clause and level[abs(x)] > 0 for x in r.lits if abs(x) != abs(q)):
                kept.append(q)
        for v in touched:
            seen[v] = False
        if len(kept) == 1:
            return kept, 0
        best = max(range(1, len(kept)), key=lambda i: level[abs(kept[i])])
        kept[1], kept[best] = kept[best], kept[1]
        return kept, level[abs(kept[1])]

    def _analyze_final(self, p: int) -> list[int]:
        """Assumptions responsible for ``p`` being false (``p`` included)."""
        core = [p]
        if not self._trail_lim:
            return core
        seen = {abs(p)}
        for i in range(len(self.trail) - 1, self._trail_lim[0] - 1, -1):
            lit = self.trail[i]
            v = abs(lit)
            if v not in seen:
                continue
            r = self._reason[v]
            if r is None:
                if self._level[v] > 0 and v != abs(p):
                    core.append(lit)
            else:
                for q in r.lits:
                    if self._level[abs(q)] > 0:
                        seen.add(abs(q))
        return core

    # -- learnt database --------------------------------------------------

    def _locked(self, c: _Clause) -> bool:
        v = abs(c.lits[0])
        return self._reason[v] is c and self._val[v] != 0

    def _reduce_db(self) -> None:
        self.stats.reductions += 1
        self.learnts.sort(key=lambda c: (len(c.lits) <= 2, c.activity))
        half = len(self.learnts) // 2
        keep = []
        for i, c in enumerate(self.learnts):
            if i < half and len(c.lits) > 2 and not self._locked(c):
                c.deleted = True
            else:
                keep.append(c)
        self.learnts = keep

    # -- search -----------------------------------------------------------

    def _pick_branch(self) -> int:
        heap = self._heap
        val = self._val
        while heap:
            _, v = heapq.heappop(heap)
            if val[v] == 0:
                return v
        return 0

    def solve(self, assumptions: Sequence[int] = ()) -> SolveResult:
        assumptions = list(assumptions)
        for a in assumptions:
            self.ensure_vars(abs(a))
        if not self.ok:
            return SolveResult(False)
        self.cancel_until(0)
        restart_limit = float(self.RESTART_FIRST)
        conflicts_here = 0
        while True:
            confl = self._pending_conflict
            self._pending_conflict = None
            if confl is None:
                confl = self._bcp()
            if confl is not None:
                self.stats.conflicts += 1
                conflicts_here += 1
                if not self._trail_lim:
                    self.ok = False
                    return SolveResult(False)
                learnt, bt = self._analyze(confl)
                self.cancel_until(bt)
                if self.learnt_log is not None:
                    self.learnt_log.append(tuple(learnt))
                self.stats.learnt += 1
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    c = _Clause(learnt, learnt=True)
                    self._bump_clause(c)
                    self.learnts.append(c)
                    self._watch(c)
                    self._enqueue(learnt[0], c)
                self._var_inc /= self.VAR_DECAY
                self._cla_inc /= self.CLAUSE_DECAY
                continue
            if self.propagator is not None:
                # called even with an empty batch: it may still hold pending work
                fresh = self.trail[self._notified :]
                self._notified = len(self.trail)
                clause = self.propagator.propagate(fresh)
                if clause is not None:
                    self._inject(clause)
                    if not self.ok:
                        return SolveResult(False)
                    continue
            if conflicts_here >= restart_limit:
                self.stats.restarts += 1
                conflicts_here = 0
                restart_limit *= self.RESTART_GROWTH
                self.cancel_until(0)
                continue
            if len(self.learnts) - len(self.trail) >= self._max_learnts:
                self._reduce_db()
                self._max_learnts *= 1.1
            lvl = len(self._trail_lim)
            if lvl < len(assumptions):
                p = assumptions[lvl]
                val = self.value(p)
                if val is True:
                    self.new_decision_level()
                    continue
                if val is False:
                    core = self._analyze_final(p)
                    self.cancel_until(0)
                    return SolveResult(False, core=core)
                self.new_decision_level()
                self._enqueue(p, None)
                continue
            v = self._pick_branch()
            if v == 0:
                model = [False] + [x > 0 for x in self._val[1:]]
                self.cancel_until(0)
                return SolveResult(True, model=model)
            self.stats.decisions += 1
            pref = self._pref[v]
            sign = pref if pref is not None else self._phase[v]
            self.new_decision_level()
            self._enqueue(v if sign else -v, None)

    def clause_database(self, learnt: bool = False) -> list[list[int]]:
        src = self.learnts if learnt else self.clauses
        return [list(c.lits) for c in src if not c.deleted]


# -- DIMACS -------------------------------------------------------------


def read_dimacs(text: str) -> tuple[int, list[list[int]]]:
    n_vars = 0
    clauses: list[list[int]] = []
    cur: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"line {lineno}: bad header {line!r}")
            n_vars = int(parts[2])
            continue
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ValueError(f"line {lineno}: bad literal {tok!r}") from None
            if lit == 0:
                clauses.append(cur)
                cur = []
            else:
                n_vars = max(n_vars, abs(lit))
                cur.append(lit)
    if cur:
        clauses.append(cur)
    return n_vars, clauses


def write_dimacs(n_vars: int, clauses: Sequence[Sequence[int]]) -> str:
    lines = [f"p cnf {n_vars} {len(clauses)}"]
    lines += [" ".join(map(str, c)) + " 0" for c in clauses]
    return "\n".join(lines) + "\n"
