"""End-to-end pipeline: reduce, collect cycles, minimize, lift back, validate."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Literal

from .acyclic_prop import CyclePropagator
from .cycles import DEFAULT_NODE_BUDGET, CycleSet, find_short_cycles
from .digraph import DiGraph, find_cycle
from .maxsat import MaxSatInstance, minimize
from .reductions import ReductionTrace, Rule, reconstruct, reduce, reduce_with_all_cycles, try_loop


class SolverError(RuntimeError):
    """The pipeline produced something that is not a valid DFVS."""


@dataclass
class SolveConfig:
    max_cycle_len: int = 4
    max_cycles: int = 25000
    mode: Literal["propagate", "cegar"] = "propagate"
    rules: Rule = Rule.DEFAULT
    node_budget: int = DEFAULT_NODE_BUDGET
    seed: int = 0
    # False starts the SAT search with no cycle clauses at all
    seed_cycles: bool = True
    # set to collect every SAT model's false set (kernel ids) for feasibility checks
    record_models: bool = False

    def __post_init__(self):
        if self.mode not in ("propagate", "cegar"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.max_cycle_len < 2 or self.max_cycles < 1:
            raise ValueError("max_cycle_len must be >= 2 and max_cycles >= 1")


@dataclass
class SolveReport:
    solution: set[int]
    optimum: int
    timings: dict[str, float] = field(default_factory=dict)
    reduction_stats: dict[str, dict[str, int]] = field(default_factory=dict)
    kernel_vertices: int = 0
    kernel_arcs: int = 0
    forced: int = 0
    offset: int = 0
    short_cycles: int = 0
    cycles_complete: bool = False
    sat: dict[str, int] = field(default_factory=dict)
    cegar_iterations: int = 0
    models: list[set[int]] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "optimum": self.optimum,
            "solution": sorted(self.solution),
            "kernel_vertices": self.kernel_vertices,
            "kernel_arcs": self.kernel_arcs,
            "forced": self.forced,
            "offset": self.offset,
            "short_cycles": self.short_cycles,
            "cycles_complete": self.cycles_complete,
            "cegar_iterations": self.cegar_iterations,
            "timings": {k: round(v, 6) for k, v in self.timings.items()},
            "sat": dict(self.sat),
            "reductions": self.reduction_stats,
        }


def validate(g: DiGraph, candidate) -> bool:
    """True iff every vertex exists and ``g - candidate`` is acyclic."""
    cand = set(candidate)
    if not cand <= g.succ.keys():
        return False
    rest = [v for v in g.succ if v not in cand]
    return find_cycle(g, rest) is None


def _relabel(kernel: DiGraph) -> tuple[DiGraph, dict[int, int], list[int]]:
    """Copy of ``kernel`` on vertices 1..k (SAT variables), plus both maps."""
    back = [0] + sorted(kernel.succ)
    fwd = {v: i for i, v in enumerate(back) if i}
    h = DiGraph(range(1, len(back)))
    for u in kernel.succ:
        for w in kernel.succ[u]:
            h.add_arc(fwd[u], fwd[w])
    return h, fwd, back


def _harvest_disjoint_cycles(g: DiGraph, removed: set[int]) -> list[list[int]]:
    alive = set(g.succ) - removed
    found = []
    while True:
        cyc = find_cycle(g, alive)
        if cyc is None:
            return found
        found.append(cyc)
        alive -= set(cyc)


def _solve_kernel_propagate(
    h: DiGraph, cycles: list[list[int]], config: SolveConfig, report: SolveReport
) -> set[int]:
    vs = sorted(h.succ)
    prop = CyclePropagator(h)
    inst = MaxSatInstance(vs, [list(c) for c in cycles], propagator=prop)

    def check(model):
        kept = {v for v in vs if not model[v]}
        if config.record_models:
            report.models.append(kept)
        if find_cycle(h, kept) is not None:
            raise SolverError("propagate mode produced a model whose kept vertices form a cycle")

    res = minimize(inst, seed=config.seed, on_model=check)
    st = res.solver.stats
    report.sat = {
        "decisions": st.decisions,
        "conflicts": st.conflicts,
        "propagations": st.propagations,
        "restarts": st.restarts,
        "learnt": st.learnt,
        "injections": st.injected,
        "descent_steps": len(res.steps),
    }
    return set(res.true_vars)


def _solve_kernel_cegar(
    h: DiGraph, cycles: list[list[int]], config: SolveConfig, report: SolveReport
) -> set[int]:
    vs = sorted(h.succ)
    hard = [list(c) for c in cycles]
    totals = {"decisions": 0, "conflicts": 0, "propagations": 0, "learnt": 0}
    while True:
        report.cegar_iterations += 1
        res = minimize(MaxSatInstance(vs, hard), seed=config.seed)
        st = res.solver.stats
        for k in totals:
            totals[k] += getattr(st, k)
        chosen = set(res.true_vars)
        if config.record_models:
            report.models.append(set(vs) - chosen)
        new = _harvest_disjoint_cycles(h, chosen)
        if not new:
            report.sat = dict(totals, cegar_clauses=len(hard))
            return chosen
        hard.extend(new)


def solve_dfvs(g: DiGraph, config: SolveConfig | None = None) -> SolveReport:
    """Minimum directed feedback vertex set of ``g``."""
    config = config or SolveConfig()
    report = SolveReport(set(), 0)
    t0 = time.perf_counter()
    # LOOP is mandatory: the SAT encoding cannot express a self-loop otherwise
    kernel, trace = reduce(g, config.rules | Rule.LOOP)
    t1 = time.perf_counter()
    report.timings["reduce"] = t1 - t0

    short = find_short_cycles(kernel, config.max_cycle_len, config.max_cycles)
    report.short_cycles = len(short)
    report.cycles_complete = short.complete
    cycles = short
    if short.complete and config.rules & Rule.ALLCYCLES:
        kernel, cycles, trace = reduce_with_all_cycles(
            kernel, short, config.rules | Rule.LOOP, trace, node_budget=config.node_budget
        )
        if not cycles.complete:
            cycles = find_short_cycles(kernel, config.max_cycle_len, config.max_cycles)
    t2 = time.perf_counter()
    report.timings["cycles"] = t2 - t1

    report.kernel_vertices = len(kernel)
    report.kernel_arcs = kernel.arc_count
    kernel_solution = _solve_kernel(kernel, cycles, config, report)
    t3 = time.perf_counter()
    report.timings["maxsat"] = t3 - t2

    solution = reconstruct(trace, kernel_solution)
    report.solution = solution
    report.optimum = len(solution)
    report.forced = len(trace.forced)
    report.offset = trace.offset
    report.reduction_stats = trace.stats_dict()
    if not validate(g, solution):
        raise SolverError("reconstructed set is not a feedback vertex set of the input")
    expected = len(kernel_solution) + len(trace.forced) + trace.offset
    if len(solution) != expected:
        raise SolverError(f"reconstruction size {len(solution)} != {expected}")
    report.timings["total"] = time.perf_counter() - t0
    return report


def _solve_kernel(kernel: DiGraph, cycles: CycleSet, config: SolveConfig, report: SolveReport) -> set[int]:
    if not kernel.succ:
        return set()
    h, fwd, back = _relabel(kernel)
    clauses = [[fwd[v] for v in c] for c in cycles.cycles] if config.seed_cycles else []
    start = len(report.models)
    if config.mode == "cegar":
        chosen = _solve_kernel_cegar(h, clauses, config, report)
    else:
        chosen = _solve_kernel_propagate(h, clauses, config, report)
    # recorded models speak kernel ids, not SAT variables
    report.models[start:] = [{back[i] for i in kept} for kept in report.models[start:]]
    return {back[i] for i in chosen}


def cegar_solve(
    g: DiGraph, cycles: CycleSet | list[list[int]] | None = None, config: SolveConfig | None = None
) -> SolveReport:
    """CEGAR loop straight on ``g`` (no reductions), seeded with ``cycles``."""
    config = config or SolveConfig(mode="cegar")
    report = SolveReport(set(), 0)
    t0 = time.perf_counter()
    trace = ReductionTrace()
    kernel = g.copy()
    try_loop(kernel, trace)
    seeds = cycles.cycles if isinstance(cycles, CycleSet) else (cycles or [])
    seeds = [c for c in seeds if all(v in kernel for v in c)]
    if kernel.succ:
        h, fwd, back = _relabel(kernel)
        chosen = _solve_kernel_cegar(h, [[fwd[v] for v in c] for c in seeds], config, report)
        report.models = [{back[i] for i in kept} for kept in report.models]
        kernel_solution = {back[i] for i in chosen}
    else:
        kernel_solution = set()
    solution = reconstruct(trace, kernel_solution)
    if not validate(g, solution):
        raise SolverError("CEGAR produced an infeasible set")
    report.solution = solution
    report.optimum = len(solution)
    report.forced = len(trace.forced)
    report.timings["total"] = time.perf_counter() - t0
    return report
