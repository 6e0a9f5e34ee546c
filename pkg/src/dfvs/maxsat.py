"""Unweighted MaxSAT by linear SAT-UNSAT descent.

Every counted variable carries a soft clause ``{-v}``; the goal is a model
of the hard clauses with as few counted variables true as possible.  After
each model with ``t`` true variables the bound is tightened to ``t - 1``
through an assumption on a totalizer output, so learnt clauses survive
from one step to the next.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field

from .satcore import Propagator, SatSolver


class MaxSatError(RuntimeError):
    pass


@dataclass
class CardinalityLayer:
    """Totalizer over ``inputs``: ``outputs[j]`` is implied once more than ``j`` inputs are true.

    Only the "at least" direction is encoded, which is all an upper bound
    needs: assuming ``-outputs[k]`` allows at most ``k`` true inputs.
    Counts beyond ``cap`` are not represented.
    """

    inputs: list[int]
    outputs: list[int]
    cap: int
    clauses: list[list[int]] = field(default_factory=list)

    def bound_assumption(self, k: int) -> list[int]:
        if k < 0:
            raise MaxSatError("cardinality bound below zero")
        if k >= len(self.outputs):
            return []
        return [-self.outputs[k]]


def build_cardinality(solver: SatSolver, inputs: Sequence[int], cap: int) -> CardinalityLayer:
    """Totalizer tree over ``inputs`` whose outputs stop at ``cap + 1`` (enough for bounds <= cap)."""
    if cap < 0:
        raise ValueError("cap must be non-negative")
    width = cap + 1
    clauses: list[list[int]] = []

    def fresh() -> int:
        return solver.new_var()

    def merge(left: list[int], right: list[int]) -> list[int]:
        size = min(len(left) + len(right), width)
        out = [fresh() for _ in range(size)]
        # left has >= i, right has >= j  =>  out has >= i + j
        for i in range(len(left) + 1):
            for j in range(len(right) + 1):
                if i + j == 0 or i + j > size:
                    continue
                clause = [out[i + j - 1]]
                if i:
                    clause.append(-left[i - 1])
                if j:
                    clause.append(-right[j - 1])
                clauses.append(clause)
        return out

    def build(lo: int, hi: int) -> list[int]:
        if hi - lo == 1:
            return [inputs[lo]]
        mid = (lo + hi) // 2
        return merge(build(lo, mid), build(mid, hi))

    outputs = build(0, len(inputs)) if inputs else []
    outputs = outputs[:width]
    for c in clauses:
        solver.add_clause(c)
    return CardinalityLayer(list(inputs), outputs, cap, clauses)


@dataclass
class MaxSatInstance:
    vars: list[int]
    hard: list[list[int]] = field(default_factory=list)
    soft_vars: list[int] | None = None
    propagator: Propagator | None = None

    def __post_init__(self):
        if self.soft_vars is None:
            self.soft_vars = list(self.vars)
        known = set(self.vars)
        if not set(self.soft_vars) <= known:
            raise ValueError("soft variables must be instance variables")
        for c in self.hard:
            if any(abs(lit) not in known for lit in c):
                raise ValueError(f"hard clause {c} mentions unknown variables")


@dataclass
class MaxSatResult:
    optimum: int
    model: list[bool]
    true_vars: list[int]
    steps: list[int]  # true-count of each model found, in order
    solver: SatSolver


def minimize(
    inst: MaxSatInstance,
    seed: int = 0,
    solver: SatSolver | None = None,
    on_model: Callable[[list[bool]], None] | None = None,
) -> MaxSatResult:
    """Return a model minimizing the number of true soft variables.

    ``on_model`` sees every intermediate model of the descent.
    """
    s = solver if solver is not None else SatSolver(seed=seed)
    s.ensure_vars(max(inst.vars, default=0))
    for v in inst.soft_vars:
        s.set_phase_preference(v, False)
    for c in inst.hard:
        if not s.add_clause(c):
            raise MaxSatError("hard clauses are unsatisfiable")
    if inst.propagator is not None:
        s.attach_propagator(inst.propagator)
    soft = list(inst.soft_vars)
    res = s.solve()
    if not res:
        raise MaxSatError("hard clauses are unsatisfiable")
    if on_model:
        on_model(res.model)
    best = res.model
    t = sum(best[v] for v in soft)
    steps = [t]
    layer: CardinalityLayer | None = None
    while t > 0:
        if layer is None:
            layer = build_cardinality(s, soft, cap=t)
        res = s.solve(layer.bound_assumption(t - 1))
        if not res:
            break
        if on_model:
            on_model(res.model)
        t_new = sum(res.model[v] for v in soft)
        if t_new >= t:
            raise MaxSatError(f"descent stalled at {t} (got {t_new})")
        best, t = res.model, t_new
        steps.append(t)
    return MaxSatResult(t, best, [v for v in soft if best[v]], steps, s)


def minimize_clauses(
    n_vars: int, hard: Iterable[Iterable[int]], propagator: Propagator | None = None, seed: int = 0
) -> MaxSatResult:
    """Convenience wrapper: every variable 1..n is soft."""
    vs = list(range(1, n_vars + 1))
    return minimize(MaxSatInstance(vs, [list(c) for c in hard], propagator=propagator), seed=seed)
