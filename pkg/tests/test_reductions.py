import random
from itertools import combinations

import pytest

from dfvs.cycles import CycleSet, enumerate_all_uncovered, find_short_cycles
from dfvs.digraph import DiGraph, SccLabeling, is_acyclic
from dfvs.oracle import brute_force_dfvs, is_dfvs
from dfvs.reductions import (
    EventKind,
    ReconstructionError,
    ReductionTrace,
    Rule,
    RuleViolation,
    apply_exclusion,
    check_unconfined,
    exclude,
    exclusion_applies,
    is_straight,
    reconstruct,
    reconstruct_4path,
    reconstruct_manyfold,
    reduce,
    reduce_with_all_cycles,
    try_3empty,
    try_4path,
    try_allcycles,
    try_dome,
    try_exclusion_rules,
    try_loop,
    try_manyfold,
    try_pie,
    try_subset,
)
from dfvs.reductions.rules import unconfined_search
from dfvs.reductions.trace import FourPathPayload, ThreeEmptyPayload, reconstruct_3empty
from figures import FIG1_ID, FIG2A, FIG2B, bidirected, fig1, fig1_dag, fig2a, fig2b
from graphgen import acceptance_set, plant_3empty, random_digraph
from rulecheck import RULE_NAMES, check_once, instance, sweep


def lifted_optimum(g, rules=Rule.DEFAULT):
    kernel, trace = reduce(g, rules)
    _, witness = brute_force_dfvs(kernel)
    return reconstruct(trace, witness)


def lettered(arcs):
    """Graph over single-letter names; returns it with the name -> id map."""
    names = sorted({x for arc in arcs for x in arc})
    ix = {c: i for i, c in enumerate(names)}
    return DiGraph(range(len(names)), [(ix[u], ix[v]) for u, v in arcs]), ix


class TestExclude:
    def test_chain_bypass(self):
        g, x = lettered(["pv", "vs"])
        assert exclude(g, x["v"]) == [(x["p"], x["s"])]
        assert is_acyclic(g)[0]

    def test_in1_fan_out(self):
        g, x = lettered(["pv", "va", "vb"])
        exclude(g, x["v"])
        assert sorted(g.arcs()) == sorted([(x["p"], x["a"]), (x["p"], x["b"])])

    def test_loop_rejected(self):
        with pytest.raises(RuleViolation):
            exclude(DiGraph([0], [(0, 0)]), 0)

    def test_reversed_formula_is_unsound(self):
        # p->v->s with shortcut p->s; the literal succ x pred product adds s->p
        g, x = lettered(["pv", "vs", "ps"])
        assert exclusion_applies(g, x["v"], "IN1")
        literal = g.copy()
        literal.remove_vertex(x["v"])
        literal.add_arc(x["s"], x["p"])
        assert brute_force_dfvs(literal)[0] == 1
        apply_exclusion(g, x["v"], "IN1", ReductionTrace())
        assert brute_force_dfvs(g)[0] == 0

    def test_created_loop_is_committed(self):
        # u <-> v, excluding v leaves u with a loop, which LOOP takes
        g = DiGraph(range(3), [(0, 1), (1, 0), (1, 2)])
        trace = ReductionTrace()
        apply_exclusion(g, 1, "IN1", trace)
        assert trace.forced == {0}
        assert 0 not in g


class TestLoop:
    def test_loop_forced(self):
        g = DiGraph([0, 1], [(0, 0), (0, 1)])
        trace = ReductionTrace()
        assert try_loop(g, trace)
        assert trace.forced == {0} and 0 not in g

    def test_loop_free_untouched(self):
        g = fig1()
        assert not try_loop(g, ReductionTrace())
        assert g == fig1()

    def test_three_loops(self):
        g = DiGraph(range(3), [(i, i) for i in range(3)])
        trace = ReductionTrace()
        try_loop(g, trace)
        assert len(trace.forced) == 3 == brute_force_dfvs(DiGraph(range(3), [(i, i) for i in range(3)]))[0]


class TestExclusionRules:
    def test_isolated_vertex(self):
        g = DiGraph([0, 1], [])
        assert try_exclusion_rules(g, ReductionTrace(), stage=0) == 2
        assert len(g) == 0

    def test_in1_shrinks_triangle(self):
        g = DiGraph(range(3), [(0, 1), (1, 2), (2, 0)])
        g.add_arc(0, 2)  # 2 keeps two predecessors
        trace = ReductionTrace()
        apply_exclusion(g, 1, "IN1", trace)
        assert g.is_bi(0, 2)

    def test_wrong_rule_rejected(self):
        with pytest.raises(RuleViolation):
            apply_exclusion(fig1(), FIG1_ID["c"], "IN0", ReductionTrace())

    def test_stage_three_respects_flags(self):
        g = bidirected(4, combinations(range(4), 2))
        assert try_exclusion_rules(g, ReductionTrace(), Rule.NONE, stage=3) == 0


class TestPie:
    def test_fig2a_keeps_everything(self):
        g = fig2a()
        assert try_pie(g, SccLabeling(g), ReductionTrace()) == 0

    def test_fig2a_stray_arc_deleted(self):
        g = fig2a()
        a2, b2 = FIG2A["a2"], FIG2A["b2"]
        g.add_arc(a2, b2)
        before = brute_force_dfvs(g)[0]
        trace = ReductionTrace()
        assert try_pie(g, SccLabeling(g), trace) == 1
        assert not g.has_arc(a2, b2)
        assert brute_force_dfvs(g)[0] == before

    def test_bridge_between_two_cycles(self):
        g = bidirected(4, [(0, 1), (2, 3)])
        g.add_arc(1, 2)
        try_pie(g, SccLabeling(g), ReductionTrace())
        assert not g.has_arc(1, 2)


class TestDome:
    def test_shared_predecessor(self):
        g, x = lettered(["pv", "pu", "vu"])
        try_dome(g, ReductionTrace())
        assert not g.has_arc(x["v"], x["u"])

    def test_tail_with_only_bi_in_arcs(self):
        g, x = lettered(["vx", "xv", "vu", "ux"])
        k = brute_force_dfvs(g)[0]
        try_dome(g, ReductionTrace())
        assert not g.has_arc(x["v"], x["u"])
        assert brute_force_dfvs(g)[0] == k


class TestAllCycles:
    def test_fig1_unused_arcs(self):
        g = fig1()
        trace = ReductionTrace()
        try_allcycles(g, enumerate_all_uncovered(g), trace)
        deleted = {ev.arcs[0] for ev in trace.events}
        a, c, d = FIG1_ID["a"], FIG1_ID["c"], FIG1_ID["d"]
        assert (a, c) in deleted and (a, d) in deleted
        assert brute_force_dfvs(g)[0] == 2

    def test_two_cycle_kept(self):
        g = bidirected(2, [(0, 1)])
        assert try_allcycles(g, enumerate_all_uncovered(g), ReductionTrace()) == 0

    def test_incomplete_set_rejected(self):
        g = fig1()
        with pytest.raises(RuleViolation):
            try_allcycles(g, CycleSet([], False), ReductionTrace())


class TestSubset:
    def test_isolated_pair(self):
        g = bidirected(2, [(0, 1)])
        trace = ReductionTrace()
        try_subset(g, trace)
        assert len(trace.forced) == 1
        assert len(g) == 1 and is_acyclic(g)[0]

    def test_bidirected_triangle(self):
        g = bidirected(3, combinations(range(3), 2))
        trace = ReductionTrace()
        assert try_subset(g, trace) == 2
        assert len(trace.forced) == 2 == brute_force_dfvs(bidirected(3, combinations(range(3), 2)))[0]


class TestUnconfined:
    def test_bidirected_triangle(self):
        g = bidirected(3, combinations(range(3), 2))
        assert all(check_unconfined(g, v) for v in range(3))

    def test_growth_branch(self):
        # 0 <-> 1 -> 2 <-> 3: A grows by one vertex before the rule fires
        g = DiGraph(range(4), [(0, 1), (1, 0), (1, 2), (2, 3), (3, 2)])
        ok, grown = unconfined_search(g, 0)
        assert ok and grown == 1
        h = g.copy()
        h.remove_vertex(0)
        assert brute_force_dfvs(h)[0] + 1 == brute_force_dfvs(g)[0] == 2

    def test_dag(self):
        g = fig1_dag()
        assert not any(check_unconfined(g, v) for v in g.succ)


class TestStraight:
    def test_fig2b(self):
        assert is_straight(fig2b(), FIG2B["a"], FIG2B["b"])

    def test_plain_triangle_with_extras(self):
        g, x = lettered(["dc", "cx", "xd", "dy", "zc"])
        assert not is_straight(g, x["d"], x["c"])

    def test_bi_edge_not_straight(self):
        assert not is_straight(bidirected(2, [(0, 1)]), 0, 1)

    def test_missing_arc(self):
        with pytest.raises(RuleViolation):
            is_straight(fig2b(), FIG2B["b"], FIG2B["a"])


class TestManyfold:
    def fold(self, g):
        trace = ReductionTrace()
        assert try_manyfold(g, SccLabeling(g), trace) == 1
        return trace

    def test_fig2a(self):
        g = fig2a()
        trace = self.fold(g)
        a1, a2, a3, b2, b3 = (FIG2A[k] for k in ("a1", "a2", "a3", "b2", "b3"))
        expected = DiGraph([a1, a2, a3, b2, b3], [(a1, a2), (a2, a3), (a3, a1), (a1, b2), (b2, b3), (b3, a1)])
        assert g == expected
        assert trace.offset == 1
        k, witness = brute_force_dfvs(g)
        assert (k, witness) == (1, {a1})
        assert reconstruct(trace, witness) == {a1, FIG2A["b1"]}
        assert brute_force_dfvs(fig2a())[0] == 2

    def test_fig2b(self):
        g = fig2b()
        trace = self.fold(g)
        a, c = FIG2B["a"], FIG2B["c"]
        assert g == bidirected(4, [(a, c)]).induced([a, c])
        assert trace.offset == 1
        assert len(reconstruct(trace, brute_force_dfvs(g)[1])) == 2

    def test_reconstruct_cases(self):
        g = fig2b()
        p = self.fold(g).events[0].payload
        v, a, b, c = (FIG2B[k] for k in "vabc")
        assert reconstruct_manyfold(p, {a}) == {a, b}
        assert reconstruct_manyfold(p, {c}) == {c, v}
        assert is_dfvs(fig2b(), {c, v})

    def test_two_outside_c1_is_a_bug(self):
        g = fig2a()
        p = self.fold(g).events[0].payload
        from dfvs.reductions.trace import ManyFoldPayload

        wide = ManyFoldPayload(p.center, (1, 2), (4,), {1: 4, 2: 4})
        with pytest.raises(ReconstructionError):
            reconstruct_manyfold(wide, set())


def four_path_gadget():
    g = bidirected(5, [(0, x) for x in range(1, 5)] + [(1, 2), (2, 3), (3, 4)])
    return g


class TestFourPath:
    def test_gadget(self):
        g = four_path_gadget()
        trace = ReductionTrace()
        assert try_4path(g, SccLabeling(g), trace) == 1
        assert g == bidirected(5, combinations(range(1, 5), 2)).induced(range(1, 5))
        assert brute_force_dfvs(g)[0] == 3 == brute_force_dfvs(four_path_gadget())[0]

    def test_gadget_with_tails(self):
        g = four_path_gadget()
        for x in (5, 6):
            g.add_vertex(x)
        g.add_arc(1, 5)
        g.add_arc(5, 6)
        g.add_arc(6, 4)
        orig = g.copy()
        trace = ReductionTrace()
        assert try_4path(g, SccLabeling(g), trace) == 1
        assert brute_force_dfvs(g)[0] == brute_force_dfvs(orig)[0] == 3

    def test_extra_arc_blocks(self):
        g = four_path_gadget()
        g.add_arc(1, 3)
        assert try_4path(g, SccLabeling(g), ReductionTrace()) == 0

    def test_reconstruct_cases(self):
        p = FourPathPayload(0, 1, 2, 3, 4)
        g = four_path_gadget()
        assert reconstruct_4path(p, {1, 2, 3}) == {0, 2, 3}
        assert reconstruct_4path(p, {1, 2, 3, 4}) == {1, 2, 3, 4}
        assert reconstruct_4path(p, {2, 3, 4}) == {0, 2, 3}
        assert is_dfvs(g, {0, 2, 3})
        with pytest.raises(ReconstructionError):
            reconstruct_4path(p, {1, 2})


class TestThreeEmpty:
    def test_offset_zero_on_bidirected_instances(self):
        rng = random.Random(3)
        seen = 0
        while seen < 60:
            g = plant_3empty(rng, extra=rng.randint(1, 5))
            h = g.copy()
            trace = ReductionTrace()
            if not try_3empty(h, trace):
                continue
            seen += 1
            k, witness = brute_force_dfvs(h)
            assert brute_force_dfvs(g)[0] == k
            lifted = reconstruct(trace, witness)
            assert len(lifted) == k and is_dfvs(g, lifted)

    def test_arc_among_neighbours_blocks(self):
        g = bidirected(4, [(0, 1), (0, 2), (0, 3)])
        g.add_arc(1, 2)
        assert try_3empty(g, ReductionTrace()) == 0

    def test_reconstruct_rejects_two_missing(self):
        p = ThreeEmptyPayload(0, 1, 2, 3)
        assert reconstruct_3empty(p, {1, 2, 3}) == {1, 2, 3}
        with pytest.raises(ReconstructionError):
            reconstruct_3empty(p, {1})

    def test_off_by_default(self):
        assert not Rule.DEFAULT & Rule.THREEEMPTY
        assert Rule.ALL & Rule.THREEEMPTY


class TestReduce:
    def test_fig1(self):
        g = fig1()
        kernel, trace = reduce(g)
        assert len(kernel) + kernel.arc_count < len(g) + g.arc_count
        k, witness = brute_force_dfvs(kernel)
        assert k + len(trace.forced) + trace.offset == 2
        assert is_dfvs(g, reconstruct(trace, witness))

    def test_dag(self):
        kernel, trace = reduce(fig1_dag())
        assert len(kernel) == 0 and not trace.forced

    def test_k5(self):
        kernel, trace = reduce(bidirected(5, combinations(range(5), 2)))
        assert len(kernel) == 0 and len(trace.forced) == 4

    def test_input_untouched(self):
        g = fig1()
        reduce(g)
        assert g == fig1()

    def test_stats_recorded(self):
        _, trace = reduce(bidirected(5, combinations(range(5), 2)))
        stats = trace.stats_dict()
        assert sum(s["fired"] for s in stats.values()) >= 4
        assert set(next(iter(stats.values()))) == {"fired", "vertices_removed", "arcs_removed"}

    def test_event_count_bounded(self):
        rng = random.Random(5)
        for _ in range(100):
            g = random_digraph(rng.randint(2, 12), rng.choice((0.2, 0.3, 0.5)), rng)
            _, trace = reduce(g, Rule.ALL)
            assert len(trace.events) <= len(g) + g.arc_count


class TestReduceWithAllCycles:
    def test_fig1(self):
        g = fig1()
        kernel, cycles, trace = reduce_with_all_cycles(g, find_short_cycles(g, 4, 25000))
        a, d = FIG1_ID["a"], FIG1_ID["d"]
        assert not kernel.has_arc(a, d)
        k, witness = brute_force_dfvs(kernel)
        assert k + len(trace.forced) + trace.offset == 2
        assert is_dfvs(g, reconstruct(trace, witness))

    def test_acyclic(self):
        g = fig1_dag()
        kernel, cycles, _ = reduce_with_all_cycles(g, enumerate_all_uncovered(g))
        assert len(kernel) == 0 and cycles.cycles == []

    def test_incomplete_rejected(self):
        with pytest.raises(RuleViolation):
            reduce_with_all_cycles(fig1(), CycleSet([], False))

    def test_random_graphs(self):
        rng = random.Random(50)
        for _ in range(50):
            g = random_digraph(rng.randint(4, 10), rng.choice((0.2, 0.3, 0.5)), rng)
            kernel, cycles, trace = reduce_with_all_cycles(g, enumerate_all_uncovered(g))
            k, witness = brute_force_dfvs(kernel)
            assert k + len(trace.forced) + trace.offset == brute_force_dfvs(g)[0]
            if cycles.complete:
                assert cycles.vertex_sets() == enumerate_all_uncovered(kernel).vertex_sets()


class TestReconstruct:
    def test_empty_trace(self):
        assert reconstruct(ReductionTrace(), {3, 4}) == {3, 4}

    def test_single_loop(self):
        trace = ReductionTrace()
        trace.commit(7, "LOOP")
        assert trace.events[0].kind is EventKind.LOOP
        assert reconstruct(trace, set()) == {7}

    @pytest.mark.parametrize("rules", [Rule.DEFAULT, Rule.ALL])
    def test_acceptance_set(self, rules):
        for _, g in acceptance_set(500):
            lifted = lifted_optimum(g, rules)
            assert is_dfvs(g, lifted)
            assert len(lifted) == brute_force_dfvs(g)[0]


@pytest.mark.parametrize("name", RULE_NAMES)
def test_rule_soundness(name):
    fired, bad = sweep(name, 100)
    assert fired >= 100
    assert bad == []


def test_check_once_reports_non_firing():
    assert not check_once("MANYFOLD", fig1_dag()).fired
    assert instance("LOOP", random.Random(0)) is not None
