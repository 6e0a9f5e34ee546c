import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dfvs.satcore import SatSolver, normalize_clause, read_dimacs, write_dimacs
from cnf import entails, random_kcnf, satisfiable, satisfies, unit_fixpoint
from figures import FIG1_CYCLES, ids


def solver_with(clauses, n=0, **kw):
    s = SatSolver(n, **kw)
    for c in clauses:
        s.add_clause(c)
    return s


def pigeonhole(pigeons, holes):
    var = lambda i, j: 1 + i * holes + j  # noqa: E731
    cls = [[var(i, j) for j in range(holes)] for i in range(pigeons)]
    for j in range(holes):
        for i in range(pigeons):
            for k in range(i + 1, pigeons):
                cls.append([-var(i, j), -var(k, j)])
    return pigeons * holes, cls


class TestAddClause:
    def test_unit_at_level_zero(self):
        s = SatSolver()
        s.add_clause([1])
        assert s.value(1) is True and s.level_of(1) == 0

    def test_contradicting_units(self):
        s = SatSolver()
        assert s.add_clause([1])
        assert not s.add_clause([-1])
        assert not s.solve()

    def test_empty_clause(self):
        s = SatSolver()
        assert not s.add_clause([])

    def test_tautology_dropped(self):
        s = SatSolver()
        s.add_clause([1, -1, 2])
        assert s.clause_database() == []

    def test_normalize(self):
        assert normalize_clause([3, 3, -1]) == [3, -1]
        assert normalize_clause([2, -2]) is None
        with pytest.raises(ValueError):
            normalize_clause([0])


class TestSolve:
    def test_fig1_clauses_all_false_preference(self):
        clauses = [sorted(ids(c)) for c in FIG1_CYCLES]
        s = solver_with(clauses, 8)
        for v in range(1, 9):
            s.set_phase_preference(v, False)
        res = s.solve()
        assert res and satisfies(res.model, clauses)

    def test_empty_instance(self):
        res = SatSolver().solve()
        assert res.sat and res.model == [False]

    def test_pigeonhole(self):
        n, cls = pigeonhole(3, 2)
        assert not satisfiable(n, cls)
        assert not solver_with(cls, n).solve()

    def test_pigeonhole_fits(self):
        n, cls = pigeonhole(3, 3)
        res = solver_with(cls, n).solve()
        assert res and satisfies(res.model, cls)

    def test_true_vars(self):
        res = solver_with([[2], [-1]]).solve()
        assert res.true_vars() == [2]


class TestPropagate:
    def test_binary_implication(self):
        s = solver_with([[1, 2]])
        s.assume(-1)
        assert s.propagate() is None
        assert s.value(2) is True and s.level_of(2) == 1

    def test_chain_conflict(self):
        s = solver_with([[-1, 2], [-2, -1]])
        s.assume(1)
        assert s.propagate() is not None

    def test_chain_conflict_at_level_zero(self):
        s = SatSolver()
        s.add_clause([1])
        s.add_clause([-1, 2])
        assert not s.add_clause([-2, -1])

    def test_assume_twice_rejected(self):
        s = SatSolver(1)
        s.assume(1)
        with pytest.raises(ValueError):
            s.assume(-1)

    def test_random_states_match_naive(self):
        rng = random.Random(21)
        states = 0
        while states < 10_000:
            n = rng.randint(3, 12)
            clauses = random_kcnf(n, rng.randint(n, 4 * n), rng, k=rng.choice((2, 3, 3)))
            s = SatSolver(n)
            if not all(s.add_clause(c) for c in clauses):
                continue
            assumed = {}
            while True:
                free = [v for v in range(1, n + 1) if s.value(v) is None]
                if not free:
                    break
                v = rng.choice(free)
                lit = v if rng.random() < 0.5 else -v
                s.assume(lit)
                assumed[v] = lit > 0
                conflict = s.propagate()
                # level-0 facts come from unit clauses, which the oracle sees too
                expected = unit_fixpoint(clauses, assumed)
                states += 1
                if expected is None:
                    assert conflict is not None
                    break
                assert conflict is None
                got = {abs(l): l > 0 for l in s.trail}
                assert got == expected


class TestPhasePreference:
    def test_prefer_false(self):
        s = SatSolver(1)
        s.set_phase_preference(1, False)
        assert s.solve().model[1] is False

    def test_prefer_true(self):
        s = SatSolver(1)
        s.set_phase_preference(1, True)
        assert s.solve().model[1] is True

    def test_implication_overrides(self):
        s = solver_with([[1]])
        s.set_phase_preference(1, False)
        assert s.solve().model[1] is True


class TestAssumptions:
    def test_core_subset(self):
        s = solver_with([[-1, -2], [3, 4]])
        res = s.solve([1, 2, 3])
        assert not res
        assert set(res.core) <= {1, 2, 3} and {1, 2} & set(res.core)
        assert s.solve([1, 3])
        assert s.solve()

    def test_core_is_sufficient(self):
        rng = random.Random(12)
        checked = 0
        for _ in range(300):
            n = rng.randint(4, 10)
            clauses = random_kcnf(n, 3 * n, rng)
            if not satisfiable(n, clauses):
                continue
            assumptions = [v if rng.random() < 0.5 else -v for v in rng.sample(range(1, n + 1), rng.randint(1, n))]
            res = solver_with(clauses, n).solve(assumptions)
            expected = satisfiable(n, clauses + [[a] for a in assumptions])
            assert bool(res) == expected
            if res:
                assert satisfies(res.model, clauses)
                assert all(res.model[abs(a)] == (a > 0) for a in assumptions)
            else:
                assert set(res.core) <= set(assumptions)
                assert not satisfiable(n, clauses + [[a] for a in res.core])
                checked += 1
        assert checked > 20


class TestLearning:
    def test_learnt_clauses_are_entailed(self):
        rng = random.Random(33)
        logged = 0
        for _ in range(150):
            n = rng.randint(6, 14)
            clauses = random_kcnf(n, int(4.3 * n), rng)
            s = solver_with(clauses, n, log_learnts=True)
            s.solve()
            for c in s.learnt_log:
                assert entails(n, clauses, c)
                logged += 1
        assert logged > 100

    def test_database_reduction_keeps_answers(self):
        n, cls = pigeonhole(6, 5)
        s = solver_with(cls, n)
        s._max_learnts = 10
        assert not s.solve()
        assert s.stats.reductions > 0


def test_determinism():
    rng = random.Random(4)
    clauses = random_kcnf(40, 170, rng)
    runs = []
    for _ in range(2):
        s = solver_with(clauses, 40, seed=7, log_learnts=True)
        res = s.solve()
        runs.append((res.sat, res.model, s.learnt_log, s.stats))
    assert runs[0] == runs[1]


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 10), st.data())
def test_random_cnf_matches_truth_table(n, data):
    clauses = data.draw(
        st.lists(st.lists(st.integers(-n, n).filter(bool), min_size=1, max_size=4), max_size=40)
    )
    res = solver_with(clauses, n).solve()
    assert bool(res) == satisfiable(n, clauses)
    if res:
        assert satisfies(res.model, clauses)


def test_incremental_clauses_between_solves():
    s = SatSolver(3)
    for v in (1, 2, 3):
        s.set_phase_preference(v, False)
    assert s.solve().true_vars() == []
    s.add_clause([1, 2])
    assert s.solve().true_vars() in ([1], [2])
    s.add_clause([-1])
    s.add_clause([-2, 3])
    assert s.solve().true_vars() == [2, 3]


class LazyClauses:
    """Propagator that reveals clauses only once they are falsified or unit."""

    def __init__(self, clauses):
        self.clauses = [list(c) for c in clauses]
        self.sent: set[int] = set()
        self.val: dict[int, bool] = {}
        self.calls = 0
        self.empty_calls = 0

    def propagate(self, new_lits):
        self.calls += 1
        if not new_lits:
            self.empty_calls += 1
        for lit in new_lits:
            self.val[abs(lit)] = lit > 0
        for i, c in enumerate(self.clauses):
            if i in self.sent:
                continue
            if any(self.val.get(abs(l)) == (l > 0) for l in c):
                continue
            if sum(abs(l) not in self.val for l in c) <= 1:
                self.sent.add(i)
                return c
        return None

    def backtrack(self, variables):
        for v in variables:
            self.val.pop(v, None)


class TestInjection:
    def test_lazy_cnf_matches_truth_table(self):
        rng = random.Random(77)
        for _ in range(300):
            n = rng.randint(3, 12)
            clauses = random_kcnf(n, rng.randint(n, 5 * n), rng)
            eager = [c for i, c in enumerate(clauses) if i % 3 == 0]
            s = solver_with(eager, n)
            prop = LazyClauses(clauses)
            s.attach_propagator(prop)
            res = s.solve()
            assert bool(res) == satisfiable(n, clauses)
            if res:
                assert satisfies(res.model, clauses)

    def test_called_at_every_fixpoint(self):
        s = SatSolver(2)
        prop = LazyClauses([])
        s.attach_propagator(prop)
        s.solve()
        assert prop.calls >= 3  # root plus one per decision
        assert prop.empty_calls >= 1

    def test_root_conflict_from_propagator(self):
        s = SatSolver(1)
        s.attach_propagator(LazyClauses([[1], [-1]]))
        assert not s.solve()


def test_dimacs_round_trip():
    rng = random.Random(2)
    for _ in range(50):
        n = rng.randint(1, 20)
        clauses = random_kcnf(n, rng.randint(0, 30), rng)
        text = write_dimacs(n, clauses)
        m, back = read_dimacs(text)
        assert back == clauses and m == n


def test_dimacs_comments_and_errors():
    assert read_dimacs("c hi\np cnf 3 2\n1 -2 0\n3 0\n") == (3, [[1, -2], [3]])
    with pytest.raises(ValueError):
        read_dimacs("p dnf 1 1\n")
    with pytest.raises(ValueError):
        read_dimacs("p cnf 1 1\n1 x 0\n")
