from itertools import product

from hypothesis import given, settings, strategies as st

from trend.sat import Solver, lex_min_model

N = 6
literal = st.integers(1, N).flatmap(lambda v: st.sampled_from([v, -v]))
cnf = st.lists(st.lists(literal, min_size=1, max_size=4), max_size=28)


def models(clauses, assumptions=()):
    for bits in product([False, True], repeat=N):
        value = dict(zip(range(1, N + 1), bits))
        sat = lambda lit: value[abs(lit)] == (lit > 0)  # noqa: E731
        if all(sat(a) for a in assumptions) and all(any(sat(l) for l in c) for c in clauses):
            yield value


def solver_for(clauses):
    s = Solver()
    for _ in range(N):
        s.new_var()
    for c in clauses:
        s.add_clause(c)
    return s


@settings(max_examples=300, deadline=None)
@given(cnf, st.lists(literal, max_size=3))
def test_agrees_with_truth_tables(clauses, assumptions):
    s = solver_for(clauses)
    expected = next(models(clauses, assumptions), None)
    assert s.solve(assumptions) == (expected is not None)
    if expected is not None:
        m = s.model
        assert all(m[abs(a)] == (a > 0) for a in assumptions)
        assert all(any(m[abs(l)] == (l > 0) for l in c) for c in clauses)


@settings(max_examples=150, deadline=None)
@given(cnf)
def test_repeated_solves_stay_correct(clauses):
    s = solver_for(clauses)
    for v in range(1, N + 1):
        for lit in (v, -v):
            assert s.solve([lit]) == (next(models(clauses, [lit]), None) is not None)


@settings(max_examples=150, deadline=None)
@given(cnf)
def test_lex_min_model(clauses):
    order = list(range(1, N + 1))
    found = lex_min_model(solver_for(clauses), order)
    every = list(models(clauses))
    if not every:
        assert found is None
        return
    best = min(every, key=lambda m: [m[v] for v in order])
    assert [found[v] for v in order] == [best[v] for v in order]


def test_empty_clause_is_unsat():
    s = Solver()
    s.new_var()
    s.add_clause([])
    assert not s.solve()


def test_tautology_ignored():
    s = Solver()
    v = s.new_var()
    s.add_clause([v, -v])
    assert s.solve() and s.model == {v: False}
