import pytest

from symbreak import DomainSet, Problem, is_solution, pigeonhole_model, propagate_fixpoint
from symbreak.constraints import StrictLess

from conftest import brute_solutions, make_rng, random_binary_problem


def test_domainset_basics():
    dom = DomainSet.from_values([[1, 3], [2]])
    assert dom.contains(0, 1) and dom.contains(0, 3) and not dom.contains(0, 2)
    assert dom.values(1) == [2]
    assert dom.size(0) == 2
    dom.remove(0, 3)
    assert dom.values(0) == [1]
    with pytest.raises(ValueError):
        dom.remove(0, 3)
    dom2 = dom.copy()
    dom2.remove(1, 2)
    assert dom.contains(1, 2)
    assert dom2.is_empty(1) and dom2.has_wipeout()
    assert dom2.is_subset_of(dom)


def test_domainset_rejects_nonpositive_values():
    with pytest.raises(ValueError):
        DomainSet.from_values([[0, 1]])


def test_problem_validates_scopes_and_domains():
    with pytest.raises(ValueError):
        Problem(2, 3, DomainSet.from_values([[1], [4]]))
    with pytest.raises(ValueError):
        Problem(1, 3, DomainSet.full(1, 3), (StrictLess(0, 1),))


def test_fixpoint_no_constraints_is_identity():
    prob = Problem(3, 3, DomainSet.full(3, 3))
    out = propagate_fixpoint(prob)
    assert out.prunings == [] and not out.wipeout
    assert out.final_domains == prob.domains


def test_fixpoint_wipeout_when_disjunction_value_gone():
    prob = pigeonhole_model(3)
    dom = prob.domains.copy()
    for var in range(3):
        dom.remove(var, 4)
    out = propagate_fixpoint(prob, dom)
    assert out.wipeout
    assert out.final_domains.has_wipeout()


def test_fixpoint_confluence_under_constraint_reordering():
    rng = make_rng(101)
    for _ in range(60):
        prob = random_binary_problem(rng)
        base = propagate_fixpoint(prob)
        shuffled = list(prob.constraints)
        rng.shuffle(shuffled)
        again = propagate_fixpoint(Problem(prob.num_vars, prob.num_values, prob.domains, tuple(shuffled)))
        assert base.wipeout == again.wipeout
        if not base.wipeout:
            assert base.final_domains == again.final_domains


def test_fixpoint_equals_iterated_single_constraint_filtering():
    rng = make_rng(102)
    for _ in range(40):
        prob = random_binary_problem(rng, n_max=4, m_max=4)
        out = propagate_fixpoint(prob)
        if out.wipeout:
            continue
        # saturate by hand: run every propagator until nothing changes
        dom = prob.domains.copy()
        changed = True
        while changed:
            changed = False
            for c in prob.constraints:
                if c.propagate(dom):
                    changed = True
        assert dom == out.final_domains


def test_fixpoint_monotone_in_domains():
    rng = make_rng(103)
    for _ in range(60):
        prob = random_binary_problem(rng)
        big = propagate_fixpoint(prob)
        small_dom = prob.domains.copy()
        for var in range(prob.num_vars):
            values = small_dom.values(var)
            if len(values) > 1 and rng.random() < 0.6:
                small_dom.remove(var, rng.choice(values))
        small = propagate_fixpoint(prob, small_dom)
        if big.wipeout:
            assert small.wipeout
        elif not small.wipeout:
            assert small.final_domains.is_subset_of(big.final_domains)


def test_pruning_log_replays_to_final_domains():
    rng = make_rng(104)
    for _ in range(60):
        prob = random_binary_problem(rng)
        out = propagate_fixpoint(prob)
        replay = prob.domains.copy()
        for p in out.prunings:
            replay.remove(p.var, p.value)
        assert replay == out.final_domains


def test_pruning_log_is_sound():
    # every removal had no support in its causing constraint at removal time
    rng = make_rng(105)
    for _ in range(40):
        prob = random_binary_problem(rng, n_max=4, m_max=4)
        out = propagate_fixpoint(prob)
        current = prob.domains.copy()
        for p in out.prunings:
            cause = p.cause
            a, b = cause.scope
            other = b if p.var == a else a
            if p.var == a:
                witnesses = [w for w in current.values(other) if cause.allows(p.value, w)]
            else:
                witnesses = [w for w in current.values(other) if cause.allows(w, p.value)]
            assert not witnesses
            current.remove(p.var, p.value)


def test_is_solution_pigeonhole_counterexample():
    prob = pigeonhole_model(2)
    assert not is_solution(prob, [1, 2])  # value 3 never used
    assert not is_solution(prob, {0: 1, 1: 2})


def test_is_solution_no_constraints_and_partial_rejection():
    prob = Problem(2, 2, DomainSet.full(2, 2))
    assert is_solution(prob, [2, 1])
    with pytest.raises(ValueError):
        is_solution(prob, {0: 1})


def test_is_solution_matches_checker_conjunction():
    rng = make_rng(106)
    for _ in range(20):
        prob = random_binary_problem(rng, n_max=4, m_max=4)
        sols = set(brute_solutions(prob))
        dom = prob.domains
        for _ in range(20):
            vec = tuple(rng.choice(dom.values(v)) for v in range(prob.num_vars))
            assert is_solution(prob, vec) == (vec in sols)
