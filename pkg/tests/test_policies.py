import itertools

import pytest

from matchpool.matching import max_matching
from matchpool.model import ModelParams, final_pool_view, script_from_arcs
from matchpool.policies import (
    InvariantViolation,
    PolicySpec,
    SpecError,
    run_cm2,
    run_cm3,
    run_online_chain,
    run_policy,
)
from matchpool.rng import derive_seed


def P(n, rho=0.5, c=2.0, p=0.3, sigma=0.0, ndd=0):
    return ModelParams(n=n, rho=rho, c=c, p=p, sigma=sigma, ndd_count=ndd)


# -- spec validation -----------------------------------------------------------

def test_spec_divisibility():
    with pytest.raises(SpecError):
        PolicySpec("CM2", s_h=3, s_l=7).validate(21)
    with pytest.raises(SpecError):
        PolicySpec("CM2", s_h=2, s_l=1).validate(10)
    with pytest.raises(SpecError):
        PolicySpec("CM2", s_h=1, s_l=20).validate(10)
    PolicySpec("CM2", s_h=3, s_l=9).validate(21)  # S_L need not divide n


def test_spec_chain_k():
    with pytest.raises(SpecError):
        PolicySpec("CHAIN", k=4).validate(10)


def test_chain_requires_ndd():
    with pytest.raises(SpecError):
        run_online_chain(P(10, ndd=0), k=2, with_chain=True, seed=1)
    with pytest.raises(SpecError):
        run_online_chain(P(10, ndd=1), k=2, with_chain=False, seed=1)


def test_wrong_scheme_dispatch():
    with pytest.raises(SpecError):
        run_cm2(P(10), PolicySpec("CM3"), seed=1)
    with pytest.raises(SpecError):
        run_cm3(P(10), PolicySpec("CM2"), seed=1)


# -- CM2 -----------------------------------------------------------------------

def test_cm2_single_pair_matches_nothing():
    trace = run_cm2(P(1, c=0.5), PolicySpec("CM2", 1, 1), seed=5)
    assert trace.matched_total == 0


def test_cm2_probability_one_edges_match_everyone():
    # rho=0, p=1: every mutual pair exists, so the online run pairs each
    # arrival immediately and the pool never holds two unmatched nodes.
    trace = run_cm2(P(40, rho=0.0, p=1.0), PolicySpec("CM2", 1, 1), seed=3)
    assert trace.matched_total == 40
    assert all(pool <= 1 for *_, pool in trace.series)


def test_cm2_two_phase_rule_explicit():
    # nodes 1(L), 2(L), 3(H); mutual pairs 1-2 and 1-3.
    types = ["L", "L", "H"]
    arcs = [(1, 2), (2, 1), (1, 3), (3, 1)]
    script = script_from_arcs(types, arcs)

    online = run_cm2(P(3), PolicySpec("CM2", 1, 1), seed=0, script=script)
    assert online.matched_total == 2
    assert online.matched_h == 0  # {1,2} matched at t=2, H node 3 stranded
    assert online.series[1] == (2, 2, 0, 2, 0)

    waiting = run_cm2(P(3), PolicySpec("CM2", 1, 3), seed=0, script=script)
    assert waiting.matched_total == 2
    assert waiting.matched_h == 1  # H-priority phase at t=3 matches {1,3}


def test_cm2_final_match_runs_even_when_s_l_not_divisor():
    # S_L = 4 does not divide n=6; both phases still run at t=6.
    types = ["L"] * 6
    arcs = [(5, 6), (6, 5)]
    script = script_from_arcs(types, arcs)
    trace = run_cm2(P(6, rho=0.0), PolicySpec("CM2", 2, 4), seed=0, script=script)
    assert trace.matched_total == 2


def test_cm2_invariant_checks_pass():
    run_cm2(P(300), PolicySpec("CM2", 10, 30), seed=8, check_invariants=True)


def test_cm2_monotone_and_conserving():
    trace = run_cm2(P(200), PolicySpec("CM2", 5, 20), seed=11)
    prev = 0
    for t, mt, mh, ml, pool in trace.series:
        assert mt == mh + ml
        assert mt >= prev
        assert t == mt + pool
        prev = mt
    assert trace.matched_total == trace.series[-1][1]


def test_cm2_determinism():
    a = run_cm2(P(150), PolicySpec("CM2", 5, 10), seed=21)
    b = run_cm2(P(150), PolicySpec("CM2", 5, 10), seed=21)
    assert a.series == b.series


def test_cm11_at_least_half_of_offline_maximum():
    # Online greedy leaves a maximal matching of the union graph, so it
    # matches at least half the offline optimum: in node counts,
    # matched_total = 2|M_greedy| >= |M_max| = offline.size.
    params = P(600)
    for trial in range(10):
        seed = derive_seed(55, trial)
        trace = run_cm2(params, PolicySpec("CM2", 1, 1), seed, record_series=False)
        offline = max_matching(final_pool_view(params, seed))
        assert trace.matched_total >= offline.size


# -- CM3 -----------------------------------------------------------------------

def test_cm3_single_triangle_in_chunk():
    types = ["H", "H", "L"]
    arcs = [(1, 2), (2, 3), (3, 1)]
    trace = run_cm3(P(3), PolicySpec("CM3", 3, 3), seed=0,
                    script=script_from_arcs(types, arcs))
    assert trace.matched_total == 3
    assert trace.matched_h == 2


def test_cm3_no_arcs_no_matches():
    trace = run_cm3(P(50, rho=1.0, c=0.0), PolicySpec("CM3", 1, 1), seed=2)
    assert trace.matched_total == 0


def test_cm3_invariant_checks_pass():
    run_cm3(P(250), PolicySpec("CM3", 5, 25), seed=13, check_invariants=True)


def test_cm3_conservation_and_monotonicity():
    trace = run_cm3(P(200), PolicySpec("CM3", 1, 10), seed=17)
    prev = 0
    for t, mt, mh, ml, pool in trace.series:
        assert mt == mh + ml and t == mt + pool and mt >= prev
        prev = mt


# CM3(1,1) against an independent straight-line reimplementation on an
# explicit 12-node instance with unique optima at every decision point.

FIXTURE_TYPES = ["H", "H", "L", "L", "L", "H", "L", "L", "H", "H", "L", "L"]
FIXTURE_ARCS = [
    (1, 2), (2, 3), (3, 1),          # H-H-L triangle completing at t=3
    (4, 5), (5, 4),                  # L-L mutual pair at t=5
    (6, 7), (7, 6),                  # H-L mutual pair at t=7
    (8, 9), (9, 8),                  # L-H mutual pair at t=9
    (10, 11), (11, 12), (12, 10),    # H-L-L triangle completing at t=12
]


def _independent_cm3_online(types, arcs_by_time, n):
    """Straight-line per-period simulation used only as a test oracle."""
    is_h = {i + 1: t == "H" for i, t in enumerate(types)}
    arcs: set[tuple[int, int]] = set()
    active: set[int] = set()
    tallies = []
    mh = ml = 0
    for t in range(1, n + 1):
        active.add(t)
        arcs |= {a for a in arcs_by_time if max(a) == t}

        def all_cycles(no_ll):
            ok = lambda x, y: not no_ll or is_h[x] or is_h[y]
            cyc = set()
            for u, v in itertools.permutations(sorted(active), 2):
                if u < v and (u, v) in arcs and (v, u) in arcs and ok(u, v) and ok(v, u):
                    cyc.add((u, v))
            for u, v, w in itertools.permutations(sorted(active), 3):
                if u == min(u, v, w) and (u, v) in arcs and (v, w) in arcs \
                        and (w, u) in arcs and ok(u, v) and ok(v, w) and ok(w, u):
                    cyc.add((u, v, w))
            return sorted(cyc)

        def best_subset(cycles, lex):
            best, best_val, ties = (), (-1, -1), 0
            for r in range(len(cycles) + 1):
                for combo in itertools.combinations(cycles, r):
                    nodes = [u for c in combo for u in c]
                    if len(nodes) != len(set(nodes)):
                        continue
                    h = sum(1 for u in nodes if is_h[u])
                    val = (h, len(nodes)) if lex else (len(nodes), 0)
                    if val > best_val:
                        best, best_val, ties = combo, val, 1
                    elif val == best_val and set(nodes) != {
                        u for c in best for u in c
                    }:
                        ties += 1
            return best, ties

        for no_ll, lex in ((True, True), (False, False)):
            chosen, ties = best_subset(all_cycles(no_ll), lex)
            if chosen:
                assert ties == 1, "fixture must have unique optima"
                for c in chosen:
                    for u in c:
                        active.discard(u)
                        if is_h[u]:
                            mh += 1
                        else:
                            ml += 1
        tallies.append((t, mh + ml, mh, ml, len(active)))
    return tallies


def test_cm3_online_matches_independent_simulation():
    script = script_from_arcs(FIXTURE_TYPES, FIXTURE_ARCS)
    trace = run_cm3(P(12), PolicySpec("CM3", 1, 1), seed=0, script=script)
    oracle = _independent_cm3_online(FIXTURE_TYPES, set(FIXTURE_ARCS), 12)
    assert trace.series == oracle
    assert trace.matched_total == 12
    assert trace.matched_h == 5


# -- online chain ----------------------------------------------------------------

def test_chain_advances_along_scripted_path():
    types = ["H", "H", "H"]
    arcs = [(0, 1), (1, 2), (2, 3)]
    with_chain = run_online_chain(P(3, rho=1.0, ndd=1), k=3, with_chain=True,
                                  seed=0, script=script_from_arcs(types, arcs))
    assert with_chain.matched_total == 3
    assert [len(s) for s in with_chain.chain.segments_executed] == [1, 1, 1]
    assert with_chain.chain.bridge_donor == 3

    without = run_online_chain(P(3, rho=1.0), k=3, with_chain=False, seed=0,
                               script=script_from_arcs(types, arcs[1:]))
    assert without.matched_total == 0


def test_chain_blocked_when_no_h_nodes():
    # rho=0: rule (i) forbids every advance, so the two schemes produce
    # identical traces on the same stream seed.
    for trial in range(8):
        seed = derive_seed(31, trial)
        a = run_online_chain(P(300, rho=0.0, ndd=1), k=2, with_chain=True, seed=seed)
        b = run_online_chain(P(300, rho=0.0), k=2, with_chain=False, seed=seed)
        assert a.series == b.series
        assert not a.chain.segments_executed


def test_chain_c_zero_matches_nothing():
    trace = run_online_chain(P(60, rho=1.0, c=0.0, ndd=1), k=3, with_chain=True,
                             seed=4)
    assert trace.matched_total == 0


def test_chain_rule_ii_prefers_h_rich_cycle():
    # Arrival 3 closes an H-H 2-cycle (k-1 = 1 H node suffices) and also
    # connects from the bridge donor; the cycle must win the tie.
    types = ["H", "H", "H"]
    arcs = [(0, 1), (1, 3), (2, 3), (3, 2)]
    trace = run_online_chain(P(3, rho=1.0, ndd=1), k=2, with_chain=True,
                             seed=0, script=script_from_arcs(types, arcs))
    # t=1: chain grabs node 1; t=3: cycle (2,3) preferred over the chain.
    assert trace.chain.segments_executed == [(1,)]
    assert trace.chain.bridge_donor == 1
    assert trace.matched_total == 3


def test_chain_truncates_segment_at_last_h():
    # Path 1(L) -> 2(H) -> 3(L): the executed segment stops at the H node.
    types = ["L", "H", "L"]
    arcs = [(0, 3), (3, 1), (1, 2)]
    # arrival order: 1 L, 2 H, 3 L; BD arc hits node 3, path 3->1->2
    trace = run_online_chain(P(3, rho=0.0, ndd=1), k=2, with_chain=True,
                             seed=0, script=script_from_arcs(types, arcs))
    assert trace.chain.segments_executed == [(3, 1, 2)]
    assert trace.matched_total == 3
    assert trace.chain.bridge_donor == 2


def test_chain_invariant_checks_pass():
    run_online_chain(P(200, ndd=1), k=2, with_chain=True, seed=6,
                     check_invariants=True)
    run_online_chain(P(200, rho=1.0, ndd=1), k=3, with_chain=True, seed=6,
                     check_invariants=True)


def test_chain_conservation():
    trace = run_online_chain(P(250, ndd=1), k=3, with_chain=True, seed=9)
    for t, mt, mh, ml, pool in trace.series:
        assert t == mt + pool and mt == mh + ml


# -- dispatch --------------------------------------------------------------------

def test_run_policy_dispatch():
    spec = PolicySpec("CHAIN", k=2, with_chain=True)
    trace = run_policy(P(50, ndd=1), spec, seed=1, record_series=False)
    assert trace.scheme == "CHAIN"
    trace = run_policy(P(50), PolicySpec("CM2", 1, 1), seed=1, record_series=False)
    assert trace.scheme == "CM2"
