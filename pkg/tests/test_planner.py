"""Candidate search: legality, pairing, trie pruning, network soundness."""

from fractions import Fraction as F

from pamp.generators import gen_factory, gen_rover
from pamp.model import END, START, plan_to_snap_sequence
from pamp.planner import PrefixTrie, iter_candidates, prefix_stn
from pamp.texec import check_plan_validity


def _candidates(pamp, horizon, trie=None):
    return list(iter_candidates(pamp.problem, horizon, trie or PrefixTrie()))


def test_factory_horizons():
    pamp = gen_factory(2, 50, 2, variant=1)
    assert _candidates(pamp, 0) == []
    assert _candidates(pamp, 1) == []
    # two works plus the process wrapper is the smallest skeleton
    h3 = _candidates(pamp, 3)
    assert len(h3) >= 1
    for cand in h3:
        assert len(cand.tokens) == 6
        starts = [tok for tok in cand.tokens if tok[0] == START]
        assert len(starts) == 3


def test_candidates_are_distinct_and_goal_reaching():
    pamp = gen_rover(3, (1,), 2)
    seen = set()
    for h in range(0, 4):
        for cand in _candidates(pamp, h):
            assert cand.tokens not in seen
            seen.add(cand.tokens)
    assert seen


def test_schedules_satisfy_problem_semantics():
    # any candidate scheduled at a feasible point of its own network
    # must pass the plan-validity check; platform checks come later
    for pamp in (gen_factory(2, 50, 2, variant=1), gen_rover(3, (1,), 2)):
        count = 0
        for h in range(0, 5):
            for cand in _candidates(pamp, h):
                times = cand.stn.feasible_point()
                plan = cand.plan(times)
                assert check_plan_validity(pamp.problem, plan) is None
                count += 1
                if count >= 12:
                    break
            if count >= 12:
                break
        assert count


def test_pairing_matches_tokens():
    pamp = gen_factory(1, 30, 2, variant=1)
    for cand in _candidates(pamp, 2):
        for action, s, e in cand.pairing:
            assert cand.tokens[s - 1] == (START, action)
            assert cand.tokens[e - 1] == (END, action)
            assert s < e


def test_subtree_ban_prunes_extensions():
    pamp = gen_factory(2, 50, 2, variant=1)
    all_h4 = _candidates(pamp, 4)
    first = all_h4[0].tokens[:2]
    trie = PrefixTrie()
    trie.ban(first)
    pruned = _candidates(pamp, 4, trie)
    assert all(c.tokens[:2] != first for c in pruned)
    assert len(pruned) < len(all_h4)


def test_exact_ban_keeps_extensions_alive():
    pamp = gen_factory(2, 50, 2, variant=1)
    short = _candidates(pamp, 3)[0].tokens
    trie = PrefixTrie()
    trie.ban_exact(short)
    assert all(c.tokens != short for c in _candidates(pamp, 3, trie))
    # longer sequences passing through the dead one stay reachable
    longer = _candidates(pamp, 4, trie)
    assert any(c.tokens[: len(short)] == short for c in longer)


def test_prefix_stn_open_instance_cap():
    problem = gen_factory(2, 50, 2, variant=1).problem
    # an open bounded instance caps how far later events can drift
    stn = prefix_stn(problem, ((START, "Work_1"), (START, "Cool")))
    assert stn.upper(1, 2) == (F(20), True)
    # closing it replaces the cap with the duration window
    stn = prefix_stn(problem, ((START, "Work_1"), (END, "Work_1")))
    assert stn.upper(1, 2) == (F(20), False)
    assert stn.upper(2, 1) == (F(-20), False)
    # an unbounded open instance adds no cap
    stn = prefix_stn(problem, ((START, "Process"), (START, "Work_1")))
    assert stn.upper(1, 2)[0] > F(10**6)


def test_sequence_round_trip():
    pamp = gen_rover(3, (1,), 2)
    cand = _candidates(pamp, 3)[0]
    plan = cand.plan(cand.stn.feasible_point())
    seq = plan_to_snap_sequence(plan)
    assert len(seq) == len(cand.tokens)
