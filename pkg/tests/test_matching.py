import random
from fractions import Fraction

import pytest

from maxminfair import (
    GUARANTEE_FRACTION,
    Edge,
    Matching,
    SearchState,
    Signature,
    build_step,
    complete_allocation,
    compute_T_star,
    contract_step,
    extend_matching,
    find_addable_edge,
    find_perfect_matching,
    generate_instance,
    is_minimal_thin_edge,
    make_fat_edge,
    make_thin_edge,
    monitor_signatures,
    normalize,
    signature,
    verify_allocation,
)
from maxminfair.errors import (
    MatchingNotPerfect,
    NoRemovableBlocker,
    NotAddable,
    PlayerAlreadyMatched,
)
from maxminfair.matching import FAT, INFINITY, THIN
from maxminfair.oracle import check_state_invariants

from conftest import make_instance

F = Fraction


def fat_edge(player, resource):
    return Edge(player=player, bundle=frozenset({resource}), kind=FAT)


def thin_edge(player, *resources):
    return Edge(player=player, bundle=frozenset(resources), kind=THIN)


class TestMinimalThinEdge:
    def test_boundary_pair(self):
        inst = make_instance({"a": "3/23", "b": "3/23"}, {"p": ["a", "b"]})
        ni = normalize(inst, F(1))
        assert is_minimal_thin_edge(ni, "p", {"a", "b"})

    def test_three_tenths(self):
        inst = make_instance(
            {"a": "1/10", "b": "1/10", "c": "1/10"}, {"p": ["a", "b", "c"]}
        )
        ni = normalize(inst, F(1))
        # 3/10 >= 6/23 while any two give 1/5 < 6/23.
        assert F(3, 10) >= F(6, 23) and F(1, 5) < F(6, 23)
        assert is_minimal_thin_edge(ni, "p", {"a", "b", "c"})

    def test_four_tenths_not_minimal(self):
        ids = ["a", "b", "c", "d"]
        inst = make_instance({r: "1/10" for r in ids}, {"p": ids})
        ni = normalize(inst, F(1))
        assert not is_minimal_thin_edge(ni, "p", set(ids))

    def test_fat_resource_disqualifies(self):
        inst = make_instance({"a": "1", "b": "1/10"}, {"p": ["a", "b"]})
        ni = normalize(inst, F(1))
        assert not is_minimal_thin_edge(ni, "p", {"a", "b"})
        with pytest.raises(ValueError):
            make_thin_edge(ni, "p", {"a", "b"})
        with pytest.raises(ValueError):
            make_fat_edge(ni, "p", "b")
        assert make_fat_edge(ni, "p", "a") == fat_edge("p", "a")

    def test_below_threshold(self):
        inst = make_instance({"a": "1/10"}, {"p": ["a"]})
        ni = normalize(inst, F(1))
        assert not is_minimal_thin_edge(ni, "p", {"a"})
        assert not is_minimal_thin_edge(ni, "p", set())


class TestFindAddableEdge:
    def test_initial_fat(self, two_fat):
        ni = normalize(two_fat, F(1))
        state = SearchState(ni, Matching.empty(), "p1")
        assert find_addable_edge(ni, state) == fat_edge("p1", "a")

    def test_everything_covered_gives_none(self, shared_single):
        ni = normalize(shared_single, F(1))
        state = SearchState(ni, Matching.of([fat_edge("p1", "r")]), "p2")
        build_step(state, fat_edge("p2", "r"))
        assert find_addable_edge(ni, state) is None

    def test_thin_greedy_stops_at_two(self):
        inst = make_instance(
            {"a": "3/23", "b": "3/23", "c": "3/23"}, {"p": ["a", "b", "c"]}
        )
        ni = normalize(inst, F(1))
        state = SearchState(ni, Matching.empty(), "p")
        edge = find_addable_edge(ni, state)
        assert edge == thin_edge("p", "a", "b")

    def test_random_policy_is_seeded(self, two_fat):
        ni = normalize(two_fat, F(1))
        picks = set()
        for seed in range(6):
            state = SearchState(ni, Matching.empty(), "p1")
            edge = find_addable_edge(ni, state, random.Random(seed))
            again = find_addable_edge(
                ni, SearchState(ni, Matching.empty(), "p1"), random.Random(seed)
            )
            assert edge == again
            picks.add(edge)
        assert len(picks) > 1  # the coin actually flips


class TestBuildStep:
    def test_blocked_build_activates(self, shared_single):
        ni = normalize(shared_single, F(1))
        state = SearchState(ni, Matching.of([fat_edge("p1", "r")]), "p2")
        build_step(state, fat_edge("p2", "r"))
        assert state.blockers[0].blocking == (fat_edge("p1", "r"),)
        assert state.active_order == ["p2", "p1"]
        assert state.covered == {"r"}

    def test_unblocked_build(self, two_fat):
        ni = normalize(two_fat, F(1))
        state = SearchState(ni, Matching.empty(), "p1")
        build_step(state, fat_edge("p1", "a"))
        assert state.blockers[0].removable

    def test_covered_resource_rejected(self, two_fat):
        ni = normalize(two_fat, F(1))
        state = SearchState(ni, Matching.empty(), "p1")
        build_step(state, fat_edge("p1", "a"))
        with pytest.raises(NotAddable):
            build_step(state, fat_edge("p1", "a"))

    def test_inactive_player_rejected(self, two_fat):
        ni = normalize(two_fat, F(1))
        state = SearchState(ni, Matching.empty(), "p1")
        with pytest.raises(NotAddable):
            build_step(state, fat_edge("p2", "b"))


class TestContractStep:
    def test_terminates_on_root(self, two_fat):
        ni = normalize(two_fat, F(1))
        state = SearchState(ni, Matching.empty(), "p1")
        build_step(state, fat_edge("p1", "b"))
        result = contract_step(state)
        assert result is not None
        assert result.edge_of("p1") == fat_edge("p1", "b")

    def test_no_removable_blocker(self, shared_single):
        ni = normalize(shared_single, F(1))
        state = SearchState(ni, Matching.of([fat_edge("p1", "r")]), "p2")
        build_step(state, fat_edge("p2", "r"))
        with pytest.raises(NoRemovableBlocker):
            contract_step(state)

    def test_swap_and_truncate(self, thin_chain):
        ni = normalize(thin_chain, F(1))
        blocked = thin_edge("p1", "t1", "t2")
        state = SearchState(ni, Matching.of([blocked]), "p2")
        build_step(state, thin_edge("p2", "t1", "t2"))
        build_step(state, thin_edge("p1", "t3", "t4"))
        result = contract_step(state)
        assert result is None
        assert state.matching.edge_of("p1") == thin_edge("p1", "t3", "t4")
        assert len(state.blockers) == 1
        assert state.blockers[0].blocking == ()
        assert state.active_order == ["p2"]
        assert state.covered == {"t1", "t2"}


class TestSignature:
    def test_empty(self, two_fat):
        ni = normalize(two_fat, F(1))
        state = SearchState(ni, Matching.empty(), "p1")
        assert signature(state).entries == (INFINITY,)

    def test_build_decreases(self, shared_single):
        ni = normalize(shared_single, F(1))
        state = SearchState(ni, Matching.of([fat_edge("p1", "r")]), "p2")
        before = signature(state)
        build_step(state, fat_edge("p2", "r"))
        after = signature(state)
        assert after.entries == (1, INFINITY)
        assert after < before

    def test_decrement_decreases(self):
        assert Signature((0, INFINITY)) < Signature((1, INFINITY))
        assert Signature((1, INFINITY)) < Signature((INFINITY,))


class TestExtendMatching:
    def test_two_fat_extension(self, two_fat):
        ni = normalize(two_fat, F(1))
        out = extend_matching(ni, Matching.of([fat_edge("p1", "a")]), "p2")
        assert out.extended
        assert out.matching.edge_of("p2") == fat_edge("p2", "b")
        assert out.matching.edge_of("p1") == fat_edge("p1", "a")

    def test_stuck_on_shared_single(self, shared_single):
        ni = normalize(shared_single, F(1))
        out = extend_matching(ni, Matching.of([fat_edge("p1", "r")]), "p2")
        assert out.status == "stuck"
        assert [b.candidate for b in out.state.blockers] == [fat_edge("p2", "r")]
        assert out.state.blockers[0].blocking == (fat_edge("p1", "r"),)

    def test_empty_matching_one_build_one_contract(self, two_fat):
        ni = normalize(two_fat, F(1))
        out = extend_matching(ni, Matching.empty(), "p1")
        assert out.extended
        assert [ev.kind for ev in out.trace] == ["build", "terminate"]

    def test_already_matched_rejected(self, two_fat):
        ni = normalize(two_fat, F(1))
        with pytest.raises(PlayerAlreadyMatched):
            extend_matching(ni, Matching.of([fat_edge("p1", "a")]), "p1")

    def test_matched_players_stay_matched(self):
        for seed in range(6):
            inst = generate_instance("uniform", 4, 8, seed)
            t_star, _ = compute_T_star(inst)
            if t_star == 0:
                continue
            ni = normalize(inst, t_star)
            matching = Matching.empty()
            for p in inst.players:
                out = extend_matching(ni, matching, p)
                assert out.extended
                before = matching.players()
                matching = out.matching
                assert before | {p} == matching.players()
                assert len(matching) == len(before) + 1


class TestFindPerfectMatching:
    def test_two_fat(self, two_fat):
        ni = normalize(two_fat, F(1))
        out = find_perfect_matching(ni)
        assert out.perfect and len(out.matching) == 2

    def test_ten_thin_single_player(self, ten_thin):
        ni = normalize(ten_thin, F(1))
        out = find_perfect_matching(ni)
        assert out.perfect
        (edge,) = out.matching
        assert edge.kind == THIN
        assert edge.bundle == frozenset({"r1", "r2", "r3"})

    def test_shared_single_stuck(self, shared_single):
        ni = normalize(shared_single, F(1))
        out = find_perfect_matching(ni)
        assert out.status == "stuck"

    def test_random_policy_still_succeeds(self):
        for seed in range(5):
            inst = generate_instance("uniform", 4, 8, seed)
            t_star, _ = compute_T_star(inst)
            if t_star == 0:
                continue
            ni = normalize(inst, t_star)
            out = find_perfect_matching(ni, rng=random.Random(seed))
            assert out.perfect
            repeat = find_perfect_matching(ni, rng=random.Random(seed))
            assert repeat.matching == out.matching

    def test_random_policy_respects_invariants(self):
        for seed in range(8):
            inst = generate_instance("clustered-desire", 5, 9, seed)
            t_star, _ = compute_T_star(inst)
            if t_star == 0:
                continue
            ni = normalize(inst, t_star)

            def audit(state):
                report = check_state_invariants(ni, state)
                assert report.passed, report.violations

            out = find_perfect_matching(ni, rng=random.Random(seed * 31), on_step=audit)
            assert out.perfect
            for ext in out.extensions:
                assert monitor_signatures(ext.signatures, inst.num_players).passed


class TestCompleteAllocation:
    def test_leftovers_to_first_desiring_player(self):
        inst = make_instance(
            {"a": "1", "b": "1", "c": "1/2"},
            {"p1": ["a"], "p2": ["b", "c"], "p3": ["b", "c"]},
            players=["p1", "p2", "p3"],
        )
        matching = Matching.of(
            [fat_edge("p1", "a"), fat_edge("p2", "b"), fat_edge("p3", "c")]
        )
        allocation = complete_allocation(inst, matching, F(1, 2))
        assert allocation == {"p1": {"a"}, "p2": {"b"}, "p3": {"c"}}

        inst2 = make_instance(
            {"a": "1", "b": "1", "x": "1/3"},
            {"p1": ["a"], "p2": ["b", "x"], "p3": ["b", "x"]},
            players=["p1", "p2", "p3"],
        )
        matching2 = Matching.of(
            [fat_edge("p1", "a"), fat_edge("p2", "b"), fat_edge("p3", "x")]
        )
        allocation2 = complete_allocation(inst2, matching2, F(1, 3))
        assert allocation2["p2"] == {"b"}  # x already matched to p3

    def test_leftover_desired_by_nobody_goes_to_first_player(self, two_fat):
        inst = make_instance(
            {"a": "1", "b": "1", "junk": "1/5"},
            {"p1": ["a", "b"], "p2": ["a", "b"]},
        )
        matching = Matching.of([fat_edge("p1", "a"), fat_edge("p2", "b")])
        allocation = complete_allocation(inst, matching, F(1))
        assert allocation["p1"] == {"a", "junk"}

    def test_not_perfect_rejected(self, two_fat):
        with pytest.raises(MatchingNotPerfect):
            complete_allocation(two_fat, Matching.of([fat_edge("p1", "a")]), F(1))

    def test_partition_and_guarantee(self):
        for seed in range(6):
            inst = generate_instance("uniform", 4, 8, seed)
            t_star, _ = compute_T_star(inst)
            if t_star == 0:
                continue
            ni = normalize(inst, t_star)
            out = find_perfect_matching(ni)
            allocation = complete_allocation(inst, out.matching, t_star)
            assert verify_allocation(inst, allocation) >= GUARANTEE_FRACTION * t_star


class TestDeepChain:
    """A hand-built family forcing a full cascade of truncating contracts.

    Players p1..p(k-1) hold pair bundles; the last player's only edge sits on
    p1's bundle, p1's only alternative sits on p2's, and so on, with a free
    pair at the end of the chain.  Inserting the last player builds a
    blocker chain of depth k and unwinds it with k-1 swaps.
    """

    K = 6

    def chain_instance(self):
        k = self.K
        values = {}
        desires = {}
        pair = lambda i: [f"t{i}a", f"t{i}b"]
        for i in range(1, k):
            for r in pair(i):
                values[r] = "3/23"
        values["u1"] = values["u2"] = "3/23"
        for i in range(1, k - 1):
            desires[f"p{i}"] = pair(i) + pair(i + 1)
        desires[f"p{k - 1}"] = pair(k - 1) + ["u1", "u2"]
        desires[f"p{k}"] = pair(1)
        return make_instance(values, desires, players=[f"p{i}" for i in range(1, k + 1)])

    def test_cascade_of_swaps(self):
        k = self.K
        inst = self.chain_instance()
        ni = normalize(inst, F(1))

        audits = []

        def audit(state):
            report = check_state_invariants(ni, state)
            if not report.passed:
                audits.append(report.violations)

        out = find_perfect_matching(ni, on_step=audit)
        assert not audits
        assert out.perfect
        last = out.extensions[-1]
        kinds = [ev.kind for ev in last.trace]
        assert kinds.count("build") == k
        assert kinds.count("contract") == k - 1
        assert kinds.count("terminate") == 1
        # The chain reaches depth k before unwinding.
        assert max(ev.blocker_index for ev in last.trace if ev.kind == "build") == k - 1
        # Unwinding touches blockers from the deep end back to the root.
        contract_indices = [
            ev.blocker_index for ev in last.trace if ev.kind in ("contract", "terminate")
        ]
        assert contract_indices == list(range(k - 1, -1, -1))
        assert out.matching.edge_of(f"p{k}").bundle == frozenset({"t1a", "t1b"})

    def test_chain_signatures_monotone(self):
        inst = self.chain_instance()
        ni = normalize(inst, F(1))
        out = find_perfect_matching(ni)
        for ext in out.extensions:
            report = monitor_signatures(ext.signatures, inst.num_players)
            assert report.passed, report.violations


class TestClusteredStress:
    def test_larger_clustered_instances(self):
        for seed in range(4):
            inst = generate_instance("clustered-desire", 8, 14, seed)
            t_star, _ = compute_T_star(inst)
            if t_star == 0:
                continue
            ni = normalize(inst, t_star)

            def audit(state):
                report = check_state_invariants(ni, state)
                assert report.passed, report.violations

            out = find_perfect_matching(ni, on_step=audit)
            assert out.perfect
            allocation = complete_allocation(inst, out.matching, t_star)
            assert verify_allocation(inst, allocation) >= GUARANTEE_FRACTION * t_star


class TestInvariantsUnderFuzz:
    def test_audited_search(self):
        for seed in range(10):
            inst = generate_instance("uniform", 4, 8, seed)
            t_star, _ = compute_T_star(inst)
            if t_star == 0:
                continue
            ni = normalize(inst, t_star)

            def audit(state):
                report = check_state_invariants(ni, state)
                assert report.passed, report.violations

            out = find_perfect_matching(ni, on_step=audit)
            assert out.perfect

    def test_thin_edges_below_twice_threshold(self):
        for seed in range(10):
            inst = generate_instance("uniform", 4, 8, seed)
            t_star, _ = compute_T_star(inst)
            if t_star == 0:
                continue
            ni = normalize(inst, t_star)
            out = find_perfect_matching(ni)
            for edge in out.matching:
                if edge.kind == THIN:
                    worth = sum(ni.value(r) for r in edge.bundle)
                    assert ni.threshold <= worth < 2 * ni.threshold
