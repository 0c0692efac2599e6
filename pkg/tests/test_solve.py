import itertools

import pytest

from pltlgames.formula import FormulaError, parse_formula, variables
from pltlgames.game import MealyStrategy, positional_strategy
from pltlgames.solve import (
    BoundError, Objective, PltlGame, Status, compute_search_bound, condition_dpa, emptiness,
    find_counterexample, finiteness, membership, optimize_unipolar, prompt_optimum,
    synthesize_strategy, universality, verify_strategy,
)
from conftest import PHI1, PHI2, PHI3, game, load_arena


class TestMembership:
    def test_loop(self):
        assert membership(game("a-loop", PHI1), 0, {"x": 0}).holds

    def test_path(self):
        g = game("a-path", PHI1)
        assert not membership(g, 0, {"x": 1}).holds
        assert membership(g, 0, {"x": 2}).holds

    def test_stall(self):
        g = game("a-stall", PHI2)
        for n in range(6):
            assert not membership(g, 0, {"x": n}).holds
            assert membership(g, 1, {"x": n}).holds

    def test_unpacks_to_answer_and_strategy(self):
        holds, strategy = membership(game("a-loop", PHI1), 0, {"x": 0})
        assert holds and isinstance(strategy, MealyStrategy)

    def test_mixed_polarity_is_flagged(self):
        g = game("a-ppn", "G<=y p & F<=x p")
        res = membership(g, 0, {"x": 0, "y": 1})
        assert res.holds
        assert any("unrolled" in n for n in res.stats.notes)
        assert not membership(g, 0, {"x": 0, "y": 2}).holds

    def test_missing_binding(self):
        with pytest.raises(FormulaError):
            membership(game("a-loop", PHI1), 0, {})

    def test_routes_agree(self):
        cases = [("a-delay", PHI2), ("a-path", "F<=x p & F<=z !p"), ("a-ppn", "G<=y p | G<=w !p"),
                 ("a-stall", "G(q -> F<=x p) | F<=z G q"), ("a-pq", "F<=x p & F<=z q")]
        for arena, text in cases:
            g = game(arena, text)
            names = sorted(variables(g.formula))
            for values in itertools.product(range(7), repeat=len(names)):
                if sum(values) > 6:
                    continue
                alpha = dict(zip(names, values))
                assert (membership(g, 0, alpha).holds
                        == membership(g, 0, alpha, expand=True).holds), (arena, text, alpha)

    def test_upward_closure(self):
        g = game("a-pq", "F<=x p & F<=z q")
        for x, z in itertools.product(range(5), repeat=2):
            if membership(g, 0, {"x": x, "z": z}).holds:
                assert membership(g, 0, {"x": x + 1, "z": z}).holds
                assert membership(g, 0, {"x": x, "z": z + 1}).holds

    def test_condition_dpa_cached(self):
        phi = parse_formula(PHI1)
        assert condition_dpa(phi, {"x": 3}) is condition_dpa(phi, {"x": 3})


class TestDecisionProblems:
    def test_emptiness(self):
        assert not emptiness(game("a-loop", PHI1)).empty
        assert emptiness(game("a-emptyloop", PHI1)).empty
        assert emptiness(game("a-stall", PHI2)).empty

    def test_emptiness_player1(self):
        assert not emptiness(game("a-stall", PHI2), 1).empty
        assert emptiness(game("a-loop", PHI1), 1).empty

    def test_universality(self):
        assert universality(game("a-loop", PHI3))
        assert not universality(game("a-ppn", PHI3))
        assert universality(game("a-loop", PHI1))
        assert not universality(game("a-path", PHI1))

    def test_finiteness(self):
        assert not finiteness(game("a-loop", PHI1))
        assert finiteness(game("a-ppn", PHI3))
        assert not finiteness(game("a-loop", PHI3))
        assert finiteness(game("a-emptyloop", PHI1))

    def test_ltl_condition(self):
        g = game("a-choice", "F G p")
        assert not emptiness(g).empty and universality(g) and finiteness(g)
        g = game("a-emptyloop", "G F p")
        assert emptiness(g).empty and not universality(g)

    def test_emptiness_consistency(self):
        for arena, text in [("a-delay", PHI2), ("a-path", PHI1), ("a-stall", PHI2),
                            ("a-choice", PHI1), ("a-emptyloop", PHI1)]:
            g = game(arena, text)
            e = emptiness(g)
            if e.empty:
                assert not any(membership(g, 0, {"x": n}).holds for n in range(6))
            else:
                b = compute_search_bound(g, emptiness_result=e)
                assert b.bound >= 1 and membership(g, 0, {"x": b.bound}).holds

    def test_bound_needs_nonempty(self):
        with pytest.raises(ValueError):
            compute_search_bound(game("a-emptyloop", PHI1))

    def test_bound_on_loop(self):
        g = game("a-loop", PHI1)
        b = compute_search_bound(g)
        assert b.bound >= 2 and membership(g, 0, {"x": b.bound}).holds


class TestOptimization:
    def test_prompt(self):
        assert prompt_optimum(game("a-loop", PHI1)).value == 0
        assert prompt_optimum(game("a-path", PHI1)).value == 2
        assert prompt_optimum(game("a-delay", PHI2)).value == 2
        assert prompt_optimum(game("a-stall", PHI2)).status is Status.NONE

    def test_prompt_needs_one_variable(self):
        with pytest.raises(FormulaError):
            prompt_optimum(game("a-pq", "F<=x p & F<=z q"))

    def test_min_max_and_min_min(self):
        g = game("a-pq", "F<=x p & F<=z q")
        r = optimize_unipolar(g, Objective.MIN_MAX)
        assert (r.status, r.value, r.valuation) == (Status.VALUE, 3, {"x": 3, "z": 3})
        r = optimize_unipolar(g, Objective.MIN_MIN)
        assert (r.value, r.valuation["z"]) == (1, 1)
        assert membership(g, 0, r.valuation).holds
        assert optimize_unipolar(game("a-delay", PHI2), "min-max").value == 2

    def test_max_objectives(self):
        assert optimize_unipolar(game("a-loop", PHI3), "max-max").status is Status.UNBOUNDED
        r = optimize_unipolar(game("a-ppn", PHI3), "max-max")
        assert (r.value, r.valuation) == (1, {"y": 1})
        assert optimize_unipolar(game("a-ppn", PHI3), "max-min").value == 1
        assert optimize_unipolar(game("a-emptyloop", PHI3), "max-max").status is Status.NONE

    def test_max_max_over_two_variables(self):
        g = game("a-ppn", "G<=y p | G<=w !q")
        r = optimize_unipolar(g, "max-max")
        assert r.status is Status.UNBOUNDED
        g = game("a-ppn", "G<=y p & G<=w X p")
        r = optimize_unipolar(g, "max-max")
        assert (r.value, membership(g, 0, r.valuation).holds) == (1, True)
        assert optimize_unipolar(g, "max-min").value == 0

    def test_sort_mismatch(self):
        with pytest.raises(FormulaError):
            optimize_unipolar(game("a-loop", PHI1), "max-max")
        with pytest.raises(FormulaError):
            optimize_unipolar(game("a-loop", PHI3), "min-min")
        with pytest.raises(FormulaError):
            optimize_unipolar(game("a-loop", "F<=x p & G<=y p"), "min-max")

    def test_cap(self):
        r = prompt_optimum(game("a-path", PHI1), max_bound=1)
        assert r.status is Status.NONE and r.capped and r.bound == 1

    def test_jobs_do_not_change_results(self):
        g = game("a-pq", "F<=x p & F<=z q")
        a = optimize_unipolar(g, "min-min", jobs=1)
        b = optimize_unipolar(g, "min-min", jobs=3)
        assert (a.value, a.valuation, a.record()) == (b.value, b.valuation, b.record())


class TestStrategies:
    def test_loop(self):
        s = synthesize_strategy(game("a-loop", PHI1), 0, {"x": 0})
        assert s.memory.size >= 1 and s.next_move("v0", s.memory.initial) == "v0"

    def test_delay(self):
        g = game("a-delay", PHI2)
        s = synthesize_strategy(g, 0, {"x": 2})
        assert {v for v, _ in s.moves} <= {"v1", "v2"}
        assert verify_strategy(g, 0, {"x": 2}, s)
        assert not verify_strategy(g, 0, {"x": 1}, s)

    def test_stall_player1(self):
        g = game("a-stall", PHI2)
        s = synthesize_strategy(g, 1, {"x": 3})
        assert set(s.moves.values()) == {"v0"}
        assert verify_strategy(g, 1, {"x": 3}, s)

    def test_loser_has_no_strategy(self):
        with pytest.raises(ValueError):
            synthesize_strategy(game("a-stall", PHI2), 0, {"x": 3})

    def test_relabeled_arena(self):
        s = synthesize_strategy(game("a-loop", PHI1), 0, {"x": 0})
        g = game("a-emptyloop", PHI1)
        assert not verify_strategy(g, 0, {"x": 0}, s)

    def test_corrupted_move_gives_counterexample(self):
        g = game("a-choice", PHI1)
        s = synthesize_strategy(g, 0, {"x": 1})
        assert s.next_move("v0", s.memory.initial) == "v1"
        moves = dict(s.moves)
        moves[("v0", s.memory.initial)] = "v2"
        bad = MealyStrategy(0, s.memory, moves)
        cex = find_counterexample(g, 0, {"x": 1}, bad)
        assert cex is not None and cex.cycle == ("v2",)
        cex.check(g.arena)

    def test_missing_move_fails(self):
        g = game("a-choice", PHI1)
        assert not verify_strategy(g, 0, {"x": 1}, positional_strategy(0, {"v1": "v1"}))

    def test_blinking_strategy(self):
        from pltlgames.formula import alternating_color_rewrite
        from pltlgames.game import expand_alternating_color
        a = expand_alternating_color(load_arena("a-delay"), "c")
        phi = alternating_color_rewrite(parse_formula(PHI2), (), "c")
        g = PltlGame(a, phi)
        res = membership(g, 0, {}, blinking=True)
        assert res.holds
        assert verify_strategy(g, 0, {}, res.strategy, blinking=True)


def test_bound_error_type():
    assert issubclass(BoundError, RuntimeError)
