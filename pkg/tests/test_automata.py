import random

import pytest

from pltlgames.automata import (
    NBA, ConfluenceError, Constraint, DPAState, GNBA, ObligationState, build_gnba,
    check_nonconfluent, check_unambiguous, complement_dpa, compute_priority, degeneralize,
    determinize_with_counters, dpa_accepts_lasso, dump_automaton, encode_letter,
    nba_lasso_accepts, parse_automaton, pltl_f_pipeline, remove_unproductive,
    window_constraints,
)
from pltlgames.formula import (
    Atom, FormulaError, LassoWord, NegAtom, atoms, eval_lasso, expand_choice_points,
    f_variables, parse_formula, size,
)
from randgen import random_formula, random_lasso, random_valuation

P = parse_formula
E, Pp = frozenset(), frozenset({"p"})
EE_P = LassoWord((E, E), (Pp,))
PHI1 = P("F<=x p")


def lassos(n, seed, props=("p", "q")):
    rng = random.Random(seed)
    return [random_lasso(rng, props=props) for _ in range(n)]


def letter(a, props):
    return encode_letter(props, a.ap)


class TestRelaxedConstruction:
    """The construction with windows on plain truth sets, kept for comparison."""

    def test_phi1_states(self):
        g = build_gnba(PHI1, relaxed=True)
        f, np_ = PHI1, NegAtom("p")
        states = {s: i for i, s in enumerate(g.states)}
        assert set(states) == {frozenset({Atom("p"), f}), frozenset({np_, f}), frozenset({np_})}
        assert g.initial == {states[frozenset({Atom("p"), f})], states[frozenset({np_, f})]}
        (tag, members), = g.acceptance
        assert tag == f
        assert members == {states[frozenset({Atom("p"), f})], states[frozenset({np_})]}
        succ = g.delta[states[frozenset({np_, f})]][letter(g, E)]
        assert {g.states[i] for i in succ} == {frozenset({Atom("p"), f}), frozenset({np_, f})}
        assert g.delta[states[frozenset({np_})]][letter(g, E)] == (states[frozenset({np_})],)

    def test_phi1_degeneralizes_to_six_states(self):
        nba, lifted = degeneralize(build_gnba(PHI1, relaxed=True))
        assert len(nba) == 6
        assert set(lifted) == {PHI1}

    def test_window_example(self):
        g = build_gnba(PHI1, relaxed=True)
        trimmed = remove_unproductive(degeneralize(g)[0])
        for x, expected in ((2, True), (1, False)):
            cs = window_constraints(trimmed, g, {"x": x})
            assert cs[0].bound == x + 1
            assert nba_lasso_accepts(trimmed, cs, EE_P) is expected
            assert dpa_accepts_lasso(determinize_with_counters(trimmed, cs), EE_P) is expected

    def test_relaxed_windows_miss_early_witnesses(self):
        # p holds at once, so F<=0 p is true, but every run must also keep
        # F<=x p alive at the p-free positions, where no window can be met.
        w = LassoWord((), (Pp, E))
        assert eval_lasso(PHI1, {"x": 0}, w)
        g = build_gnba(PHI1, relaxed=True)
        trimmed = remove_unproductive(degeneralize(g)[0])
        assert not nba_lasso_accepts(trimmed, window_constraints(trimmed, g, {"x": 0}), w)
        p = pltl_f_pipeline(PHI1, {"x": 0})
        assert nba_lasso_accepts(p.trimmed, p.constraints, w)
        assert dpa_accepts_lasso(p.dpa, w)


class TestGnba:
    def test_atom(self):
        g = build_gnba(Atom("p"))
        assert len(g) == 2 and len(g.initial) == 1
        nba = remove_unproductive(degeneralize(g)[0])
        assert nba_lasso_accepts(nba, (), LassoWord((Pp,), (E,)))
        assert not nba_lasso_accepts(nba, (), LassoWord((), (E,)))

    def test_obligation_states_for_phi1(self):
        g = build_gnba(PHI1)
        assert all(isinstance(s, ObligationState) for s in g.states)
        (tag, members), = g.acceptance
        # a target is any state that is not owed the eventuality or fulfils it
        for i, s in enumerate(g.states):
            assert (i in members) == (PHI1 not in s.needs or Atom("p") in s.truths)

    def test_rejects_bounded_always(self):
        with pytest.raises(FormulaError):
            build_gnba(P("G<=y p"))

    def test_rejects_unexpanded_choice_points(self):
        with pytest.raises(FormulaError):
            build_gnba(P("F<=x p | F<=z q"))
        build_gnba(expand_choice_points(P("F<=x p | F<=z q"), {"x": 1, "z": 0}))

    def test_size_bounds_on_samples(self):
        rng = random.Random(41)
        for _ in range(100):
            phi = random_formula(rng, 6)
            alpha = random_valuation(rng, f_variables(phi))
            psi = expand_choice_points(phi, alpha)
            g = build_gnba(psi)
            assert len(g) <= 2 ** (size(psi) + len(atoms(psi)))
            assert len(g.acceptance) < size(psi)
            nba, _ = degeneralize(g)
            assert len(nba) == len(g) * (len(g.acceptance) + 1)


class TestDegeneralize:
    def test_no_acceptance_sets(self):
        g = build_gnba(P("X p"))
        assert not g.acceptance
        nba, _ = degeneralize(g)
        assert len(nba) == len(g) and nba.accepting == frozenset(range(len(nba)))

    def test_language_preserved(self):
        rng = random.Random(42)
        for _ in range(20):
            phi = random_formula(rng, 6, fvars=())
            nba = degeneralize(build_gnba(phi))[0]
            trimmed = remove_unproductive(nba)
            for w in lassos(50, rng.random()):
                truth = eval_lasso(phi, {}, w)
                assert nba_lasso_accepts(nba, (), w) == truth
                assert nba_lasso_accepts(trimmed, (), w) == truth


class TestTrimAndChecks:
    def test_dead_branch_removed(self):
        phi = P("(p U ff) | X q")
        nba = degeneralize(build_gnba(phi))[0]
        trimmed = remove_unproductive(nba)
        assert len(trimmed) < len(nba)
        for w in lassos(50, 1):
            assert nba_lasso_accepts(trimmed, (), w) == nba_lasso_accepts(nba, (), w)

    def test_trim_is_idempotent(self):
        trimmed = remove_unproductive(degeneralize(build_gnba(P("p U q")))[0])
        again = remove_unproductive(trimmed)
        assert dump_automaton(again) == dump_automaton(trimmed)

    def test_phi1_pipeline_is_unambiguous_and_nonconfluent(self):
        p = pltl_f_pipeline(PHI1, {"x": 2})
        assert check_unambiguous(p.nba)
        assert check_nonconfluent(p.trimmed)

    def test_two_runs_are_ambiguous(self):
        a = NBA(("p",), frozenset({0, 1}), ({1: (0,)}, {1: (1,)}), frozenset({0, 1}))
        assert not check_unambiguous(a)

    def test_merge_is_confluent(self):
        a = NBA(("p",), frozenset({0, 1}), ({0: (2,)}, {0: (2,)}, {0: (2,)}), frozenset({2}))
        assert not check_nonconfluent(a)
        with pytest.raises(ConfluenceError):
            determinize_with_counters(a)

    def test_random_pipeline_automata(self):
        rng = random.Random(43)
        for _ in range(40):
            phi = random_formula(rng, 6)
            p = pltl_f_pipeline(phi, random_valuation(rng, f_variables(phi)))
            assert check_unambiguous(p.trimmed)
            assert check_nonconfluent(p.trimmed)


class TestDeterminization:
    def test_priorities(self):
        assert compute_priority(DPAState((E, E), (0, 0), {})) == 1
        s = DPAState((frozenset({0}), frozenset({1}), E), (1, 0, 0), {})
        assert compute_priority(s) == 0
        assert compute_priority(DPAState((frozenset({0}), E), (0, 0), {})) == 1
        with pytest.raises(ValueError):
            compute_priority(DPAState((frozenset({0}),), (0,), {}))

    def test_phi1_example(self):
        p = pltl_f_pipeline(PHI1, {"x": 2})
        assert dpa_accepts_lasso(p.dpa, EE_P)
        assert not dpa_accepts_lasso(p.dpa, LassoWord((), (E,)))
        assert not dpa_accepts_lasso(pltl_f_pipeline(PHI1, {"x": 1}).dpa, EE_P)

    def test_plain_ltl_path(self):
        rng = random.Random(44)
        for _ in range(15):
            phi = random_formula(rng, 6, fvars=())
            trimmed = remove_unproductive(degeneralize(build_gnba(phi))[0])
            d = determinize_with_counters(trimmed)
            for w in lassos(50, rng.random()):
                assert dpa_accepts_lasso(d, w) == nba_lasso_accepts(trimmed, (), w)

    def test_state_invariants_and_bounds(self):
        rng = random.Random(45)
        for _ in range(30):
            phi = random_formula(rng, 6)
            alpha = random_valuation(rng, f_variables(phi))
            p = pltl_f_pipeline(phi, alpha, check=True)
            n = len(p.trimmed)
            assert len(set(p.dpa.priority)) <= 2 * n + 1
            prod = 1
            for c in p.constraints:
                prod *= c.bound + 1
            assert len(p.dpa) <= 2 ** ((n + 1) ** 2) * prod ** n
            assert all(len(row) == 2 ** len(p.dpa.ap) for row in p.dpa.delta)

    def test_complement(self):
        p = pltl_f_pipeline(P("G(q -> F<=x p)"), {"x": 1})
        comp = complement_dpa(p.dpa)
        assert all(b == a + 1 for a, b in zip(p.dpa.priority, comp.priority))
        double = complement_dpa(comp)
        for w in lassos(100, 2):
            assert dpa_accepts_lasso(comp, w) != dpa_accepts_lasso(p.dpa, w)
            assert dpa_accepts_lasso(double, w) == dpa_accepts_lasso(p.dpa, w)


class TestDumps:
    @pytest.mark.parametrize("stage", ["gnba", "nba", "trimmed", "dpa"])
    def test_round_trip(self, stage):
        p = pltl_f_pipeline(P("G(q -> F<=x p) & F<=z q"), {"x": 1, "z": 2})
        obj = getattr(p, stage)
        cs = p.constraints if stage == "trimmed" else ()
        text = dump_automaton(obj, cs)
        back, cs2 = parse_automaton(text)
        assert dump_automaton(back, cs2) == text

    def test_dpa_dump_header(self):
        text = dump_automaton(pltl_f_pipeline(PHI1, {"x": 0}).dpa)
        lines = text.splitlines()
        assert lines[0].startswith("States: ")
        assert lines[2].startswith("Acceptance: parity ")
        assert lines[3] == "AP: p"

    def test_constraint_line(self):
        p = pltl_f_pipeline(PHI1, {"x": 2})
        text = dump_automaton(p.trimmed, p.constraints)
        assert any(l.startswith("Constraint: 0 b=3 F={") for l in text.splitlines())

    def test_constraint_bound_positive(self):
        with pytest.raises(ValueError):
            Constraint(frozenset(), 0)
