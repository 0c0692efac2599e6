"""Why windows must track obligations, not truth.

If every state where "eventually p" holds must meet the window, then on
p, -, p, -, ... the bound 0 is violated at the gaps even though F<=0 p only
talks about position 0.  The obligation-based automaton accepts the word.
"""
from pltlgames.automata import (
    build_gnba, degeneralize, nba_lasso_accepts, pltl_f_pipeline, remove_unproductive,
    window_constraints,
)
from pltlgames.formula import LassoWord, eval_lasso, parse_formula

phi = parse_formula("F<=x p")
alpha = {"x": 0}
w = LassoWord((), (frozenset({"p"}), frozenset()))

print("semantics:        ", eval_lasso(phi, alpha, w))

relaxed = build_gnba(phi, relaxed=True)
trimmed = remove_unproductive(degeneralize(relaxed)[0])
print("truth windows:    ", nba_lasso_accepts(trimmed, window_constraints(trimmed, relaxed, alpha), w))

p = pltl_f_pipeline(phi, alpha)
print("obligation windows:", nba_lasso_accepts(p.trimmed, p.constraints, w))
print("sizes:", p.sizes())
