"""Request/response with a delaying opponent.

Player 1 owns v0 (a request q) and may answer directly (v2, p) or detour
through v1 first.  We ask how fast Player 0 can guarantee an answer, build
a strategy for that bound and check it independently.
"""
from pltlgames import PltlGame, parse_arena, parse_formula
from pltlgames.game import dump_strategy
from pltlgames.solve import find_counterexample, membership, optimize_unipolar

ARENA = """\
init v0
vertex v0 1 label q
vertex v1 0
vertex v2 0 label p
edge v0 v1
edge v0 v2
edge v1 v2
edge v2 v0
"""

g = PltlGame(parse_arena(ARENA), parse_formula("G(q -> F<=x p)"))

for n in range(4):
    print(f"x = {n}: Player 0 wins = {membership(g, 0, {'x': n}).holds}")

best = optimize_unipolar(g, "min-max")
print(f"\nleast bound: {best.value}  (queries: {best.stats.queries}, "
      f"search bound: {best.bound})")
print(dump_strategy(best.strategy, g.arena))

tight = {"x": best.value - 1}
cex = find_counterexample(g, 0, tight, best.strategy)
print(f"same strategy against x = {tight['x']}: losing play "
      f"{' '.join(cex.prefix)} ({' '.join(cex.cycle)})^w")
