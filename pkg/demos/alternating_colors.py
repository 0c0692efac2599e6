"""Emptiness without guessing a bound.

Bounded eventualities are traded for "within one color change": Player 0
recolors every step in an expanded arena, and the rewritten condition is
plain LTL read on every second position.  Player 0 wins that game iff some
bound works in the original one.
"""
from pltlgames import PltlGame, parse_arena, parse_formula
from pltlgames.formula import alternating_color_rewrite
from pltlgames.game import expand_alternating_color
from pltlgames.solve import emptiness, membership

ARENAS = {
    # Player 1 may wait at the request forever
    "stall": """\
init v0
vertex v0 1 label q
vertex v1 0 label p
edge v0 v0
edge v0 v1
edge v1 v0
""",
    # Player 1 may only detour once per request
    "delay": """\
init v0
vertex v0 1 label q
vertex v1 0
vertex v2 0 label p
edge v0 v1
edge v0 v2
edge v1 v2
edge v2 v0
""",
}

phi = parse_formula("G(q -> F<=x p)")
psi = alternating_color_rewrite(phi, (), "c")
print(f"condition {phi}\nrewritten {psi}\n")
for name, text in ARENAS.items():
    g = PltlGame(parse_arena(text), phi)
    expanded = expand_alternating_color(g.arena, "c")
    blink = membership(PltlGame(expanded, psi), 0, {}, blinking=True)
    print(f"{name}: {len(g.arena)} vertices, expanded to {len(expanded)}")
    print(f"  Player 0 wins the color game: {blink.holds}")
    print(f"  some bound wins:             {not emptiness(g).empty}")
