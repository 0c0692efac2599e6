"""Infinite games on graphs with parametric LTL winning conditions."""
from .formula import FormulaError, parse_formula, eval_lasso, LassoWord
from .game import Arena, ArenaError, MealyStrategy, parse_arena, dump_strategy, parse_strategy
from .parity import ParityGame, solve_parity, brute_force_parity, verify_parity_strategy
from .solve import (
    PltlGame, Objective, OptimizationResult, Status, emptiness, finiteness, membership,
    optimize_unipolar, prompt_optimum, synthesize_strategy, universality, verify_strategy,
)

__version__ = "0.1.0"
