"""SIDL: a logic-based strategic-interaction language and its game manager.

Parse prolog-style game descriptions, execute them in discrete chronons
with chance, simultaneous moves, imperfect information, and countdown
timers, serve them to networked players, and record every run for
deterministic replay.
"""

from .ast import GameSpec
from .engine import (
    Command, FixedPolicy, IdlePolicy, Policy, RandomPolicy, RunResult,
    StepResult, VisibleView, apply_command, is_terminal, make_policy,
    run_headless, step_chronon, visible_view,
)
from .errors import (
    CommandError, DivergenceError, GameInitError, MalformedLog, ParseError,
    SidlError,
)
from .logic import EffectSet, eval_arith, prove_operation, solve, unify
from .parser import ValidationReport, parse_sidl, pretty, validate
from .recorder import replay, replay_file, write_record
from .state import GameState, advance_chronon, commit_effects, init_game

__version__ = "0.1.0"
