"""Reproducible example and corpus generators.

Everything here is a pure function of its arguments (plus the seed where one
is taken): same inputs, byte-identical artifacts, on every platform.
"""

from __future__ import annotations

import random
from typing import Sequence

from ctxkit.core import Context, Instance, Signature, build_full_space, restrict
from ctxkit.modal_logic import KripkeModel


def gen_alice_bob(horizon: int, guard: int | None = None) -> Context:
    """Two flatmates over `horizon` hours, states Home/Out, one house rule:
    whenever Bob is at home, Alice is at home an hour later.

    The context is the full function space filtered by that rule.
    """
    if horizon < 2:
        raise ValueError("horizon must be at least 2")
    sig = Signature(
        ("Home", "Out"),
        ("Alice", "Bob"),
        tuple(str(t) for t in range(horizon)),
    )
    full = build_full_space(sig, guard)
    alice, bob = 0, 1

    def rule(inst: Instance) -> bool:
        return all(
            inst.value_at(bob, t) != "Home" or inst.value_at(alice, t + 1) == "Home"
            for t in range(horizon - 1)
        )

    return restrict(full, rule)


def gen_alice_bob_odd(horizon: int, guard: int | None = None) -> Context:
    """gen_alice_bob additionally requiring Bob to be home at every odd hour."""
    base = gen_alice_bob(horizon, guard)
    bob = 1

    def odd_rule(inst: Instance) -> bool:
        return all(
            inst.value_at(bob, t) == "Home" for t in range(1, horizon, 2)
        )

    return restrict(base, odd_rule)


# ---------------------------------------------------------------------------
# the mini-game: turn information and determinability
# ---------------------------------------------------------------------------
#
# Rules (fixed, and pinned by the tests):
#   * board: 2x2 grid, cells c00 c01 c10 c11 (row, column);
#   * two tokens, P1 starting on c00 and P2 on c11; tokens may share a cell;
#   * four observed times 0..3, one move between consecutive times;
#   * turns alternate starting with P1, so P1 acts on steps 0->1 and 2->3
#     and P2 acts on step 1->2;
#   * the acting player either stays put or steps to an orthogonally
#     adjacent cell; the idle token does not move.
#
# base encoding: the state of a token is its cell. The same board position
# can then occur on different players' turns, and the futures differ, which
# breaks determinability.
#
# turn_tracked encoding: each token's state is cell:bit, bit 1 iff its owner
# acts next. The bit alternates as turns progress, snapshots now reveal the
# mover, and determinability is restored.

_CELLS = ("c00", "c01", "c10", "c11")
_ADJACENT = {
    "c00": ("c01", "c10"),
    "c01": ("c00", "c11"),
    "c10": ("c00", "c11"),
    "c11": ("c01", "c10"),
}
MINIGAME_HORIZON = 4


def _minigame_moves(cell: str) -> tuple[str, ...]:
    return (cell,) + _ADJACENT[cell]


def _minigame_position_rows() -> list[tuple[tuple[str, ...], tuple[str, ...]]]:
    """(P1 positions, P2 positions) over times 0..3 for every legal play."""
    rows = []
    for move1 in _minigame_moves("c00"):        # P1, step 0 -> 1
        for move2 in _minigame_moves("c11"):    # P2, step 1 -> 2
            for move3 in _minigame_moves(move1):  # P1, step 2 -> 3
                rows.append(
                    (("c00", move1, move1, move3), ("c11", "c11", move2, move2))
                )
    return rows


def _turn_bit(player: int, t: int) -> int:
    # P1 (player 0) acts on even steps, P2 on odd ones
    return 1 if t % 2 == player else 0


def gen_minigame() -> tuple[Context, Context]:
    """The alternating-move token game, encoded twice: (base, turn_tracked)."""
    times = tuple(str(t) for t in range(MINIGAME_HORIZON))
    entities = ("P1", "P2")
    rows = _minigame_position_rows()

    base_sig = Signature(_CELLS, entities, times)
    base = Context(
        base_sig,
        tuple(Instance(entities, times, p1 + p2) for p1, p2 in rows),
    )

    tracked_states = tuple(f"{c}:{b}" for c in _CELLS for b in (0, 1))
    tracked_sig = Signature(tracked_states, entities, times)
    tracked_instances = []
    for p1, p2 in rows:
        cells = tuple(
            f"{pos}:{_turn_bit(player, t)}"
            for player, positions in enumerate((p1, p2))
            for t, pos in enumerate(positions)
        )
        tracked_instances.append(Instance(entities, times, cells))
    turn_tracked = Context(tracked_sig, tuple(tracked_instances))
    return base, turn_tracked


# ---------------------------------------------------------------------------
# seeded random corpora
# ---------------------------------------------------------------------------

def gen_random_context(
    seed: int, n_states: int, n_entities: int, n_times: int, count: int
) -> Context:
    """Uniform cellwise sampling of `count` instances; duplicates collapse."""
    if min(n_states, n_entities, n_times) < 1:
        raise ValueError("state, entity, and time counts must be positive")
    if count < 0:
        raise ValueError("count must be non-negative")
    rng = random.Random(seed)
    sig = Signature(
        tuple(f"s{i}" for i in range(n_states)),
        tuple(f"e{i}" for i in range(n_entities)),
        tuple(str(i) for i in range(n_times)),
    )
    instances = tuple(
        Instance(
            sig.entities,
            sig.times,
            tuple(sig.states[rng.randrange(n_states)] for _ in range(sig.cell_count())),
        )
        for _ in range(count)
    )
    return Context(sig, instances)


def gen_random_kripke(
    seed: int, n_worlds: int, atoms: Sequence[str], edge_density: float
) -> KripkeModel:
    """Each ordered world pair becomes an edge with probability edge_density;
    each (atom, world) pair is valuated true with probability one half."""
    if n_worlds < 1:
        raise ValueError("at least one world is required")
    if not 0.0 <= edge_density <= 1.0:
        raise ValueError("edge_density must lie in [0, 1]")
    rng = random.Random(seed)
    worlds = tuple(f"w{i}" for i in range(n_worlds))
    relation = frozenset(
        (a, b) for a in worlds for b in worlds if rng.random() < edge_density
    )
    valuation = {
        atom: frozenset(w for w in worlds if rng.random() < 0.5)
        for atom in tuple(atoms)
    }
    return KripkeModel(worlds, relation, valuation)
