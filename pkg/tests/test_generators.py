"""Example generators: counts against the brute-force oracle, game verdicts."""

import pytest

import oracles
from ctxkit.core import SizeGuardError
from ctxkit.determinability import is_determinable
from ctxkit.generators import (
    gen_alice_bob,
    gen_alice_bob_odd,
    gen_minigame,
    gen_random_context,
    gen_random_kripke,
)


def as_int_time_keys(ctx):
    return {
        frozenset(((e, int(t)), s) for (e, t), s in inst.table().items())
        for inst in ctx
    }


# ---------------------------------------------------------------------------
# Alice and Bob
# ---------------------------------------------------------------------------

def test_alice_bob_counts_match_oracle():
    # frozen from the brute-force filter: 36 of 64 at horizon 3, 12 of 16 at 2
    got3 = gen_alice_bob(3)
    assert len(got3) == 36
    assert as_int_time_keys(got3) == {
        oracles.table_key(t) for t in oracles.alice_bob_tables(3)
    }
    assert len(gen_alice_bob(2)) == 12


def test_alice_bob_odd_counts_match_oracle():
    got3 = gen_alice_bob_odd(3)
    assert len(got3) == 12
    assert as_int_time_keys(got3) == {
        oracles.table_key(t) for t in oracles.alice_bob_tables(3, odd=True)
    }
    assert len(gen_alice_bob_odd(2)) == 6


def test_alice_bob_members_satisfy_the_rule():
    for ctx, odd in ((gen_alice_bob(4), False), (gen_alice_bob_odd(4), True)):
        for inst in ctx:
            for t in range(3):
                if inst.value("Bob", str(t)) == "Home":
                    assert inst.value("Alice", str(t + 1)) == "Home"
            if odd:
                assert all(
                    inst.value("Bob", str(t)) == "Home" for t in (1, 3)
                )


def test_alice_bob_odd_is_subset():
    assert set(gen_alice_bob_odd(3)) <= set(gen_alice_bob(3))


def test_alice_bob_horizon_and_guard():
    with pytest.raises(ValueError):
        gen_alice_bob(1)
    with pytest.raises(SizeGuardError):
        gen_alice_bob(3, guard=10)


# ---------------------------------------------------------------------------
# the mini-game
# ---------------------------------------------------------------------------

def test_minigame_contexts_are_total_and_nonempty():
    base, tracked = gen_minigame()
    assert len(base) == 27
    assert len(tracked) == 27
    assert base.signature.times == ("0", "1", "2", "3")
    assert tracked.signature.entities == ("P1", "P2")


def test_minigame_base_breaks_on_turn_ambiguity():
    base, _ = gen_minigame()
    report = is_determinable(base, "windowed")
    assert not report.determinable
    witness = report.witness
    # the witnessing occurrences put the same board position on different
    # players' turns: the times have different parities
    t1 = int(witness.time)
    t2 = int(witness.other_time)
    assert t1 % 2 != t2 % 2
    assert witness.instance.snapshot(witness.time) == witness.other_instance.snapshot(
        witness.other_time
    )


def test_minigame_turn_bit_restores_determinability():
    _, tracked = gen_minigame()
    assert is_determinable(tracked, "windowed").determinable


def test_minigame_verdicts_match_oracle():
    base, tracked = gen_minigame()
    for ctx, expected in ((base, False), (tracked, True)):
        tables = [inst.table() for inst in ctx]
        assert (
            oracles.determinable(
                tables, ctx.signature.entities, ctx.signature.times, "windowed"
            )
            == expected
        )


# ---------------------------------------------------------------------------
# seeded randomness
# ---------------------------------------------------------------------------

def test_random_context_is_reproducible():
    a = gen_random_context(42, 3, 2, 3, 15)
    b = gen_random_context(42, 3, 2, 3, 15)
    assert a == b
    assert gen_random_context(43, 3, 2, 3, 15) != a


def test_random_context_collapses_duplicates():
    ctx = gen_random_context(7, 1, 1, 1, 10)
    assert len(ctx) == 1  # only one possible instance exists


def test_random_kripke_reproducible_and_density_zero():
    a = gen_random_kripke(9, 4, ("p", "q"), 0.5)
    b = gen_random_kripke(9, 4, ("p", "q"), 0.5)
    assert a == b
    empty = gen_random_kripke(9, 4, ("p",), 0.0)
    assert empty.relation == frozenset()
    full = gen_random_kripke(9, 3, ("p",), 1.0)
    assert len(full.relation) == 9


def test_random_generator_input_validation():
    with pytest.raises(ValueError):
        gen_random_context(1, 0, 1, 1, 1)
    with pytest.raises(ValueError):
        gen_random_context(1, 1, 1, 1, -1)
    with pytest.raises(ValueError):
        gen_random_kripke(1, 0, ("p",), 0.5)
    with pytest.raises(ValueError):
        gen_random_kripke(1, 2, ("p",), 1.5)
