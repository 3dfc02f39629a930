"""Seeded corpus builders shared by the property-style tests."""

from __future__ import annotations

import random

from ctxkit.core import Context, Instance, Signature


def random_signature(rng: random.Random, max_states=3, max_entities=2, max_times=3) -> Signature:
    return Signature(
        tuple(f"s{i}" for i in range(rng.randint(1, max_states))),
        tuple(f"e{i}" for i in range(rng.randint(1, max_entities))),
        tuple(str(i) for i in range(rng.randint(1, max_times))),
    )


def random_instance(rng: random.Random, sig: Signature) -> Instance:
    return Instance(
        sig.entities,
        sig.times,
        tuple(rng.choice(sig.states) for _ in range(sig.cell_count())),
    )


def random_context(rng: random.Random, max_instances=20, **kwargs) -> Context:
    sig = random_signature(rng, **kwargs)
    count = rng.randint(1, max_instances)
    return Context(sig, tuple(random_instance(rng, sig) for _ in range(count)))


def as_tables(ctx: Context):
    """Plain-dict view for feeding the brute-force oracles."""
    return [inst.table() for inst in ctx.instances]


def random_formula(rng: random.Random, atoms=("p", "q"), depth=4):
    """Seeded random AST over the full connective set."""
    from ctxkit.modal_logic import (
        BOTTOM, TOP, And, Atom, Box, Diamond, Iff, Implies, Not, Or,
    )

    if depth == 0 or rng.random() < 0.3:
        roll = rng.random()
        if roll < 0.8:
            return Atom(rng.choice(atoms))
        return TOP if roll < 0.9 else BOTTOM
    shape = rng.choice((Not, Box, Diamond, And, Or, Implies, Iff))
    if shape in (Not, Box, Diamond):
        return shape(random_formula(rng, atoms, depth - 1))
    return shape(
        random_formula(rng, atoms, depth - 1),
        random_formula(rng, atoms, depth - 1),
    )


def random_kripke(rng: random.Random, max_worlds=5, atoms=("p", "q"), density=None):
    """Seeded random Kripke model; density defaults to a random draw."""
    from ctxkit.modal_logic import KripkeModel

    worlds = tuple(f"w{i}" for i in range(rng.randint(1, max_worlds)))
    d = rng.random() if density is None else density
    relation = frozenset(
        (a, b) for a in worlds for b in worlds if rng.random() < d
    )
    valuation = {
        atom: frozenset(w for w in worlds if rng.random() < 0.5) for atom in atoms
    }
    return KripkeModel(worlds, relation, valuation)
