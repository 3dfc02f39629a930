"""Finite contexts over states, entities, and time.

An instance assigns one state to every (entity, time) cell and stands for a
single possible timeline. A context is a finite set of instances over a
shared signature; all analysis in this package quantifies over such sets,
which keeps every check decidable by enumeration.

Values are immutable once constructed; operations never mutate their inputs.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, fields
from typing import Callable, Iterable, Iterator, Mapping

DEFAULT_SPACE_GUARD = 2 ** 20
GUARD_ENV_VAR = "CTXKIT_GUARD"

# Characters with separator duty somewhere in the file formats.
_RESERVED_CHARS = set("@=;,#")


class SizeGuardError(ValueError):
    """An enumeration would exceed the configured guard."""

    def __init__(self, needed: int, guard: int, what: str, exact: bool = True):
        self.needed = needed
        self.guard = guard
        bound = str(needed) if exact else f"more than {needed}"
        super().__init__(
            f"{what} needs a guard of at least {bound}; current guard is {guard}"
        )


def effective_guard(guard: int | None, default: int) -> int:
    """Resolve a guard value: explicit argument, then CTXKIT_GUARD, then default."""
    if guard is not None:
        return guard
    env = os.environ.get(GUARD_ENV_VAR)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"{GUARD_ENV_VAR} must be an integer, got {env!r}") from None
    return default


def cached_structural_identity(cls):
    """Cache each instance's hash and gate equality on it.

    These values spend their lives in sets and dict keys; the generated
    dataclass hash re-walks every field on every lookup, which dominates
    profiles once contexts grow.
    """
    names = tuple(f.name for f in fields(cls))

    def __hash__(self):
        try:
            return self._hash_cache
        except AttributeError:
            value = hash((cls.__qualname__,) + tuple(getattr(self, n) for n in names))
            object.__setattr__(self, "_hash_cache", value)
            return value

    def __eq__(self, other):
        if self is other:
            return True
        if type(other) is not cls:
            return NotImplemented
        if hash(self) != hash(other):
            return False
        return all(getattr(self, n) == getattr(other, n) for n in names)

    cls.__hash__ = __hash__
    cls.__eq__ = __eq__
    return cls


def _check_symbols(kind: str, symbols: tuple[str, ...]) -> None:
    seen = set()
    for sym in symbols:
        if not sym or any(c.isspace() or c in _RESERVED_CHARS for c in sym):
            raise ValueError(
                f"invalid {kind} symbol {sym!r}: symbols must be non-empty and "
                "free of whitespace and of the reserved characters @ = ; , #"
            )
        if sym in seen:
            raise ValueError(f"duplicate {kind} symbol {sym!r}")
        seen.add(sym)


@dataclass(frozen=True)
class Signature:
    """State, entity, and time alphabets of a context.

    All three are kept in their given order; for times the position in the
    sequence *is* the temporal order, the labels themselves carry no meaning.
    """

    states: tuple[str, ...]
    entities: tuple[str, ...]
    times: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "entities", tuple(self.entities))
        object.__setattr__(self, "times", tuple(self.times))
        for kind, symbols in (
            ("state", self.states),
            ("entity", self.entities),
            ("time", self.times),
        ):
            if not symbols:
                raise ValueError(f"a signature needs at least one {kind}")
            _check_symbols(kind, symbols)

    def time_index(self, t: str) -> int:
        try:
            return self.times.index(t)
        except ValueError:
            raise ValueError(f"unknown time label {t!r}") from None

    def cell_count(self) -> int:
        return len(self.entities) * len(self.times)


@cached_structural_identity
@dataclass(frozen=True)
class Snapshot:
    """One time slice of an instance: a total entity -> state assignment."""

    entities: tuple[str, ...]
    states: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "entities", tuple(self.entities))
        object.__setattr__(self, "states", tuple(self.states))
        if len(self.entities) != len(self.states):
            raise ValueError("snapshot needs exactly one state per entity")

    @classmethod
    def from_mapping(cls, assignment: Mapping[str, str], entities: Iterable[str]) -> "Snapshot":
        entities = tuple(entities)
        missing = [e for e in entities if e not in assignment]
        if missing or len(assignment) != len(entities):
            raise ValueError("snapshot assignment must cover exactly the given entities")
        return cls(entities, tuple(assignment[e] for e in entities))

    def state_of(self, entity: str) -> str:
        try:
            return self.states[self.entities.index(entity)]
        except ValueError:
            raise ValueError(f"unknown entity {entity!r}") from None

    def render(self) -> str:
        return ";".join(f"{e}={s}" for e, s in zip(self.entities, self.states))


@cached_structural_identity
@dataclass(frozen=True)
class Instance:
    """A total (entity, time) -> state table; one possible timeline.

    Cells are stored entity-major: the states of entity i occupy positions
    i*len(times) .. i*len(times)+len(times)-1, in time order.
    """

    entities: tuple[str, ...]
    times: tuple[str, ...]
    cells: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "entities", tuple(self.entities))
        object.__setattr__(self, "times", tuple(self.times))
        object.__setattr__(self, "cells", tuple(self.cells))
        if len(self.cells) != len(self.entities) * len(self.times):
            raise ValueError(
                f"instance needs {len(self.entities) * len(self.times)} cells, "
                f"got {len(self.cells)}"
            )

    @classmethod
    def from_table(
        cls,
        table: Mapping[tuple[str, str], str],
        entities: Iterable[str],
        times: Iterable[str],
    ) -> "Instance":
        entities = tuple(entities)
        times = tuple(times)
        cells = []
        for e in entities:
            for t in times:
                if (e, t) not in table:
                    raise ValueError(f"table is missing cell {e}@{t}")
                cells.append(table[(e, t)])
        if len(table) != len(cells):
            extra = sorted(set(table) - {(e, t) for e in entities for t in times})
            raise ValueError(f"table has cells outside the signature: {extra}")
        return cls(entities, times, tuple(cells))

    def value_at(self, entity_index: int, time_index: int) -> str:
        return self.cells[entity_index * len(self.times) + time_index]

    def value(self, entity: str, time: str) -> str:
        try:
            ei = self.entities.index(entity)
        except ValueError:
            raise ValueError(f"unknown entity {entity!r}") from None
        try:
            ti = self.times.index(time)
        except ValueError:
            raise ValueError(f"unknown time label {time!r}") from None
        return self.value_at(ei, ti)

    def snapshot_at(self, time_index: int) -> Snapshot:
        n = len(self.times)
        return Snapshot(
            self.entities,
            tuple(self.cells[ei * n + time_index] for ei in range(len(self.entities))),
        )

    def snapshot(self, time: str) -> Snapshot:
        try:
            ti = self.times.index(time)
        except ValueError:
            raise ValueError(f"unknown time label {time!r}") from None
        return self.snapshot_at(ti)

    def table(self) -> dict[tuple[str, str], str]:
        return {
            (e, t): self.value_at(ei, ti)
            for ei, e in enumerate(self.entities)
            for ti, t in enumerate(self.times)
        }


@dataclass(frozen=True)
class Context:
    """A finite set of instances over one signature.

    Set semantics: duplicates collapse on construction, and the kept
    instances are stored in canonical order (lexicographic over the cell
    table, states ordered as in the signature) so that derived output is
    reproducible byte for byte.
    """

    signature: Signature
    instances: tuple[Instance, ...]

    def __post_init__(self):
        sig = self.signature
        state_index = {s: i for i, s in enumerate(sig.states)}
        seen = set()
        unique = []
        for inst in self.instances:
            if inst.entities != sig.entities or inst.times != sig.times:
                raise ValueError(
                    "instance entities/times do not match the context signature"
                )
            for cell in inst.cells:
                if cell not in state_index:
                    raise ValueError(f"instance uses state {cell!r} outside the signature")
            if inst not in seen:
                seen.add(inst)
                unique.append(inst)
        unique.sort(key=lambda inst: tuple(state_index[c] for c in inst.cells))
        object.__setattr__(self, "instances", tuple(unique))

    def __iter__(self) -> Iterator[Instance]:
        return iter(self.instances)

    def __len__(self) -> int:
        return len(self.instances)

    def __contains__(self, inst: object) -> bool:
        return inst in self.instances


# ---------------------------------------------------------------------------
# currying isomorphisms between S^(ExT), (S^E)^T and (S^T)^E
# ---------------------------------------------------------------------------

def curry_time(inst: Instance) -> dict[str, Snapshot]:
    """View an instance as time -> snapshot. Key order follows the time chain."""
    return {t: inst.snapshot_at(ti) for ti, t in enumerate(inst.times)}


def uncurry_time(by_time: Mapping[str, Snapshot]) -> Instance:
    """Inverse of curry_time; the mapping's key order gives the time chain."""
    if not by_time:
        raise ValueError("cannot uncurry an empty mapping")
    times = tuple(by_time)
    snaps = list(by_time.values())
    entities = snaps[0].entities
    for s in snaps:
        if s.entities != entities:
            raise ValueError("snapshots disagree on the entity set")
    cells = tuple(
        by_time[t].states[ei] for ei in range(len(entities)) for t in times
    )
    return Instance(entities, times, cells)


def curry_entity(inst: Instance) -> dict[str, dict[str, str]]:
    """View an instance as entity -> (time -> state)."""
    return {
        e: {t: inst.value_at(ei, ti) for ti, t in enumerate(inst.times)}
        for ei, e in enumerate(inst.entities)
    }


def uncurry_entity(by_entity: Mapping[str, Mapping[str, str]]) -> Instance:
    """Inverse of curry_entity; key orders give the entity and time chains."""
    if not by_entity:
        raise ValueError("cannot uncurry an empty mapping")
    entities = tuple(by_entity)
    trajectories = list(by_entity.values())
    times = tuple(trajectories[0])
    for traj in trajectories:
        if tuple(traj) != times:
            raise ValueError("trajectories disagree on the time chain")
    cells = tuple(by_entity[e][t] for e in entities for t in times)
    return Instance(entities, times, cells)


# ---------------------------------------------------------------------------
# consistency contexts and context construction
# ---------------------------------------------------------------------------

def consistency_context(ctx: Context, ref: Instance, t: str) -> Context:
    """All members of ctx that agree with ref on every cell up to time t.

    ref must be an instance over the context's signature but need not be a
    member of the context itself.
    """
    sig = ctx.signature
    if ref.entities != sig.entities or ref.times != sig.times:
        raise ValueError("reference instance does not match the context signature")
    for cell in ref.cells:
        if cell not in sig.states:
            raise ValueError(f"reference instance uses state {cell!r} outside the signature")
    ti = sig.time_index(t)
    n = len(sig.times)
    upto = ti + 1
    kept = []
    for inst in ctx.instances:
        if all(
            inst.cells[ei * n : ei * n + upto] == ref.cells[ei * n : ei * n + upto]
            for ei in range(len(sig.entities))
        ):
            kept.append(inst)
    return Context(sig, tuple(kept))


def build_full_space(sig: Signature, guard: int | None = None) -> Context:
    """The ambient context of all total (entity, time) -> state functions.

    Refuses to enumerate more than the guard allows (default 2**20 instances,
    overridable per call or via CTXKIT_GUARD).
    """
    limit = effective_guard(guard, DEFAULT_SPACE_GUARD)
    total = len(sig.states) ** sig.cell_count()
    if total > limit:
        raise SizeGuardError(
            total,
            limit,
            f"full space over {len(sig.states)} states and {sig.cell_count()} cells",
        )
    instances = tuple(
        Instance(sig.entities, sig.times, cells)
        for cells in itertools.product(sig.states, repeat=sig.cell_count())
    )
    return Context(sig, instances)


def restrict(ctx: Context, pred: Callable[[Instance], bool]) -> Context:
    """The subcontext of instances satisfying pred."""
    return Context(ctx.signature, tuple(inst for inst in ctx.instances if pred(inst)))
