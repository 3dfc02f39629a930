"""Compiling Kripke models into modal contexts and checking them.

The pipeline quotients the worlds of a Kripke model by agreement on a finite
formula universe, makes each class into a context world carrying the class
theory at the single (entity, time) index, and relates two context worlds
whenever some members of their classes were related. The resulting structure
must satisfy the box/diamond membership biconditionals against its relation,
and must represent every original world by theory; both facts are re-checked
here rather than assumed.

The construction itself never uses non-trivial entities or times (the index
set is a single cell), but verification iterates over whatever (entity, time)
grid a context declares, so hand-built power contexts check the same way.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping

from ctxkit.modal_logic import (
    Atom,
    Box,
    Diamond,
    Evaluator,
    Formula,
    FormulaUniverse,
    KripkeModel,
    print_formula,
    world_theory,
)

UNIT = ("0",)


@dataclass(frozen=True)
class WorldClass:
    """One theory-equivalence class of Kripke worlds."""

    representative: str
    members: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))
        if not self.members:
            raise ValueError("a world class cannot be empty")
        if self.representative != min(self.members):
            raise ValueError("representative must be the smallest member name")


Assignment = Mapping[tuple[str, str], frozenset[Formula]]


@dataclass(frozen=True)
class ModalContext:
    """A finite power context: named worlds mapping (entity, time) cells to
    formula sets, plus a relation between the worlds."""

    entities: tuple[str, ...]
    times: tuple[str, ...]
    world_names: tuple[str, ...]
    assignments: Mapping[str, Assignment]
    relation: frozenset[tuple[str, str]]
    universe: FormulaUniverse

    def __post_init__(self):
        object.__setattr__(self, "entities", tuple(self.entities))
        object.__setattr__(self, "times", tuple(self.times))
        object.__setattr__(self, "world_names", tuple(self.world_names))
        object.__setattr__(
            self,
            "assignments",
            {
                name: {cell: frozenset(fs) for cell, fs in table.items()}
                for name, table in dict(self.assignments).items()
            },
        )
        object.__setattr__(self, "relation", frozenset(tuple(p) for p in self.relation))

        names = self.world_names
        if len(set(names)) != len(names):
            raise ValueError("duplicate context-world names")
        cells = {(e, t) for e in self.entities for t in self.times}
        if set(self.assignments) != set(names):
            raise ValueError("assignments must cover exactly the named worlds")
        for name in names:
            table = self.assignments[name]
            if set(table) != cells:
                raise ValueError(f"world {name!r} is not total over the (entity, time) grid")
            for formula_set in table.values():
                for f in formula_set:
                    if f not in self.universe:
                        raise ValueError(
                            f"world {name!r} stores {print_formula(f)}, "
                            "which is outside the universe"
                        )
        for i, a in enumerate(names):
            for b in names[i + 1 :]:
                if self.assignments[a] == self.assignments[b]:
                    raise ValueError(f"worlds {a!r} and {b!r} are equal as functions")
        known = set(names)
        for a, b in self.relation:
            if a not in known or b not in known:
                raise ValueError(f"relation endpoint outside the context: ({a}, {b})")

    @cached_property
    def _successors(self) -> dict[str, tuple[str, ...]]:
        return {
            w: tuple(v for v in self.world_names if (w, v) in self.relation)
            for w in self.world_names
        }

    def successors(self, name: str) -> tuple[str, ...]:
        try:
            return self._successors[name]
        except KeyError:
            raise ValueError(f"unknown context world {name!r}") from None

    def theory_at(self, name: str, entity: str | None = None, time: str | None = None):
        e = self.entities[0] if entity is None else entity
        t = self.times[0] if time is None else time
        try:
            return self.assignments[name][(e, t)]
        except KeyError:
            raise ValueError(f"unknown world or cell: {name!r} at ({e!r}, {t!r})") from None


def _theories(model: KripkeModel, universe: FormulaUniverse) -> dict[str, frozenset[Formula]]:
    evaluator = Evaluator(model)
    return {w: world_theory(model, w, universe, evaluator) for w in model.worlds}


def quotient(model: KripkeModel, universe: FormulaUniverse) -> tuple[WorldClass, ...]:
    """Partition the worlds by equality of their theories over the universe."""
    groups: dict[frozenset[Formula], list[str]] = {}
    for world, theory in _theories(model, universe).items():
        groups.setdefault(theory, []).append(world)
    classes = [WorldClass(min(ws), frozenset(ws)) for ws in groups.values()]
    classes.sort(key=lambda c: c.representative)
    return tuple(classes)


def to_modal_context(model: KripkeModel, universe: FormulaUniverse) -> ModalContext:
    """Build the quotient modal context of a Kripke model.

    Context worlds are named c0, c1, ... in class order (classes ordered by
    representative), each carrying its class theory at the unique cell; two
    context worlds are related iff some members of their classes are.
    """
    theories = _theories(model, universe)
    groups: dict[frozenset[Formula], list[str]] = {}
    for world, theory in theories.items():
        groups.setdefault(theory, []).append(world)
    classes = sorted(
        ((min(ws), frozenset(ws), theory) for theory, ws in groups.items()),
        key=lambda item: item[0],
    )
    names = tuple(f"c{k}" for k in range(len(classes)))
    cell = (UNIT[0], UNIT[0])
    assignments = {
        name: {cell: theory} for name, (_, _, theory) in zip(names, classes)
    }
    relation = set()
    for i, (_, members_a, _) in enumerate(classes):
        for j, (_, members_b, _) in enumerate(classes):
            if any((a, b) in model.relation for a in members_a for b in members_b):
                relation.add((names[i], names[j]))
    return ModalContext(UNIT, UNIT, names, assignments, frozenset(relation), universe)


@dataclass(frozen=True)
class ModalViolation:
    """One failed instance of the box/diamond membership biconditional."""

    world: str
    entity: str
    time: str
    formula: Formula  # the state s under the operator
    operator: str  # "box" | "diamond"
    side: str  # "forward": operator formula present, condition fails
    #          # "backward": condition holds, operator formula absent

    def describe(self) -> str:
        op = "[]" if self.operator == "box" else "<>"
        if self.side == "forward":
            reason = "present but the successor condition fails"
        else:
            reason = "absent although the successor condition holds"
        return (
            f"{self.world} at ({self.entity},{self.time}): "
            f"{op}{print_formula(self.formula)} {reason}"
        )


@dataclass(frozen=True)
class ModalContextReport:
    is_modal_context: bool
    violations: tuple[ModalViolation, ...]

    def __post_init__(self):
        if self.is_modal_context != (not self.violations):
            raise ValueError("verdict must match the violation list")


def is_modal_context(mc: ModalContext) -> ModalContextReport:
    """Check the box/diamond biconditionals at every world and cell.

    For each s with []s in the universe: []s is in a world's cell iff every
    relation successor has s there; dually, <>s iff some successor has s.
    Only operator formulas inside the universe are checkable under the
    truncation, and those are checked exactly.
    """
    boxed = [(f.operand, f) for f in mc.universe.members if isinstance(f, Box)]
    diamonded = [(f.operand, f) for f in mc.universe.members if isinstance(f, Diamond)]
    violations = []
    for name in mc.world_names:
        successors = mc.successors(name)
        for e in mc.entities:
            for t in mc.times:
                own = mc.assignments[name][(e, t)]
                successor_sets = [mc.assignments[s][(e, t)] for s in successors]
                for s, box_s in boxed:
                    everywhere = all(s in succ for succ in successor_sets)
                    if box_s in own and not everywhere:
                        violations.append(ModalViolation(name, e, t, s, "box", "forward"))
                    elif everywhere and box_s not in own:
                        violations.append(ModalViolation(name, e, t, s, "box", "backward"))
                for s, dia_s in diamonded:
                    somewhere = any(s in succ for succ in successor_sets)
                    if dia_s in own and not somewhere:
                        violations.append(
                            ModalViolation(name, e, t, s, "diamond", "forward")
                        )
                    elif somewhere and dia_s not in own:
                        violations.append(
                            ModalViolation(name, e, t, s, "diamond", "backward")
                        )
    return ModalContextReport(not violations, tuple(violations))


def verify_representation(model: KripkeModel, mc: ModalContext) -> bool:
    """Every Kripke world's theory appears verbatim as some context world's
    formula set at the first cell."""
    stored = [mc.theory_at(name) for name in mc.world_names]
    for theory in _theories(model, mc.universe).values():
        if not any(theory == s for s in stored):
            return False
    return True


def class_world_map(model: KripkeModel, mc: ModalContext) -> dict[str, str]:
    """Kripke world -> name of the context world carrying its theory."""
    by_theory = {mc.theory_at(name): name for name in mc.world_names}
    out = {}
    for world, theory in _theories(model, mc.universe).items():
        name = by_theory.get(theory)
        if name is None:
            raise ValueError(f"world {world!r} has no matching context world")
        out[world] = name
    return out


def induced_kripke(mc: ModalContext) -> KripkeModel:
    """Read a single-cell modal context back as a Kripke model: its worlds,
    its relation, and atoms valuated by stored membership."""
    valuation = {
        atom: frozenset(w for w in mc.world_names if Atom(atom) in mc.theory_at(w))
        for atom in mc.universe.atoms
    }
    return KripkeModel(mc.world_names, mc.relation, valuation)


def requotient_is_identity(mc: ModalContext) -> bool:
    """Exploratory check, reported but never asserted: does quotienting the
    induced Kripke model reproduce the context (up to renaming)?

    The construction does not claim this fixed-point property; the answer is
    surfaced so corpora can be inspected for it.
    """
    redone = to_modal_context(induced_kripke(mc), mc.universe)
    if len(redone.world_names) != len(mc.world_names):
        return False
    rename = {}
    for w in mc.world_names:
        matches = [v for v in redone.world_names if redone.theory_at(v) == mc.theory_at(w)]
        if len(matches) != 1:
            return False
        rename[w] = matches[0]
    return {(rename[a], rename[b]) for a, b in mc.relation} == set(redone.relation)


def prove_in_context(
    mc: ModalContext,
    world: str,
    formula: Formula,
    entity: str | None = None,
    time: str | None = None,
) -> bool:
    """Proving by membership: is the formula in the world's stored set?

    Formulas outside the universe are not decidable within the truncation
    and are rejected rather than silently reported false.
    """
    if formula not in mc.universe:
        raise ValueError(
            f"formula {print_formula(formula)} is outside the universe; "
            "membership is undecidable within this truncation"
        )
    if world not in mc.world_names:
        raise ValueError(f"unknown context world {world!r}")
    return formula in mc.theory_at(world, entity, time)
