"""Line-oriented file formats: contexts, Kripke models, modal contexts.

All formats are plain text, `#` starts a comment, blank lines are ignored.
Saving always produces the canonical rendering, so save(load(f)) == f for
canonical files and load(save(x)) == x for every value.
"""

from __future__ import annotations

import hashlib
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from ctxkit.core import Context, Instance, Signature
from ctxkit.modal_logic import (
    DEFAULT_CONNECTIVES,
    FormulaUniverse,
    KripkeModel,
    formula_universe,
    parse_formula,
    print_formula,
)
from ctxkit.modal_context import ModalContext


class ModelFileError(ValueError):
    """A malformed model file, with the offending line number."""

    def __init__(self, path: str | Path, line_no: int | None, message: str):
        self.path = str(path)
        self.line_no = line_no
        where = f"{self.path}:{line_no}" if line_no is not None else self.path
        super().__init__(f"{where}: {message}")


def _meaningful_lines(text: str):
    """(line_no, stripped content) for non-blank, non-comment lines."""
    for line_no, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].strip()
        if content:
            yield line_no, content


def file_digest(path: str | Path) -> str:
    """Short sha256 of a file's bytes, for run reports."""
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:12]


# ---------------------------------------------------------------------------
# context files
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LoadedContext:
    """A context plus the instance names the file used."""

    context: Context
    names: Mapping[str, Instance]

    def instance_named(self, name: str) -> Instance:
        try:
            return self.names[name]
        except KeyError:
            raise ValueError(f"no instance named {name!r} in the file") from None


def parse_context(text: str, source: str | Path = "<string>") -> LoadedContext:
    headers: dict[str, tuple[str, ...]] = {}
    sig: Signature | None = None
    names: dict[str, Instance] = {}
    instances: list[Instance] = []

    current_name: str | None = None
    current_line: int | None = None
    current_cells: dict[tuple[str, str], str] = {}

    def close_instance():
        nonlocal current_name, current_line, current_cells
        if current_name is None:
            return
        missing = [
            f"{e}@{t}"
            for e in sig.entities
            for t in sig.times
            if (e, t) not in current_cells
        ]
        if missing:
            raise ModelFileError(
                source,
                current_line,
                f"instance {current_name!r} is missing cell {missing[0]}",
            )
        inst = Instance.from_table(current_cells, sig.entities, sig.times)
        if inst in instances:
            warnings.warn(
                f"{source}: duplicate instance {current_name!r} collapsed (set semantics)",
                stacklevel=3,
            )
        else:
            instances.append(inst)
            names[current_name] = inst
        current_name, current_line, current_cells = None, None, {}

    for line_no, content in _meaningful_lines(text):
        first = content.split()[0]
        if first in ("states:", "entities:", "time:"):
            key = first[:-1]
            if sig is not None or key in headers:
                raise ModelFileError(source, line_no, f"{first} after instances or repeated")
            headers[key] = tuple(content.split()[1:])
            continue
        if sig is None:
            missing = [k for k in ("states", "entities", "time") if k not in headers]
            if missing:
                raise ModelFileError(
                    source, line_no, f"missing header line(s): {', '.join(missing)}"
                )
            try:
                sig = Signature(headers["states"], headers["entities"], headers["time"])
            except ValueError as exc:
                raise ModelFileError(source, line_no, str(exc)) from None
        if first == "instance":
            close_instance()
            rest = content[len("instance") :].strip()
            if not rest.endswith(":") or not rest[:-1].strip():
                raise ModelFileError(source, line_no, "expected `instance <name>:`")
            current_name = rest[:-1].strip()
            current_line = line_no
            if current_name in names:
                raise ModelFileError(source, line_no, f"instance name {current_name!r} reused")
            continue
        if current_name is None:
            raise ModelFileError(source, line_no, f"unexpected line {content!r}")
        for token in content.split():
            entity, at, rest = token.partition("@")
            time, eq, state = rest.partition("=")
            if not at or not eq or not entity or not time or not state:
                raise ModelFileError(
                    source, line_no, f"malformed cell {token!r}, expected entity@time=state"
                )
            if entity not in sig.entities:
                raise ModelFileError(source, line_no, f"unknown entity {entity!r}")
            if time not in sig.times:
                raise ModelFileError(source, line_no, f"unknown time {time!r}")
            if state not in sig.states:
                raise ModelFileError(source, line_no, f"unknown state {state!r}")
            if (entity, time) in current_cells:
                raise ModelFileError(source, line_no, f"cell {entity}@{time} given twice")
            current_cells[(entity, time)] = state

    if sig is None:
        raise ModelFileError(source, None, "empty context file")
    close_instance()
    return LoadedContext(Context(sig, tuple(instances)), names)


def render_context(ctx: Context) -> str:
    """Canonical text: headers, then instances named i0, i1, ... in canonical
    order, one cell line per entity."""
    sig = ctx.signature
    lines = [
        "states: " + " ".join(sig.states),
        "entities: " + " ".join(sig.entities),
        "time: " + " ".join(sig.times),
    ]
    for k, inst in enumerate(ctx.instances):
        lines.append(f"instance i{k}:")
        for ei, e in enumerate(sig.entities):
            cells = " ".join(
                f"{e}@{t}={inst.value_at(ei, ti)}" for ti, t in enumerate(sig.times)
            )
            lines.append(f"  {cells}")
    return "\n".join(lines) + "\n"


def load_context(path: str | Path) -> LoadedContext:
    return parse_context(Path(path).read_text(), path)


def save_context(ctx: Context, path: str | Path) -> None:
    Path(path).write_text(render_context(ctx))


# ---------------------------------------------------------------------------
# Kripke model files
# ---------------------------------------------------------------------------

def parse_kripke(text: str, source: str | Path = "<string>") -> KripkeModel:
    worlds: list[str] = []
    relation: set[tuple[str, str]] = set()
    valuation: dict[str, set[str]] = {}
    for line_no, content in _meaningful_lines(text):
        parts = content.split()
        directive, args = parts[0], parts[1:]
        if directive == "world":
            if len(args) != 1:
                raise ModelFileError(source, line_no, "expected `world <name>`")
            if args[0] in worlds:
                raise ModelFileError(source, line_no, f"world {args[0]!r} declared twice")
            worlds.append(args[0])
        elif directive == "edge":
            if len(args) != 2:
                raise ModelFileError(source, line_no, "expected `edge <from> <to>`")
            for name in args:
                if name not in worlds:
                    raise ModelFileError(source, line_no, f"unknown world {name!r}")
            relation.add((args[0], args[1]))
        elif directive == "val":
            if len(args) != 2:
                raise ModelFileError(source, line_no, "expected `val <world> <atom>`")
            world, atom = args
            if world not in worlds:
                raise ModelFileError(source, line_no, f"unknown world {world!r}")
            valuation.setdefault(atom, set()).add(world)
        else:
            raise ModelFileError(source, line_no, f"unknown directive {directive!r}")
    if not worlds:
        raise ModelFileError(source, None, "empty Kripke model file")
    try:
        return KripkeModel(
            tuple(worlds),
            frozenset(relation),
            {a: frozenset(ws) for a, ws in valuation.items()},
        )
    except ValueError as exc:
        raise ModelFileError(source, None, str(exc)) from None


def render_kripke(model: KripkeModel) -> str:
    index = {w: i for i, w in enumerate(model.worlds)}
    lines = [f"world {w}" for w in model.worlds]
    lines += [
        f"edge {a} {b}"
        for a, b in sorted(model.relation, key=lambda p: (index[p[0]], index[p[1]]))
    ]
    for atom in sorted(model.valuation):
        for w in sorted(model.valuation[atom], key=index.get):
            lines.append(f"val {w} {atom}")
    return "\n".join(lines) + "\n"


def load_kripke(path: str | Path) -> KripkeModel:
    return parse_kripke(Path(path).read_text(), path)


def save_kripke(model: KripkeModel, path: str | Path) -> None:
    Path(path).write_text(render_kripke(model))


# ---------------------------------------------------------------------------
# modal context files
# ---------------------------------------------------------------------------

def render_modal_context(mc: ModalContext) -> str:
    """Header with the universe identity, then worlds and edges.

    Only contexts over generated universes (default connectives, known cap)
    and the single (0,0) cell serialize; closure-built universes carry no
    regenerable identity.
    """
    u = mc.universe
    if u.cap is None or tuple(u.connectives) != DEFAULT_CONNECTIVES:
        raise ValueError(
            "only contexts over default-connective generated universes serialize"
        )
    if mc.entities != ("0",) or mc.times != ("0",):
        raise ValueError("only single-cell modal contexts serialize")
    lines = [f"universe atoms={','.join(u.atoms)} depth={u.depth} cap={u.cap}"]
    for name in mc.world_names:
        lines.append(f"cworld {name}")
        stored = mc.assignments[name][("0", "0")]
        for f in u.members:
            if f in stored:
                lines.append(f"  has {print_formula(f)}")
    index = {n: i for i, n in enumerate(mc.world_names)}
    lines += [
        f"cedge {a} {b}"
        for a, b in sorted(mc.relation, key=lambda p: (index[p[0]], index[p[1]]))
    ]
    return "\n".join(lines) + "\n"


def parse_modal_context(text: str, source: str | Path = "<string>") -> ModalContext:
    universe: FormulaUniverse | None = None
    names: list[str] = []
    assignments: dict[str, dict[tuple[str, str], frozenset]] = {}
    sets: dict[str, set] = {}
    relation: set[tuple[str, str]] = set()
    current: str | None = None

    for line_no, content in _meaningful_lines(text):
        parts = content.split()
        directive = parts[0]
        if directive == "universe":
            if universe is not None:
                raise ModelFileError(source, line_no, "repeated universe header")
            fields = dict(
                part.split("=", 1) for part in parts[1:] if "=" in part
            )
            missing = {"atoms", "depth", "cap"} - set(fields)
            if missing or len(fields) != len(parts) - 1:
                raise ModelFileError(
                    source, line_no, "expected `universe atoms=<list> depth=<d> cap=<k>`"
                )
            try:
                universe = formula_universe(
                    tuple(fields["atoms"].split(",")),
                    int(fields["depth"]),
                    cap=int(fields["cap"]),
                )
            except ValueError as exc:
                raise ModelFileError(source, line_no, str(exc)) from None
            continue
        if universe is None:
            raise ModelFileError(source, line_no, "universe header must come first")
        if directive == "cworld":
            if len(parts) != 2:
                raise ModelFileError(source, line_no, "expected `cworld <name>`")
            current = parts[1]
            if current in names:
                raise ModelFileError(source, line_no, f"cworld {current!r} declared twice")
            names.append(current)
            sets[current] = set()
        elif directive == "has":
            if current is None:
                raise ModelFileError(source, line_no, "`has` before any cworld")
            try:
                formula = parse_formula(content[len("has") :])
            except ValueError as exc:
                raise ModelFileError(source, line_no, str(exc)) from None
            if formula not in universe:
                raise ModelFileError(
                    source,
                    line_no,
                    f"formula {print_formula(formula)} is outside the declared universe",
                )
            sets[current].add(formula)
        elif directive == "cedge":
            if len(parts) != 3:
                raise ModelFileError(source, line_no, "expected `cedge <from> <to>`")
            for name in parts[1:]:
                if name not in names:
                    raise ModelFileError(source, line_no, f"unknown cworld {name!r}")
            relation.add((parts[1], parts[2]))
        else:
            raise ModelFileError(source, line_no, f"unknown directive {directive!r}")

    if universe is None:
        raise ModelFileError(source, None, "empty modal context file")
    assignments = {n: {("0", "0"): frozenset(sets[n])} for n in names}
    try:
        return ModalContext(
            ("0",), ("0",), tuple(names), assignments, frozenset(relation), universe
        )
    except ValueError as exc:
        raise ModelFileError(source, None, str(exc)) from None


def load_modal_context(path: str | Path) -> ModalContext:
    return parse_modal_context(Path(path).read_text(), path)


def save_modal_context(mc: ModalContext, path: str | Path) -> None:
    Path(path).write_text(render_modal_context(mc))
