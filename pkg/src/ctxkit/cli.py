"""Command-line surface.

Exit codes: 0 when analysis succeeds with verdict yes (or a generator ran),
1 when analysis says no (a witness is printed), 2 for usage and I/O errors.
Reports go to stdout as `key=value` lines followed by a blank line and a
human-readable section; stdout is byte-stable for fixed inputs and seeds,
timing goes to stderr.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from ctxkit.core import Context, SizeGuardError, consistency_context
from ctxkit.determinability import (
    DeterminabilityWitness,
    extract_iterator,
    is_determinable,
    is_deterministic,
    render_iterator_map,
)
from ctxkit.formats import (
    LoadedContext,
    ModelFileError,
    file_digest,
    load_context,
    load_kripke,
    load_modal_context,
    render_context,
    render_kripke,
    render_modal_context,
)
from ctxkit.generators import (
    gen_alice_bob,
    gen_alice_bob_odd,
    gen_minigame,
    gen_random_context,
    gen_random_kripke,
)
from ctxkit.modal_logic import parse_formula, formula_universe, satisfies, Evaluator
from ctxkit.modal_context import (
    class_world_map,
    is_modal_context,
    prove_in_context,
    requotient_is_identity,
    to_modal_context,
    verify_representation,
)


def _emit(fields: list[tuple[str, str]], human: list[str] | None = None) -> None:
    for key, value in fields:
        print(f"{key}={value}")
    if human:
        print()
        for line in human:
            print(line)


def _base_fields(args: argparse.Namespace, path: str | None) -> list[tuple[str, str]]:
    fields = [("command", " ".join(args.raw_argv))]
    if path is not None:
        fields.append(("input", path))
        fields.append(("input_sha256", file_digest(path)))
    return fields


def _instance_label(loaded: LoadedContext | None, ctx: Context, inst) -> str:
    if loaded is not None:
        for name, candidate in loaded.names.items():
            if candidate == inst:
                return name
    return f"i{ctx.instances.index(inst)}"


def _trace_text(trace) -> str:
    return " -> ".join(snap.render() for snap in trace)


def _witness_lines(ctx: Context, loaded: LoadedContext | None,
                   witness: DeterminabilityWitness, mode: str) -> list[str]:
    n = len(ctx.signature.times)
    i = ctx.signature.time_index(witness.time)
    j = ctx.signature.time_index(witness.other_time)
    lines = [
        "witness:",
        f"  snapshot: {witness.snapshot().render()}",
        f"  occurrence 1: instance {_instance_label(loaded, ctx, witness.instance)}"
        f" at t={witness.time}",
        f"  occurrence 2: instance {_instance_label(loaded, ctx, witness.other_instance)}"
        f" at t={witness.other_time}",
    ]
    if mode == "literal" and i != j:
        lines.append(
            f"  suffixes have lengths {n - i} and {n - j}: no monotone bijection exists"
        )
        return lines
    window = min(n - i, n - j)
    b1 = {tr[:window] for tr in witness.bundle}
    b2 = {tr[:window] for tr in witness.other_bundle}
    lines.append(f"  future bundles differ on the first {window} time point(s):")
    for tag, only in (("1", sorted(b1 - b2)), ("2", sorted(b2 - b1))):
        for trace in only[:3]:
            lines.append(f"  only from occurrence {tag}: {_trace_text(trace)}")
    return lines


# ---------------------------------------------------------------------------
# ctx subcommands
# ---------------------------------------------------------------------------

def cmd_ctx_check_determinable(args) -> int:
    loaded = load_context(args.file)
    report = is_determinable(loaded.context, args.mode)
    fields = _base_fields(args, args.file)
    fields.append(("mode", args.mode))
    fields.append(("verdict", "yes" if report.determinable else "no"))
    human: list[str] = []
    if not report.determinable:
        fields.append(("witness_time", report.witness.time))
        fields.append(("witness_other_time", report.witness.other_time))
        fields.append(("witness_snapshot", report.witness.snapshot().render()))
        human = _witness_lines(loaded.context, loaded, report.witness, args.mode)
    _emit(fields, human)
    return 0 if report.determinable else 1


def cmd_ctx_iterator(args) -> int:
    loaded = load_context(args.file)
    result = extract_iterator(loaded.context)
    fields = _base_fields(args, args.file)
    if result.iterator is not None:
        fields.append(("verdict", "yes"))
        fields.append(("domain_size", str(len(result.iterator.entries))))
        _emit(fields, render_iterator_map(result.iterator).splitlines())
        return 0
    conflict = result.conflict
    fields.append(("verdict", "no"))
    fields.append(("conflict_snapshot", conflict.snapshot.render()))
    ctx = loaded.context
    human = [
        "iterator conflict:",
        f"  snapshot: {conflict.snapshot.render()}",
        f"  instance {_instance_label(loaded, ctx, conflict.first_occurrence[0])}"
        f" at t={conflict.first_occurrence[1]} demands"
        f" {{{', '.join(s.render() for s in sorted(conflict.first_image, key=lambda s: s.render()))}}}",
        f"  instance {_instance_label(loaded, ctx, conflict.second_occurrence[0])}"
        f" at t={conflict.second_occurrence[1]} demands"
        f" {{{', '.join(s.render() for s in sorted(conflict.second_image, key=lambda s: s.render()))}}}",
    ]
    _emit(fields, human)
    return 1


def cmd_ctx_consistency(args) -> int:
    loaded = load_context(args.file)
    ref = loaded.instance_named(args.instance)
    result = consistency_context(loaded.context, ref, args.time)
    fields = _base_fields(args, args.file)
    fields.append(("instance", args.instance))
    fields.append(("time", args.time))
    fields.append(("instances", str(len(result))))
    _emit(fields, render_context(result).splitlines())
    return 0


def cmd_ctx_deterministic(args) -> int:
    loaded = load_context(args.file)
    verdict = is_deterministic(loaded.context)
    fields = _base_fields(args, args.file)
    fields.append(("verdict", "yes" if verdict else "no"))
    _emit(fields)
    return 0 if verdict else 1


# ---------------------------------------------------------------------------
# modal subcommands
# ---------------------------------------------------------------------------

def cmd_modal_eval(args) -> int:
    model = load_kripke(args.file)
    formula = parse_formula(args.formula)
    value = satisfies(model, args.world, formula)
    fields = _base_fields(args, args.file)
    fields.append(("world", args.world))
    fields.append(("formula", args.formula))
    fields.append(("verdict", "true" if value else "false"))
    _emit(fields, ["true" if value else "false"])
    return 0 if value else 1


def _universe_from_args(args):
    return formula_universe(tuple(args.atoms.split(",")), args.depth, cap=args.cap)


def cmd_modal_to_context(args) -> int:
    model = load_kripke(args.file)
    universe = _universe_from_args(args)
    mc = to_modal_context(model, universe)
    text = render_modal_context(mc)
    if args.output is None:
        sys.stdout.write(text)
        return 0
    Path(args.output).write_text(text)
    fields = _base_fields(args, args.file)
    fields.append(("universe_size", str(len(universe))))
    fields.append(("worlds", str(len(mc.world_names))))
    fields.append(("edges", str(len(mc.relation))))
    fields.append(("output", args.output))
    fields.append(("output_sha256", file_digest(args.output)))
    _emit(fields)
    return 0


def cmd_modal_check_context(args) -> int:
    mc = load_modal_context(args.file)
    report = is_modal_context(mc)
    fields = _base_fields(args, args.file)
    fields.append(("worlds", str(len(mc.world_names))))
    fields.append(("verdict", "yes" if report.is_modal_context else "no"))
    human = []
    if not report.is_modal_context:
        fields.append(("violations", str(len(report.violations))))
        human = ["violations:"] + [
            f"  {v.describe()}" for v in report.violations[:10]
        ]
        if len(report.violations) > 10:
            human.append(f"  ... and {len(report.violations) - 10} more")
    _emit(fields, human)
    return 0 if report.is_modal_context else 1


def cmd_modal_verify_theorem(args) -> int:
    model = load_kripke(args.file)
    universe = _universe_from_args(args)
    mc = to_modal_context(model, universe)
    conditions = is_modal_context(mc).is_modal_context
    representation = verify_representation(model, mc)
    names = class_world_map(model, mc)
    evaluator = Evaluator(model)
    agreement = all(
        prove_in_context(mc, names[w], f) == evaluator.satisfies(w, f)
        for w in model.worlds
        for f in universe.members
    )
    verdict = conditions and representation and agreement
    fields = _base_fields(args, args.file)
    fields.append(("universe_size", str(len(universe))))
    fields.append(("context_worlds", str(len(mc.world_names))))
    fields.append(("modal_context", "yes" if conditions else "no"))
    fields.append(("representation", "yes" if representation else "no"))
    fields.append(("prover_agreement", "yes" if agreement else "no"))
    # informational only: the fixed-point property is not part of the verdict
    fields.append(
        ("requotient_fixed_point", "yes" if requotient_is_identity(mc) else "no")
    )
    fields.append(("verdict", "yes" if verdict else "no"))
    _emit(fields)
    return 0 if verdict else 1


# ---------------------------------------------------------------------------
# gen subcommands
# ---------------------------------------------------------------------------

def _deliver(args, text: str, fields: list[tuple[str, str]]) -> int:
    if args.output is None:
        sys.stdout.write(text)
        return 0
    Path(args.output).write_text(text)
    fields.append(("output", args.output))
    fields.append(("output_sha256", file_digest(args.output)))
    _emit(fields)
    return 0


def cmd_gen_alice_bob(args) -> int:
    ctx = gen_alice_bob(args.horizon)
    fields = _base_fields(args, None) + [("instances", str(len(ctx)))]
    return _deliver(args, render_context(ctx), fields)


def cmd_gen_alice_bob_odd(args) -> int:
    ctx = gen_alice_bob_odd(args.horizon)
    fields = _base_fields(args, None) + [("instances", str(len(ctx)))]
    return _deliver(args, render_context(ctx), fields)


def cmd_gen_minigame(args) -> int:
    base, tracked = gen_minigame()
    ctx = base if args.variant == "base" else tracked
    fields = _base_fields(args, None) + [
        ("variant", args.variant),
        ("instances", str(len(ctx))),
    ]
    return _deliver(args, render_context(ctx), fields)


def cmd_gen_random_ctx(args) -> int:
    ctx = gen_random_context(args.seed, args.states, args.entities, args.times, args.count)
    fields = _base_fields(args, None) + [
        ("seed", str(args.seed)),
        ("instances", str(len(ctx))),
    ]
    return _deliver(args, render_context(ctx), fields)


def cmd_gen_random_kripke(args) -> int:
    model = gen_random_kripke(
        args.seed, args.worlds, tuple(args.atoms.split(",")), args.density
    )
    fields = _base_fields(args, None) + [
        ("seed", str(args.seed)),
        ("worlds", str(len(model.worlds))),
        ("edges", str(len(model.relation))),
    ]
    return _deliver(args, render_kripke(model), fields)


# ---------------------------------------------------------------------------
# parser wiring
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctxkit",
        description="Finite contexts, determinability, and modal-context checking.",
    )
    groups = parser.add_subparsers(dest="group", required=True)

    ctx = groups.add_parser("ctx", help="context analysis").add_subparsers(
        dest="command", required=True
    )
    p = ctx.add_parser("check-determinable", help="decide determinability")
    p.add_argument("file")
    p.add_argument(
        "--mode",
        choices=("literal", "windowed"),
        default="literal",
        help="literal: the definition verbatim; windowed: compare over the "
        "common suffix window (default: literal)",
    )
    p.set_defaults(func=cmd_ctx_check_determinable)
    p = ctx.add_parser("iterator", help="extract the step function if one exists")
    p.add_argument("file")
    p.set_defaults(func=cmd_ctx_iterator)
    p = ctx.add_parser("consistency", help="filter by prefix agreement")
    p.add_argument("file")
    p.add_argument("--instance", required=True)
    p.add_argument("--time", required=True)
    p.set_defaults(func=cmd_ctx_consistency)
    p = ctx.add_parser("deterministic", help="single successor at every step?")
    p.add_argument("file")
    p.set_defaults(func=cmd_ctx_deterministic)

    modal = groups.add_parser("modal", help="Kripke models and modal contexts").add_subparsers(
        dest="command", required=True
    )
    p = modal.add_parser("eval", help="evaluate a formula at a world")
    p.add_argument("file")
    p.add_argument("--world", required=True)
    p.add_argument("--formula", required=True)
    p.set_defaults(func=cmd_modal_eval)
    p = modal.add_parser("to-context", help="compile a model into a modal context")
    p.add_argument("file")
    p.add_argument("--atoms", required=True, help="comma-separated atom list")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--cap", type=int, default=1)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_modal_to_context)
    p = modal.add_parser("check-context", help="check the box/diamond conditions")
    p.add_argument("file")
    p.set_defaults(func=cmd_modal_check_context)
    p = modal.add_parser(
        "verify-theorem",
        help="compile, check conditions, and verify world representation",
    )
    p.add_argument("file")
    p.add_argument("--atoms", required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--cap", type=int, default=1)
    p.set_defaults(func=cmd_modal_verify_theorem)

    gen = groups.add_parser("gen", help="generate example artifacts").add_subparsers(
        dest="command", required=True
    )
    p = gen.add_parser("alice-bob")
    p.add_argument("--horizon", type=int, default=3)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen_alice_bob)
    p = gen.add_parser("alice-bob-odd")
    p.add_argument("--horizon", type=int, default=3)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen_alice_bob_odd)
    p = gen.add_parser("minigame")
    p.add_argument("--variant", choices=("base", "turn"), default="base")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen_minigame)
    p = gen.add_parser("random-ctx")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--states", type=int, default=3)
    p.add_argument("--entities", type=int, default=2)
    p.add_argument("--times", type=int, default=3)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen_random_ctx)
    p = gen.add_parser("random-kripke")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--worlds", type=int, default=4)
    p.add_argument("--atoms", default="p,q")
    p.add_argument("--density", type=float, default=0.3)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen_random_kripke)

    return parser


def cli_dispatch(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    args.raw_argv = list(argv)
    started = time.perf_counter()
    try:
        code = args.func(args)
    except (ModelFileError, SizeGuardError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    finally:
        elapsed = (time.perf_counter() - started) * 1000.0
        print(f"elapsed_ms={elapsed:.1f}", file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    return cli_dispatch(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
