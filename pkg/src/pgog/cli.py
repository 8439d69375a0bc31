"""Command-line front end.

Subcommands parse DSL documents, run the divergence detector and the
edge-count bound, build and verify tower levels, separate tagged words,
and execute registered examples.  Every subcommand renders a report as
text or, with --json, as stable JSON; the exit code is 0 exactly when no
check failed.  The environment variable PGOG_SIZE_GUARD overrides the
default 2^20 cap on subgroup enumeration.
"""

import argparse
import sys
from pathlib import Path

from . import registry, reports
from .analysis import check_edge_bound, detect_collapse
from .dsl import parse_dsl, parse_word
from .gog import (check_reduced, fundamental_presentation,
                  verify_properness_witness)


class CliError(ValueError):
    """Unusable input: reported on stderr with exit code 2."""


def _read(path):
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CliError(str(exc)) from None


def _order_or_guard(model):
    try:
        return model.order
    except ValueError:
        return "exceeds size guard"


# -- subcommands ----------------------------------------------------------------


def cmd_parse(args):
    doc = parse_dsl(_read(args.file))
    report = reports.Report("parse", {"file": args.file})
    for name, pres in doc.presentations.items():
        report.add(f"presentation {name}", reports.PASS,
                   generators=list(pres.generators),
                   relators=len(pres.relators))
    for name, gog in doc.graphs.items():
        report.add(f"graph {name}", reports.PASS,
                   vertices=list(gog.graph.vertices),
                   edges=dict(gog.graph.edges),
                   reduced=check_reduced(gog))
    for name, spec in doc.witnesses.items():
        report.add(f"witness {name}", reports.PASS, target=spec.target.name)
    for name, letters in doc.words.items():
        report.add(f"word {name}", reports.PASS, letters=len(letters))
    return report


def _collapse_targets(doc, name):
    targets = {n: p for n, p in doc.presentations.items()}
    for n, gog in doc.graphs.items():
        targets[n] = fundamental_presentation(gog)
    if name is not None:
        if name not in targets:
            raise CliError(f"no presentation or graph named {name!r}; "
                           f"document defines: {', '.join(sorted(targets))}")
        targets = {name: targets[name]}
    if not targets:
        raise CliError("document defines no presentations or graphs")
    return targets


def cmd_collapse(args):
    doc = parse_dsl(_read(args.file))
    p = args.p or doc.prime or 2
    report = reports.Report("collapse", {"file": args.file, "p": p})
    for name, pres in sorted(_collapse_targets(doc, args.name).items()):
        report.checks.append(
            reports.collapse_check(f"collapse {name}", detect_collapse(pres, p)))
    return report


def cmd_bound(args):
    doc = parse_dsl(_read(args.file))
    names = ([args.witness] if args.witness
             else sorted(doc.witnesses))
    report = reports.Report("bound", {"file": args.file})
    if not names:
        raise CliError("document defines no witnesses; the edge bound "
                       "requires a certified properness witness")
    for name in names:
        spec = doc.witnesses.get(name)
        if spec is None:
            raise CliError(f"no witness named {name!r}; document defines: "
                           f"{', '.join(sorted(doc.witnesses)) or 'none'}")
        witness = verify_properness_witness(spec.gog, spec)
        report.checks.append(
            reports.from_check_dict(witness.report, name=f"witness {name}"))
        if witness.valid:
            report.checks.append(reports.bound_check(
                f"edge-bound {name}", check_edge_bound(spec.gog, witness)))
    return report


def cmd_tower_build(args):
    from .tower import build_graphs
    graphs = build_graphs(args.p, args.n, args.m)
    report = reports.Report(
        "tower build", {"p": args.p, "n": args.n, "m": args.m})
    for label, gog in (("path", graphs.path), ("tail", graphs.tail),
                       ("joined", graphs.joined)):
        report.add(label, reports.PASS,
                   vertices=list(gog.graph.vertices),
                   edges=dict(gog.graph.edges),
                   vertex_orders={v: _order_or_guard(gog.vertices[v].model)
                                  for v in gog.graph.vertices},
                   edge_orders={e: _order_or_guard(gog.edges[e].model)
                                for e in gog.graph.edges})
    return report


def _tower_verify_checks(p, max_level):
    from .tower import (build_level, build_witnesses, check_retraction_square,
                        check_transition_maps, check_two_generation)
    checks = []

    def guarded(name, thunk):
        try:
            got = thunk()
        except ValueError as exc:
            checks.append(reports.make_check(name, reports.UNKNOWN,
                                             reason=str(exc)))
            return
        checks.extend(got)

    for n in range(2, max_level + 1):
        guarded(f"retraction-square-n{n}", lambda n=n: [
            reports.from_check_dict(check_retraction_square(build_level(p, n)),
                                    name=f"retraction-square-n{n}")])
    for n in range(0, max_level):
        for m in range(0, max_level - n):
            if n == 0 and m == 0:
                continue
            guarded(f"transition-n{n}-m{m}", lambda n=n, m=m: [
                reports.from_check_dict(check_transition_maps(p, n, m),
                                        name=f"transition-n{n}-m{m}")])
    for n in range(1, max_level + 1):
        guarded(f"witnesses-n{n}", lambda n=n: _witness_checks(p, n,
                                                               build_witnesses))
        guarded(f"two-generation-n{n}", lambda n=n: [
            reports.from_check_dict(check_two_generation(p, n),
                                    name=f"two-generation-n{n}")])
    return checks


def _witness_checks(p, n, build_witnesses):
    out = []
    for witness in build_witnesses(p, n):
        gog = witness.specialisation.gog
        label = witness.specialisation.name
        out.append(reports.from_check_dict(witness.report,
                                           name=f"witness {label}"))
        out.append(reports.bound_check(f"edge-bound {label}",
                                       check_edge_bound(gog, witness)))
    return out


def cmd_tower_verify_all(args):
    report = reports.Report(
        "tower verify-all", {"p": args.p, "max_level": args.max_level})
    report.extend(_tower_verify_checks(args.p, args.max_level))
    return report


def cmd_separate(args):
    letters = parse_word(args.word)
    report = reports.Report(
        "separate", {"word": args.word, "p": args.p,
                     "start_level": args.start_level,
                     "max_level": args.max_level})
    from .amalgam import separate
    try:
        cert = separate(letters, args.p, start_level=args.start_level,
                        max_level=args.max_level)
    except ValueError as exc:
        message = str(exc)
        if message == "trivial element":
            report.add("separate", reports.PASS, verdict="trivial element")
            return report
        if message.startswith("inconclusive"):
            report.add("separate", reports.UNKNOWN, verdict=message)
            return report
        raise CliError(message) from None
    report.add("separate", reports.PASS,
               level=cert.level,
               target=cert.specialisation.target.name,
               image=list(cert.image.coords),
               reduced_letters=len(cert.reduced.letters()),
               certified_injective=cert.certified_injective,
               reverified=cert.reevaluate() == cert.image)
    return report


def _params(args):
    out = {}
    for key in ("p", "n", "m", "max_level"):
        value = getattr(args, key, None)
        if value is not None:
            out[key] = value
    return out


def cmd_run(args):
    try:
        return registry.run_example(args.id, **_params(args))
    except ValueError as exc:
        raise CliError(str(exc)) from None


def cmd_run_all(args):
    return registry.run_all(args.examples, **_params(args))


# -- wiring ----------------------------------------------------------------------


def _add_json(sp):
    sp.add_argument("--json", action="store_true",
                    help="emit the report as stable JSON")


def _add_params(sp, keys=("p", "n", "m", "max_level")):
    flags = {"p": "--p", "n": "--n", "m": "--m", "max_level": "--max-level"}
    for key in keys:
        sp.add_argument(flags[key], dest=key, type=int, default=None)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pgog",
        description="Verification tools for finite graphs of finite p-groups.",
        epilog="PGOG_SIZE_GUARD overrides the 2^20 subgroup enumeration cap.")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("parse", help="parse a DSL document and list it")
    sp.add_argument("file", help="document path, or - for stdin")
    _add_json(sp)
    sp.set_defaults(handler=cmd_parse)

    sp = sub.add_parser("collapse",
                        help="divergence analysis of presentations and graphs")
    sp.add_argument("file")
    sp.add_argument("--name", help="restrict to one presentation or graph")
    sp.add_argument("--p", dest="p", type=int, default=None)
    _add_json(sp)
    sp.set_defaults(handler=cmd_collapse)

    sp = sub.add_parser("bound",
                        help="verify witnesses and the edge-count bound")
    sp.add_argument("file")
    sp.add_argument("--witness", help="restrict to one witness")
    _add_json(sp)
    sp.set_defaults(handler=cmd_bound)

    tower = sub.add_parser("tower", help="build and verify tower levels")
    tsub = tower.add_subparsers(dest="tower_command", required=True)
    sp = tsub.add_parser("build", help="build the three splittings")
    sp.add_argument("--p", dest="p", type=int, default=2)
    sp.add_argument("--n", dest="n", type=int, default=2)
    sp.add_argument("--m", dest="m", type=int, default=0)
    _add_json(sp)
    sp.set_defaults(handler=cmd_tower_build)
    sp = tsub.add_parser("verify-all",
                         help="retraction squares, transitions, witnesses, "
                              "bounds, and two-generation up to a level")
    sp.add_argument("--p", dest="p", type=int, default=2)
    sp.add_argument("--max-level", dest="max_level", type=int, default=3)
    _add_json(sp)
    sp.set_defaults(handler=cmd_tower_verify_all)

    sp = sub.add_parser("separate",
                        help="certify a tagged word nontrivial in a finite "
                             "quotient")
    sp.add_argument("--word", required=True,
                    help="letters like 'G1:k1 L1:t' (L<n> = lamplighter level)")
    sp.add_argument("--p", dest="p", type=int, default=2)
    sp.add_argument("--start-level", dest="start_level", type=int, default=1)
    sp.add_argument("--max-level", dest="max_level", type=int, default=4)
    _add_json(sp)
    sp.set_defaults(handler=cmd_separate)

    sp = sub.add_parser("run", help="run one registered example")
    sp.add_argument("id", help="example id; see run-all output for the list")
    _add_params(sp)
    _add_json(sp)
    sp.set_defaults(handler=cmd_run)

    sp = sub.add_parser("run-all", help="run registered examples")
    sp.add_argument("--examples", default="*",
                    help="glob over example ids (default: all)")
    _add_params(sp)
    _add_json(sp)
    sp.set_defaults(handler=cmd_run_all)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        report = args.handler(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = report.to_json() if args.json else report.to_text()
    sys.stdout.write(out)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
