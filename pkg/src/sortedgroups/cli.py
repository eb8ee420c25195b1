"""Command line front end.

Five subcommands over fixture files: ``validate`` (axiom checks on sorted
groups and their complete systems), ``sep`` (decide the embedding
property), ``cover`` (build the universal cover and optionally emit its
certificate), ``system`` (materialize the dual complete system), and
``replay`` (re-run a certificate from its embedded input and compare
bytes).

Every report is a single JSON document on stdout, rendered canonically so
that equal runs are byte-equal. Exit codes are stable: 0 success or a true
verdict, 1 a false verdict or failed validation, 2 a document that cannot
be parsed, 3 a resource cap hit before termination.

The SORTEDGROUPS_SEED environment variable is reserved for future
randomized strategies; every current code path is deterministic and
ignores it.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Callable

from . import csys, fixtures, sorting
from .fingroup import FiniteGroup
from .fixtures import FixtureError, canonical_dumps
from .sep import BudgetExceeded, has_sep, universal_sep_cover
from .sortedcat import SortedGroup

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_PARSE = 2
EXIT_CAP = 3

Formation = Callable[[FiniteGroup], bool]


def _is_prime_power(n: int) -> bool:
    if n == 1:
        return True
    p = next(d for d in range(2, n + 1) if n % d == 0)
    while n % p == 0:
        n //= p
    return n == 1


FORMATIONS: dict[str, Formation | None] = {
    "all": None,
    "abelian": lambda G: G.is_abelian,
    "pgroup": lambda G: _is_prime_power(G.order),
}


def _emit(doc: dict) -> None:
    sys.stdout.write(canonical_dumps(doc))


def _error(exc: Exception) -> int:
    _emit({"schema": fixtures.SCHEMA, "kind": "error", "error": str(exc)})
    return EXIT_PARSE


def _embedding_to_json(e: csys.SystemEmbedding) -> dict:
    return {"base": e.source.base, "target_base": e.target.base,
            "n_star": e.n_star, "h": list(e.h.images)}


# --- subcommands ------------------------------------------------------------

def cmd_validate(args: argparse.Namespace) -> int:
    try:
        fx = fixtures.load_fixture(args.fixture)
    except FixtureError as exc:
        return _error(exc)
    subjects = []
    ok = True
    for name in sorted(fx.sorted_groups):
        SG = fx.sorted_groups[name]
        report = sorting.validate(SG.data)
        system_report = csys.validate_scs(csys.build(SG))
        verbatim = name in fx.verbatim
        if (report.findings or system_report.findings) and not verbatim:
            ok = False
        subjects.append({
            "subject": name,
            "verbatim": verbatim,
            "findings": list(report.findings),
            "system_findings": list(system_report.findings),
        })
    _emit({
        "schema": fixtures.SCHEMA,
        "kind": "validation_report",
        "fixture": fx.name,
        "ok": ok,
        "subjects": subjects,
    })
    return EXIT_OK if ok else EXIT_FALSE


def cmd_sep(args: argparse.Namespace) -> int:
    try:
        fx = fixtures.load_fixture(args.fixture)
        subject = fx.main_subject()
    except FixtureError as exc:
        return _error(exc)
    verdict = has_sep(subject, args.mode,
                      formation=FORMATIONS[args.formation])
    _emit({
        "schema": fixtures.SCHEMA,
        "kind": "sep_report",
        "fixture": fx.name,
        "mode": args.mode,
        "formation": args.formation,
        "holds": verdict.holds,
        "witness": (None if verdict.witness is None
                    else fixtures.witness_to_json(verdict.witness)),
    })
    return EXIT_OK if verdict.holds else EXIT_FALSE


def cmd_cover(args: argparse.Namespace) -> int:
    try:
        fx = fixtures.load_fixture(args.fixture)
        subject = fx.main_subject()
    except FixtureError as exc:
        return _error(exc)
    options = {
        "mode": args.mode,
        "formation": args.formation,
        "tie_break": args.tie_break,
        "max_order": args.max_order,
        "max_steps": args.max_steps,
    }
    try:
        cert = universal_sep_cover(
            subject, max_order=args.max_order, max_steps=args.max_steps,
            mode=args.mode, formation=FORMATIONS[args.formation],
            tie_break=args.tie_break)
    except BudgetExceeded as exc:
        _emit({
            "schema": fixtures.SCHEMA,
            "kind": "cover_report",
            "fixture": fx.name,
            "outcome": "cap_exceeded",
            "reason": exc.reason,
        })
        return EXIT_CAP
    text = canonical_dumps(fixtures.certificate_to_json(cert, options))
    if args.emit_cert is not None:
        with open(args.emit_cert, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_system(args: argparse.Namespace) -> int:
    try:
        fx = fixtures.load_fixture(args.fixture)
        subject = fx.main_subject()
    except FixtureError as exc:
        return _error(exc)
    S = csys.build(subject, K=args.K, L=args.L)
    members = sum(1 for _ in S.elements())
    report = {
        "schema": fixtures.SCHEMA,
        "kind": "system_report",
        "fixture": fx.name,
        "system": fixtures.system_to_json(S),
        "statistics": {
            "omega_stable": True,
            "members": members,
            "classes": len(S.classes),
            "sorts": len(S.sorts()),
        },
    }
    code = EXIT_OK
    if args.check_cosep:
        verdict = csys.check_cosep(S)
        witness = None
        if verdict.witness is not None:
            Pi, Phi = verdict.witness
            witness = {"Pi": _embedding_to_json(Pi),
                       "Phi": _embedding_to_json(Phi)}
        report["cosep"] = {"holds": verdict.holds, "witness": witness}
        if not verdict.holds:
            code = EXIT_FALSE
    _emit(report)
    return code


def cmd_replay(args: argparse.Namespace) -> int:
    try:
        with open(args.certificate) as fh:
            original = fh.read()
    except OSError as exc:
        return _error(FixtureError(f"cannot read {args.certificate}: {exc}"))
    try:
        doc = json.loads(original)
    except ValueError as exc:
        return _error(FixtureError(
            f"{args.certificate} is not JSON: {exc}"))
    if not isinstance(doc, dict) or doc.get("schema") != fixtures.SCHEMA \
            or doc.get("kind") != "cover_certificate":
        return _error(FixtureError(
            f"{args.certificate} is not a cover certificate"))
    try:
        data = fixtures.data_from_json(doc["input"])
        options = doc["options"]
        formation = FORMATIONS[options["formation"]]
        subject = SortedGroup(data, check=False)
        cert = universal_sep_cover(
            subject, max_order=options["max_order"],
            max_steps=options["max_steps"], mode=options["mode"],
            formation=formation, tie_break=options["tie_break"])
    except (FixtureError, KeyError, TypeError, ValueError) as exc:
        return _error(FixtureError(f"cannot replay: {exc}"))
    except BudgetExceeded as exc:
        _emit({
            "schema": fixtures.SCHEMA,
            "kind": "replay_report",
            "certificate": args.certificate,
            "outcome": "cap_exceeded",
            "reason": exc.reason,
        })
        return EXIT_CAP
    replayed = canonical_dumps(fixtures.certificate_to_json(cert, options))
    identical = replayed == original
    report = {
        "schema": fixtures.SCHEMA,
        "kind": "replay_report",
        "certificate": args.certificate,
        "identical": identical,
    }
    if not identical:
        for lineno, (a, b) in enumerate(
                zip(original.splitlines(), replayed.splitlines()), start=1):
            if a != b:
                report["first_divergence"] = lineno
                break
        else:
            report["first_divergence"] = min(
                len(original.splitlines()), len(replayed.splitlines())) + 1
    _emit(report)
    return EXIT_OK if identical else EXIT_FALSE


# --- wiring -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sortedgroups",
        description="Decide the sorted embedding property, build universal "
                    "covers, and materialize dual complete systems.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate",
                       help="check every sorted group in a fixture against "
                            "the axioms, and its complete system too")
    p.add_argument("fixture")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("sep",
                       help="decide the embedding property for the "
                            "fixture's main sorted group")
    p.add_argument("fixture")
    p.add_argument("--mode", choices=("pushforward_only", "exhaustive"),
                   default="pushforward_only")
    p.add_argument("--formation", choices=sorted(FORMATIONS),
                   default="all")
    p.set_defaults(func=cmd_sep)

    p = sub.add_parser("cover",
                       help="build the universal cover and report its "
                            "certificate")
    p.add_argument("fixture")
    p.add_argument("--mode", choices=("pushforward_only", "exhaustive"),
                   default="pushforward_only")
    p.add_argument("--formation", choices=sorted(FORMATIONS),
                   default="all")
    p.add_argument("--tie-break", dest="tie_break",
                   choices=("default", "reversed"), default="default")
    p.add_argument("--max-order", type=int, default=4096)
    p.add_argument("--max-steps", type=int, default=64)
    p.add_argument("--emit-cert", metavar="PATH", default=None)
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("system",
                       help="materialize the complete system dual to the "
                            "fixture's main sorted group")
    p.add_argument("fixture")
    p.add_argument("--K", type=int, default=None,
                   help="truncation depth (default: the group order)")
    p.add_argument("--L", type=int, default=None,
                   help="sort width (default: the alphabet size)")
    p.add_argument("--check-cosep", action="store_true")
    p.set_defaults(func=cmd_system)

    p = sub.add_parser("replay",
                       help="re-run a cover certificate from its embedded "
                            "input and compare the bytes")
    p.add_argument("certificate")
    p.set_defaults(func=cmd_replay)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
