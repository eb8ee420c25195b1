"""Fixture files and canonical JSON serialization.

Everything the command line reads or writes goes through one JSON document
format, versioned by a mandatory ``schema`` field and rendered by
``canonical_dumps`` so that equal inputs produce byte-equal reports. A
fixture names its parts — groups, sorted groups, morphisms, systems — and
every cross-reference must resolve; defective *data* is representable (and
reported on), defective *documents* are not.

Sorted groups marked ``"verbatim": true`` are exact transcriptions kept
with their known axiom violations; validation reports their findings
without failing the fixture.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from . import sorting
from .csys import CompleteSystem
from .fingroup import FiniteGroup, GroupMap
from .sep import CoverCertificate, CoverStep, EmbWitness
from .sortedcat import SortedGroup, SortedMap

SCHEMA = "sortedgroups/1"

__all__ = [
    "SCHEMA",
    "FixtureError",
    "Fixture",
    "canonical_dumps",
    "load_fixture",
    "parse_fixture",
    "group_to_json",
    "group_from_json",
    "data_to_json",
    "data_from_json",
    "witness_to_json",
    "certificate_to_json",
    "system_to_json",
    "system_from_json",
]


class FixtureError(Exception):
    """The document cannot be understood (as opposed to failing axioms)."""


def canonical_dumps(obj: Any) -> str:
    """The one rendering every report uses: sorted keys, two-space indent,
    trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) \
        + "\n"


# --- groups and maps -------------------------------------------------------

def group_to_json(G: FiniteGroup) -> dict:
    return {"name": G.name, "table": [list(row) for row in G.table]}


def group_from_json(doc: Mapping) -> FiniteGroup:
    try:
        return FiniteGroup(doc["table"], name=doc.get("name", ""))
    except (KeyError, TypeError, ValueError) as exc:
        raise FixtureError(f"bad group document: {exc}") from None


def _supports_to_json(fam: sorting.SupportFamily,
                      alphabet: tuple[str, ...]) -> Any:
    if fam == sorting.all_supports(alphabet):
        return "all"
    return [sorted(S) for S in sorted(fam, key=lambda S: (len(S), sorted(S)))]


def _supports_from_json(doc: Any, alphabet: tuple[str, ...]) \
        -> sorting.SupportFamily:
    if doc == "all":
        return sorting.all_supports(alphabet)
    if not isinstance(doc, list):
        raise FixtureError(f"bad support family {doc!r}")
    return frozenset(frozenset(S) for S in doc)


def data_to_json(data: sorting.SortingData) -> dict:
    return {
        "group": group_to_json(data.group),
        "alphabet": list(data.alphabet),
        "lift": {"kind": data.lift.kind, "sorts": list(data.lift.sorts)},
        "downward_closure": data.downward_closure,
        "families": [
            {"subgroup": sorted(N),
             "supports": _supports_to_json(fam, data.alphabet)}
            for N, fam in data.families
        ],
    }


def data_from_json(doc: Mapping,
                   group: FiniteGroup | None = None) -> sorting.SortingData:
    try:
        G = group if group is not None else group_from_json(doc["group"])
        alphabet = tuple(doc["alphabet"])
        lift_doc = doc.get("lift", {"kind": "identity", "sorts": []})
        lift = sorting.SortLift(lift_doc["kind"], tuple(lift_doc["sorts"]))
        fams = {
            frozenset(entry["subgroup"]):
                _supports_from_json(entry["supports"], alphabet)
            for entry in doc["families"]
        }
        return sorting.SortingData(
            G, alphabet, sorting.freeze_families(fams), lift,
            bool(doc.get("downward_closure", False)))
    except FixtureError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise FixtureError(f"bad sorting data document: {exc}") from None


def witness_to_json(w: EmbWitness) -> dict:
    return {
        "B": data_to_json(w.B.data),
        "A": data_to_json(w.A.data),
        "Pi": list(w.Pi.map.images),
        "phi": list(w.phi.map.images),
        "lift": None if w.lift is None else list(w.lift.map.images),
    }


def _step_to_json(step: CoverStep) -> dict:
    return {
        "kind": step.kind,
        "witness": witness_to_json(step.witness),
        "maximal_pair": {
            "apex": data_to_json(step.maximal_pair.image.data),
            "pi1": list(step.maximal_pair.pi1.map.images),
            "pi2": list(step.maximal_pair.pi2.map.images),
        },
        "result": data_to_json(step.result.data),
        "projection": list(step.projection.map.images),
    }


def certificate_to_json(cert: CoverCertificate,
                        options: Mapping[str, Any]) -> dict:
    """The full replayable record: the input, the knobs, every step."""
    return {
        "schema": SCHEMA,
        "kind": "cover_certificate",
        "input": data_to_json(cert.input.data),
        "options": dict(options),
        "steps": [_step_to_json(s) for s in cert.steps],
        "final": data_to_json(cert.final.data),
        "composite": list(cert.composite.map.images),
    }


def system_to_json(S: CompleteSystem) -> dict:
    return {
        "K": S.K,
        "L": S.L,
        "alphabet": list(S.alphabet),
        "lift": {"kind": S.lift.kind, "sorts": list(S.lift.sorts)},
        "downward_closure": S.downward_closure,
        "classes": list(S.classes),
        "fibers": {c: group_to_json(S.fibers[c]) for c in S.classes},
        "occupancy": {c: _supports_to_json(S.occupancy[c], S.alphabet)
                      for c in S.classes},
        "transitions": [
            {"from": i, "to": j, "images": list(t)}
            for (i, j), t in sorted(S.transitions.items())
        ],
    }


def system_from_json(doc: Mapping) -> CompleteSystem:
    """Rebuild a serialized system; its group of origin is not recorded,
    so the result carries no source and no class subgroups."""
    try:
        alphabet = tuple(doc["alphabet"])
        lift_doc = doc["lift"]
        return CompleteSystem(
            alphabet=alphabet,
            K=doc["K"],
            L=doc["L"],
            classes=tuple(doc["classes"]),
            fibers={c: group_from_json(g)
                    for c, g in doc["fibers"].items()},
            occupancy={c: _supports_from_json(fam, alphabet)
                       for c, fam in doc["occupancy"].items()},
            transitions={(t["from"], t["to"]): tuple(t["images"])
                         for t in doc["transitions"]},
            lift=sorting.SortLift(lift_doc["kind"], tuple(lift_doc["sorts"])),
            downward_closure=bool(doc["downward_closure"]),
        )
    except FixtureError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise FixtureError(f"bad system document: {exc}") from None


# --- fixtures ---------------------------------------------------------------

@dataclass
class Fixture:
    """A named bundle of test subjects, with every reference resolved."""

    name: str
    groups: dict[str, FiniteGroup] = field(default_factory=dict)
    sorted_groups: dict[str, SortedGroup] = field(default_factory=dict)
    verbatim: frozenset[str] = frozenset()
    morphisms: dict[str, GroupMap] = field(default_factory=dict)
    systems: dict[str, dict] = field(default_factory=dict)
    expected: dict = field(default_factory=dict)
    main: str | None = None

    def main_subject(self) -> SortedGroup:
        if self.main is not None:
            return self.sorted_groups[self.main]
        if len(self.sorted_groups) == 1:
            return next(iter(self.sorted_groups.values()))
        raise FixtureError(
            f"fixture {self.name} has {len(self.sorted_groups)} sorted "
            "groups and no main entry")


def parse_fixture(doc: Any) -> Fixture:
    if not isinstance(doc, dict):
        raise FixtureError("the document is not an object")
    if doc.get("schema") != SCHEMA:
        raise FixtureError(
            f"unsupported schema {doc.get('schema')!r}; expected {SCHEMA!r}")
    name = doc.get("name")
    if not isinstance(name, str) or not name:
        raise FixtureError("the fixture has no name")

    groups = {gname: group_from_json(gdoc)
              for gname, gdoc in doc.get("groups", {}).items()}

    sorted_groups: dict[str, SortedGroup] = {}
    verbatim: set[str] = set()
    for sname, sdoc in doc.get("sorted_groups", {}).items():
        ref = sdoc.get("group")
        if ref not in groups:
            raise FixtureError(
                f"sorted group {sname} references unknown group {ref!r}")
        data = data_from_json(sdoc, group=groups[ref])
        sorted_groups[sname] = SortedGroup(data, check=False)
        if sdoc.get("verbatim", False):
            verbatim.add(sname)

    morphisms: dict[str, GroupMap] = {}
    for mname, mdoc in doc.get("morphisms", {}).items():
        src, tgt = mdoc.get("source"), mdoc.get("target")
        if src not in groups or tgt not in groups:
            raise FixtureError(
                f"morphism {mname} references unknown groups "
                f"{src!r} -> {tgt!r}")
        try:
            morphisms[mname] = GroupMap(groups[src], groups[tgt],
                                        tuple(mdoc["images"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise FixtureError(f"bad morphism {mname}: {exc}") from None

    systems: dict[str, dict] = {}
    for yname, ydoc in doc.get("systems", {}).items():
        ref = ydoc.get("sorted_group")
        if ref not in sorted_groups:
            raise FixtureError(
                f"system {yname} references unknown sorted group {ref!r}")
        systems[yname] = {"sorted_group": ref,
                          "K": ydoc.get("K"), "L": ydoc.get("L")}

    main = doc.get("main")
    if main is not None and main not in sorted_groups:
        raise FixtureError(f"main names unknown sorted group {main!r}")

    return Fixture(name=name, groups=groups, sorted_groups=sorted_groups,
                   verbatim=frozenset(verbatim), morphisms=morphisms,
                   systems=systems, expected=dict(doc.get("expected", {})),
                   main=main)


def load_fixture(path: str | Path) -> Fixture:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FixtureError(f"cannot read {path}: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FixtureError(f"{path} is not JSON: {exc}") from None
    return parse_fixture(doc)


def fixture_to_json(fx: Fixture) -> dict:
    """Render a fixture back out (used to generate the shipped corpus)."""
    doc: dict[str, Any] = {"schema": SCHEMA, "name": fx.name}
    if fx.groups:
        doc["groups"] = {n: group_to_json(G) for n, G in fx.groups.items()}
    if fx.sorted_groups:
        rendered = {}
        for n, SG in fx.sorted_groups.items():
            gname = next(gn for gn, G in fx.groups.items()
                         if G == SG.data.group)
            entry = data_to_json(SG.data)
            entry["group"] = gname
            if n in fx.verbatim:
                entry["verbatim"] = True
            rendered[n] = entry
        doc["sorted_groups"] = rendered
    if fx.morphisms:
        doc["morphisms"] = {
            n: {"source": next(gn for gn, G in fx.groups.items()
                               if G == m.source),
                "target": next(gn for gn, G in fx.groups.items()
                               if G == m.target),
                "images": list(m.images)}
            for n, m in fx.morphisms.items()
        }
    if fx.systems:
        doc["systems"] = fx.systems
    if fx.expected:
        doc["expected"] = fx.expected
    if fx.main is not None:
        doc["main"] = fx.main
    return doc
