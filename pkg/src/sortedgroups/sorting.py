"""Sorting data on finite groups.

A sorting data assigns to every normal subgroup N of a finite group a family
of admissible sort tuples over a fixed finite alphabet. Whether a tuple is
admissible depends only on the set of sort names occurring in it (its
support), so each family is stored as a set of supports; tuples stay in the
membership API but are collapsed to their support on entry.

The closure axioms connect the families: the family at the full group
contains everything, a lift function maps admissible supports of smaller
subgroups into the families of larger ones, and unions of admissible supports
are admissible at intersections. ``validate`` reports every violation,
``generate`` closes a partial assignment under the rules, and
``push_forward``/``compare``/``meet`` give the order structure used by the
quotient and fibre-product machinery.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .fingroup import FiniteGroup, GroupMap, Subgroup, normal_subgroups

__all__ = [
    "Support",
    "SupportFamily",
    "SortLift",
    "SortingData",
    "ValidationReport",
    "all_supports",
    "representative_tuple",
    "freeze_families",
    "full_data",
    "membership",
    "validate",
    "generate",
    "push_forward",
    "compare",
    "meet",
    "data_key",
]

Support = frozenset[str]
SupportFamily = frozenset[Support]

LIFT_KINDS = ("identity", "append_suffix")


@dataclass(frozen=True)
class SortLift:
    """The lift function carrying admissible supports to larger subgroups.

    ``identity`` keeps the support; ``append_suffix`` adjoins a fixed set of
    sorts. Both ignore the index argument of ``apply`` — it is part of the
    interface so that validation can evaluate the lift at the subgroup index
    it is required to hold at.
    """

    kind: str = "identity"
    sorts: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in LIFT_KINDS:
            raise ValueError(f"unknown lift kind {self.kind!r}")
        if self.kind == "identity" and self.sorts:
            raise ValueError("the identity lift takes no sorts")
        if self.kind == "append_suffix" and not self.sorts:
            raise ValueError("append_suffix needs at least one sort")
        if len(set(self.sorts)) != len(self.sorts):
            raise ValueError("lift sorts must be distinct")

    def apply(self, k: int, support: Support) -> Support:
        if k < 1:
            raise ValueError(f"index must be positive, got {k}")
        if self.kind == "identity":
            return support
        return frozenset(support | set(self.sorts))


def all_supports(alphabet: Sequence[str]) -> SupportFamily:
    """Every nonempty subset of the alphabet."""
    names = tuple(alphabet)
    return frozenset(
        frozenset(combo)
        for r in range(1, len(names) + 1)
        for combo in itertools.combinations(names, r))


def representative_tuple(support: Support,
                         alphabet: Sequence[str]) -> tuple[str, ...]:
    """The canonical tuple for a support: its sorts in alphabet order."""
    rep = tuple(a for a in alphabet if a in support)
    if len(rep) != len(support):
        raise ValueError(f"support {set(support)} not within the alphabet")
    return rep


def _subgroup_key(N: Subgroup) -> tuple[int, list[int]]:
    return (len(N), sorted(N))


def _support_key(S: Support) -> tuple[int, list[str]]:
    return (len(S), sorted(S))


def freeze_families(
    families: Mapping[Iterable[int], Iterable[Iterable[str]]],
) -> tuple[tuple[Subgroup, SupportFamily], ...]:
    """Normalize a subgroup → supports mapping into the canonical tuple form
    stored on SortingData (sorted by subgroup size then elements)."""
    out = []
    for N, fam in families.items():
        key = frozenset(N)
        value = frozenset(frozenset(S) for S in fam)
        out.append((key, value))
    out.sort(key=lambda item: _subgroup_key(item[0]))
    return tuple(out)


@lru_cache(maxsize=None)
def _family_index(
    families: tuple[tuple[Subgroup, SupportFamily], ...],
) -> dict[Subgroup, SupportFamily]:
    return dict(families)


@dataclass(frozen=True)
class SortingData:
    """The families of admissible supports, one per normal subgroup.

    Structural requirements are enforced here (the assignment covers exactly
    the normal subgroups, supports stay inside the alphabet, the family at
    the full group is everything); the closure axioms are checked separately
    by ``validate`` so that defective data can be carried around, inspected
    and reported on.

    ``downward_closure`` opts in to the strictness rule that every family be
    closed under shrinking supports. It is off by default: the families this
    machinery exists for are upward-closed, and the exact worked datasets in
    the fixture corpus fail the downward rule while passing everything else.
    """

    group: FiniteGroup
    alphabet: tuple[str, ...]
    families: tuple[tuple[Subgroup, SupportFamily], ...]
    lift: SortLift
    downward_closure: bool = False

    def __post_init__(self) -> None:
        if not self.alphabet:
            raise ValueError("alphabet must not be empty")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError("alphabet names must be distinct")
        names = set(self.alphabet)
        if not set(self.lift.sorts) <= names:
            raise ValueError("lift sorts must come from the alphabet")
        normals = normal_subgroups(self.group)
        keys = [N for N, _ in self.families]
        if keys != normals:
            raise ValueError(
                "assignment must cover exactly the normal subgroups, "
                "in canonical order")
        for N, fam in self.families:
            for S in fam:
                if not S:
                    raise ValueError("empty support is never admissible")
                if not S <= names:
                    raise ValueError(
                        f"support {set(S)} escapes the alphabet at "
                        f"{_fmt_subgroup(N)}")
        G = frozenset(self.group.elements())
        if self.family_of(G) != all_supports(self.alphabet):
            raise ValueError("the family at the full group must contain "
                             "every support")

    def family_of(self, N: Subgroup) -> SupportFamily:
        index = _family_index(self.families)
        try:
            return index[frozenset(N)]
        except KeyError:
            raise ValueError(
                f"{_fmt_subgroup(frozenset(N))} is not a normal subgroup "
                "of the carrier") from None

    def is_full(self) -> bool:
        full = all_supports(self.alphabet)
        return all(fam == full for _, fam in self.families)

    def __repr__(self) -> str:
        label = self.group.name or f"order {self.group.order}"
        total = sum(len(fam) for _, fam in self.families)
        return f"SortingData({label}, {total} supports)"


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of an axiom check: a list of human-readable findings,
    empty when everything holds."""

    findings: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.findings


def _fmt_subgroup(N: Subgroup) -> str:
    return "{" + ",".join(str(x) for x in sorted(N)) + "}"


def _fmt_support(S: Support, alphabet: Sequence[str]) -> str:
    return "{" + ",".join(representative_tuple(S, alphabet)) + "}"


def full_data(G: FiniteGroup, alphabet: Sequence[str],
              lift: SortLift | None = None) -> SortingData:
    """Every support admissible everywhere — the largest sorting data."""
    names = tuple(alphabet)
    every = all_supports(names)
    fams = {N: every for N in normal_subgroups(G)}
    return SortingData(G, names, freeze_families(fams), lift or SortLift())


def membership(F: SortingData, N: Iterable[int], J: Sequence[str]) -> bool:
    """Whether the sort tuple J is admissible at N.

    Only the set of names in J matters; duplicates and order are ignored.
    The empty tuple is rejected rather than answered.
    """
    if not J:
        raise ValueError("a sort tuple must name at least one sort")
    support = frozenset(J)
    if not support <= set(F.alphabet):
        raise ValueError(f"unknown sorts {sorted(support - set(F.alphabet))}")
    return support in F.family_of(frozenset(N))


def validate(F: SortingData) -> ValidationReport:
    """Check the closure axioms, reporting every violating witness.

    The checks, in report order: no family is empty; families are closed
    downward under support inclusion (only when the data opts in); the lift
    of an admissible support of a smaller subgroup, taken at that subgroup's
    index, is admissible at every larger subgroup; the union of admissible
    supports of two subgroups is admissible at their intersection; conjugate
    subgroups carry equal families (vacuous here, since every key is normal,
    but scanned for uniformity with the complete-system validator).
    """
    G = F.group
    alphabet = F.alphabet
    index = dict(F.families)
    normals = [N for N, _ in F.families]
    findings: list[str] = []

    for N in normals:
        if not index[N]:
            findings.append(f"empty family at {_fmt_subgroup(N)}")

    if F.downward_closure:
        for N in normals:
            fam = index[N]
            for S in sorted(fam, key=_support_key):
                for r in range(1, len(S)):
                    for sub in itertools.combinations(sorted(S), r):
                        small = frozenset(sub)
                        if small not in fam:
                            findings.append(
                                f"downward closure: {_fmt_support(S, alphabet)}"
                                f" at {_fmt_subgroup(N)} lacks "
                                f"{_fmt_support(small, alphabet)}")

    for N1 in normals:
        k = G.order // len(N1)
        fam1 = index[N1]
        for N2 in normals:
            if not N1 <= N2:
                continue
            fam2 = index[N2]
            for S in sorted(fam1, key=_support_key):
                lifted = F.lift.apply(k, S)
                if lifted not in fam2:
                    findings.append(
                        f"lift image {_fmt_support(lifted, alphabet)} of "
                        f"{_fmt_support(S, alphabet)} from {_fmt_subgroup(N1)}"
                        f" missing at {_fmt_subgroup(N2)}")

    for i, N1 in enumerate(normals):
        fam1 = sorted(index[N1], key=_support_key)
        for N2 in normals[i:]:
            fam2 = sorted(index[N2], key=_support_key)
            both = index[N1 & N2]
            for S1 in fam1:
                for S2 in fam2:
                    if N1 == N2 and _support_key(S2) < _support_key(S1):
                        continue
                    if S1 | S2 not in both:
                        findings.append(
                            f"union {_fmt_support(S1 | S2, alphabet)} of "
                            f"{_fmt_support(S1, alphabet)} at "
                            f"{_fmt_subgroup(N1)} and "
                            f"{_fmt_support(S2, alphabet)} at "
                            f"{_fmt_subgroup(N2)} missing at "
                            f"{_fmt_subgroup(N1 & N2)}")

    for N in normals:
        for g in G.elements():
            M = frozenset(G.conj(g, n) for n in N)
            if index.get(M, index[N]) != index[N]:
                findings.append(
                    f"conjugate subgroups {_fmt_subgroup(N)} and "
                    f"{_fmt_subgroup(M)} carry different families")
                break

    return ValidationReport(tuple(findings))


def generate(G: FiniteGroup, alphabet: Sequence[str],
             presort: Mapping[Iterable[int], Iterable[Iterable[str]]],
             lift: SortLift | None = None, *,
             downward_closure: bool = False) -> SortingData:
    """Close a partial assignment under the axioms; the least fixed point.

    The family at the full group starts at everything; the lift rule, the
    union rule and (when flagged) downward closure are applied until nothing
    new appears. Subgroups the presort leaves out start empty — they stay
    empty unless some rule reaches them, and ``validate`` flags whatever
    remains empty.
    """
    lift = lift or SortLift()
    names = tuple(alphabet)
    name_set = set(names)
    normals = normal_subgroups(G)
    normal_set = set(normals)
    fam: dict[Subgroup, set[Support]] = {N: set() for N in normals}
    for N, supports in presort.items():
        key = frozenset(N)
        if key not in normal_set:
            raise ValueError(
                f"{_fmt_subgroup(key)} is not a normal subgroup of the "
                "carrier")
        for S in supports:
            support = frozenset(S)
            if not support or not support <= name_set:
                raise ValueError(f"bad presort support {set(S)}")
            fam[key].add(support)
    G_key = frozenset(G.elements())
    fam[G_key] = set(all_supports(names))

    pairs = [(N1, N2) for N1 in normals for N2 in normals if N1 <= N2]
    crossings = [(N1, N2, N1 & N2)
                 for i, N1 in enumerate(normals) for N2 in normals[i:]]
    indexes = {N: G.order // len(N) for N in normals}

    changed = True
    while changed:
        changed = False
        for N1, N2 in pairs:
            target = fam[N2]
            k = indexes[N1]
            for S in list(fam[N1]):
                lifted = lift.apply(k, S)
                if lifted not in target:
                    target.add(lifted)
                    changed = True
        for N1, N2, meet_key in crossings:
            target = fam[meet_key]
            for S1 in list(fam[N1]):
                for S2 in list(fam[N2]):
                    union = S1 | S2
                    if union not in target:
                        target.add(union)
                        changed = True
        if downward_closure:
            for N in normals:
                target = fam[N]
                for S in list(target):
                    for r in range(1, len(S)):
                        for sub in itertools.combinations(sorted(S), r):
                            small = frozenset(sub)
                            if small not in target:
                                target.add(small)
                                changed = True

    return SortingData(G, names, freeze_families(fam), lift,
                       downward_closure)


def push_forward(f: GroupMap, F: SortingData) -> SortingData:
    """Transport sorting data along an epimorphism: each family on the image
    is read off the preimage subgroup. This is the largest data making the
    map sorted."""
    if f.source != F.group:
        raise ValueError("map does not start at the data's carrier")
    if not f.is_surjective:
        raise ValueError("push-forward is along epimorphisms only")
    fams = {N2: F.family_of(f.preimage(N2))
            for N2 in normal_subgroups(f.target)}
    return SortingData(f.target, F.alphabet, freeze_families(fams), F.lift,
                       F.downward_closure)


def _same_carrier(F1: SortingData, F2: SortingData) -> None:
    if (F1.group != F2.group or F1.alphabet != F2.alphabet
            or F1.lift != F2.lift):
        raise ValueError("mismatched carriers")


def compare(F1: SortingData, F2: SortingData) -> str:
    """Pointwise containment of families: one of ``equal``, ``less``,
    ``greater``, ``incomparable``."""
    _same_carrier(F1, F2)
    index2 = dict(F2.families)
    leq = geq = True
    for N, fam1 in F1.families:
        fam2 = index2[N]
        if not fam1 <= fam2:
            leq = False
        if not fam1 >= fam2:
            geq = False
    if leq and geq:
        return "equal"
    if leq:
        return "less"
    if geq:
        return "greater"
    return "incomparable"


def meet(F1: SortingData, F2: SortingData) -> SortingData:
    """Pointwise intersection — the largest data below both arguments."""
    _same_carrier(F1, F2)
    index2 = dict(F2.families)
    fams = {N: fam1 & index2[N] for N, fam1 in F1.families}
    return SortingData(F1.group, F1.alphabet, freeze_families(fams), F1.lift,
                       F1.downward_closure)


def data_key(F: SortingData) -> tuple:
    """A sortable, deterministic rendering of the families; used wherever
    candidate data must be put in a reproducible order."""
    return tuple(
        (tuple(sorted(N)),
         tuple(sorted(representative_tuple(S, F.alphabet) for S in fam)))
        for N, fam in F.families)
