"""Sorted groups and their category: certified sorted maps, quotient
enumeration up to sorted isomorphism, fibre products carrying generated
data, and the poset of epimorphism pairs with a common image.

A map between sorted groups is *sorted* when every family of the target is
contained in the source family of its preimage subgroup. ``SortedMap``
instances are certificates: constructing one re-checks that containment, so
holding a SortedMap is proof the map is sorted.

The pair poset compares two pairs of epimorphisms sharing sources by the
existence of a mediating sorted map between their images. Maximal pairs are
what the cover engine extends a failed embedding witness to before taking
the fibre product.
"""
from __future__ import annotations

import itertools
from dataclasses import InitVar, dataclass
from functools import cached_property

from . import sorting
from .fingroup import (FiniteGroup, GroupMap, Subgroup, enumerate_epimorphisms,
                       enumerate_isomorphisms, fibre_product, identity_map,
                       is_isomorphic, normal_subgroups, quotient)
from .sorting import SortingData, SortLift

__all__ = [
    "SortedGroup",
    "SortedMap",
    "MorphismPair",
    "is_sorted",
    "unsorted_witness",
    "sorted_identity",
    "sorted_isomorphic",
    "sorted_quotients",
    "sorted_fibre_product",
    "fibre_data_is_minimal",
    "pair_leq",
    "pair_equiv",
    "maximal_pair_above",
]


@dataclass(frozen=True)
class SortedGroup:
    """A finite group together with a sorting data.

    By default the data must pass validation; ``check=False`` admits
    defective data so that datasets recorded exactly as printed in their
    source — known violations included — can flow through the machinery.
    """

    data: SortingData
    check: InitVar[bool] = True

    def __post_init__(self, check: bool) -> None:
        if check:
            report = sorting.validate(self.data)
            if not report.ok:
                raise ValueError(
                    "sorting data fails validation: "
                    + "; ".join(report.findings[:3])
                    + ("; ..." if len(report.findings) > 3 else ""))

    @property
    def group(self) -> FiniteGroup:
        return self.data.group

    @property
    def order(self) -> int:
        return self.data.group.order

    @cached_property
    def is_full(self) -> bool:
        return self.data.is_full()

    def family(self, N: Subgroup) -> sorting.SupportFamily:
        return self.data.family_of(N)

    def __repr__(self) -> str:
        label = self.group.name or f"order {self.order}"
        return f"SortedGroup({label})"


def sorted_identity(G: SortedGroup) -> "SortedMap":
    return SortedMap(identity_map(G.group), G, G)


@dataclass(frozen=True)
class SortedMap:
    """An epimorphism certified sorted: target families sit inside the
    source families of their preimages. Construction fails otherwise."""

    map: GroupMap
    source: SortedGroup
    target: SortedGroup

    def __post_init__(self) -> None:
        if self.map.source != self.source.group:
            raise ValueError("map does not start at the stated source")
        if self.map.target != self.target.group:
            raise ValueError("map does not end at the stated target")
        if not self.map.is_surjective:
            raise ValueError("sorted maps are epimorphisms")
        src, tgt = self.source.data, self.target.data
        if (src.alphabet != tgt.alphabet or src.lift != tgt.lift
                or src.downward_closure != tgt.downward_closure):
            raise ValueError("source and target live over different "
                             "alphabets or lifts")
        N = unsorted_witness(self.map, self.source, self.target)
        if N is not None:
            raise ValueError(
                f"map is not sorted: family at {sorted(N)} escapes the "
                "preimage family")

    def __call__(self, a: int) -> int:
        return self.map.images[a]

    def compose(self, inner: "SortedMap") -> "SortedMap":
        """self after inner."""
        return SortedMap(self.map.compose(inner.map), inner.source,
                         self.target)


def unsorted_witness(map: GroupMap, src: SortedGroup,
                     tgt: SortedGroup) -> Subgroup | None:
    """The first target subgroup (in canonical order) whose family escapes
    the source family of its preimage; None when the map is sorted."""
    if not map.is_surjective:
        raise ValueError("sortedness is defined for epimorphisms")
    if src.is_full:
        return None
    for N in normal_subgroups(tgt.group):
        if not tgt.family(N) <= src.family(map.preimage(N)):
            return N
    return None


def is_sorted(map: GroupMap, src: SortedGroup,
              tgt: SortedGroup) -> SortedMap | None:
    """Certify the map sorted, or None if some family escapes (use
    ``unsorted_witness`` for the offending subgroup)."""
    if unsorted_witness(map, src, tgt) is None:
        return SortedMap(map, src, tgt)
    return None


def sorted_isomorphic(A: SortedGroup, B: SortedGroup) -> GroupMap | None:
    """The first group isomorphism transporting one data onto the other,
    or None."""
    if A.order != B.order or A.data.alphabet != B.data.alphabet:
        return None
    for h in enumerate_isomorphisms(A.group, B.group):
        if sorting.push_forward(h, A.data) == B.data:
            return h
    return None


def _upward_closed_families(
        alphabet: tuple[str, ...]) -> list[sorting.SupportFamily]:
    """Every nonempty family closed under enlarging supports, smallest
    first. Valid sorting data only ever carries these."""
    supports = sorted(sorting.all_supports(alphabet),
                      key=lambda S: (len(S), sorted(S)))
    out = []
    for picks in itertools.product((False, True), repeat=len(supports)):
        fam = {S for S, keep in zip(supports, picks) if keep}
        if not fam:
            continue
        if all(T in fam
               for S in fam for T in supports if S < T):
            out.append(frozenset(fam))
    out.sort(key=lambda fam: (len(fam),
                              sorted(sorted(S) for S in fam)))
    return out


def sorted_quotients(
    G: SortedGroup, mode: str = "pushforward_only",
) -> list[tuple[SortedGroup, SortedMap]]:
    """One representative per isomorphism class of sorted quotient.

    ``pushforward_only`` takes, for each normal subgroup, the quotient with
    the transported data. ``exhaustive`` additionally enumerates every valid
    data pointwise below the transported one (the quotient map stays sorted
    for those); it is the ground-truth reading of "all sorted quotients" and
    is limited to alphabets of at most 3 sorts to keep the family lattice
    enumerable.
    """
    if mode not in ("pushforward_only", "exhaustive"):
        raise ValueError(f"unknown mode {mode!r}")
    alphabet = G.data.alphabet
    if mode == "exhaustive" and len(alphabet) > 3:
        raise ValueError("exhaustive enumeration needs an alphabet of at "
                         "most 3 sorts")
    ladder = _upward_closed_families(alphabet) if mode == "exhaustive" else []
    out: list[tuple[SortedGroup, SortedMap]] = []
    for N in normal_subgroups(G.group):
        Q, proj = quotient(G.group, N)
        pushed = sorting.push_forward(proj, G.data)
        datas = [pushed]
        if mode == "exhaustive":
            index = dict(pushed.families)
            q_normals = normal_subgroups(Q)
            full_key = frozenset(Q.elements())
            choices = []
            for M in q_normals:
                if M == full_key:
                    choices.append([index[M]])
                else:
                    choices.append([fam for fam in ladder
                                    if fam <= index[M]])
            for combo in itertools.product(*choices):
                fams = dict(zip(q_normals, combo))
                candidate = SortingData(Q, alphabet,
                                        sorting.freeze_families(fams),
                                        pushed.lift,
                                        pushed.downward_closure)
                if candidate == pushed:
                    continue
                if sorting.validate(candidate).ok:
                    datas.append(candidate)
            datas[1:] = sorted(datas[1:], key=sorting.data_key)
        for data in datas:
            S = SortedGroup(data, check=False)
            if any(sorted_isomorphic(S, seen) for seen, _ in out):
                continue
            out.append((S, SortedMap(proj, G, S)))
    return out


@dataclass(frozen=True)
class MorphismPair:
    """Two sorted epimorphisms onto one common image."""

    pi1: SortedMap
    pi2: SortedMap

    def __post_init__(self) -> None:
        if self.pi1.target != self.pi2.target:
            raise ValueError("the two maps must share their target")

    @property
    def image(self) -> SortedGroup:
        return self.pi1.target


def sorted_fibre_product(
    pair: MorphismPair, *, verify_minimal: bool = False,
) -> tuple[SortedGroup, SortedMap, SortedMap]:
    """The pullback of the pair, carrying the least data that makes both
    projections sorted.

    The data is generated from the seed assignment that plants each source
    family on the preimage of its subgroup; with ``verify_minimal`` the
    result is re-checked support by support (slow, test use).
    """
    F1, F2 = pair.pi1.source.data, pair.pi2.source.data
    B, p1, p2 = fibre_product(pair.pi1.map, pair.pi2.map)
    presort: dict[Subgroup, set[sorting.Support]] = {}
    for N1, fam in F1.families:
        presort.setdefault(p1.preimage(N1), set()).update(fam)
    for N2, fam in F2.families:
        presort.setdefault(p2.preimage(N2), set()).update(fam)
    data = sorting.generate(B, F1.alphabet, presort, F1.lift,
                            downward_closure=F1.downward_closure)
    X = SortedGroup(data, check=False)
    sp1 = SortedMap(p1, X, pair.pi1.source)
    sp2 = SortedMap(p2, X, pair.pi2.source)
    if verify_minimal and not fibre_data_is_minimal(X, sp1, sp2):
        raise RuntimeError("generated fibre data is not minimal")
    return X, sp1, sp2


def fibre_data_is_minimal(X: SortedGroup, p1: SortedMap,
                          p2: SortedMap) -> bool:
    """Whether dropping any single support from the generated data breaks
    validity or the sortedness of a projection."""
    data = X.data
    full_key = frozenset(data.group.elements())
    for N, fam in data.families:
        if N == full_key:
            continue
        for S in fam:
            smaller = {M: (f - {S} if M == N else f)
                       for M, f in data.families}
            candidate = SortingData(data.group, data.alphabet,
                                    sorting.freeze_families(smaller),
                                    data.lift, data.downward_closure)
            if not sorting.validate(candidate).ok:
                continue
            shrunk = SortedGroup(candidate, check=False)
            if (unsorted_witness(p1.map, shrunk, p1.target) is None
                    and unsorted_witness(p2.map, shrunk, p2.target) is None):
                return False
    return True


def pair_leq(p: MorphismPair, q: MorphismPair) -> SortedMap | None:
    """The mediating sorted map from q's image onto p's image commuting with
    both coordinates, or None. The mediator is unique when it exists, so it
    is built directly from the graphs rather than searched."""
    if (p.pi1.source != q.pi1.source or p.pi2.source != q.pi2.source):
        raise ValueError("pairs do not share their sources")
    A_q, A_p = q.image, p.image
    images = [-1] * A_q.order
    for b in p.pi1.source.group.elements():
        src, dst = q.pi1(b), p.pi1(b)
        if images[src] == -1:
            images[src] = dst
        elif images[src] != dst:
            return None
    for b in p.pi2.source.group.elements():
        if images[q.pi2(b)] != p.pi2(b):
            return None
    try:
        mediator = GroupMap(A_q.group, A_p.group, tuple(images))
    except ValueError:
        return None
    if not mediator.is_surjective:
        return None
    return is_sorted(mediator, A_q, A_p)


def pair_equiv(p: MorphismPair, q: MorphismPair) -> bool:
    """Mutual factorization; when it holds the mediators are checked to be
    inverse isomorphisms."""
    down, up = pair_leq(p, q), pair_leq(q, p)
    if down is None or up is None:
        return False
    if not (down.map.is_bijective and up.map.is_bijective):
        raise RuntimeError("equivalent pairs must mediate by isomorphisms")
    return True


def _pair_rank(q: MorphismPair) -> tuple:
    data = q.image.data
    total = sum(len(fam) for _, fam in data.families)
    return ((-q.image.order, -total),
            (sorting.data_key(data), q.pi1.map.images, q.pi2.map.images))


def maximal_pair_above(p: MorphismPair, *,
                       tie_break: str = "default") -> MorphismPair:
    """A maximal pair weakly above p in the pair poset.

    Candidates run over quotient shapes of the first source with the meet of
    the two transported datas — every pair is equivalent to one of this form
    with the same image group, so maximality within the candidate set is
    maximality outright. Among the maximal survivors the pick is by image
    order (largest), then data size (largest), then serialized data and map
    tables; ``tie_break="reversed"`` inverts the whole ranking.
    """
    if tie_break not in ("default", "reversed"):
        raise ValueError(f"unknown tie break {tie_break!r}")
    S1, S2 = p.pi1.source, p.pi2.source
    shapes: list[FiniteGroup] = []
    for M in normal_subgroups(S1.group):
        Q, _ = quotient(S1.group, M)
        if not any(is_isomorphic(Q, seen) for seen in shapes):
            shapes.append(Q)
    above: list[MorphismPair] = []
    for Q in shapes:
        epis1 = enumerate_epimorphisms(S1.group, Q)
        epis2 = enumerate_epimorphisms(S2.group, Q)
        if not epis1 or not epis2:
            continue
        for f1 in epis1:
            pushed1 = sorting.push_forward(f1, S1.data)
            for f2 in epis2:
                data = sorting.meet(pushed1,
                                    sorting.push_forward(f2, S2.data))
                A = SortedGroup(data, check=False)
                q = MorphismPair(SortedMap(f1, S1, A), SortedMap(f2, S2, A))
                if pair_leq(p, q) is not None:
                    above.append(q)
    maximal = [q for q in above
               if not any(pair_leq(q, r) is not None
                          and pair_leq(r, q) is None
                          for r in above)]
    ranked = sorted(maximal, key=_pair_rank)
    return ranked[0] if tie_break == "default" else ranked[-1]
