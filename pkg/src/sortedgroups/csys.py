"""Complete systems of sorted coset spaces and their duality with sorted
groups.

A sorted group is materialized as a layered structure: one layer per
normal subgroup within the truncation depth, holding that subgroup's coset
space at every admissible stage index together with the sorts its family
admits. The compressed representation stores, per class, the fiber group
(the quotient), the occupancy (the admissible supports) and the transition
maps between comparable classes; individual members — (class, coset,
stage, sort tuple) — are materialized on demand.

``dual_group`` reads the group back off a deep-enough system, and
``check_cosep`` decides the extension property dual to the sorted
embedding property: every embedding of a finitely generated subsystem
into the whole system extends along every embedding between such
subsystems.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

from . import sorting
from .fingroup import (FiniteGroup, GroupMap, Subgroup,
                       enumerate_isomorphisms, normal_subgroups, quotient,
                       subgroup_product)
from .sorting import SortLift, SupportFamily, ValidationReport
from .sortedcat import SortedGroup, SortedMap

__all__ = [
    "Element",
    "CompleteSystem",
    "TruncationError",
    "build",
    "validate_scs",
    "dual_group",
    "Subsystem",
    "full_subsystem",
    "trivial_subsystem",
    "generate_subsystem",
    "restrict_to_cone",
    "join_min",
    "SystemEmbedding",
    "enumerate_embeddings",
    "dual_embedding",
    "CosepVerdict",
    "check_cosep",
    "length",
    "type_equal",
    "type_equal_orbit",
    "is_locally_full",
    "is_relatively_dense",
]


class Element(NamedTuple):
    """One member: a coset of a class, tagged with a stage index and a
    sort tuple."""

    cls: str
    coset: int
    k: int
    J: tuple[str, ...]


class TruncationError(Exception):
    """The system is truncated too shallow for the requested recovery."""


def _class_label(N: Subgroup) -> str:
    return "{" + ",".join(str(x) for x in sorted(N)) + "}"


@dataclass
class CompleteSystem:
    """The compressed form of a complete system.

    ``classes`` fixes the canonical order; ``fibers`` carries one group per
    class, ``occupancy`` the admissible supports, and ``transitions`` the
    coset maps for every comparable pair, diagonals included. ``source``
    and ``class_subgroups`` are retained by ``build`` so the duality can
    name subgroups; doctored systems may omit them.
    """

    alphabet: tuple[str, ...]
    K: int
    L: int
    classes: tuple[str, ...]
    fibers: Mapping[str, FiniteGroup]
    occupancy: Mapping[str, SupportFamily]
    transitions: Mapping[tuple[str, str], tuple[int, ...]]
    lift: SortLift = field(default_factory=SortLift)
    downward_closure: bool = False
    source: SortedGroup | None = None
    class_subgroups: Mapping[str, Subgroup] | None = None

    def __post_init__(self) -> None:
        if self.K < 1 or self.L < 1:
            raise ValueError("depth and width must be positive")
        if len(set(self.classes)) != len(self.classes):
            raise ValueError("duplicate class labels")
        names = set(self.alphabet)
        for c in self.classes:
            if c not in self.fibers or c not in self.occupancy:
                raise ValueError(f"class {c} lacks a fiber or occupancy")
            for S in self.occupancy[c]:
                if not S or not S <= names:
                    raise ValueError(f"bad support at class {c}")
        for (i, j), images in self.transitions.items():
            if i not in self.fibers or j not in self.fibers:
                raise ValueError(f"transition {i}->{j} names no class")
            if len(images) != self.fibers[i].order:
                raise ValueError(f"transition {i}->{j} has the wrong arity")

    # -- the order and the relations ------------------------------------

    def class_leq(self, i: str, j: str) -> bool:
        return (i, j) in self.transitions

    def transition(self, i: str, j: str) -> tuple[int, ...]:
        return self.transitions[(i, j)]

    def sorts(self) -> list[tuple[str, ...]]:
        """Every sort tuple up to the width cap, shortest first."""
        return [J for r in range(1, self.L + 1)
                for J in itertools.product(self.alphabet, repeat=r)]

    def eligible(self, c: str, J: Sequence[str]) -> bool:
        return len(J) <= self.L and frozenset(J) in self.occupancy[c]

    def check_element(self, a: Element) -> None:
        if a.cls not in self.fibers:
            raise ValueError(f"unknown class {a.cls}")
        fiber = self.fibers[a.cls]
        if not 0 <= a.coset < fiber.order:
            raise ValueError(f"coset {a.coset} outside the {a.cls} fiber")
        if not fiber.order <= a.k <= self.K:
            raise ValueError(
                f"stage {a.k} outside [{fiber.order}, {self.K}]")
        if not self.eligible(a.cls, a.J):
            raise ValueError(f"sort {a.J} not admissible at {a.cls}")

    def elements(self) -> Iterator[Element]:
        for c in self.classes:
            fiber = self.fibers[c]
            for k in range(fiber.order, self.K + 1):
                for J in self.sorts():
                    if self.eligible(c, J):
                        for x in fiber.elements():
                            yield Element(c, x, k, J)

    def m(self, k: int, J: Sequence[str]) -> list[Element]:
        """The sort named (k, J): every member carrying exactly that tag."""
        J = tuple(J)
        out = []
        for c in self.classes:
            if self.fibers[c].order <= k <= self.K and self.eligible(c, J):
                out.extend(Element(c, x, k, J)
                           for x in self.fibers[c].elements())
        return out

    def leq(self, a: Element, b: Element) -> bool:
        """The coset-blind order: later stage and finer class."""
        return a.k >= b.k and self.class_leq(a.cls, b.cls)

    def contains(self, a: Element, b: Element) -> bool:
        """Coset containment: the transition carries a's coset onto b's."""
        return (a.k >= b.k and self.class_leq(a.cls, b.cls)
                and self.transition(a.cls, b.cls)[a.coset] == b.coset)

    def mul(self, a: Element, b: Element) -> Element:
        """The partial product, defined within one sort of one class."""
        if a.cls != b.cls or a.k != b.k or a.J != b.J:
            raise ValueError("the product is defined within a single sort "
                             "of a single class")
        return Element(a.cls, self.fibers[a.cls].mul(a.coset, b.coset),
                       a.k, a.J)

    def equiv(self, a: Element, b: Element) -> bool:
        return a.cls == b.cls and a.k == b.k

    def minimal_class(self) -> str:
        """The class every transition emanates from, when there is one."""
        for c in self.classes:
            if all(self.class_leq(c, d) for d in self.classes):
                return c
        raise TruncationError("truncation too shallow: no minimal class")

    def top_classes(self) -> list[str]:
        return [c for c in self.classes if self.fibers[c].order == 1]


def build(G: SortedGroup, K: int | None = None,
          L: int | None = None) -> CompleteSystem:
    """Materialize the system of a sorted group down to depth K.

    Classes are the normal subgroups of index at most K; stage indexes run
    from each class's index up to K; sort tuples up to length L are
    admissible wherever their support is."""
    data = G.data
    K = G.order if K is None else K
    L = len(data.alphabet) if L is None else L
    if K < 1 or L < 1:
        raise ValueError("depth and width must be positive")
    chosen = [N for N in normal_subgroups(G.group)
              if G.order // len(N) <= K]
    labels = {N: _class_label(N) for N in chosen}
    fibers: dict[str, FiniteGroup] = {}
    projections: dict[Subgroup, GroupMap] = {}
    occupancy: dict[str, SupportFamily] = {}
    for N in chosen:
        Q, proj = quotient(G.group, N)
        fibers[labels[N]] = Q
        projections[N] = proj
        occupancy[labels[N]] = data.family_of(N)
    transitions: dict[tuple[str, str], tuple[int, ...]] = {}
    for N1 in chosen:
        p1 = projections[N1]
        for N2 in chosen:
            if not N1 <= N2:
                continue
            p2 = projections[N2]
            transitions[(labels[N1], labels[N2])] = tuple(
                p2.images[p1.images.index(x)]
                for x in fibers[labels[N1]].elements())
    return CompleteSystem(
        alphabet=data.alphabet, K=K, L=L,
        classes=tuple(labels[N] for N in chosen),
        fibers=fibers, occupancy=occupancy, transitions=transitions,
        lift=data.lift, downward_closure=data.downward_closure,
        source=G, class_subgroups={labels[N]: N for N in chosen})


# --- validation ----------------------------------------------------------

def validate_scs(S: CompleteSystem) -> ValidationReport:
    """Check the structural axioms, reporting every violation.

    In order: a top class exists; no fiber outruns the depth; occupancy is
    nowhere empty; fibers obey the group laws; the order is reflexive and
    transitive with surjective, homomorphic, composing transitions; and
    classes reached from a common finer class by equal-kernel transitions
    carry equal occupancy — honest systems never trip that last axiom,
    doctored duplicate layers do."""
    findings: list[str] = []

    if not S.top_classes():
        findings.append("no top class with a single-coset fiber")

    for c in S.classes:
        if S.fibers[c].order > S.K:
            findings.append(
                f"fiber of {c} has order {S.fibers[c].order} beyond the "
                f"depth {S.K}")
        if not S.occupancy[c]:
            findings.append(f"empty occupancy at {c}")

    for c in S.classes:
        table = S.fibers[c].table
        n = len(table)
        bad = next(
            ((i, j, l) for i, j, l in itertools.product(range(n), repeat=3)
             if table[table[i][j]][l] != table[i][table[j][l]]), None)
        if bad is not None:
            findings.append(f"fiber of {c} breaks associativity at {bad}")

    for c in S.classes:
        if (c, c) not in S.transitions:
            findings.append(f"missing identity transition at {c}")
        elif S.transitions[(c, c)] != tuple(range(S.fibers[c].order)):
            findings.append(f"transition {c}->{c} is not the identity")

    for (i, j), images in sorted(S.transitions.items()):
        fi, fj = S.fibers[i], S.fibers[j]
        if any(not 0 <= x < fj.order for x in images):
            findings.append(f"transition {i}->{j} escapes its fiber")
            continue
        if set(images) != set(fj.elements()):
            findings.append(f"transition {i}->{j} is not surjective")
        broken = next(
            ((a, b) for a in fi.elements() for b in fi.elements()
             if images[fi.mul(a, b)] != fj.mul(images[a], images[b])),
            None)
        if broken is not None:
            findings.append(
                f"transition {i}->{j} is not a homomorphism at {broken}")

    for (i, j) in sorted(S.transitions):
        for l in S.classes:
            if (j, l) not in S.transitions:
                continue
            if (i, l) not in S.transitions:
                findings.append(
                    f"order lacks transitivity: {i} <= {j} <= {l} "
                    f"without {i} <= {l}")
            else:
                tij, tjl, til = (S.transitions[(i, j)],
                                 S.transitions[(j, l)],
                                 S.transitions[(i, l)])
                if any(tjl[tij[x]] != til[x]
                       for x in range(S.fibers[i].order)):
                    findings.append(
                        f"transitions {i} -> {j} -> {l} do not compose")

    for i in S.classes:
        reached = [j for j in S.classes if (i, j) in S.transitions]
        for a, b in itertools.combinations(reached, 2):
            if (_kernel_of(S, i, a) == _kernel_of(S, i, b)
                    and S.occupancy[a] != S.occupancy[b]):
                findings.append(
                    f"classes {a} and {b} have equal kernels from {i} "
                    f"but different occupancy")

    if S.class_subgroups is not None:
        for i in S.classes:
            for j in S.classes:
                have = (i, j) in S.transitions
                want = S.class_subgroups[i] <= S.class_subgroups[j]
                if have != want:
                    findings.append(
                        f"transition table contradicts the subgroup "
                        f"order at ({i},{j})")

    return ValidationReport(tuple(findings))


# --- duality -------------------------------------------------------------

def dual_group(S: CompleteSystem) -> SortedGroup:
    """Read the sorted group back off the system.

    Needs a minimal class, and every normal subgroup of its fiber realized
    as a transition kernel; a system truncated below that raises
    TruncationError. At full depth the result is literally the source."""
    base = S.minimal_class()
    Q = S.fibers[base]
    kernels: dict[Subgroup, str] = {}
    for c in S.classes:
        kernels.setdefault(_kernel_of(S, base, c), c)
    fams = {}
    for M in normal_subgroups(Q):
        if M not in kernels:
            raise TruncationError(
                "truncation too shallow: no class realizes the kernel "
                + _class_label(M))
        fams[M] = S.occupancy[kernels[M]]
    data = sorting.SortingData(Q, S.alphabet, sorting.freeze_families(fams),
                               S.lift, S.downward_closure)
    return SortedGroup(data, check=False)


# --- subsystems ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Subsystem:
    """The cone over one class: every member of every class above it.

    The finitely generated subsystems of a built system are exactly these
    cones, so the type stores only the base class."""

    system: CompleteSystem
    base: str

    def __post_init__(self) -> None:
        if self.base not in self.system.fibers:
            raise ValueError(f"unknown class {self.base}")

    def classes(self) -> list[str]:
        return [c for c in self.system.classes
                if self.system.class_leq(self.base, c)]

    def elements(self) -> list[Element]:
        cone = set(self.classes())
        return [a for a in self.system.elements() if a.cls in cone]

    def __contains__(self, a: Element) -> bool:
        return (a.cls in self.system.fibers
                and self.system.class_leq(self.base, a.cls))

    def min_elements(self) -> list[Element]:
        """The members of the base class at the last stage."""
        S = self.system
        return [Element(self.base, x, S.K, J)
                for J in S.sorts() if S.eligible(self.base, J)
                for x in S.fibers[self.base].elements()]

    def full_closure(self) -> set[Element]:
        """Everything equivalent to a member; cones are closed already."""
        pairs = {(a.cls, a.k) for a in self.elements()}
        return {a for a in self.system.elements()
                if (a.cls, a.k) in pairs}


def full_subsystem(S: CompleteSystem) -> Subsystem:
    return Subsystem(S, S.minimal_class())


def trivial_subsystem(S: CompleteSystem) -> Subsystem:
    """The cone of coset-blind members: the one over the top class."""
    tops = S.top_classes()
    if not tops:
        raise ValueError("the system has no top class")
    return Subsystem(S, tops[0])


def generate_subsystem(S: CompleteSystem,
                       X: Iterable[Element]) -> Subsystem:
    """The least cone containing X: the cone over the meet of the classes
    of X. Empty input generates the trivial subsystem."""
    members = list(X)
    for a in members:
        S.check_element(a)
    targets = {a.cls for a in members}
    if not targets:
        return trivial_subsystem(S)
    lower = [c for c in S.classes
             if all(S.class_leq(c, d) for d in targets)]
    best = [c for c in lower if all(S.class_leq(d, c) for d in lower)]
    if not best:
        raise ValueError("the classes have no meet in this truncation")
    return Subsystem(S, best[0])


def restrict_to_cone(S: CompleteSystem, base: str) -> CompleteSystem:
    """The cone over a class, repackaged as a system in its own right."""
    cone = Subsystem(S, base).classes()
    keep = set(cone)
    return CompleteSystem(
        alphabet=S.alphabet, K=S.K, L=S.L, classes=tuple(cone),
        fibers={c: S.fibers[c] for c in cone},
        occupancy={c: S.occupancy[c] for c in cone},
        transitions={(i, j): t for (i, j), t in S.transitions.items()
                     if i in keep and j in keep},
        lift=S.lift, downward_closure=S.downward_closure, source=None,
        class_subgroups=(None if S.class_subgroups is None else
                         {c: S.class_subgroups[c] for c in cone}))


def join_min(S1: Subsystem, S2: Subsystem) -> tuple[
        list[Element], list[Element], list[Element]]:
    """The minimal members of two cones and of their join.

    The join of two cones is the cone over the meet class; its minimal
    members carry the canonical representatives of the support unions.
    Checks on the way out that the join set sits exactly where the
    generated cone's minimal layer does."""
    if S1.system is not S2.system:
        raise ValueError("the subsystems have distinct parents")
    S = S1.system
    joined = generate_subsystem(S, [*S1.min_elements(),
                                    *S2.min_elements()])
    base = joined.base
    sorts = set()
    for Sa in S.occupancy[S1.base]:
        for Sb in S.occupancy[S2.base]:
            union = Sa | Sb
            if union not in S.occupancy[base]:
                raise AssertionError(
                    "a support union escaped the meet class occupancy")
            rep = sorting.representative_tuple(union, S.alphabet)
            if len(rep) <= S.L:
                sorts.add(rep)
    join_set = [Element(base, x, S.K, J)
                for J in sorted(sorts)
                for x in S.fibers[base].elements()]
    want = {(a.cls, a.k) for a in joined.min_elements()}
    got = {(a.cls, a.k) for a in join_set}
    if want != got:
        raise AssertionError("the join set does not match the generated "
                             "cone's minimal layer")
    return S1.min_elements(), S2.min_elements(), join_set


# --- embeddings ----------------------------------------------------------

def _kernel_of(S: CompleteSystem, i: str, j: str) -> frozenset[int]:
    t = S.transitions[(i, j)]
    return frozenset(x for x in S.fibers[i].elements() if t[x] == 0)


@dataclass(frozen=True, eq=False)
class SystemEmbedding:
    """A sort-preserving injection of one cone into another.

    Stage preservation pins the image of the source base to a class of
    equal index, so the whole map is determined by that class (``n_star``)
    and a fiber isomorphism ``h`` onto its fiber; construction derives the
    class map and certifies occupancy along the way."""

    source: Subsystem
    target: Subsystem
    n_star: str
    h: GroupMap

    def __post_init__(self) -> None:
        S, T = self.source.system, self.target.system
        if S.alphabet != T.alphabet:
            raise ValueError("the systems use different alphabets")
        if S.K > T.K or S.L > T.L:
            raise ValueError("the target is too shallow for the source")
        if (self.n_star not in T.fibers
                or not T.class_leq(self.target.base, self.n_star)):
            raise ValueError(f"{self.n_star} is not in the target cone")
        base_fiber = S.fibers[self.source.base]
        if (self.h.source != base_fiber
                or self.h.target != T.fibers[self.n_star]):
            raise ValueError("h must map the source base fiber onto the "
                             "n_star fiber")
        if not self.h.is_bijective:
            raise ValueError("stage preservation forces h to be an "
                             "isomorphism")
        sigma: dict[str, str] = {}
        for C in self.source.classes():
            transported = frozenset(
                self.h.images[x]
                for x in _kernel_of(S, self.source.base, C))
            match = next(
                (D for D in T.classes
                 if T.class_leq(self.n_star, D)
                 and _kernel_of(T, self.n_star, D) == transported),
                None)
            if match is None:
                raise ValueError(
                    f"no target class realizes the image of {C}")
            if not S.occupancy[C] <= T.occupancy[match]:
                raise ValueError(
                    f"occupancy of {C} is not preserved at {match}")
            sigma[C] = match
        object.__setattr__(self, "_sigma", sigma)

    @property
    def class_map(self) -> dict[str, str]:
        return dict(self._sigma)

    def __call__(self, a: Element) -> Element:
        S, T = self.source.system, self.target.system
        S.check_element(a)
        if a not in self.source:
            raise ValueError(f"{a} is outside the source cone")
        D = self._sigma[a.cls]
        t = S.transitions[(self.source.base, a.cls)]
        x = t.index(a.coset)
        image = T.transitions[(self.n_star, D)][self.h.images[x]]
        return Element(D, image, a.k, a.J)

    def compose(self, inner: "SystemEmbedding") -> "SystemEmbedding":
        """self after inner."""
        if (inner.target.system is not self.source.system
                or inner.target.base != self.source.base):
            raise ValueError("the embeddings do not chain")
        T = self.target.system
        mid = inner.target.system
        n2 = self._sigma[inner.n_star]
        mid_fiber = mid.fibers[inner.n_star]
        t_mid = mid.transitions[(self.source.base, inner.n_star)]
        t_tgt = T.transitions[(self.n_star, n2)]
        induced = GroupMap(
            mid_fiber, T.fibers[n2],
            tuple(t_tgt[self.h.images[t_mid.index(x)]]
                  for x in mid_fiber.elements()))
        return SystemEmbedding(inner.source, self.target, n2,
                               induced.compose(inner.h))


def _embedding_key(e: SystemEmbedding) -> tuple[str, tuple[int, ...]]:
    return (e.n_star, e.h.images)


def enumerate_embeddings(source: Subsystem,
                         target: Subsystem) -> list[SystemEmbedding]:
    """Every embedding of one cone into another, in a stable order."""
    S, T = source.system, target.system
    base_fiber = S.fibers[source.base]
    out = []
    for n_star in target.classes():
        if T.fibers[n_star].order != base_fiber.order:
            continue
        for h in enumerate_isomorphisms(base_fiber, T.fibers[n_star]):
            try:
                out.append(SystemEmbedding(source, target, n_star, h))
            except ValueError:
                continue
    return out


def dual_embedding(f: SortedMap, image_system: CompleteSystem,
                   domain_system: CompleteSystem) -> SystemEmbedding:
    """The contravariant image of a sorted epimorphism: the system of its
    image embeds into the system of its domain by pulling classes back."""
    if image_system.source != f.target or domain_system.source != f.source:
        raise ValueError("the systems do not belong to the map's ends")
    src = full_subsystem(image_system)
    tgt = full_subsystem(domain_system)
    G2 = image_system.fibers[src.base]
    if G2 != f.target.group:
        raise TruncationError(
            "truncation too shallow: the image system does not reach its "
            "own group")
    ker = f.map.kernel()
    n_star = _class_label(ker)
    if n_star not in domain_system.fibers:
        raise TruncationError(
            "truncation too shallow: no class realizes the kernel of the "
            "map")
    if domain_system.fibers[tgt.base] != f.source.group:
        raise TruncationError(
            "truncation too shallow: the domain system does not reach its "
            "own group")
    t = domain_system.transitions[(tgt.base, n_star)]
    h = GroupMap(G2, domain_system.fibers[n_star],
                 tuple(t[f.map.images.index(y)] for y in G2.elements()))
    return SystemEmbedding(src, tgt, n_star, h)


@dataclass(frozen=True)
class CosepVerdict:
    holds: bool
    witness: tuple[SystemEmbedding, SystemEmbedding] | None = None

    def __post_init__(self) -> None:
        if self.holds != (self.witness is None):
            raise ValueError("a verdict carries a witness exactly when "
                             "the property fails")


def check_cosep(S: CompleteSystem) -> CosepVerdict:
    """Decide the extension property for embeddings of cones.

    For every pair of cones, every embedding between them and every
    embedding of the smaller cone into the whole system, some embedding of
    the larger cone must complete the triangle. The witness reported on
    failure is the first blocked pair in enumeration order."""
    whole = full_subsystem(S)
    for b1 in S.classes:
        U1 = Subsystem(S, b1)
        extensions = enumerate_embeddings(U1, whole)
        for b2 in S.classes:
            U2 = Subsystem(S, b2)
            arrows = enumerate_embeddings(U2, U1)
            if not arrows:
                continue
            maps_in = enumerate_embeddings(U2, whole)
            for Pi in arrows:
                reachable = {_embedding_key(Psi.compose(Pi))
                             for Psi in extensions}
                for Phi in maps_in:
                    if _embedding_key(Phi) not in reachable:
                        return CosepVerdict(False, (Pi, Phi))
    return CosepVerdict(True)


# --- measures over the order ----------------------------------------------

def length(S: CompleteSystem, a: Element, b: Element) -> int:
    """The longest strict chain from a up to b in the coset-blind order.

    Chains move through (class, stage) nodes — members exist at a node
    exactly when the stage is admissible and the class is occupied."""
    S.check_element(a)
    S.check_element(b)
    if not S.leq(a, b):
        raise ValueError("the members are not comparable in this order")
    nodes = [(c, k) for c in S.classes if S.occupancy[c]
             for k in range(S.fibers[c].order, S.K + 1)]

    def below(x: tuple[str, int], y: tuple[str, int]) -> bool:
        return x != y and x[1] >= y[1] and S.class_leq(x[0], y[0])

    start, goal = (a.cls, a.k), (b.cls, b.k)
    best = {goal: 0}
    for _ in range(len(nodes)):
        changed = False
        for x in nodes:
            for y in nodes:
                if y in best and below(x, y) and \
                        best.get(x, -1) < best[y] + 1:
                    best[x] = best[y] + 1
                    changed = True
        if not changed:
            break
    return best.get(start, 0)


def _require_subgroups(S: CompleteSystem) -> Mapping[str, Subgroup]:
    if S.class_subgroups is None or S.source is None:
        raise ValueError("the system does not name its class subgroups")
    return S.class_subgroups


def type_equal(S: CompleteSystem, a: Element, b: Element,
               A: Subsystem) -> bool:
    """Whether two same-sort members realize the same type over a cone.

    True exactly when the classes of a and b generate the same join with
    the cone's class, and some isomorphism of the cones over a and b fixes
    the join cone pointwise, matches occupancy on the nose, and carries a
    to b."""
    S.check_element(a)
    S.check_element(b)
    if (a.k, a.J) != (b.k, b.J):
        raise ValueError("sort mismatch: the members carry different tags")
    subs = _require_subgroups(S)
    G = S.source.group
    join = subgroup_product(G, subs[a.cls], subs[A.base])
    if join != subgroup_product(G, subs[b.cls], subs[A.base]):
        return False
    join_label = _class_label(join)
    if join_label not in S.fibers:
        raise ValueError("the join class is outside this truncation")
    above_join = [C for C in S.classes if S.class_leq(join_label, C)]
    Ua, Ub = Subsystem(S, a.cls), Subsystem(S, b.cls)
    for emb in enumerate_embeddings(Ua, Ub):
        if emb.n_star != b.cls:
            continue
        sigma = emb.class_map
        if any(S.occupancy[C] != S.occupancy[sigma[C]] for C in sigma):
            continue
        if any(sigma[C] != C for C in above_join):
            continue
        if any(tuple(S.transitions[(b.cls, C)][emb.h.images[x]]
                     for x in S.fibers[a.cls].elements())
               != S.transitions[(a.cls, C)]
               for C in above_join):
            continue
        if emb.h.images[a.coset] == b.coset:
            return True
    return False


def type_equal_orbit(S: CompleteSystem, a: Element, b: Element,
                     A: Subsystem) -> bool:
    """The ground-truth reading of type equality: some symmetry of the
    whole system fixes the cone pointwise and carries a to b."""
    S.check_element(a)
    S.check_element(b)
    if (a.k, a.J) != (b.k, b.J):
        raise ValueError("sort mismatch: the members carry different tags")
    try:
        base = S.minimal_class()
    except TruncationError as exc:
        raise ValueError(str(exc)) from None
    fiber = S.fibers[base]
    fixed = [C for C in S.classes if S.class_leq(A.base, C)]
    for h in enumerate_isomorphisms(fiber, fiber):
        sigma: dict[str, str] = {}
        ok = True
        for C in S.classes:
            transported = frozenset(h.images[x]
                                    for x in _kernel_of(S, base, C))
            match = next((D for D in S.classes
                          if _kernel_of(S, base, D) == transported), None)
            if match is None or S.occupancy[C] != S.occupancy[match]:
                ok = False
                break
            sigma[C] = match
        if not ok or sigma[a.cls] != b.cls:
            continue
        if any(sigma[C] != C for C in fixed):
            continue
        if any(tuple(S.transitions[(base, C)][h.images[x]]
                     for x in fiber.elements()) != S.transitions[(base, C)]
               for C in fixed):
            continue
        x = S.transitions[(base, a.cls)].index(a.coset)
        if S.transitions[(base, b.cls)][h.images[x]] == b.coset:
            return True
    return False


# --- subsystem predicates --------------------------------------------------

def is_locally_full(S: CompleteSystem, X: set[Element]) -> bool:
    """Every member's whole sort-within-its-class comes along."""
    return all(Element(a.cls, x, a.k, a.J) in X
               for a in X for x in S.fibers[a.cls].elements())


def is_relatively_dense(S: CompleteSystem, X: set[Element]) -> bool:
    """Every member of a sort X touches lies above some member of X."""
    return all(any(S.leq(x, s) for x in X)
               for k, J in {(a.k, a.J) for a in X}
               for s in S.m(k, J))
