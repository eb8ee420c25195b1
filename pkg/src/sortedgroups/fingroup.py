"""Finite groups as validated Cayley tables.

Elements are ids 0..n-1 with 0 the identity. Everything downstream (quotients,
epimorphism enumeration, fibre products) works on these ids, so all orderings
are deterministic by construction.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

__all__ = [
    "FiniteGroup",
    "GroupMap",
    "Subgroup",
    "trivial_group",
    "cyclic_group",
    "direct_product",
    "dihedral_group",
    "quaternion_group",
    "symmetric_group",
    "from_permutations",
    "generated_subgroup",
    "all_subgroups",
    "normal_subgroups",
    "is_normal",
    "conjugate_subgroup",
    "subgroup_product",
    "quotient",
    "enumerate_epimorphisms",
    "enumerate_isomorphisms",
    "is_isomorphic",
    "fibre_product",
    "identity_map",
]

Subgroup = frozenset[int]


class FiniteGroup:
    """A finite group given by its full multiplication table.

    ``table[a][b]`` is the product a*b. Element 0 must be the identity. The
    constructor checks the Latin-square property and associativity;
    ``check_associativity=False`` skips the O(n^3) part when the table is
    derived from an existing group (quotients, products, permutation closures).
    """

    __slots__ = ("table", "order", "name", "_inverses", "_hash")

    def __init__(self, table: Sequence[Sequence[int]], name: str = "",
                 *, check_associativity: bool = True):
        rows = tuple(tuple(row) for row in table)
        n = len(rows)
        if n == 0:
            raise ValueError("empty multiplication table")
        for i, row in enumerate(rows):
            if len(row) != n:
                raise ValueError(f"row {i} has length {len(row)}, expected {n}")
            for v in row:
                if not (0 <= v < n):
                    raise ValueError(f"entry {v} out of range 0..{n - 1}")
        for a in range(n):
            if rows[0][a] != a or rows[a][0] != a:
                raise ValueError("element 0 is not a two-sided identity")
        for a in range(n):
            if len(set(rows[a])) != n:
                raise ValueError(f"row {a} is not a permutation")
            col = {rows[b][a] for b in range(n)}
            if len(col) != n:
                raise ValueError(f"column {a} is not a permutation")
        if check_associativity:
            for a in range(n):
                ra = rows[a]
                for b in range(n):
                    rab = rows[ra[b]]
                    rb = rows[b]
                    for c in range(n):
                        if rab[c] != ra[rb[c]]:
                            raise ValueError(
                                f"associativity fails at ({a},{b},{c})")
        self.table = rows
        self.order = n
        self.name = name
        inv = [0] * n
        for a in range(n):
            for b in range(n):
                if rows[a][b] == 0:
                    inv[a] = b
                    break
        self._inverses = tuple(inv)
        self._hash = hash(rows)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self._inverses[a]

    def conj(self, g: int, a: int) -> int:
        """g * a * g^-1."""
        return self.table[self.table[g][a]][self._inverses[g]]

    def elements(self) -> range:
        return range(self.order)

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != 0:
            x = self.table[x][a]
            k += 1
        return k

    def is_abelian(self) -> bool:
        t = self.table
        return all(t[a][b] == t[b][a]
                   for a in range(self.order) for b in range(a))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FiniteGroup) and self.table == other.table

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        label = self.name or f"order {self.order}"
        return f"FiniteGroup({label})"


@dataclass(frozen=True)
class GroupMap:
    """A homomorphism between finite groups, stored as the image of every id."""

    source: FiniteGroup
    target: FiniteGroup
    images: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.images) != self.source.order:
            raise ValueError(
                f"{len(self.images)} images for a group of order "
                f"{self.source.order}")
        n_tgt = self.target.order
        for v in self.images:
            if not (0 <= v < n_tgt):
                raise ValueError(f"image {v} out of range")
        if self.images[0] != 0:
            raise ValueError("identity must map to identity")
        src, tgt, f = self.source.table, self.target.table, self.images
        for a in range(self.source.order):
            fa = f[a]
            for b in range(self.source.order):
                if f[src[a][b]] != tgt[fa][f[b]]:
                    raise ValueError(
                        f"not a homomorphism at ({a},{b})")

    def __call__(self, a: int) -> int:
        return self.images[a]

    @property
    def is_surjective(self) -> bool:
        return len(set(self.images)) == self.target.order

    @property
    def is_bijective(self) -> bool:
        return (self.source.order == self.target.order
                and self.is_surjective)

    def kernel(self) -> Subgroup:
        return frozenset(a for a, v in enumerate(self.images) if v == 0)

    def image(self) -> Subgroup:
        return frozenset(self.images)

    def preimage(self, S: Iterable[int]) -> Subgroup:
        s = set(S)
        return frozenset(a for a, v in enumerate(self.images) if v in s)

    def compose(self, inner: "GroupMap") -> "GroupMap":
        """self after inner (source of the result is inner.source)."""
        if inner.target != self.source:
            raise ValueError("maps are not composable")
        return GroupMap(inner.source, self.target,
                        tuple(self.images[v] for v in inner.images))

    def inverse(self) -> "GroupMap":
        if not self.is_bijective:
            raise ValueError("only bijective maps invert")
        back = [0] * self.target.order
        for a, v in enumerate(self.images):
            back[v] = a
        return GroupMap(self.target, self.source, tuple(back))


def identity_map(G: FiniteGroup) -> GroupMap:
    return GroupMap(G, G, tuple(range(G.order)))


# ---------------------------------------------------------------------------
# constructions


def trivial_group(name: str = "1") -> FiniteGroup:
    return FiniteGroup(((0,),), name)


def cyclic_group(n: int, name: str = "") -> FiniteGroup:
    if n < 1:
        raise ValueError(f"order must be positive, got {n}")
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    return FiniteGroup(table, name or f"Z{n}", check_associativity=False)


def direct_product(G: FiniteGroup, H: FiniteGroup, name: str = "") -> FiniteGroup:
    """Direct product with ids ordered lexicographically, (g,h) -> g*|H| + h."""
    m = H.order
    n = G.order * m
    table = [[0] * n for _ in range(n)]
    for g1, h1 in itertools.product(G.elements(), H.elements()):
        a = g1 * m + h1
        row = table[a]
        for g2, h2 in itertools.product(G.elements(), H.elements()):
            row[g2 * m + h2] = G.table[g1][g2] * m + H.table[h1][h2]
    label = name or (f"{G.name}x{H.name}" if G.name and H.name else "")
    return FiniteGroup(table, label, check_associativity=False)


def dihedral_group(n: int) -> FiniteGroup:
    """Symmetries of the regular n-gon; ids 0..n-1 are rotations."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    size = 2 * n
    table = [[0] * size for _ in range(size)]
    for e1, i in itertools.product((0, 1), range(n)):
        row = table[e1 * n + i]
        for e2, j in itertools.product((0, 1), range(n)):
            if e1 == 0:
                k, e = (i + j) % n if e2 == 0 else (j - i) % n, e2
            else:
                k, e = (i + j) % n if e2 == 0 else (j - i) % n, 1 - e2
            row[e2 * n + j] = e * n + k
    return FiniteGroup(table, f"D{n}")


def quaternion_group() -> FiniteGroup:
    """The order-8 quaternion group; id = e*4 + m encodes a^m b^e."""
    table = [[0] * 8 for _ in range(8)]
    for e1, m1 in itertools.product((0, 1), range(4)):
        row = table[e1 * 4 + m1]
        for e2, m2 in itertools.product((0, 1), range(4)):
            if e1 == 0:
                m, e = (m1 + m2) % 4, e2
            elif e2 == 0:
                m, e = (m1 - m2) % 4, 1
            else:
                m, e = (m1 - m2 + 2) % 4, 0
            row[e2 * 4 + m2] = e * 4 + m
    return FiniteGroup(table, "Q8")


def symmetric_group(n: int) -> FiniteGroup:
    if n < 1 or n > 5:
        raise ValueError(f"supported range is 1..5, got {n}")
    perms = sorted(itertools.permutations(range(n)))
    return from_permutations(perms, n, name=f"S{n}")


def from_permutations(perms: Iterable[Sequence[int]], degree: int,
                      name: str = "") -> FiniteGroup:
    """Closure of the given permutations under composition, as a group.

    The identity permutation is lexicographically least, so it always gets
    id 0 after sorting.
    """
    base = set()
    for p in perms:
        t = tuple(p)
        if sorted(t) != list(range(degree)):
            raise ValueError(f"{t} is not a permutation of 0..{degree - 1}")
        base.add(t)
    base.add(tuple(range(degree)))
    closure = set(base)
    frontier = list(base)
    while frontier:
        p = frontier.pop()
        for q in list(closure):
            for r in (tuple(p[q[i]] for i in range(degree)),
                      tuple(q[p[i]] for i in range(degree))):
                if r not in closure:
                    closure.add(r)
                    frontier.append(r)
    elems = sorted(closure)
    index = {p: i for i, p in enumerate(elems)}
    table = [[index[tuple(p[q[i]] for i in range(degree))] for q in elems]
             for p in elems]
    return FiniteGroup(table, name, check_associativity=False)


# ---------------------------------------------------------------------------
# subgroups


def generated_subgroup(G: FiniteGroup, gens: Iterable[int]) -> Subgroup:
    closure = {0}
    frontier = [0]
    gen_list = sorted(set(gens))
    for g in gen_list:
        if not (0 <= g < G.order):
            raise ValueError(f"element {g} out of range")
    closure.update(gen_list)
    frontier.extend(gen_list)
    while frontier:
        a = frontier.pop()
        for b in list(closure):
            for c in (G.table[a][b], G.table[b][a]):
                if c not in closure:
                    closure.add(c)
                    frontier.append(c)
    return frozenset(closure)


@lru_cache(maxsize=None)
def _all_subgroups(G: FiniteGroup) -> tuple[Subgroup, ...]:
    seen = {frozenset({0})}
    frontier = [frozenset({0})]
    while frontier:
        H = frontier.pop()
        for g in G.elements():
            if g not in H:
                H2 = generated_subgroup(G, H | {g})
                if H2 not in seen:
                    seen.add(H2)
                    frontier.append(H2)
    return tuple(sorted(seen, key=lambda S: (len(S), sorted(S))))


def all_subgroups(G: FiniteGroup) -> list[Subgroup]:
    """Every subgroup, ordered by size then by sorted element list."""
    return list(_all_subgroups(G))


def is_normal(G: FiniteGroup, H: Subgroup) -> bool:
    return all(G.conj(g, h) in H for g in G.elements() for h in H)


def normal_subgroups(G: FiniteGroup) -> list[Subgroup]:
    """Normal subgroups (trivial and improper included), canonically ordered."""
    return [H for H in _all_subgroups(G) if is_normal(G, H)]


def conjugate_subgroup(G: FiniteGroup, N: Subgroup, g: int) -> Subgroup:
    if not (0 <= g < G.order):
        raise ValueError(f"element {g} out of range")
    return frozenset(G.conj(g, n) for n in N)


def subgroup_product(G: FiniteGroup, N1: Subgroup, N2: Subgroup) -> Subgroup:
    """N1*N2 as a set; a subgroup whenever one factor is normal."""
    return frozenset(G.table[a][b] for a in N1 for b in N2)


def _check_subgroup(G: FiniteGroup, H: Subgroup) -> None:
    if not H or any(not (0 <= h < G.order) for h in H):
        raise ValueError("not a subset of the group")
    if 0 not in H:
        raise ValueError("subgroup must contain the identity")
    for a in H:
        for b in H:
            if G.table[a][b] not in H:
                raise ValueError("subset is not closed under multiplication")


def quotient(G: FiniteGroup, N: Subgroup) -> tuple[FiniteGroup, GroupMap]:
    """The quotient group G/N and its projection.

    Cosets are labelled by their minimal member in increasing order, so the
    identity coset is always 0 and labels are reproducible.
    """
    _check_subgroup(G, N)
    if not is_normal(G, N):
        raise ValueError("subgroup is not normal")
    coset_of: dict[int, frozenset[int]] = {}
    cosets: list[frozenset[int]] = []
    for g in G.elements():
        if g not in coset_of:
            C = frozenset(G.table[g][n] for n in N)
            cosets.append(C)
            for x in C:
                coset_of[x] = C
    cosets.sort(key=min)
    label = {C: i for i, C in enumerate(cosets)}
    proj = tuple(label[coset_of[g]] for g in G.elements())
    m = len(cosets)
    table = [[0] * m for _ in range(m)]
    for i, C in enumerate(cosets):
        a = min(C)
        for j, D in enumerate(cosets):
            table[i][j] = proj[G.table[a][min(D)]]
    name = f"{G.name}/{len(N)}" if G.name else ""
    Q = FiniteGroup(table, name, check_associativity=False)
    return Q, GroupMap(G, Q, proj)


# ---------------------------------------------------------------------------
# homomorphism enumeration


@lru_cache(maxsize=None)
def _generating_sequence(G: FiniteGroup) -> tuple[int, ...]:
    gens: list[int] = []
    closure: Subgroup = frozenset({0})
    for g in G.elements():
        if g not in closure:
            gens.append(g)
            closure = generated_subgroup(G, closure | {g})
    return tuple(gens)


def _extend_by_generators(G: FiniteGroup, A: FiniteGroup,
                          gens: tuple[int, ...],
                          targets: tuple[int, ...]) -> tuple[int, ...] | None:
    """Grow a map defined on generators to all of G, or None on conflict."""
    images: dict[int, int] = {0: 0}
    for g, t in zip(gens, targets):
        if images.get(g, t) != t:
            return None
        images[g] = t
    changed = True
    while changed and len(images) < G.order:
        changed = False
        for a, fa in list(images.items()):
            for b, fb in list(images.items()):
                c = G.table[a][b]
                fc = A.table[fa][fb]
                old = images.get(c)
                if old is None:
                    images[c] = fc
                    changed = True
                elif old != fc:
                    return None
    if len(images) < G.order:
        return None
    out = tuple(images[a] for a in G.elements())
    src, tgt = G.table, A.table
    for a in G.elements():
        fa = out[a]
        for b in G.elements():
            if out[src[a][b]] != tgt[fa][out[b]]:
                return None
    return out


@lru_cache(maxsize=None)
def _surjections(G: FiniteGroup, A: FiniteGroup) -> tuple[GroupMap, ...]:
    if A.order > G.order or G.order % A.order != 0:
        return ()
    gens = _generating_sequence(G)
    # an image must have order dividing the order of its preimage
    candidates = []
    for g in gens:
        og = G.element_order(g)
        candidates.append(tuple(a for a in A.elements()
                                if og % A.element_order(a) == 0))
    found = []
    n_tgt = A.order
    for targets in itertools.product(*candidates):
        images = _extend_by_generators(G, A, gens, targets)
        if images is not None and len(set(images)) == n_tgt:
            found.append(images)
    found.sort()
    return tuple(GroupMap(G, A, images) for images in found)


def enumerate_epimorphisms(G: FiniteGroup, A: FiniteGroup) -> list[GroupMap]:
    """All surjective homomorphisms G -> A, sorted by image tuple."""
    return list(_surjections(G, A))


def enumerate_isomorphisms(G: FiniteGroup, H: FiniteGroup) -> list[GroupMap]:
    if G.order != H.order:
        return []
    return list(_surjections(G, H))


def is_isomorphic(G: FiniteGroup, H: FiniteGroup) -> GroupMap | None:
    """The lexicographically first isomorphism, or None."""
    if G.order != H.order:
        return None
    if sorted(map(G.element_order, G.elements())) != \
            sorted(map(H.element_order, H.elements())):
        return None
    isos = enumerate_isomorphisms(G, H)
    return isos[0] if isos else None


def fibre_product(Pi1: GroupMap, Pi2: GroupMap) \
        -> tuple[FiniteGroup, GroupMap, GroupMap]:
    """Pullback of two epimorphisms onto a common group.

    Elements are the pairs (b1, b2) with Pi1(b1) = Pi2(b2), ordered
    lexicographically so (0, 0) is the identity.
    """
    if Pi1.target != Pi2.target:
        raise ValueError("epimorphisms have different targets")
    if not Pi1.is_surjective or not Pi2.is_surjective:
        raise ValueError("fibre products are taken over epimorphisms")
    B1, B2 = Pi1.source, Pi2.source
    pairs = [(b1, b2)
             for b1 in B1.elements() for b2 in B2.elements()
             if Pi1.images[b1] == Pi2.images[b2]]
    index = {p: i for i, p in enumerate(pairs)}
    n = len(pairs)
    table = [[0] * n for _ in range(n)]
    for i, (a1, a2) in enumerate(pairs):
        row = table[i]
        t1, t2 = B1.table[a1], B2.table[a2]
        for j, (b1, b2) in enumerate(pairs):
            row[j] = index[(t1[b1], t2[b2])]
    B = FiniteGroup(table, check_associativity=False)
    p1 = GroupMap(B, B1, tuple(p[0] for p in pairs))
    p2 = GroupMap(B, B2, tuple(p[1] for p in pairs))
    return B, p1, p2
