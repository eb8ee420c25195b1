"""Shared fixtures: the small-group corpus and the sorted-group test corpus."""
from __future__ import annotations

import pytest

from sortedgroups import fingroup as fg
from sortedgroups import sorting
from sortedgroups.sortedcat import SortedGroup

ALPHABET = ("s1", "s2")

S1 = frozenset({"s1"})
S2 = frozenset({"s2"})
S12 = frozenset({"s1", "s2"})

ALL_FAMILY = frozenset({S1, S2, S12})
S1_UP = frozenset({S1, S12})
S2_UP = frozenset({S2, S12})
TOP_ONLY = frozenset({S12})


def klein_group() -> fg.FiniteGroup:
    return fg.direct_product(fg.cyclic_group(2), fg.cyclic_group(2),
                             name="Z2xZ2")


def small_group_corpus() -> list[fg.FiniteGroup]:
    """Every group of order at most 8, one representative per isomorphism type."""
    Z2 = fg.cyclic_group(2)
    return [
        fg.trivial_group(),
        Z2,
        fg.cyclic_group(3),
        fg.cyclic_group(4),
        klein_group(),
        fg.cyclic_group(5),
        fg.cyclic_group(6),
        fg.symmetric_group(3),
        fg.cyclic_group(7),
        fg.cyclic_group(8),
        fg.direct_product(Z2, fg.cyclic_group(4), name="Z2xZ4"),
        fg.dihedral_group(4),
        fg.quaternion_group(),
        fg.direct_product(fg.direct_product(Z2, Z2), Z2, name="E8"),
    ]


@pytest.fixture(scope="session")
def corpus() -> list[fg.FiniteGroup]:
    return small_group_corpus()


@pytest.fixture(scope="session")
def klein() -> fg.FiniteGroup:
    return klein_group()


# --- sorted-group fixtures -------------------------------------------------
#
# The Klein group's three proper nontrivial subgroups, in id order:
# NA = {0,1}, NB = {0,2}, NC = {0,3}.

NA = frozenset({0, 1})
NB = frozenset({0, 2})
NC = frozenset({0, 3})

SUFFIX_LIFT = sorting.SortLift("append_suffix", ("s1", "s2"))


def walkthrough_data(G: fg.FiniteGroup | None = None) -> sorting.SortingData:
    """The Klein sorting data whose cover needs two promotion steps: the
    s1-only family sits on two of the index-2 subgroups."""
    G = G or klein_group()
    fams = {
        frozenset({0}): ALL_FAMILY,
        NA: S1_UP,
        NB: S1_UP,
        NC: ALL_FAMILY,
        frozenset(range(4)): ALL_FAMILY,
    }
    return sorting.SortingData(G, ALPHABET, sorting.freeze_families(fams),
                               SUFFIX_LIFT)


def verbatim_data(G: fg.FiniteGroup | None = None) -> sorting.SortingData:
    """Klein data with the bottom family too small to be union-closed
    (carried as printed; validation reports the defect)."""
    G = G or klein_group()
    fams = {
        frozenset({0}): TOP_ONLY,
        NA: S1_UP,
        NB: S1_UP,
        NC: S1_UP,
        frozenset(range(4)): ALL_FAMILY,
    }
    return sorting.SortingData(G, ALPHABET, sorting.freeze_families(fams),
                               SUFFIX_LIFT)


def corrected_data(G: fg.FiniteGroup | None = None) -> sorting.SortingData:
    """The repaired variant: the bottom family enlarged to the s1-upward one."""
    G = G or klein_group()
    fams = {
        frozenset({0}): S1_UP,
        NA: S1_UP,
        NB: S1_UP,
        NC: S1_UP,
        frozenset(range(4)): ALL_FAMILY,
    }
    return sorting.SortingData(G, ALPHABET, sorting.freeze_families(fams),
                               SUFFIX_LIFT)


def full_sorted(G: fg.FiniteGroup, alphabet=ALPHABET) -> SortedGroup:
    return SortedGroup(sorting.full_data(G, alphabet))


def sorted_fixture_corpus() -> list[tuple[str, SortedGroup]]:
    """The named sorted groups used by the duality and acceptance suites."""
    Z2 = fg.cyclic_group(2)
    return [
        ("trivial-full", full_sorted(fg.trivial_group())),
        ("klein-walkthrough", SortedGroup(walkthrough_data())),
        ("klein-verbatim", SortedGroup(verbatim_data(), check=False)),
        ("klein-corrected", SortedGroup(corrected_data())),
        ("klein-full", full_sorted(klein_group())),
        ("s3-full", full_sorted(fg.symmetric_group(3))),
        ("z2xz4-full", full_sorted(
            fg.direct_product(Z2, fg.cyclic_group(4), name="Z2xZ4"))),
    ]


@pytest.fixture(scope="session")
def sorted_corpus() -> list[tuple[str, SortedGroup]]:
    return sorted_fixture_corpus()
