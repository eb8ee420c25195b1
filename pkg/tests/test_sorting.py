"""Sorting data: validation findings, the generate closure, transport and
the pointwise order."""
from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import (ALL_FAMILY, ALPHABET, NA, NB, NC, S1_UP, S2_UP,
                      SUFFIX_LIFT, TOP_ONLY, corrected_data, klein_group,
                      small_group_corpus, verbatim_data, walkthrough_data)
from sortedgroups import fingroup as fg
from sortedgroups import sorting

KLEIN = klein_group()
TRIV = frozenset({0})
KLEIN_ALL = frozenset(range(4))

Z2 = fg.cyclic_group(2)
Z2_TRIV = frozenset({0})
Z2_ALL = frozenset({0, 1})

UPWARD = [ALL_FAMILY, S1_UP, S2_UP, TOP_ONLY]


def z2_data(bottom: frozenset) -> sorting.SortingData:
    fams = {Z2_TRIV: bottom, Z2_ALL: ALL_FAMILY}
    return sorting.SortingData(Z2, ALPHABET, sorting.freeze_families(fams),
                               sorting.SortLift())


def klein_data(f0, fa, fb, fc, lift=None) -> sorting.SortingData:
    fams = {TRIV: f0, NA: fa, NB: fb, NC: fc, KLEIN_ALL: ALL_FAMILY}
    return sorting.SortingData(KLEIN, ALPHABET, sorting.freeze_families(fams),
                               lift or sorting.SortLift())


# --- constructor and primitives ---------------------------------------------

def test_constructor_rejects_malformed_data():
    with pytest.raises(ValueError):  # missing subgroup key
        sorting.SortingData(KLEIN, ALPHABET, sorting.freeze_families(
            {TRIV: ALL_FAMILY, KLEIN_ALL: ALL_FAMILY}), sorting.SortLift())
    with pytest.raises(ValueError):  # full group family must be everything
        sorting.SortingData(Z2, ALPHABET, sorting.freeze_families(
            {Z2_TRIV: ALL_FAMILY, Z2_ALL: S1_UP}), sorting.SortLift())
    with pytest.raises(ValueError):  # support escapes the alphabet
        sorting.SortingData(Z2, ALPHABET, sorting.freeze_families(
            {Z2_TRIV: frozenset({frozenset({"s3"})}), Z2_ALL: ALL_FAMILY}),
            sorting.SortLift())
    with pytest.raises(ValueError):  # duplicate alphabet entry
        sorting.SortingData(Z2, ("s1", "s1"), sorting.freeze_families(
            {Z2_TRIV: TOP_ONLY, Z2_ALL: TOP_ONLY}), sorting.SortLift())
    with pytest.raises(ValueError):  # lift names a sort outside the alphabet
        sorting.SortingData(Z2, ("s1",), sorting.freeze_families(
            {Z2_TRIV: frozenset({frozenset({"s1"})}),
             Z2_ALL: frozenset({frozenset({"s1"})})}),
            sorting.SortLift("append_suffix", ("s2",)))


def test_lift_kinds():
    ident = sorting.SortLift()
    assert ident.apply(4, frozenset({"s1"})) == frozenset({"s1"})
    suffix = sorting.SortLift("append_suffix", ("s2",))
    assert suffix.apply(2, frozenset({"s1"})) == frozenset({"s1", "s2"})
    # the index argument is validated even though both kinds ignore it
    with pytest.raises(ValueError):
        ident.apply(0, frozenset({"s1"}))
    with pytest.raises(ValueError):
        sorting.SortLift("custom")
    with pytest.raises(ValueError):
        sorting.SortLift("identity", ("s1",))
    with pytest.raises(ValueError):
        sorting.SortLift("append_suffix", ())
    with pytest.raises(ValueError):
        sorting.SortLift("append_suffix", ("s1", "s1"))


def test_representative_tuple_uses_alphabet_order():
    assert sorting.representative_tuple(frozenset({"s2", "s1"}), ALPHABET) == \
        ("s1", "s2")
    with pytest.raises(ValueError):
        sorting.representative_tuple(frozenset({"zz"}), ALPHABET)


def test_membership_ignores_order_and_duplicates():
    F = verbatim_data()
    assert sorting.membership(F, NB, ("s1", "s2"))
    assert sorting.membership(F, NB, ("s2", "s1", "s2"))
    assert sorting.membership(F, NB, ("s1",))
    assert not sorting.membership(F, NB, ("s2",))
    assert not sorting.membership(F, NB, ("s2", "s2"))
    with pytest.raises(ValueError):
        sorting.membership(F, NB, ())
    with pytest.raises(ValueError):
        sorting.membership(F, NB, ("s9",))


@given(st.permutations(["s1", "s2", "s1", "s1"]))
def test_membership_is_permutation_invariant(J):
    F = walkthrough_data()
    assert sorting.membership(F, NA, tuple(J)) == \
        sorting.membership(F, NA, ("s1", "s2"))


# --- validation --------------------------------------------------------------

def test_walkthrough_and_corrected_data_are_valid():
    assert sorting.validate(walkthrough_data()).ok
    assert sorting.validate(corrected_data()).ok


def test_verbatim_data_has_exactly_three_union_findings():
    report = sorting.validate(verbatim_data())
    assert not report.ok
    assert report.findings == (
        "union {s1} of {s1} at {0,1} and {s1} at {0,2} missing at {0}",
        "union {s1} of {s1} at {0,1} and {s1} at {0,3} missing at {0}",
        "union {s1} of {s1} at {0,2} and {s1} at {0,3} missing at {0}",
    )


def test_walkthrough_data_needs_the_suffix_lift():
    # under the identity lift the s2-supports at the bottom fail to lift
    # into the s1-only families
    fams = dict(walkthrough_data().families)
    data = sorting.SortingData(KLEIN, ALPHABET,
                               sorting.freeze_families(fams),
                               sorting.SortLift())
    report = sorting.validate(data)
    assert any(f.startswith("lift image {s2}") for f in report.findings)


def test_empty_family_is_flagged():
    data = klein_data(ALL_FAMILY, frozenset(), ALL_FAMILY, ALL_FAMILY)
    report = sorting.validate(data)
    assert "empty family at {0,1}" in report.findings


def test_downward_closure_is_opt_in():
    plain = z2_data(S1_UP)
    assert sorting.validate(plain).ok
    flagged = sorting.SortingData(Z2, ALPHABET, plain.families,
                                  plain.lift, downward_closure=True)
    report = sorting.validate(flagged)
    assert "downward closure: {s1,s2} at {0} lacks {s2}" in report.findings


def test_every_family_of_valid_data_contains_the_full_support():
    full = frozenset(ALPHABET)
    for data in [walkthrough_data(), corrected_data(),
                 sorting.full_data(KLEIN, ALPHABET)]:
        assert sorting.validate(data).ok
        for _, fam in data.families:
            assert full in fam


def test_z2_has_exactly_four_valid_datas():
    # brute force over all eight bottom families: validity forces upward
    # closure and nonemptiness, leaving the four upward-closed families
    supports = sorted(sorting.all_supports(ALPHABET),
                      key=lambda S: (len(S), sorted(S)))
    valid = []
    for picks in itertools.product((False, True), repeat=3):
        bottom = frozenset(S for S, keep in zip(supports, picks) if keep)
        data = sorting.SortingData(
            Z2, ALPHABET,
            sorting.freeze_families({Z2_TRIV: bottom, Z2_ALL: ALL_FAMILY}),
            sorting.SortLift())
        if sorting.validate(data).ok:
            valid.append(bottom)
    assert len(valid) == 4
    assert set(valid) == {TOP_ONLY, S1_UP, S2_UP, ALL_FAMILY}


def klein_identity_lift_valid_datas() -> list[sorting.SortingData]:
    out = []
    for combo in itertools.product(UPWARD, repeat=4):
        data = klein_data(*combo)
        if sorting.validate(data).ok:
            out.append(data)
    return out


def test_meet_of_valid_datas_is_valid_and_is_the_glb():
    datas = klein_identity_lift_valid_datas()
    assert len(datas) > 1
    for F1, F2 in itertools.combinations(datas, 2):
        m = sorting.meet(F1, F2)
        assert sorting.validate(m).ok
        assert sorting.compare(m, F1) in ("equal", "less")
        assert sorting.compare(m, F2) in ("equal", "less")
        for D in datas:
            if (sorting.compare(D, F1) in ("equal", "less")
                    and sorting.compare(D, F2) in ("equal", "less")):
                assert sorting.compare(D, m) in ("equal", "less")


# --- generate ----------------------------------------------------------------

def test_generate_closes_a_single_bottom_support():
    gen = sorting.generate(KLEIN, ALPHABET, {TRIV: [["s1"]]}, SUFFIX_LIFT)
    index = dict(gen.families)
    assert index[TRIV] == S1_UP
    assert index[NA] == index[NB] == index[NC] == TOP_ONLY
    assert index[KLEIN_ALL] == ALL_FAMILY
    assert sorting.validate(gen).ok


def test_generate_rejects_foreign_keys_and_supports():
    with pytest.raises(ValueError):
        sorting.generate(KLEIN, ALPHABET, {frozenset({1}): [["s1"]]})
    S3 = fg.symmetric_group(3)
    flip = next(H for H in fg.all_subgroups(S3)
                if len(H) == 2 and not fg.is_normal(S3, H))
    with pytest.raises(ValueError):
        sorting.generate(S3, ALPHABET, {flip: [["s1"]]})
    with pytest.raises(ValueError):
        sorting.generate(KLEIN, ALPHABET, {TRIV: [["s9"]]})
    with pytest.raises(ValueError):
        sorting.generate(KLEIN, ALPHABET, {TRIV: [[]]})


def test_generate_from_a_valid_datas_families_is_idempotent():
    for data in [walkthrough_data(), corrected_data()]:
        again = sorting.generate(data.group, data.alphabet,
                                 dict(data.families), data.lift)
        assert again == data


def test_generate_join_is_the_least_valid_data_above_both():
    datas = klein_identity_lift_valid_datas()
    pairs = list(itertools.combinations(datas, 2))[::7]  # a spread sample
    for F1, F2 in pairs:
        union = {N: fam | dict(F2.families)[N] for N, fam in F1.families}
        J = sorting.generate(KLEIN, ALPHABET, union)
        assert sorting.validate(J).ok
        assert sorting.compare(F1, J) in ("equal", "less")
        assert sorting.compare(F2, J) in ("equal", "less")
        for D in datas:
            if (sorting.compare(F1, D) in ("equal", "less")
                    and sorting.compare(F2, D) in ("equal", "less")):
                assert sorting.compare(J, D) in ("equal", "less")


GROUPS = [G for G in small_group_corpus() if G.order <= 8]
SUPPORT_LIST = sorted(sorting.all_supports(ALPHABET),
                      key=lambda S: (len(S), sorted(S)))


@st.composite
def group_and_presorts(draw):
    G = draw(st.sampled_from(GROUPS))
    normals = fg.normal_subgroups(G)
    presort = {}
    for N in draw(st.lists(st.sampled_from(normals), max_size=3,
                           unique=True)):
        fam = draw(st.sets(st.sampled_from(SUPPORT_LIST), min_size=1,
                           max_size=3))
        presort[N] = fam
    extra = {}
    for N in draw(st.lists(st.sampled_from(normals), max_size=2,
                           unique=True)):
        fam = draw(st.sets(st.sampled_from(SUPPORT_LIST), min_size=1,
                           max_size=2))
        extra[N] = presort.get(N, frozenset()) | fam
    bigger = dict(presort)
    bigger.update(extra)
    return G, presort, bigger


@given(group_and_presorts())
@settings(max_examples=60, deadline=None)
def test_generate_is_a_closure_operator(drawn):
    G, presort, bigger = drawn
    F = sorting.generate(G, ALPHABET, presort)
    # extensive
    index = dict(F.families)
    for N, fam in presort.items():
        assert fam <= index[N]
    # idempotent
    assert sorting.generate(G, ALPHABET, dict(F.families)) == F
    # monotone
    F2 = sorting.generate(G, ALPHABET, bigger)
    assert sorting.compare(F, F2) in ("equal", "less")
    # valid apart from families no rule reached
    report = sorting.validate(F)
    assert all(f.startswith("empty family") for f in report.findings)


# --- transport and the pointwise order ---------------------------------------

def test_push_forward_reads_families_off_preimages():
    F = walkthrough_data()
    Q, proj = fg.quotient(KLEIN, NB)
    pushed = sorting.push_forward(proj, F)
    assert pushed.group == Q
    assert pushed.family_of(frozenset({0})) == S1_UP
    assert pushed.family_of(frozenset({0, 1})) == ALL_FAMILY


def test_push_forward_rejects_non_epimorphisms():
    emb = fg.GroupMap(Z2, KLEIN, (0, 1))
    with pytest.raises(ValueError):
        sorting.push_forward(emb, z2_data(S1_UP))


def test_push_forward_composes():
    F = corrected_data()
    Q, proj = fg.quotient(KLEIN, NA)
    R, proj2 = fg.quotient(Q, frozenset({0, 1}))
    once = sorting.push_forward(proj2, sorting.push_forward(proj, F))
    assert once == sorting.push_forward(proj2.compose(proj), F)


def test_compare_orders_the_walkthrough_chain():
    F = walkthrough_data()
    full = sorting.full_data(KLEIN, ALPHABET, SUFFIX_LIFT)
    assert sorting.compare(F, F) == "equal"
    assert sorting.compare(F, full) == "less"
    assert sorting.compare(full, F) == "greater"
    s1 = z2_data(S1_UP)
    s2 = z2_data(S2_UP)
    assert sorting.compare(s1, s2) == "incomparable"


def test_compare_rejects_mismatched_carriers():
    suffixed = sorting.full_data(KLEIN, ALPHABET, SUFFIX_LIFT)
    plain = sorting.full_data(KLEIN, ALPHABET)
    with pytest.raises(ValueError, match="mismatched carriers"):
        sorting.compare(suffixed, plain)
    with pytest.raises(ValueError, match="mismatched carriers"):
        sorting.compare(z2_data(S1_UP), sorting.full_data(Z2, ("s1",)))


def test_data_key_distinguishes_and_sorts():
    keys = {sorting.data_key(z2_data(bottom)) for bottom in UPWARD}
    assert len(keys) == 4
    assert sorted(keys)  # orderable without error
