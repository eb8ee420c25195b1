"""The sorted embedding property and its universal covers.

A sorted group has the embedding property when every sorted epimorphism
onto a common image lifts: given sorted ``Pi: A -> B`` and ``phi: G -> B``
with A, B sorted quotients of G, some sorted ``psi: G -> A`` satisfies
``Pi . psi = phi``. ``has_sep`` decides this by quantifying over quotient
class representatives — sound because the property is invariant under
sorted isomorphism of either end.

When the property fails, the failed witness is repaired by extending it to
a maximal pair and forming the sorted fibre product. Iterating yields a
certificate: a chain of stages, each either a *data step* (same group,
strictly larger sorting data) or a *fibre step* (strictly larger group),
ending in a stage with the property that maps back onto the input. The
certificate carries every intermediate object so a replay can re-check each
step mechanically.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator

from . import sorting
from .fingroup import FiniteGroup, enumerate_epimorphisms, identity_map
from .sortedcat import (MorphismPair, SortedGroup, SortedMap, is_sorted,
                        maximal_pair_above, sorted_fibre_product,
                        sorted_identity, sorted_quotients)

__all__ = [
    "EmbWitness",
    "SepVerdict",
    "CoverStep",
    "CoverCertificate",
    "BudgetExceeded",
    "check_emb",
    "has_sep",
    "has_fsep",
    "failure_step",
    "universal_sep_cover",
    "check_factoring",
]

Formation = Callable[[FiniteGroup], bool]


@dataclass(frozen=True)
class EmbWitness:
    """One instance of the lifting problem, solved or not.

    ``lift`` is a sorted map with ``Pi . lift == phi`` when one exists and
    None otherwise; an EmbWitness with ``lift=None`` is a counterexample to
    the embedding property.
    """

    G: SortedGroup
    A: SortedGroup
    B: SortedGroup
    Pi: SortedMap
    phi: SortedMap
    lift: SortedMap | None = None

    def __post_init__(self) -> None:
        if self.Pi.source != self.A or self.Pi.target != self.B:
            raise ValueError("Pi must run from A to B")
        if self.phi.source != self.G or self.phi.target != self.B:
            raise ValueError("phi must run from the ambient group to B")
        if self.lift is not None:
            if self.lift.source != self.G or self.lift.target != self.A:
                raise ValueError("the lift must run from the ambient "
                                 "group to A")
            if self.Pi.map.compose(self.lift.map) != self.phi.map:
                raise ValueError("the lift does not factor phi through Pi")

    @property
    def solved(self) -> bool:
        return self.lift is not None


@dataclass(frozen=True)
class SepVerdict:
    holds: bool
    witness: EmbWitness | None = None

    def __post_init__(self) -> None:
        if self.holds != (self.witness is None):
            raise ValueError("a verdict carries a witness exactly when "
                             "the property fails")


def check_emb(G: SortedGroup, A: SortedGroup, B: SortedGroup,
              Pi: SortedMap, phi: SortedMap) -> EmbWitness:
    """Solve one lifting instance, returning the witness either way."""
    lifts = _lift_table(G, A, Pi)
    return EmbWitness(G, A, B, Pi, phi, lifts.get(phi.map.images))


def _lift_table(G: SortedGroup, A: SortedGroup,
                Pi: SortedMap) -> dict[tuple[int, ...], SortedMap]:
    """All compositions Pi . psi over sorted psi: G -> A, indexed by their
    image arrays; one lookup then answers any phi."""
    table: dict[tuple[int, ...], SortedMap] = {}
    for raw in enumerate_epimorphisms(G.group, A.group):
        key = Pi.map.compose(raw).images
        if key in table:
            continue
        psi = is_sorted(raw, G, A)
        if psi is not None:
            table[key] = psi
    return table


def _witness_key(w: EmbWitness) -> tuple:
    return (w.B.order, w.A.order, w.Pi.map.images, w.phi.map.images,
            sorting.data_key(w.B.data), sorting.data_key(w.A.data))


def _failures(G: SortedGroup, mode: str,
              formation: Formation | None) -> Iterator[EmbWitness]:
    reps = [rep for rep, _ in sorted_quotients(G, mode)]
    if formation is not None:
        reps = [rep for rep in reps if formation(rep.group)]
    for B in reps:
        phis = [phi for raw in enumerate_epimorphisms(G.group, B.group)
                if (phi := is_sorted(raw, G, B)) is not None]
        if not phis:
            continue
        for A in reps:
            for raw in enumerate_epimorphisms(A.group, B.group):
                Pi = is_sorted(raw, A, B)
                if Pi is None:
                    continue
                lifts = _lift_table(G, A, Pi)
                for phi in phis:
                    if phi.map.images not in lifts:
                        yield EmbWitness(G, A, B, Pi, phi)


def has_sep(G: SortedGroup, mode: str = "pushforward_only", *,
            formation: Formation | None = None,
            tie_break: str = "default") -> SepVerdict:
    """Decide the sorted embedding property.

    On failure the reported witness is the least (or under
    ``tie_break="reversed"`` the greatest) failure in the order: image
    order, then source order, then the two image arrays, then the
    serialized datas.
    """
    if tie_break not in ("default", "reversed"):
        raise ValueError(f"unknown tie break {tie_break!r}")
    worst: EmbWitness | None = None
    for w in _failures(G, mode, formation):
        if worst is None:
            worst = w
        elif tie_break == "default":
            if _witness_key(w) < _witness_key(worst):
                worst = w
        elif _witness_key(w) > _witness_key(worst):
            worst = w
    if worst is None:
        return SepVerdict(True)
    return SepVerdict(False, worst)


def has_fsep(G: SortedGroup, mode: str = "pushforward_only", *,
             formation: Formation | None = None) -> SepVerdict:
    """The free variant coincides with the plain one on finite sorted
    groups; exposed so suites can state both facts separately."""
    return has_sep(G, mode, formation=formation)


class BudgetExceeded(Exception):
    """The cover construction hit a resource cap before terminating."""

    def __init__(self, reason: str) -> None:
        super().__init__(reason)
        self.reason = reason


@dataclass(frozen=True)
class CoverStep:
    """One repair: the failed witness, the maximal pair extending it, the
    resulting stage and the projection back onto the previous stage."""

    kind: str  # "data_step" | "fibre_step"
    witness: EmbWitness
    maximal_pair: MorphismPair
    result: SortedGroup
    projection: SortedMap

    def __post_init__(self) -> None:
        if self.kind not in ("data_step", "fibre_step"):
            raise ValueError(f"unknown step kind {self.kind!r}")


@dataclass(frozen=True)
class CoverCertificate:
    """A machine-checkable record of a terminated cover run."""

    input: SortedGroup
    steps: tuple[CoverStep, ...]
    final: SortedGroup
    composite: SortedMap

    def __post_init__(self) -> None:
        if self.composite.source != self.final or \
                self.composite.target != self.input:
            raise ValueError("the composite must run from the final stage "
                             "onto the input")


def _step(G: SortedGroup, witness: EmbWitness, *,
          tie_break: str = "default") -> CoverStep:
    if witness.solved:
        raise ValueError("the witness is solvable; there is nothing "
                         "to repair")
    if witness.G != G:
        raise ValueError("the witness does not talk about this group")
    pair = MorphismPair(witness.Pi, witness.phi)
    mx = maximal_pair_above(pair, tie_break=tie_break)
    X, _, p2 = sorted_fibre_product(mx)
    if p2.map.is_bijective:
        data = sorting.push_forward(p2.map, X.data)
        if sorting.compare(G.data, data) != "less":
            raise AssertionError("a data step must strictly enlarge "
                                 "the data")
        result = SortedGroup(data, check=False)
        projection = SortedMap(identity_map(G.group), result, G)
        return CoverStep("data_step", witness, mx, result, projection)
    if len(p2.map.kernel()) == 1:
        raise AssertionError("a fibre step must have a nontrivial kernel")
    return CoverStep("fibre_step", witness, mx, X, p2)


def failure_step(G: SortedGroup, witness: EmbWitness, *,
                 tie_break: str = "default") -> tuple[SortedGroup, SortedMap]:
    """Repair one failed witness: the next stage and its projection."""
    step = _step(G, witness, tie_break=tie_break)
    return step.result, step.projection


def universal_sep_cover(G: SortedGroup, *, max_order: int = 4096,
                        max_steps: int = 64, mode: str = "pushforward_only",
                        formation: Formation | None = None,
                        tie_break: str = "default") -> CoverCertificate:
    """Iterate repairs until the embedding property holds.

    Deterministic given the tie break, which steers both the witness chosen
    at each stage and the maximal pair extending it. Raises BudgetExceeded
    when a stage would pass ``max_order`` or the chain would pass
    ``max_steps``.
    """
    stage = G
    steps: list[CoverStep] = []
    composite = sorted_identity(G)
    while True:
        verdict = has_sep(stage, mode, formation=formation,
                          tie_break=tie_break)
        if verdict.holds:
            return CoverCertificate(G, tuple(steps), stage, composite)
        if len(steps) >= max_steps:
            raise BudgetExceeded(
                f"no cover within {max_steps} steps")
        step = _step(stage, verdict.witness, tie_break=tie_break)
        if step.result.order > max_order:
            raise BudgetExceeded(
                f"stage order {step.result.order} exceeds the cap "
                f"{max_order}")
        steps.append(step)
        composite = composite.compose(step.projection)
        stage = step.result


def check_factoring(cover: CoverCertificate,
                    other: CoverCertificate) -> SortedMap | None:
    """A sorted map from the other cover's final stage through this one,
    commuting with both composites; None when none exists."""
    if cover.input != other.input:
        raise ValueError("the covers must start from the same input")
    if not has_sep(other.final).holds:
        raise ValueError("the other certificate's final stage lacks the "
                         "embedding property")
    target = cover.composite.map
    want = other.composite.map
    for raw in enumerate_epimorphisms(other.final.group, cover.final.group):
        if target.compose(raw) == want:
            q = is_sorted(raw, other.final, cover.final)
            if q is not None:
                return q
    return None
