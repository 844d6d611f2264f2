"""Rationality, dominance and core membership of coalition structures.

The game is NTU: each user's payoff is its own SINR and cannot be
transferred.  A structure is in the core when no non-empty set of users can
form a coalition of its own in which every member is strictly better off.

A deviating set's payoffs depend on the other users only through their
total received power, so they do not depend on how the non-deviators
arrange themselves.  :func:`deviation_payoffs` checks this by evaluating two
different arrangements of the rest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .partition import (Coalition, CoalitionStructure, complement,
                        enumerate_structures, subsets)
from .payoff import (PayoffVector, ReceivedPowers, SystemParams,
                     payoffs_for_structure)

# relative margin for "strictly better" and "at least as good"
STRICT_TOL = 1e-9


def strictly_better(new: float, old: float, tol: float = STRICT_TOL) -> bool:
    return new > old * (1.0 + tol)


def at_least(new: float, old: float, tol: float = STRICT_TOL) -> bool:
    return new >= old * (1.0 - tol)


@dataclass(frozen=True)
class StructureEvaluation:
    structure: CoalitionStructure
    payoffs: PayoffVector
    group_total: float
    individually_rational: bool


@dataclass(frozen=True)
class DeviationWitness:
    """A set of users who all strictly gain by leaving to form their own coalition."""

    deviating_set: Coalition
    payoff_before: tuple[float, ...]
    payoff_after: tuple[float, ...]

    def __post_init__(self):
        for before, after in zip(self.payoff_before, self.payoff_after):
            if not strictly_better(after, before):
                raise ValueError("a deviation witness needs every member to strictly improve")

    def describe(self, n_players: int | None = None) -> str:
        gains = ", ".join(f"{m + 1}: {b:.6g} -> {a:.6g}" for m, b, a in
                          zip(self.deviating_set, self.payoff_before, self.payoff_after))
        return f"{{{self.deviating_set.label(n_players)}}} deviates ({gains})"


@dataclass
class StabilityReport:
    evaluations: list[StructureEvaluation]
    core_members: list[CoalitionStructure]
    blocking: dict[CoalitionStructure, DeviationWitness] = field(default_factory=dict)

    def evaluation(self, structure: CoalitionStructure) -> StructureEvaluation:
        for ev in self.evaluations:
            if ev.structure == structure:
                return ev
        raise KeyError(structure)

    def max_total_structures(self) -> list[CoalitionStructure]:
        """Structures whose group payoff is maximal (group rationality)."""
        best = max(ev.group_total for ev in self.evaluations)
        return [ev.structure for ev in self.evaluations
                if at_least(ev.group_total, best)]

    def stable_structures(self) -> list[CoalitionStructure]:
        """Structures that are individually rational, group rational and in the core."""
        group = set(self.max_total_structures())
        core = set(self.core_members)
        return [ev.structure for ev in self.evaluations
                if ev.individually_rational and ev.structure in group
                and ev.structure in core]


def evaluate_structures(params: SystemParams, powers: ReceivedPowers,
                        structures: Sequence[CoalitionStructure]) -> list[StructureEvaluation]:
    n = powers.n_known
    baseline = payoffs_for_structure(params, powers, CoalitionStructure.singletons(n))
    out = []
    for structure in structures:
        payoffs = payoffs_for_structure(params, powers, structure)
        rational = all(at_least(p, b) for p, b in zip(payoffs, baseline))
        out.append(StructureEvaluation(structure, payoffs, math.fsum(payoffs), rational))
    return out


def evaluate_all(params: SystemParams, powers: ReceivedPowers) -> list[StructureEvaluation]:
    """One evaluation for every coalition structure of the station's known users."""
    return evaluate_structures(params, powers, enumerate_structures(powers.n_known))


def deviation_payoffs(params: SystemParams, powers: ReceivedPowers,
                      deviating_set: Coalition) -> tuple[float, ...]:
    """Payoffs of the members of ``deviating_set`` once it forms its own coalition."""
    n = powers.n_known
    rest = sorted(complement(deviating_set, range(n)))
    split = [deviating_set.members] + [(j,) for j in rest]
    merged = [deviating_set.members] + ([tuple(rest)] if rest else [])
    a = payoffs_for_structure(params, powers, CoalitionStructure.from_blocks(split))
    b = payoffs_for_structure(params, powers, CoalitionStructure.from_blocks(merged))
    values = tuple(a[i] for i in deviating_set)
    for i in deviating_set:
        if not math.isclose(a[i], b[i], rel_tol=1e-12):
            raise RuntimeError(
                f"payoff of user {i + 1} in {{{deviating_set}}} depends on how the "
                f"other users are grouped ({a[i]!r} vs {b[i]!r})")
    return values


def blocks(candidate_payoffs: PayoffVector | Sequence[float], deviating_set: Coalition,
           params: SystemParams, powers: ReceivedPowers) -> DeviationWitness | None:
    """Witness that ``deviating_set`` blocks the candidate outcome, or None."""
    if not isinstance(deviating_set, Coalition):
        deviating_set = Coalition(tuple(deviating_set))
    if len(candidate_payoffs) != powers.n_known:
        raise ValueError("candidate payoffs do not match the number of known users")
    after = deviation_payoffs(params, powers, deviating_set)
    return _witness(candidate_payoffs, deviating_set, after)


def _witness(candidate, deviating_set, after):
    before = tuple(candidate[i] for i in deviating_set)
    if all(strictly_better(a, b) for a, b in zip(after, before)):
        return DeviationWitness(deviating_set, before, after)
    return None


def deviation_table(params: SystemParams,
                    powers: ReceivedPowers) -> list[tuple[Coalition, tuple[float, ...]]]:
    """Deviation payoffs of every non-empty subset, in subset order."""
    return [(s, deviation_payoffs(params, powers, s))
            for s in subsets(range(powers.n_known))]


def first_blocking(candidate: Sequence[float],
                   table: Sequence[tuple[Coalition, Sequence[float]]]) -> DeviationWitness | None:
    for s, after in table:
        witness = _witness(candidate, s, after)
        if witness is not None:
            return witness
    return None


def core_of(evaluations: Sequence[StructureEvaluation],
            table: Sequence[tuple[Coalition, Sequence[float]]]) -> StabilityReport:
    """Core membership of already-evaluated structures against a deviation table."""
    members, blocking = [], {}
    for ev in evaluations:
        witness = first_blocking(ev.payoffs, table)
        if witness is None:
            members.append(ev.structure)
        else:
            blocking[ev.structure] = witness
    return StabilityReport(list(evaluations), members, blocking)


def core(params: SystemParams, powers: ReceivedPowers,
         structures: Sequence[CoalitionStructure] | None = None) -> StabilityReport:
    """Evaluate every structure (or ``structures``) and decide core membership.

    Every non-empty subset of users is tried as a deviating coalition; the
    first blocking subset in size-then-lexicographic order is recorded.
    """
    if structures is None:
        evaluations = evaluate_all(params, powers)
    else:
        evaluations = evaluate_structures(params, powers, structures)
    return core_of(evaluations, deviation_table(params, powers))


@dataclass(frozen=True)
class DominanceMatrix:
    """``per_user[a, b]``: structure a weakly Pareto-dominates b (one user strictly).
    ``by_total[a, b]``: a's group payoff strictly exceeds b's."""

    structures: tuple[CoalitionStructure, ...]
    per_user: np.ndarray
    by_total: np.ndarray

    def index(self, structure: CoalitionStructure) -> int:
        return self.structures.index(structure)

    def dominates(self, a: CoalitionStructure, b: CoalitionStructure) -> bool:
        return bool(self.per_user[self.index(a), self.index(b)])


def dominance_matrix(evaluations: Sequence[StructureEvaluation]) -> DominanceMatrix:
    if not evaluations:
        raise ValueError("dominance_matrix needs at least one evaluation")
    n = evaluations[0].structure.n_players
    for ev in evaluations:
        if ev.structure.n_players != n or len(ev.payoffs) != n:
            raise ValueError("evaluations are over different player sets")
    k = len(evaluations)
    per_user = np.zeros((k, k), dtype=bool)
    by_total = np.zeros((k, k), dtype=bool)
    for a, ea in enumerate(evaluations):
        for b, eb in enumerate(evaluations):
            pairs = list(zip(ea.payoffs, eb.payoffs))
            per_user[a, b] = (all(at_least(x, y) for x, y in pairs)
                              and any(strictly_better(x, y) for x, y in pairs))
            by_total[a, b] = strictly_better(ea.group_total, eb.group_total)
    return DominanceMatrix(tuple(ev.structure for ev in evaluations), per_user, by_total)
