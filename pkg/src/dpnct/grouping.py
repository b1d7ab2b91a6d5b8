"""Round-based grouping of meters and master-side noise accumulation.

Each cancellation period ("round") the meter population is re-partitioned
uniformly at random into K near-equal groups and one member per group is
picked as master. Members send their net noise to the master, which sums
the submissions and forwards one total per group to the aggregator, so the
aggregator can denoise the total load without seeing any individual noise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import MissingSubmission, TooManyGroups


@dataclass(frozen=True)
class GroupAssignment:
    """One round's partition of meter IDs into groups, plus the masters.

    Group members are kept sorted ascending; accumulation always walks them
    in that order so the summation order is reproducible and matches the
    vectorised path float for float.
    """

    round_index: int
    groups: tuple[tuple[int, ...], ...]
    masters: tuple[int, ...]

    def __post_init__(self):
        if len(self.masters) != len(self.groups):
            raise ValueError("one master required per group")
        seen: set[int] = set()
        for group, master in zip(self.groups, self.masters):
            if not group:
                raise ValueError("empty group")
            if master not in group:
                raise ValueError(f"master {master} not a member of its group")
            members = set(group)
            if members & seen:
                raise ValueError("groups are not disjoint")
            seen |= members
        sizes = [len(g) for g in self.groups]
        if max(sizes) - min(sizes) > 1:
            raise ValueError(f"group sizes must differ by at most 1, got {sizes}")

    @property
    def meter_ids(self) -> frozenset:
        return frozenset(m for g in self.groups for m in g)


@dataclass(frozen=True)
class GroupNoiseReport:
    """A master's summed net noise for its group at one timestep."""

    round_index: int
    timestep: int
    group_index: int
    aggregated_noise: float


def form_groups(meter_ids: Iterable[int], num_groups: int, rng: np.random.Generator, round_index: int = 0) -> GroupAssignment:
    """Partition meters into ``num_groups`` random near-equal groups.

    The partition and the per-group master choice are uniform and fully
    determined by the rng state, so a seeded run reproduces its grouping.

    Raises:
        TooManyGroups: more groups requested than meters available.
    """
    ids = sorted(set(meter_ids))
    if num_groups < 1:
        raise ValueError(f"num_groups must be >= 1, got {num_groups}")
    if num_groups > len(ids):
        raise TooManyGroups(f"cannot split {len(ids)} meters into {num_groups} groups")
    order = rng.permutation(len(ids))
    base, extra = divmod(len(ids), num_groups)
    groups = []
    start = 0
    for g in range(num_groups):
        size = base + (1 if g < extra else 0)
        chunk = [ids[j] for j in order[start : start + size]]
        groups.append(tuple(sorted(chunk)))
        start += size
    masters = tuple(group[rng.integers(len(group))] for group in groups)
    return GroupAssignment(round_index=round_index, groups=tuple(groups), masters=masters)


def accumulate_group_noise(
    assignment: GroupAssignment,
    submissions: Mapping[int, float],
    timestep: int,
) -> list[GroupNoiseReport]:
    """Sum each group's member noise submissions for one timestep.

    Submissions are added in ascending meter-ID order; the master's own
    submission is included like any member's.

    Raises:
        MissingSubmission: a group member has no submission; no report is
            produced for any group in that case (the round is aborted and
            surfaced to the caller).
    """
    reports = []
    for g, group in enumerate(assignment.groups):
        total = 0.0
        for meter_id in group:
            if meter_id not in submissions:
                raise MissingSubmission(meter_id, timestep)
            total += submissions[meter_id]
        reports.append(
            GroupNoiseReport(
                round_index=assignment.round_index,
                timestep=timestep,
                group_index=g,
                aggregated_noise=total,
            )
        )
    return reports


def assignments_for_rounds(
    num_meters: int,
    num_groups: int,
    num_rounds: int,
    seed_sequence: np.random.SeedSequence,
) -> list[GroupAssignment]:
    """Fresh random assignment for each round, one child rng per round."""
    children = seed_sequence.spawn(num_rounds)
    return [
        form_groups(range(num_meters), num_groups, np.random.Generator(np.random.PCG64(child)), round_index=r)
        for r, child in enumerate(children)
    ]


def group_index_matrix(assignments: list[GroupAssignment], num_meters: int) -> np.ndarray:
    """Rounds x meters matrix mapping meter ID to its group per round."""
    out = np.empty((len(assignments), num_meters), dtype=np.int64)
    for r, assignment in enumerate(assignments):
        if assignment.meter_ids != frozenset(range(num_meters)):
            raise ValueError(f"round {r} does not cover meter IDs 0..{num_meters - 1}")
        for g, group in enumerate(assignment.groups):
            for meter_id in group:
                out[r, meter_id] = g
    return out
