"""NSGA-II selection core: dominance, non-dominated sorting, crowding.

All objectives are maximized.  Functions are pure and deterministic; ties
break on stable input order so evolutionary runs reproduce exactly.
"""

from __future__ import annotations

import math
from typing import Hashable, Sequence

ObjectivePoint = tuple[Hashable, Sequence[float]]


def dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    """True iff a is at least as good as b everywhere and better somewhere."""
    if len(a) != len(b):
        raise ValueError(f"objective counts differ: {len(a)} vs {len(b)}")
    better = False
    for x, y in zip(a, b):
        if x < y:
            return False
        if x > y:
            better = True
    return better


def fast_nondominated_sort(points: Sequence[ObjectivePoint]) -> list[list[Hashable]]:
    """Deb's fast non-dominated sort; fronts partition the input ids."""
    if not points:
        raise ValueError("cannot sort an empty point set")
    n = len(points)
    dominated_by: list[list[int]] = [[] for _ in range(n)]
    domination_count = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if dominates(points[i][1], points[j][1]):
                dominated_by[i].append(j)
                domination_count[j] += 1
            elif dominates(points[j][1], points[i][1]):
                dominated_by[j].append(i)
                domination_count[i] += 1
    fronts: list[list[Hashable]] = []
    current = [i for i in range(n) if domination_count[i] == 0]
    while current:
        fronts.append([points[i][0] for i in current])
        nxt = []
        for i in current:
            for j in dominated_by[i]:
                domination_count[j] -= 1
                if domination_count[j] == 0:
                    nxt.append(j)
        current = sorted(nxt)
    return fronts


def crowding_distance(front: Sequence[ObjectivePoint]) -> dict[Hashable, float]:
    """Crowding distance of each point within one front.

    Per objective the extreme points get +inf and interior points
    accumulate the neighbour gap normalized by the objective's range;
    zero-range objectives contribute nothing.
    """
    if not front:
        raise ValueError("cannot compute crowding distance of an empty front")
    distance = {pid: 0.0 for pid, _ in front}
    n_objectives = len(front[0][1])
    for m in range(n_objectives):
        ordered = sorted(front, key=lambda p: p[1][m])
        distance[ordered[0][0]] = math.inf
        distance[ordered[-1][0]] = math.inf
        value_range = ordered[-1][1][m] - ordered[0][1][m]
        if value_range <= 0.0:
            continue
        for k in range(1, len(ordered) - 1):
            pid = ordered[k][0]
            if distance[pid] != math.inf:
                distance[pid] += (ordered[k + 1][1][m] - ordered[k - 1][1][m]) / value_range
    return distance


def select_survivors(points: Sequence[ObjectivePoint], k: int) -> list[Hashable]:
    """NSGA-II survivor selection: fill whole fronts, then split the last
    admitted front by descending crowding distance (stable ties)."""
    if k > len(points):
        raise ValueError(f"cannot select {k} from {len(points)} points")
    if k == 0:
        return []
    by_id = {pid: objectives for pid, objectives in points}
    position = {pid: i for i, (pid, _) in enumerate(points)}
    if len(by_id) != len(points):
        raise ValueError("point ids must be unique")
    survivors: list[Hashable] = []
    for front_ids in fast_nondominated_sort(points):
        if len(survivors) + len(front_ids) <= k:
            survivors.extend(front_ids)
            if len(survivors) == k:
                break
            continue
        front = [(pid, by_id[pid]) for pid in front_ids]
        crowd = crowding_distance(front)
        front_ids = sorted(front_ids, key=lambda pid: (-crowd[pid], position[pid]))
        survivors.extend(front_ids[: k - len(survivors)])
        break
    return survivors


def rank_and_crowding(
    points: Sequence[ObjectivePoint],
) -> tuple[dict[Hashable, int], dict[Hashable, float]]:
    """Front rank (0 = non-dominated) and in-front crowding distance per id."""
    by_id = dict(points)
    rank: dict[Hashable, int] = {}
    crowd: dict[Hashable, float] = {}
    for level, front_ids in enumerate(fast_nondominated_sort(points)):
        front = [(pid, by_id[pid]) for pid in front_ids]
        crowd.update(crowding_distance(front))
        for pid in front_ids:
            rank[pid] = level
    return rank, crowd
