"""Non-dominated sorting and crowding distance for 2-objective selection."""
from __future__ import annotations

import numpy as np

MINIMIZE = "minimize"
MAXIMIZE = "maximize"


def _as_minimization(objectives: np.ndarray, directions: tuple[str, ...]) -> np.ndarray:
    objs = np.asarray(objectives, dtype=np.float64)
    if objs.ndim != 2 or objs.shape[1] != len(directions):
        raise ValueError("objectives must be (n_points, n_directions)")
    signs = np.array([1.0 if d == MINIMIZE else -1.0 for d in directions])
    for d in directions:
        if d not in (MINIMIZE, MAXIMIZE):
            raise ValueError(f"unknown direction {d!r}")
    return objs * signs


def dominates(a, b, directions: tuple[str, ...]) -> bool:
    """True when a is at least as good as b everywhere and better somewhere."""
    m = _as_minimization(np.array([a, b]), directions)
    return bool(np.all(m[0] <= m[1]) and np.any(m[0] < m[1]))


def pareto_ranks(objectives, directions: tuple[str, ...]) -> np.ndarray:
    """Non-domination rank per point, 0 = front (fast non-dominated sort)."""
    m = _as_minimization(objectives, directions)
    n = len(m)
    ranks = np.full(n, -1, dtype=np.int64)
    dominated_by: list[list[int]] = [[] for _ in range(n)]
    counts = np.zeros(n, dtype=np.int64)
    for i in range(n):
        le = np.all(m[i] <= m, axis=1)
        lt = np.any(m[i] < m, axis=1)
        dom = le & lt  # i dominates j
        dominated_by[i] = np.flatnonzero(dom).tolist()
        counts += dom
    front = np.flatnonzero(counts == 0).tolist()
    rank = 0
    while front:
        nxt: list[int] = []
        for i in front:
            ranks[i] = rank
            for j in dominated_by[i]:
                counts[j] -= 1
                if counts[j] == 0:
                    nxt.append(j)
        front = sorted(nxt)
        rank += 1
    return ranks


def pareto_front_indices(objectives, directions: tuple[str, ...]) -> np.ndarray:
    """Indices of rank-0 points, ascending."""
    return np.flatnonzero(pareto_ranks(objectives, directions) == 0)


def crowding_distance(objectives, directions: tuple[str, ...]) -> np.ndarray:
    """Standard crowding distance; boundary points get +inf."""
    m = _as_minimization(objectives, directions)
    n = len(m)
    dist = np.zeros(n)
    if n <= 2:
        return np.full(n, np.inf)
    for col in m.T:
        order = np.argsort(col, kind="stable")
        lo, hi = col[order[0]], col[order[-1]]
        dist[order[0]] = np.inf
        dist[order[-1]] = np.inf
        if hi == lo:
            continue
        gaps = (col[order[2:]] - col[order[:-2]]) / (hi - lo)
        dist[order[1:-1]] += gaps
    return dist
