"""Closed-form quantities and structural counting oracles.

Holds the waiting-gain condition over (c, rho, p) and its region scan,
the disjoint-path and greedy-residual bounds, Monte Carlo estimators on
Erdos-Renyi graphs, and exact counters for the two augmenting-path
families used to certify that waiting creates extra matches.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .matching import Matching, _kernel
from .model import GraphState, UndirectedView
from .rng import derive_seed


@dataclass(frozen=True)
class RegionPoint:
    c: float
    rho: float
    lhs: float
    satisfied: bool


def condition_lhs(c: float, rho: float, p: float) -> float:
    """Gain-vs-loss margin for sublinear waiting with 3-way exchanges.

    Positive values mean the pool parameters favor holding easy nodes
    briefly: the mass of hard nodes only matchable through an extra
    waiting L node outweighs the mass put at risk by matching them
    early.  Identically zero at rho = 1.
    """
    if c <= 0.0:
        raise ValueError(f"c must be positive, got {c}")
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho must lie in [0, 1], got {rho}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    gain = (1.0 - p) * (1.0 - rho) * c * math.exp(-c * (1.0 + 2.0 * rho))
    loss = (
        p
        * (1.0 - math.exp(-c * rho))
        * (1.0 - c * (1.0 - rho) * math.exp(-c) - math.exp(-c * (1.0 - rho)))
    )
    return gain - loss


DEFAULT_C_GRID = tuple(round(0.05 * i, 10) for i in range(1, 101))
DEFAULT_RHO_GRID = tuple(round(0.01 * j, 10) for j in range(0, 101))


def region_scan(
    p: float,
    delta: float,
    c_grid=DEFAULT_C_GRID,
    rho_grid=DEFAULT_RHO_GRID,
) -> list[RegionPoint]:
    """Evaluate the waiting-gain condition over a (c, rho) grid."""
    c_grid = tuple(c_grid)
    rho_grid = tuple(rho_grid)
    if not c_grid or not rho_grid:
        raise ValueError("grids must be nonempty")
    if any(b <= a for a, b in zip(c_grid, c_grid[1:])) or any(
        b <= a for a, b in zip(rho_grid, rho_grid[1:])
    ):
        raise ValueError("grids must be strictly increasing")
    points = []
    for c in c_grid:
        for rho in rho_grid:
            lhs = condition_lhs(c, rho, p)
            points.append(RegionPoint(c=c, rho=rho, lhs=lhs, satisfied=lhs >= delta))
    return points


def write_region_csv(points: list[RegionPoint], path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["c", "rho", "lhs", "satisfied"])
        for pt in points:
            writer.writerow([pt.c, pt.rho, repr(pt.lhs), str(pt.satisfied).lower()])
    return path


def delta_half_bound(d: float) -> float:
    """Guaranteed density of vertex-disjoint augmenting paths at half time.

    Lower-bounds, per node, the expected number of disjoint three-edge
    augmenting paths available when matching once at n/2 and once at n
    on a sparse pool with mean degree d.
    """
    if d <= 0.0:
        raise ValueError(f"d must be positive, got {d}")
    return d * d * math.exp(-3.0 * d) * min(1.0, d / 2.0) ** 3 / 48.0


def residual_bound(p_h: float, t: int) -> float:
    """Upper bound on the expected unmatched count of greedy online
    matching after t arrivals when every mutual pair forms with
    probability p_h**2 (dense regime, constant p_h)."""
    if not 0.0 < p_h <= 1.0:
        raise ValueError(f"p_h must lie in (0, 1], got {p_h}")
    if t < 2:
        raise ValueError(f"t must be at least 2, got {t}")
    q = p_h * p_h
    return 1.0 + (1.0 - q - q * (t - 1) * (1.0 - q) ** t) / (q * q)


@dataclass(frozen=True)
class ResidualStats:
    """Observed unmatched count at time t next to its printed bound."""

    t: int
    z_t: float
    bound: float

    def __post_init__(self) -> None:
        if self.z_t < 0:
            raise ValueError(f"unmatched count must be nonnegative, got {self.z_t}")


def residual_stats(p_h: float, t: int, unmatched: float) -> ResidualStats:
    return ResidualStats(t=t, z_t=unmatched, bound=residual_bound(p_h, t))


# -- Erdos-Renyi estimators -------------------------------------------------

_TRIU_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _pair_index(n: int) -> tuple[np.ndarray, np.ndarray]:
    if n not in _TRIU_CACHE:
        iu = np.triu_indices(n, k=1)
        _TRIU_CACHE[n] = (iu[0].astype(np.int32), iu[1].astype(np.int32))
        if len(_TRIU_CACHE) > 8:
            _TRIU_CACHE.pop(next(iter(_TRIU_CACHE)))
    return _TRIU_CACHE[n]


def sample_er_edges(n: int, q: float, rng: np.random.Generator):
    """Edge list (two int arrays) of one G(n, q) draw."""
    if q <= 0.0:
        return np.empty(0, np.int32), np.empty(0, np.int32)
    rows, cols = _pair_index(n)
    mask = rng.random(rows.shape[0]) < q
    return rows[mask], cols[mask]


def matching_size_on_edges(n: int, us: np.ndarray, vs: np.ndarray) -> int:
    """Maximum-matching size on an edge list, via the shared solver kernel."""
    if us.size == 0:
        return 0
    deg = np.bincount(us, minlength=n) + np.bincount(vs, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int32)
    np.cumsum(deg, out=indptr[1:])
    indices = np.empty(indptr[-1], dtype=np.int32)
    pos = indptr[:-1].copy()
    for u, v in zip(us.tolist(), vs.tolist()):
        indices[pos[u]] = v
        pos[u] += 1
        indices[pos[v]] = u
        pos[v] += 1
    for u in range(n):
        indices[indptr[u] : indptr[u + 1]].sort()
    match = np.full(n, -1, dtype=np.int32)
    _kernel(n, indptr, indices, match)
    return int((match >= 0).sum()) // 2


def estimate_alpha(
    d: float, n: int, trials: int, seed: int
) -> tuple[float, float]:
    """Monte Carlo estimate of E[max matching]/n on G(n, d/n).

    Returns (mean fraction, standard error).  The fraction counts edges,
    so it lives in [0, 1/2] and increases with d.
    """
    if trials < 2:
        raise ValueError(f"need at least 2 trials, got {trials}")
    if d < 0:
        raise ValueError(f"d must be nonnegative, got {d}")
    fractions = np.empty(trials)
    for i in range(trials):
        rng = np.random.default_rng(derive_seed(seed, i))
        us, vs = sample_er_edges(n, d / n, rng)
        fractions[i] = matching_size_on_edges(n, us, vs) / n
    return float(fractions.mean()), float(fractions.std(ddof=1) / math.sqrt(trials))


def er_perfect_matching_rate(nu: int, xi: float, trials: int, seed: int) -> float:
    """Fraction of G(nu, xi) draws whose maximum matching is perfect."""
    if nu % 2:
        raise ValueError(f"nu must be even for a perfect matching, got {nu}")
    if trials < 1:
        raise ValueError(f"need at least 1 trial, got {trials}")
    hits = 0
    for i in range(trials):
        rng = np.random.default_rng(derive_seed(seed, i))
        us, vs = sample_er_edges(nu, xi, rng)
        if matching_size_on_edges(nu, us, vs) == nu // 2:
            hits += 1
    return hits / trials


# -- augmenting-path counters ------------------------------------------------


def _as_view(source) -> UndirectedView:
    return source.reduced_undirected() if isinstance(source, GraphState) else source


def count_simple_aug_paths(source, matching: Matching, z1, z2) -> int:
    """Count three-edge augmenting paths w1 - v1 - v2 - w2.

    The middle edge {v1, v2} is a matched pair inside z1; the outer
    nodes are distinct unmatched nodes from z2.  Each path is counted
    once as an edge set.
    """
    view = _as_view(source)
    z1s, z2s = set(z1), set(z2)
    covered = matching.nodes
    bad = [u for u in z1s if u not in covered]
    if bad:
        raise ValueError(f"z1 nodes must be matched, {bad[:3]} are not")
    bad = [u for u in z2s if u in covered]
    if bad:
        raise ValueError(f"z2 nodes must be unmatched, {bad[:3]} are not")
    total = 0
    for v1, v2 in matching.edges:
        if v1 not in z1s or v2 not in z1s:
            continue
        ends_a = {w for w in view.neighbors(v1) if w in z2s}
        ends_b = {w for w in view.neighbors(v2) if w in z2s}
        total += len(ends_a) * len(ends_b) - len(ends_a & ends_b)
    return total


def count_pi_paths(source, matching: Matching, arrival_order=None) -> int:
    """Count arrival-ordered augmenting patterns j' - i - M(i) - j.

    i is the later endpoint of its matched edge; j' arrived before i and
    is adjacent to i; j arrived after i and is adjacent to M(i); both j
    and j' are unmatched.
    """
    view = _as_view(source)
    covered = matching.nodes
    if arrival_order is not None:
        rank = arrival_order.__getitem__
    else:
        rank = lambda u: u  # pair ids are arrival times
    total = 0
    for a, b in matching.edges:
        i, mi = (a, b) if rank(a) > rank(b) else (b, a)
        early = sum(
            1
            for w in view.neighbors(i)
            if w not in covered and rank(w) < rank(i)
        )
        late = sum(
            1
            for w in view.neighbors(mi)
            if w not in covered and rank(w) > rank(i)
        )
        total += early * late
    return total
