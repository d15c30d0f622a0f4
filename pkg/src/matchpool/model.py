"""Dynamic random compatibility pool.

Pairs arrive one per period.  An arriving node is hard-to-match (H) with
probability ``rho``, otherwise easy-to-match (L).  Every directed arc
``u -> v`` between present nodes exists independently with probability
``p_H = c * n**(sigma-1)`` when ``v`` is H and ``p_L = p`` when ``v`` is
L.  Altruistic donors (and, later, the bridge donor of a running chain)
are donor-only: they form outgoing arcs but never receive any.

Arcs are sampled lazily, only between the arriving node and nodes that
can still participate (active pairs plus donor-only sources).  Because
each potential arc is keyed deterministically (see :mod:`matchpool.rng`),
this is indistinguishable from sampling the full graph up front, and
:func:`final_pool_view` can materialize the complete end-of-horizon
graph of the very same realization.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .rng import (
    MAX_ID,
    arc_key,
    arc_keys_from,
    arc_keys_into,
    key_uniform,
    key_uniform_array,
    type_key,
)


class ModelError(ValueError):
    """Invalid model parameters."""


class StateError(RuntimeError):
    """Operation applied to a pool in an incompatible state."""


class NodeType(enum.Enum):
    H = "H"
    L = "L"


@dataclass(frozen=True)
class ModelParams:
    """Generative parameters of the arrival process.

    n         total number of arriving pairs
    rho       probability that an arrival is type H
    c         intensity of arcs into H nodes; p_H = c * n**(sigma-1)
    p         probability of an arc into an L node
    sigma     density exponent in [0, 1); sigma=0 is the base sparse regime
    ndd_count altruistic donors present at time 0 (0 or 1)
    """

    n: int
    rho: float
    c: float
    p: float
    sigma: float = 0.0
    ndd_count: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 1:
            raise ModelError(f"n must be a positive integer, got {self.n!r}")
        if self.n > MAX_ID - 1:
            raise ModelError(f"n must be <= {MAX_ID - 1}, got {self.n}")
        if not 0.0 <= self.rho <= 1.0:
            raise ModelError(f"rho must lie in [0, 1], got {self.rho}")
        if self.c < 0.0:
            raise ModelError(f"c must be nonnegative, got {self.c}")
        if not 0.0 < self.p <= 1.0:
            raise ModelError(f"p must lie in (0, 1], got {self.p}")
        if not 0.0 <= self.sigma < 1.0:
            raise ModelError(f"sigma must lie in [0, 1), got {self.sigma}")
        if self.ndd_count not in (0, 1):
            raise ModelError(f"ndd_count must be 0 or 1, got {self.ndd_count}")
        if self.p_h > 1.0:
            raise ModelError(
                f"derived p_H = c * n**(sigma-1) = {self.p_h:.6g} exceeds 1 "
                f"(c={self.c}, n={self.n}, sigma={self.sigma})"
            )

    @property
    def p_h(self) -> float:
        return self.c * self.n ** (self.sigma - 1.0)

    @property
    def p_l(self) -> float:
        return self.p


@dataclass(frozen=True)
class UndirectedView:
    """Mutual-arc (2-cycle) view over the active pairs of a pool.

    ``edges`` holds each unordered pair once as ``(min, max)``; ``adj``
    maps every endpoint to its sorted neighbor list.  ``is_h`` carries
    the type flag for every node appearing in an edge.
    """

    edges: tuple[tuple[int, int], ...]
    adj: dict[int, tuple[int, ...]]
    is_h: dict[int, bool]

    @property
    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges)

    def label(self, u: int, v: int) -> str:
        a = "H" if self.is_h[u] else "L"
        b = "H" if self.is_h[v] else "L"
        return "-".join(sorted((a, b)))

    def neighbors(self, u: int) -> tuple[int, ...]:
        return self.adj.get(u, ())


# Per-arrival script entry for explicit test fixtures: node type plus the
# exact arc endpoints to create, overriding sampling.
@dataclass(frozen=True)
class ArrivalScript:
    is_h: bool
    in_from: frozenset[int] = field(default_factory=frozenset)
    out_to: frozenset[int] = field(default_factory=frozenset)


def script_from_arcs(
    types: list[NodeType | str], arcs: list[tuple[int, int]]
) -> list[ArrivalScript]:
    """Build an arrival script from node types (id 1..m) and directed arcs.

    Each arc materializes when its later endpoint arrives; arcs out of
    node 0 are donor arcs from an NDD/bridge donor.
    """
    m = len(types)
    entries = []
    for t in range(1, m + 1):
        inc = frozenset(u for (u, v) in arcs if v == t and u < t)
        out = frozenset(v for (u, v) in arcs if u == t and 0 < v < t)
        kind = types[t - 1]
        is_h = (kind is NodeType.H) if isinstance(kind, NodeType) else kind == "H"
        entries.append(ArrivalScript(is_h=is_h, in_from=inc, out_to=out))
    return entries


class GraphState:
    """Mutable pool state: arrivals, directed arcs, and the mutual view.

    A state is confined to one logical thread.  Pair ids are 1..n in
    arrival order regardless of ndd_count; the altruistic donor, when
    present, has id 0 and arrival time 0.
    """

    def __init__(
        self,
        params: ModelParams,
        seed: int,
        track_arcs: bool = True,
        script: list[ArrivalScript] | None = None,
    ):
        self.params = params
        self.seed = int(seed) & ((1 << 64) - 1)
        self.track_arcs = track_arcs
        self._script = script
        n = params.n
        self.arrived = 0
        self.is_h = np.zeros(n + 1, dtype=bool)
        self._active = np.zeros(n + 1, dtype=bool)
        # Aligned arrays over currently active pairs: ids and the
        # probability that a future node's outgoing arc reaches them.
        self._act_ids = np.empty(0, dtype=np.uint64)
        self._act_prob = np.empty(0, dtype=np.float64)
        self._removed_pending: list[int] = []
        self.mutual: dict[int, set[int]] = {}
        self.out_arcs: dict[int, set[int]] = {} if track_arcs else {}
        self.ndd_ids: frozenset[int] = frozenset({0} if params.ndd_count else ())
        self.donor_sources: list[int] = sorted(self.ndd_ids)
        self.pool_h = 0
        self.pool_l = 0
        if track_arcs:
            for d in self.donor_sources:
                self.out_arcs[d] = set()

    # -- queries ---------------------------------------------------------

    def is_active(self, node_id: int) -> bool:
        return bool(self._active[node_id])

    @property
    def pool_size(self) -> int:
        return self.pool_h + self.pool_l

    def active_ids(self) -> list[int]:
        self._flush_removals()
        return [int(i) for i in self._act_ids]

    def type_of(self, node_id: int) -> NodeType:
        return NodeType.H if self.is_h[node_id] else NodeType.L

    def out_neighbors(self, node_id: int) -> set[int]:
        if not self.track_arcs:
            raise StateError("directed arcs are not tracked for this pool")
        return self.out_arcs.get(node_id, set())

    # -- arrival ---------------------------------------------------------

    def arrive(self) -> tuple[int, list[tuple[int, int]]]:
        """Sample the next arrival; returns (node_id, new arcs)."""
        if self.arrived >= self.params.n:
            raise StateError(f"all {self.params.n} pairs have already arrived")
        self._flush_removals()
        t = self.arrived + 1
        self.arrived = t
        params = self.params

        if self._script is not None:
            entry = self._script[t - 1]
            new_h = entry.is_h
            in_ids = [u for u in sorted(entry.in_from) if self._present_source(u)]
            out_ids = [v for v in sorted(entry.out_to) if self._active[v]]
        else:
            new_h = key_uniform(self.seed, type_key(t)) < params.rho
            p_in = params.p_h if new_h else params.p_l
            act = self._act_ids
            if act.size:
                u_in = key_uniform_array(self.seed, arc_keys_into(act, t))
                u_out = key_uniform_array(self.seed, arc_keys_from(t, act))
                in_ids = act[u_in < p_in].tolist()
                out_ids = act[u_out < self._act_prob].tolist()
            else:
                in_ids, out_ids = [], []
            for d in self.donor_sources:
                if key_uniform(self.seed, arc_key(d, t)) < p_in:
                    in_ids.append(d)

        self.is_h[t] = new_h
        self._register_active(t, new_h)
        new_arcs = [(u, t) for u in in_ids] + [(t, v) for v in out_ids]

        if self.track_arcs:
            self.out_arcs[t] = set(out_ids)
            for u in in_ids:
                self.out_arcs[u].add(t)

        # Mutual pairs (2-cycles) among active partners only.
        in_pairs = set(u for u in in_ids if u not in self.donor_sources)
        both = in_pairs.intersection(out_ids)
        if both:
            mt = self.mutual[t]
            for u in both:
                mt.add(u)
                self.mutual[u].add(t)
        return t, new_arcs

    def _present_source(self, u: int) -> bool:
        return bool(self._active[u]) or u in self.donor_sources

    def _register_active(self, node_id: int, is_h: bool) -> None:
        self._active[node_id] = True
        self.mutual[node_id] = set()
        p_future = self.params.p_h if is_h else self.params.p_l
        self._act_ids = np.append(self._act_ids, np.uint64(node_id))
        self._act_prob = np.append(self._act_prob, p_future)
        if is_h:
            self.pool_h += 1
        else:
            self.pool_l += 1

    def _flush_removals(self) -> None:
        if self._removed_pending:
            gone = np.asarray(self._removed_pending, dtype=np.uint64)
            keep = ~np.isin(self._act_ids, gone)
            self._act_ids = self._act_ids[keep]
            self._act_prob = self._act_prob[keep]
            self._removed_pending.clear()

    # -- removal / donor bookkeeping --------------------------------------

    def remove_matched(self, node_ids) -> None:
        """Flag matched pairs inactive; idempotent removal is an error."""
        ids = list(node_ids)
        for i in ids:
            if not self._active[i]:
                raise StateError(f"node {i} is not active and cannot be removed")
        for i in ids:
            self._deactivate(i)

    def _deactivate(self, i: int) -> None:
        self._active[i] = False
        self._removed_pending.append(i)
        for u in self.mutual.pop(i, ()):
            self.mutual[u].discard(i)
        if self.is_h[i]:
            self.pool_h -= 1
        else:
            self.pool_l -= 1

    def promote_to_donor(self, node_id: int) -> None:
        """Turn an active pair into a donor-only source (chain bridge)."""
        if not self._active[node_id]:
            raise StateError(f"node {node_id} is not active")
        self._deactivate(node_id)
        self.donor_sources.append(node_id)
        self.donor_sources.sort()
        if self.track_arcs and node_id not in self.out_arcs:
            self.out_arcs[node_id] = set()

    def consume_donor(self, node_id: int) -> None:
        """Retire a donor-only source whose donor has now given."""
        if node_id not in self.donor_sources:
            raise StateError(f"node {node_id} is not a donor source")
        self.donor_sources.remove(node_id)

    # -- views -------------------------------------------------------------

    def reduced_undirected(self, exclude_ll: bool = False) -> UndirectedView:
        """Undirected view of mutual arc pairs among active nodes."""
        edges = []
        adj: dict[int, list[int]] = {}
        is_h = self.is_h
        for u, nbrs in self.mutual.items():
            if not nbrs:
                continue
            u_h = bool(is_h[u])
            for v in nbrs:
                if v < u:
                    continue
                if exclude_ll and not u_h and not is_h[v]:
                    continue
                edges.append((u, v))
                adj.setdefault(u, []).append(v)
                adj.setdefault(v, []).append(u)
        edges.sort()
        adj_t = {u: tuple(sorted(vs)) for u, vs in adj.items()}
        types = {u: bool(is_h[u]) for u in adj_t}
        return UndirectedView(edges=tuple(edges), adj=adj_t, is_h=types)


def new_pool(params: ModelParams, seed: int) -> GraphState:
    """Fresh pool with a deterministic stream (NDDs preplaced at t=0)."""
    return GraphState(params, seed)


def final_pool_view(
    params: ModelParams, seed: int, exclude_ll: bool = False
) -> UndirectedView:
    """Mutual-pair view of the full end-of-horizon graph (no removals).

    Materializes every potential mutual pair of the realization named by
    ``seed``, so it equals the union graph a dynamic run over the same
    stream would have produced had nothing ever been removed.
    """
    n = params.n
    seed = int(seed) & ((1 << 64) - 1)
    ids = np.arange(1, n + 1, dtype=np.uint64)
    types = key_uniform_array(seed, ids) < params.rho
    prob = np.where(types, params.p_h, params.p_l)
    edges = []
    eadj: dict[int, list[int]] = {}
    for v in range(2, n + 1):
        older = ids[: v - 1]
        p_in = params.p_h if types[v - 1] else params.p_l
        mask = (key_uniform_array(seed, arc_keys_into(older, v)) < p_in) & (
            key_uniform_array(seed, arc_keys_from(v, older)) < prob[: v - 1]
        )
        if exclude_ll and not types[v - 1]:
            mask &= types[: v - 1]
        for u in older[mask].tolist():
            edges.append((u, v))
            eadj.setdefault(u, []).append(v)
            eadj.setdefault(v, []).append(u)
    adj_t = {u: tuple(sorted(vs)) for u, vs in eadj.items()}
    is_h = {u: bool(types[u - 1]) for u in adj_t}
    return UndirectedView(edges=tuple(sorted(edges)), adj=adj_t, is_h=is_h)


def final_pool_arcs(
    params: ModelParams, seed: int, arcs: bool = True
) -> tuple[np.ndarray, dict[int, set[int]]]:
    """Types and directed out-adjacency of the full final graph.

    With ``arcs=False`` the adjacency sets are still built (they are the
    basis for the mutual view) but donor arcs are skipped.
    """
    n = params.n
    seed = int(seed) & ((1 << 64) - 1)
    ids = np.arange(1, n + 1, dtype=np.uint64)
    types = key_uniform_array(seed, ids) < params.rho
    prob = np.where(types, params.p_h, params.p_l)
    out: dict[int, set[int]] = {u: set() for u in range(1, n + 1)}
    for v in range(2, n + 1):
        older = ids[: v - 1]
        u_in = key_uniform_array(seed, arc_keys_into(older, v))
        u_out = key_uniform_array(seed, arc_keys_from(v, older))
        p_in = params.p_h if types[v - 1] else params.p_l
        for u in older[u_in < p_in].tolist():
            out[u].add(v)
        out[v].update(older[u_out < prob[: v - 1]].tolist())
    if arcs and params.ndd_count:
        out[0] = set()
        for v in range(1, n + 1):
            p_in = params.p_h if types[v - 1] else params.p_l
            if key_uniform(seed, arc_key(0, v)) < p_in:
                out[0].add(v)
    full_types = np.zeros(n + 1, dtype=bool)
    full_types[1:] = types
    return full_types, out


def mean_undirected_edges(params: ModelParams) -> float:
    """Expected mutual-pair count of the full graph (closed form)."""
    n, rho = params.n, params.rho
    ph, pl = params.p_h, params.p_l
    pairs = n * (n - 1) / 2.0
    return pairs * (
        rho * rho * ph * ph
        + 2 * rho * (1 - rho) * ph * pl
        + (1 - rho) * (1 - rho) * pl * pl
    )
