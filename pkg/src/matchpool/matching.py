"""Maximum-cardinality matching on general undirected graphs.

The solver is an augmenting-path search with blossom contraction over a
CSR adjacency, warm-started by a greedy pass.  Reduced pool views are
sparse, so practical cost sits far below the cubic worst case; the
kernel is written array-only so numba can JIT it when available (the
pure-Python path computes identical matchings).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import GraphState, UndirectedView


class CapacityError(ValueError):
    """Input exceeds the stated capacity of an exact oracle."""


@dataclass(frozen=True)
class Matching:
    """A set of disjoint edges, each stored as (min, max)."""

    edges: frozenset[tuple[int, int]]

    @property
    def size(self) -> int:
        return len(self.edges)

    @property
    def nodes(self) -> frozenset[int]:
        return frozenset(u for e in self.edges for u in e)

    def partner(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for u, v in self.edges:
            out[u] = v
            out[v] = u
        return out


def _max_matching_kernel(n, indptr, indices, match):
    """Blossom augmentation over CSR arrays; fills `match` in place.

    Vertices are 0..n-1; match[v] == -1 marks a free vertex.  Greedy
    initialization and ascending scan order make the result a pure
    function of the input arrays.
    """
    for v in range(n):
        if match[v] < 0:
            for k in range(indptr[v], indptr[v + 1]):
                u = indices[k]
                if match[u] < 0:
                    match[v] = u
                    match[u] = v
                    break
    parent = np.empty(n, dtype=np.int32)
    base = np.empty(n, dtype=np.int32)
    queue = np.empty(n, dtype=np.int32)
    in_queue = np.empty(n, dtype=np.bool_)
    in_blossom = np.empty(n, dtype=np.bool_)
    on_path = np.empty(n, dtype=np.bool_)

    for root in range(n):
        if match[root] >= 0:
            continue
        for i in range(n):
            parent[i] = -1
            base[i] = i
            in_queue[i] = False
        queue[0] = root
        in_queue[root] = True
        head = 0
        tail = 1
        finish = -1
        while head < tail and finish < 0:
            v = queue[head]
            head += 1
            for k in range(indptr[v], indptr[v + 1]):
                u = indices[k]
                if base[u] == base[v] or match[v] == u:
                    continue
                if u == root or (match[u] >= 0 and parent[match[u]] >= 0):
                    # Odd cycle: contract the blossom around the LCA.
                    for i in range(n):
                        on_path[i] = False
                    a = base[v]
                    while True:
                        on_path[a] = True
                        if match[a] < 0:
                            break
                        a = base[parent[match[a]]]
                    lca = base[u]
                    while not on_path[lca]:
                        lca = base[parent[match[lca]]]
                    for i in range(n):
                        in_blossom[i] = False
                    # Mark both branch paths down to the LCA.
                    x = v
                    child = u
                    for _branch in range(2):
                        while base[x] != lca:
                            mx = match[x]
                            in_blossom[base[x]] = True
                            in_blossom[base[mx]] = True
                            parent[x] = child
                            child = mx
                            x = parent[mx]
                        x = u
                        child = v
                    for i in range(n):
                        if in_blossom[base[i]]:
                            base[i] = lca
                            if not in_queue[i]:
                                in_queue[i] = True
                                queue[tail] = i
                                tail += 1
                elif parent[u] < 0:
                    parent[u] = v
                    if match[u] < 0:
                        finish = u
                        break
                    w = match[u]
                    if not in_queue[w]:
                        in_queue[w] = True
                        queue[tail] = w
                        tail += 1
        if finish >= 0:
            # Flip matched/unmatched along the alternating path.
            u = finish
            while u >= 0:
                v = parent[u]
                w = match[v]
                match[v] = u
                match[u] = v
                u = w
    return match


_kernel = _max_matching_kernel
try:  # pragma: no cover - exercised when numba is installed
    import numba

    _kernel = numba.njit(cache=True)(_max_matching_kernel)
except Exception:  # pragma: no cover
    pass


def _view_to_csr(view: UndirectedView):
    nodes = sorted(view.adj.keys())
    index = {u: i for i, u in enumerate(nodes)}
    n = len(nodes)
    indptr = np.zeros(n + 1, dtype=np.int32)
    for i, u in enumerate(nodes):
        indptr[i + 1] = indptr[i] + len(view.adj[u])
    indices = np.empty(indptr[-1], dtype=np.int32)
    pos = indptr[:-1].copy()
    for i, u in enumerate(nodes):
        row = [index[v] for v in view.adj[u]]
        row.sort()
        indices[pos[i] : pos[i] + len(row)] = row
    return nodes, indptr, indices


def max_matching(view: UndirectedView) -> Matching:
    """Exact maximum-cardinality matching of an undirected view."""
    if not view.edges:
        return Matching(frozenset())
    nodes, indptr, indices = _view_to_csr(view)
    match = np.full(len(nodes), -1, dtype=np.int32)
    _kernel(len(nodes), indptr, indices, match)
    edges = set()
    for i, m in enumerate(match):
        if m >= 0 and i < m:
            u, v = nodes[i], nodes[int(m)]
            edges.add((min(u, v), max(u, v)))
    return Matching(frozenset(edges))


BRUTE_FORCE_NODE_CAP = 24


def brute_force_matching(view: UndirectedView) -> Matching:
    """Exhaustive maximum matching; capped at 24 nodes."""
    nodes = sorted(view.adj.keys())
    if len(nodes) > BRUTE_FORCE_NODE_CAP:
        raise CapacityError(
            f"brute-force matching supports at most {BRUTE_FORCE_NODE_CAP} "
            f"nodes, got {len(nodes)}"
        )
    order = {u: i for i, u in enumerate(nodes)}
    used = [False] * len(nodes)
    best_edges: list[tuple[int, int]] = []
    cur: list[tuple[int, int]] = []

    def rec(i: int) -> None:
        nonlocal best_edges
        # Bound: even matching every remaining vertex cannot beat best.
        if len(cur) + (len(nodes) - i) // 2 <= len(best_edges):
            return
        if i == len(nodes):
            if len(cur) > len(best_edges):
                best_edges = list(cur)
            return
        if used[i]:
            rec(i + 1)
            return
        u = nodes[i]
        for v in view.adj[u]:
            j = order[v]
            if j > i and not used[j]:
                used[j] = True
                cur.append((u, v))
                rec(i + 1)
                cur.pop()
                used[j] = False
        rec(i + 1)

    rec(0)
    return Matching(frozenset((min(u, v), max(u, v)) for u, v in best_edges))


def find_augmenting_path(view: UndirectedView, matching: Matching) -> bool:
    """True when an augmenting path exists for `matching` in `view`.

    Independent maximality check: rerunning the blossom search seeded
    with `matching` must not grow it.
    """
    nodes, indptr, indices = _view_to_csr(view)
    index = {u: i for i, u in enumerate(nodes)}
    match = np.full(len(nodes), -1, dtype=np.int32)
    for u, v in matching.edges:
        match[index[u]] = index[v]
        match[index[v]] = index[u]
    before = int((match >= 0).sum())
    grown = _max_matching_kernel(len(nodes), indptr, indices, match.copy())
    return int((grown >= 0).sum()) > before


def two_stage_matching(state: GraphState | UndirectedView) -> Matching:
    """Match on H-L edges first, then on the leftover L-L subgraph."""
    view = state.reduced_undirected() if isinstance(state, GraphState) else state
    hl_edges = [e for e in view.edges if view.is_h[e[0]] != view.is_h[e[1]]]
    stage1 = max_matching(_subview(view, hl_edges))
    taken = stage1.nodes
    ll_edges = [
        e
        for e in view.edges
        if not view.is_h[e[0]]
        and not view.is_h[e[1]]
        and e[0] not in taken
        and e[1] not in taken
    ]
    stage2 = max_matching(_subview(view, ll_edges))
    return Matching(stage1.edges | stage2.edges)


def _subview(view: UndirectedView, edges: list[tuple[int, int]]) -> UndirectedView:
    adj: dict[int, list[int]] = {}
    for u, v in edges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    adj_t = {u: tuple(sorted(vs)) for u, vs in adj.items()}
    is_h = {u: view.is_h[u] for u in adj_t}
    return UndirectedView(edges=tuple(sorted(edges)), adj=adj_t, is_h=is_h)


def count_unmatched_by_type(state: GraphState, matching: Matching) -> tuple[int, int]:
    """(unmatched_H, unmatched_L) among the active pairs of `state`."""
    covered = matching.nodes
    for u in covered:
        if not state.is_active(u):
            raise ValueError(f"matched node {u} is not active in this pool")
    un_h = un_l = 0
    for u in state.active_ids():
        if u in covered:
            continue
        if state.is_h[u]:
            un_h += 1
        else:
            un_l += 1
    return un_h, un_l
