"""Short directed cycles: enumeration and exact disjoint packing.

Cycles of length 2 or 3 are enumerated from out-adjacency only and kept
in canonical rotation (smallest id first).  Packing is exact branch and
bound over the cycle conflict structure with a coverable-nodes bound;
instances decompose into overlap components first.  Sparse-regime pools
carry only a handful of cycles per match run, so exactness is cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .matching import CapacityError
from .model import GraphState

Cycle = tuple[int, ...]

PACKING_CYCLE_CAP = 10_000
BRUTE_FORCE_CYCLE_CAP = 20


@dataclass(frozen=True)
class CycleSet:
    """Vertex-disjoint directed cycles selected by a packing run."""

    cycles: tuple[Cycle, ...]
    matched_nodes: int
    matched_h: int


def canonical(cycle: Sequence[int]) -> Cycle:
    """Rotate a directed cycle so the smallest id comes first."""
    k = min(range(len(cycle)), key=cycle.__getitem__)
    return tuple(cycle[k:]) + tuple(cycle[:k])


def enumerate_cycles(
    state: GraphState,
    max_len: int = 3,
    ignore_ll: bool = False,
    through: Iterable[int] | None = None,
) -> list[Cycle]:
    """All directed 2-cycles (and 3-cycles for max_len=3) among active pairs.

    ``ignore_ll`` drops every arc between two L nodes, so any cycle using
    L-to-L adjacency disappears (all-L cycles in particular).  ``through``
    restricts to cycles meeting the given nodes; callers may use it when
    they know older nodes cannot lie on a cycle, e.g. right after a full
    match run has cleared the pool.
    """
    if max_len not in (2, 3):
        raise ValueError(f"max_len must be 2 or 3, got {max_len}")
    out = state.out_arcs
    is_h = state.is_h
    active = state._active
    if through is None:
        sources = state.active_ids()
    else:
        sources = sorted(x for x in set(through) if active[x])

    def arc_ok(x: int, y: int) -> bool:
        return not ignore_ll or bool(is_h[x]) or bool(is_h[y])

    found: set[Cycle] = set()
    for c in sources:
        row_c = out.get(c, ())
        for u in row_c:
            if not active[u] or u == c or not arc_ok(c, u):
                continue
            if c in out[u] and arc_ok(u, c):
                found.add(canonical((c, u)))
            if max_len == 3:
                for v in out[u]:
                    if (
                        active[v]
                        and v != c
                        and v != u
                        and arc_ok(u, v)
                        and c in out[v]
                        and arc_ok(v, c)
                    ):
                        found.add(canonical((c, u, v)))
    return sorted(found)


def count_short_cycles(state: GraphState, k: int) -> int:
    """Exact count of directed cycles of length exactly k (k in {2, 3})."""
    if k not in (2, 3):
        raise ValueError(f"k must be 2 or 3, got {k}")
    return sum(1 for c in enumerate_cycles(state, max_len=k) if len(c) == k)


def cycle_h_count(cycle: Cycle, is_h) -> int:
    return sum(1 for u in cycle if is_h[u])


def _greedy_incumbent(cycles, weights, lex: bool):
    order = sorted(
        range(len(cycles)),
        key=lambda i: (-weights[i][0], -weights[i][1], cycles[i])
        if lex
        else (-weights[i][1], cycles[i]),
    )
    used: set[int] = set()
    chosen = []
    for i in order:
        if not used.intersection(cycles[i]):
            chosen.append(i)
            used.update(cycles[i])
    return chosen


def max_cycle_packing(
    cycles: Sequence[Sequence[int]],
    objective: str = "lex_h",
    is_h: Mapping[int, bool] | Sequence[bool] | None = None,
) -> CycleSet:
    """Exact maximum packing of vertex-disjoint cycles.

    ``objective`` is ``"lex_h"`` (maximize H nodes matched, then total
    nodes) or ``"total"`` (total nodes only).  Ties break toward the
    lexicographically first canonical cycle selection.
    """
    if objective not in ("lex_h", "total"):
        raise ValueError(f"unknown objective {objective!r}")
    if len(cycles) > PACKING_CYCLE_CAP:
        raise CapacityError(
            f"packing instance has {len(cycles)} cycles, cap is "
            f"{PACKING_CYCLE_CAP}; node budget exceeded"
        )
    if objective == "lex_h" and is_h is None:
        raise ValueError("lex_h objective requires node type flags")

    canon = sorted({canonical(c) for c in cycles})
    if not canon:
        return CycleSet(cycles=(), matched_nodes=0, matched_h=0)
    for c in canon:
        if len(c) not in (2, 3) or len(set(c)) != len(c):
            raise ValueError(f"not a simple 2- or 3-cycle: {c}")

    hflag = (lambda u: bool(is_h[u])) if is_h is not None else (lambda u: False)
    weights = [(sum(1 for u in c if hflag(u)), len(c)) for c in canon]
    lex = objective == "lex_h"

    hflags = {u: hflag(u) for c in canon for u in c}
    comps = _overlap_components(canon)
    picked: list[Cycle] = []
    for comp in comps:
        picked.extend(
            _solve_component(
                [canon[i] for i in comp], [weights[i] for i in comp], hflags, lex
            )
        )
    total = sum(len(c) for c in picked)
    total_h = sum(sum(1 for u in c if hflag(u)) for c in picked)
    return CycleSet(cycles=tuple(sorted(picked)), matched_nodes=total, matched_h=total_h)


def _overlap_components(canon: list[Cycle]) -> list[list[int]]:
    parent = list(range(len(canon)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    by_node: dict[int, int] = {}
    for i, c in enumerate(canon):
        for u in c:
            if u in by_node:
                ra, rb = find(by_node[u]), find(i)
                if ra != rb:
                    parent[rb] = ra
            else:
                by_node[u] = i
    groups: dict[int, list[int]] = {}
    for i in range(len(canon)):
        groups.setdefault(find(i), []).append(i)
    return [groups[r] for r in sorted(groups)]


def _solve_component(
    cycles: list[Cycle], weights, hflags: Mapping[int, bool], lex: bool
) -> list[Cycle]:
    ncyc = len(cycles)
    covers: dict[int, list[int]] = {}
    for i, c in enumerate(cycles):
        for u in c:
            covers.setdefault(u, []).append(i)
    node_order = sorted(covers)

    best_idx = _greedy_incumbent(cycles, weights, lex)
    best_val = _value(best_idx, weights, lex)

    avail = [True] * ncyc
    used: set[int] = set()
    chosen: list[int] = []

    def bound():
        cover: set[int] = set()
        for i in range(ncyc):
            if avail[i]:
                cover.update(cycles[i])
        cover -= used
        cur_h = sum(weights[i][0] for i in chosen)
        cur_t = sum(weights[i][1] for i in chosen)
        if lex:
            return (cur_h + sum(1 for u in cover if hflags[u]), cur_t + len(cover))
        return (cur_t + len(cover),)

    def rec() -> None:
        nonlocal best_idx, best_val
        if bound() <= best_val:
            return
        # Fail-first pivot: the uncovered node with fewest live cycles.
        pivot = -1
        pivot_opts: list[int] = []
        for u in node_order:
            if u in used:
                continue
            opts = [i for i in covers[u] if avail[i]]
            if not opts:
                continue
            if pivot < 0 or len(opts) < len(pivot_opts):
                pivot, pivot_opts = u, opts
                if len(opts) == 1:
                    break
        if pivot < 0:
            val = _value(chosen, weights, lex)
            if val > best_val:
                best_val = val
                best_idx = list(chosen)
            return
        for i in pivot_opts:
            newly = [i] if avail[i] else []
            avail[i] = False
            for u in cycles[i]:
                for j in covers[u]:
                    if avail[j]:
                        avail[j] = False
                        newly.append(j)
            chosen.append(i)
            used.update(cycles[i])
            rec()
            used.difference_update(cycles[i])
            chosen.pop()
            for j in newly:
                avail[j] = True
        # Or the pivot node stays unmatched: all its cycles drop out.
        blocked = []
        for i in pivot_opts:
            if avail[i]:
                avail[i] = False
                blocked.append(i)
        used.add(pivot)
        rec()
        used.discard(pivot)
        for i in blocked:
            avail[i] = True

    rec()
    return [cycles[i] for i in sorted(best_idx)]


def _value(idx, weights, lex: bool):
    h = sum(weights[i][0] for i in idx)
    t = sum(weights[i][1] for i in idx)
    return (h, t) if lex else (t,)


def brute_force_packing(
    cycles: Sequence[Sequence[int]],
    is_h: Mapping[int, bool] | Sequence[bool] | None = None,
) -> CycleSet:
    """Exhaustive optimum over all disjoint cycle subsets (<= 20 cycles)."""
    canon = sorted({canonical(c) for c in cycles})
    if len(canon) > BRUTE_FORCE_CYCLE_CAP:
        raise CapacityError(
            f"brute-force packing supports at most {BRUTE_FORCE_CYCLE_CAP} "
            f"cycles, got {len(canon)}"
        )
    best: list[Cycle] = []
    best_total = -1
    cur: list[Cycle] = []
    cur_nodes: set[int] = set()

    def rec(i: int) -> None:
        nonlocal best, best_total
        if i == len(canon):
            total = sum(len(c) for c in cur)
            if total > best_total:
                best_total = total
                best = list(cur)
            return
        c = canon[i]
        if not cur_nodes.intersection(c):
            cur.append(c)
            cur_nodes.update(c)
            rec(i + 1)
            cur.pop()
            cur_nodes.difference_update(c)
        rec(i + 1)

    rec(0)
    hflag = (lambda u: bool(is_h[u])) if is_h is not None else (lambda u: False)
    return CycleSet(
        cycles=tuple(sorted(best)),
        matched_nodes=sum(len(c) for c in best),
        matched_h=sum(sum(1 for u in c if hflag(u)) for c in best),
    )
