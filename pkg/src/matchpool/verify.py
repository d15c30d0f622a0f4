"""Self-check suites: exact solvers against exhaustive oracles.

Backs the ``matchpool verify`` subcommand.  Each suite draws small
random instances from an independent generator (numpy's, not the
simulator's keyed stream) and compares the production solver with a
brute-force oracle.
"""

from __future__ import annotations

import itertools
from typing import Callable

import numpy as np

from .analysis import count_pi_paths, count_simple_aug_paths
from .cycles import brute_force_packing, canonical, max_cycle_packing
from .matching import (
    Matching,
    brute_force_matching,
    find_augmenting_path,
    max_matching,
    two_stage_matching,
)
from .model import UndirectedView


def view_from_edges(edges, is_h=None) -> UndirectedView:
    adj: dict[int, list[int]] = {}
    for u, v in edges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    adj_t = {u: tuple(sorted(vs)) for u, vs in adj.items()}
    flags = {u: bool(is_h[u]) if is_h is not None else False for u in adj_t}
    norm = tuple(sorted((min(u, v), max(u, v)) for u, v in edges))
    return UndirectedView(edges=norm, adj=adj_t, is_h=flags)


def random_view(rng: np.random.Generator, max_nodes: int = 10, edge_p: float = 0.4):
    n = int(rng.integers(2, max_nodes + 1))
    edges = [
        (u, v)
        for u in range(n)
        for v in range(u + 1, n)
        if rng.random() < edge_p
    ]
    is_h = {u: bool(rng.random() < 0.5) for u in range(n)}
    return view_from_edges(edges, is_h), n


def random_digraph_cycles(rng: np.random.Generator, max_nodes: int = 12,
                          arc_p: float = 0.15):
    n = int(rng.integers(3, max_nodes + 1))
    arcs = {
        (u, v)
        for u in range(n)
        for v in range(n)
        if u != v and rng.random() < arc_p
    }
    cycles = set()
    for u, v in arcs:
        if u < v and (v, u) in arcs:
            cycles.add(canonical((u, v)))
    for u, v, w in itertools.permutations(range(n), 3):
        if u == min(u, v, w) and (u, v) in arcs and (v, w) in arcs and (w, u) in arcs:
            cycles.add(canonical((u, v, w)))
    is_h = {u: bool(rng.random() < 0.5) for u in range(n)}
    return sorted(cycles), is_h


def check_matching_oracle(instances: int = 200, seed: int = 2024) -> bool:
    rng = np.random.default_rng(seed)
    for _ in range(instances):
        view, _ = random_view(rng)
        if max_matching(view).size != brute_force_matching(view).size:
            return False
    return True


def check_matching_maximality(instances: int = 100, seed: int = 2025) -> bool:
    rng = np.random.default_rng(seed)
    for _ in range(instances):
        view, _ = random_view(rng, max_nodes=20, edge_p=0.25)
        if not view.edges:
            continue
        if find_augmenting_path(view, max_matching(view)):
            return False
    return True


def check_packing_oracle(instances: int = 100, seed: int = 2026) -> bool:
    rng = np.random.default_rng(seed)
    done = 0
    while done < instances:
        cycles, is_h = random_digraph_cycles(rng)
        if len(cycles) > 20:
            continue
        done += 1
        exact = max_cycle_packing(cycles, objective="total", is_h=is_h)
        oracle = brute_force_packing(cycles, is_h=is_h)
        if exact.matched_nodes != oracle.matched_nodes:
            return False
        lex = max_cycle_packing(cycles, objective="lex_h", is_h=is_h)
        if lex.matched_h < exact.matched_h:
            return False
    return True


def check_two_stage_bound(instances: int = 100, seed: int = 2027) -> bool:
    rng = np.random.default_rng(seed)
    for _ in range(instances):
        view, _ = random_view(rng, max_nodes=12, edge_p=0.35)
        if two_stage_matching(view).size > max_matching(view).size:
            return False
    return True


def _brute_simple_paths(view, matching, z1, z2, all_nodes) -> int:
    edge_set = view.edge_set
    matched = matching.edges
    total = 0
    for w1, v1, v2, w2 in itertools.permutations(sorted(all_nodes), 4):
        if v1 > v2:  # count each three-edge path once
            continue
        if (v1, v2) not in matched:
            continue
        if v1 not in z1 or v2 not in z1 or w1 not in z2 or w2 not in z2:
            continue
        e1 = (min(w1, v1), max(w1, v1))
        e2 = (min(v2, w2), max(v2, w2))
        if e1 in edge_set and e2 in edge_set:
            total += 1
    return total


def _brute_pi_paths(view, matching, rank, all_nodes) -> int:
    edge_set = view.edge_set
    matched = matching.edges
    covered = matching.nodes
    total = 0
    for i, ip, jp, j in itertools.permutations(sorted(all_nodes), 4):
        if (min(i, ip), max(i, ip)) not in matched:
            continue
        if jp in covered or j in covered:
            continue
        if not (rank(ip) < rank(i) and rank(jp) < rank(i) < rank(j)):
            continue
        if (min(jp, i), max(jp, i)) in edge_set and (
            min(ip, j), max(ip, j)) in edge_set:
            total += 1
    return total


def check_path_counters(instances: int = 100, seed: int = 2028) -> bool:
    rng = np.random.default_rng(seed)
    for _ in range(instances):
        view, n = random_view(rng, max_nodes=12, edge_p=0.35)
        if not view.edges:
            continue
        matching = max_matching(view)
        covered = matching.nodes
        nodes = set(range(n))
        z1 = set(covered)
        z2 = nodes - covered
        fast = count_simple_aug_paths(view, matching, z1, z2)
        slow = _brute_simple_paths(view, matching, z1, z2, nodes)
        if fast != slow:
            return False
        if count_pi_paths(view, matching) != _brute_pi_paths(
            view, matching, lambda u: u, nodes
        ):
            return False
    return True


SUITES: tuple[tuple[str, Callable[[], bool]], ...] = (
    ("matching vs exhaustive oracle", check_matching_oracle),
    ("matching leaves no augmenting path", check_matching_maximality),
    ("cycle packing vs exhaustive oracle", check_packing_oracle),
    ("two-stage never exceeds the maximum", check_two_stage_bound),
    ("path counters vs exhaustive enumeration", check_path_counters),
)


def run_all(verbose: bool = True) -> bool:
    ok = True
    for name, fn in SUITES:
        passed = fn()
        ok = ok and passed
        if verbose:
            print(f"{'PASS' if passed else 'FAIL'}  {name}")
    return ok
