"""Shared test helpers."""

from __future__ import annotations

from multiprocessing import Pool

import pytest

from matchpool.model import UndirectedView


def make_view(edges, is_h=None) -> UndirectedView:
    """Build an UndirectedView from an edge list (tests only)."""
    adj: dict[int, list[int]] = {}
    for u, v in edges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    adj_t = {u: tuple(sorted(vs)) for u, vs in adj.items()}
    flags = {u: bool(is_h[u]) if is_h else False for u in adj_t}
    norm = tuple(sorted((min(u, v), max(u, v)) for u, v in edges))
    return UndirectedView(edges=norm, adj=adj_t, is_h=flags)


def pmap(fn, args, workers: int = 2):
    """Parallel map used by Monte Carlo heavy tests."""
    if workers <= 1 or len(args) <= 1:
        return [fn(a) for a in args]
    with Pool(processes=workers) as pool:
        return pool.map(fn, args, chunksize=1)


@pytest.fixture
def tmp_csv(tmp_path):
    return tmp_path / "out.csv"
