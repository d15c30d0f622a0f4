"""Dynamic matching policies over the arrival process.

Chunk matching CM(S_H, S_L): after every S_H arrivals, run a maximum
matching on the reduced graph ignoring L-L edges and remove the matched
pairs; after every S_L arrivals (S_H divides S_L), run it again on the
whole reduced graph.  The 3-way variant packs directed cycles of length
up to 3 instead, preferring H nodes in the first phase.  The online
chain schemes match each arrival through a short cycle or extend a
single non-simultaneous chain seeded by an altruistic donor.

Chunk sizes need not divide n: both phases always run once more at the
horizon end so no pending chunk is left unmatched.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .cycles import cycle_h_count, enumerate_cycles, max_cycle_packing
from .matching import max_matching
from .model import ArrivalScript, GraphState, ModelParams

CHAIN_PATH_BUDGET = 100_000

SCHEME_CM2 = "CM2"
SCHEME_CM3 = "CM3"
SCHEME_CHAIN = "CHAIN"


class SpecError(ValueError):
    """Invalid policy specification."""


class InvariantViolation(AssertionError):
    """A residual-pool invariant failed during a checked run."""


@dataclass(frozen=True)
class PolicySpec:
    """Which scheme to run and its waiting parameters."""

    scheme: str
    s_h: int = 1
    s_l: int = 1
    k: int = 2
    with_chain: bool = False

    def validate(self, n: int) -> None:
        if self.scheme not in (SCHEME_CM2, SCHEME_CM3, SCHEME_CHAIN):
            raise SpecError(f"unknown scheme {self.scheme!r}")
        if self.scheme == SCHEME_CHAIN:
            if self.k not in (2, 3):
                raise SpecError(f"chain scheme needs k in {{2, 3}}, got {self.k}")
            return
        if not (1 <= self.s_h <= self.s_l <= n):
            raise SpecError(
                f"need 1 <= S_H <= S_L <= n, got S_H={self.s_h}, S_L={self.s_l}, n={n}"
            )
        if self.s_l % self.s_h:
            raise SpecError(f"S_H={self.s_h} must divide S_L={self.s_l}")

    def label(self) -> str:
        if self.scheme == SCHEME_CHAIN:
            return f"O{self.k}{'c' if self.with_chain else ''}"
        return f"{self.scheme}({self.s_h},{self.s_l})"


@dataclass
class ChainState:
    """Bookkeeping for the single running chain."""

    bridge_donor: int | None = None
    segments_executed: list[tuple[int, ...]] = field(default_factory=list)
    total_chain_matched: int = 0


@dataclass
class TrialTrace:
    """Per-period tallies and final counts of one simulated run.

    ``series`` rows are (t, matched_total, matched_h, matched_l,
    pool_size); t equals the number of pairs arrived.  NDDs are never
    counted as matched and never counted in the pool.
    """

    n: int
    scheme: str
    s_h: int
    s_l: int
    k: int
    with_chain: bool
    seed: int
    matched_total: int = 0
    matched_h: int = 0
    matched_l: int = 0
    series: list[tuple[int, int, int, int, int]] = field(default_factory=list)
    chain: ChainState | None = None


def run_policy(
    params: ModelParams,
    spec: PolicySpec,
    seed: int,
    record_series: bool = True,
    check_invariants: bool = False,
    script: list[ArrivalScript] | None = None,
) -> TrialTrace:
    """Run one trial of `spec` on the realization named by `seed`."""
    spec.validate(params.n)
    if spec.scheme == SCHEME_CM2:
        return run_cm2(params, spec, seed, record_series=record_series,
                       check_invariants=check_invariants, script=script)
    if spec.scheme == SCHEME_CM3:
        return run_cm3(params, spec, seed, record_series=record_series,
                       check_invariants=check_invariants, script=script)
    return run_online_chain(params, spec.k, spec.with_chain, seed,
                            record_series=record_series,
                            check_invariants=check_invariants, script=script)


def _tally_removed(state: GraphState, ids) -> tuple[int, int]:
    h = sum(1 for i in ids if state.is_h[i])
    return h, len(ids) - h


def _match_and_remove(state: GraphState, exclude_ll: bool) -> tuple[int, int]:
    view = state.reduced_undirected(exclude_ll=exclude_ll)
    if not view.edges:
        return 0, 0
    matched = max_matching(view)
    ids = sorted(matched.nodes)
    state.remove_matched(ids)
    return _tally_removed(state, ids)


def run_cm2(
    params: ModelParams,
    spec: PolicySpec,
    seed: int,
    record_series: bool = True,
    check_invariants: bool = False,
    script: list[ArrivalScript] | None = None,
) -> TrialTrace:
    if spec.scheme != SCHEME_CM2:
        raise SpecError(f"run_cm2 got scheme {spec.scheme!r}")
    spec.validate(params.n)
    params = replace(params, ndd_count=0)
    state = GraphState(params, seed, track_arcs=False, script=script)
    trace = TrialTrace(n=params.n, scheme=spec.scheme, s_h=spec.s_h, s_l=spec.s_l,
                       k=2, with_chain=False, seed=int(seed))
    n = params.n
    for t in range(1, n + 1):
        state.arrive()
        if t % spec.s_h == 0 or t == n:
            dh, dl = _match_and_remove(state, exclude_ll=True)
            trace.matched_h += dh
            trace.matched_l += dl
        if t % spec.s_l == 0 or t == n:
            dh, dl = _match_and_remove(state, exclude_ll=False)
            trace.matched_h += dh
            trace.matched_l += dl
            if check_invariants and any(state.mutual.values()):
                raise InvariantViolation(
                    f"reduced view has an edge after the full match run at t={t}"
                )
        trace.matched_total = trace.matched_h + trace.matched_l
        if record_series:
            trace.series.append(
                (t, trace.matched_total, trace.matched_h, trace.matched_l,
                 state.pool_size)
            )
    return trace


def _pack_and_remove(
    state: GraphState, ignore_ll: bool, objective: str, through
) -> tuple[int, int]:
    cycles = enumerate_cycles(state, max_len=3, ignore_ll=ignore_ll, through=through)
    if not cycles:
        return 0, 0
    packed = max_cycle_packing(cycles, objective=objective, is_h=state.is_h)
    ids = sorted(u for c in packed.cycles for u in c)
    state.remove_matched(ids)
    return _tally_removed(state, ids)


def run_cm3(
    params: ModelParams,
    spec: PolicySpec,
    seed: int,
    record_series: bool = True,
    check_invariants: bool = False,
    script: list[ArrivalScript] | None = None,
) -> TrialTrace:
    if spec.scheme != SCHEME_CM3:
        raise SpecError(f"run_cm3 got scheme {spec.scheme!r}")
    spec.validate(params.n)
    params = replace(params, ndd_count=0)
    state = GraphState(params, seed, track_arcs=True, script=script)
    trace = TrialTrace(n=params.n, scheme=spec.scheme, s_h=spec.s_h, s_l=spec.s_l,
                       k=3, with_chain=False, seed=int(seed))
    n = params.n
    # Cycles can only pass through nodes that arrived since the last run
    # of the corresponding phase: each exact packing leaves its graph
    # free of short cycles, and old nodes never gain new arcs.
    fresh_h: set[int] = set()
    fresh_full: set[int] = set()
    for t in range(1, n + 1):
        state.arrive()
        fresh_h.add(t)
        fresh_full.add(t)
        if t % spec.s_h == 0 or t == n:
            dh, dl = _pack_and_remove(state, True, "lex_h", fresh_h)
            trace.matched_h += dh
            trace.matched_l += dl
            fresh_h = set()
        if t % spec.s_l == 0 or t == n:
            dh, dl = _pack_and_remove(state, False, "total", fresh_full)
            trace.matched_h += dh
            trace.matched_l += dl
            fresh_full = set()
            if check_invariants:
                leftover = enumerate_cycles(state, max_len=3)
                if leftover:
                    raise InvariantViolation(
                        f"{len(leftover)} short cycles remain after the full "
                        f"packing run at t={t}"
                    )
        trace.matched_total = trace.matched_h + trace.matched_l
        if record_series:
            trace.series.append(
                (t, trace.matched_total, trace.matched_h, trace.matched_l,
                 state.pool_size)
            )
    return trace


def best_chain_segment(state: GraphState, start: int, budget: int = CHAIN_PATH_BUDGET):
    """Longest-path probe from `start`, cut back to its last H node.

    Depth-first search over active out-neighbors with an expansion
    budget; returns the deepest prefix ending at an H node (the part of
    the path the chain may actually execute) or None when every
    reachable path is H-free.
    """
    out = state.out_arcs
    is_h = state.is_h
    active = state._active
    best: list[int] | None = None
    best_len = 0
    path = [start]
    on_path = {start}
    if is_h[start]:
        best = [start]
        best_len = 1
    stack = [iter(sorted(u for u in out.get(start, ()) if active[u]))]
    expansions = 0
    while stack:
        nxt = next(stack[-1], -1)
        if nxt < 0:
            stack.pop()
            on_path.discard(path.pop())
            continue
        if nxt in on_path:
            continue
        expansions += 1
        path.append(nxt)
        on_path.add(nxt)
        if is_h[nxt] and len(path) > best_len:
            best = list(path)
            best_len = len(path)
        if expansions >= budget:
            break
        stack.append(
            iter(sorted(u for u in out[nxt] if active[u] and u not in on_path))
        )
    return best


def _best_cycle(cycles, is_h):
    """Lexicographic (H count, size) maximum; ties to first canonical."""
    best = None
    best_key = None
    for c in cycles:
        key = (cycle_h_count(c, is_h), len(c))
        if best_key is None or key > best_key:
            best, best_key = c, key
    return best, best_key


def run_online_chain(
    params: ModelParams,
    k: int,
    with_chain: bool,
    seed: int,
    record_series: bool = True,
    check_invariants: bool = False,
    script: list[ArrivalScript] | None = None,
    path_budget: int = CHAIN_PATH_BUDGET,
) -> TrialTrace:
    if k not in (2, 3):
        raise SpecError(f"k must be 2 or 3, got {k}")
    if with_chain and params.ndd_count != 1:
        raise SpecError("the chain scheme needs exactly one altruistic donor")
    if not with_chain and params.ndd_count != 0:
        raise SpecError("the no-chain scheme runs without altruistic donors")
    state = GraphState(params, seed, track_arcs=True, script=script)
    chain = ChainState(bridge_donor=0 if with_chain else None)
    trace = TrialTrace(n=params.n, scheme=SCHEME_CHAIN, s_h=1, s_l=1, k=k,
                       with_chain=with_chain, seed=int(seed), chain=chain)
    n = params.n
    for t in range(1, n + 1):
        state.arrive()
        cycles = enumerate_cycles(state, max_len=k, through=(t,))
        best, best_key = _best_cycle(cycles, state.is_h) if cycles else (None, None)
        segment = None
        bd = chain.bridge_donor
        if bd is not None and t in state.out_arcs.get(bd, ()):
            segment = best_chain_segment(state, t, budget=path_budget)
        if best is not None and (segment is None or best_key[0] >= k - 1):
            # Rule: a cycle rich in H nodes wins the tie with the chain;
            # otherwise an available chain advance is preferred.
            ids = sorted(best)
            state.remove_matched(ids)
            dh, dl = _tally_removed(state, ids)
        elif segment is not None:
            state.remove_matched(segment[:-1])
            state.promote_to_donor(segment[-1])
            if bd is not None:
                state.consume_donor(bd)
            chain.bridge_donor = segment[-1]
            chain.segments_executed.append(tuple(segment))
            chain.total_chain_matched += len(segment)
            dh, dl = _tally_removed(state, segment)
        else:
            dh, dl = 0, 0
        trace.matched_h += dh
        trace.matched_l += dl
        trace.matched_total = trace.matched_h + trace.matched_l
        if check_invariants:
            leftover = enumerate_cycles(state, max_len=k)
            if leftover:
                raise InvariantViolation(
                    f"{len(leftover)} cycles of length <= {k} remain after the "
                    f"step at t={t}"
                )
        if record_series:
            trace.series.append(
                (t, trace.matched_total, trace.matched_h, trace.matched_l,
                 state.pool_size)
            )
    return trace
