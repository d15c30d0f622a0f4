"""Scenario execution: paired Monte Carlo trials, statistics, CSV.

A scenario fixes the pool model, a ladder of horizon sizes, a set of
policies (chunk sizes may be expressions of n), a trial count and a
master seed.  Each (n, trial) cell resolves to one stream seed shared
by every policy, so per-trial gaps compare the same graph realization.
Rows are sorted before writing, which makes the CSV byte-identical for
any worker count; runtimes are only measured on request because a
measured column would break that reproducibility.
"""

from __future__ import annotations

import json
import math
import os
import time
from dataclasses import dataclass
from multiprocessing import Pool
from pathlib import Path

from scipy.stats import norm

from .matching import CapacityError
from .model import ModelParams
from .policies import PolicySpec, run_policy
from .rng import derive_seed

WORKERS_ENV = "MATCHPOOL_WORKERS"

CSV_COLUMNS = (
    "scenario,n,rho,c,p,sigma,scheme,S_H,S_L,k,chain,trial,seed,"
    "matched_total,matched_H,matched_L,runtime_ms"
)

VERDICT_SHRINKING = "shrinking"
VERDICT_STABLE_POSITIVE = "stable-positive"
VERDICT_STABLE_ZERO = "stable-zero"
VERDICT_INCONCLUSIVE = "inconclusive"

# Finite-sample proxies for the asymptotic claims: a gap is "shrinking"
# (sublinear) when gap/n strictly decreases across doubling rungs and the
# last CI sits below half the first mean; it is "stable-positive" (linear)
# when every CI excludes zero and means vary by less than half their peak.
THETA_VARIATION_LIMIT = 0.5


def size_expr(expr, n: int) -> int:
    """Resolve a chunk-size expression against a horizon size.

    Accepts a plain integer, "n", "n/<int>", "sqrt" (ceil of the square
    root), or "pow:<a>:<b>" meaning ceil(a * n**b) clamped up to 1.
    """
    if isinstance(expr, int):
        value = expr
    elif isinstance(expr, str):
        text = expr.strip().lower()
        if text == "n":
            value = n
        elif text == "sqrt":
            value = math.ceil(math.sqrt(n))
        elif text.startswith("n/"):
            value = n // int(text[2:])
        elif text.startswith("pow:"):
            _, a, b = text.split(":")
            value = max(1, math.ceil(float(a) * n ** float(b)))
        else:
            value = int(text)
    else:
        raise ValueError(f"unsupported size expression {expr!r}")
    if not 1 <= value <= n:
        raise ValueError(f"size {expr!r} resolves to {value}, outside 1..{n}")
    return value


@dataclass(frozen=True)
class PolicyConfig:
    """A policy whose chunk sizes may depend on the ladder rung."""

    name: str
    scheme: str
    s_h: object = 1
    s_l: object = 1
    k: int = 2
    with_chain: bool = False

    def resolve(self, n: int) -> PolicySpec:
        if self.scheme == "CHAIN":
            return PolicySpec(scheme="CHAIN", k=self.k, with_chain=self.with_chain)
        return PolicySpec(
            scheme=self.scheme,
            s_h=size_expr(self.s_h, n),
            s_l=size_expr(self.s_l, n),
            k=3 if self.scheme == "CM3" else 2,
        )


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    rho: float
    c: float
    p: float
    policies: tuple[PolicyConfig, ...]
    n_values: tuple[int, ...]
    trials: int
    master_seed: int
    sigma: float = 0.0
    comparisons: tuple[tuple[str, str], ...] = ()
    output_path: str | None = None
    measure_runtime: bool = False

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if not self.n_values:
            raise ValueError("n_values must be nonempty")
        names = [p.name for p in self.policies]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate policy names in {names}")
        for a, b in self.comparisons:
            if a not in names or b not in names:
                raise ValueError(f"comparison ({a}, {b}) names unknown policies")
        for n in self.n_values:
            for pol in self.policies:
                pol.resolve(n).validate(n)

    def params_for(self, n: int, policy: PolicyConfig) -> ModelParams:
        ndd = 1 if (policy.scheme == "CHAIN" and policy.with_chain) else 0
        return ModelParams(
            n=n, rho=self.rho, c=self.c, p=self.p, sigma=self.sigma, ndd_count=ndd
        )


def scenario_from_json(source) -> ScenarioConfig:
    """Load a scenario from a JSON file path or a parsed dict."""
    if isinstance(source, (str, Path)):
        with open(source) as fh:
            data = json.load(fh)
    else:
        data = dict(source)
    model = data.get("model", {})
    policies = tuple(
        PolicyConfig(
            name=p.get("name") or _default_name(p),
            scheme=p["scheme"],
            s_h=p.get("s_h", 1),
            s_l=p.get("s_l", 1),
            k=p.get("k", 2),
            with_chain=p.get("with_chain", False),
        )
        for p in data["policies"]
    )
    return ScenarioConfig(
        name=data.get("name", "scenario"),
        rho=model["rho"],
        c=model["c"],
        p=model["p"],
        sigma=model.get("sigma", 0.0),
        n_values=tuple(data.get("n_values") or data["n_ladder"]),
        policies=policies,
        trials=data["trials"],
        master_seed=data["master_seed"],
        comparisons=tuple(tuple(pair) for pair in data.get("comparisons", ())),
        output_path=data.get("output_path"),
        measure_runtime=data.get("measure_runtime", False),
    )


def _default_name(p: dict) -> str:
    if p["scheme"] == "CHAIN":
        return f"O{p.get('k', 2)}{'c' if p.get('with_chain') else ''}"
    return f"{p['scheme']}({p.get('s_h', 1)},{p.get('s_l', 1)})"


@dataclass(frozen=True)
class RunRow:
    scenario: str
    n: int
    rho: float
    c: float
    p: float
    sigma: float
    policy: str
    scheme: str
    s_h: int
    s_l: int
    k: int
    chain: bool
    trial: int
    seed: int
    matched_total: int
    matched_h: int
    matched_l: int
    runtime_ms: int


def trial_seed(master_seed: int, n: int, trial: int) -> int:
    """Stream seed of one (n, trial) cell, shared across policies."""
    return derive_seed(master_seed, n, trial)


def _run_task(task):
    (scenario, n, rho, c, p, sigma, name, scheme, s_h, s_l, k, chain,
     trial, seed, timed) = task
    spec = PolicySpec(scheme=scheme, s_h=s_h, s_l=s_l, k=k, with_chain=chain)
    ndd = 1 if (scheme == "CHAIN" and chain) else 0
    params = ModelParams(n=n, rho=rho, c=c, p=p, sigma=sigma, ndd_count=ndd)
    t0 = time.perf_counter() if timed else 0.0
    try:
        trace = run_policy(params, spec, seed, record_series=False)
        totals = (trace.matched_total, trace.matched_h, trace.matched_l)
    except CapacityError:
        # Solver capacity blown on this realization: record the row as
        # failed (-1 tallies) and keep the scenario going.
        totals = (-1, -1, -1)
    ms = int(round((time.perf_counter() - t0) * 1000)) if timed else 0
    return RunRow(
        scenario=scenario, n=n, rho=rho, c=c, p=p, sigma=sigma, policy=name,
        scheme=scheme, s_h=spec.s_h, s_l=spec.s_l, k=spec.k, chain=chain,
        trial=trial, seed=seed, matched_total=totals[0],
        matched_h=totals[1], matched_l=totals[2], runtime_ms=ms,
    )


def worker_count(explicit: int | None = None) -> int:
    if explicit is not None:
        return max(1, explicit)
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_scenario(cfg: ScenarioConfig, workers: int | None = None) -> list[RunRow]:
    """Execute every (n, policy, trial) cell; returns sorted rows.

    Writes the row CSV when the config names an output path.  The row
    order and content are independent of the worker count.
    """
    tasks = []
    for n in cfg.n_values:
        for pol in cfg.policies:
            spec = pol.resolve(n)
            for trial in range(cfg.trials):
                seed = trial_seed(cfg.master_seed, n, trial)
                tasks.append(
                    (cfg.name, n, cfg.rho, cfg.c, cfg.p, cfg.sigma, pol.name,
                     spec.scheme, spec.s_h, spec.s_l, spec.k, spec.with_chain,
                     trial, seed, cfg.measure_runtime)
                )
    nworkers = worker_count(workers)
    if nworkers > 1 and len(tasks) > 1:
        with Pool(processes=nworkers) as pool:
            rows = pool.map(_run_task, tasks, chunksize=1)
    else:
        rows = [_run_task(t) for t in tasks]
    policy_order = {p.name: i for i, p in enumerate(cfg.policies)}
    rows.sort(key=lambda r: (r.n, policy_order[r.policy], r.trial))
    if cfg.output_path:
        write_rows_csv(rows, cfg.output_path)
    return rows


def write_rows_csv(rows: list[RunRow], path) -> Path:
    path = Path(path)
    lines = [CSV_COLUMNS]
    for r in rows:
        lines.append(
            f"{r.scenario},{r.n},{r.rho!r},{r.c!r},{r.p!r},{r.sigma!r},"
            f"{r.scheme},{r.s_h},{r.s_l},{r.k},{str(r.chain).lower()},"
            f"{r.trial},{r.seed},{r.matched_total},{r.matched_h},"
            f"{r.matched_l},{r.runtime_ms}"
        )
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"could not write results to {path}: {exc}") from exc
    return path


@dataclass(frozen=True)
class GapEstimate:
    policy_a: str
    policy_b: str
    n: int
    trials: int
    mean_gap_per_n: float
    ci95: tuple[float, float]

    def excludes_zero(self) -> bool:
        lo, hi = self.ci95
        return lo > 0.0 or hi < 0.0


_Z95 = float(norm.ppf(0.975))


def paired_gaps(
    rows: list[RunRow], policy_a: str, policy_b: str
) -> list[GapEstimate]:
    """Per-n gap estimates (a minus b) from paired trials."""
    by_cell: dict[tuple[int, int], dict[str, int]] = {}
    for r in rows:
        if r.policy in (policy_a, policy_b) and r.matched_total >= 0:
            by_cell.setdefault((r.n, r.trial), {})[r.policy] = r.matched_total
    per_n: dict[int, list[float]] = {}
    for (n, _trial), d in sorted(by_cell.items()):
        if policy_a in d and policy_b in d:
            per_n.setdefault(n, []).append((d[policy_a] - d[policy_b]) / n)
    out = []
    for n, diffs in sorted(per_n.items()):
        t = len(diffs)
        mean = sum(diffs) / t
        if t > 1:
            var = sum((x - mean) ** 2 for x in diffs) / (t - 1)
            half = _Z95 * math.sqrt(var / t)
        else:
            half = float("inf")
        out.append(
            GapEstimate(policy_a=policy_a, policy_b=policy_b, n=n, trials=t,
                        mean_gap_per_n=mean, ci95=(mean - half, mean + half))
        )
    return out


def trend_verdict(gaps: list[GapEstimate]) -> str:
    """Classify a gap-per-n trend across doubling rungs."""
    if len(gaps) < 3:
        return VERDICT_INCONCLUSIVE
    means = [g.mean_gap_per_n for g in gaps]
    if all(g.mean_gap_per_n == 0.0 and not g.excludes_zero() for g in gaps):
        return VERDICT_STABLE_ZERO
    if all(g.excludes_zero() for g in gaps):
        spread = max(means) - min(means)
        if spread < THETA_VARIATION_LIMIT * max(abs(m) for m in means):
            return VERDICT_STABLE_POSITIVE
    decreasing = all(b < a for a, b in zip(means, means[1:]))
    if decreasing and gaps[-1].ci95[1] < means[0] / 2.0:
        return VERDICT_SHRINKING
    return VERDICT_INCONCLUSIVE


@dataclass(frozen=True)
class ScalingResult:
    rows: list[RunRow]
    gaps: dict[tuple[str, str], list[GapEstimate]]
    verdicts: dict[tuple[str, str], str]


def scaling_study(cfg: ScenarioConfig, workers: int | None = None) -> ScalingResult:
    """Run the ladder and classify each configured policy comparison."""
    if len(cfg.n_values) < 3:
        raise ValueError("a scaling study needs at least 3 ladder rungs")
    for a, b in zip(cfg.n_values, cfg.n_values[1:]):
        if b != 2 * a:
            raise ValueError(f"ladder rungs must double: {cfg.n_values}")
    rows = run_scenario(cfg, workers=workers)
    gaps = {}
    verdicts = {}
    for a, b in cfg.comparisons:
        g = paired_gaps(rows, a, b)
        gaps[(a, b)] = g
        verdicts[(a, b)] = trend_verdict(g)
    if cfg.output_path:
        write_gaps_csv(gaps, verdicts, _with_suffix(cfg.output_path, "_gaps"))
    return ScalingResult(rows=rows, gaps=gaps, verdicts=verdicts)


def _with_suffix(path, tag: str) -> Path:
    path = Path(path)
    return path.with_name(path.stem + tag + path.suffix)


def write_gaps_csv(gaps, verdicts, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["policy_a,policy_b,n,trials,mean_gap_per_n,ci_lo,ci_hi,verdict"]
    for pair in sorted(gaps):
        verdict = verdicts.get(pair, "")
        for g in gaps[pair]:
            lines.append(
                f"{g.policy_a},{g.policy_b},{g.n},{g.trials},"
                f"{g.mean_gap_per_n!r},{g.ci95[0]!r},{g.ci95[1]!r},{verdict}"
            )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
