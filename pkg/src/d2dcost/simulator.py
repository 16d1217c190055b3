"""Seeded Monte-Carlo simulation of the storage cell.

This is the measurement instrument the closed forms are judged against, so
its branch decisions are taken by literally comparing transfer costs per
event, never by evaluating the analytic threshold formulas.  Two request
models are supported: the default drives requests at the fixed aggregate
rate M*omega used by the analysis; the population-proportional variant lets
every currently alive node request at rate omega.

The default engine advances interval by interval (see _kernels) and draws
request outcomes afterwards from the recorded per-interval storage counts:
given the survivor count, the within-interval death times of the departed
nodes are independent truncated exponentials, which is all a Poisson request
stream can see.  The population-proportional engine is a plain event loop in
Python, kept small and obviously correct rather than fast.

Costs are reported as rates per stored bit per time unit, batch-mean standard
errors included.  The first ``WARMUP_INTERVALS`` repair intervals never count
toward costs, and the post-warmup span is cut into ``BATCHES`` equal batches
with any remainder discarded.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import _kernels
from .model import CodeFamily, CodeSpec, CostBreakdown, NetworkParams, Scheme

WARMUP_INTERVALS = 10
BATCHES = 30


class RequestModel(str, Enum):
    FIXED_AGGREGATE = "fixed-aggregate"
    POPULATION_PROPORTIONAL = "population-proportional"


@dataclass(frozen=True)
class SimConfig:
    """One reproducible simulation run."""

    params: NetworkParams
    code: CodeSpec
    delta: float
    horizon: float
    seed: int
    scheme: Scheme = Scheme.CONVENTIONAL
    request_model: RequestModel = RequestModel.FIXED_AGGREGATE
    incoming: bool = False
    trace: bool = False

    def __post_init__(self) -> None:
        params = self.params
        if self.delta <= 0 or math.isinf(self.delta):
            raise ValueError("simulation needs a finite positive delta")
        if params.mu <= 0:
            raise ValueError("simulation needs mu > 0")
        if self.horizon < 100 * max(self.delta, 1.0 / params.mu):
            raise ValueError("horizon must cover 100 * max(delta, 1/mu)")
        if self.n_intervals - WARMUP_INTERVALS < BATCHES:
            raise ValueError(
                f"horizon too short: need at least {BATCHES} post-warmup "
                "repair intervals for batch means"
            )
        if float(self.code.file_size) != params.file_size:
            raise ValueError("code file size disagrees with params.file_size")
        if self.incoming:
            if self.code.m * params.lambda_c > params.M * params.lam + 1e-12:
                raise ValueError(
                    "class arrivals m*lambda_c cannot exceed total arrivals M*lam"
                )
            if self.request_model is not RequestModel.FIXED_AGGREGATE:
                raise ValueError("incoming mode supports the fixed-aggregate model only")
        if self.trace and self.request_model is not RequestModel.POPULATION_PROPORTIONAL:
            raise ValueError("event tracing is only available in the "
                             "population-proportional engine")

    @property
    def n_intervals(self) -> int:
        # nudge before flooring so horizons that are exact multiples of
        # delta in real arithmetic do not lose an interval to rounding
        return int(self.horizon / self.delta * (1.0 + 1e-12))


@dataclass(frozen=True)
class SimResult:
    """Batch-mean cost estimates plus branch bookkeeping for one run."""

    cost: CostBreakdown
    stderr: dict[str, float]
    event_counts: dict[str, int]
    skipped_repairs: int
    population_mean: float
    n_intervals: int
    trace_rows: list = field(default_factory=list, repr=False)

    def __post_init__(self) -> None:
        for key, value in self.stderr.items():
            if not math.isfinite(value):
                raise ValueError(f"stderr[{key}] is not finite")

    @property
    def d2d_download_fraction(self) -> float:
        total = sum(v for k, v in self.event_counts.items() if k.startswith("download"))
        if total == 0:
            return math.nan
        return self.event_counts["download_d2d"] / total


REPAIR_BRANCHES = ("repair_bs", "repair_partial", "repair_d2d", "repair_local")
DOWNLOAD_BRANCHES = ("download_bs", "download_partial", "download_d2d")


# ---------------------------------------------------------------------------
# branch rules as explicit cost comparisons


def _repair_tables(params: NetworkParams, code: CodeSpec, scheme: Scheme):
    """Per-lost-node (bs, d2d, branch) repair cost by survivor count.

    Branches are chosen by comparing the candidate transfers' prices
    directly: full BS fetch of gamma_bs bits versus, under the hybrid scheme,
    reading beta bits from each of the i survivors plus (r-i)*beta from the
    BS.  D2D regeneration applies as soon as r helpers are present.
    """
    m, r = code.m, code.r
    bs = np.zeros(m + 1)
    d2d = np.zeros(m + 1)
    branch = np.zeros(m + 1, dtype=np.int64)
    full_bs = params.rho_bs * float(code.gamma_bs)
    beta = float(code.beta)
    for i in range(m + 1):
        if i >= r:
            d2d[i] = params.rho_d2d * float(code.gamma_d2d)
            branch[i] = 2
            continue
        mixed_bs = params.rho_bs * (r - i) * beta
        mixed_d2d = params.rho_d2d * i * beta
        if scheme is Scheme.HYBRID and mixed_bs + mixed_d2d < full_bs:
            bs[i] = mixed_bs
            d2d[i] = mixed_d2d
            branch[i] = 1
        else:
            bs[i] = full_bs
            branch[i] = 0
    return bs, d2d, branch


def _download_tables(params: NetworkParams, code: CodeSpec, scheme: Scheme):
    """Per-request (bs, d2d, branch) download cost by available-symbol count."""
    m, h = code.m, code.h
    bs = np.zeros(m + 1)
    d2d = np.zeros(m + 1)
    branch = np.zeros(m + 1, dtype=np.int64)
    alpha = float(code.alpha)
    full_bs = params.rho_bs * params.file_size
    for i in range(m + 1):
        if i >= h:
            d2d[i] = params.rho_d2d * h * alpha
            branch[i] = 2
            continue
        mixed_bs = params.rho_bs * (h - i) * alpha
        mixed_d2d = params.rho_d2d * i * alpha
        if scheme is Scheme.HYBRID and i > 0 and mixed_bs + mixed_d2d < full_bs:
            bs[i] = mixed_bs
            d2d[i] = mixed_d2d
            branch[i] = 1
        else:
            bs[i] = full_bs
            branch[i] = 0
    return bs, d2d, branch


@dataclass
class CellState:
    """Mutable cell snapshot for the single-event operations.

    ``group_sizes`` holds the live storage count per repair group; non-LRC
    codes use a single group of size m.  ``free`` counts content-free nodes.
    """

    group_sizes: list[int]
    free: int


def repair_epoch(state: CellState, code: CodeSpec, params: NetworkParams,
                 scheme: Scheme) -> tuple[float, float, dict[str, int], bool]:
    """Run one repair epoch on ``state`` in place.

    Returns (bs_cost, d2d_cost, branch counts, skipped).  The epoch is
    skipped, at zero cost, when the cell lacks the spare nodes to refill
    every lost slot.
    """
    group_size = code.r + 1 if code.family is CodeFamily.LRC else code.m
    survivors = sum(state.group_sizes)
    lost = code.m - survivors
    counts = dict.fromkeys(REPAIR_BRANCHES, 0)
    if lost == 0:
        return 0.0, 0.0, counts, False
    if state.free < lost:
        return 0.0, 0.0, counts, True
    bs_cost = d2d_cost = 0.0
    if code.family is CodeFamily.LRC:
        for g, size in enumerate(state.group_sizes):
            missing = group_size - size
            if missing == 1:
                d2d_cost += params.rho_d2d * float(code.gamma_d2d)
                counts["repair_local"] += 1
            elif missing >= 2:
                if survivors >= code.h:
                    d2d_cost += missing * params.rho_d2d * float(code.h * code.alpha)
                    counts["repair_d2d"] += missing
                else:
                    bs_cost += missing * params.rho_bs * float(code.gamma_bs)
                    counts["repair_bs"] += missing
    else:
        bs_unit, d2d_unit, branch = _repair_tables(params, code, scheme)
        bs_cost = lost * float(bs_unit[survivors])
        d2d_cost = lost * float(d2d_unit[survivors])
        counts[REPAIR_BRANCHES[int(branch[survivors])]] += lost
    state.free -= lost
    state.group_sizes = [group_size] * len(state.group_sizes)
    return bs_cost, d2d_cost, counts, False


def request_event(available: int, code: CodeSpec, params: NetworkParams,
                  scheme: Scheme) -> tuple[float, float, str]:
    """Cost of serving one request that sees ``available`` storage symbols."""
    bs_unit, d2d_unit, branch = _download_tables(params, code, scheme)
    i = min(available, code.m)
    return float(bs_unit[i]), float(d2d_unit[i]), DOWNLOAD_BRANCHES[int(branch[i])]


# ---------------------------------------------------------------------------
# fixed-aggregate engine


def _spawn_rngs(seed: int, n: int) -> list[np.random.Generator]:
    seqs = np.random.SeedSequence(seed).spawn(n)
    return [np.random.Generator(np.random.Philox(s)) for s in seqs]


def _batch_stats(batch_rates: dict[str, np.ndarray]):
    means = {k: float(v.mean()) for k, v in batch_rates.items()}
    stderr = {
        k: float(v.std(ddof=1) / math.sqrt(len(v))) for k, v in batch_rates.items()
    }
    return means, stderr


def _run_fixed_aggregate(config: SimConfig) -> SimResult:
    params, code = config.params, config.code
    delta = config.delta
    m = code.m
    is_lrc = code.family is CodeFamily.LRC
    groups = code.groups if is_lrc else 1
    gsize = code.r + 1 if is_lrc else m
    p = math.exp(-params.mu * delta)

    K = config.n_intervals
    ipb = (K - WARMUP_INTERVALS) // BATCHES
    used = WARMUP_INTERVALS + ipb * BATCHES

    (rng_init, rng_storage, rng_free, rng_imm,
     rng_reqn, rng_reqt, rng_death) = _spawn_rngs(config.seed, 7)

    bs_unit, d2d_unit, branch_id = _repair_tables(params, code, config.scheme)
    lrc_local = params.rho_d2d * float(code.gamma_d2d)
    lrc_global = params.rho_d2d * float(code.h * code.alpha)
    lrc_bs = params.rho_bs * float(code.gamma_bs)

    batch_rep_bs = np.zeros(BATCHES)
    batch_rep_d2d = np.zeros(BATCHES)
    rep_counts = np.zeros(4, dtype=np.int64)
    pop_stats = np.zeros(2)
    c_rec = np.zeros(used, dtype=np.int16)
    s_rec = np.zeros(used, dtype=np.int16)

    group_sizes = np.full(groups, gsize, dtype=np.int64)
    free = int(rng_init.poisson(params.M * params.lam / params.mu))
    imm_mean = params.M * params.lam * (-math.expm1(-params.mu * delta)) / params.mu
    skipped = 0

    chunk = 1 << 20
    for k0 in range(0, used, chunk):
        span = min(chunk, used - k0)
        u_storage = rng_storage.random((span, groups))
        u_free = rng_free.random(span)
        imm = rng_imm.poisson(imm_mean, span).astype(np.int64)
        free, chunk_skipped = _kernels.storage_chain(
            group_sizes, free, p, m, code.h, gsize, is_lrc,
            u_storage, u_free, imm,
            bs_unit, d2d_unit, branch_id,
            lrc_local, lrc_global, lrc_bs,
            k0, WARMUP_INTERVALS, ipb, BATCHES,
            batch_rep_bs, batch_rep_d2d, rep_counts,
            c_rec[k0:k0 + span], s_rec[k0:k0 + span], pop_stats,
        )
        skipped += chunk_skipped

    # requests: Poisson counts per post-warmup interval, uniform phases,
    # availability from survivors plus not-yet-dead departures
    batch_dl_bs = np.zeros(BATCHES)
    batch_dl_d2d = np.zeros(BATCHES)
    batch_dl_counts = np.zeros((BATCHES, 3), dtype=np.int64)
    dl_bs_unit, dl_d2d_unit, dl_branch = _download_tables(params, code, config.scheme)

    rate = params.M * params.omega * delta
    if rate > 0:
        req_counts = rng_reqn.poisson(rate, used)
        req_counts[:WARMUP_INTERVALS] = 0
        total = int(req_counts.sum())
        if total:
            ids = np.repeat(np.arange(used), req_counts)
            phases = rng_reqt.uniform(0.0, delta, total)
            uniq, inv = np.unique(ids, return_inverse=True)
            dying = (c_rec[uniq] - s_rec[uniq]).astype(np.int64)
            dmax = int(dying.max()) if dying.size else 0
            if dmax > 0:
                u = rng_death.random((uniq.size, dmax))
                death = -np.log1p(u * math.expm1(-params.mu * delta)) / params.mu
                death[np.arange(dmax) >= dying[:, None]] = -1.0
                alive_extra = (death[inv] > phases[:, None]).sum(axis=1)
            else:
                alive_extra = np.zeros(total, dtype=np.int64)
            avail = s_rec[ids].astype(np.int64) + alive_extra
            kb = (ids - WARMUP_INTERVALS) // ipb
            np.add.at(batch_dl_bs, kb, dl_bs_unit[avail])
            np.add.at(batch_dl_d2d, kb, dl_d2d_unit[avail])
            np.add.at(batch_dl_counts, (kb, dl_branch[avail]), 1)

    scale = 1.0 / (params.file_size * ipb * delta)
    batch_rates = {
        "repair_bs": batch_rep_bs * scale,
        "repair_d2d": batch_rep_d2d * scale,
        "download_bs": batch_dl_bs * scale,
        "download_d2d": batch_dl_d2d * scale,
    }
    return _assemble(config, batch_rates, rep_counts, batch_dl_counts,
                     skipped, pop_stats)


def _run_incoming(config: SimConfig) -> SimResult:
    params, code = config.params, config.code
    delta = config.delta
    m = code.m
    is_lrc = code.family is CodeFamily.LRC
    gsize = code.r + 1 if is_lrc else m
    p = math.exp(-params.mu * delta)
    lam_c = params.lambda_c

    K = config.n_intervals
    ipb = (K - WARMUP_INTERVALS) // BATCHES
    used = WARMUP_INTERVALS + ipb * BATCHES

    (rng_init, rng_jump, rng_dir, rng_free, rng_imm,
     rng_reqn, rng_reqt) = _spawn_rngs(config.seed, 7)

    bs_unit, d2d_unit, branch_id = _repair_tables(params, code, config.scheme)
    dl_bs_unit, dl_d2d_unit, dl_branch = _download_tables(params, code, config.scheme)
    lrc_local = params.rho_d2d * float(code.gamma_d2d)
    lrc_global = params.rho_d2d * float(code.h * code.alpha)
    lrc_bs = params.rho_bs * float(code.gamma_bs)

    batch_rep_bs = np.zeros(BATCHES)
    batch_rep_d2d = np.zeros(BATCHES)
    batch_dl_bs = np.zeros(BATCHES)
    batch_dl_d2d = np.zeros(BATCHES)
    batch_dl_counts = np.zeros((BATCHES, 3), dtype=np.int64)
    rep_counts = np.zeros(4, dtype=np.int64)
    pop_stats = np.zeros(2)

    free_rate = params.M * params.lam - m * lam_c
    class_sizes = np.ones(m, dtype=np.int64)
    free = int(rng_init.poisson(free_rate / params.mu))
    imm_mean = free_rate * (-math.expm1(-params.mu * delta)) / params.mu
    skipped = 0

    # mean variate demand per interval: one exponential per jump plus the
    # final overshooting draw, one uniform per jump; sized with headroom
    per_interval = 2.0 + 1.5 * m * (lam_c + 2.0 * params.mu) * delta

    chunk = 1 << 16
    k0 = 0
    while k0 < used:
        span = min(chunk, used - k0)
        u_free = rng_free.random(span)
        imm = rng_imm.poisson(imm_mean, span).astype(np.int64)
        req_counts = rng_reqn.poisson(params.M * params.omega * delta, span)
        total = int(req_counts.sum())
        phases = rng_reqt.uniform(0.0, delta, total)
        ids = np.repeat(np.arange(span), req_counts)
        order = np.lexsort((phases, ids))
        req_phase = phases[order]
        req_offsets = np.zeros(span + 1, dtype=np.int64)
        np.cumsum(req_counts, out=req_offsets[1:])

        pool_n = int(span * per_interval) + 40_000
        exp_pool = rng_jump.exponential(1.0, pool_n)
        dir_pool = rng_dir.random(pool_n)

        done = 0
        while done < span:
            free, chunk_skipped, ec, dc, advanced, status = _kernels.incoming_chain(
                class_sizes, free, params.mu, lam_c, delta, p, m, code.h, gsize,
                is_lrc,
                exp_pool, dir_pool, u_free[done:span], imm[done:span],
                req_offsets[done:span + 1] - req_offsets[done],
                req_phase[req_offsets[done]:],
                bs_unit, d2d_unit, branch_id,
                lrc_local, lrc_global, lrc_bs,
                dl_bs_unit, dl_d2d_unit, dl_branch,
                k0 + done, WARMUP_INTERVALS, ipb, BATCHES,
                batch_rep_bs, batch_rep_d2d, batch_dl_bs, batch_dl_d2d,
                batch_dl_counts, rep_counts, pop_stats,
            )
            skipped += chunk_skipped
            done += advanced
            if status == 1:
                exp_pool = rng_jump.exponential(1.0, pool_n)
                dir_pool = rng_dir.random(pool_n)
        k0 += span

    scale = 1.0 / (params.file_size * ipb * delta)
    batch_rates = {
        "repair_bs": batch_rep_bs * scale,
        "repair_d2d": batch_rep_d2d * scale,
        "download_bs": batch_dl_bs * scale,
        "download_d2d": batch_dl_d2d * scale,
    }
    return _assemble(config, batch_rates, rep_counts, batch_dl_counts,
                     skipped, pop_stats)


# ---------------------------------------------------------------------------
# population-proportional engine (event loop, pure Python)

_PRIO_REPAIR, _PRIO_REQUEST, _PRIO_DEPART, _PRIO_ARRIVE = 0, 1, 2, 3


def _run_population_proportional(config: SimConfig) -> SimResult:
    params, code = config.params, config.code
    delta = config.delta
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(config.seed)))
    is_lrc = code.family is CodeFamily.LRC
    groups = code.groups if is_lrc else 1
    gsize = code.r + 1 if is_lrc else code.m

    K = config.n_intervals
    ipb = (K - WARMUP_INTERVALS) // BATCHES
    used = WARMUP_INTERVALS + ipb * BATCHES
    t_warm = WARMUP_INTERVALS * delta
    t_end = used * delta

    state = CellState(group_sizes=[gsize] * groups,
                      free=int(rng.poisson(params.M * params.lam / params.mu)))
    heap: list[tuple[float, int, int, int]] = []
    seq = 0

    def push(t, prio, payload=0):
        nonlocal seq
        heapq.heappush(heap, (t, prio, seq, payload))
        seq += 1

    # Every alive node carries one pending departure event ("token").  Repair
    # converts free nodes into storage; because exponential residuals are
    # memoryless and free nodes are exchangeable, the conversion is modelled
    # by issuing fresh storage tokens and letting each future free-token fire
    # be stale with probability stale/(pending tokens).
    stale_free = 0
    free_tokens = state.free
    req_version = 0

    def schedule_request(now):
        nonlocal req_version
        req_version += 1
        n_alive = sum(state.group_sizes) + state.free
        if n_alive > 0 and params.omega > 0:
            push(now + rng.exponential(1.0 / (n_alive * params.omega)),
                 _PRIO_REQUEST, req_version)

    def schedule_arrival(now):
        push(now + rng.exponential(1.0 / (params.M * params.lam)), _PRIO_ARRIVE)

    def schedule_departure(now, group):
        push(now + rng.exponential(1.0 / params.mu), _PRIO_DEPART, group)

    for g in range(groups):
        for _ in range(gsize):
            schedule_departure(0.0, g)
    for _ in range(state.free):
        schedule_departure(0.0, -1)
    schedule_arrival(0.0)
    schedule_request(0.0)
    for k in range(1, used + 1):
        push(k * delta, _PRIO_REPAIR, k)

    batch_costs = {key: np.zeros(BATCHES) for key in
                   ("repair_bs", "repair_d2d", "download_bs", "download_d2d")}
    batch_dl_counts = np.zeros((BATCHES, 3), dtype=np.int64)
    rep_counts = dict.fromkeys(REPAIR_BRANCHES, 0)
    skipped = 0
    pop_sum = 0.0
    pop_n = 0
    trace_rows: list[tuple] = []

    def interval_batch(kg):
        return (kg - WARMUP_INTERVALS) // ipb

    while heap:
        t, prio, _, payload = heapq.heappop(heap)
        if t > t_end:
            break
        if prio == _PRIO_REPAIR:
            pop_sum += sum(state.group_sizes) + state.free
            pop_n += 1
            pre_sizes = list(state.group_sizes)
            bs, d2d, counts, was_skipped = repair_epoch(
                state, code, params, config.scheme)
            closed = payload - 1  # the interval this epoch ends
            if closed >= WARMUP_INTERVALS:
                kb = interval_batch(closed)
                batch_costs["repair_bs"][kb] += bs
                batch_costs["repair_d2d"][kb] += d2d
                for key, n in counts.items():
                    rep_counts[key] += n
            if was_skipped:
                skipped += 1
            else:
                for g, pre in enumerate(pre_sizes):
                    refilled = state.group_sizes[g] - pre
                    stale_free += refilled
                    for _ in range(refilled):
                        schedule_departure(t, g)
            if config.trace:
                trace_rows.append((t, "repair", bs + d2d))
        elif prio == _PRIO_REQUEST:
            if payload != req_version:
                continue  # a population change superseded this clock
            available = sum(state.group_sizes)
            bs, d2d, branch = request_event(
                available, code, params, config.scheme)
            kg = int(t / delta)
            if t >= t_warm and kg < used:
                kb = interval_batch(kg)
                batch_costs["download_bs"][kb] += bs
                batch_costs["download_d2d"][kb] += d2d
                batch_dl_counts[kb, DOWNLOAD_BRANCHES.index(branch)] += 1
            if config.trace:
                trace_rows.append((t, "request", bs + d2d))
            schedule_request(t)
        elif prio == _PRIO_DEPART:
            if payload >= 0:
                state.group_sizes[payload] -= 1
                if config.trace:
                    trace_rows.append((t, "departure", 0.0))
                schedule_request(t)
            else:
                if stale_free > 0 and rng.random() * free_tokens < stale_free:
                    stale_free -= 1
                else:
                    state.free -= 1
                    if config.trace:
                        trace_rows.append((t, "departure", 0.0))
                    schedule_request(t)
                free_tokens -= 1
        else:  # arrival
            state.free += 1
            free_tokens += 1
            schedule_departure(t, -1)
            schedule_arrival(t)
            schedule_request(t)
            if config.trace:
                trace_rows.append((t, "arrival", 0.0))

    scale = 1.0 / (params.file_size * ipb * delta)
    batch_rates = {k: v * scale for k, v in batch_costs.items()}
    pop_stats = np.array([pop_sum, max(pop_n, 1)])
    return _assemble(config, batch_rates,
                     np.array([rep_counts[k] for k in REPAIR_BRANCHES]),
                     batch_dl_counts, skipped, pop_stats, trace_rows)


# ---------------------------------------------------------------------------


def _assemble(config, batch_rates, rep_counts, batch_dl_counts, skipped,
              pop_stats, trace_rows=None) -> SimResult:
    means, stderr = _batch_stats(batch_rates)
    totals = sum(batch_rates.values())
    stderr["total"] = float(totals.std(ddof=1) / math.sqrt(len(totals)))

    dl_totals = batch_dl_counts.sum(axis=1)
    if (dl_totals > 0).all():
        fractions = batch_dl_counts[:, 2] / dl_totals
        stderr["d2d_download_fraction"] = float(
            fractions.std(ddof=1) / math.sqrt(len(fractions)))
    else:
        n = int(dl_totals.sum())
        if n > 0:
            f = float(batch_dl_counts[:, 2].sum()) / n
            stderr["d2d_download_fraction"] = math.sqrt(max(f * (1 - f), 1e-12) / n)
        else:
            stderr["d2d_download_fraction"] = 0.0

    event_counts = {
        name: int(v) for name, v in zip(REPAIR_BRANCHES, rep_counts)
    }
    dl_sums = batch_dl_counts.sum(axis=0)
    event_counts["download_bs"] = int(dl_sums[0])
    event_counts["download_partial"] = int(dl_sums[1])
    event_counts["download_d2d"] = int(dl_sums[2])

    cost = CostBreakdown.build(
        means["repair_bs"], means["repair_d2d"],
        means["download_bs"], means["download_d2d"], config.params,
    )
    return SimResult(
        cost=cost,
        stderr=stderr,
        event_counts=event_counts,
        skipped_repairs=int(skipped),
        population_mean=float(pop_stats[0] / pop_stats[1]),
        n_intervals=config.n_intervals,
        trace_rows=trace_rows or [],
    )


def run(config: SimConfig) -> SimResult:
    """Simulate one cell trajectory and return batch-mean cost estimates."""
    if config.request_model is RequestModel.POPULATION_PROPORTIONAL:
        return _run_population_proportional(config)
    if config.incoming:
        return _run_incoming(config)
    return _run_fixed_aggregate(config)
