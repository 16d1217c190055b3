"""Numba kernels for the discrete-event cell simulator.

The interval-synchronous engine exploits two exact reductions of the model:

* storage-node survival over one interval is Bernoulli(exp(-mu*delta)) per
  node, so survivor counts follow binomial laws that can be inverted from one
  pre-drawn uniform each (the sequential dependence through skipped repairs
  is why this runs in a kernel and not as a flat numpy expression);
* the cell-wide free population is thinned binomially per interval and
  replenished by the Poisson count of interval arrivals that are still alive
  at the interval end.

The incoming-mode kernel advances the m class chains by Gillespie's direct
method (exponential holding times at the aggregate jump rate), serving
pre-drawn, per-interval-sorted request phases in between jumps and consuming
exponential and direction variates from pools handed in by the driver.  Every
kernel draws nothing itself: all randomness is passed in, which keeps
category streams independent of instrumentation and trajectories
bit-reproducible.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

INF = math.inf


@njit(cache=True)
def _binom_inv(n, p, u):
    """Smallest k with Binomial(n, p) CDF >= u, by iterating the pmf.

    For p > 1/2 the count of failures is inverted instead (from the mirrored
    uniform, so the map stays monotone), keeping the expected loop length at
    n * min(p, 1-p) + 1; survival probabilities near 1 dominate in practice.
    """
    if n <= 0:
        return 0
    if p >= 1.0:
        return n
    if p <= 0.0:
        return 0
    flipped = p > 0.5
    if flipped:
        p = 1.0 - p
        u = 1.0 - u
    q = 1.0 - p
    k = n
    log_pmf0 = n * math.log(q)
    if log_pmf0 > -700.0:
        pmf = math.exp(log_pmf0)
        cum = pmf
        k = 0
        ratio = p / q
        while u > cum and k < n:
            k += 1
            pmf *= ratio * (n - k + 1) / k
            cum += pmf
    else:
        # deep-underflow fallback: pmf in log space via lgamma
        lf_n = math.lgamma(n + 1.0)
        lp = math.log(p)
        lq = math.log(q)
        cum = 0.0
        for j in range(n + 1):
            lpmf = (lf_n - math.lgamma(j + 1.0) - math.lgamma(n - j + 1.0)
                    + j * lp + (n - j) * lq)
            cum += math.exp(lpmf)
            if u <= cum:
                k = j
                break
    return n - k if flipped else k


@njit(cache=True)
def storage_chain(
    group_sizes,  # int64[G], mutated: storage count per repair group
    free0,  # int64 scalar: content-free population at chunk start
    p,  # per-node interval survival probability
    m,
    h,
    gsize,  # nodes per group (m itself for non-LRC codes)
    is_lrc,
    u_storage,  # float64[K, G] survivor-draw uniforms
    u_free,  # float64[K] free-pool thinning uniforms
    imm,  # int64[K] surviving-arrival counts
    bs_unit,  # float64[m+1] per-lost-node BS cost by survivor count
    d2d_unit,  # float64[m+1] per-lost-node D2D cost by survivor count
    branch_id,  # int64[m+1] 0=bs 1=partial 2=d2d (non-LRC)
    lrc_local_cost,
    lrc_global_cost,  # D2D cost per globally repaired node
    lrc_bs_cost,
    k0,  # global index of the chunk's first interval
    warmup,
    ipb,  # intervals per batch
    nbatch,
    batch_rep_bs,
    batch_rep_d2d,  # float64[nbatch], accumulated in place
    rep_counts,  # int64[4]: bs, partial, d2d, local
    c_rec,
    s_rec,  # int16[K]: storage count at interval start / survivors
    pop_stats,  # float64[2]: sum of population samples, sample count
):
    """Advance the cell by K intervals; returns (free, skipped) at chunk end."""
    K = u_free.shape[0]
    G = group_sizes.shape[0]
    free = free0
    skipped = 0
    for k in range(K):
        start_total = 0
        for g in range(G):
            start_total += group_sizes[g]
        total_s = 0
        for g in range(G):
            sg = _binom_inv(group_sizes[g], p, u_storage[k, g])
            group_sizes[g] = sg
            total_s += sg
        c_rec[k] = start_total
        s_rec[k] = total_s
        free = _binom_inv(free, p, u_free[k]) + imm[k]
        pop_stats[0] += total_s + free
        pop_stats[1] += 1.0

        kg = k0 + k
        account = kg >= warmup
        kb = (kg - warmup) // ipb if account else -1
        if kb >= nbatch:
            account = False

        if total_s + free >= m:
            lost = m - total_s
            if lost > 0:
                bs_cost = 0.0
                d2d_cost = 0.0
                if is_lrc:
                    local_n = 0
                    heavy = 0
                    for g in range(G):
                        missing = gsize - group_sizes[g]
                        if missing == 1:
                            local_n += 1
                        elif missing >= 2:
                            heavy += missing
                    d2d_cost += local_n * lrc_local_cost
                    if total_s >= h:
                        d2d_cost += heavy * lrc_global_cost
                        if account:
                            rep_counts[3] += local_n
                            rep_counts[2] += heavy
                    else:
                        bs_cost += heavy * lrc_bs_cost
                        if account:
                            rep_counts[3] += local_n
                            rep_counts[0] += heavy
                else:
                    bs_cost = lost * bs_unit[total_s]
                    d2d_cost = lost * d2d_unit[total_s]
                    if account:
                        rep_counts[branch_id[total_s]] += lost
                if account:
                    batch_rep_bs[kb] += bs_cost
                    batch_rep_d2d[kb] += d2d_cost
                free -= lost
                for g in range(G):
                    group_sizes[g] = gsize
        else:
            skipped += 1
    return free, skipped


@njit(cache=True)
def incoming_chain(
    class_sizes,  # int64[m], mutated
    free0,
    mu,
    lam_c,
    delta,
    p,  # exp(-mu*delta) for free-pool thinning
    m,
    h,
    gsize,
    is_lrc,
    exp_pool,  # float64[:] unit-exponential variates
    dir_pool,  # float64[:] uniforms for birth-vs-death decisions
    u_free,
    imm,
    req_offsets,  # int64[K+1]: request index range per interval
    req_phase,  # float64[:] phases, ascending within each interval
    bs_unit,
    d2d_unit,
    branch_id,
    lrc_local_cost,
    lrc_global_cost,
    lrc_bs_cost,
    dl_bs_unit,  # float64[m+1] download BS cost by available-symbol count
    dl_d2d_unit,
    dl_branch,  # int64[m+1] 0=bs 1=partial 2=d2d
    k0,
    warmup,
    ipb,
    nbatch,
    batch_rep_bs,
    batch_rep_d2d,
    batch_dl_bs,
    batch_dl_d2d,
    batch_dl_counts,  # int64[nbatch, 3]
    rep_counts,
    pop_stats,
):
    """Advance the incoming-mode cell; returns (free, skipped, ec, dc, status).

    status 1 means a variate pool ran dry at an interval boundary: state and
    cursors are valid, and the driver extends the pools and calls again.
    """
    K = u_free.shape[0]
    free = free0
    skipped = 0
    ec = 0
    dc = 0
    for k in range(K):
        if ec + 10_000 > exp_pool.shape[0] or dc + 10_000 > dir_pool.shape[0]:
            return free, skipped, ec, dc, k, 1

        kg = k0 + k
        account = kg >= warmup
        kb = (kg - warmup) // ipb if account else -1
        if kb >= nbatch:
            account = False

        # Gillespie direct method over the m class chains: one exponential
        # holding time at the aggregate rate per jump, one uniform to pick
        # the event, with pre-sorted request phases served in between.
        nonempty = 0
        total_rate = m * lam_c
        for c in range(m):
            if class_sizes[c] > 0:
                nonempty += 1
            total_rate += class_sizes[c] * mu

        t = 0.0
        ri = req_offsets[k]
        r_end = req_offsets[k + 1]
        while True:
            if total_rate > 0.0:
                tj = t + exp_pool[ec] / total_rate
                ec += 1
            else:
                tj = INF
            while ri < r_end and req_phase[ri] <= tj:
                if account:
                    avail = nonempty
                    batch_dl_bs[kb] += dl_bs_unit[avail]
                    batch_dl_d2d[kb] += dl_d2d_unit[avail]
                    batch_dl_counts[kb, dl_branch[avail]] += 1
                ri += 1
            if tj >= delta:
                break
            x = dir_pool[dc] * total_rate
            dc += 1
            for c in range(m):
                if x < lam_c:
                    class_sizes[c] += 1
                    if class_sizes[c] == 1:
                        nonempty += 1
                    total_rate += mu
                    break
                x -= lam_c
                death = class_sizes[c] * mu
                if x < death:
                    class_sizes[c] -= 1
                    if class_sizes[c] == 0:
                        nonempty -= 1
                    total_rate -= mu
                    break
                x -= death
            # a fall-through (x >= every component by rounding) skips the
            # jump; the holding time still advances, which is measure-zero
            t = tj

        total_s = 0
        empty = 0
        for c in range(m):
            total_s += class_sizes[c]
            if class_sizes[c] == 0:
                empty += 1
        free = _binom_inv(free, p, u_free[k]) + imm[k]
        pop_stats[0] += total_s + free
        pop_stats[1] += 1.0

        # reseeding every empty class needs that many spare nodes; this is
        # the population >= m rule generalized to multi-node classes
        if free >= empty:
            if empty > 0:
                bs_cost = 0.0
                d2d_cost = 0.0
                if is_lrc:
                    G = m // gsize
                    local_n = 0
                    heavy = 0
                    for g in range(G):
                        missing = 0
                        for j in range(gsize):
                            if class_sizes[g * gsize + j] == 0:
                                missing += 1
                        if missing == 1:
                            local_n += 1
                        elif missing >= 2:
                            heavy += missing
                    d2d_cost += local_n * lrc_local_cost
                    if nonempty >= h:
                        d2d_cost += heavy * lrc_global_cost
                        if account:
                            rep_counts[3] += local_n
                            rep_counts[2] += heavy
                    else:
                        bs_cost += heavy * lrc_bs_cost
                        if account:
                            rep_counts[3] += local_n
                            rep_counts[0] += heavy
                else:
                    bs_cost = empty * bs_unit[nonempty]
                    d2d_cost = empty * d2d_unit[nonempty]
                    if account:
                        rep_counts[branch_id[nonempty]] += empty
                if account:
                    batch_rep_bs[kb] += bs_cost
                    batch_rep_d2d[kb] += d2d_cost
                for c in range(m):
                    if class_sizes[c] == 0:
                        class_sizes[c] = 1
                free -= empty
        else:
            skipped += 1
    return free, skipped, ec, dc, K, 0
