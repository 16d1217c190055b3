"""Independent oracles for the closed-form cost rates.

Everything here recomputes expected values from first principles, on purpose
not sharing code with the package internals it checks:

* repair and download costs come from direct Monte-Carlo sampling of one
  repair interval, with branch choices made by explicit per-state cost
  comparison instead of the closed-form thresholds;
* the D2D-availability probability comes from the matrix exponential of the
  pure-death absorbing chain, integrated numerically;
* the incoming-class stationary law comes from replicated Gillespie
  simulation of a single class.

The golden values frozen in ``src/d2dcost/data/goldens.json`` were produced
by these functions (see ``scripts/generate_goldens.py``) with the seeds and
sample counts recorded alongside each value.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate, linalg


# ---------------------------------------------------------------------------
# per-interval branch rules, written as literal cost comparisons


def repair_choice_cost(survivors, code, rho_bs, rho_d2d, hybrid):
    """(bs_cost, d2d_cost) of one repair epoch with ``survivors`` nodes left.

    Replication/MDS/MSR/MBR rules: enough helpers (>= r) means every lost
    node is rebuilt over D2D at gamma_d2d bits; otherwise each lost node is
    fetched from the BS at gamma_bs bits, except that the hybrid scheme takes
    the cheaper of the full-BS rebuild and the mixed rebuild that reads beta
    bits from each of the survivors plus (r - i) * beta from the BS.
    """
    i = survivors
    m, r = code.m, code.r
    lost = m - i
    if lost == 0:
        return 0.0, 0.0
    if i >= r:
        return 0.0, lost * rho_d2d * float(code.gamma_d2d)
    full_bs = rho_bs * float(code.gamma_bs)
    if not hybrid:
        return lost * full_bs, 0.0
    beta = float(code.beta)
    mixed_bs = rho_bs * (r - i) * beta
    mixed_d2d = rho_d2d * i * beta
    if mixed_bs + mixed_d2d < full_bs:
        return lost * mixed_bs, lost * mixed_d2d
    return lost * full_bs, 0.0


def download_choice_cost(available, code, rho_bs, rho_d2d, file_size, hybrid):
    """(bs_cost, d2d_cost) of serving one request with ``available`` nodes."""
    i = available
    h = code.h
    alpha = float(code.alpha)
    if i >= h:
        return 0.0, rho_d2d * h * alpha
    full_bs = rho_bs * file_size
    if hybrid and i > 0:
        mixed_bs = rho_bs * (h - i) * alpha
        mixed_d2d = rho_d2d * i * alpha
        if mixed_bs + mixed_d2d < full_bs:
            return mixed_bs, mixed_d2d
    return full_bs, 0.0


def lrc_epoch_cost(alive_mask, code, rho_bs, rho_d2d):
    """(bs_cost, d2d_cost) of one LRC repair epoch from a per-node alive mask.

    Groups hold r+1 nodes each.  A single loss in a group is repaired locally
    (gamma_d2d bits over D2D).  All other lost nodes need a global rebuild of
    h*alpha bits, served over D2D while the cell still has at least h storage
    nodes in total, and from the BS otherwise.
    """
    group_size = code.r + 1
    groups = alive_mask.reshape(code.groups, group_size)
    losses = group_size - groups.sum(axis=1)
    local = int((losses == 1).sum())
    global_ = int(losses[losses >= 2].sum())
    total_lost = int(losses.sum())
    bs = d2d = 0.0
    d2d += local * rho_d2d * float(code.gamma_d2d)
    if total_lost <= code.m - code.h:
        d2d += global_ * rho_d2d * float(code.h * code.alpha)
    else:
        bs += global_ * rho_bs * float(code.gamma_bs)
    return bs, d2d


# ---------------------------------------------------------------------------
# Monte-Carlo estimators (one repair interval at a time)


def repair_rate_mc(params, code, delta, hybrid=False, p=None, n=1_000_000, seed=1):
    """MC estimate of (bs_rate, d2d_rate, stderr_total) for repair."""
    rng = np.random.default_rng(seed)
    if p is None:
        p = math.exp(-params.mu * delta)
    m = code.m
    if code.family.value == "lrc":
        group_size = code.r + 1
        losses = rng.binomial(group_size, 1.0 - p, size=(n, code.groups))
        local = (losses == 1).sum(axis=1)
        heavy = np.where(losses >= 2, losses, 0).sum(axis=1)
        total_lost = losses.sum(axis=1)
        global_d2d = np.where(total_lost <= m - code.h, heavy, 0)
        global_bs = heavy - global_d2d
        costs = np.empty((n, 2))
        costs[:, 0] = global_bs * (params.rho_bs * float(code.gamma_bs))
        costs[:, 1] = local * (params.rho_d2d * float(code.gamma_d2d)) + global_d2d * (
            params.rho_d2d * float(code.h * code.alpha)
        )
    else:
        survivors = rng.binomial(m, p, size=n)
        table = np.array(
            [
                repair_choice_cost(i, code, params.rho_bs, params.rho_d2d, hybrid)
                for i in range(m + 1)
            ]
        )
        costs = table[survivors]
    scale = 1.0 / (params.file_size * delta)
    totals = costs.sum(axis=1) * scale
    bs_rate = costs[:, 0].mean() * scale
    d2d_rate = costs[:, 1].mean() * scale
    stderr = totals.std(ddof=1) / math.sqrt(n)
    return bs_rate, d2d_rate, stderr


def download_rate_mc(params, code, delta, hybrid=False, mu=None, n=2_000_000, seed=2):
    """MC estimate of (bs_rate, d2d_rate, stderr_total) for downloads.

    Requests arrive Poisson, so the phase within the interval is uniform and
    node availability at phase t is Binomial(m, exp(-mu t)).
    """
    rng = np.random.default_rng(seed)
    mu = params.mu if mu is None else mu
    t = rng.uniform(0.0, delta, size=n)
    avail = rng.binomial(code.m, np.exp(-mu * t))
    table = np.array(
        [
            download_choice_cost(
                i, code, params.rho_bs, params.rho_d2d, params.file_size, hybrid
            )
            for i in range(code.m + 1)
        ]
    )
    costs = table[avail]
    rate = params.M * params.omega / params.file_size
    totals = costs.sum(axis=1) * rate
    stderr = totals.std(ddof=1) / math.sqrt(n)
    return costs[:, 0].mean() * rate, costs[:, 1].mean() * rate, stderr


# ---------------------------------------------------------------------------
# availability via the absorbing pure-death chain


def survival_absorbing(t, j, m, mu):
    """P[at least j of m nodes alive at t], via expm of the death chain.

    States m, m-1, ..., j are transient with death rate i*mu; state j-1
    absorbs.  Survival is the total transient mass at time t.
    """
    size = m - j + 2
    gen = np.zeros((size, size))
    for idx, i in enumerate(range(m, j - 1, -1)):
        gen[idx, idx] = -i * mu
        gen[idx, idx + 1] = i * mu
    probs = linalg.expm(gen * t)[0]
    return float(probs[:-1].sum())


def avail_prob_quad(j, m, mu, delta):
    """(1/delta) * integral of the absorbing-chain survival over one interval."""
    value, err = integrate.quad(
        survival_absorbing, 0.0, delta, args=(j, m, mu), limit=200, epsabs=1e-12, epsrel=1e-12
    )
    return value / delta, err / delta


# ---------------------------------------------------------------------------
# incoming-class chain, replicated Gillespie


def class_chain_mc(
    lambda_c, mu, delta, n_intervals=2000, replicas=1000, burn=200, seed=3, s_max=40
):
    """Empirical pre/post-repair class-size laws from replicated chains.

    Each replica tracks one storage class through repeated repair intervals:
    births at rate lambda_c, deaths at rate (size * mu), and a repair map that
    refills an empty class with one node at each epoch.  Post-burn intervals
    are tallied per replica; the q[0] standard error comes from the spread of
    per-replica means, so within-chain correlation is priced in honestly.
    """
    rng = np.random.default_rng(seed)
    size = np.ones(replicas, dtype=np.int64)
    q_counts = np.zeros((replicas, s_max), dtype=np.int64)
    qt_counts = np.zeros((replicas, s_max), dtype=np.int64)
    rows = np.arange(replicas)
    for interval in range(n_intervals):
        remaining = np.full(replicas, float(delta))
        active = np.ones(replicas, dtype=bool)
        while True:
            rates = lambda_c + size * mu
            idx = np.flatnonzero(active & (rates > 0))
            if idx.size == 0:
                break
            dt = rng.exponential(1.0, size=idx.size) / rates[idx]
            over = dt >= remaining[idx]
            active[idx[over]] = False
            step = idx[~over]
            if step.size:
                remaining[step] -= dt[~over]
                birth = rng.random(step.size) < lambda_c / rates[step]
                size[step] += np.where(birth, 1, -1)
        if interval >= burn:
            q_counts[rows, np.minimum(size, s_max - 1)] += 1
        size = np.where(size == 0, 1, size)
        if interval >= burn:
            qt_counts[rows, np.minimum(size, s_max - 1)] += 1
    kept = n_intervals - burn
    q = q_counts.sum(axis=0) / (replicas * kept)
    q_tilde = qt_counts.sum(axis=0) / (replicas * kept)
    per_replica_q0 = q_counts[:, 0] / kept
    stderr_q0 = per_replica_q0.std(ddof=1) / math.sqrt(replicas)
    return q, q_tilde, float(stderr_q0)


def extinction_time_mc(q_tilde, mu, n=2_000_000, seed=4):
    """Mean time for a class to die out (no arrivals), starting from q_tilde."""
    rng = np.random.default_rng(seed)
    sizes = rng.choice(len(q_tilde), size=n, p=q_tilde / q_tilde.sum())
    total = np.zeros(n)
    level = sizes.copy()
    while (level > 0).any():
        mask = level > 0
        total[mask] += rng.exponential(1.0, size=int(mask.sum())) / (level[mask] * mu)
        level[mask] -= 1
    stderr = total.std(ddof=1) / math.sqrt(n)
    return float(total.mean()), float(stderr)


# ---------------------------------------------------------------------------
# high-precision closed forms (mpmath), used as secondary cross-checks


def p_d2d_mp(h, m, mu, delta, dps=50):
    """Partial-fraction availability computed in mpmath arbitrary precision."""
    import mpmath

    with mpmath.workdps(dps):
        total = mpmath.mpf(0)
        for i in range(h, m + 1):
            w = mpmath.mpf(1)
            for j in range(h, m + 1):
                if j != i:
                    w *= mpmath.mpf(j) / (j - i)
            rate = i * mu
            total += w * (1 - mpmath.e ** (-rate * delta)) / rate
        return float(total / delta)


def request_phase_pdf_mp(t, ell, omega, delta, dps=60, terms=4000):
    """Stationary phase density via direct high-precision series summation."""
    import mpmath

    with mpmath.workdps(dps):
        t_, w_, d_ = mpmath.mpf(t), mpmath.mpf(omega), mpmath.mpf(delta)
        series = mpmath.mpf(0)
        for i in range(terms):
            x = t_ + i * d_
            if x > 0:
                series += x ** (ell - 1) * mpmath.e ** (-w_ * d_ * i)
        value = w_**ell * mpmath.e ** (-w_ * t_) / mpmath.factorial(ell - 1) * series
        return float(value)
