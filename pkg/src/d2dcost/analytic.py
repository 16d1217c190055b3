"""Closed-form communication-cost rates for periodically repaired D2D storage.

All costs are rates in c.u. per stored bit per time unit, for a cell at
stationarity.  The storage state is sampled at repair epochs ``k * delta``:
each of the ``m`` storage nodes independently survives one repair interval
with probability ``p = exp(-mu * delta)``, which makes the number of
survivors binomial and yields the repair-cost rates.  Download costs are
driven by the availability seen by a request arriving in stationary phase
within an interval: the time until fewer than ``j`` storage nodes remain is
hypoexponential with rates ``m*mu, (m-1)*mu, ..., j*mu``, integrated against
the uniform phase of the request.

Sums over the hypoexponential stages carry alternating-sign weights that grow
combinatorially, so the weights are computed in exact rational arithmetic and
only the final accumulation happens in floats (``math.fsum``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

from .model import (
    CodeFamily,
    CodeSpec,
    CostBreakdown,
    NetworkParams,
    Scheme,
    binomial_pmf,
)


@dataclass(frozen=True)
class CostQuery:
    """One cost evaluation point: network, code, policy and repair interval."""

    params: NetworkParams
    code: CodeSpec
    delta: float
    scheme: Scheme = Scheme.CONVENTIONAL

    def __post_init__(self) -> None:
        if not (self.delta >= 0):  # also rejects NaN
            raise ValueError("delta must be non-negative")
        if float(self.code.file_size) != self.params.file_size:
            raise ValueError(
                "code was derived for a different file size; rebuild it with "
                "derive_code(..., file_size=params.file_size)"
            )

    @property
    def survival_prob(self) -> float:
        """Probability that one storage node outlives a repair interval."""
        if math.isinf(self.delta):
            return 0.0
        return math.exp(-self.params.mu * self.delta)


# ---------------------------------------------------------------------------
# hypoexponential machinery


@lru_cache(maxsize=None)
def _pf_weights(h: int, m: int) -> tuple[Fraction, ...]:
    """Exact partial-fraction weights w_i = prod_{j=h..m, j!=i} j/(j-i)."""
    weights = []
    for i in range(h, m + 1):
        num = 1
        den = 1
        for j in range(h, m + 1):
            if j != i:
                num *= j
                den *= j - i
        weights.append(Fraction(num, den))
    return tuple(weights)


def partial_fraction_weight(i: int, h: int, m: int) -> float:
    """Weight of the rate-``i*mu`` stage in the hypoexponential tail for S_h.

    S_h is the time until fewer than h of m initially present nodes remain.
    The weights alternate in sign and sum to exactly 1.
    """
    if not 1 <= h <= m:
        raise ValueError("need 1 <= h <= m")
    if not h <= i <= m:
        raise ValueError("need h <= i <= m")
    return float(_pf_weights(h, m)[i - h])


def hypoexp_survival(t: float, h: int, m: int, mu: float) -> float:
    """P[S_h > t]: at least h of m nodes still present t time units after repair."""
    if t < 0:
        raise ValueError("t must be non-negative")
    if not 1 <= h <= m:
        raise ValueError("need 1 <= h <= m")
    if mu <= 0:
        raise ValueError("mu must be positive")
    weights = _pf_weights(h, m)
    terms = [float(w) * math.exp(-i * mu * t) for i, w in zip(range(h, m + 1), weights)]
    return min(1.0, max(0.0, math.fsum(terms)))


def _avail_prob(j: int, m: int, mu: float, delta: float) -> float:
    """Probability that a stationary-phase request still finds >= j nodes.

    Equals (1/delta) * integral_0^delta P[S_j > t] dt.  Limits: 1 at delta=0
    (or mu=0), 0 at delta=inf.
    """
    if j > m:
        return 0.0
    if mu == 0.0 or delta == 0.0:
        return 1.0
    if math.isinf(delta):
        return 0.0
    weights = _pf_weights(j, m)
    terms = []
    for i, w in zip(range(j, m + 1), weights):
        rate = i * mu
        terms.append(float(w) * (-math.expm1(-rate * delta)) / rate)
    return min(1.0, max(0.0, math.fsum(terms) / delta))


def p_d2d(params: NetworkParams, code: CodeSpec, delta: float) -> float:
    """Probability that a request is served over D2D links (>= h nodes left)."""
    if delta < 0:
        raise ValueError("delta must be non-negative")
    return _avail_prob(code.h, code.m, params.mu, delta)


# ---------------------------------------------------------------------------
# branch thresholds shared with the simulator


def repair_bs_cutoff(params: NetworkParams, code: CodeSpec, scheme: Scheme) -> int:
    """Largest survivor count for which a lost node is restored from the BS.

    Conventional repair never mixes sources, so anything below r survivors is
    a BS repair (cutoff r-1).  The hybrid scheme pulls i*beta bits from the i
    survivors and only (r-i)*beta from the BS whenever that is strictly
    cheaper, which happens above c = rho_bs/(rho_bs-rho_d2d) * (r - gamma_bs/beta).
    """
    r = code.r
    if scheme is Scheme.CONVENTIONAL or params.rho_bs <= params.rho_d2d:
        return r - 1
    ratio = params.rho_bs / (params.rho_bs - params.rho_d2d)
    c = ratio * float(r - code.gamma_bs / code.beta)
    return min(math.floor(c), r - 1)


def download_bs_cutoff(params: NetworkParams, code: CodeSpec, scheme: Scheme) -> int:
    """Largest availability for which a request is served entirely by the BS.

    Hybrid downloads fetch i*alpha bits from i < h available nodes plus
    (h-i)*alpha from the BS when strictly cheaper, i.e. above
    d = rho_bs/(rho_bs-rho_d2d) * (h - F/alpha).
    """
    h = code.h
    if scheme is Scheme.CONVENTIONAL or params.rho_bs <= params.rho_d2d:
        return h - 1
    ratio = params.rho_bs / (params.rho_bs - params.rho_d2d)
    d = ratio * float(h - code.file_size / code.alpha)
    return min(math.floor(d), h - 1)


# ---------------------------------------------------------------------------
# repair-cost rates


def _repair_split(
    params: NetworkParams,
    code: CodeSpec,
    delta: float,
    p: float,
    scheme: Scheme,
) -> tuple[float, float]:
    """(BS, D2D) repair-cost rates for non-LRC codes, per stored bit.

    ``p`` is the per-node probability of surviving one repair interval; the
    incoming-node scenario substitutes its own effective value.
    """
    if math.isinf(delta):
        return 0.0, 0.0
    m, r = code.m, code.r
    file_size = params.file_size
    gamma_bs = float(code.gamma_bs)
    gamma_d2d = float(code.gamma_d2d)
    beta = float(code.beta)
    cutoff = repair_bs_cutoff(params, code, scheme)

    bs_terms = []
    d2d_terms = []
    for i in range(m + 1):
        lost = (m - i) * binomial_pmf(i, m, p)
        if lost == 0.0:
            continue
        if i <= cutoff:
            bs_terms.append(params.rho_bs * gamma_bs * lost)
        elif i < r:
            bs_terms.append(params.rho_bs * (r - i) * beta * lost)
            d2d_terms.append(params.rho_d2d * i * beta * lost)
        else:
            d2d_terms.append(params.rho_d2d * gamma_d2d * lost)
    scale = 1.0 / (file_size * delta)
    return math.fsum(bs_terms) * scale, math.fsum(d2d_terms) * scale


def repair_cost(query: CostQuery) -> float:
    """Expected repair-cost rate for replication/MDS/MSR/MBR codes.

    Survivor counts below r force whole-symbol BS repairs; at r or more the
    lost nodes are rebuilt over D2D at gamma_d2d bits each.  The hybrid scheme
    additionally mixes sources between the two regimes (see repair_bs_cutoff).
    """
    if query.code.family is CodeFamily.LRC:
        raise ValueError("LRC repair is group-local; use lrc_repair_cost")
    if query.delta <= 0:
        raise ValueError("delta must be positive; delta = 0 is a limit (limit_cost_zero)")
    bs, d2d = _repair_split(
        query.params, query.code, query.delta, query.survival_prob, query.scheme
    )
    return bs + d2d


def repair_cost_bs_only(query: CostQuery) -> float:
    """Repair-cost rate when every lost node is restored from the BS.

    Cheaper than D2D repair whenever rho_bs * gamma_bs < rho_d2d * gamma_d2d,
    i.e. for price ratios below gamma_d2d / gamma_bs; the conventional
    dispatcher switches to this rate in that regime.
    """
    if query.delta <= 0:
        raise ValueError("delta must be positive; delta = 0 is a limit (limit_cost_zero)")
    if math.isinf(query.delta):
        return 0.0
    params, code = query.params, query.code
    lost = code.m * (-math.expm1(-params.mu * query.delta))
    return params.rho_bs * float(code.gamma_bs) * lost / (params.file_size * query.delta)


def hybrid_repair_cost(query: CostQuery) -> float:
    """Repair-cost rate under the hybrid (mixed-source) repair policy.

    Collapses to the conventional rate when rho_bs <= rho_d2d, and for code
    geometries whose partial window is empty (replication, MDS, LRC locality).
    """
    if query.code.family is CodeFamily.LRC:
        raise ValueError("LRC repair is group-local; use lrc_repair_cost")
    if query.delta <= 0:
        raise ValueError("delta must be positive; delta = 0 is a limit (limit_cost_zero)")
    bs, d2d = _repair_split(
        query.params, query.code, query.delta, query.survival_prob, Scheme.HYBRID
    )
    return bs + d2d


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All tuples of ``parts`` non-negative ints summing to ``total``."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


def _lrc_repair_split(
    params: NetworkParams, code: CodeSpec, delta: float, p: float
) -> tuple[float, float]:
    """(BS, D2D) repair-cost rates for an LRC with ``groups`` repair groups.

    A group that lost exactly one node repairs it locally (gamma_d2d bits from
    its r mates).  Nodes in groups with two or more losses fall back to a
    global rebuild, hα bits from any h survivors, which degrades to the BS
    when fewer than h nodes are left in the cell.
    """
    if math.isinf(delta):
        return 0.0, 0.0
    m, r, h = code.m, code.r, code.h
    groups = code.groups
    group_size = r + 1
    q = 1.0 - p

    # expected nodes repaired locally: departed node whose r mates survived
    local = m * p**r * q

    # expected nodes repaired globally: in groups with >= 2 losses, when the
    # cell still holds at least h storage nodes in total
    group_loss_pmf = [binomial_pmf(i, group_size, q) for i in range(group_size + 1)]
    log_g_fact = math.lgamma(groups + 1)
    global_terms = []
    for x in _compositions(groups, group_size + 1):
        lost_total = sum(i * xi for i, xi in enumerate(x))
        if lost_total > m - h:
            continue
        lost_heavy = sum(i * xi for i, xi in enumerate(x) if i >= 2)
        if lost_heavy == 0:
            continue
        coeff = math.exp(log_g_fact - math.fsum(math.lgamma(xi + 1) for xi in x))
        prob = coeff * math.prod(group_loss_pmf[i] ** xi for i, xi in enumerate(x))
        global_terms.append(lost_heavy * prob)
    global_ = math.fsum(global_terms)

    bs_count = m * q - local - global_
    scale = 1.0 / (params.file_size * delta)
    bs = params.rho_bs * float(code.gamma_bs) * bs_count * scale
    d2d = (
        params.rho_d2d
        * (float(code.gamma_d2d) * local + float(code.h * code.alpha) * global_)
        * scale
    )
    return bs, d2d


def lrc_repair_cost(query: CostQuery) -> float:
    """Expected repair-cost rate for locally repairable codes."""
    if query.code.family is not CodeFamily.LRC:
        raise ValueError("lrc_repair_cost applies to LRC codes only")
    if query.delta <= 0:
        raise ValueError("delta must be positive; delta = 0 is a limit (limit_cost_zero)")
    bs, d2d = _lrc_repair_split(
        query.params, query.code, query.delta, query.survival_prob
    )
    return bs + d2d


# ---------------------------------------------------------------------------
# download-cost rates


def _download_split(
    params: NetworkParams,
    code: CodeSpec,
    delta: float,
    scheme: Scheme,
    mu: float | None = None,
) -> tuple[float, float]:
    """(BS, D2D) download-cost rates; ``mu`` may be the effective rate mu_tilde."""
    mu = params.mu if mu is None else mu
    m, h = code.m, code.h
    request_rate = params.M * params.omega
    alpha = float(code.alpha)
    d2d_full = params.rho_d2d * float(code.h * code.alpha / code.file_size)
    cutoff = download_bs_cutoff(params, code, scheme)

    served_d2d = _avail_prob(h, m, mu, delta)
    if cutoff == h - 1:
        # every request below h availability goes entirely to the BS
        bs = request_rate * params.rho_bs * (1.0 - served_d2d)
        return bs, request_rate * d2d_full * served_d2d

    # hybrid split: requests seeing i available nodes, cutoff < i < h, fetch
    # i*alpha bits over D2D and (h-i)*alpha from the BS
    tail = [_avail_prob(j, m, mu, delta) for j in range(1, h + 1)]  # P[avail >= j]
    bs_terms = [params.rho_bs * (1.0 - tail[0])]
    d2d_terms = [d2d_full * served_d2d]
    inv_f = 1.0 / params.file_size
    for i in range(1, h):
        mass = tail[i - 1] - tail[i]  # P[avail == i]
        if i <= cutoff:
            bs_terms.append(params.rho_bs * mass)
        else:
            bs_terms.append(params.rho_bs * (h - i) * alpha * inv_f * mass)
            d2d_terms.append(params.rho_d2d * i * alpha * inv_f * mass)
    return (
        request_rate * math.fsum(bs_terms),
        request_rate * math.fsum(d2d_terms),
    )


def download_cost(query: CostQuery) -> float:
    """Expected download-cost rate under conventional all-or-nothing serving.

    Monotone in delta: increasing when rho_bs/rho_d2d exceeds h*alpha/F
    (storage pays off, so rarer repairs hurt), decreasing below it, constant
    at equality.
    """
    bs, d2d = _download_split(
        query.params, query.code, query.delta, Scheme.CONVENTIONAL
    )
    return bs + d2d


def hybrid_download_cost(query: CostQuery) -> float:
    """Expected download-cost rate when partial D2D fetches are allowed."""
    bs, d2d = _download_split(query.params, query.code, query.delta, Scheme.HYBRID)
    return bs + d2d


# ---------------------------------------------------------------------------
# combined


def limit_cost_zero(params: NetworkParams, code: CodeSpec) -> CostBreakdown:
    """Overall cost rate in the limit of continuous repair (delta -> 0).

    Every transfer happens over D2D: repairs occur at the node-departure rate
    m*mu at gamma_d2d bits each, and every request is served at h*alpha bits.
    Independent of the scheme; both hybrid branches degenerate.
    """
    repair_d2d = params.rho_d2d * float(code.gamma_d2d / code.file_size * code.m) * params.mu
    download_d2d = params.rho_d2d * (
        params.M * params.omega * float(code.h * code.alpha / code.file_size)
    )
    return CostBreakdown.build(0.0, repair_d2d, 0.0, download_d2d, params)


def limit_cost_infinity(params: NetworkParams) -> CostBreakdown:
    """Overall cost rate when repair never happens: all requests go to the BS."""
    download_bs = params.M * params.omega * params.rho_bs
    return CostBreakdown.build(0.0, 0.0, download_bs, 0.0, params)


def overall_cost(query: CostQuery) -> CostBreakdown:
    """Repair plus download cost rate, dispatched by family and scheme.

    delta = 0 and delta = inf are answered by the analytic limits.  Under the
    conventional scheme, price ratios below gamma_d2d/gamma_bs make D2D repair
    uneconomical and the BS-only repair rate is used instead.
    """
    params, code, delta = query.params, query.code, query.delta
    if delta == 0:
        return limit_cost_zero(params, code)
    if math.isinf(delta):
        return limit_cost_infinity(params)

    p = query.survival_prob
    if code.family is CodeFamily.LRC:
        repair = _lrc_repair_split(params, code, delta, p)
    elif query.scheme is Scheme.CONVENTIONAL and params.price_ratio < float(
        code.gamma_d2d / code.gamma_bs
    ):
        repair = (repair_cost_bs_only(query), 0.0)
    else:
        repair = _repair_split(params, code, delta, p, query.scheme)

    download = _download_split(params, code, delta, query.scheme)
    return CostBreakdown.build(repair[0], repair[1], download[0], download[1], params)


# ---------------------------------------------------------------------------
# test oracle: stationary phase density of a renewal-split Poisson request


def request_phase_pdf(t: float, ell: int, omega: float, delta: float) -> float:
    """Density of the arrival phase of the ell-th request within an interval.

    Measures the time of the ell-th-to-last request before a repair epoch when
    requests form a rate-``omega`` Poisson process; for ell = 1 the geometric
    closed form applies, and as ell grows the density flattens to the uniform
    1/delta (exponentially fast), which is why stationary-phase integrals use
    the uniform law.  Series truncated with relative tail below 1e-12.
    """
    if not ell >= 1:
        raise ValueError("ell must be a positive integer")
    if omega <= 0 or delta <= 0:
        raise ValueError("omega and delta must be positive")
    if not 0 <= t <= delta:
        raise ValueError("t must lie in [0, delta]")
    if ell == 1:
        return omega * math.exp(-omega * t) / (-math.expm1(-omega * delta))

    log_terms: list[float] = []
    peak = -math.inf
    i = 0
    while True:
        x = t + i * delta
        if x > 0.0:
            lt = (ell - 1) * math.log(x) - omega * delta * i
            log_terms.append(lt)
            peak = max(peak, lt)
            nxt = t + (i + 1) * delta
            ratio = (ell - 1) * (math.log(nxt + delta) - math.log(nxt)) - omega * delta
            if lt < peak + math.log(1e-17) and ratio < -1e-3:
                break
        i += 1
        if i > 5_000_000:
            raise RuntimeError("series did not converge; omega*delta too small")
    series = peak + math.log(math.fsum(math.exp(lt - peak) for lt in log_terms))
    return math.exp(
        ell * math.log(omega) - math.lgamma(ell) - omega * t + series
    )
