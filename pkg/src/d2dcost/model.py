"""Core types for device-to-device (D2D) distributed storage in a cellular cell.

A file of ``file_size`` bits is erasure-coded over ``m`` storage nodes inside a
single cell whose population behaves like an M/M/inf queue: nodes arrive with
aggregate rate ``M * lam`` and stay for an exponential time with rate ``mu``.
Every ``delta`` time units a repair process replaces the symbols lost to node
departures, either from surviving storage nodes (D2D links) or from the base
station (BS).  Requests for the file arrive with aggregate rate ``M * omega``
and are served over D2D links when at least ``h`` storage nodes are present,
otherwise by the BS.

This module holds the parameter objects shared by the analytic formulas, the
event simulator and the code search: network rates, code-family geometry, and
cost breakdowns.  Per-node transfer sizes (``alpha``, ``beta``, ``gamma_*``)
are carried as exact :class:`fractions.Fraction` values so that budget checks
and threshold comparisons never hinge on float rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Union

Rational = Union[int, Fraction]


class CodeFamily(str, Enum):
    """Erasure-code families supported by the cost model."""

    REPLICATION = "replication"
    MDS = "mds"
    MSR = "msr"
    MBR = "mbr"
    LRC = "lrc"


class Scheme(str, Enum):
    """Repair/download policy: conventional (all-or-nothing D2D) or hybrid.

    Under the hybrid scheme, transfers that cannot be served entirely over
    D2D links are split: the bits held by surviving storage nodes come over
    D2D and only the missing remainder comes from the BS, whenever that split
    is strictly cheaper than a pure BS transfer.
    """

    CONVENTIONAL = "conventional"
    HYBRID = "hybrid"


class CodeConstraintError(ValueError):
    """A requested (family, m, h, r) combination violates the family's constraints."""


def _as_fraction(value: Union[int, float, Fraction], name: str) -> Fraction:
    if isinstance(value, bool):
        raise TypeError(f"{name} must be a number, got bool")
    try:
        frac = Fraction(value)
    except (TypeError, ValueError) as exc:
        raise TypeError(f"{name} must be a rational number, got {value!r}") from exc
    return frac


@dataclass(frozen=True)
class NetworkParams:
    """Cell-level rates and prices.

    M:         expected number of nodes in the cell (M/M/inf mean, = arrival/mu).
    mu:        per-node departure rate (1/t.u.).  mu = 0 models a static cell.
    lam:       per-node arrival-rate share; aggregate arrivals are M * lam.
               Defaults to mu, which keeps the population mean at M.
    omega:     per-node request rate; aggregate request rate is M * omega.
    lambda_c:  per-class arrival rate of nodes that already carry a coded
               symbol ("incoming" storage nodes).  0 disables the feature.
    rho_bs:    price of one bit over the BS downlink (c.u./bit).
    rho_d2d:   price of one bit over a D2D link (c.u./bit).
    file_size: F, the stored file size in bits.
    phi:       period of the storage-node directory refresh (informational;
               requests are assumed to see the true node availability).
    """

    M: float
    mu: float
    omega: float
    lam: float | None = None
    lambda_c: float = 0.0
    rho_bs: float = 1.0
    rho_d2d: float = 1.0
    file_size: float = 1.0
    phi: float | None = None

    def __post_init__(self) -> None:
        if self.lam is None:
            object.__setattr__(self, "lam", float(self.mu))
        if self.M <= 0:
            raise ValueError("M must be positive")
        if self.mu < 0:
            raise ValueError("mu must be non-negative")
        if self.lam < 0:
            raise ValueError("lam must be non-negative")
        if self.omega < 0:
            raise ValueError("omega must be non-negative")
        if not 0 <= self.lambda_c <= max(self.mu, 0):
            raise ValueError("lambda_c must satisfy 0 <= lambda_c <= mu")
        if self.rho_bs <= 0 or self.rho_d2d <= 0:
            raise ValueError("rho_bs and rho_d2d must be positive")
        if self.file_size <= 0:
            raise ValueError("file_size must be positive")
        if self.phi is not None and self.phi < 0:
            raise ValueError("phi must be non-negative when given")

    @property
    def price_ratio(self) -> float:
        """rho = rho_bs / rho_d2d, the BS-to-D2D price ratio."""
        return self.rho_bs / self.rho_d2d

    @property
    def request_rate(self) -> float:
        """Aggregate request arrival rate M * omega."""
        return self.M * self.omega

    @property
    def arrival_rate(self) -> float:
        """Aggregate node arrival rate M * lam."""
        return self.M * self.lam


@dataclass(frozen=True)
class CodeSpec:
    """Geometry of one concrete [n, k] code spread over m storage nodes.

    alpha:     bits stored per node.
    beta:      bits fetched from each helper during a node repair.
    gamma_d2d: total bits transferred for one D2D node repair (r * beta,
               except LRC local repairs which also use r * beta = gamma_d2d).
    gamma_bs:  bits the BS sends to restore one node (= alpha).
    h:         storage nodes that must be contacted to retrieve the file.
    r:         helper nodes contacted per repair (repair locality for LRC).
    groups:    number of local repair groups (1 unless LRC).
    """

    family: CodeFamily
    m: int
    h: int
    r: int
    n: int
    k: int
    alpha: Fraction
    beta: Fraction
    gamma_d2d: Fraction
    gamma_bs: Fraction
    groups: int = 1

    def __post_init__(self) -> None:
        if self.m < 2:
            raise CodeConstraintError("m must be at least 2")
        if self.k < 1:
            raise CodeConstraintError("k must be at least 1")
        if self.groups < 1:
            raise CodeConstraintError("groups must be at least 1")
        if self.family is CodeFamily.LRC:
            if not 1 <= self.r < self.h:
                raise CodeConstraintError("LRC requires 1 <= r < h")
        else:
            if not 1 <= self.h <= self.r < self.m:
                raise CodeConstraintError("requires 1 <= h <= r < m")
        if not self.beta <= self.alpha <= self.gamma_d2d:
            raise CodeConstraintError("per-node sizes must satisfy beta <= alpha <= gamma_d2d")
        file_size = self.file_size
        if self.gamma_d2d > file_size:
            raise CodeConstraintError("gamma_d2d may not exceed the file size")
        if self.family in (CodeFamily.MDS, CodeFamily.REPLICATION) and self.gamma_d2d != file_size:
            raise CodeConstraintError("MDS-type repair transfers exactly one file size")

    @property
    def rate(self) -> Fraction:
        """Code rate R = k / n."""
        return Fraction(self.k, self.n)

    @property
    def file_size(self) -> Fraction:
        """F recovered from alpha * m * R; exact because alpha is rational."""
        return self.alpha * self.m * self.k / self.n

    def label(self) -> str:
        """Short human-readable tag such as ``mds[9,3,3]`` or ``rep(x3)``."""
        if self.family is CodeFamily.REPLICATION:
            return f"rep(x{self.m})"
        return f"{self.family.value}[{self.m},{self.h},{self.r}]"


def derive_code(
    family: CodeFamily | str,
    m: int,
    h: int | None = None,
    r: int | None = None,
    file_size: Union[int, float, Fraction] = 1,
) -> CodeSpec:
    """Build the :class:`CodeSpec` for a family from (m, h, r) and the file size.

    Replication needs only ``m`` (h = r = 1 implicitly).  All derived per-node
    quantities are exact rationals of ``file_size``.

    Raises :class:`CodeConstraintError` when the combination is not realizable:
    MDS requires r = h; MSR requires r >= max(2(h-1), 1) (so r = h is possible
    only for h <= 2); MBR requires r >= h; LRC requires r < h and (r+1) | m.
    """
    fam = CodeFamily(family)
    if not isinstance(m, int) or isinstance(m, bool):
        raise TypeError("m must be an int")
    if m < 2:
        raise CodeConstraintError("m must be at least 2")
    F = _as_fraction(file_size, "file_size")
    if F <= 0:
        raise ValueError("file_size must be positive")

    if fam is CodeFamily.REPLICATION:
        if h not in (None, 1) or r not in (None, 1):
            raise CodeConstraintError("replication fixes h = r = 1")
        return CodeSpec(
            family=fam, m=m, h=1, r=1, n=m, k=1,
            alpha=F, beta=F, gamma_d2d=F, gamma_bs=F,
        )

    if h is None:
        raise CodeConstraintError(f"{fam.value} requires h")
    if r is None:
        if fam is not CodeFamily.MDS:
            raise CodeConstraintError(f"{fam.value} requires r")
        r = h
    if not isinstance(h, int) or not isinstance(r, int):
        raise TypeError("h and r must be ints")
    if not 1 <= h < m:
        raise CodeConstraintError("requires 1 <= h < m")

    if fam is CodeFamily.MDS:
        if r != h:
            raise CodeConstraintError("MDS repair contacts exactly r = h = k nodes")
        k = h
        alpha = F / k
        return CodeSpec(
            family=fam, m=m, h=h, r=r, n=m, k=k,
            alpha=alpha, beta=alpha, gamma_d2d=F, gamma_bs=alpha,
        )

    if fam is CodeFamily.MSR:
        if r < max(2 * (h - 1), 1):
            raise CodeConstraintError("MSR requires r >= max(2(h-1), 1)")
        if r >= m:
            raise CodeConstraintError("MSR requires r < m")
        stripe = r - h + 1
        k = h * stripe
        alpha = F / h
        beta = F / k
        return CodeSpec(
            family=fam, m=m, h=h, r=r, n=m * stripe, k=k,
            alpha=alpha, beta=beta, gamma_d2d=r * beta, gamma_bs=alpha,
        )

    if fam is CodeFamily.MBR:
        if not h <= r < m:
            raise CodeConstraintError("MBR requires h <= r < m")
        k = h * r - math.comb(h, 2)
        denom = 2 * r - h + 1
        alpha = F / h * Fraction(2 * r, denom)
        beta = F / h * Fraction(2, denom)
        return CodeSpec(
            family=fam, m=m, h=h, r=r, n=m * r, k=k,
            alpha=alpha, beta=beta, gamma_d2d=r * beta, gamma_bs=alpha,
        )

    if fam is CodeFamily.LRC:
        if not 1 <= r < h:
            raise CodeConstraintError("LRC requires r < h")
        if m % (r + 1) != 0:
            raise CodeConstraintError("LRC requires (r+1) to divide m")
        k = r * h
        alpha = F / h * Fraction(r + 1, r)
        return CodeSpec(
            family=fam, m=m, h=h, r=r, n=m * (r + 1), k=k,
            alpha=alpha, beta=alpha, gamma_d2d=r * alpha, gamma_bs=alpha,
            groups=m // (r + 1),
        )

    raise CodeConstraintError(f"unknown family {family!r}")


def poisson_occupancy(i: int, M: float, lam: float, mu: float) -> float:
    """Stationary probability that the cell holds exactly i nodes.

    The M/M/inf population is Poisson with mean M * lam / mu.
    """
    if i < 0:
        raise ValueError("i must be non-negative")
    if M <= 0 or lam <= 0 or mu <= 0:
        raise ValueError("rates must be positive")
    mean = M * lam / mu
    return math.exp(i * math.log(mean) - mean - math.lgamma(i + 1))


def binomial_pmf(i: int, m: int, p: float) -> float:
    """P[Binomial(m, p) = i] with an exact integer binomial coefficient."""
    if not 0 <= i <= m:
        raise ValueError("i must lie in 0..m")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    return math.comb(m, i) * p**i * (1.0 - p) ** (m - i)


@dataclass(frozen=True)
class CostBreakdown:
    """Cost rates in c.u. per bit of stored file per time unit.

    ``normalized`` divides the total by M * omega * rho_bs, the rate paid when
    every request is served by the BS and nothing is stored; distributed
    storage is beneficial exactly when it is below 1.  NaN when omega = 0.
    """

    repair_bs: float
    repair_d2d: float
    download_bs: float
    download_d2d: float
    total: float
    normalized: float

    def __post_init__(self) -> None:
        parts = self.repair_bs + self.repair_d2d + self.download_bs + self.download_d2d
        if not math.isclose(parts, self.total, rel_tol=1e-9, abs_tol=1e-9):
            raise ValueError("total must equal the sum of the four components")

    @classmethod
    def build(
        cls,
        repair_bs: float,
        repair_d2d: float,
        download_bs: float,
        download_d2d: float,
        params: NetworkParams,
    ) -> "CostBreakdown":
        total = repair_bs + repair_d2d + (download_bs + download_d2d)
        baseline = params.M * params.omega * params.rho_bs
        normalized = total / baseline if baseline > 0 else math.nan
        return cls(repair_bs, repair_d2d, download_bs, download_d2d, total, normalized)

    def as_dict(self) -> dict[str, float]:
        return {
            "repair_bs": self.repair_bs,
            "repair_d2d": self.repair_d2d,
            "download_bs": self.download_bs,
            "download_d2d": self.download_d2d,
            "total": self.total,
            "normalized": self.normalized,
        }


# Default operating point used across examples and figure configs: one file
# block, symmetric arrivals/departures, and D2D bits priced at 1 c.u.
DEFAULT_PARAMS = NetworkParams(M=30.0, mu=1.0, omega=0.02, rho_bs=40.0, rho_d2d=1.0)
