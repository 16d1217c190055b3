"""Code enumeration, min-cost curves, and repair-interval optimization."""

import json
import math
from collections import Counter
from importlib import resources

import pytest

from d2dcost import (
    CodeFamily,
    NetworkParams,
    Scheme,
    SearchSpec,
    delta_max,
    delta_opt,
    derive_code,
    enumerate_codes,
    min_cost_curve,
)


@pytest.fixture(scope="module")
def goldens() -> dict:
    text = resources.files("d2dcost").joinpath("data/goldens.json").read_text()
    return json.loads(text)["entries"]


def _params(omega: float = 0.02, rho_bs: float = 40.0) -> NetworkParams:
    return NetworkParams(M=30.0, mu=1.0, omega=omega, rho_bs=rho_bs, rho_d2d=1.0)


def _spec(**overrides) -> SearchSpec:
    base = dict(params=_params(), delta_grid=(0.0, 0.5, 1.0))
    base.update(overrides)
    return SearchSpec(**base)


# ---------------------------------------------------------------------------
# enumeration


def test_enumeration_matches_frozen_census(goldens):
    entry = goldens["enumeration_gamma3_mmax10"]
    codes = enumerate_codes(_spec(
        m_max=entry["config"]["m_max"],
        gamma_budget=entry["config"]["gamma_budget"],
    ))
    assert len(codes) == entry["count"]
    assert codes[0].label() == entry["first"]
    assert codes[-1].label() == entry["last"]


def test_enumeration_family_counts():
    census = Counter(code.family for code in enumerate_codes(_spec()))
    assert census == {
        CodeFamily.REPLICATION: 2,
        CodeFamily.MDS: 31,
        CodeFamily.MSR: 38,
        CodeFamily.MBR: 60,
        CodeFamily.LRC: 24,
    }


def test_enumeration_respects_storage_budget():
    labels = {code.label() for code in enumerate_codes(_spec())}
    assert "mds[9,3,3]" in labels          # 9 * F/3 = 3F, exactly on budget
    assert "mds[9,2,2]" not in labels      # 9 * F/2 blows the 3F budget
    assert "rep(x3)" in labels
    assert "rep(x4)" not in labels
    # coded families start at h = 2; h = 1 would just replicate the file
    assert not any(label.endswith(",1,1]") for label in labels)


def test_enumeration_order_is_deterministic():
    a = enumerate_codes(_spec())
    b = enumerate_codes(_spec())
    assert a == b
    keys = [(c.family.value, c.m, c.h, c.r) for c in a]
    by_family = {}
    for key in keys:
        by_family.setdefault(key[0], []).append(key[1:])
    for family, triples in by_family.items():
        assert triples == sorted(triples), family


def test_budget_scales_with_file_size():
    params = NetworkParams(M=30.0, mu=1.0, omega=0.02, rho_bs=40.0,
                           rho_d2d=1.0, file_size=4.0)
    big = enumerate_codes(_spec(params=params))
    small = enumerate_codes(_spec())
    assert [c.label() for c in big] == [c.label() for c in small]


# ---------------------------------------------------------------------------
# min-cost curve


def test_continuous_repair_winner_is_two_replicas():
    params = _params()
    point = min_cost_curve(_spec())[0]
    assert point.delta == 0.0
    assert point.code.label() == "rep(x2)"
    # gamma_d2d * m * mu + M * omega * h * alpha, all at rho_d2d
    assert point.cost.total == params.rho_d2d * (2 * params.mu + params.M * params.omega)


def test_curve_is_pointwise_no_worse_than_any_single_code():
    from d2dcost import CostQuery, overall_cost

    spec = _spec(delta_grid=(0.0, 0.2, 0.7, 2.0))
    curve = min_cost_curve(spec)
    mds = derive_code(CodeFamily.MDS, 9, 3, 3)
    for point in curve:
        single = overall_cost(CostQuery(spec.params, mds, point.delta))
        assert point.cost.total <= single.total + 1e-12


def test_curve_preserves_grid():
    grid = (0.0, 0.1, 1.0, 5.0)
    curve = min_cost_curve(_spec(delta_grid=grid))
    assert tuple(point.delta for point in curve) == grid


def test_incoming_curve_uses_class_arrivals():
    params = NetworkParams(M=30.0, mu=1.0, omega=0.02, lambda_c=1.0,
                           rho_bs=40.0, rho_d2d=1.0)
    plain = min_cost_curve(_spec(params=params, delta_grid=(0.0, 1.0)))
    helped = min_cost_curve(_spec(params=params, delta_grid=(0.0, 1.0),
                                  incoming=True))
    assert helped[1].cost.total < plain[1].cost.total
    assert helped[0].cost.total == plain[0].cost.total   # limit is arrival-free


# ---------------------------------------------------------------------------
# spec validation


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(delta_grid=()),
        dict(delta_grid=(0.5, 1.0)),          # must start at 0
        dict(delta_grid=(0.0, 1.0, 1.0)),     # strictly increasing
        dict(delta_grid=(0.0, 1.0), gamma_budget=1.0),
        dict(delta_grid=(0.0, 1.0), m_max=1),
    ],
)
def test_search_spec_validation(kwargs):
    with pytest.raises(ValueError):
        _spec(**kwargs)


def test_tight_budget_leaves_no_codes():
    # the leanest enumerable code is mds[10,9,9] at 10F/9; 1.05F shuts it out
    with pytest.raises(ValueError):
        min_cost_curve(_spec(gamma_budget=1.05))


# ---------------------------------------------------------------------------
# largest beneficial interval


def test_delta_max_reference_anchors():
    params = _params(omega=0.05)
    assert delta_max(params, derive_code(CodeFamily.MDS, 9, 3, 3)) == pytest.approx(
        1.4602, abs=2e-3
    )
    assert delta_max(params, derive_code(CodeFamily.MSR, 9, 3, 8)) == pytest.approx(
        0.0844, abs=2e-3
    )


def test_delta_max_none_when_bs_is_cheap(ref_codes):
    params = _params(omega=0.05, rho_bs=2.0)
    for code in ref_codes.values():
        assert delta_max(params, code) is None, code.label()


def test_delta_max_grows_with_bs_price():
    code = derive_code(CodeFamily.MDS, 9, 3, 3)
    values = [
        delta_max(_params(omega=0.05, rho_bs=rho), code) for rho in (20.0, 40.0, 80.0)
    ]
    assert all(a < b for a, b in zip(values, values[1:]))


def test_delta_max_infinite_under_heavy_request_load():
    # at omega/mu = 10 storage wins at every interval on the coarse grid
    params = _params(omega=10.0)
    assert math.isinf(delta_max(params, derive_code(CodeFamily.MDS, 9, 3, 3)))


def test_delta_max_is_a_benefit_boundary():
    from d2dcost import CostQuery, limit_cost_infinity, overall_cost

    params = _params(omega=0.05)
    code = derive_code(CodeFamily.MDS, 9, 3, 3)
    boundary = delta_max(params, code)
    threshold = limit_cost_infinity(params).total
    assert overall_cost(CostQuery(params, code, boundary * 0.99)).total < threshold
    assert overall_cost(CostQuery(params, code, boundary * 1.01)).total > threshold


def test_delta_max_rejects_degenerate_rates():
    code = derive_code(CodeFamily.MDS, 9, 3, 3)
    with pytest.raises(ValueError):
        delta_max(NetworkParams(M=30.0, mu=1.0, omega=0.0), code)


# ---------------------------------------------------------------------------
# optimal interval


def test_delta_opt_reference_point(ref_params, ref_codes):
    # at the reference prices only the plain MDS code prefers lazy repair;
    # every r = m - 1 regenerating code and the LRC want continuous repair
    assert delta_opt(ref_params, ref_codes["mds"]) == pytest.approx(0.2455, abs=2e-3)
    for key in ("rep", "msr", "mbr", "lrc"):
        assert delta_opt(ref_params, ref_codes[key]) == 0.0, key


def test_delta_opt_is_no_worse_than_neighbours(ref_params, ref_codes):
    from d2dcost import CostQuery, overall_cost

    code = ref_codes["mds"]
    best = delta_opt(ref_params, code)
    value = overall_cost(CostQuery(ref_params, code, best)).total
    for other in (best * 0.8, best * 1.25):
        assert value <= overall_cost(CostQuery(ref_params, code, other)).total


def test_delta_opt_stays_below_delta_max(ref_params, ref_codes):
    code = ref_codes["mds"]
    cap = delta_max(ref_params, code)
    assert 0.0 < delta_opt(ref_params, code) < cap
