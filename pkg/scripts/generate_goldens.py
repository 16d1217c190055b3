#!/usr/bin/env python3
"""Regenerate src/d2dcost/data/goldens.json from the independent oracles.

Every stochastic entry records its oracle, seed, sample count, and standard
error so the comparing test can pick a statistically sound tolerance.  The
deterministic entries (quadrature availability probabilities, enumeration
count) are exact to the stated precision.

Run from the repository root:  python3 scripts/generate_goldens.py
"""

from __future__ import annotations

import json
import sys
import time
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))
sys.path.insert(0, str(ROOT / "tests"))

import oracles  # noqa: E402
from d2dcost.model import CodeFamily, NetworkParams, derive_code  # noqa: E402
from d2dcost.search import SearchSpec, enumerate_codes  # noqa: E402
from d2dcost.simulator import SimConfig, run  # noqa: E402

OUT = ROOT / "src" / "d2dcost" / "data" / "goldens.json"


def net(**kw) -> NetworkParams:
    base = dict(M=30, mu=1.0, omega=0.02, rho_bs=40.0, rho_d2d=1.0)
    base.update(kw)
    return NetworkParams(**base)


def code_of(tag: str):
    fam, rest = tag.split("[") if "[" in tag else (tag, None)
    if rest is None:
        return derive_code(CodeFamily.REPLICATION, m=int(tag.split("x")[1]))
    m, h, r = (int(x) for x in rest.rstrip("]").split(","))
    return derive_code(CodeFamily(fam), m=m, h=h, r=r)


def main() -> None:
    t0 = time.time()
    entries: dict[str, dict] = {}

    def note(name):
        print(f"[{time.time()-t0:6.1f}s] {name}")

    # --- Monte-Carlo repair rates -----------------------------------------
    repair_cases = [
        ("repair_conv_mds933_d05_rho40", "mds[9,3,3]", net(), 0.5, False),
        ("repair_hybrid_msr938_d05_rho10", "msr[9,3,8]", net(rho_bs=10.0), 0.5, True),
        ("repair_hybrid_mbr958_d05_rho10", "mbr[9,5,8]", net(rho_bs=10.0), 0.5, True),
        ("repair_conv_lrc632_d05_rho20", "lrc[6,3,2]", net(rho_bs=20.0), 0.5, False),
    ]
    for name, tag, params, delta, hybrid in repair_cases:
        note(name)
        code = code_of(tag)
        bs, d2d, stderr = oracles.repair_rate_mc(
            params, code, delta, hybrid=hybrid, n=4_000_000, seed=11)
        entries[name] = {
            "oracle": "repair_rate_mc",
            "config": {"code": tag, "delta": delta, "hybrid": hybrid,
                       "rho_bs": params.rho_bs, "rho_d2d": params.rho_d2d,
                       "mu": params.mu, "M": params.M, "omega": params.omega},
            "bs_rate": bs, "d2d_rate": d2d, "total": bs + d2d,
            "stderr": stderr, "n_samples": 4_000_000, "seed": 11,
        }

    # --- Monte-Carlo download rates ---------------------------------------
    download_cases = [
        ("download_conv_mds933_d1_rho10_w01", "mds[9,3,3]",
         net(rho_bs=10.0, omega=0.1), 1.0, False),
        ("download_hybrid_mds933_d1_rho10_w01", "mds[9,3,3]",
         net(rho_bs=10.0, omega=0.1), 1.0, True),
    ]
    for name, tag, params, delta, hybrid in download_cases:
        note(name)
        code = code_of(tag)
        bs, d2d, stderr = oracles.download_rate_mc(
            params, code, delta, hybrid=hybrid, n=5_000_000, seed=12)
        entries[name] = {
            "oracle": "download_rate_mc",
            "config": {"code": tag, "delta": delta, "hybrid": hybrid,
                       "rho_bs": params.rho_bs, "rho_d2d": params.rho_d2d,
                       "mu": params.mu, "M": params.M, "omega": params.omega},
            "bs_rate": bs, "d2d_rate": d2d, "total": bs + d2d,
            "stderr": stderr, "n_samples": 5_000_000, "seed": 12,
        }

    # --- quadrature D2D-download probabilities ----------------------------
    note("p_d2d_quad")
    quad_rows = []
    for m, h, delta in [(9, 3, 0.5), (9, 3, 1.0), (6, 3, 1.0),
                        (10, 4, 2.0), (5, 2, 0.1), (2, 1, 1.0)]:
        value, err = oracles.avail_prob_quad(h, m, 1.0, delta)
        quad_rows.append({"m": m, "h": h, "mu": 1.0, "delta": delta,
                          "value": value, "abs_err": err})
    entries["p_d2d_quadrature"] = {
        "oracle": "avail_prob_quad", "rows": quad_rows,
    }

    # --- incoming-class stationary law (Monte Carlo) ----------------------
    note("stationary_mc_lc1_d1 (slow)")
    q, q_tilde, stderr_q0 = oracles.class_chain_mc(
        lambda_c=1.0, mu=1.0, delta=1.0,
        n_intervals=4000, replicas=2500, burn=400, seed=13)
    entries["stationary_mc_lc1_d1"] = {
        "oracle": "class_chain_mc",
        "config": {"lambda_c": 1.0, "mu": 1.0, "delta": 1.0,
                   "n_intervals": 4000, "replicas": 2500, "burn": 400},
        "q": list(q[:20]), "q_tilde": list(q_tilde[:20]),
        "stderr_q0": stderr_q0, "seed": 13,
    }

    # --- mean class-extinction time and effective rate --------------------
    note("extinction_mc_lc1_d1")
    mean_u, stderr_u = oracles.extinction_time_mc(q_tilde, mu=1.0,
                                                  n=4_000_000, seed=14)
    entries["extinction_mc_lc1_d1"] = {
        "oracle": "extinction_time_mc",
        "config": {"lambda_c": 1.0, "mu": 1.0, "delta": 1.0,
                   "q_tilde_from": "stationary_mc_lc1_d1"},
        "mean_extinction_time": mean_u, "stderr": stderr_u,
        "n_samples": 4_000_000, "seed": 14,
    }

    # --- class-tracking simulator anchors for the incoming costs ----------
    sim_cases = [
        ("incoming_sim_mds933_lc1_d1_rho40", 1.0, 1.0, 20260819),
        ("incoming_sim_mds933_lc05_d05_rho40", 0.5, 0.5, 20260820),
        ("incoming_sim_mds933_lc05_d01_rho40", 0.5, 0.1, 20260821),
    ]
    for name, lam_c, delta, seed in sim_cases:
        note(name)
        params = net(lambda_c=lam_c)
        cfg = SimConfig(params=params, code=code_of("mds[9,3,3]"), delta=delta,
                        horizon=1e6, seed=seed, incoming=True)
        res = run(cfg)
        entries[name] = {
            "oracle": "simulator.run(incoming=True)",
            "config": {"code": "mds[9,3,3]", "lambda_c": lam_c, "delta": delta,
                       "horizon": 1e6, "seed": seed, "M": params.M,
                       "mu": params.mu, "omega": params.omega,
                       "rho_bs": params.rho_bs, "rho_d2d": params.rho_d2d},
            "repair_bs": res.cost.repair_bs, "repair_d2d": res.cost.repair_d2d,
            "download_bs": res.cost.download_bs,
            "download_d2d": res.cost.download_d2d,
            "total": res.cost.total,
            "stderr": res.stderr,
            "population_mean": res.population_mean,
        }

    # --- enumeration census ------------------------------------------------
    note("enumeration_count")
    spec = SearchSpec(params=net(), delta_grid=(0.0, 1.0), gamma_budget=3.0,
                      m_max=10)
    codes = enumerate_codes(spec)
    entries["enumeration_gamma3_mmax10"] = {
        "oracle": "enumerate_codes",
        "config": {"gamma_budget": 3.0, "m_max": 10},
        "count": len(codes),
        "first": codes[0].label(),
        "last": codes[-1].label(),
    }

    OUT.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "format": 1,
        "entries": entries,
    }
    OUT.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                   encoding="utf-8")
    note(f"wrote {OUT} ({len(entries)} entries)")


if __name__ == "__main__":
    main()
