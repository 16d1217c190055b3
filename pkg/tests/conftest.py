"""Shared fixtures: the reference operating point and its five codes."""

import pytest

from d2dcost import CodeFamily, NetworkParams, derive_code


@pytest.fixture(scope="session")
def ref_params() -> NetworkParams:
    return NetworkParams(M=30.0, mu=1.0, omega=0.02, rho_bs=40.0, rho_d2d=1.0)


@pytest.fixture(scope="session")
def ref_codes() -> dict:
    """The rate-1/3 comparison set used throughout the figure configs."""
    return {
        "rep": derive_code(CodeFamily.REPLICATION, 2),
        "mds": derive_code(CodeFamily.MDS, 9, 3, 3),
        "msr": derive_code(CodeFamily.MSR, 9, 3, 8),
        "mbr": derive_code(CodeFamily.MBR, 9, 5, 8),
        "lrc": derive_code(CodeFamily.LRC, 6, 3, 2),
    }
