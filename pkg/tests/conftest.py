import math

import hypothesis
import numpy as np
import pytest

from slepwave.slepian import (
    assemble_k_matrix,
    build_region,
    cap_membership,
    solve_eigenproblem,
)
from slepwave.sphere import make_grid

hypothesis.settings.register_profile("numeric", deadline=None, max_examples=25)
hypothesis.settings.load_profile("numeric")

CAP_OPENING = math.radians(40.0)


@pytest.fixture(scope="session")
def grid8():
    return make_grid(8)


@pytest.fixture(scope="session")
def grid16():
    return make_grid(16)


@pytest.fixture(scope="session")
def grid32():
    return make_grid(32)


@pytest.fixture(scope="session")
def cap16():
    return build_region({"kind": "polar_cap", "opening": CAP_OPENING})


@pytest.fixture(scope="session")
def cap_basis16(cap16, grid16):
    return solve_eigenproblem(assemble_k_matrix(cap16, grid16), cap16)


@pytest.fixture(scope="session")
def cap_basis32(grid32):
    cap = build_region({"kind": "polar_cap", "opening": CAP_OPENING})
    return solve_eigenproblem(assemble_k_matrix(cap, grid32), cap)


@pytest.fixture(scope="session")
def mask_basis16(grid16):
    # the same cap rasterised onto the grid: boundary quadrature error is real
    # here, unlike the analytic cap whose region quadrature is exact
    tt, pp = np.meshgrid(grid16.theta_nodes, grid16.phi_nodes, indexing="ij")
    mask = cap_membership(CAP_OPENING, 0.0, 0.0, tt, pp)
    region = build_region({"kind": "grid_mask", "mask": mask}, grid=grid16)
    return solve_eigenproblem(assemble_k_matrix(region, grid16), region)
