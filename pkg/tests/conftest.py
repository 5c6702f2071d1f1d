import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from spontem.kernels import Physics, build_kernel_bank
from spontem.soe import build_soe_j


@pytest.fixture(scope="session")
def physics_default():
    return Physics(c=1.0, omega=1.0, sigma=0.1, g=0.2, p=3)


@pytest.fixture(scope="session")
def soe_default():
    return build_soe_j()


@pytest.fixture(scope="session")
def bank_p3(physics_default, soe_default):
    return build_kernel_bank(physics_default, soe=soe_default)


@pytest.fixture(scope="session")
def bank_n24(physics_default, soe_default):
    # Tables through kernel index 24 (exercises the vanishing-weight rows).
    return build_kernel_bank(physics_default, n_max=24, soe=soe_default)
