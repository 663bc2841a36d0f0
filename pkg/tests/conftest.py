import numpy as np
import pytest

from gcmodel import DimensionlessGroups, FlowField, data_path, load_config

NAMES = ("o-xylene", "p/m-xylene", "ethylbenzene", "toluene", "benzene")
# Fitted rows of the lab-scale BTEX reference case.
KA_TABLE = np.array([1.0168e4, 0.6483e4, 0.9203e4, 0.2953e4, 0.0579e4])
KD_TABLE = np.array([14.291, 11.057, 16.940, 11.502, 5.299])
BETA_TABLE = np.array([1.0, 0.8242, 0.7635, 0.3608, 0.1530])
PE_INV_TABLE = np.array([2.6926, 2.6926, 3.1069, 3.3968, 3.7696]) * 1e-3
DA_TABLE, LENGTH_TABLE, TAU_TABLE = 0.0633, 1.8722e-3, 0.0723
L_HAT_TABLE = 10683.0
PL_HAT_TABLE = 1.013 / 4.01


def tabulated_groups(L_hat=L_HAT_TABLE, pL_hat=PL_HAT_TABLE):
    """Dimensionless groups taken directly from the tabulated fit values."""
    K = KD_TABLE / KD_TABLE[0]
    return DimensionlessGroups(
        Da=DA_TABLE, Pe_inv=PE_INV_TABLE.copy(), K_a=K.copy(), K_d=K.copy(),
        beta=BETA_TABLE.copy(), L_hat=float(L_hat), t1_hat=4.0 / TAU_TABLE, pL_hat=pL_hat,
        length_scale=LENGTH_TABLE, time_scale=TAU_TABLE, reference_index=0, names=NAMES)


@pytest.fixture(scope="session")
def table_groups():
    return tabulated_groups()


@pytest.fixture(scope="session")
def table_flow(table_groups):
    return FlowField(table_groups.pL_hat, table_groups.L_hat)


@pytest.fixture(scope="session")
def btex_config():
    return load_config(data_path("btex_nasreddine.cfg"))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
