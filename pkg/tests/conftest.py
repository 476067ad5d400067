import pytest

from qcs_sim.geodesy import EarthModel
from qcs_sim.scenario import bundled_scenario_path, load_scenario
from qcs_sim.syncnet import SyncEngine


@pytest.fixture(scope="session")
def earth():
    return EarthModel()


@pytest.fixture(scope="session")
def paper_scenario():
    return load_scenario(bundled_scenario_path("paper_master_clock"))


@pytest.fixture(scope="session")
def table2_scenario():
    return load_scenario(bundled_scenario_path("table2_master_clock"))


@pytest.fixture(scope="session")
def single_orbit_scenario():
    return load_scenario(bundled_scenario_path("table_fom_single_orbit"))


@pytest.fixture(scope="session")
def global_scenario():
    return load_scenario(bundled_scenario_path("fig11_global"))


@pytest.fixture(scope="session")
def single_sat_scenario():
    return load_scenario(bundled_scenario_path("fig1_single_sat"))


@pytest.fixture(scope="session")
def table2_engine(table2_scenario):
    return SyncEngine(table2_scenario)


@pytest.fixture(scope="session")
def single_orbit_engine(single_orbit_scenario):
    return SyncEngine(single_orbit_scenario)
