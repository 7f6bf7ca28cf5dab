import pytest
from hypothesis import settings

from homlink.emitter import EmitterParams

settings.register_profile("suite", deadline=None, max_examples=60)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def qd1():
    return EmitterParams(label="QD1", t1_ps=78.0, t2_ps=126.0,
                         m_consecutive=0.919, g2_zero=0.072,
                         wavelength_nm=893.16, eta_sys=0.25,
                         rep_rate_hz=80.3e6)


@pytest.fixture(scope="session")
def qd2():
    return EmitterParams(label="QD2", t1_ps=69.9, t2_ps=105.0,
                         m_consecutive=0.839, g2_zero=0.051,
                         wavelength_nm=891.92, eta_sys=0.20,
                         rep_rate_hz=80.3e6)
