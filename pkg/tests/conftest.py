import math

import pytest

from tfdcs.model import DeformedModel, Spectrum, Truncation
from tfdcs.specfun import ParamLists

OSC = DeformedModel(ParamLists(), 1.0, Spectrum.linear(0.5))
OSC_GEN = DeformedModel(ParamLists(), 1.0, Spectrum.generalized())
BESSEL = DeformedModel(ParamLists((), (2.0,)), 1.0, Spectrum.generalized())
BESSEL_LIN = DeformedModel(ParamLists((), (2.0,)), 1.0, Spectrum.linear(0.0))

MODELS = {"osc": OSC, "osc_gen": OSC_GEN, "bessel": BESSEL, "bessel_lin": BESSEL_LIN}
LINEAR_MODELS = {"osc": OSC, "bessel_lin": BESSEL_LIN}
BETAS = (0.5, math.log(4.0), 3.0)


@pytest.fixture(params=list(MODELS), ids=list(MODELS))
def model(request):
    return MODELS[request.param]


@pytest.fixture(params=list(LINEAR_MODELS), ids=list(LINEAR_MODELS))
def linear_model(request):
    return LINEAR_MODELS[request.param]


@pytest.fixture(params=BETAS, ids=["b0.5", "bln4", "b3"])
def beta(request):
    return request.param


@pytest.fixture
def trunc():
    return Truncation()


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[number][1])
