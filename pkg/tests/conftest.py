import numpy as np
import pytest

from occuq import FluidModel, Mg1Model, make_coxian, make_erlang, make_exponential


def _fluid_exponential():
    return FluidModel(lam=1.05, on=make_exponential(2.0), r1=-1.0,
                      r_pos=np.array([1.8]), K=2.0, tau=0.8)


def _fluid_erlang2():
    return FluidModel(lam=1.05, on=make_erlang(2, 6.0), r1=-1.0,
                      r_pos=np.array([1.8, 3.6]), K=2.0, tau=0.8)


def _fluid_coxian():
    return FluidModel(lam=1.05, on=make_coxian(2, [0.5], [18.0, 2.25]),
                      r1=-1.0, r_pos=np.array([1.8, 3.6]), K=2.0, tau=0.8)


def _mg1_exponential():
    return Mg1Model(lam=1.05, jump=make_exponential(1.111), r1=-1.0,
                    K=2.0, tau=0.8)


def _mg1_erlang2():
    return Mg1Model(lam=1.05, jump=make_erlang(2, 2.222), r1=-1.0,
                    K=2.0, tau=0.8)


def _mg1_erlang4():
    return Mg1Model(lam=1.05, jump=make_erlang(4, 4.444), r1=-1.0,
                    K=2.0, tau=0.8)


def _mg1_coxian():
    return Mg1Model(lam=1.05, jump=make_coxian(2, [0.5], [5.555, 0.694]),
                    r1=-1.0, K=2.0, tau=0.8)


_BUILDERS = {
    "fluid_exponential": _fluid_exponential,
    "fluid_erlang2": _fluid_erlang2,
    "fluid_coxian": _fluid_coxian,
    "mg1_exponential": _mg1_exponential,
    "mg1_erlang2": _mg1_erlang2,
    "mg1_erlang4": _mg1_erlang4,
    "mg1_coxian": _mg1_coxian,
}


@pytest.fixture(scope="session")
def all_models():
    return {name: build() for name, build in _BUILDERS.items()}


@pytest.fixture(scope="session")
def fluid_coxian():
    return _fluid_coxian()


@pytest.fixture(scope="session")
def fluid_exponential():
    return _fluid_exponential()


@pytest.fixture(scope="session")
def mg1_erlang2():
    return _mg1_erlang2()
