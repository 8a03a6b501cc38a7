import hypothesis
import pytest

from belyi_cert.datainput import load_dataset

hypothesis.settings.register_profile("default", max_examples=60, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile("default")

# filled by test_acceptance, printed at the end of the session
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])


@pytest.fixture(scope="session")
def ds1():
    return load_dataset("hs-map-1")


@pytest.fixture(scope="session")
def ds2():
    return load_dataset("hs-map-2")


@pytest.fixture(scope="session", params=["hs-map-1", "hs-map-2"])
def dataset(request):
    return load_dataset(request.param)


@pytest.fixture(scope="session")
def spec1(ds1):
    return ds1.map_spec()


@pytest.fixture(scope="session")
def spec2(ds2):
    return ds2.map_spec()


_MONODROMY: dict = {}
_DESSIN: dict = {}


def monodromy_of(name):
    from belyi_cert.monodromy import monodromy_triple

    if name not in _MONODROMY:
        spec = load_dataset(name).map_spec()
        _MONODROMY[name] = monodromy_triple(spec.p, spec.q)
    return _MONODROMY[name]


def dessin_of(name):
    from belyi_cert.dessin import compute_dessin

    if name not in _DESSIN:
        _DESSIN[name] = compute_dessin(load_dataset(name).map_spec())
    return _DESSIN[name]


@pytest.fixture(scope="session")
def mono():
    return monodromy_of


@pytest.fixture(scope="session")
def dessins():
    return dessin_of
