import warnings

import pytest

from evcoref.corpus import load_corpus
from evcoref.errors import LegacyRuleWarning
from evcoref.ontology import load_profiles
from evcoref.ruledsl import load_rules

from helpers import DATA


@pytest.fixture(scope="session")
def profiles():
    return load_profiles()


@pytest.fixture(scope="session")
def rules(profiles):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LegacyRuleWarning)
        return load_rules(store=profiles)


@pytest.fixture(scope="session")
def lennon(profiles):
    return load_corpus(DATA / "lennon.jsonl", profiles)


@pytest.fixture(scope="session")
def subevent_corpus(profiles):
    return load_corpus(DATA / "subevent.jsonl", profiles)


# --- acceptance reporting -------------------------------------------------------

_ACCEPTANCE: list[tuple[str, str, str]] = []


@pytest.fixture
def criterion(request):
    """Record the outcome of one acceptance criterion for the summary."""
    import time

    class Recorder:
        label = request.node.get_closest_marker("criterion").args[0]
        detail = ""

    rec = Recorder()
    t0 = time.perf_counter()
    yield rec
    elapsed = time.perf_counter() - t0
    failed = getattr(request.node, "_failed", False)
    detail = f"{rec.detail}; " if rec.detail else ""
    _ACCEPTANCE.append(("FAIL" if failed else "PASS", rec.label,
                        f"{detail}{elapsed:.2f} s"))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" and rep.failed:
        item._failed = True
    marker = item.get_closest_marker("criterion")
    if marker is not None and rep.skipped and rep.when in ("setup", "call"):
        reason = rep.longrepr[2] if isinstance(rep.longrepr, tuple) else str(rep.longrepr)
        _ACCEPTANCE.append(("SKIP", marker.args[0], reason.removeprefix("Skipped: ")))


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): an acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for status, label, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"[{status}] {label} ({detail})")
