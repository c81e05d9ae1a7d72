import numpy as np
import pytest

ACCEPTANCE_LABELS = {
    "test_c1": "C1 geometry oracle suite",
    "test_c2": "C2 face-extraction Euler check",
    "test_c3": "C3 distance-metric oracles",
    "test_c4": "C4 assignment optimality",
    "test_c5": "C5 PCA correctness",
    "test_c6": "C6 split balance",
    "test_c7": "C7 formula fixtures",
    "test_c8": "C8 end-to-end identity",
    "test_c9": "C9 performance and determinism",
}


@pytest.fixture
def rng():
    return np.random.default_rng(20240715)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::" not in nodeid:
                continue
            name = nodeid.split("::")[-1]
            key = name.split("_", 2)
            prefix = "_".join(key[:2])
            if prefix in ACCEPTANCE_LABELS:
                results[prefix] = outcome == "passed" and results.get(prefix, True)
    if results:
        terminalreporter.write_sep("-", "acceptance criteria")
        for prefix in sorted(results):
            status = "PASS" if results[prefix] else "FAIL"
            terminalreporter.write_line(f"{ACCEPTANCE_LABELS[prefix]}: {status}")
