import numpy as np


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion."""
    rows = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if "test_acceptance.py" in rep.nodeid and rep.when == "call":
                rows.append((rep.nodeid.split("::")[-1], outcome))
    if rows:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, outcome in sorted(rows):
            word = "PASS" if outcome == "passed" else "FAIL"
            terminalreporter.write_line(f"{word}  {name}")


class ScriptedRng:
    """Feeds pre-scripted uniform draws to the engine, one array per call."""

    def __init__(self, batches):
        self.batches = [np.asarray(b, dtype=float) for b in batches]

    def random(self, size):
        batch = self.batches.pop(0)
        assert batch.size == size, f"script expected {batch.size} draws, engine asked {size}"
        return batch

    def uniform(self, low, high, size):
        raise AssertionError("scripted rng has no sensing draws")
