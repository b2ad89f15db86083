import pytest

from segsearch.indexstore import Index
from segsearch.pipeline import Pipeline
from segsearch.synth import demo_documents


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion at the end of the run."""
    rows = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance" in nodeid and "::" in nodeid:
                rows.append((nodeid.split("::")[-1], outcome == "passed"))
    if rows:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, ok in sorted(rows):
            terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}: {name}")


@pytest.fixture(scope="session")
def demo_index() -> Index:
    """The deterministic demo corpus, fully processed and committed."""
    index = Index()
    pipeline = Pipeline(index)
    for transcript in demo_documents():
        pipeline.index_processed(pipeline.process_transcript(transcript), commit=False)
    index.commit()
    return index


@pytest.fixture(scope="session")
def demo_snapshot(demo_index):
    return demo_index.snapshot()
