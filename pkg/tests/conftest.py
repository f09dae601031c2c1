import sys
from collections import defaultdict
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

CRITERIA = defaultdict(list)


def record(number: int, ok: bool, detail: str) -> None:
    """Note one acceptance outcome; cases of one criterion are merged in the summary."""
    CRITERIA[number].append((ok, detail))
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}")


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        cases = CRITERIA[number]
        verdict = "PASS" if all(ok for ok, _ in cases) else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {verdict} " + " | ".join(d for _, d in cases))
