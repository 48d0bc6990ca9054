import re
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

_ACCEPTANCE = re.compile(r"test_acceptance\.py::test_ac(\d+)_(\w+)")
_results: dict[int, tuple[str, str, str]] = {}


def pytest_runtest_logreport(report):
    m = _ACCEPTANCE.search(report.nodeid)
    if not m:
        return
    if report.when == "call" or report.outcome != "passed":
        number = int(m.group(1))
        detail = dict(report.user_properties).get("detail", "")
        if number not in _results or report.outcome != "passed":
            _results[number] = ("PASS" if report.outcome == "passed" else "FAIL", m.group(2).replace("_", " "), detail)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        status, label, detail = _results[number]
        line = f"AC{number:02d} {status}  {label}"
        terminalreporter.write_line(f"{line}  [{detail}]" if detail else line)
