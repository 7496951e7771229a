import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

import helpers  # noqa: E402  (needs the path insert above)


def pytest_terminal_summary(terminalreporter):
    if helpers.ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in helpers.ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
