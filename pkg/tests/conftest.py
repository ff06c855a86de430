"""Shared test plumbing: the numbered go/no-go report.

Each headline requirement records a line here; the terminal summary prints
one PASS/FAIL verdict per requirement so a run can be audited at a glance.
"""

_CRITERIA = {}
_N_CRITERIA = 11


def record_criterion(num: int, ok: bool, detail: str = ""):
    _CRITERIA[num] = (bool(ok), detail)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in range(1, _N_CRITERIA + 1):
        if num in _CRITERIA:
            ok, detail = _CRITERIA[num]
            verdict = "PASS" if ok else "FAIL"
        else:
            verdict, detail = "NOT RUN", ""
        line = f"ACCEPTANCE {num}: {verdict}"
        if detail:
            line += f" ({detail})"
        tr.write_line(line)
