def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS, TITLES

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        passed, detail = RESULTS[n]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {n:2d} ({TITLES[n]}): {detail}")
    npass = sum(p for p, _ in RESULTS.values())
    terminalreporter.write_line(f"{npass}/{len(RESULTS)} acceptance criteria met")
