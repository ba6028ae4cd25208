def pytest_terminal_summary(terminalreporter):
    from test_acceptance import LINES

    if LINES:
        terminalreporter.section("acceptance")
        for line in LINES:
            terminalreporter.write_line(line)
