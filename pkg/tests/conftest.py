import sys


def pytest_terminal_summary(terminalreporter):
    module = next((m for name, m in list(sys.modules.items()) if name.endswith("test_acceptance")), None)
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number, title in sorted(module.TITLES.items()):
        entry = results.get(number)
        if entry is None:
            tr.write_line(f"criterion {number}: NOT RUN  {title}")
            continue
        tr.write_line(f"criterion {number}: {'PASS' if entry['ok'] else 'FAIL'}  {title}")
        for detail in entry["details"]:
            tr.write_line(f"    {detail}")
