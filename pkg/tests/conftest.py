import pytest


@pytest.fixture(scope="session")
def criterion_report(request):
    """Emit one PASS/FAIL line per acceptance criterion.

    Goes through pytest's terminal reporter so the lines survive output
    capture and land in the piped log.
    """
    reporter = request.config.pluginmanager.get_plugin("terminalreporter")

    def emit(name: str, ok: bool, detail: str = "") -> None:
        line = f"{'PASS' if ok else 'FAIL'}  {name}"
        if detail:
            line += f"  [{detail}]"
        if reporter is not None:
            reporter.ensure_newline()
            reporter.write_line(line)
        else:
            print(line, flush=True)

    return emit
