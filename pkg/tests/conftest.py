import pytest

_CRITERIA = {}


class Recorder:
    """Collects one verdict per acceptance criterion; sub-checks are AND-ed."""

    def __call__(self, number, title, ok, detail=""):
        entry = _CRITERIA.setdefault(number, {"title": title, "ok": True, "details": []})
        entry["ok"] = entry["ok"] and bool(ok)
        if detail:
            entry["details"].append(("ok " if ok else "BAD ") + detail)


@pytest.fixture(scope="session")
def acceptance():
    return Recorder()


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        tr.write_line(f"criterion {number}: {'PASS' if entry['ok'] else 'FAIL'}  {entry['title']}")
        for d in entry["details"]:
            if d.startswith("BAD") or tr.verbosity > 0:
                tr.write_line(f"    {d}")
