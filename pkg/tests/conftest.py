import pytest

from hardy_rellich.funcspace import (
    dilate,
    make_mollifier_bump,
    make_poly_bump,
    modulate,
    scale_power,
)

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance():
    def record(number, ok, detail):
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
        return ok

    return record


def corpus():
    return [
        make_poly_bump(1, 2, 3),
        scale_power(make_poly_bump(0.5, 2.5, 4), -1),
        make_mollifier_bump(1, 3),
        modulate(make_poly_bump(1, 2, 4), 5.0),
        modulate(scale_power(make_mollifier_bump(0.5, 2), 0.5), 3.0),
        dilate(make_mollifier_bump(1, 4), 2.0),
    ]


@pytest.fixture(params=range(6), ids=lambda i: f"fn{i}")
def corpus_fn(request):
    return corpus()[request.param]


@pytest.fixture
def poly3():
    return make_poly_bump(1, 2, 3)


@pytest.fixture
def moll13():
    return make_mollifier_bump(1, 3)
