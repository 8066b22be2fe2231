from functools import lru_cache

import pytest

from rzlab.padic_tower import make_ext, make_field

# (kind, e, f, v(t))
GRID = [("RP", e, f, None) for e in (1, 2) for f in (1, 2)] + [
    ("RU", e, f, vt) for e in (1, 2) for vt in range(1, e + 1) for f in (1, 2)
]
RP_GRID = [g for g in GRID if g[0] == "RP"]
RU_GRID = [g for g in GRID if g[0] == "RU"]


def grid_id(g):
    kind, e, f, vt = g
    return f"{kind}-e{e}-f{f}" + (f"-v{vt}" if vt else "")


@lru_cache(maxsize=None)
def ext_for(kind, e, f, vt=None, precision=None):
    F = make_field(f, e, precision=precision)
    return make_ext(F, kind, vt=vt) if kind == "RU" else make_ext(F, kind)


@pytest.fixture(params=GRID, ids=grid_id)
def grid_ext(request):
    return ext_for(*request.param)


@pytest.fixture(params=RP_GRID, ids=grid_id)
def rp_ext(request):
    return ext_for(*request.param)


@pytest.fixture(params=RU_GRID, ids=grid_id)
def ru_ext(request):
    return ext_for(*request.param)


def hilbert_q2(a: int, b: int) -> int:
    """Hilbert symbol (a, b)_2 over Q_2 for nonzero integers."""

    def split(n):
        k = 0
        while n % 2 == 0:
            n //= 2
            k += 1
        return k, n

    al, u = split(a)
    be, v = split(b)
    eps = lambda w: ((w - 1) // 2) % 2
    om = lambda w: ((w * w - 1) // 8) % 2
    return (-1) ** ((eps(u) * eps(v) + al * om(v) + be * om(u)) % 2)


ACCEPTANCE_LINES: list[str] = []


def report(criterion: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
