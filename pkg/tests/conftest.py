import math

import numpy as np
import pytest

from secondlaw.model import Accumulation, AmbientReference, HeatBath, Stream, SystemSnapshot

_criteria: dict[int, tuple[str, str]] = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    failed = call.excinfo is not None
    prev = _criteria.get(number)
    if prev is None or failed:
        _criteria[number] = (title, "FAIL" if failed else "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, verdict = _criteria[number]
        terminalreporter.write_line(f"[{verdict}] criterion {number}: {title}")


def conduction_snapshot(t=0.0, T_a=300.0):
    return SystemSnapshot(
        t=t,
        ambient=AmbientReference(T_a),
        baths=(HeatBath("hot", 600.0, 1000.0), HeatBath("cold", 300.0, -1000.0)),
        stationary=True,
    )


def throttle_snapshot(t=0.0, T_a=298.15):
    ds = 287.0 * math.log(2.0)
    return SystemSnapshot(
        t=t,
        ambient=AmbientReference(T_a),
        streams=(
            Stream("in", "inlet", G=1.0, h=3.0e5, s=100.0, v=20.0, z=1.0),
            Stream("out", "outlet", G=1.0, h=3.0e5, s=100.0 + ds, v=20.0, z=1.0),
        ),
        stationary=True,
        mass_closed=True,
    )


def random_snapshot(rng: np.random.Generator, stationary=True, balanced_entropy=False, T_a=None) -> SystemSnapshot:
    """Random valid snapshot; with ``balanced_entropy`` the streams come in equal-G, equal-s pairs."""
    T_a = float(rng.uniform(250.0, 350.0)) if T_a is None else T_a
    streams = []
    if balanced_entropy:
        for k in range(int(rng.integers(0, 3))):
            G, s = rng.uniform(0.0, 10.0), rng.uniform(-2e3, 8e3)
            streams.append(Stream(f"in{k}", "inlet", G, rng.uniform(-1e5, 3e6), s, rng.uniform(0, 300), rng.uniform(-50, 50)))
            streams.append(Stream(f"out{k}", "outlet", G, rng.uniform(-1e5, 3e6), s, rng.uniform(0, 300), rng.uniform(-50, 50)))
    else:
        for k in range(int(rng.integers(0, 4))):
            direction = "inlet" if rng.random() < 0.5 else "outlet"
            streams.append(
                Stream(
                    f"s{k}",
                    direction,
                    rng.uniform(0.0, 10.0),
                    rng.uniform(-1e5, 3e6),
                    rng.uniform(-2e3, 8e3),
                    rng.uniform(0, 300),
                    rng.uniform(-50, 50),
                )
            )
    baths = [HeatBath(f"b{k}", rng.uniform(50.0, 2000.0), rng.uniform(-1e5, 1e5)) for k in range(int(rng.integers(0, 4)))]
    acc = Accumulation() if stationary else Accumulation(rng.uniform(-100, 100), rng.uniform(-1e5, 1e5))
    return SystemSnapshot(
        t=0.0,
        ambient=AmbientReference(T_a),
        streams=tuple(streams),
        baths=tuple(baths),
        accumulation=acc,
        stationary=stationary,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)
