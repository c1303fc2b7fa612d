import numpy as np
import pytest

from gullivr import _pykernels
from gullivr.heightfield import HeightField

try:
    from gullivr import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = [pytest.param(_pykernels, id="python"),
            pytest.param(_ckernels, id="cython",
                         marks=pytest.mark.skipif(_ckernels is None, reason="extension not built"))]

ACCEPTANCE_RESULTS = []


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


def flat(height=0.0, n=41, cell=1.0, origin=(-20.0, -20.0)):
    return HeightField(origin, cell, np.full((n, n), float(height)))


@pytest.fixture
def flat_field():
    return flat()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(line)


def scenario_doc(waypoints=(), *, half=(2.5, 2.5), extent=800.0, cell=4.0, policy="gullivr",
                 gm_scales=None, **extra):
    """Minimal valid scenario document on flat terrain centred on the origin."""
    n = int(round(2 * extent / cell)) + 1
    doc = {
        "schema_version": 1,
        "id": "test",
        "heightfield": {"flat": {"origin": [-extent, -extent], "cell_size": cell, "nx": n, "nz": n}},
        "chaperone": {"half_x": half[0], "half_z": half[1]},
        "gm_scales": gm_scales or {"default": 100},
        "agent": {"start": [0.0, 0.0], "policy": policy,
                  "waypoints": [{"point": list(p)} if not isinstance(p, dict) else p for p in waypoints]},
        "foot_smooth_coeff": 0.0,
    }
    doc.update(extra)
    return doc


def paired_transitions(log):
    """True when every transition_begin is closed by a later transition_end."""
    open_ = 0
    for e in log.events:
        if e.kind == "transition_begin":
            if open_:
                return False
            open_ = 1
        elif e.kind == "transition_end":
            if not open_:
                return False
            open_ = 0
    return open_ == 0
