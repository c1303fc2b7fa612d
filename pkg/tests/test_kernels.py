"""The compiled and pure-Python kernels must agree (and stay fast enough to matter)."""
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gullivr import _pykernels, kernels

try:
    from gullivr import _ckernels
except ImportError:
    _ckernels = None

needs_ext = pytest.mark.skipif(_ckernels is None, reason="extension not built")


def test_backend_reported():
    assert kernels.BACKEND in ("cython", "python")


def _grid(seed, nx=12, nz=9):
    return np.random.default_rng(seed).normal(size=(nx, nz))


@needs_ext
@given(seed=st.integers(0, 10_000), x=st.floats(0, 11), z=st.floats(0, 8))
@settings(max_examples=200, deadline=None)
def test_bilinear_backends_agree(seed, x, z):
    h = _grid(seed)
    assert _ckernels.bilinear(h, 0.0, 0.0, 1.0, x, z) == _pykernels.bilinear(h, 0.0, 0.0, 1.0, x, z)


@needs_ext
@pytest.mark.parametrize("k", [0, 1, 2, 5, 20])
def test_convolve_backends_agree(k):
    h = _grid(k, 30, 17)
    w = np.exp(-np.arange(-k, k + 1) ** 2 / 4.0)
    np.testing.assert_allclose(_ckernels.convolve(h, w), _pykernels.convolve(h, w), rtol=1e-14, atol=0)


@needs_ext
@given(seed=st.integers(0, 1000), x=st.floats(0, 11), z=st.floats(0, 8), k=st.integers(0, 4))
@settings(max_examples=100, deadline=None)
def test_smoothed_at_backends_agree(seed, x, z, k):
    h = _grid(seed)
    w = np.exp(-np.arange(-k, k + 1) ** 2 / 3.0)
    a = _ckernels.smoothed_at(h, 0.0, 0.0, 1.0, x, z, w)
    b = _pykernels.smoothed_at(h, 0.0, 0.0, 1.0, x, z, w)
    assert a == pytest.approx(b, rel=1e-13, abs=1e-13)


def test_smoothed_at_matches_full_convolution(backend):
    h = _grid(3, 20, 20)
    w = np.exp(-np.arange(-3, 4) ** 2 / 2.0)
    full = backend.convolve(h, w)
    for x, z in [(0.0, 0.0), (3.3, 7.9), (19.0, 19.0), (10.5, 0.25)]:
        expect = backend.bilinear(full, 0.0, 0.0, 1.0, x, z)
        assert backend.smoothed_at(h, 0.0, 0.0, 1.0, x, z, w) == pytest.approx(expect, rel=1e-13, abs=1e-13)


@needs_ext
def test_march_backends_agree():
    h = _grid(11, 40, 40) * 2.0
    for dy in (-0.2, -0.6, -1.0):
        d = np.array([0.7, dy, 0.3])
        d /= np.linalg.norm(d)
        args = (h, 0.0, 0.0, 1.0, 2.0, 8.0, 2.0, *d, 0.0, 60.0, 0.5, 1e-9)
        a, b = _ckernels.march_ray(*args), _pykernels.march_ray(*args)
        assert (math.isnan(a) and math.isnan(b)) or a == b
    args = (h, 0.0, 0.0, 1.0, 5.0, 3.0, 5.0, 6.0, 5.0, 4.0, 9.81, 4.0, 0.01, 1e-11)
    assert _ckernels.march_arc(*args) == _pykernels.march_arc(*args)


def test_fallback_selected_without_extension():
    import subprocess
    import sys
    code = ("import sys; sys.modules['gullivr._ckernels'] = None\n"
            "from gullivr import kernels, heightfield\n"
            "assert kernels.BACKEND == 'python', kernels.BACKEND\n"
            "import numpy as np\n"
            "f = heightfield.HeightField((0, 0), 1.0, np.zeros((5, 5)))\n"
            "print(heightfield.raycast(f, (2, 3, 2), (0, -1, 0)))\n")
    res = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert "(2.0, 0.0, 2.0)" in res.stdout
