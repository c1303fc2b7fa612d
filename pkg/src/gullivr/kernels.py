"""Backend selection for the numerical kernels.

The compiled extension is used when it was built; otherwise the pure-Python
module with identical signatures takes its place.
"""
try:
    from gullivr import _ckernels as _impl

    BACKEND = "cython"
except ImportError:  # extension not built
    from gullivr import _pykernels as _impl

    BACKEND = "python"

bilinear = _impl.bilinear
convolve = _impl.convolve
smoothed_at = _impl.smoothed_at
march_ray = _impl.march_ray
march_arc = _impl.march_arc

__all__ = ["BACKEND", "bilinear", "convolve", "smoothed_at", "march_ray", "march_arc"]
