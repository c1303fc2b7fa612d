"""Compare the compiled and pure-Python kernels on workloads a simulation tick sees.

    python benchmarks/bench_kernels.py [--repeat N]

Also times one full quest-map run under each backend (in a subprocess, so
the backend can be swapped at import).
"""
import argparse
import subprocess
import sys
import timeit

import numpy as np

from gullivr import _pykernels
from gullivr.heightfield import smoothing_kernel, value_noise

try:
    from gullivr import _ckernels
except ImportError:
    _ckernels = None

RUN_QUEST = """
import sys, time
if {force_python}:
    sys.modules['gullivr._ckernels'] = None
from importlib.resources import files
from gullivr import kernels
from gullivr.config import load_config
from gullivr.tracking_sim import run_scenario
cfg = load_config(files('gullivr') / 'scenarios' / 'quest_map.json')
t = time.perf_counter()
for policy in ('gullivr', 'teleport'):
    run_scenario(cfg, 0, policy)
print(kernels.BACKEND, time.perf_counter() - t)
"""


def workloads():
    f = value_noise(7, 201, 201, 2.0, 6.0, 80.0, origin=(-200.0, -200.0))
    h = np.ascontiguousarray(f.heights)
    x0, z0, cell = f.origin[0], f.origin[1], f.cell_size
    w = smoothing_kernel(4.0, cell)
    wide = smoothing_kernel(12.0, cell)
    d = np.array([0.6, -0.35, 0.4])
    d /= np.linalg.norm(d)
    return {
        "bilinear x1000": lambda k: [k.bilinear(h, x0, z0, cell, 0.37 * i - 150, 0.21 * i - 90)
                                     for i in range(1000)],
        "smoothed_at r=4 x100": lambda k: [k.smoothed_at(h, x0, z0, cell, 0.37 * i, -0.5 * i, w)
                                           for i in range(100)],
        "convolve 201x201 r=12": lambda k: k.convolve(h, wide),
        "march_ray 1 gaze": lambda k: k.march_ray(h, x0, z0, cell, -150.0, 40.0, -150.0, *d,
                                                  0.0, 500.0, cell / 2, 1e-9),
        "march_arc 1 pointer": lambda k: k.march_arc(h, x0, z0, cell, 0.0, 8.0, 0.0, 7.0, 7.0, 0.5,
                                                     9.81, 5.0, 0.01, 1e-11),
    }


def best_time(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--skip-scenario", action="store_true")
    args = ap.parse_args(argv)

    backends = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    print(f"{'kernel':<24}" + "".join(f"{name:>12}" for name, _ in backends) + f"{'speedup':>10}")
    for label, fn in workloads().items():
        times = [best_time(lambda: fn(k), args.repeat) for _, k in backends]
        speed = f"{times[0] / times[1]:9.1f}x" if len(times) == 2 else ""
        print(f"{label:<24}" + "".join(f"{t * 1e3:10.3f}ms" for t in times) + f"{speed:>10}")
    if _ckernels is None:
        print("compiled extension not built; only the fallback was timed")

    if not args.skip_scenario:
        print()
        for force in ([False, True] if _ckernels else [True]):
            out = subprocess.run([sys.executable, "-c", RUN_QUEST.format(force_python=force)],
                                 capture_output=True, text=True, check=True).stdout.split()
            print(f"quest map, both policies, {out[0]:>6} backend: {float(out[1]):.2f}s")


if __name__ == "__main__":
    main()
