"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--dim 24] [--n-omega 2000] [--repeat 5]

Inputs are built from a real TLS-cavity problem so the sparsity of the
transition operators is representative.  The first numba call (compile or
cache load) is reported separately.
"""
import argparse
import time

import numpy as np
from scipy import linalg

from qnm_usc import _kernels
from qnm_usc.qnm import QnmParams
from qnm_usc.simulate import Settings, simulate


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--dim", type=int, default=24, help="kept dressed levels")
    ap.add_argument("--n-omega", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    p = QnmParams.from_quality(1.0, 20, -0.01)
    res = simulate(p, 0.1, settings=Settings(keep=args.dim), grid=np.linspace(0.8, 1.2, 11))
    ts = res.transitions
    y = ts.lowering("c_a", np.full(len(ts), 0.01 + 0j))
    x = ts.lowering("c_a")
    t, z = linalg.schur(res.liouvillian.matrix, output="complex")
    rng = np.random.default_rng(0)
    n = t.shape[0]
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    u = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    w = np.linspace(0.5, 1.5, args.n_omega)

    print(f"dim={args.dim}  superoperator {n}x{n}  n_omega={args.n_omega}  default backend={_kernels.BACKEND}")
    if _kernels.numba is None:
        print("numba not importable; only the numpy path can be timed")

    cases = [
        ("dissipator_super", lambda: _kernels.dissipator_super_numpy(y, x),
         lambda: _kernels.dissipator_super_numba(y, x)),
        ("resolvent_sweep", lambda: _kernels.resolvent_sweep_numpy(t, v, u, w),
         lambda: _kernels.resolvent_sweep_numba(t, v, u, w)),
    ]
    print(f"{'kernel':<18}{'numpy [s]':>12}{'numba 1st [s]':>15}{'numba [s]':>12}{'speedup':>10}{'max |diff|':>13}")
    for name, f_np, f_nb in cases:
        t_np, ref = best_of(f_np, args.repeat)
        if _kernels.numba is None:
            print(f"{name:<18}{t_np:>12.4g}")
            continue
        t_first, _ = best_of(f_nb, 1)
        t_nb, out = best_of(f_nb, args.repeat)
        diff = np.max(np.abs(out - ref))
        print(f"{name:<18}{t_np:>12.4g}{t_first:>15.4g}{t_nb:>12.4g}{t_np / t_nb:>10.1f}{diff:>13.2e}")


if __name__ == "__main__":
    main()
