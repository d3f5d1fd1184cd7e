"""Compiled kernels against their numpy fallbacks.

Run from the repository root after building the extension:

    python benchmarks/bench_kernels.py [--repeat 3]

Each row reports the best wall time over ``--repeat`` runs for both backends
and checks that the two agree.
"""
import argparse
import time

import numpy as np

from rendezvous_bell import _pykernels, kernels
from rendezvous_bell.game import Scenario, compile_game
from rendezvous_bell.graph import from_catalog
from rendezvous_bell.numkit import povm


def best_of(fn, repeat):
    best, out = np.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def rand_herm(rng, *shape):
    g = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    return (g + np.conj(np.swapaxes(g, -1, -2))) / 2


def povm_fallback(R):
    saved = povm.kernels.compiled_backend
    povm.kernels.compiled_backend = None
    try:
        return povm.solve_povms(R)
    finally:
        povm.kernels.compiled_backend = saved


def cases(rng):
    win = compile_game(Scenario(from_catalog("cubic-4", True), 1, False, False)).win
    yield ("lhv_best_response cubic-4 refl (4^8 Bob)",
           lambda: kernels.compiled_backend.lhv_best_response(win),
           lambda: _pykernels.lhv_best_response(win),
           lambda c, p: c[0] == p[0])
    win2 = compile_game(Scenario(from_catalog("cycle-10"), 2, True, True)).win
    yield ("lhv_best_response cycle-10 T2 (4^10 Bob)",
           lambda: kernels.compiled_backend.lhv_best_response(win2),
           lambda: _pykernels.lhv_best_response(win2),
           lambda c, p: c[0] == p[0])
    m = rand_herm(rng, 32, 32)
    yield ("jacobi_eigh d=32",
           lambda: kernels.compiled_backend.jacobi_eigh(m, 1e-15, 60),
           lambda: _pykernels.jacobi_eigh(m, 1e-15, 60),
           lambda c, p: np.allclose(c[0], p[0], atol=1e-10))
    X = np.eye(8) + 0.1 * rand_herm(rng, 200, 8, 8)
    dX = rand_herm(rng, 200, 8, 8)
    yield ("step_to_boundary 200 x (8x8)",
           lambda: kernels.compiled_backend.step_to_boundary(X, dX),
           lambda: _pykernels.step_to_boundary(X, dX),
           lambda c, p: np.allclose(c, p, rtol=1e-8))
    R = rand_herm(rng, 51, 9, 4, 4)
    yield ("POVM barrier 51 x (9 outcomes, d=4)",
           lambda: povm.solve_povms(R),
           lambda: povm_fallback(R),
           lambda c, p: np.allclose(c.value, p.value, atol=1e-7))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if kernels.compiled_backend is None:
        raise SystemExit("compiled extension not available; build it with pip install -e .")
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':42s} {'compiled s':>11s} {'python s':>10s} {'speedup':>8s}  agree")
    for name, fc, fp, same in cases(rng):
        tc, oc = best_of(fc, args.repeat)
        tp, op = best_of(fp, args.repeat)
        print(f"{name:42s} {tc:11.4f} {tp:10.4f} {tp / tc:8.1f}x  {bool(same(oc, op))}")


if __name__ == "__main__":
    main()
