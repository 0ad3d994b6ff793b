"""Time the hot kernels on the compiled and the pure-numpy path.

Each backend runs in its own interpreter because the choice is made at import.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""
import argparse
import json
import os
import subprocess
import sys
import time

CASES = {
    "gp N=128, 20 periods": "gp_evolve(state_to_field(ews_state(), 128), p, "
                            "NumericsConfig(128, 1000, 20, 10), n_max=1)",
    "gp N=256, 10 periods": "gp_evolve(state_to_field(ews_state(), 256), p, "
                            "NumericsConfig(256, 1000, 10, 10), n_max=1)",
    "tmm 200 periods": "tmm_evolve(ews_state(), p, NumericsConfig(16, 1000, 200, 10))",
    "tangent 200 periods": "evolve_with_tangent(ews_state(), TangentVector.uniform(1e-20), p, "
                           "NumericsConfig(16, 1000, 200, 10))",
}


def _child(repeat):
    from ringratchet import (DriveParams, NumericsConfig, TangentVector, _jit,  # noqa: F401
                             evolve_with_tangent, ews_state, gp_evolve,
                             state_to_field, tmm_evolve)
    p = DriveParams()
    env = dict(locals())
    out = {"backend": _jit.backend()}
    for name, expr in CASES.items():
        eval(expr, env)  # compile / warm caches
        best = float("inf")
        for _ in range(repeat):
            t = time.perf_counter()
            eval(expr, env)
            best = min(best, time.perf_counter() - t)
        out[name] = best
    print(json.dumps(out))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.child:
        return _child(args.repeat)
    results = []
    for disable in ("0", "1"):
        env = dict(os.environ, RINGRATCHET_DISABLE_NUMBA=disable)
        done = subprocess.run([sys.executable, __file__, "--child", "--repeat", str(args.repeat)],
                              env=env, capture_output=True, text=True, check=True)
        results.append(json.loads(done.stdout))
    fast, slow = results
    print(f"{'case':<24}{fast['backend']:>12}{slow['backend']:>12}{'speedup':>10}")
    for name in CASES:
        print(f"{name:<24}{fast[name]:>11.3f}s{slow[name]:>11.3f}s{slow[name] / fast[name]:>9.1f}x")


if __name__ == "__main__":
    main()
