"""Compare the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Times the Mellin-Barnes line integral (both kernels, small and large
argument), the hypergeometric series near the slow end of its range, and an
end-to-end OPRA capacity.  Each backend is checked against the other before
timing.
"""

import argparse
import math
import timeit

from fisher_ec import _backend

CASES = {
    "mb_line opra z=12": (0, -0.75, math.log(12.0), 2.5, 1.5),
    "mb_line opra z=1e6": (0, -2.0, math.log(1e6), 2.5, 1.5),
    "mb_line ora z=0.4": (1, 0.5, math.log(0.4), 2.5, 1.5),
    "mb_line ora z=1e4": (1, -0.5, math.log(1e4), 3.5, 5.0),
}


def _mb(k, case):
    kind, c, logz, m, ms = case
    lognorm = k.lgamma(m) + k.lgamma(ms)
    T = 14.0 if kind == 0 else 7.0
    width = min(1.0, 3.0 / abs(logz))
    return lambda: k.mb_line(kind, c, logz, m, ms, lognorm, T, 1e-12, 200_000, width)


def _series(k):
    return lambda: k.hyp2f1_series(1.5, 4.0, 2.5, 0.66, 1e-16, 100_000)


def _opra(name):
    import os
    import subprocess
    import sys
    code = ("import timeit;from fisher_ec import FadingParams, ec_opra;"
            "p=FadingParams(2.5,1.5,10.0);"
            "print(min(timeit.repeat(lambda: ec_opra(p), number=5, repeat=3))/5);"
            "print(repr(ec_opra(p).ec_nats))")
    env = dict(os.environ, FISHER_EC_BACKEND=name)
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                         text=True, check=True)
    seconds, value = (float(v) for v in out.stdout.split())
    return seconds, value


def best(fn, repeat, number):
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    names = _backend.available()
    if "cython" not in names:
        print("compiled kernels not built; only the fallback is available")
    backends = {n: _backend.get(n) for n in names}

    rows = []
    for label, case in CASES.items():
        vals = {n: _mb(k, case)()[0] for n, k in backends.items()}
        spread = max(vals.values()) - min(vals.values())
        times = {n: best(_mb(k, case), args.repeat, 3) for n, k in backends.items()}
        rows.append((label, times, spread))
    vals = {n: _series(k)()[0] for n, k in backends.items()}
    rows.append(("hyp2f1 series w=0.66", {n: best(_series(k), args.repeat, 20)
                                           for n, k in backends.items()},
                 max(vals.values()) - min(vals.values())))
    runs = {n: _opra(n) for n in names}
    vals = [v for _, v in runs.values()]
    rows.append(("ec_opra end to end", {n: t for n, (t, _) in runs.items()},
                 max(vals) - min(vals)))

    head = f"{'case':<24}" + "".join(f"{n + ' [ms]':>16}" for n in names)
    if len(names) > 1:
        head += f"{'speedup':>10}{'|diff|':>12}"
    print(head)
    for label, times, spread in rows:
        line = f"{label:<24}" + "".join(f"{1e3 * times[n]:>16.3f}" for n in names)
        if len(names) > 1:
            line += f"{times['python'] / times['cython']:>10.1f}{spread:>12.1e}"
        print(line)


if __name__ == "__main__":
    main()
