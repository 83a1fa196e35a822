"""Refit the ECDD control-limit polynomial for a target in-control ARL.

For each error rate on a grid, bisect the constant control limit whose mean
run length to a false alarm matches the target, replicating ECDD's update
rules (running error rate, EWMA with smoothing 0.2, 30-sample warm-up).
A least-squares fit of c0 + c1 p + c3 p^3 + c5 p^5 + c7 p^7 follows, then the
fitted polynomial is checked by simulating the detector's own rule.

    python scripts/calibrate_ecdd.py --arl0 1000
"""

import argparse

import numpy as np

LAM = 0.2
WARMUP = 30


def run_lengths(p0, limit_fn, runs, horizon, seed):
    rng = np.random.default_rng(seed)
    rate = np.zeros(runs)
    ewma = np.zeros(runs)
    alive = np.ones(runs, dtype=bool)
    lengths = np.full(runs, horizon, dtype=float)
    decay = 1.0
    for t in range(1, horizon + 1):
        x = rng.random(runs) < p0
        rate += (x - rate) / t
        ewma = (1 - LAM) * ewma + LAM * x
        decay *= (1 - LAM) ** 2
        if t < WARMUP:
            continue
        sigma = np.sqrt(rate * (1 - rate) * LAM / (2 - LAM) * (1 - decay))
        alarm = alive & (ewma - rate > limit_fn(rate) * sigma)
        lengths[alarm] = t
        alive &= ~alarm
        if not alive.any():
            break
    return lengths


def bisect_limit(p0, target, runs, horizon, seed):
    lo, hi = 0.5, 8.0
    for _ in range(18):
        mid = 0.5 * (lo + hi)
        arl = run_lengths(p0, lambda r: mid, runs, horizon, seed).mean()
        if arl < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--arl0", type=float, default=1000)
    parser.add_argument("--runs", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=20120101)
    args = parser.parse_args()
    horizon = int(20 * args.arl0)
    grid = np.array([0.02, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5])
    limits = []
    for p0 in grid:
        limit = bisect_limit(p0, args.arl0, args.runs, horizon, args.seed)
        limits.append(limit)
        print(f"p={p0:.2f}  L={limit:.4f}", flush=True)
    design = np.stack([grid**0, grid, grid**3, grid**5, grid**7], axis=1)
    coef, *_ = np.linalg.lstsq(design, np.array(limits), rcond=None)
    print("coefficients:", tuple(round(c, 4) for c in coef))

    def poly(r):
        return coef[0] + coef[1] * r + coef[2] * r**3 + coef[3] * r**5 + coef[4] * r**7

    for p0 in (0.05, 0.1, 0.2, 0.3):
        arl = run_lengths(p0, poly, args.runs, horizon, args.seed + 1).mean()
        print(f"check p={p0:.2f}  ARL={arl:.0f}")


if __name__ == "__main__":
    main()
