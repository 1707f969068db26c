import argparse
import json
import logging
import sys
import time
from itertools import product
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.core import core, logs  # noqa: E402
from src.modules.Measurements import Mode  # noqa: E402
from src.modules.Relations import RankStrategy  # noqa: E402
from src.modules.Reconstruction import NoBaseFound, reconstruct, verify  # noqa: E402


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Seeded gen -> reconstruct -> verify experiment matrix.")
    parser.add_argument("--dims", type=int, nargs="+", default=[2])
    parser.add_argument("--points", type=int, nargs="+", default=[4, 5, 6, 7, 8])
    parser.add_argument("--modes", nargs="+", choices=["path", "loop"], default=["path", "loop"])
    parser.add_argument("--extras", type=int, nargs="+", default=[0, 10])
    parser.add_argument("--trials", type=int, default=5)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--rank-strategy", choices=["brute", "reduced", "distinct"])
    parser.add_argument("-o", "--out", type=Path, help="Write the per-cell summary as JSON")
    args = parser.parse_args()

    logs.setup(logging.WARNING)
    summary = []
    failures = 0
    for d, n, mode, extra in product(args.dims, args.points, args.modes, args.extras):
        if n < d + 2:
            continue
        passed = 0
        started = time.perf_counter()
        for trial in range(args.trials):
            spec = core.ExperimentSpec(
                Points=n, Dim=d, Mode=Mode(mode), Extra=extra,
                Seeds=core.Seeds(Config=trial, Ensemble=1000 + trial, Shuffle=2000 + trial),
                RankStrategy=RankStrategy(args.rank_strategy) if args.rank_strategy else None,
            )
            truth, _, data, _ = core.simulate(spec)
            try:
                result = reconstruct(data, core.reconstruction_settings(spec, args.workers))
            except NoBaseFound:
                continue
            verdict = verify(truth, result)
            if verdict.Matched and verdict.Scale == 1 and result.Configuration.n == n:
                passed += 1
        elapsed = time.perf_counter() - started
        failures += args.trials - passed
        summary.append({"dim": d, "points": n, "mode": mode, "extra": extra,
                        "passed": passed, "trials": args.trials, "seconds": round(elapsed, 2)})
        print(f"d={d} n={n} {mode:4} extra={extra:2}: {passed}/{args.trials} passed in {elapsed:.1f}s")

    if args.out:
        with open(args.out, "w", encoding="utf-8") as file:
            json.dump(summary, file, indent=2)
        print(f"Written summary to {args.out}.")
    sys.exit(1 if failures else 0)
