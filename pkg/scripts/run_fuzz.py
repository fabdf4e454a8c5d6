"""Run the equivalence harness over several seeds and print a one-line summary per seed."""
import argparse
import json
import time

from qubitjm.fuzz import run_fuzz


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--oracle-samples", type=int, default=1000)
    ap.add_argument("--seeds", type=int, nargs="+", default=[42, 43, 44])
    ap.add_argument("--json", action="store_true", help="dump the full summaries")
    args = ap.parse_args()
    for seed in args.seeds:
        t0 = time.perf_counter()
        s = run_fuzz(args.samples, seed, oracle_samples=args.oracle_samples)
        dt = time.perf_counter() - t0
        print(f"seed {seed}: ok={s.ok} disagreements={s.disagreement_count} excluded={s.excluded} "
              f"oracle={s.oracle_agree}/{s.oracle_compared} cases={s.construction_cases} "
              f"min_positivity={s.min_positivity_strict:.2e} ({dt:.1f}s)")
        if args.json:
            print(json.dumps(s.as_dict(), indent=2))


if __name__ == "__main__":
    main()
