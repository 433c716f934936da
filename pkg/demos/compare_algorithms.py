"""Run the four embedders on the 14-node reference topology and tabulate means.

Each trial draws one substrate state and one request stream; every
algorithm sees the same stream, and the batch sizes are prefixes of it.
Pass a trial count to shorten or extend the run (default ten).

    python3 demos/compare_algorithms.py [trials]
"""

import sys

from bivne import harness

LABELS = {"acceptance_ratio": "acceptance", "avg_path_hops": "path hops", "r_over_c": "R/C", "profit": "profit"}


def main(trials: int = 10):
    config = harness.load_config("dt14").replace(trials=trials)
    reports = [harness.run_experiment(config.replace(algorithm=a)) for a in harness.ALGORITHMS]
    series = harness.plot_series(reports)
    for metric, label in LABELS.items():
        print(f"\n{label} (mean over {trials} trials)")
        print(f"{'requests':>9}" + "".join(f"{a:>14}" for a in harness.ALGORITHMS))
        for point in series[metric]:
            cells = "".join(f"{'-' if point[a] is None else f'{point[a]:.3f}':>14}" for a in harness.ALGORITHMS)
            print(f"{point['vnr_count']:>9}{cells}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 10)
