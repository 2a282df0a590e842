"""Write the CSV traces behind every figure into one directory.

    python scripts/reproduce_figures.py [outdir]
"""

import sys
from pathlib import Path

from feynclock.experiments import EXPERIMENTS, ExperimentConfig, run_experiment
from feynclock.observables import write_csv


def main(outdir="figures"):
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    for name in EXPERIMENTS:
        outcome = run_experiment(ExperimentConfig(name))
        path = out / f"{name}.csv"
        write_csv(outcome.series, path, index_name=outcome.index_name)
        print(f"{name:12s} -> {path}  {outcome.summary}")


if __name__ == "__main__":
    main(*sys.argv[1:])
