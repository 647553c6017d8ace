#!/usr/bin/env python3
"""Run the whole pipeline on the bundled ledger and inspect the bundle.

Equivalent to:

    ledgerflow run demos/data/demo_ledger.csv --output <dir> \
        --seed 2020 --replicas 100 --mode target

All outputs are fully determined by the input file and the configuration;
rerunning the same command reproduces every table byte for byte.
"""

import json
import tempfile
from pathlib import Path

from ledgerflow.nullmodel import SwapMode
from ledgerflow.pipeline import PipelineConfig, run_pipeline

LEDGER = Path(__file__).parent / "data" / "demo_ledger.csv"


def main() -> None:
    out_dir = Path(tempfile.mkdtemp(prefix="ledgerflow-demo-"))
    config = PipelineConfig(
        input_path=LEDGER,
        output_dir=out_dir,
        modes=(SwapMode.TARGET,),
        replicas=100,
        master_seed=2020,
    )
    result = run_pipeline(config)

    print(f"bundle written to {out_dir}:")
    for path in sorted(result.output_files):
        print(f"  {path.name}")

    print("\nstage wall times:")
    for entry in result.manifest["stages"]:
        print(f"  {entry['name']:<14} {entry['seconds']:.3f}s")

    strategy = json.loads((out_dir / "strategy_report.json").read_text())
    print("\nstrategy signals:")
    for key, value in strategy.items():
        print(f"  {key}: {value}")


if __name__ == "__main__":
    main()
