#!/usr/bin/env python3
"""Generate the synthetic demo corpus and a ready-to-run pipeline config.

Usage:
    python scripts/generate_demo_data.py --out data [--seed 20110]

Then run the pipeline:
    visrisk ingest     --config data/config.json --data-dir artifacts
    visrisk train-som  --config data/config.json --data-dir artifacts
    visrisk train-sotm --config data/config.json --data-dir artifacts
    visrisk network    --config data/config.json --data-dir artifacts
    visrisk ewm-score  --config data/config.json --data-dir artifacts
    visrisk serve      --config data/config.json --data-dir artifacts --port 8700
"""

import argparse

from visrisk.synthetic import write_demo_data


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="data", help="output directory")
    parser.add_argument("--seed", type=int, default=20110)
    parser.add_argument("--quarters", type=int, default=88)
    parser.add_argument("--docs", type=int, default=1500)
    args = parser.parse_args()
    config = write_demo_data(args.out, n_quarters=args.quarters,
                             seed=args.seed, n_docs=args.docs)
    print(f"wrote demo corpus and config: {config}")


if __name__ == "__main__":
    main()
