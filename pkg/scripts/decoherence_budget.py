"""Collision tolerance and cavity/emission factors at C = 100."""

import argparse
from pathlib import Path

from echosqueeze.cli import main as cli_main


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--outdir", default="results")
    p.add_argument("--n", default="100,1000")
    args = p.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "decoherence.csv"
    cli_main(["decoherence", "--n", args.n, "--mu-grid", "0.05:1.5:59",
              "--kappa", "1", "--gamma", "1", "--g", "5",
              "--n-collided", "0,1,2,5,10,20,50", "--out", str(path)])
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
