"""Write fringe CSVs for each protocol family into the output directory."""

import argparse
import math
from pathlib import Path

from echosqueeze.cli import main as cli_main


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--outdir", default="results")
    args = p.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)

    jobs = {
        "fringe_scsp_n20_n21.csv": ["--n", "20,21", "--protocol", "SCSP_E,SCSP_O", "--phi-grid", "-0.3:0.3:241"],
        "fringe_cesp_n100_n101.csv": ["--n", "100,101", "--protocol", "CESP", "--phi-grid", "-0.6:0.6:241"],
        "fringe_gesp_n100.csv": ["--n", "100", "--protocol", "GESP_E,GESP_O", "--mu", repr(math.pi / 4),
                                 "--phi-grid", "-0.15:0.15:301"],
    }
    for name, flags in jobs.items():
        cli_main(["fringe", *flags, "--out", str(out / name)])
        print(f"wrote {out / name}")


if __name__ == "__main__":
    main()
