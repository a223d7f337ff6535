"""Airtime of every SF across payload sizes, written to results/fig1_time_on_air.csv."""

import argparse
import csv
from pathlib import Path

from lorawan_capacity.phy import airtime_table


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/fig1_time_on_air.csv")
    args = ap.parse_args()
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["sf", "payload_bytes", "toa_ms"])
        for sf, pl, ms in airtime_table():
            w.writerow([sf, pl, f"{ms:.3f}"])
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
