"""Maximum per-node throughput for each deployment size and payload."""

import argparse
import csv
from pathlib import Path

from lorawan_capacity.analytic import table1


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/table1.csv")
    args = ap.parse_args()
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n_devices", "payload_bytes", "max_pkt_h", "max_bytes_h", "lambda_star_pkt_h", "success_pct"])
        for n in (250, 500, 1000, 5000):
            for pl in (10, 30, 50):
                r = table1(n, pl)
                w.writerow(
                    [n, pl, f"{r.max_packets_per_hour:.2f}", f"{r.max_bytes_per_hour:.1f}",
                     f"{r.lambda_star_per_hour:.1f}", f"{100 * r.success_probability:.2f}"]
                )
                print(f"N={n:5d} {pl:2d}B  {r.max_packets_per_hour:7.2f} pkt/h at lambda*={r.lambda_star_per_hour:7.1f}"
                      f"  success {100 * r.success_probability:5.2f}%")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
