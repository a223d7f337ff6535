"""Network packets/hour when every device transmits at its duty-cycle cap."""

import argparse
import csv
from pathlib import Path

import numpy as np

from lorawan_capacity.analytic import ScenarioSpec, network_received_at_max_rate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--payload", type=int, default=10)
    ap.add_argument("--n-max", type=int, default=5000)
    ap.add_argument("--out", default="results/fig2_network_received.csv")
    args = ap.parse_args()
    n_values = np.unique(np.round(np.logspace(0, np.log10(args.n_max), 80)).astype(int))
    points = network_received_at_max_rate(ScenarioSpec(1, 0.0, args.payload), n_values)
    best = max(points, key=lambda p: p.network_packets_per_hour)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n_devices", "network_pkt_h", "per_node_pkt_h"])
        for p in points:
            w.writerow([p.n_devices, f"{p.network_packets_per_hour:.3f}", f"{p.per_node_packets_per_hour:.4f}"])
    print(f"peak {best.network_packets_per_hour:.0f} pkt/h at N={best.n_devices}; wrote {out}")


if __name__ == "__main__":
    main()
