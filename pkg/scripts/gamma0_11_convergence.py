"""Non-cocompact case: Gamma0(11) expansion error against the q-expansion oracle as N and precision vary.

Each run uses the shipped configuration with Hecke rows, overriding N and digits.
"""

from __future__ import annotations

import argparse
import json
from dataclasses import dataclass, field
from pathlib import Path

from mfseries.cli import main as cli_main


@dataclass
class ConvergenceConfig:
    config: str = "configs/gamma0_11.cfg"
    runs: list = field(default_factory=lambda: [(15, 60), (15, 100), (25, 150), (25, 300)])  # (digits, N)
    out: str = "results/gamma0_11_convergence"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--quick", action="store_true", help="only the double precision runs")
    args = ap.parse_args()
    cfg = ConvergenceConfig()
    runs = [r for r in cfg.runs if r[0] == 15] if args.quick else cfg.runs
    rows = []
    for digits, N in runs:
        out = Path(cfg.out) / f"d{digits}_N{N}"
        code = cli_main(["compute", cfg.config, "--digits", str(digits), "--n", str(N), "--out", str(out)])
        data = json.loads((out / "result.json").read_text())
        err = data["checks"]["oracle"]["max_scaled_error"]
        secs = sum(data["timings_ms"].values()) / 1e3
        rows.append({"digits": digits, "N": N, "oracle_error": err, "seconds": secs, "exit": code})
        print(f"digits={digits:3d} N={N:4d}  oracle error {err:.2e}  {secs:.0f}s  exit {code}")
    Path(cfg.out, "summary.json").write_text(json.dumps(rows, indent=1) + "\n")


if __name__ == "__main__":
    main()
