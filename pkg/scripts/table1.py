"""Accuracy of the weight 4 disc-6 expansion against its closed form, as a function of N.

Double precision rows run in seconds; the extended rows take a few minutes.
"""

from __future__ import annotations

import argparse
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from mfseries.bench import machine_metadata, table1_sweep


@dataclass
class SweepConfig:
    double_Ns: list = field(default_factory=lambda: [10, 15, 20, 25, 30, 35])
    extended_Ns: list = field(default_factory=lambda: [40, 50, 60, 70])
    extended_digits: int = 30
    method: str = "lu"
    out: str = "results/table1"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=SweepConfig.out)
    ap.add_argument("--digits", type=int, default=SweepConfig.extended_digits)
    ap.add_argument("--method", choices=["lu", "svd"], default=SweepConfig.method)
    ap.add_argument("--no-extended", action="store_true")
    args = ap.parse_args()
    cfg = SweepConfig(extended_digits=args.digits, method=args.method, out=args.out)
    if args.no_extended:
        cfg.extended_Ns = []

    rows = table1_sweep(cfg.double_Ns, 15, cfg.method)
    if cfg.extended_Ns:
        rows += table1_sweep(cfg.extended_Ns, cfg.extended_digits, cfg.method)
    print(f"{'N':>4} {'digits':>6} {'rho|b1 err|':>12} {'max rho^n err':>14} {'seconds':>8}")
    for r in rows:
        print(f"{r.N:4d} {r.digits:6d} {r.b1_error:12.2e} {r.max_error:14.2e} {r.seconds:8.2f}")

    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "table1.json").write_text(json.dumps(
        {"config": asdict(cfg), "machine": machine_metadata(), "rows": [asdict(r) for r in rows]}, indent=1) + "\n")


if __name__ == "__main__":
    main()
