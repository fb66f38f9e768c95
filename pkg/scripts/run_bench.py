"""Throughput benchmarks and the disc-6 accuracy sweep, written as CSV plus machine metadata."""

from __future__ import annotations

import argparse
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from mfseries.bench import machine_metadata, table1_sweep, throughput, write_csv


@dataclass
class BenchConfig:
    out: str = "results/bench"
    reps: int = 3
    seed: int = 0
    reduce_points: int = 10_000
    svd_size: int = 71
    assembly_N: int = 35
    sweep_Ns: list = field(default_factory=lambda: [10, 15, 20, 25, 30, 35])
    freeze: bool = False  # also write tests/data/bench_baseline.json


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=BenchConfig.out)
    ap.add_argument("--reps", type=int, default=BenchConfig.reps)
    ap.add_argument("--freeze", action="store_true")
    cfg = BenchConfig(**vars(ap.parse_args()))
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)

    results = [
        throughput("reduce_point", cfg.reduce_points, cfg.reps, cfg.seed),
        throughput("svd", cfg.svd_size, cfg.reps, cfg.seed),
        throughput("assembly", cfg.assembly_N, cfg.reps, cfg.seed),
    ]
    with open(out / "throughput.csv", "w") as fh:
        write_csv(results, fh)
    write_csv(results)

    rows = table1_sweep(cfg.sweep_Ns)
    with open(out / "table1.csv", "w") as fh:
        fh.write("N,digits,b1_error,max_error,seconds\n")
        for r in rows:
            fh.write(f"{r.N},{r.digits},{r.b1_error:.3e},{r.max_error:.3e},{r.seconds:.3f}\n")
            print(f"N={r.N:3d}  rho|b1 err| {r.b1_error:.2e}  max {r.max_error:.2e}  {r.seconds:.2f}s")

    meta = {"config": asdict(cfg), "machine": machine_metadata()}
    (out / "metadata.json").write_text(json.dumps(meta, indent=1) + "\n")
    if cfg.freeze:
        base = Path(__file__).resolve().parent.parent / "tests" / "data" / "bench_baseline.json"
        base.write_text(json.dumps({r.name: r.median_value for r in results} | {"machine": meta["machine"]},
                                   indent=1) + "\n")
        print(f"wrote {base}")


if __name__ == "__main__":
    main()
