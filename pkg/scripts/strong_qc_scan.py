"""Stability and strong-quasiconvexity verdicts for cyclic subgroups of G2 over a range of radii.

    python3 scripts/strong_qc_scan.py --gens a b --radii 6 7 8
"""

import argparse
import gc
import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from fbclab.coned_space import cone
from fbclab.definition import load_definition
from fbclab.hierarchy import build_hierarchy, enumerate_products
from fbclab.mapping_torus import ball
from fbclab.morse_lab import SubgroupSpec, load_thresholds, stability_check, strong_qc_check

ROOT = Path(__file__).resolve().parents[1]


@dataclass
class Config:
    gens: list[str] = field(default_factory=lambda: ["a", "b"])
    radii: list[int] = field(default_factory=lambda: [6, 7, 8])
    M: int = 1
    pairs: int = 60
    seed: int = 0


def run(cfg: Config) -> list[dict]:
    G, rep = load_definition(ROOT / "fixtures" / "G2.fbc").build()
    members = enumerate_products(build_hierarchy(rep, G)).members
    th = load_thresholds(ROOT / "goldens" / "morse_thresholds_G2.json")
    rows = []
    for r in cfg.radii:
        B = ball(G, r)
        cb = cone(B, members)
        for word in cfg.gens:
            start = time.time()
            H = SubgroupSpec([G.parse(word)], r)
            s = stability_check(cb, H, thresholds=th)
            q = strong_qc_check(B, H, M=cfg.M, n_pairs=cfg.pairs, seed=cfg.seed)
            row = {"radius": r, "subgroup": word, "stability": s.verdict, "qi_fit": s.qi_fit,
                   "geodesic_escape": q.observed_M, "quasigeodesic_escape": q.quasi_observed_M,
                   "escaped": q.escaped, "pairs": q.pairs, "seconds": round(time.time() - start, 1)}
            rows.append(row)
            print(json.dumps(row, default=str), flush=True)
        del B, cb
        gc.collect()
    return rows


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--gens", nargs="+", default=["a", "b"])
    ap.add_argument("--radii", nargs="+", type=int, default=[6, 7, 8])
    ap.add_argument("-M", type=int, default=1)
    args = ap.parse_args()
    cfg = Config(gens=args.gens, radii=args.radii, M=args.M)
    print(json.dumps(asdict(cfg)))
    run(cfg)
