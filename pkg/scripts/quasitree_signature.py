"""Four-point delta and bottleneck Delta of coned balls across radii, plus the uncned flat control.

    python3 scripts/quasitree_signature.py --groups G2 G3 --radii 4 6 8
"""

import argparse
import gc
import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from fbclab.coned_space import cone, measure_bottleneck, measure_delta, pair_bottleneck
from fbclab.definition import load_definition
from fbclab.hierarchy import build_hierarchy, enumerate_products
from fbclab.mapping_torus import ball

ROOT = Path(__file__).resolve().parents[1]


@dataclass
class Config:
    groups: list[str] = field(default_factory=lambda: ["G2", "G3"])
    radii: list[int] = field(default_factory=lambda: [4, 6, 8])
    pool_size: int = 24
    bottleneck_pairs: int = 6
    seed: int = 0


def run(cfg: Config) -> list[dict]:
    rows = []
    for name in cfg.groups:
        G, rep = load_definition(ROOT / "fixtures" / f"{name}.fbc").build()
        members = enumerate_products(build_hierarchy(rep, G)).members
        for r in cfg.radii:
            start = time.time()
            B = ball(G, r)
            cb = cone(B, members)
            row = {"group": name, "radius": r, "elements": len(B),
                   "delta": measure_delta(cb, pool_size=cfg.pool_size, seed=cfg.seed).delta,
                   "Delta": measure_bottleneck(cb, n_pairs=cfg.bottleneck_pairs, seed=cfg.seed).delta}
            if name == "G2":
                j = r // 3
                row["control_Delta"] = pair_bottleneck(cone(B, []), B.index[G.t(-j)], B.index[G.t(j)]).delta
            row["seconds"] = round(time.time() - start, 1)
            rows.append(row)
            print(json.dumps(row), flush=True)
            del B, cb
            gc.collect()
    return rows


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--groups", nargs="+", default=["G2", "G3"])
    ap.add_argument("--radii", nargs="+", type=int, default=None)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    cfg = Config(groups=args.groups, seed=args.seed)
    if args.radii:
        cfg.radii = args.radii
    print(json.dumps(asdict(cfg)))
    run(cfg)
