"""Acylindricity of the reference splittings at several kappa, axis-intersection bounds, and the
coarse-stabilizer table of a coned ball.

    python3 scripts/acylindricity_scan.py [--ball 6] [--tree 3] [--coned-radius 8]
"""

import argparse
import json
from dataclasses import asdict, dataclass
from pathlib import Path

from fbclab.bass_serre import axis_intersection_check, check_acylindricity, tree_ball
from fbclab.coned_space import acylindricity_table, cone
from fbclab.definition import load_definition
from fbclab.hierarchy import build_hierarchy, enumerate_products
from fbclab.mapping_torus import ball

ROOT = Path(__file__).resolve().parents[1]
AXIS_WORDS = ["c", "c b", "c a", "t c", "a c", "b c", "c b'", "c c", "c a b", "c' b", "c b b", "t c b"]


@dataclass
class Config:
    ball_radius: int = 6
    tree_radius: int = 3
    coned_radius: int = 8
    kappas: tuple[int, ...] = (1, 2, 3, 4)


def load(name: str):
    G, rep = load_definition(ROOT / "fixtures" / f"{name}.fbc").build()
    root = build_hierarchy(rep, G)
    return G, root, enumerate_products(root).members


def splittings(cfg: Config):
    for name, which in (("G3", "splitting"), ("G2", "linear")):
        G, root, _ = load(name)
        B = ball(G, cfg.ball_radius)
        tb = tree_ball(getattr(root, which), cfg.tree_radius, B)
        for k in cfg.kappas:
            rep = check_acylindricity(tb, k, B)
            yield {"group": name, "splitting": which, "kappa": k, "passed": rep.passed,
                   "paths_examined": rep.paths_examined, "longest_stabilized": rep.longest_stabilized}


def axes(cfg: Config):
    G, root, _ = load("G3")
    B = ball(G, cfg.ball_radius)
    tb = tree_ball(root.splitting, cfg.tree_radius, B)
    memo: dict = {}
    for i, u in enumerate(AXIS_WORDS):
        for v in AXIS_WORDS[i + 1:]:
            rep = axis_intersection_check(tb, G.parse(u), G.parse(v), 2, memo)
            yield {"g": u, "h": v, **rep.as_dict()}


def coarse_table(cfg: Config):
    G, _, members = load("G2")
    cb = cone(ball(G, cfg.coned_radius), members)
    for row in acylindricity_table(cb, [1], [1, 2, 3, 4, 5, 6]):
        yield row.as_dict()


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--ball", type=int, default=6)
    ap.add_argument("--tree", type=int, default=3)
    ap.add_argument("--coned-radius", type=int, default=8)
    args = ap.parse_args()
    cfg = Config(args.ball, args.tree, args.coned_radius)
    print(json.dumps(asdict(cfg)))
    for part in (splittings, axes, coarse_table):
        for row in part(cfg):
            print(json.dumps(row, default=str), flush=True)
