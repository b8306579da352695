"""Calibrate the Morse-detection thresholds on G2's ball(8) and write the golden file.

    python3 scripts/calibrate_morse.py [--pairs 200] [--seed 0] [--out goldens/morse_thresholds_G2.json]
"""

import argparse
import json
from pathlib import Path

from fbclab.coned_space import cone
from fbclab.definition import load_definition
from fbclab.hierarchy import build_hierarchy, enumerate_products
from fbclab.mapping_torus import IDENTITY, ball
from fbclab.morse_lab import calibrate, geodesic_samples, profile, sample_endpoint_pairs

ROOT = Path(__file__).resolve().parents[1]
RADIUS = 8


def morse_samples(pairs: int = 200, seed: int = 0):
    G, rep = load_definition(ROOT / "fixtures" / "G2.fbc").build()
    fam = enumerate_products(build_hierarchy(rep, G))
    cb = cone(ball(G, RADIUS), fam.members)
    anchors = [(IDENTITY, G.parse("b b b b")), (IDENTITY, G.parse("a a a a"))]
    chosen = sample_endpoint_pairs(cb, pairs, seed, anchors=anchors)
    return G, cb, chosen, geodesic_samples(cb, chosen)


def run(pairs: int = 200, seed: int = 0) -> dict:
    G, cb, chosen, samples = morse_samples(pairs, seed)
    profiles = [profile(cb, s) for s in samples]
    th, tried = calibrate(profiles)
    if th is None:
        raise SystemExit("no grid point gives perfect agreement")
    return {"group": G.name, "radius": RADIUS, "seed": seed, "pairs": len(chosen), "samples": len(samples),
            **th.as_dict(), "grid_points_tried": len(tried)}


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--pairs", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default=str(ROOT / "goldens" / "morse_thresholds_G2.json"))
    a = ap.parse_args()
    result = run(a.pairs, a.seed)
    Path(a.out).write_text(json.dumps(result, sort_keys=True, indent=2) + "\n")
    print(json.dumps(result, sort_keys=True))
