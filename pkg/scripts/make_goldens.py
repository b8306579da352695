"""Regenerate every golden report through the CLI.

    python3 scripts/make_goldens.py            # rewrite goldens/
    python3 scripts/make_goldens.py --check    # compare without writing (exit 1 on any difference)
"""

import argparse
import sys
import tempfile
from pathlib import Path

from fbclab.cli import main

ROOT = Path(__file__).resolve().parents[1]
FIX = ROOT / "fixtures"

# golden name -> CLI arguments (output flags are appended)
GOLDENS = {
    "G2_validate.json": ["validate", "G2.fbc"],
    "G3_validate.json": ["validate", "G3.fbc"],
    "G2_subdivided_validate.json": ["validate", "G2_subdivided.fbc"],
    "P1_split.json": ["split", "P1.fbc"],
    "G2_split.json": ["split", "G2.fbc"],
    "G3_split.json": ["split", "G3.fbc"],
    "G2_diagnose_r6_s0.json": ["diagnose", "G2.fbc", "--radius", "6", "--seed", "0"],
    "P1_diagnose_r4_s0.json": ["diagnose", "P1.fbc", "--radius", "4", "--seed", "0"],
    "G2_morse_b4.json": ["morse", "G2.fbc", "--path", "paths/b4.txt", "--radius", "8"],
    "G2_morse_a4.json": ["morse", "G2.fbc", "--path", "paths/a4.txt", "--radius", "8"],
    "G2_subgroup_b_stable_r8.json": ["subgroup", "G2.fbc", "--gens", "b", "--mode", "stable", "--radius", "8"],
    "G2_subgroup_a_stable_r8.json": ["subgroup", "G2.fbc", "--gens", "a", "--mode", "stable", "--radius", "8"],
}
DOT_GOLDENS = {"G2_split.dot": ["split", "G2.fbc"], "G3_split.dot": ["split", "G3.fbc"]}


def resolve(args: list[str]) -> list[str]:
    out = []
    for a in args:
        out.append(str(FIX / a) if (a.endswith(".fbc") or a.startswith("paths/")) else a)
    return out


def render(name: str, workdir: Path) -> bytes:
    target = workdir / name
    if name in DOT_GOLDENS:
        main(resolve(DOT_GOLDENS[name]) + ["--out", str(workdir / "ignored.json"), "--dot", str(target)])
    else:
        main(resolve(GOLDENS[name]) + ["--out", str(target)])
    return target.read_bytes()


def all_names() -> list[str]:
    return list(GOLDENS) + list(DOT_GOLDENS)


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--check", action="store_true")
    a = ap.parse_args()
    bad = 0
    with tempfile.TemporaryDirectory() as tmp:
        for name in all_names():
            data = render(name, Path(tmp))
            golden = ROOT / "goldens" / name
            if a.check:
                same = golden.exists() and golden.read_bytes() == data
                bad += not same
                print(f"{'same' if same else 'DIFFERS'}  {name}")
            else:
                golden.write_bytes(data)
                print(f"wrote {name}")
    sys.exit(1 if bad else 0)
