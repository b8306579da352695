"""``fbc validate|split|diagnose|morse|subgroup <definition> [flags]``.

Exit codes: 0 pass, 1 check failed with a witness, 2 input error, 3 resource cap.
Set ``FBC_CACHE_DIR`` to reuse Cayley balls between runs.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import pickle
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .bass_serre import tree_ball
from .coned_space import cone, diagnose
from .definition import DefinitionError, GroupDefinition, load_definition
from .hierarchy import HierarchyError, build_hierarchy, enumerate_products
from .mapping_torus import BallRangeError, CayleyBall, FbcGroup, ResourceError, ball
from .morse_lab import (DEFAULT_THRESHOLDS, PathSample, SubgroupSpec, detectability_crosscheck,
                        geodesic_samples, morse_check, sample_endpoint_pairs, stability_check, strong_qc_check)

EXIT_PASS, EXIT_WITNESS, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3
CACHE_ENV = "FBC_CACHE_DIR"


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


@dataclass
class RunManifest:
    command: str
    parameters: dict
    seed: int
    thresholds: dict | None
    definition_sha256: str
    outputs: list[str] = field(default_factory=list)
    wall_clock_seconds: float = 0.0
    version: str = __version__

    def write(self, path: Path) -> None:
        path.write_text(dumps(self.__dict__))


class _Ctx:
    def __init__(self, args):
        self.args = args
        self.path = Path(args.definition)
        text = self.path.read_text()
        self.sha = hashlib.sha256(text.encode()).hexdigest()
        self.definition: GroupDefinition = load_definition(self.path)
        self.G, self.rep = self.definition.build()
        self.outputs: list[str] = []

    def ball(self, r: int) -> CayleyBall:
        caps = self.definition.caps
        if r > caps["max_radius"]:
            raise ResourceError(f"radius {r} exceeds the cap max_radius={caps['max_radius']}")
        cache = os.environ.get(CACHE_ENV)
        if cache:
            f = Path(cache) / f"ball-{self.sha[:16]}-{r}.pkl"
            if f.exists():
                B = pickle.loads(f.read_bytes())
                B.group = self.G
                return B
        B = ball(self.G, r, cap=caps["ball_cap"])
        if cache:
            Path(cache).mkdir(parents=True, exist_ok=True)
            g, B.group = B.group, None
            try:
                f.write_bytes(pickle.dumps(B))
            finally:
                B.group = g
        return B

    def hierarchy(self):
        root = build_hierarchy(self.rep, self.G, bound=self.definition.caps["conjugation_bound"])
        return root, enumerate_products(root, bound=self.definition.caps["conjugation_bound"])


def _out(ctx: _Ctx, payload: dict) -> None:
    text = dumps(payload)
    if ctx.args.out:
        Path(ctx.args.out).write_text(text)
        ctx.outputs.append(str(ctx.args.out))
    else:
        sys.stdout.write(text)


def cmd_validate(ctx: _Ctx) -> int:
    report = ctx.rep.validate_filtration(ctx.G.monodromy)
    payload = {"group": ctx.G.name, **report.as_dict()}
    _out(ctx, payload)
    return EXIT_PASS if report.passed else EXIT_WITNESS


def cmd_split(ctx: _Ctx) -> int:
    root, fam = ctx.hierarchy()
    depth = ctx.args.depth
    tree = root.describe()
    if depth is not None:
        def prune(d, k):
            if k >= depth:
                d["children"] = []
            for c in d["children"]:
                prune(c, k + 1)
        prune(tree, 0)
    payload = {"group": ctx.G.name, "hierarchy": tree, "max_depth": root.max_depth, "products": fam.describe()}
    if root.degree == 0:
        payload["note"] = "identity-type monodromy: the hierarchy is a single product leaf"
    _out(ctx, payload)
    if ctx.args.dot:
        gog = root.linear if root.linear is not None else root.splitting
        if gog is None:
            dot = f'digraph graph_of_groups {{\n  v0 [label="{ctx.G.name} (product leaf)"];\n}}\n'
        else:
            dot = gog.to_dot()
        Path(ctx.args.dot).write_text(dot)
        ctx.outputs.append(str(ctx.args.dot))
    return EXIT_PASS


def run_diagnose(definition: GroupDefinition, G: FbcGroup, rep, radius: int, seed: int, B: CayleyBall | None = None):
    root = build_hierarchy(rep, G, bound=definition.caps["conjugation_bound"])
    fam = enumerate_products(root, bound=definition.caps["conjugation_bound"])
    B = B if B is not None else ball(G, radius, cap=definition.caps["ball_cap"])
    cb = cone(B, fam.members)
    tree, scale = None, 1
    # the linear splitting's vertex groups are the products themselves, so cosets project to points
    if root.linear is not None:
        tree, scale = tree_ball(root.linear, 2 * radius, B), 2
    elif root.splitting is not None:
        tree = tree_ball(root.splitting, radius, B)
    rep_ = diagnose(cb, G.name, seed=seed, tree=tree, tree_scale=scale)
    if tree is None:
        rep_.caveats.append("no tree for a product group: Lipschitz check skipped")
    return rep_


def cmd_diagnose(ctx: _Ctx) -> int:
    B = ctx.ball(ctx.args.radius)
    report = run_diagnose(ctx.definition, ctx.G, ctx.rep, ctx.args.radius, ctx.args.seed, B)
    text = report.to_json()
    if ctx.args.out:
        Path(ctx.args.out).write_text(text)
        ctx.outputs.append(str(ctx.args.out))
    else:
        sys.stdout.write(text)
    lip = report.lipschitz_check
    return EXIT_WITNESS if lip is not None and not lip["ok"] else EXIT_PASS


def _thresholds(ctx: _Ctx):
    return ctx.definition.thresholds or DEFAULT_THRESHOLDS


def cmd_morse(ctx: _Ctx) -> int:
    th = _thresholds(ctx)
    _, fam = ctx.hierarchy()
    B = ctx.ball(ctx.args.radius)
    cb = cone(B, fam.members)
    if ctx.args.path:
        path = PathSample.from_text(ctx.G, Path(ctx.args.path).read_text())
        v = morse_check(cb, path, th)
        _out(ctx, {"group": ctx.G.name, "radius": ctx.args.radius, "thresholds": th.as_dict(),
                   "path": [ctx.G.format(x) for x in path.vertices], "verdict": v.as_dict()})
        return EXIT_PASS if v.classification == "morse-consistent" else EXIT_WITNESS
    pairs = sample_endpoint_pairs(cb, ctx.args.pairs, ctx.args.seed)
    samples = geodesic_samples(cb, pairs)
    rep = detectability_crosscheck(cb, samples, th)
    _out(ctx, {"group": ctx.G.name, "radius": ctx.args.radius, "seed": ctx.args.seed, "pairs": len(pairs),
               "crosscheck": rep.as_dict()})
    return EXIT_PASS if rep.agreement == 1.0 else EXIT_WITNESS


def cmd_subgroup(ctx: _Ctx) -> int:
    raw = ctx.args.gens
    parts = raw.split(",") if "," in raw else raw.split()
    gens = [ctx.G.parse(g) for g in parts]
    H = SubgroupSpec(gens, ball_radius=ctx.args.radius)
    B = ctx.ball(ctx.args.radius)
    payload = {"group": ctx.G.name, "generators": [ctx.G.format(g) for g in gens], "radius": ctx.args.radius,
               "mode": ctx.args.mode}
    if ctx.args.mode == "stable":
        _, fam = ctx.hierarchy()
        cb = cone(B, fam.members)
        rep = stability_check(cb, H, thresholds=_thresholds(ctx))
        payload["report"] = rep.as_dict()
        _out(ctx, payload)
        return EXIT_PASS if rep.verdict == "stable-consistent" else EXIT_WITNESS
    rep = strong_qc_check(B, H, ctx.args.M, seed=ctx.args.seed)
    payload["report"] = rep.as_dict()
    _out(ctx, payload)
    return EXIT_WITNESS if rep.escaped else EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fbc", description="free-by-cyclic workbench")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, radius_default: int | None = None):
        sp.add_argument("definition")
        sp.add_argument("--out", help="write JSON here instead of stdout")
        sp.add_argument("--manifest", help="write a run manifest here")
        sp.add_argument("--seed", type=int, default=0)
        if radius_default is not None:
            sp.add_argument("--radius", type=int, default=radius_default)

    common(sub.add_parser("validate", help="check the representative"))
    sp = sub.add_parser("split", help="hierarchy and product family")
    common(sp)
    sp.add_argument("--depth", type=int)
    sp.add_argument("--dot", help="write the top splitting as DOT")
    common(sub.add_parser("diagnose", help="coned-ball diagnostics"), 6)
    sp = sub.add_parser("morse", help="Morse detection")
    common(sp, 8)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--path", help="text file of generator tokens, one step per token")
    g.add_argument("--geodesics", choices=["auto"])
    sp.add_argument("--pairs", type=int, default=200)
    sp = sub.add_parser("subgroup", help="stability or strong quasiconvexity")
    common(sp, 8)
    sp.add_argument("--gens", required=True, help="generators separated by spaces ('a b'), or by commas for multi-letter words ('b a, t')")
    sp.add_argument("--mode", choices=["stable", "strongqc"], default="stable")
    sp.add_argument("-M", type=int, default=2, help="neighbourhood size to test against")
    return p


COMMANDS = {"validate": cmd_validate, "split": cmd_split, "diagnose": cmd_diagnose, "morse": cmd_morse,
            "subgroup": cmd_subgroup}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    start = time.time()
    try:
        ctx = _Ctx(args)
        code = COMMANDS[args.command](ctx)
    except (DefinitionError, FileNotFoundError) as e:
        print(f"fbc: input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceError as e:
        print(f"fbc: resource cap: {e} (partial results: {getattr(e, 'partial', 0)})", file=sys.stderr)
        return EXIT_RESOURCE
    except (BallRangeError, HierarchyError, ValueError) as e:
        print(f"fbc: input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    if args.manifest:
        params = {k: v for k, v in sorted(vars(args).items()) if k not in ("manifest",)}
        th = ctx.definition.thresholds
        m = RunManifest(args.command, params, args.seed, th.as_dict() if th else None, ctx.sha, ctx.outputs,
                        round(time.time() - start, 3))
        m.write(Path(args.manifest))
    return code


if __name__ == "__main__":
    sys.exit(main())
