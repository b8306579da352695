"""Group definition files: INI-style sections parsed with configparser.

Example::

    [group]
    name = G2
    basis = a b

    [forward]
    a = a
    b = b a

    [backward]
    a = a
    b = b a'

    [images]
    a = a
    b = b a

Without an ``[edges]`` section the representative is the rose with one petal
per basis letter.  A graph representative lists ``[edges]`` (``name = tail
head``), ``[tree]`` and ``[marking]`` (non-tree edge -> signed basis letter).
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field
from pathlib import Path

from .free_core import Basis, FreeAutomorphism, WordError
from .mapping_torus import FbcGroup
from .morse_lab import Thresholds
from .representative import MarkedGraph, RepresentativeError, TopRep

SECTIONS = ("group", "forward", "backward", "representative", "edges", "tree", "marking", "images",
            "caps", "thresholds")
DEFAULT_CAPS = {"ball_cap": 3_000_000, "max_radius": 10, "conjugation_bound": 6}


class DefinitionError(ValueError):
    def __init__(self, message: str, line: int | None = None, col: int | None = None, field_name: str = ""):
        self.line, self.col, self.field_name = line, col, field_name
        where = f"line {line}, column {col}: " if line is not None else ""
        super().__init__(where + message)


@dataclass
class GroupDefinition:
    name: str
    basis: tuple[str, ...]
    forward: dict[str, str]
    backward: dict[str, str]
    images: dict[str, str]
    order: tuple[str, ...]
    stable_letter: str = "t"
    vertices: tuple[str, ...] = ("v",)
    basepoint: str = "v"
    edges: tuple[tuple[str, str, str], ...] | None = None  # (name, tail, head); None means the rose
    tree: tuple[str, ...] = ()
    marking: dict[str, str] = field(default_factory=dict)
    caps: dict[str, int] = field(default_factory=lambda: dict(DEFAULT_CAPS))
    thresholds: Thresholds | None = None
    seed: int = 0

    # -- building -----------------------------------------------------------

    def build(self) -> tuple[FbcGroup, TopRep]:
        B = Basis(self.basis)
        fwd = [B.parse(self.forward[s]) for s in self.basis]
        bwd = [B.parse(self.backward[s]) for s in self.basis]
        monodromy = FreeAutomorphism(B, fwd, bwd)
        G = FbcGroup(B, monodromy, stable_letter=self.stable_letter, name=self.name)
        if self.edges is None:
            names = self.basis
            graph = MarkedGraph(("v",), names, tuple((0, 0) for _ in names), frozenset(),
                                {i: i + 1 for i in range(len(names))}, B, 0)
        else:
            vidx = {v: i for i, v in enumerate(self.vertices)}
            names = tuple(e[0] for e in self.edges)
            ends = tuple((vidx[t], vidx[h]) for _, t, h in self.edges)
            eidx = {n: i for i, n in enumerate(names)}
            tree = frozenset(eidx[e] for e in self.tree)
            marking = {eidx[e]: B.parse(l)[0] for e, l in self.marking.items()}
            graph = MarkedGraph(self.vertices, names, ends, tree, marking, B, vidx[self.basepoint])
        imgs = [graph.parse_path(self.images[n]) for n in names]
        order = [names.index(n) for n in self.order]
        return G, TopRep(graph, imgs, order)

    @property
    def edge_names(self) -> tuple[str, ...]:
        return self.basis if self.edges is None else tuple(e[0] for e in self.edges)

    # -- canonical text -------------------------------------------------------

    def emit(self) -> str:
        out = ["[group]", f"name = {self.name}", f"basis = {' '.join(self.basis)}",
               f"stable_letter = {self.stable_letter}", f"seed = {self.seed}", ""]
        out += ["[forward]"] + [f"{s} = {self.forward[s]}" for s in self.basis] + [""]
        out += ["[backward]"] + [f"{s} = {self.backward[s]}" for s in self.basis] + [""]
        out += ["[representative]", f"order = {' '.join(self.order)}"]
        if self.edges is not None:
            out += [f"vertices = {' '.join(self.vertices)}", f"basepoint = {self.basepoint}", ""]
            out += ["[edges]"] + [f"{n} = {t} {h}" for n, t, h in self.edges] + [""]
            out += ["[tree]", f"edges = {' '.join(self.tree)}", ""]
            out += ["[marking]"] + [f"{e} = {self.marking[e]}" for e in self.edge_names if e in self.marking]
        out += [""]
        out += ["[images]"] + [f"{n} = {self.images[n]}" for n in self.edge_names] + [""]
        out += ["[caps]"] + [f"{k} = {self.caps[k]}" for k in sorted(self.caps)]
        if self.thresholds is not None:
            th = self.thresholds
            out += ["", "[thresholds]", f"tau = {th.tau}", f"K0 = {th.K0:g}", f"C0 = {th.C0:g}"]
        return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# parsing


_SECTION_RE = re.compile(r"^\s*\[([^\]]+)\]")
_KEY_RE = re.compile(r"^\s*([^=#\s][^=]*?)\s*=\s*(.*)$")


def _locate(text: str) -> dict[tuple[str, str], tuple[int, int]]:
    """(section, key) -> (line, column of the value), 1-based."""
    where: dict[tuple[str, str], tuple[int, int]] = {}
    section = ""
    for n, line in enumerate(text.splitlines(), 1):
        m = _SECTION_RE.match(line)
        if m:
            section = m.group(1).strip()
            where[(section, "")] = (n, line.index("[") + 1)
            continue
        m = _KEY_RE.match(line)
        if m:
            where[(section, m.group(1))] = (n, m.start(2) + 1)
    return where


def parse_definition(text: str) -> GroupDefinition:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",), comment_prefixes=("#", ";"),
                                   interpolation=None, strict=True)
    cp.optionxform = str  # keep case
    try:
        cp.read_string(text)
    except configparser.DuplicateOptionError as e:
        raise DefinitionError(f"duplicate key {e.option!r} in [{e.section}]", e.lineno, 1, e.option) from None
    except configparser.DuplicateSectionError as e:
        raise DefinitionError(f"duplicate section [{e.section}]", e.lineno, 1, e.section) from None
    except configparser.MissingSectionHeaderError as e:
        raise DefinitionError("content before the first section header", e.lineno, 1) from None
    except configparser.ParsingError as e:
        line = e.errors[0][0] if e.errors else None
        raise DefinitionError("malformed line (expected 'key = value')", line, 1) from None
    where = _locate(text)

    def loc(section: str, key: str = ""):
        return where.get((section, key), where.get((section, ""), (None, None)))

    for s in cp.sections():
        if s not in SECTIONS:
            raise DefinitionError(f"unknown section [{s}]", *loc(s), field_name=s)

    def need(section: str, key: str) -> str:
        if not cp.has_section(section):
            raise DefinitionError(f"missing section [{section}] (field {section}.{key})", field_name=f"{section}.{key}")
        if not cp.has_option(section, key):
            raise DefinitionError(f"missing field {section}.{key}", *loc(section), field_name=f"{section}.{key}")
        return " ".join(cp.get(section, key).split())

    def get(section: str, key: str, default: str | None) -> str | None:
        if cp.has_section(section) and cp.has_option(section, key):
            return " ".join(cp.get(section, key).split())
        return default

    def as_int(section: str, key: str, value: str) -> int:
        try:
            return int(value)
        except ValueError:
            raise DefinitionError(f"{section}.{key} must be an integer, got {value!r}", *loc(section, key),
                                  field_name=f"{section}.{key}") from None

    name = need("group", "name")
    basis = tuple(need("group", "basis").split())
    if not basis:
        raise DefinitionError("group.basis is empty", *loc("group", "basis"), field_name="group.basis")
    stable = get("group", "stable_letter", "t")
    seed = as_int("group", "seed", get("group", "seed", "0"))

    def letter_map(section: str) -> dict[str, str]:
        m = {}
        for s in basis:
            m[s] = need(section, s)
        if cp.has_section(section):
            for k in cp.options(section):
                if k not in basis:
                    raise DefinitionError(f"[{section}] names {k!r}, which is not a basis letter",
                                          *loc(section, k), field_name=f"{section}.{k}")
        return m

    forward = letter_map("forward")
    backward = letter_map("backward")

    edges = None
    vertices: tuple[str, ...] = ("v",)
    basepoint = "v"
    tree: tuple[str, ...] = ()
    marking: dict[str, str] = {}
    if cp.has_section("edges"):
        edges_l = []
        for k in cp.options("edges"):
            ends = cp.get("edges", k).split()
            if len(ends) != 2:
                raise DefinitionError(f"edge {k!r} needs 'tail head'", *loc("edges", k), field_name=f"edges.{k}")
            edges_l.append((k, ends[0], ends[1]))
        edges = tuple(edges_l)
        vertices = tuple(need("representative", "vertices").split())
        basepoint = get("representative", "basepoint", vertices[0])
        tree = tuple((get("tree", "edges", "") or "").split())
        marking = {k: " ".join(cp.get("marking", k).split()) for k in cp.options("marking")} \
            if cp.has_section("marking") else {}
        for _, t, h in edges:
            for v in (t, h):
                if v not in vertices:
                    raise DefinitionError(f"edge endpoint {v!r} is not a listed vertex", *loc("edges"),
                                          field_name="edges")
    names = basis if edges is None else tuple(e[0] for e in edges)
    images = {}
    for n in names:
        images[n] = need("images", n)
    order = tuple((get("representative", "order", None) or " ".join(names)).split())
    if sorted(order) != sorted(names):
        raise DefinitionError("representative.order must list every edge exactly once",
                              *loc("representative", "order"), field_name="representative.order")
    caps = dict(DEFAULT_CAPS)
    if cp.has_section("caps"):
        for k in cp.options("caps"):
            if k not in DEFAULT_CAPS:
                raise DefinitionError(f"unknown cap {k!r}", *loc("caps", k), field_name=f"caps.{k}")
            caps[k] = as_int("caps", k, cp.get("caps", k).strip())
    thresholds = None
    if cp.has_section("thresholds"):
        try:
            thresholds = Thresholds(int(need("thresholds", "tau")), float(need("thresholds", "K0")),
                                    float(need("thresholds", "C0")))
        except ValueError:
            raise DefinitionError("thresholds must be numbers", *loc("thresholds"), field_name="thresholds") from None

    d = GroupDefinition(name, basis, forward, backward, images, order, stable, vertices, basepoint, edges,
                        tree, marking, caps, thresholds, seed)
    # semantic checks with locations
    try:
        G, rep = d.build()
    except RepresentativeError as e:
        raise DefinitionError(f"invalid representative: {e}", *loc("images"), field_name="images") from None
    except (WordError, KeyError, ValueError) as e:
        raise DefinitionError(f"invalid monodromy or graph: {e}", *loc("forward"), field_name="forward") from None
    return d


def load_definition(path: str | Path) -> GroupDefinition:
    return parse_definition(Path(path).read_text())
