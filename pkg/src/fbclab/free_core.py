"""Free groups on a finite basis.

Words are tuples of nonzero ints: generator ``i`` of the basis is the letter
``i + 1`` and its inverse is ``-(i + 1)``.  Every word handed out by this
module is freely reduced.
"""

from __future__ import annotations

import re

from dataclasses import dataclass, field
from typing import Iterable, Sequence

Word = tuple  # tuple[int, ...], freely reduced

EMPTY: Word = ()


class WordError(ValueError):
    """Bad symbol, bad basis or malformed word string."""


class AutomatonStateError(RuntimeError):
    pass


def reduce(raw: Iterable[int]) -> Word:
    out: list[int] = []
    for x in raw:
        if x == 0:
            raise WordError("0 is not a letter")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def is_reduced(w: Sequence[int]) -> bool:
    return all(w[i] != -w[i + 1] for i in range(len(w) - 1))


def concat(u: Word, v: Word) -> Word:
    # cancel across the seam only; both inputs are already reduced
    i = 0
    n = min(len(u), len(v))
    while i < n and u[len(u) - 1 - i] == -v[i]:
        i += 1
    if i == 0:
        return u + v
    return u[: len(u) - i] + v[i:]


def concat_many(*words: Word) -> Word:
    out: Word = EMPTY
    for w in words:
        out = concat(out, w)
    return out


def inverse(w: Word) -> Word:
    return tuple(-x for x in reversed(w))


def power(w: Word, n: int) -> Word:
    if n < 0:
        w, n = inverse(w), -n
    out: Word = EMPTY
    for _ in range(n):
        out = concat(out, w)
    return out


def cyclic_reduce(w: Word) -> tuple[Word, Word]:
    """Split ``w`` as ``conj * core * conj^-1`` with ``core`` cyclically reduced."""
    i, j = 0, len(w) - 1
    while i < j and w[i] == -w[j]:
        i += 1
        j -= 1
    return w[i : j + 1], w[:i]


def conjugacy_length(w: Word) -> int:
    return len(cyclic_reduce(w)[0])


def cyclic_rotations(core: Word) -> set[Word]:
    return {core[i:] + core[:i] for i in range(max(len(core), 1))}


def are_conjugate(u: Word, v: Word) -> bool:
    cu, cv = cyclic_reduce(u)[0], cyclic_reduce(v)[0]
    if len(cu) != len(cv):
        return False
    if not cu:
        return True
    return cv in cyclic_rotations(cu)


def words_up_to(rank: int, length: int) -> list[Word]:
    """All reduced words of length <= ``length`` in shortlex order."""
    letters = [i for g in range(1, rank + 1) for i in (g, -g)]
    letters.sort(key=letter_sort_key)
    out: list[Word] = [EMPTY]
    frontier: list[Word] = [EMPTY]
    for _ in range(length):
        nxt = []
        for w in frontier:
            for x in letters:
                if w and w[-1] == -x:
                    continue
                nxt.append(w + (x,))
        out.extend(nxt)
        frontier = nxt
    return out


_TOKEN_RE = re.compile(r"^(.+?)(?:\^(-?\d+))?(')?$")


def split_token(token: str) -> tuple[str, int]:
    """``"a"`` -> (a, 1); ``"a'"`` and ``"a^-1"`` -> (a, -1); ``"a^3"`` -> (a, 3)."""
    m = _TOKEN_RE.match(token.strip())
    if not m:
        raise WordError(f"cannot read token {token!r}")
    base, power, prime = m.group(1), m.group(2), m.group(3)
    exp = int(power) if power is not None else 1
    return base, -exp if prime else exp


def letter_sort_key(x: int) -> tuple[int, int]:
    # a < a^-1 < b < b^-1 < ...
    return (abs(x), 0 if x > 0 else 1)


def shortlex_key(w: Word) -> tuple:
    return (len(w), tuple(letter_sort_key(x) for x in w))


@dataclass(frozen=True)
class Basis:
    symbols: tuple[str, ...]

    def __post_init__(self):
        if len(self.symbols) < 1:
            raise WordError("rank must be at least 1")
        if len(set(self.symbols)) != len(self.symbols):
            raise WordError(f"duplicate basis symbols in {self.symbols}")
        for s in self.symbols:
            if not s or not s.isidentifier():
                raise WordError(f"invalid generator symbol {s!r}")

    @property
    def rank(self) -> int:
        return len(self.symbols)

    def letter(self, token: str) -> int:
        base, exp = split_token(token)
        if abs(exp) != 1:
            raise WordError(f"{token!r} is not a single letter")
        try:
            return exp * (self.symbols.index(base) + 1)
        except ValueError:
            raise WordError(f"unknown generator symbol {token!r}") from None

    def parse(self, text: str) -> Word:
        """Parse whitespace separated tokens like ``"a b' c^3 a^-2"``; ``1`` or ``e`` is the identity."""
        toks = text.split()
        if toks in (["1"], ["e"], ["ε"]) and "e" not in self.symbols:
            return EMPTY
        out: list[int] = []
        for t in toks:
            base, exp = split_token(t)
            x = self.letter(base)
            out += [x if exp > 0 else -x] * abs(exp)
        return reduce(out)

    def word(self, letters: Iterable[tuple[str, int]]) -> Word:
        out = []
        for sym, exp in letters:
            if exp not in (1, -1):
                raise WordError(f"exponent must be +-1, got {exp}")
            out.append(self.letter(sym) if exp == 1 else -self.letter(sym))
        return reduce(out)

    def format(self, w: Word) -> str:
        if not w:
            return "1"
        return " ".join(self.symbols[abs(x) - 1] + ("" if x > 0 else "'") for x in w)

    def check(self, w: Word) -> None:
        for x in w:
            if x == 0 or abs(x) > self.rank:
                raise WordError(f"letter {x} outside basis of rank {self.rank}")


class FreeAutomorphism:
    """An automorphism given by images of generators and of the inverse."""

    def __init__(self, basis: Basis, forward: Sequence[Word], backward: Sequence[Word]):
        if len(forward) != basis.rank or len(backward) != basis.rank:
            raise WordError("need one image per basis generator")
        for w in list(forward) + list(backward):
            basis.check(w)
        self.basis = basis
        self.forward = tuple(reduce(w) for w in forward)
        self.backward = tuple(reduce(w) for w in backward)
        # letter -> image, for +-generators, for power +1 and -1
        self._images = {1: self._letter_table(self.forward), -1: self._letter_table(self.backward)}
        self._power_cache: dict[tuple[int, int], Word] = {}
        self.validate()

    @staticmethod
    def _letter_table(images: Sequence[Word]) -> dict[int, Word]:
        table = {}
        for i, img in enumerate(images):
            table[i + 1] = img
            table[-(i + 1)] = inverse(img)
        return table

    @classmethod
    def identity(cls, basis: Basis) -> FreeAutomorphism:
        gens = [(i + 1,) for i in range(basis.rank)]
        return cls(basis, gens, gens)

    def validate(self) -> None:
        for i in range(self.basis.rank):
            g = (i + 1,)
            if self._apply_once(self._apply_once(g, -1), 1) != g:
                raise WordError(f"forward(backward({self.basis.symbols[i]})) is not the identity")
            if self._apply_once(self._apply_once(g, 1), -1) != g:
                raise WordError(f"backward(forward({self.basis.symbols[i]})) is not the identity")

    def _apply_once(self, w: Word, sign: int) -> Word:
        table = self._images[sign]
        out: list[int] = []
        for x in w:
            for y in table[x]:
                if out and out[-1] == -y:
                    out.pop()
                else:
                    out.append(y)
        return tuple(out)

    def letter_image(self, x: int, n: int) -> Word:
        key = (x, n)
        img = self._power_cache.get(key)
        if img is None:
            if n == 0:
                img = (x,)
            else:
                sign = 1 if n > 0 else -1
                img = self._apply_once(self.letter_image(x, n - sign), sign)
            self._power_cache[key] = img
        return img

    def apply(self, w: Word, n: int = 1) -> Word:
        if n == 0:
            return w
        out: list[int] = []
        for x in w:
            for y in self.letter_image(x, n):
                if out and out[-1] == -y:
                    out.pop()
                else:
                    out.append(y)
        return tuple(out)

    def abelianization(self) -> list[list[int]]:
        """Integer matrix M with column j the abelianized image of generator j."""
        r = self.basis.rank
        m = [[0] * r for _ in range(r)]
        for j, img in enumerate(self.forward):
            for x in img:
                m[abs(x) - 1][j] += 1 if x > 0 else -1
        return m

    def is_identity(self) -> bool:
        return all(img == (i + 1,) for i, img in enumerate(self.forward))

    def __eq__(self, other):
        return (
            isinstance(other, FreeAutomorphism)
            and self.basis == other.basis
            and self.forward == other.forward
        )

    def __hash__(self):
        return hash((self.basis, self.forward))

    def __repr__(self):
        imgs = ", ".join(
            f"{s}->{self.basis.format(w)}" for s, w in zip(self.basis.symbols, self.forward)
        )
        return f"FreeAutomorphism({imgs})"


@dataclass
class StallingsAutomaton:
    """Folded core graph of a finitely generated subgroup; basepoint is state 0."""

    n_states: int
    transitions: dict = field(default_factory=dict)  # (state, letter) -> state
    folded: bool = False
    generators: tuple = ()

    @classmethod
    def build(cls, generators: Sequence[Word]) -> StallingsAutomaton:
        gens = tuple(reduce(g) for g in generators)
        edges: list[tuple[int, int, int]] = []
        n = 1
        for g in gens:
            if not g:
                continue
            prev = 0
            for k, x in enumerate(g):
                if k == len(g) - 1:
                    nxt = 0
                else:
                    nxt = n
                    n += 1
                edges.append((prev, x, nxt))
                prev = nxt
        aut = cls(n_states=n, generators=gens)
        aut._fold(edges)
        return aut

    def _fold(self, edges: list[tuple[int, int, int]]) -> None:
        parent = list(range(self.n_states))

        def find(s):
            while parent[s] != s:
                parent[s] = parent[parent[s]]
                s = parent[s]
            return s

        trans: dict[tuple[int, int], int] = {}
        pending = []
        for p, x, q in edges:
            pending.append((p, x, q))
            pending.append((q, -x, p))
        while pending:
            p, x, q = pending.pop()
            p, q = find(p), find(q)
            r = trans.get((p, x))
            if r is None:
                trans[(p, x)] = q
                continue
            r = find(r)
            if r == q:
                continue
            # identify q and r; keep the smaller id so the basepoint survives as 0
            keep, gone = (q, r) if q < r else (r, q)
            parent[gone] = keep
            for (s, y), tgt in list(trans.items()):
                if s == gone:
                    del trans[(s, y)]
                    pending.append((keep, y, tgt))
                elif find(tgt) != tgt:
                    trans[(s, y)] = find(tgt)
        # renumber states compactly, basepoint first
        final = {}
        for (s, y), tgt in trans.items():
            final[(find(s), y)] = find(tgt)
        states = sorted({find(0)} | {s for s, _ in final} | set(final.values()))
        ren = {s: i for i, s in enumerate(states)}
        self.transitions = {(ren[s], y): ren[t] for (s, y), t in final.items()}
        self.n_states = len(states)
        self.folded = True
        self._check_deterministic()

    def _check_deterministic(self) -> None:
        for (s, x), t in self.transitions.items():
            if self.transitions.get((t, -x)) != s:
                raise AutomatonStateError("transitions are not inverse-closed")

    def read(self, w: Word) -> tuple[int, int]:
        """Follow ``w`` from the basepoint; return (state reached, letters consumed)."""
        s = 0
        trans = self.transitions
        for i, x in enumerate(w):
            t = trans.get((s, x))
            if t is None:
                return s, i
            s = t
        return s, len(w)

    def member(self, w: Word) -> bool:
        if not self.folded:
            raise AutomatonStateError("automaton must be folded before membership queries")
        s, k = self.read(w)
        return k == len(w) and s == 0

    def right_coset_key(self, w: Word) -> tuple[int, Word]:
        """Canonical label of the right coset ``H w``."""
        s, k = self.read(w)
        return s, w[k:]

    def left_coset_key(self, w: Word) -> tuple[int, Word]:
        """Canonical label of the left coset ``w H``."""
        return self.right_coset_key(inverse(w))

    @property
    def rank(self) -> int:
        n_edges = len(self.transitions) // 2
        return n_edges - self.n_states + 1 if n_edges else 0

    def is_trivial(self) -> bool:
        return not self.transitions

    def contains_all(self, words: Iterable[Word]) -> bool:
        return all(self.member(w) for w in words)


def stallings_build(generators: Sequence[Word]) -> StallingsAutomaton:
    if not generators:
        raise WordError("need at least one generator")
    return StallingsAutomaton.build(generators)


def stallings_member(aut: StallingsAutomaton, w: Word) -> bool:
    return aut.member(w)
