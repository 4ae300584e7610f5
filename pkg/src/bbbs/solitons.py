"""Unbasketing, basic-soliton recognition, chunks and soliton census."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence, Union

from .core import (
    INF,
    BoxBallConfiguration,
    Configuration,
    ParseError,
    SiteState,
    Unbounded,
    site_from_token,
)

Capacity = int | Unbounded


def unbasket(config: Configuration) -> BoxBallConfiguration:
    """Expand each site ``(a, b, c)`` into ``b + 1`` cells, the first ``c`` filled.

    Sites left of the window are vacuum, so the cell origin is the origin of
    the window (a vacuum site maps to one cell).  Absolute cell positions are
    ``origin + (cells contributed by the stored sites to the left)``.
    """
    cells: list[int] = []
    for s in config.sites:
        cells.extend([1] * s.c + [0] * (s.b + 1 - s.c))
    return BoxBallConfiguration(config.origin, tuple(cells))


# -- tokens -----------------------------------------------------------------


def split_tokens(text: str | Sequence[str]) -> list[str]:
    """``"B1 U3 F"``, ``"B1U3F"`` and ``["B1", "U3", "F"]`` all give the same list."""
    if not isinstance(text, str):
        return [str(t) for t in text]
    out = re.findall(r"[VFBU]_?\d*", text.replace(" ", ""))
    if "".join(out) != re.sub(r"\s+", "", text):
        raise ParseError(f"cannot split {text!r} into tokens")
    return [t.replace("_", "") for t in out]


def tokens_of_sites(sites: Iterable[SiteState]) -> list[str] | None:
    out = []
    for s in sites:
        tok = s.token()
        if tok is None:
            return None
        out.append(tok)
    return out


def sites_of_tokens(tokens: Sequence[str]) -> tuple[SiteState, ...]:
    return tuple(site_from_token(t) for t in tokens)


# -- classification -----------------------------------------------------------


@dataclass(frozen=True)
class Fast:
    k: int

    def speed(self, capacity: Capacity = INF) -> int:
        return self.k if capacity is INF else min(capacity, self.k)

    def __str__(self):
        return f"Fast({self.k})"


@dataclass(frozen=True)
class Slow:
    def speed(self, capacity: Capacity = INF) -> int:
        return 1

    def __str__(self):
        return "Slow"


@dataclass(frozen=True)
class NotBasic:
    reason: str

    def __str__(self):
        return f"NotBasic({self.reason})"


class ContainsVacuum(ValueError):
    pass


def classify_basic(tokens) -> Fast | Slow | NotBasic:
    """Recognise a basic soliton from its letters (no ``V`` allowed).

    ``F^k`` is ``Fast(k)`` for every ``k >= 1``; other strings over F, B, U
    without ``FF`` or ``FU`` are ``Slow``.
    """
    toks = split_tokens(tokens)
    if not toks:
        return NotBasic("empty")
    if "V" in toks:
        raise ContainsVacuum("basic solitons contain no vacuum letter")
    if all(t == "F" for t in toks):
        return Fast(len(toks))
    for left, right in zip(toks, toks[1:]):
        if left == "F" and right == "F":
            return NotBasic("FF")
        if left == "F" and right[0] == "U":
            return NotBasic("FU")
    return Slow()


@dataclass(frozen=True)
class SolitonDescriptor:
    kind: Fast | Slow
    tokens: tuple[str, ...]
    position: int

    def speed_under(self, capacity: Capacity = INF) -> int:
        return self.kind.speed(capacity)

    @property
    def end(self) -> int:
        return self.position + len(self.tokens)

    @property
    def sites(self) -> tuple[SiteState, ...]:
        return sites_of_tokens(self.tokens)

    @property
    def balls(self) -> int:
        return sum(s.c for s in self.sites)

    @property
    def baskets(self) -> int:
        return sum(s.b for s in self.sites)

    @property
    def word(self) -> str:
        return " ".join(self.tokens)

    def shape(self) -> tuple:
        return (str(self.kind), self.tokens)

    def __str__(self):
        return f"{self.kind} [{self.word}] @{self.position}"

    def to_json(self) -> dict:
        return {"kind": str(self.kind), "tokens": self.word, "position": self.position}


def soliton(tokens, position: int = 0) -> SolitonDescriptor:
    """Descriptor for a basic soliton given by its letters; raises on non-basic input."""
    toks = split_tokens(tokens)
    kind = classify_basic(toks)
    if isinstance(kind, NotBasic):
        raise ValueError(f"{' '.join(toks)} is not a basic soliton: {kind.reason}")
    return SolitonDescriptor(kind, tuple(toks), position)


def parse_soliton_spec(spec: str) -> SolitonDescriptor:
    """``F3`` means ``F F F``; otherwise the argument is a token word such as ``B1U3F``."""
    m = re.fullmatch(r"\s*F_?(\d+)\s*", spec)
    if m:
        return soliton(["F"] * int(m.group(1)))
    return soliton(spec)


@dataclass(frozen=True)
class Decomposition:
    solitons: tuple[SolitonDescriptor, ...] = ()
    capacity: Capacity = INF

    @property
    def gaps(self) -> tuple[int, ...]:
        s = self.solitons
        return tuple(b.position - a.end for a, b in zip(s, s[1:]))

    def shape(self) -> tuple:
        """Kinds and letters of the solitons, ignoring where they are."""
        return tuple(x.shape() for x in self.solitons)

    @property
    def is_sorted(self) -> bool:
        """Speeds are non-decreasing from left to right, so nothing will collide."""
        v = [x.speed_under(self.capacity) for x in self.solitons]
        return all(a <= b for a, b in zip(v, v[1:]))

    def __iter__(self):
        return iter(self.solitons)

    def __len__(self):
        return len(self.solitons)

    def __str__(self):
        if not self.solitons:
            return "empty"
        return ", ".join(str(s) for s in self.solitons)


@dataclass(frozen=True)
class NotSeparated:
    reason: str
    blocks: tuple = field(default=())

    def __str__(self):
        return f"NotSeparated({self.reason})"


def blocks(config: Configuration) -> list[tuple[int, tuple[SiteState, ...]]]:
    """Maximal non-vacuum runs as ``(position, sites)``."""
    out = []
    run: list[SiteState] = []
    start = 0
    for i, s in enumerate(config.sites):
        if s.is_vacuum:
            if run:
                out.append((config.origin + start, tuple(run)))
                run = []
        else:
            if not run:
                start = i
            run.append(s)
    if run:
        out.append((config.origin + start, tuple(run)))
    return out


def decompose(config: Configuration, capacity: Capacity = INF) -> Decomposition | NotSeparated:
    """Split into basic solitons separated by enough vacuum.

    Neighbours must be at least ``max(speed_left, speed_right)`` sites apart
    (speeds under the given capacity).
    """
    found = []
    for pos, sites in blocks(config):
        toks = tokens_of_sites(sites)
        if toks is None:
            return NotSeparated(f"site with two or more balls near {pos}")
        kind = classify_basic(toks)
        if isinstance(kind, NotBasic):
            return NotSeparated(f"{' '.join(toks)} at {pos} is not basic ({kind.reason})")
        found.append(SolitonDescriptor(kind, tuple(toks), pos))
    for a, b in zip(found, found[1:]):
        need = max(a.speed_under(capacity), b.speed_under(capacity))
        if b.position - a.end < need:
            return NotSeparated(f"gap {b.position - a.end} before {b.position} is below {need}")
    return Decomposition(tuple(found), capacity)


# -- chunks -----------------------------------------------------------------


class Chunk(NamedTuple):
    """A piece of a slow soliton.

    ``kind`` is one of ``"BU"``, ``"BUF"``, ``"VU"``, ``"VUF"``, ``"VF"`` or
    ``"B"`` (a run of pure basket letters).
    """

    kind: str
    tokens: tuple[str, ...]

    def __str__(self):
        return "(" + " ".join(self.tokens) + ")"


def _idx(tok: str) -> int:
    return int(tok[1:])


def _chunk_kind(piece: Sequence[str], first: bool, after_pure: bool) -> str | None:
    """Which chunk shape ``piece`` has, or None.

    ``first`` means the piece starts the soliton; ``after_pure`` means it
    directly follows a pure basket run.
    """
    letters = "".join(t[0] for t in piece)
    if re.fullmatch(r"BU+", letters):
        return "BU"
    if re.fullmatch(r"BU+F", letters):
        return "BUF"
    if first and re.fullmatch(r"U+", letters):
        return "VU"
    if first and re.fullmatch(r"U+F", letters):
        return "VUF"
    if (first or after_pure) and letters == "F":
        return "VF"
    if re.fullmatch(r"B+", letters):
        return "B"
    return None


def _valid_follow(kind: str, nxt: Sequence[str]) -> bool:
    """The letter after a chunk must not belong to it."""
    if not nxt:
        return True
    head = nxt[0][0]
    if kind == "B":
        # a pure run stops at F, or at a B that opens a B U... chunk
        return head == "F" or (head == "B" and len(nxt) > 1 and nxt[1][0] == "U")
    return head == "B"


def chunk_decompose(tokens) -> list[Chunk]:
    """Cut a slow soliton into chunks, scanning left to right."""
    toks = split_tokens(tokens)
    if not isinstance(classify_basic(toks), Slow) and toks != ["F"]:
        raise ValueError(f"{' '.join(toks)} is not a slow soliton")
    out: list[Chunk] = []
    i = 0
    n = len(toks)
    while i < n:
        head = toks[i][0]
        j = i + 1
        if head == "B" and j < n and toks[j][0] == "U":
            while j < n and toks[j][0] == "U":
                j += 1
            if j < n and toks[j] == "F":
                j += 1
        elif head == "B":
            while j < n and toks[j][0] == "B" and not (j + 1 < n and toks[j + 1][0] == "U"):
                j += 1
        elif head == "U":
            while j < n and toks[j][0] == "U":
                j += 1
            if j < n and toks[j] == "F":
                j += 1
        piece = toks[i:j]
        kind = _chunk_kind(piece, i == 0, bool(out) and out[-1].kind == "B")
        if kind is None:
            raise ValueError(f"no chunk shape for {' '.join(piece)}")
        out.append(Chunk(kind, tuple(piece)))
        i = j
    return out


def all_chunkings(tokens) -> list[list[Chunk]]:
    """Every way to cut ``tokens`` into valid chunks (brute force, for checking uniqueness)."""
    toks = split_tokens(tokens)
    results = []

    def rec(i: int, acc: list[Chunk]):
        if i == len(toks):
            results.append(list(acc))
            return
        for j in range(i + 1, len(toks) + 1):
            piece = toks[i:j]
            kind = _chunk_kind(piece, i == 0, bool(acc) and acc[-1].kind == "B")
            if kind is None or not _valid_follow(kind, toks[j:]):
                continue
            acc.append(Chunk(kind, tuple(piece)))
            rec(j, acc)
            acc.pop()

    rec(0, [])
    return results


class PureLimit(NamedTuple):
    """Pure solitons a chunk turns into: ``ones`` copies of ``F`` and a basket string."""

    ones: int
    baskets: tuple[int, ...]

    def __str__(self):
        parts = ["F"] * self.ones
        if self.baskets:
            parts.append("B_{" + ",".join(map(str, self.baskets)) + "}")
        return " u ".join(parts) if parts else "V"


def pure_limit(chunk: Chunk) -> PureLimit:
    """Image of a chunk after enough fast solitons have passed through it."""
    toks = chunk.tokens
    us = [_idx(t) for t in toks if t[0] == "U"]
    tail_f = 1 if toks[-1] == "F" else 0
    if chunk.kind in ("BU", "BUF"):
        return PureLimit(len(us) + tail_f, (_idx(toks[0]) + sum(us),))
    if chunk.kind in ("VU", "VUF"):
        return PureLimit(len(us) + tail_f, (sum(us),))
    if chunk.kind == "VF":
        return PureLimit(1, ())
    return PureLimit(0, tuple(_idx(t) for t in toks))


class SolitonCount(NamedTuple):
    ball_solitons: int
    basket_solitons: int
    fast_amplitudes: tuple[int, ...]
    basket_amplitudes: tuple[int, ...]

    def multisets(self) -> tuple:
        return (
            self.ball_solitons,
            self.basket_solitons,
            Counter(self.fast_amplitudes),
            Counter(self.basket_amplitudes),
        )

    def to_json(self) -> dict:
        return {
            "ball_solitons": self.ball_solitons,
            "basket_solitons": self.basket_solitons,
            "fast_amplitudes": list(self.fast_amplitudes),
            "basket_amplitudes": list(self.basket_amplitudes),
        }


def soliton_census(sol: SolitonDescriptor) -> tuple[list[int], list[int]]:
    """Ball and basket amplitudes of the pure solitons ``sol`` decomposes into."""
    if isinstance(sol.kind, Fast):
        return [sol.kind.k], []
    balls: list[int] = []
    baskets: list[int] = []
    for ch in chunk_decompose(sol.tokens):
        lim = pure_limit(ch)
        balls.extend([1] * lim.ones)
        baskets.extend(a for a in lim.baskets if a > 0)
    return balls, baskets


def count_solitons(state: Configuration | Decomposition, capacity: Capacity = INF) -> SolitonCount:
    """Ball and basket solitons with their amplitudes, summed over pure limits."""
    if isinstance(state, Configuration):
        dec = decompose(state, capacity)
        if isinstance(dec, NotSeparated):
            raise NotSeparatedError(str(dec))
    else:
        dec = state
    balls: list[int] = []
    baskets: list[int] = []
    for sol in dec.solitons:
        b, k = soliton_census(sol)
        balls.extend(b)
        baskets.extend(k)
    return SolitonCount(len(balls), len(baskets), tuple(balls), tuple(baskets))


class NotSeparatedError(ValueError):
    """The state is not a disjoint union of basic solitons."""


def configuration_of(solitons: Sequence[SolitonDescriptor]) -> Configuration:
    """Place descriptors at their positions in vacuum (they must not overlap)."""
    if not solitons:
        return Configuration(0, ())
    ordered = sorted(solitons, key=lambda s: s.position)
    origin = ordered[0].position
    sites: list[SiteState] = []
    for s in ordered:
        pad = s.position - (origin + len(sites))
        if pad < 0:
            raise ValueError("solitons overlap")
        sites.extend([SiteState(1, 0, 0)] * pad)
        sites.extend(s.sites)
    return Configuration(origin, tuple(sites))


Classification = Union[Fast, Slow, NotBasic]
