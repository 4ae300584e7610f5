"""Lattice states of the box-basket-ball system.

A site holds one box, ``b`` baskets and ``c`` balls and is written as the
triple ``(a, b, c)`` where ``a = b - c + 1`` is the number of further balls
that fit.  A configuration is a finite window of sites inside an otherwise
vacuum lattice, together with persistent integer labels for every ball and
every basket.

Labels are kept in *reading order*: sites left to right; inside a site the
box comes first, then the baskets from bottom to top.  Balls always fill the
box first and then the lowest baskets, so the per-site counts determine which
containers are occupied.
"""

from __future__ import annotations

import functools
import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence


class ParseError(ValueError):
    """Raised for malformed state text or invalid site triples."""


@functools.total_ordering
class Unbounded:
    """The symbolic value +infinity of the min-plus semiring.

    ``min(INF, x) == x`` and ``INF + x == INF`` for every integer ``x``.
    Subtracting infinity is undefined and raises.
    """

    _instance: Unbounded | None = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("bbbs.INF")

    def __lt__(self, other):
        if other is self or isinstance(other, int):
            return False
        return NotImplemented

    def __add__(self, other):
        if other is self or isinstance(other, int):
            return self
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            return self
        if other is self:
            raise ArithmeticError("INF - INF is undefined")
        return NotImplemented

    def __rsub__(self, other):
        raise ArithmeticError("cannot subtract INF from a finite value")

    def __reduce__(self):
        return (Unbounded, ())


INF = Unbounded()


def parse_capacity(text: str | int | Unbounded) -> int | Unbounded:
    """``"inf"`` (or ``INF``) maps to unbounded capacity; anything else must be a positive int."""
    if text is INF or (isinstance(text, str) and text.strip().lower() in ("inf", "infinity", "oo")):
        return INF
    value = int(text)
    if value < 1:
        raise ValueError(f"carrier capacity must be >= 1, got {value}")
    return value


def format_capacity(capacity: int | Unbounded) -> str:
    return "inf" if capacity is INF else str(capacity)


class SiteState(NamedTuple):
    a: int
    b: int
    c: int

    @classmethod
    def of(cls, baskets: int, balls: int) -> SiteState:
        return cls(baskets - balls + 1, baskets, balls)

    def validate(self) -> SiteState:
        a, b, c = self
        if min(a, b, c) < 0 or a - b + c != 1:
            raise ParseError(f"invalid site {tuple(self)}: need a - b + c = 1 and all entries >= 0")
        return self

    @property
    def is_vacuum(self) -> bool:
        return self.b == 0 and self.c == 0

    @property
    def empty_baskets(self) -> int:
        return min(self.a, self.b)

    def token(self) -> str | None:
        """Short name for the site, or None when it holds two or more balls."""
        a, b, c = self
        if c == 0:
            return "V" if b == 0 else f"B{b}"
        if c == 1:
            return "F" if b == 0 else f"U{b}"
        return None

    def triple(self) -> str:
        return f"({self.a},{self.b},{self.c})"

    def __str__(self):
        return self.token() or self.triple()


VACUUM = SiteState(1, 0, 0)
FULL = SiteState(0, 0, 1)


def site_from_token(token: str) -> SiteState:
    """Map ``V``, ``F``, ``B<a>`` or ``U<a>`` (``a >= 1``) to its site triple."""
    m = re.fullmatch(r"\s*([VFBU])_?(\d*)\s*", token)
    if not m:
        raise ParseError(f"unknown token {token!r}")
    letter, digits = m.groups()
    if letter in "VF":
        if digits:
            raise ParseError(f"token {letter} takes no index: {token!r}")
        return VACUUM if letter == "V" else FULL
    if not digits or int(digits) < 1:
        raise ParseError(f"token {letter} needs an index >= 1: {token!r}")
    k = int(digits)
    return SiteState(k + 1, k, 0) if letter == "B" else SiteState(k, k, 1)


def token_from_site(site: SiteState) -> str:
    tok = site.token()
    if tok is None:
        raise ValueError(f"site {tuple(site)} has no token form")
    return tok


class SiteLayout(NamedTuple):
    """Entity-level view of one site.

    ``box`` is the id of the ball in the box (or None); ``baskets`` lists
    ``(basket_id, ball_id_or_None)`` from bottom to top.
    """

    box: int | None
    baskets: tuple[tuple[int, int | None], ...]

    @property
    def state(self) -> SiteState:
        balls = (self.box is not None) + sum(ball is not None for _, ball in self.baskets)
        return SiteState.of(len(self.baskets), balls)

    @property
    def ball_ids(self) -> list[int]:
        out = [] if self.box is None else [self.box]
        out.extend(ball for _, ball in self.baskets if ball is not None)
        return out

    @property
    def basket_ids(self) -> list[int]:
        return [bid for bid, _ in self.baskets]

    @classmethod
    def pack(cls, basket_ids: Sequence[int], ball_ids: Sequence[int]) -> SiteLayout:
        """Place balls box first, then lowest baskets first."""
        if len(ball_ids) > len(basket_ids) + 1:
            raise ValueError("more balls than containers")
        balls = list(ball_ids)
        box = balls.pop(0) if balls else None
        baskets = tuple(
            (bid, balls[i] if i < len(balls) else None) for i, bid in enumerate(basket_ids)
        )
        return cls(box, baskets)


EMPTY_LAYOUT = SiteLayout(None, ())


@dataclass(frozen=True)
class Configuration:
    """A finite window of sites starting at lattice index ``origin``.

    Sites outside the window are vacuum.  ``ball_ids`` and ``basket_ids`` list
    the entity labels in reading order; when omitted, fresh labels ``1, 2, ...``
    are assigned.
    """

    origin: int
    sites: tuple[SiteState, ...]
    ball_ids: tuple[int, ...] = field(default=None)  # type: ignore[assignment]
    basket_ids: tuple[int, ...] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        sites = tuple(SiteState(*s) for s in self.sites)
        for s in sites:
            s.validate()
        object.__setattr__(self, "sites", sites)
        nballs = sum(s.c for s in sites)
        nbaskets = sum(s.b for s in sites)
        balls = tuple(range(1, nballs + 1)) if self.ball_ids is None else tuple(self.ball_ids)
        baskets = tuple(range(1, nbaskets + 1)) if self.basket_ids is None else tuple(self.basket_ids)
        if len(balls) != nballs or len(set(balls)) != nballs:
            raise ValueError(f"need {nballs} distinct ball ids, got {balls}")
        if len(baskets) != nbaskets or len(set(baskets)) != nbaskets:
            raise ValueError(f"need {nbaskets} distinct basket ids, got {baskets}")
        k = 0
        for s in sites:
            run = baskets[k : k + s.b]
            if any(x >= y for x, y in zip(run, run[1:])):
                raise ValueError(f"basket ids must increase bottom-to-top within a site: {run}")
            k += s.b
        object.__setattr__(self, "ball_ids", balls)
        object.__setattr__(self, "basket_ids", baskets)

    @classmethod
    def vacuum(cls, origin: int = 0) -> Configuration:
        return cls(origin, ())

    @classmethod
    def from_layouts(cls, origin: int, layouts: Iterable[SiteLayout]) -> Configuration:
        sites, balls, baskets = [], [], []
        for lay in layouts:
            sites.append(lay.state)
            balls.extend(lay.ball_ids)
            baskets.extend(lay.basket_ids)
        return cls(origin, tuple(sites), tuple(balls), tuple(baskets))

    def __len__(self):
        return len(self.sites)

    @property
    def end(self) -> int:
        return self.origin + len(self.sites)

    @property
    def total_balls(self) -> int:
        return len(self.ball_ids)

    @property
    def total_baskets(self) -> int:
        return len(self.basket_ids)

    def site_at(self, index: int) -> SiteState:
        k = index - self.origin
        if 0 <= k < len(self.sites):
            return self.sites[k]
        return VACUUM

    def layouts(self) -> list[SiteLayout]:
        out = []
        i = j = 0
        for s in self.sites:
            out.append(SiteLayout.pack(self.basket_ids[j : j + s.b], self.ball_ids[i : i + s.c]))
            i += s.c
            j += s.b
        return out

    def ball_sites(self) -> dict[int, int]:
        """Absolute site index of every ball, keyed by id."""
        out = {}
        it = iter(self.ball_ids)
        for k, s in enumerate(self.sites):
            for _ in range(s.c):
                out[next(it)] = self.origin + k
        return out

    def basket_sites(self) -> dict[int, int]:
        out = {}
        it = iter(self.basket_ids)
        for k, s in enumerate(self.sites):
            for _ in range(s.b):
                out[next(it)] = self.origin + k
        return out

    def occupied_baskets(self) -> set[int]:
        occ = set()
        for lay in self.layouts():
            occ.update(bid for bid, ball in lay.baskets if ball is not None)
        return occ

    def normalized(self) -> Configuration:
        return normalize(self)

    def same_state(self, other: Configuration) -> bool:
        """Equality of the lattice states, ignoring labels and window padding."""
        a, b = normalize(self), normalize(other)
        return a.sites == b.sites and (not a.sites or a.origin == b.origin)

    def shifted(self, offset: int) -> Configuration:
        return Configuration(self.origin + offset, self.sites, self.ball_ids, self.basket_ids)

    def relabeled(self, ball_ids=None, basket_ids=None) -> Configuration:
        return Configuration(
            self.origin,
            self.sites,
            self.ball_ids if ball_ids is None else tuple(ball_ids),
            self.basket_ids if basket_ids is None else tuple(basket_ids),
        )

    def window(self, start: int, stop: int) -> Configuration:
        """Sub-configuration on lattice indices ``[start, stop)``, labels kept."""
        mine = self.layouts()
        lays = [
            mine[i - self.origin] if 0 <= i - self.origin < len(mine) else EMPTY_LAYOUT
            for i in range(start, stop)
        ]
        return Configuration.from_layouts(start, lays)

    def layout_at(self, index: int) -> SiteLayout:
        k = index - self.origin
        if 0 <= k < len(self.sites):
            return self.layouts()[k]
        return EMPTY_LAYOUT

    def __str__(self):
        return render_configuration(self)


@dataclass(frozen=True)
class BoxBallConfiguration:
    """Classic box-ball state: ``cells[k]`` is 1 when lattice index ``origin + k`` holds a ball."""

    origin: int
    cells: tuple[int, ...]

    def __post_init__(self):
        cells = tuple(int(x) for x in self.cells)
        if any(x not in (0, 1) for x in cells):
            raise ValueError("box-ball cells must be 0 or 1")
        object.__setattr__(self, "cells", cells)

    @classmethod
    def from_string(cls, text: str, origin: int = 0) -> BoxBallConfiguration:
        bits = [int(ch) for ch in re.findall(r"[01]", text)]
        return cls(origin, tuple(bits))

    @property
    def balls(self) -> int:
        return sum(self.cells)

    def normalized(self) -> BoxBallConfiguration:
        cells = self.cells
        lo = 0
        while lo < len(cells) and not cells[lo]:
            lo += 1
        if lo == len(cells):
            return BoxBallConfiguration(self.origin, ())
        hi = len(cells)
        while not cells[hi - 1]:
            hi -= 1
        return BoxBallConfiguration(self.origin + lo, cells[lo:hi])

    def same_state(self, other: BoxBallConfiguration) -> bool:
        a, b = self.normalized(), other.normalized()
        return a.cells == b.cells and (not a.cells or a.origin == b.origin)

    def __str__(self):
        return "".join(map(str, self.cells))


def normalize(config: Configuration) -> Configuration:
    """Trim leading and trailing vacuum; absolute positions are kept."""
    sites = config.sites
    lo, hi = 0, len(sites)
    while lo < hi and sites[lo].is_vacuum:
        lo += 1
    if lo == hi:
        return Configuration(config.origin, ())
    while sites[hi - 1].is_vacuum:
        hi -= 1
    if lo == 0 and hi == len(sites):
        return config
    return Configuration(config.origin + lo, sites[lo:hi], config.ball_ids, config.basket_ids)


_TOKEN_RE = re.compile(
    r"@\s*(?P<origin>-?\d+)"
    r"|\(\s*(?P<a>\d+)\s*,\s*(?P<b>\d+)\s*,\s*(?P<c>\d+)\s*\)"
    r"|(?P<tok>[VFBU]_?\d*)"
    r"|(?P<sep>[\s,;.]+)"
    r"|(?P<bad>.)",
    re.S,
)


def parse_sites(text: str) -> tuple[int | None, list[SiteState]]:
    origin = None
    sites: list[SiteState] = []
    for m in _TOKEN_RE.finditer(text):
        kind = m.lastgroup
        if kind == "origin":
            if sites or origin is not None:
                raise ParseError("the @origin marker must come first")
            origin = int(m.group("origin"))
        elif kind == "c":
            sites.append(SiteState(int(m["a"]), int(m["b"]), int(m["c"])).validate())
        elif kind == "tok":
            sites.append(site_from_token(m.group("tok")))
        elif kind == "bad":
            raise ParseError(f"unexpected character {m.group()!r} at offset {m.start()} in {text!r}")
    return origin, sites


def parse_configuration(text: str) -> Configuration:
    """Read ``[@origin] tok tok ...`` where a token is V, F, B<k>, U<k> or (a,b,c).

    Fresh ids are assigned left to right, baskets bottom to top.
    """
    text = text.strip()
    if text.startswith("{"):
        return configuration_from_json(text)
    origin, sites = parse_sites(text)
    return Configuration(origin or 0, tuple(sites))


def render_configuration(config: Configuration, style: str = "tokens") -> str:
    if style == "tokens":
        body = " ".join(str(s) for s in config.sites)
    elif style == "triples":
        body = " ".join(s.triple() for s in config.sites)
    elif style in ("ascii", "ascii-art"):
        return render_ascii(config)
    elif style == "json":
        return configuration_to_json(config)
    else:
        raise ValueError(f"unknown style {style!r}")
    if config.origin:
        return f"@{config.origin} {body}".rstrip()
    return body


def render_ascii(config: Configuration, start: int | None = None, stop: int | None = None) -> str:
    """Picture with baskets stacked above boxes: ``[o]`` full box, ``[ ]`` empty box,
    ``\\o/`` full basket, ``\\_/`` empty basket.  The last line gives the last
    digit of each site's lattice index."""
    lo = config.origin if start is None else start
    hi = config.end if stop is None else stop
    sites = [config.site_at(i) for i in range(lo, hi)]
    height = max((s.b for s in sites), default=0)
    rows = []
    for level in range(height, 0, -1):
        row = []
        for s in sites:
            if s.b >= level:
                row.append("\\o/" if level <= s.c - 1 else "\\_/")
            else:
                row.append("   ")
        rows.append("".join(row).rstrip())
    rows.append("".join("[o]" if s.c else "[ ]" for s in sites))
    rows.append("".join(f"{i % 10:^3d}" for i in range(lo, hi)).rstrip())
    return "\n".join(rows)


def configuration_to_json(config: Configuration, ids: bool = False) -> str:
    doc: dict = {"origin": config.origin, "sites": [list(s) for s in config.sites]}
    if ids:
        doc["ball_ids"] = list(config.ball_ids)
        doc["basket_ids"] = list(config.basket_ids)
    return json.dumps(doc, separators=(",", ":"))


def configuration_from_json(text: str) -> Configuration:
    try:
        doc = json.loads(text)
        origin = int(doc["origin"])
        sites = tuple(SiteState(*map(int, s)).validate() for s in doc["sites"])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"bad configuration JSON: {exc}") from exc
    return Configuration(origin, sites, doc.get("ball_ids"), doc.get("basket_ids"))


def iter_sites(config: Configuration, start: int, stop: int) -> Iterator[SiteState]:
    for i in range(start, stop):
        yield config.site_at(i)
